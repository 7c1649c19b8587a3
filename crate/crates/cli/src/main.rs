//! `chebbound`: error bounds, node planning and verification from the shell.
//!
//! Exit status is 0 on success, 1 when a verification fails or a function
//! produces unusable data, and 2 for malformed invocations.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use chebbound_core::bernstein::{self, GeneralizedBernsteinEllipse};
use chebbound_core::empirical::{self, FunctionKind, ReproductionEntry, ScanPoint};
use chebbound_core::format::{join_f64, join_usize, sig17, sig6, to_json_string, write_csv};
use chebbound_core::planner::PlanComparison;
use chebbound_core::{
    bound_combined, compare_plans, plan_nodes, recursive_bound_b_min, BoundInputs, BoundReport, ChebyshevInterpolant,
    EllipseRadii, Error, Hyperrectangle, MParams, NodeBudget, Pairing, Permutation, Plan, PlanRequest, Selector,
    SigmaSearch, TestFunction, VerificationRecord,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

const THREADS_ENV: &str = "CHEBBOUND_THREADS";

#[derive(Parser)]
#[command(name = "chebbound", version, about = "Chebyshev interpolation error bounds and node planning")]
struct Cli {
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output to this file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the bounds a, b and their minimum for one node budget.
    Bound(BoundArgs),
    /// Find the cheapest node budget meeting an error target.
    Plan(PlanArgs),
    /// Interpolate a built-in function and compare it with the bound.
    Interp(InterpArgs),
    /// Run the verification suite; fails if any bound is violated.
    Verify(VerifyArgs),
    /// Scan a and b over equal radii and locate their crossings.
    Sweep(SweepArgs),
    /// Quoted reference values next to the recomputed ones.
    Reproduce,
    /// Dump |f| on the boundary grid used to estimate V.
    Vscan(VscanArgs),
}

#[derive(Args)]
struct BoundArgs {
    /// Ellipse radii, comma-separated.
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    rho: Vec<f64>,
    /// Polynomial degree per axis, comma-separated.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Bound on |f| over the ellipse.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    v: f64,
    /// Index pairing in the a bound.
    #[arg(long, value_enum, default_value_t = Variant::Consistent)]
    variant: Variant,
    /// Shrinkage epsilon for the recursive bound.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    epsilon: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Consistent,
    Literal,
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    rho: Vec<f64>,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    v: f64,
    /// Target error.
    #[arg(long, allow_negative_numbers = true)]
    eps: f64,
    /// a, b, combined, recursive or all.
    #[arg(long, default_value = "all")]
    selector: String,
}

#[derive(Args)]
struct InterpArgs {
    /// Built-in function id.
    #[arg(long)]
    function: String,
    /// Domain as lo:hi per axis, comma-separated; defaults to the function's own.
    #[arg(long, allow_hyphen_values = true)]
    domain: Option<String>,
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Point at which to compare interpolant and function.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    probe: Option<Vec<f64>>,
    /// Ellipse radii for the bound; defaults to 0.95 of the admissible radius, or 6 in entire directions.
    #[arg(long, value_delimiter = ',')]
    rho: Option<Vec<f64>>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::Default)]
    suite: Suite,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Default,
    Quick,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Radius range lo:hi.
    #[arg(long, default_value = "1.1:20")]
    rho_range: String,
    #[arg(long, default_value_t = 200)]
    steps: usize,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    v: f64,
}

#[derive(Args)]
struct VscanArgs {
    #[arg(long)]
    function: String,
    #[arg(long, allow_hyphen_values = true)]
    domain: Option<String>,
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    rho: Vec<f64>,
    /// Angles per axis, comma-separated or a single value for all axes.
    #[arg(long, value_delimiter = ',', default_value = "16")]
    resolution: Vec<usize>,
}

/// A finished command: its text and whether the process should report failure.
struct Outcome {
    text: String,
    failed: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, failed: false }
    }
}

enum CliError {
    Usage(String),
    Data(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Usage(m) | Error::Domain(m) => CliError::Usage(m),
            Error::Data(m) => CliError::Data(m),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) => {
            if outcome.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Data(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> CliResult<Outcome> {
    configure_threads()?;
    let format = cli.format;
    let outcome = match cli.command {
        Command::Bound(a) => cmd_bound(&a, format.unwrap_or(Format::Table))?,
        Command::Plan(a) => cmd_plan(&a, format.unwrap_or(Format::Table))?,
        Command::Interp(a) => cmd_interp(&a, format.unwrap_or(Format::Table))?,
        Command::Verify(a) => cmd_verify(&a, format.unwrap_or(Format::Csv))?,
        Command::Sweep(a) => cmd_sweep(&a, format.unwrap_or(Format::Csv))?,
        Command::Reproduce => cmd_reproduce(format.unwrap_or(Format::Csv))?,
        Command::Vscan(a) => cmd_vscan(&a, format.unwrap_or(Format::Csv))?,
    };
    match &cli.output {
        Some(path) => std::fs::write(path, &outcome.text)
            .map_err(|e| CliError::Data(format!("--output: cannot write {}: {e}", path.display())))?,
        None => print!("{}", outcome.text),
    }
    Ok(outcome)
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| usage(format!("{THREADS_ENV} must be a non-negative integer, got {raw:?}")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Data(format!("cannot configure {n} threads: {e}")))?;
    }
    Ok(())
}

fn check_rho(rho: &[f64]) -> CliResult<()> {
    if rho.is_empty() {
        return Err(usage("--rho: at least one radius is required"));
    }
    for &r in rho {
        if !(r.is_finite() && r > 1.0) {
            return Err(usage(format!("--rho: rho must exceed 1 and be finite, got {r}")));
        }
    }
    Ok(())
}

fn check_positive(flag: &str, x: f64) -> CliResult<()> {
    if !(x.is_finite() && x > 0.0) {
        return Err(usage(format!("--{flag}: {flag} must be positive and finite, got {x}")));
    }
    Ok(())
}

fn check_dims(rho: usize, n: usize) -> CliResult<()> {
    if rho != n {
        return Err(usage(format!("--n: {n} degrees given for {rho} radii")));
    }
    Ok(())
}

fn parse_range(flag: &str, text: &str) -> CliResult<(f64, f64)> {
    let bad = || usage(format!("--{flag}: expected lo:hi, got {text:?}"));
    let (lo, hi) = text.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    Ok((lo, hi))
}

fn parse_domain(text: &str) -> CliResult<Hyperrectangle> {
    let axes = text
        .split(',')
        .map(|axis| parse_range("domain", axis))
        .collect::<CliResult<Vec<_>>>()?;
    Hyperrectangle::new(&axes).map_err(|e| usage(format!("--domain: {}", plain(&e))))
}

/// The message of a library error without its kind prefix.
fn plain(e: &Error) -> &str {
    match e {
        Error::Usage(m) | Error::Domain(m) | Error::Data(m) => m,
    }
}

fn list_f64(values: &[f64]) -> String {
    values.iter().map(|&x| sig6(x)).collect::<Vec<_>>().join(", ")
}

fn list_usize(values: &[usize]) -> String {
    values.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn search_label(s: SigmaSearch) -> &'static str {
    match s {
        SigmaSearch::Exhaustive => "EXHAUSTIVE",
        SigmaSearch::Heuristic => "HEURISTIC",
    }
}

/// Two-column aligned table.
fn table(rows: &[(&str, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in rows {
        let _ = writeln!(out, "{k:<width$}  {v}");
    }
    out
}

fn with_newline(mut text: String) -> String {
    if !text.ends_with('\n') {
        text.push('\n');
    }
    text
}

// ---------------------------------------------------------------- bound

/// Values quoted elsewhere for two standard inputs with `V = 1`.
fn quoted_reference(rho: &[f64], n: &[usize], v: f64) -> Option<QuotedReference> {
    if n != [10, 10] || v != 1.0 {
        return None;
    }
    match rho {
        [r1, r2] if *r1 == 2.3 && *r2 == 1.8 => Some(QuotedReference { a: 0.0066, b: 0.0018 }),
        [r1, r2] if *r1 == 2.3 && *r2 == 2.5 => Some(QuotedReference { a: 0.0011, b: 0.0017 }),
        _ => None,
    }
}

#[derive(Serialize)]
struct QuotedReference {
    a: f64,
    b: f64,
}

#[derive(Serialize)]
struct BoundOutput {
    #[serde(flatten)]
    report: BoundReport,
    recursive_b: f64,
    recursive_sigma: Permutation,
    recursive_epsilon: f64,
    quoted_reference: Option<QuotedReference>,
}

fn cmd_bound(a: &BoundArgs, format: Format) -> CliResult<Outcome> {
    check_rho(&a.rho)?;
    check_dims(a.rho.len(), a.n.len())?;
    check_positive("v", a.v)?;
    let params = MParams::new(a.epsilon).map_err(|e| usage(format!("--epsilon: {}", plain(&e))))?;
    let min_rho = a.rho.iter().copied().fold(f64::INFINITY, f64::min);
    if !(a.epsilon.is_finite() && 1.0 + a.epsilon < min_rho) {
        return Err(usage(format!("--epsilon: 1 + epsilon must stay below the smallest rho {min_rho}")));
    }
    let inputs = BoundInputs::from_slices(&a.rho, &a.n, a.v)?;
    let pairing = match a.variant {
        Variant::Consistent => Pairing::Consistent,
        Variant::Literal => Pairing::Literal,
    };
    let report = bound_combined(&inputs, pairing);
    let recursive = recursive_bound_b_min(&inputs, &params)?;
    let out = BoundOutput {
        report,
        recursive_b: recursive.value,
        recursive_sigma: recursive.sigma,
        recursive_epsilon: a.epsilon,
        quoted_reference: quoted_reference(&a.rho, &a.n, a.v),
    };
    let text = match format {
        Format::Json => with_newline(to_json_string(&out)),
        Format::Csv => bound_csv(&out),
        Format::Table => bound_table(&out),
    };
    Ok(Outcome::ok(text))
}

fn bound_csv(o: &BoundOutput) -> String {
    let r = &o.report;
    write_csv(
        "rho,degrees,v,a,b,combined,winner,sigma,sigma_search,pairing,recursive_b,underflow",
        [vec![
            join_f64(&r.inputs.rho),
            join_usize(&r.inputs.degrees),
            sig17(r.inputs.v),
            sig17(r.a_value),
            sig17(r.b_value),
            sig17(r.combined),
            empirical::winner_label(r.winner).to_string(),
            join_usize(&r.sigma_star.one_based()),
            search_label(r.sigma_search).to_string(),
            match r.pairing {
                Pairing::Consistent => "consistent".to_string(),
                Pairing::Literal => "literal".to_string(),
            },
            sig17(o.recursive_b),
            r.underflow.to_string(),
        ]],
    )
}

fn bound_table(o: &BoundOutput) -> String {
    let r = &o.report;
    let mut text = table(&[
        ("rho", list_f64(&r.inputs.rho)),
        ("N", list_usize(&r.inputs.degrees)),
        ("V", sig6(r.inputs.v)),
        ("a", sig6(r.a_value)),
        ("b", sig6(r.b_value)),
        ("combined", sig6(r.combined)),
        ("sigma*", format!("{} ({})", r.sigma_star, search_label(r.sigma_search))),
        ("winner", empirical::winner_label(r.winner).to_string()),
        (
            "recursive B",
            format!("{} (sigma {}, epsilon {})", sig6(o.recursive_b), o.recursive_sigma, sig6(o.recursive_epsilon)),
        ),
    ]);
    if r.underflow {
        text.push_str("note: a bound below the smallest normal double is reported as 0\n");
    }
    if let Some(q) = &o.quoted_reference {
        let _ = writeln!(
            text,
            "note: reference values quoted for this input are a = {}, b = {}; \
             the formulas as implemented give the values above",
            q.a, q.b
        );
    }
    text
}

// ---------------------------------------------------------------- plan

fn cmd_plan(a: &PlanArgs, format: Format) -> CliResult<Outcome> {
    check_rho(&a.rho)?;
    check_positive("v", a.v)?;
    check_positive("eps", a.eps)?;
    let all = a.selector.eq_ignore_ascii_case("all");
    let selector = if all {
        None
    } else {
        Some(
            a.selector
                .parse::<Selector>()
                .map_err(|_| usage(format!("--selector: expected a, b, combined, recursive or all, got {:?}", a.selector)))?,
        )
    };
    let radii = EllipseRadii::new(a.rho.clone())?;
    let text = match selector {
        None => {
            let cmp = compare_plans(&radii, a.v, a.eps)?;
            match format {
                Format::Json => with_newline(cmp.to_json()),
                Format::Csv => plans_csv(&cmp.plans),
                Format::Table => comparison_table(&cmp),
            }
        }
        Some(s) => {
            let plan = plan_nodes(&PlanRequest::new(radii, a.v, a.eps, s)?)?;
            match format {
                Format::Json => with_newline(plan.to_json()),
                Format::Csv => plans_csv(std::slice::from_ref(&plan)),
                Format::Table => plans_table(std::slice::from_ref(&plan)),
            }
        }
    };
    Ok(Outcome::ok(text))
}

fn plans_csv(plans: &[Plan]) -> String {
    write_csv(
        "selector,budget,grid_points,certified_bound",
        plans.iter().map(|p| {
            vec![
                p.selector.to_string(),
                join_usize(p.budget.degrees()),
                p.grid_points.to_string(),
                sig17(p.certified_bound),
            ]
        }),
    )
}

fn plans_table(plans: &[Plan]) -> String {
    let mut out = format!("{:<10}  {:<16}  {:>12}  {}\n", "selector", "budget", "grid points", "bound");
    for p in plans {
        let _ = writeln!(
            out,
            "{:<10}  {:<16}  {:>12}  {}",
            p.selector.to_string(),
            p.budget.to_string(),
            p.grid_points,
            sig6(p.certified_bound)
        );
    }
    out
}

fn comparison_table(cmp: &PlanComparison) -> String {
    let mut out = plans_table(&cmp.plans);
    let _ = writeln!(out, "combined / a grid points  {}", sig6(cmp.combined_over_a));
    let _ = writeln!(out, "combined / b grid points  {}", sig6(cmp.combined_over_b));
    out
}

// ---------------------------------------------------------------- interp

fn resolve_function(id: &str, domain: Option<&str>) -> CliResult<TestFunction> {
    let f = empirical::builtin(id).map_err(|e| usage(format!("--function: {}", plain(&e))))?;
    match domain {
        None => Ok(f),
        Some(text) => {
            let domain = parse_domain(text)?;
            TestFunction::new(f.id(), f.description(), domain, f.kind().clone())
                .map_err(|e| usage(format!("--domain: {}", plain(&e))))
        }
    }
}

fn default_radii(f: &TestFunction) -> Vec<f64> {
    f.admissible_rho()
        .iter()
        .map(|&adm| if adm.is_finite() { 0.95 * adm } else { 6.0 })
        .collect()
}

#[derive(Serialize)]
struct ProbeReport {
    point: Vec<f64>,
    interpolant: f64,
    function: f64,
    abs_error: f64,
}

#[derive(Serialize)]
struct InterpReport {
    function_id: String,
    family: FunctionKind,
    domain: Vec<[f64; 2]>,
    budget: NodeBudget,
    radii: Vec<f64>,
    v_estimate: f64,
    probe: Option<ProbeReport>,
    empirical_error: f64,
    bound_a: f64,
    bound_b: f64,
    bound_combined: f64,
    dominated: bool,
}

fn cmd_interp(a: &InterpArgs, format: Format) -> CliResult<Outcome> {
    let f = resolve_function(&a.function, a.domain.as_deref())?;
    let d = f.dim();
    if a.n.len() != d {
        return Err(usage(format!("--n: {} degrees given for a {d}-dimensional function", a.n.len())));
    }
    let radii = match &a.rho {
        Some(rho) => {
            check_rho(rho)?;
            f.check_admissible(rho).map_err(|e| usage(format!("--rho: {}", plain(&e))))?;
            rho.clone()
        }
        None => default_radii(&f),
    };
    if let Some(p) = &a.probe {
        if p.len() != d {
            return Err(usage(format!("--probe: {} coordinates given for a {d}-dimensional function", p.len())));
        }
        if !f.domain().contains(p) {
            return Err(usage(format!("--probe: point ({}) lies outside the domain", list_f64(p))));
        }
    }
    let budget = NodeBudget::new(a.n.clone()).map_err(|e| usage(format!("--n: {}", plain(&e))))?;
    let interp = ChebyshevInterpolant::fit(|x| f.eval(x), f.domain(), &budget)?;
    let probe = match &a.probe {
        Some(p) => {
            let value = interp.evaluate(p)?;
            let exact = f.eval(p);
            Some(ProbeReport {
                point: p.clone(),
                interpolant: value,
                function: exact,
                abs_error: (value - exact).abs(),
            })
        }
        None => None,
    };
    let resolution = vec![empirical::default_probe_resolution(d); d];
    let empirical_error = empirical::sup_error(&f, &interp, &resolution)?;
    let v = f.estimate_v(&radii)?;
    let bounds = bound_combined(&BoundInputs::new(EllipseRadii::new(radii.clone())?, budget.clone(), v)?, Pairing::Consistent);
    let report = InterpReport {
        function_id: f.id().to_string(),
        family: f.kind().clone(),
        domain: f.domain().bounds(),
        budget,
        radii,
        v_estimate: v,
        probe,
        empirical_error,
        bound_a: bounds.a_value,
        bound_b: bounds.b_value,
        bound_combined: bounds.combined,
        dominated: empirical::dominated(empirical_error, bounds.combined),
    };
    let text = match format {
        Format::Json => with_newline(to_json_string(&report)),
        Format::Csv => interp_csv(&report),
        Format::Table => interp_table(&report),
    };
    Ok(Outcome::ok(text))
}

fn interp_csv(r: &InterpReport) -> String {
    let domain: Vec<f64> = r.domain.iter().flatten().copied().collect();
    let (point, value, exact) = match &r.probe {
        Some(p) => (join_f64(&p.point), sig17(p.interpolant), sig17(p.function)),
        None => Default::default(),
    };
    write_csv(
        "function_id,domain,budget,radii,v_estimate,probe,interpolant,function,empirical_error,bound_a,bound_b,bound_combined,dominated",
        [vec![
            r.function_id.clone(),
            join_f64(&domain),
            join_usize(r.budget.degrees()),
            join_f64(&r.radii),
            sig17(r.v_estimate),
            point,
            value,
            exact,
            sig17(r.empirical_error),
            sig17(r.bound_a),
            sig17(r.bound_b),
            sig17(r.bound_combined),
            r.dominated.to_string(),
        ]],
    )
}

fn interp_table(r: &InterpReport) -> String {
    let domain = r
        .domain
        .iter()
        .map(|[lo, hi]| format!("[{}, {}]", sig6(*lo), sig6(*hi)))
        .collect::<Vec<_>>()
        .join(" x ");
    let mut rows = vec![
        ("function", r.function_id.clone()),
        ("domain", domain),
        ("N", list_usize(r.budget.degrees())),
        ("rho", list_f64(&r.radii)),
        ("V estimate", sig6(r.v_estimate)),
    ];
    if let Some(p) = &r.probe {
        rows.push(("probe", list_f64(&p.point)));
        rows.push(("interpolant", sig6(p.interpolant)));
        rows.push(("function value", sig6(p.function)));
        rows.push(("probe error", sig6(p.abs_error)));
    }
    rows.extend([
        ("empirical error", sig6(r.empirical_error)),
        ("a", sig6(r.bound_a)),
        ("b", sig6(r.bound_b)),
        ("combined", sig6(r.bound_combined)),
        ("dominated", r.dominated.to_string()),
    ]);
    table(&rows)
}

// ---------------------------------------------------------------- verify

fn cmd_verify(a: &VerifyArgs, format: Format) -> CliResult<Outcome> {
    let cases = match a.suite {
        Suite::Default => empirical::default_suite(),
        Suite::Quick => empirical::quick_suite(),
    };
    let records = empirical::verify_domination(&cases)?;
    let failures = records.iter().filter(|r| !r.passed).count();
    let text = match format {
        Format::Json => with_newline(to_json_string(&records)),
        Format::Csv => empirical::verification_csv(&records),
        Format::Table => verification_table(&records),
    };
    eprintln!("{} records, {} passed, {failures} failed", records.len(), records.len() - failures);
    Ok(Outcome {
        text,
        failed: failures > 0,
    })
}

fn verification_table(records: &[VerificationRecord]) -> String {
    let mut out = format!(
        "{:<20}  {:<12}  {:>12}  {:>12}  {:>12}  {}\n",
        "function", "budget", "error", "combined", "V", "passed"
    );
    for r in records {
        let _ = writeln!(
            out,
            "{:<20}  {:<12}  {:>12}  {:>12}  {:>12}  {}",
            r.function_id,
            r.budget.to_string(),
            sig6(r.empirical_error),
            sig6(r.bound_combined),
            sig6(r.v_estimate),
            r.passed
        );
    }
    out
}

// ---------------------------------------------------------------- sweep

fn cmd_sweep(a: &SweepArgs, format: Format) -> CliResult<Outcome> {
    let (lo, hi) = parse_range("rho-range", &a.rho_range)?;
    if !(lo > 1.0 && hi > lo && hi.is_finite()) {
        return Err(usage(format!("--rho-range: need 1 < lo < hi, got {lo}:{hi}")));
    }
    if a.d == 0 {
        return Err(usage("--d: dimension must be at least 1"));
    }
    if a.steps < 2 {
        return Err(usage("--steps: at least 2 steps are required"));
    }
    check_positive("v", a.v)?;
    let points = empirical::crossover_scan(a.n, a.d, lo, hi, a.steps, a.v)?;
    let text = match format {
        Format::Json => with_newline(to_json_string(&points)),
        Format::Csv => empirical::scan_csv(&points),
        Format::Table => scan_table(&points),
    };
    Ok(Outcome::ok(text))
}

fn scan_table(points: &[ScanPoint]) -> String {
    let mut out = format!("{:>12}  {:>12}  {:>12}  {:<6}  {}\n", "rho", "a", "b", "winner", "crossover");
    for p in points {
        let _ = writeln!(
            out,
            "{:>12}  {:>12}  {:>12}  {:<6}  {}",
            sig6(p.rho),
            sig6(p.a),
            sig6(p.b),
            empirical::winner_label(p.winner),
            if p.crossover { "*" } else { "" }
        );
    }
    out
}

// ---------------------------------------------------------------- reproduce

fn cmd_reproduce(format: Format) -> CliResult<Outcome> {
    let entries = empirical::reproduction_report()?;
    let text = match format {
        Format::Json => with_newline(to_json_string(&entries)),
        Format::Csv => empirical::reproduction_csv(&entries),
        Format::Table => reproduction_table(&entries),
    };
    Ok(Outcome::ok(text))
}

fn reproduction_table(entries: &[ReproductionEntry]) -> String {
    let mut out = format!("{:<24}  {:<28}  {:>10}  {:>12}\n", "case", "quantity", "quoted", "computed");
    for e in entries {
        let quoted = e.quoted.map_or("-".to_string(), |q| q.to_string());
        let _ = writeln!(out, "{:<24}  {:<28}  {:>10}  {:>12}", e.case, e.quantity, quoted, sig6(e.computed));
    }
    out
}

// ---------------------------------------------------------------- vscan

fn cmd_vscan(a: &VscanArgs, format: Format) -> CliResult<Outcome> {
    let f = resolve_function(&a.function, a.domain.as_deref())?;
    let d = f.dim();
    check_rho(&a.rho)?;
    if a.rho.len() != d {
        return Err(usage(format!("--rho: {} radii given for a {d}-dimensional function", a.rho.len())));
    }
    let resolution = match a.resolution.len() {
        1 => vec![a.resolution[0]; d],
        k if k == d => a.resolution.clone(),
        k => return Err(usage(format!("--resolution: {k} values given for a {d}-dimensional function"))),
    };
    let ellipse = GeneralizedBernsteinEllipse::new(f.domain().clone(), EllipseRadii::new(a.rho.clone())?)?;
    let samples = bernstein::boundary_scan(|z| f.eval_complex(z), &ellipse, &resolution)
        .map_err(|e| usage(format!("--resolution: {}", plain(&e))))?;
    let text = match format {
        Format::Csv | Format::Table => write_csv(
            "theta_index,point_re,point_im,modulus",
            samples.iter().map(|s| {
                let re: Vec<f64> = s.point.iter().map(|z| z.re).collect();
                let im: Vec<f64> = s.point.iter().map(|z| z.im).collect();
                vec![join_usize(&s.theta_index), join_f64(&re), join_f64(&im), sig17(s.modulus)]
            }),
        ),
        Format::Json => {
            #[derive(Serialize)]
            struct Sample {
                theta_index: Vec<usize>,
                point_re: Vec<f64>,
                point_im: Vec<f64>,
                modulus: f64,
            }
            let rows: Vec<Sample> = samples
                .iter()
                .map(|s| Sample {
                    theta_index: s.theta_index.clone(),
                    point_re: s.point.iter().map(|z| z.re).collect(),
                    point_im: s.point.iter().map(|z| z.im).collect(),
                    modulus: s.modulus,
                })
                .collect();
            with_newline(to_json_string(&rows))
        }
    };
    Ok(Outcome::ok(text))
}
