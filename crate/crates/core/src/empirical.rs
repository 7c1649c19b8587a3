//! Measured interpolation error on test functions with known analyticity.
//!
//! Each [`TestFunction`] carries the largest per-axis radius for which it is
//! analytic on the generalized ellipse, computed from its singularities. The
//! harness fits an interpolant, probes its error densely, estimates `V` on
//! the ellipse and checks the result against the bounds.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bernstein::{self, EllipseRadii, GeneralizedBernsteinEllipse, DEFAULT_V_RESOLUTION};
use crate::bounds::{self, BoundInputs, Pairing, Winner};
use crate::cheb::{ChebyshevInterpolant, Hyperrectangle, NodeBudget};
use crate::error::{Error, Result};
use crate::format::{join_f64, join_usize, sig17, write_csv};
use crate::planner::{self, Selector};

/// Scheduled radii must stay below this fraction of the admissible radius.
pub const ADMISSIBILITY_MARGIN: f64 = 0.98;

/// Seed of the random probe points.
pub const PROBE_SEED: u64 = 0x5EED;

/// Random probes per dimension, added to the product grid.
pub const RANDOM_PROBES_PER_DIM: usize = 100;

pub const MIN_PROBE_RESOLUTION: usize = 33;

/// Extra absolute and relative room granted to the domination check.
pub const PASS_ABS_SLACK: f64 = 1e-12;
pub const PASS_REL_SLACK: f64 = 1e-10;

/// Default product-grid probe count per axis.
pub fn default_probe_resolution(dim: usize) -> usize {
    match dim {
        1 => 513,
        2 => 129,
        3 => 65,
        _ => MIN_PROBE_RESOLUTION,
    }
}

/// Default boundary angle count per axis for estimating `V`.
pub fn default_v_resolution(dim: usize) -> usize {
    match dim {
        1 | 2 => DEFAULT_V_RESOLUTION,
        3 => 64,
        _ => 16,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FunctionKind {
    /// `prod_i 1 / (c_i - x_i)`.
    SeparableRational { c: Vec<f64> },
    /// `exp(sum_i alpha_i x_i)`.
    Exponential { alpha: Vec<f64> },
    /// `1 / (c - sum_i beta_i x_i)`.
    CoupledRational { c: f64, beta: Vec<f64> },
    /// `sum coef * prod_i x_i^k_i`.
    Polynomial { terms: Vec<(f64, Vec<u32>)> },
}

impl FunctionKind {
    fn dim(&self) -> usize {
        match self {
            FunctionKind::SeparableRational { c } => c.len(),
            FunctionKind::Exponential { alpha } => alpha.len(),
            FunctionKind::CoupledRational { beta, .. } => beta.len(),
            FunctionKind::Polynomial { terms } => terms.first().map_or(0, |t| t.1.len()),
        }
    }
}

/// An analytic test function on a fixed domain.
#[derive(Clone, Debug, PartialEq)]
pub struct TestFunction {
    id: String,
    description: String,
    domain: Hyperrectangle,
    kind: FunctionKind,
    admissible_rho: Vec<f64>,
}

impl TestFunction {
    pub fn new(id: impl Into<String>, description: impl Into<String>, domain: Hyperrectangle, kind: FunctionKind) -> Result<Self> {
        let id = id.into();
        if kind.dim() != domain.dim() {
            return Err(Error::usage(format!(
                "{id}: function has {} variables but the domain has {}",
                kind.dim(),
                domain.dim()
            )));
        }
        let admissible_rho = admissible_radii(&kind, &domain).map_err(|e| Error::usage(format!("{id}: {e}")))?;
        Ok(Self {
            id,
            description: description.into(),
            domain,
            kind,
            admissible_rho,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn domain(&self) -> &Hyperrectangle {
        &self.domain
    }

    pub fn kind(&self) -> &FunctionKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// Supremum of admissible radii per axis; infinite for entire directions.
    pub fn admissible_rho(&self) -> &[f64] {
        &self.admissible_rho
    }

    /// Largest polynomial degree per axis, if the function is a polynomial.
    pub fn polynomial_degrees(&self) -> Option<Vec<u32>> {
        match &self.kind {
            FunctionKind::Polynomial { terms } => Some(
                (0..self.dim())
                    .map(|i| terms.iter().map(|t| t.1[i]).max().unwrap_or(0))
                    .collect(),
            ),
            _ => None,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match &self.kind {
            FunctionKind::SeparableRational { c } => c.iter().zip(x).map(|(c, x)| 1.0 / (c - x)).product(),
            FunctionKind::Exponential { alpha } => alpha.iter().zip(x).map(|(a, x)| a * x).sum::<f64>().exp(),
            FunctionKind::CoupledRational { c, beta } => 1.0 / (c - beta.iter().zip(x).map(|(b, x)| b * x).sum::<f64>()),
            FunctionKind::Polynomial { terms } => terms
                .iter()
                .map(|(coef, k)| coef * x.iter().zip(k).map(|(x, &k)| x.powi(k as i32)).product::<f64>())
                .sum(),
        }
    }

    pub fn eval_complex(&self, z: &[Complex64]) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        match &self.kind {
            FunctionKind::SeparableRational { c } => c.iter().zip(z).map(|(&c, &z)| one / (c - z)).product(),
            FunctionKind::Exponential { alpha } => alpha.iter().zip(z).map(|(&a, &z)| a * z).sum::<Complex64>().exp(),
            FunctionKind::CoupledRational { c, beta } => one / (c - beta.iter().zip(z).map(|(&b, &z)| b * z).sum::<Complex64>()),
            FunctionKind::Polynomial { terms } => terms
                .iter()
                .map(|(coef, k)| coef * z.iter().zip(k).map(|(z, &k)| z.powu(k)).product::<Complex64>())
                .sum(),
        }
    }

    /// Checks `rho` against the admissible radii with the harness margin.
    pub fn check_admissible(&self, rho: &[f64]) -> Result<()> {
        if rho.len() != self.dim() {
            return Err(Error::usage(format!(
                "{}: {} radii for a {}-dimensional function",
                self.id,
                rho.len(),
                self.dim()
            )));
        }
        for (i, (&r, &adm)) in rho.iter().zip(&self.admissible_rho).enumerate() {
            if r.is_nan() || r >= ADMISSIBILITY_MARGIN * adm {
                return Err(Error::usage(format!(
                    "{}: rho[{i}] = {r} is not below {ADMISSIBILITY_MARGIN} x admissible radius {adm}",
                    self.id
                )));
            }
        }
        Ok(())
    }

    /// `V` estimated on the ellipse with the given radii.
    pub fn estimate_v(&self, rho: &[f64]) -> Result<f64> {
        let ellipse = GeneralizedBernsteinEllipse::new(self.domain.clone(), EllipseRadii::new(rho.to_vec())?)?;
        let res = vec![default_v_resolution(self.dim()); self.dim()];
        bernstein::estimate_v(|z| self.eval_complex(z), &ellipse, &res)
    }
}

fn admissible_radii(kind: &FunctionKind, domain: &Hyperrectangle) -> Result<Vec<f64>> {
    let axes = domain.axes();
    match kind {
        FunctionKind::SeparableRational { c } => c
            .iter()
            .zip(axes)
            .map(|(&c, axis)| bernstein::rho_for_real_singularity(c, axis))
            .collect(),
        FunctionKind::Exponential { .. } | FunctionKind::Polynomial { .. } => Ok(vec![f64::INFINITY; axes.len()]),
        FunctionKind::CoupledRational { c, beta } => {
            // On the box of ellipses, Re(sum beta x) <= sum beta mid + sum |beta| half a_i,
            // with a_i the reference semi-major axis; keep every a_i below kappa.
            let shift: f64 = beta.iter().zip(axes).map(|(b, a)| b * a.midpoint()).sum();
            let spread: f64 = beta.iter().zip(axes).map(|(b, a)| b.abs() * a.half_width()).sum();
            if spread == 0.0 {
                return Ok(vec![f64::INFINITY; axes.len()]);
            }
            let kappa = (c - shift) / spread;
            if kappa.is_nan() || kappa <= 1.0 {
                return Err(Error::usage(format!(
                    "c = {c} does not exceed the range of sum beta_i x_i over the domain"
                )));
            }
            let rho = kappa + (kappa * kappa - 1.0).sqrt();
            Ok(beta
                .iter()
                .map(|&b| if b == 0.0 { f64::INFINITY } else { rho })
                .collect())
        }
    }
}

fn reference_box(dim: usize) -> Hyperrectangle {
    Hyperrectangle::reference(dim).expect("positive dimension")
}

fn make(id: &str, description: &str, domain: Hyperrectangle, kind: FunctionKind) -> TestFunction {
    TestFunction::new(id, description, domain, kind).expect("builtin families are well formed")
}

/// The built-in test functions, in a fixed order.
pub fn builtin_families() -> Vec<TestFunction> {
    use FunctionKind::*;
    let shifted = Hyperrectangle::new(&[(0.0, 2.0)]).expect("valid box");
    let skewed = Hyperrectangle::new(&[(0.0, 1.0), (-2.0, 2.0)]).expect("valid box");
    vec![
        make("rational-1d", "1/(1.25 - x) on [-1,1]", reference_box(1), SeparableRational { c: vec![1.25] }),
        make("rational-1d-far", "1/(3 - x) on [-1,1]", reference_box(1), SeparableRational { c: vec![3.0] }),
        make("rational-1d-shifted", "1/(2.5 - x) on [0,2]", shifted, SeparableRational { c: vec![2.5] }),
        make("exp-1d", "exp(1.5 x) on [-1,1]", reference_box(1), Exponential { alpha: vec![1.5] }),
        make("poly-1d", "4x^3 - 3x on [-1,1]", reference_box(1), Polynomial { terms: vec![(4.0, vec![3]), (-3.0, vec![1])] }),
        make("const-1d", "1 on [-1,1]", reference_box(1), Polynomial { terms: vec![(1.0, vec![0])] }),
        make("rational-2d", "1/((1.3 - x)(1.6 - y)) on [-1,1]^2", reference_box(2), SeparableRational { c: vec![1.3, 1.6] }),
        make(
            "rational-2d-box",
            "1/((1.4 - x)(3 - y)) on [0,1]x[-2,2]",
            skewed,
            SeparableRational { c: vec![1.4, 3.0] },
        ),
        make("exp-2d", "exp(x - 0.5 y) on [-1,1]^2", reference_box(2), Exponential { alpha: vec![1.0, -0.5] }),
        make(
            "coupled-2d",
            "1/(3 - x - 0.8 y) on [-1,1]^2",
            reference_box(2),
            CoupledRational { c: 3.0, beta: vec![1.0, 0.8] },
        ),
        make(
            "poly-2d",
            "x^2 y + 0.5 y^3 - x on [-1,1]^2",
            reference_box(2),
            Polynomial { terms: vec![(1.0, vec![2, 1]), (0.5, vec![0, 3]), (-1.0, vec![1, 0])] },
        ),
        make(
            "rational-3d",
            "1/((1.5 - x)(2 - y)(3 - z)) on [-1,1]^3",
            reference_box(3),
            SeparableRational { c: vec![1.5, 2.0, 3.0] },
        ),
        make("exp-3d", "exp(0.5x + y - 0.7z) on [-1,1]^3", reference_box(3), Exponential { alpha: vec![0.5, 1.0, -0.7] }),
        make(
            "coupled-3d",
            "1/(4 - x - y - z) on [-1,1]^3",
            reference_box(3),
            CoupledRational { c: 4.0, beta: vec![1.0, 1.0, 1.0] },
        ),
        make(
            "poly-3d",
            "xyz + x^2 - z^3 on [-1,1]^3",
            reference_box(3),
            Polynomial { terms: vec![(1.0, vec![1, 1, 1]), (1.0, vec![2, 0, 0]), (-1.0, vec![0, 0, 3])] },
        ),
    ]
}

/// Looks up a built-in function by id.
pub fn builtin(id_query: &str) -> Result<TestFunction> {
    builtin_families()
        .into_iter()
        .find(|f| f.id == id_query)
        .ok_or_else(|| {
            let ids: Vec<String> = builtin_families().into_iter().map(|f| f.id).collect();
            Error::usage(format!("unknown function {id_query:?}; available: {}", ids.join(", ")))
        })
}

/// Probe abscissae `cos(pi (2m+1) / (2r))` on `[-1, 1]`. The angle is taken
/// from the reduced fraction, so tripling `r` keeps every previous probe
/// bit for bit.
pub fn probe_points(r: usize) -> Vec<f64> {
    (0..r)
        .map(|m| {
            let (p, q) = (2 * m + 1, 2 * r);
            let g = bernstein::gcd(p, q);
            (std::f64::consts::PI * (p / g) as f64 / (q / g) as f64).cos()
        })
        .collect()
}

/// Largest `|f - I|` over a product probe grid plus seeded random points.
pub fn sup_error(f: &TestFunction, interpolant: &ChebyshevInterpolant, resolution: &[usize]) -> Result<f64> {
    let d = f.dim();
    if interpolant.domain() != f.domain() {
        return Err(Error::usage(format!("interpolant domain differs from the domain of {}", f.id)));
    }
    if resolution.len() != d {
        return Err(Error::usage(format!("{} probe counts for a {d}-dimensional function", resolution.len())));
    }
    if let Some(r) = resolution.iter().find(|&&r| r < MIN_PROBE_RESOLUTION) {
        return Err(Error::usage(format!("probe resolution {r} is below {MIN_PROBE_RESOLUTION}")));
    }
    let axes: Vec<Vec<f64>> = resolution.iter().map(|&r| probe_points(r)).collect();
    let total = resolution
        .iter()
        .try_fold(1usize, |acc, &r| acc.checked_mul(r))
        .ok_or_else(|| Error::usage("probe grid is too large"))?;
    let domain = f.domain();
    let error_at = |u: &[f64]| -> f64 {
        let x: Vec<f64> = domain.axes().iter().zip(u).map(|(a, &u)| a.from_reference(u)).collect();
        (f.eval(&x) - interpolant.evaluate_reference(u)).abs()
    };

    let grid_max = (0..total)
        .into_par_iter()
        .map_init(
            || vec![0.0; d],
            |u, mut flat| {
                for axis in (0..d).rev() {
                    u[axis] = axes[axis][flat % resolution[axis]];
                    flat /= resolution[axis];
                }
                error_at(u)
            },
        )
        .reduce(|| 0.0, nan_max);

    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    let random: Vec<Vec<f64>> = (0..RANDOM_PROBES_PER_DIM * d)
        .map(|_| (0..d).map(|_| rng.random_range(-1.0..=1.0)).collect())
        .collect();
    let random_max = random.iter().map(|u| error_at(u)).fold(0.0, nan_max);

    let max = nan_max(grid_max, random_max);
    if max.is_nan() {
        return Err(Error::data(format!("{} or its interpolant is not finite on the domain", f.id)));
    }
    Ok(max)
}

/// Maximum that propagates NaN.
fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// One scheduled run of the harness.
#[derive(Clone, Debug, PartialEq)]
pub struct VerificationCase {
    pub function: TestFunction,
    pub radii: Vec<f64>,
    pub budget: NodeBudget,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationRecord {
    pub function_id: String,
    pub domain: Vec<[f64; 2]>,
    pub radii: Vec<f64>,
    pub v_estimate: f64,
    pub budget: NodeBudget,
    pub empirical_error: f64,
    pub bound_a: f64,
    pub bound_b: f64,
    pub bound_combined: f64,
    pub passed: bool,
}

/// Whether an empirical error is within the combined bound plus slack.
pub fn dominated(empirical_error: f64, bound: f64) -> bool {
    empirical_error <= bound + PASS_ABS_SLACK + PASS_REL_SLACK * bound
}

/// Runs every case. All radii are checked before anything is computed.
pub fn verify_domination(cases: &[VerificationCase]) -> Result<Vec<VerificationRecord>> {
    for case in cases {
        case.function.check_admissible(&case.radii)?;
        if case.budget.dim() != case.function.dim() {
            return Err(Error::usage(format!(
                "{}: budget {} has the wrong dimension",
                case.function.id, case.budget
            )));
        }
    }
    cases.iter().map(run_case).collect()
}

fn run_case(case: &VerificationCase) -> Result<VerificationRecord> {
    let f = &case.function;
    let v = f.estimate_v(&case.radii)?;
    let interpolant = ChebyshevInterpolant::fit(|x| f.eval(x), f.domain(), &case.budget)?;
    let resolution = vec![default_probe_resolution(f.dim()); f.dim()];
    let empirical_error = sup_error(f, &interpolant, &resolution)?;
    let inputs = BoundInputs::new(EllipseRadii::new(case.radii.clone())?, case.budget.clone(), v)?;
    let report = bounds::bound_combined(&inputs, Pairing::Consistent);
    Ok(VerificationRecord {
        function_id: f.id.clone(),
        domain: f.domain().bounds(),
        radii: case.radii.clone(),
        v_estimate: v,
        budget: case.budget.clone(),
        empirical_error,
        bound_a: report.a_value,
        bound_b: report.b_value,
        bound_combined: report.combined,
        passed: dominated(empirical_error, report.combined),
    })
}

/// Radii for a function: fractions of the admissible radius, or fixed values
/// in entire directions.
fn radius_schedule(f: &TestFunction) -> Vec<Vec<f64>> {
    let pick = |fraction: f64, entire: f64| -> Vec<f64> {
        f.admissible_rho()
            .iter()
            .map(|&adm| if adm.is_finite() { fraction * adm } else { entire })
            .collect()
    };
    vec![pick(0.6, 2.0), pick(0.95, 6.0)]
}

fn budget_schedule(dim: usize) -> Vec<Vec<usize>> {
    match dim {
        1 => vec![vec![2], vec![5], vec![10], vec![15], vec![20], vec![25]],
        2 => vec![vec![4, 4], vec![8, 8], vec![12, 12], vec![6, 10]],
        _ => vec![vec![3; dim], vec![6; dim], vec![9; dim]],
    }
}

fn suite(families: &[TestFunction], budgets: impl Fn(usize) -> Vec<Vec<usize>>) -> Vec<VerificationCase> {
    let mut cases = Vec::new();
    for f in families {
        for radii in radius_schedule(f) {
            for degrees in budgets(f.dim()) {
                cases.push(VerificationCase {
                    function: f.clone(),
                    radii: radii.clone(),
                    budget: NodeBudget::new(degrees).expect("small budget"),
                });
            }
        }
    }
    cases
}

/// Every built-in family over its radius and budget schedules.
pub fn default_suite() -> Vec<VerificationCase> {
    suite(&builtin_families(), budget_schedule)
}

/// A short suite: one function per family kind and dimension, two budgets each.
pub fn quick_suite() -> Vec<VerificationCase> {
    let ids = ["rational-1d", "exp-1d", "poly-1d", "rational-2d", "coupled-2d", "exp-3d"];
    let families: Vec<TestFunction> = builtin_families().into_iter().filter(|f| ids.contains(&f.id())).collect();
    suite(&families, |d| {
        let all = budget_schedule(d);
        vec![all[0].clone(), all[all.len() - 1].clone()]
    })
}

/// Outcome of comparing interpolation coefficients with their decay bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoefficientDecay {
    pub function_id: String,
    pub rho: f64,
    pub degree: usize,
    pub v_estimate: f64,
    /// Largest `|c_k|` divided by its allowance.
    pub worst_ratio: f64,
    pub passed: bool,
}

/// Checks `|c_k| <= 2 V rho^(-k)` for `k = 0..=n`, allowing for the aliased
/// tail `sum_{p>=1} 2 V (rho^(-(2pN-k)) + rho^(-(2pN+k)))` that interpolation
/// folds into each coefficient, plus `1e-12`.
pub fn coefficient_decay_check(f: &TestFunction, rho: f64, n: usize) -> Result<CoefficientDecay> {
    if f.dim() != 1 {
        return Err(Error::usage(format!("{} is not univariate", f.id)));
    }
    f.check_admissible(&[rho])?;
    let v = f.estimate_v(&[rho])?;
    let interpolant = ChebyshevInterpolant::fit(|x| f.eval(x), f.domain(), &NodeBudget::new(vec![n])?)?;
    let nf = n as f64;
    let wrap = if n == 0 { 0.0 } else { 1.0 / (1.0 - rho.powf(-2.0 * nf)) };
    let mut worst: f64 = 0.0;
    for (k, &c) in interpolant.coefficients().iter().enumerate() {
        let kf = k as f64;
        let mut allowance = 2.0 * v * rho.powf(-kf) + 1e-12;
        if n > 0 {
            allowance += 2.0 * v * wrap * (rho.powf(-(2.0 * nf - kf)) + rho.powf(-(2.0 * nf + kf)));
        }
        worst = worst.max(c.abs() / allowance);
    }
    Ok(CoefficientDecay {
        function_id: f.id.clone(),
        rho,
        degree: n,
        v_estimate: v,
        worst_ratio: worst,
        passed: worst <= 1.0,
    })
}

/// Radii and degrees each built-in univariate function is checked at.
pub fn coefficient_decay_schedule(f: &TestFunction) -> Vec<(f64, usize)> {
    let adm = f.admissible_rho()[0];
    let radii = if adm.is_finite() {
        vec![0.7 * adm, 0.95 * adm]
    } else {
        vec![1.5, 2.0, 5.0]
    };
    radii
        .into_iter()
        .flat_map(|r| [4, 10, 30].into_iter().map(move |n| (r, n)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanPoint {
    pub rho: f64,
    pub a: f64,
    pub b: f64,
    pub winner: Winner,
    /// True for the bisected points where `a = b`.
    pub crossover: bool,
}

fn scan_point(rho: f64, n: usize, d: usize, v: f64) -> Result<ScanPoint> {
    let inputs = BoundInputs::new(EllipseRadii::uniform(rho, d)?, NodeBudget::new(vec![n; d])?, v)?;
    let r = bounds::bound_combined(&inputs, Pairing::Consistent);
    Ok(ScanPoint {
        rho,
        a: r.a_value,
        b: r.b_value,
        winner: r.winner,
        crossover: false,
    })
}

/// Bisection tolerance on the crossover radius.
pub const CROSSOVER_TOLERANCE: f64 = 1e-6;

/// `a` and `b` with equal radii and degrees on a log-uniform radius grid.
/// Every change of winner is bisected and inserted, in radius order, as a
/// crossover point.
pub fn crossover_scan(n: usize, d: usize, rho_lo: f64, rho_hi: f64, steps: usize, v: f64) -> Result<Vec<ScanPoint>> {
    if !(rho_lo > 1.0 && rho_hi > rho_lo && rho_hi.is_finite()) {
        return Err(Error::usage(format!("need 1 < rho_lo < rho_hi (got {rho_lo}, {rho_hi})")));
    }
    if steps < 2 {
        return Err(Error::usage(format!("need at least 2 steps (got {steps})")));
    }
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::usage(format!("V must be finite and > 0 (got {v})")));
    }
    let (l0, l1) = (rho_lo.ln(), rho_hi.ln());
    let mut points = (0..steps)
        .map(|j| {
            let rho = if j + 1 == steps {
                rho_hi
            } else {
                (l0 + (l1 - l0) * j as f64 / (steps - 1) as f64).exp()
            };
            scan_point(rho, n, d, v)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut crossings = Vec::new();
    for w in points.windows(2) {
        if w[0].winner != w[1].winner {
            crossings.push(bisect_crossover(w[0].rho, w[1].rho, n, d, v)?);
        }
    }
    points.extend(crossings);
    points.sort_by(|p, q| p.rho.total_cmp(&q.rho));
    Ok(points)
}

fn bisect_crossover(mut lo: f64, mut hi: f64, n: usize, d: usize, v: f64) -> Result<ScanPoint> {
    let sign = |rho: f64| -> Result<bool> {
        let p = scan_point(rho, n, d, v)?;
        Ok(p.a < p.b)
    };
    let lo_sign = sign(lo)?;
    while hi - lo > CROSSOVER_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if sign(mid)? == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut p = scan_point(0.5 * (lo + hi), n, d, v)?;
    p.crossover = true;
    Ok(p)
}

/// A quoted reference value next to its recomputation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReproductionEntry {
    pub case: String,
    pub quantity: String,
    pub quoted: Option<f64>,
    pub computed: f64,
}

fn entry(case: &str, quantity: &str, quoted: Option<f64>, computed: f64) -> ReproductionEntry {
    ReproductionEntry {
        case: case.to_string(),
        quantity: quantity.to_string(),
        quoted,
        computed,
    }
}

pub const CASE_RHO_23_18: &str = "rho=(2.3,1.8) N=(10,10)";
pub const CASE_RHO_23_25: &str = "rho=(2.3,2.5) N=(10,10)";
pub const CASE_PLAN: &str = "rho=(2.95,9.8) eps=2e-4";
pub const CASE_CROSSOVER: &str = "equal radii N=(10,10)";

/// Quoted reference values for a few standard inputs next to what the
/// implemented formulas give. All cases use `V = 1`.
pub fn reproduction_report() -> Result<Vec<ReproductionEntry>> {
    let mut out = Vec::new();
    for (case, rho, quoted_a, quoted_b) in [
        (CASE_RHO_23_18, [2.3, 1.8], 0.0066, 0.0018),
        (CASE_RHO_23_25, [2.3, 2.5], 0.0011, 0.0017),
    ] {
        let inputs = BoundInputs::from_slices(&rho, &[10, 10], 1.0)?;
        let report = bounds::bound_combined(&inputs, Pairing::Consistent);
        let literal = bounds::bound_a(&inputs, Pairing::Literal);
        out.push(entry(case, "a", Some(quoted_a), report.a_value));
        out.push(entry(case, "a (literal pairing)", Some(quoted_a), literal.value));
        out.push(entry(case, "b", Some(quoted_b), report.b_value));
    }

    let radii = EllipseRadii::new(vec![2.95, 9.8])?;
    let cmp = planner::compare_plans(&radii, 1.0, 2e-4)?;
    for (selector, quoted_grid, quoted_degrees) in [
        (Selector::B, Some(72.0), Some([11usize, 5])),
        (Selector::A, Some(45.0), Some([8, 4])),
        (Selector::Combined, None, None),
        (Selector::Recursive, None, None),
    ] {
        let plan = cmp.plan(selector);
        out.push(entry(CASE_PLAN, &format!("{selector} plan grid points"), quoted_grid, plan.grid_points as f64));
        for (axis, &n) in plan.budget.degrees().iter().enumerate() {
            let quoted = quoted_degrees.map(|p| p[axis] as f64);
            out.push(entry(CASE_PLAN, &format!("{selector} plan N{}", axis + 1), quoted, n as f64));
        }
    }
    for degrees in [[11usize, 5], [8, 4]] {
        let e = planner::evaluate_budget(&radii, 1.0, &NodeBudget::new(degrees.to_vec())?)?;
        let label = format!("({},{})", degrees[0], degrees[1]);
        out.push(entry(CASE_PLAN, &format!("a at {label}"), None, e.a));
        out.push(entry(CASE_PLAN, &format!("b at {label}"), None, e.b));
    }

    let scan = crossover_scan(10, 2, 1.1, 20.0, 200, 1.0)?;
    for p in scan.iter().filter(|p| p.crossover) {
        out.push(entry(CASE_CROSSOVER, "crossover radius", Some(2.800882), p.rho));
    }
    Ok(out)
}

pub const VERIFICATION_CSV_HEADER: &str =
    "function_id,domain,radii,v_estimate,budget,empirical_error,bound_a,bound_b,bound_combined,passed";

/// Verification records as CSV; list-valued fields are `;`-separated and the
/// domain lists `lo;hi` per axis.
pub fn verification_csv(records: &[VerificationRecord]) -> String {
    write_csv(
        VERIFICATION_CSV_HEADER,
        records.iter().map(|r| {
            let domain: Vec<f64> = r.domain.iter().flatten().copied().collect();
            vec![
                r.function_id.clone(),
                join_f64(&domain),
                join_f64(&r.radii),
                sig17(r.v_estimate),
                join_usize(r.budget.degrees()),
                sig17(r.empirical_error),
                sig17(r.bound_a),
                sig17(r.bound_b),
                sig17(r.bound_combined),
                r.passed.to_string(),
            ]
        }),
    )
}

pub const SCAN_CSV_HEADER: &str = "rho,a,b,winner,crossover";

pub fn winner_label(w: Winner) -> &'static str {
    match w {
        Winner::A => "A",
        Winner::B => "B",
        Winner::Tie => "TIE",
    }
}

pub fn scan_csv(points: &[ScanPoint]) -> String {
    write_csv(
        SCAN_CSV_HEADER,
        points.iter().map(|p| {
            vec![
                sig17(p.rho),
                sig17(p.a),
                sig17(p.b),
                winner_label(p.winner).to_string(),
                p.crossover.to_string(),
            ]
        }),
    )
}

pub const REPRODUCTION_CSV_HEADER: &str = "case,quantity,quoted,computed";

pub fn reproduction_csv(entries: &[ReproductionEntry]) -> String {
    write_csv(
        REPRODUCTION_CSV_HEADER,
        entries.iter().map(|e| {
            vec![
                e.case.clone(),
                e.quantity.clone(),
                e.quoted.map(sig17).unwrap_or_default(),
                sig17(e.computed),
            ]
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fit(f: &TestFunction, n: &[usize]) -> ChebyshevInterpolant {
        ChebyshevInterpolant::fit(|x| f.eval(x), f.domain(), &NodeBudget::new(n.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn admissible_radii_are_computed() {
        let f = builtin("rational-1d").unwrap();
        assert!((f.admissible_rho()[0] - 2.0).abs() < 1e-15);
        let s = builtin("rational-1d-shifted").unwrap();
        assert!((s.admissible_rho()[0] - (1.5 + 1.25f64.sqrt())).abs() < 1e-14);
        assert!(builtin("exp-1d").unwrap().admissible_rho()[0].is_infinite());
        let c = builtin("coupled-2d").unwrap();
        let kappa = 3.0 / 1.8;
        let rho = kappa + (kappa * kappa - 1.0f64).sqrt();
        assert!((c.admissible_rho()[0] - rho).abs() < 1e-14);
        assert!((c.admissible_rho()[1] - rho).abs() < 1e-14);
    }

    #[test]
    fn coupled_region_excludes_the_singularity() {
        // at the admissible radius the rightmost ellipse points hit c exactly
        let f = builtin("coupled-2d").unwrap();
        let rho = f.admissible_rho()[0];
        let semi = 0.5 * (rho + 1.0 / rho);
        assert!((1.0 * semi + 0.8 * semi - 3.0).abs() < 1e-13);
    }

    #[test]
    fn families_are_well_formed() {
        let all = builtin_families();
        let mut ids: Vec<&str> = all.iter().map(|f| f.id()).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), all.len());
        for f in &all {
            let x: Vec<f64> = f.domain().axes().iter().map(|a| a.midpoint() + 0.3 * a.half_width()).collect();
            let z: Vec<Complex64> = x.iter().map(|&x| Complex64::new(x, 0.0)).collect();
            let real = f.eval(&x);
            let complex = f.eval_complex(&z);
            assert!((real - complex.re).abs() <= 1e-14 * real.abs().max(1.0), "{}", f.id());
            assert!(complex.im.abs() < 1e-14);
        }
        assert!(TestFunction::new(
            "bad",
            "",
            reference_box(1),
            FunctionKind::SeparableRational { c: vec![0.5] }
        )
        .is_err());
        assert!(TestFunction::new(
            "bad",
            "",
            reference_box(2),
            FunctionKind::CoupledRational { c: 1.0, beta: vec![1.0, 1.0] }
        )
        .is_err());
    }

    #[test]
    fn polynomial_sup_error_is_tiny() {
        for id in ["poly-1d", "poly-2d", "poly-3d", "const-1d"] {
            let f = builtin(id).unwrap();
            let n: Vec<usize> = f.polynomial_degrees().unwrap().iter().map(|&k| k as usize + 1).collect();
            let e = sup_error(&f, &fit(&f, &n), &vec![33; f.dim()]).unwrap();
            assert!(e <= 1e-11, "{id}: {e}");
        }
    }

    #[test]
    fn constant_fit_error() {
        let f = builtin("rational-1d-far").unwrap();
        let i = fit(&f, &[0]);
        let c0 = i.coefficients()[0];
        assert!((c0 - 0.5).abs() < 1e-15);
        let e = sup_error(&f, &i, &[65]).unwrap();
        let direct = probe_points(65)
            .iter()
            .map(|&u| (1.0 / (3.0 - u) - c0).abs())
            .fold(0.0, f64::max);
        assert!(e >= direct && e > 0.0);
        assert!(e <= 0.5 + 1e-15);
    }

    #[test]
    fn sup_error_grows_under_tripling() {
        let f = builtin("rational-2d").unwrap();
        let i = fit(&f, &[6, 5]);
        let coarse = sup_error(&f, &i, &[33, 33]).unwrap();
        let fine = sup_error(&f, &i, &[99, 99]).unwrap();
        assert!(fine >= coarse);
        let p = probe_points(33);
        let q = probe_points(99);
        for (m, &x) in p.iter().enumerate() {
            assert_eq!(x, q[3 * m + 1]);
        }
    }

    #[test]
    fn sup_error_validates() {
        let f = builtin("exp-1d").unwrap();
        let i = fit(&f, &[4]);
        assert!(sup_error(&f, &i, &[8]).is_err());
        assert!(sup_error(&f, &i, &[33, 33]).is_err());
    }

    #[test]
    fn inadmissible_cases_fail_before_computing() {
        let f = builtin("rational-1d").unwrap();
        let case = VerificationCase {
            function: f,
            radii: vec![1.97],
            budget: NodeBudget::new(vec![5]).unwrap(),
        };
        assert!(matches!(verify_domination(&[case]), Err(Error::Usage(_))));
    }

    #[test]
    fn univariate_records_pass() {
        let f = builtin("rational-1d").unwrap();
        let cases: Vec<VerificationCase> = (5..=25)
            .step_by(5)
            .map(|n| VerificationCase {
                function: f.clone(),
                radii: vec![1.9],
                budget: NodeBudget::new(vec![n]).unwrap(),
            })
            .collect();
        for r in verify_domination(&cases).unwrap() {
            assert!(r.passed, "{r:?}");
            assert!(r.empirical_error > 0.0);
        }
    }

    #[test]
    fn separable_2d_records_pass() {
        let f = builtin("rational-2d").unwrap();
        let radii: Vec<f64> = f.admissible_rho().iter().map(|r| 0.9 * r).collect();
        let cases: Vec<VerificationCase> = [4, 8, 12]
            .iter()
            .map(|&n| VerificationCase {
                function: f.clone(),
                radii: radii.clone(),
                budget: NodeBudget::new(vec![n, n]).unwrap(),
            })
            .collect();
        assert!(verify_domination(&cases).unwrap().iter().all(|r| r.passed));
    }

    #[test]
    fn suite_sizes() {
        let default = default_suite();
        assert!(default.len() >= 60);
        for d in 1..=3 {
            assert!(default.iter().any(|c| c.function.dim() == d));
        }
        assert!(quick_suite().len() < default.len());
    }

    #[test]
    fn suites_are_admissible() {
        for case in default_suite() {
            case.function.check_admissible(&case.radii).unwrap();
        }
    }

    #[test]
    fn coefficient_decay_examples() {
        let constant = builtin("const-1d").unwrap();
        let r = coefficient_decay_check(&constant, 3.0, 6).unwrap();
        assert!(r.passed);
        let far = builtin("rational-1d-far").unwrap();
        assert!(coefficient_decay_check(&far, 5.0, 30).unwrap().passed);
        let t3 = builtin("poly-1d").unwrap();
        assert!(coefficient_decay_check(&t3, 2.0, 10).unwrap().passed);
        assert!(coefficient_decay_check(&far, 5.8, 30).is_err());
    }

    #[test]
    fn crossover_scan_flips_once() {
        let scan = crossover_scan(10, 2, 1.1, 20.0, 60, 1.0).unwrap();
        let grid: Vec<&ScanPoint> = scan.iter().filter(|p| !p.crossover).collect();
        assert_eq!(grid.len(), 60);
        let flips = grid.windows(2).filter(|w| w[0].winner != w[1].winner).count();
        assert_eq!(flips, 1);
        assert_eq!(grid[0].winner, Winner::B);
        assert_eq!(grid[59].winner, Winner::A);
        let cross: Vec<&ScanPoint> = scan.iter().filter(|p| p.crossover).collect();
        assert_eq!(cross.len(), 1);
        assert!(((cross[0].a - cross[0].b) / cross[0].a).abs() < 1e-5);

        let doubled = crossover_scan(10, 2, 1.1, 20.0, 60, 2.0).unwrap();
        let w1: Vec<Winner> = scan.iter().map(|p| p.winner).collect();
        let w2: Vec<Winner> = doubled.iter().map(|p| p.winner).collect();
        assert_eq!(w1, w2);
    }

    #[test]
    fn scan_validation() {
        assert!(crossover_scan(10, 2, 1.0, 20.0, 10, 1.0).is_err());
        assert!(crossover_scan(10, 2, 3.0, 2.0, 10, 1.0).is_err());
        assert!(crossover_scan(10, 2, 1.1, 2.0, 1, 1.0).is_err());
    }

    #[test]
    fn csv_shapes() {
        let scan = crossover_scan(10, 2, 1.1, 20.0, 5, 1.0).unwrap();
        let csv = scan_csv(&scan);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], SCAN_CSV_HEADER);
        assert_eq!(lines.len(), scan.len() + 1);
        assert!(lines[1..].iter().all(|l| l.split(',').count() == 5));
    }
}
