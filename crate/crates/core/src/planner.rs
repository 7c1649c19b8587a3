//! Node-budget planning: the cheapest degrees whose bound meets a target.
//!
//! Every bound decreases monotonically in each degree, which the search
//! exploits in three places. Per-axis lower limits come from a binary search
//! with every other axis at [`DEGREE_CAP`]. A greedy descent produces a first
//! feasible budget. A depth-first branch and bound over the axes then prunes
//! any prefix whose cheapest completion costs more than the incumbent or whose
//! most generous completion still misses the target; the last axis is solved
//! by binary search. Among budgets with equally many grid points the
//! lexicographically smallest wins.
//!
//! For `D > 8` the `a` bound is evaluated with its heuristic axis order, so
//! the returned plan is certified but its minimality is not guaranteed.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bernstein::EllipseRadii;
use crate::bounds::{self, Pairing};
use crate::cheb::NodeBudget;
use crate::error::{Error, Result};
use crate::format;

/// Largest degree tried on any axis.
pub const DEGREE_CAP: usize = 1_000_000;

/// Largest dimension the planner accepts.
pub const MAX_PLAN_DIM: usize = 12;

/// Which bound a plan must satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Selector {
    A,
    B,
    Combined,
    Recursive,
}

impl Selector {
    pub const ALL: [Selector; 4] = [Selector::A, Selector::B, Selector::Combined, Selector::Recursive];

    /// The selected bound at raw degrees, which may exceed tensor limits.
    pub(crate) fn evaluate(self, rho: &[f64], n: &[usize], v: f64) -> f64 {
        match self {
            Selector::A => bounds::a_min_raw(rho, n, v, Pairing::Consistent),
            Selector::B => bounds::b_raw(rho, n, v),
            Selector::Combined => {
                bounds::a_min_raw(rho, n, v, Pairing::Consistent).min(bounds::b_raw(rho, n, v))
            }
            Selector::Recursive => bounds::recursive_min_raw(rho, n, v, 0.0),
        }
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Selector::A => "A",
            Selector::B => "B",
            Selector::Combined => "COMBINED",
            Selector::Recursive => "RECURSIVE",
        })
    }
}

impl FromStr for Selector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(Selector::A),
            "b" => Ok(Selector::B),
            "combined" => Ok(Selector::Combined),
            "recursive" => Ok(Selector::Recursive),
            _ => Err(Error::usage(format!(
                "unknown selector {s:?} (expected a, b, combined or recursive)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlanRequest {
    radii: EllipseRadii,
    v_bound: f64,
    epsilon_target: f64,
    selector: Selector,
}

impl PlanRequest {
    pub fn new(radii: EllipseRadii, v_bound: f64, epsilon_target: f64, selector: Selector) -> Result<Self> {
        if !(v_bound.is_finite() && v_bound > 0.0) {
            return Err(Error::usage(format!("V must be finite and > 0 (got {v_bound})")));
        }
        if !(epsilon_target.is_finite() && epsilon_target > 0.0) {
            return Err(Error::usage(format!("eps must be finite and > 0 (got {epsilon_target})")));
        }
        if radii.dim() > MAX_PLAN_DIM {
            return Err(Error::usage(format!(
                "planning supports at most {MAX_PLAN_DIM} dimensions (got {})",
                radii.dim()
            )));
        }
        Ok(Self { radii, v_bound, epsilon_target, selector })
    }

    pub fn radii(&self) -> &EllipseRadii {
        &self.radii
    }

    pub fn v_bound(&self) -> f64 {
        self.v_bound
    }

    pub fn epsilon_target(&self) -> f64 {
        self.epsilon_target
    }

    pub fn selector(&self) -> Selector {
        self.selector
    }

    pub fn with_selector(&self, selector: Selector) -> Self {
        Self { selector, ..self.clone() }
    }

    fn bound_at(&self, n: &[usize]) -> f64 {
        self.selector.evaluate(self.radii.values(), n, self.v_bound)
    }

    fn feasible(&self, n: &[usize]) -> bool {
        self.bound_at(n) <= self.epsilon_target
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Plan {
    pub budget: NodeBudget,
    pub grid_points: usize,
    pub certified_bound: f64,
    pub selector: Selector,
}

impl Plan {
    pub fn to_json(&self) -> String {
        format::to_json_string(self)
    }
}

/// Smallest `N >= 0` with `4 v rho^(-N) / (rho - 1) <= eps`.
pub fn invert_univariate(rho: f64, v: f64, eps: f64) -> Result<usize> {
    bounds::bound_univariate(rho, 0, v)?;
    if !(v.is_finite() && v > 0.0 && eps.is_finite() && eps > 0.0) {
        return Err(Error::usage(format!("need v > 0 and eps > 0 (got v = {v}, eps = {eps})")));
    }
    let bound = |n: usize| bounds::bound_univariate(rho, n, v).expect("validated radius");
    let guess = ((4.0 * v / ((rho - 1.0) * eps)).ln() / rho.ln()).ceil();
    let mut n = if guess.is_finite() && guess > 0.0 {
        guess.min(usize::MAX as f64 / 2.0) as usize
    } else {
        0
    };
    while n > 0 && bound(n - 1) <= eps {
        n -= 1;
    }
    while bound(n) > eps {
        n += 1;
    }
    Ok(n)
}

/// Smallest value in `lo..=hi` accepted by a monotone predicate, if any.
fn first_accepted(lo: usize, hi: usize, mut accept: impl FnMut(usize) -> bool) -> Option<usize> {
    if !accept(hi) {
        return None;
    }
    let (mut lo, mut hi) = (lo, hi);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if accept(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Some(lo)
}

fn cost(n: &[usize]) -> u128 {
    n.iter().fold(1u128, |acc, &k| acc.saturating_mul(k as u128 + 1))
}

struct Search<'a> {
    request: &'a PlanRequest,
    lower: Vec<usize>,
    best: Vec<usize>,
    best_cost: u128,
}

impl Search<'_> {
    fn consider(&mut self, n: &[usize]) {
        let c = cost(n);
        if c < self.best_cost || (c == self.best_cost && n < self.best.as_slice()) {
            self.best_cost = c;
            self.best = n.to_vec();
        }
    }

    /// Explores axis `k` with `n[..k]` fixed and `n[k..]` at the cap.
    fn descend(&mut self, n: &mut Vec<usize>, k: usize) {
        let d = n.len();
        let fixed = cost(&n[..k]);
        let rest = cost(&self.lower[k + 1..]);
        if k + 1 == d {
            let mut probe = n.clone();
            let found = first_accepted(self.lower[k], DEGREE_CAP, |m| {
                probe[k] = m;
                self.request.feasible(&probe)
            });
            if let Some(m) = found {
                n[k] = m;
                self.consider(n);
                n[k] = DEGREE_CAP;
            }
            return;
        }
        let mut m = self.lower[k];
        loop {
            let floor = fixed.saturating_mul(m as u128 + 1).saturating_mul(rest);
            if floor > self.best_cost || m > DEGREE_CAP {
                break;
            }
            n[k] = m;
            if self.request.feasible(n) {
                self.descend(n, k + 1);
            }
            m += 1;
        }
        n[k] = DEGREE_CAP;
    }
}

/// The cheapest budget meeting the request's target.
pub fn plan_nodes(request: &PlanRequest) -> Result<Plan> {
    let d = request.radii.dim();
    let cap = vec![DEGREE_CAP; d];
    if !request.feasible(&cap) {
        return Err(Error::usage(format!(
            "target eps = {} needs more than {DEGREE_CAP} degrees on some axis",
            request.epsilon_target
        )));
    }

    let mut lower = Vec::with_capacity(d);
    for i in 0..d {
        let mut probe = cap.clone();
        let li = first_accepted(0, DEGREE_CAP, |m| {
            probe[i] = m;
            request.feasible(&probe)
        })
        .expect("feasible at the cap");
        lower.push(li);
    }

    // greedy: raise whichever axis lowers the bound most until feasible
    let mut greedy = lower.clone();
    while !request.feasible(&greedy) {
        let mut pick = (f64::INFINITY, 0);
        for i in 0..d {
            greedy[i] += 1;
            let value = request.bound_at(&greedy);
            greedy[i] -= 1;
            if value < pick.0 {
                pick = (value, i);
            }
        }
        greedy[pick.1] += 1;
    }

    let best_cost = cost(&greedy);
    let mut search = Search { request, lower, best: greedy, best_cost };
    let mut n = cap;
    search.descend(&mut n, 0);
    finish(request, search.best)
}

fn finish(request: &PlanRequest, degrees: Vec<usize>) -> Result<Plan> {
    let certified_bound = request.bound_at(&degrees);
    if certified_bound > request.epsilon_target {
        return Err(Error::data(format!(
            "planned budget {degrees:?} does not meet eps = {} on re-evaluation",
            request.epsilon_target
        )));
    }
    let budget = NodeBudget::new(degrees)?;
    Ok(Plan {
        grid_points: budget.grid_points(),
        budget,
        certified_bound,
        selector: request.selector,
    })
}

/// Exhaustive search over all budgets with every degree at most `max_degree`.
/// Returns `None` when no budget in the box meets the target.
pub fn exhaustive_plan(request: &PlanRequest, max_degree: usize) -> Result<Option<Plan>> {
    let d = request.radii.dim();
    let mut n = vec![0usize; d];
    let mut best: Option<(u128, Vec<usize>)> = None;
    loop {
        if request.feasible(&n) {
            let c = cost(&n);
            // lexicographic enumeration: the first at a cost is the smallest
            if best.as_ref().is_none_or(|(bc, _)| c < *bc) {
                best = Some((c, n.clone()));
            }
        }
        let Some(i) = (0..d).rev().find(|&i| n[i] < max_degree) else {
            break;
        };
        n[i] += 1;
        n[i + 1..].iter_mut().for_each(|x| *x = 0);
    }
    best.map(|(_, degrees)| finish(request, degrees)).transpose()
}

/// All bounds at one fixed budget.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BudgetEvaluation {
    pub budget: NodeBudget,
    pub grid_points: usize,
    pub a: f64,
    pub b: f64,
    pub combined: f64,
    pub recursive: f64,
}

pub fn evaluate_budget(radii: &EllipseRadii, v: f64, budget: &NodeBudget) -> Result<BudgetEvaluation> {
    if radii.dim() != budget.dim() {
        return Err(Error::usage(format!("{} radii but {} degrees", radii.dim(), budget.dim())));
    }
    let (rho, n) = (radii.values(), budget.degrees());
    let a = Selector::A.evaluate(rho, n, v);
    let b = Selector::B.evaluate(rho, n, v);
    Ok(BudgetEvaluation {
        budget: budget.clone(),
        grid_points: budget.grid_points(),
        a,
        b,
        combined: a.min(b),
        recursive: Selector::Recursive.evaluate(rho, n, v),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlanComparison {
    pub radii: EllipseRadii,
    pub v_bound: f64,
    pub epsilon_target: f64,
    pub plans: Vec<Plan>,
    /// Combined grid size divided by the A-only grid size.
    pub combined_over_a: f64,
    /// Combined grid size divided by the B-only grid size.
    pub combined_over_b: f64,
}

impl PlanComparison {
    pub fn plan(&self, selector: Selector) -> &Plan {
        self.plans
            .iter()
            .find(|p| p.selector == selector)
            .expect("every selector is planned")
    }

    pub fn to_json(&self) -> String {
        format::to_json_string(self)
    }
}

/// Plans for every selector side by side.
pub fn compare_plans(radii: &EllipseRadii, v: f64, eps: f64) -> Result<PlanComparison> {
    let base = PlanRequest::new(radii.clone(), v, eps, Selector::A)?;
    let plans = Selector::ALL
        .iter()
        .map(|&s| plan_nodes(&base.with_selector(s)))
        .collect::<Result<Vec<_>>>()?;
    let grid = |s: Selector| plans.iter().find(|p| p.selector == s).map(|p| p.grid_points as f64).unwrap();
    let combined = grid(Selector::Combined);
    Ok(PlanComparison {
        combined_over_a: combined / grid(Selector::A),
        combined_over_b: combined / grid(Selector::B),
        radii: radii.clone(),
        v_bound: v,
        epsilon_target: eps,
        plans,
    })
}
