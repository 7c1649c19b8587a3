//! Closed-form a-priori bounds on the sup-norm interpolation error.
//!
//! For `f` analytic on the generalized Bernstein ellipse with radii `rho` and
//! `|f| <= V` there, the error of the tensorized interpolant with degrees `N`
//! is at most `min{a, b}` where
//!
//! ```text
//! b = 2^(D/2+1) V ( sum_i rho_i^(-2 N_i) prod_j 1/(1 - rho_j^(-2)) )^(1/2)
//!
//! a = min over permutations sigma of
//!       sum_i 4V rho_s(i)^(-N_s(i)) / (rho_s(i) - 1)
//!     + sum_{k=2..D} 4V rho_s(k)^(-N_s(k)) / (rho_s(k) - 1)
//!                    * 2^(k-1) ((k-1) + 2^(k-1) - 1) / prod_{j<k} (1 - 1/rho_s(j))
//! ```
//!
//! `a` comes from adding one axis at a time to a univariate estimate; the
//! permutation picks the order in which axes are added. Each axis carries the
//! pair `(rho_i, N_i)` through the permutation ([`Pairing::Consistent`]). The
//! [`Pairing::Literal`] variant instead permutes only the radius in the
//! numerator of the first sum and the degree index of the second, matching a
//! symbol-for-symbol transcription. The two agree at the identity; with equal
//! degrees only their second sums agree.
//!
//! The induction behind `a` passes through a tighter intermediate,
//! [`recursive_bound_b`], built from the residual bound [`m_upper_bound`];
//! `a` is what remains after bounding every geometric factor by one.
//!
//! Terms `rho^(-N)` are evaluated directly while `N ln rho` stays below 700
//! and through logarithms beyond that. Final values below the smallest
//! positive normal double are flushed to zero and flagged as underflow in
//! [`BoundReport`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bernstein::EllipseRadii;
use crate::cheb::NodeBudget;
use crate::error::{Error, Result};
use crate::format;

/// Relative gap under which `a` and `b` are reported as a tie.
pub const TIE_TOLERANCE: f64 = 1e-15;

/// Largest dimension for which every permutation is tried.
pub const EXHAUSTIVE_SIGMA_LIMIT: usize = 8;

/// Largest dimension for which the residual bound enumerates its binary masks.
pub const MASK_ENUMERATION_LIMIT: usize = 20;

const DIRECT_EXPONENT_LIMIT: f64 = 700.0;

/// Values below this are computed entirely through logarithms before scaling.
const TINY: f64 = 1e-290;

/// Radii, degrees and the bound `V` on `|f|` over the ellipse.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundInputs {
    radii: EllipseRadii,
    budget: NodeBudget,
    v_bound: f64,
}

impl BoundInputs {
    pub fn new(radii: EllipseRadii, budget: NodeBudget, v_bound: f64) -> Result<Self> {
        if radii.dim() != budget.dim() {
            return Err(Error::usage(format!(
                "{} radii but {} degrees",
                radii.dim(),
                budget.dim()
            )));
        }
        if !(v_bound.is_finite() && v_bound >= 0.0) {
            return Err(Error::usage(format!("V must be finite and >= 0 (got {v_bound})")));
        }
        Ok(Self { radii, budget, v_bound })
    }

    /// Convenience constructor from plain slices.
    pub fn from_slices(rho: &[f64], degrees: &[usize], v_bound: f64) -> Result<Self> {
        Self::new(
            EllipseRadii::new(rho.to_vec())?,
            NodeBudget::new(degrees.to_vec())?,
            v_bound,
        )
    }

    pub fn radii(&self) -> &EllipseRadii {
        &self.radii
    }

    pub fn budget(&self) -> &NodeBudget {
        &self.budget
    }

    pub fn v_bound(&self) -> f64 {
        self.v_bound
    }

    pub fn dim(&self) -> usize {
        self.radii.dim()
    }

    fn rho(&self) -> &[f64] {
        self.radii.values()
    }

    fn degrees(&self) -> &[usize] {
        self.budget.degrees()
    }
}

/// A permutation of the axes, stored zero-based and shown one-based.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    /// From zero-based images `sigma(0), ..., sigma(D-1)`.
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let d = images.len();
        let mut seen = vec![false; d];
        for &s in &images {
            if s >= d || std::mem::replace(&mut seen[s], true) {
                return Err(Error::usage(format!("{images:?} is not a permutation of 0..{d}")));
            }
        }
        Ok(Self(images))
    }

    /// From one-based images, as printed.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        let zero: Option<Vec<usize>> = images.iter().map(|s| s.checked_sub(1)).collect();
        match zero {
            Some(z) => Self::new(z),
            None => Err(Error::usage(format!("{images:?} is not a permutation of 1..{}", images.len()))),
        }
    }

    pub fn identity(d: usize) -> Self {
        Self((0..d).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|s| s + 1).collect()
    }

    /// Advances to the lexicographically next permutation; false at the last.
    fn advance(&mut self) -> bool {
        let p = &mut self.0;
        let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
            return false;
        };
        let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("pivot has a successor");
        p.swap(i - 1, j);
        p[i..].reverse();
        true
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.one_based().iter().map(|s| s.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl Serialize for Permutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.one_based().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        Permutation::from_one_based(&v).map_err(serde::de::Error::custom)
    }
}

/// How the permutation acts on the `a` bound's indices.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pairing {
    #[default]
    Consistent,
    Literal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Winner {
    A,
    B,
    Tie,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SigmaSearch {
    Exhaustive,
    Heuristic,
}

/// Offset `epsilon` of the inner radii `s_i = 1 + epsilon` used by the
/// residual bound. Zero is the limiting case.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MParams {
    epsilon: f64,
}

impl MParams {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(Error::usage(format!("epsilon must be finite and >= 0 (got {epsilon})")));
        }
        Ok(Self { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    fn check(&self, rho: &[f64]) -> Result<()> {
        let min = rho.iter().copied().fold(f64::INFINITY, f64::min);
        if 1.0 + self.epsilon >= min {
            return Err(Error::usage(format!(
                "epsilon = {} is too large: need 1 + epsilon < min rho = {min}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// Result of minimizing a bound over axis orders.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaMinimum {
    pub value: f64,
    pub sigma: Permutation,
    pub search: SigmaSearch,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InputEcho {
    pub rho: Vec<f64>,
    pub degrees: Vec<usize>,
    pub v: f64,
}

/// Both bounds, their minimum and which one won.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub a_value: f64,
    pub b_value: f64,
    pub combined: f64,
    pub winner: Winner,
    pub sigma_star: Permutation,
    pub sigma_search: SigmaSearch,
    pub pairing: Pairing,
    /// Some bound was below the smallest normal double and was reported as 0.
    pub underflow: bool,
    pub inputs: InputEcho,
}

impl BoundReport {
    pub fn to_json(&self) -> String {
        format::to_json_string(self)
    }
}

#[inline]
fn flush(x: f64) -> f64 {
    if x < f64::MIN_POSITIVE {
        0.0
    } else {
        x
    }
}

/// `factor * rho^(-n)` for `factor >= 0`.
#[inline]
fn decay_term(factor: f64, rho: f64, n: usize) -> f64 {
    let exponent = n as f64 * rho.ln();
    if exponent <= DIRECT_EXPONENT_LIMIT {
        factor * rho.powi(-(n as i32))
    } else {
        (factor.ln() - exponent).exp()
    }
}

/// `v * exp(ln_unit)`, keeping precision when `exp(ln_unit)` is tiny.
fn scale_ln(v: f64, ln_unit: f64) -> f64 {
    let unit = ln_unit.exp();
    if unit >= TINY || v == 0.0 {
        flush(v * unit)
    } else {
        flush((ln_unit + v.ln()).exp())
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho.is_finite() && rho > 1.0) {
        return Err(Error::usage(format!("rho must exceed 1 (got {rho})")));
    }
    Ok(())
}

/// `4 v rho^(-n) / (rho - 1)`.
pub fn bound_univariate(rho: f64, n: usize, v: f64) -> Result<f64> {
    check_rho(rho)?;
    Ok(flush(decay_term(4.0 * v / (rho - 1.0), rho, n)))
}

/// `sum_i 4V rho_i^(-N_i) / (rho_i - 1)`, summed in axis order.
fn first_sum(rho: &[f64], n: &[usize], v: f64) -> f64 {
    rho.iter()
        .zip(n)
        .map(|(&r, &ni)| decay_term(4.0 * v / (r - 1.0), r, ni))
        .sum()
}

/// `2^(k-1) ((k-1) + 2^(k-1) - 1)`.
fn coupling_weight(k: usize) -> f64 {
    let p = 2f64.powi(k as i32 - 1);
    p * ((k - 1) as f64 + p - 1.0)
}

fn a_unchecked(rho: &[f64], n: &[usize], v: f64, sigma: &[usize], pairing: Pairing) -> f64 {
    let d = rho.len();
    let mut total = match pairing {
        Pairing::Consistent => first_sum(rho, n, v),
        Pairing::Literal => (0..d)
            .map(|i| decay_term(4.0 * v / (rho[i] - 1.0), rho[sigma[i]], n[i]))
            .sum(),
    };
    let mut prod = 1.0;
    for k in 2..=d {
        let prev = rho[sigma[k - 2]];
        prod *= (prev - 1.0) / prev;
        let s = sigma[k - 1];
        let nk = match pairing {
            Pairing::Consistent => n[s],
            Pairing::Literal => n[k - 1],
        };
        let factor = 4.0 * v * coupling_weight(k) / ((rho[s] - 1.0) * prod);
        total += decay_term(factor, rho[s], nk);
    }
    flush(total)
}

/// The `a` bound for one fixed axis order.
pub fn bound_a_for_sigma(inputs: &BoundInputs, sigma: &Permutation, pairing: Pairing) -> Result<f64> {
    if sigma.len() != inputs.dim() {
        return Err(Error::usage(format!(
            "permutation of length {} for a {}-dimensional bound",
            sigma.len(),
            inputs.dim()
        )));
    }
    Ok(a_unchecked(inputs.rho(), inputs.degrees(), inputs.v_bound, sigma.as_slice(), pairing))
}

/// Minimizes `eval` over axis orders: every permutation for small `d`, and a
/// descending-radius start refined by best-improvement pairwise swaps
/// otherwise. Exhaustive ties go to the lexicographically smallest order.
fn minimize_over_sigma<F>(rho: &[f64], eval: F) -> SigmaMinimum
where
    F: Fn(&[usize]) -> f64,
{
    let d = rho.len();
    if d <= EXHAUSTIVE_SIGMA_LIMIT {
        let mut sigma = Permutation::identity(d);
        let mut best = (eval(sigma.as_slice()), sigma.clone());
        while sigma.advance() {
            let value = eval(sigma.as_slice());
            if value < best.0 {
                best = (value, sigma.clone());
            }
        }
        return SigmaMinimum {
            value: best.0,
            sigma: best.1,
            search: SigmaSearch::Exhaustive,
        };
    }
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| rho[j].total_cmp(&rho[i]).then(i.cmp(&j)));
    let mut value = eval(&order);
    loop {
        let mut improvement: Option<(f64, usize, usize)> = None;
        for i in 0..d {
            for j in i + 1..d {
                order.swap(i, j);
                let candidate = eval(&order);
                order.swap(i, j);
                if candidate < improvement.map_or(value, |m| m.0) {
                    improvement = Some((candidate, i, j));
                }
            }
        }
        match improvement {
            Some((v, i, j)) => {
                order.swap(i, j);
                value = v;
            }
            None => break,
        }
    }
    SigmaMinimum {
        value,
        sigma: Permutation(order),
        search: SigmaSearch::Heuristic,
    }
}

/// The `a` bound: minimum over axis orders of [`bound_a_for_sigma`].
pub fn bound_a(inputs: &BoundInputs, pairing: Pairing) -> SigmaMinimum {
    let (rho, n, v) = (inputs.rho(), inputs.degrees(), inputs.v_bound);
    minimize_over_sigma(rho, |s| a_unchecked(rho, n, v, s, pairing))
}

fn b_unchecked(rho: &[f64], n: &[usize], v: f64) -> f64 {
    let d = rho.len();
    let prefactor = 2f64.powf(d as f64 / 2.0 + 1.0);
    // prod_j 1/(1 - rho_j^-2) = prod_j rho_j^2 / ((rho_j - 1)(rho_j + 1))
    let product: f64 = rho.iter().map(|&r| r * r / ((r - 1.0) * (r + 1.0))).product();
    let exponents: Vec<f64> = rho.iter().zip(n).map(|(&r, &ni)| ni as f64 * r.ln()).collect();
    let e_min = exponents.iter().copied().fold(f64::INFINITY, f64::min);
    if 2.0 * e_min <= DIRECT_EXPONENT_LIMIT {
        let sum: f64 = rho
            .iter()
            .zip(n)
            .map(|(&r, &ni)| decay_term(1.0, r, 2 * ni))
            .sum();
        flush(prefactor * v * (sum * product).sqrt())
    } else {
        let shifted: f64 = exponents.iter().map(|e| (-2.0 * (e - e_min)).exp()).sum();
        let ln_unit = prefactor.ln() + 0.5 * (shifted * product).ln() - e_min;
        scale_ln(v, ln_unit)
    }
}

/// The `b` bound.
pub fn bound_b(inputs: &BoundInputs) -> f64 {
    b_unchecked(inputs.rho(), inputs.degrees(), inputs.v_bound)
}

/// Both bounds and their minimum.
pub fn bound_combined(inputs: &BoundInputs, pairing: Pairing) -> BoundReport {
    let a = bound_a(inputs, pairing);
    let b = bound_b(inputs);
    let winner = if (a.value - b).abs() <= TIE_TOLERANCE * a.value.max(b) {
        Winner::Tie
    } else if a.value < b {
        Winner::A
    } else {
        Winner::B
    };
    BoundReport {
        a_value: a.value,
        b_value: b,
        combined: a.value.min(b),
        winner,
        sigma_star: a.sigma,
        sigma_search: a.search,
        pairing,
        underflow: inputs.v_bound > 0.0 && (a.value == 0.0 || b == 0.0),
        inputs: InputEcho {
            rho: inputs.rho().to_vec(),
            degrees: inputs.degrees().to_vec(),
            v: inputs.v_bound,
        },
    }
}

/// `ln(M / V)` for the residual bound over the given axes.
fn ln_m_unit(rho: &[f64], n: &[usize], epsilon: f64) -> f64 {
    let k = rho.len();
    let ln_s = epsilon.ln_1p();
    let ln_x: Vec<f64> = rho
        .iter()
        .zip(n)
        .map(|(&r, &ni)| (ni as f64 + 1.0) * (ln_s - r.ln()))
        .collect();
    let ln_one_minus_x: Vec<f64> = ln_x.iter().map(|&l| (-l.exp()).ln_1p()).collect();

    let mut terms: Vec<f64> = ln_x.clone();
    if k <= MASK_ENUMERATION_LIMIT {
        for mask in 1u32..(1u32 << k) {
            let mut l = 0.0;
            for delta in 0..k {
                l += if mask >> delta & 1 == 1 {
                    ln_x[delta]
                } else {
                    ln_one_minus_x[delta]
                };
            }
            terms.push(l);
        }
    } else {
        // the nonzero masks sum to 1 - prod (1 - x_delta)
        let all_zero: f64 = ln_one_minus_x.iter().sum();
        terms.push((-all_zero.exp_m1()).ln());
    }
    let ln_numerator = log_sum_exp(&terms);
    let ln_denominator: f64 = rho.iter().map(|&r| (r - 1.0 - epsilon).ln() - r.ln()).sum();
    k as f64 * std::f64::consts::LN_2 + ln_numerator - ln_denominator
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.iter().map(|&t| (t - max).exp()).sum::<f64>().ln()
}

/// Residual bound `M(k)` over the first `k` axes, with inner radii
/// `s_i = 1 + epsilon`:
///
/// ```text
/// M = 2^k V [ sum_i (s_i/rho_i)^(N_i+1)
///           + sum over nonzero masks of prod_{mask=0} (1 - (s/rho)^(N+1)) prod_{mask=1} (s/rho)^(N+1) ]
///       / prod_j (1 - s_j/rho_j)
/// ```
pub fn m_upper_bound(radii: &[f64], degrees: &[usize], v: f64, params: &MParams) -> Result<f64> {
    if radii.is_empty() || radii.len() != degrees.len() {
        return Err(Error::usage(format!(
            "residual bound needs matching non-empty radii and degrees (got {} and {})",
            radii.len(),
            degrees.len()
        )));
    }
    for &r in radii {
        check_rho(r)?;
    }
    if !(v.is_finite() && v >= 0.0) {
        return Err(Error::usage(format!("V must be finite and >= 0 (got {v})")));
    }
    params.check(radii)?;
    Ok(scale_ln(v, ln_m_unit(radii, degrees, params.epsilon)))
}

fn recursive_unchecked(rho: &[f64], n: &[usize], v: f64, epsilon: f64) -> f64 {
    let mut total = first_sum(rho, n, v);
    for k in 2..=rho.len() {
        let ln_m = ln_m_unit(&rho[..k - 1], &n[..k - 1], epsilon);
        let (r, nk) = (rho[k - 1], n[k - 1]);
        let m = ln_m.exp();
        total += if m >= TINY {
            decay_term(4.0 * v * m / (r - 1.0), r, nk)
        } else if v > 0.0 {
            (ln_m + (4.0 * v / (r - 1.0)).ln() - nk as f64 * r.ln()).exp()
        } else {
            0.0
        };
    }
    flush(total)
}

/// The recursion the `a` bound is loosened from, in the given axis order:
/// `sum_i 4V rho_i^(-N_i)/(rho_i - 1) + sum_{k>=2} 4 M(k-1) rho_k^(-N_k)/(rho_k - 1)`.
pub fn recursive_bound_b(inputs: &BoundInputs, params: &MParams) -> Result<f64> {
    params.check(inputs.rho())?;
    Ok(recursive_unchecked(inputs.rho(), inputs.degrees(), inputs.v_bound, params.epsilon))
}

/// [`recursive_bound_b`] minimized over axis orders, searched like [`bound_a`].
pub fn recursive_bound_b_min(inputs: &BoundInputs, params: &MParams) -> Result<SigmaMinimum> {
    params.check(inputs.rho())?;
    Ok(recursive_search(inputs.rho(), inputs.degrees(), inputs.v_bound, params.epsilon))
}

fn recursive_search(rho: &[f64], n: &[usize], v: f64, epsilon: f64) -> SigmaMinimum {
    minimize_over_sigma(rho, |s| {
        let pr: Vec<f64> = s.iter().map(|&i| rho[i]).collect();
        let pn: Vec<usize> = s.iter().map(|&i| n[i]).collect();
        recursive_unchecked(&pr, &pn, v, epsilon)
    })
}

/// `a` minimized over orders, on raw slices. Callers validate the inputs.
pub(crate) fn a_min_raw(rho: &[f64], n: &[usize], v: f64, pairing: Pairing) -> f64 {
    minimize_over_sigma(rho, |s| a_unchecked(rho, n, v, s, pairing)).value
}

pub(crate) fn b_raw(rho: &[f64], n: &[usize], v: f64) -> f64 {
    b_unchecked(rho, n, v)
}

/// Recursive bound minimized over orders, on raw slices.
pub(crate) fn recursive_min_raw(rho: &[f64], n: &[usize], v: f64, epsilon: f64) -> f64 {
    recursive_search(rho, n, v, epsilon).value
}
