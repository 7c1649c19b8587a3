//! Tensorized Chebyshev interpolation on hyperrectangles.
//!
//! Tensors over the index set `J = {j : 0 <= j_i <= N_i}` are stored flat in
//! lexicographic order with the last axis varying fastest. Sample tensors and
//! coefficient tensors share this layout, and so does the JSON document
//! produced by [`ChebyshevInterpolant::to_json`].
//!
//! Nodes run in descending order, `x_k = cos(pi k / N)` for `k = 0..=N`, so
//! index `k = 0` is the upper end of every axis. A zero-degree axis has the
//! single node `1.0` and contributes a constant factor.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format;

/// Slack, in reference coordinates, tolerated when a point should lie in
/// `[-1, 1]`. Points inside the slack are clamped onto the boundary.
pub const BOUNDARY_SLACK: f64 = 1e-12;

/// Largest number of `f64` entries a tensor may hold.
pub const MAX_TENSOR_LEN: usize = isize::MAX as usize / std::mem::size_of::<f64>();

/// Layout tag written into serialized coefficient tensors.
pub const LAYOUT_TAG: &str = "lex-last-fastest";

/// Closed interval `[lo, hi]` with `lo < hi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::usage(format!("interval [{lo}, {hi}] has a non-finite end")));
        }
        if lo >= hi {
            return Err(Error::usage(format!("degenerate interval [{lo}, {hi}]: need lo < hi")));
        }
        Ok(Self { lo, hi })
    }

    pub fn reference() -> Self {
        Self { lo: -1.0, hi: 1.0 }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    /// Affine image of `u in [-1, 1]`; the endpoints map exactly.
    #[inline]
    pub fn from_reference(&self, u: f64) -> f64 {
        0.5 * ((1.0 - u) * self.lo + (1.0 + u) * self.hi)
    }

    /// Inverse of [`Interval::from_reference`].
    #[inline]
    pub fn to_reference(&self, x: f64) -> f64 {
        (2.0 * x - self.lo - self.hi) / (self.hi - self.lo)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Product domain `[lo_1, hi_1] x ... x [lo_D, hi_D]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Hyperrectangle {
    axes: Vec<Interval>,
}

impl Hyperrectangle {
    pub fn new(axes: &[(f64, f64)]) -> Result<Self> {
        let axes = axes
            .iter()
            .map(|&(lo, hi)| Interval::new(lo, hi))
            .collect::<Result<Vec<_>>>()?;
        Self::from_intervals(axes)
    }

    pub fn from_intervals(axes: Vec<Interval>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::usage("a hyperrectangle needs at least one axis"));
        }
        Ok(Self { axes })
    }

    /// `[-1, 1]^dim`.
    pub fn reference(dim: usize) -> Result<Self> {
        Self::from_intervals(vec![Interval::reference(); dim])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Interval] {
        &self.axes
    }

    pub fn bounds(&self) -> Vec<[f64; 2]> {
        self.axes.iter().map(|a| [a.lo, a.hi]).collect()
    }

    fn check_dim(&self, len: usize, what: &str) -> Result<()> {
        if len != self.dim() {
            return Err(Error::usage(format!(
                "{what} has {len} components but the domain has dimension {}",
                self.dim()
            )));
        }
        Ok(())
    }

    /// Sends `u in [-1, 1]^D` to the domain, `-1 -> lo` and `1 -> hi` per axis.
    pub fn map_affine(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(u.len(), "point")?;
        u.iter()
            .zip(&self.axes)
            .enumerate()
            .map(|(i, (&ui, axis))| {
                let ui = clamp_reference(ui)
                    .ok_or_else(|| Error::domain(format!("component {i} = {ui} is outside [-1, 1]")))?;
                Ok(axis.from_reference(ui))
            })
            .collect()
    }

    /// Sends a domain point to `[-1, 1]^D`. Points within the boundary slack
    /// are clamped onto the boundary.
    pub fn map_affine_inv(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x.len(), "point")?;
        x.iter()
            .zip(&self.axes)
            .enumerate()
            .map(|(i, (&xi, axis))| {
                clamp_reference(axis.to_reference(xi))
                    .ok_or_else(|| Error::domain(format!("component {i} = {xi} is outside {axis}")))
            })
            .collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.map_affine_inv(x).is_ok()
    }
}

fn clamp_reference(u: f64) -> Option<f64> {
    if !u.is_finite() || u.abs() > 1.0 + BOUNDARY_SLACK {
        None
    } else {
        Some(u.clamp(-1.0, 1.0))
    }
}

/// Index into an interpolation tensor, one entry per axis.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(entries: Vec<usize>) -> Self {
        Self(entries)
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Per-axis polynomial degrees `(N_1, ..., N_D)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct NodeBudget {
    degrees: Vec<usize>,
}

impl NodeBudget {
    /// Rejects empty budgets and budgets whose grid would not fit in memory.
    pub fn new(degrees: Vec<usize>) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::usage("a node budget needs at least one axis"));
        }
        let mut total: usize = 1;
        for &n in &degrees {
            total = n
                .checked_add(1)
                .and_then(|m| total.checked_mul(m))
                .filter(|&t| t <= MAX_TENSOR_LEN)
                .ok_or_else(|| Error::usage(format!("grid for degrees {degrees:?} is too large to address")))?;
        }
        Ok(Self { degrees })
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    /// `prod (N_i + 1)`.
    pub fn grid_points(&self) -> usize {
        self.degrees.iter().map(|n| n + 1).product()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.degrees.iter().map(|n| n + 1).collect()
    }

    pub fn contains(&self, index: &MultiIndex) -> bool {
        index.0.len() == self.dim() && index.0.iter().zip(&self.degrees).all(|(j, n)| j <= n)
    }

    /// Multi-index of a flat position in the canonical layout.
    pub fn unravel(&self, mut flat: usize) -> MultiIndex {
        let mut idx = vec![0; self.dim()];
        for axis in (0..self.dim()).rev() {
            let len = self.degrees[axis] + 1;
            idx[axis] = flat % len;
            flat /= len;
        }
        MultiIndex(idx)
    }

    /// Flat position of a multi-index in the canonical layout.
    pub fn ravel(&self, index: &MultiIndex) -> Option<usize> {
        if !self.contains(index) {
            return None;
        }
        Some(
            index
                .0
                .iter()
                .zip(&self.degrees)
                .fold(0, |acc, (&j, &n)| acc * (n + 1) + j),
        )
    }

    /// All of `J` in canonical order.
    pub fn multi_indices(&self) -> impl Iterator<Item = MultiIndex> + '_ {
        (0..self.grid_points()).map(move |flat| self.unravel(flat))
    }
}

impl fmt::Display for NodeBudget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        MultiIndex(self.degrees.clone()).fmt(f)
    }
}

/// `T_k(x)` by the three-term recurrence; works for real and complex `x`.
pub fn chebyshev_t<T>(k: usize, x: T) -> T
where
    T: Copy + From<f64> + Add<Output = T> + Sub<Output = T> + Mul<Output = T>,
{
    let one = T::from(1.0);
    if k == 0 {
        return one;
    }
    let two_x = T::from(2.0) * x;
    let (mut prev, mut cur) = (one, x);
    for _ in 1..k {
        let next = two_x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `(cos(pi k / N))_{k=0..=N}`, descending from `1` to `-1`. `N = 0` gives `[1.0]`.
///
/// Evaluated as `sin(pi (N - 2k) / (2N))`, which is the same value but exactly
/// antisymmetric and exactly zero at the midpoint.
pub fn univariate_nodes(n: usize) -> Vec<f64> {
    if n == 0 {
        return vec![1.0];
    }
    let denom = 2.0 * n as f64;
    (0..=n)
        .map(|k| (PI * (n as f64 - 2.0 * k as f64) / denom).sin())
        .collect()
}

/// `m(k, N) = |(k + N - 1) mod 2N - (N - 1)|`: the index with
/// `T_k = T_{m(k,N)}` on the `N`-grid.
pub fn alias_index(k: usize, n: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::usage("alias_index needs N >= 1"));
    }
    let r = (k + n - 1) % (2 * n);
    Ok(r.abs_diff(n - 1))
}

/// Function values on the Chebyshev grid, in canonical layout.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleTensor {
    budget: NodeBudget,
    values: Vec<f64>,
}

impl SampleTensor {
    pub fn from_values(budget: NodeBudget, values: Vec<f64>) -> Result<Self> {
        if values.len() != budget.grid_points() {
            return Err(Error::usage(format!(
                "{} samples supplied for a grid of {} points",
                values.len(),
                budget.grid_points()
            )));
        }
        if let Some(flat) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::data(format!(
                "sample at node {} is not finite",
                budget.unravel(flat)
            )));
        }
        Ok(Self { budget, values })
    }

    pub fn budget(&self) -> &NodeBudget {
        &self.budget
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Chebyshev grid points of `budget`, mapped into `domain`, one table per axis.
pub fn grid_axes(domain: &Hyperrectangle, budget: &NodeBudget) -> Result<Vec<Vec<f64>>> {
    if domain.dim() != budget.dim() {
        return Err(Error::usage(format!(
            "domain has dimension {} but budget has {}",
            domain.dim(),
            budget.dim()
        )));
    }
    Ok(domain
        .axes()
        .iter()
        .zip(budget.degrees())
        .map(|(axis, &n)| univariate_nodes(n).into_iter().map(|u| axis.from_reference(u)).collect())
        .collect())
}

/// Samples `f` at every node of the grid. May run in parallel; the result is
/// identical to sequential sampling.
pub fn sample_on_grid<F>(f: F, domain: &Hyperrectangle, budget: &NodeBudget) -> Result<SampleTensor>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let axes = grid_axes(domain, budget)?;
    let values: Vec<f64> = (0..budget.grid_points())
        .into_par_iter()
        .map_init(
            || vec![0.0; budget.dim()],
            |point, flat| {
                let idx = budget.unravel(flat);
                for (axis, &k) in idx.entries().iter().enumerate() {
                    point[axis] = axes[axis][k];
                }
                f(point)
            },
        )
        .collect();
    if let Some(flat) = values.iter().position(|v| !v.is_finite()) {
        let idx = budget.unravel(flat);
        let point: Vec<f64> = idx.entries().iter().enumerate().map(|(a, &k)| axes[a][k]).collect();
        return Err(Error::data(format!(
            "f is not finite at node {idx} (x = {point:?}): {}",
            values[flat]
        )));
    }
    Ok(SampleTensor {
        budget: budget.clone(),
        values,
    })
}

/// Per-axis transform matrix, row `j`, column `k`:
/// `(2^[0<j<N] / N) * w_k * cos(j pi k / N)` with `w_0 = w_N = 1/2`.
fn axis_transform(n: usize) -> Vec<f64> {
    if n == 0 {
        return vec![1.0];
    }
    let len = n + 1;
    let two_n = 2 * n;
    let mut m = vec![0.0; len * len];
    for j in 0..len {
        let pref = if j > 0 && j < n { 2.0 } else { 1.0 } / n as f64;
        for k in 0..len {
            let w = if k == 0 || k == n { 0.5 } else { 1.0 };
            let phase = (j * k) % two_n;
            m[j * len + k] = pref * w * (PI * phase as f64 / n as f64).cos();
        }
    }
    m
}

/// Coefficient tensor `c_j` of the interpolant through `samples`.
///
/// The coefficient sum factorizes over axes, so it is applied one axis at a
/// time; this is the same sum as the full tensor expression. Zero-degree
/// axes pass their single sample through unchanged.
pub fn compute_coefficients(samples: &SampleTensor, budget: &NodeBudget) -> Result<Vec<f64>> {
    if samples.budget != *budget {
        return Err(Error::usage(format!(
            "samples are shaped for {} but the budget is {}",
            samples.budget, budget
        )));
    }
    let shape = budget.shape();
    let mut data = samples.values.clone();
    let mut scratch = Vec::new();
    for (axis, &len) in shape.iter().enumerate() {
        if len == 1 {
            continue;
        }
        let matrix = axis_transform(len - 1);
        let stride: usize = shape[axis + 1..].iter().product();
        let outer: usize = shape[..axis].iter().product();
        scratch.resize(len, 0.0);
        for o in 0..outer {
            let base = o * len * stride;
            for t in 0..stride {
                for (k, s) in scratch.iter_mut().enumerate() {
                    *s = data[base + k * stride + t];
                }
                for j in 0..len {
                    let row = &matrix[j * len..(j + 1) * len];
                    data[base + j * stride + t] = row.iter().zip(&scratch).map(|(a, b)| a * b).sum();
                }
            }
        }
    }
    Ok(data)
}

/// `sum_k c_k T_k(x)` by Clenshaw's recurrence.
#[inline]
pub fn clenshaw(coefs: &[f64], x: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &c in coefs[1..].iter().rev() {
        let b0 = c + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    coefs[0] + x * b1 - b2
}

/// Interpolant `sum_{j in J} c_j T_j(u(x))` on a hyperrectangle.
#[derive(Clone, Debug, PartialEq)]
pub struct ChebyshevInterpolant {
    domain: Hyperrectangle,
    budget: NodeBudget,
    coefficients: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct CoefficientDocument {
    domain: Vec<[f64; 2]>,
    degrees: Vec<usize>,
    layout: String,
    coefficients: Vec<f64>,
}

impl ChebyshevInterpolant {
    /// Samples `f` on the grid and builds the interpolant.
    pub fn fit<F>(f: F, domain: &Hyperrectangle, budget: &NodeBudget) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let samples = sample_on_grid(f, domain, budget)?;
        Self::from_samples(domain, &samples)
    }

    pub fn from_samples(domain: &Hyperrectangle, samples: &SampleTensor) -> Result<Self> {
        let coefficients = compute_coefficients(samples, samples.budget())?;
        Self::from_parts(domain.clone(), samples.budget().clone(), coefficients)
    }

    pub fn from_parts(domain: Hyperrectangle, budget: NodeBudget, coefficients: Vec<f64>) -> Result<Self> {
        if domain.dim() != budget.dim() {
            return Err(Error::usage(format!(
                "domain has dimension {} but budget has {}",
                domain.dim(),
                budget.dim()
            )));
        }
        if coefficients.len() != budget.grid_points() {
            return Err(Error::usage(format!(
                "{} coefficients supplied for budget {budget} ({} expected)",
                coefficients.len(),
                budget.grid_points()
            )));
        }
        if let Some(flat) = coefficients.iter().position(|c| !c.is_finite()) {
            return Err(Error::data(format!("coefficient {} is not finite", budget.unravel(flat))));
        }
        Ok(Self {
            domain,
            budget,
            coefficients,
        })
    }

    pub fn domain(&self) -> &Hyperrectangle {
        &self.domain
    }

    pub fn budget(&self) -> &NodeBudget {
        &self.budget
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn coefficient(&self, index: &MultiIndex) -> Option<f64> {
        self.budget.ravel(index).map(|flat| self.coefficients[flat])
    }

    /// Value at a domain point; points outside the domain (beyond the
    /// boundary slack) are rejected.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        let u = self.domain.map_affine_inv(x)?;
        Ok(self.evaluate_reference(&u))
    }

    /// Value at reference coordinates `u in [-1, 1]^D`, unchecked.
    ///
    /// Contracts the last axis first: each contiguous row of coefficients is
    /// collapsed by Clenshaw's recurrence, which leaves a tensor of one lower
    /// order, until a scalar remains.
    pub fn evaluate_reference(&self, u: &[f64]) -> f64 {
        let shape = self.budget.shape();
        let d = shape.len();
        let last = shape[d - 1];
        let mut rows = self.coefficients.len() / last;
        let mut work: Vec<f64> = (0..rows)
            .map(|r| clenshaw(&self.coefficients[r * last..(r + 1) * last], u[d - 1]))
            .collect();
        for axis in (0..d - 1).rev() {
            let len = shape[axis];
            rows /= len;
            for r in 0..rows {
                let v = clenshaw(&work[r * len..(r + 1) * len], u[axis]);
                work[r] = v;
            }
        }
        work[0]
    }

    /// JSON document `{"domain", "degrees", "layout", "coefficients"}`.
    pub fn to_json(&self) -> String {
        let doc = CoefficientDocument {
            domain: self.domain.bounds(),
            degrees: self.budget.degrees().to_vec(),
            layout: LAYOUT_TAG.to_string(),
            coefficients: self.coefficients.clone(),
        };
        format::to_json_string(&doc)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CoefficientDocument =
            serde_json::from_str(text).map_err(|e| Error::usage(format!("invalid coefficient document: {e}")))?;
        if doc.layout != LAYOUT_TAG {
            return Err(Error::usage(format!(
                "unsupported layout {:?}, expected {LAYOUT_TAG:?}",
                doc.layout
            )));
        }
        let axes: Vec<(f64, f64)> = doc.domain.iter().map(|b| (b[0], b[1])).collect();
        Self::from_parts(
            Hyperrectangle::new(&axes)?,
            NodeBudget::new(doc.degrees)?,
            doc.coefficients,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit(d: usize) -> Hyperrectangle {
        Hyperrectangle::reference(d).unwrap()
    }

    fn budget(d: &[usize]) -> NodeBudget {
        NodeBudget::new(d.to_vec()).unwrap()
    }

    #[test]
    fn chebyshev_t_examples() {
        assert_eq!(chebyshev_t(0, 0.37), 1.0);
        assert!((chebyshev_t(2, 0.5f64) + 0.5).abs() < 1e-15);
        let trig = (7.0 * 0.3f64.acos()).cos();
        assert!((chebyshev_t(7, 0.3) - trig).abs() < 1e-13);
    }

    #[test]
    fn chebyshev_t_complex_argument() {
        use num_complex::Complex64;
        let z = Complex64::new(0.3, 0.4);
        let t3 = chebyshev_t(3, z);
        let expected = 4.0 * z * z * z - 3.0 * z;
        assert!((t3 - expected).norm() < 1e-15);
    }

    #[test]
    fn nodes_small_cases() {
        assert_eq!(univariate_nodes(0), vec![1.0]);
        assert_eq!(univariate_nodes(1), vec![1.0, -1.0]);
        assert_eq!(univariate_nodes(2), vec![1.0, 0.0, -1.0]);
        let n4 = univariate_nodes(4);
        let h = 0.5f64.sqrt();
        for (a, b) in n4.iter().zip([1.0, h, 0.0, -h, -1.0]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn nodes_exactly_antisymmetric() {
        for n in 1..40 {
            let x = univariate_nodes(n);
            for k in 0..=n {
                assert_eq!(x[k], -x[n - k]);
            }
        }
    }

    #[test]
    fn affine_examples() {
        let d = unit(2);
        let x = d.map_affine(&[0.3, -0.7]).unwrap();
        assert!((x[0] - 0.3).abs() < 1e-15 && (x[1] + 0.7).abs() < 1e-15);
        let d = Hyperrectangle::new(&[(0.0, 2.0)]).unwrap();
        assert_eq!(d.map_affine(&[-1.0]).unwrap(), vec![0.0]);
        assert_eq!(d.map_affine(&[1.0]).unwrap(), vec![2.0]);
        let d = Hyperrectangle::new(&[(1.0, 3.0)]).unwrap();
        assert_eq!(d.map_affine(&[0.0]).unwrap(), vec![2.0]);
    }

    #[test]
    fn affine_rejects_out_of_range() {
        let d = Hyperrectangle::new(&[(1.0, 3.0)]).unwrap();
        assert!(matches!(d.map_affine(&[1.5]), Err(Error::Domain(_))));
        assert!(matches!(d.map_affine_inv(&[3.1]), Err(Error::Domain(_))));
        // inside the slack: clamped
        assert_eq!(d.map_affine_inv(&[3.0 + 1e-13]).unwrap(), vec![1.0]);
    }

    #[test]
    fn hyperrectangle_validation() {
        assert!(Hyperrectangle::new(&[]).is_err());
        assert!(Hyperrectangle::new(&[(1.0, 1.0)]).is_err());
        assert!(Hyperrectangle::new(&[(2.0, 1.0)]).is_err());
        assert!(Hyperrectangle::new(&[(0.0, f64::INFINITY)]).is_err());
    }

    #[test]
    fn budget_guards_size() {
        assert!(NodeBudget::new(vec![]).is_err());
        assert!(NodeBudget::new(vec![usize::MAX]).is_err());
        assert!(NodeBudget::new(vec![1 << 40, 1 << 40]).is_err());
        assert_eq!(budget(&[2, 3]).grid_points(), 12);
    }

    #[test]
    fn ravel_unravel() {
        let b = budget(&[2, 0, 3]);
        for (flat, idx) in b.multi_indices().enumerate() {
            assert_eq!(b.ravel(&idx), Some(flat));
        }
        assert_eq!(b.unravel(5).entries(), &[1, 0, 1]);
        assert_eq!(b.ravel(&MultiIndex::new(vec![3, 0, 0])), None);
    }

    #[test]
    fn alias_examples() {
        assert_eq!(alias_index(3, 5).unwrap(), 3);
        assert_eq!(alias_index(8, 4).unwrap(), 0);
        assert_eq!(alias_index(5, 4).unwrap(), 3);
        assert!(alias_index(3, 0).is_err());
        for n in 1..10 {
            for k in 0..=n {
                assert_eq!(alias_index(k, n).unwrap(), k);
            }
        }
    }

    #[test]
    fn aliasing_identity_on_grid() {
        for n in 1..=16 {
            let nodes = univariate_nodes(n);
            for k in 0..=4 * n {
                let m = alias_index(k, n).unwrap();
                for &x in &nodes {
                    assert!((chebyshev_t(k, x) - chebyshev_t(m, x)).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn sample_examples() {
        let s = sample_on_grid(|_| 3.0, &unit(2), &budget(&[1, 1])).unwrap();
        assert_eq!(s.values(), &[3.0; 4]);
        let s = sample_on_grid(|x| x[0], &unit(1), &budget(&[2])).unwrap();
        assert_eq!(s.values(), &[1.0, 0.0, -1.0]);
        let s = sample_on_grid(|x| x[0] + x[1], &unit(2), &budget(&[1, 1])).unwrap();
        assert_eq!(s.values(), &[2.0, 0.0, 0.0, -2.0]);
    }

    #[test]
    fn sample_reports_bad_node() {
        let err = sample_on_grid(|x| 1.0 / x[0], &unit(1), &budget(&[2])).unwrap_err();
        match err {
            Error::Data(msg) => assert!(msg.contains("(1)"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sample_dimension_mismatch() {
        assert!(matches!(
            sample_on_grid(|_| 0.0, &unit(2), &budget(&[1])),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn coefficient_examples() {
        let s = sample_on_grid(|_| 1.0, &unit(1), &budget(&[4])).unwrap();
        let c = compute_coefficients(&s, &budget(&[4])).unwrap();
        for (a, b) in c.iter().zip([1.0, 0.0, 0.0, 0.0, 0.0]) {
            assert!((a - b).abs() < 1e-14);
        }
        let s = sample_on_grid(|x| chebyshev_t(2, x[0]), &unit(1), &budget(&[4])).unwrap();
        let c = compute_coefficients(&s, &budget(&[4])).unwrap();
        for (a, b) in c.iter().zip([0.0, 0.0, 1.0, 0.0, 0.0]) {
            assert!((a - b).abs() < 1e-14);
        }
        let b22 = budget(&[2, 2]);
        let s = sample_on_grid(|x| x[0] * x[1], &unit(2), &b22).unwrap();
        let c = compute_coefficients(&s, &b22).unwrap();
        for (flat, v) in c.iter().enumerate() {
            let want = if flat == 4 { 1.0 } else { 0.0 };
            assert!((v - want).abs() < 1e-13, "{flat}: {v}");
        }
    }

    #[test]
    fn coefficient_shape_mismatch() {
        let s = sample_on_grid(|_| 1.0, &unit(1), &budget(&[4])).unwrap();
        assert!(matches!(compute_coefficients(&s, &budget(&[3])), Err(Error::Usage(_))));
    }

    #[test]
    fn zero_degree_axis_is_constant_in_that_variable() {
        // f depends on y only through the value at the single node y = hi.
        let d = Hyperrectangle::new(&[(-1.0, 1.0), (0.0, 2.0)]).unwrap();
        let b = budget(&[3, 0]);
        let p = ChebyshevInterpolant::fit(|x| x[0] * x[0] + x[1], &d, &b).unwrap();
        for &y in &[0.0, 0.7, 2.0] {
            let v = p.evaluate(&[0.5, y]).unwrap();
            assert!((v - (0.25 + 2.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn evaluate_examples() {
        let c5 = ChebyshevInterpolant::fit(|_| 5.0, &unit(2), &budget(&[3, 2])).unwrap();
        assert!((c5.evaluate(&[0.1, -0.9]).unwrap() - 5.0).abs() < 1e-13);
        let xy = ChebyshevInterpolant::fit(|x| x[0] * x[1], &unit(2), &budget(&[1, 1])).unwrap();
        assert!((xy.evaluate(&[0.3, -0.5]).unwrap() + 0.15).abs() < 1e-15);
        let r = ChebyshevInterpolant::fit(|x| 1.0 / (3.0 - x[0]), &unit(1), &budget(&[20])).unwrap();
        assert!((r.evaluate(&[0.9]).unwrap() - 1.0 / 2.1).abs() < 1e-10);
    }

    #[test]
    fn evaluate_rejects_outside() {
        let p = ChebyshevInterpolant::fit(|x| x[0], &unit(1), &budget(&[2])).unwrap();
        assert!(matches!(p.evaluate(&[1.5]), Err(Error::Domain(_))));
        assert!(matches!(p.evaluate(&[0.0, 0.0]), Err(Error::Usage(_))));
        assert!(p.evaluate(&[1.0 + 1e-13]).is_ok());
    }

    #[test]
    fn from_parts_validates() {
        assert!(ChebyshevInterpolant::from_parts(unit(1), budget(&[2]), vec![1.0, 2.0]).is_err());
        assert!(ChebyshevInterpolant::from_parts(unit(2), budget(&[2]), vec![1.0; 3]).is_err());
        assert!(ChebyshevInterpolant::from_parts(unit(1), budget(&[1]), vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn json_document_shape() {
        let d = Hyperrectangle::new(&[(0.0, 2.0), (-1.0, 3.0)]).unwrap();
        let p = ChebyshevInterpolant::fit(|x| x[0] * x[1] + 1.0, &d, &budget(&[1, 2])).unwrap();
        let text = p.to_json();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["layout"], "lex-last-fastest");
        assert_eq!(value["degrees"], serde_json::json!([1, 2]));
        assert_eq!(value["coefficients"].as_array().unwrap().len(), 6);
        assert_eq!(value["domain"][1][1].as_f64(), Some(3.0));
        assert_eq!(ChebyshevInterpolant::from_json(&text).unwrap(), p);
    }

    #[test]
    fn json_rejects_other_layout() {
        let text = r#"{"domain":[[-1,1]],"degrees":[1],"layout":"first-fastest","coefficients":[0,1]}"#;
        assert!(ChebyshevInterpolant::from_json(text).is_err());
    }

    proptest! {
        #[test]
        fn json_round_trip_is_bit_faithful(
            coefs in proptest::collection::vec(proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO, 6),
            lo in -1e6f64..1e6, width in 1e-6f64..1e6,
        ) {
            let d = Hyperrectangle::new(&[(lo, lo + width), (-1.0, 1.0)]).unwrap();
            let p = ChebyshevInterpolant::from_parts(d, budget(&[2, 1]), coefs.clone()).unwrap();
            let back = ChebyshevInterpolant::from_json(&p.to_json()).unwrap();
            for (a, b) in back.coefficients().iter().zip(&coefs) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
            prop_assert_eq!(back.domain().axes()[0].lo().to_bits(), lo.to_bits());
        }

        #[test]
        fn affine_round_trip(lo in -100.0f64..100.0, width in 1e-3f64..100.0, t in 0.0f64..=1.0) {
            let d = Hyperrectangle::new(&[(lo, lo + width)]).unwrap();
            let x = lo + t * width;
            let back = d.map_affine(&d.map_affine_inv(&[x]).unwrap()).unwrap()[0];
            prop_assert!((back - x).abs() <= 1e-14 * x.abs().max(lo.abs().max((lo + width).abs())));
        }
    }
}
