//! Bernstein ellipses and their products over a hyperrectangle.
//!
//! The reference ellipse `B([-1, 1], rho)` is the image of the circle
//! `|z| = rho` under the Joukowski map; it has foci `+-1` and semi-axes
//! `(rho + 1/rho)/2` and `(rho - 1/rho)/2`. Over a general interval it is moved
//! by the affine transform [`transform_tau`], and the generalized ellipse of a
//! hyperrectangle is the product of the per-axis ellipses. Everything here
//! treats ellipses as closed sets.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cheb::{Hyperrectangle, Interval};
use crate::error::{Error, Result};

/// Smallest admissible radius; anything closer to 1 is treated as the
/// degenerate ellipse `[-1, 1]`.
pub const MIN_RADIUS: f64 = 1.0 + 1e-9;

/// Safety factor applied to a sampled maximum modulus.
pub const V_SAFETY_FACTOR: f64 = 1.01;

/// Angle count per dimension used when callers do not choose one.
pub const DEFAULT_V_RESOLUTION: usize = 256;

/// Fewest boundary angles per dimension accepted by [`estimate_v`].
pub const MIN_V_RESOLUTION: usize = 8;

/// Relative slack used by [`contains`] so that computed boundary points test
/// as members.
const MEMBERSHIP_SLACK: f64 = 1e-12;

/// Per-axis ellipse parameters, each `rho_i > 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct EllipseRadii {
    rho: Vec<f64>,
}

impl EllipseRadii {
    pub fn new(rho: Vec<f64>) -> Result<Self> {
        if rho.is_empty() {
            return Err(Error::usage("at least one radius is required"));
        }
        if let Some((i, r)) = rho.iter().enumerate().find(|(_, r)| !(r.is_finite() && **r >= MIN_RADIUS)) {
            return Err(Error::usage(format!("rho must exceed 1 (rho[{i}] = {r})")));
        }
        Ok(Self { rho })
    }

    /// The same radius on every axis.
    pub fn uniform(rho: f64, dim: usize) -> Result<Self> {
        Self::new(vec![rho; dim])
    }

    pub fn dim(&self) -> usize {
        self.rho.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.rho
    }

    pub fn min(&self) -> f64 {
        self.rho.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

impl TryFrom<Vec<f64>> for EllipseRadii {
    type Error = Error;

    fn try_from(rho: Vec<f64>) -> Result<Self> {
        Self::new(rho)
    }
}

impl From<EllipseRadii> for Vec<f64> {
    fn from(r: EllipseRadii) -> Self {
        r.rho
    }
}

/// Product of per-axis Bernstein ellipses over a hyperrectangle.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralizedBernsteinEllipse {
    domain: Hyperrectangle,
    radii: EllipseRadii,
}

impl GeneralizedBernsteinEllipse {
    pub fn new(domain: Hyperrectangle, radii: EllipseRadii) -> Result<Self> {
        if domain.dim() != radii.dim() {
            return Err(Error::usage(format!(
                "domain has dimension {} but {} radii were given",
                domain.dim(),
                radii.dim()
            )));
        }
        Ok(Self { domain, radii })
    }

    pub fn domain(&self) -> &Hyperrectangle {
        &self.domain
    }

    pub fn radii(&self) -> &EllipseRadii {
        &self.radii
    }

    pub fn dim(&self) -> usize {
        self.radii.dim()
    }

    /// Point of the distinguished boundary at the given angles.
    pub fn boundary_point(&self, theta: &[f64]) -> Vec<Complex64> {
        self.domain
            .axes()
            .iter()
            .zip(self.radii.values())
            .zip(theta)
            .map(|((axis, &rho), &t)| transform_tau(axis, joukowski_unchecked(Complex64::from_polar(rho, t))))
            .collect()
    }
}

#[inline]
fn joukowski_unchecked(z: Complex64) -> Complex64 {
    0.5 * (z + z.inv())
}

/// `(z + 1/z) / 2`.
pub fn joukowski(z: Complex64) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::domain("the Joukowski map is undefined at z = 0"));
    }
    Ok(joukowski_unchecked(z))
}

/// Reference-ellipse boundary point `joukowski(rho e^{i theta})`.
pub fn ellipse_boundary_point(rho: f64, theta: f64) -> Result<Complex64> {
    if !(rho.is_finite() && rho > 1.0) {
        return Err(Error::usage(format!("rho must exceed 1 (got {rho})")));
    }
    Ok(joukowski_unchecked(Complex64::from_polar(rho, theta)))
}

/// Moves a point of `B([-1, 1], rho)` to `B([lo, hi], rho)`:
/// real part `hi + (lo - hi)/2 (1 - Re z)`, imaginary part `(hi - lo)/2 Im z`.
#[inline]
pub fn transform_tau(interval: &Interval, z: Complex64) -> Complex64 {
    let (lo, hi) = (interval.lo(), interval.hi());
    Complex64::new(hi + 0.5 * (lo - hi) * (1.0 - z.re), 0.5 * (hi - lo) * z.im)
}

/// Inverse of [`transform_tau`].
#[inline]
pub fn transform_tau_inv(interval: &Interval, w: Complex64) -> Complex64 {
    let half = interval.half_width();
    Complex64::new((w.re - interval.midpoint()) / half, w.im / half)
}

/// Radius of the reference ellipse through `x`: the larger-modulus root of
/// `(z + 1/z)/2 = x`, which is `|x + sqrt(x^2 - 1)|` on the right branch.
pub fn ellipse_radius_through(x: Complex64) -> f64 {
    // |x - 1| + |x + 1| = rho + 1/rho on the ellipse of parameter rho.
    let s = 0.5 * ((x - 1.0).norm() + (x + 1.0).norm());
    s + (s * s - 1.0).max(0.0).sqrt()
}

/// Whether every component of `p` lies in its closed component ellipse.
pub fn contains(ellipse: &GeneralizedBernsteinEllipse, p: &[Complex64]) -> bool {
    p.len() == ellipse.dim()
        && p
            .iter()
            .zip(ellipse.domain.axes())
            .zip(ellipse.radii.values())
            .all(|((&w, axis), &rho)| {
                let z = transform_tau_inv(axis, w);
                ellipse_radius_through(z) <= rho * (1.0 + MEMBERSHIP_SLACK)
            })
}

/// Radius of the ellipse over `interval` whose boundary passes through the
/// real point `c`. Any smaller radius gives an ellipse that excludes `c`.
///
/// For `c` exactly at an endpoint the result is `1.0`, which no
/// [`EllipseRadii`] accepts.
pub fn rho_for_real_singularity(c: f64, interval: &Interval) -> Result<f64> {
    let u = interval.to_reference(c).abs();
    if !u.is_finite() || u < 1.0 {
        return Err(Error::usage(format!("singularity {c} lies inside {interval}")));
    }
    Ok(u + (u * u - 1.0).sqrt())
}

/// `2 pi m / r` computed from the reduced fraction, so that refined grids
/// reproduce the coarse angles bit for bit.
pub(crate) fn grid_angle(m: usize, r: usize) -> f64 {
    let g = gcd(m, r);
    2.0 * PI * (m / g) as f64 / (r / g) as f64
}

pub(crate) fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

fn unravel(mut flat: usize, resolution: &[usize], out: &mut [usize]) {
    for axis in (0..resolution.len()).rev() {
        out[axis] = flat % resolution[axis];
        flat /= resolution[axis];
    }
}

fn check_resolution(ellipse: &GeneralizedBernsteinEllipse, resolution: &[usize]) -> Result<usize> {
    if resolution.len() != ellipse.dim() {
        return Err(Error::usage(format!(
            "{} angle counts given for a {}-dimensional ellipse",
            resolution.len(),
            ellipse.dim()
        )));
    }
    if let Some(r) = resolution.iter().find(|&&r| r < MIN_V_RESOLUTION) {
        return Err(Error::usage(format!(
            "boundary resolution {r} is below the minimum of {MIN_V_RESOLUTION}"
        )));
    }
    resolution
        .iter()
        .try_fold(1usize, |acc, &r| acc.checked_mul(r))
        .ok_or_else(|| Error::usage("boundary grid is too large"))
}

/// One sample of a boundary scan.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundarySample {
    pub theta_index: Vec<usize>,
    pub point: Vec<Complex64>,
    pub modulus: f64,
}

/// `|f|` on every point of the uniform angle grid over the distinguished
/// boundary, in lexicographic angle-index order.
pub fn boundary_scan<F>(f: F, ellipse: &GeneralizedBernsteinEllipse, resolution: &[usize]) -> Result<Vec<BoundarySample>>
where
    F: Fn(&[Complex64]) -> Complex64 + Sync,
{
    let total = check_resolution(ellipse, resolution)?;
    let d = ellipse.dim();
    Ok((0..total)
        .into_par_iter()
        .map(|flat| {
            let mut idx = vec![0; d];
            unravel(flat, resolution, &mut idx);
            let theta: Vec<f64> = idx.iter().zip(resolution).map(|(&m, &r)| grid_angle(m, r)).collect();
            let point = ellipse.boundary_point(&theta);
            let modulus = f(&point).norm();
            BoundarySample {
                theta_index: idx,
                point,
                modulus,
            }
        })
        .collect())
}

/// Sampled bound `V` on `|f|` over the generalized ellipse.
///
/// Takes the maximum modulus over a uniform angle grid on the distinguished
/// boundary (the product of the boundary ellipses) and multiplies it by
/// [`V_SAFETY_FACTOR`]. For `f` analytic on the closed product this is where
/// the maximum lives, but the grid can still miss a sharp peak; the value is
/// an estimate, not a certificate.
pub fn estimate_v<F>(f: F, ellipse: &GeneralizedBernsteinEllipse, resolution: &[usize]) -> Result<f64>
where
    F: Fn(&[Complex64]) -> Complex64 + Sync,
{
    let total = check_resolution(ellipse, resolution)?;
    let d = ellipse.dim();
    let tables: Vec<Vec<Complex64>> = ellipse
        .domain
        .axes()
        .iter()
        .zip(ellipse.radii.values())
        .zip(resolution)
        .map(|((axis, &rho), &r)| {
            (0..r)
                .map(|m| transform_tau(axis, joukowski_unchecked(Complex64::from_polar(rho, grid_angle(m, r)))))
                .collect()
        })
        .collect();
    // (max modulus, first non-finite flat index)
    let (max, bad) = (0..total)
        .into_par_iter()
        .map_init(
            || (vec![0usize; d], vec![Complex64::new(0.0, 0.0); d]),
            |(idx, point), flat| {
                unravel(flat, resolution, idx);
                for axis in 0..d {
                    point[axis] = tables[axis][idx[axis]];
                }
                let m = f(point).norm();
                if m.is_finite() {
                    (m, usize::MAX)
                } else {
                    (0.0, flat)
                }
            },
        )
        .reduce(|| (0.0, usize::MAX), |a, b| (a.0.max(b.0), a.1.min(b.1)));
    if bad != usize::MAX {
        let mut idx = vec![0; d];
        unravel(bad, resolution, &mut idx);
        return Err(Error::data(format!(
            "f is not finite on the ellipse boundary at angle indices {idx:?}; the ellipse is probably too large"
        )));
    }
    Ok(V_SAFETY_FACTOR * max)
}
