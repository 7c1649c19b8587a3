//! Exact rational evaluator for the closed-form bounds.
//!
//! Every input double is converted to the rational number it represents and
//! each formula is evaluated term by term in exact arithmetic, so the only
//! rounding left is the final comparison against the double result. `b`
//! carries a square root, so the oracle returns `b^2` exactly and comparisons
//! are done on the squared quantity.
//!
//! Fractions are kept unreduced: the operands are powers of dyadic rationals
//! with tens of thousands of bits, where gcd normalization after every
//! operation dominates the cost and buys nothing.

use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Sub};

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `num / den` with `den > 0`, never reduced.
#[derive(Clone, Debug)]
pub struct Q {
    num: BigInt,
    den: BigInt,
}

impl Q {
    fn new(num: BigInt, den: BigInt) -> Self {
        if den.sign() == Sign::Minus {
            Q { num: -num, den: -den }
        } else {
            Q { num, den }
        }
    }

    pub fn zero() -> Self {
        Q { num: BigInt::zero(), den: BigInt::one() }
    }

    pub fn one() -> Self {
        Q { num: BigInt::one(), den: BigInt::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn recip(&self) -> Self {
        Q::new(self.den.clone(), self.num.clone())
    }

    pub fn abs(&self) -> Self {
        Q { num: self.num.abs(), den: self.den.clone() }
    }

    fn cmp_exact(&self, other: &Q) -> Ordering {
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }

    pub fn lt(&self, other: &Q) -> bool {
        self.cmp_exact(other) == Ordering::Less
    }

    pub fn to_f64(&self) -> f64 {
        BigRational::new_raw(self.num.clone(), self.den.clone())
            .to_f64()
            .unwrap_or(0.0)
    }
}

impl<'a> Add<&'a Q> for &'a Q {
    type Output = Q;
    fn add(self, o: &Q) -> Q {
        Q::new(&self.num * &o.den + &o.num * &self.den, &self.den * &o.den)
    }
}

impl<'a> Sub<&'a Q> for &'a Q {
    type Output = Q;
    fn sub(self, o: &Q) -> Q {
        Q::new(&self.num * &o.den - &o.num * &self.den, &self.den * &o.den)
    }
}

impl<'a> Mul<&'a Q> for &'a Q {
    type Output = Q;
    fn mul(self, o: &Q) -> Q {
        Q::new(&self.num * &o.num, &self.den * &o.den)
    }
}

impl<'a> Div<&'a Q> for &'a Q {
    type Output = Q;
    fn div(self, o: &Q) -> Q {
        Q::new(&self.num * &o.den, &self.den * &o.num)
    }
}

/// The exact value of a finite double.
pub fn q(x: f64) -> Q {
    let r = BigRational::from_float(x).expect("finite input");
    Q::new(r.numer().clone(), r.denom().clone())
}

pub fn qi(n: i64) -> Q {
    Q { num: BigInt::from(n), den: BigInt::one() }
}

fn pow(base: &Q, e: usize) -> Q {
    Q {
        num: num_traits::pow(base.num.clone(), e),
        den: num_traits::pow(base.den.clone(), e),
    }
}

/// `rho^(-n)`.
pub fn inv_pow(rho: &Q, n: usize) -> Q {
    pow(rho, n).recip()
}

/// `4 V rho^(-N) / (rho - 1)`.
pub fn univariate(rho: f64, n: usize, v: f64) -> Q {
    let r = q(rho);
    &(&(&qi(4) * &q(v)) * &inv_pow(&r, n)) / &(&r - &qi(1))
}

/// `b^2 = 2^(D+2) V^2 (sum_i rho_i^(-2 N_i)) prod_j 1/(1 - rho_j^(-2))`.
pub fn b_squared(rho: &[f64], n: &[usize], v: f64) -> Q {
    let d = rho.len();
    let rs: Vec<Q> = rho.iter().map(|&r| q(r)).collect();
    let mut sum = Q::zero();
    for i in 0..d {
        sum = &sum + &inv_pow(&rs[i], 2 * n[i]);
    }
    let mut prod = Q::one();
    for r in &rs {
        prod = &prod * &(&qi(1) - &inv_pow(r, 2)).recip();
    }
    let vq = q(v);
    &(&(&pow(&qi(2), d + 2) * &(&vq * &vq)) * &sum) * &prod
}

/// The `a` bound for one permutation (`sigma` zero-based).
///
/// `literal == false` pairs `(rho_{sigma(i)}, N_{sigma(i)})` everywhere;
/// `literal == true` follows the printed indices symbol by symbol.
pub fn a_for_sigma(rho: &[f64], n: &[usize], v: f64, sigma: &[usize], literal: bool) -> Q {
    let d = rho.len();
    let rs: Vec<Q> = rho.iter().map(|&r| q(r)).collect();
    let four_v = &qi(4) * &q(v);
    let mut total = Q::zero();
    for i in 0..d {
        let s = sigma[i];
        let term = if literal {
            &inv_pow(&rs[s], n[i]) / &(&rs[i] - &qi(1))
        } else {
            &inv_pow(&rs[s], n[s]) / &(&rs[s] - &qi(1))
        };
        total = &total + &(&four_v * &term);
    }
    for k in 2..=d {
        let s = sigma[k - 1];
        let nk = if literal { n[k - 1] } else { n[s] };
        let head = &(&four_v * &inv_pow(&rs[s], nk)) / &(&rs[s] - &qi(1));
        let p = pow(&qi(2), k - 1);
        let weight = &p * &(&(&qi(k as i64 - 1) + &p) - &qi(1));
        let mut den = Q::one();
        for j in 1..k {
            den = &den * &(&qi(1) - &rs[sigma[j - 1]].recip());
        }
        total = &total + &(&(&head * &weight) / &den);
    }
    total
}

/// `M(k)` over the given (already truncated) axes with `s_i = 1 + eps`,
/// enumerating every nonzero binary mask.
pub fn m_upper(rho: &[f64], n: &[usize], v: f64, eps: f64) -> Q {
    let d = rho.len();
    let s = &qi(1) + &q(eps);
    let ratios: Vec<Q> = rho.iter().map(|&r| &s / &q(r)).collect();
    let powers: Vec<Q> = (0..d).map(|i| pow(&ratios[i], n[i] + 1)).collect();
    let complements: Vec<Q> = powers.iter().map(|p| &qi(1) - p).collect();
    let mut numer = Q::zero();
    for p in &powers {
        numer = &numer + p;
    }
    for mask in 1u64..(1u64 << d) {
        let mut term = Q::one();
        for delta in 0..d {
            term = if mask >> delta & 1 == 1 {
                &term * &powers[delta]
            } else {
                &term * &complements[delta]
            };
        }
        numer = &numer + &term;
    }
    let mut den = Q::one();
    for r in &ratios {
        den = &den * &(&qi(1) - r);
    }
    &(&(&pow(&qi(2), d) * &q(v)) * &numer) / &den
}

/// The pre-loosening recursion in the given axis order.
pub fn recursive_b(rho: &[f64], n: &[usize], v: f64, eps: f64) -> Q {
    let d = rho.len();
    let mut total = Q::zero();
    for i in 0..d {
        total = &total + &univariate(rho[i], n[i], v);
    }
    for k in 2..=d {
        let m = m_upper(&rho[..k - 1], &n[..k - 1], v, eps);
        let r = q(rho[k - 1]);
        let term = &(&(&qi(4) * &m) * &inv_pow(&r, n[k - 1])) / &(&r - &qi(1));
        total = &total + &term;
    }
    total
}

/// `|computed - exact| / exact`, evaluated exactly and rounded once.
pub fn rel_err(computed: f64, exact: &Q) -> f64 {
    if exact.is_zero() {
        return computed.abs();
    }
    (&(&q(computed) - exact).abs() / &exact.abs()).to_f64()
}

/// Relative error of `computed` against `sqrt(exact_sq)`.
pub fn rel_err_sqrt(computed: f64, exact_sq: &Q) -> f64 {
    if exact_sq.is_zero() {
        return computed.abs();
    }
    let c = q(computed);
    let ratio = (&(&c * &c) / exact_sq).to_f64();
    (ratio.sqrt() - 1.0).abs()
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64()
}

/// Whether `x` is below the smallest positive normal double, exactly.
pub fn below_normal(x: &Q) -> bool {
    x.lt(&q(f64::MIN_POSITIVE))
}

/// Whether `sqrt(x_sq)` is below the smallest positive normal double, exactly.
pub fn sqrt_below_normal(x_sq: &Q) -> bool {
    let m = q(f64::MIN_POSITIVE);
    x_sq.lt(&(&m * &m))
}
