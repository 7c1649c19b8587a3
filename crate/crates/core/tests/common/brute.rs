//! Brute-force references for the interpolant: the full coefficient sum
//! over every node and the naive basis expansion, both on `[-1, 1]^D`.

use std::f64::consts::PI;

fn unravel(mut flat: usize, shape: &[usize]) -> Vec<usize> {
    let mut idx = vec![0; shape.len()];
    for axis in (0..shape.len()).rev() {
        idx[axis] = flat % shape[axis];
        flat /= shape[axis];
    }
    idx
}

/// Full double sum for the coefficient tensor: every `c_j` is computed
/// from every sample, halving the first and last summand per axis.
/// Zero-degree axes take the sample at their single node.
pub fn coefficients(values: &[f64], degrees: &[usize]) -> Vec<f64> {
    let shape: Vec<usize> = degrees.iter().map(|n| n + 1).collect();
    let size: usize = shape.iter().product();
    let mut out = vec![0.0; size];
    for (jf, slot) in out.iter_mut().enumerate() {
        let j = unravel(jf, &shape);
        let mut pref = 1.0;
        for (ji, &ni) in j.iter().zip(degrees) {
            if ni > 0 {
                pref *= if *ji > 0 && *ji < ni { 2.0 } else { 1.0 } / ni as f64;
            }
        }
        let mut acc = 0.0;
        for (kf, &fv) in values.iter().enumerate() {
            let k = unravel(kf, &shape);
            let mut w = fv;
            for axis in 0..degrees.len() {
                let ni = degrees[axis];
                if ni == 0 {
                    continue;
                }
                if k[axis] == 0 || k[axis] == ni {
                    w *= 0.5;
                }
                w *= (j[axis] as f64 * PI * k[axis] as f64 / ni as f64).cos();
            }
            acc += w;
        }
        *slot = pref * acc;
    }
    out
}

/// `sum_j c_j prod_i cos(j_i arccos u_i)`.
pub fn evaluate(coefs: &[f64], degrees: &[usize], u: &[f64]) -> f64 {
    let shape: Vec<usize> = degrees.iter().map(|n| n + 1).collect();
    let mut acc = 0.0;
    for (jf, &c) in coefs.iter().enumerate() {
        let j = unravel(jf, &shape);
        let mut basis = 1.0;
        for (axis, &ji) in j.iter().enumerate() {
            basis *= (ji as f64 * u[axis].clamp(-1.0, 1.0).acos()).cos();
        }
        acc += c * basis;
    }
    acc
}

/// Direct cosine evaluation of the nodes `cos(pi k / N)`.
pub fn nodes(n: usize) -> Vec<f64> {
    if n == 0 {
        return vec![1.0];
    }
    (0..=n).map(|k| (PI * k as f64 / n as f64).cos()).collect()
}
