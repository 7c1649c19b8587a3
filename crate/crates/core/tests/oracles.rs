//! Production code against the independent references in `common`.

mod common;

use chebbound_core::bounds::{self, BoundInputs, MParams, Pairing, Permutation};
use chebbound_core::cheb::{self, ChebyshevInterpolant, Hyperrectangle, NodeBudget, SampleTensor};
use common::{brute, oracle};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_budget(rng: &mut ChaCha8Rng) -> Vec<usize> {
    let d = rng.random_range(1..=3);
    (0..d).map(|_| rng.random_range(0..=7)).collect()
}

#[test]
fn coefficients_match_full_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..40 {
        let degrees = random_budget(&mut rng);
        let budget = NodeBudget::new(degrees.clone()).unwrap();
        let values: Vec<f64> = (0..budget.grid_points()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let samples = SampleTensor::from_values(budget.clone(), values.clone()).unwrap();
        let fast = cheb::compute_coefficients(&samples, &budget).unwrap();
        let slow = brute::coefficients(&values, &degrees);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).abs() <= 1e-13, "{degrees:?}: {a} vs {b}");
        }
    }
}

#[test]
fn evaluation_matches_naive_expansion() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..40 {
        let degrees = random_budget(&mut rng);
        let d = degrees.len();
        let budget = NodeBudget::new(degrees.clone()).unwrap();
        let coefs: Vec<f64> = (0..budget.grid_points()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let interp = ChebyshevInterpolant::from_parts(Hyperrectangle::reference(d).unwrap(), budget, coefs.clone()).unwrap();
        for _ in 0..10 {
            let u: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..=1.0)).collect();
            let fast = interp.evaluate_reference(&u);
            let slow = brute::evaluate(&coefs, &degrees, &u);
            assert!((fast - slow).abs() <= 1e-12, "{degrees:?} at {u:?}");
        }
    }
}

#[test]
fn nodes_match_direct_cosines() {
    for n in 0..=64 {
        let fast = cheb::univariate_nodes(n);
        let slow = brute::nodes(n);
        assert_eq!(fast.len(), n + 1);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).abs() <= 4.5e-16, "N={n}: {a} vs {b}");
        }
        for k in (0..=n).filter(|_| n > 0) {
            assert_eq!(fast[k], -fast[n - k], "N={n} symmetry at {k}");
        }
    }
}

#[test]
fn interpolant_reproduces_samples_on_a_general_box() {
    let domain = Hyperrectangle::new(&[(0.0, 3.0), (-2.0, -1.0)]).unwrap();
    let budget = NodeBudget::new(vec![6, 4]).unwrap();
    let f = |x: &[f64]| (x[0] * x[1]).sin() + x[0];
    let interp = ChebyshevInterpolant::fit(f, &domain, &budget).unwrap();
    let axes = cheb::grid_axes(&domain, &budget).unwrap();
    for &x in &axes[0] {
        for &y in &axes[1] {
            let got = interp.evaluate(&[x, y]).unwrap();
            assert!((got - f(&[x, y])).abs() <= 1e-13);
        }
    }
}

#[test]
fn interpolant_json_round_trip_is_exact() {
    let domain = Hyperrectangle::new(&[(-1.0, 2.0)]).unwrap();
    let interp = ChebyshevInterpolant::fit(|x| (x[0]).exp(), &domain, &NodeBudget::new(vec![12]).unwrap()).unwrap();
    let back = ChebyshevInterpolant::from_json(&interp.to_json()).unwrap();
    assert_eq!(back, interp);
}

#[test]
fn documented_bound_values_match_oracle() {
    let cases: &[(&[f64], &[usize], f64)] = &[
        (&[2.0], &[10], 1.0),
        (&[2.3, 1.8], &[10, 10], 1.0),
        (&[2.3, 2.5], &[10, 10], 1.0),
        (&[2.95, 9.8], &[8, 4], 1.0),
        (&[1.3, 4.0, 2.2, 9.0], &[5, 2, 9, 1], 2.0),
    ];
    for &(rho, n, v) in cases {
        let i = BoundInputs::from_slices(rho, n, v).unwrap();
        assert!(oracle::rel_err_sqrt(bounds::bound_b(&i), &oracle::b_squared(rho, n, v)) < 1e-13);
        let p = MParams::default();
        let rec = bounds::recursive_bound_b(&i, &p).unwrap();
        assert!(oracle::rel_err(rec, &oracle::recursive_b(rho, n, v, 0.0)) < 1e-13);
        let m = bounds::m_upper_bound(rho, n, v, &p).unwrap();
        assert!(oracle::rel_err(m, &oracle::m_upper(rho, n, v, 0.0)) < 1e-13);
    }
}

#[test]
fn a_minimum_is_the_exact_minimum() {
    // the searched minimum must be the smallest exact value over all orders
    let rho = [1.3, 4.0, 2.2];
    let n = [5, 2, 9];
    let i = BoundInputs::from_slices(&rho, &n, 1.0).unwrap();
    let found = bounds::bound_a(&i, Pairing::Consistent);
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let exact: Vec<f64> = perms
        .iter()
        .map(|s| oracle::to_f64(&oracle::a_for_sigma(&rho, &n, 1.0, s, false)))
        .collect();
    let best = exact.iter().copied().fold(f64::INFINITY, f64::min);
    assert!((found.value - best).abs() <= 1e-14 * best);
    let idx = perms.iter().position(|s| s == found.sigma.as_slice()).unwrap();
    assert!((exact[idx] - best).abs() <= 1e-14 * best);
    assert_eq!(Permutation::new(found.sigma.as_slice().to_vec()).unwrap(), found.sigma);
}

#[test]
fn univariate_examples_are_exact() {
    assert_eq!(bounds::bound_univariate(2.0, 10, 1.0).unwrap(), 0.00390625);
    let exact = oracle::univariate(3.7, 12, 0.25);
    assert!(oracle::rel_err(bounds::bound_univariate(3.7, 12, 0.25).unwrap(), &exact) < 1e-15);
}
