//! Workloads shared by the benchmarks under `benches/`.

use chebbound_core::{BoundInputs, EllipseRadii, NodeBudget, PlanRequest, Selector};

/// The function interpolated in the fit and evaluate benchmarks.
pub fn separable_rational(x: &[f64]) -> f64 {
    x.iter().map(|&xi| 1.0 / (2.0 - xi)).product()
}

/// Node budgets of a few thousand points at most, in dimensions 1 to 4.
pub fn interpolation_budgets() -> Vec<NodeBudget> {
    [vec![64], vec![32, 32], vec![16, 16, 16], vec![8, 8, 8, 8]]
        .into_iter()
        .map(|d| NodeBudget::new(d).expect("small budget"))
        .collect()
}

/// Bound inputs in dimension `d` with distinct radii and degrees.
pub fn bound_inputs(d: usize) -> BoundInputs {
    let rho: Vec<f64> = (0..d).map(|i| 1.5 + 0.4 * i as f64).collect();
    let n: Vec<usize> = (0..d).map(|i| 6 + i).collect();
    BoundInputs::from_slices(&rho, &n, 1.0).expect("valid inputs")
}

/// Dimensions for the bound benchmarks; 8 is the largest exhaustive search.
pub const BOUND_DIMS: [usize; 4] = [2, 4, 8, 10];

/// Planning requests labelled by dimension.
pub fn plan_requests() -> Vec<(String, PlanRequest)> {
    let mut out = Vec::new();
    for (name, rho) in [("2d", vec![2.95, 9.8]), ("3d", vec![1.8, 2.5, 4.0])] {
        for selector in [Selector::A, Selector::B, Selector::Combined] {
            let radii = EllipseRadii::new(rho.clone()).expect("radii above 1");
            let request = PlanRequest::new(radii, 1.0, 1e-8, selector).expect("valid request");
            out.push((name.to_string(), request));
        }
    }
    out
}

pub fn label(budget: &NodeBudget) -> String {
    budget.degrees().iter().map(|n| n.to_string()).collect::<Vec<_>>().join("x")
}
