//! Tensorized Chebyshev interpolation on hyperrectangles with a-priori error
//! bounds for analytic functions.
//!
//! - [`cheb`]: nodes, coefficients and evaluation of the tensor interpolant.
//! - [`bernstein`]: generalized Bernstein ellipses and sampled bounds on `|f|`.
//! - [`bounds`]: the closed-form error bounds `a`, `b` and their minimum.
//! - [`planner`]: cheapest node budgets meeting an error target.
//! - [`empirical`]: measured errors on test functions and bound checks.
//!
//! ```
//! use chebbound_core::{bound_combined, BoundInputs, Pairing, Winner};
//!
//! let inputs = BoundInputs::from_slices(&[2.0], &[10], 1.0).unwrap();
//! let report = bound_combined(&inputs, Pairing::Consistent);
//! assert!((report.a_value - 0.00390625).abs() < 1e-15);
//! assert_eq!(report.winner, Winner::B);
//! ```

mod error;

pub mod bernstein;
pub mod bounds;
pub mod cheb;
pub mod empirical;
pub mod format;
pub mod planner;

pub use bernstein::{estimate_v, EllipseRadii, GeneralizedBernsteinEllipse};
pub use bounds::{
    bound_a, bound_a_for_sigma, bound_b, bound_combined, bound_univariate, m_upper_bound, recursive_bound_b,
    recursive_bound_b_min, BoundInputs, BoundReport, MParams, Pairing, Permutation, SigmaSearch, Winner,
};
pub use cheb::{ChebyshevInterpolant, Hyperrectangle, Interval, MultiIndex, NodeBudget, SampleTensor};
pub use empirical::{TestFunction, VerificationRecord};
pub use error::{Error, Result};
pub use planner::{compare_plans, invert_univariate, plan_nodes, Plan, PlanComparison, PlanRequest, Selector};
