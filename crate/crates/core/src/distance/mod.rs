//! Calculus of the squared distance: gradient, Hessian through Jacobi
//! fields and the index form, and the comparison bounds it is tested
//! against.

pub mod bounds;
pub mod form;
pub mod variation;
pub mod verify;

pub use bounds::{
    comparison_coefficients, comparison_profile, cs, ct, hessian_bound, laplacian_bound, parallel_direction_bound,
};
pub use form::{min_eigenvalue, FormRecord, SymmetricForm};
pub use variation::{
    grad_sq_distance, hess_sq_distance, hessian_finite_difference, SecondVariation, SqDistanceGradient,
};
pub use verify::{verify_hessian, verify_laplacian, ComparisonReport};
