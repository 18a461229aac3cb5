//! Numerical maximum principles for viscosity solutions on Riemannian
//! manifolds given by a single coordinate chart.

pub mod distance;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod jets;
pub mod principle;
pub mod ode;
pub mod random;
pub mod report;

pub use error::{Error, Result};
