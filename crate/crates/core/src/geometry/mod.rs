//! Chart manifolds and the Riemannian primitives built on them.

pub mod config;
pub mod curvature;
pub mod frame;
pub mod geodesic;
pub mod manifold;

pub use config::{load_manifold, ManifoldSpec};
pub use curvature::{ricci, riemann, sectional, Riemann};
pub use frame::Frame;
pub use geodesic::{
    distance, exp_map, geodesic_from, jacobi_field, log_map, minimizing_geodesic, parallel_transport,
    transport_many, GeodesicPath, GeodesicSample, JacobiField, PathBundle,
};
pub use manifold::{ChartDomain, ChartManifold, Christoffel, MetricSource, Point};
