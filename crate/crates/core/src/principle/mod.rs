//! Penalized doubling of variables and the procedures built on it:
//! comparison on a bounded chart, the Omori-Yau search on expanding
//! windows, and the parabolic transform.

pub mod dirichlet;
pub mod doubling;
pub mod matrix;
pub mod omori_yau;
pub mod parabolic;

pub use doubling::{
    doubled_objective, doubling_ladder, ladder_diagnostics, maximize_doubled, pair_distance, refine_doubled,
    DoublingState, PenaltyLadderReport, PenaltyLadderRow, Penalty,
};
pub use matrix::{
    matrix_inequality_check, penalty_hessian, sandwich_delta, sq_distance_hessian_at, MatrixVerdict, PenaltyHessian,
};
pub use dirichlet::{
    boundary_indices, dirichlet_comparison, Certification, DirichletOptions, DirichletStatus, DirichletVerdict,
};
pub use omori_yau::{
    omori_yau_search, revalidate, stencil, yau_points, CheckValue, LadderRow, OmoriYauCertificate, OmoriYauOptions,
    OmoriYauReport, OyMode, PenaltyConfig, Revalidation, WindowLadder, YauPoint,
};
pub use parabolic::{
    epsilon_transform, parabolic_boundary, parabolic_comparison, parabolic_jet_fit, slope_identity, space_time_samples,
    transform_check, ParabolicFit, ParabolicJet, ParabolicJetRecord, ParabolicOptions, ParabolicVerdict, SlopeIdentity,
    TransformReport, TransformRow,
};
