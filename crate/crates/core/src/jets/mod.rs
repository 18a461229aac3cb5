//! Second-order semijets of sampled functions and the structural checks on
//! operators that consume them.

pub mod fit;
pub mod modulus;
pub mod operator;
pub mod sampled;
pub mod solution;

pub use fit::{
    change_of_frame, closure_jet, fit_convergence, fit_quadratic, jet_fit, jet_membership, ClosureJet, ConvergenceReport,
    Jet, JetFit, JetRecord, Membership, Neighborhood, Side, touching_shift, DEFAULT_TOL,
};
pub use modulus::Modulus;
pub use operator::{
    check_condition_h, check_proper, Condition, ConditionHCertificate, ConditionHRow, OperatorF, ProperCertificate,
    ProperSpec, Witness,
};
pub use sampled::{grid_points, SampledFunction};
pub use solution::{check_solution_side, PointVerdict, SolutionOptions, SolutionReport, SolutionSide};
