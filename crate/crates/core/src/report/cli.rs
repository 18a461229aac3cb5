//! Argument parsing and dispatch for the `rvmp` binary.

use clap::{Parser, Subcommand};

use super::commands::{self, ComparisonArgs, DirichletArgs, OmoriYauArgs, OperatorArgs, ParabolicArgs, SolutionArgs, SuiteArgs, YauArgs};
use super::Report;
use crate::error::Result;

#[derive(Debug, Parser)]
#[command(name = "rvmp", version, about = "Numerical maximum principles for viscosity solutions on charted manifolds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compare the Hessian of the squared distance with its curvature bound.
    VerifyHessian(ComparisonArgs),
    /// Compare the Laplacian of the squared distance with its Ricci bound.
    VerifyLaplacian(ComparisonArgs),
    /// Check that an operator is proper and satisfies condition (H).
    CheckOperator(OperatorArgs),
    /// Check that a sampled function is a sub- or supersolution.
    CheckSolution(SolutionArgs),
    /// Certify and compare a sub/supersolution pair with boundary data.
    CompareDirichlet(DirichletArgs),
    /// Search for an approximate maximum certificate on a window ladder.
    OmoriYau(OmoriYauArgs),
    /// Find points where f is nearly minimal with small gradient and bounded-below Laplacian.
    YauPoints(YauArgs),
    /// Compare a space-time sub/supersolution pair.
    CompareParabolic(ParabolicArgs),
    /// Run the acceptance criteria.
    Suite(SuiteArgs),
}

impl Command {
    fn out(&self) -> &std::path::Path {
        match self {
            Command::VerifyHessian(a) | Command::VerifyLaplacian(a) => &a.common.out,
            Command::CheckOperator(a) => &a.common.out,
            Command::CheckSolution(a) => &a.op.common.out,
            Command::CompareDirichlet(a) => &a.op.common.out,
            Command::OmoriYau(a) => &a.common.out,
            Command::YauPoints(a) => &a.common.out,
            Command::CompareParabolic(a) => &a.op.common.out,
            Command::Suite(a) => &a.common.out,
        }
    }

    pub fn run(&self) -> Result<Report> {
        match self {
            Command::VerifyHessian(a) => commands::verify_hessian(a),
            Command::VerifyLaplacian(a) => commands::verify_laplacian(a),
            Command::CheckOperator(a) => commands::check_operator(a),
            Command::CheckSolution(a) => commands::check_solution(a),
            Command::CompareDirichlet(a) => commands::compare_dirichlet(a),
            Command::OmoriYau(a) => commands::omori_yau(a),
            Command::YauPoints(a) => commands::yau(a),
            Command::CompareParabolic(a) => commands::compare_parabolic(a),
            Command::Suite(a) => commands::suite(a),
        }
    }
}

/// Runs the command line in `args`; returns the process exit code
/// (0 on PASS, 1 on FAIL or REJECTED, 2 on errors).
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let report = match cli.command.run() {
        Ok(r) => r,
        Err(e) => {
            eprintln!("rvmp: error: {e}");
            return 2;
        }
    };
    let out = cli.command.out();
    if let Err(e) = report.write(out) {
        eprintln!("rvmp: error: {e}");
        return 2;
    }
    println!("{}: {} ({})", report.subcommand, serde_json::to_value(report.verdict).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(), report.summary);
    println!("wrote {}/report.json and {}/trace.csv", out.display(), out.display());
    if report.pass() {
        0
    } else {
        1
    }
}

pub fn main() -> i32 {
    run_from(std::env::args_os())
}
