//! Pointwise viscosity sub/supersolution checks on sampled functions.

use serde::Serialize;

use super::fit::{fit_quadratic, jet_membership, touching_shift, JetRecord, Neighborhood, Side};
use super::operator::OperatorF;
use super::sampled::SampledFunction;
use crate::error::Result;
use crate::geometry::{ChartManifold, Point};

#[derive(Debug, Clone, Serialize)]
pub struct SolutionOptions {
    /// Fit and membership radius.
    pub radius: f64,
    /// Residual threshold (relative to `r^2`) for the quadratic flag.
    pub residual_tol: f64,
    /// Slack `tol |y|^2` in the membership test.
    pub membership_tol: f64,
    /// Candidate jets are `(p, X + s I)` for `s` in `{0, +perturb, -perturb}`.
    pub perturb: f64,
    /// Tolerance on the sign of `F`.
    pub f_tol: f64,
    /// Largest curvature correction accepted for the touching jet (the
    /// fitted jet pushed until it passes membership).
    pub max_shift: f64,
}

impl SolutionOptions {
    pub fn new(radius: f64) -> Self {
        Self {
            radius,
            residual_tol: 1e-3,
            membership_tol: 1e-3,
            perturb: 0.1,
            f_tol: 1e-2,
            max_shift: 1.0 / radius,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolutionSide {
    /// `F <= 0` on plus-jets.
    Sub,
    /// `F >= 0` on minus-jets.
    Super,
}

impl SolutionSide {
    pub fn jet_side(self) -> Side {
        match self {
            SolutionSide::Sub => Side::Plus,
            SolutionSide::Super => Side::Minus,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PointVerdict {
    pub point: Vec<f64>,
    pub value: f64,
    /// Candidate jets that passed membership, with `F` at each.
    pub jets: Vec<(JetRecord, f64)>,
    /// No candidate passed membership; the point passes vacuously.
    pub vacuous: bool,
    pub quadratic_fit: bool,
    /// `max F` (sub) or `-min F` (super) over the jets found.
    pub worst: f64,
    pub pass: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolutionReport {
    pub operator: String,
    pub side: SolutionSide,
    pub options: SolutionOptions,
    pub points: Vec<PointVerdict>,
    pub vacuous: usize,
    pub failed_fits: usize,
    pub worst: f64,
    pub pass: bool,
}

fn check_point(op: &OperatorF, m: &ChartManifold, u: &SampledFunction, x0: &Point, side: SolutionSide, opts: &SolutionOptions) -> Result<PointVerdict> {
    let nb = Neighborhood::new(m, u, x0, opts.radius)?;
    let fit = fit_quadratic(&nb, opts.residual_tol)?;
    let value = fit.jet.value;
    let mut jets = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    let mut base = fit.jet.clone();
    base.side = side.jet_side();
    let touching = touching_shift(&nb, &base, opts.membership_tol)?;
    let correction = match side {
        SolutionSide::Sub => touching,
        SolutionSide::Super => -touching,
    };
    let mut shifts = vec![0.0, opts.perturb, -opts.perturb];
    if correction > 0.0 && correction <= opts.max_shift {
        shifts.push(touching);
    }
    for s in shifts {
        let jet = base.shifted(s);
        if !jet_membership(&nb, &jet, opts.membership_tol)?.pass {
            continue;
        }
        let f = op.eval_in_frame(m, &jet.frame, value, &jet.p, &jet.x)?;
        let signed = match side {
            SolutionSide::Sub => f,
            SolutionSide::Super => -f,
        };
        worst = worst.max(signed);
        jets.push((jet.record(), f));
    }
    let vacuous = jets.is_empty();
    Ok(PointVerdict {
        point: x0.as_slice().to_vec(),
        value,
        vacuous,
        quadratic_fit: fit.quadratic,
        worst: if vacuous { 0.0 } else { worst },
        pass: vacuous || worst <= opts.f_tol,
        jets,
        error: None,
    })
}

/// Checks `F(x, u(x), p, X) <= f_tol` on the plus-jets found at each grid
/// point (sub), or `>= -f_tol` on the minus-jets (super). A point whose fit
/// fails is reported with its error and counts as a failure.
pub fn check_solution_side(
    op: &OperatorF,
    m: &ChartManifold,
    u: &SampledFunction,
    grid: &[Point],
    side: SolutionSide,
    opts: &SolutionOptions,
) -> SolutionReport {
    let mut points = Vec::with_capacity(grid.len());
    for x0 in grid {
        points.push(match check_point(op, m, u, x0, side, opts) {
            Ok(v) => v,
            Err(e) => PointVerdict {
                point: x0.as_slice().to_vec(),
                value: f64::NAN,
                jets: Vec::new(),
                vacuous: false,
                quadratic_fit: false,
                worst: f64::INFINITY,
                pass: false,
                error: Some(e.to_string()),
            },
        });
    }
    let vacuous = points.iter().filter(|p| p.vacuous).count();
    let failed_fits = points.iter().filter(|p| p.error.is_some()).count();
    let worst = points.iter().map(|p| p.worst).fold(f64::NEG_INFINITY, f64::max);
    let pass = points.iter().all(|p| p.pass);
    SolutionReport {
        operator: op.name.clone(),
        side,
        options: opts.clone(),
        points,
        vacuous,
        failed_fits,
        worst,
        pass,
    }
}
