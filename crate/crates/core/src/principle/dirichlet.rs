//! Comparison of a certified subsolution and supersolution on a bounded
//! chart.

use rand::Rng;
use serde::Serialize;

use super::doubling::{maximize_doubled, DoublingState};
use crate::error::Result;
use crate::geometry::{ChartDomain, ChartManifold, Point};
use crate::jets::{
    check_condition_h, check_proper, check_solution_side, jet_fit, OperatorF, ProperSpec, SampledFunction,
    SolutionOptions, SolutionSide,
};
use crate::random::pair_at_distance;

#[derive(Debug, Clone, Serialize)]
pub struct DirichletOptions {
    /// `max(u1 - u2) <= tol` is the verdict.
    pub tol: f64,
    /// Samples treated as boundary data.
    pub boundary: Vec<usize>,
    /// Points where the sub/supersolution properties are checked.
    #[serde(skip)]
    pub check_points: Vec<Point>,
    pub solution: SolutionOptions,
    pub proper: ProperSpec,
    /// Pair distances used for the condition (H) check.
    pub h_lengths: Vec<f64>,
    pub h_pairs_per_length: usize,
    pub h_alphas: Vec<f64>,
    pub alpha_ladder: Vec<f64>,
}

impl DirichletOptions {
    pub fn new(boundary: Vec<usize>, check_points: Vec<Point>, fit_radius: f64) -> Self {
        Self {
            tol: 1e-6,
            boundary,
            check_points,
            solution: SolutionOptions::new(fit_radius),
            proper: ProperSpec::default(),
            h_lengths: vec![0.05, 0.2, 0.5],
            h_pairs_per_length: 3,
            h_alphas: vec![1.0, 10.0, 100.0],
            alpha_ladder: (0..=6).map(|k| 10f64.powi(k)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DirichletStatus {
    Pass,
    Fail,
    /// A hypothesis could not be certified; no comparison was attempted.
    Rejected,
}

#[derive(Debug, Clone, Serialize)]
pub struct Certification {
    pub proper: bool,
    pub beta: f64,
    pub beta_monotone: bool,
    pub condition_h: bool,
    pub condition_h_max_ratio: f64,
    pub subsolution: bool,
    pub sub_worst: f64,
    pub sub_vacuous: usize,
    pub supersolution: bool,
    pub super_worst: f64,
    pub super_vacuous: usize,
    pub boundary_ordered: bool,
    /// `max(u1 - u2)` over the boundary samples.
    pub boundary_gap: f64,
    pub reasons: Vec<String>,
}

impl Certification {
    pub fn ok(&self) -> bool {
        self.reasons.is_empty()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DirichletVerdict {
    pub status: DirichletStatus,
    pub operator: String,
    pub max_gap: f64,
    pub argmax: Vec<f64>,
    pub certification: Certification,
    /// Filled on failure: the doubling ladder for `u1 - u2`.
    pub ladder: Vec<DoublingState>,
    /// Filled on failure: each link of the contradiction argument at the
    /// top rung, with its measured values.
    pub breakdown: Vec<String>,
    pub tol: f64,
}

/// Samples within coordinate distance `width` of the chart boundary.
pub fn boundary_indices(domain: &ChartDomain, points: &[Point], width: f64) -> Vec<usize> {
    points
        .iter()
        .enumerate()
        .filter(|(_, p)| match domain {
            ChartDomain::Ball { center, radius } => {
                let r = p.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum::<f64>().sqrt();
                r >= radius - width
            }
            ChartDomain::Box { lo, hi } => p.iter().zip(lo.iter().zip(hi)).any(|(v, (a, b))| v - a <= width || b - v <= width),
        })
        .map(|(i, _)| i)
        .collect()
}

/// Certifies the hypotheses (properness with `beta > 0`, condition (H)
/// with the operator's declared modulus, sub/supersolution on the check
/// points, boundary ordering) and then compares `u1` and `u2`.
pub fn dirichlet_comparison<R: Rng>(
    op: &OperatorF,
    m: &ChartManifold,
    u1: &SampledFunction,
    u2: &SampledFunction,
    opts: &DirichletOptions,
    rng: &mut R,
) -> Result<DirichletVerdict> {
    let mut reasons = Vec::new();
    let proper = check_proper(op, m, &opts.proper, rng);
    if !proper.proper {
        reasons.push("operator is not proper on the sampled range".to_string());
    }
    if !(op.beta > 0.0) || !proper.beta_monotone {
        reasons.push(format!("beta-monotonicity with beta = {} not certified", op.beta));
    }
    let (condition_h, h_ratio) = match &op.omega_h {
        None => {
            reasons.push("operator declares no modulus for condition (H)".to_string());
            (false, f64::NAN)
        }
        Some(omega) => {
            let mut pairs = Vec::new();
            for &l in &opts.h_lengths {
                for _ in 0..opts.h_pairs_per_length {
                    if let Some(p) = pair_at_distance(rng, m, l, 0.9) {
                        pairs.push(p);
                    }
                }
            }
            let cert = check_condition_h(op, m, &pairs, &opts.h_alphas, omega, 3, 1e-12, rng)?;
            if !cert.pass {
                reasons.push(format!("condition (H) fails (max gap/omega {:.3e})", cert.max_ratio));
            }
            (cert.pass, cert.max_ratio)
        }
    };
    let sub = check_solution_side(op, m, u1, &opts.check_points, SolutionSide::Sub, &opts.solution);
    if !sub.pass {
        reasons.push(format!("u1 is not a subsolution (worst F = {:.3e})", sub.worst));
    }
    let sup = check_solution_side(op, m, u2, &opts.check_points, SolutionSide::Super, &opts.solution);
    if !sup.pass {
        reasons.push(format!("u2 is not a supersolution (worst -F = {:.3e})", sup.worst));
    }
    let boundary_gap = opts
        .boundary
        .iter()
        .map(|&i| u1.values[i] - u2.values[i])
        .fold(f64::NEG_INFINITY, f64::max);
    let boundary_ordered = boundary_gap <= opts.tol;
    if !boundary_ordered {
        reasons.push(format!("boundary ordering violated by {boundary_gap:.3e}"));
    }
    let certification = Certification {
        proper: proper.proper,
        beta: op.beta,
        beta_monotone: proper.beta_monotone,
        condition_h,
        condition_h_max_ratio: h_ratio,
        subsolution: sub.pass,
        sub_worst: sub.worst,
        sub_vacuous: sub.vacuous,
        supersolution: sup.pass,
        super_worst: sup.worst,
        super_vacuous: sup.vacuous,
        boundary_ordered,
        boundary_gap,
        reasons,
    };
    let (k, max_gap) = u1
        .values
        .iter()
        .zip(&u2.values)
        .map(|(a, b)| a - b)
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, g)| if g > best.1 { (i, g) } else { best });
    let mut verdict = DirichletVerdict {
        status: DirichletStatus::Rejected,
        operator: op.name.clone(),
        max_gap,
        argmax: u1.points[k].as_slice().to_vec(),
        certification,
        ladder: Vec::new(),
        breakdown: Vec::new(),
        tol: opts.tol,
    };
    if !verdict.certification.ok() {
        return Ok(verdict);
    }
    if max_gap <= opts.tol {
        verdict.status = DirichletStatus::Pass;
        return Ok(verdict);
    }
    verdict.status = DirichletStatus::Fail;
    for &alpha in &opts.alpha_ladder {
        verdict.ladder.push(maximize_doubled(m, u1, u2, alpha, None)?);
    }
    if let Some(top) = verdict.ladder.last() {
        verdict.breakdown = breakdown(op, m, u1, u2, top, opts);
    }
    Ok(verdict)
}

/// Measures each step of the contradiction argument at a doubled maximum.
fn breakdown(
    op: &OperatorF,
    m: &ChartManifold,
    u1: &SampledFunction,
    u2: &SampledFunction,
    top: &DoublingState,
    opts: &DirichletOptions,
) -> Vec<String> {
    let mut out = Vec::new();
    if opts.boundary.contains(&top.x_index) || opts.boundary.contains(&top.y_index) {
        out.push("doubled maximum sits on boundary samples: the interior-maximum step fails".to_string());
    }
    out.push(format!("mu_alpha = {:.6e}, alpha d^2 = {:.3e}", top.mu_alpha, top.alpha_d2()));
    let x = top.x_point();
    let y = top.y_point();
    let r = opts.solution.radius;
    match (jet_fit(m, u1, &x, r, opts.solution.residual_tol), jet_fit(m, u2, &y, r, opts.solution.residual_tol)) {
        (Ok(jx), Ok(jy)) => {
            let fx = op.eval_in_frame(m, &jx.jet.frame, top.u_x, &jx.jet.p, &jx.jet.x);
            let fy = op.eval_in_frame(m, &jy.jet.frame, top.v_y, &jy.jet.p, &jy.jet.x);
            if let (Ok(fx), Ok(fy)) = (fx, fy) {
                out.push(format!("F at the u1 jet = {fx:.3e} (subsolution needs <= 0)"));
                out.push(format!("F at the u2 jet = {fy:.3e} (supersolution needs >= 0)"));
                let lhs = op.beta * (top.u_x - top.v_y);
                out.push(format!(
                    "beta (u1(x) - u2(y)) = {lhs:.3e} vs F(x) - F(y) = {:.3e}: {}",
                    fx - fy,
                    if lhs <= fx - fy { "consistent" } else { "contradiction chain broken here" }
                ));
            }
        }
        (a, b) => {
            if let Err(e) = a {
                out.push(format!("jet fit of u1 at x_alpha failed: {e}"));
            }
            if let Err(e) = b {
                out.push(format!("jet fit of u2 at y_alpha failed: {e}"));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::{grid_points, Modulus};
    use crate::random::stream;

    fn disk() -> ChartManifold {
        ChartManifold::new(
            "disk",
            2,
            crate::geometry::MetricSource::Euclidean,
            ChartDomain::ball(2, 1.0),
            f64::INFINITY,
            0.0,
            0.0,
        )
        .unwrap()
    }

    fn setup() -> (ChartManifold, Vec<Point>, OperatorF, impl Fn(&Point) -> f64) {
        let m = disk();
        let pts = grid_points(&m.domain, 0.025);
        // u = sin(x1 + 2 x2): -Δu + u = 6 u
        let sol = |x: &Point| (x[0] + 2.0 * x[1]).sin();
        let op = OperatorF::linear_elliptic(1.0, move |x| 6.0 * (x[0] + 2.0 * x[1]).sin())
            .with_omega_h(Modulus::Power { c: 6.0 * 5f64.sqrt(), a: 1.0 });
        (m, pts, op, sol)
    }

    #[test]
    fn shifted_classical_pair_passes() {
        let (m, pts, op, sol) = setup();
        let u1 = SampledFunction::from_fn(&m, pts.clone(), |x| sol(x) - 0.1);
        let u2 = SampledFunction::from_fn(&m, pts.clone(), &sol);
        let boundary = boundary_indices(&m.domain, &pts, 0.03);
        let checks = grid_points(&ChartDomain::ball(2, 0.7), 0.35);
        let opts = DirichletOptions::new(boundary, checks, 0.06);
        let v = dirichlet_comparison(&op, &m, &u1, &u2, &opts, &mut stream(7, 3, 0)).unwrap();
        assert_eq!(v.status, DirichletStatus::Pass, "{:?}", v.certification.reasons);
        assert!((v.max_gap + 0.1).abs() < 1e-12);
    }

    #[test]
    fn bump_is_rejected_not_failed() {
        let (m, pts, op, sol) = setup();
        let bump = |x: &Point| 0.3 * (1.0 - x.norm_squared()).max(0.0).powi(3);
        let u1 = SampledFunction::from_fn(&m, pts.clone(), |x| sol(x) + bump(x));
        let u2 = SampledFunction::from_fn(&m, pts.clone(), &sol);
        let boundary = boundary_indices(&m.domain, &pts, 0.03);
        let opts = DirichletOptions::new(boundary, vec![Point::zeros(2)], 0.06);
        let v = dirichlet_comparison(&op, &m, &u1, &u2, &opts, &mut stream(7, 3, 1)).unwrap();
        assert_eq!(v.status, DirichletStatus::Rejected);
        assert!(!v.certification.subsolution);
    }
}
