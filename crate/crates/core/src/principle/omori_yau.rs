//! Search for Omori-Yau points: near-suprema of `u - v` with matching
//! first-order data and ordered second-order data, found by penalized
//! doubling over an expanding ladder of windows.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::doubling::{maximize_doubled, pair_distance, Penalty};
use super::matrix::penalty_hessian;
use crate::distance::{form::matrix_rows, min_eigenvalue};
use crate::error::{Error, Result};
use crate::geometry::{ChartDomain, ChartManifold, Frame, Point};
use crate::jets::{fit_quadratic, grid_points, jet_fit, Jet, Modulus, Neighborhood, SampledFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OyMode {
    /// `X <= Y o P + eps I` (sectional curvature bounded below).
    Hessian,
    /// `tr X <= tr Y + eps` (Ricci curvature bounded below).
    Trace,
}

impl std::str::FromStr for OyMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hessian" => Ok(OyMode::Hessian),
            "trace" => Ok(OyMode::Trace),
            other => Err(Error::Config(format!("unknown mode `{other}` (hessian|trace)"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PenaltyConfig {
    pub alpha_ladder: Vec<f64>,
}

impl Default for PenaltyConfig {
    fn default() -> Self {
        Self {
            alpha_ladder: (0..=8).map(|k| 10f64.powi(k)).collect(),
        }
    }
}

impl PenaltyConfig {
    /// `lambda = -1 / ln w` for `w = omega(sqrt(mu0/alpha)) < 1/e`, clamped
    /// to 1 above that threshold; zero when `w = 0`.
    pub fn lambda(omega_alpha: f64) -> f64 {
        if omega_alpha <= 0.0 {
            0.0
        } else if omega_alpha < (-1.0f64).exp() {
            -1.0 / omega_alpha.ln()
        } else {
            1.0
        }
    }
}

/// Coordinate balls of growing radius about `center`, each sampled on a
/// lattice of the given spacing and clipped to the chart.
#[derive(Debug, Clone, Serialize)]
pub struct WindowLadder {
    pub center: Vec<f64>,
    pub radii: Vec<f64>,
    pub spacing: f64,
}

impl WindowLadder {
    /// `count` windows, radius doubling from `r0`.
    pub fn doubling(center: Vec<f64>, r0: f64, count: usize, spacing: f64) -> Self {
        Self {
            center,
            radii: (0..count).map(|k| r0 * 2f64.powi(k as i32)).collect(),
            spacing,
        }
    }

    pub fn points(&self, m: &ChartManifold, k: usize) -> Vec<Point> {
        let r = self.radii[k];
        let lo = self.center.iter().map(|c| c - r).collect();
        let hi = self.center.iter().map(|c| c + r).collect();
        let ball = ChartDomain::Ball {
            center: self.center.clone(),
            radius: r,
        };
        grid_points(&ChartDomain::Box { lo, hi }, self.spacing)
            .into_iter()
            .filter(|p| ball.contains(p.as_slice()) && m.domain.contains(p.as_slice()))
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OmoriYauOptions {
    pub epsilon: f64,
    pub mode: OyMode,
    pub penalty: PenaltyConfig,
    pub windows: WindowLadder,
    /// Modulus of continuity driving the `lambda` schedule.
    pub omega: Modulus,
    /// Jet fit radius in units of the local geodesic sample spacing.
    pub fit_cells: f64,
    pub residual_tol: f64,
}

impl OmoriYauOptions {
    pub fn new(epsilon: f64, mode: OyMode, windows: WindowLadder, omega: Modulus) -> Self {
        Self {
            epsilon,
            mode,
            penalty: PenaltyConfig::default(),
            windows,
            omega,
            fit_cells: 3.0,
            residual_tol: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckValue {
    pub name: String,
    pub value: f64,
    pub relation: String,
    pub bound: f64,
    pub pass: bool,
}

impl CheckValue {
    fn less(name: &str, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            relation: "<".into(),
            bound,
            pass: value < bound,
        }
    }

    fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            relation: "<=".into(),
            bound,
            pass: value <= bound,
        }
    }

    fn at_least(name: &str, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            relation: ">=".into(),
            bound,
            pass: value >= bound,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LadderRow {
    pub window: usize,
    pub window_radius: f64,
    pub samples: usize,
    pub alpha: f64,
    /// Window supremum of `u - v` after the positivity shift.
    pub mu0: f64,
    pub omega_alpha: f64,
    pub lambda: f64,
    pub sigma: f64,
    pub d: f64,
    pub alpha_d2: f64,
    /// `d(anchor, x)^2 + d(anchor, y)^2`.
    pub anchor_d2: f64,
    /// `sigma >= mu0 - omega_alpha`.
    pub sigma_floor: bool,
    /// `(alpha/2) d^2 + penalty <= omega(d) + omega_alpha`.
    pub penalty_bound: bool,
    /// `lambda anchor_d2 <= 4 omega_alpha`.
    pub anchor_decay: bool,
    pub value_gap: f64,
    pub p_minus_q: f64,
    /// `max eig(X - Y)` or `tr X - tr Y`.
    pub second_order: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct OmoriYauCertificate {
    pub epsilon: f64,
    pub mode: OyMode,
    pub window_center: Vec<f64>,
    pub window_radius: f64,
    pub spacing: f64,
    /// Window supremum of `u - v` (unshifted).
    pub mu0: f64,
    pub alpha: f64,
    pub lambda: f64,
    pub anchor: Vec<f64>,
    pub x_eps: Vec<f64>,
    pub y_eps: Vec<f64>,
    pub u_x: f64,
    pub v_y: f64,
    pub l: f64,
    /// Frame components of `p` at `x` and of `q` at `y`; the frame at `y`
    /// is the parallel transport of the frame at `x`, so `q o P` has the
    /// same components as `q`.
    pub p_eps: Vec<f64>,
    pub q_eps: Vec<f64>,
    pub x_form: Vec<Vec<f64>>,
    pub y_form: Vec<Vec<f64>>,
    /// Columns: coordinate components of the adapted frame vectors.
    pub frame_x: Vec<Vec<f64>>,
    pub frame_y: Vec<Vec<f64>>,
    pub fit_radius: f64,
    pub checks: Vec<CheckValue>,
    pub interpretation: String,
}

impl OmoriYauCertificate {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn x_point(&self) -> Point {
        Point::from_column_slice(&self.x_eps)
    }

    pub fn y_point(&self) -> Point {
        Point::from_column_slice(&self.y_eps)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OmoriYauReport {
    pub certificate: Option<OmoriYauCertificate>,
    pub rows: Vec<LadderRow>,
    pub diagnosis: Option<String>,
}

const INTERPRETATION: &str = "the additive term eps P is read as eps times the metric form in the transported frame, i.e. eps I in the adapted orthonormal frame";

fn frame_columns(f: &Frame) -> Vec<Vec<f64>> {
    (0..f.dim()).map(|i| f.vector(i).as_slice().to_vec()).collect()
}

fn frame_from_columns(base: &[f64], cols: &[Vec<f64>]) -> Frame {
    let n = base.len();
    Frame {
        base: Point::from_column_slice(base),
        vectors: DMatrix::from_fn(n, cols.len(), |i, j| cols[j][i]),
    }
}

/// Geodesic length of one coordinate lattice step at `x` (worst direction).
fn local_spacing(m: &ChartManifold, x: &Point, h: f64) -> f64 {
    h * m.metric_at(x.as_slice()).symmetric_eigenvalues().max().sqrt()
}

/// The four conclusion inequalities for jets `(p, X)` of `u` at `x` and
/// `(q, Y)` of `v` at `y`, both expressed in adapted frames.
fn conclusion_checks(
    eps: f64,
    mode: OyMode,
    mu0: f64,
    u_x: f64,
    v_y: f64,
    l: f64,
    p: &DVector<f64>,
    q: &DVector<f64>,
    x: &DMatrix<f64>,
    y: &DMatrix<f64>,
) -> Vec<CheckValue> {
    let second = match mode {
        OyMode::Hessian => CheckValue::at_most("max eig(X - Y o P)", -min_eigenvalue(&(y - x)), eps),
        OyMode::Trace => CheckValue::at_most("tr X - tr Y", x.trace() - y.trace(), eps),
    };
    vec![
        CheckValue::at_least("u(x) - v(y)", u_x - v_y, mu0 - eps),
        CheckValue::less("d(x, y)", l, eps),
        CheckValue::less("|p - q o P|", (p - q).norm(), eps),
        second,
    ]
}

/// Runs the window and `alpha` ladders until the four conclusion checks
/// hold at level `epsilon`.
pub fn omori_yau_search(
    m: &ChartManifold,
    u: &dyn Fn(&Point) -> f64,
    v: &dyn Fn(&Point) -> f64,
    opts: &OmoriYauOptions,
) -> Result<OmoriYauReport> {
    let eps = opts.epsilon;
    let mut rows = Vec::new();
    let mut last_mu0 = None;
    let mut drift = Vec::new();
    for k in 0..opts.windows.radii.len() {
        let pts = opts.windows.points(m, k);
        if pts.is_empty() {
            return Err(Error::NoAdmissiblePairs);
        }
        let us = SampledFunction::from_fn(m, pts.clone(), u);
        let vs = SampledFunction::from_fn(m, pts, v);
        let (argmax, raw_mu0) = us
            .values
            .iter()
            .zip(&vs.values)
            .map(|(a, b)| a - b)
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, g)| if g > best.1 { (i, g) } else { best });
        if let Some(prev) = last_mu0 {
            drift.push(raw_mu0 - prev);
        }
        last_mu0 = Some(raw_mu0);
        let shift = if raw_mu0 <= 0.0 { 1.0 - raw_mu0 } else { 0.0 };
        let mu0 = raw_mu0 + shift;
        let mut shifted = us.clone();
        for val in &mut shifted.values {
            *val += shift;
        }
        let anchor = us.points[argmax].clone();
        for &alpha in &opts.penalty.alpha_ladder {
            let omega_alpha = opts.omega.eval((mu0 / alpha).sqrt());
            let lambda = PenaltyConfig::lambda(omega_alpha);
            let pen = Penalty {
                lambda,
                anchor: anchor.as_slice().to_vec(),
            };
            let state = maximize_doubled(m, &shifted, &vs, alpha, Some(&pen))?;
            let x = state.x_point();
            let y = state.y_point();
            let anchor_d2 = pair_distance(m, &anchor, &x)?.powi(2) + pair_distance(m, &anchor, &y)?.powi(2);
            let d = state.d;
            let slack = 1e-12 * (1.0 + mu0.abs());
            let sigma_floor = state.mu_alpha >= mu0 - omega_alpha - slack;
            let penalty_bound = 0.5 * alpha * d * d + 0.5 * lambda * anchor_d2 <= opts.omega.eval(d) + omega_alpha + slack;
            let anchor_decay = lambda * anchor_d2 <= 4.0 * omega_alpha + slack;
            let adapted = penalty_hessian(m, &x, &y, alpha, Some(&pen))?;
            let rx = opts.fit_cells * local_spacing(m, &x, opts.windows.spacing);
            let ry = opts.fit_cells * local_spacing(m, &y, opts.windows.spacing);
            let fit_r = rx.max(ry);
            let jx = jet_fit(m, &us, &x, fit_r, opts.residual_tol)?.jet.reframed(m, adapted.frame_x());
            let jy = jet_fit(m, &vs, &y, fit_r, opts.residual_tol)?.jet.reframed(m, adapted.frame_y());
            let u_x = us.values[state.x_index];
            let v_y = vs.values[state.y_index];
            let checks = conclusion_checks(eps, opts.mode, raw_mu0, u_x, v_y, d, &jx.p, &jy.p, &jx.x, &jy.x);
            let pass = checks.iter().all(|c| c.pass);
            rows.push(LadderRow {
                window: k,
                window_radius: opts.windows.radii[k],
                samples: us.len(),
                alpha,
                mu0,
                omega_alpha,
                lambda,
                sigma: state.mu_alpha,
                d,
                alpha_d2: alpha * d * d,
                anchor_d2,
                sigma_floor,
                penalty_bound,
                anchor_decay,
                value_gap: checks[0].value,
                p_minus_q: checks[2].value,
                second_order: checks[3].value,
                pass,
            });
            if pass {
                let cert = certificate(opts, k, raw_mu0, alpha, lambda, &anchor, &state, d, &jx, &jy, adapted.frame_x(), adapted.frame_y(), fit_r, checks);
                return Ok(OmoriYauReport {
                    certificate: Some(cert),
                    rows,
                    diagnosis: None,
                });
            }
        }
    }
    Ok(OmoriYauReport {
        diagnosis: Some(diagnose(&rows, &drift, eps)),
        certificate: None,
        rows,
    })
}

#[allow(clippy::too_many_arguments)]
fn certificate(
    opts: &OmoriYauOptions,
    k: usize,
    mu0: f64,
    alpha: f64,
    lambda: f64,
    anchor: &Point,
    state: &super::doubling::DoublingState,
    l: f64,
    jx: &Jet,
    jy: &Jet,
    fx: &Frame,
    fy: &Frame,
    fit_radius: f64,
    checks: Vec<CheckValue>,
) -> OmoriYauCertificate {
    OmoriYauCertificate {
        epsilon: opts.epsilon,
        mode: opts.mode,
        window_center: opts.windows.center.clone(),
        window_radius: opts.windows.radii[k],
        spacing: opts.windows.spacing,
        mu0,
        alpha,
        lambda,
        anchor: anchor.as_slice().to_vec(),
        x_eps: state.x_alpha.clone(),
        y_eps: state.y_alpha.clone(),
        u_x: checks[0].value + state.v_y,
        v_y: state.v_y,
        l,
        p_eps: jx.p.as_slice().to_vec(),
        q_eps: jy.p.as_slice().to_vec(),
        x_form: matrix_rows(&jx.x),
        y_form: matrix_rows(&jy.x),
        frame_x: frame_columns(fx),
        frame_y: frame_columns(fy),
        fit_radius,
        checks,
        interpretation: INTERPRETATION.into(),
    }
}

fn diagnose(rows: &[LadderRow], drift: &[f64], eps: f64) -> String {
    let Some(last) = rows.last() else {
        return "no ladder rungs were run".into();
    };
    if drift.last().is_some_and(|&g| g > eps) {
        return format!(
            "window supremum still rising by {:.3e} at the last window: the sup of u - v is not resolved (enlarge the window ladder, or u - v is unbounded)",
            drift.last().unwrap()
        );
    }
    if last.d >= eps {
        return format!("d(x, y) = {:.3e} >= eps at the top rung: extend the alpha ladder", last.d);
    }
    if !(last.sigma_floor && last.penalty_bound && last.anchor_decay) {
        return "penalty invariants fail at the top rung: the declared modulus does not bound u and v (hypothesis failure)".into();
    }
    format!(
        "points coalesced but first/second-order checks miss eps (|p - q| = {:.3e}, second order {:.3e}): sample resolution too coarse for jets at this eps",
        last.p_minus_q, last.second_order
    )
}

/// Frame-coordinate stencil of radius `r`: `+-r e_i`, `+-r/2 e_i` and the
/// diagonals `r (+-e_i +- e_j)/sqrt 2`.
pub fn stencil(n: usize, r: f64) -> Vec<DVector<f64>> {
    let mut out = Vec::new();
    for i in 0..n {
        for s in [r, -r, 0.5 * r, -0.5 * r] {
            let mut e = DVector::zeros(n);
            e[i] = s;
            out.push(e);
        }
        for j in i + 1..n {
            for (a, b) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let mut e = DVector::zeros(n);
                e[i] = a * r / 2f64.sqrt();
                e[j] = b * r / 2f64.sqrt();
                out.push(e);
            }
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct Revalidation {
    pub radius: f64,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub x_form: Vec<Vec<f64>>,
    pub y_form: Vec<Vec<f64>>,
    pub checks: Vec<CheckValue>,
    pub pass: bool,
}

/// Re-fits jets of `u` at `x_eps` and `v` at `y_eps` from function values on
/// an exponential-map stencil (independent of the window samples) and
/// re-evaluates the four inequalities.
pub fn revalidate(
    m: &ChartManifold,
    cert: &OmoriYauCertificate,
    u: &dyn Fn(&Point) -> f64,
    v: &dyn Fn(&Point) -> f64,
    radius: f64,
) -> Result<Revalidation> {
    let x = cert.x_point();
    let y = cert.y_point();
    let offsets = stencil(m.dim, radius);
    let fx = frame_from_columns(&cert.x_eps, &cert.frame_x);
    let fy = frame_from_columns(&cert.y_eps, &cert.frame_y);
    let jx = fit_quadratic(&Neighborhood::from_function(m, &x, &offsets, u)?, 1.0)?.jet.reframed(m, &fx);
    let jy = fit_quadratic(&Neighborhood::from_function(m, &y, &offsets, v)?, 1.0)?.jet.reframed(m, &fy);
    let l = pair_distance(m, &x, &y)?;
    let checks = conclusion_checks(cert.epsilon, cert.mode, cert.mu0, u(&x), v(&y), l, &jx.p, &jy.p, &jx.x, &jy.x);
    let pass = checks.iter().all(|c| c.pass);
    Ok(Revalidation {
        radius,
        p: jx.p.as_slice().to_vec(),
        q: jy.p.as_slice().to_vec(),
        x_form: matrix_rows(&jx.x),
        y_form: matrix_rows(&jy.x),
        checks,
        pass,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct YauPoint {
    pub epsilon: f64,
    pub x: Vec<f64>,
    pub f: f64,
    /// Minimum of `f` over the window samples.
    pub window_inf: f64,
    pub grad_norm: f64,
    pub laplacian: f64,
    pub checks: Vec<CheckValue>,
    pub pass: bool,
    pub report: OmoriYauReport,
}

/// Almost-minimizers of `f` with small gradient and almost nonnegative
/// Laplacian: the trace-mode search with `u = inf f`, `v = f` and the
/// constant modulus `epsilon / 4`.
pub fn yau_points(m: &ChartManifold, f: &dyn Fn(&Point) -> f64, epsilon: f64, windows: WindowLadder) -> Result<YauPoint> {
    let last = windows.radii.len().saturating_sub(1);
    let inf = windows.points(m, last).iter().map(f).fold(f64::INFINITY, f64::min);
    let u = move |_: &Point| inf;
    let mut opts = OmoriYauOptions::new(epsilon, OyMode::Trace, windows, Modulus::Constant(0.25 * epsilon));
    opts.penalty = PenaltyConfig::default();
    let report = omori_yau_search(m, &u, f, &opts)?;
    let Some(cert) = report.certificate.clone() else {
        return Err(Error::Rejected(report.diagnosis.unwrap_or_default()));
    };
    let y = cert.y_point();
    let fy = f(&y);
    let grad_norm = DVector::from_column_slice(&cert.q_eps).norm();
    let laplacian = (0..m.dim).map(|i| cert.y_form[i][i]).sum::<f64>();
    let checks = vec![
        CheckValue::less("f - inf f", fy - inf, epsilon),
        CheckValue::less("|grad f|", grad_norm, epsilon),
        CheckValue::at_least("laplacian f", laplacian, -epsilon),
    ];
    let pass = checks.iter().all(|c| c.pass);
    Ok(YauPoint {
        epsilon,
        x: cert.y_eps.clone(),
        f: fy,
        window_inf: inf,
        grad_norm,
        laplacian,
        checks,
        pass,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_rule_and_clamp() {
        assert_eq!(PenaltyConfig::lambda(0.0), 0.0);
        assert_eq!(PenaltyConfig::lambda(0.5), 1.0);
        assert!((PenaltyConfig::lambda(0.01) - 1.0 / 100f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn compact_max_gives_certificate_at_the_max() {
        let m = ChartManifold::euclidean(1, 10.0);
        let u = |x: &Point| 1.0 - (x[0] - 0.2).powi(2);
        let v = |_: &Point| 0.0;
        let w = WindowLadder::doubling(vec![0.0], 1.0, 1, 0.01);
        let opts = OmoriYauOptions::new(0.05, OyMode::Hessian, w, Modulus::Power { c: 3.0, a: 1.0 });
        let rep = omori_yau_search(&m, &u, &v, &opts).unwrap();
        let cert = rep.certificate.expect("certificate");
        assert!((cert.x_eps[0] - 0.2).abs() < 0.011);
        assert!(cert.pass());
        for r in &rep.rows {
            assert!(r.sigma_floor && r.penalty_bound && r.anchor_decay);
        }
        let re = revalidate(&m, &cert, &u, &v, 0.02).unwrap();
        assert!(re.pass, "{:?}", re.checks);
    }

    #[test]
    fn drifting_sup_moves_to_the_window_edge() {
        // sup(-e^{-x}) = 0 is not attained; the gradient check forces x > ln(1/eps)
        let m = ChartManifold::euclidean(1, 100.0);
        let u = |_: &Point| 0.0;
        let v = |x: &Point| (-x[0]).exp();
        let w = WindowLadder::doubling(vec![0.0], 1.0, 4, 0.01);
        let opts = OmoriYauOptions::new(0.1, OyMode::Hessian, w, Modulus::Power { c: 3.0, a: 1.0 });
        let rep = omori_yau_search(&m, &u, &v, &opts).unwrap();
        let cert = rep.certificate.expect("certificate");
        assert!(cert.y_eps[0] > 10f64.ln());
        assert!(cert.window_radius > 2.0);
        assert!(revalidate(&m, &cert, &u, &v, 0.02).unwrap().pass);
    }

    #[test]
    fn exhausted_ladder_is_diagnosed() {
        let m = ChartManifold::euclidean(1, 100.0);
        let u = |x: &Point| x[0];
        let v = |_: &Point| 0.0;
        let w = WindowLadder::doubling(vec![0.0], 1.0, 3, 0.05);
        let mut opts = OmoriYauOptions::new(0.1, OyMode::Trace, w, Modulus::Power { c: 1.0, a: 1.0 });
        opts.penalty.alpha_ladder = vec![1.0, 100.0];
        let rep = omori_yau_search(&m, &u, &v, &opts).unwrap();
        assert!(rep.certificate.is_none());
        assert!(rep.diagnosis.unwrap().contains("still rising"));
    }

    #[test]
    fn yau_point_on_the_line() {
        let m = ChartManifold::euclidean(1, 100.0);
        let f = |x: &Point| (1.0 + x[0] * x[0]).sqrt();
        for eps in [0.1, 0.01] {
            let y = yau_points(&m, &f, eps, WindowLadder::doubling(vec![0.0], 1.0, 3, 0.005)).unwrap();
            assert!(y.pass, "{:?}", y.checks);
            let x = y.x[0];
            assert!(f(&Point::from_vec(vec![x])) < 1.0 + eps);
            assert!((x / (1.0 + x * x).sqrt()).abs() < eps);
        }
    }

    #[test]
    fn hyperbolic_window_both_modes() {
        let m = ChartManifold::hyperbolic(2, 1.0, 0.9);
        let o = Point::zeros(2);
        let v = |x: &Point| {
            let d = m.closed_form_distance(o.as_slice(), x.as_slice()).unwrap();
            (-(1.0 + d * d).sqrt()).exp()
        };
        let u = |_: &Point| 0.0;
        for mode in [OyMode::Hessian, OyMode::Trace] {
            let w = WindowLadder::doubling(vec![0.0, 0.0], 0.2, 3, 0.01);
            let opts = OmoriYauOptions::new(0.1, mode, w, Modulus::Power { c: 1.0, a: 1.0 });
            let rep = omori_yau_search(&m, &u, &v, &opts).unwrap();
            let cert = rep.certificate.unwrap_or_else(|| panic!("{mode:?}: {:?}", rep.diagnosis));
            // |grad v| < 0.1 needs d(o, y) > 2.2, i.e. |y| > tanh(1.1)
            assert!(cert.y_point().norm() > 0.75, "{:?}", cert.y_eps);
            let re = revalidate(&m, &cert, &u, &v, 0.05).unwrap();
            assert!(re.pass, "{mode:?} {:?}", re.checks);
        }
    }

    #[test]
    fn stencil_has_enough_points() {
        assert_eq!(stencil(1, 1.0).len(), 4);
        assert_eq!(stencil(2, 1.0).len(), 12);
    }
}
