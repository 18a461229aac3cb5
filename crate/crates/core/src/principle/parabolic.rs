//! Space-time jets, the `u - eps/(T - t)` transform, comparison on a
//! space-time grid, and the time-slope identity at doubled maxima.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::dirichlet::DirichletStatus;
use super::doubling::pair_distance;
use crate::distance::form::matrix_rows;
use crate::error::{Error, Result};
use crate::geometry::{log_map, ChartDomain, ChartManifold, Frame, Point};
use crate::jets::{OperatorF, SampledFunction};

/// Samples `f(t, x)` on the product of `space` and `times` (time-major).
pub fn space_time_samples(m: &ChartManifold, space: &[Point], times: &[f64], f: impl Fn(f64, &Point) -> f64) -> SampledFunction {
    let mut points = Vec::with_capacity(space.len() * times.len());
    let mut ts = Vec::with_capacity(points.capacity());
    let mut values = Vec::with_capacity(points.capacity());
    for &t in times {
        for x in space {
            points.push(x.clone());
            ts.push(t);
            values.push(f(t, x));
        }
    }
    let mut out = SampledFunction::new(m.id.clone(), points, values);
    out.times = Some(ts);
    out
}

fn times_of(u: &SampledFunction) -> Result<&[f64]> {
    u.times
        .as_deref()
        .ok_or_else(|| Error::Config("space-time data needs sample times".into()))
}

/// Samples on the parabolic boundary: the initial time level, or within
/// coordinate distance `width` of the chart boundary.
pub fn parabolic_boundary(u: &SampledFunction, domain: &ChartDomain, width: f64) -> Result<Vec<usize>> {
    let times = times_of(u)?;
    let t0 = times.iter().cloned().fold(f64::INFINITY, f64::min);
    let lateral = super::dirichlet::boundary_indices(domain, &u.points, width);
    let mut on = vec![false; u.len()];
    for i in lateral {
        on[i] = true;
    }
    Ok((0..u.len()).filter(|&i| on[i] || times[i] <= t0).collect())
}

/// `u(t, x) ~ value + a (t - t0) + p(y) + X(y, y)/2` in frame coordinates
/// `y` of `exp^{-1}_{x0} x`.
#[derive(Debug, Clone)]
pub struct ParabolicJet {
    pub base: Point,
    pub t0: f64,
    pub frame: Frame,
    pub value: f64,
    pub a: f64,
    pub p: DVector<f64>,
    pub x: DMatrix<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ParabolicJetRecord {
    pub t0: f64,
    pub base: Vec<f64>,
    pub value: f64,
    pub a: f64,
    pub p: Vec<f64>,
    pub x: Vec<Vec<f64>>,
}

impl ParabolicJet {
    pub fn record(&self) -> ParabolicJetRecord {
        ParabolicJetRecord {
            t0: self.t0,
            base: self.base.as_slice().to_vec(),
            value: self.value,
            a: self.a,
            p: self.p.as_slice().to_vec(),
            x: matrix_rows(&self.x),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ParabolicFit {
    pub jet: ParabolicJet,
    pub residual_max: f64,
    pub samples: usize,
    /// Highest power of `t - t0` in the design (`1` means slope only).
    pub time_degree: usize,
}

/// Least-squares fit over samples with `d(x0, x) <= radius` and
/// `|t - t0| <= time_radius`. Besides the jet terms the design carries
/// nuisance terms `(t - t0)^k` for `k <= 4` (as many as the time levels
/// allow) and `(t - t0)` times every monomial of degree 1 and 2 in `y`, so
/// the slope is exact for quartic-in-time data whose time derivative is
/// quadratic in space.
pub fn parabolic_jet_fit(
    m: &ChartManifold,
    u: &SampledFunction,
    t0: f64,
    x0: &Point,
    radius: f64,
    time_radius: f64,
) -> Result<ParabolicFit> {
    let times = times_of(u)?;
    let n = m.dim;
    let frame = Frame::orthonormal(m, x0, None)?;
    let lam = m.metric_at(x0.as_slice()).symmetric_eigenvalues().min();
    let coord_radius = 2.0 * radius / lam.sqrt();
    let mut rows: Vec<(f64, DVector<f64>, f64)> = Vec::new();
    let mut levels: Vec<f64> = Vec::new();
    for (i, p) in u.points.iter().enumerate() {
        let tau = times[i] - t0;
        if tau.abs() > time_radius * (1.0 + 1e-9) {
            continue;
        }
        let diff = p - x0;
        if diff.norm() > coord_radius {
            continue;
        }
        let y = if diff.norm() <= 1e-12 * coord_radius.max(1e-300) {
            DVector::zeros(n)
        } else {
            let v = if m.is_euclidean() { diff } else { log_map(m, x0, p)? };
            frame.components(m, &v)
        };
        if y.norm() > radius * (1.0 + 1e-9) {
            continue;
        }
        if !levels.iter().any(|l| (l - tau).abs() <= 1e-9 * time_radius) {
            levels.push(tau);
        }
        rows.push((tau, y, u.values[i]));
    }
    if levels.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            found: levels.len(),
        });
    }
    let time_degree = (levels.len() - 1).min(4);
    let quad = n * (n + 1) / 2;
    let terms = 1 + n + quad + time_degree + n + quad;
    if rows.len() < terms {
        return Err(Error::TooFewSamples {
            needed: terms,
            found: rows.len(),
        });
    }
    let r = radius.max(1e-300);
    let rt = time_radius.max(1e-300);
    let mut a = DMatrix::zeros(rows.len(), terms);
    let mut b = DVector::zeros(rows.len());
    for (row, (tau, y, val)) in rows.iter().enumerate() {
        let z = y / r;
        let s = tau / rt;
        a[(row, 0)] = 1.0;
        for i in 0..n {
            a[(row, 1 + i)] = z[i];
        }
        let mut col = 1 + n;
        for i in 0..n {
            for j in i..n {
                a[(row, col)] = if i == j { 0.5 * z[i] * z[i] } else { z[i] * z[j] };
                col += 1;
            }
        }
        for k in 1..=time_degree {
            a[(row, col)] = s.powi(k as i32);
            col += 1;
        }
        for i in 0..n {
            a[(row, col)] = s * z[i];
            col += 1;
            for j in i..n {
                a[(row, col)] = s * z[i] * z[j];
                col += 1;
            }
        }
        b[row] = *val;
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    if svd.singular_values.iter().any(|s| *s <= 1e-10 * smax) {
        return Err(Error::RankDeficient {
            directions: vec!["space-time design".into()],
        });
    }
    let coef = svd.solve(&b, 0.0).map_err(|e| Error::Rejected(e.to_string()))?;
    let resid = &a * &coef - &b;
    let p = DVector::from_fn(n, |i, _| coef[1 + i] / r);
    let mut x = DMatrix::zeros(n, n);
    let mut col = 1 + n;
    for i in 0..n {
        for j in i..n {
            x[(i, j)] = coef[col] / (r * r);
            x[(j, i)] = x[(i, j)];
            col += 1;
        }
    }
    let slope = coef[col] / rt;
    Ok(ParabolicFit {
        jet: ParabolicJet {
            base: x0.clone(),
            t0,
            frame,
            value: coef[0],
            a: slope,
            p,
            x,
        },
        residual_max: resid.amax(),
        samples: rows.len(),
        time_degree,
    })
}

/// `u - eps / (T - t)`; samples at or past `T` are rejected.
pub fn epsilon_transform(u: &SampledFunction, horizon: f64, eps: f64) -> Result<SampledFunction> {
    let times = times_of(u)?;
    if let Some(&t) = times.iter().find(|&&t| t >= horizon) {
        return Err(Error::PastHorizon { t, horizon });
    }
    let mut out = u.clone();
    for (v, t) in out.values.iter_mut().zip(times) {
        *v -= eps / (horizon - t);
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct TransformRow {
    pub t: f64,
    pub x: Vec<f64>,
    pub a_u: f64,
    pub a_tilde: f64,
    /// `eps / (T - t)^2`.
    pub required: f64,
    /// `|a_tilde - (a_u - required)|`.
    pub slope_error: f64,
    /// `a + F(x, u, p, X)` for `u` and for the transformed function.
    pub check_u: f64,
    pub check_tilde: f64,
    pub decrease: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TransformReport {
    pub epsilon: f64,
    pub horizon: f64,
    pub slope_tol: f64,
    pub rows: Vec<TransformRow>,
    pub max_slope_error: f64,
    pub pass: bool,
}

/// Fits parabolic jets of `u` and `u - eps/(T - t)` at each point and
/// checks that the slope drops by `eps/(T - t)^2` (within `slope_tol`) and
/// that the subsolution check value `a + F` drops by at least that much.
#[allow(clippy::too_many_arguments)]
pub fn transform_check(
    op: &OperatorF,
    m: &ChartManifold,
    u: &SampledFunction,
    horizon: f64,
    eps: f64,
    points: &[(f64, Point)],
    radius: f64,
    time_radius: f64,
    slope_tol: f64,
) -> Result<TransformReport> {
    let ut = epsilon_transform(u, horizon, eps)?;
    let mut rows = Vec::with_capacity(points.len());
    for (t, x) in points {
        let fu = parabolic_jet_fit(m, u, *t, x, radius, time_radius)?.jet;
        let ft = parabolic_jet_fit(m, &ut, *t, x, radius, time_radius)?.jet;
        let required = eps / (horizon - t).powi(2);
        let slope_error = (ft.a - (fu.a - required)).abs();
        let check_u = fu.a + op.eval_in_frame(m, &fu.frame, fu.value, &fu.p, &fu.x)?;
        let check_tilde = ft.a + op.eval_in_frame(m, &ft.frame, ft.value, &ft.p, &ft.x)?;
        let decrease = check_u - check_tilde;
        rows.push(TransformRow {
            t: *t,
            x: x.as_slice().to_vec(),
            a_u: fu.a,
            a_tilde: ft.a,
            required,
            slope_error,
            check_u,
            check_tilde,
            decrease,
            pass: slope_error <= slope_tol && decrease >= required - slope_tol,
        });
    }
    let max_slope_error = rows.iter().map(|r| r.slope_error).fold(0.0, f64::max);
    let pass = rows.iter().all(|r| r.pass);
    Ok(TransformReport {
        epsilon: eps,
        horizon,
        slope_tol,
        rows,
        max_slope_error,
        pass,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ParabolicOptions {
    pub tol: f64,
    /// Sample indices on the parabolic boundary.
    pub boundary: Vec<usize>,
    /// `(t, x)` where the parabolic sub/supersolution inequalities are
    /// checked on fitted jets.
    #[serde(skip)]
    pub check_points: Vec<(f64, Point)>,
    pub radius: f64,
    pub time_radius: f64,
    pub f_tol: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ParabolicVerdict {
    pub status: DirichletStatus,
    pub operator: String,
    pub max_interior_gap: f64,
    pub argmax_t: f64,
    pub argmax_x: Vec<f64>,
    pub boundary_gap: f64,
    /// `max (a + F)` over the `u` jets.
    pub sub_worst: f64,
    /// `max -(a + F)` over the `v` jets.
    pub super_worst: f64,
    pub reasons: Vec<String>,
    pub tol: f64,
}

/// Certifies `u` as a subsolution and `v` as a supersolution of
/// `u_t + F = 0` at the check points, checks ordering on the parabolic
/// boundary, then compares over the interior samples.
pub fn parabolic_comparison(
    op: &OperatorF,
    m: &ChartManifold,
    u: &SampledFunction,
    v: &SampledFunction,
    opts: &ParabolicOptions,
) -> Result<ParabolicVerdict> {
    let times = times_of(u)?;
    if u.points != v.points || u.times != v.times {
        return Err(Error::GridMismatch("u and v must share the space-time samples".into()));
    }
    let mut reasons = Vec::new();
    let mut sub_worst = f64::NEG_INFINITY;
    let mut super_worst = f64::NEG_INFINITY;
    for (t, x) in &opts.check_points {
        let ju = parabolic_jet_fit(m, u, *t, x, opts.radius, opts.time_radius)?.jet;
        let jv = parabolic_jet_fit(m, v, *t, x, opts.radius, opts.time_radius)?.jet;
        sub_worst = sub_worst.max(ju.a + op.eval_in_frame(m, &ju.frame, ju.value, &ju.p, &ju.x)?);
        super_worst = super_worst.max(-(jv.a + op.eval_in_frame(m, &jv.frame, jv.value, &jv.p, &jv.x)?));
    }
    if sub_worst > opts.f_tol {
        reasons.push(format!("u is not a subsolution (worst a + F = {sub_worst:.3e})"));
    }
    if super_worst > opts.f_tol {
        reasons.push(format!("v is not a supersolution (worst -(a + F) = {super_worst:.3e})"));
    }
    let mut on_boundary = vec![false; u.len()];
    for &i in &opts.boundary {
        on_boundary[i] = true;
    }
    let mut boundary_gap = f64::NEG_INFINITY;
    let mut best = (usize::MAX, f64::NEG_INFINITY);
    for i in 0..u.len() {
        let g = u.values[i] - v.values[i];
        if on_boundary[i] {
            boundary_gap = boundary_gap.max(g);
        } else if g > best.1 {
            best = (i, g);
        }
    }
    if boundary_gap > opts.tol {
        reasons.push(format!("parabolic boundary ordering violated by {boundary_gap:.3e}"));
    }
    let status = if !reasons.is_empty() {
        DirichletStatus::Rejected
    } else if best.1 <= opts.tol {
        DirichletStatus::Pass
    } else {
        DirichletStatus::Fail
    };
    let (argmax_t, argmax_x) = if best.0 == usize::MAX {
        (f64::NAN, Vec::new())
    } else {
        (times[best.0], u.points[best.0].as_slice().to_vec())
    };
    Ok(ParabolicVerdict {
        status,
        operator: op.name.clone(),
        max_interior_gap: best.1,
        argmax_t,
        argmax_x,
        boundary_gap,
        sub_worst,
        super_worst,
        reasons,
        tol: opts.tol,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SlopeIdentity {
    pub t: f64,
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
    pub objective: f64,
    pub b1: f64,
    pub b2: f64,
    /// Central difference of `phi` in `t`.
    pub dt_phi: f64,
    pub residual: f64,
    /// Grid scale `max(dt, h)` the residual is measured against.
    pub scale: f64,
    pub factor: f64,
    pub pass: bool,
}

/// Maximizes `u1(t, x1) + u2(t, x2) - phi(t, x1, x2)` over sample pairs at
/// equal times, fits time slopes `b1`, `b2` there and compares `b1 + b2`
/// with `d phi / dt`; passes when the residual is within `factor` grid
/// steps.
pub fn slope_identity(
    m: &ChartManifold,
    u1: &SampledFunction,
    u2: &SampledFunction,
    phi: &dyn Fn(f64, &Point, &Point) -> f64,
    radius: f64,
    time_radius: f64,
    factor: f64,
) -> Result<SlopeIdentity> {
    let times = times_of(u1)?;
    if u1.points != u2.points || u1.times != u2.times {
        return Err(Error::GridMismatch("u1 and u2 must share the space-time samples".into()));
    }
    let mut levels: Vec<f64> = times.to_vec();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let dt = levels.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let mut best = (0, 0, f64::NEG_INFINITY);
    let mut h = f64::INFINITY;
    for &t in &levels {
        let idx: Vec<usize> = (0..u1.len()).filter(|&i| times[i] == t).collect();
        for &i in &idx {
            for &j in &idx {
                let val = u1.values[i] + u2.values[j] - phi(t, &u1.points[i], &u2.points[j]);
                if val > best.2 {
                    best = (i, j, val);
                }
            }
        }
        if h.is_infinite() {
            for (k, &i) in idx.iter().enumerate() {
                for &j in &idx[k + 1..] {
                    h = h.min(pair_distance(m, &u1.points[i], &u1.points[j])?);
                }
            }
        }
    }
    let (i, j, objective) = best;
    if objective == f64::NEG_INFINITY {
        return Err(Error::NoAdmissiblePairs);
    }
    let t = times[i];
    let x1 = &u1.points[i];
    let x2 = &u2.points[j];
    let b1 = parabolic_jet_fit(m, u1, t, x1, radius, time_radius)?.jet.a;
    let b2 = parabolic_jet_fit(m, u2, t, x2, radius, time_radius)?.jet.a;
    let k = 1e-5 * (1.0 + t.abs());
    let dt_phi = (phi(t + k, x1, x2) - phi(t - k, x1, x2)) / (2.0 * k);
    let residual = b1 + b2 - dt_phi;
    let scale = dt.max(h);
    Ok(SlopeIdentity {
        t,
        x1: x1.as_slice().to_vec(),
        x2: x2.as_slice().to_vec(),
        objective,
        b1,
        b2,
        dt_phi,
        residual,
        scale,
        factor,
        pass: residual.abs() <= factor * scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::grid_points;

    fn line() -> (ChartManifold, Vec<Point>, Vec<f64>) {
        let m = ChartManifold::euclidean(1, 1.0);
        let space = grid_points(&m.domain, 0.02);
        let times: Vec<f64> = (0..=100).map(|k| k as f64 * 0.005).collect();
        (m, space, times)
    }

    fn heat(t: f64, x: &Point) -> f64 {
        (-t).exp() * x[0].sin() + 0.3 * (-4.0 * t).exp() * (2.0 * x[0]).cos()
    }

    #[test]
    fn slope_of_heat_solution() {
        let (m, space, times) = line();
        let u = space_time_samples(&m, &space, &times, heat);
        let x = Point::from_vec(vec![0.3]);
        let fit = parabolic_jet_fit(&m, &u, 0.2, &x, 0.05, 0.01).unwrap();
        let exact = -(-0.2f64).exp() * 0.3f64.sin() - 1.2 * (-0.8f64).exp() * 0.6f64.cos();
        assert!((fit.jet.a - exact).abs() < 1e-4, "{} vs {exact}", fit.jet.a);
        assert_eq!(fit.time_degree, 4);
    }

    #[test]
    fn transform_shifts_slope_exactly() {
        let (m, space, times) = line();
        let u = space_time_samples(&m, &space, &times, heat);
        let op = OperatorF::linear_elliptic(0.0, |_| 0.0);
        let pts: Vec<(f64, Point)> = [(0.1, 0.2), (0.25, -0.4), (0.45, 0.0)]
            .iter()
            .map(|&(t, x)| (t, Point::from_vec(vec![x])))
            .collect();
        let rep = transform_check(&op, &m, &u, 1.0, 0.1, &pts, 0.05, 0.01, 1e-6).unwrap();
        assert!(rep.pass, "{:?}", rep.rows);
        assert!(matches!(epsilon_transform(&u, 0.4, 0.1), Err(Error::PastHorizon { .. })));
    }

    #[test]
    fn heat_pair_compares() {
        let (m, space, times) = line();
        let u = space_time_samples(&m, &space, &times, |t, x| heat(t, x) - 0.05);
        let v = space_time_samples(&m, &space, &times, heat);
        let boundary = parabolic_boundary(&u, &m.domain, 0.01).unwrap();
        let opts = ParabolicOptions {
            tol: 1e-6,
            boundary,
            check_points: vec![(0.2, Point::from_vec(vec![0.1])), (0.3, Point::from_vec(vec![-0.5]))],
            radius: 0.05,
            time_radius: 0.01,
            f_tol: 1e-2,
        };
        let op = OperatorF::linear_elliptic(0.0, |_| 0.0);
        let verdict = parabolic_comparison(&op, &m, &u, &v, &opts).unwrap();
        assert_eq!(verdict.status, DirichletStatus::Pass, "{:?}", verdict.reasons);
        let bump = space_time_samples(&m, &space, &times, |t, x| heat(t, x) + t * (1.0 - x[0] * x[0]));
        let verdict = parabolic_comparison(&op, &m, &bump, &v, &opts).unwrap();
        assert_eq!(verdict.status, DirichletStatus::Rejected);
    }

    #[test]
    fn slope_identity_at_doubled_max() {
        let (m, space, times) = line();
        let u1 = space_time_samples(&m, &space, &times, |t, x| -(x[0] - 0.3).powi(2) - 3.0 * (t - 0.1).powi(2) + t.sin());
        let u2 = space_time_samples(&m, &space, &times, |t, x| -(x[0] + 0.1).powi(2) + 0.5 * t);
        let phi = |t: f64, a: &Point, b: &Point| 5.0 * (a[0] - b[0]).powi(2) + (t - 0.25).powi(2);
        let id = slope_identity(&m, &u1, &u2, &phi, 0.05, 0.01, 10.0).unwrap();
        assert!(id.pass, "{id:?}");
        assert!(id.t > 0.0 && id.t < 0.5);
    }
}
