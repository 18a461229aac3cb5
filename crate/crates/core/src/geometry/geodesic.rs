//! Geodesics, exponential and logarithm maps, parallel transport and Jacobi
//! fields, all driven by one fixed-step RK4 integration of the geodesic
//! flow and (optionally) its linearization.

use nalgebra::{DMatrix, DVector};

use super::frame::Frame;
use super::manifold::{ChartManifold, Point};
use crate::error::{Error, Result};
use crate::ode::{rk4_step, step_doubling_error, Rk4Work};

/// Baseline resolution of every geodesic integration.
pub const STEPS_PER_UNIT_LENGTH: f64 = 128.0;
pub const MIN_STEPS: usize = 32;
const MAX_STEPS: usize = 1 << 14;
/// Target for the step-doubling estimate of the local error, per unit length.
const LOCAL_ERROR_PER_LENGTH: f64 = 1e-9;

pub const LOG_MAX_ITERATIONS: usize = 50;
pub const LOG_RESIDUAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct FlowLayout {
    n: usize,
    transported: usize,
    variational: bool,
}

impl FlowLayout {
    fn len(&self) -> usize {
        let n = self.n;
        2 * n + n * self.transported + if self.variational { 4 * n * n } else { 0 }
    }

    fn transport_offset(&self) -> usize {
        2 * self.n
    }

    fn phi_offset(&self) -> usize {
        2 * self.n + self.n * self.transported
    }
}

fn flow_rhs(m: &ChartManifold, layout: FlowLayout, y: &[f64], dy: &mut [f64]) {
    let n = layout.n;
    let (x, rest) = y.split_at(n);
    let v = &rest[..n];
    let gamma = m.christoffel_unchecked(x);
    let mut tmp = vec![0.0; n];

    dy[..n].copy_from_slice(v);
    gamma.contract(v, v, &mut tmp);
    for k in 0..n {
        dy[n + k] = -tmp[k];
    }

    let off = layout.transport_offset();
    for w in 0..layout.transported {
        let s = off + w * n;
        gamma.contract(v, &y[s..s + n], &mut tmp);
        for k in 0..n {
            dy[s + k] = -tmp[k];
        }
    }

    if layout.variational {
        let dgamma = m.christoffel_derivative(x);
        // b[k][mm] = d_mm Gamma^k_ij v^i v^j ;  c[k][j] = Gamma^k_ij v^i
        let mut b = vec![0.0; n * n];
        let mut c = vec![0.0; n * n];
        for k in 0..n {
            for mm in 0..n {
                let mut s = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        s += dgamma.get(mm, k, i, j) * v[i] * v[j];
                    }
                }
                b[k * n + mm] = s;
            }
            for j in 0..n {
                let mut s = 0.0;
                for i in 0..n {
                    s += gamma.get(k, i, j) * v[i];
                }
                c[k * n + j] = s;
            }
        }
        let off = layout.phi_offset();
        for col in 0..2 * n {
            let s = off + col * 2 * n;
            let dx = &y[s..s + n];
            let dv = &y[s + n..s + 2 * n];
            for k in 0..n {
                dy[s + k] = dv[k];
                let mut acc = 0.0;
                for j in 0..n {
                    acc -= b[k * n + j] * dx[j] + 2.0 * c[k * n + j] * dv[j];
                }
                dy[s + n + k] = acc;
            }
        }
    }
}

struct Flow {
    times: Vec<f64>,
    states: Vec<Vec<f64>>,
}

/// Chooses the step count for integrating from `(x, v)` over `[0, t_end]`.
fn step_count(m: &ChartManifold, x: &[f64], v: &[f64], t_end: f64) -> usize {
    let speed = m.norm(x, &DVector::from_column_slice(v));
    let arc = speed * t_end;
    let mut steps = ((STEPS_PER_UNIT_LENGTH * arc).ceil() as usize).max(MIN_STEPS);
    steps += steps % 2;
    if m.is_euclidean() || arc == 0.0 {
        return steps;
    }
    let layout = FlowLayout {
        n: m.dim,
        transported: 0,
        variational: false,
    };
    let mut y0 = x.to_vec();
    y0.extend_from_slice(v);
    let mut rhs = |_t: f64, y: &[f64], dy: &mut [f64]| flow_rhs(m, layout, y, dy);
    while steps < MAX_STEPS {
        let h = t_end / steps as f64;
        let err = step_doubling_error(&mut rhs, 0.0, &y0, h);
        if err <= LOCAL_ERROR_PER_LENGTH * h * speed {
            break;
        }
        steps *= 2;
    }
    steps
}

fn integrate(
    m: &ChartManifold,
    y0: Vec<f64>,
    layout: FlowLayout,
    t_end: f64,
    steps: usize,
    record: bool,
) -> Result<Flow> {
    let h = t_end / steps as f64;
    let mut y = y0;
    let mut work = Rk4Work::new(layout.len());
    let mut rhs = |_t: f64, y: &[f64], dy: &mut [f64]| flow_rhs(m, layout, y, dy);
    let mut flow = Flow {
        times: Vec::new(),
        states: Vec::new(),
    };
    if record {
        flow.times.reserve(steps + 1);
        flow.states.reserve(steps + 1);
        flow.times.push(0.0);
        flow.states.push(y.clone());
    }
    for k in 0..steps {
        let t = k as f64 * h;
        rk4_step(&mut rhs, t, &mut y, h, &mut work);
        if !y.iter().all(|v| v.is_finite()) || !m.domain.contains(&y[..m.dim]) {
            return Err(Error::DomainEscape { t: t + h });
        }
        if record {
            flow.times.push(t + h);
            flow.states.push(y.clone());
        }
    }
    if !record {
        flow.times.push(t_end);
        flow.states.push(y);
    }
    Ok(flow)
}

fn initial_state(x: &[f64], v: &[f64], transported: &[DVector<f64>], variational: bool) -> Vec<f64> {
    let n = x.len();
    let mut y = Vec::with_capacity(2 * n + n * transported.len() + 4 * n * n);
    y.extend_from_slice(x);
    y.extend_from_slice(v);
    for w in transported {
        y.extend_from_slice(w.as_slice());
    }
    if variational {
        for col in 0..2 * n {
            for row in 0..2 * n {
                y.push(if row == col { 1.0 } else { 0.0 });
            }
        }
    }
    y
}

fn phi_from_state(layout: FlowLayout, y: &[f64]) -> DMatrix<f64> {
    let n2 = 2 * layout.n;
    let off = layout.phi_offset();
    DMatrix::from_column_slice(n2, n2, &y[off..off + n2 * n2])
}

/// Exponential map `exp_x(v)`, integrating the geodesic equation to `t = 1`.
pub fn exp_map(m: &ChartManifold, x: &Point, v: &DVector<f64>) -> Result<Point> {
    m.check_in_chart(x.as_slice())?;
    let len = m.norm(x.as_slice(), v);
    if len >= m.inj_radius_bound {
        return Err(Error::BeyondInjectivity {
            length: len,
            bound: m.inj_radius_bound,
        });
    }
    if m.is_euclidean() {
        let y = x + v;
        m.check_in_chart(y.as_slice())
            .map_err(|_| Error::DomainEscape { t: 1.0 })?;
        return Ok(y);
    }
    let (end, _) = shoot(m, x.as_slice(), v.as_slice(), false)?;
    Ok(end)
}

/// Integrates from `(x, v)` to `t = 1`, optionally with the variational matrix.
fn shoot(
    m: &ChartManifold,
    x: &[f64],
    v: &[f64],
    variational: bool,
) -> Result<(Point, Option<DMatrix<f64>>)> {
    let layout = FlowLayout {
        n: m.dim,
        transported: 0,
        variational,
    };
    let steps = step_count(m, x, v, 1.0);
    let flow = integrate(m, initial_state(x, v, &[], variational), layout, 1.0, steps, false)?;
    let y = flow.states.last().expect("final state");
    let end = DVector::from_column_slice(&y[..m.dim]);
    let phi = variational.then(|| phi_from_state(layout, y));
    Ok((end, phi))
}

/// Inverse exponential map by Newton shooting. The Newton Jacobian is the
/// `d x(1) / d v(0)` block of the linearized geodesic flow.
pub fn log_map(m: &ChartManifold, x: &Point, y: &Point) -> Result<DVector<f64>> {
    m.check_in_chart(x.as_slice())?;
    m.check_in_chart(y.as_slice())?;
    let n = m.dim;
    if x == y {
        return Ok(DVector::zeros(n));
    }
    if m.is_euclidean() {
        return Ok(y - x);
    }
    let mut v: DVector<f64> = y - x;
    // near the chart edge the chord overshoots; shorten it until it shoots
    for _ in 0..30 {
        if shoot(m, x.as_slice(), v.as_slice(), false).is_ok() {
            break;
        }
        v *= 0.5;
    }
    let mut residual = f64::INFINITY;
    for _ in 0..LOG_MAX_ITERATIONS {
        let (end, phi) = shoot(m, x.as_slice(), v.as_slice(), true)?;
        let r = &end - y;
        let rnorm = r.norm();
        let jac = phi.expect("variational").view((0, n), (n, n)).into_owned();
        let dv = jac
            .clone()
            .lu()
            .solve(&r)
            .ok_or(Error::ConjugatePoints { sigma_min: 0.0 })?;
        if rnorm <= LOG_RESIDUAL_TOL {
            // one last Newton correction; its error is quadratic in rnorm
            v -= dv;
            let len = m.norm(x.as_slice(), &v);
            if len >= m.inj_radius_bound {
                return Err(Error::BeyondInjectivity {
                    length: len,
                    bound: m.inj_radius_bound,
                });
            }
            return Ok(v);
        }
        // damped step: halve until the trial stays in the chart and reduces
        // the residual
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..20 {
            let trial = &v - &dv * t;
            if let Ok((e, _)) = shoot(m, x.as_slice(), trial.as_slice(), false) {
                if (&e - y).norm() < rnorm {
                    v = trial;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        residual = rnorm;
        if !accepted {
            break;
        }
    }
    Err(Error::ShootingFailed {
        iterations: LOG_MAX_ITERATIONS,
        residual,
    })
}

/// Riemannian distance `|log_x y|_g`.
pub fn distance(m: &ChartManifold, x: &Point, y: &Point) -> Result<f64> {
    if m.is_euclidean() {
        m.check_in_chart(x.as_slice())?;
        m.check_in_chart(y.as_slice())?;
        return Ok((y - x).norm());
    }
    let v = log_map(m, x, y)?;
    Ok(m.norm(x.as_slice(), &v))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicSample {
    pub t: f64,
    pub point: Point,
    pub velocity: DVector<f64>,
}

/// A discretized geodesic `gamma: [0, l] -> M`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicPath {
    pub samples: Vec<GeodesicSample>,
    pub length: f64,
    pub unit_speed: bool,
    pub steps: usize,
}

impl GeodesicPath {
    pub fn start(&self) -> &Point {
        &self.samples[0].point
    }

    pub fn end(&self) -> &Point {
        &self.samples.last().expect("non-empty path").point
    }

    pub fn start_velocity(&self) -> &DVector<f64> {
        &self.samples[0].velocity
    }

    pub fn end_velocity(&self) -> &DVector<f64> {
        &self.samples.last().expect("non-empty path").velocity
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    /// Length of the polygon through the samples, measured with the metric
    /// at segment midpoints.
    pub fn polygonal_length(&self, m: &ChartManifold) -> f64 {
        self.samples
            .windows(2)
            .map(|w| {
                let mid = (&w[0].point + &w[1].point) * 0.5;
                m.norm(mid.as_slice(), &(&w[1].point - &w[0].point))
            })
            .sum()
    }

    /// Largest deviation of `|gamma'|_g` from one over the samples.
    pub fn speed_defect(&self, m: &ChartManifold) -> f64 {
        self.samples
            .iter()
            .map(|s| (m.norm(s.point.as_slice(), &s.velocity) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// The same geodesic traversed from its end point.
    pub fn reversed(&self, m: &ChartManifold) -> Result<GeodesicPath> {
        let u = -self.end_velocity();
        unit_speed_path(m, self.end(), &u, self.length)
    }
}

fn unit_speed_path(m: &ChartManifold, x: &Point, u: &DVector<f64>, length: f64) -> Result<GeodesicPath> {
    let layout = FlowLayout {
        n: m.dim,
        transported: 0,
        variational: false,
    };
    let steps = step_count(m, x.as_slice(), u.as_slice(), length);
    let flow = integrate(m, initial_state(x.as_slice(), u.as_slice(), &[], false), layout, length, steps, true)?;
    let n = m.dim;
    let samples = flow
        .times
        .iter()
        .zip(&flow.states)
        .map(|(t, y)| GeodesicSample {
            t: *t,
            point: DVector::from_column_slice(&y[..n]),
            velocity: DVector::from_column_slice(&y[n..2 * n]),
        })
        .collect();
    Ok(GeodesicPath {
        samples,
        length,
        unit_speed: true,
        steps,
    })
}

/// Unit-speed minimizing geodesic from `x` to `y`, obtained from the
/// shooting solution of [`log_map`].
pub fn minimizing_geodesic(m: &ChartManifold, x: &Point, y: &Point) -> Result<GeodesicPath> {
    let v = log_map(m, x, y)?;
    let l = m.norm(x.as_slice(), &v);
    if l == 0.0 {
        return Err(Error::Rejected("zero-length geodesic".into()));
    }
    unit_speed_path(m, x, &(v / l), l)
}

/// Unit-speed geodesic from `x` in direction `u` (normalized internally).
pub fn geodesic_from(m: &ChartManifold, x: &Point, u: &DVector<f64>, length: f64) -> Result<GeodesicPath> {
    m.check_in_chart(x.as_slice())?;
    let s = m.norm(x.as_slice(), u);
    unit_speed_path(m, x, &(u / s), length)
}

/// Transports each vector in `vs` from `gamma(0)` to `gamma(l)`.
pub fn transport_many(m: &ChartManifold, path: &GeodesicPath, vs: &[DVector<f64>]) -> Result<Vec<DVector<f64>>> {
    let n = m.dim;
    let layout = FlowLayout {
        n,
        transported: vs.len(),
        variational: false,
    };
    let flow = integrate(
        m,
        initial_state(path.start().as_slice(), path.start_velocity().as_slice(), vs, false),
        layout,
        path.length,
        path.steps,
        false,
    )?;
    let y = flow.states.last().expect("final state");
    let off = layout.transport_offset();
    Ok((0..vs.len())
        .map(|w| DVector::from_column_slice(&y[off + w * n..off + (w + 1) * n]))
        .collect())
}

/// Parallel transport `P_gamma(l) V` for `V` based at `gamma(0)`.
pub fn parallel_transport(m: &ChartManifold, path: &GeodesicPath, v: &DVector<f64>) -> Result<DVector<f64>> {
    Ok(transport_many(m, path, std::slice::from_ref(v))?.remove(0))
}

/// Everything the second-variation machinery needs along one geodesic:
/// points, velocities, a parallel orthonormal frame and the state
/// transition matrix of the linearized geodesic flow.
#[derive(Debug, Clone)]
pub struct PathBundle {
    pub times: Vec<f64>,
    pub points: Vec<Point>,
    pub velocities: Vec<DVector<f64>>,
    /// Parallel frame at each sample (columns = frame vectors).
    pub frames: Vec<DMatrix<f64>>,
    /// `2n x 2n` transition matrix acting on `(dx, dv)`.
    pub phi: Vec<DMatrix<f64>>,
    pub start_frame: Frame,
}

impl PathBundle {
    pub fn new(m: &ChartManifold, path: &GeodesicPath) -> Result<Self> {
        let n = m.dim;
        let start_frame = Frame::orthonormal(m, path.start(), Some(path.start_velocity()))?;
        let columns: Vec<DVector<f64>> = (0..n).map(|i| start_frame.vector(i)).collect();
        let layout = FlowLayout {
            n,
            transported: n,
            variational: true,
        };
        let flow = integrate(
            m,
            initial_state(path.start().as_slice(), path.start_velocity().as_slice(), &columns, true),
            layout,
            path.length,
            path.steps,
            true,
        )?;
        let off = layout.transport_offset();
        let mut bundle = PathBundle {
            times: flow.times.clone(),
            points: Vec::with_capacity(flow.states.len()),
            velocities: Vec::with_capacity(flow.states.len()),
            frames: Vec::with_capacity(flow.states.len()),
            phi: Vec::with_capacity(flow.states.len()),
            start_frame,
        };
        for y in &flow.states {
            bundle.points.push(DVector::from_column_slice(&y[..n]));
            bundle.velocities.push(DVector::from_column_slice(&y[n..2 * n]));
            bundle
                .frames
                .push(DMatrix::from_column_slice(n, n, &y[off..off + n * n]));
            bundle.phi.push(phi_from_state(layout, y));
        }
        Ok(bundle)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn end_frame(&self) -> Frame {
        Frame {
            base: self.points.last().expect("non-empty").clone(),
            vectors: self.frames.last().expect("non-empty").clone(),
        }
    }
}

/// A Jacobi field sampled on the geodesic grid, with its covariant
/// derivative.
#[derive(Debug, Clone)]
pub struct JacobiField {
    pub times: Vec<f64>,
    pub values: Vec<DVector<f64>>,
    pub derivatives: Vec<DVector<f64>>,
}

impl JacobiField {
    pub fn start(&self) -> &DVector<f64> {
        &self.values[0]
    }

    pub fn end(&self) -> &DVector<f64> {
        self.values.last().expect("non-empty")
    }
}

/// Solves the Jacobi boundary-value problem `J(0) = v1`, `J(l) = v2` along
/// the geodesic by shooting on the linearized flow.
pub fn jacobi_field(
    m: &ChartManifold,
    bundle: &PathBundle,
    v1: &DVector<f64>,
    v2: &DVector<f64>,
) -> Result<JacobiField> {
    let n = m.dim;
    let phi_l = bundle.phi.last().expect("non-empty");
    let a = phi_l.view((0, 0), (n, n)).into_owned();
    let b = phi_l.view((0, n), (n, n)).into_owned();
    let svd = b.clone().svd(false, false);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin <= 1e-6 * smax {
        return Err(Error::ConjugatePoints { sigma_min: smin });
    }
    let rhs = v2 - &a * v1;
    let w = b.lu().solve(&rhs).ok_or(Error::ConjugatePoints { sigma_min: smin })?;
    let mut init = DVector::zeros(2 * n);
    init.rows_mut(0, n).copy_from(v1);
    init.rows_mut(n, n).copy_from(&w);

    let mut values = Vec::with_capacity(bundle.len());
    let mut derivatives = Vec::with_capacity(bundle.len());
    let mut tmp = vec![0.0; n];
    for k in 0..bundle.len() {
        let s = &bundle.phi[k] * &init;
        let j = s.rows(0, n).into_owned();
        let dv = s.rows(n, n).into_owned();
        let gamma = m.christoffel_unchecked(bundle.points[k].as_slice());
        gamma.contract(bundle.velocities[k].as_slice(), j.as_slice(), &mut tmp);
        derivatives.push(dv + DVector::from_column_slice(&tmp));
        values.push(j);
    }
    // pin the boundary values exactly
    values[0] = v1.clone();
    *values.last_mut().expect("non-empty") = v2.clone();
    Ok(JacobiField {
        times: bundle.times.clone(),
        values,
        derivatives,
    })
}
