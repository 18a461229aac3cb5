use nalgebra::DVector;
use rand::Rng;
use serde::Serialize;

use super::bounds::{hessian_bound, laplacian_bound};
use super::variation::SecondVariation;
use crate::error::Result;
use crate::geometry::{ChartManifold, Point};
use crate::random::normal_vector;

/// One measured-versus-bound comparison. Values refer to `phi = d^2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub manifold: String,
    pub l: f64,
    /// Curvature lower bound `K` the bound was evaluated with.
    pub curvature_bound: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub tol: f64,
    pub pass: bool,
    /// Frame components of `V1` (at `x`) and `V2` (at `y`); empty for traces.
    pub v1: Vec<f64>,
    pub v2: Vec<f64>,
    /// `<V2, P V1>`.
    pub inner: f64,
    pub convention: &'static str,
}

pub const CONVENTION: &str = "phi = d^2";

impl ComparisonReport {
    fn new(m: &ChartManifold, l: f64, k: f64, lhs: f64, rhs: f64, tol: f64) -> Self {
        let slack = rhs - lhs;
        Self {
            manifold: m.id.clone(),
            l,
            curvature_bound: k,
            lhs,
            rhs,
            slack,
            tol,
            pass: slack >= -tol,
            v1: Vec::new(),
            v2: Vec::new(),
            inner: 0.0,
            convention: CONVENTION,
        }
    }

    /// `kappa = sqrt(-K)`; a positive bound is printed as the imaginary
    /// `kappa = sqrt(K) i`.
    pub fn kappa_label(&self) -> String {
        let k = self.curvature_bound;
        if k > 0.0 {
            format!("{}i", k.sqrt())
        } else {
            format!("{}", (-k).sqrt())
        }
    }
}

/// Measures the Hessian of `d^2` at `(x, y)` on random normal directions
/// `(V1, V2)` (jointly normalized) and compares with the bound for
/// `sec >= m.sec_lower`.
pub fn verify_hessian<R: Rng>(
    m: &ChartManifold,
    x: &Point,
    y: &Point,
    trials: usize,
    tol: f64,
    rng: &mut R,
) -> Result<Vec<ComparisonReport>> {
    let sv = SecondVariation::new(m, x, y)?;
    hessian_trials(m, &sv, trials, tol, rng)
}

pub fn hessian_trials<R: Rng>(
    m: &ChartManifold,
    sv: &SecondVariation,
    trials: usize,
    tol: f64,
    rng: &mut R,
) -> Result<Vec<ComparisonReport>> {
    let n = m.dim;
    let form = sv.hessian(m)?;
    let l = sv.length();
    let k = m.sec_lower;
    (0..trials)
        .map(|_| {
            let mut w = normal_vector(rng, 2 * n);
            w[0] = 0.0;
            w[n] = 0.0;
            let w = &w / w.norm().max(1e-300);
            let a = w.rows(0, n).into_owned();
            let b = w.rows(n, n).into_owned();
            let lhs = form.quadratic(&w);
            let inner = a.dot(&b);
            let rhs = hessian_bound(k, l, a.norm_squared(), b.norm_squared(), inner)?;
            let mut r = ComparisonReport::new(m, l, k, lhs, rhs, tol);
            r.v1 = a.as_slice().to_vec();
            r.v2 = b.as_slice().to_vec();
            r.inner = inner;
            Ok(r)
        })
        .collect()
}

/// Hessian of `d^2` in the direction `(e_i, P e_i)` of the adapted frame.
pub fn parallel_direction_value(sv_form: &super::SymmetricForm, n: usize, i: usize) -> f64 {
    let mut w = DVector::zeros(2 * n);
    w[i] = 1.0;
    w[n + i] = 1.0;
    sv_form.quadratic(&w)
}

/// Trace of the Hessian of `d^2` over `(e_i, P e_i)`, `i = 1..n` (the
/// `gamma'` pair contributes zero), against the bound for
/// `Ric >= (n - 1) m.ric_lower`.
pub fn verify_laplacian(m: &ChartManifold, x: &Point, y: &Point, tol: f64) -> Result<ComparisonReport> {
    let sv = SecondVariation::new(m, x, y)?;
    laplacian_trial(m, &sv, tol)
}

pub fn laplacian_trial(m: &ChartManifold, sv: &SecondVariation, tol: f64) -> Result<ComparisonReport> {
    let n = m.dim;
    let form = sv.hessian(m)?;
    let lhs: f64 = (0..n).map(|i| parallel_direction_value(&form, n, i)).sum();
    let l = sv.length();
    let rhs = laplacian_bound(n, m.ric_lower, l)?;
    Ok(ComparisonReport::new(m, l, m.ric_lower, lhs, rhs, tol))
}
