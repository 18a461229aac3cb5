//! Second-order jets of sampled functions: quadratic fits in normal
//! coordinates, the one-sided membership test, and limits over shrinking
//! radii.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::sampled::SampledFunction;
use crate::distance::form::matrix_rows;
use crate::error::{Error, Result};
use crate::geometry::{exp_map, log_map, ChartManifold, Frame, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn flipped(self) -> Self {
        match self {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        }
    }
}

/// A second-order jet `(p, X)` at `base`, in the components of an
/// orthonormal frame there. `value` is the function value the jet expands
/// around.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub base: Point,
    pub frame: Frame,
    pub value: f64,
    pub p: DVector<f64>,
    pub x: DMatrix<f64>,
    pub side: Side,
}

impl Jet {
    /// `(-p, -X)` for `-u`, on the opposite side.
    pub fn negated(&self) -> Self {
        Self {
            base: self.base.clone(),
            frame: self.frame.clone(),
            value: -self.value,
            p: -&self.p,
            x: -&self.x,
            side: self.side.flipped(),
        }
    }

    /// `(p, X + s I)`.
    pub fn shifted(&self, s: f64) -> Self {
        let n = self.p.len();
        let mut out = self.clone();
        out.x += DMatrix::identity(n, n) * s;
        out
    }

    /// The same jet expressed in another orthonormal frame at the same base.
    pub fn reframed(&self, m: &ChartManifold, to: &Frame) -> Self {
        let t = change_of_frame(m, &self.frame, to);
        Self {
            base: self.base.clone(),
            frame: to.clone(),
            value: self.value,
            p: &t * &self.p,
            x: &t * &self.x * t.transpose(),
            side: self.side,
        }
    }

    /// Coordinate components of the covector `p`.
    pub fn covector_coordinates(&self, m: &ChartManifold) -> DVector<f64> {
        m.flat(self.base.as_slice(), &self.frame.to_coordinates(&self.p))
    }

    /// Taylor polynomial at frame offset `y`.
    pub fn predict(&self, y: &DVector<f64>) -> f64 {
        self.value + self.p.dot(y) + 0.5 * y.dot(&(&self.x * y))
    }

    pub fn record(&self) -> JetRecord {
        JetRecord {
            base: self.base.as_slice().to_vec(),
            value: self.value,
            p: self.p.as_slice().to_vec(),
            x: matrix_rows(&self.x),
            side: self.side,
        }
    }
}

/// Orthogonal matrix taking components in `from` to components in `to`.
pub fn change_of_frame(m: &ChartManifold, from: &Frame, to: &Frame) -> DMatrix<f64> {
    let g = m.metric_at(from.base.as_slice());
    to.vectors.transpose() * g * &from.vectors
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JetRecord {
    pub base: Vec<f64>,
    pub value: f64,
    pub p: Vec<f64>,
    pub x: Vec<Vec<f64>>,
    pub side: Side,
}

/// Samples within a geodesic ball, pulled back to frame components of
/// `log_{x0}`.
#[derive(Debug, Clone)]
pub struct Neighborhood {
    pub center: Point,
    pub frame: Frame,
    pub radius: f64,
    /// Sample index, frame offset and value, for samples with `0 < |y| <= radius`.
    pub indices: Vec<usize>,
    pub offsets: Vec<DVector<f64>>,
    pub values: Vec<f64>,
    /// Value at the center when the center is itself a sample.
    pub center_value: Option<f64>,
}

impl Neighborhood {
    pub fn new(m: &ChartManifold, u: &SampledFunction, x0: &Point, radius: f64) -> Result<Self> {
        let frame = Frame::orthonormal(m, x0, None)?;
        Self::with_frame(m, u, x0, radius, frame)
    }

    pub fn with_frame(m: &ChartManifold, u: &SampledFunction, x0: &Point, radius: f64, frame: Frame) -> Result<Self> {
        m.check_in_chart(x0.as_slice())?;
        // coordinate prefilter: |v|_g >= sqrt(lambda_min) |v| near x0, with
        // a safety factor for the variation of g over the ball
        let lam = m.metric_at(x0.as_slice()).symmetric_eigenvalues().min();
        let coord_radius = 2.0 * radius / lam.sqrt();
        let mut nb = Neighborhood {
            center: x0.clone(),
            frame,
            radius,
            indices: Vec::new(),
            offsets: Vec::new(),
            values: Vec::new(),
            center_value: None,
        };
        for (i, p) in u.points.iter().enumerate() {
            let diff = p - x0;
            if diff.norm() > coord_radius {
                continue;
            }
            if diff.norm() <= 1e-9 * coord_radius {
                nb.center_value = Some(u.values[i]);
                continue;
            }
            let v = if m.is_euclidean() { diff } else { log_map(m, x0, p)? };
            let y = nb.frame.components(m, &v);
            // lattice shells at exactly `radius` must be kept or dropped as a whole
            if y.norm() <= radius * (1.0 + 1e-9) {
                nb.indices.push(i);
                nb.offsets.push(y);
                nb.values.push(u.values[i]);
            }
        }
        Ok(nb)
    }

    /// Builds a neighborhood from function values at prescribed frame
    /// offsets (mapped through `exp_{x0}`).
    pub fn from_function(
        m: &ChartManifold,
        x0: &Point,
        offsets: &[DVector<f64>],
        f: impl Fn(&Point) -> f64,
    ) -> Result<Self> {
        let frame = Frame::orthonormal(m, x0, None)?;
        let mut values = Vec::with_capacity(offsets.len());
        let mut radius = 0.0_f64;
        for y in offsets {
            let p = exp_map(m, x0, &frame.to_coordinates(y))?;
            values.push(f(&p));
            radius = radius.max(y.norm());
        }
        Ok(Neighborhood {
            center: x0.clone(),
            frame,
            radius,
            indices: (0..offsets.len()).collect(),
            offsets: offsets.to_vec(),
            values,
            center_value: Some(f(x0)),
        })
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn negated(&self) -> Self {
        let mut out = self.clone();
        for v in &mut out.values {
            *v = -*v;
        }
        out.center_value = out.center_value.map(|v| -v);
        out
    }
}

/// Result of a least-squares quadratic fit.
#[derive(Debug, Clone)]
pub struct JetFit {
    /// The fitted `(p, X)`; `value` is the sample value at the center when
    /// available, the fitted constant otherwise.
    pub jet: Jet,
    pub fitted_constant: f64,
    pub residual_rms: f64,
    pub residual_max: f64,
    /// `residual_max <= residual_tol * radius^2`.
    pub quadratic: bool,
    pub samples: usize,
}

pub const DEFAULT_TOL: f64 = 1e-3;

fn monomial_names(n: usize) -> Vec<String> {
    let mut names = vec!["1".to_string()];
    names.extend((1..=n).map(|i| format!("y{i}")));
    for i in 1..=n {
        for j in i..=n {
            names.push(if i == j { format!("y{i}^2") } else { format!("y{i}*y{j}") });
        }
    }
    names
}

/// Least-squares fit of `c + p.y + X(y, y)/2` over the neighborhood.
pub fn fit_quadratic(nb: &Neighborhood, residual_tol: f64) -> Result<JetFit> {
    let n = nb.center.len();
    let terms = 1 + n + n * (n + 1) / 2;
    let rows = nb.len() + usize::from(nb.center_value.is_some());
    if rows < terms {
        return Err(Error::TooFewSamples {
            needed: terms,
            found: rows,
        });
    }
    let r = nb.radius.max(1e-300);
    let mut a = DMatrix::zeros(rows, terms);
    let mut b = DVector::zeros(rows);
    let fill = |a: &mut DMatrix<f64>, row: usize, y: &DVector<f64>| {
        let z = y / r;
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
    };
    let mut row = 0;
    if let Some(v) = nb.center_value {
        fill(&mut a, row, &DVector::zeros(n));
        b[row] = v;
        row += 1;
    }
    for (y, v) in nb.offsets.iter().zip(&nb.values) {
        fill(&mut a, row, y);
        b[row] = *v;
        row += 1;
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let v_t = svd.v_t.as_ref().expect("right singular vectors");
    let names = monomial_names(n);
    let mut deficient = Vec::new();
    for (k, s) in svd.singular_values.iter().enumerate() {
        if *s <= 1e-10 * smax {
            let dir = v_t.row(k);
            let (idx, _) = dir
                .iter()
                .enumerate()
                .fold((0, 0.0), |best, (i, v)| if v.abs() > best.1 { (i, v.abs()) } else { best });
            deficient.push(names[idx].clone());
        }
    }
    if !deficient.is_empty() {
        deficient.sort();
        deficient.dedup();
        return Err(Error::RankDeficient { directions: deficient });
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
    let residual_max = resid.amax();
    Ok(JetFit {
        jet: Jet {
            base: nb.center.clone(),
            frame: nb.frame.clone(),
            value: nb.center_value.unwrap_or(coef[0]),
            p,
            x,
            side: Side::Plus,
        },
        fitted_constant: coef[0],
        residual_rms: (resid.norm_squared() / rows as f64).sqrt(),
        residual_max,
        quadratic: residual_max <= residual_tol * nb.radius * nb.radius,
        samples: rows,
    })
}

/// Fits a jet of `u` at `x0` from the samples within geodesic distance
/// `radius`.
pub fn jet_fit(m: &ChartManifold, u: &SampledFunction, x0: &Point, radius: f64, residual_tol: f64) -> Result<JetFit> {
    let nb = Neighborhood::new(m, u, x0, radius)?;
    fit_quadratic(&nb, residual_tol)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Membership {
    pub pass: bool,
    /// Largest `lhs - rhs` of the defining inequality (slack included);
    /// positive means violated.
    pub worst_violation: f64,
    pub worst_offset: Vec<f64>,
    pub checked: usize,
}

/// Tests the one-sided second-order expansion of the jet over the
/// punctured neighborhood, with `tol |y|^2` standing in for `o(|y|^2)`.
/// The minus side is tested as the plus side of `(-p, -X)` on `-u`.
pub fn jet_membership(nb: &Neighborhood, jet: &Jet, tol: f64) -> Result<Membership> {
    if jet.side == Side::Minus {
        return jet_membership(&nb.negated(), &jet.negated(), tol);
    }
    if nb.is_empty() {
        return Err(Error::EmptyNeighborhood);
    }
    let mut worst = f64::NEG_INFINITY;
    let mut worst_offset = Vec::new();
    for (y, v) in nb.offsets.iter().zip(&nb.values) {
        let violation = v - jet.predict(y) - tol * y.norm_squared();
        if violation > worst {
            worst = violation;
            worst_offset = y.as_slice().to_vec();
        }
    }
    Ok(Membership {
        pass: worst <= 0.0,
        worst_violation: worst,
        worst_offset,
        checked: nb.len(),
    })
}

/// The shift `s` for which `(p, X + s I)` is the tightest jet of the
/// jet's side passing [`jet_membership`]: every larger (plus) or smaller
/// (minus) shift passes, none beyond it does. Rounded outward by a relative
/// `1e-10` so the returned shift itself passes.
pub fn touching_shift(nb: &Neighborhood, jet: &Jet, tol: f64) -> Result<f64> {
    if jet.side == Side::Minus {
        return Ok(-touching_shift(&nb.negated(), &jet.negated(), tol)?);
    }
    if nb.is_empty() {
        return Err(Error::EmptyNeighborhood);
    }
    let s = nb
        .offsets
        .iter()
        .zip(&nb.values)
        .map(|(y, v)| {
            let r2 = y.norm_squared();
            2.0 * (v - jet.predict(y) - tol * r2) / r2
        })
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(s + 1e-10 * (1.0 + s.abs()))
}

/// A jet obtained as the limit of fits over a dyadic ladder of radii.
#[derive(Debug, Clone)]
pub struct ClosureJet {
    pub jet: Jet,
    pub radii: Vec<f64>,
    pub ladder: Vec<Jet>,
    /// Change of the extrapolated jet between the last two rungs.
    pub p_change: f64,
    pub x_change: f64,
}

/// Fits at `r0, r0/2, ...` (`levels` rungs, stopping early when a fit
/// fails) and Richardson-extrapolates the last two rungs. The order is
/// estimated from the last three rungs when available (symmetric sample
/// sets cancel the odd error terms), otherwise `p = Du + O(r^2)` and
/// `X = D^2 u + O(r)` are assumed.
pub fn closure_jet(
    m: &ChartManifold,
    u: &SampledFunction,
    x0: &Point,
    r0: f64,
    levels: usize,
    residual_tol: f64,
) -> Result<ClosureJet> {
    let mut radii = Vec::new();
    let mut ladder: Vec<Jet> = Vec::new();
    let mut r = r0;
    for _ in 0..levels.max(1) {
        match jet_fit(m, u, x0, r, residual_tol) {
            Ok(fit) => {
                radii.push(r);
                ladder.push(fit.jet);
            }
            Err(e) if ladder.is_empty() => return Err(e),
            Err(_) => break,
        }
        r *= 0.5;
    }
    let last = ladder.last().expect("at least one rung").clone();
    let (jet, p_change, x_change) = if ladder.len() >= 2 {
        let k = ladder.len();
        let prev = &ladder[k - 2];
        let (qp, qx) = if k >= 3 {
            let first = &ladder[k - 3];
            let order = |a: f64, b: f64, nominal: f64| {
                if a > 0.0 && b > 0.0 {
                    (a / b).log2().clamp(1.0, 4.0)
                } else {
                    nominal
                }
            };
            (
                order((&prev.p - &first.p).norm(), (&last.p - &prev.p).norm(), 2.0),
                order((&prev.x - &first.x).norm(), (&last.x - &prev.x).norm(), 1.0),
            )
        } else {
            (2.0, 1.0)
        };
        let mut ext = last.clone();
        ext.p = &last.p + (&last.p - &prev.p) / (2f64.powf(qp) - 1.0);
        ext.x = &last.x + (&last.x - &prev.x) / (2f64.powf(qx) - 1.0);
        let pc = (&ext.p - &last.p).norm();
        let xc = (&ext.x - &last.x).norm();
        (ext, pc, xc)
    } else {
        (last, f64::NAN, f64::NAN)
    };
    Ok(ClosureJet {
        jet,
        radii,
        ladder,
        p_change,
        x_change,
    })
}

/// Errors of fitted jets against the exact derivatives on a radius ladder,
/// with the observed orders `log2(e(r) / e(r/2))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub radii: Vec<f64>,
    pub p_errors: Vec<f64>,
    pub x_errors: Vec<f64>,
    pub p_orders: Vec<f64>,
    pub x_orders: Vec<f64>,
}

impl ConvergenceReport {
    /// Mean observed orders over the ladder.
    pub fn mean_orders(&self) -> (f64, f64) {
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len().max(1) as f64;
        (mean(&self.p_orders), mean(&self.x_orders))
    }
}

/// Measures fit convergence for a function known in closed form, sampling
/// it on the fixed `pattern` of unit-ball offsets scaled by each radius.
/// `du`, `d2u` are the exact frame-component derivatives of `u o exp_{x0}`.
pub fn fit_convergence(
    m: &ChartManifold,
    x0: &Point,
    pattern: &[DVector<f64>],
    radii: &[f64],
    f: impl Fn(&Point) -> f64,
    du: &DVector<f64>,
    d2u: &DMatrix<f64>,
) -> Result<ConvergenceReport> {
    let mut p_errors = Vec::new();
    let mut x_errors = Vec::new();
    for &r in radii {
        let offsets: Vec<DVector<f64>> = pattern.iter().map(|y| y * r).collect();
        let mut nb = Neighborhood::from_function(m, x0, &offsets, &f)?;
        nb.radius = r;
        let fit = fit_quadratic(&nb, f64::INFINITY)?;
        p_errors.push((&fit.jet.p - du).norm());
        x_errors.push((&fit.jet.x - d2u).norm());
    }
    let orders = |e: &[f64]| e.windows(2).map(|w| (w[0] / w[1]).log2()).collect::<Vec<_>>();
    Ok(ConvergenceReport {
        radii: radii.to_vec(),
        p_orders: orders(&p_errors),
        x_orders: orders(&x_errors),
        p_errors,
        x_errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::sampled::grid_points;

    fn dv(v: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(v)
    }

    fn euclid_grid(h: f64) -> (ChartManifold, Vec<Point>) {
        let m = ChartManifold::euclidean(2, 1.0);
        let pts = grid_points(&m.domain, h);
        (m, pts)
    }

    #[test]
    fn affine_data_is_fitted_exactly() {
        let (m, pts) = euclid_grid(0.1);
        let u = SampledFunction::from_fn(&m, pts, |x| 0.3 + 2.0 * x[0] - x[1]);
        let fit = jet_fit(&m, &u, &dv(&[0.2, -0.3]), 0.25, DEFAULT_TOL).unwrap();
        assert!((fit.jet.p - dv(&[2.0, -1.0])).norm() < 1e-10);
        assert!(fit.jet.x.amax() < 1e-9);
        assert!(fit.quadratic);
    }

    #[test]
    fn collinear_samples_are_rank_deficient() {
        let m = ChartManifold::euclidean(2, 1.0);
        let pts: Vec<Point> = (0..20).map(|k| dv(&[k as f64 * 0.01, 0.0])).collect();
        let u = SampledFunction::from_fn(&m, pts, |x| x[0]);
        match jet_fit(&m, &u, &dv(&[0.0, 0.0]), 0.5, DEFAULT_TOL) {
            Err(Error::RankDeficient { directions }) => {
                assert!(directions.iter().any(|d| d.contains("y2")), "{directions:?}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn kink_has_plus_jets_and_no_minus_fit() {
        let (m, pts) = euclid_grid(0.02);
        let u = SampledFunction::from_fn(&m, pts, |x| -x[0].abs());
        let x0 = dv(&[0.0, 0.0]);
        let nb = Neighborhood::new(&m, &u, &x0, 0.1).unwrap();
        let fit = fit_quadratic(&nb, DEFAULT_TOL).unwrap();
        assert!(!fit.quadratic);
        assert!(fit.jet.p[0].abs() < 1.0);
        // the fitted jet is over-curved by less than 1/r; pushing it up to touching makes it a plus-jet
        let s = touching_shift(&nb, &fit.jet, DEFAULT_TOL).unwrap();
        assert!(s > 0.0 && s < 1.0 / nb.radius, "{s}");
        assert!(jet_membership(&nb, &fit.jet.shifted(s), DEFAULT_TOL).unwrap().pass);
        assert!(!jet_membership(&nb, &fit.jet.shifted(s - 1e-6), DEFAULT_TOL).unwrap().pass);
        // from below only a curvature of order 1/h touches
        let mut minus = fit.jet.clone();
        minus.side = Side::Minus;
        let s = touching_shift(&nb, &minus, DEFAULT_TOL).unwrap();
        assert!(-s > 50.0, "{s}");
        for s in [0.0, 10.0, -10.0] {
            assert!(!jet_membership(&nb, &minus.shifted(s), DEFAULT_TOL).unwrap().pass);
        }
    }

    #[test]
    fn membership_detects_lowered_hessian() {
        let (m, pts) = euclid_grid(0.01);
        let u = SampledFunction::from_fn(&m, pts, |x| x[0] * x[0] + 0.5 * x[0] * x[1]);
        let x0 = dv(&[0.0, 0.0]);
        let nb = Neighborhood::new(&m, &u, &x0, 0.05).unwrap();
        let exact = Jet {
            base: x0.clone(),
            frame: nb.frame.clone(),
            value: 0.0,
            p: dv(&[0.0, 0.0]),
            x: DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 0.0]),
            side: Side::Plus,
        };
        let eps = 0.1;
        assert!(jet_membership(&nb, &exact.shifted(eps), DEFAULT_TOL).unwrap().pass);
        let low = jet_membership(&nb, &exact.shifted(-eps), DEFAULT_TOL).unwrap();
        assert!(!low.pass);
        // worst violation (eps/2 - tol) r^2 at the rim
        let r2 = 0.05_f64 * 0.05;
        assert!((low.worst_violation - (eps / 2.0 - DEFAULT_TOL) * r2).abs() < 1e-3 * r2);
    }

    #[test]
    fn closure_extrapolation_improves_hessian() {
        let (m, pts) = euclid_grid(0.01);
        let u = SampledFunction::from_fn(&m, pts, |x| (x[0] + 0.3).exp() + x[1].sin());
        let x0 = dv(&[0.1, 0.2]);
        let c = closure_jet(&m, &u, &x0, 0.16, 3, DEFAULT_TOL).unwrap();
        let exact = DMatrix::from_row_slice(2, 2, &[(0.4_f64).exp(), 0.0, 0.0, -(0.2_f64).sin()]);
        let plain = (&c.ladder.last().unwrap().x - &exact).norm();
        let ext = (&c.jet.x - &exact).norm();
        let errs: Vec<f64> = c.ladder.iter().map(|j| (&j.x - &exact).norm()).collect();
        assert!(ext <= plain + 1e-9, "{ext} {errs:?} {:?}", c.radii);
    }
}
