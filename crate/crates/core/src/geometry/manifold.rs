use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::expr::Expr;

pub type Point = DVector<f64>;

/// Where the chart coordinates are allowed to go.
#[derive(Debug, Clone, PartialEq)]
pub enum ChartDomain {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
}

impl ChartDomain {
    pub fn ball(dim: usize, radius: f64) -> Self {
        ChartDomain::Ball {
            center: vec![0.0; dim],
            radius,
        }
    }

    pub fn cube(dim: usize, half_width: f64) -> Self {
        ChartDomain::Box {
            lo: vec![-half_width; dim],
            hi: vec![half_width; dim],
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            ChartDomain::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(v, (a, b))| *v >= *a && *v <= *b),
            ChartDomain::Ball { center, radius } => {
                let r2: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                r2 <= radius * radius
            }
        }
    }

    /// Characteristic coordinate size, used to scale finite-difference steps.
    pub fn scale(&self) -> f64 {
        match self {
            ChartDomain::Box { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(a, b)| (b - a).abs())
                .fold(0.0, f64::max)
                .max(f64::MIN_POSITIVE),
            ChartDomain::Ball { radius, .. } => 2.0 * radius,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ChartDomain::Box { lo, .. } => lo.len(),
            ChartDomain::Ball { center, .. } => center.len(),
        }
    }
}

type MetricFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

/// The metric-tensor field of a chart.
///
/// The three space forms carry their conformal factor analytically; the
/// expression-defined metrics are differentiated by central differences.
#[derive(Clone)]
pub enum MetricSource {
    Euclidean,
    /// Poincare ball of curvature `-kappa^2`: `g = 4 / (1 - kappa^2 |x|^2)^2 * delta`.
    Hyperbolic { kappa: f64 },
    /// Stereographic chart of the round sphere of the given radius:
    /// `g = 4 / (1 + |x|^2 / R^2)^2 * delta`.
    Sphere { radius: f64 },
    /// `g = factor(x) * delta` with `factor > 0`.
    Conformal { factor: Expr },
    /// Row-major `n x n` coefficient expressions (symmetrized on evaluation).
    Components { entries: Vec<Expr> },
    /// Arbitrary metric supplied from Rust code.
    Custom { name: String, metric: MetricFn },
}

impl fmt::Debug for MetricSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricSource::Euclidean => write!(f, "Euclidean"),
            MetricSource::Hyperbolic { kappa } => write!(f, "Hyperbolic(kappa={kappa})"),
            MetricSource::Sphere { radius } => write!(f, "Sphere(radius={radius})"),
            MetricSource::Conformal { factor } => write!(f, "Conformal({})", factor.source()),
            MetricSource::Components { entries } => {
                let s: Vec<&str> = entries.iter().map(|e| e.source()).collect();
                write!(f, "Components({s:?})")
            }
            MetricSource::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

/// A Riemannian metric on a single coordinate chart plus the curvature and
/// injectivity metadata the comparison results are conditioned on.
#[derive(Debug, Clone)]
pub struct ChartManifold {
    pub id: String,
    pub dim: usize,
    pub metric: MetricSource,
    pub domain: ChartDomain,
    /// Lower bound for the injectivity radius over the chart.
    pub inj_radius_bound: f64,
    /// Lower bound for sectional curvature.
    pub sec_lower: f64,
    /// Lower bound for `Ric / (n - 1)`.
    pub ric_lower: f64,
    pub(crate) fd_step: f64,
}

impl ChartManifold {
    pub fn new(
        id: impl Into<String>,
        dim: usize,
        metric: MetricSource,
        domain: ChartDomain,
        inj_radius_bound: f64,
        sec_lower: f64,
        ric_lower: f64,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config("dimension must be at least 1".into()));
        }
        if domain.dim() != dim {
            return Err(Error::Dimension {
                expected: dim,
                got: domain.dim(),
            });
        }
        if !(inj_radius_bound > 0.0) {
            return Err(Error::Config("inj_radius_bound must be positive".into()));
        }
        if let MetricSource::Components { entries } = &metric {
            if entries.len() != dim * dim {
                return Err(Error::Dimension {
                    expected: dim * dim,
                    got: entries.len(),
                });
            }
        }
        let fd_step = 1e-4 * domain.scale();
        Ok(Self {
            id: id.into(),
            dim,
            metric,
            domain,
            inj_radius_bound,
            sec_lower,
            ric_lower,
            fd_step,
        })
    }

    /// Flat `R^n` on a cube chart.
    pub fn euclidean(dim: usize, half_width: f64) -> Self {
        Self::new(
            format!("euclidean{dim}"),
            dim,
            MetricSource::Euclidean,
            ChartDomain::cube(dim, half_width),
            f64::INFINITY,
            0.0,
            0.0,
        )
        .expect("valid euclidean chart")
    }

    /// Poincare ball model of `H^n(-kappa^2)`, chart restricted to coordinate
    /// radius `chart_radius < 1/kappa`.
    pub fn hyperbolic(dim: usize, kappa: f64, chart_radius: f64) -> Self {
        let k2 = kappa * kappa;
        Self::new(
            format!("hyperbolic{dim}"),
            dim,
            MetricSource::Hyperbolic { kappa },
            ChartDomain::ball(dim, chart_radius),
            f64::INFINITY,
            -k2,
            -k2,
        )
        .expect("valid hyperbolic chart")
    }

    /// Stereographic chart of the round sphere. The injectivity radius of
    /// the sphere is `pi R`.
    pub fn sphere(dim: usize, radius: f64, chart_radius: f64) -> Self {
        let k = 1.0 / (radius * radius);
        Self::new(
            format!("sphere{dim}"),
            dim,
            MetricSource::Sphere { radius },
            ChartDomain::ball(dim, chart_radius),
            std::f64::consts::PI * radius,
            k,
            k,
        )
        .expect("valid sphere chart")
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self.metric, MetricSource::Euclidean)
    }

    pub fn check_in_chart(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: x.len(),
            });
        }
        if !self.domain.contains(x) {
            return Err(Error::OutsideChart { point: x.to_vec() });
        }
        Ok(())
    }

    /// Log of the conformal factor and its gradient, `g = exp(2 f) delta`,
    /// for the metrics that are conformally flat.
    fn conformal_log(&self, x: &[f64]) -> Option<(f64, Vec<f64>)> {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        match &self.metric {
            MetricSource::Euclidean => Some((0.0, vec![0.0; self.dim])),
            MetricSource::Hyperbolic { kappa } => {
                let k2 = kappa * kappa;
                let denom = 1.0 - k2 * r2;
                let f = (2.0 / denom).ln();
                Some((f, x.iter().map(|v| 2.0 * k2 * v / denom).collect()))
            }
            MetricSource::Sphere { radius } => {
                let c = 1.0 / (radius * radius);
                let denom = 1.0 + c * r2;
                let f = (2.0 / denom).ln();
                Some((f, x.iter().map(|v| -2.0 * c * v / denom).collect()))
            }
            MetricSource::Conformal { factor } => {
                let lambda = factor.eval(x);
                let h = self.fd_step;
                let mut xp = x.to_vec();
                let grad = (0..self.dim)
                    .map(|i| {
                        let xi = xp[i];
                        xp[i] = xi + h;
                        let up = factor.eval(&xp);
                        xp[i] = xi - h;
                        let dn = factor.eval(&xp);
                        xp[i] = xi;
                        (up - dn) / (2.0 * h) / (2.0 * lambda)
                    })
                    .collect();
                Some((0.5 * lambda.ln(), grad))
            }
            _ => None,
        }
    }

    /// Metric coefficients `g_ij(x)`.
    pub fn metric_at(&self, x: &[f64]) -> DMatrix<f64> {
        let n = self.dim;
        match &self.metric {
            MetricSource::Components { entries } => {
                let mut g = DMatrix::from_fn(n, n, |i, j| entries[i * n + j].eval(x));
                let gt = g.transpose();
                g = (g + gt) * 0.5;
                g
            }
            MetricSource::Custom { metric, .. } => {
                let g = metric(x);
                (&g + g.transpose()) * 0.5
            }
            MetricSource::Conformal { factor } => DMatrix::identity(n, n) * factor.eval(x),
            _ => {
                let (f, _) = self.conformal_log(x).expect("conformal builtin");
                DMatrix::identity(n, n) * (2.0 * f).exp()
            }
        }
    }

    /// Distance from the closed-form formulas of the space-form builtins;
    /// `None` for other metrics. Used for bulk pair sweeps where shooting
    /// every pair would dominate the run time.
    pub fn closed_form_distance(&self, x: &[f64], y: &[f64]) -> Option<f64> {
        let sq = |a: &[f64]| a.iter().map(|v| v * v).sum::<f64>();
        let diff2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
        match &self.metric {
            MetricSource::Euclidean => Some(diff2.sqrt()),
            MetricSource::Hyperbolic { kappa } => {
                let k2 = kappa * kappa;
                let denom = (1.0 - k2 * sq(x)) * (1.0 - k2 * sq(y));
                Some((1.0 + 2.0 * k2 * diff2 / denom).acosh() / kappa)
            }
            MetricSource::Sphere { radius } => {
                let c = 1.0 / (radius * radius);
                let chord = (c * diff2 / ((1.0 + c * sq(x)) * (1.0 + c * sq(y)))).sqrt();
                Some(2.0 * radius * chord.min(1.0).asin())
            }
            _ => None,
        }
    }

    /// Verifies that the metric is positive definite at `x`.
    pub fn check_metric(&self, x: &[f64]) -> Result<()> {
        let g = self.metric_at(x);
        let eig = g.symmetric_eigenvalues().min();
        if !(eig > 0.0) {
            return Err(Error::MetricNotPositive {
                point: x.to_vec(),
                eig,
            });
        }
        Ok(())
    }

    pub fn inner(&self, x: &[f64], a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        let g = self.metric_at(x);
        a.dot(&(&g * b))
    }

    pub fn norm(&self, x: &[f64], a: &DVector<f64>) -> f64 {
        self.inner(x, a, a).max(0.0).sqrt()
    }

    /// Lowers an index: tangent vector to covector components.
    pub fn flat(&self, x: &[f64], v: &DVector<f64>) -> DVector<f64> {
        self.metric_at(x) * v
    }

    /// Raises an index: covector to tangent vector components.
    pub fn sharp(&self, x: &[f64], p: &DVector<f64>) -> DVector<f64> {
        let g = self.metric_at(x);
        g.clone()
            .cholesky()
            .map(|c| c.solve(p))
            .unwrap_or_else(|| g.lu().solve(p).expect("invertible metric"))
    }

    /// Christoffel symbols of the second kind at `x`.
    pub fn christoffel_at(&self, x: &[f64]) -> Result<Christoffel> {
        self.check_in_chart(x)?;
        Ok(self.christoffel_unchecked(x))
    }

    /// Same as [`christoffel_at`](Self::christoffel_at) without the domain
    /// check; finite-difference stencils may poke slightly outside the chart.
    pub(crate) fn christoffel_unchecked(&self, x: &[f64]) -> Christoffel {
        let n = self.dim;
        let mut gamma = Christoffel::zeros(n);
        if let Some((_, df)) = self.conformal_log(x) {
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let mut v = 0.0;
                        if i == k {
                            v += df[j];
                        }
                        if j == k {
                            v += df[i];
                        }
                        if i == j {
                            v -= df[k];
                        }
                        gamma.set(k, i, j, v);
                    }
                }
            }
            return gamma;
        }
        // Generic route: derivatives of g by central differences.
        let h = self.fd_step;
        let mut xp = x.to_vec();
        let mut dg = Vec::with_capacity(n);
        for l in 0..n {
            let xl = xp[l];
            xp[l] = xl + h;
            let gp = self.metric_at(&xp);
            xp[l] = xl - h;
            let gm = self.metric_at(&xp);
            xp[l] = xl;
            dg.push((gp - gm) / (2.0 * h));
        }
        let ginv = self
            .metric_at(x)
            .try_inverse()
            .expect("metric must be invertible");
        for k in 0..n {
            for i in 0..n {
                for j in i..n {
                    let mut v = 0.0;
                    for l in 0..n {
                        v += ginv[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                    }
                    gamma.set(k, i, j, 0.5 * v);
                    gamma.set(k, j, i, 0.5 * v);
                }
            }
        }
        gamma
    }

    /// `d/dx^m Gamma^k_ij`, by central differences of the Christoffel symbols.
    pub(crate) fn christoffel_derivative(&self, x: &[f64]) -> ChristoffelDerivative {
        let n = self.dim;
        let h = self.fd_step;
        let mut out = ChristoffelDerivative {
            n,
            data: vec![0.0; n * n * n * n],
        };
        if self.is_euclidean() {
            return out;
        }
        let mut xp = x.to_vec();
        for m in 0..n {
            let xm = xp[m];
            xp[m] = xm + h;
            let gp = self.christoffel_unchecked(&xp);
            xp[m] = xm - h;
            let gm = self.christoffel_unchecked(&xp);
            xp[m] = xm;
            for idx in 0..n * n * n {
                out.data[m * n * n * n + idx] = (gp.data[idx] - gm.data[idx]) / (2.0 * h);
            }
        }
        out
    }
}

/// `Gamma^k_ij` stored flat with index `k n^2 + i n + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    pub n: usize,
    pub data: Vec<f64>,
}

impl Christoffel {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[k * self.n * self.n + i * self.n + j]
    }

    #[inline]
    fn set(&mut self, k: usize, i: usize, j: usize, v: f64) {
        let n = self.n;
        self.data[k * n * n + i * n + j] = v;
    }

    /// `Gamma(a, b)^k = Gamma^k_ij a^i b^j`.
    pub fn contract(&self, a: &[f64], b: &[f64], out: &mut [f64]) {
        let n = self.n;
        for k in 0..n {
            let mut s = 0.0;
            let base = k * n * n;
            for i in 0..n {
                let row = base + i * n;
                let ai = a[i];
                for j in 0..n {
                    s += self.data[row + j] * ai * b[j];
                }
            }
            out[k] = s;
        }
    }
}

/// `d_m Gamma^k_ij` stored flat with index `m n^3 + k n^2 + i n + j`.
#[derive(Debug, Clone)]
pub(crate) struct ChristoffelDerivative {
    pub n: usize,
    pub data: Vec<f64>,
}

impl ChristoffelDerivative {
    #[inline]
    pub fn get(&self, m: usize, k: usize, i: usize, j: usize) -> f64 {
        let n = self.n;
        self.data[((m * n + k) * n + i) * n + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_christoffel_vanishes() {
        let m = ChartManifold::euclidean(3, 2.0);
        let g = m.christoffel_at(&[0.3, -0.2, 1.0]).unwrap();
        assert!(g.data.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn poincare_christoffel_at_origin_vanishes() {
        let m = ChartManifold::hyperbolic(2, 1.0, 0.9);
        let g = m.christoffel_at(&[0.0, 0.0]).unwrap();
        assert!(g.data.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn poincare_christoffel_matches_closed_form() {
        // g = 4/(1-|x|^2)^2 delta, f = ln 2 - ln(1-|x|^2), d_1 f = 2 x1 / (1-|x|^2),
        // Gamma^1_11 = d_1 f.
        let m = ChartManifold::hyperbolic(2, 1.0, 0.9);
        let g = m.christoffel_at(&[0.5, 0.0]).unwrap();
        let expected = 2.0 * 0.5 / (1.0 - 0.25);
        assert!((g.get(0, 0, 0) - expected).abs() < 1e-12);
        // Gamma^2_12 = d_1 f as well, Gamma^1_22 = -d_1 f.
        assert!((g.get(1, 0, 1) - expected).abs() < 1e-12);
        assert!((g.get(0, 1, 1) + expected).abs() < 1e-12);
    }

    #[test]
    fn generic_route_agrees_with_conformal_route() {
        let poincare = ChartManifold::hyperbolic(2, 1.0, 0.9);
        let comps = ChartManifold::new(
            "h2-components",
            2,
            MetricSource::Components {
                entries: vec![
                    Expr::in_coordinates("4/(1-x1^2-x2^2)^2", 2).unwrap(),
                    Expr::in_coordinates("0", 2).unwrap(),
                    Expr::in_coordinates("0", 2).unwrap(),
                    Expr::in_coordinates("4/(1-x1^2-x2^2)^2", 2).unwrap(),
                ],
            },
            ChartDomain::ball(2, 0.9),
            f64::INFINITY,
            -1.0,
            -1.0,
        )
        .unwrap();
        let x = [0.3, -0.4];
        let a = poincare.christoffel_at(&x).unwrap();
        let b = comps.christoffel_at(&x).unwrap();
        for (u, v) in a.data.iter().zip(&b.data) {
            assert!((u - v).abs() < 1e-6, "{u} vs {v}");
        }
    }

    #[test]
    fn outside_chart_is_rejected() {
        let m = ChartManifold::hyperbolic(2, 1.0, 0.9);
        assert!(matches!(
            m.christoffel_at(&[0.95, 0.0]),
            Err(Error::OutsideChart { .. })
        ));
    }

    #[test]
    fn musical_maps_are_inverse() {
        let m = ChartManifold::sphere(2, 1.0, 2.0);
        let x = [0.4, 0.7];
        let v = DVector::from_vec(vec![0.3, -1.2]);
        let back = m.sharp(&x, &m.flat(&x, &v));
        assert!((back - v).norm() < 1e-14);
    }

    #[test]
    fn closed_form_distance_agrees_with_shooting() {
        let pts = [([0.1, -0.3], [-0.4, 0.2]), ([0.6, 0.1], [0.55, 0.12])];
        for m in [ChartManifold::hyperbolic(2, 1.3, 0.7), ChartManifold::sphere(2, 0.8, 1.5)] {
            for (a, b) in pts {
                let (x, y) = (DVector::from_row_slice(&a), DVector::from_row_slice(&b));
                let shot = crate::geometry::distance(&m, &x, &y).unwrap();
                let closed = m.closed_form_distance(&a, &b).unwrap();
                assert!((shot - closed).abs() < 1e-8, "{}: {shot} vs {closed}", m.id);
            }
        }
        let c = ChartManifold::new("c", 2, MetricSource::Conformal { factor: Expr::in_coordinates("1 + x1^2", 2).unwrap() }, ChartDomain::cube(2, 1.0), 1.0, 0.0, 0.0).unwrap();
        assert!(c.closed_form_distance(&[0.0, 0.0], &[0.1, 0.0]).is_none());
    }
}
