//! Operators `F(x, r, p, X)` and randomized certificates for their
//! structural conditions.
//!
//! `p` and `X` are always handed to `F` in the components of the canonical
//! orthonormal frame at `x` (Gram-Schmidt of the coordinate basis), so
//! `|p|` and `tr X` are the Riemannian norm and trace.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;

use super::fit::change_of_frame;
use super::modulus::Modulus;
use crate::distance::form::matrix_rows;
use crate::distance::SecondVariation;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry::{ChartManifold, Frame, Point};
use crate::random::{chart_point, normal_vector, psd_matrix, symmetric_matrix};

type Evaluator = Arc<dyn Fn(&[f64], f64, &DVector<f64>, &DMatrix<f64>) -> f64 + Send + Sync>;
type Source = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct OperatorF {
    pub name: String,
    /// Declared constant in `beta (r - s) <= F(x, r, ..) - F(x, s, ..)`.
    pub beta: f64,
    /// Declared modulus for condition (H), if any.
    pub omega_h: Option<Modulus>,
    eval: Evaluator,
    source: Option<Source>,
}

impl fmt::Debug for OperatorF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OperatorF")
            .field("name", &self.name)
            .field("beta", &self.beta)
            .field("omega_h", &self.omega_h)
            .finish()
    }
}

impl OperatorF {
    pub fn new(
        name: impl Into<String>,
        beta: f64,
        eval: impl Fn(&[f64], f64, &DVector<f64>, &DMatrix<f64>) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            beta,
            omega_h: None,
            eval: Arc::new(eval),
            source: None,
        }
    }

    /// `F = -tr X + beta r - f(x)`.
    pub fn linear_elliptic(beta: f64, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        let f: Source = Arc::new(f);
        let g = f.clone();
        let mut op = Self::new(format!("linear_elliptic:{beta}"), beta, move |x, r, _p, xm| {
            -xm.trace() + beta * r - g(x)
        });
        op.source = Some(f);
        op
    }

    /// `F = |p| - 1`.
    pub fn eikonal() -> Self {
        Self::new("eikonal", 0.0, |_x, _r, p, _xm| p.norm() - 1.0)
    }

    /// An expression in `x1..xn`, `r`, `p1..pn`, `pnorm`, `trX` and `Xij`
    /// (1-based, `i, j <= 9`).
    pub fn user(source: &str, dim: usize, beta: f64) -> Result<Self> {
        let mut names: Vec<String> = (1..=dim).map(|i| format!("x{i}")).collect();
        names.push("r".into());
        names.extend((1..=dim).map(|i| format!("p{i}")));
        names.push("pnorm".into());
        names.push("trX".into());
        for i in 1..=dim {
            for j in 1..=dim {
                names.push(format!("X{i}{j}"));
            }
        }
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let expr = Expr::compile(source, &refs)?;
        let len = names.len();
        Ok(Self::new(format!("user:{source}"), beta, move |x, r, p, xm| {
            let mut vars = Vec::with_capacity(len);
            vars.extend_from_slice(x);
            vars.push(r);
            vars.extend(p.iter().copied());
            vars.push(p.norm());
            vars.push(xm.trace());
            for i in 0..dim {
                for j in 0..dim {
                    vars.push(xm[(i, j)]);
                }
            }
            expr.eval(&vars)
        }))
    }

    /// Builds a builtin by tag: `linear_elliptic:{beta}` (with an optional
    /// source expression `f(x)`, default 0), `eikonal`, or `user` (with the
    /// expression in `expression`).
    pub fn from_tag(tag: &str, expression: Option<&str>, dim: usize) -> Result<Self> {
        let (kind, arg) = tag.split_once(':').unwrap_or((tag, ""));
        match kind.trim() {
            "linear_elliptic" => {
                let beta: f64 = arg
                    .trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("operator '{tag}': beta must be a number")))?;
                let f = Expr::in_coordinates(expression.unwrap_or("0"), dim)?;
                let mut op = Self::linear_elliptic(beta, move |x| f.eval(x));
                op.name = format!("{tag} f={}", expression.unwrap_or("0"));
                Ok(op)
            }
            "eikonal" => Ok(Self::eikonal()),
            "user" => {
                let src = expression.ok_or_else(|| Error::Config("user operator needs an expression".into()))?;
                let beta = if arg.trim().is_empty() {
                    0.0
                } else {
                    arg.trim()
                        .parse()
                        .map_err(|_| Error::Config(format!("operator '{tag}': beta must be a number")))?
                };
                Self::user(src, dim, beta)
            }
            other => Err(Error::Config(format!("unknown operator '{other}'"))),
        }
    }

    pub fn with_omega_h(mut self, omega: Modulus) -> Self {
        self.omega_h = Some(omega);
        self
    }

    /// `F(x, r, p, X)` with `p`, `X` in the canonical frame at `x`.
    pub fn eval(&self, x: &[f64], r: f64, p: &DVector<f64>, xm: &DMatrix<f64>) -> f64 {
        (self.eval)(x, r, p, xm)
    }

    /// `F` at `x` with `p`, `X` given in an arbitrary orthonormal frame.
    pub fn eval_in_frame(&self, m: &ChartManifold, frame: &Frame, r: f64, p: &DVector<f64>, xm: &DMatrix<f64>) -> Result<f64> {
        let canonical = Frame::orthonormal(m, &frame.base, None)?;
        let t = change_of_frame(m, frame, &canonical);
        Ok(self.eval(frame.base.as_slice(), r, &(&t * p), &(&t * xm * t.transpose())))
    }

    /// The source term `f(x)` of a linear elliptic operator.
    pub fn source(&self, x: &[f64]) -> Option<f64> {
        self.source.as_ref().map(|f| f(x))
    }
}

/// Where and how to sample for [`check_proper`].
#[derive(Debug, Clone, Serialize)]
pub struct ProperSpec {
    pub points: usize,
    pub pairs_per_point: usize,
    pub r_range: (f64, f64),
    pub p_scale: f64,
    pub x_scale: f64,
    pub tol: f64,
    /// Fraction of the chart the sample points are drawn from.
    pub fraction: f64,
}

impl Default for ProperSpec {
    fn default() -> Self {
        Self {
            points: 20,
            pairs_per_point: 50,
            r_range: (-2.0, 2.0),
            p_scale: 1.0,
            x_scale: 1.0,
            tol: 1e-9,
            fraction: 0.9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// `F(x, r, p, X) <= F(x, r, p, Y)` for `Y <= X`.
    DegenerateElliptic,
    /// `F(x, r, ..) <= F(x, s, ..)` for `r <= s`.
    MonotoneInR,
    /// `beta (r - s) <= F(x, r, ..) - F(x, s, ..)` for `r >= s`.
    BetaMonotone,
}

/// A sampled input violating a structural condition. Everything needed to
/// re-evaluate it is stored.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub condition: Condition,
    pub x: Vec<f64>,
    pub r: f64,
    pub s: f64,
    pub p: Vec<f64>,
    pub x_form: Vec<Vec<f64>>,
    pub y_form: Vec<Vec<f64>>,
    /// Amount by which the inequality fails.
    pub violation: f64,
}

fn rows_to_matrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let n = rows.len();
    DMatrix::from_fn(n, n, |i, j| rows[i][j])
}

impl Witness {
    /// Re-evaluates the violation with `op`.
    pub fn reevaluate(&self, op: &OperatorF, beta: f64) -> f64 {
        let p = DVector::from_column_slice(&self.p);
        let xm = rows_to_matrix(&self.x_form);
        let ym = rows_to_matrix(&self.y_form);
        match self.condition {
            Condition::DegenerateElliptic => op.eval(&self.x, self.r, &p, &xm) - op.eval(&self.x, self.r, &p, &ym),
            Condition::MonotoneInR => op.eval(&self.x, self.r, &p, &xm) - op.eval(&self.x, self.s, &p, &xm),
            Condition::BetaMonotone => {
                beta * (self.r - self.s) - (op.eval(&self.x, self.r, &p, &xm) - op.eval(&self.x, self.s, &p, &xm))
            }
        }
    }

    /// True when the stored input still violates the condition by more
    /// than `tol`.
    pub fn is_genuine(&self, op: &OperatorF, beta: f64, tol: f64) -> bool {
        self.reevaluate(op, beta) > tol
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProperCertificate {
    pub operator: String,
    pub beta: f64,
    pub samples: usize,
    pub degenerate_elliptic: bool,
    pub monotone_in_r: bool,
    pub beta_monotone: bool,
    /// `degenerate_elliptic && monotone_in_r`.
    pub proper: bool,
    pub worst: [f64; 3],
    /// At most one witness per condition (the worst).
    pub witnesses: Vec<Witness>,
    pub tol: f64,
}

/// Randomized check of properness and of `beta`-monotonicity in `r`.
/// Ordered forms are generated as `Y = X - PSD` with the PSD part scaled
/// log-uniformly in `[1e-3, 1] * x_scale`; `s` is drawn below `r` with a
/// log-uniform gap so near-equal values are exercised.
pub fn check_proper<R: Rng>(op: &OperatorF, m: &ChartManifold, spec: &ProperSpec, rng: &mut R) -> ProperCertificate {
    let n = m.dim;
    let (rlo, rhi) = spec.r_range;
    let width = (rhi - rlo).max(1e-12);
    let mut worst = [f64::NEG_INFINITY; 3];
    let mut witnesses: [Option<Witness>; 3] = [None, None, None];
    let mut samples = 0;
    for _ in 0..spec.points {
        let x = chart_point(rng, &m.domain, spec.fraction);
        for _ in 0..spec.pairs_per_point {
            let p = normal_vector(rng, n) * spec.p_scale;
            let xm = symmetric_matrix(rng, n, spec.x_scale);
            let ym = &xm - psd_matrix(rng, n, 1e-3 * spec.x_scale, spec.x_scale);
            let gap = (1e-3f64.ln() + rng.random::<f64>() * (-(1e-3f64.ln()))).exp() * width;
            let r = rlo + gap + rng.random::<f64>() * (width - gap).max(0.0);
            let s = r - gap;
            samples += 1;
            let mut w = Witness {
                condition: Condition::DegenerateElliptic,
                x: x.as_slice().to_vec(),
                r,
                s,
                p: p.as_slice().to_vec(),
                x_form: matrix_rows(&xm),
                y_form: matrix_rows(&ym),
                violation: 0.0,
            };
            // for the r-conditions r plays the larger value: test F(s) <= F(r)
            let checks = [
                (Condition::DegenerateElliptic, 0usize),
                (Condition::MonotoneInR, 1),
                (Condition::BetaMonotone, 2),
            ];
            for (cond, k) in checks {
                let mut cand = w.clone();
                cand.condition = cond;
                if cond == Condition::MonotoneInR {
                    // stored as (r, s) = (smaller, larger)
                    cand.r = s;
                    cand.s = r;
                }
                let v = cand.reevaluate(op, op.beta);
                if v > worst[k] {
                    worst[k] = v;
                    if v > spec.tol {
                        cand.violation = v;
                        witnesses[k] = Some(cand);
                    }
                }
            }
            w.violation = 0.0;
        }
    }
    let ok = |k: usize| worst[k] <= spec.tol;
    ProperCertificate {
        operator: op.name.clone(),
        beta: op.beta,
        samples,
        degenerate_elliptic: ok(0),
        monotone_in_r: ok(1),
        beta_monotone: ok(2),
        proper: ok(0) && ok(1),
        worst,
        witnesses: witnesses.into_iter().flatten().collect(),
        tol: spec.tol,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionHRow {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub d: f64,
    pub alpha: f64,
    pub gap: f64,
    pub omega: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionHCertificate {
    pub operator: String,
    pub modulus: String,
    pub rows: Vec<ConditionHRow>,
    pub max_gap: f64,
    /// Largest `gap / omega` over rows with positive gap.
    pub max_ratio: f64,
    pub pass: bool,
    pub tol: f64,
}

/// Samples condition (H):
/// `F(y, r, -a l iota(gamma'(l)), X2) - F(x, r, -a l iota(gamma'(0)), X1) <= omega(a d^2 + d)`
/// with `X1 <= X2 o P` built as `X2 o P - PSD`.
pub fn check_condition_h<R: Rng>(
    op: &OperatorF,
    m: &ChartManifold,
    pairs: &[(Point, Point)],
    alphas: &[f64],
    omega: &Modulus,
    forms_per_pair: usize,
    tol: f64,
    rng: &mut R,
) -> Result<ConditionHCertificate> {
    let n = m.dim;
    let mut rows = Vec::new();
    let mut max_gap = f64::NEG_INFINITY;
    let mut max_ratio = 0.0_f64;
    for (x, y) in pairs {
        let sv = SecondVariation::new(m, x, y)?;
        let l = sv.length();
        let fx = sv.frame_x();
        let fy = sv.frame_y();
        for &alpha in alphas {
            let mut worst = f64::NEG_INFINITY;
            for _ in 0..forms_per_pair.max(1) {
                let mut p = DVector::zeros(n);
                p[0] = -alpha * l;
                let x2 = symmetric_matrix(rng, n, 1.0);
                let x1 = &x2 - psd_matrix(rng, n, 1e-3, 1.0);
                let r = 2.0 * rng.random::<f64>() - 1.0;
                let gap = op.eval_in_frame(m, &fy, r, &p, &x2)? - op.eval_in_frame(m, &fx, r, &p, &x1)?;
                worst = worst.max(gap);
            }
            let w = omega.eval(alpha * l * l + l);
            if worst > 0.0 {
                max_ratio = max_ratio.max(if w > 0.0 { worst / w } else { f64::INFINITY });
            }
            max_gap = max_gap.max(worst);
            rows.push(ConditionHRow {
                x: x.as_slice().to_vec(),
                y: y.as_slice().to_vec(),
                d: l,
                alpha,
                gap: worst,
                omega: w,
                pass: worst <= w + tol,
            });
        }
    }
    let pass = rows.iter().all(|r| r.pass);
    Ok(ConditionHCertificate {
        operator: op.name.clone(),
        modulus: omega.to_string(),
        rows,
        max_gap,
        max_ratio,
        pass,
        tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{pair_at_distance, stream};

    #[test]
    fn linear_elliptic_is_proper_with_its_beta() {
        let m = ChartManifold::euclidean(2, 1.0);
        let op = OperatorF::linear_elliptic(1.0, |x| x[0].sin());
        let cert = check_proper(&op, &m, &ProperSpec::default(), &mut stream(1, 3, 0));
        assert!(cert.proper && cert.beta_monotone, "{cert:?}");
        assert!(cert.witnesses.is_empty());
    }

    #[test]
    fn positive_trace_fails_ellipticity_with_genuine_witness() {
        let m = ChartManifold::euclidean(2, 1.0);
        let op = OperatorF::new("trace", 0.0, |_x, _r, _p, xm| xm.trace());
        let cert = check_proper(&op, &m, &ProperSpec::default(), &mut stream(1, 3, 1));
        assert!(!cert.degenerate_elliptic && cert.monotone_in_r);
        let w = cert.witnesses.iter().find(|w| w.condition == Condition::DegenerateElliptic).unwrap();
        assert!(w.is_genuine(&op, op.beta, 0.0));
    }

    #[test]
    fn arctan_value_dependence_limits_beta() {
        let m = ChartManifold::euclidean(1, 1.0);
        let mut op = OperatorF::new("atan", 0.0, |_x, r, _p, xm| -xm.trace() + r.atan());
        let spec = ProperSpec::default();
        // inf of 1/(1+r^2) over [-2, 2] is 0.2
        op.beta = 0.15;
        assert!(check_proper(&op, &m, &spec, &mut stream(1, 3, 2)).beta_monotone);
        op.beta = 0.5;
        let cert = check_proper(&op, &m, &spec, &mut stream(1, 3, 2));
        assert!(cert.proper && !cert.beta_monotone);
    }

    #[test]
    fn user_expression_operator() {
        let op = OperatorF::from_tag("user:1", Some("-trX + r - x1"), 2).unwrap();
        let v = op.eval(&[0.5, 0.0], 2.0, &DVector::zeros(2), &DMatrix::identity(2, 2));
        assert_eq!(v, -2.0 + 2.0 - 0.5);
        assert_eq!(op.beta, 1.0);
        let le = OperatorF::from_tag("linear_elliptic:2", Some("x1 * x2"), 2).unwrap();
        assert_eq!(le.eval(&[1.0, 3.0], 1.0, &DVector::zeros(2), &DMatrix::zeros(2, 2)), 2.0 - 3.0);
    }

    #[test]
    fn condition_h_lipschitz_source() {
        let m = ChartManifold::hyperbolic(2, 1.0, 0.9);
        let mut rng = stream(3, 4, 0);
        let pairs: Vec<_> = (0..4).filter_map(|_| pair_at_distance(&mut rng, &m, 0.5, 0.6)).collect();
        // f(x) = sin(x1) has coordinate gradient <= 1 and |v| <= |v|_g / 2 in this chart
        let op = OperatorF::linear_elliptic(1.0, |x| x[0].sin());
        let omega = Modulus::Power { c: 0.5, a: 1.0 };
        let cert = check_condition_h(&op, &m, &pairs, &[1.0, 10.0, 100.0], &omega, 5, 1e-12, &mut rng).unwrap();
        assert!(cert.pass, "{cert:?}");
        let step = OperatorF::linear_elliptic(1.0, |x| if x[0] > 0.0 { 1.0 } else { 0.0 });
        // the step drops across the pair, so the gap stays near 1 while d -> 0
        let straddle = vec![(DVector::from_vec(vec![0.005, 0.0]), DVector::from_vec(vec![-0.005, 0.0]))];
        let small = Modulus::Power { c: 0.5, a: 1.0 };
        assert!(!check_condition_h(&step, &m, &straddle, &[1.0], &small, 10, 1e-12, &mut rng).unwrap().pass);
    }
}
