//! First and second variation of the squared distance `phi(x, y) = d(x, y)^2`.

use nalgebra::{DMatrix, DVector};

use super::form::SymmetricForm;
use crate::error::{Error, Result};
use crate::geometry::curvature::riemann_unchecked;
use crate::geometry::{
    distance, exp_map, jacobi_field, minimizing_geodesic, ChartManifold, Frame, GeodesicPath, JacobiField,
    PathBundle, Point,
};

/// Both partial differentials of `phi`, as coordinate covectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SqDistanceGradient {
    pub at_x: DVector<f64>,
    pub at_y: DVector<f64>,
    pub length: f64,
    /// Set when `x = y`: the gradient is zero and no geodesic exists.
    pub degenerate: bool,
}

/// `(-2 l iota(gamma'(0)), 2 l iota(gamma'(l)))`.
pub fn grad_sq_distance(m: &ChartManifold, x: &Point, y: &Point) -> Result<SqDistanceGradient> {
    m.check_in_chart(x.as_slice())?;
    m.check_in_chart(y.as_slice())?;
    if x == y {
        return Ok(SqDistanceGradient {
            at_x: DVector::zeros(m.dim),
            at_y: DVector::zeros(m.dim),
            length: 0.0,
            degenerate: true,
        });
    }
    let path = minimizing_geodesic(m, x, y)?;
    Ok(gradient_from_path(m, &path))
}

pub fn gradient_from_path(m: &ChartManifold, path: &GeodesicPath) -> SqDistanceGradient {
    let l = path.length;
    SqDistanceGradient {
        at_x: m.flat(path.start().as_slice(), path.start_velocity()) * (-2.0 * l),
        at_y: m.flat(path.end().as_slice(), path.end_velocity()) * (2.0 * l),
        length: l,
        degenerate: false,
    }
}

/// Second-variation data along the minimizing geodesic from `x` to `y`:
/// the parallel frame, the linearized flow and the curvature operator
/// `Z -> R(Z, gamma') gamma'` in frame components at every sample.
#[derive(Debug, Clone)]
pub struct SecondVariation {
    pub path: GeodesicPath,
    pub bundle: PathBundle,
    pub curvature: Vec<DMatrix<f64>>,
}

impl SecondVariation {
    pub fn new(m: &ChartManifold, x: &Point, y: &Point) -> Result<Self> {
        let path = minimizing_geodesic(m, x, y)?;
        Self::from_path(m, path)
    }

    pub fn from_path(m: &ChartManifold, path: GeodesicPath) -> Result<Self> {
        let bundle = PathBundle::new(m, &path)?;
        let n = m.dim;
        let curvature = (0..bundle.len())
            .map(|k| {
                if m.is_euclidean() {
                    return DMatrix::zeros(n, n);
                }
                let x = bundle.points[k].as_slice();
                let r = riemann_unchecked(m, x);
                let op = r.jacobi_operator(&bundle.velocities[k]);
                let e = &bundle.frames[k];
                let g = m.metric_at(x);
                let c = e.transpose() * g * op * e;
                (&c + c.transpose()) * 0.5
            })
            .collect();
        Ok(Self {
            path,
            bundle,
            curvature,
        })
    }

    pub fn length(&self) -> f64 {
        self.path.length
    }

    /// Frame at `x` with first vector `gamma'(0)`.
    pub fn frame_x(&self) -> Frame {
        self.bundle.start_frame.clone()
    }

    /// The transported frame at `y`; its first vector is `gamma'(l)`.
    pub fn frame_y(&self) -> Frame {
        self.bundle.end_frame()
    }

    /// Jacobi field with boundary values given in frame components.
    pub fn jacobi(&self, m: &ChartManifold, v1: &DVector<f64>, v2: &DVector<f64>) -> Result<JacobiField> {
        let e0 = &self.bundle.frames[0];
        let el = self.bundle.frames.last().expect("non-empty");
        jacobi_field(m, &self.bundle, &(e0 * v1), &(el * v2))
    }

    /// Parallel-frame components of a field and of its covariant derivative.
    pub fn components(&self, m: &ChartManifold, field: &JacobiField) -> (Vec<DVector<f64>>, Vec<DVector<f64>>) {
        let mut c = Vec::with_capacity(field.values.len());
        let mut dc = Vec::with_capacity(field.values.len());
        for k in 0..field.values.len() {
            let g = m.metric_at(self.bundle.points[k].as_slice());
            let et = self.bundle.frames[k].transpose();
            c.push(&et * (&g * &field.values[k]));
            dc.push(&et * (&g * &field.derivatives[k]));
        }
        (c, dc)
    }

    fn check_grid(&self, len: usize) -> Result<()> {
        if len != self.bundle.len() {
            return Err(Error::GridMismatch(format!(
                "field has {len} samples, geodesic grid has {}",
                self.bundle.len()
            )));
        }
        Ok(())
    }

    /// `I(X, Y) = int <X', Y'> - <R(X, gamma') gamma', Y> dt` for fields in
    /// parallel-frame components with given derivatives, by composite Simpson.
    pub fn index_bilinear(
        &self,
        x: &[DVector<f64>],
        dx: &[DVector<f64>],
        y: &[DVector<f64>],
        dy: &[DVector<f64>],
    ) -> Result<f64> {
        for len in [x.len(), dx.len(), y.len(), dy.len()] {
            self.check_grid(len)?;
        }
        let integrand: Vec<f64> = (0..x.len())
            .map(|k| dx[k].dot(&dy[k]) - x[k].dot(&(&self.curvature[k] * &y[k])))
            .collect();
        Ok(simpson(&integrand, self.length()))
    }

    /// Index form of a field given only by its parallel-frame samples; the
    /// derivative is taken by fourth-order finite differences on the grid.
    pub fn index_form(&self, x: &[DVector<f64>]) -> Result<f64> {
        self.check_grid(x.len())?;
        let h = self.length() / (x.len() - 1) as f64;
        let dx = differentiate(x, h);
        self.index_bilinear(x, &dx, x, &dx)
    }

    /// The comparison field `a(t) V1 + b(t) V2` in parallel-frame
    /// components, with `V1`, `V2` given by their frame components.
    pub fn comparison_field(&self, k: f64, v1: &DVector<f64>, v2: &DVector<f64>) -> Result<Vec<DVector<f64>>> {
        let l = self.length();
        self.bundle
            .times
            .iter()
            .map(|t| {
                let (a, b) = super::bounds::comparison_coefficients(k, l, *t)?;
                Ok(v1 * a + v2 * b)
            })
            .collect()
    }

    /// Hessian of `phi` on `T_x M x T_y M` in the adapted frames: the
    /// `gamma'` directions carry the flat block `[[2, -2], [-2, 2]]`, the
    /// normal block is `2 l I(J_a, J_b)` over Jacobi fields with unit
    /// boundary data.
    pub fn hessian(&self, m: &ChartManifold) -> Result<SymmetricForm> {
        let n = m.dim;
        let l = self.length();
        let mut h = DMatrix::zeros(2 * n, 2 * n);
        h[(0, 0)] = 2.0;
        h[(n, n)] = 2.0;
        h[(0, n)] = -2.0;
        h[(n, 0)] = -2.0;
        let normal: Vec<usize> = (1..n).chain(n + 1..2 * n).collect();
        let mut fields = Vec::with_capacity(normal.len());
        for &a in &normal {
            let mut w = DVector::zeros(2 * n);
            w[a] = 1.0;
            let j = self.jacobi(m, &w.rows(0, n).into_owned(), &w.rows(n, n).into_owned())?;
            fields.push(self.components(m, &j));
        }
        for (ia, &a) in normal.iter().enumerate() {
            for (ib, &b) in normal.iter().enumerate().skip(ia) {
                let (ca, dca) = &fields[ia];
                let (cb, dcb) = &fields[ib];
                let v = 2.0 * l * self.index_bilinear(ca, dca, cb, dcb)?;
                h[(a, b)] = v;
                h[(b, a)] = v;
            }
        }
        Ok(SymmetricForm::new(vec![self.frame_x(), self.frame_y()], h))
    }

    /// The same Hessian from the boundary terms
    /// `2 l [<J'(l), V2> - <J'(0), V1>]`, valid for all directions.
    pub fn hessian_from_boundary_terms(&self, m: &ChartManifold) -> Result<SymmetricForm> {
        let n = m.dim;
        let l = self.length();
        let mut h = DMatrix::zeros(2 * n, 2 * n);
        for a in 0..2 * n {
            let mut w = DVector::zeros(2 * n);
            w[a] = 1.0;
            let j = self.jacobi(m, &w.rows(0, n).into_owned(), &w.rows(n, n).into_owned())?;
            let (_, dc) = self.components(m, &j);
            let d0 = &dc[0];
            let dl = dc.last().expect("non-empty");
            for b in 0..2 * n {
                h[(a, b)] = 2.0 * l * if b < n { -d0[b] } else { dl[b - n] };
            }
        }
        Ok(SymmetricForm::new(vec![self.frame_x(), self.frame_y()], h))
    }
}

/// Composite Simpson over uniformly spaced samples spanning `[0, length]`;
/// falls back to a trapezoid on the last interval for an odd interval count.
pub fn simpson(f: &[f64], length: f64) -> f64 {
    let intervals = f.len().saturating_sub(1);
    if intervals == 0 {
        return 0.0;
    }
    let h = length / intervals as f64;
    let even = intervals - intervals % 2;
    let mut s = 0.0;
    let mut k = 0;
    while k < even {
        s += h / 3.0 * (f[k] + 4.0 * f[k + 1] + f[k + 2]);
        k += 2;
    }
    if even < intervals {
        s += 0.5 * h * (f[even] + f[even + 1]);
    }
    s
}

/// Fourth-order finite-difference derivative of uniformly spaced samples.
pub fn differentiate(x: &[DVector<f64>], h: f64) -> Vec<DVector<f64>> {
    let len = x.len();
    assert!(len >= 5, "need at least five samples");
    let combo = |idx: [usize; 5], w: [f64; 5]| -> DVector<f64> {
        let mut out = &x[idx[0]] * w[0];
        for j in 1..5 {
            out += &x[idx[j]] * w[j];
        }
        out / (12.0 * h)
    };
    (0..len)
        .map(|k| match k {
            0 => combo([0, 1, 2, 3, 4], [-25.0, 48.0, -36.0, 16.0, -3.0]),
            1 => combo([0, 1, 2, 3, 4], [-3.0, -10.0, 18.0, -6.0, 1.0]),
            _ if k + 2 < len => combo([k - 2, k - 1, k, k + 1, k + 2], [1.0, -8.0, 0.0, 8.0, -1.0]),
            _ if k + 2 == len => {
                let e = len - 1;
                combo([e - 4, e - 3, e - 2, e - 1, e], [-1.0, 6.0, -18.0, 10.0, 3.0])
            }
            _ => {
                let e = len - 1;
                combo([e - 4, e - 3, e - 2, e - 1, e], [3.0, -16.0, 36.0, -48.0, 25.0])
            }
        })
        .collect()
}

/// Hessian of `phi o (exp_x x exp_y)` at the origin by second differences,
/// in the given frames. Each entry uses geodesics of the product manifold,
/// so no connection terms enter.
pub fn hessian_finite_difference(
    m: &ChartManifold,
    x: &Point,
    y: &Point,
    frame_x: &Frame,
    frame_y: &Frame,
    step: f64,
) -> Result<DMatrix<f64>> {
    let n = m.dim;
    let phi = |w: &DVector<f64>, s: f64| -> Result<f64> {
        let v1 = frame_x.to_coordinates(&w.rows(0, n).into_owned()) * s;
        let v2 = frame_y.to_coordinates(&w.rows(n, n).into_owned()) * s;
        let a = exp_map(m, x, &v1)?;
        let b = exp_map(m, y, &v2)?;
        Ok(distance(m, &a, &b)?.powi(2))
    };
    let phi0 = distance(m, x, y)?.powi(2);
    let second = |w: &DVector<f64>| -> Result<f64> {
        Ok((phi(w, step)? - 2.0 * phi0 + phi(w, -step)?) / (step * step))
    };
    let unit = |a: usize| {
        let mut w = DVector::zeros(2 * n);
        w[a] = 1.0;
        w
    };
    let mut h = DMatrix::zeros(2 * n, 2 * n);
    for a in 0..2 * n {
        h[(a, a)] = second(&unit(a))?;
    }
    for a in 0..2 * n {
        for b in a + 1..2 * n {
            let v = (second(&(unit(a) + unit(b)))? - second(&(unit(a) - unit(b)))?) / 4.0;
            h[(a, b)] = v;
            h[(b, a)] = v;
        }
    }
    Ok(h)
}

/// Convenience: the Hessian of `phi` at `(x, y)`.
pub fn hess_sq_distance(m: &ChartManifold, x: &Point, y: &Point) -> Result<SymmetricForm> {
    SecondVariation::new(m, x, y)?.hessian(m)
}
