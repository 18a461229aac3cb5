//! Riemann, sectional and Ricci curvature from the Christoffel symbols.
//!
//! Convention: `R(X, Y) Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z`,
//! so that `<R(X, Y) Y, X> = K(X, Y) |X ^ Y|^2` and Jacobi fields satisfy
//! `J'' + R(J, gamma') gamma' = 0`.

use nalgebra::{DMatrix, DVector};

use super::frame::Frame;
use super::manifold::{ChartManifold, Point};
use crate::error::{Error, Result};

/// `R^l_ijk` stored flat with index `((l n + i) n + j) n + k`.
#[derive(Debug, Clone)]
pub struct Riemann {
    pub n: usize,
    pub data: Vec<f64>,
}

impl Riemann {
    #[inline]
    pub fn get(&self, l: usize, i: usize, j: usize, k: usize) -> f64 {
        let n = self.n;
        self.data[((l * n + i) * n + j) * n + k]
    }

    /// `R(X, Y) Z` in coordinates.
    pub fn apply(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
        let n = self.n;
        DVector::from_fn(n, |l, _| {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let xy = x[i] * y[j];
                    if xy == 0.0 {
                        continue;
                    }
                    for k in 0..n {
                        s += self.get(l, i, j, k) * xy * z[k];
                    }
                }
            }
            s
        })
    }

    /// The symmetric operator `Z -> R(Z, v) v` as a coordinate matrix.
    pub fn jacobi_operator(&self, v: &DVector<f64>) -> DMatrix<f64> {
        let n = self.n;
        DMatrix::from_fn(n, n, |l, i| {
            let mut s = 0.0;
            for j in 0..n {
                for k in 0..n {
                    s += self.get(l, i, j, k) * v[j] * v[k];
                }
            }
            s
        })
    }
}

/// The Riemann tensor at `x`.
pub fn riemann(m: &ChartManifold, x: &Point) -> Result<Riemann> {
    m.check_in_chart(x.as_slice())?;
    Ok(riemann_unchecked(m, x.as_slice()))
}

pub(crate) fn riemann_unchecked(m: &ChartManifold, x: &[f64]) -> Riemann {
    let n = m.dim;
    let mut out = Riemann {
        n,
        data: vec![0.0; n * n * n * n],
    };
    if m.is_euclidean() {
        return out;
    }
    let g = m.christoffel_unchecked(x);
    let dg = m.christoffel_derivative(x);
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut v = dg.get(i, l, j, k) - dg.get(j, l, i, k);
                    for p in 0..n {
                        v += g.get(l, i, p) * g.get(p, j, k) - g.get(l, j, p) * g.get(p, i, k);
                    }
                    out.data[((l * n + i) * n + j) * n + k] = v;
                }
            }
        }
    }
    out
}

/// Sectional curvature of the plane spanned by `a` and `b` at `x`.
pub fn sectional(m: &ChartManifold, x: &Point, a: &DVector<f64>, b: &DVector<f64>) -> Result<f64> {
    let r = riemann(m, x)?;
    let g = m.metric_at(x.as_slice());
    let aa = a.dot(&(&g * a));
    let bb = b.dot(&(&g * b));
    let ab = a.dot(&(&g * b));
    let area = aa * bb - ab * ab;
    if area <= 1e-14 * aa * bb {
        return Err(Error::DegeneratePlane);
    }
    let rabb = r.apply(a, b, b);
    Ok(rabb.dot(&(&g * a)) / area)
}

/// `Ric(v, v) = sum_i <R(E_i, v) v, E_i>` over an orthonormal frame.
pub fn ricci(m: &ChartManifold, x: &Point, v: &DVector<f64>) -> Result<f64> {
    let r = riemann(m, x)?;
    let g = m.metric_at(x.as_slice());
    let frame = Frame::orthonormal(m, x, None)?;
    Ok((0..m.dim)
        .map(|i| {
            let e = frame.vector(i);
            r.apply(&e, v, v).dot(&(&g * &e))
        })
        .sum())
}

/// Smallest and largest sectional curvature over the coordinate planes and
/// a few diagonal planes at `x`. This is a sample, not a certified bound.
pub fn sectional_range(m: &ChartManifold, x: &Point) -> Result<(f64, f64)> {
    let n = m.dim;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    if n < 2 {
        return Ok((0.0, 0.0));
    }
    let mut dirs: Vec<DVector<f64>> = (0..n)
        .map(|i| {
            let mut e = DVector::zeros(n);
            e[i] = 1.0;
            e
        })
        .collect();
    for i in 0..n {
        for j in i + 1..n {
            let mut e = DVector::zeros(n);
            e[i] = 1.0;
            e[j] = 1.0;
            dirs.push(e);
        }
    }
    for a in 0..dirs.len() {
        for b in a + 1..dirs.len() {
            if let Ok(k) = sectional(m, x, &dirs[a], &dirs[b]) {
                lo = lo.min(k);
                hi = hi.max(k);
            }
        }
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dv(v: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(v)
    }

    #[test]
    fn poincare_disk_has_curvature_minus_kappa_squared() {
        for kappa in [1.0, 0.5] {
            let m = ChartManifold::hyperbolic(2, kappa, 0.9 / kappa);
            for x in [[0.0, 0.0], [0.3, -0.5], [0.7, 0.1]] {
                let x = dv(&x) / kappa;
                let k = sectional(&m, &x, &dv(&[1.0, 0.0]), &dv(&[0.3, 1.0])).unwrap();
                assert!((k + kappa * kappa).abs() < 1e-4, "K = {k}");
            }
        }
    }

    #[test]
    fn sphere_has_curvature_inverse_radius_squared() {
        let m = ChartManifold::sphere(3, 2.0, 3.0);
        let x = dv(&[0.5, 1.0, -0.4]);
        let k = sectional(&m, &x, &dv(&[1.0, 0.2, 0.0]), &dv(&[0.0, 1.0, 1.0])).unwrap();
        assert!((k - 0.25).abs() < 1e-4, "K = {k}");
        let ric = ricci(&m, &x, &dv(&[0.0, 0.0, 1.0])).unwrap();
        let v2 = m.inner(x.as_slice(), &dv(&[0.0, 0.0, 1.0]), &dv(&[0.0, 0.0, 1.0]));
        assert!((ric / v2 - 2.0 * 0.25).abs() < 1e-4);
    }

    #[test]
    fn flat_space_and_degenerate_planes() {
        let m = ChartManifold::euclidean(3, 1.0);
        let x = dv(&[0.1, 0.2, 0.3]);
        assert_eq!(sectional(&m, &x, &dv(&[1.0, 0.0, 0.0]), &dv(&[0.0, 1.0, 0.0])).unwrap(), 0.0);
        assert!(matches!(
            sectional(&m, &x, &dv(&[1.0, 0.0, 0.0]), &dv(&[2.0, 0.0, 0.0])),
            Err(Error::DegeneratePlane)
        ));
    }

    #[test]
    fn riemann_symmetries() {
        let m = ChartManifold::sphere(3, 1.0, 2.0);
        let x = dv(&[0.3, -0.2, 0.6]);
        let r = riemann(&m, &x).unwrap();
        let g = m.metric_at(x.as_slice());
        let (a, b, c, d) = (dv(&[1.0, 0.5, 0.0]), dv(&[0.0, 1.0, 2.0]), dv(&[1.0, 0.0, 1.0]), dv(&[0.3, 0.3, -1.0]));
        let rm = |x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>, w: &DVector<f64>| r.apply(x, y, z).dot(&(&g * w));
        assert!((rm(&a, &b, &c, &d) + rm(&b, &a, &c, &d)).abs() < 1e-6);
        assert!((rm(&a, &b, &c, &d) + rm(&a, &b, &d, &c)).abs() < 1e-6);
        assert!((rm(&a, &b, &c, &d) - rm(&c, &d, &a, &b)).abs() < 1e-6);
    }
}
