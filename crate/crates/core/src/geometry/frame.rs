use nalgebra::{DMatrix, DVector};

use super::manifold::{ChartManifold, Point};
use crate::error::{Error, Result};

/// An orthonormal frame of `T_base M`; column `i` holds the coordinate
/// components of the `i`-th frame vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub base: Point,
    pub vectors: DMatrix<f64>,
}

impl Frame {
    /// Gram-Schmidt on the coordinate basis with respect to `g(base)`. When
    /// `first` is given, the first frame vector is its normalization.
    pub fn orthonormal(m: &ChartManifold, base: &Point, first: Option<&DVector<f64>>) -> Result<Self> {
        let n = m.dim;
        let g = m.metric_at(base.as_slice());
        let ip = |a: &DVector<f64>, b: &DVector<f64>| a.dot(&(&g * b));
        let mut out: Vec<DVector<f64>> = Vec::with_capacity(n);
        let mut candidates: Vec<DVector<f64>> = Vec::with_capacity(n + 1);
        if let Some(f) = first {
            if f.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: f.len(),
                });
            }
            candidates.push(f.clone());
        }
        for i in 0..n {
            let mut e = DVector::zeros(n);
            e[i] = 1.0;
            candidates.push(e);
        }
        for c in candidates {
            if out.len() == n {
                break;
            }
            let mut w = c.clone();
            // two passes of modified Gram-Schmidt
            for _ in 0..2 {
                for e in &out {
                    let proj = ip(&w, e);
                    w -= e * proj;
                }
            }
            let len = ip(&w, &w).max(0.0).sqrt();
            let scale = ip(&c, &c).max(0.0).sqrt();
            if len > 1e-8 * scale.max(1e-300) {
                out.push(w / len);
            } else if out.is_empty() {
                return Err(Error::Config("frame direction has zero length".into()));
            }
        }
        Ok(Self {
            base: base.clone(),
            vectors: DMatrix::from_columns(&out),
        })
    }

    pub fn dim(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn vector(&self, i: usize) -> DVector<f64> {
        self.vectors.column(i).into_owned()
    }

    /// Frame components of a coordinate tangent vector.
    pub fn components(&self, m: &ChartManifold, v: &DVector<f64>) -> DVector<f64> {
        let g = m.metric_at(self.base.as_slice());
        self.vectors.transpose() * (g * v)
    }

    /// Coordinate vector with the given frame components.
    pub fn to_coordinates(&self, c: &DVector<f64>) -> DVector<f64> {
        &self.vectors * c
    }

    /// Frame components of a covector given in coordinates: `p(e_i)`.
    pub fn covector_components(&self, p: &DVector<f64>) -> DVector<f64> {
        self.vectors.transpose() * p
    }

    /// Largest deviation of `E^T g E` from the identity.
    pub fn orthonormality_defect(&self, m: &ChartManifold) -> f64 {
        let g = m.metric_at(self.base.as_slice());
        let gram = self.vectors.transpose() * g * &self.vectors;
        let n = gram.nrows();
        (gram - DMatrix::identity(n, n)).abs().max()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthonormal_in_curved_metric() {
        let m = ChartManifold::hyperbolic(3, 1.0, 0.9);
        let x = DVector::from_vec(vec![0.2, -0.1, 0.4]);
        let dir = DVector::from_vec(vec![1.0, 1.0, 0.0]);
        let f = Frame::orthonormal(&m, &x, Some(&dir)).unwrap();
        assert!(f.orthonormality_defect(&m) < 1e-12);
        // first vector is aligned with dir
        let e1 = f.vector(0);
        let cos = m.inner(x.as_slice(), &e1, &dir) / m.norm(x.as_slice(), &dir);
        assert!((cos - 1.0).abs() < 1e-12);
    }

    #[test]
    fn components_round_trip() {
        let m = ChartManifold::sphere(2, 1.0, 2.0);
        let x = DVector::from_vec(vec![0.5, 0.3]);
        let f = Frame::orthonormal(&m, &x, None).unwrap();
        let v = DVector::from_vec(vec![0.7, -0.2]);
        let c = f.components(&m, &v);
        assert!((f.to_coordinates(&c) - &v).norm() < 1e-13);
        assert!((c.norm() - m.norm(x.as_slice(), &v)).abs() < 1e-13);
    }
}
