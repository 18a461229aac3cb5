use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::geometry::Frame;

/// A symmetric bilinear form on `T_x M` or on `T_x M x T_y M`, stored by its
/// coefficients in orthonormal frames. For a product form the coefficient
/// array is ordered `[frame at x, frame at y]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricForm {
    pub frames: Vec<Frame>,
    pub coeffs: DMatrix<f64>,
}

impl SymmetricForm {
    /// Symmetrizes `coeffs` on construction.
    pub fn new(frames: Vec<Frame>, coeffs: DMatrix<f64>) -> Self {
        let total: usize = frames.iter().map(|f| f.dim()).sum();
        assert_eq!(coeffs.nrows(), total, "coefficient size must match the frames");
        assert_eq!(coeffs.ncols(), total, "coefficient array must be square");
        let coeffs = (&coeffs + coeffs.transpose()) * 0.5;
        Self { frames, coeffs }
    }

    pub fn size(&self) -> usize {
        self.coeffs.nrows()
    }

    /// `Q(c, c)` for frame components `c`.
    pub fn quadratic(&self, c: &DVector<f64>) -> f64 {
        c.dot(&(&self.coeffs * c))
    }

    pub fn bilinear(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        a.dot(&(&self.coeffs * b))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            frames: self.frames.clone(),
            coeffs: &self.coeffs * s,
        }
    }

    pub fn eigenvalues(&self) -> DVector<f64> {
        self.coeffs.clone().symmetric_eigenvalues()
    }

    /// Spectral norm.
    pub fn norm(&self) -> f64 {
        self.eigenvalues().iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// The `(i, j)` block of a product form, each block `n x n`.
    pub fn block(&self, i: usize, j: usize) -> DMatrix<f64> {
        let n = self.frames[0].dim();
        self.coeffs.view((i * n, j * n), (n, n)).into_owned()
    }
}

/// Plain-data view of a form for reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormRecord {
    pub base: Vec<Vec<f64>>,
    pub coeffs: Vec<Vec<f64>>,
}

impl From<&SymmetricForm> for FormRecord {
    fn from(f: &SymmetricForm) -> Self {
        Self {
            base: f.frames.iter().map(|fr| fr.base.as_slice().to_vec()).collect(),
            coeffs: matrix_rows(&f.coeffs),
        }
    }
}

pub fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

/// Smallest eigenvalue of a symmetric matrix: `b - a >= -tol` tests `a <= b`.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    let s = (m + m.transpose()) * 0.5;
    s.symmetric_eigenvalues().min()
}
