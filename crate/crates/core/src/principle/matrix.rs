//! The second-order sandwich at a doubled maximum:
//! `-(1/delta + |A|) I <= diag(X, -Y) <= A + delta A^2`, with `A` the
//! Hessian of the penalty in the adapted product frame.

use nalgebra::DMatrix;
use serde::Serialize;

use super::doubling::Penalty;
use crate::distance::{min_eigenvalue, SecondVariation, SymmetricForm};
use crate::error::{Error, Result};
use crate::geometry::{ChartManifold, Frame, Point};
use crate::jets::change_of_frame;

/// Hessian of `d(base, .)^2` at `x`, in the orthonormal frame `frame` at `x`.
pub fn sq_distance_hessian_at(m: &ChartManifold, base: &Point, x: &Point, frame: &Frame) -> Result<DMatrix<f64>> {
    let n = m.dim;
    if base == x {
        return Ok(DMatrix::identity(n, n) * 2.0);
    }
    let sv = SecondVariation::new(m, base, x)?;
    let h = sv.hessian(m)?.block(1, 1);
    let t = change_of_frame(m, &sv.frame_y(), frame);
    Ok(&t * h * t.transpose())
}

/// `A = D^2 [(alpha/2) d(x, y)^2 + (lambda/2) d(anchor, x)^2 + (lambda/2) d(anchor, y)^2]`
/// in the adapted product frame: first vector at `x` along `gamma'(0)`,
/// frame at `y` its parallel transport (the same frame twice when `x = y`).
#[derive(Debug, Clone)]
pub struct PenaltyHessian {
    pub form: SymmetricForm,
    pub length: f64,
}

impl PenaltyHessian {
    pub fn frame_x(&self) -> &Frame {
        &self.form.frames[0]
    }

    pub fn frame_y(&self) -> &Frame {
        &self.form.frames[1]
    }
}

pub fn penalty_hessian(m: &ChartManifold, x: &Point, y: &Point, alpha: f64, penalty: Option<&Penalty>) -> Result<PenaltyHessian> {
    let n = m.dim;
    let (mut a, fx, fy, l) = if x == y {
        let f = Frame::orthonormal(m, x, None)?;
        let mut a = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            a[(i, i)] = alpha;
            a[(n + i, n + i)] = alpha;
            a[(i, n + i)] = -alpha;
            a[(n + i, i)] = -alpha;
        }
        (a, f.clone(), f, 0.0)
    } else {
        let sv = SecondVariation::new(m, x, y)?;
        let h = sv.hessian(m)?;
        (h.coeffs * (0.5 * alpha), sv.frame_x(), sv.frame_y(), sv.length())
    };
    if let Some(p) = penalty {
        if p.lambda > 0.0 {
            let anchor = Point::from_column_slice(&p.anchor);
            let hx = sq_distance_hessian_at(m, &anchor, x, &fx)? * (0.5 * p.lambda);
            let hy = sq_distance_hessian_at(m, &anchor, y, &fy)? * (0.5 * p.lambda);
            let mut view = a.view_mut((0, 0), (n, n));
            view += &hx;
            let mut view = a.view_mut((n, n), (n, n));
            view += &hy;
        }
    }
    Ok(PenaltyHessian {
        form: SymmetricForm::new(vec![fx, fy], a),
        length: l,
    })
}

/// `1 / (alpha (cosh(kappa L) + 1))` with `kappa = sqrt(max(-K, 0))` and `L`
/// the diameter of the current window.
pub fn sandwich_delta(alpha: f64, sec_lower: f64, diameter: f64) -> f64 {
    let kappa = (-sec_lower).max(0.0).sqrt();
    1.0 / (alpha * ((kappa * diameter).cosh() + 1.0))
}

#[derive(Debug, Clone, Serialize)]
pub struct MatrixVerdict {
    pub delta: f64,
    pub a_norm: f64,
    pub alpha: f64,
    /// `min eig(A + delta A^2 - diag(X, -Y))`.
    pub upper_margin: f64,
    /// `min eig(diag(X, -Y) + (1/delta + |A|) I)`.
    pub lower_margin: f64,
    /// `min eig(Y o P + 4 alpha l^2 kappa^2 I - X)` in the paired frames.
    pub order_margin: f64,
    pub upper: bool,
    pub lower: bool,
    pub order: bool,
    /// `|A| <= 3 alpha`.
    pub norm_within_3alpha: bool,
    pub tol: f64,
}

impl MatrixVerdict {
    pub fn pass(&self) -> bool {
        self.upper && self.lower
    }
}

fn same_base(a: &Frame, b: &Frame) -> bool {
    (&a.base - &b.base).amax() <= 1e-12 * (1.0 + a.base.amax())
}

/// Re-expresses a form given in `from` in the frame `to` at the same point.
fn in_frame(m: &ChartManifold, form: &SymmetricForm, to: &Frame) -> Result<DMatrix<f64>> {
    let from = &form.frames[0];
    if !same_base(from, to) {
        return Err(Error::Rejected(format!(
            "frame mismatch: form based at {:?}, expected {:?}",
            from.base.as_slice(),
            to.base.as_slice()
        )));
    }
    let t = change_of_frame(m, from, to);
    Ok(&t * &form.coeffs * t.transpose())
}

/// Eigenvalue tests of the sandwich and of the derived order
/// `X <= Y o P + 4 alpha l^2 kappa^2 I`. `x_form`, `y_form` are forms at
/// `x` and `y`; they are re-expressed in the frames of `a`, which must be
/// orthonormal.
pub fn matrix_inequality_check(
    m: &ChartManifold,
    a: &PenaltyHessian,
    alpha: f64,
    x_form: &SymmetricForm,
    y_form: &SymmetricForm,
    delta: f64,
    tol: f64,
) -> Result<MatrixVerdict> {
    for f in &a.form.frames {
        let defect = f.orthonormality_defect(m);
        if defect > 1e-8 {
            return Err(Error::Rejected(format!("frame not orthonormal (defect {defect:.2e})")));
        }
    }
    let n = m.dim;
    let x = in_frame(m, x_form, a.frame_x())?;
    let y = in_frame(m, y_form, a.frame_y())?;
    let am = &a.form.coeffs;
    let mut diag = DMatrix::zeros(2 * n, 2 * n);
    diag.view_mut((0, 0), (n, n)).copy_from(&x);
    diag.view_mut((n, n), (n, n)).copy_from(&(-&y));
    let a_norm = a.form.norm();
    let upper_margin = min_eigenvalue(&(am + am * am * delta - &diag));
    let lower_margin = min_eigenvalue(&(&diag + DMatrix::identity(2 * n, 2 * n) * (1.0 / delta + a_norm)));
    let kappa2 = (-m.sec_lower).max(0.0);
    let shift = 4.0 * alpha * a.length * a.length * kappa2;
    let order_margin = min_eigenvalue(&(&y + DMatrix::identity(n, n) * shift - &x));
    Ok(MatrixVerdict {
        delta,
        a_norm,
        alpha,
        upper_margin,
        lower_margin,
        order_margin,
        upper: upper_margin >= -tol,
        lower: lower_margin >= -tol,
        order: order_margin >= -tol,
        norm_within_3alpha: a_norm <= 3.0 * alpha * (1.0 + 1e-9),
        tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    #[test]
    fn flat_penalty_hessian_and_kernel_direction() {
        let m = ChartManifold::euclidean(2, 1.0);
        let x = DVector::from_vec(vec![0.1, 0.0]);
        let y = DVector::from_vec(vec![0.3, 0.2]);
        let a = penalty_hessian(&m, &x, &y, 5.0, None).unwrap();
        let expect = DMatrix::from_row_slice(4, 4, &[5.0, 0.0, -5.0, 0.0, 0.0, 5.0, 0.0, -5.0, -5.0, 0.0, 5.0, 0.0, 0.0, -5.0, 0.0, 5.0]);
        assert!((&a.form.coeffs - expect).amax() < 1e-6);
        // X = -I, Y = I passes; X above Y along the kernel direction (V, V) fails as delta -> 0
        let fx = a.frame_x().clone();
        let fy = a.frame_y().clone();
        let yf = SymmetricForm::new(vec![fy.clone()], DMatrix::identity(2, 2));
        let ok = SymmetricForm::new(vec![fx.clone()], -DMatrix::identity(2, 2));
        assert!(matrix_inequality_check(&m, &a, 5.0, &ok, &yf, 1e-9, 1e-9).unwrap().pass());
        let yf = SymmetricForm::new(vec![fy], DMatrix::zeros(2, 2));
        let ok = SymmetricForm::new(vec![fx.clone()], DMatrix::zeros(2, 2));
        let bad = SymmetricForm::new(vec![fx], DMatrix::identity(2, 2) * 0.01);
        assert!(matrix_inequality_check(&m, &a, 5.0, &ok, &yf, 1e-9, 1e-9).unwrap().pass());
        assert!(!matrix_inequality_check(&m, &a, 5.0, &bad, &yf, 1e-9, 1e-9).unwrap().upper);
    }

    #[test]
    fn hyperbolic_norm_bound_on_small_window() {
        let m = ChartManifold::hyperbolic(2, 1.0, 0.9);
        let x = DVector::from_vec(vec![0.05, -0.02]);
        let y = DVector::from_vec(vec![-0.1, 0.08]);
        let a = penalty_hessian(&m, &x, &y, 100.0, None).unwrap();
        let l = a.length;
        let bound = 100.0 * l / l.sinh() * (l.cosh() + 1.0);
        assert!(a.form.norm() <= bound * (1.0 + 1e-6));
        assert!(a.form.norm() <= 300.0);
    }

    #[test]
    fn mismatched_base_is_rejected() {
        let m = ChartManifold::euclidean(2, 1.0);
        let x = DVector::from_vec(vec![0.1, 0.0]);
        let a = penalty_hessian(&m, &x, &x, 1.0, None).unwrap();
        let other = Frame::orthonormal(&m, &DVector::from_vec(vec![0.2, 0.0]), None).unwrap();
        let f = SymmetricForm::new(vec![other], DMatrix::zeros(2, 2));
        let g = SymmetricForm::new(vec![a.frame_y().clone()], DMatrix::zeros(2, 2));
        assert!(matrix_inequality_check(&m, &a, 1.0, &f, &g, 0.5, 1e-9).is_err());
    }

    #[test]
    fn anchor_term_at_its_base_adds_lambda() {
        let m = ChartManifold::hyperbolic(2, 1.0, 0.9);
        let x = DVector::from_vec(vec![0.2, 0.1]);
        let pen = Penalty { lambda: 0.4, anchor: vec![0.2, 0.1] };
        let a = penalty_hessian(&m, &x, &x, 1.0, Some(&pen)).unwrap();
        assert!((a.form.coeffs[(0, 0)] - 1.4).abs() < 1e-12);
        assert!((a.form.coeffs[(0, 2)] + 1.0).abs() < 1e-12);
    }
}
