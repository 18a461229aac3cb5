//! Doubling of variables: the penalized maximum of
//! `u(x) - v(y) - (alpha/2) d(x, y)^2` along an alpha ladder, and the
//! matrix sandwich for the Hessian of the penalty at the maximizer.
//!
//! cargo run --example doubling

use nalgebra::DMatrix;
use riemann_viscosity::distance::SymmetricForm;
use riemann_viscosity::geometry::{ChartManifold, Frame, Point};
use riemann_viscosity::jets::{grid_points, SampledFunction};
use riemann_viscosity::principle::{
    doubling_ladder, ladder_diagnostics, matrix_inequality_check, maximize_doubled, penalty_hessian, refine_doubled,
    sandwich_delta,
};

fn main() -> riemann_viscosity::Result<()> {
    let m = ChartManifold::euclidean(2, 1.0);
    let h = 0.02;
    let pts = grid_points(&m.domain, h);
    let c = [0.231, -0.167];
    let u = SampledFunction::from_fn(&m, pts.clone(), |x| -((x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2)).sqrt());
    let v = SampledFunction::from_fn(&m, pts.clone(), |x| 0.5 * x[0].sin());

    let alphas: Vec<f64> = (0..=6).map(|k| 10f64.powi(k)).collect();
    let ladder = doubling_ladder(&m, &u, &v, &alphas)?;
    let rep = ladder_diagnostics(&ladder, &u, &v, h)?;
    println!("sup(u - v) on the samples: {:.6}", rep.sup_diagonal);
    println!("{:>8} {:>12} {:>12} {:>10}", "alpha", "mu_alpha", "alpha d^2", "floor");
    for r in &rep.rows {
        println!("{:>8.0e} {:>12.6} {:>12.3e} {:>10.1e}", r.alpha, r.mu_alpha, r.alpha_d2, r.floor);
    }

    // smooth pair: refine the sample maximizer, then test the sandwich
    // -(1/delta + |A|) I <= diag(X, -Y) <= A + delta A^2
    let a = 10.0;
    let u_fn = |x: &Point| -(x[0] - 0.2).powi(2) - 2.0 * (x[1] + 0.1).powi(2);
    let v_fn = |x: &Point| 0.5 * (x[0] * x[0] + x[1] * x[1]);
    let us = SampledFunction::from_fn(&m, pts.clone(), u_fn);
    let vs = SampledFunction::from_fn(&m, pts, v_fn);
    let coarse = maximize_doubled(&m, &us, &vs, a, None)?;
    let st = refine_doubled(&m, &u_fn, &v_fn, &coarse, 0.02, 1e-10)?;
    let (x, y) = (st.x_point(), st.y_point());
    let ph = penalty_hessian(&m, &x, &y, a, None)?;
    let hu = SymmetricForm::new(vec![Frame::orthonormal(&m, &x, None)?], DMatrix::from_diagonal(&nalgebra::dvector![-2.0, -4.0]));
    let hv = SymmetricForm::new(vec![Frame::orthonormal(&m, &y, None)?], DMatrix::identity(2, 2));
    let delta = sandwich_delta(a, m.sec_lower, 2.0 * 2f64.sqrt());
    let mv = matrix_inequality_check(&m, &ph, a, &hu, &hv, delta, 1e-9)?;
    println!(
        "\nalpha = {a}: x = {:.4?}, y = {:.4?}, |A| = {:.2}, upper margin {:.3}, lower margin {:.3}",
        x.as_slice(),
        y.as_slice(),
        mv.a_norm,
        mv.upper_margin,
        mv.lower_margin
    );
    Ok(())
}
