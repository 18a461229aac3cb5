//! Space-time comparison for the heat equation `u_t - u_xx = 0`, the
//! `eps/(T - t)` transform that makes a subsolution strict, and the
//! time-slope identity at a doubled maximum.
//!
//! cargo run --example parabolic

use riemann_viscosity::geometry::{ChartManifold, Point};
use riemann_viscosity::jets::{grid_points, OperatorF};
use riemann_viscosity::principle::{
    parabolic_boundary, parabolic_comparison, parabolic_jet_fit, slope_identity, space_time_samples, transform_check,
    ParabolicOptions,
};

fn heat(t: f64, x: &Point) -> f64 {
    (-t).exp() * x[0].sin() + 0.3 * (-4.0 * t).exp() * (2.0 * x[0]).cos()
}

fn main() -> riemann_viscosity::Result<()> {
    let m = ChartManifold::euclidean(1, 1.0);
    let dt = 0.005;
    let space = grid_points(&m.domain, 0.02);
    let times: Vec<f64> = (0..=100).map(|k| k as f64 * dt).collect();
    let u = space_time_samples(&m, &space, &times, heat);
    let v = space_time_samples(&m, &space, &times, |t, x| heat(t, x) + 0.02);
    let op = OperatorF::linear_elliptic(0.0, |_: &[f64]| 0.0);

    let x0 = Point::from_vec(vec![0.4]);
    let fit = parabolic_jet_fit(&m, &u, 0.25, &x0, 0.05, 2.0 * dt)?;
    let exact_a = -(-0.25f64).exp() * 0.4f64.sin() - 1.2 * (-1.0f64).exp() * 0.8f64.cos();
    println!("parabolic jet at (0.25, 0.4): a = {:.6} (exact {exact_a:.6}), X = {:.6}", fit.jet.a, fit.jet.x[(0, 0)]);

    let checks: Vec<(f64, Point)> = [(0.1, 0.2), (0.25, -0.4), (0.4, 0.7)]
        .iter()
        .map(|&(t, x)| (t, Point::from_vec(vec![x])))
        .collect();
    let opts = ParabolicOptions {
        tol: 1e-6,
        boundary: parabolic_boundary(&u, &m.domain, 0.01)?,
        check_points: checks.clone(),
        radius: 0.05,
        time_radius: 2.0 * dt,
        f_tol: 1e-2,
    };
    let cmp = parabolic_comparison(&op, &m, &u, &v, &opts)?;
    println!("u vs u + 0.02: {:?}, max interior gap {:.3e}", cmp.status, cmp.max_interior_gap);

    let tr = transform_check(&op, &m, &u, 1.0, 0.1, &checks, 0.05, 2.0 * dt, 1e-6)?;
    for r in &tr.rows {
        println!("  t = {:.2}: slope {:.6} -> {:.6} (required {:.6})", r.t, r.a_u, r.a_tilde, r.required);
    }

    let u1 = space_time_samples(&m, &space, &times, |t, x| -(x[0] - 0.3).powi(2) - 3.0 * (t - 0.1).powi(2) + t.sin());
    let u2 = space_time_samples(&m, &space, &times, |_, x| -(x[0] + 0.1).powi(2));
    let phi = |t: f64, a: &Point, b: &Point| 5.0 * (a[0] - b[0]).powi(2) + (t - 0.25).powi(2);
    let id = slope_identity(&m, &u1, &u2, &phi, 0.05, 2.0 * dt, 10.0)?;
    println!("b1 + b2 = {:.4}, d_t phi = {:.4} at t = {:.3}, within {:.2}: {}", id.b1 + id.b2, id.dt_phi, id.t, id.factor * id.scale, id.pass);
    Ok(())
}
