//! Approximate maxima on a noncompact manifold: the penalized search on
//! expanding windows of the hyperbolic plane, an independent re-fit of
//! the certificate, and Yau points of `sqrt(1 + x^2)` on the line.
//!
//! cargo run --release --example omori_yau

use riemann_viscosity::geometry::{ChartManifold, Point};
use riemann_viscosity::jets::Modulus;
use riemann_viscosity::principle::{omori_yau_search, revalidate, yau_points, OmoriYauOptions, OyMode, WindowLadder};

fn main() -> riemann_viscosity::Result<()> {
    let m = ChartManifold::hyperbolic(2, 1.0, 0.9);
    let o = Point::zeros(2);
    // sup(u - v) = 0 is not attained: v decays towards infinity
    let u = |_: &Point| 0.0;
    let v = |x: &Point| {
        let d = m.closed_form_distance(o.as_slice(), x.as_slice()).unwrap_or(f64::NAN);
        (-(1.0 + d * d).sqrt()).exp()
    };
    for mode in [OyMode::Hessian, OyMode::Trace] {
        let windows = WindowLadder::doubling(vec![0.0, 0.0], 0.2, 3, 0.01);
        let opts = OmoriYauOptions::new(0.1, mode, windows, Modulus::Power { c: 1.0, a: 1.0 });
        let rep = omori_yau_search(&m, &u, &v, &opts)?;
        // last rung tried on each window
        for (i, r) in rep.rows.iter().enumerate() {
            if rep.rows.get(i + 1).is_some_and(|n| n.window == r.window) {
                continue;
            }
            println!(
                "  window {:.2} alpha {:>6.0e}: sigma {:+.4} d {:.2e} |p - q| {:.2e} pass {}",
                r.window_radius, r.alpha, r.sigma, r.d, r.p_minus_q, r.pass
            );
        }
        match &rep.certificate {
            Some(c) => {
                let re = revalidate(&m, c, &u, &v, 0.05)?;
                println!("{mode:?}: certificate at y = {:.4?}, re-fit {}", c.y_eps, re.pass);
                for ch in &c.checks {
                    println!("    {:<14} {:+.3e} {} {:.3e}", ch.name, ch.value, ch.relation, ch.bound);
                }
            }
            None => println!("{mode:?}: {}", rep.diagnosis.as_deref().unwrap_or("no certificate")),
        }
    }

    let line = ChartManifold::euclidean(1, 100.0);
    let f = |x: &Point| (1.0 + x[0] * x[0]).sqrt();
    for eps in [0.1, 0.01] {
        let y = yau_points(&line, &f, eps, WindowLadder::doubling(vec![0.0], 1.0, 3, 0.005))?;
        println!("Yau point for eps {eps}: x = {:.4?}, f = {:.6}, |f'| = {:.1e}, f'' = {:.4}", y.x, y.f, y.grad_norm, y.laplacian);
    }
    Ok(())
}
