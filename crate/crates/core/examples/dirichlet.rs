//! Comparison for the Dirichlet problem of `-tr X + u - f = 0` on the
//! unit disk: certify both sides, then bound `max(u1 - u2)` by the
//! boundary data.
//!
//! cargo run --example dirichlet

use riemann_viscosity::geometry::{ChartDomain, ChartManifold, MetricSource, Point};
use riemann_viscosity::jets::{grid_points, Modulus, OperatorF, SampledFunction};
use riemann_viscosity::principle::{boundary_indices, dirichlet_comparison, DirichletOptions};
use riemann_viscosity::random::{stream, tag};

fn main() -> riemann_viscosity::Result<()> {
    let m = ChartManifold::new("disk", 2, MetricSource::Euclidean, ChartDomain::ball(2, 1.0), f64::INFINITY, 0.0, 0.0)?;
    let pts = grid_points(&m.domain, 0.025);
    let boundary = boundary_indices(&m.domain, &pts, 0.03);
    let checks = grid_points(&ChartDomain::ball(2, 0.75), 0.25);

    // u = sin(x1 + 2 x2) solves -lap u + u = 6u
    let sol = |x: &Point| (x[0] + 2.0 * x[1]).sin();
    let op = OperatorF::linear_elliptic(1.0, |x: &[f64]| 6.0 * (x[0] + 2.0 * x[1]).sin())
        .with_omega_h(Modulus::Power { c: 6.0 * 5f64.sqrt(), a: 1.0 });
    let u2 = SampledFunction::from_fn(&m, pts.clone(), sol);
    println!("{} boundary samples of {}", boundary.len(), pts.len());

    for shift in [0.0, 0.05] {
        let u1 = SampledFunction::from_fn(&m, pts.clone(), |x| sol(x) - shift);
        let opts = DirichletOptions::new(boundary.clone(), checks.clone(), 0.06);
        let v = dirichlet_comparison(&op, &m, &u1, &u2, &opts, &mut stream(7, tag::OPERATOR, 0))?;
        println!("u1 = u - {shift}: {:?}, max(u1 - u2) = {:.3e}", v.status, v.max_gap);
    }

    // a bump is not a subsolution, so the pair is rejected rather than failed
    let bump = SampledFunction::from_fn(&m, pts.clone(), |x| sol(x) + 0.3 * (-20.0 * x.norm_squared()).exp());
    let opts = DirichletOptions::new(boundary, checks, 0.06);
    let v = dirichlet_comparison(&op, &m, &bump, &u2, &opts, &mut stream(7, tag::OPERATOR, 0))?;
    println!("u + bump: {:?} ({})", v.status, v.certification.reasons.join("; "));
    Ok(())
}
