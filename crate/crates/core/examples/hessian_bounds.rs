//! Hessian of the squared distance on the hyperbolic plane, measured
//! through Jacobi fields and compared with the curvature bound.
//!
//! cargo run --example hessian_bounds

use riemann_viscosity::distance::verify::{hessian_trials, laplacian_trial, parallel_direction_value};
use riemann_viscosity::distance::{hessian_finite_difference, parallel_direction_bound, SecondVariation};
use riemann_viscosity::geometry::ChartManifold;
use riemann_viscosity::random::{pair_at_distance, stream, tag};

fn main() -> riemann_viscosity::Result<()> {
    let m = ChartManifold::hyperbolic(2, 1.0, 0.95);
    let mut rng = stream(7, tag::HESSIAN, 0);

    println!("{:>5} {:>12} {:>12} {:>12} {:>10}", "l", "(V,PV) meas", "(V,PV) bound", "min slack", "lap slack");
    for l in [0.1, 0.5, 1.0, 2.0] {
        let (x, y) = pair_at_distance(&mut rng, &m, l, 0.9).expect("pair inside the chart");
        let sv = SecondVariation::new(&m, &x, &y)?;
        let form = sv.hessian(&m)?;
        let measured = parallel_direction_value(&form, 2, 1);
        let bound = parallel_direction_bound(m.sec_lower, l)?;
        let min_slack = hessian_trials(&m, &sv, 50, 1e-4, &mut rng)?
            .iter()
            .map(|r| r.slack)
            .fold(f64::INFINITY, f64::min);
        let lap = laplacian_trial(&m, &sv, 1e-4)?;
        println!("{l:>5} {measured:>12.6} {bound:>12.6} {min_slack:>12.2e} {:>10.2e}", lap.slack);
    }

    // the same Hessian by finite differences of the distance
    let (x, y) = pair_at_distance(&mut rng, &m, 1.0, 0.9).expect("pair");
    let sv = SecondVariation::new(&m, &x, &y)?;
    let jacobi = sv.hessian(&m)?;
    let fd = hessian_finite_difference(&m, &x, &y, &sv.frame_x(), &sv.frame_y(), 1e-3)?;
    println!("\nJacobi vs finite differences at l = 1: max |diff| = {:.2e}", (&jacobi.coeffs - &fd).amax());
    Ok(())
}
