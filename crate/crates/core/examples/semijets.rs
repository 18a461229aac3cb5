//! Second-order jets of sampled functions: a quadratic fit at a smooth
//! point, and the sub/supersolution test of a classical solution of
//! `-tr X + u - f = 0`.
//!
//! cargo run --example semijets

use riemann_viscosity::geometry::ChartManifold;
use riemann_viscosity::jets::{
    check_solution_side, grid_points, jet_fit, OperatorF, SampledFunction, SolutionOptions, SolutionSide,
};
use riemann_viscosity::random::shrink;
use nalgebra::DVector;

fn main() -> riemann_viscosity::Result<()> {
    let m = ChartManifold::euclidean(2, 1.0);
    let h = 0.01;
    let u = SampledFunction::from_fn(&m, grid_points(&m.domain, h), |x| x[0].sin() * x[1].cos());

    let x0 = DVector::from_vec(vec![0.3, -0.2]);
    let fit = jet_fit(&m, &u, &x0, 0.05, 1e-3)?;
    let (s, c) = (0.3f64.sin(), 0.3f64.cos());
    let (sy, cy) = ((-0.2f64).sin(), (-0.2f64).cos());
    println!("jet at {:?} from {} samples (max residual {:.1e})", x0.as_slice(), fit.samples, fit.residual_max);
    println!("  p = {:.5?}   exact [{:.5}, {:.5}]", fit.jet.p.as_slice(), c * cy, -s * sy);
    println!("  X = {:.4?}", fit.jet.x.as_slice());
    println!("  exact X = [{:.4}, {:.4}, {:.4}, {:.4}]", -s * cy, -c * sy, -c * sy, -s * cy);

    // -lap u = 2u, so u solves -tr X + u - 3u = 0
    let op = OperatorF::linear_elliptic(1.0, |x: &[f64]| 3.0 * x[0].sin() * x[1].cos());
    let checks = grid_points(&shrink(&m.domain, 0.8), 0.2);
    let opts = SolutionOptions::new(0.05);
    for side in [SolutionSide::Sub, SolutionSide::Super] {
        let r = check_solution_side(&op, &m, &u, &checks, side, &opts);
        println!("{side:?}solution: {} ({} points, worst residual {:.2e})", r.pass, r.points.len(), r.worst);
    }

    // a concave kink has no subjets but arbitrarily negative superjets
    let kink = SampledFunction::from_fn(&m, u.points.clone(), |x| -(x[0].abs()));
    let zero = OperatorF::linear_elliptic(0.0, |_: &[f64]| 0.0);
    for side in [SolutionSide::Sub, SolutionSide::Super] {
        let r = check_solution_side(&zero, &m, &kink, &checks, side, &opts);
        println!("-|x1| as {side:?}solution of -tr X = 0: {}", r.pass);
    }
    Ok(())
}
