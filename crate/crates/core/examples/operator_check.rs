//! Structural checks on operators: properness, monotonicity in `r`, and
//! condition (H) against a modulus on sampled pairs.
//!
//! cargo run --example operator_check

use riemann_viscosity::geometry::ChartManifold;
use riemann_viscosity::jets::{check_condition_h, check_proper, Modulus, OperatorF, ProperSpec};
use riemann_viscosity::random::{pair_at_distance, stream, tag};

fn main() -> riemann_viscosity::Result<()> {
    let m = ChartManifold::hyperbolic(2, 1.0, 0.9);
    let spec = ProperSpec::default();

    let ops = [
        OperatorF::from_tag("linear_elliptic:1", Some("sin(x1)*x2"), 2)?,
        OperatorF::eikonal(),
        OperatorF::from_tag("user:0", Some("trX + r"), 2)?,
    ];
    for op in &ops {
        let c = check_proper(op, &m, &spec, &mut stream(7, tag::OPERATOR, 0));
        println!(
            "{:<32} proper {:<5} degenerate elliptic {:<5} monotone in r {:<5}",
            op.name, c.proper, c.degenerate_elliptic, c.monotone_in_r
        );
    }

    // condition (H) for -tr X + r - f with a Lipschitz f
    let op = ops[0].clone();
    let mut rng = stream(7, tag::CONDITION_H, 0);
    let pairs: Vec<_> = [0.05, 0.2, 0.5]
        .into_iter()
        .filter_map(|l| pair_at_distance(&mut rng, &m, l, 0.8))
        .collect();
    let alphas = [1.0, 10.0, 100.0];
    for omega in [Modulus::Power { c: 4.0, a: 1.0 }, Modulus::Power { c: 1e-3, a: 1.0 }] {
        let h = check_condition_h(&op, &m, &pairs, &alphas, &omega, 4, 1e-12, &mut rng)?;
        println!("condition (H) with {omega:?}: {} (max gap / modulus {:.3})", h.pass, h.max_ratio);
    }
    Ok(())
}
