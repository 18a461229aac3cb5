//! Runs the built-in acceptance criteria and prints one line per
//! criterion. Pass criterion keys as arguments to run a subset.
//!
//! cargo run --release --example acceptance_suite -- sharpness matrix

use riemann_viscosity::report::suite::{run_suite, SuiteConfig};

fn main() -> riemann_viscosity::Result<()> {
    let cfg = SuiteConfig {
        only: std::env::args().skip(1).collect(),
        ..SuiteConfig::default()
    };
    for r in run_suite(&cfg)? {
        println!(
            "[{}] {:>2} {:<16} measured {:<12.4e} tol {:<10.1e} {}",
            if r.pass { "PASS" } else { "FAIL" },
            r.id,
            r.key,
            r.measured,
            r.tolerance,
            r.detail
        );
    }
    Ok(())
}
