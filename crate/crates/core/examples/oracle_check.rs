//! Compare the solver with the exact 2x2 reference on random instances.
//!
//! Usage: `cargo run --example oracle_check -- [seed] [cases] [rho0]`

use glinf::verify::run_agreement_suite;
use glinf::SolverConfig;

fn main() -> glinf::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed = args.next().map_or(42, |s| s.parse().expect("seed"));
    let cases = args.next().map_or(20, |s| s.parse().expect("cases"));
    let rho0 = args.next().map_or(1.0, |s| s.parse().expect("rho0"));
    let config = SolverConfig {
        rho0,
        ..SolverConfig::default()
    };
    let report = run_agreement_suite(seed, cases, &config)?;
    print!("{}", report.render());
    Ok(())
}
