//! Per-iteration diagnostics under the penalty doubling schedule.
//!
//! Runs the same instance from two starting penalties. From rho0 = 1 the
//! steps shrink as rho doubles and the run stops at the penalty cap short
//! of the optimum; from rho0 = 0.01 it converges.

use glinf::io::write_trace_csv;
use glinf::oracle::oracle_unconstrained;
use glinf::{solve, ProblemSpec, SolverConfig, SymMatrix};

fn main() -> glinf::Result<()> {
    let s = SymMatrix::from_rows(&[&[0.3, 0.1, 0.0], &[0.1, 0.25, 0.05], &[0.0, 0.05, 0.4]])?;
    let spec = ProblemSpec::new(s, 0.0, 100.0)?;
    let exact = oracle_unconstrained(&spec)?;

    for rho0 in [1.0, 0.01] {
        let config = SolverConfig {
            rho0,
            ..SolverConfig::default()
        }
        .with_trace(true);
        let result = solve(&spec, &config)?;
        let trace = result.trace.as_deref().unwrap_or_default();
        println!(
            "rho0 = {rho0}: {} after {} iterations, final rho {}, max error {:.2e}",
            result.termination,
            result.iters_used,
            result.final_diagnostics.rho,
            result.theta_star.max_abs_diff(&exact)
        );
        println!("{:>6} {:>10} {:>12} {:>12} {:>12}", "iter", "rho", "objective", "primal res", "kkt");
        for d in trace.iter().filter(|d| d.iter % 20 == 1 || d.iter == result.iters_used) {
            println!(
                "{:>6} {:>10} {:>12.6} {:>12.3e} {:>12.3e}",
                d.iter, d.rho, d.objective, d.primal_residual, d.kkt_stationarity
            );
        }
        println!();
        if rho0 < 1.0 {
            let path = std::env::temp_dir().join("glinf_trace.csv");
            write_trace_csv(trace, std::fs::File::create(&path).expect("temp file")).expect("trace csv");
            println!("full trace written to {}", path.display());
        }
    }
    Ok(())
}
