//! Solve one small instance and print the estimate with its diagnostics.

use glinf::{solve, ProblemSpec, SolverConfig, SymMatrix};

fn main() -> glinf::Result<()> {
    let s = SymMatrix::from_rows(&[
        &[1.0, 0.5, 0.2, 0.0],
        &[0.5, 1.2, 0.4, 0.1],
        &[0.2, 0.4, 0.9, 0.3],
        &[0.0, 0.1, 0.3, 1.1],
    ])?;
    let spec = ProblemSpec::new(s, 0.05, 0.3)?;
    let config = SolverConfig {
        rho0: 0.01,
        ..SolverConfig::default()
    };
    let result = solve(&spec, &config)?;

    println!("{} after {} iterations", result.termination, result.iters_used);
    for i in 0..spec.order() {
        let row: Vec<String> = (0..spec.order())
            .map(|j| format!("{:>9.5}", result.theta_star.get(i, j)))
            .collect();
        println!("  {}", row.join(" "));
    }
    let d = &result.final_diagnostics;
    println!("objective       {:.10}", d.objective);
    println!("kkt residual    {:.3e}", d.kkt_stationarity);
    println!("min eigenvalue  {:.5}", d.min_eigenvalue);
    println!("largest |offdiag| {:.5} (bound {})", result.theta_star.max_abs_offdiag(), spec.lambda());
    Ok(())
}
