//! A (gamma, lambda) grid with warm starts, sequential and parallel.

use std::time::Instant;

use glinf::sweep::{run_sweep, SweepSpec};
use glinf::{SolverConfig, SymMatrix};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn main() -> glinf::Result<()> {
    let p = 12;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let x = DMatrix::<f64>::from_fn(40, p, |_, _| rng.sample(StandardNormal));
    let cov = glinf::io::sample_covariance(&x);

    let gammas = vec![0.0, 0.05, 0.1, 0.2];
    let lambdas = vec![0.05, 0.1, 0.2, 0.4];
    let config = SolverConfig {
        rho0: 0.01,
        epsilon: 1e-6,
        ..SolverConfig::default()
    };

    for (label, warm, jobs) in [("cold", false, 1), ("warm", true, 1), ("warm, 4 jobs", true, 4)] {
        let sweep = SweepSpec::new(gammas.clone(), lambdas.clone(), warm)?;
        let start = Instant::now();
        let points = run_sweep(&cov, &sweep, &config, jobs)?;
        let iters: usize = points.iter().map(|pt| pt.result.iters_used).sum();
        println!("{label:<13} {iters:>6} iterations  {:>7.1} ms", start.elapsed().as_secs_f64() * 1e3);
        if label == "warm" {
            println!("{:>7} {:>7} {:>12} {:>6} {:>8}  termination", "gamma", "lambda", "objective", "iters", "nonzeros");
            for pt in &points {
                let s = pt.summary();
                let nnz = nonzero_offdiag(&pt.result.theta_star);
                println!(
                    "{:>7} {:>7} {:>12.6} {:>6} {:>8}  {}",
                    s.gamma,
                    s.lambda,
                    s.objective.unwrap_or(f64::NAN),
                    s.iters,
                    nnz,
                    s.termination
                );
            }
        }
    }
    Ok(())
}

fn nonzero_offdiag(theta: &SymMatrix) -> usize {
    let p = theta.order();
    (0..p)
        .flat_map(|i| (i + 1..p).map(move |j| (i, j)))
        .filter(|&(i, j)| theta.get(i, j).abs() > 1e-6)
        .count()
}
