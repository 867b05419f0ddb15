//! Load observations from CSV, estimate the covariance and solve.

use std::io::Write;

use glinf::io::{load_samples, sample_covariance_ddof, ResultDocument};
use glinf::{solve, ProblemSpec, SolverConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn main() -> glinf::Result<()> {
    // a chain x0 -> x1 -> x2 -> x3 so the true precision is tridiagonal
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let path = std::env::temp_dir().join("glinf_samples.csv");
    let mut file = std::fs::File::create(&path).expect("temp file");
    writeln!(file, "x0,x1,x2,x3").unwrap();
    for _ in 0..500 {
        let mut x = [0.0f64; 4];
        x[0] = rng.sample(StandardNormal);
        for k in 1..4 {
            let e: f64 = rng.sample(StandardNormal);
            x[k] = 0.6 * x[k - 1] + e;
        }
        let row: Vec<String> = x.iter().map(|v| v.to_string()).collect();
        writeln!(file, "{}", row.join(",")).unwrap();
    }
    drop(file);

    let data = load_samples(&path)?;
    let cov = sample_covariance_ddof(&data, 1)?;
    println!("{} observations of {} variables from {}", data.nrows(), data.ncols(), path.display());

    let spec = ProblemSpec::new(cov, 0.05, 1.0)?;
    let config = SolverConfig {
        rho0: 0.01,
        epsilon: 1e-6,
        ..SolverConfig::default()
    };
    let result = solve(&spec, &config)?;
    let doc = ResultDocument::from_result(&result);
    println!("{}", serde_json::to_string_pretty(&doc).expect("json"));
    Ok(())
}
