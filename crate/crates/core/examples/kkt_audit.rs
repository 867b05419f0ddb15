//! First-order optimality audit of candidate solutions.

use glinf::diagnostics::default_kkt_tol;
use glinf::oracle::oracle_p2;
use glinf::{kkt_report, objective, ProblemSpec, SymMatrix};

fn main() -> glinf::Result<()> {
    let s = SymMatrix::from_rows(&[&[1.0, 0.9], &[0.9, 1.0]])?;
    let spec = ProblemSpec::new(s, 0.0, 0.2)?;
    let tol = default_kkt_tol(spec.lambda());

    let exact = oracle_p2(&spec, 2001)?;
    let candidates = [
        ("reference optimum", exact.clone()),
        ("identity", SymMatrix::identity(2)),
        ("bound not reached", exact.map_entries(|i, j, v| if i == j { v } else { 0.9 * v })),
        ("diagonal nudged", exact.map_entries(|i, j, v| if i == j { v + 1e-3 } else { v })),
    ];
    println!("{:<20} {:>12} {:>12}", "candidate", "objective", "kkt");
    for (name, theta) in candidates {
        println!(
            "{name:<20} {:>12.8} {:>12.3e}",
            objective(&spec, &theta)?,
            kkt_report(&spec, &theta, tol)?
        );
    }
    Ok(())
}
