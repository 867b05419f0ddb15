use std::fs;
use std::path::Path;
use std::process::Command;

use glinf::cli::run;
use glinf::io::{load_samples, sample_covariance, ResultDocument, TRACE_HEADER};
use glinf::oracle::oracle_diagonal;
use glinf::{ProblemSpec, SymMatrix, Termination};
use serde_json::Value;
use tempfile::TempDir;

fn glinf(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("glinf").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write(dir: &TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn solve_covariance_to_json() {
    let dir = TempDir::new().unwrap();
    let cov = write(&dir, "cov.csv", "2,1\n1,2\n");
    let (code, out, err) = glinf(&["solve", "--covariance", &cov, "--gamma", "0", "--lambda", "10"]);
    assert_eq!(code, 0, "{err}");
    let doc: ResultDocument = serde_json::from_str(&out).unwrap();
    assert_eq!(doc.termination, Termination::Converged);
    let want = SymMatrix::from_rows(&[&[2.0 / 3.0, -1.0 / 3.0], &[-1.0 / 3.0, 2.0 / 3.0]]).unwrap();
    assert!(doc.theta_matrix().unwrap().max_abs_diff(&want) < 1e-6);
}

#[test]
fn solve_from_samples_with_zero_bound() {
    let dir = TempDir::new().unwrap();
    let samples = write(&dir, "x.csv", "a,b,c\n1.0,2.0,0.5\n-0.5,1.0,1.5\n0.3,-1.2,0.0\n2.0,0.1,-0.7\n");
    let out_path = dir.path().join("theta.json");
    let (code, _, err) = glinf(&[
        "solve", "--samples", &samples, "--lambda", "0", "--gamma", "0.5", "--rho0", "0.01", "--out", out_path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let doc: ResultDocument = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    let cov = sample_covariance(&load_samples(&samples).unwrap());
    let want = oracle_diagonal(&ProblemSpec::new(cov, 0.5, 0.0).unwrap()).unwrap();
    assert!(doc.theta_matrix().unwrap().max_abs_diff(&want) < 1e-6);
}

#[test]
fn trace_has_one_row_per_iteration() {
    let dir = TempDir::new().unwrap();
    let cov = write(&dir, "cov.csv", "1,0.3,0.1\n0.3,2,0.4\n0.1,0.4,1.5\n");
    let trace = dir.path().join("trace.csv");
    let (code, out, _) = glinf(&[
        "solve", "--covariance", &cov, "--gamma", "0.05", "--lambda", "0.2", "--rho0", "0.01",
        "--trace", trace.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let doc: ResultDocument = serde_json::from_str(&out).unwrap();
    let mut rdr = csv::Reader::from_path(&trace).unwrap();
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), TRACE_HEADER);
    assert_eq!(rdr.records().count(), doc.iters);
}

#[test]
fn csv_output_is_the_matrix() {
    let dir = TempDir::new().unwrap();
    let cov = write(&dir, "cov.csv", "1,0\n0,4\n");
    let (code, out, _) = glinf(&["solve", "--covariance", &cov, "--gamma", "0", "--lambda", "0", "--format", "csv"]);
    assert_eq!(code, 0);
    let rows: Vec<Vec<f64>> = out
        .lines()
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!((rows.len(), rows[0].len()), (2, 2));
    assert_eq!((rows[0][1], rows[1][0]), (0.0, 0.0));
    assert!((rows[0][0] - 1.0).abs() < 1e-6 && (rows[1][1] - 0.25).abs() < 1e-6);
}

#[test]
fn single_point_sweep_equals_solve() {
    let dir = TempDir::new().unwrap();
    let cov = write(&dir, "cov.csv", "1,0.5\n0.5,1\n");
    let (c1, solve_out, _) = glinf(&["solve", "--covariance", &cov, "--gamma", "0.1", "--lambda", "0.3"]);
    let (c2, sweep_out, _) = glinf(&["sweep", "--covariance", &cov, "--gammas", "0.1", "--lambdas", "0.3"]);
    assert_eq!(c1, c2);
    let solved: Value = serde_json::from_str(&solve_out).unwrap();
    let swept: Value = serde_json::from_str(&sweep_out).unwrap();
    assert_eq!(swept["points"][0]["result"], solved);
    assert_eq!(swept["summary"][0]["iters"], solved["iters"]);
}

#[test]
fn sweep_csv_has_summary_and_entries() {
    let dir = TempDir::new().unwrap();
    let cov = write(&dir, "cov.csv", "1,0.5\n0.5,1\n");
    let (code, out, _) = glinf(&[
        "sweep", "--covariance", &cov, "--gammas", "0,0.1", "--lambdas", "0.1,0.2,0.3", "--format", "csv",
        "--jobs", "3", "--rho0", "0.01",
    ]);
    assert_eq!(code, 0);
    let mut rdr = csv::Reader::from_reader(out.as_bytes());
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header[..5], ["gamma", "lambda", "objective", "iters", "termination"]);
    assert_eq!(header.len(), 9);
    let rows: Vec<_> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 6);
    assert_eq!((&rows[1][0], &rows[1][1]), ("0.1", "0.1"));
}

#[test]
fn verify_is_deterministic() {
    let (c1, a, _) = glinf(&["verify", "--seed", "7", "--cases", "5", "--rho0", "0.001"]);
    let (c2, b, _) = glinf(&["verify", "--seed", "7", "--cases", "5", "--rho0", "0.001"]);
    assert_eq!((c1, &a), (c2, &b));
    assert!(a.lines().last().unwrap().contains("(seed 7)"));
    assert!(c1 == 0 || c1 == 4);
}

#[test]
fn input_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let ragged = write(&dir, "bad.csv", "1,2\n3\n");
    let (code, _, err) = glinf(&["solve", "--covariance", &ragged, "--gamma", "0", "--lambda", "1"]);
    assert_eq!(code, 1);
    assert!(err.contains("bad.csv"), "{err}");

    let asym = write(&dir, "asym.csv", "1,2\n0,1\n");
    let (code, _, err) = glinf(&["solve", "--covariance", &asym, "--gamma", "0", "--lambda", "1"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error:"), "{err}");

    let cov = write(&dir, "cov.csv", "1,0\n0,1\n");
    let (code, _, err) = glinf(&["solve", "--covariance", &cov, "--gamma", "-1", "--lambda", "1"]);
    assert_eq!(code, 1);
    assert!(err.contains("gamma"), "{err}");

    let (code, _, err) = glinf(&["solve", "--covariance", &cov, "--samples", &cov, "--gamma", "0", "--lambda", "1"]);
    assert_eq!(code, 1);
    assert!(err.contains("--samples") || err.contains("--covariance"), "{err}");

    let (code, _, _) = glinf(&["sweep", "--covariance", &cov, "--gammas", "0.2,0.1", "--lambdas", "1"]);
    assert_eq!(code, 1);
}

#[test]
fn rho_cap_exit_code() {
    let dir = TempDir::new().unwrap();
    let cov = write(&dir, "cov.csv", "1,0.3\n0.3,1\n");
    let (code, out, _) = glinf(&["solve", "--covariance", &cov, "--gamma", "0.1", "--lambda", "0.5", "--rho-max", "4"]);
    assert_eq!(code, 2);
    let doc: ResultDocument = serde_json::from_str(&out).unwrap();
    assert_eq!((doc.termination, doc.iters), (Termination::RhoCapReached, 60));
}

#[test]
fn binary_runs() {
    let dir = TempDir::new().unwrap();
    let cov = write(&dir, "cov.csv", "2,1\n1,2\n");
    let status = Command::new(env!("CARGO_BIN_EXE_glinf"))
        .args(["solve", "--covariance", &cov, "--gamma", "0", "--lambda", "10"])
        .arg("--out")
        .arg(dir.path().join("r.json"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(Path::new(&dir.path().join("r.json")).exists());
}
