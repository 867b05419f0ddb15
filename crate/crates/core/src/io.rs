//! CSV ingestion, sample covariance, and result/trace serialization.
//!
//! Result documents are JSON objects with the matrix stored row-major next
//! to an explicit order `p`. Non-finite diagnostic values are written as
//! `null`. Trace files are CSV with the fixed header [`TRACE_HEADER`].

use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::diagnostics::Diagnostics;
use crate::error::{Error, Result};
use crate::types::{SolveResult, SymMatrix, Termination};

pub const TRACE_HEADER: [&str; 9] = [
    "iter",
    "rho",
    "objective",
    "aug_lagrangian",
    "primal_residual",
    "dual_change",
    "constraint_violation",
    "min_eigenvalue",
    "kkt_stationarity",
];

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a numeric table, one observation per row. A first row containing
/// any non-numeric cell is treated as a header and skipped.
pub fn load_samples(path: impl AsRef<Path>) -> Result<DMatrix<f64>> {
    let path = path.as_ref();
    parse_table(open(path)?, path)
}

/// Same as [`load_samples`] over any reader; `label` names the source in
/// error messages.
pub fn parse_table(reader: impl Read, label: &Path) -> Result<DMatrix<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (k, record) in rdr.records().enumerate() {
        let record = record.map_err(|source| Error::Csv {
            path: label.to_path_buf(),
            source,
        })?;
        let line = k + 1;
        if record.iter().all(str::is_empty) {
            continue;
        }
        if k == 0 && record.iter().any(|c| c.parse::<f64>().is_err()) {
            continue;
        }
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(Error::RaggedRows {
                path: label.to_path_buf(),
                row: line,
                expected,
                found: record.len(),
            });
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(col, cell)| match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(Error::NonNumericCell {
                    path: label.to_path_buf(),
                    row: line,
                    col: col + 1,
                    value: cell.to_string(),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let Some(p) = width else {
        return Err(Error::EmptyFile {
            path: label.to_path_buf(),
        });
    };
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Ok(DMatrix::from_row_slice(rows.len(), p, &flat))
}

/// Reads a square covariance matrix, symmetric within the input tolerance.
pub fn load_covariance(path: impl AsRef<Path>) -> Result<SymMatrix> {
    let path = path.as_ref();
    let m = load_samples(path)?;
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionError(format!(
            "{}: covariance must be square, got {}x{}",
            path.display(),
            m.nrows(),
            m.ncols()
        )));
    }
    SymMatrix::from_matrix(m)
}

/// `S = (1/n) sum_i (x_i - mean)(x_i - mean)^T`. One observation gives the
/// zero matrix.
pub fn sample_covariance(data: &DMatrix<f64>) -> SymMatrix {
    sample_covariance_ddof(data, 0).expect("ddof 0 accepts any nonempty table")
}

/// Covariance normalized by `1 / (n - ddof)`.
pub fn sample_covariance_ddof(data: &DMatrix<f64>, ddof: usize) -> Result<SymMatrix> {
    let (n, p) = data.shape();
    if n <= ddof || p == 0 {
        return Err(Error::DimensionError(format!(
            "need more than {ddof} observations of at least one variable, got {n}x{p}"
        )));
    }
    let mean = data.row_mean();
    let mut centered = data.clone();
    for mut row in centered.row_iter_mut() {
        row -= &mean;
    }
    let cov = centered.transpose() * &centered / (n - ddof) as f64;
    Ok(SymMatrix::symmetrize(cov))
}

/// JSON result document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub p: usize,
    pub theta: Vec<f64>,
    pub termination: Termination,
    pub iters: usize,
    pub objective: Option<f64>,
    pub primal_residual: Option<f64>,
    pub dual_change: Option<f64>,
    pub constraint_violation: Option<f64>,
    pub min_eigenvalue: Option<f64>,
    pub kkt_stationarity: Option<f64>,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

impl ResultDocument {
    pub fn from_result(result: &SolveResult) -> Self {
        let d = &result.final_diagnostics;
        ResultDocument {
            p: result.theta_star.order(),
            theta: result.theta_star.to_row_major(),
            termination: result.termination,
            iters: result.iters_used,
            objective: finite(d.objective),
            primal_residual: finite(d.primal_residual),
            dual_change: finite(d.dual_change),
            constraint_violation: finite(d.constraint_violation),
            min_eigenvalue: finite(d.min_eigenvalue),
            kkt_stationarity: finite(d.kkt_stationarity),
        }
    }

    pub fn theta_matrix(&self) -> Result<SymMatrix> {
        SymMatrix::from_row_major(self.p, &self.theta)
    }
}

pub fn write_matrix_csv(m: &SymMatrix, mut out: impl Write) -> std::io::Result<()> {
    let p = m.order();
    for i in 0..p {
        let row: Vec<String> = (0..p).map(|j| m.get(i, j).to_string()).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn write_trace_csv(trace: &[Diagnostics], out: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for d in trace {
        w.write_record([
            d.iter.to_string(),
            d.rho.to_string(),
            d.objective.to_string(),
            d.aug_lagrangian.to_string(),
            d.primal_residual.to_string(),
            d.dual_change.to_string(),
            d.constraint_violation.to_string(),
            d.min_eigenvalue.to_string(),
            d.kkt_stationarity.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|source| Error::Io {
        path: PathBuf::from(path),
        source,
    })
}
