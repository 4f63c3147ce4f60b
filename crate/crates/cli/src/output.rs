//! Artifact writers and readers: diagnostics CSV, state JSON, and framework
//! report JSON. CSV floats carry 17 significant digits so runs are
//! reproducible bit-for-bit from the files alone.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use lohe_core::thresholds::{FrameworkReport, MarginKind};
use lohe_core::ComplexMatrix;

use crate::CliError;

pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct CsvFile {
    out: BufWriter<File>,
}

impl CsvFile {
    pub fn create(path: &Path, header: &str) -> Result<CsvFile, CliError> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                fs::create_dir_all(parent)
                    .map_err(|e| CliError::config(format!("cannot create {}: {e}", parent.display())))?;
            }
        }
        let file = File::create(path)
            .map_err(|e| CliError::config(format!("cannot create {}: {e}", path.display())))?;
        let mut out = BufWriter::new(file);
        out.write_all(header.as_bytes())
            .and_then(|_| out.write_all(b"\n"))
            .map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))?;
        Ok(CsvFile { out })
    }

    pub fn row(&mut self, fields: &[String]) -> Result<(), CliError> {
        self.out
            .write_all(fields.join(",").as_bytes())
            .and_then(|_| self.out.write_all(b"\n"))
            .map_err(|e| CliError::config(format!("cannot write diagnostics row: {e}")))
    }

    /// Marks a truncated file: written when a run aborts so the rows above
    /// stay usable.
    pub fn trailer(&mut self, message: &str) -> Result<(), CliError> {
        let line = format!("# aborted: {message}\n");
        self.out
            .write_all(line.as_bytes())
            .map_err(|e| CliError::config(format!("cannot write trailer: {e}")))
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.out
            .flush()
            .map_err(|e| CliError::config(format!("cannot flush diagnostics: {e}")))
    }
}

type MatrixJson = Vec<Vec<[f64; 2]>>;

fn matrix_to_json(m: &ComplexMatrix) -> MatrixJson {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn matrix_from_json(rows: &MatrixJson, what: &str) -> Result<ComplexMatrix, CliError> {
    let r = rows.len();
    if r == 0 {
        return Err(CliError::config(format!("{what}: empty matrix")));
    }
    let c = rows[0].len();
    if rows.iter().any(|row| row.len() != c) {
        return Err(CliError::config(format!("{what}: ragged matrix rows")));
    }
    let data = rows
        .iter()
        .flat_map(|row| row.iter().map(|&[re, im]| Complex64::new(re, im)))
        .collect();
    Ok(ComplexMatrix::new(r, c, data))
}

/// On-disk state document. The same schema serves final-state output and
/// explicit initial data, so a finished run can seed the next one.
#[derive(Serialize, Deserialize)]
pub struct StateJson {
    pub model: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrices: Option<Vec<MatrixJson>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phases: Option<Vec<f64>>,
}

impl StateJson {
    pub fn from_points(model: &str, points: &[Vec<f64>]) -> StateJson {
        StateJson {
            model: model.to_string(),
            points: Some(points.to_vec()),
            matrices: None,
            phases: None,
        }
    }

    pub fn from_matrices(model: &str, matrices: &[ComplexMatrix]) -> StateJson {
        StateJson {
            model: model.to_string(),
            points: None,
            matrices: Some(matrices.iter().map(matrix_to_json).collect()),
            phases: None,
        }
    }

    pub fn from_phases(phases: &[f64]) -> StateJson {
        StateJson {
            model: "kuramoto".to_string(),
            points: None,
            matrices: None,
            phases: Some(phases.to_vec()),
        }
    }

    pub fn into_matrices(self, what: &str) -> Result<Vec<ComplexMatrix>, CliError> {
        let rows = self
            .matrices
            .ok_or_else(|| CliError::config(format!("{what}: missing \"matrices\" key")))?;
        rows.iter().map(|m| matrix_from_json(m, what)).collect()
    }

    pub fn into_points(self, what: &str) -> Result<Vec<Vec<f64>>, CliError> {
        self.points
            .ok_or_else(|| CliError::config(format!("{what}: missing \"points\" key")))
    }

    pub fn into_phases(self, what: &str) -> Result<Vec<f64>, CliError> {
        self.phases
            .ok_or_else(|| CliError::config(format!("{what}: missing \"phases\" key")))
    }
}

#[derive(Serialize, Deserialize)]
pub struct HamiltoniansJson {
    pub hamiltonians: Vec<MatrixJson>,
}

impl HamiltoniansJson {
    pub fn from_matrices(hams: &[ComplexMatrix]) -> HamiltoniansJson {
        HamiltoniansJson { hamiltonians: hams.iter().map(matrix_to_json).collect() }
    }

    pub fn into_matrices(self, what: &str) -> Result<Vec<ComplexMatrix>, CliError> {
        self.hamiltonians.iter().map(|m| matrix_from_json(m, what)).collect()
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| CliError::config(format!("cannot create {}: {e}", parent.display())))?;
        }
    }
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::config(format!("cannot serialize {}: {e}", path.display())))?;
    fs::write(path, text + "\n")
        .map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
pub struct MarginJson {
    pub condition: String,
    pub required: f64,
    pub actual: f64,
    pub slack: f64,
    pub kind: &'static str,
}

#[derive(Serialize)]
pub struct FrameworkReportJson {
    pub theorem: String,
    pub satisfied: bool,
    pub margins: Vec<MarginJson>,
}

pub fn framework_report_json(report: &FrameworkReport) -> FrameworkReportJson {
    FrameworkReportJson {
        theorem: report.theorem.as_str().to_string(),
        satisfied: report.satisfied,
        margins: report
            .margins
            .iter()
            .map(|m| MarginJson {
                condition: m.condition.clone(),
                required: m.required,
                actual: m.actual,
                slack: m.slack,
                kind: match m.kind {
                    MarginKind::Proven => "proven",
                    MarginKind::Heuristic => "heuristic",
                    MarginKind::Empirical => "empirical",
                },
            })
            .collect(),
    }
}
