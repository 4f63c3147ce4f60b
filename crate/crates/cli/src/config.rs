//! Experiment configuration: a single TOML document, fully validated before
//! any computation runs. Unknown keys anywhere are rejected.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Sphere,
    DlmA,
    DlmB,
    DlmC,
    Kuramoto,
    ContinuousSphere,
    ContinuousMatrix,
}

impl Model {
    pub fn as_str(&self) -> &'static str {
        match self {
            Model::Sphere => "sphere",
            Model::DlmA => "dlm-a",
            Model::DlmB => "dlm-b",
            Model::DlmC => "dlm-c",
            Model::Kuramoto => "kuramoto",
            Model::ContinuousSphere => "continuous-sphere",
            Model::ContinuousMatrix => "continuous-matrix",
        }
    }

    pub fn is_matrix(&self) -> bool {
        matches!(self, Model::DlmA | Model::DlmB | Model::DlmC | Model::ContinuousMatrix)
    }

    pub fn is_sphere(&self) -> bool {
        matches!(self, Model::Sphere | Model::ContinuousSphere)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputKind {
    DiagnosticsCsv,
    FinalStateJson,
    FrameworkReportJson,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitConfig {
    pub kind: String,
    pub radius: Option<f64>,
    pub file: Option<PathBuf>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianConfig {
    pub kind: String,
    pub scale: Option<f64>,
    pub file: Option<PathBuf>,
}

/// Initial-state selection after validation.
#[derive(Clone, Debug, PartialEq)]
pub enum InitKind {
    Random,
    Consensus,
    NearConsensus { radius: f64 },
    Explicit { file: PathBuf },
}

/// Hamiltonian selection after validation.
#[derive(Clone, Debug, PartialEq)]
pub enum HamiltonianKind {
    Zero,
    RandomZeroSum { scale: f64 },
    Explicit { file: PathBuf },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: Model,
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub kappa: f64,
    pub h: f64,
    pub steps: usize,
    pub seed: u64,
    pub init: Option<InitConfig>,
    pub hamiltonians: Option<HamiltonianConfig>,
    #[serde(default)]
    pub outputs: Vec<OutputKind>,
    pub out_dir: Option<PathBuf>,
    pub theorem: Option<String>,
    pub alpha: Option<f64>,
    pub epsilon: Option<f64>,
    pub growth_constant: Option<f64>,
    #[serde(default)]
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn init_kind(&self) -> Result<InitKind, CliError> {
        let spec = match &self.init {
            None => return Ok(InitKind::Random),
            Some(s) => s,
        };
        match spec.kind.as_str() {
            "random" | "consensus" => {
                if spec.radius.is_some() || spec.file.is_some() {
                    return Err(CliError::config(format!(
                        "init.kind = \"{}\" takes neither init.radius nor init.file",
                        spec.kind
                    )));
                }
                Ok(if spec.kind == "random" { InitKind::Random } else { InitKind::Consensus })
            }
            "near-consensus" => {
                if spec.file.is_some() {
                    return Err(CliError::config("init.file is only valid with init.kind = \"explicit\""));
                }
                let radius = spec.radius.ok_or_else(|| {
                    CliError::config("init.kind = \"near-consensus\" requires init.radius")
                })?;
                if !(radius.is_finite() && radius > 0.0) {
                    return Err(CliError::config(format!(
                        "init.radius must be finite and positive, got {radius}"
                    )));
                }
                Ok(InitKind::NearConsensus { radius })
            }
            "explicit" => {
                if spec.radius.is_some() {
                    return Err(CliError::config("init.radius is only valid with init.kind = \"near-consensus\""));
                }
                let file = spec.file.clone().ok_or_else(|| {
                    CliError::config("init.kind = \"explicit\" requires init.file")
                })?;
                Ok(InitKind::Explicit { file })
            }
            other => Err(CliError::config(format!(
                "init.kind must be one of random, consensus, near-consensus, explicit; got \"{other}\""
            ))),
        }
    }

    pub fn hamiltonian_kind(&self) -> Result<HamiltonianKind, CliError> {
        let spec = match &self.hamiltonians {
            None => return Ok(HamiltonianKind::Zero),
            Some(s) => s,
        };
        match spec.kind.as_str() {
            "zero" => {
                if spec.scale.is_some() || spec.file.is_some() {
                    return Err(CliError::config(
                        "hamiltonians.kind = \"zero\" takes neither hamiltonians.scale nor hamiltonians.file",
                    ));
                }
                Ok(HamiltonianKind::Zero)
            }
            "random-zero-sum" => {
                if spec.file.is_some() {
                    return Err(CliError::config(
                        "hamiltonians.file is only valid with hamiltonians.kind = \"explicit\"",
                    ));
                }
                let scale = spec.scale.ok_or_else(|| {
                    CliError::config("hamiltonians.kind = \"random-zero-sum\" requires hamiltonians.scale")
                })?;
                if !(scale.is_finite() && scale > 0.0) {
                    return Err(CliError::config(format!(
                        "hamiltonians.scale must be finite and positive, got {scale}"
                    )));
                }
                Ok(HamiltonianKind::RandomZeroSum { scale })
            }
            "explicit" => {
                if spec.scale.is_some() {
                    return Err(CliError::config(
                        "hamiltonians.scale is only valid with hamiltonians.kind = \"random-zero-sum\"",
                    ));
                }
                let file = spec.file.clone().ok_or_else(|| {
                    CliError::config("hamiltonians.kind = \"explicit\" requires hamiltonians.file")
                })?;
                Ok(HamiltonianKind::Explicit { file })
            }
            other => Err(CliError::config(format!(
                "hamiltonians.kind must be one of zero, random-zero-sum, explicit; got \"{other}\""
            ))),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.d == 0 {
            return Err(CliError::config("d must be a positive integer"));
        }
        if self.model.is_sphere() && self.d < 2 {
            return Err(CliError::config("d must be at least 2 for sphere models"));
        }
        if self.model == Model::Kuramoto && self.d != 1 {
            return Err(CliError::config("d must be 1 for the kuramoto model"));
        }
        if self.n == 0 {
            return Err(CliError::config("N must be a positive integer"));
        }
        if !(self.kappa.is_finite() && self.kappa >= 0.0) {
            return Err(CliError::config(format!(
                "kappa must be finite and nonnegative, got {}",
                self.kappa
            )));
        }
        if !(self.h.is_finite() && self.h > 0.0) {
            return Err(CliError::config(format!("h must be finite and positive, got {}", self.h)));
        }
        if self.steps == 0 {
            return Err(CliError::config("steps must be a positive integer"));
        }
        self.init_kind()?;
        let ham = self.hamiltonian_kind()?;
        if self.model.is_sphere() && ham != HamiltonianKind::Zero {
            return Err(CliError::config(
                "sphere models run without rotations; hamiltonians must be absent or zero",
            ));
        }
        if let Some(name) = &self.theorem {
            if lohe_core::thresholds::TheoremId::parse(name).is_none() {
                return Err(CliError::config(format!("theorem \"{name}\" is not recognized")));
            }
        }
        if self.outputs.contains(&OutputKind::FrameworkReportJson) && self.theorem.is_none() {
            return Err(CliError::config(
                "outputs include framework-report-json but no theorem is named",
            ));
        }
        if let Some(alpha) = self.alpha {
            if !(alpha.is_finite() && alpha > 0.0) {
                return Err(CliError::config(format!(
                    "alpha must be finite and positive, got {alpha}"
                )));
            }
        }
        Ok(())
    }

    pub fn out_dir(&self) -> &Path {
        self.out_dir.as_deref().unwrap_or(Path::new("."))
    }
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let config: ExperimentConfig = toml::from_str(&text)
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    config.validate()?;
    Ok(config)
}
