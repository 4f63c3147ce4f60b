//! Seeded experiment execution: build the initial state from a config,
//! advance it step by step, and persist the requested artifacts.

use std::path::PathBuf;
use std::time::Instant;

use lohe_core::continuous::{continuous_evolve_matrix, continuous_evolve_sphere, ContinuousRunConfig};
use lohe_core::kuramoto::{kuramoto_step, PhaseUpdate};
use lohe_core::random::{
    haar_unitary_with, hermitian_zero_sum_with, rng_from_seed, skew_hermitian_with, unit_vector_with,
};
use lohe_core::sphere::SphereEnsemble;
use lohe_core::thresholds::{check_framework, ConfigSummary, TheoremId};
use lohe_core::unitary::{Scheme, UnitaryEnsemble};
use lohe_core::ComplexMatrix;

use crate::config::{ExperimentConfig, HamiltonianKind, InitKind, Model, OutputKind};
use crate::output::{
    fmt_float, framework_report_json, read_json, write_json, CsvFile, HamiltoniansJson, StateJson,
};
use crate::CliError;

/// Oscillator phases with their natural frequencies; the 1-dimensional
/// state family.
#[derive(Clone, Debug)]
pub struct PhaseState {
    pub thetas: Vec<f64>,
    pub nus: Vec<f64>,
    pub kappa: f64,
    pub h: f64,
}

#[derive(Clone, Debug)]
pub enum ModelState {
    Sphere(SphereEnsemble),
    Matrix(UnitaryEnsemble),
    Phases(PhaseState),
}

impl ModelState {
    pub fn diameter(&self) -> f64 {
        match self {
            ModelState::Sphere(ens) => ens.diagnostics(0).diameter,
            ModelState::Matrix(ens) => ens.diameter(),
            ModelState::Phases(ps) => phase_diameter(&ps.thetas),
        }
    }

    pub fn as_matrix(&self) -> Option<&UnitaryEnsemble> {
        match self {
            ModelState::Matrix(ens) => Some(ens),
            _ => None,
        }
    }
}

fn phase_diameter(thetas: &[f64]) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..thetas.len() {
        for j in i + 1..thetas.len() {
            worst = worst.max(2.0 * (0.5 * (thetas[i] - thetas[j])).sin().abs());
        }
    }
    worst
}

fn phase_min_pair_inner(thetas: &[f64]) -> f64 {
    let mut min = 1.0_f64;
    for i in 0..thetas.len() {
        for j in i + 1..thetas.len() {
            min = min.min((thetas[i] - thetas[j]).cos());
        }
    }
    min
}

fn phase_order_parameter(thetas: &[f64]) -> f64 {
    let n = thetas.len() as f64;
    let re: f64 = thetas.iter().map(|t| t.cos()).sum::<f64>() / n;
    let im: f64 = thetas.iter().map(|t| t.sin()).sum::<f64>() / n;
    re.hypot(im)
}

/// Uniform angle in (-pi, pi], derived from a uniform direction on the
/// circle so the whole harness draws from one seeded generator type.
fn uniform_angle(rng: &mut lohe_core::random::ChaCha8Rng) -> f64 {
    let v = unit_vector_with(2, rng);
    v[1].atan2(v[0])
}

pub fn scheme_of(model: Model) -> Option<Scheme> {
    match model {
        Model::DlmA => Some(Scheme::SingleExponent),
        Model::DlmB => Some(Scheme::LieTrotter),
        Model::DlmC => Some(Scheme::Strang),
        Model::ContinuousMatrix => Some(Scheme::SingleExponent),
        _ => None,
    }
}

pub fn build_initial_state(cfg: &ExperimentConfig) -> Result<ModelState, CliError> {
    let mut rng = rng_from_seed(cfg.seed);
    let init = cfg.init_kind()?;
    let ham = cfg.hamiltonian_kind()?;
    match cfg.model {
        Model::Sphere | Model::ContinuousSphere => {
            let points = match init {
                InitKind::Random => (0..cfg.n).map(|_| unit_vector_with(cfg.d, &mut rng)).collect(),
                InitKind::Consensus => {
                    let p = unit_vector_with(cfg.d, &mut rng);
                    vec![p; cfg.n]
                }
                InitKind::NearConsensus { radius } => {
                    let pole = unit_vector_with(cfg.d, &mut rng);
                    (0..cfg.n)
                        .map(|_| {
                            let dir = unit_vector_with(cfg.d, &mut rng);
                            let raw: Vec<f64> = pole
                                .iter()
                                .zip(&dir)
                                .map(|(p, u)| p + radius * u)
                                .collect();
                            let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
                            raw.into_iter().map(|x| x / norm).collect()
                        })
                        .collect()
                }
                InitKind::Explicit { file } => {
                    read_json::<StateJson>(&file)?.into_points(&file.display().to_string())?
                }
            };
            SphereEnsemble::new(points, None, cfg.kappa, cfg.h)
                .map(ModelState::Sphere)
                .map_err(|e| CliError::config(format!("invalid initial state: {e}")))
        }
        Model::DlmA | Model::DlmB | Model::DlmC | Model::ContinuousMatrix => {
            let matrices: Vec<ComplexMatrix> = match init {
                InitKind::Random => (0..cfg.n).map(|_| haar_unitary_with(cfg.d, &mut rng)).collect(),
                InitKind::Consensus => {
                    let u = haar_unitary_with(cfg.d, &mut rng);
                    vec![u; cfg.n]
                }
                InitKind::NearConsensus { radius } => {
                    let base = haar_unitary_with(cfg.d, &mut rng);
                    (0..cfg.n)
                        .map(|_| {
                            let gen = skew_hermitian_with(cfg.d, radius, &mut rng);
                            lohe_core::expm::expm_skew_hermitian(&gen)
                                .map(|e| e.matmul(&base))
                                .map_err(|e| CliError::config(format!("initial perturbation failed: {e}")))
                        })
                        .collect::<Result<_, _>>()?
                }
                InitKind::Explicit { file } => {
                    read_json::<StateJson>(&file)?.into_matrices(&file.display().to_string())?
                }
            };
            let hams = match ham {
                HamiltonianKind::Zero => vec![ComplexMatrix::zeros(cfg.d, cfg.d); cfg.n],
                HamiltonianKind::RandomZeroSum { scale } => {
                    hermitian_zero_sum_with(cfg.d, cfg.n, scale, &mut rng)
                }
                HamiltonianKind::Explicit { file } => {
                    read_json::<HamiltoniansJson>(&file)?.into_matrices(&file.display().to_string())?
                }
            };
            let scheme = scheme_of(cfg.model).expect("matrix model");
            UnitaryEnsemble::new(matrices, hams, cfg.kappa, cfg.h, scheme)
                .map(ModelState::Matrix)
                .map_err(|e| CliError::config(format!("invalid initial state: {e}")))
        }
        Model::Kuramoto => {
            let thetas: Vec<f64> = match init {
                InitKind::Random => (0..cfg.n).map(|_| uniform_angle(&mut rng)).collect(),
                InitKind::Consensus => {
                    let t = uniform_angle(&mut rng);
                    vec![t; cfg.n]
                }
                InitKind::NearConsensus { radius } => {
                    let base = uniform_angle(&mut rng);
                    (0..cfg.n)
                        .map(|_| base + radius * uniform_angle(&mut rng) / std::f64::consts::PI)
                        .collect()
                }
                InitKind::Explicit { file } => {
                    read_json::<StateJson>(&file)?.into_phases(&file.display().to_string())?
                }
            };
            if thetas.len() != cfg.n || thetas.iter().any(|t| !t.is_finite()) {
                return Err(CliError::config("initial phases must be N finite reals"));
            }
            let nus: Vec<f64> = match ham {
                HamiltonianKind::Zero => vec![0.0; cfg.n],
                HamiltonianKind::RandomZeroSum { scale } => {
                    hermitian_zero_sum_with(1, cfg.n, scale, &mut rng)
                        .iter()
                        .map(|m| m[(0, 0)].re)
                        .collect()
                }
                HamiltonianKind::Explicit { file } => {
                    let mats = read_json::<HamiltoniansJson>(&file)?
                        .into_matrices(&file.display().to_string())?;
                    if mats.iter().any(|m| m.rows() != 1 || m.cols() != 1) {
                        return Err(CliError::config(
                            "kuramoto hamiltonians must be 1x1 matrices",
                        ));
                    }
                    mats.iter().map(|m| m[(0, 0)].re).collect()
                }
            };
            if nus.len() != cfg.n {
                return Err(CliError::config(format!(
                    "expected {} natural frequencies, got {}",
                    cfg.n,
                    nus.len()
                )));
            }
            Ok(ModelState::Phases(PhaseState { thetas, nus, kappa: cfg.kappa, h: cfg.h }))
        }
    }
}

fn advance(state: &ModelState, model: Model) -> Result<ModelState, lohe_core::Error> {
    let reference_cfg = ContinuousRunConfig::default();
    match (state, model) {
        (ModelState::Sphere(ens), Model::Sphere) => ens.step().map(ModelState::Sphere),
        (ModelState::Sphere(ens), Model::ContinuousSphere) => {
            continuous_evolve_sphere(ens, ens.h(), &reference_cfg).map(ModelState::Sphere)
        }
        (ModelState::Matrix(ens), Model::DlmA | Model::DlmB | Model::DlmC) => {
            ens.step().map(ModelState::Matrix)
        }
        (ModelState::Matrix(ens), Model::ContinuousMatrix) => {
            continuous_evolve_matrix(ens, ens.h(), &reference_cfg).map(ModelState::Matrix)
        }
        (ModelState::Phases(ps), Model::Kuramoto) => {
            let thetas = kuramoto_step(&ps.thetas, &ps.nus, ps.kappa, ps.h, PhaseUpdate::Arctan);
            Ok(ModelState::Phases(PhaseState { thetas, ..ps.clone() }))
        }
        _ => unreachable!("state family checked at construction"),
    }
}

fn csv_header(model: Model) -> &'static str {
    if model.is_matrix() {
        "n,diameter,unitarity_defect,wall_clock_ns"
    } else {
        "n,diameter,rho,min_pair_inner,wall_clock_ns"
    }
}

fn csv_row(state: &ModelState, n: usize, wall_clock_ns: u128) -> Vec<String> {
    match state {
        ModelState::Sphere(ens) => {
            let diag = ens.diagnostics(n);
            vec![
                n.to_string(),
                fmt_float(diag.diameter),
                fmt_float(diag.rho),
                fmt_float(diag.min_pair_inner),
                wall_clock_ns.to_string(),
            ]
        }
        ModelState::Matrix(ens) => vec![
            n.to_string(),
            fmt_float(ens.diameter()),
            fmt_float(ens.unitarity_defect()),
            wall_clock_ns.to_string(),
        ],
        ModelState::Phases(ps) => vec![
            n.to_string(),
            fmt_float(phase_diameter(&ps.thetas)),
            fmt_float(phase_order_parameter(&ps.thetas)),
            fmt_float(phase_min_pair_inner(&ps.thetas)),
            wall_clock_ns.to_string(),
        ],
    }
}

pub fn config_summary(cfg: &ExperimentConfig, state: &ModelState) -> ConfigSummary {
    let beta = cfg.kappa * cfg.h;
    let mut summary = ConfigSummary {
        beta,
        diameter0: Some(state.diameter()),
        alpha: cfg.alpha,
        epsilon: cfg.epsilon,
        growth_constant: cfg.growth_constant,
        ..ConfigSummary::default()
    };
    match state {
        ModelState::Sphere(ens) => {
            summary.min_pair_inner0 = Some(ens.diagnostics(0).min_pair_inner);
            summary.dh_over_kappa = Some(0.0);
            summary.ham_sum_defect = Some(0.0);
        }
        ModelState::Matrix(ens) => {
            if cfg.kappa > 0.0 {
                summary.dh_over_kappa = Some(ens.hamiltonian_diameter() / cfg.kappa);
            }
            summary.ham_sum_defect = Some(ens.hamiltonian_sum_defect());
        }
        ModelState::Phases(ps) => {
            summary.min_pair_inner0 = Some(phase_min_pair_inner(&ps.thetas));
            let mut dh = 0.0_f64;
            for i in 0..ps.nus.len() {
                for j in i + 1..ps.nus.len() {
                    dh = dh.max((ps.nus[i] - ps.nus[j]).abs());
                }
            }
            if cfg.kappa > 0.0 {
                summary.dh_over_kappa = Some(dh / cfg.kappa);
            }
            summary.ham_sum_defect = Some(ps.nus.iter().sum::<f64>().abs());
        }
    }
    summary
}

fn final_state_json(model: Model, state: &ModelState) -> StateJson {
    match state {
        ModelState::Sphere(ens) => StateJson::from_points(model.as_str(), ens.points()),
        ModelState::Matrix(ens) => StateJson::from_matrices(model.as_str(), ens.matrices()),
        ModelState::Phases(ps) => StateJson::from_phases(&ps.thetas),
    }
}

pub struct RunArtifacts {
    pub final_state: ModelState,
    pub diagnostics_path: Option<PathBuf>,
    pub final_state_path: Option<PathBuf>,
    pub framework_report_path: Option<PathBuf>,
}

fn ensure_out_dir(cfg: &ExperimentConfig) -> Result<(), CliError> {
    if cfg.outputs.is_empty() {
        return Ok(());
    }
    std::fs::create_dir_all(cfg.out_dir())
        .map_err(|e| CliError::config(format!("cannot create {}: {e}", cfg.out_dir().display())))
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunArtifacts, CliError> {
    cfg.validate()?;
    let mut state = build_initial_state(cfg)?;
    ensure_out_dir(cfg)?;

    let mut framework_report_path = None;
    if cfg.outputs.contains(&OutputKind::FrameworkReportJson) {
        let name = cfg.theorem.as_deref().expect("validated");
        let theorem = TheoremId::parse(name).expect("validated");
        let report = check_framework(theorem, &config_summary(cfg, &state));
        let path = cfg.out_dir().join("framework_report.json");
        write_json(&path, &framework_report_json(&report))?;
        framework_report_path = Some(path);
    }

    let mut csv = None;
    let mut diagnostics_path = None;
    if cfg.outputs.contains(&OutputKind::DiagnosticsCsv) {
        let path = cfg.out_dir().join("diagnostics.csv");
        let mut file = CsvFile::create(&path, csv_header(cfg.model))?;
        file.row(&csv_row(&state, 0, 0))?;
        csv = Some(file);
        diagnostics_path = Some(path);
    }

    for n in 1..=cfg.steps {
        let started = Instant::now();
        match advance(&state, cfg.model) {
            Ok(next) => state = next,
            Err(e) => {
                if let Some(mut file) = csv.take() {
                    file.trailer(&format!("step {n}: {e}"))?;
                    file.finish()?;
                }
                return Err(CliError::numerical(format!("step {n}: {e}")));
            }
        }
        let ns = if cfg.timing { started.elapsed().as_nanos() } else { 0 };
        if let Some(file) = csv.as_mut() {
            file.row(&csv_row(&state, n, ns))?;
        }
    }
    if let Some(file) = csv.take() {
        file.finish()?;
    }

    let mut final_state_path = None;
    if cfg.outputs.contains(&OutputKind::FinalStateJson) {
        let path = cfg.out_dir().join("final_state.json");
        write_json(&path, &final_state_json(cfg.model, &state))?;
        final_state_path = Some(path);
    }

    Ok(RunArtifacts { final_state: state, diagnostics_path, final_state_path, framework_report_path })
}

pub struct PairArtifacts {
    /// d(A, B) per step, index 0 holding the initial distance.
    pub distances: Vec<f64>,
    pub diagnostics_path: Option<PathBuf>,
    pub framework_report_path: Option<PathBuf>,
}

pub fn pair_run(cfg_a: &ExperimentConfig, cfg_b: &ExperimentConfig) -> Result<PairArtifacts, CliError> {
    cfg_a.validate()?;
    cfg_b.validate()?;
    for (cfg, which) in [(cfg_a, "config-a"), (cfg_b, "config-b")] {
        if !matches!(cfg.model, Model::DlmA | Model::DlmB | Model::DlmC) {
            return Err(CliError::config(format!(
                "{which}: paired runs need a discrete matrix model, got {}",
                cfg.model.as_str()
            )));
        }
    }
    if cfg_a.model != cfg_b.model || cfg_a.d != cfg_b.d || cfg_a.n != cfg_b.n {
        return Err(CliError::config("paired configs must share model, d, and N"));
    }
    if cfg_a.steps != cfg_b.steps {
        return Err(CliError::config("paired configs must share steps"));
    }

    let state_a = build_initial_state(cfg_a)?;
    let state_b = build_initial_state(cfg_b)?;
    ensure_out_dir(cfg_a)?;
    let (mut a, mut b) = match (state_a, state_b) {
        (ModelState::Matrix(a), ModelState::Matrix(b)) => (a, b),
        _ => unreachable!("model checked above"),
    };

    let mut framework_report_path = None;
    if cfg_a.outputs.contains(&OutputKind::FrameworkReportJson) {
        let name = cfg_a.theorem.as_deref().expect("validated");
        let theorem = TheoremId::parse(name).expect("validated");
        let mut summary = config_summary(cfg_a, &ModelState::Matrix(a.clone()));
        summary.diameter0_partner = Some(b.diameter());
        let report = check_framework(theorem, &summary);
        let path = cfg_a.out_dir().join("framework_report.json");
        write_json(&path, &framework_report_json(&report))?;
        framework_report_path = Some(path);
    }

    let mut csv = None;
    let mut diagnostics_path = None;
    if cfg_a.outputs.contains(&OutputKind::DiagnosticsCsv) {
        let path = cfg_a.out_dir().join("pair_diagnostics.csv");
        csv = Some(CsvFile::create(
            &path,
            "n,relative_distance,diameter_a,diameter_b,wall_clock_ns",
        )?);
        diagnostics_path = Some(path);
    }

    let initial = a
        .relative_position_distance(&b)
        .map_err(|e| CliError::config(format!("paired states incompatible: {e}")))?;
    let mut distances = vec![initial];
    if let Some(file) = csv.as_mut() {
        file.row(&[
            "0".to_string(),
            fmt_float(initial),
            fmt_float(a.diameter()),
            fmt_float(b.diameter()),
            "0".to_string(),
        ])?;
    }

    for n in 1..=cfg_a.steps {
        let started = Instant::now();
        let stepped = a.step().and_then(|na| b.step().map(|nb| (na, nb)));
        match stepped {
            Ok((na, nb)) => {
                a = na;
                b = nb;
            }
            Err(e) => {
                if let Some(mut file) = csv.take() {
                    file.trailer(&format!("step {n}: {e}"))?;
                    file.finish()?;
                }
                return Err(CliError::numerical(format!("step {n}: {e}")));
            }
        }
        let d = a
            .relative_position_distance(&b)
            .map_err(|e| CliError::numerical(format!("step {n}: {e}")))?;
        distances.push(d);
        let ns = if cfg_a.timing { started.elapsed().as_nanos() } else { 0 };
        if let Some(file) = csv.as_mut() {
            file.row(&[
                n.to_string(),
                fmt_float(d),
                fmt_float(a.diameter()),
                fmt_float(b.diameter()),
                ns.to_string(),
            ])?;
        }
    }
    if let Some(file) = csv.take() {
        file.finish()?;
    }

    Ok(PairArtifacts { distances, diagnostics_path, framework_report_path })
}
