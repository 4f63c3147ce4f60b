//! Reference integration of the continuous-time sphere and matrix flows.
//!
//! The right-hand sides are
//!
//!   sphere  x_i' = Omega_i x_i + kappa (x_c - <x_c, x_i> x_i)
//!   matrix  U_i' = (-i H_i + kappa Delta_i) U_i
//!
//! advanced by classical four-stage Runge-Kutta with periodic reprojection
//! onto the sphere or the unitary group. These trajectories serve as
//! oracles when measuring how far the discrete schemes drift from the flow
//! they approximate.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expm::project_unitary;
use crate::mat::ComplexMatrix;
use crate::sphere::SphereEnsemble;
use crate::thresholds::{check_framework, ConfigSummary, TheoremId};
use crate::unitary::{Scheme, UnitaryEnsemble};

/// Substep resolution and reprojection cadence of the reference solver.
#[derive(Clone, Copy, Debug)]
pub struct ContinuousRunConfig {
    /// RK4 substeps per unit of the ensemble step size h.
    pub substeps_per_h: usize,
    /// Reproject onto the manifold after this many substeps.
    pub reproject_every: usize,
}

impl Default for ContinuousRunConfig {
    fn default() -> Self {
        ContinuousRunConfig { substeps_per_h: 100, reproject_every: 1 }
    }
}

impl ContinuousRunConfig {
    fn validate(&self) -> Result<()> {
        if self.substeps_per_h == 0 {
            return Err(Error::InvalidArgument("substeps_per_h must be at least 1".into()));
        }
        if self.reproject_every == 0 {
            return Err(Error::InvalidArgument("reproject_every must be at least 1".into()));
        }
        Ok(())
    }
}

fn sphere_rhs_raw(
    points: &[Vec<f64>],
    omegas: Option<&[crate::mat::RealMatrix]>,
    kappa: f64,
) -> Vec<Vec<f64>> {
    let n = points.len();
    let dim = points[0].len();
    let mut center = vec![0.0_f64; dim];
    for p in points {
        for (cd, pd) in center.iter_mut().zip(p) {
            *cd += pd;
        }
    }
    for cd in &mut center {
        *cd /= n as f64;
    }
    points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut v = match omegas {
                Some(oms) => oms[i].matvec(p),
                None => vec![0.0; dim],
            };
            let cx: f64 = center.iter().zip(p).map(|(a, b)| a * b).sum();
            for d in 0..dim {
                v[d] += kappa * (center[d] - cx * p[d]);
            }
            v
        })
        .collect()
}

fn matrix_rhs_raw(
    matrices: &[ComplexMatrix],
    hamiltonians: &[ComplexMatrix],
    kappa: f64,
) -> Vec<ComplexMatrix> {
    let n = matrices.len();
    let dim = matrices[0].rows();
    let mut uc = ComplexMatrix::zeros(dim, dim);
    for u in matrices {
        uc = uc.add(u);
    }
    let uc = uc.scale_re(1.0 / n as f64);
    matrices
        .iter()
        .zip(hamiltonians)
        .map(|(u, ham)| {
            let delta = uc
                .matmul(&u.adjoint())
                .sub(&u.matmul(&uc.adjoint()))
                .scale_re(0.5);
            let coeff = ham.scale(Complex64::new(0.0, -1.0)).add(&delta.scale_re(kappa));
            coeff.matmul(u)
        })
        .collect()
}

/// Velocity field of the continuous sphere flow at the current state.
/// Tangent to the sphere at each point.
pub fn continuous_sphere_rhs(ens: &SphereEnsemble) -> Vec<Vec<f64>> {
    sphere_rhs_raw(ens.points(), ens.omegas(), ens.kappa())
}

/// Velocity field of the continuous matrix flow at the current state. The
/// coefficient -i H_i + kappa Delta_i is skew-Hermitian, so the field is
/// tangent to the unitary group.
pub fn continuous_matrix_rhs(ens: &UnitaryEnsemble) -> Vec<ComplexMatrix> {
    matrix_rhs_raw(ens.matrices(), ens.hamiltonians(), ens.kappa())
}

fn resolve_substeps(total_time: f64, h: f64, cfg: &ContinuousRunConfig) -> (usize, f64) {
    let dt_target = h / cfg.substeps_per_h as f64;
    let n = ((total_time / dt_target).round() as usize).max(1);
    (n, total_time / n as f64)
}

fn check_time(total_time: f64) -> Result<()> {
    if !(total_time.is_finite() && total_time >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "total_time must be finite and nonnegative, got {total_time}"
        )));
    }
    Ok(())
}

/// Integrates the sphere flow for `total_time` and returns the final
/// ensemble. The output is rejected if the accumulated distance from the
/// sphere exceeds 1e-11.
pub fn continuous_evolve_sphere(
    ens: &SphereEnsemble,
    total_time: f64,
    cfg: &ContinuousRunConfig,
) -> Result<SphereEnsemble> {
    cfg.validate()?;
    check_time(total_time)?;
    if total_time == 0.0 {
        return Ok(ens.clone());
    }
    let (nsub, dt) = resolve_substeps(total_time, ens.h(), cfg);
    let omegas = ens.omegas();
    let kappa = ens.kappa();
    let mut state: Vec<Vec<f64>> = ens.points().to_vec();
    for k in 0..nsub {
        let k1 = sphere_rhs_raw(&state, omegas, kappa);
        let s2 = sphere_saxpy(&state, &k1, 0.5 * dt);
        let k2 = sphere_rhs_raw(&s2, omegas, kappa);
        let s3 = sphere_saxpy(&state, &k2, 0.5 * dt);
        let k3 = sphere_rhs_raw(&s3, omegas, kappa);
        let s4 = sphere_saxpy(&state, &k3, dt);
        let k4 = sphere_rhs_raw(&s4, omegas, kappa);
        for (i, p) in state.iter_mut().enumerate() {
            for d in 0..p.len() {
                p[d] += dt / 6.0 * (k1[i][d] + 2.0 * k2[i][d] + 2.0 * k3[i][d] + k4[i][d]);
            }
        }
        if (k + 1) % cfg.reproject_every == 0 {
            for (i, p) in state.iter_mut().enumerate() {
                let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
                if !(norm.is_finite() && norm > 0.0) {
                    return Err(Error::BadPredictor { index: i, kind: "zero-norm" });
                }
                for x in p.iter_mut() {
                    *x /= norm;
                }
            }
        }
    }
    let defect = state
        .iter()
        .map(|p| (p.iter().map(|x| x * x).sum::<f64>().sqrt() - 1.0).abs())
        .fold(0.0, f64::max);
    if !defect.is_finite() || defect > 1e-11 {
        return Err(Error::StructureViolation {
            what: "sphere membership after continuous integration",
            defect,
            tol: 1e-11,
        });
    }
    SphereEnsemble::new(
        state,
        ens.omegas().map(|o| o.to_vec()),
        kappa,
        ens.h(),
    )
}

fn sphere_saxpy(base: &[Vec<f64>], dir: &[Vec<f64>], c: f64) -> Vec<Vec<f64>> {
    base.iter()
        .zip(dir)
        .map(|(b, d)| b.iter().zip(d).map(|(x, v)| x + c * v).collect())
        .collect()
}

/// Integrates the matrix flow for `total_time` and returns the final
/// ensemble. The output is rejected if the accumulated unitarity defect
/// exceeds 1e-11.
pub fn continuous_evolve_matrix(
    ens: &UnitaryEnsemble,
    total_time: f64,
    cfg: &ContinuousRunConfig,
) -> Result<UnitaryEnsemble> {
    cfg.validate()?;
    check_time(total_time)?;
    if total_time == 0.0 {
        return Ok(ens.clone());
    }
    let (nsub, dt) = resolve_substeps(total_time, ens.h(), cfg);
    let hams = ens.hamiltonians();
    let kappa = ens.kappa();
    let mut state: Vec<ComplexMatrix> = ens.matrices().to_vec();
    for k in 0..nsub {
        let k1 = matrix_rhs_raw(&state, hams, kappa);
        let s2 = matrix_saxpy(&state, &k1, 0.5 * dt);
        let k2 = matrix_rhs_raw(&s2, hams, kappa);
        let s3 = matrix_saxpy(&state, &k2, 0.5 * dt);
        let k3 = matrix_rhs_raw(&s3, hams, kappa);
        let s4 = matrix_saxpy(&state, &k3, dt);
        let k4 = matrix_rhs_raw(&s4, hams, kappa);
        state = state
            .iter()
            .enumerate()
            .map(|(i, u)| {
                let incr = k1[i]
                    .add(&k2[i].scale_re(2.0))
                    .add(&k3[i].scale_re(2.0))
                    .add(&k4[i])
                    .scale_re(dt / 6.0);
                u.add(&incr)
            })
            .collect();
        if (k + 1) % cfg.reproject_every == 0 {
            state = state
                .iter()
                .map(project_unitary)
                .collect::<Result<Vec<_>>>()?;
        }
    }
    let defect = state.iter().map(|u| u.unitarity_defect()).fold(0.0, f64::max);
    if !defect.is_finite() || defect > 1e-11 {
        return Err(Error::StructureViolation {
            what: "unitarity after continuous integration",
            defect,
            tol: 1e-11,
        });
    }
    UnitaryEnsemble::new(
        state,
        hams.to_vec(),
        kappa,
        ens.h(),
        ens.scheme(),
    )
}

fn matrix_saxpy(base: &[ComplexMatrix], dir: &[ComplexMatrix], c: f64) -> Vec<ComplexMatrix> {
    base.iter()
        .zip(dir)
        .map(|(b, d)| b.add(&d.scale_re(c)))
        .collect()
}

/// One row per step size: the sup over all steps of the relative-position
/// distance between the discrete trajectory and the reference flow sampled
/// on the same grid.
#[derive(Clone, Debug)]
pub struct UniformConvergenceResult {
    pub rows: Vec<(f64, f64)>,
    pub warnings: Vec<String>,
}

/// Runs the discrete scheme against the reference solver on a shared grid
/// for each step size, recording sup_n of the relative-position gap. Step
/// sizes must be positive and strictly decreasing, paired with a horizon in
/// steps. Hypothesis violations are reported as warnings, not errors.
pub fn uniform_convergence_experiment(
    ens: &UnitaryEnsemble,
    scheme: Scheme,
    hs: &[f64],
    horizons: &[usize],
    cfg: &ContinuousRunConfig,
) -> Result<UniformConvergenceResult> {
    cfg.validate()?;
    if hs.is_empty() || hs.len() != horizons.len() {
        return Err(Error::InvalidArgument(format!(
            "need matching nonempty step and horizon lists, got {} and {}",
            hs.len(),
            horizons.len()
        )));
    }
    for w in hs.windows(2) {
        if !(w[1] > 0.0 && w[1] < w[0]) {
            return Err(Error::InvalidArgument(
                "step sizes must be positive and strictly decreasing".into(),
            ));
        }
    }
    if !(hs[0].is_finite() && hs[0] > 0.0) {
        return Err(Error::InvalidArgument("step sizes must be positive".into()));
    }

    let mut rows = Vec::with_capacity(hs.len());
    let mut warnings = Vec::new();
    for (&h, &steps) in hs.iter().zip(horizons) {
        let discrete0 = ens.with_scheme(scheme).with_step(h)?;
        let kappa = discrete0.kappa();
        let summary = ConfigSummary {
            beta: kappa * h,
            diameter0: Some(discrete0.diameter()),
            dh_over_kappa: if kappa > 0.0 {
                Some(discrete0.hamiltonian_diameter() / kappa)
            } else {
                None
            },
            ..ConfigSummary::default()
        };
        let report = check_framework(TheoremId::T6_2, &summary);
        if !report.satisfied {
            for row in report.margins.iter().filter(|r| r.slack < 0.0) {
                warnings.push(format!(
                    "h = {h}: hypothesis violated: {} (required {}, actual {})",
                    row.condition, row.required, row.actual
                ));
            }
        }
        let mut discrete = discrete0.clone();
        let mut reference = discrete0.clone();
        let mut sup = 0.0_f64;
        for _ in 0..steps {
            discrete = discrete.step()?;
            reference = continuous_evolve_matrix(&reference, h, cfg)?;
            sup = sup.max(discrete.relative_position_distance(&reference)?);
        }
        rows.push((h, sup));
    }
    Ok(UniformConvergenceResult { rows, warnings })
}
