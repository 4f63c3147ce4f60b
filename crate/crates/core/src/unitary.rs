//! Coupled unitary matrices driven by free Hamiltonian rotation and
//! centroid aggregation (the Lohe matrix model), advanced by one of three
//! exponential splitting schemes.
//!
//! With U_c the centroid and Delta_i = (U_c U_i^* - U_i U_c^*) / 2, one step
//! maps U_i to
//!
//!   single exponent  exp(-i h H_i + kappa h Delta_i) U_i
//!   Lie-Trotter      exp(-i h H_i) exp(kappa h Delta_i) U_i
//!   Strang           exp(-i h H_i / 2) exp(kappa h Delta_i) exp(-i h H_i / 2) U_i
//!
//! All three stay on the unitary group by construction and coincide when
//! the Hamiltonians vanish. Every agent reads the same centroid, so the
//! update is synchronous and independent of evaluation order.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::try_map_agents;
use crate::expm::expm_skew_hermitian;
use crate::kuramoto::{kuramoto_step, wrap_angle, PhaseUpdate};
use crate::mat::ComplexMatrix;

/// Exponent factorization used by one step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// Both generators inside one exponential.
    SingleExponent,
    /// Free factor times coupling factor.
    LieTrotter,
    /// Coupling factor sandwiched between free half-steps.
    Strang,
}

#[derive(Clone, Debug)]
pub struct UnitaryEnsemble {
    dim: usize,
    matrices: Vec<ComplexMatrix>,
    hamiltonians: Vec<ComplexMatrix>,
    kappa: f64,
    h: f64,
    scheme: Scheme,
}

/// Scalar functionals of one ensemble snapshot.
#[derive(Clone, Copy, Debug)]
pub struct MatrixDiagnostics {
    pub n: usize,
    /// Largest pairwise Frobenius distance, in [0, 2 sqrt(d)].
    pub diameter: f64,
    /// Largest pairwise Frobenius distance of the Hamiltonians.
    pub hamiltonian_diameter: f64,
    /// Largest unitarity defect over the ensemble.
    pub unitarity_defect: f64,
    /// kappa * h.
    pub beta: f64,
}

impl UnitaryEnsemble {
    pub fn new(
        matrices: Vec<ComplexMatrix>,
        hamiltonians: Vec<ComplexMatrix>,
        kappa: f64,
        h: f64,
        scheme: Scheme,
    ) -> Result<Self> {
        let n = matrices.len();
        if n == 0 {
            return Err(Error::InvalidArgument("ensemble needs at least one agent".into()));
        }
        if hamiltonians.len() != n {
            return Err(Error::ShapeMismatch {
                expected: format!("{n} hamiltonians"),
                got: format!("{}", hamiltonians.len()),
            });
        }
        let dim = matrices[0].rows();
        if dim == 0 {
            return Err(Error::InvalidArgument("matrix dimension must be positive".into()));
        }
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(Error::InvalidArgument(format!("kappa must be finite and >= 0, got {kappa}")));
        }
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidArgument(format!("h must be finite and positive, got {h}")));
        }
        for (i, u) in matrices.iter().enumerate() {
            if u.rows() != dim || u.cols() != dim {
                return Err(Error::ShapeMismatch {
                    expected: format!("{dim}x{dim} unitary"),
                    got: format!("agent {i} has {}x{}", u.rows(), u.cols()),
                });
            }
            if !u.is_finite() {
                return Err(Error::NonFinite { place: "ensemble matrix" });
            }
            let defect = u.unitarity_defect();
            if defect > 1e-10 * dim as f64 {
                return Err(Error::StructureViolation {
                    what: "unitarity of an ensemble matrix",
                    defect,
                    tol: 1e-10 * dim as f64,
                });
            }
        }
        for (i, ham) in hamiltonians.iter().enumerate() {
            if ham.rows() != dim || ham.cols() != dim {
                return Err(Error::ShapeMismatch {
                    expected: format!("{dim}x{dim} hamiltonian"),
                    got: format!("agent {i} has {}x{}", ham.rows(), ham.cols()),
                });
            }
            if !ham.is_finite() {
                return Err(Error::NonFinite { place: "hamiltonian" });
            }
            let defect = ham.hermitian_defect();
            if defect > 1e-12 * ham.frobenius_norm().max(1.0) {
                return Err(Error::StructureViolation {
                    what: "hermiticity of a hamiltonian",
                    defect,
                    tol: 1e-12 * ham.frobenius_norm().max(1.0),
                });
            }
        }
        Ok(UnitaryEnsemble { dim, matrices, hamiltonians, kappa, h, scheme })
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn beta(&self) -> f64 {
        self.kappa * self.h
    }

    pub fn matrix(&self, i: usize) -> &ComplexMatrix {
        &self.matrices[i]
    }

    pub fn matrices(&self) -> &[ComplexMatrix] {
        &self.matrices
    }

    pub fn hamiltonian(&self, i: usize) -> &ComplexMatrix {
        &self.hamiltonians[i]
    }

    pub fn hamiltonians(&self) -> &[ComplexMatrix] {
        &self.hamiltonians
    }

    /// Same states and parameters, different step size.
    pub fn with_step(&self, h: f64) -> Result<Self> {
        UnitaryEnsemble::new(
            self.matrices.clone(),
            self.hamiltonians.clone(),
            self.kappa,
            h,
            self.scheme,
        )
    }

    /// Same states and parameters, different scheme.
    pub fn with_scheme(&self, scheme: Scheme) -> Self {
        let mut out = self.clone();
        out.scheme = scheme;
        out
    }

    /// Centroid (1/N) sum U_j, accumulated in agent order.
    pub fn centroid(&self) -> ComplexMatrix {
        let mut sum = ComplexMatrix::zeros(self.dim, self.dim);
        for u in &self.matrices {
            sum = sum.add(u);
        }
        sum.scale_re(1.0 / self.matrices.len() as f64)
    }

    /// Coupling generator Delta_i = (U_c U_i^* - U_i U_c^*) / 2. Skew-
    /// Hermitian with operator norm at most |U_c|_op <= 1.
    pub fn coupling_delta(&self, i: usize) -> ComplexMatrix {
        let uc = self.centroid();
        delta_from_centroid(&uc, &self.matrices[i])
    }

    /// One synchronous step of the configured scheme. The centroid is read
    /// once at the start; each agent is then advanced independently.
    pub fn step(&self) -> Result<Self> {
        let uc = self.centroid();
        let g = self.kappa * self.h;
        let matrices = try_map_agents(self.matrices.len(), |i| {
            let u = &self.matrices[i];
            let delta = delta_from_centroid(&uc, u).scale_re(g);
            match self.scheme {
                Scheme::SingleExponent => {
                    let exponent = self.hamiltonians[i]
                        .scale(Complex64::new(0.0, -self.h))
                        .add(&delta);
                    Ok(expm_skew_hermitian(&exponent)?.matmul(u))
                }
                Scheme::LieTrotter => {
                    let free = expm_skew_hermitian(
                        &self.hamiltonians[i].scale(Complex64::new(0.0, -self.h)),
                    )?;
                    let coupling = expm_skew_hermitian(&delta)?;
                    Ok(free.matmul(&coupling.matmul(u)))
                }
                Scheme::Strang => {
                    let half = expm_skew_hermitian(
                        &self.hamiltonians[i].scale(Complex64::new(0.0, -0.5 * self.h)),
                    )?;
                    let coupling = expm_skew_hermitian(&delta)?;
                    Ok(half.matmul(&coupling.matmul(&half.matmul(u))))
                }
            }
        })?;
        Ok(UnitaryEnsemble {
            dim: self.dim,
            matrices,
            hamiltonians: self.hamiltonians.clone(),
            kappa: self.kappa,
            h: self.h,
            scheme: self.scheme,
        })
    }

    /// Largest pairwise Frobenius distance of the states.
    pub fn diameter(&self) -> f64 {
        let n = self.matrices.len();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i + 1..n {
                worst = worst.max(self.matrices[i].frobenius_distance(&self.matrices[j]));
            }
        }
        worst
    }

    /// Largest pairwise Frobenius distance of the Hamiltonians; constant
    /// along a run.
    pub fn hamiltonian_diameter(&self) -> f64 {
        let n = self.hamiltonians.len();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i + 1..n {
                worst = worst.max(self.hamiltonians[i].frobenius_distance(&self.hamiltonians[j]));
            }
        }
        worst
    }

    /// Frobenius norm of the sum of the Hamiltonians.
    pub fn hamiltonian_sum_defect(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(self.dim, self.dim);
        for ham in &self.hamiltonians {
            sum = sum.add(ham);
        }
        sum.frobenius_norm()
    }

    /// Largest unitarity defect over the ensemble.
    pub fn unitarity_defect(&self) -> f64 {
        self.matrices
            .iter()
            .map(|u| u.unitarity_defect())
            .fold(0.0, f64::max)
    }

    pub fn diagnostics(&self, n: usize) -> MatrixDiagnostics {
        MatrixDiagnostics {
            n,
            diameter: self.diameter(),
            hamiltonian_diameter: self.hamiltonian_diameter(),
            unitarity_defect: self.unitarity_defect(),
            beta: self.beta(),
        }
    }

    /// Relative positions U_i U_j^* for all pairs i < j, in row-major pair
    /// order.
    pub fn relative_positions(&self) -> Vec<ComplexMatrix> {
        let n = self.matrices.len();
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            let adj_products: Vec<ComplexMatrix> = (i + 1..n)
                .map(|j| self.matrices[i].matmul(&self.matrices[j].adjoint()))
                .collect();
            out.extend(adj_products);
        }
        out
    }

    /// Largest Frobenius distance between corresponding relative positions
    /// of two ensembles: max over pairs of |U_i U_j^* - V_i V_j^*|_F.
    /// Invariant under right translation of either ensemble and bounded by
    /// the sum of the two diameters.
    pub fn relative_position_distance(&self, other: &UnitaryEnsemble) -> Result<f64> {
        if self.dim != other.dim || self.matrices.len() != other.matrices.len() {
            return Err(Error::ShapeMismatch {
                expected: format!("ensemble of {} agents at dimension {}", self.matrices.len(), self.dim),
                got: format!("{} agents at dimension {}", other.matrices.len(), other.dim),
            });
        }
        Ok(relative_distance_raw(&self.matrices, &other.matrices))
    }

    /// Right-translates every state by the same unitary.
    pub fn right_translated(&self, l: &ComplexMatrix) -> Result<Self> {
        if l.rows() != self.dim || l.cols() != self.dim {
            return Err(Error::ShapeMismatch {
                expected: format!("{0}x{0} unitary", self.dim),
                got: format!("{}x{}", l.rows(), l.cols()),
            });
        }
        let matrices = self.matrices.iter().map(|u| u.matmul(l)).collect();
        UnitaryEnsemble::new(matrices, self.hamiltonians.clone(), self.kappa, self.h, self.scheme)
    }

    /// Intermediate states V_i = exp(-i H_i h / 2) U_i of the Strang scheme.
    /// Their pairwise relative-position distances equal those of the U_i
    /// exactly, which is what makes them useful as a diagnostic.
    pub fn strang_intermediate(&self) -> Result<Vec<ComplexMatrix>> {
        self.matrices
            .iter()
            .zip(&self.hamiltonians)
            .map(|(u, ham)| {
                let half = expm_skew_hermitian(&ham.scale(Complex64::new(0.0, -0.5 * self.h)))?;
                Ok(half.matmul(u))
            })
            .collect()
    }
}

fn delta_from_centroid(uc: &ComplexMatrix, u: &ComplexMatrix) -> ComplexMatrix {
    uc.matmul(&u.adjoint())
        .sub(&u.matmul(&uc.adjoint()))
        .scale_re(0.5)
}

pub(crate) fn relative_distance_raw(a: &[ComplexMatrix], b: &[ComplexMatrix]) -> f64 {
    let n = a.len();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i + 1..n {
            let ra = a[i].matmul(&a[j].adjoint());
            let rb = b[i].matmul(&b[j].adjoint());
            worst = worst.max(ra.frobenius_distance(&rb));
        }
    }
    worst
}

/// Outcome of the locking heuristic: whether every pairwise relative
/// position settled over the trailing window, the largest windowed
/// increment sum observed, and the final relative positions.
#[derive(Clone, Debug)]
pub struct LockingReport {
    pub locked: bool,
    pub max_window_increment: f64,
    pub final_positions: Vec<ComplexMatrix>,
}

/// Declares the trajectory locked when, for every pair (i, j), the
/// Frobenius increments of U_i U_j^* summed over the trailing `window`
/// snapshots stay below `tol`. Needs `history.len() >= window >= 2`.
pub fn state_locking_detector(
    history: &[UnitaryEnsemble],
    window: usize,
    tol: f64,
) -> Result<LockingReport> {
    if window < 2 {
        return Err(Error::InvalidArgument(format!(
            "window must span at least two snapshots, got {window}"
        )));
    }
    if history.len() < window {
        return Err(Error::InvalidArgument(format!(
            "history of {} snapshots is shorter than the window {window}",
            history.len()
        )));
    }
    let tail = &history[history.len() - window..];
    let mut prev = tail[0].relative_positions();
    let mut sums = vec![0.0_f64; prev.len()];
    for ens in &tail[1..] {
        let cur = ens.relative_positions();
        for (k, (a, b)) in prev.iter().zip(&cur).enumerate() {
            sums[k] += a.frobenius_distance(b);
        }
        prev = cur;
    }
    let max_window_increment = sums.iter().copied().fold(0.0, f64::max);
    Ok(LockingReport {
        locked: max_window_increment < tol,
        max_window_increment,
        final_positions: prev,
    })
}

/// Advances phases both as 1x1 unitaries under the single-exponent scheme
/// and as arctan-free phase oscillators, returning the largest angular
/// discrepancy mod 2 pi after one step.
pub fn phase_reduction_discrepancy(
    thetas: &[f64],
    nus: &[f64],
    kappa: f64,
    h: f64,
) -> Result<f64> {
    let matrices: Vec<ComplexMatrix> = thetas
        .iter()
        .map(|&t| ComplexMatrix::new(1, 1, vec![Complex64::from_polar(1.0, -t)]))
        .collect();
    let hamiltonians: Vec<ComplexMatrix> = nus
        .iter()
        .map(|&v| ComplexMatrix::new(1, 1, vec![Complex64::new(v, 0.0)]))
        .collect();
    let ens = UnitaryEnsemble::new(matrices, hamiltonians, kappa, h, Scheme::SingleExponent)?;
    let next = ens.step()?;
    let reference = kuramoto_step(thetas, nus, kappa, h, PhaseUpdate::ArctanFree);
    let worst = (0..thetas.len())
        .map(|i| {
            let phase = -next.matrix(i)[(0, 0)].arg();
            wrap_angle(phase - reference[i]).abs()
        })
        .fold(0.0, f64::max);
    Ok(worst)
}
