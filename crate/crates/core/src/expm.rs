//! Exponentials of skew-Hermitian matrices and the polar projection back to
//! the unitary group. The production path goes through the Hermitian
//! eigendecomposition of iS, which keeps the result unitary by construction;
//! a scaling-and-squaring Taylor evaluation serves as an independent oracle.

use num_complex::Complex64;

use crate::eigen::eigh;
use crate::error::{Error, Result};
use crate::mat::{ComplexMatrix, StructureTolerance};

/// exp(S) for skew-Hermitian S, via iS = V diag(lambda) V^* and
/// exp(S) = V diag(exp(-i lambda)) V^*. The result is unitary up to
/// rounding; the defect is checked against 1e-12 * d before returning.
pub fn expm_skew_hermitian(s: &ComplexMatrix) -> Result<ComplexMatrix> {
    expm_skew_hermitian_with(s, &StructureTolerance::default())
}

pub fn expm_skew_hermitian_with(
    s: &ComplexMatrix,
    tol: &StructureTolerance,
) -> Result<ComplexMatrix> {
    if !s.is_square() {
        return Err(Error::NotSquare { rows: s.rows(), cols: s.cols() });
    }
    if !s.is_finite() {
        return Err(Error::NonFinite { place: "expm input" });
    }
    let scale = s.frobenius_norm().max(1.0);
    let defect = s.skew_hermitian_defect();
    if defect > tol.eps_structure * scale {
        return Err(Error::StructureViolation {
            what: "skew-hermitian structure",
            defect,
            tol: tol.eps_structure * scale,
        });
    }
    let d = s.rows();
    let herm = s.scale(Complex64::new(0.0, 1.0));
    let eig = eigh(&herm, tol)?;
    let mut out = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..d {
                let phase = Complex64::from_polar(1.0, -eig.values[k]);
                acc += eig.vectors[(i, k)] * phase * eig.vectors[(j, k)].conj();
            }
            out[(i, j)] = acc;
        }
    }
    let unitarity = out.unitarity_defect();
    if unitarity > 1e-12 * d as f64 {
        return Err(Error::StructureViolation {
            what: "unitarity of the computed exponential",
            defect: unitarity,
            tol: 1e-12 * d as f64,
        });
    }
    Ok(out)
}

/// Truncated Taylor series with scaling and squaring, used as an oracle for
/// `expm_skew_hermitian`. Exact on nilpotent input once `terms` covers the
/// nilpotency degree.
pub fn expm_taylor_oracle(s: &ComplexMatrix, terms: usize, squarings: u32) -> ComplexMatrix {
    assert!(s.is_square(), "expm of a non-square matrix");
    let d = s.rows();
    let b = s.scale_re(0.5_f64.powi(squarings as i32));
    let mut sum = ComplexMatrix::identity(d);
    let mut term = ComplexMatrix::identity(d);
    for k in 1..=terms {
        term = term.matmul(&b).scale_re(1.0 / k as f64);
        sum = sum.add(&term);
    }
    for _ in 0..squarings {
        sum = sum.matmul(&sum);
    }
    sum
}

/// Nearest unitary in Frobenius norm, Q = A (A^* A)^{-1/2}. Rejects input
/// whose smallest singular value is at or below 1e-12.
pub fn project_unitary(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    if !a.is_finite() {
        return Err(Error::NonFinite { place: "polar projection input" });
    }
    let d = a.rows();
    let gram = a.adjoint().matmul(a);
    let eig = eigh(&gram, &StructureTolerance::default())?;
    let sigma_min = eig.values.first().copied().unwrap_or(0.0).max(0.0).sqrt();
    if sigma_min <= 1e-12 {
        return Err(Error::NearSingular { sigma_min });
    }
    let mut inv_root = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..d {
                let w = 1.0 / eig.values[k].sqrt();
                acc += eig.vectors[(i, k)] * w * eig.vectors[(j, k)].conj();
            }
            inv_root[(i, j)] = acc;
        }
    }
    Ok(a.matmul(&inv_root))
}
