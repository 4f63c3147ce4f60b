//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.
//!
//! Sized for the small dense matrices this crate works with (d up to a few
//! dozen). Each pivot (p, q) is annihilated by a phase transformation that
//! makes the 2x2 block real symmetric followed by a real Givens rotation.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mat::{ComplexMatrix, StructureTolerance};

const MAX_SWEEPS: usize = 60;

/// Eigendecomposition A = V diag(values) V^* of a Hermitian matrix.
/// Eigenvalues are sorted ascending; eigenvectors are the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let d = a.rows();
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Diagonalizes a Hermitian matrix. Rejects non-square and structurally
/// non-Hermitian input; reports non-convergence distinctly.
pub fn eigh(a: &ComplexMatrix, tol: &StructureTolerance) -> Result<HermitianEigen> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    if !a.is_finite() {
        return Err(Error::NonFinite { place: "eigh input" });
    }
    let d = a.rows();
    if d == 0 {
        return Ok(HermitianEigen { values: Vec::new(), vectors: ComplexMatrix::identity(0) });
    }
    let scale = a.frobenius_norm().max(1.0);
    let defect = a.hermitian_defect();
    if defect > tol.eps_structure * scale {
        return Err(Error::StructureViolation {
            what: "hermitian structure",
            defect,
            tol: tol.eps_structure * scale,
        });
    }

    let mut w = a.clone();
    let mut v = ComplexMatrix::identity(d);
    let converge_at = 2.0 * f64::EPSILON * scale * d as f64;
    let skip_below = converge_at / (d.max(2) as f64 * d as f64);

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&w);
        if off <= converge_at {
            break;
        }
        if sweeps >= MAX_SWEEPS {
            return Err(Error::EigenNoConvergence { sweeps, off });
        }
        sweeps += 1;
        for p in 0..d - 1 {
            for q in p + 1..d {
                let apq = w[(p, q)];
                let g = apq.norm();
                if g <= skip_below {
                    continue;
                }
                let phase = apq / g;
                let alpha = w[(p, p)].re;
                let beta = w[(q, q)].re;
                let tau = (beta - alpha) / (2.0 * g);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (tau - (1.0 + tau * tau).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                // Plane rotation R with R[p][p] = cs*phase, R[p][q] = sn*phase,
                // R[q][p] = -sn, R[q][q] = cs; W <- R^* W R, V <- V R.
                let rpp = phase * cs;
                let rpq = phase * sn;
                for k in 0..d {
                    let wkp = w[(k, p)];
                    let wkq = w[(k, q)];
                    w[(k, p)] = wkp * rpp - wkq * sn;
                    w[(k, q)] = wkp * rpq + wkq * cs;
                }
                let rpp_c = rpp.conj();
                let rpq_c = rpq.conj();
                for k in 0..d {
                    let wpk = w[(p, k)];
                    let wqk = w[(q, k)];
                    w[(p, k)] = wpk * rpp_c - wqk * sn;
                    w[(q, k)] = wpk * rpq_c + wqk * cs;
                }
                w[(p, q)] = Complex64::new(0.0, 0.0);
                w[(q, p)] = Complex64::new(0.0, 0.0);
                w[(p, p)] = Complex64::new(w[(p, p)].re, 0.0);
                w[(q, q)] = Complex64::new(w[(q, q)].re, 0.0);
                for k in 0..d {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * rpp - vkq * sn;
                    v[(k, q)] = vkp * rpq + vkq * cs;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    let diag: Vec<f64> = (0..d).map(|i| w[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let vectors = ComplexMatrix::from_fn(d, d, |i, j| v[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

/// Spectral norm sqrt(lambda_max(A^* A)). Rejects non-square input.
pub fn operator_norm(a: &ComplexMatrix) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let gram = a.adjoint().matmul(a);
    let eig = eigh(&gram, &StructureTolerance::default())?;
    let lam_max = eig.values.last().copied().unwrap_or(0.0).max(0.0);
    Ok(lam_max.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::c;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(d: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
        let g = ComplexMatrix::from_fn(d, d, |_, _| {
            c(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0)
        });
        g.add(&g.adjoint()).scale_re(0.5)
    }

    fn reconstruct(e: &HermitianEigen) -> ComplexMatrix {
        let d = e.values.len();
        let lam = ComplexMatrix::from_fn(d, d, |i, j| {
            if i == j { c(e.values[i], 0.0) } else { c(0.0, 0.0) }
        });
        e.vectors.matmul(&lam).matmul(&e.vectors.adjoint())
    }

    #[test]
    fn diagonal_matrix_eigenvalues_are_sorted() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(3.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(-1.0, 0.0)],
        ]);
        let e = eigh(&a, &StructureTolerance::default()).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn pauli_x_eigenvalues_are_plus_minus_one() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ]);
        let e = eigh(&a, &StructureTolerance::default()).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
        assert!(reconstruct(&e).frobenius_distance(&a) < 1e-14);
    }

    #[test]
    fn random_hermitian_reconstruction_and_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in [2, 3, 5, 8, 16] {
            let a = random_hermitian(d, &mut rng);
            let e = eigh(&a, &StructureTolerance::default()).unwrap();
            let scale = a.frobenius_norm().max(1.0);
            assert!(
                reconstruct(&e).frobenius_distance(&a) <= 1e-13 * scale,
                "reconstruction residual too large at d={d}"
            );
            assert!(e.vectors.unitarity_defect() <= 1e-13 * d as f64);
            for k in 1..d {
                assert!(e.values[k] >= e.values[k - 1]);
            }
        }
    }

    #[test]
    fn eigh_rejects_non_hermitian_input() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(2.0, 0.0), c(0.0, 0.0)],
        ]);
        match eigh(&a, &StructureTolerance::default()) {
            Err(Error::StructureViolation { defect, .. }) => assert!(defect > 0.5),
            other => panic!("expected structure violation, got {other:?}"),
        }
    }

    #[test]
    fn operator_norm_of_diag_3_1_is_3() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(3.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ]);
        assert!((operator_norm(&a).unwrap() - 3.0).abs() < 1e-13);
    }

    #[test]
    fn operator_norm_rejects_non_square() {
        let a = ComplexMatrix::zeros(2, 3);
        assert!(matches!(operator_norm(&a), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn operator_norm_matches_power_iteration_oracle() {
        for seed in [1u64, 2, 3] {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = ComplexMatrix::from_fn(4, 4, |_, _| {
                c(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0)
            });
            let gram = a.adjoint().matmul(&a);
            let mut v: Vec<Complex64> = (0..4)
                .map(|_| c(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0))
                .collect();
            let mut lam = 0.0;
            for _ in 0..20_000 {
                let mut w = vec![c(0.0, 0.0); 4];
                for i in 0..4 {
                    for j in 0..4 {
                        w[i] += gram[(i, j)] * v[j];
                    }
                }
                let n = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                for z in &mut w {
                    *z /= n;
                }
                lam = n;
                v = w;
            }
            let oracle = lam.sqrt();
            let got = operator_norm(&a).unwrap();
            assert!(
                (got - oracle).abs() <= 1e-10 * oracle.max(1.0),
                "seed {seed}: {got} vs oracle {oracle}"
            );
        }
    }

    #[test]
    fn operator_norm_bounded_by_frobenius_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let a = ComplexMatrix::from_fn(5, 5, |_, _| {
                c(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0)
            });
            assert!(operator_norm(&a).unwrap() <= a.frobenius_norm() + 1e-12);
        }
    }
}
