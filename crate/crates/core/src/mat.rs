//! Dense complex matrices in row-major order, sized for ensembles of
//! small unitaries (d up to a few dozen). Not a general linear algebra
//! library: only the operations the dynamics need.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerances used when validating matrix structure before a decomposition.
///
/// `eps_structure` gates input checks (skewness, hermiticity) relative to the
/// input scale. `eps_eigen` gates decomposition residuals. Both must be well
/// below any physically meaningful scale, hence the 1e-3 ceiling.
#[derive(Clone, Copy, Debug)]
pub struct StructureTolerance {
    pub eps_structure: f64,
    pub eps_eigen: f64,
}

impl Default for StructureTolerance {
    fn default() -> Self {
        StructureTolerance {
            eps_structure: 1e-10,
            eps_eigen: 1e-12,
        }
    }
}

impl StructureTolerance {
    pub fn new(eps_structure: f64, eps_eigen: f64) -> Result<Self> {
        if !(eps_structure > 0.0 && eps_structure < 1e-3) {
            return Err(Error::InvalidTolerance(format!(
                "eps_structure must lie in (0, 1e-3), got {eps_structure:e}"
            )));
        }
        if !(eps_eigen > 0.0 && eps_eigen < 1e-3) {
            return Err(Error::InvalidTolerance(format!(
                "eps_eigen must lie in (0, 1e-3), got {eps_eigen:e}"
            )));
        }
        Ok(StructureTolerance {
            eps_structure,
            eps_eigen,
        })
    }
}

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must equal rows*cols");
        ComplexMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        ComplexMatrix { rows: r, cols: c, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn add(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in add");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in sub");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: Complex64) -> ComplexMatrix {
        let data = self.data.iter().map(|a| a * s).collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale_re(&self, s: f64) -> ComplexMatrix {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree in matmul");
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.data[k * other.cols + j];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace of a non-square matrix");
        (0..self.rows).map(|i| self.data[i * self.cols + i]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius norm of A - A'.
    pub fn frobenius_distance(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in distance");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// ||A - A^*||_F, zero for Hermitian matrices.
    pub fn hermitian_defect(&self) -> f64 {
        assert!(self.is_square(), "hermitian defect of a non-square matrix");
        let mut s = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let d = self.data[i * self.cols + j] - self.data[j * self.cols + i].conj();
                s += d.norm_sqr();
            }
        }
        s.sqrt()
    }

    /// ||A + A^*||_F, zero for skew-Hermitian matrices.
    pub fn skew_hermitian_defect(&self) -> f64 {
        assert!(self.is_square(), "skew defect of a non-square matrix");
        let mut s = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let d = self.data[i * self.cols + j] + self.data[j * self.cols + i].conj();
                s += d.norm_sqr();
            }
        }
        s.sqrt()
    }

    /// ||U^* U - I||_F.
    pub fn unitarity_defect(&self) -> f64 {
        assert!(self.is_square(), "unitarity defect of a non-square matrix");
        let g = self.adjoint().matmul(self);
        let mut s = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let mut d = g.data[i * self.cols + j];
                if i == j {
                    d -= Complex64::new(1.0, 0.0);
                }
                s += d.norm_sqr();
            }
        }
        s.sqrt()
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Returns whether `u` is unitary within `tol` (Frobenius defect), together
/// with the measured defect.
pub fn is_unitary(u: &ComplexMatrix, tol: f64) -> (bool, f64) {
    let defect = u.unitarity_defect();
    (defect <= tol, defect)
}

/// Row-major dense real matrix, used for sphere rotation generators.
#[derive(Clone, Debug, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must equal rows*cols");
        RealMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        RealMatrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    /// The 2x2 generator of a rotation with angular velocity `nu`.
    pub fn planar_rotation_generator(nu: f64) -> Self {
        RealMatrix::new(2, 2, vec![0.0, -nu, nu, 0.0])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "vector length must equal cols");
        (0..self.rows)
            .map(|i| {
                let mut s = 0.0;
                for j in 0..self.cols {
                    s += self.data[i * self.cols + j] * x[j];
                }
                s
            })
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// ||A + A^T||_F, zero for skew-symmetric matrices.
    pub fn skew_symmetric_defect(&self) -> f64 {
        assert_eq!(self.rows, self.cols, "skew defect of a non-square matrix");
        let mut s = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let d = self.data[i * self.cols + j] + self.data[j * self.cols + i];
                s += d * d;
            }
        }
        s.sqrt()
    }
}

impl std::ops::Index<(usize, usize)> for RealMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RealMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frobenius_norm_of_identity_2x2_is_sqrt2() {
        let m = ComplexMatrix::identity(2);
        assert!((m.frobenius_norm() - 2.0_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn frobenius_norm_hermitian_example() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, -1.0), c(1.0, 0.0)],
        ]);
        assert!((m.frobenius_norm() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn is_unitary_rejects_diag_1_2_with_defect_3() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(2.0, 0.0)],
        ]);
        let (ok, defect) = is_unitary(&m, 1e-10);
        assert!(!ok);
        assert!((defect - 3.0).abs() < 1e-14, "defect {defect}");
    }

    #[test]
    fn adjoint_conjugates_and_transposes() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 2.0), c(3.0, 4.0)],
            vec![c(5.0, 6.0), c(7.0, 8.0)],
        ]);
        let a = m.adjoint();
        assert_eq!(a[(0, 1)], c(5.0, -6.0));
        assert_eq!(a[(1, 0)], c(3.0, -4.0));
    }

    #[test]
    fn matmul_against_hand_computation() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, 1.0)],
            vec![c(2.0, 0.0), c(0.0, 0.0)],
        ]);
        let b = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, -1.0)],
        ]);
        let p = a.matmul(&b);
        assert_eq!(p[(0, 0)], c(0.0, 1.0));
        assert_eq!(p[(0, 1)], c(2.0, 0.0));
        assert_eq!(p[(1, 0)], c(0.0, 0.0));
        assert_eq!(p[(1, 1)], c(2.0, 0.0));
    }

    #[test]
    fn structure_tolerance_rejects_loose_values() {
        assert!(StructureTolerance::new(1e-2, 1e-12).is_err());
        assert!(StructureTolerance::new(1e-10, 0.0).is_err());
        let t = StructureTolerance::default();
        assert_eq!(t.eps_structure, 1e-10);
        assert_eq!(t.eps_eigen, 1e-12);
    }

    #[test]
    fn skew_defects_vanish_on_structured_matrices() {
        let h = ComplexMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(1.0, 3.0)],
            vec![c(1.0, -3.0), c(-1.0, 0.0)],
        ]);
        assert!(h.hermitian_defect() < 1e-15);
        let s = h.scale(c(0.0, 1.0));
        assert!(s.skew_hermitian_defect() < 1e-15);
    }

    #[test]
    fn real_matrix_matvec_and_skew_defect() {
        let omega = RealMatrix::planar_rotation_generator(2.0);
        assert!(omega.skew_symmetric_defect() < 1e-15);
        let y = omega.matvec(&[1.0, 0.0]);
        assert_eq!(y, vec![0.0, 2.0]);
    }
}
