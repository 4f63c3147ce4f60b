//! Seeded random generators for ensembles: Haar unitaries, Hermitian
//! generators with zero sum, unit vectors. Everything is a deterministic
//! function of the dimensions and the seed.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
pub use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::mat::ComplexMatrix;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn gaussian_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = gaussian(rng);
    let im: f64 = gaussian(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix with independent standard complex gaussian entries.
pub fn ginibre_with(d: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |_, _| gaussian_complex(rng))
}

/// Haar-distributed unitary: QR of a Ginibre sample by modified Gram-Schmidt
/// with the R diagonal normalized positive, which fixes the factor uniquely.
pub fn haar_unitary_with(d: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    loop {
        let g = ginibre_with(d, rng);
        if let Some(q) = mgs_q(&g) {
            return q;
        }
    }
}

fn mgs_q(g: &ComplexMatrix) -> Option<ComplexMatrix> {
    let d = g.rows();
    let mut cols: Vec<Vec<Complex64>> = (0..d)
        .map(|j| (0..d).map(|i| g[(i, j)]).collect())
        .collect();
    for j in 0..d {
        for _pass in 0..2 {
            for i in 0..j {
                let proj: Complex64 = (0..d).map(|k| cols[i][k].conj() * cols[j][k]).sum();
                for k in 0..d {
                    let prev = cols[i][k];
                    cols[j][k] -= proj * prev;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-10 {
            return None;
        }
        for z in &mut cols[j] {
            *z /= norm;
        }
    }
    Some(ComplexMatrix::from_fn(d, d, |i, j| cols[j][i]))
}

pub fn random_unitary(d: usize, seed: u64) -> ComplexMatrix {
    haar_unitary_with(d, &mut rng_from_seed(seed))
}

/// One Hermitian sample with independent gaussian entries (GUE scaling left
/// to the caller via `scale`).
pub fn hermitian_with(d: usize, scale: f64, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let g = ginibre_with(d, rng);
    g.add(&g.adjoint()).scale_re(0.5 * scale)
}

/// Skew-Hermitian sample, the tangent analogue of `hermitian_with`.
pub fn skew_hermitian_with(d: usize, scale: f64, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let g = ginibre_with(d, rng);
    g.sub(&g.adjoint()).scale_re(0.5 * scale)
}

/// `n` Hermitian matrices whose sum is the zero matrix (mean subtraction).
pub fn hermitian_zero_sum_with(
    d: usize,
    n: usize,
    scale: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<ComplexMatrix> {
    let raw: Vec<ComplexMatrix> = (0..n).map(|_| hermitian_with(d, scale, rng)).collect();
    let mut mean = ComplexMatrix::zeros(d, d);
    for h in &raw {
        mean = mean.add(h);
    }
    mean = mean.scale_re(1.0 / n as f64);
    raw.iter().map(|h| h.sub(&mean)).collect()
}

pub fn random_hermitian_zero_sum(d: usize, n: usize, seed: u64) -> Vec<ComplexMatrix> {
    hermitian_zero_sum_with(d, n, 1.0, &mut rng_from_seed(seed))
}

/// Uniform point on the unit sphere in R^d.
pub fn unit_vector_with(d: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| gaussian(rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-10 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

pub fn random_unit_vector(d: usize, seed: u64) -> Vec<f64> {
    unit_vector_with(d, &mut rng_from_seed(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::is_unitary;

    #[test]
    fn random_unitary_is_unitary_for_small_dims() {
        for d in 1..=8 {
            let u = random_unitary(d, 42);
            let (ok, defect) = is_unitary(&u, 1e-10);
            assert!(ok, "d={d} defect={defect:e}");
        }
    }

    #[test]
    fn random_unitary_is_deterministic_in_the_seed() {
        let a = random_unitary(5, 123);
        let b = random_unitary(5, 123);
        assert_eq!(a.data(), b.data());
        let c = random_unitary(5, 124);
        assert_ne!(a.data(), c.data());
    }

    #[test]
    fn hermitian_zero_sum_sums_to_zero() {
        let hs = random_hermitian_zero_sum(4, 7, 9);
        assert_eq!(hs.len(), 7);
        let mut total = ComplexMatrix::zeros(4, 4);
        for h in &hs {
            assert!(h.hermitian_defect() < 1e-13);
            total = total.add(h);
        }
        assert!(total.frobenius_norm() <= 1e-13, "sum norm {:e}", total.frobenius_norm());
    }

    #[test]
    fn hermitian_zero_sum_is_deterministic_in_the_seed() {
        let a = random_hermitian_zero_sum(3, 5, 77);
        let b = random_hermitian_zero_sum(3, 5, 77);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.data(), y.data());
        }
    }

    #[test]
    fn unit_vector_has_unit_norm() {
        for seed in [0u64, 1, 2] {
            let v = random_unit_vector(6, seed);
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-14);
        }
    }
}
