//! Norm and exponential inequalities used by the contraction estimates,
//! checked on random matrices and on live coupling terms along trajectories.

use num_complex::Complex64;
use proptest::prelude::*;

use lohe_core::eigen::operator_norm;
use lohe_core::expm::expm_skew_hermitian;
use lohe_core::random::{ginibre_with, haar_unitary_with, hermitian_with, rng_from_seed};
use lohe_core::unitary::{Scheme, UnitaryEnsemble};
use lohe_core::ComplexMatrix;

const SLACK: f64 = 1e-12;

fn slack_for(rhs: f64) -> f64 {
    SLACK * rhs.max(1.0)
}

#[test]
fn operator_norm_bounds_products_and_unitaries_preserve_frobenius() {
    for d in [2usize, 3, 4] {
        let mut rng = rng_from_seed(900 + d as u64);
        for _ in 0..200 {
            let a = ginibre_with(d, &mut rng);
            let b = ginibre_with(d, &mut rng);
            let u = haar_unitary_with(d, &mut rng);
            let ab = a.matmul(&b);
            let bound_left = operator_norm(&a).unwrap() * b.frobenius_norm();
            let bound_right = a.frobenius_norm() * operator_norm(&b).unwrap();
            assert!(ab.frobenius_norm() <= bound_left + slack_for(bound_left));
            assert!(ab.frobenius_norm() <= bound_right + slack_for(bound_right));
            let na = a.frobenius_norm();
            assert!((a.matmul(&u).frobenius_norm() - na).abs() <= slack_for(na));
            assert!((u.matmul(&a).frobenius_norm() - na).abs() <= slack_for(na));
        }
    }
}

#[test]
fn frobenius_norm_is_submultiplicative_and_bounds_traces() {
    for d in [2usize, 3, 4] {
        let mut rng = rng_from_seed(910 + d as u64);
        for _ in 0..200 {
            let factors: Vec<ComplexMatrix> = (0..4).map(|_| ginibre_with(d, &mut rng)).collect();
            let mut product = factors[0].clone();
            let mut bound = factors[0].frobenius_norm();
            for f in &factors[1..] {
                product = product.matmul(f);
                bound *= f.frobenius_norm();
                assert!(product.frobenius_norm() <= bound + slack_for(bound));
                assert!(product.trace().norm() <= bound + slack_for(bound));
            }
        }
    }
}

#[test]
fn products_of_contractions_telescope() {
    for d in [2usize, 3, 4] {
        let mut rng = rng_from_seed(920 + d as u64);
        for _ in 0..200 {
            for k in 2usize..=4 {
                let a: Vec<ComplexMatrix> = (0..k).map(|_| haar_unitary_with(d, &mut rng)).collect();
                let b: Vec<ComplexMatrix> = (0..k).map(|_| haar_unitary_with(d, &mut rng)).collect();
                let prod = |ms: &[ComplexMatrix]| {
                    ms[1..].iter().fold(ms[0].clone(), |acc, m| acc.matmul(m))
                };
                let lhs = prod(&a).frobenius_distance(&prod(&b));
                let rhs: f64 = a
                    .iter()
                    .zip(&b)
                    .map(|(x, y)| x.frobenius_distance(y))
                    .sum();
                assert!(lhs <= rhs + slack_for(rhs), "k={k}: {lhs} > {rhs}");
            }
        }
    }
}

#[test]
fn coupling_terms_obey_the_ensemble_bounds_along_trajectories() {
    for d in [2usize, 3, 4] {
        let mut rng = rng_from_seed(930 + d as u64);
        let n = 5;
        let matrices: Vec<ComplexMatrix> = (0..n).map(|_| haar_unitary_with(d, &mut rng)).collect();
        let hams = lohe_core::random::hermitian_zero_sum_with(d, n, 0.4, &mut rng);
        let mut ens = UnitaryEnsemble::new(matrices, hams, 1.0, 0.1, Scheme::LieTrotter).unwrap();
        for _ in 0..50 {
            let uc = ens.centroid();
            let uc_op = operator_norm(&uc).unwrap();
            assert!(uc_op <= 1.0 + SLACK);
            let deltas: Vec<ComplexMatrix> = (0..n).map(|i| ens.coupling_delta(i)).collect();
            for i in 0..n {
                let mean_dist: f64 = (0..n)
                    .map(|k| ens.matrix(k).frobenius_distance(ens.matrix(i)))
                    .sum::<f64>()
                    / n as f64;
                assert!(deltas[i].frobenius_norm() <= mean_dist + slack_for(mean_dist));
                assert!(operator_norm(&deltas[i]).unwrap() <= uc_op + SLACK);
                for j in i + 1..n {
                    let dij = ens.matrix(i).frobenius_distance(ens.matrix(j));
                    let commut = ens
                        .matrix(i)
                        .matmul(&ens.matrix(j).adjoint())
                        .sub(&ens.matrix(j).matmul(&ens.matrix(i).adjoint()));
                    assert!(commut.frobenius_norm() <= 2.0 * dij + slack_for(2.0 * dij));
                    let gap = deltas[i].frobenius_distance(&deltas[j]);
                    assert!(gap <= dij + slack_for(dij));
                }
            }
            ens = ens.step().unwrap();
        }
    }
}

#[test]
fn hermitian_exponentials_are_nonexpansive() {
    for d in [2usize, 3, 4] {
        let mut rng = rng_from_seed(940 + d as u64);
        for _ in 0..200 {
            let a = hermitian_with(d, 1.0, &mut rng);
            let b = hermitian_with(d, 1.0, &mut rng);
            let ea = expm_skew_hermitian(&a.scale(Complex64::new(0.0, 1.0))).unwrap();
            let eb = expm_skew_hermitian(&b.scale(Complex64::new(0.0, 1.0))).unwrap();
            let lhs = ea.frobenius_distance(&eb);
            let rhs = a.frobenius_distance(&b);
            assert!(lhs <= rhs + slack_for(rhs), "{lhs} > {rhs}");
        }
    }
}

fn arbitrary_matrix(d: usize) -> impl Strategy<Value = ComplexMatrix> {
    proptest::collection::vec(
        (-10.0..10.0f64).prop_flat_map(|re| (-10.0..10.0f64).prop_map(move |im| Complex64::new(re, im))),
        d * d,
    )
    .prop_map(move |data| ComplexMatrix::new(d, d, data))
}

proptest! {
    #[test]
    fn prop_submultiplicative(a in arbitrary_matrix(3), b in arbitrary_matrix(3)) {
        let bound = a.frobenius_norm() * b.frobenius_norm();
        prop_assert!(a.matmul(&b).frobenius_norm() <= bound + slack_for(bound));
        prop_assert!(a.matmul(&b).trace().norm() <= bound + slack_for(bound));
    }

    #[test]
    fn prop_operator_norm_bound(a in arbitrary_matrix(2), b in arbitrary_matrix(2)) {
        let bound = operator_norm(&a).unwrap() * b.frobenius_norm();
        prop_assert!(a.matmul(&b).frobenius_norm() <= bound + slack_for(bound));
    }

    #[test]
    fn prop_hermitian_exponential_contraction(a in arbitrary_matrix(2), b in arbitrary_matrix(2)) {
        let ha = a.add(&a.adjoint()).scale_re(0.5);
        let hb = b.add(&b.adjoint()).scale_re(0.5);
        let ea = expm_skew_hermitian(&ha.scale(Complex64::new(0.0, 1.0))).unwrap();
        let eb = expm_skew_hermitian(&hb.scale(Complex64::new(0.0, 1.0))).unwrap();
        let rhs = ha.frobenius_distance(&hb);
        prop_assert!(ea.frobenius_distance(&eb) <= rhs + slack_for(rhs));
    }
}
