//! Trajectory-level properties of the matrix schemes: long-run unitarity,
//! scheme coincidence without Hamiltonians, the homogeneous per-step
//! contraction with its exponential envelope, and locking diagnostics.

use lohe_core::random::{haar_unitary_with, hermitian_zero_sum_with, rng_from_seed, skew_hermitian_with};
use lohe_core::thresholds::lambda_of;
use lohe_core::unitary::{state_locking_detector, Scheme, UnitaryEnsemble};
use lohe_core::ComplexMatrix;
use lohe_core::expm::expm_skew_hermitian;

fn haar_ensemble(d: usize, n: usize, kappa: f64, h: f64, ham_scale: f64, scheme: Scheme, seed: u64) -> UnitaryEnsemble {
    let mut rng = rng_from_seed(seed);
    let matrices: Vec<ComplexMatrix> = (0..n).map(|_| haar_unitary_with(d, &mut rng)).collect();
    let hams = if ham_scale == 0.0 {
        vec![ComplexMatrix::zeros(d, d); n]
    } else {
        hermitian_zero_sum_with(d, n, ham_scale, &mut rng)
    };
    UnitaryEnsemble::new(matrices, hams, kappa, h, scheme).unwrap()
}

/// Ensemble of exp(s S_i) with s tuned by bisection until the diameter hits
/// the requested value.
fn ensemble_with_diameter(
    d: usize,
    n: usize,
    kappa: f64,
    h: f64,
    scheme: Scheme,
    target: f64,
    seed: u64,
) -> UnitaryEnsemble {
    let mut rng = rng_from_seed(seed);
    let generators: Vec<ComplexMatrix> = (0..n).map(|_| skew_hermitian_with(d, 1.0, &mut rng)).collect();
    let build = |s: f64| {
        let matrices: Vec<ComplexMatrix> = generators
            .iter()
            .map(|g| expm_skew_hermitian(&g.scale_re(s)).unwrap())
            .collect();
        UnitaryEnsemble::new(matrices, vec![ComplexMatrix::zeros(d, d); n], kappa, h, scheme).unwrap()
    };
    let mut lo = 0.0_f64;
    let mut hi = 0.05_f64;
    while build(hi).diameter() < target {
        hi *= 2.0;
        assert!(hi < 1e3, "diameter target {target} unreachable");
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if build(mid).diameter() < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let ens = build(0.5 * (lo + hi));
    assert!((ens.diameter() - target).abs() < 1e-9);
    ens
}

#[test]
fn unitarity_defect_is_bounded_over_ten_thousand_steps() {
    for scheme in [Scheme::SingleExponent, Scheme::LieTrotter, Scheme::Strang] {
        let mut ens = haar_ensemble(3, 5, 1.0, 0.1, 0.4, scheme, 57);
        for _ in 0..10_000 {
            ens = ens.step().unwrap();
        }
        let defect = ens.unitarity_defect();
        assert!(defect <= 1e-10 * 3.0, "scheme {scheme:?}: defect {defect:e}");
    }
}

#[test]
fn schemes_coincide_without_hamiltonians_over_a_thousand_steps() {
    let base = haar_ensemble(2, 6, 1.0, 0.25, 0.0, Scheme::SingleExponent, 63);
    let mut a = base.clone();
    let mut b = base.with_scheme(Scheme::LieTrotter);
    let mut c = base.with_scheme(Scheme::Strang);
    let mut worst = 0.0_f64;
    for _ in 0..1_000 {
        a = a.step().unwrap();
        b = b.step().unwrap();
        c = c.step().unwrap();
        for i in 0..a.len() {
            worst = worst.max(a.matrix(i).frobenius_distance(b.matrix(i)));
            worst = worst.max(a.matrix(i).frobenius_distance(c.matrix(i)));
        }
    }
    assert!(worst <= 1e-12, "largest scheme gap {worst:e}");
}

#[test]
fn homogeneous_run_contracts_pairwise_and_respects_the_envelope() {
    let beta = 0.3_f64;
    let lambda = lambda_of(beta);
    let d0 = 0.8 * lambda.sqrt();
    let ens0 = ensemble_with_diameter(2, 8, 1.0, beta, Scheme::LieTrotter, d0, 79);
    let factor = 1.0 - beta * (lambda - d0 * d0);
    let per_step = factor.sqrt();
    assert!(factor > 0.0 && factor < 1.0);

    let mut ens = ens0.clone();
    let mut envelope = ens.diameter();
    for n in 0..500usize {
        let next = ens.step().unwrap();
        for i in 0..ens.len() {
            for j in i + 1..ens.len() {
                let before = ens.matrix(i).frobenius_distance(ens.matrix(j));
                let after = next.matrix(i).frobenius_distance(next.matrix(j));
                assert!(
                    after * after <= factor * before * before + 1e-12,
                    "pair ({i},{j}) at step {n}: {after} vs sqrt-factor {per_step} * {before}"
                );
            }
        }
        envelope *= per_step;
        ens = next;
        assert!(
            ens.diameter() <= envelope + 1e-15,
            "diameter {} above envelope {envelope} at step {}",
            ens.diameter(),
            n + 1
        );
    }
}

#[test]
fn homogeneous_admissible_run_locks_to_identity_relative_positions() {
    let ens0 = ensemble_with_diameter(2, 5, 1.0, 0.3, Scheme::SingleExponent, 0.7, 83);
    let mut history = vec![ens0];
    for _ in 0..300 {
        history.push(history.last().unwrap().step().unwrap());
    }
    let report = state_locking_detector(&history, 50, 1e-8).unwrap();
    assert!(report.locked, "max window increment {:e}", report.max_window_increment);
    for p in &report.final_positions {
        let gap = p.frobenius_distance(&ComplexMatrix::identity(2));
        assert!(gap <= 1e-6, "relative position {gap:e} from identity");
    }
}

#[test]
fn mismatched_hamiltonians_leave_relative_positions_unsettled() {
    // Large D(H)/kappa: two agents rotating at very different speeds stay
    // apart, so the locking heuristic must report failure.
    let mut rng = rng_from_seed(89);
    let matrices: Vec<ComplexMatrix> = (0..2).map(|_| haar_unitary_with(2, &mut rng)).collect();
    let mut h1 = ComplexMatrix::zeros(2, 2);
    h1[(0, 0)] = num_complex::Complex64::new(2.0, 0.0);
    h1[(1, 1)] = num_complex::Complex64::new(-2.0, 0.0);
    let hams = vec![h1.scale_re(-1.0), h1];
    let ens0 = UnitaryEnsemble::new(matrices, hams, 0.05, 0.1, Scheme::LieTrotter).unwrap();
    let mut history = vec![ens0];
    for _ in 0..300 {
        history.push(history.last().unwrap().step().unwrap());
    }
    let report = state_locking_detector(&history, 50, 1e-8).unwrap();
    assert!(!report.locked);
}
