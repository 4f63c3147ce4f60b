//! Discrete phase oscillators, the circle reduction of the sphere flow.
//!
//! The update θ_i -> θ_i + arctan(ν_i h + (κ h / N) Σ_j sin(θ_j - θ_i))
//! reproduces one sphere step on S^1 exactly; the arctan-free variant drops
//! the arctan and is the d = 1 reduction of the single-exponent matrix
//! scheme.

use crate::error::Result;
use crate::mat::RealMatrix;
use crate::sphere::SphereEnsemble;

/// Which discrete phase update to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhaseUpdate {
    /// Phase increment arctan(drive); the circle reduction of the sphere step.
    Arctan,
    /// Phase increment equal to the drive itself; the d = 1 reduction of the
    /// single-exponent matrix scheme.
    ArctanFree,
}

/// Wraps an angle to (-pi, pi].
pub fn wrap_angle(t: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let w = t.rem_euclid(two_pi);
    if w > std::f64::consts::PI {
        w - two_pi
    } else {
        w
    }
}

/// One synchronous phase update for all oscillators.
pub fn kuramoto_step(
    thetas: &[f64],
    nus: &[f64],
    kappa: f64,
    h: f64,
    update: PhaseUpdate,
) -> Vec<f64> {
    assert_eq!(thetas.len(), nus.len(), "one frequency per oscillator");
    assert!(!thetas.is_empty(), "at least one oscillator");
    let n = thetas.len() as f64;
    let g = kappa * h / n;
    thetas
        .iter()
        .zip(nus)
        .map(|(&ti, &vi)| {
            let coupling: f64 = thetas.iter().map(|&tj| (tj - ti).sin()).sum();
            let drive = vi * h + g * coupling;
            match update {
                PhaseUpdate::Arctan => ti + drive.atan(),
                PhaseUpdate::ArctanFree => ti + drive,
            }
        })
        .collect()
}

/// Embeds the phases on S^1, advances both representations one step, and
/// returns the largest angular discrepancy mod 2 pi.
pub fn sphere_reduction_discrepancy(thetas: &[f64], nus: &[f64], kappa: f64, h: f64) -> Result<f64> {
    let points: Vec<Vec<f64>> = thetas.iter().map(|&t| vec![t.cos(), t.sin()]).collect();
    let omegas: Vec<RealMatrix> = nus
        .iter()
        .map(|&v| RealMatrix::planar_rotation_generator(v))
        .collect();
    let ens = SphereEnsemble::new(points, Some(omegas), kappa, h)?;
    let next = ens.step()?;
    let reference = kuramoto_step(thetas, nus, kappa, h, PhaseUpdate::Arctan);
    let worst = (0..thetas.len())
        .map(|i| {
            let phi = next.point(i)[1].atan2(next.point(i)[0]);
            wrap_angle(phi - reference[i]).abs()
        })
        .fold(0.0, f64::max);
    Ok(worst)
}
