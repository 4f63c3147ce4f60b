//! Predictor-corrector dynamics for interacting points on the unit sphere.
//!
//! One step applies the free rotation and the aggregation coupling to each
//! point and projects the result back to the sphere:
//!
//!   predictor  y_i = x_i + h Omega_i x_i + kappa h (x_c - <x_c, x_i> x_i)
//!   corrector  x_i(n+1) = y_i / |y_i|
//!
//! with x_c the ensemble centroid. The coupling term is the centroid form
//! of the all-pairs sum (1/N) sum_j (x_j - <x_j, x_i> x_i), to which it is
//! algebraically identical.

use crate::error::{Error, Result};
use crate::exec::try_map_agents;
use crate::mat::RealMatrix;

#[derive(Clone, Debug)]
pub struct SphereEnsemble {
    dim: usize,
    points: Vec<Vec<f64>>,
    omegas: Option<Vec<RealMatrix>>,
    kappa: f64,
    h: f64,
}

/// Scalar functionals of one ensemble snapshot.
#[derive(Clone, Copy, Debug)]
pub struct SphereDiagnostics {
    pub n: usize,
    /// Norm of the centroid, the order parameter.
    pub rho: f64,
    /// Smallest pairwise inner product.
    pub min_pair_inner: f64,
    /// Smallest inner product of a point with the (unnormalized) centroid.
    pub min_center_inner: f64,
    /// Largest pairwise Euclidean distance.
    pub diameter: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl SphereEnsemble {
    /// Validates shapes, normalizes each point (inputs may carry up to 1e-6
    /// of norm error, e.g. from serialized state), and checks that every
    /// rotation generator is skew-symmetric.
    pub fn new(
        points: Vec<Vec<f64>>,
        omegas: Option<Vec<RealMatrix>>,
        kappa: f64,
        h: f64,
    ) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::InvalidArgument("ensemble needs at least one point".into()));
        }
        let dim = points[0].len();
        if dim < 2 {
            return Err(Error::InvalidArgument(format!(
                "sphere dimension must be at least 2, got {dim}"
            )));
        }
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(Error::InvalidArgument(format!("kappa must be finite and >= 0, got {kappa}")));
        }
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidArgument(format!("h must be finite and positive, got {h}")));
        }
        let mut normalized = Vec::with_capacity(n);
        for (i, p) in points.into_iter().enumerate() {
            if p.len() != dim {
                return Err(Error::ShapeMismatch {
                    expected: format!("point of dimension {dim}"),
                    got: format!("agent {i} has dimension {}", p.len()),
                });
            }
            if !p.iter().all(|x| x.is_finite()) {
                return Err(Error::NonFinite { place: "ensemble point" });
            }
            let norm = dot(&p, &p).sqrt();
            if (norm - 1.0).abs() > 1e-6 {
                return Err(Error::InvalidArgument(format!(
                    "agent {i} is not on the unit sphere (norm {norm})"
                )));
            }
            normalized.push(p.into_iter().map(|x| x / norm).collect());
        }
        if let Some(ref oms) = omegas {
            if oms.len() != n {
                return Err(Error::ShapeMismatch {
                    expected: format!("{n} rotation generators"),
                    got: format!("{}", oms.len()),
                });
            }
            for (i, om) in oms.iter().enumerate() {
                if om.rows() != dim || om.cols() != dim {
                    return Err(Error::ShapeMismatch {
                        expected: format!("{dim}x{dim} rotation generator"),
                        got: format!("agent {i} has {}x{}", om.rows(), om.cols()),
                    });
                }
                let defect = om.skew_symmetric_defect();
                if defect > 1e-12 * om.frobenius_norm().max(1.0) {
                    return Err(Error::StructureViolation {
                        what: "skew symmetry of a rotation generator",
                        defect,
                        tol: 1e-12 * om.frobenius_norm().max(1.0),
                    });
                }
            }
        }
        Ok(SphereEnsemble { dim, points: normalized, omegas, kappa, h })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
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

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn omegas(&self) -> Option<&[RealMatrix]> {
        self.omegas.as_deref()
    }

    /// Whether any rotation generator is nonzero.
    pub fn has_rotations(&self) -> bool {
        self.omegas
            .as_ref()
            .map(|oms| oms.iter().any(|om| om.frobenius_norm() > 0.0))
            .unwrap_or(false)
    }

    /// Ensemble centroid (1/N) sum x_j, accumulated in agent order.
    pub fn centroid(&self) -> Vec<f64> {
        let mut xc = vec![0.0; self.dim];
        for p in &self.points {
            for (acc, x) in xc.iter_mut().zip(p) {
                *acc += x;
            }
        }
        let inv = 1.0 / self.points.len() as f64;
        for acc in &mut xc {
            *acc *= inv;
        }
        xc
    }

    /// One predictor-corrector step. Rejects a step whose predictor has zero
    /// or non-finite norm, naming the agent.
    pub fn step(&self) -> Result<SphereEnsemble> {
        let xc = self.centroid();
        let g = self.kappa * self.h;
        let points = try_map_agents(self.points.len(), |i| {
            let x = &self.points[i];
            let mut y = x.clone();
            if let Some(ref oms) = self.omegas {
                let rot = oms[i].matvec(x);
                for (yk, rk) in y.iter_mut().zip(&rot) {
                    *yk += self.h * rk;
                }
            }
            let a = dot(&xc, x);
            for k in 0..self.dim {
                y[k] += g * (xc[k] - a * x[k]);
            }
            let norm_sq = dot(&y, &y);
            if !norm_sq.is_finite() {
                return Err(Error::BadPredictor { index: i, kind: "non-finite" });
            }
            if norm_sq == 0.0 {
                return Err(Error::BadPredictor { index: i, kind: "zero-norm" });
            }
            let norm = norm_sq.sqrt();
            Ok(y.into_iter().map(|v| v / norm).collect::<Vec<f64>>())
        })?;
        Ok(SphereEnsemble {
            dim: self.dim,
            points,
            omegas: self.omegas.clone(),
            kappa: self.kappa,
            h: self.h,
        })
    }

    pub fn diagnostics(&self, n: usize) -> SphereDiagnostics {
        let xc = self.centroid();
        let rho = dot(&xc, &xc).sqrt().min(1.0);
        let mut min_pair = 1.0_f64;
        let mut diameter = 0.0_f64;
        for i in 0..self.points.len() {
            for j in i + 1..self.points.len() {
                let b = dot(&self.points[i], &self.points[j]);
                min_pair = min_pair.min(b);
                let dist_sq: f64 = self.points[i]
                    .iter()
                    .zip(&self.points[j])
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum();
                diameter = diameter.max(dist_sq.sqrt());
            }
        }
        let min_center = self
            .points
            .iter()
            .map(|p| dot(p, &xc))
            .fold(f64::INFINITY, f64::min);
        SphereDiagnostics {
            n,
            rho,
            min_pair_inner: min_pair,
            min_center_inner: min_center,
            diameter,
        }
    }

    /// Post-step inner product <x_i(n+1), x_j(n+1)> in closed form, valid
    /// only for zero rotations. Written in terms of the raw centroid so the
    /// fully incoherent case (centroid zero) needs no special handling.
    pub fn inner_product_closed_form(&self, i: usize, j: usize) -> Result<f64> {
        if self.has_rotations() {
            return Err(Error::InvalidArgument(
                "closed-form inner product requires zero rotation generators".into(),
            ));
        }
        let n = self.points.len();
        if i >= n || j >= n {
            return Err(Error::InvalidArgument(format!(
                "agent index out of range: ({i}, {j}) with N = {n}"
            )));
        }
        if i == j {
            return Ok(1.0);
        }
        let xc = self.centroid();
        let g = self.kappa * self.h;
        let rho_sq = dot(&xc, &xc);
        let a_i = dot(&self.points[i], &xc);
        let a_j = dot(&self.points[j], &xc);
        let b = dot(&self.points[i], &self.points[j]);
        let num = b
            + g * (a_i + a_j) * (1.0 - b)
            + g * g * (rho_sq - a_i * a_i - a_j * a_j + a_i * a_j * b);
        let den =
            (1.0 + g * g * (rho_sq - a_i * a_i)).sqrt() * (1.0 + g * g * (rho_sq - a_j * a_j)).sqrt();
        Ok(num / den)
    }

    /// Largest deviation of a point norm from 1.
    pub fn norm_defect(&self) -> f64 {
        self.points
            .iter()
            .map(|p| (dot(p, p).sqrt() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}
