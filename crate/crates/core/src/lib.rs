//! Discrete aggregation dynamics on the unit sphere and the unitary group.
//!
//! The crate implements a predictor-corrector scheme for second-order swarm
//! dynamics on S^{d-1} and three splitting schemes for coupled unitary
//! matrices (the Lohe matrix model), together with the diagnostic
//! functionals, coupling thresholds, and a continuous-time reference
//! integrator used to validate the discrete flows against their
//! emergence estimates.

#![forbid(unsafe_code)]

pub mod error;
mod exec;
pub mod mat;

pub mod eigen;
pub mod expm;
pub mod random;

pub mod continuous;
pub mod kuramoto;
pub mod sphere;
pub mod thresholds;
pub mod unitary;

pub use error::{Error, Result};
pub use mat::{ComplexMatrix, RealMatrix, StructureTolerance};
