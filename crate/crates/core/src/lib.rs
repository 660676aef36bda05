//! Common and Sidorenko single linear equations over finite Abelian groups.
//!
//! The crate decides, for an equation `L_1 v_1 + ... + L_d v_d = 0` whose
//! coefficients are coprime to `|G|`, whether it is fully Sidorenko, fully
//! common but not fully Sidorenko, or not fully common, and builds explicit
//! witnesses (functions `G -> [0, 1]` and sets) for the negative cases. Every
//! witness comes with inequalities that are re-checked by brute force.
//!
//! Modules, bottom up:
//!
//! - [`group`]: products of cyclic groups, ranks, characters.
//! - [`config`]: equations, canceling partitions, kernels, brute-force counts.
//! - [`fourier`]: transforms and the spectral multiplicity formula.
//! - [`witness`]: the phase-function construction and its certificate.
//! - [`rounding`]: functions to sets, and the overall classifier.
//! - [`cli`]: command implementations behind the `common-witness` binary.

pub mod cli;
pub mod config;
pub mod error;
pub mod fourier;
pub mod group;
pub mod rounding;
pub mod witness;

pub use config::{CancelReport, Equation, LinearSystem};
pub use error::{Error, Result};
pub use fourier::{DenseFunction, Spectrum};
pub use group::{GroupElement, GroupSpec};
pub use num_complex::Complex64;

/// Absolute tolerance for quantities of magnitude at most 1.
pub const TOL: f64 = 1e-9;

/// Tolerance for "exactly real" and "exactly in range" checks.
pub const REAL_TOL: f64 = 1e-12;
