//! Certification of Bell non-locality and EPR steering with probability
//! tensors ("quantum magic squares").
//!
//! A magic-square tensor is a non-negative, normalized table with one outcome
//! index per (party, measurement) pair. Every joint distribution of the
//! experiment is a partial sum of it, and a local-hidden-variable model exists
//! exactly when such a tensor exists. The crate is organised bottom-up:
//!
//! - [`linalg`]: dense complex matrices and a Jacobi eigensolver.
//! - [`quantum`]: density matrices, projective measurements, Born statistics
//!   and assemblages.
//! - [`families`]: Werner, isotropic, GHZ and product states; mutually
//!   unbiased bases and Bloch-sphere measurements.
//! - [`tensor`]: the magic-square tensor, local models, marginals, node sums,
//!   correlators, CHSH and parity expectations.
//! - [`simplex`]: a dense two-phase simplex with Farkas certificates.
//! - [`feasibility`]: Bell-locality and GHZ decisions as linear feasibility.
//! - [`majorization`]: majorization arithmetic and uncertainty bounds.
//! - [`steering`]: the conditional majorization steering criterion,
//!   threshold scans and continuum measurement families.
//! - [`io`]: JSON and CSV encodings.

pub mod families;
pub mod feasibility;
pub mod io;
pub mod linalg;
pub mod majorization;
pub mod quantum;
pub mod simplex;
pub mod steering;
pub mod tensor;

pub use num_complex::Complex64 as C64;

/// Numeric tolerances shared across the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Validation of user-facing objects (Hermiticity, trace, normalization).
    pub validate: f64,
    /// Internal algebraic identities.
    pub internal: f64,
    /// Partial-sum comparisons in majorization checks.
    pub majorization: f64,
    /// Constraint residuals of linear feasibility witnesses.
    pub feasibility: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            validate: 1e-9,
            internal: 1e-10,
            majorization: 1e-9,
            feasibility: 1e-8,
        }
    }
}
