//! Numerical tolerance tiers.
//!
//! Three tiers are used throughout the crate: structural checks on how a
//! matrix is represented (Hermiticity, trace), spectral assertions that sit
//! on top of the iterative eigensolver, and the decision threshold used when
//! classifying two supports as orthogonal.

use serde::{Deserialize, Serialize};

/// Hermiticity and unit-trace checks.
pub const STRUCTURAL: f64 = 1e-10;
/// Eigenvalue / eigenvector assertions.
pub const SPECTRAL: f64 = 1e-8;
/// Orthogonality decisions on `tr(rho_i supp(rho_j))`.
pub const DECISION: f64 = 1e-7;
/// Idempotency check for projectors.
pub const IDEMPOTENT: f64 = 1e-9;
/// Kraus completeness check for channels.
pub const COMPLETENESS: f64 = 1e-9;

/// Tolerance overrides carried by experiment configs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub structural: f64,
    pub spectral: f64,
    pub decision: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            structural: STRUCTURAL,
            spectral: SPECTRAL,
            decision: DECISION,
        }
    }
}
