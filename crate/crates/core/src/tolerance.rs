//! Numerical tolerances shared across the crate.
//!
//! Every constant has a matching field on [`Tolerances`] so a run can
//! override it from its configuration.

use serde::{Deserialize, Serialize};

/// Max |m - m^dagger| element accepted as Hermitian.
pub const HERMITIAN: f64 = 1e-12;
/// Allowed |tr(rho) - 1| for a density matrix.
pub const TRACE: f64 = 1e-10;
/// Eigenvalues down to -POSITIVITY are treated as round-off and clamped.
pub const POSITIVITY: f64 = 1e-10;
/// Eigenvalue gap below which two eigenvalues are considered degenerate.
pub const DEGENERACY: f64 = 1e-12;
/// Branches whose probability stays below this are skipped in entropy sums.
pub const ZERO_PROBABILITY: f64 = 1e-14;
/// Allowed cumulative |dU - dQ - dW|, in energy units.
pub const FIRST_LAW: f64 = 1e-6;
/// Allowed max-abs deviation between analytic and numeric states.
pub const CROSSCHECK: f64 = 1e-8;
/// Positivity slack tolerated along a numerical integration.
pub const INTEGRATION_POSITIVITY: f64 = 1e-8;
/// Max Jacobi sweeps before giving up.
pub const JACOBI_MAX_SWEEPS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub hermitian: f64,
    pub trace: f64,
    pub positivity: f64,
    pub degeneracy: f64,
    pub zero_probability: f64,
    pub first_law: f64,
    pub crosscheck: f64,
    pub integration_positivity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hermitian: HERMITIAN,
            trace: TRACE,
            positivity: POSITIVITY,
            degeneracy: DEGENERACY,
            zero_probability: ZERO_PROBABILITY,
            first_law: FIRST_LAW,
            crosscheck: CROSSCHECK,
            integration_positivity: INTEGRATION_POSITIVITY,
        }
    }
}

impl Tolerances {
    /// Sets a tolerance by its config key (`hermitian`, `trace`, ...).
    pub fn set(&mut self, key: &str, value: f64) -> Result<(), String> {
        if !(value.is_finite() && value > 0.0) {
            return Err(format!("tolerance {key} must be positive, got {value}"));
        }
        let slot = match key {
            "hermitian" => &mut self.hermitian,
            "trace" => &mut self.trace,
            "positivity" => &mut self.positivity,
            "degeneracy" => &mut self.degeneracy,
            "zero_probability" => &mut self.zero_probability,
            "first_law" => &mut self.first_law,
            "crosscheck" => &mut self.crosscheck,
            "integration_positivity" => &mut self.integration_positivity,
            _ => return Err(format!("unknown tolerance `{key}`")),
        };
        *slot = value;
        Ok(())
    }
}
