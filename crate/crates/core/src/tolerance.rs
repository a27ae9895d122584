use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numeric tolerance policy shared by every operation in the library.
///
/// All cutoffs are relative: the rank cutoff is `rank_rel_tol * sigma_max`,
/// residual acceptance scales with the norms of the matrices involved, and
/// spectrum-set matching scales with `1 + norm`. Weights routinely span many
/// orders of magnitude, so absolute thresholds would be meaningless.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Relative singular-value cutoff for numeric rank decisions.
    pub rank_rel_tol: f64,
    /// Acceptance bound for defining-equation residuals.
    pub residual_tol: f64,
    /// Threshold for multiset matching of spectra.
    pub set_match_tol: f64,
    /// Negative eigenvalues of a nominally PSD matrix are clamped to zero
    /// when they are above `-psd_clamp_tol * norm`; anything lower is an error.
    pub psd_clamp_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            rank_rel_tol: 1e-10,
            residual_tol: 1e-9,
            set_match_tol: 1e-8,
            psd_clamp_tol: 1e-10,
        }
    }
}

impl ToleranceConfig {
    /// Validates that every tolerance is strictly positive.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("rank_rel_tol", self.rank_rel_tol),
            ("residual_tol", self.residual_tol),
            ("set_match_tol", self.set_match_tol),
            ("psd_clamp_tol", self.psd_clamp_tol),
        ];
        for (name, value) in fields {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be strictly positive and finite, got {value}"
                )));
            }
        }
        Ok(())
    }

    /// Eigenvalues closer than this gap are treated as a cluster: per-vector
    /// residual certification is skipped for them (diagnostic, not an error).
    pub fn cluster_gap(&self) -> f64 {
        1e3 * self.set_match_tol
    }
}
