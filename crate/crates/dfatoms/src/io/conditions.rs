//! Advisory checks of the hypotheses under which the Dirac-Fock existence
//! results hold.

use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Largest charge and electron number quoted for physical `c`.
pub const REFERENCE_Z_MAX: u32 = 124;
pub const REFERENCE_N_MAX: u32 = 41;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Condition {
    /// Human-readable inequality.
    pub inequality: &'static str,
    pub value: f64,
    pub bound: f64,
    pub holds: bool,
}

impl Condition {
    fn less(inequality: &'static str, value: f64, bound: f64) -> Self {
        Self {
            inequality,
            value,
            bound,
            holds: value < bound,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub z: u32,
    pub n: u32,
    pub c: f64,
    /// `2c/(π/2 + 2/π)`, the bound in atomic units.
    pub threshold: f64,
    /// `2c²/(π/2 + 2/π)`, the same expression read with `c²`.
    pub threshold_c_squared: f64,
    pub existence: Condition,
    pub paturel_z: Condition,
    pub paturel_n: Condition,
    pub below_ionization: Condition,
    /// The existence condition with the `c²` reading, for comparison.
    pub existence_c_squared: Condition,
    pub reference_z_max: u32,
    pub reference_n_max: u32,
    pub within_reference: bool,
}

/// `2/(π/2 + 2/π) ≈ 0.9062`.
pub fn threshold_factor() -> f64 {
    2.0 / (PI / 2.0 + 2.0 / PI)
}

/// Evaluates the sufficient conditions for `(Z, N, c)`. Only `N < Z + 1` is
/// enforced; the other flags are informational.
pub fn validate_conditions(z: u32, n: u32, c: f64) -> Result<HypothesisReport> {
    if z == 0 {
        return Err(Error::InvalidInput("Z must be a positive integer".into()));
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidInput(format!("speed of light must be positive, got {c}")));
    }
    if n >= z + 1 {
        return Err(Error::Domain(format!("N = {n} violates N < Z + 1 with Z = {z}")));
    }
    let threshold = threshold_factor() * c;
    let threshold_c_squared = threshold_factor() * c * c;
    let worst = (z as f64).max(3.0 * n as f64 - 1.0);
    Ok(HypothesisReport {
        z,
        n,
        c,
        threshold,
        threshold_c_squared,
        existence: Condition::less("max(Z, 3N-1) < 2c/(π/2+2/π)", worst, threshold),
        paturel_z: Condition::less("Z < 2c/(π/2+2/π)", z as f64, threshold),
        paturel_n: Condition::less("N < 2c/(π/2+2/π)", n as f64, threshold),
        below_ionization: Condition::less("N < Z+1", n as f64, z as f64 + 1.0),
        existence_c_squared: Condition::less("max(Z, 3N-1) < 2c²/(π/2+2/π)", worst, threshold_c_squared),
        reference_z_max: REFERENCE_Z_MAX,
        reference_n_max: REFERENCE_N_MAX,
        within_reference: z <= REFERENCE_Z_MAX && n <= REFERENCE_N_MAX,
    })
}
