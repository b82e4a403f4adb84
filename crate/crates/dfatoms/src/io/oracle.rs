//! Closed-form Dirac-Coulomb levels.

use crate::error::{Error, Result};

fn check(z: f64, kappa: i32, n: u32, c: f64) -> Result<(f64, f64)> {
    if kappa == 0 {
        return Err(Error::InvalidInput("kappa must be nonzero".into()));
    }
    if !(c > 0.0) || !(z >= 0.0) {
        return Err(Error::InvalidInput(format!("need Z ≥ 0 and c > 0, got Z = {z}, c = {c}")));
    }
    let k = kappa.unsigned_abs();
    if n < k || (kappa > 0 && n == k) {
        return Err(Error::InvalidInput(format!("no level n = {n} in channel kappa = {kappa}")));
    }
    let za = z / c;
    let k = k as f64;
    if za >= k {
        return Err(Error::Domain(format!("Zα = {za} ≥ |κ| = {k}: the channel is supercritical")));
    }
    let gamma = (k * k - za * za).sqrt();
    let x = za / (n as f64 - k + gamma);
    Ok((x, c * c))
}

/// Sommerfeld fine-structure energy
/// `E = c² (1 + (Zα / (n - |κ| + sqrt(κ² - (Zα)²)))²)^{-1/2}`, `α = 1/c`,
/// including the rest energy.
pub fn oracle_sommerfeld(z: f64, kappa: i32, n: u32, c: f64) -> Result<f64> {
    let (x, c2) = check(z, kappa, n, c)?;
    Ok(c2 / (1.0 + x * x).sqrt())
}

/// `E - c²` of [`oracle_sommerfeld`], evaluated without cancellation.
pub fn oracle_sommerfeld_shifted(z: f64, kappa: i32, n: u32, c: f64) -> Result<f64> {
    let (x, c2) = check(z, kappa, n, c)?;
    let s = (1.0 + x * x).sqrt();
    Ok(-c2 * x * x / (s * (s + 1.0)))
}
