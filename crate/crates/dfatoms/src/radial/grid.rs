use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    Exponential,
}

/// Exponential radial grid `r_i = r_min (r_max/r_min)^{i/(M-1)}`.
///
/// Quadrature weights are the trapezoid rule in `t = ln r` (weight `h r_i`)
/// with an end correction that makes the rule exact for constants; for
/// integrands that vanish at both ends the correction is immaterial and the
/// rule is spectrally accurate.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialGrid {
    kind: GridKind,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    h: f64,
}

pub const MIN_POINTS: usize = 16;

impl RadialGrid {
    pub fn exponential(r_min: f64, r_max: f64, m: usize) -> Result<Self> {
        if !(r_min > 0.0) || !r_min.is_finite() {
            return Err(invalid(format!("r_min must be positive, got {r_min}")));
        }
        if !(r_max > r_min) || !r_max.is_finite() {
            return Err(invalid(format!("r_max must exceed r_min, got {r_max} <= {r_min}")));
        }
        if m < MIN_POINTS {
            return Err(invalid(format!("grid needs at least {MIN_POINTS} points, got {m}")));
        }
        let h = (r_max / r_min).ln() / (m - 1) as f64;
        let ratio = r_max / r_min;
        let mut nodes: Vec<f64> = (0..m)
            .map(|i| r_min * ratio.powf(i as f64 / (m - 1) as f64))
            .collect();
        nodes[0] = r_min;
        nodes[m - 1] = r_max;

        let mut weights: Vec<f64> = nodes.iter().map(|r| h * r).collect();
        weights[0] *= 0.5;
        weights[m - 1] *= 0.5;
        // (h/2)coth(h/2) - 1, written to avoid cancellation for small h
        let x = 0.5 * h;
        let fit = if x < 1e-3 {
            x * x / 3.0 - x.powi(4) / 45.0
        } else {
            x / x.tanh() - 1.0
        };
        weights[0] += fit * r_min;
        weights[m - 1] -= fit * r_max;
        Ok(Self {
            kind: GridKind::Exponential,
            nodes,
            weights,
            h,
        })
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn r_min(&self) -> f64 {
        self.nodes[0]
    }

    pub fn r_max(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    /// Logarithmic step `h = ln(r_max/r_min)/(M-1)`.
    pub fn step(&self) -> f64 {
        self.h
    }

    /// Geometric midpoints `r_i e^{h/2}`, one per node (the last lies half a
    /// step beyond `r_max`).
    pub fn midpoints(&self) -> Vec<f64> {
        let f = (0.5 * self.h).exp();
        self.nodes.iter().map(|r| r * f).collect()
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        assert_eq!(f.len(), self.len(), "samples must match the grid");
        f.iter().zip(&self.weights).map(|(a, w)| a * w).sum()
    }
}

pub fn build_grid(kind: GridKind, r_min: f64, r_max: f64, m: usize) -> Result<RadialGrid> {
    match kind {
        GridKind::Exponential => RadialGrid::exponential(r_min, r_max, m),
    }
}
