//! Angular channels and the discrete coordinate space attached to them.
//!
//! Dirac channels use a staggered layout: the large component `P` lives on
//! the grid nodes and the small component `Q` on the geometric midpoints
//! `r_i e^{h/2}`. Coordinates are interleaved, `x[2i] = sqrt(h r_i) P(r_i)` and
//! `x[2i+1] = sqrt(h r_{i+1/2}) Q(r_{i+1/2})`, so the Euclidean inner product of
//! coordinate vectors is the radial L² product. Schrödinger channels only
//! carry the node values.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::grid::RadialGrid;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    Dirac(i32),
    Schrodinger(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layout {
    Dirac,
    Schrodinger,
}

impl Channel {
    pub fn dirac(kappa: i32) -> Result<Self> {
        if kappa == 0 {
            return Err(Error::InvalidInput("kappa must be nonzero".into()));
        }
        Ok(Channel::Dirac(kappa))
    }

    pub fn schrodinger(l: i64) -> Result<Self> {
        if l < 0 {
            return Err(Error::InvalidInput(format!("l must be nonnegative, got {l}")));
        }
        Ok(Channel::Schrodinger(l as u32))
    }

    pub fn layout(&self) -> Layout {
        match self {
            Channel::Dirac(_) => Layout::Dirac,
            Channel::Schrodinger(_) => Layout::Schrodinger,
        }
    }

    /// Orbital angular momentum of the large component.
    pub fn l(&self) -> u32 {
        match *self {
            Channel::Dirac(k) if k < 0 => (-k - 1) as u32,
            Channel::Dirac(k) => k as u32,
            Channel::Schrodinger(l) => l,
        }
    }

    /// Twice the total angular momentum (Dirac channels).
    pub fn two_j(&self) -> Option<u32> {
        match *self {
            Channel::Dirac(k) => Some(2 * k.unsigned_abs() - 1),
            Channel::Schrodinger(_) => None,
        }
    }

    /// Number of electrons a closed shell of this channel holds.
    pub fn capacity(&self) -> usize {
        match *self {
            Channel::Dirac(k) => 2 * k.unsigned_abs() as usize,
            Channel::Schrodinger(l) => 2 * (2 * l as usize + 1),
        }
    }

    /// The κ entering the first-order factor `d/dr + κ/r`. Schrödinger channels
    /// use `κ = -(ℓ+1)`, whose factorization gives `ℓ(ℓ+1)/r²`.
    pub fn factor_kappa(&self) -> i32 {
        match *self {
            Channel::Dirac(k) => k,
            Channel::Schrodinger(l) => -(l as i32 + 1),
        }
    }

    /// The relativistic channel whose large component matches this
    /// nonrelativistic one with j = ℓ + 1/2, and the reverse pairing.
    pub fn nonrelativistic_partner(&self) -> Channel {
        match *self {
            Channel::Dirac(_) => Channel::Schrodinger(self.l()),
            Channel::Schrodinger(l) => Channel::Dirac(-(l as i32) - 1),
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const L: [char; 7] = ['s', 'p', 'd', 'f', 'g', 'h', 'i'];
        let letter = L.get(self.l() as usize).copied().unwrap_or('?');
        match self {
            Channel::Dirac(_) => write!(f, "{}{}/2", letter, self.two_j().unwrap_or(0)),
            Channel::Schrodinger(_) => write!(f, "{letter}"),
        }
    }
}

/// Discrete coordinate space for one layout on one grid.
#[derive(Clone, Debug)]
pub struct ChannelSpace {
    layout: Layout,
    grid: RadialGrid,
    radii: Vec<f64>,
    metric: Vec<f64>,
}

impl ChannelSpace {
    pub fn new(grid: &RadialGrid, layout: Layout) -> Self {
        let h = grid.step();
        let radii: Vec<f64> = match layout {
            Layout::Schrodinger => grid.nodes().to_vec(),
            Layout::Dirac => {
                let mids = grid.midpoints();
                grid.nodes()
                    .iter()
                    .zip(&mids)
                    .flat_map(|(r, m)| [*r, *m])
                    .collect()
            }
        };
        let metric = radii.iter().map(|r| h * r).collect();
        Self {
            layout,
            grid: grid.clone(),
            radii,
            metric,
        }
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.radii.len()
    }

    /// Radius attached to each coordinate (interleaved for Dirac).
    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Quadrature weight `h r` attached to each coordinate.
    pub fn metric(&self) -> &[f64] {
        &self.metric
    }

    /// Builds a coordinate vector from large-component samples on the nodes and
    /// (Dirac) small-component samples on the midpoints.
    pub fn coordinates(&self, p: &[f64], q: Option<&[f64]>) -> Result<Vec<f64>> {
        let m = self.grid.len();
        if p.len() != m {
            return Err(Error::Dimension(format!("expected {m} large-component samples, got {}", p.len())));
        }
        match self.layout {
            Layout::Schrodinger => Ok(p
                .iter()
                .zip(&self.metric)
                .map(|(v, w)| v * w.sqrt())
                .collect()),
            Layout::Dirac => {
                let q = q.ok_or_else(|| Error::Dimension("Dirac layout needs small-component samples".into()))?;
                if q.len() != m {
                    return Err(Error::Dimension(format!("expected {m} small-component samples, got {}", q.len())));
                }
                let mut x = vec![0.0; 2 * m];
                for i in 0..m {
                    x[2 * i] = p[i] * self.metric[2 * i].sqrt();
                    x[2 * i + 1] = q[i] * self.metric[2 * i + 1].sqrt();
                }
                Ok(x)
            }
        }
    }

    /// Large-component samples `P(r_i)` on the nodes.
    pub fn large(&self, x: &[f64]) -> Vec<f64> {
        match self.layout {
            Layout::Schrodinger => x.iter().zip(&self.metric).map(|(v, w)| v / w.sqrt()).collect(),
            Layout::Dirac => (0..self.grid.len())
                .map(|i| x[2 * i] / self.metric[2 * i].sqrt())
                .collect(),
        }
    }

    /// Small-component samples `Q(r_{i+1/2})` on the midpoints (zeros for
    /// Schrödinger layout).
    pub fn small(&self, x: &[f64]) -> Vec<f64> {
        match self.layout {
            Layout::Schrodinger => vec![0.0; self.grid.len()],
            Layout::Dirac => (0..self.grid.len())
                .map(|i| x[2 * i + 1] / self.metric[2 * i + 1].sqrt())
                .collect(),
        }
    }

    /// Large-component coordinates only (the node entries).
    pub fn large_coordinates(&self, x: &[f64]) -> Vec<f64> {
        match self.layout {
            Layout::Schrodinger => x.to_vec(),
            Layout::Dirac => x.iter().step_by(2).copied().collect(),
        }
    }

    /// Small-component coordinates only.
    pub fn small_coordinates(&self, x: &[f64]) -> Vec<f64> {
        match self.layout {
            Layout::Schrodinger => vec![0.0; self.grid.len()],
            Layout::Dirac => x.iter().skip(1).step_by(2).copied().collect(),
        }
    }
}
