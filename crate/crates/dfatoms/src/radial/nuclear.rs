use serde::{Deserialize, Serialize};

use super::grid::RadialGrid;
use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum NuclearShape {
    Point,
    UniformSphere { radius: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NuclearModel {
    pub z: f64,
    pub shape: NuclearShape,
}

impl NuclearModel {
    pub fn point(z: f64) -> Result<Self> {
        Self::new(z, NuclearShape::Point)
    }

    pub fn uniform_sphere(z: f64, radius: f64) -> Result<Self> {
        Self::new(z, NuclearShape::UniformSphere { radius })
    }

    pub fn new(z: f64, shape: NuclearShape) -> Result<Self> {
        if !(z > 0.0) || !z.is_finite() {
            return Err(invalid(format!("nuclear charge must be positive, got {z}")));
        }
        if let NuclearShape::UniformSphere { radius } = shape {
            if !(radius > 0.0) || !radius.is_finite() {
                return Err(invalid(format!("nuclear radius must be positive, got {radius}")));
            }
        }
        Ok(Self { z, shape })
    }

    /// Same shape, different charge.
    pub fn with_charge(&self, z: f64) -> Result<Self> {
        Self::new(z, self.shape)
    }

    pub fn potential_at(&self, r: f64) -> f64 {
        match self.shape {
            NuclearShape::Point => -self.z / r,
            NuclearShape::UniformSphere { radius } => {
                if r <= radius {
                    -(self.z / (2.0 * radius)) * (3.0 - r * r / (radius * radius))
                } else {
                    -self.z / r
                }
            }
        }
    }
}

pub fn nuclear_potential(model: &NuclearModel, grid: &RadialGrid) -> Vec<f64> {
    grid.nodes().iter().map(|&r| model.potential_at(r)).collect()
}
