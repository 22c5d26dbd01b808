//! Finite evaluation grids on `[0, x_max]` for sup-norm and modulus
//! estimation.

use crate::error::{Error, Result};

/// A uniform grid of `points` samples on `[0, x_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_max: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn new(x_max: f64, points: usize) -> Result<Self> {
        if !(x_max > 0.0 && x_max.is_finite()) {
            return Err(Error::InvalidParams(format!("x_max must be positive, got {x_max}")));
        }
        if points < 2 {
            return Err(Error::InvalidParams(format!("grid needs at least 2 points, got {points}")));
        }
        Ok(GridSpec { x_max, points })
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        self.x_max / (self.points - 1) as f64
    }

    pub fn values(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.points).map(|i| (i as f64 * h).min(self.x_max)).collect()
    }
}
