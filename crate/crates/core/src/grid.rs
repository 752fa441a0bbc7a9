use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid on `[0, pi]` shared by the potential and every kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    intervals: usize,
}

impl Grid {
    pub const DEFAULT_INTERVALS: usize = 256;

    pub fn new(intervals: usize) -> Result<Self> {
        if intervals < 2 {
            return Err(Error::InvalidInput(format!(
                "grid needs at least 3 nodes, got {}",
                intervals + 1
            )));
        }
        Ok(Self { intervals })
    }

    /// Number of cells `M`.
    pub fn intervals(&self) -> usize {
        self.intervals
    }

    /// Number of nodes `M + 1`.
    pub fn len(&self) -> usize {
        self.intervals + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        PI / self.intervals as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i == self.intervals {
            PI
        } else {
            i as f64 * self.step()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.x(i)).collect()
    }

    /// Trapezoid weights for `[0, x_i]` on the first `i + 1` nodes.
    pub fn trapezoid_weights(&self, i: usize) -> Vec<f64> {
        let step = self.step();
        let mut w = vec![step; i + 1];
        if i == 0 {
            w[0] = 0.0;
        } else {
            w[0] = 0.5 * step;
            w[i] = 0.5 * step;
        }
        w
    }
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            intervals: Self::DEFAULT_INTERVALS,
        }
    }
}
