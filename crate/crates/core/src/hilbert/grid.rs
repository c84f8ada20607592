use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform 1-D grid `lo, lo + step, ..., hi` for integrating quadrature densities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureGrid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Default for QuadratureGrid {
    fn default() -> Self {
        Self {
            lo: -8.0,
            hi: 8.0,
            step: 0.01,
        }
    }
}

impl QuadratureGrid {
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self> {
        let grid = Self { lo, hi, step };
        grid.validate()?;
        Ok(grid)
    }

    pub fn symmetric(half_width: f64, step: f64) -> Result<Self> {
        Self::new(-half_width, half_width, step)
    }

    /// Symmetric grid wide enough for Fock states up to `n_max`: the classical
    /// turning point of `|n>` sits at `2 sqrt(n + 1/2)`, and eight more units of
    /// Gaussian tail are kept beyond it. Never narrower than `[-8, 8]`.
    pub fn covering(n_max: usize, step: f64) -> Result<Self> {
        let turning = 2.0 * (n_max as f64 + 0.5).sqrt();
        let half = (turning + 8.0).max(8.0);
        // Snap to a whole number of steps so the grid stays symmetric.
        let half = (half / step).ceil() * step;
        Self::symmetric(half, step)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.step.is_finite()) {
            return Err(Error::InvalidGrid("bounds and step must be finite".into()));
        }
        if self.step <= 0.0 {
            return Err(Error::InvalidGrid(format!("step {} must be positive", self.step)));
        }
        if self.lo >= self.hi {
            return Err(Error::InvalidGrid(format!(
                "lo {} must be below hi {}",
                self.lo, self.hi
            )));
        }
        if self.len() < 2 {
            return Err(Error::InvalidGrid("grid needs at least two points".into()));
        }
        Ok(())
    }

    /// Number of points, `floor((hi - lo) / step) + 1`. A relative slack of
    /// 1e-9 absorbs the roundoff in ratios like `16 / 0.01`.
    pub fn len(&self) -> usize {
        let ratio = (self.hi - self.lo) / self.step;
        (ratio * (1.0 + 1e-9)).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_symmetric(&self) -> bool {
        self.lo == -self.hi
    }

    /// Grid abscissae. Symmetric grids are mirrored exactly, so `x[k] == -x[len-1-k]`
    /// bit for bit and the centre point (if any) is exactly zero.
    pub fn points(&self) -> Vec<f64> {
        let n = self.len();
        let mut xs: Vec<f64> = (0..n).map(|k| self.lo + k as f64 * self.step).collect();
        let spans_exactly = ((n - 1) as f64 * self.step - (self.hi - self.lo)).abs()
            <= 1e-9 * self.step.max(self.hi - self.lo);
        if self.is_symmetric() && spans_exactly {
            for k in 0..n / 2 {
                xs[n - 1 - k] = -xs[k];
            }
            if n % 2 == 1 {
                xs[n / 2] = 0.0;
            }
        }
        xs
    }

    /// Composite trapezoid weights.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let n = self.len();
        let mut w = vec![self.step; n];
        w[0] *= 0.5;
        w[n - 1] *= 0.5;
        w
    }
}
