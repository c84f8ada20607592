use serde::{Deserialize, Serialize};

use super::{NoiseModel, QuadBasis, QuadEngine};
use crate::bell::AngleQuad;
use crate::error::{Error, Result};
use crate::hilbert::QuadratureGrid;
use crate::states::SchmidtDiagonalState;

/// Absolute bisection tolerance on `sigma0`.
pub const THRESHOLD_TOL: f64 = 1e-5;

const INITIAL_BRACKET: f64 = 10.0;
const MAX_BRACKET: f64 = 1e6;

/// Largest quadrature-unit noise that still leaves `S > 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseThreshold {
    pub sigma0_max: f64,
    /// Photon-number noise `E sigma0_max`.
    pub sigma_photon_max: f64,
    pub energy: f64,
    pub s_at_zero: f64,
    /// Every `(sigma0, S)` evaluated, sorted by `sigma0`.
    pub trace: Vec<(f64, f64)>,
}

impl NoiseThreshold {
    /// Whether `S` never increases with `sigma0` along the trace.
    pub fn trace_is_monotone(&self) -> bool {
        self.trace.windows(2).all(|w| w[1].1 <= w[0].1)
    }
}

/// Bisect on `sigma0` for the edge of the violating region, starting from the
/// bracket `[0, 10]` and doubling the upper end while it still violates.
///
/// Fails with [`Error::NoViolation`] when `S <= 1` already at zero noise.
pub fn noise_threshold(
    state: &SchmidtDiagonalState,
    angles: &AngleQuad,
    energy: f64,
    grid: &QuadratureGrid,
) -> Result<NoiseThreshold> {
    if !(energy.is_finite() && energy > 0.0) {
        return Err(Error::InvalidParameter(format!("energy E = {energy} must be positive")));
    }
    let basis = QuadBasis::new(state.n_max, grid)?;
    let mut trace = Vec::new();
    let mut eval = |sigma0: f64| -> Result<f64> {
        let noise = NoiseModel::symmetric(sigma0).with_energy(energy);
        let s = QuadEngine::with_basis(state, &basis, noise)?.ch_statistic(angles)?.s;
        trace.push((sigma0, s));
        Ok(s)
    };

    let s_at_zero = eval(0.0)?;
    if s_at_zero <= 1.0 {
        return Err(Error::NoViolation { s0: s_at_zero });
    }
    let mut lo = 0.0;
    let mut hi = INITIAL_BRACKET;
    while eval(hi)? > 1.0 {
        lo = hi;
        hi *= 2.0;
        if hi > MAX_BRACKET {
            return Err(Error::InvalidParameter(format!(
                "violation persists beyond sigma0 = {lo}; no finite threshold"
            )));
        }
    }
    while hi - lo > THRESHOLD_TOL {
        let mid = 0.5 * (lo + hi);
        if eval(mid)? > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    trace.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(NoiseThreshold {
        sigma0_max: lo,
        sigma_photon_max: energy * lo,
        energy,
        s_at_zero,
        trace,
    })
}
