use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{NoiseModel, QuadEngine};
use crate::bell::AngleQuad;
use crate::error::Result;
use crate::hilbert::QuadratureGrid;
use crate::states::SchmidtDiagonalState;

/// Points per phase-sum axis in the coarse scan (spacing pi/8).
const COARSE_POINTS: usize = 16;
const FINAL_STEP: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleOptimum {
    pub angles: AngleQuad,
    pub s: f64,
}

/// Maximize `S` over analyzer settings.
///
/// Only the phase sums `chi_1 = theta + phi`, `chi_2 = theta + phi'`,
/// `chi_3 = theta' + phi` matter (`theta' + phi' = chi_2 + chi_3 - chi_1`), so
/// the search runs over those three: a coarse scan on multiples of pi/8 and
/// then a compass search that halves its step until it falls below 1e-9. The
/// result is reported with `theta = 0`. The search is deterministic; ties go
/// to the first point scanned.
pub fn optimize_angles(
    state: &SchmidtDiagonalState,
    noise: NoiseModel,
    grid: &QuadratureGrid,
) -> Result<AngleOptimum> {
    let engine = QuadEngine::new(state, grid, noise)?;
    let spacing = 2.0 * PI / COARSE_POINTS as f64;
    let axis: Vec<f64> = (0..COARSE_POINTS)
        .map(|k| -PI + k as f64 * spacing)
        .collect();

    let mut best = [axis[0]; 3];
    let mut best_s = engine.s_from_sums(best);
    for &c1 in &axis {
        for &c2 in &axis {
            for &c3 in &axis {
                let s = engine.s_from_sums([c1, c2, c3]);
                if s > best_s {
                    best_s = s;
                    best = [c1, c2, c3];
                }
            }
        }
    }

    let mut step = spacing / 2.0;
    while step > FINAL_STEP {
        let mut improved = false;
        for axis in 0..3 {
            for sign in [1.0, -1.0] {
                let mut trial = best;
                trial[axis] += sign * step;
                let s = engine.s_from_sums(trial);
                if s > best_s {
                    best_s = s;
                    best = trial;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }

    let [c1, c2, c3] = best;
    let angles = AngleQuad::new(0.0, c1, c3 - c1, c2);
    Ok(AngleOptimum { angles, s: best_s })
}
