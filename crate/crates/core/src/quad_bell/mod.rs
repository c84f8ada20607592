//! Bell-Clauser-Horne statistic in the large local-oscillator limit.
//!
//! With `alpha = beta = E` large, the photon-number difference at A is
//! `E X_theta^A` and at B `E X_phi^B`. Each result is sign-binned (`+` for a
//! nonnegative difference) after Gaussian noise of standard deviation
//! `sigma = E sigma0` has been added, so in quadrature units the noise is
//! `sigma0` and `E` drops out.
//!
//! For a Schmidt-diagonal state the joint amplitude is
//! `psi(x_A, x_B) = sum_n c_n e^{-i n (theta + phi)} phi_n(x_A) phi_n(x_B)`, and
//! any weighted integral of `|psi|^2` with weights that factor between the
//! sides collapses to a double sum over Fock indices of one-dimensional
//! overlap integrals. [`QuadEngine`] precomputes those overlaps once per noise
//! setting, after which `P++` is a short trigonometric polynomial in
//! `theta + phi`.

mod optimize;
mod threshold;

use ndarray::{Array1, Array2, Axis};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bell::{assemble, AngleQuad, BellMeta, BellResult, EngineKind};
use crate::error::{Error, Result};
use crate::hilbert::{gaussian_cdf, hermite_table, QuadratureGrid};
use crate::states::SchmidtDiagonalState;

pub use optimize::{optimize_angles, AngleOptimum};
pub use threshold::{noise_threshold, NoiseThreshold, THRESHOLD_TOL};

/// Gaussian blur applied independently to the A and B records, in quadrature
/// units. `energy` (the local-oscillator amplitude `E`) converts to photon
/// units, `sigma = E sigma0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    pub sigma0_a: f64,
    pub sigma0_b: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::none()
    }
}

impl NoiseModel {
    pub fn none() -> Self {
        Self::symmetric(0.0)
    }

    pub fn symmetric(sigma0: f64) -> Self {
        Self {
            sigma0_a: sigma0,
            sigma0_b: sigma0,
            energy: None,
        }
    }

    pub fn asymmetric(sigma0_a: f64, sigma0_b: f64) -> Self {
        Self {
            sigma0_a,
            sigma0_b,
            energy: None,
        }
    }

    pub fn with_energy(mut self, energy: f64) -> Self {
        self.energy = Some(energy);
        self
    }

    pub fn validate(&self) -> Result<()> {
        for s in [self.sigma0_a, self.sigma0_b] {
            if s.is_nan() || s < 0.0 {
                return Err(Error::InvalidParameter(format!("noise sigma0 = {s} must be >= 0")));
            }
        }
        if let Some(e) = self.energy {
            if !(e.is_finite() && e > 0.0) {
                return Err(Error::InvalidParameter(format!("energy E = {e} must be positive")));
            }
        }
        Ok(())
    }

    /// Photon-number standard deviations `(E sigma0_a, E sigma0_b)`, if `E` is set.
    pub fn photon_sigma(&self) -> Option<(f64, f64)> {
        self.energy.map(|e| (e * self.sigma0_a, e * self.sigma0_b))
    }
}

/// Probability that a noiseless result `x` is recorded as `+`: `Phi(x / sigma0)`,
/// or for `sigma0 = 0` the inclusive step `x >= 0`.
pub fn sign_weight(x: f64, sigma0: f64) -> f64 {
    if sigma0 > 0.0 {
        gaussian_cdf(x / sigma0)
    } else if x >= 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Sign weights as used inside grid quadrature. Identical to [`sign_weight`]
/// except at a node sitting exactly on the noiseless step, which receives the
/// midpoint 1/2 so the trapezoid rule integrates across the jump without an
/// O(step) bias.
fn quadrature_sign_weights(xs: &[f64], sigma0: f64) -> Vec<f64> {
    xs.iter()
        .map(|&x| {
            if sigma0 == 0.0 && x == 0.0 {
                0.5
            } else {
                sign_weight(x, sigma0)
            }
        })
        .collect()
}

/// Tabulated oscillator eigenfunctions on a grid, reusable across noise levels.
#[derive(Debug, Clone)]
pub struct QuadBasis {
    pub grid: QuadratureGrid,
    pub xs: Vec<f64>,
    pub weights: Vec<f64>,
    /// `table[[n, k]] = phi_n(xs[k])`.
    pub table: Array2<f64>,
}

impl QuadBasis {
    pub fn new(n_max: usize, grid: &QuadratureGrid) -> Result<Self> {
        grid.validate()?;
        let xs = grid.points();
        let weights = grid.trapezoid_weights();
        let table = hermite_table(n_max, &xs);
        Ok(Self {
            grid: *grid,
            xs,
            weights,
            table,
        })
    }

    pub fn n_max(&self) -> usize {
        self.table.nrows() - 1
    }

    /// `G[[n, m]] = sum_k w_k s_k phi_n(x_k) phi_m(x_k)` with `s` the sign
    /// weights for `sigma0`.
    fn overlaps(&self, sigma0: f64) -> Array2<f64> {
        let s = quadrature_sign_weights(&self.xs, sigma0);
        let ws: Array1<f64> = self.weights.iter().zip(&s).map(|(w, s)| w * s).collect();
        let weighted = &self.table * &ws.insert_axis(Axis(0));
        weighted.dot(&self.table.t())
    }

    /// `sum_k w_k s_k phi_n(x_k)^2` for every `n`.
    fn diagonal_overlaps(&self, sigma0: f64) -> Vec<f64> {
        let s = quadrature_sign_weights(&self.xs, sigma0);
        self.table
            .outer_iter()
            .map(|row| {
                row.iter()
                    .zip(&self.weights)
                    .zip(&s)
                    .map(|((phi, w), s)| phi * phi * w * s)
                    .sum()
            })
            .collect()
    }
}

/// Precomputed sign-binned statistics of one state at one noise setting.
#[derive(Debug, Clone)]
pub struct QuadEngine {
    label: String,
    n_max: usize,
    grid: QuadratureGrid,
    noise: NoiseModel,
    /// `fourier[d + n_max]` is the coefficient of `e^{-i d (theta + phi)}` in `P++`.
    fourier: Vec<Complex64>,
    single_a: f64,
    single_b: f64,
}

impl QuadEngine {
    pub fn new(state: &SchmidtDiagonalState, grid: &QuadratureGrid, noise: NoiseModel) -> Result<Self> {
        let basis = QuadBasis::new(state.n_max, grid)?;
        Self::with_basis(state, &basis, noise)
    }

    pub fn with_basis(state: &SchmidtDiagonalState, basis: &QuadBasis, noise: NoiseModel) -> Result<Self> {
        noise.validate()?;
        if !basis.grid.is_symmetric() {
            return Err(Error::InvalidGrid(format!(
                "sign binning needs a grid symmetric about 0, got [{}, {}]",
                basis.grid.lo, basis.grid.hi
            )));
        }
        if basis.n_max() < state.n_max {
            return Err(Error::InvalidParameter(format!(
                "basis n_max {} below state n_max {}",
                basis.n_max(),
                state.n_max
            )));
        }
        let n_max = state.n_max;
        let c = &state.coeffs;
        let g_a = basis.overlaps(noise.sigma0_a);
        let g_b = if noise.sigma0_b == noise.sigma0_a {
            g_a.clone()
        } else {
            basis.overlaps(noise.sigma0_b)
        };

        let mut fourier = vec![Complex64::new(0.0, 0.0); 2 * n_max + 1];
        for n in 0..=n_max {
            for m in 0..=n_max {
                let d = n as isize - m as isize;
                fourier[(d + n_max as isize) as usize] += c[n] * c[m].conj() * g_a[[n, m]] * g_b[[n, m]];
            }
        }

        let weights = state.weights();
        let single = |sigma0: f64| -> f64 {
            basis
                .diagonal_overlaps(sigma0)
                .iter()
                .zip(&weights)
                .map(|(g, w)| g * w)
                .sum()
        };
        let single_a = single(noise.sigma0_a);
        let single_b = if noise.sigma0_b == noise.sigma0_a {
            single_a
        } else {
            single(noise.sigma0_b)
        };

        Ok(Self {
            label: state.label.clone(),
            n_max,
            grid: basis.grid,
            noise,
            fourier,
            single_a,
            single_b,
        })
    }

    pub fn noise(&self) -> NoiseModel {
        self.noise
    }

    /// Joint probability of `+` at both sides for analyzer phases `(theta, phi)`.
    pub fn p_plus_plus(&self, theta: f64, phi: f64) -> f64 {
        self.p_plus_plus_at_sum(theta + phi)
    }

    /// `P++` as a function of the phase sum `theta + phi` alone.
    pub fn p_plus_plus_at_sum(&self, chi: f64) -> f64 {
        let offset = self.n_max as isize;
        self.fourier
            .iter()
            .enumerate()
            .map(|(k, coef)| {
                let d = k as isize - offset;
                (coef * Complex64::from_polar(1.0, -(d as f64) * chi)).re
            })
            .sum()
    }

    /// Probability of `+` at A. The reduced state of a Schmidt-diagonal state
    /// is diagonal in the Fock basis, so this does not depend on the phase.
    pub fn p_plus_a(&self) -> f64 {
        self.single_a
    }

    pub fn p_plus_b(&self) -> f64 {
        self.single_b
    }

    pub fn ch_statistic(&self, angles: &AngleQuad) -> Result<BellResult> {
        let joints = angles.pairs().map(|(t, p)| self.p_plus_plus(t, p));
        assemble(*angles, joints, self.single_a, self.single_b, self.meta())
    }

    /// `S` from the three independent phase sums
    /// `(theta + phi, theta + phi', theta' + phi)`; the fourth is fixed by them.
    pub(crate) fn s_from_sums(&self, chi: [f64; 3]) -> f64 {
        let [c1, c2, c3] = chi;
        let num = self.p_plus_plus_at_sum(c1) - self.p_plus_plus_at_sum(c2)
            + self.p_plus_plus_at_sum(c3)
            + self.p_plus_plus_at_sum(c2 + c3 - c1);
        num / (self.single_a + self.single_b)
    }

    fn meta(&self) -> BellMeta {
        BellMeta {
            engine: EngineKind::Quadrature,
            state: self.label.clone(),
            n_max: self.n_max,
            grid: Some(self.grid),
            sigma0: (self.noise.sigma0_a, self.noise.sigma0_b),
            alpha: self.noise.energy,
            beta: self.noise.energy,
        }
    }
}

/// Joint density `P(x_A, x_B) = |sum_n c_n e^{-i n (theta + phi)} phi_n(x_A) phi_n(x_B)|^2`
/// of the quadratures `X_theta^A, X_phi^B`, tabulated as `density[[k_A, k_B]]`.
pub fn joint_quadrature_density(
    state: &SchmidtDiagonalState,
    theta: f64,
    phi: f64,
    grid: &QuadratureGrid,
) -> Result<Array2<f64>> {
    grid.validate()?;
    let xs = grid.points();
    let table = hermite_table(state.n_max, &xs);
    let chi = theta + phi;
    let rotated: Vec<Complex64> = state
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, c)| c * Complex64::from_polar(1.0, -(n as f64) * chi))
        .collect();
    let part = |f: fn(&Complex64) -> f64| -> Array2<f64> {
        let diag: Array1<f64> = rotated.iter().map(f).collect();
        let scaled = &table * &diag.insert_axis(Axis(1));
        table.t().dot(&scaled)
    };
    let re = part(|z| z.re);
    let im = part(|z| z.im);
    Ok(&re * &re + &im * &im)
}

/// Joint `+ +` probability at analyzer phases `(theta, phi)`.
pub fn p_plus_plus(
    state: &SchmidtDiagonalState,
    theta: f64,
    phi: f64,
    noise: NoiseModel,
    grid: &QuadratureGrid,
) -> Result<f64> {
    Ok(QuadEngine::new(state, grid, noise)?.p_plus_plus(theta, phi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

/// Single-side `+` probability. `angle` is accepted for symmetry with the
/// joint terms; for Schmidt-diagonal states the marginal is phase independent.
pub fn p_plus_single(
    state: &SchmidtDiagonalState,
    side: Side,
    _angle: f64,
    noise: NoiseModel,
    grid: &QuadratureGrid,
) -> Result<f64> {
    let engine = QuadEngine::new(state, grid, noise)?;
    Ok(match side {
        Side::A => engine.p_plus_a(),
        Side::B => engine.p_plus_b(),
    })
}

/// Clauser-Horne statistic `S` in the quadrature limit.
pub fn ch_statistic(
    state: &SchmidtDiagonalState,
    angles: &AngleQuad,
    noise: NoiseModel,
    grid: &QuadratureGrid,
) -> Result<BellResult> {
    QuadEngine::new(state, grid, noise)?.ch_statistic(angles)
}
