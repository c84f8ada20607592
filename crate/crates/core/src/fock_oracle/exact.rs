use serde::{Deserialize, Serialize};

use super::distribution::{joint_from_kernels, noisy_binned_probabilities};
use super::kernel::{measurement_kernel, MeasurementKernel, Truncations};
use crate::bell::{assemble, AngleQuad, BellMeta, BellResult, EngineKind};
use crate::error::Result;
use crate::hilbert::QuadratureGrid;
use crate::states::{marginal_density, SchmidtDiagonalState};

fn kernels(alpha: f64, beta: f64, truncations: &Truncations) -> Result<(MeasurementKernel, MeasurementKernel)> {
    if alpha == beta {
        let k = measurement_kernel(alpha, 0.0, truncations)?;
        Ok((k.clone(), k))
    } else {
        let (a, b) = rayon::join(
            || measurement_kernel(alpha, 0.0, truncations),
            || measurement_kernel(beta, 0.0, truncations),
        );
        Ok((a?, b?))
    }
}

/// Clauser-Horne statistic of the finite-amplitude homodyne apparatus, with
/// Gaussian photon-number noise `sigma` at each side.
///
/// The singles are read off the `(theta', phi)` distribution, which supplies
/// both `P+A(theta')` and `P+B(phi)`.
pub fn ch_statistic_exact(
    state: &SchmidtDiagonalState,
    alpha: f64,
    beta: f64,
    angles: &AngleQuad,
    sigma: f64,
    truncations: &Truncations,
) -> Result<BellResult> {
    let (base_a, base_b) = kernels(alpha, beta, truncations)?;
    let mut binned = Vec::with_capacity(4);
    for (theta, phi) in angles.pairs() {
        let dist = joint_from_kernels(state, &base_a.with_angle(theta), &base_b.with_angle(phi), truncations)?;
        binned.push(noisy_binned_probabilities(&dist, sigma));
    }
    let joints = [0, 1, 2, 3].map(|k| binned[k].p_plus_plus);
    let meta = BellMeta {
        engine: EngineKind::Fock,
        state: state.label.clone(),
        n_max: truncations.n_max_signal,
        grid: None,
        sigma0: (sigma / alpha, sigma / beta),
        alpha: Some(alpha),
        beta: Some(beta),
    };
    assemble(*angles, joints, binned[2].p_plus_a, binned[2].p_plus_b, meta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub alpha: f64,
    /// Kolmogorov distance between the law of `i / alpha` and the quadrature marginal.
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub state: String,
    pub theta: f64,
    pub phi: f64,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    pub fn strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].distance < w[0].distance)
    }
}

/// How closely the scaled difference `n_theta / alpha` at A follows the
/// quadrature `X_theta` as the local oscillator grows.
///
/// For each `alpha` the discrete CDF of `i / alpha` is compared with the CDF
/// of the reduced quadrature density at every atom, on both sides of each
/// jump. `phi` is carried for bookkeeping; a Schmidt-diagonal state's marginal
/// at A does not depend on either phase.
pub fn convergence_report(
    state: &SchmidtDiagonalState,
    theta: f64,
    phi: f64,
    alphas: &[f64],
    truncations: &Truncations,
) -> Result<ConvergenceReport> {
    let grid = QuadratureGrid::covering(state.effective_n_max(1e-20), 0.002)?;
    let xs = grid.points();
    let density = marginal_density(state, &xs);
    let mut cdf = Vec::with_capacity(xs.len());
    let mut acc = 0.0;
    cdf.push(0.0);
    for k in 1..xs.len() {
        acc += 0.5 * (density[k - 1] + density[k]) * (xs[k] - xs[k - 1]);
        cdf.push(acc);
    }
    let continuous_cdf = |x: f64| -> f64 {
        if x <= xs[0] {
            return 0.0;
        }
        if x >= xs[xs.len() - 1] {
            return 1.0;
        }
        let pos = (x - xs[0]) / grid.step;
        let k = (pos.floor() as usize).min(xs.len() - 2);
        let frac = pos - k as f64;
        cdf[k] + frac * (cdf[k + 1] - cdf[k])
    };

    let weights = state.weights();
    let mut rows = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let kernel = measurement_kernel(alpha, theta, truncations)?;
        let mut below = 0.0;
        let mut distance: f64 = 0.0;
        for i in kernel.outcomes() {
            let p: f64 = weights
                .iter()
                .take(truncations.n_max_signal + 1)
                .enumerate()
                .map(|(n, w)| w * kernel.diagonal(i, n))
                .sum();
            let target = continuous_cdf(i as f64 / alpha);
            distance = distance.max((below - target).abs());
            below += p;
            distance = distance.max((below - target).abs());
        }
        rows.push(ConvergenceRow { alpha, distance });
    }
    Ok(ConvergenceReport {
        state: state.label.clone(),
        theta,
        phi,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad_bell::{ch_statistic, NoiseModel};
    use crate::states::{pair_coherent, two_mode_squeezed};
    use approx::assert_abs_diff_eq;

    /// From a separate script that expands the beam splitter by the binomial
    /// theorem with exact integer sums and keeps the local oscillator to 1e-300.
    const S_PC_ALPHA5: f64 = 1.012_829_971_313_298;
    const S_PC_ALPHA10: f64 = 1.015_062_897_737_268;
    const SINGLE_PC_ALPHA5: f64 = 0.516_462_795_426_886;

    fn pc() -> SchmidtDiagonalState {
        pair_coherent(1.1, 60).unwrap()
    }

    #[test]
    fn matches_binomial_oracle() {
        let angles = AngleQuad::pair_coherent_default();
        let t = Truncations::default();
        let r5 = ch_statistic_exact(&pc(), 5.0, 5.0, &angles, 0.0, &t).unwrap();
        assert_abs_diff_eq!(r5.s, S_PC_ALPHA5, epsilon = 5e-9);
        assert_abs_diff_eq!(r5.single_a, SINGLE_PC_ALPHA5, epsilon = 5e-9);
        assert_eq!(r5.single_a, r5.single_b);
        let r10 = ch_statistic_exact(&pc(), 10.0, 10.0, &angles, 0.0, &t).unwrap();
        assert_abs_diff_eq!(r10.s, S_PC_ALPHA10, epsilon = 5e-9);
    }

    #[test]
    fn approaches_quadrature_limit() {
        let angles = AngleQuad::pair_coherent_default();
        let limit = ch_statistic(&pc(), &angles, NoiseModel::none(), &QuadratureGrid::default())
            .unwrap()
            .s;
        let t = Truncations::default();
        let s: Vec<f64> = [5.0, 10.0, 20.0]
            .iter()
            .map(|&a| ch_statistic_exact(&pc(), a, a, &angles, 0.0, &t).unwrap().s)
            .collect();
        assert!(s[0] < s[1] && s[1] < s[2] && s[2] < limit, "{s:?} vs {limit}");
        assert!((s[2] - limit).abs() <= 1e-3);
        assert!(s.iter().all(|v| *v > 1.0));
    }

    #[test]
    fn vacuum_gives_one_half_with_noise() {
        let vac = SchmidtDiagonalState::vacuum();
        let angles = AngleQuad::new(0.3, -1.0, 2.0, 0.7);
        let t = Truncations::default();
        for sigma in [0.5, 3.0] {
            let r = ch_statistic_exact(&vac, 5.0, 7.0, &angles, sigma, &t).unwrap();
            assert_abs_diff_eq!(r.s, 0.5, epsilon = 1e-9);
            assert_abs_diff_eq!(r.single_a, 0.5, epsilon = 1e-9);
        }
        // Without noise the inclusive zero adds half the atom at i = 0, which
        // fades as the local oscillator grows.
        let bias: Vec<f64> = [5.0, 10.0, 20.0]
            .iter()
            .map(|&a| ch_statistic_exact(&vac, a, a, &angles, 0.0, &t).unwrap().s - 0.5)
            .collect();
        assert!(bias[0] > bias[1] && bias[1] > bias[2] && bias[2] > 0.0, "{bias:?}");
    }

    #[test]
    fn noise_is_applied_in_photon_units() {
        let angles = AngleQuad::pair_coherent_default();
        let t = Truncations::default();
        let r = ch_statistic_exact(&pc(), 10.0, 10.0, &angles, 3.0, &t).unwrap();
        assert_eq!(r.meta.sigma0, (0.3, 0.3));
        assert!(r.s < S_PC_ALPHA10);
        let swamped = ch_statistic_exact(&pc(), 10.0, 10.0, &angles, 1e6, &t).unwrap();
        assert_abs_diff_eq!(swamped.s, 0.5, epsilon = 1e-6);
    }

    #[test]
    fn squeezed_vacuum_does_not_violate() {
        let sq = two_mode_squeezed(0.5, 40).unwrap();
        let t = Truncations {
            n_max_signal: 18,
            ..Default::default()
        };
        for angles in [
            AngleQuad::pair_coherent_default(),
            AngleQuad::new(0.0, 0.4, 1.2, -0.9),
        ] {
            for sigma in [0.0, 2.0] {
                let r = ch_statistic_exact(&sq, 8.0, 8.0, &angles, sigma, &t).unwrap();
                assert!(r.s <= 1.0 + 1e-6, "{}", r.s);
            }
        }
    }

    #[test]
    fn convergence_is_monotone() {
        let t = Truncations::default();
        let alphas = [5.0, 10.0, 20.0];
        let rep = convergence_report(&pc(), 0.0, -std::f64::consts::FRAC_PI_4, &alphas, &t).unwrap();
        assert!(rep.strictly_decreasing(), "{:?}", rep.rows);
        let vac = convergence_report(&SchmidtDiagonalState::vacuum(), 0.0, 0.0, &alphas, &t).unwrap();
        assert!(vac.strictly_decreasing());
        assert!(vac.rows[2].distance <= 0.02);
    }
}
