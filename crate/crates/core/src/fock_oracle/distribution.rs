use ndarray::{Array1, Array2, Axis};
use num_complex::Complex64;

use super::kernel::{measurement_kernel, MeasurementKernel, Truncations};
use crate::error::{Error, Result};
use crate::hilbert::gaussian_cdf;
use crate::states::SchmidtDiagonalState;

/// Values above `-NEGATIVE_TOL` are roundoff and are clipped to zero.
pub const NEGATIVE_TOL: f64 = 1e-10;

/// Kernel rows whose largest diagonal entry is below this are dropped; by
/// positivity of each `M_i` they bound every entry in the row.
const ROW_CUTOFF: f64 = 1e-30;

/// Joint law of the photon-number differences `(i, j)` at A and B, stored
/// densely over a contiguous outcome window (everything outside is zero).
#[derive(Debug, Clone, PartialEq)]
pub struct JointDifferenceDistribution {
    a_min: i64,
    b_min: i64,
    probs: Array2<f64>,
}

impl JointDifferenceDistribution {
    pub fn from_dense(a_min: i64, b_min: i64, probs: Array2<f64>) -> Self {
        Self { a_min, b_min, probs }
    }

    /// A point mass at `(i, j)`.
    pub fn point(i: i64, j: i64) -> Self {
        Self::from_dense(i, j, Array2::from_elem((1, 1), 1.0))
    }

    pub fn get(&self, i: i64, j: i64) -> f64 {
        let (r, c) = (i - self.a_min, j - self.b_min);
        if r < 0 || c < 0 {
            return 0.0;
        }
        self.probs.get((r as usize, c as usize)).copied().unwrap_or(0.0)
    }

    pub fn a_outcomes(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.probs.nrows() as i64).map(move |r| r + self.a_min)
    }

    pub fn b_outcomes(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.probs.ncols() as i64).map(move |c| c + self.b_min)
    }

    /// Nonzero entries `(i, j, P)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, i64, f64)> + '_ {
        self.probs
            .indexed_iter()
            .filter(|(_, p)| **p != 0.0)
            .map(|((r, c), p)| (r as i64 + self.a_min, c as i64 + self.b_min, *p))
    }

    pub fn total(&self) -> f64 {
        self.probs.sum()
    }

    pub fn marginal_a(&self) -> Vec<(i64, f64)> {
        self.a_outcomes().zip(self.probs.sum_axis(Axis(1))).collect()
    }

    pub fn marginal_b(&self) -> Vec<(i64, f64)> {
        self.b_outcomes().zip(self.probs.sum_axis(Axis(0))).collect()
    }

    pub(crate) fn dense(&self) -> &Array2<f64> {
        &self.probs
    }
}

/// The state's coefficients padded or cut to the kernel's signal cutoff; the
/// cut must not discard more than `tail_tol` probability.
fn signal_coefficients(state: &SchmidtDiagonalState, truncations: &Truncations) -> Result<Vec<Complex64>> {
    let ns = truncations.n_max_signal;
    let dropped: f64 = state.coeffs.iter().skip(ns + 1).map(|c| c.norm_sqr()).sum();
    if dropped > truncations.tail_tol {
        return Err(Error::Truncation {
            what: format!("signal state {}", state.label),
            n_max: ns,
            tail: dropped,
            tol: truncations.tail_tol,
        });
    }
    let mut c = state.coeffs.clone();
    c.resize(ns + 1, Complex64::new(0.0, 0.0));
    Ok(c)
}

fn live_rows(kernel: &MeasurementKernel, coeffs: &[Complex64]) -> (usize, usize) {
    let width = kernel.n_max_signal + 1;
    let base = kernel.base();
    let significant = |row: usize| {
        (0..width)
            .filter(|&n| coeffs[n] != Complex64::new(0.0, 0.0))
            .any(|n| base[[row, n * width + n]] > ROW_CUTOFF)
    };
    let rows = base.nrows();
    let first = (0..rows).find(|&r| significant(r)).unwrap_or(0);
    let last = (0..rows).rev().find(|&r| significant(r)).unwrap_or(0);
    (first, last.max(first))
}

/// `P(i, j) = sum_{n,n'} c_n conj(c_n') M^A_i(n, n'; theta) M^B_j(n, n'; phi)`
/// from two prebuilt kernels (their `angle` fields set the phases).
pub fn joint_from_kernels(
    state: &SchmidtDiagonalState,
    kernel_a: &MeasurementKernel,
    kernel_b: &MeasurementKernel,
    truncations: &Truncations,
) -> Result<JointDifferenceDistribution> {
    if kernel_a.n_max_signal != truncations.n_max_signal || kernel_b.n_max_signal != truncations.n_max_signal {
        return Err(Error::InvalidParameter("kernel and truncation signal cutoffs differ".into()));
    }
    let coeffs = signal_coefficients(state, truncations)?;
    let width = truncations.n_max_signal + 1;
    let chi = kernel_a.angle + kernel_b.angle;

    // Real symmetric zero-phase kernels: the (n, n') and (n', n) terms are
    // complex conjugates, so only the real part of each weight survives.
    let pair_weight: Array1<f64> = (0..width * width)
        .map(|k| {
            let (n, np) = (k / width, k % width);
            let dn = n as f64 - np as f64;
            (coeffs[n] * coeffs[np].conj() * Complex64::from_polar(1.0, -dn * chi)).re
        })
        .collect();

    let (a0, a1) = live_rows(kernel_a, &coeffs);
    let (b0, b1) = live_rows(kernel_b, &coeffs);
    let a_block = kernel_a.base().slice(ndarray::s![a0..=a1, ..]);
    let b_block = kernel_b.base().slice(ndarray::s![b0..=b1, ..]);
    let weighted = &a_block * &pair_weight.view().insert_axis(Axis(0));
    let mut probs = weighted.dot(&b_block.t());

    let a_min = *kernel_a.outcomes().start() + a0 as i64;
    let b_min = *kernel_b.outcomes().start() + b0 as i64;
    for ((r, c), p) in probs.indexed_iter_mut() {
        if *p < 0.0 {
            if *p < -NEGATIVE_TOL {
                return Err(Error::NegativeProbability {
                    i: r as i64 + a_min,
                    j: c as i64 + b_min,
                    value: *p,
                });
            }
            *p = 0.0;
        }
    }
    Ok(JointDifferenceDistribution::from_dense(a_min, b_min, probs))
}

/// Joint photon-number-difference law for local oscillators `alpha` (A) and
/// `beta` (B) at analyzer phases `theta`, `phi`.
pub fn joint_difference_distribution(
    state: &SchmidtDiagonalState,
    alpha: f64,
    beta: f64,
    theta: f64,
    phi: f64,
    truncations: &Truncations,
) -> Result<JointDifferenceDistribution> {
    let kernel_a = measurement_kernel(alpha, theta, truncations)?;
    let kernel_b = if beta == alpha {
        kernel_a.with_angle(phi)
    } else {
        measurement_kernel(beta, phi, truncations)?
    };
    joint_from_kernels(state, &kernel_a, &kernel_b, truncations)
}

/// Sign-binned probabilities after Gaussian photon-number noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinnedProbabilities {
    pub p_plus_plus: f64,
    pub p_plus_a: f64,
    pub p_plus_b: f64,
}

/// `P(noise >= -i)`: `Phi(i / sigma)`, or for `sigma = 0` the rule that a
/// difference of zero counts as `+`.
pub fn plus_probability(i: i64, sigma: f64) -> f64 {
    if sigma > 0.0 {
        gaussian_cdf(i as f64 / sigma)
    } else if i >= 0 {
        1.0
    } else {
        0.0
    }
}

/// `P++ = sum_{i,j} P(i, j) P^A(noise >= -i) P^B(noise >= -j)` and the two
/// singles, with equal noise `sigma` (photon units) at both sides.
pub fn noisy_binned_probabilities(dist: &JointDifferenceDistribution, sigma: f64) -> BinnedProbabilities {
    noisy_binned_probabilities_sided(dist, sigma, sigma)
}

pub fn noisy_binned_probabilities_sided(
    dist: &JointDifferenceDistribution,
    sigma_a: f64,
    sigma_b: f64,
) -> BinnedProbabilities {
    let wa: Array1<f64> = dist.a_outcomes().map(|i| plus_probability(i, sigma_a)).collect();
    let wb: Array1<f64> = dist.b_outcomes().map(|j| plus_probability(j, sigma_b)).collect();
    let probs = dist.dense();
    let row_sums = probs.sum_axis(Axis(1));
    let col_sums = probs.sum_axis(Axis(0));
    BinnedProbabilities {
        p_plus_plus: wa.dot(&probs.dot(&wb)),
        p_plus_a: wa.dot(&row_sums),
        p_plus_b: wb.dot(&col_sums),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{pair_coherent, two_mode_squeezed};
    use approx::assert_abs_diff_eq;

    #[test]
    fn vacuum_signal_factorizes() {
        let t = Truncations {
            n_max_signal: 4,
            ..Default::default()
        };
        let vac = SchmidtDiagonalState::vacuum();
        let dist = joint_difference_distribution(&vac, 2.0, 3.0, 0.3, 1.1, &t).unwrap();
        let ka = measurement_kernel(2.0, 0.0, &t).unwrap();
        let kb = measurement_kernel(3.0, 0.0, &t).unwrap();
        for i in -8..=8 {
            for j in -8..=8 {
                assert_abs_diff_eq!(dist.get(i, j), ka.diagonal(i, 0) * kb.diagonal(j, 0), epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn mass_is_conserved() {
        let t = Truncations::default();
        let pc = pair_coherent(1.1, 60).unwrap();
        let dist = joint_difference_distribution(&pc, 5.0, 5.0, 0.0, -0.7, &t).unwrap();
        assert_abs_diff_eq!(dist.total(), 1.0, epsilon = 1e-6);
        assert!(dist.iter().all(|(_, _, p)| p >= 0.0));
    }

    #[test]
    fn marginals_have_parity() {
        let t = Truncations::default();
        for state in [pair_coherent(1.1, 60).unwrap(), two_mode_squeezed(0.4, 60).unwrap()] {
            let dist = joint_difference_distribution(&state, 4.0, 4.0, 0.2, 0.9, &t).unwrap();
            let marginal = dist.marginal_a();
            for (i, p) in &marginal {
                assert_abs_diff_eq!(*p, dist.marginal_a().iter().find(|(k, _)| *k == -i).map_or(0.0, |x| x.1), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn exchange_symmetry() {
        let t = Truncations::default();
        let pc = pair_coherent(1.1, 60).unwrap();
        let d1 = joint_difference_distribution(&pc, 4.0, 4.0, 0.3, -1.2, &t).unwrap();
        let d2 = joint_difference_distribution(&pc, 4.0, 4.0, -1.2, 0.3, &t).unwrap();
        for (i, j, p) in d1.iter() {
            assert_abs_diff_eq!(p, d2.get(j, i), epsilon = 1e-14);
        }
    }

    #[test]
    fn binning_of_point_masses() {
        let origin = JointDifferenceDistribution::point(0, 0);
        let noisy = noisy_binned_probabilities(&origin, 3.0);
        assert_abs_diff_eq!(noisy.p_plus_plus, 0.25, epsilon = 1e-15);
        let clean = noisy_binned_probabilities(&origin, 0.0);
        assert_eq!(clean.p_plus_plus, 1.0);
        assert_eq!(clean.p_plus_a, 1.0);

        let off = JointDifferenceDistribution::point(-1, 2);
        let clean = noisy_binned_probabilities(&off, 0.0);
        assert_eq!((clean.p_plus_plus, clean.p_plus_a, clean.p_plus_b), (0.0, 0.0, 1.0));
    }

    #[test]
    fn huge_noise_saturates() {
        let t = Truncations::default();
        let pc = pair_coherent(1.1, 60).unwrap();
        let dist = joint_difference_distribution(&pc, 5.0, 5.0, 0.0, -0.7, &t).unwrap();
        let b = noisy_binned_probabilities(&dist, 1e9);
        assert_abs_diff_eq!(b.p_plus_plus, 0.25, epsilon = 1e-6);
        assert_abs_diff_eq!(b.p_plus_a, 0.5, epsilon = 1e-6);
    }

    #[test]
    fn signal_cutoff_guard() {
        let t = Truncations {
            n_max_signal: 3,
            ..Default::default()
        };
        let pc = pair_coherent(1.1, 60).unwrap();
        assert!(matches!(
            joint_difference_distribution(&pc, 3.0, 3.0, 0.0, 0.0, &t),
            Err(Error::Truncation { .. })
        ));
    }
}
