//! Exact simulation of the homodyne apparatus at finite local-oscillator
//! amplitude.
//!
//! At each side the signal mode is mixed with a coherent local oscillator on a
//! balanced beam splitter and the photon-number difference `i` of the two
//! outputs is recorded. For a Schmidt-diagonal signal state the joint law of
//! `(i, j)` factors through one kernel per side:
//! `P(i, j) = sum_{n,n'} c_n conj(c_n') M^A_i(n, n') M^B_j(n, n')`.

mod distribution;
mod exact;
mod kernel;

pub use distribution::{
    joint_difference_distribution, joint_from_kernels, noisy_binned_probabilities,
    noisy_binned_probabilities_sided, plus_probability, BinnedProbabilities, JointDifferenceDistribution,
    NEGATIVE_TOL,
};
pub use exact::{ch_statistic_exact, convergence_report, ConvergenceReport, ConvergenceRow};
pub use kernel::{measurement_kernel, MeasurementKernel, Truncations};
