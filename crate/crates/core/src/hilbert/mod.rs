//! Special functions and truncated-Fock-space primitives.

mod beamsplitter;
mod coherent;
mod grid;
mod special;

pub use beamsplitter::{beamsplitter_unitary, BlockColumns, TruncatedUnitary, UnitaryBlock};
pub use coherent::{coherent_amplitudes, coherent_amplitudes_with_tol, coherent_min_n_max, DEFAULT_TAIL_TOL};
pub use grid::QuadratureGrid;
pub use special::{bessel_i0, gaussian_cdf, hermite_table, hermite_wavefunction_row};

/// Default per-mode photon cutoff for quadrature-limit work.
pub const DEFAULT_N_MAX: usize = 60;
