//! Numerical tests of macroscopic local realism.
//!
//! Two experiments are modelled. The first is a Bell-Clauser-Horne test on
//! sign-binned, noise-smeared quadrature (or photon-number-difference)
//! measurements of a pair-coherent state. The second is the EPR inference
//! criterion for two-mode squeezed light read out through strong local
//! oscillators.
//!
//! Two independent engines evaluate the Bell statistic:
//!
//! * [`quad_bell`] works in the large local-oscillator limit, where the
//!   photon-number difference becomes `E * X_theta` and the measurement is a
//!   quadrature phase amplitude.
//! * [`fock_oracle`] simulates the homodyne apparatus exactly in a truncated
//!   Fock space at finite local-oscillator amplitude.
//!
//! Quadratures use the convention `X_theta = a e^{-i theta} + a^dag e^{i theta}`,
//! so the vacuum variance is 1.

pub mod bell;
pub mod epr;
pub mod error;
pub mod fock_oracle;
pub mod hilbert;
pub mod quad_bell;
pub mod states;

pub use bell::{AngleQuad, BellResult, EngineKind, JointTerm};
pub use error::{Error, Result};
pub use hilbert::QuadratureGrid;
pub use states::{GaussianCovariance, SchmidtDiagonalState};

/// Library version embedded in output headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
