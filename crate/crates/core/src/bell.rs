//! Quantities shared by both Bell engines.

use serde::{Deserialize, Serialize};

use crate::hilbert::QuadratureGrid;

/// Analyzer phases `(theta, phi, theta', phi')` of the Clauser-Horne statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AngleQuad {
    pub theta: f64,
    pub phi: f64,
    pub theta_prime: f64,
    pub phi_prime: f64,
}

impl AngleQuad {
    pub fn new(theta: f64, phi: f64, theta_prime: f64, phi_prime: f64) -> Self {
        Self {
            theta,
            phi,
            theta_prime,
            phi_prime,
        }
    }

    /// `(0, -pi/4, pi/2, -3pi/4)`, the setting used for the pair-coherent state.
    pub fn pair_coherent_default() -> Self {
        use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
        Self::new(0.0, -FRAC_PI_4, FRAC_PI_2, -3.0 * FRAC_PI_4)
    }

    pub fn is_finite(&self) -> bool {
        [self.theta, self.phi, self.theta_prime, self.phi_prime]
            .iter()
            .all(|a| a.is_finite())
    }

    /// Each angle reduced to `[0, 2 pi)`.
    pub fn canonical(&self) -> Self {
        let tau = std::f64::consts::TAU;
        Self::new(
            self.theta.rem_euclid(tau),
            self.phi.rem_euclid(tau),
            self.theta_prime.rem_euclid(tau),
            self.phi_prime.rem_euclid(tau),
        )
    }

    /// The four `(A, B)` settings in numerator order:
    /// `(theta, phi), (theta, phi'), (theta', phi), (theta', phi')`.
    pub fn pairs(&self) -> [(f64, f64); 4] {
        [
            (self.theta, self.phi),
            (self.theta, self.phi_prime),
            (self.theta_prime, self.phi),
            (self.theta_prime, self.phi_prime),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EngineKind {
    /// Large local-oscillator limit.
    Quadrature,
    /// Truncated Fock-space simulation at finite local-oscillator amplitude.
    Fock,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointTerm {
    pub theta: f64,
    pub phi: f64,
    pub p_plus_plus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BellMeta {
    pub engine: EngineKind,
    pub state: String,
    pub n_max: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<QuadratureGrid>,
    /// Noise standard deviation in quadrature units (A side, B side).
    pub sigma0: (f64, f64),
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

/// The Clauser-Horne ratio
/// `S = [P++(theta,phi) - P++(theta,phi') + P++(theta',phi) + P++(theta',phi')] / [P+A(theta') + P+B(phi)]`
/// with all its ingredients. Local hidden-variable models give `S <= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BellResult {
    pub s: f64,
    pub angles: AngleQuad,
    pub joint: [JointTerm; 4],
    pub single_a: f64,
    pub single_b: f64,
    pub meta: BellMeta,
}

impl BellResult {
    pub fn violates(&self) -> bool {
        self.s > 1.0
    }

    pub fn numerator(&self) -> f64 {
        let [a, b, c, d] = self.joint.map(|t| t.p_plus_plus);
        a - b + c + d
    }

    pub fn denominator(&self) -> f64 {
        self.single_a + self.single_b
    }
}

/// Assemble `S` from its pieces, rejecting a vanishing denominator.
pub(crate) fn assemble(
    angles: AngleQuad,
    joints: [f64; 4],
    single_a: f64,
    single_b: f64,
    meta: BellMeta,
) -> crate::Result<BellResult> {
    let denominator = single_a + single_b;
    if denominator < 1e-12 {
        return Err(crate::Error::DegenerateDenominator(denominator));
    }
    let pairs = angles.pairs();
    let joint: [JointTerm; 4] = std::array::from_fn(|k| JointTerm {
        theta: pairs[k].0,
        phi: pairs[k].1,
        p_plus_plus: joints[k],
    });
    let s = (joints[0] - joints[1] + joints[2] + joints[3]) / denominator;
    Ok(BellResult {
        s,
        angles,
        joint,
        single_a,
        single_b,
        meta,
    })
}
