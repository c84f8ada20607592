//! EPR criterion for quadrature-correlated light read out as Schwinger spins.
//!
//! With strong local oscillators of amplitude `E`, the spin components at A are
//! `S_x = E X_0 / 2` and `S_y = E X_{pi/2} / 2`, and their uncertainty bound is
//! `|<S_z>| / 2 = E^2 / 4`. Inferring `S_x` and `S_y` from measurements at B
//! with errors whose product beats that bound demonstrates the EPR paradox;
//! since `E^2` is a macroscopic photon number, so is the margin by which it
//! is beaten.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::{GaussianCovariance, X0_A, X0_B, XP_A, XP_B};

/// Default photon count above which a margin counts as macroscopic.
pub const DEFAULT_MACROSCOPIC_THRESHOLD: f64 = 1e4;

/// Optimal linear inference of the A quadratures from the B quadratures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InferenceErrors {
    /// `min_g sqrt Var(X_0^A - g X_0^B)`.
    pub delta1: f64,
    /// `min_g sqrt Var(X_{pi/2}^A - g X_{pi/2}^B)`.
    pub delta2: f64,
    pub gain1: f64,
    pub gain2: f64,
}

/// Residual error of the best linear estimate `g X^B` of `X^A`:
/// `Var_min = Var_A - Cov^2 / Var_B` at `g = Cov / Var_B`.
pub fn inference_errors(cov: &GaussianCovariance) -> Result<InferenceErrors> {
    cov.validate()?;
    let fit = |a: usize, b: usize| -> Result<(f64, f64)> {
        let var_b = cov.var(b);
        if var_b <= 0.0 {
            return Err(Error::SingularCovariance(var_b));
        }
        let c = cov.cov(a, b);
        let gain = c / var_b;
        let var = (cov.var(a) - c * c / var_b).max(0.0);
        Ok((var.sqrt(), gain))
    };
    let (delta1, gain1) = fit(X0_A, X0_B)?;
    let (delta2, gain2) = fit(XP_A, XP_B)?;
    Ok(InferenceErrors {
        delta1,
        delta2,
        gain1,
        gain2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EprReport {
    /// Quadrature-unit inference errors.
    pub delta1: f64,
    pub delta2: f64,
    pub energy: f64,
    /// Spin-unit errors `E delta / 2` plus any apparatus error.
    pub delta_x: f64,
    pub delta_y: f64,
    pub product: f64,
    /// `|<S_z>| / 2 = E^2 / 4`.
    pub bound: f64,
    /// `2 |<S_z>| = E^2`, the photon number setting the scale of the test.
    pub sz_scale: f64,
    pub satisfied: bool,
}

/// Check `Delta_x Delta_y < E^2 / 4`.
pub fn epr_criterion(delta1: f64, delta2: f64, energy: f64) -> Result<EprReport> {
    epr_criterion_with_apparatus_error(delta1, delta2, energy, 0.0)
}

/// As [`epr_criterion`], with an extra spin-unit error added to both inferred
/// components (the intrinsic quantum error alone when zero).
pub fn epr_criterion_with_apparatus_error(
    delta1: f64,
    delta2: f64,
    energy: f64,
    apparatus_error: f64,
) -> Result<EprReport> {
    if !(energy.is_finite() && energy > 0.0) {
        return Err(Error::InvalidParameter(format!("energy E = {energy} must be positive")));
    }
    if !(delta1 > 0.0 && delta2 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "inference errors ({delta1}, {delta2}) must be positive"
        )));
    }
    if !(apparatus_error >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "apparatus error {apparatus_error} must be >= 0"
        )));
    }
    let delta_x = energy * delta1 / 2.0 + apparatus_error;
    let delta_y = energy * delta2 / 2.0 + apparatus_error;
    let product = delta_x * delta_y;
    let bound = energy * energy / 4.0;
    Ok(EprReport {
        delta1,
        delta2,
        energy,
        delta_x,
        delta_y,
        product,
        bound,
        sz_scale: energy * energy,
        satisfied: product < bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Margins {
    /// `2 (E/2 - Delta_x)` in photons.
    pub m1: f64,
    /// `2 (E/2 - Delta_y)` in photons.
    pub m2: f64,
    pub threshold: f64,
    pub macroscopic1: bool,
    pub macroscopic2: bool,
}

impl Margins {
    pub fn both_macroscopic(&self) -> bool {
        self.macroscopic1 && self.macroscopic2
    }
}

pub fn macroscopicity_margins(report: &EprReport, threshold: f64) -> Margins {
    let m1 = 2.0 * (report.energy / 2.0 - report.delta_x);
    let m2 = 2.0 * (report.energy / 2.0 - report.delta_y);
    Margins {
        m1,
        m2,
        threshold,
        macroscopic1: m1 >= threshold,
        macroscopic2: m2 >= threshold,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EprSweepRow {
    pub r: f64,
    pub report: EprReport,
    pub margins: Margins,
}

/// Criterion and margins for two-mode squeezed light over a grid of `(r, E)`,
/// row-major in `r`.
pub fn epr_sweep(rs: &[f64], energies: &[f64], threshold: f64) -> Result<Vec<EprSweepRow>> {
    let mut rows = Vec::with_capacity(rs.len() * energies.len());
    for &r in rs {
        let errors = inference_errors(&crate::states::tmsv_covariance(r))?;
        for &e in energies {
            let report = epr_criterion(errors.delta1, errors.delta2, e)?;
            rows.push(EprSweepRow {
                r,
                report,
                margins: macroscopicity_margins(&report, threshold),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::tmsv_covariance;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    /// Golden-section minimum of `Var(X^A - g X^B)` over `g`, using only the
    /// quadratic form of the covariance.
    fn numeric_min(cov: &GaussianCovariance, a: usize, b: usize) -> f64 {
        let f = |g: f64| {
            let mut w = [0.0; 4];
            w[a] = 1.0;
            w[b] = -g;
            cov.quadratic_form(w)
        };
        let (mut lo, mut hi) = (-10.0, 10.0);
        let ratio = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let x1 = hi - ratio * (hi - lo);
            let x2 = lo + ratio * (hi - lo);
            if f(x1) < f(x2) {
                hi = x2;
            } else {
                lo = x1;
            }
        }
        f(0.5 * (lo + hi)).sqrt()
    }

    #[test]
    fn vacuum_has_no_inference_power() {
        let e = inference_errors(&tmsv_covariance(0.0)).unwrap();
        assert_eq!((e.delta1, e.delta2), (1.0, 1.0));
        assert_eq!((e.gain1, e.gain2), (0.0, 0.0));
    }

    #[test]
    fn unit_squeezing() {
        let cov = tmsv_covariance(1.0);
        let e = inference_errors(&cov).unwrap();
        let expected = 1.0 / 2f64.cosh().sqrt();
        assert_abs_diff_eq!(e.delta1, expected, epsilon = 1e-12);
        assert_abs_diff_eq!(e.delta2, expected, epsilon = 1e-12);
        assert_abs_diff_eq!(e.delta1, 0.5156, epsilon = 1e-4);
        assert_abs_diff_eq!(e.delta1, numeric_min(&cov, X0_A, X0_B), epsilon = 1e-9);
        assert_abs_diff_eq!(e.delta2, numeric_min(&cov, XP_A, XP_B), epsilon = 1e-9);
        assert!(e.gain1 > 0.0 && e.gain2 < 0.0);
    }

    #[test]
    fn inference_error_decreases_with_squeezing() {
        let mut prev = f64::INFINITY;
        for k in 0..40 {
            let d = inference_errors(&tmsv_covariance(k as f64 * 0.1)).unwrap().delta1;
            assert!(d < prev);
            prev = d;
        }
    }

    #[test]
    fn vacuum_sits_on_the_boundary() {
        for e in [1.0, 100.0, 1e6] {
            let rep = epr_criterion(1.0, 1.0, e).unwrap();
            assert_eq!(rep.product, rep.bound);
            assert!(!rep.satisfied);
            assert_eq!(rep.sz_scale, e * e);
        }
    }

    #[test]
    fn criterion_at_unit_squeezing() {
        let d = 1.0 / 2f64.cosh().sqrt();
        let rep = epr_criterion(d, d, 100.0).unwrap();
        assert_abs_diff_eq!(rep.product, 2500.0 / 2f64.cosh(), epsilon = 1e-9);
        assert_abs_diff_eq!(rep.product, 664.506, epsilon = 1e-3);
        assert_eq!(rep.bound, 2500.0);
        assert!(rep.satisfied);
    }

    #[test]
    fn margins() {
        let d = 1.0 / 2f64.cosh().sqrt();
        let rep = epr_criterion(d, d, 1000.0).unwrap();
        let m = macroscopicity_margins(&rep, 100.0);
        assert_abs_diff_eq!(m.m1, 1000.0 * (1.0 - d), epsilon = 1e-9);
        assert_abs_diff_eq!(m.m1, 484.4, epsilon = 0.05);
        assert_eq!(m.m1, m.m2);
        assert!(m.both_macroscopic());

        let edge = epr_criterion(1.0, 1.0, 40.0).unwrap();
        let m = macroscopicity_margins(&edge, 1e-9);
        assert_eq!(m.m1, 0.0);
        assert!(!m.macroscopic1);
    }

    #[test]
    fn apparatus_error_hook() {
        let d = 1.0 / 2f64.cosh().sqrt();
        let clean = epr_criterion(d, d, 100.0).unwrap();
        let noisy = epr_criterion_with_apparatus_error(d, d, 100.0, 5.0).unwrap();
        assert_eq!(noisy.delta_x, clean.delta_x + 5.0);
        assert!(noisy.product > clean.product);
        let swamped = epr_criterion_with_apparatus_error(d, d, 100.0, 30.0).unwrap();
        assert!(!swamped.satisfied);
    }

    #[test]
    fn bad_inputs() {
        assert!(epr_criterion(1.0, 1.0, 0.0).is_err());
        assert!(epr_criterion(0.0, 1.0, 10.0).is_err());
        let mut m = tmsv_covariance(0.3).matrix;
        m[2][2] = -1.0;
        assert!(inference_errors(&GaussianCovariance { matrix: m, mean: [0.0; 4] }).is_err());
    }

    #[test]
    fn sweep_shape() {
        let rows = epr_sweep(&[0.0, 0.5], &[10.0, 100.0, 1000.0], DEFAULT_MACROSCOPIC_THRESHOLD).unwrap();
        assert_eq!(rows.len(), 6);
        assert!(!rows[0].report.satisfied);
        assert!(rows[5].report.satisfied);
        assert_eq!(rows[4].report.energy, 100.0);
    }

    proptest! {
        #[test]
        fn product_law(r in 0.0f64..3.0) {
            let e = inference_errors(&tmsv_covariance(r)).unwrap();
            prop_assert!((e.delta1 * e.delta2 - 1.0 / (2.0 * r).cosh()).abs() <= 1e-10);
        }

        #[test]
        fn satisfied_flag_ignores_energy(d1 in 0.05f64..2.0, d2 in 0.05f64..2.0, e in 1.0f64..1e6) {
            let a = epr_criterion(d1, d2, e).unwrap().satisfied;
            let b = epr_criterion(d1, d2, 1.0).unwrap().satisfied;
            prop_assert_eq!(a, b);
        }

        #[test]
        fn margins_scale_with_energy(r in 0.0f64..2.0, e in 1.0f64..1e5) {
            let errs = inference_errors(&tmsv_covariance(r)).unwrap();
            let m1 = macroscopicity_margins(&epr_criterion(errs.delta1, errs.delta2, e).unwrap(), 1.0);
            let m2 = macroscopicity_margins(&epr_criterion(errs.delta1, errs.delta2, 2.0 * e).unwrap(), 1.0);
            prop_assert!((m2.m1 - 2.0 * m1.m1).abs() <= 1e-9 * m2.m1.abs().max(1.0));
        }
    }
}
