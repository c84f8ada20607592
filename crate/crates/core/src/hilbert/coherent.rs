use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default bound on the probability a truncated expansion may discard.
pub const DEFAULT_TAIL_TOL: f64 = 1e-9;

/// Fock amplitudes `e^{-|a|^2/2} a^n / sqrt(n!)` of the coherent state `|a>`
/// for `n = 0..=n_max`, with the default tail tolerance.
pub fn coherent_amplitudes(amp: Complex64, n_max: usize) -> Result<Vec<Complex64>> {
    coherent_amplitudes_with_tol(amp, n_max, DEFAULT_TAIL_TOL)
}

/// As [`coherent_amplitudes`], failing with [`Error::Truncation`] when the
/// retained probability is below `1 - tail_tol`.
///
/// Magnitudes are built in log space by the ratio `|c_n| / |c_{n-1}| = |a| / sqrt n`,
/// so neither `n!` nor `e^{-|a|^2/2}` is ever formed on its own.
pub fn coherent_amplitudes_with_tol(
    amp: Complex64,
    n_max: usize,
    tail_tol: f64,
) -> Result<Vec<Complex64>> {
    let modulus = amp.norm();
    if !modulus.is_finite() {
        return Err(Error::InvalidParameter(format!("coherent amplitude {amp} is not finite")));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); n_max + 1];
    if modulus == 0.0 {
        out[0] = Complex64::new(1.0, 0.0);
        return Ok(out);
    }
    let phase = amp.arg();
    let ln_mod = modulus.ln();
    let mut ln_c = -0.5 * modulus * modulus;
    let mut retained = 0.0;
    for (n, slot) in out.iter_mut().enumerate() {
        if n > 0 {
            ln_c += ln_mod - 0.5 * (n as f64).ln();
        }
        let c = Complex64::from_polar(ln_c.exp(), phase * n as f64);
        retained += c.norm_sqr();
        *slot = c;
    }
    let tail = (1.0 - retained).max(0.0);
    if tail > tail_tol {
        return Err(Error::Truncation {
            what: format!("coherent state |{modulus}|"),
            n_max,
            tail,
            tol: tail_tol,
        });
    }
    Ok(out)
}

/// Smallest cutoff at which a coherent state of modulus `modulus` loses at
/// most `tail_tol` of its probability.
pub fn coherent_min_n_max(modulus: f64, tail_tol: f64) -> usize {
    if modulus == 0.0 {
        return 0;
    }
    let ln_mod = modulus.ln();
    let mut ln_p = -modulus * modulus;
    let mut retained = ln_p.exp();
    let mut n = 0;
    // Past the Poisson mean the terms shrink, so the sum only climbs.
    while 1.0 - retained > tail_tol || (n as f64) < modulus * modulus {
        n += 1;
        ln_p += 2.0 * ln_mod - (n as f64).ln();
        retained += ln_p.exp();
        if n > 100_000_000 {
            break;
        }
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn minimal_cutoff_passes_guard() {
        for modulus in [0.5, 2.0, 3.0, 20.0] {
            let n = coherent_min_n_max(modulus, 1e-9);
            assert!(coherent_amplitudes_with_tol(Complex64::new(modulus, 0.0), n, 1e-9).is_ok());
            assert!(coherent_amplitudes_with_tol(Complex64::new(modulus, 0.0), n - 1, 1e-9).is_err());
        }
        assert_eq!(coherent_min_n_max(0.0, 1e-9), 0);
    }

    #[test]
    fn vacuum() {
        let c = coherent_amplitudes(Complex64::new(0.0, 0.0), 5).unwrap();
        assert_eq!(c.len(), 6);
        assert_eq!(c[0], Complex64::new(1.0, 0.0));
        assert!(c[1..].iter().all(|z| *z == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn poisson_weights() {
        let c = coherent_amplitudes(Complex64::new(2.0, 0.0), 40).unwrap();
        let total: f64 = c.iter().map(|z| z.norm_sqr()).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        // Poisson(4) at 4: 4^4 e^-4 / 4!
        let p4 = 256.0 * (-4.0f64).exp() / 24.0;
        assert_abs_diff_eq!(c[4].norm_sqr(), p4, epsilon = 1e-14);
        assert_abs_diff_eq!(c[4].norm_sqr(), 0.19537, epsilon = 1e-5);
    }

    #[test]
    fn phase_winds_with_n() {
        let amp = Complex64::from_polar(1.5, 0.3);
        let c = coherent_amplitudes(amp, 30).unwrap();
        for n in 1..10 {
            let unit = c[n] / c[n].norm();
            let expected = Complex64::from_polar(1.0, 0.3 * n as f64);
            assert_abs_diff_eq!((unit - expected).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn large_amplitude_does_not_underflow_to_nothing() {
        // e^{-|a|^2/2} alone underflows for |a| = 40.
        let c = coherent_amplitudes(Complex64::new(40.0, 0.0), 1900).unwrap();
        let total: f64 = c.iter().map(|z| z.norm_sqr()).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn undersized_cutoff_is_rejected() {
        let err = coherent_amplitudes(Complex64::new(3.0, 0.0), 5).unwrap_err();
        assert!(matches!(err, Error::Truncation { n_max: 5, .. }));
    }
}
