use std::f64::consts::{PI, SQRT_2};

use ndarray::Array2;
use libm::erfc;

/// Oscillator eigenfunctions `phi_0(x) ..= phi_{n_max}(x)` of the quadrature
/// `X = a + a^dag` (vacuum variance 1):
///
/// `phi_n(x) = (2 pi)^{-1/4} (2^n n!)^{-1/2} H_n(x / sqrt 2) e^{-x^2 / 4}`.
///
/// Evaluated with the normalized three-term recurrence
/// `phi_{n+1} = (x phi_n - sqrt(n) phi_{n-1}) / sqrt(n + 1)`, which stays finite
/// far beyond the point where raw Hermite polynomials overflow.
pub fn hermite_wavefunction_row(n_max: usize, x: f64) -> Vec<f64> {
    let mut row = Vec::with_capacity(n_max + 1);
    let phi0 = (2.0 * PI).powf(-0.25) * (-0.25 * x * x).exp();
    row.push(phi0);
    if n_max == 0 {
        return row;
    }
    row.push(x * phi0);
    for n in 1..n_max {
        let nf = n as f64;
        let next = (x * row[n] - nf.sqrt() * row[n - 1]) / (nf + 1.0).sqrt();
        row.push(next);
    }
    row
}

/// `table[[n, k]] = phi_n(xs[k])`.
pub fn hermite_table(n_max: usize, xs: &[f64]) -> Array2<f64> {
    let mut table = Array2::zeros((n_max + 1, xs.len()));
    for (k, &x) in xs.iter().enumerate() {
        for (n, v) in hermite_wavefunction_row(n_max, x).into_iter().enumerate() {
            table[[n, k]] = v;
        }
    }
    table
}

/// Standard normal CDF.
pub fn gaussian_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x >= 40.0 {
        return 1.0;
    }
    if x <= -40.0 {
        return 0.0;
    }
    0.5 * erfc(-x / SQRT_2)
}

/// Modified Bessel function `I_0(x) = sum_k (x/2)^{2k} / (k!)^2`, summed until
/// the next term drops below `1e-16` of the partial sum.
pub fn bessel_i0(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * k);
        sum += term;
        if term < 1e-16 * sum {
            break;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    /// erf from its Maclaurin series, summed in plain f64. Accurate to a few
    /// ulps for |x| <= 3, independent of libm.
    fn erf_series(x: f64) -> f64 {
        let mut term = x;
        let mut sum = x;
        let mut n = 0.0;
        loop {
            n += 1.0;
            term *= -x * x / n;
            let contrib = term / (2.0 * n + 1.0);
            sum += contrib;
            if contrib.abs() < 1e-18 {
                break;
            }
        }
        2.0 / PI.sqrt() * sum
    }

    #[test]
    fn ground_state_at_origin() {
        let row = hermite_wavefunction_row(0, 0.0);
        assert_eq!(row.len(), 1);
        assert_abs_diff_eq!(row[0], 0.631_618_777_746_064_7, epsilon = 1e-14);
        assert_abs_diff_eq!(row[0], (2.0 * PI).powf(-0.25), epsilon = 1e-15);
    }

    #[test]
    fn odd_states_vanish_at_origin() {
        let row = hermite_wavefunction_row(2, 0.0);
        assert_eq!(row[1], 0.0);
        // phi_2(0) = (2 pi)^{-1/4} H_2(0) / sqrt(8) = -(2 pi)^{-1/4} / sqrt 2
        assert_abs_diff_eq!(row[2], -(2.0 * PI).powf(-0.25) / SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn low_orders_match_closed_forms() {
        // H_1(y) = 2y, H_3(y) = 8y^3 - 12y at y = x / sqrt 2.
        for &x in &[-2.3, -0.4, 0.7, 1.3, 4.1] {
            let row = hermite_wavefunction_row(3, x);
            let g = (2.0 * PI).powf(-0.25) * (-x * x / 4.0).exp();
            let y = x / SQRT_2;
            assert_abs_diff_eq!(row[1], g * 2.0 * y / 2f64.sqrt(), epsilon = 1e-14);
            let h3 = 8.0 * y.powi(3) - 12.0 * y;
            assert_abs_diff_eq!(row[3], g * h3 / 48f64.sqrt(), epsilon = 1e-13);
        }
    }

    #[test]
    fn normalized_through_order_forty() {
        // Fine trapezoid sum over [-20, 20]; the Gaussian tails make the rule
        // spectrally accurate.
        let step = 1e-3;
        let n = 40;
        let mut norms = vec![0.0; n + 1];
        let points = (40.0 / step) as usize + 1;
        for k in 0..points {
            let x = -20.0 + k as f64 * step;
            for (m, v) in hermite_wavefunction_row(n, x).iter().enumerate() {
                norms[m] += v * v * step;
            }
        }
        for (m, norm) in norms.iter().enumerate() {
            assert!((norm - 1.0).abs() < 1e-8, "n = {m}: {norm}");
        }
        // A mid-range row is finite and well-scaled.
        let row = hermite_wavefunction_row(40, 1.3);
        assert!(row.iter().all(|v| v.is_finite() && v.abs() < 1.0));
    }

    #[test]
    fn high_orders_stay_finite() {
        let row = hermite_wavefunction_row(400, 30.0);
        assert!(row.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn cdf_anchor_values() {
        assert_eq!(gaussian_cdf(0.0), 0.5);
        assert_eq!(gaussian_cdf(40.0), 1.0);
        assert_eq!(gaussian_cdf(f64::INFINITY), 1.0);
        assert_eq!(gaussian_cdf(f64::NEG_INFINITY), 0.0);
        assert_abs_diff_eq!(gaussian_cdf(1.0), 0.841_344_746_068_542_9, epsilon = 1e-12);
    }

    #[test]
    fn cdf_matches_series_oracle() {
        for k in -40..=40 {
            let x = k as f64 * 0.1;
            let oracle = 0.5 * (1.0 + erf_series(x / SQRT_2));
            assert_abs_diff_eq!(gaussian_cdf(x), oracle, epsilon = 1e-12);
        }
    }

    #[test]
    fn bessel_anchor_values() {
        assert_eq!(bessel_i0(0.0), 1.0);
        // Series truncated at 30 terms in exact-ish arithmetic: I0(2.42).
        let mut oracle = 0.0;
        let mut fact = 1.0;
        for k in 0..30 {
            if k > 0 {
                fact *= k as f64;
            }
            oracle += 1.21f64.powi(2 * k) / (fact * fact);
        }
        assert_abs_diff_eq!(bessel_i0(2.42), oracle, epsilon = 1e-13);
        assert_abs_diff_eq!(bessel_i0(2.42), 3.0956, epsilon = 1e-4);
        assert!(bessel_i0(3.0) > bessel_i0(2.0));
    }

    proptest! {
        #[test]
        fn cdf_symmetry(x in -60.0f64..60.0) {
            prop_assert!((gaussian_cdf(x) + gaussian_cdf(-x) - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn wavefunction_parity(x in 0.0f64..12.0) {
            let pos = hermite_wavefunction_row(60, x);
            let neg = hermite_wavefunction_row(60, -x);
            for n in 0..=60 {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                prop_assert_eq!(neg[n], sign * pos[n]);
            }
        }
    }
}
