use std::ops::RangeInclusive;
use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{coherent_amplitudes_with_tol, coherent_min_n_max, BlockColumns, DEFAULT_TAIL_TOL};

/// Fock cutoffs for the homodyne simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Truncations {
    /// Cutoff on the signal mode (`a_-` or `b_-`).
    pub n_max_signal: usize,
    /// Cutoff on the local-oscillator mode; `None` picks the smallest one that
    /// keeps the coherent-state tail within `tail_tol`.
    #[serde(default)]
    pub n_max_lo: Option<usize>,
    #[serde(default = "default_tail_tol")]
    pub tail_tol: f64,
}

fn default_tail_tol() -> f64 {
    DEFAULT_TAIL_TOL
}

impl Default for Truncations {
    fn default() -> Self {
        Self {
            n_max_signal: 12,
            n_max_lo: None,
            tail_tol: DEFAULT_TAIL_TOL,
        }
    }
}

impl Truncations {
    pub fn lo_cutoff(&self, alpha: f64) -> usize {
        self.n_max_lo
            .unwrap_or_else(|| coherent_min_n_max(alpha.abs(), self.tail_tol))
    }
}

/// POVM of the photon-number difference `i = n(c'_+) - n(c'_-)` restricted to
/// the signal mode, for a coherent local oscillator of real amplitude `alpha`:
///
/// `M_i(n, n') = <n'| Pi_i |n>`, with `Pi_i` the projector on outcome `i`
/// behind the mixer, so a signal state `sum_n c_n |n>` yields
/// `P(i) = sum_{n,n'} c_n conj(c_n') M_i(n, n')`.
///
/// The phase enters only as `M_i(n, n'; theta) = e^{-i (n - n') theta} M_i(n, n'; 0)`,
/// so the zero-phase matrices are real symmetric and are shared between
/// kernels that differ only in `angle`.
#[derive(Debug, Clone)]
pub struct MeasurementKernel {
    pub angle: f64,
    pub alpha: f64,
    pub n_max_signal: usize,
    pub n_max_lo: usize,
    outcome_min: i64,
    /// `base[[i - outcome_min, n * (n_max_signal + 1) + n']]` at zero phase.
    base: Arc<Array2<f64>>,
}

impl MeasurementKernel {
    pub fn outcomes(&self) -> RangeInclusive<i64> {
        self.outcome_min..=self.outcome_min + self.base.nrows() as i64 - 1
    }

    pub fn num_outcomes(&self) -> usize {
        self.base.nrows()
    }

    fn column(&self, n: usize, n_prime: usize) -> usize {
        n * (self.n_max_signal + 1) + n_prime
    }

    pub(crate) fn row(&self, i: i64) -> Option<usize> {
        let r = i - self.outcome_min;
        (0..self.base.nrows() as i64).contains(&r).then_some(r as usize)
    }

    pub(crate) fn base(&self) -> &Array2<f64> {
        &self.base
    }

    /// `M_i(n, n')` at this kernel's phase; zero outside the outcome range.
    pub fn entry(&self, i: i64, n: usize, n_prime: usize) -> Complex64 {
        assert!(n <= self.n_max_signal && n_prime <= self.n_max_signal);
        let Some(row) = self.row(i) else {
            return Complex64::new(0.0, 0.0);
        };
        let dn = n as f64 - n_prime as f64;
        self.base[[row, self.column(n, n_prime)]] * Complex64::from_polar(1.0, -dn * self.angle)
    }

    /// `P(i | n)`, the outcome law for the Fock input `|n>`.
    pub fn diagonal(&self, i: i64, n: usize) -> f64 {
        self.row(i)
            .map(|row| self.base[[row, self.column(n, n)]])
            .unwrap_or(0.0)
    }

    /// `sum_i M_i(n, n)`, equal to 1 up to the local-oscillator truncation.
    pub fn completeness(&self, n: usize) -> f64 {
        let col = self.column(n, n);
        self.base.column(col).sum()
    }

    /// Same matrices at another analyzer phase.
    pub fn with_angle(&self, angle: f64) -> Self {
        Self {
            angle,
            ..self.clone()
        }
    }
}

/// Build the kernel for `|alpha>_{LO} |n>_{signal}` mixed by the balanced beam
/// splitter at phase `theta`, for all `n <= n_max_signal`.
///
/// Each signal Fock state is propagated through the beam splitter block by
/// block: the output amplitude on `|p, q>` is `coh[p + q - n]` times the mixer
/// column of `|p + q - n, n>`.
pub fn measurement_kernel(alpha: f64, theta: f64, truncations: &Truncations) -> Result<MeasurementKernel> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "local-oscillator amplitude {alpha} must be positive"
        )));
    }
    let ns = truncations.n_max_signal;
    let lo = truncations.lo_cutoff(alpha);
    let coh: Vec<f64> = coherent_amplitudes_with_tol(Complex64::new(alpha, 0.0), lo, truncations.tail_tol)?
        .into_iter()
        .map(|c| c.re)
        .collect();

    let top = lo + ns;
    let outcome_min = -(top as i64);
    let width = ns + 1;
    let mut base = Array2::<f64>::zeros((2 * top + 1, width * width));
    let mut stream = BlockColumns::new(ns);
    let mut amps: Vec<Vec<f64>> = vec![Vec::new(); width];
    for total in 0..=top {
        if total > 0 {
            stream.advance();
        }
        let mut live = Vec::with_capacity(width);
        for n in 0..=ns.min(total) {
            let m = total - n;
            if m > lo || coh[m] == 0.0 {
                continue;
            }
            let col = stream.column(n).expect("tracked");
            amps[n].clear();
            amps[n].extend(col.iter().map(|v| coh[m] * v));
            live.push(n);
        }
        for p in 0..=total {
            let row = (2 * p as i64 - total as i64 - outcome_min) as usize;
            let mut out = base.row_mut(row);
            for &n in &live {
                let a = amps[n][p];
                if a == 0.0 {
                    continue;
                }
                for &np in &live {
                    out[n * width + np] += a * amps[np][p];
                }
            }
        }
    }
    Ok(MeasurementKernel {
        angle: theta,
        alpha,
        n_max_signal: ns,
        n_max_lo: lo,
        outcome_min,
        base: Arc::new(base),
    })
}
