//! The two-mode states under study, as Schmidt-diagonal Fock expansions and,
//! for Gaussian states, as quadrature covariance matrices.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{hermite_table, QuadratureGrid, DEFAULT_TAIL_TOL};

/// Pure two-mode state `sum_n c_n |n>|n>`.
///
/// Coefficients are renormalized after truncation at `n_max`; the probability
/// the truncation discarded is kept in `tail_mass`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchmidtDiagonalState {
    pub label: String,
    pub n_max: usize,
    pub coeffs: Vec<Complex64>,
    pub tail_mass: f64,
}

impl SchmidtDiagonalState {
    /// Normalizes `coeffs` and records `tail_mass`.
    pub fn from_coefficients(label: impl Into<String>, coeffs: Vec<Complex64>, tail_mass: f64) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter("state needs at least one coefficient".into()));
        }
        let norm = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidParameter(format!("coefficients have norm {norm}")));
        }
        Ok(Self {
            label: label.into(),
            n_max: coeffs.len() - 1,
            coeffs: coeffs.into_iter().map(|c| c / norm).collect(),
            tail_mass,
        })
    }

    pub fn vacuum() -> Self {
        Self {
            label: "vacuum".into(),
            n_max: 0,
            coeffs: vec![Complex64::new(1.0, 0.0)],
            tail_mass: 0.0,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Schmidt weights `|c_n|^2`, the photon-number distribution of either mode.
    pub fn weights(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.norm_sqr()).collect()
    }

    /// Largest `n` whose weight exceeds `cutoff`.
    pub fn effective_n_max(&self, cutoff: f64) -> usize {
        self.coeffs
            .iter()
            .rposition(|c| c.norm_sqr() > cutoff)
            .unwrap_or(0)
    }

    /// Copy padded with zeros (or cut) to exactly `n_max + 1` coefficients.
    pub fn resized(&self, n_max: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(n_max + 1, Complex64::new(0.0, 0.0));
        let kept: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        let mut out = Self {
            label: self.label.clone(),
            n_max,
            coeffs,
            tail_mass: self.tail_mass + (1.0 - kept).max(0.0),
        };
        if kept < 1.0 {
            let norm = kept.sqrt();
            out.coeffs.iter_mut().for_each(|c| *c /= norm);
        }
        out
    }
}

/// Pair-coherent state with `c_n ∝ (r0^2)^n / n!`, normalized by `I_0(2 r0^2)^{-1/2}`.
pub fn pair_coherent(r0: f64, n_max: usize) -> Result<SchmidtDiagonalState> {
    pair_coherent_with_tol(r0, n_max, DEFAULT_TAIL_TOL)
}

pub fn pair_coherent_with_tol(r0: f64, n_max: usize, tail_tol: f64) -> Result<SchmidtDiagonalState> {
    if !(r0.is_finite() && r0 > 0.0) {
        return Err(Error::InvalidParameter(format!("pair-coherent r0 = {r0} must be positive")));
    }
    // ln of (r0^2)^n / n!, accumulated by ratio so large r0 cannot overflow.
    let ln_ratio = 2.0 * r0.ln();
    let ln_term = |n: usize, prev: f64| prev + ln_ratio - (n as f64).ln();
    let mut logs = Vec::with_capacity(n_max + 1);
    let mut ln_t = 0.0;
    for n in 0..=n_max {
        if n > 0 {
            ln_t = ln_term(n, ln_t);
        }
        logs.push(ln_t);
    }
    // Continue past n_max until the squared terms stop mattering.
    let mut scale = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut tail_logs = Vec::new();
    let mut n = n_max;
    let mut ln_t_tail = ln_t;
    loop {
        n += 1;
        ln_t_tail = ln_term(n, ln_t_tail);
        tail_logs.push(ln_t_tail);
        scale = scale.max(ln_t_tail);
        let decreasing = n as f64 > r0 * r0;
        if decreasing && ln_t_tail < scale - 40.0 {
            break;
        }
    }
    let kept: f64 = logs.iter().map(|l| (2.0 * (l - scale)).exp()).sum();
    let dropped: f64 = tail_logs.iter().map(|l| (2.0 * (l - scale)).exp()).sum();
    let tail = dropped / (kept + dropped);
    if tail > tail_tol {
        return Err(Error::Truncation {
            what: format!("pair-coherent state r0 = {r0}"),
            n_max,
            tail,
            tol: tail_tol,
        });
    }
    let coeffs = logs
        .iter()
        .map(|l| Complex64::new((l - scale).exp(), 0.0))
        .collect();
    SchmidtDiagonalState::from_coefficients(format!("pair-coherent(r0={r0})"), coeffs, tail)
}

/// Two-mode squeezed vacuum `c_n = sech(r) tanh(r)^n`.
pub fn two_mode_squeezed(r: f64, n_max: usize) -> Result<SchmidtDiagonalState> {
    two_mode_squeezed_with_tol(r, n_max, DEFAULT_TAIL_TOL)
}

pub fn two_mode_squeezed_with_tol(r: f64, n_max: usize, tail_tol: f64) -> Result<SchmidtDiagonalState> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::InvalidParameter(format!("squeezing r = {r} must be nonnegative")));
    }
    let t = r.tanh();
    let tail = t.powf(2.0 * (n_max as f64 + 1.0));
    if tail > tail_tol {
        return Err(Error::Truncation {
            what: format!("two-mode squeezed vacuum r = {r}"),
            n_max,
            tail,
            tol: tail_tol,
        });
    }
    let sech = 1.0 / r.cosh();
    let mut coeffs = Vec::with_capacity(n_max + 1);
    let mut c = sech;
    for n in 0..=n_max {
        if n > 0 {
            c *= t;
        }
        coeffs.push(Complex64::new(c, 0.0));
    }
    SchmidtDiagonalState::from_coefficients(format!("two-mode-squeezed(r={r})"), coeffs, tail)
}

/// Smallest `n_max` for which [`two_mode_squeezed`] passes its tail guard.
pub fn two_mode_squeezed_min_n_max(r: f64, tail_tol: f64) -> usize {
    let t = r.tanh();
    if t == 0.0 {
        return 0;
    }
    // t^{2(n+1)} <= tol  <=>  n + 1 >= ln(tol) / (2 ln t)
    let needed = (tail_tol.ln() / (2.0 * t.ln())).ceil() as usize;
    needed.saturating_sub(1)
}

/// Covariance of `(X_0^A, X_{pi/2}^A, X_0^B, X_{pi/2}^B)` for a zero-mean
/// Gaussian state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianCovariance {
    pub matrix: [[f64; 4]; 4],
    pub mean: [f64; 4],
}

pub const X0_A: usize = 0;
pub const XP_A: usize = 1;
pub const X0_B: usize = 2;
pub const XP_B: usize = 3;

impl GaussianCovariance {
    pub fn new(matrix: [[f64; 4]; 4]) -> Result<Self> {
        let cov = Self {
            matrix,
            mean: [0.0; 4],
        };
        cov.validate()?;
        Ok(cov)
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.matrix;
        for r in 0..4 {
            for c in 0..4 {
                if !m[r][c].is_finite() {
                    return Err(Error::InvalidCovariance(format!("entry ({r}, {c}) is not finite")));
                }
                if (m[r][c] - m[c][r]).abs() > 1e-12 * (1.0 + m[r][c].abs()) {
                    return Err(Error::InvalidCovariance(format!("not symmetric at ({r}, {c})")));
                }
            }
            if m[r][r] < 1.0 - 1e-12 {
                return Err(Error::InvalidCovariance(format!(
                    "variance {} at index {r} is below the vacuum level",
                    m[r][r]
                )));
            }
        }
        for (x, p) in [(X0_A, XP_A), (X0_B, XP_B)] {
            let product = m[x][x] * m[p][p];
            if product < 1.0 - 1e-12 {
                return Err(Error::InvalidCovariance(format!(
                    "uncertainty product {product} below 1"
                )));
            }
        }
        Ok(())
    }

    pub fn var(&self, k: usize) -> f64 {
        self.matrix[k][k]
    }

    pub fn cov(&self, j: usize, k: usize) -> f64 {
        self.matrix[j][k]
    }

    /// `Var(sum_k w_k X_k)`.
    pub fn quadratic_form(&self, w: [f64; 4]) -> f64 {
        let mut acc = 0.0;
        for j in 0..4 {
            for k in 0..4 {
                acc += w[j] * self.matrix[j][k] * w[k];
            }
        }
        acc
    }
}

/// Two-mode squeezed vacuum covariance: variances `cosh 2r`, `Cov(X_0^A, X_0^B) = sinh 2r`,
/// `Cov(X_{pi/2}^A, X_{pi/2}^B) = -sinh 2r`. As `r` grows, `X_0^A - X_0^B` and
/// `X_{pi/2}^A + X_{pi/2}^B` both become sharp.
///
/// Also the covariance produced by mixing two oppositely squeezed single modes
/// on a balanced beam splitter.
pub fn tmsv_covariance(r: f64) -> GaussianCovariance {
    let c = (2.0 * r).cosh();
    let s = (2.0 * r).sinh();
    GaussianCovariance {
        matrix: [
            [c, 0.0, s, 0.0],
            [0.0, c, 0.0, -s],
            [s, 0.0, c, 0.0],
            [0.0, -s, 0.0, c],
        ],
        mean: [0.0; 4],
    }
}

/// Second moments of a Fock-expanded state next to the covariance-matrix values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub r: f64,
    pub n_max: usize,
    pub grid: QuadratureGrid,
    /// `<(X_0^A)^2>, <X_0^A X_0^B>, <(X_{pi/2}^A)^2>, <X_{pi/2}^A X_{pi/2}^B>` from the Fock route.
    pub fock: [f64; 4],
    /// The same entries from [`tmsv_covariance`].
    pub covariance: [f64; 4],
    pub max_abs_diff: f64,
}

impl CrosscheckReport {
    pub fn agrees(&self, tol: f64) -> bool {
        self.max_abs_diff <= tol
    }
}

/// Recompute the TMSV second moments by integrating the joint quadrature
/// density of its Fock expansion, and compare with [`tmsv_covariance`].
pub fn fock_vs_covariance_crosscheck(r: f64, n_max: usize) -> Result<CrosscheckReport> {
    let state = two_mode_squeezed(r, n_max)?;
    let grid = QuadratureGrid::covering(state.effective_n_max(1e-20), 0.01)?;
    let xs = grid.points();
    let w = grid.trapezoid_weights();

    let moments = |chi: f64| -> (f64, f64) {
        let density = crate::quad_bell::joint_quadrature_density(&state, chi, 0.0, &grid)
            .expect("grid validated above");
        let mut second = 0.0;
        let mut cross = 0.0;
        for (ia, xa) in xs.iter().enumerate() {
            for (ib, xb) in xs.iter().enumerate() {
                let p = density[[ia, ib]] * w[ia] * w[ib];
                second += p * xa * xa;
                cross += p * xa * xb;
            }
        }
        (second, cross)
    };
    // X_0 on both sides: theta + phi = 0. X_{pi/2} on both sides: theta + phi = pi.
    let (var_x, cov_x) = moments(0.0);
    let (var_p, cov_p) = moments(std::f64::consts::PI);
    let fock = [var_x, cov_x, var_p, cov_p];

    let cov = tmsv_covariance(r);
    let covariance = [
        cov.var(X0_A),
        cov.cov(X0_A, X0_B),
        cov.var(XP_A),
        cov.cov(XP_A, XP_B),
    ];
    let max_abs_diff = fock
        .iter()
        .zip(&covariance)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(CrosscheckReport {
        r,
        n_max,
        grid,
        fock,
        covariance,
        max_abs_diff,
    })
}

/// Reduced-state marginal density `sum_n |c_n|^2 phi_n(x)^2` on the grid.
pub fn marginal_density(state: &SchmidtDiagonalState, xs: &[f64]) -> Vec<f64> {
    let table = hermite_table(state.n_max, xs);
    let weights = state.weights();
    (0..xs.len())
        .map(|k| {
            weights
                .iter()
                .enumerate()
                .map(|(n, wn)| wn * table[[n, k]] * table[[n, k]])
                .sum()
        })
        .collect()
}
