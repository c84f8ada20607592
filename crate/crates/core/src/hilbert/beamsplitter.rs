use ndarray::Array2;
use num_complex::Complex64;

/// Output amplitudes of the balanced mixer `c'_+- = (a_+ +- a_- e^{-i theta}) / sqrt 2`
/// at `theta = 0`, generated one total-photon-number block at a time.
///
/// After `total()` = N, `column(n)` holds the output amplitudes of the input
/// `|N - n>_{a+} |n>_{a-}`, indexed by the photon number `p` in `c'_+`
/// (with `N - p` photons in `c'_-`). Each column is obtained from one in block
/// `N - 1` by a single creation operator:
///
/// * `a_+^dag = (c_+^dag + c_-^dag) / sqrt 2` raises the local-oscillator port,
/// * `a_-^dag = e^{-i theta} (c_+^dag - c_-^dag) / sqrt 2` raises the signal port.
///
/// A nonzero `theta` only multiplies the column of `|m, n>` by `e^{-i n theta}`,
/// so all amplitudes here are real.
#[derive(Debug, Clone)]
pub struct BlockColumns {
    max_signal: usize,
    total: usize,
    cols: Vec<Vec<f64>>,
}

impl BlockColumns {
    /// Tracks inputs with at most `max_signal` photons in the signal port.
    pub fn new(max_signal: usize) -> Self {
        Self {
            max_signal,
            total: 0,
            cols: vec![vec![1.0]],
        }
    }

    pub fn total(&self) -> usize {
        self.total
    }

    /// Output column for the input with `n_signal` signal photons, if tracked.
    pub fn column(&self, n_signal: usize) -> Option<&[f64]> {
        self.cols.get(n_signal).map(Vec::as_slice)
    }

    pub fn advance(&mut self) {
        let total = self.total + 1;
        let top = self.max_signal.min(total);
        let mut next = Vec::with_capacity(top + 1);
        for n in 0..=top {
            let col = if n < total {
                let m = total - n;
                raise(&self.cols[n], total, 1.0, (2.0 * m as f64).sqrt())
            } else {
                raise(&self.cols[total - 1], total, -1.0, (2.0 * total as f64).sqrt())
            };
            next.push(col);
        }
        self.cols = next;
        self.total = total;
    }
}

/// `(c_+^dag + sign c_-^dag) / norm` applied to a block-`(total - 1)` column.
fn raise(prev: &[f64], total: usize, sign: f64, norm: f64) -> Vec<f64> {
    (0..=total)
        .map(|p| {
            let from_plus = if p > 0 { (p as f64).sqrt() * prev[p - 1] } else { 0.0 };
            let from_minus = if p < total {
                ((total - p) as f64).sqrt() * prev[p]
            } else {
                0.0
            };
            (from_plus + sign * from_minus) / norm
        })
        .collect()
}

/// One photon-number block of a [`TruncatedUnitary`].
#[derive(Debug, Clone)]
pub struct UnitaryBlock {
    pub total: usize,
    /// Smallest `n_+` kept in this block; rows and columns run over
    /// `n_+ = lo ..= lo + dim - 1` with `n_- = total - n_+`.
    pub lo: usize,
    /// `matrix[[p - lo, m - lo]] = <p, total-p| U |m, total-m>`, where the
    /// row labels count photons in `c'_+` and the column labels count photons
    /// in the local-oscillator port `a_+`.
    pub matrix: Array2<Complex64>,
}

impl UnitaryBlock {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Two-mode beam-splitter unitary restricted to `n_+, n_- <= n_max`, stored as
/// photon-number blocks. Blocks with `total <= n_max` are complete and unitary;
/// higher blocks are cut by the truncation.
#[derive(Debug, Clone)]
pub struct TruncatedUnitary {
    pub n_max: usize,
    pub phase: f64,
    pub blocks: Vec<UnitaryBlock>,
}

impl TruncatedUnitary {
    pub fn block(&self, total: usize) -> Option<&UnitaryBlock> {
        self.blocks.get(total)
    }

    pub fn is_complete(&self, total: usize) -> bool {
        total <= self.n_max
    }

    /// Frobenius norm of `U^dag U - I` for one block, an upper bound on the
    /// operator-norm defect.
    pub fn unitarity_defect(&self, total: usize) -> f64 {
        let Some(block) = self.block(total) else {
            return f64::NAN;
        };
        let u = &block.matrix;
        let gram = u.t().mapv(|z| z.conj()).dot(u);
        let mut sum = 0.0;
        for ((r, c), z) in gram.indexed_iter() {
            let target = if r == c { 1.0 } else { 0.0 };
            sum += (z - target).norm_sqr();
        }
        sum.sqrt()
    }

    /// Apply to a two-mode amplitude array `state[[n_+, n_-]]` over the input
    /// modes `(a_+, a_-)`; the result is indexed by photon numbers in
    /// `(c'_+, c'_-)`.
    pub fn apply(&self, state: &Array2<Complex64>) -> Array2<Complex64> {
        let dim = self.n_max + 1;
        assert_eq!(state.dim(), (dim, dim), "state must be (n_max+1) x (n_max+1)");
        let mut out = Array2::zeros((dim, dim));
        for block in &self.blocks {
            let n = block.total;
            for (col, m) in (block.lo..block.lo + block.dim()).enumerate() {
                let amp = state[[m, n - m]];
                if amp == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for (row, p) in (block.lo..block.lo + block.dim()).enumerate() {
                    out[[p, n - p]] += block.matrix[[row, col]] * amp;
                }
            }
        }
        out
    }
}

/// Beam-splitter unitary `c'_+- = (a_+ +- a_- e^{-i phase}) / sqrt 2` on the
/// truncated two-mode space `n_+, n_- <= n_max`.
///
/// A single photon in `a_+` leaves as `(|1,0> + |0,1>) / sqrt 2`; a single
/// photon in `a_-` leaves as `e^{-i phase} (|1,0> - |0,1>) / sqrt 2`.
pub fn beamsplitter_unitary(n_max: usize, phase: f64) -> TruncatedUnitary {
    let top = 2 * n_max;
    let mut stream = BlockColumns::new(top);
    let mut blocks = Vec::with_capacity(top + 1);
    for total in 0..=top {
        if total > 0 {
            stream.advance();
        }
        let lo = total.saturating_sub(n_max);
        let hi = total.min(n_max);
        let dim = hi - lo + 1;
        let mut matrix = Array2::zeros((dim, dim));
        for (col, m) in (lo..=hi).enumerate() {
            let n_signal = total - m;
            let column = stream.column(n_signal).expect("all signal numbers are tracked");
            let rot = Complex64::from_polar(1.0, -(n_signal as f64) * phase);
            for (row, p) in (lo..=hi).enumerate() {
                matrix[[row, col]] = rot * column[p];
            }
        }
        blocks.push(UnitaryBlock { total, lo, matrix });
    }
    TruncatedUnitary {
        n_max,
        phase,
        blocks,
    }
}
