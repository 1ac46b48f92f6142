//! Fock-basis Wigner kernels `W_{mn}(α)`, the Wigner function of `|m⟩⟨n|`.
//!
//! For `m ≥ n`:
//!
//! ```text
//! W_{mn}(α) = (2/π) (−1)ⁿ √(n!/m!) (2ᾱ)^{m−n} e^{−2|α|²} L_n^{(m−n)}(4|α|²)
//! ```
//!
//! and `W_{nm} = conj(W_{mn})`. With the conjugated `ᾱ` the coherent state
//! `|β⟩` maps to the Gaussian `(2/π) e^{−2|α−β|²}` centred at `β`.

use std::f64::consts::FRAC_2_PI;

use crate::error::{Error, Result};
use crate::fock::C64;

use super::PhaseGrid;

/// `√(n!/(n+k)!)` for `n + k < dim`, built by incremental recurrence.
#[derive(Debug, Clone)]
pub(crate) struct SqrtFactorialRatios {
    dim: usize,
    table: Vec<f64>,
}

impl SqrtFactorialRatios {
    pub(crate) fn new(dim: usize) -> Self {
        let mut table = vec![0.0; dim * dim];
        for n in 0..dim {
            let mut r = 1.0;
            table[n * dim] = 1.0;
            for k in 1..dim - n {
                r /= ((n + k) as f64).sqrt();
                table[n * dim + k] = r;
            }
        }
        Self { dim, table }
    }

    #[inline]
    pub(crate) fn get(&self, n: usize, k: usize) -> f64 {
        self.table[n * self.dim + k]
    }
}

/// Fills `out[k * dim + n] = L_n^{(k)}(x)` for `n + k < dim` by upward
/// three-term recurrence in `n`. The orders `k` are independent and are
/// advanced together.
pub(crate) fn laguerre_table(x: f64, dim: usize, out: &mut [f64]) {
    debug_assert!(out.len() >= dim * dim);
    for k in 0..dim {
        out[k * dim] = 1.0;
        if k + 1 < dim {
            out[k * dim + 1] = 1.0 + k as f64 - x;
        }
    }
    for n in 1..dim.saturating_sub(1) {
        let nf = n as f64;
        let inv = 1.0 / (nf + 1.0);
        let base = 2.0 * nf + 1.0 - x;
        for k in 0..dim - n - 1 {
            let kf = k as f64;
            let i = k * dim + n;
            out[i + 1] = ((base + kf) * out[i] - (nf + kf) * out[i - 1]) * inv;
        }
    }
}

/// Single Laguerre value `L_n^{(k)}(x)`.
pub(crate) fn laguerre(n: usize, k: usize, x: f64) -> f64 {
    let kf = k as f64;
    let (mut prev, mut cur) = (1.0, 1.0 + kf - x);
    if n == 0 {
        return prev;
    }
    for j in 1..n {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + kf - x) * cur - (jf + kf) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Wigner function of the operator `|m⟩⟨n|` at `alpha`.
pub fn wigner_kernel(m: usize, n: usize, alpha: C64) -> C64 {
    if m < n {
        return wigner_kernel(n, m, alpha).conj();
    }
    let k = m - n;
    let r2 = alpha.norm_sqr();
    let mut ratio = 1.0;
    for j in 1..=k {
        ratio /= ((n + j) as f64).sqrt();
    }
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let radial = FRAC_2_PI * sign * ratio * (-2.0 * r2).exp() * laguerre(n, k, 4.0 * r2);
    (alpha.conj() * 2.0).powu(k as u32) * radial
}

/// Precomputed kernels `W_{mn}(α_p)` for every grid point `p`.
#[derive(Debug, Clone)]
pub struct KernelTable {
    dim: usize,
    grid: PhaseGrid,
    entries: Vec<C64>,
}

/// Refuse tables above this many complex entries (≈ 1 GiB).
const KERNEL_TABLE_LIMIT: usize = 1 << 26;

impl KernelTable {
    pub fn new(dim: usize, grid: &PhaseGrid) -> Result<Self> {
        let points = grid.points() * grid.points();
        let size = dim * dim * points;
        if size > KERNEL_TABLE_LIMIT {
            return Err(Error::ResourceLimit(format!(
                "kernel table of {size} entries exceeds {KERNEL_TABLE_LIMIT}"
            )));
        }
        let ratios = SqrtFactorialRatios::new(dim);
        let axis = grid.axis();
        let g = grid.points();
        let mut entries = vec![C64::new(0.0, 0.0); size];
        let mut lag = vec![0.0; dim * dim];
        for p in 0..points {
            let alpha = C64::new(axis[p % g], axis[p / g]);
            let r2 = alpha.norm_sqr();
            laguerre_table(4.0 * r2, dim, &mut lag);
            let gauss = FRAC_2_PI * (-2.0 * r2).exp();
            let two_conj = alpha.conj() * 2.0;
            let mut power = C64::new(1.0, 0.0);
            for k in 0..dim {
                for n in 0..dim - k {
                    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                    let w = power * (gauss * sign * ratios.get(n, k) * lag[k * dim + n]);
                    let m = n + k;
                    entries[(m * dim + n) * points + p] = w;
                    entries[(n * dim + m) * points + p] = w.conj();
                }
                power *= two_conj;
            }
        }
        Ok(Self { dim, grid: grid.clone(), entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    /// Kernel row for `(m, n)` across all grid points, row-major in (Im, Re).
    pub fn kernel(&self, m: usize, n: usize) -> &[C64] {
        let points = self.grid.points() * self.grid.points();
        let start = (m * self.dim + n) * points;
        &self.entries[start..start + points]
    }

    pub fn entry(&self, m: usize, n: usize, point: usize) -> C64 {
        self.kernel(m, n)[point]
    }
}
