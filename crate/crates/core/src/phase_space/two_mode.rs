//! Two-mode Wigner functions `W(α, β) = Σ ρ_{(mp),(nq)} W_mn(α) W_pq(β)`.
//!
//! Per-mode kernels are tabulated once. For each `α` point (one tile) the
//! mode-A contraction `M_pq(α) = Σ_mn ρ_{(mp),(nq)} W_mn(α)` is formed, then
//! the tile sweeps every `β` point. Tiles run in parallel; their partial sums
//! are combined pairwise in tile order.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{DensityOperator, C64};
use crate::sum::pairwise_sum;

use super::{check_hermitian, negativity_from_sums, KernelTable, PhaseGrid, WignerField};

/// Largest per-mode dimension accepted for 4D quadrature.
pub const TWO_MODE_DIM_CAP: usize = 4;

struct TwoModeKernels {
    dim_a: usize,
    dim_b: usize,
    table_a: KernelTable,
    table_b: KernelTable,
    /// `rho[((m*dA + n) * dB + p) * dB + q] = ρ_{(mp),(nq)}`
    rho: Vec<C64>,
}

impl TwoModeKernels {
    fn new(rho: &DensityOperator, grid_a: &PhaseGrid, grid_b: &PhaseGrid) -> Result<Self> {
        let dims = rho.dims();
        if dims.len() != 2 {
            return Err(Error::Argument(format!(
                "two-mode Wigner function needs two modes, got dims {dims:?}"
            )));
        }
        let (dim_a, dim_b) = (dims[0], dims[1]);
        if dim_a > TWO_MODE_DIM_CAP || dim_b > TWO_MODE_DIM_CAP {
            return Err(Error::ResourceLimit(format!(
                "two-mode quadrature is capped at {TWO_MODE_DIM_CAP} levels per mode, got {dims:?}"
            )));
        }
        check_hermitian(rho)?;
        let m = rho.matrix();
        let mut packed = Vec::with_capacity(dim_a * dim_a * dim_b * dim_b);
        for ma in 0..dim_a {
            for na in 0..dim_a {
                for pb in 0..dim_b {
                    for qb in 0..dim_b {
                        packed.push(m[(ma * dim_b + pb, na * dim_b + qb)]);
                    }
                }
            }
        }
        Ok(Self {
            dim_a,
            dim_b,
            table_a: KernelTable::new(dim_a, grid_a)?,
            table_b: KernelTable::new(dim_b, grid_b)?,
            rho: packed,
        })
    }

    fn points_b(&self) -> usize {
        let g = self.table_b.grid().points();
        g * g
    }

    /// Fills `out` with `W(α_a, ·)` and returns `(Σ W, Σ|W|, max |Im W|)`.
    fn fill_tile(&self, a: usize, out: &mut [f64]) -> (f64, f64, f64) {
        let (da, db) = (self.dim_a, self.dim_b);
        let mut contracted = vec![C64::new(0.0, 0.0); db * db];
        for ma in 0..da {
            for na in 0..da {
                let ka = self.table_a.entry(ma, na, a);
                let base = (ma * da + na) * db * db;
                for (slot, r) in contracted.iter_mut().zip(&self.rho[base..base + db * db]) {
                    *slot += r * ka;
                }
            }
        }
        let kernels_b: Vec<&[C64]> = (0..db * db).map(|pq| self.table_b.kernel(pq / db, pq % db)).collect();
        let mut residue = 0.0f64;
        for (b, slot) in out.iter_mut().enumerate() {
            let mut w = C64::new(0.0, 0.0);
            for (c, kb) in contracted.iter().zip(&kernels_b) {
                w += c * kb[b];
            }
            *slot = w.re;
            residue = residue.max(w.im.abs());
        }
        let abs: Vec<f64> = out.iter().map(|v| v.abs()).collect();
        (pairwise_sum(out), pairwise_sum(&abs), residue)
    }

    fn cell_volume(&self) -> f64 {
        self.table_a.grid().cell_area() * self.table_b.grid().cell_area()
    }

    fn tolerance(&self) -> f64 {
        self.table_a.grid().tolerance().max(self.table_b.grid().tolerance())
    }
}

fn reduce(stats: &[(f64, f64, f64)], volume: f64) -> (f64, f64, f64) {
    let sums: Vec<f64> = stats.iter().map(|s| s.0).collect();
    let abs: Vec<f64> = stats.iter().map(|s| s.1).collect();
    let residue = stats.iter().map(|s| s.2).fold(0.0, f64::max);
    (pairwise_sum(&sums) * volume, pairwise_sum(&abs) * volume, residue)
}

/// Materializes the full `G_A² × G_B²` field.
pub fn wigner_two_mode(rho: &DensityOperator, grid_a: &PhaseGrid, grid_b: &PhaseGrid) -> Result<WignerField> {
    let kernels = TwoModeKernels::new(rho, grid_a, grid_b)?;
    let pb = kernels.points_b();
    let pa = grid_a.points() * grid_a.points();
    let mut values = vec![0.0; pa * pb];
    let stats: Vec<(f64, f64, f64)> = values
        .par_chunks_mut(pb)
        .enumerate()
        .map(|(a, tile)| kernels.fill_tile(a, tile))
        .collect();
    let (trace, abs, residue) = reduce(&stats, kernels.cell_volume());
    WignerField::from_parts(values, vec![grid_a.clone(), grid_b.clone()], trace, abs, residue)
}

/// Negativity of a two-mode state without storing the 4D field.
pub fn two_mode_negativity(rho: &DensityOperator, grid_a: &PhaseGrid, grid_b: &PhaseGrid) -> Result<f64> {
    let kernels = TwoModeKernels::new(rho, grid_a, grid_b)?;
    let pb = kernels.points_b();
    let pa = grid_a.points() * grid_a.points();
    let stats: Vec<(f64, f64, f64)> = (0..pa)
        .into_par_iter()
        .map_init(|| vec![0.0; pb], |buf, a| kernels.fill_tile(a, buf))
        .collect();
    let (trace, abs, residue) = reduce(&stats, kernels.cell_volume());
    if residue > super::IMAGINARY_RESIDUE_LIMIT {
        return Err(Error::ContractViolation(format!(
            "two-mode Wigner field has imaginary residue {residue:.3e}"
        )));
    }
    negativity_from_sums(trace, abs, kernels.tolerance())
}
