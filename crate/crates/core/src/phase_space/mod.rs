//! Continuous-variable Wigner fields and their negativity.
//!
//! Integrals over phase space are Riemann sums on uniform grids that include
//! both endpoints of `[−L, L]`. Fields are stored row-major with the
//! imaginary part of `α` as the slow index.

mod kernel;
mod two_mode;

use std::f64::consts::FRAC_2_PI;
use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{DensityOperator, C64};
use crate::sum::pairwise_sum;

pub use kernel::{wigner_kernel, KernelTable};
pub use two_mode::{two_mode_negativity, wigner_two_mode, TWO_MODE_DIM_CAP};

use kernel::{laguerre_table, SqrtFactorialRatios};

pub const DEFAULT_GRID_TOLERANCE: f64 = 1e-5;

/// Populations below this are dropped before kernel summation; the
/// discarded matrix elements are below 1e-14 in magnitude.
const SUPPORT_CUTOFF: f64 = 1e-28;

/// Largest imaginary residue tolerated in an assembled field.
const IMAGINARY_RESIDUE_LIMIT: f64 = 1e-9;

/// Uniform sampling of `Re α` and `Im α` over `[−L, L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    extent: f64,
    points: usize,
    tolerance: f64,
}

impl PhaseGrid {
    pub fn new(extent: f64, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::Argument(format!("grid needs at least 2 points per axis, got {points}")));
        }
        if !(extent > 0.0) || !extent.is_finite() {
            return Err(Error::Argument(format!("grid extent must be positive, got {extent}")));
        }
        Ok(Self { extent, points, tolerance: DEFAULT_GRID_TOLERANCE })
    }

    /// Overrides the normalization tolerance used by [`negativity`].
    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self> {
        if !(tolerance > 0.0) {
            return Err(Error::Argument("grid tolerance must be positive".into()));
        }
        self.tolerance = tolerance;
        Ok(self)
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / (self.points - 1) as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.spacing().powi(2)
    }

    pub fn axis(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.points).map(|i| -self.extent + h * i as f64).collect()
    }

    /// Same extent, `points` per axis.
    pub fn refined(&self, points: usize) -> Result<Self> {
        Self::new(self.extent, points)?.with_tolerance(self.tolerance)
    }
}

/// L = 5, G = 201: cell side 0.05.
pub fn default_grid() -> PhaseGrid {
    PhaseGrid::new(5.0, 201).expect("static grid")
}

/// L = 4.5, G = 61 per axis, for two-mode quadrature.
pub fn default_two_mode_grid() -> PhaseGrid {
    PhaseGrid::new(4.5, 61).expect("static grid")
}

/// Sampled Wigner function over one or two modes.
#[derive(Debug, Clone)]
pub struct WignerField {
    values: Vec<f64>,
    grids: Vec<PhaseGrid>,
    trace_estimate: f64,
    abs_integral: f64,
    max_imaginary_residue: f64,
}

impl WignerField {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn grids(&self) -> &[PhaseGrid] {
        &self.grids
    }

    pub fn modes(&self) -> usize {
        self.grids.len()
    }

    /// Riemann sum of the field times the cell volume.
    pub fn trace_estimate(&self) -> f64 {
        self.trace_estimate
    }

    /// Estimate of `∫|W|`: the signed integral plus twice the negative
    /// volume (refined near sign changes for single-mode fields).
    pub fn abs_integral(&self) -> f64 {
        self.abs_integral
    }

    pub fn max_imaginary_residue(&self) -> f64 {
        self.max_imaginary_residue
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Single-mode value at row `im_index`, column `re_index`.
    pub fn at(&self, im_index: usize, re_index: usize) -> f64 {
        let g = self.grids[0].points();
        self.values[im_index * g + re_index]
    }

    /// Writes a single-mode field as CSV: the header row holds `Re α`, the
    /// first column `Im α`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        if self.modes() != 1 {
            return Err(std::io::Error::new(
                std::io::ErrorKind::InvalidInput,
                "only single-mode fields export as CSV",
            ));
        }
        let axis = self.grids[0].axis();
        let g = axis.len();
        let mut line = String::from("im\\re");
        for x in &axis {
            line.push(',');
            line.push_str(&crate::format_float(*x));
        }
        writeln!(out, "{line}")?;
        for (j, y) in axis.iter().enumerate() {
            line.clear();
            line.push_str(&crate::format_float(*y));
            for k in 0..g {
                line.push(',');
                line.push_str(&crate::format_float(self.values[j * g + k]));
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    pub(crate) fn from_parts(
        values: Vec<f64>,
        grids: Vec<PhaseGrid>,
        trace_estimate: f64,
        abs_integral: f64,
        max_imaginary_residue: f64,
    ) -> Result<Self> {
        if !trace_estimate.is_finite() || !abs_integral.is_finite() {
            return Err(Error::ContractViolation("non-finite Wigner values".into()));
        }
        if max_imaginary_residue > IMAGINARY_RESIDUE_LIMIT {
            return Err(Error::ContractViolation(format!(
                "Wigner field has imaginary residue {max_imaginary_residue:.3e}"
            )));
        }
        Ok(Self { values, grids, trace_estimate, abs_integral, max_imaginary_residue })
    }
}

/// Evaluates `Σ ρ_mn W_mn(α)` for a single mode on lattices whose points
/// are integer multiples `(u, v)·half`. Radial coefficients depend only on
/// `u² + v²`, so they are computed once per distinct key and shared by every
/// point on the same ring.
struct SingleModeEvaluator {
    dim: usize,
    /// `diagonals[k * dim + n] = (−1)ⁿ √(n!/(n+k)!) ρ_{n+k,n}`
    diagonals: Vec<C64>,
}

impl SingleModeEvaluator {
    fn new(rho: &DensityOperator) -> Self {
        let dim = rho.support_dim(SUPPORT_CUTOFF);
        let ratios = SqrtFactorialRatios::new(dim);
        let m = rho.matrix();
        let mut diagonals = vec![C64::new(0.0, 0.0); dim * dim];
        for k in 0..dim {
            for n in 0..dim - k {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                diagonals[k * dim + n] = m[(n + k, n)] * (sign * ratios.get(n, k));
            }
        }
        Self { dim, diagonals }
    }

    /// Fills `out[k] = (2/π) e^{−2r²} Σ_n d_{kn} L_n^{(k)}(4r²)`; `lag` is
    /// scratch of size `dim²`.
    fn radial(&self, r2: f64, lag: &mut [f64], out: &mut [C64]) {
        let dim = self.dim;
        laguerre_table(4.0 * r2, dim, lag);
        let scale = FRAC_2_PI * (-2.0 * r2).exp();
        for k in 0..dim {
            let d = &self.diagonals[k * dim..(k + 1) * dim - k];
            let l = &lag[k * dim..(k + 1) * dim - k];
            let (mut re, mut im) = (0.0, 0.0);
            for (z, x) in d.iter().zip(l) {
                re += z.re * x;
                im += z.im * x;
            }
            out[k] = C64::new(re * scale, im * scale);
        }
    }

    /// Returns `(W, residue)` at `alpha` from its ring coefficients. The
    /// upper diagonals enter as conjugates of the lower ones, so the residue
    /// is the imaginary part carried by the main diagonal.
    fn combine(&self, alpha: C64, coeffs: &[C64]) -> (f64, f64) {
        let two_conj = alpha.conj() * 2.0;
        let mut power = two_conj;
        let mut total = coeffs[0].re;
        for c in &coeffs[1..] {
            total += 2.0 * (power * c).re;
            power *= two_conj;
        }
        (total, coeffs[0].im)
    }

    /// `W` at each lattice point `(u, v)·half`.
    fn lattice(&self, half: f64, points: &[(i64, i64)]) -> Vec<(f64, f64)> {
        let key = |&(u, v): &(i64, i64)| (u * u + v * v) as u64;
        let mut keys: Vec<u64> = points.iter().map(key).collect();
        keys.sort_unstable();
        keys.dedup();
        let width = self.dim;
        let mut coeffs = vec![C64::new(0.0, 0.0); keys.len() * width];
        coeffs.par_chunks_mut(width).zip(keys.par_iter()).for_each_init(
            || vec![0.0; self.dim * self.dim],
            |lag, (out, &k)| self.radial(k as f64 * half * half, lag, out),
        );
        let max_key = keys.last().copied().unwrap_or(0) as usize;
        let dense: Option<Vec<u32>> = (max_key <= DENSE_KEY_LIMIT).then(|| {
            let mut slots = vec![0u32; max_key + 1];
            for (i, k) in keys.iter().enumerate() {
                slots[*k as usize] = i as u32;
            }
            slots
        });
        points
            .par_iter()
            .map(|p| {
                let k = key(p);
                let slot = match &dense {
                    Some(slots) => slots[k as usize] as usize,
                    None => keys.binary_search(&k).expect("key collected above"),
                };
                let start = slot * width;
                let alpha = C64::new(p.0 as f64 * half, p.1 as f64 * half);
                self.combine(alpha, &coeffs[start..start + width])
            })
            .collect()
    }
}

fn check_hermitian(rho: &DensityOperator) -> Result<()> {
    let defect = rho.hermiticity_defect();
    if defect > 1e-10 {
        return Err(Error::ContractViolation(format!(
            "density operator not Hermitian (defect {defect:.3e})"
        )));
    }
    Ok(())
}

/// Samples the Wigner function of a single-mode state on `grid`.
pub fn wigner_single_mode(rho: &DensityOperator, grid: &PhaseGrid) -> Result<WignerField> {
    if rho.dims().len() != 1 {
        return Err(Error::Argument(format!(
            "single-mode Wigner function needs one mode, got dims {:?}",
            rho.dims()
        )));
    }
    check_hermitian(rho)?;
    let eval = SingleModeEvaluator::new(rho);
    let g = grid.points();
    // node i sits at (2i − (G−1))·h/2
    let offset = (g - 1) as i64;
    let points: Vec<(i64, i64)> =
        (0..g as i64).flat_map(|j| (0..g as i64).map(move |i| (2 * i - offset, 2 * j - offset))).collect();
    let raw = eval.lattice(grid.spacing() / 2.0, &points);
    let values: Vec<f64> = raw.iter().map(|w| w.0).collect();
    let residue = raw.iter().map(|w| w.1.abs()).fold(0.0, f64::max);
    let sums: Vec<f64> = values.chunks(g).map(pairwise_sum).collect();
    let trace = pairwise_sum(&sums) * grid.cell_area();
    let negative_volume = refined_negative_volume(&eval, grid, &values);
    WignerField::from_parts(values, vec![grid.clone()], trace, trace + 2.0 * negative_volume, residue)
}

/// Largest ring key resolved through a direct lookup table.
const DENSE_KEY_LIMIT: usize = 1 << 24;

/// Sub-lattice factor used near sign changes.
const REFINEMENT: usize = 8;

/// `∫ max(−W, 0)` on the grid refined `REFINEMENT`-fold inside every cell
/// that touches a negative node, dilated by one cell.
///
/// The plain node sum of `|W|` carries an O(h²) error from the kink of `|W|`
/// along the zero set, which does not cancel when that set is aligned with
/// the lattice (the single-photon ring at `|α| = 1/2` passes through nodes
/// of the default grid). The signed sum has no kink and stays on the coarse
/// grid.
fn refined_negative_volume(eval: &SingleModeEvaluator, grid: &PhaseGrid, values: &[f64]) -> f64 {
    let g = grid.points();
    let cells = g - 1;
    let negative = |j: usize, i: usize| values[j * g + i] < 0.0;
    let mut marked = vec![false; cells * cells];
    for j in 0..cells {
        for i in 0..cells {
            marked[j * cells + i] = negative(j, i) || negative(j, i + 1) || negative(j + 1, i) || negative(j + 1, i + 1);
        }
    }
    let mut dilated = marked.clone();
    for j in 0..cells {
        for i in 0..cells {
            if !marked[j * cells + i] {
                continue;
            }
            for dj in j.saturating_sub(1)..=(j + 1).min(cells - 1) {
                for di in i.saturating_sub(1)..=(i + 1).min(cells - 1) {
                    dilated[dj * cells + di] = true;
                }
            }
        }
    }
    let r = REFINEMENT as i64;
    let offset = cells as i64 * r;
    let mut points = Vec::new();
    for j in 0..cells as i64 {
        for i in (0..cells as i64).filter(|&i| dilated[j as usize * cells + i as usize]) {
            for b in 0..r {
                for a in 0..r {
                    points.push((2 * (i * r + a) - offset, 2 * (j * r + b) - offset));
                }
            }
        }
    }
    if points.is_empty() {
        return 0.0;
    }
    let sub = grid.spacing() / REFINEMENT as f64;
    let parts: Vec<f64> = eval.lattice(sub / 2.0, &points).iter().map(|w| (-w.0).max(0.0)).collect();
    pairwise_sum(&parts) * sub * sub
}

/// `N = ½(∫|W| − 1)`, reported as exactly 0 within the grid tolerance.
pub fn negativity(field: &WignerField) -> Result<f64> {
    let tol = field.grids.iter().map(PhaseGrid::tolerance).fold(0.0, f64::max);
    negativity_from_sums(field.trace_estimate, field.abs_integral, tol)
}

pub(crate) fn negativity_from_sums(trace: f64, abs_integral: f64, tol: f64) -> Result<f64> {
    if (trace - 1.0).abs() > 10.0 * tol {
        return Err(Error::GridTooSmall { trace, limit: 10.0 * tol });
    }
    let n = 0.5 * (abs_integral - 1.0);
    Ok(if n <= tol { 0.0 } else { n })
}

/// Negativity of a single-mode state on `grid`.
pub fn single_mode_negativity(rho: &DensityOperator, grid: &PhaseGrid) -> Result<f64> {
    negativity(&wigner_single_mode(rho, grid)?)
}

/// Exact negativity of `p|1⟩⟨1| + (1−p)|0⟩⟨0|`.
pub fn mixture_negativity_closed_form(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Argument(format!("mixing weight {p} outside [0, 1]")));
    }
    if p <= 0.5 {
        return Ok(0.0);
    }
    Ok(2.0 * p * (-(2.0 * p - 1.0) / (2.0 * p)).exp() - 1.0)
}

/// Negativity of the single-photon state, `2e^{−1/2} − 1`.
pub fn single_photon_negativity() -> f64 {
    2.0 * (-0.5f64).exp() - 1.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{fock_state, DensityOperator};
    use std::f64::consts::PI;

    fn radial_field_check(rho: &DensityOperator, f: impl Fn(f64) -> f64) {
        let grid = PhaseGrid::new(3.0, 31).unwrap();
        let field = wigner_single_mode(rho, &grid).unwrap();
        let axis = grid.axis();
        for j in 0..31 {
            for k in 0..31 {
                let r2 = axis[j] * axis[j] + axis[k] * axis[k];
                assert!((field.at(j, k) - f(r2)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn closed_form_fields() {
        let vac = fock_state(0, 20).unwrap().density();
        radial_field_check(&vac, |r2| 2.0 / PI * (-2.0 * r2).exp());
        let one = fock_state(1, 20).unwrap().density();
        radial_field_check(&one, |r2| 2.0 / PI * (4.0 * r2 - 1.0) * (-2.0 * r2).exp());
        let half = DensityOperator::excitation_mixture(0.5, 20).unwrap();
        radial_field_check(&half, |r2| 4.0 / PI * r2 * (-2.0 * r2).exp());
    }

    #[test]
    fn default_grid_geometry() {
        let g = default_grid();
        assert!((g.cell_area() - 0.0025).abs() < 1e-15);
        assert_eq!(g.points(), 201);
        let g2 = default_two_mode_grid();
        assert_eq!((g2.extent(), g2.points()), (4.5, 61));
    }

    #[test]
    fn grid_validation() {
        assert!(PhaseGrid::new(5.0, 1).is_err());
        assert!(PhaseGrid::new(0.0, 11).is_err());
        assert!(PhaseGrid::new(-1.0, 11).is_err());
    }

    #[test]
    fn vacuum_and_photon_on_default_grid() {
        let grid = default_grid();
        let vac = wigner_single_mode(&fock_state(0, 20).unwrap().density(), &grid).unwrap();
        assert!((vac.trace_estimate() - 1.0).abs() < 1e-6);
        assert!(vac.min_value() >= 0.0);
        assert_eq!(negativity(&vac).unwrap(), 0.0);

        let one = fock_state(1, 20).unwrap().density();
        let n = single_mode_negativity(&one, &grid).unwrap();
        assert!((n - single_photon_negativity()).abs() < 1e-4, "{n}");
    }

    #[test]
    fn closed_form_mixture_values() {
        assert_eq!(mixture_negativity_closed_form(0.25).unwrap(), 0.0);
        assert_eq!(mixture_negativity_closed_form(0.5).unwrap(), 0.0);
        let one = mixture_negativity_closed_form(1.0).unwrap();
        assert!((one - (2.0 * (-0.5f64).exp() - 1.0)).abs() < 1e-15);
        let three_quarters = mixture_negativity_closed_form(0.75).unwrap();
        assert!((three_quarters - (1.5 * (-1.0f64 / 3.0).exp() - 1.0)).abs() < 1e-15);
        assert!(mixture_negativity_closed_form(1.1).is_err());
        assert!(mixture_negativity_closed_form(-0.1).is_err());
    }

    #[test]
    fn undersized_grid_is_rejected() {
        // the vacuum Gaussian is clipped hard at L = 0.5
        let grid = PhaseGrid::new(0.5, 41).unwrap();
        let vac = wigner_single_mode(&fock_state(0, 5).unwrap().density(), &grid).unwrap();
        assert!(matches!(negativity(&vac), Err(Error::GridTooSmall { .. })));
    }

    #[test]
    fn csv_layout() {
        let grid = PhaseGrid::new(1.0, 3).unwrap();
        let field = wigner_single_mode(&fock_state(0, 3).unwrap().density(), &grid).unwrap();
        let mut buf = Vec::new();
        field.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "im\\re,-1.0,0.0,1.0");
        assert!(lines[2].starts_with("0.0,"));
    }
}
