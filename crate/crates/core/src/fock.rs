//! Truncated bosonic Fock-space linear algebra.
//!
//! Composite spaces use row-major ordering: the leftmost subsystem is the
//! slowest-varying index, so `|i⟩_A ⊗ |j⟩_B` lives at `i * dim_B + j`.
//!
//! The squeezing operator is `S(r) = exp[(r/2)(a² − a†²)]` with real `r ≥ 0`.
//! The opposite sign reflects phase space and leaves negativities unchanged.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default per-mode truncation.
pub const DEFAULT_DIM: usize = 20;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-10;
const EIGEN_FLOOR: f64 = -1e-10;
const COHERENT_LOSS_LIMIT: f64 = 1e-8;
const SQUEEZE_LOSS_LIMIT: f64 = 1e-6;

fn product(dims: &[usize]) -> usize {
    dims.iter().product()
}

/// Pure state over a tensor product of truncated modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateJson", into = "StateJson")]
pub struct StateVector {
    amplitudes: Vec<C64>,
    dims: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    dims: Vec<usize>,
    amplitudes: Vec<[f64; 2]>,
}

impl From<StateVector> for StateJson {
    fn from(s: StateVector) -> Self {
        StateJson {
            dims: s.dims,
            amplitudes: s.amplitudes.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<StateJson> for StateVector {
    type Error = Error;

    fn try_from(j: StateJson) -> Result<Self> {
        let amps = j.amplitudes.iter().map(|p| C64::new(p[0], p[1])).collect();
        StateVector::new(amps, j.dims)
    }
}

impl StateVector {
    /// Builds a state from raw amplitudes, normalizing them.
    pub fn new(amplitudes: Vec<C64>, dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::Argument(format!("invalid subsystem dims {dims:?}")));
        }
        if product(&dims) != amplitudes.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for dims {dims:?}",
                amplitudes.len()
            )));
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::DegenerateState("state has zero or non-finite norm".into()));
        }
        let amplitudes = amplitudes.into_iter().map(|z| z / norm).collect();
        Ok(Self { amplitudes, dims })
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim_total(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch(format!(
                "{:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn density(&self) -> DensityOperator {
        let n = self.dim_total();
        let psi = nalgebra::DVector::from_column_slice(&self.amplitudes);
        let matrix = &psi * psi.adjoint();
        debug_assert_eq!(matrix.nrows(), n);
        DensityOperator::from_parts(matrix, self.dims.clone())
    }

    /// Reduced state on the `keep` subsystems, without forming `|ψ⟩⟨ψ|`.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityOperator> {
        let layout = TraceLayout::new(&self.dims, keep)?;
        let dk = layout.kept_dim;
        let mut out = DMatrix::<C64>::zeros(dk, dk);
        for group in &layout.groups {
            for &(r, kr) in group {
                let ar = self.amplitudes[r];
                for &(c, kc) in group {
                    out[(kr, kc)] += ar * self.amplitudes[c].conj();
                }
            }
        }
        Ok(DensityOperator::from_parts(out, layout.kept_dims))
    }

    /// Applies an operator and renormalizes. Intended for unitaries.
    pub fn apply(&self, op: &ModeOperator) -> Result<StateVector> {
        let m = op.matrix();
        if m.ncols() != self.dim_total() {
            return Err(Error::DimensionMismatch(format!(
                "operator of size {} on state of size {}",
                m.ncols(),
                self.dim_total()
            )));
        }
        let v = m * nalgebra::DVector::from_column_slice(&self.amplitudes);
        StateVector::new(v.as_slice().to_vec(), self.dims.clone())
    }

    /// Displaces a single-mode state by `beta`. The displacement is applied
    /// in a padded space and truncated back, failing if more than 1e-6 of the
    /// norm leaves the original truncation.
    pub fn displaced(&self, beta: C64) -> Result<StateVector> {
        if self.dims.len() != 1 {
            return Err(Error::Argument("displacement acts on single-mode states".into()));
        }
        let dim = self.dims[0];
        let generator = |work: usize| {
            let a = annihilation_matrix(work);
            let ad = a.adjoint();
            ad * C64::from(beta) - a * beta.conj()
        };
        padded_exponential_action(&self.amplitudes, dim, generator, SQUEEZE_LOSS_LIMIT)
    }

    /// Mean excitation number summed over all modes.
    pub fn mean_excitation(&self) -> f64 {
        let mut total = 0.0;
        for (idx, amp) in self.amplitudes.iter().enumerate() {
            let p = amp.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let mut rem = idx;
            let mut n = 0usize;
            for &d in self.dims.iter().rev() {
                n += rem % d;
                rem /= d;
            }
            total += p * n as f64;
        }
        total
    }
}

/// Hermitian, unit-trace, positive operator over a truncated basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: DMatrix<C64>,
    dims: Vec<usize>,
}

impl DensityOperator {
    /// Validating constructor: Hermitian within 1e-12, trace 1 within 1e-10,
    /// no eigenvalue below −1e-10.
    pub fn new(matrix: DMatrix<C64>, dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::Argument(format!("invalid subsystem dims {dims:?}")));
        }
        let n = product(&dims);
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for dims {dims:?}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let herm = hermiticity_defect(&matrix);
        if herm > HERMITIAN_TOL {
            return Err(Error::ContractViolation(format!(
                "operator not Hermitian (defect {herm:.3e})"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::ContractViolation(format!("trace {tr} differs from 1")));
        }
        let eig = matrix.clone().symmetric_eigenvalues();
        let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        if min < EIGEN_FLOOR {
            return Err(Error::ContractViolation(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self { matrix, dims })
    }

    /// For operators that are density matrices by construction.
    pub(crate) fn from_parts(matrix: DMatrix<C64>, dims: Vec<usize>) -> Self {
        Self { matrix, dims }
    }

    pub fn pure(state: &StateVector) -> Self {
        state.density()
    }

    /// Diagonal operator `Σ pₙ |n⟩⟨n|` on a single mode.
    pub fn from_populations(populations: &[f64]) -> Result<Self> {
        let n = populations.len();
        let mut m = DMatrix::<C64>::zeros(n, n);
        for (i, p) in populations.iter().enumerate() {
            m[(i, i)] = C64::from(*p);
        }
        Self::new(m, vec![n])
    }

    /// `p|1⟩⟨1| + (1−p)|0⟩⟨0|` truncated to `dim` levels.
    pub fn excitation_mixture(p: f64, dim: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Argument(format!("mixing weight {p} outside [0, 1]")));
        }
        if dim < 2 {
            return Err(Error::Argument("mixture needs dimension ≥ 2".into()));
        }
        let mut pops = vec![0.0; dim];
        pops[0] = 1.0 - p;
        pops[1] = p;
        Self::from_populations(&pops)
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let n = product(&dims);
        let m = DMatrix::<C64>::identity(n, n) / C64::from(n as f64);
        Self::new(m, dims)
    }

    /// Convex combination `p·self + (1−p)·other`.
    pub fn mix(&self, p: f64, other: &DensityOperator) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Argument(format!("mixing weight {p} outside [0, 1]")));
        }
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch(format!(
                "{:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        let m = &self.matrix * C64::from(p) + &other.matrix * C64::from(1.0 - p);
        Ok(Self::from_parts(m, self.dims.clone()))
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn purity(&self) -> f64 {
        // Tr ρ² = Σ |ρ_ij|² for Hermitian ρ
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    /// `Tr[ρ O]`.
    pub fn expectation(&self, op: &DMatrix<C64>) -> C64 {
        (&self.matrix * op).trace()
    }

    /// Largest index carrying weight above `cutoff` on the diagonal, plus one.
    /// Entries beyond it are bounded by `sqrt(cutoff)` through positivity.
    pub(crate) fn support_dim(&self, cutoff: f64) -> usize {
        let n = self.dim();
        (0..n)
            .rev()
            .find(|&i| self.matrix[(i, i)].re > cutoff)
            .map_or(1, |i| i + 1)
    }
}

fn hermiticity_defect(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    Annihilation,
    Creation,
    Number,
    General,
}

/// A matrix on one or more truncated modes, tagged with what it represents.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeOperator {
    matrix: DMatrix<C64>,
    kind: OperatorKind,
}

impl ModeOperator {
    pub fn annihilation(dim: usize) -> Self {
        Self { matrix: annihilation_matrix(dim), kind: OperatorKind::Annihilation }
    }

    pub fn creation(dim: usize) -> Self {
        Self { matrix: annihilation_matrix(dim).adjoint(), kind: OperatorKind::Creation }
    }

    pub fn number(dim: usize) -> Self {
        let mut m = DMatrix::<C64>::zeros(dim, dim);
        for n in 0..dim {
            m[(n, n)] = C64::from(n as f64);
        }
        Self { matrix: m, kind: OperatorKind::Number }
    }

    pub fn general(matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch("operator must be square".into()));
        }
        Ok(Self { matrix, kind: OperatorKind::General })
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: DMatrix::identity(dim, dim), kind: OperatorKind::General }
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Kronecker product; the result is a general operator.
    pub fn kron(&self, other: &ModeOperator) -> ModeOperator {
        ModeOperator { matrix: self.matrix.kronecker(&other.matrix), kind: OperatorKind::General }
    }

    /// `‖U†U − I‖_max`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        let g = self.matrix.adjoint() * &self.matrix - DMatrix::<C64>::identity(n, n);
        g.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

pub(crate) fn annihilation_matrix(dim: usize) -> DMatrix<C64> {
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    for n in 1..dim {
        m[(n - 1, n)] = C64::from((n as f64).sqrt());
    }
    m
}

/// Kronecker product that concatenates subsystem dims.
pub trait Tensor: Sized {
    fn tensor(&self, other: &Self) -> Self;
}

impl Tensor for StateVector {
    fn tensor(&self, other: &Self) -> Self {
        let mut amps = Vec::with_capacity(self.dim_total() * other.dim_total());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amps.push(a * b);
            }
        }
        let dims = self.dims.iter().chain(&other.dims).copied().collect();
        StateVector { amplitudes: amps, dims }
    }
}

impl Tensor for DensityOperator {
    fn tensor(&self, other: &Self) -> Self {
        let dims = self.dims.iter().chain(&other.dims).copied().collect();
        DensityOperator::from_parts(self.matrix.kronecker(&other.matrix), dims)
    }
}

/// Kronecker product of two states or two density operators. Mixing kinds is
/// rejected at compile time.
pub fn tensor_product<T: Tensor>(a: &T, b: &T) -> T {
    a.tensor(b)
}

/// Index bookkeeping for tracing out subsystems: full indices grouped by
/// their traced-out part, each tagged with the kept-subsystem index.
struct TraceLayout {
    kept_dims: Vec<usize>,
    kept_dim: usize,
    groups: Vec<Vec<(usize, usize)>>,
}

impl TraceLayout {
    fn new(dims: &[usize], keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::Argument("keep set must be nonempty".into()));
        }
        let mut keep_sorted = keep.to_vec();
        keep_sorted.sort_unstable();
        keep_sorted.dedup();
        if keep_sorted.len() != keep.len() {
            return Err(Error::Argument(format!("duplicate subsystem in keep set {keep:?}")));
        }
        if let Some(&bad) = keep_sorted.iter().find(|&&k| k >= dims.len()) {
            return Err(Error::OutOfRange { index: bad, dim: dims.len() });
        }
        let kept_dims: Vec<usize> = keep_sorted.iter().map(|&k| dims[k]).collect();
        let kept_dim = product(&kept_dims);
        let traced_dim = product(dims) / kept_dim;
        let mut groups = vec![Vec::with_capacity(kept_dim); traced_dim];
        let total = product(dims);
        let mut digits = vec![0usize; dims.len()];
        for full in 0..total {
            let mut rem = full;
            for s in (0..dims.len()).rev() {
                digits[s] = rem % dims[s];
                rem /= dims[s];
            }
            let (mut kept, mut traced) = (0usize, 0usize);
            for s in 0..dims.len() {
                if keep_sorted.binary_search(&s).is_ok() {
                    kept = kept * dims[s] + digits[s];
                } else {
                    traced = traced * dims[s] + digits[s];
                }
            }
            groups[traced].push((full, kept));
        }
        Ok(Self { kept_dims, kept_dim, groups })
    }
}

/// Reduced operator on the `keep` subsystems (ascending order).
pub fn partial_trace(rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    let layout = TraceLayout::new(&rho.dims, keep)?;
    let dk = layout.kept_dim;
    let mut out = DMatrix::<C64>::zeros(dk, dk);
    for group in &layout.groups {
        for &(r, kr) in group {
            for &(c, kc) in group {
                out[(kr, kc)] += rho.matrix[(r, c)];
            }
        }
    }
    Ok(DensityOperator::from_parts(out, layout.kept_dims))
}

pub fn fock_state(n: usize, dim: usize) -> Result<StateVector> {
    if n >= dim {
        return Err(Error::OutOfRange { index: n, dim });
    }
    let mut amps = vec![C64::new(0.0, 0.0); dim];
    amps[n] = C64::new(1.0, 0.0);
    Ok(StateVector { amplitudes: amps, dims: vec![dim] })
}

/// Unnormalized coherent amplitudes `e^{−|α|²/2} αⁿ/√(n!)` by recurrence.
fn coherent_amplitudes(alpha: C64, dim: usize) -> Vec<C64> {
    let mut amps = Vec::with_capacity(dim);
    let mut a = C64::from((-alpha.norm_sqr() / 2.0).exp());
    for n in 0..dim {
        amps.push(a);
        a = a * alpha / ((n + 1) as f64).sqrt();
    }
    amps
}

pub fn coherent_state(alpha: C64, dim: usize) -> Result<StateVector> {
    if dim == 0 {
        return Err(Error::Argument("dimension must be positive".into()));
    }
    let amps = coherent_amplitudes(alpha, dim);
    let kept: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
    let loss = 1.0 - kept;
    if loss > COHERENT_LOSS_LIMIT {
        return Err(Error::Truncation { dim, loss, limit: COHERENT_LOSS_LIMIT });
    }
    StateVector::new(amps, vec![dim])
}

/// Odd cat `∝ |α⟩ − |−α⟩`; only odd Fock amplitudes are populated.
pub fn odd_cat_state(alpha: C64, dim: usize) -> Result<StateVector> {
    if alpha.norm() == 0.0 {
        return Err(Error::DegenerateState("odd cat with α = 0 is the zero vector".into()));
    }
    if dim < 2 {
        return Err(Error::Argument("odd cat needs dimension ≥ 2".into()));
    }
    let mut amps = coherent_amplitudes(alpha, dim);
    for (n, a) in amps.iter_mut().enumerate() {
        if n % 2 == 0 {
            *a = C64::new(0.0, 0.0);
        }
    }
    // odd-part norm² of the untruncated coherent state is e^{−|α|²} sinh|α|²
    let x = alpha.norm_sqr();
    let full = (-x).exp() * x.sinh();
    let kept: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
    let loss = 1.0 - kept / full;
    if loss > COHERENT_LOSS_LIMIT {
        return Err(Error::Truncation { dim, loss, limit: COHERENT_LOSS_LIMIT });
    }
    StateVector::new(amps, vec![dim])
}

/// `S(r)|n⟩` truncated to `dim` levels.
pub fn squeezed_fock_state(r: f64, n: usize, dim: usize) -> Result<StateVector> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::Argument(format!("squeezing parameter {r} must be ≥ 0")));
    }
    let seed = fock_state(n, dim)?;
    if r == 0.0 {
        return Ok(seed);
    }
    let generator = |work: usize| {
        let a = annihilation_matrix(work);
        let a2 = &a * &a;
        let ad2 = a2.adjoint();
        (a2 - ad2) * C64::from(r / 2.0)
    };
    let out = padded_exponential_action(seed.amplitudes(), dim, generator, SQUEEZE_LOSS_LIMIT)?;
    // the generator couples n ↔ n±2 only; clear rounding noise on the other parity
    let amps = out
        .amplitudes
        .iter()
        .enumerate()
        .map(|(k, a)| if k % 2 == n % 2 { *a } else { C64::new(0.0, 0.0) })
        .collect();
    StateVector::new(amps, vec![dim])
}

/// Applies `exp(G)` to a single-mode vector in a padded working space, then
/// truncates back to `dim`, failing if the truncated norm loss exceeds `limit`.
fn padded_exponential_action(
    amps: &[C64],
    dim: usize,
    generator: impl Fn(usize) -> DMatrix<C64>,
    limit: f64,
) -> Result<StateVector> {
    let work = (2 * dim).max(dim + 40);
    let g = generator(work);
    let u = g.exp();
    let mut v = nalgebra::DVector::<C64>::zeros(work);
    for (i, a) in amps.iter().enumerate() {
        v[i] = *a;
    }
    let w = u * v;
    let kept: f64 = w.iter().take(dim).map(|z| z.norm_sqr()).sum();
    let total: f64 = w.iter().map(|z| z.norm_sqr()).sum();
    let loss = 1.0 - kept / total;
    if loss > limit {
        return Err(Error::Truncation { dim, loss, limit });
    }
    StateVector::new(w.iter().take(dim).copied().collect(), vec![dim])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn fock_basis_vectors() {
        let v = fock_state(0, 20).unwrap();
        assert_eq!(v.amplitudes()[0], c(1.0, 0.0));
        let v = fock_state(19, 20).unwrap();
        assert_eq!(v.amplitudes()[19], c(1.0, 0.0));
        assert!(v.amplitudes()[..19].iter().all(|z| *z == c(0.0, 0.0)));
        assert_eq!(fock_state(20, 20), Err(Error::OutOfRange { index: 20, dim: 20 }));
    }

    #[test]
    fn annihilation_matrix_elements() {
        let a = ModeOperator::annihilation(6);
        for r in 0..6 {
            for col in 0..6 {
                let expect = if col >= 1 && r == col - 1 { (col as f64).sqrt() } else { 0.0 };
                assert_eq!(a.matrix()[(r, col)], c(expect, 0.0));
            }
        }
        assert_eq!(a.kind(), OperatorKind::Annihilation);
    }

    #[test]
    fn coherent_vacuum_and_poisson() {
        let v = coherent_state(c(0.0, 0.0), 20).unwrap();
        assert!((v.amplitudes()[0] - c(1.0, 0.0)).norm() < 1e-15);

        let v = coherent_state(c(0.0, 0.5), 20).unwrap();
        let mean: f64 = 0.25;
        let mut weight = (-mean).exp();
        for n in 0..20 {
            assert!((v.amplitudes()[n].norm_sqr() - weight).abs() < 1e-14, "n={n}");
            weight *= mean / (n + 1) as f64;
        }
    }

    #[test]
    fn coherent_recurrence_and_truncation_error() {
        let alpha = c(1.4, 0.0);
        let v = coherent_state(alpha, 20).unwrap();
        let a = v.amplitudes();
        for n in 0..19 {
            assert!((a[n + 1] - a[n] * alpha / ((n + 1) as f64).sqrt()).norm() < 1e-12);
        }
        match coherent_state(c(4.0, 0.0), 10) {
            Err(Error::Truncation { loss, .. }) => assert!(loss > 1e-8),
            other => panic!("expected truncation error, got {other:?}"),
        }
    }

    #[test]
    fn odd_cat_parity_and_small_alpha_limit() {
        let cat = odd_cat_state(c(1.4, 0.0), 20).unwrap();
        for (n, a) in cat.amplitudes().iter().enumerate() {
            if n % 2 == 0 {
                assert!(a.norm() < 1e-12);
            }
        }
        let small = odd_cat_state(c(0.1, 0.0), 20).unwrap();
        let one = fock_state(1, 20).unwrap();
        assert!(small.fidelity(&one).unwrap() >= 0.99);
        assert!(matches!(odd_cat_state(c(0.0, 0.0), 20), Err(Error::DegenerateState(_))));
    }

    #[test]
    fn squeezed_single_photon_matches_closed_form() {
        // S(r)|1⟩ = cosh^{-3/2} r Σ_k (−tanh r)^k √((2k+1)!)/(2^k k!) |2k+1⟩
        let r = 0.35;
        let s = squeezed_fock_state(r, 1, 20).unwrap();
        let t = r.tanh();
        let pre = r.cosh().powf(-1.5);
        let mut fact_ratio = 1.0; // √((2k+1)!)/(2^k k!)
        for k in 0..9 {
            let expected = pre * (-t).powi(k as i32) * fact_ratio;
            let got = s.amplitudes()[2 * k + 1];
            assert!((got - c(expected, 0.0)).norm() < 1e-7, "k={k}: {got} vs {expected}");
            assert!(s.amplitudes()[2 * k].norm() < 1e-12);
            let k1 = (k + 1) as f64;
            fact_ratio *= ((2.0 * k1) * (2.0 * k1 + 1.0)).sqrt() / (2.0 * k1);
        }
        assert_eq!(squeezed_fock_state(0.0, 1, 20).unwrap(), fock_state(1, 20).unwrap());
    }

    #[test]
    fn tensor_ordering_is_row_major() {
        let e0 = fock_state(0, 2).unwrap();
        let e1 = fock_state(1, 2).unwrap();
        let s = tensor_product(&e0, &e1);
        assert_eq!(s.dims(), &[2, 2]);
        assert_eq!(s.amplitudes()[1], c(1.0, 0.0));

        let s = tensor_product(&fock_state(1, 20).unwrap(), &fock_state(0, 20).unwrap());
        assert_eq!(s.amplitudes()[20], c(1.0, 0.0));
        assert!((s.norm() - 1.0).abs() < 1e-15);

        let rho = fock_state(1, 3).unwrap().density();
        let mixed = DensityOperator::maximally_mixed(vec![4]).unwrap();
        let prod = tensor_product(&rho, &mixed);
        assert!((prod.trace() - c(1.0, 0.0)).norm() < 1e-14);
        assert_eq!(prod.dims(), &[3, 4]);
    }

    #[test]
    fn partial_trace_of_eq5_state() {
        // cos(gt)|01⟩ − i sin(gt)|10⟩ at gt = π/8
        let th = PI / 8.0;
        let psi = StateVector::new(
            vec![c(0.0, 0.0), c(th.cos(), 0.0), c(0.0, -th.sin()), c(0.0, 0.0)],
            vec![2, 2],
        )
        .unwrap();
        let rho_a = partial_trace(&psi.density(), &[0]).unwrap();
        let m = rho_a.matrix();
        assert!((m[(0, 0)].re - th.cos().powi(2)).abs() < 1e-15);
        assert!((m[(1, 1)].re - th.sin().powi(2)).abs() < 1e-15);
        assert!(m[(0, 1)].norm() < 1e-15);
        let via_state = psi.reduced(&[0]).unwrap();
        assert!((via_state.matrix() - m).norm() < 1e-15);

        let bell = StateVector::new(
            vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, -1.0), c(0.0, 0.0)],
            vec![2, 2],
        )
        .unwrap();
        let rho_b = bell.reduced(&[1]).unwrap();
        assert!((rho_b.matrix()[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((rho_b.matrix()[(1, 1)].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn partial_trace_errors() {
        let rho = fock_state(0, 2).unwrap().density();
        assert!(matches!(partial_trace(&rho, &[]), Err(Error::Argument(_))));
        assert!(matches!(partial_trace(&rho, &[1]), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn density_validation() {
        let mut m = DMatrix::<C64>::zeros(2, 2);
        m[(0, 0)] = c(0.5, 0.0);
        m[(1, 1)] = c(0.5, 0.0);
        m[(0, 1)] = c(0.1, 0.0);
        assert!(matches!(
            DensityOperator::new(m.clone(), vec![2]),
            Err(Error::ContractViolation(_))
        ));
        m[(1, 0)] = c(0.1, 0.0);
        assert!(DensityOperator::new(m, vec![2]).is_ok());
    }

    #[test]
    fn displacement_moves_vacuum_to_coherent() {
        let beta = c(0.7, -0.3);
        let d = fock_state(0, 20).unwrap().displaced(beta).unwrap();
        let coh = coherent_state(beta, 20).unwrap();
        assert!(d.fidelity(&coh).unwrap() > 1.0 - 1e-10);
    }

    #[test]
    fn json_round_trip() {
        let s = odd_cat_state(c(1.4, 0.2), 20).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.starts_with("{\"dims\":[20],\"amplitudes\":[["));
        let back: StateVector = serde_json::from_str(&text).unwrap();
        assert!((back.inner(&s).unwrap() - c(1.0, 0.0)).norm() < 1e-14);
    }
}
