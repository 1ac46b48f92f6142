//! Excitation-preserving dynamics.
//!
//! Single-excitation sector amplitudes are indexed by site. For the
//! two-qubit exchange model site 0 is B (initially excited) and site 1 is A,
//! so `|ψ(t)⟩ = cos(gt)|01⟩ − i sin(gt)|10⟩` has amplitudes
//! `(cos gt, −i sin gt)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::fock::{tensor_product, DensityOperator, ModeOperator, StateVector, C64};

const SECTOR_NORM_TOL: f64 = 1e-10;
const MIRROR_TOL: f64 = 1e-12;
/// Top-two-level population that flags a truncated propagation as leaky.
pub const LEAKAGE_WARNING: f64 = 1e-6;

/// Exchange rate `g` of the two-body model; the swap period is `T = π/g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExchangeParams {
    g: f64,
}

impl ExchangeParams {
    pub fn new(g: f64) -> Result<Self> {
        if !(g > 0.0) || !g.is_finite() {
            return Err(Error::Argument(format!("coupling rate must be positive, got {g}")));
        }
        Ok(Self { g })
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn period(&self) -> f64 {
        PI / self.g
    }

    /// `π/(2g)`, the transfer time of an engineered chain with this rate.
    pub fn transfer_time(&self) -> f64 {
        PI / (2.0 * self.g)
    }
}

/// Nearest-neighbour couplings `J_0 … J_{N−2}` of an `N`-site chain.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingProfile {
    couplings: Vec<f64>,
}

impl CouplingProfile {
    /// Requires positive, mirror-symmetric couplings.
    pub fn new(couplings: Vec<f64>) -> Result<Self> {
        if couplings.is_empty() {
            return Err(Error::Argument("a chain needs at least one coupling".into()));
        }
        if let Some(j) = couplings.iter().find(|j| !(**j > 0.0) || !j.is_finite()) {
            return Err(Error::Argument(format!("coupling {j} is not positive")));
        }
        let n = couplings.len();
        for k in 0..n / 2 {
            let (a, b) = (couplings[k], couplings[n - 1 - k]);
            if (a - b).abs() > MIRROR_TOL * a.max(1.0) {
                return Err(Error::Argument(format!(
                    "couplings are not mirror symmetric: J_{k} = {a}, J_{} = {b}",
                    n - 1 - k
                )));
            }
        }
        Ok(Self { couplings })
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn sites(&self) -> usize {
        self.couplings.len() + 1
    }

    pub fn max_coupling(&self) -> f64 {
        self.couplings.iter().cloned().fold(0.0, f64::max)
    }

    /// The real symmetric single-excitation block: zero diagonal, `J_k` on
    /// the off-diagonals.
    pub fn hopping_matrix(&self) -> DMatrix<f64> {
        let n = self.sites();
        let mut m = DMatrix::zeros(n, n);
        for (k, j) in self.couplings.iter().enumerate() {
            m[(k, k + 1)] = *j;
            m[(k + 1, k)] = *j;
        }
        m
    }
}

/// `J_k = g √((k+1)(N−k−1))`.
pub fn pst_couplings(sites: usize, g: f64) -> Result<CouplingProfile> {
    if sites < 2 {
        return Err(Error::Argument(format!("a chain needs at least 2 sites, got {sites}")));
    }
    ExchangeParams::new(g)?;
    let couplings = (0..sites - 1)
        .map(|k| g * (((k + 1) * (sites - k - 1)) as f64).sqrt())
        .collect();
    CouplingProfile::new(couplings)
}

/// Single-excitation wavefunction at a given time.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorAmplitudes {
    amplitudes: Vec<C64>,
    time: f64,
}

impl SectorAmplitudes {
    pub fn new(amplitudes: Vec<C64>, time: f64) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Argument("sector needs at least one site".into()));
        }
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > SECTOR_NORM_TOL {
            return Err(Error::ContractViolation(format!(
                "sector amplitudes have norm² {norm}, expected 1"
            )));
        }
        Ok(Self { amplitudes, time })
    }

    /// Excitation on `site` at time zero.
    pub fn localized(sites: usize, site: usize) -> Result<Self> {
        if site >= sites {
            return Err(Error::OutOfRange { index: site, dim: sites });
        }
        let mut amps = vec![C64::new(0.0, 0.0); sites];
        amps[site] = C64::new(1.0, 0.0);
        Self::new(amps, 0.0)
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn sites(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn time(&self) -> f64 {
        self.time
    }
}

/// `cos(gt)|01⟩ − i sin(gt)|10⟩` as sector amplitudes `(B, A)`.
pub fn xy_two_qubit_state(params: ExchangeParams, t: f64) -> Result<SectorAmplitudes> {
    if !(t >= 0.0) {
        return Err(Error::Argument(format!("time must be non-negative, got {t}")));
    }
    let th = params.g * t;
    SectorAmplitudes::new(vec![C64::new(th.cos(), 0.0), C64::new(0.0, -th.sin())], t)
}

/// Site excitation probabilities `p_k = |c_k|²`. Each site's local state is
/// `p_k|1⟩⟨1| + (1−p_k)|0⟩⟨0|`.
pub fn reduced_excitation_probabilities(amps: &SectorAmplitudes) -> Vec<f64> {
    amps.amplitudes.iter().map(|c| c.norm_sqr()).collect()
}

/// `|sin 2gt|`.
pub fn concurrence_closed_form(params: ExchangeParams, t: f64) -> f64 {
    (2.0 * params.g * t).sin().abs()
}

/// `√(2(1 − Tr ρ_A²))` for the reduced state of a globally pure state.
pub fn concurrence_from_purity(rho_a: &DensityOperator) -> Result<f64> {
    let purity = rho_a.purity();
    if purity > 1.0 + 1e-9 {
        return Err(Error::ContractViolation(format!("purity {purity} exceeds 1")));
    }
    Ok((2.0 * (1.0 - purity)).max(0.0).sqrt())
}

/// Exact propagator of the single-excitation block via eigendecomposition of
/// the real symmetric hopping matrix. Reusable across times.
#[derive(Debug, Clone)]
pub struct SectorPropagator {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

impl SectorPropagator {
    pub fn new(profile: &CouplingProfile) -> Self {
        let eig = SymmetricEigen::new(profile.hopping_matrix());
        Self { eigenvalues: eig.eigenvalues, eigenvectors: eig.eigenvectors }
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// `exp(−iMt)` as a dense complex matrix.
    pub fn unitary(&self, t: f64) -> DMatrix<C64> {
        let n = self.eigenvalues.len();
        let v = self.eigenvectors.map(|x| C64::new(x, 0.0));
        let mut scaled = v.clone();
        for col in 0..n {
            let phase = C64::from_polar(1.0, -self.eigenvalues[col] * t);
            for row in 0..n {
                scaled[(row, col)] *= phase;
            }
        }
        scaled * v.transpose()
    }

    /// Evolves `initial` forward by `t`.
    pub fn propagate(&self, initial: &SectorAmplitudes, t: f64) -> Result<SectorAmplitudes> {
        let n = self.eigenvalues.len();
        if initial.sites() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for a {n}-site chain",
                initial.sites()
            )));
        }
        let c0 = DVector::from_column_slice(&initial.amplitudes);
        let c = self.unitary(t) * c0;
        SectorAmplitudes::new(c.as_slice().to_vec(), initial.time + t)
    }
}

/// `c(t) = exp(−iMt) c(0)` for the chain's single-excitation block.
pub fn sector_propagate(profile: &CouplingProfile, initial: &SectorAmplitudes, t: f64) -> Result<SectorAmplitudes> {
    SectorPropagator::new(profile).propagate(initial, t)
}

/// One excitation-number block of the truncated two-mode space.
#[derive(Debug, Clone)]
struct NumberBlock {
    /// Full-space indices `i_A * dim + i_B` with `i_A + i_B` fixed.
    indices: Vec<usize>,
    matrix: DMatrix<C64>,
}

/// Beam-splitter Hamiltonian `g(a†b + ab†)` on two modes truncated at `dim`,
/// stored block-diagonally in total excitation number.
#[derive(Debug, Clone)]
pub struct BeamSplitter {
    dim: usize,
    g: f64,
    blocks: Vec<NumberBlock>,
}

impl BeamSplitter {
    pub fn new(g: f64, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Argument(format!("beam splitter needs dim ≥ 2, got {dim}")));
        }
        if !g.is_finite() {
            return Err(Error::Argument(format!("coupling rate {g} is not finite")));
        }
        let mut blocks = Vec::with_capacity(2 * dim - 1);
        for total in 0..=2 * (dim - 1) {
            let lo = total.saturating_sub(dim - 1);
            let hi = total.min(dim - 1);
            let indices: Vec<usize> = (lo..=hi).map(|ia| ia * dim + (total - ia)).collect();
            let size = indices.len();
            let mut matrix = DMatrix::<C64>::zeros(size, size);
            // state s has i_A = lo + s; a†b maps s → s+1 with √(i_A+1)√(i_B)
            for s in 0..size.saturating_sub(1) {
                let ia = lo + s;
                let ib = total - ia;
                let amp = g * (((ia + 1) * ib) as f64).sqrt();
                matrix[(s + 1, s)] = C64::from(amp);
                matrix[(s, s + 1)] = C64::from(amp);
            }
            blocks.push(NumberBlock { indices, matrix });
        }
        Ok(Self { dim, g, blocks })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    /// Dense Hamiltonian on the `dim²` space.
    pub fn hamiltonian(&self) -> DMatrix<C64> {
        let n = self.dim * self.dim;
        let mut h = DMatrix::zeros(n, n);
        for block in &self.blocks {
            for (r, &ir) in block.indices.iter().enumerate() {
                for (c, &ic) in block.indices.iter().enumerate() {
                    h[(ir, ic)] = block.matrix[(r, c)];
                }
            }
        }
        h
    }

    /// `exp(−iHt)`, one Padé scaling-and-squaring exponential per block.
    pub fn propagator(&self, t: f64) -> BeamSplitterPropagator {
        let factor = C64::new(0.0, -t);
        let blocks = self
            .blocks
            .iter()
            .map(|b| NumberBlock { indices: b.indices.clone(), matrix: (&b.matrix * factor).exp() })
            .collect();
        BeamSplitterPropagator { dim: self.dim, blocks }
    }
}

/// Block-diagonal `exp(−iHt)` of a [`BeamSplitter`].
#[derive(Debug, Clone)]
pub struct BeamSplitterPropagator {
    dim: usize,
    blocks: Vec<NumberBlock>,
}

impl BeamSplitterPropagator {
    pub fn to_operator(&self) -> ModeOperator {
        let n = self.dim * self.dim;
        let mut u = DMatrix::zeros(n, n);
        for block in &self.blocks {
            for (r, &ir) in block.indices.iter().enumerate() {
                for (c, &ic) in block.indices.iter().enumerate() {
                    u[(ir, ic)] = block.matrix[(r, c)];
                }
            }
        }
        ModeOperator::general(u).expect("square by construction")
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.dims() != [self.dim, self.dim] {
            return Err(Error::DimensionMismatch(format!(
                "beam splitter on dims [{0}, {0}] applied to {1:?}",
                self.dim,
                state.dims()
            )));
        }
        let amps = state.amplitudes();
        let mut out = vec![C64::new(0.0, 0.0); amps.len()];
        for block in &self.blocks {
            for (r, &ir) in block.indices.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (c, &ic) in block.indices.iter().enumerate() {
                    acc += block.matrix[(r, c)] * amps[ic];
                }
                out[ir] = acc;
            }
        }
        StateVector::new(out, vec![self.dim, self.dim])
    }
}

/// Dense `exp(−i g(a†b + ab†) t)` on two modes of dimension `dim`.
pub fn beam_splitter_propagator(g: f64, t: f64, dim: usize) -> Result<ModeOperator> {
    Ok(BeamSplitter::new(g, dim)?.propagator(t).to_operator())
}

/// Reduced states after evolving `|0⟩_A ⊗ seed_B` under the beam splitter.
#[derive(Debug, Clone)]
pub struct SeedEvolution {
    pub rho_a: DensityOperator,
    pub rho_b: DensityOperator,
    /// Largest population in the top two Fock levels of either mode.
    pub leakage: f64,
    /// Set when `leakage` exceeds [`LEAKAGE_WARNING`].
    pub truncation_warning: bool,
}

fn top_two_population(rho: &DensityOperator) -> f64 {
    let pops = rho.populations();
    let n = pops.len();
    pops[n.saturating_sub(2)..].iter().sum()
}

/// Evolves with a prepared propagator; the time is baked into `propagator`.
pub fn evolve_seed_with(seed: &StateVector, propagator: &BeamSplitterPropagator) -> Result<SeedEvolution> {
    if seed.dims().len() != 1 || seed.dims()[0] != propagator.dim {
        return Err(Error::DimensionMismatch(format!(
            "seed dims {:?} for a beam splitter of dim {}",
            seed.dims(),
            propagator.dim
        )));
    }
    let vacuum = crate::fock::fock_state(0, propagator.dim)?;
    let psi = propagator.apply(&tensor_product(&vacuum, seed))?;
    let rho_a = psi.reduced(&[0])?;
    let rho_b = psi.reduced(&[1])?;
    let leakage = top_two_population(&rho_a).max(top_two_population(&rho_b));
    Ok(SeedEvolution { rho_a, rho_b, leakage, truncation_warning: leakage > LEAKAGE_WARNING })
}

pub fn evolve_seed(seed: &StateVector, g: f64, t: f64, dim: usize) -> Result<SeedEvolution> {
    evolve_seed_with(seed, &BeamSplitter::new(g, dim)?.propagator(t))
}

/// Density operator on the "no excitation or one excitation" manifold of an
/// `N`-site register. Index 0 is the all-ground state, index `1 + k` has
/// site `k` excited.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorDensity {
    matrix: DMatrix<C64>,
}

impl From<&SectorAmplitudes> for SectorDensity {
    fn from(amps: &SectorAmplitudes) -> Self {
        let n = amps.sites();
        let mut v = DVector::<C64>::zeros(n + 1);
        for (k, c) in amps.amplitudes.iter().enumerate() {
            v[k + 1] = *c;
        }
        SectorDensity { matrix: &v * v.adjoint() }
    }
}

impl SectorDensity {
    pub fn sites(&self) -> usize {
        self.matrix.nrows() - 1
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn site_probabilities(&self) -> Vec<f64> {
        (1..=self.sites()).map(|i| self.matrix[(i, i)].re).collect()
    }

    pub fn total_excitation(&self) -> f64 {
        self.site_probabilities().iter().sum()
    }

    /// Reduced two-level state of `site` in the `{|0⟩, |1⟩}` basis.
    pub fn local_state(&self, site: usize) -> Result<DensityOperator> {
        if site >= self.sites() {
            return Err(Error::OutOfRange { index: site, dim: self.sites() });
        }
        let i = site + 1;
        let p = self.matrix[(i, i)].re;
        let mut m = DMatrix::<C64>::zeros(2, 2);
        m[(0, 0)] = C64::from(1.0 - p);
        m[(1, 1)] = C64::from(p);
        m[(0, 1)] = self.matrix[(0, i)];
        m[(1, 0)] = self.matrix[(i, 0)];
        DensityOperator::new(m, vec![2])
    }

    /// Embeds into the full qubit register (site 0 is the slowest index).
    pub fn to_register(&self) -> Result<DensityOperator> {
        let n = self.sites();
        if n > 12 {
            return Err(Error::ResourceLimit(format!("register of {n} qubits is too large")));
        }
        let full = 1usize << n;
        let index = |i: usize| if i == 0 { 0 } else { 1usize << (n - i) };
        let mut m = DMatrix::<C64>::zeros(full, full);
        for r in 0..=n {
            for c in 0..=n {
                m[(index(r), index(c))] = self.matrix[(r, c)];
            }
        }
        Ok(DensityOperator::from_parts(m, vec![2; n]))
    }

    fn apply_unitary(&mut self, block: &DMatrix<C64>) {
        let n = self.sites();
        let mut u = DMatrix::<C64>::identity(n + 1, n + 1);
        u.view_mut((1, 1), (n, n)).copy_from(block);
        self.matrix = &u * &self.matrix * u.adjoint();
    }

    /// Per-site Kraus pair `K₀ = diag(1, √(1−γdt))`, `K₁ = √(γdt)|0⟩⟨1|`.
    fn apply_damping(&mut self, decay: f64) {
        let keep = (1.0 - decay).sqrt();
        let n = self.sites();
        for site in 1..=n {
            let p = self.matrix[(site, site)].re;
            for j in 0..=n {
                self.matrix[(site, j)] *= keep;
                self.matrix[(j, site)] *= keep;
            }
            self.matrix[(0, 0)] += C64::from(decay * p);
        }
    }
}

/// Damped trajectory sampled at the requested times.
#[derive(Debug, Clone)]
pub struct DampedTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<SectorDensity>,
}

/// Largest Trotter step allowed for the given couplings and decay rate.
pub fn max_damping_step(profile: &CouplingProfile, gamma: f64) -> f64 {
    0.01 / profile.max_coupling().max(gamma)
}

/// First-order Trotter alternation of `exp(−iM dt)` and per-site amplitude
/// damping at rate `gamma`. Each interval between requested times is split
/// into equal sub-steps no longer than `dt`.
pub fn amplitude_damping_evolve(
    initial: impl Into<SectorDensity>,
    profile: &CouplingProfile,
    gamma: f64,
    times: &[f64],
    dt: f64,
) -> Result<DampedTrajectory> {
    let mut state: SectorDensity = initial.into();
    if state.sites() != profile.sites() {
        return Err(Error::DimensionMismatch(format!(
            "{}-site state for a {}-site chain",
            state.sites(),
            profile.sites()
        )));
    }
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(Error::Argument(format!("damping rate must be ≥ 0, got {gamma}")));
    }
    let limit = max_damping_step(profile, gamma);
    if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
        return Err(Error::StepSize { dt, limit });
    }
    let propagator = SectorPropagator::new(profile);
    let mut now = 0.0;
    let mut states = Vec::with_capacity(times.len());
    for &t in times {
        if !(t >= now) {
            return Err(Error::Argument(format!("sample times must be non-decreasing from 0, got {t}")));
        }
        let span = t - now;
        let steps = (span / dt).ceil() as usize;
        if steps > 0 {
            let h = span / steps as f64;
            let block = propagator.unitary(h);
            let decay = gamma * h;
            for _ in 0..steps {
                state.apply_unitary(&block);
                state.apply_damping(decay);
            }
        }
        let drift = (state.trace() - 1.0).abs();
        if drift > 1e-8 {
            return Err(Error::ContractViolation(format!("damped trace drifted by {drift:.3e}")));
        }
        now = t;
        states.push(state.clone());
    }
    Ok(DampedTrajectory { times: times.to_vec(), states })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::fock_state;

    fn params() -> ExchangeParams {
        ExchangeParams::new(1.0).unwrap()
    }

    #[test]
    fn xy_state_reference_points() {
        let p = params();
        let t = p.period();
        let a = xy_two_qubit_state(p, 0.0).unwrap();
        assert_eq!(a.amplitudes(), &[C64::new(1.0, 0.0), C64::new(0.0, -0.0)]);
        let a = xy_two_qubit_state(p, t / 2.0).unwrap();
        assert!((a.amplitudes()[0]).norm() < 1e-15);
        assert!((a.amplitudes()[1] - C64::new(0.0, -1.0)).norm() < 1e-15);
        let a = xy_two_qubit_state(p, t / 4.0).unwrap();
        let s = 0.5f64.sqrt();
        assert!((a.amplitudes()[0] - C64::new(s, 0.0)).norm() < 1e-15);
        assert!((a.amplitudes()[1] - C64::new(0.0, -s)).norm() < 1e-15);
        let probs = reduced_excitation_probabilities(&a);
        assert!((probs[0] - 0.5).abs() < 1e-15 && (probs[1] - 0.5).abs() < 1e-15);
        assert!(xy_two_qubit_state(p, -1.0).is_err());
    }

    #[test]
    fn concurrence_values() {
        let p = params();
        let t = p.period();
        assert_eq!(concurrence_closed_form(p, 0.0), 0.0);
        assert!((concurrence_closed_form(p, t / 4.0) - 1.0).abs() < 1e-15);
        assert!((concurrence_closed_form(p, t / 8.0) - 0.5f64.sqrt()).abs() < 1e-15);

        let pure = DensityOperator::from_populations(&[1.0, 0.0]).unwrap();
        assert_eq!(concurrence_from_purity(&pure).unwrap(), 0.0);
        let half = DensityOperator::from_populations(&[0.5, 0.5]).unwrap();
        assert!((concurrence_from_purity(&half).unwrap() - 1.0).abs() < 1e-15);
        let c2 = (PI / 8.0).cos().powi(2);
        let eighth = DensityOperator::from_populations(&[c2, 1.0 - c2]).unwrap();
        assert!((concurrence_from_purity(&eighth).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn pst_profiles() {
        let p = pst_couplings(4, 1.0).unwrap();
        let expect = [3f64.sqrt(), 2.0, 3f64.sqrt()];
        for (a, b) in p.couplings().iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(pst_couplings(2, 0.7).unwrap().couplings(), &[0.7]);
        let p5 = pst_couplings(5, 1.0).unwrap();
        let expect = [2.0, 6f64.sqrt(), 6f64.sqrt(), 2.0];
        for (a, b) in p5.couplings().iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(pst_couplings(1, 1.0).is_err());
        assert!(CouplingProfile::new(vec![1.0, 2.0]).is_err());
        assert!(CouplingProfile::new(vec![1.0, -1.0, 1.0]).is_err());
    }

    #[test]
    fn chain_spectrum_is_equally_spaced() {
        let prop = SectorPropagator::new(&pst_couplings(4, 1.0).unwrap());
        let mut ev: Vec<f64> = prop.eigenvalues().iter().cloned().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in ev.iter().zip([-3.0, -1.0, 1.0, 3.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn beam_splitter_identity_and_swap() {
        let u0 = beam_splitter_propagator(1.0, 0.0, 5).unwrap();
        assert!((u0.matrix() - DMatrix::<C64>::identity(25, 25)).norm() < 1e-15);

        let dim = 20;
        let u = beam_splitter_propagator(1.0, PI / 2.0, dim).unwrap();
        assert!(u.unitarity_defect() < 1e-9);
        let start = tensor_product(&fock_state(0, dim).unwrap(), &fock_state(1, dim).unwrap());
        let swapped = tensor_product(&fock_state(1, dim).unwrap(), &fock_state(0, dim).unwrap());
        let out = start.apply(&u).unwrap();
        assert!(out.fidelity(&swapped).unwrap() >= 1.0 - 1e-8);
    }

    #[test]
    fn block_propagator_matches_dense_hamiltonian_exponential() {
        let bs = BeamSplitter::new(0.8, 4).unwrap();
        let t = 0.37;
        let dense = (bs.hamiltonian() * C64::new(0.0, -t)).exp();
        let blocks = bs.propagator(t).to_operator();
        assert!((blocks.matrix() - dense).norm() < 1e-12);
    }

    #[test]
    fn seed_evolution_endpoints() {
        let one = fock_state(1, 20).unwrap();
        let ev = evolve_seed(&one, 1.0, 0.0, 20).unwrap();
        assert!((ev.rho_a.populations()[0] - 1.0).abs() < 1e-15);
        assert!((ev.rho_b.populations()[1] - 1.0).abs() < 1e-15);
        assert!(!ev.truncation_warning);

        let ev = evolve_seed(&one, 1.0, PI / 4.0, 20).unwrap();
        let half = DensityOperator::excitation_mixture(0.5, 20).unwrap();
        assert!((ev.rho_a.matrix() - half.matrix()).norm() < 1e-8);
        assert!((ev.rho_b.matrix() - half.matrix()).norm() < 1e-8);
    }

    #[test]
    fn leakage_flag_for_crowded_truncation() {
        let seed = fock_state(5, 6).unwrap();
        let ev = evolve_seed(&seed, 1.0, 0.3, 6).unwrap();
        assert!(ev.truncation_warning);
    }

    #[test]
    fn damping_step_limit_and_fixed_point() {
        let profile = pst_couplings(2, 1.0).unwrap();
        let start = SectorAmplitudes::localized(2, 0).unwrap();
        assert!(matches!(
            amplitude_damping_evolve(&start, &profile, 0.1, &[1.0], 0.02),
            Err(Error::StepSize { .. })
        ));
        let traj = amplitude_damping_evolve(&start, &profile, 0.5, &[0.0, 40.0], 0.01).unwrap();
        let last = traj.states.last().unwrap();
        assert!(last.total_excitation() < 1e-8);
        assert!((last.trace() - 1.0).abs() < 1e-8);
        assert!((last.matrix()[(0, 0)].re - 1.0).abs() < 1e-8);
    }

    #[test]
    fn undamped_trotter_matches_unitary() {
        let profile = pst_couplings(3, 1.0).unwrap();
        let start = SectorAmplitudes::localized(3, 0).unwrap();
        let times: Vec<f64> = (0..=20).map(|i| i as f64 * 0.1).collect();
        let traj = amplitude_damping_evolve(&start, &profile, 0.0, &times, 0.005).unwrap();
        for (t, s) in traj.times.iter().zip(&traj.states) {
            let exact = sector_propagate(&profile, &start, *t).unwrap();
            for (p, q) in s.site_probabilities().iter().zip(reduced_excitation_probabilities(&exact)) {
                assert!((p - q).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn register_embedding() {
        let amps = xy_two_qubit_state(params(), 0.3).unwrap();
        let dens = SectorDensity::from(&amps);
        let reg = dens.to_register().unwrap();
        assert_eq!(reg.dims(), &[2, 2]);
        // site 0 (B) excited is |01⟩ at index 1 when site 0 is listed last
        let rho_site0 = crate::fock::partial_trace(&reg, &[0]).unwrap();
        assert!((rho_site0.populations()[1] - amps.amplitudes()[0].norm_sqr()).abs() < 1e-15);
        let local = dens.local_state(0).unwrap();
        assert!((local.matrix() - rho_site0.matrix()).norm() < 1e-15);
    }
}
