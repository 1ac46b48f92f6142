//! Resource trajectories: local negativities, their sum against the seed
//! budget, tracking gap, concurrence, site and block probabilities.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::dynamics::{
    amplitude_damping_evolve, concurrence_closed_form, evolve_seed_with, max_damping_step, pst_couplings,
    reduced_excitation_probabilities, xy_two_qubit_state, BeamSplitter, ExchangeParams, SectorAmplitudes,
    SectorPropagator,
};
use crate::error::{Error, Result};
use crate::fock::{DensityOperator, StateVector, C64};
use crate::phase_space::{
    default_two_mode_grid, mixture_negativity_closed_form, single_mode_negativity, single_photon_negativity,
    two_mode_negativity, PhaseGrid,
};

/// Largest disagreement tolerated between closed-form and quadrature site
/// negativities.
pub const CROSS_CHECK_TOL: f64 = 1e-4;
/// Seeds whose negativity falls below this have no usable budget.
pub const MIN_SEED_BUDGET: f64 = 1e-6;
/// Number of chain samples whose site negativities are re-done by quadrature.
pub const CROSS_CHECK_SAMPLES: usize = 5;

/// Time-indexed resource record. Per-site rows are indexed `[time][site]`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub site_labels: Vec<String>,
    pub site_negativities: Vec<Vec<f64>>,
    pub total: Vec<f64>,
    pub budget: f64,
    pub concurrence: Option<Vec<f64>>,
    /// Probability that each site is out of its ground state.
    pub probabilities: Vec<Vec<f64>>,
    /// Block-2 negativities for chain runs; `None` rows were not evaluated.
    pub block_negativities: Option<Vec<Option<Vec<f64>>>>,
    pub gap: Vec<f64>,
    pub meta: Map<String, Value>,
}

impl Trajectory {
    fn assemble(
        times: Vec<f64>,
        site_labels: Vec<String>,
        site_negativities: Vec<Vec<f64>>,
        probabilities: Vec<Vec<f64>>,
        budget: f64,
    ) -> Self {
        let total: Vec<f64> = site_negativities.iter().map(|row| row.iter().sum()).collect();
        let gap = total.iter().map(|n| (budget - n).max(0.0)).collect();
        Trajectory {
            times,
            site_labels,
            site_negativities,
            total,
            budget,
            concurrence: None,
            probabilities,
            block_negativities: None,
            gap,
            meta: Map::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn sites(&self) -> usize {
        self.site_labels.len()
    }

    /// Negativity column of one site.
    pub fn site_series(&self, site: usize) -> Vec<f64> {
        self.site_negativities.iter().map(|row| row[site]).collect()
    }

    /// Largest amount by which `N_tot` exceeds the budget (≤ 0 when bounded).
    pub fn max_excess(&self) -> f64 {
        self.total.iter().map(|n| n - self.budget).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest site probability at each time.
    pub fn max_site_probability(&self) -> Vec<f64> {
        self.probabilities.iter().map(|row| row.iter().cloned().fold(0.0, f64::max)).collect()
    }

    /// Largest `p_b + p_{b+1}` at each time.
    pub fn max_block_probability(&self) -> Vec<f64> {
        self.probabilities
            .iter()
            .map(|row| row.windows(2).map(|w| w[0] + w[1]).fold(0.0, f64::max))
            .collect()
    }
}

/// `n` uniform samples over `[0, end]`, both endpoints included.
pub fn uniform_times(end: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::Argument(format!("need at least 2 time samples, got {n}")));
    }
    let step = end / (n - 1) as f64;
    Ok((0..n).map(|i| if i == n - 1 { end } else { i as f64 * step }).collect())
}

fn qubit_local_state(p: f64) -> Result<DensityOperator> {
    DensityOperator::excitation_mixture(p.clamp(0.0, 1.0), 2)
}

/// Two-qubit exchange over one period `[0, T]`. Site order is `(A, B)` with
/// the excitation starting on B.
pub fn two_body_trajectory(params: ExchangeParams, grid: &PhaseGrid, n_times: usize) -> Result<Trajectory> {
    let times = uniform_times(params.period(), n_times)?;
    let budget = single_mode_negativity(&crate::fock::fock_state(1, 2)?.density(), grid)?;
    let rows: Vec<(Vec<f64>, Vec<f64>)> = times
        .par_iter()
        .map(|&t| {
            let probs = reduced_excitation_probabilities(&xy_two_qubit_state(params, t)?);
            let (pb, pa) = (probs[0], probs[1]);
            let na = single_mode_negativity(&qubit_local_state(pa)?, grid)?;
            let nb = single_mode_negativity(&qubit_local_state(pb)?, grid)?;
            Ok((vec![na, nb], vec![pa, pb]))
        })
        .collect::<Result<_>>()?;
    let (negs, probs): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    let concurrence = times.iter().map(|&t| concurrence_closed_form(params, t)).collect();
    let mut traj = Trajectory::assemble(times, vec!["A".into(), "B".into()], negs, probs, budget);
    traj.concurrence = Some(concurrence);
    traj.meta.insert("experiment".into(), json!("two-body"));
    traj.meta.insert("g".into(), json!(params.g()));
    traj.meta.insert("period".into(), json!(params.period()));
    traj.meta.insert("grid_extent".into(), json!(grid.extent()));
    traj.meta.insert("grid_points".into(), json!(grid.points()));
    Ok(traj)
}

/// Two-mode reduced state of sites `(b, b+1)`, each embedded as a
/// two-level Fock mode. Mode A is site `b`.
pub fn block2_reduced_state(amps: &SectorAmplitudes, b: usize) -> Result<DensityOperator> {
    let n = amps.sites();
    if n < 2 || b > n - 2 {
        return Err(Error::OutOfRange { index: b, dim: n.saturating_sub(1) });
    }
    let c = amps.amplitudes();
    let inside = c[b].norm_sqr() + c[b + 1].norm_sqr();
    // basis |i_A i_B⟩ at index 2 i_A + i_B
    let phi = [C64::new(0.0, 0.0), c[b + 1], c[b], C64::new(0.0, 0.0)];
    let mut m = DMatrix::<C64>::zeros(4, 4);
    for r in 0..4 {
        for s in 0..4 {
            m[(r, s)] = phi[r] * phi[s].conj();
        }
    }
    m[(0, 0)] += C64::from((1.0 - inside).max(0.0));
    DensityOperator::new(m, vec![2, 2])
}

/// Which samples of a chain run get block-2 quadrature, and on what grid.
#[derive(Debug, Clone)]
pub struct BlockSampling {
    pub grid: PhaseGrid,
    /// Every `stride`-th sample (starting at 0) is evaluated.
    pub stride: usize,
}

impl Default for BlockSampling {
    fn default() -> Self {
        Self { grid: default_two_mode_grid(), stride: 4 }
    }
}

/// PST chain with default block sampling.
pub fn chain_trajectory(sites: usize, params: ExchangeParams, grid: &PhaseGrid, n_times: usize) -> Result<Trajectory> {
    chain_trajectory_with(sites, params, grid, Some(&BlockSampling::default()), n_times)
}

/// PST chain over `[0, t*]` with the excitation starting on site 0.
/// Site negativities come from the closed form; a few samples are redone by
/// quadrature and must agree within [`CROSS_CHECK_TOL`].
pub fn chain_trajectory_with(
    sites: usize,
    params: ExchangeParams,
    grid: &PhaseGrid,
    blocks: Option<&BlockSampling>,
    n_times: usize,
) -> Result<Trajectory> {
    let profile = pst_couplings(sites, params.g())?;
    let t_star = params.transfer_time();
    let times = uniform_times(t_star, n_times)?;
    let propagator = SectorPropagator::new(&profile);
    let start = SectorAmplitudes::localized(sites, 0)?;
    let states: Vec<SectorAmplitudes> =
        times.par_iter().map(|&t| propagator.propagate(&start, t)).collect::<Result<_>>()?;
    let probs: Vec<Vec<f64>> = states.iter().map(reduced_excitation_probabilities).collect();
    let negs: Vec<Vec<f64>> = probs
        .iter()
        .map(|row| row.iter().map(|&p| mixture_negativity_closed_form(p.clamp(0.0, 1.0))).collect())
        .collect::<Result<_>>()?;

    let checks: Vec<usize> = (0..CROSS_CHECK_SAMPLES).map(|i| i * (n_times - 1) / (CROSS_CHECK_SAMPLES - 1)).collect();
    let mut worst = 0.0f64;
    for &i in &checks {
        for (k, &p) in probs[i].iter().enumerate() {
            let quad = single_mode_negativity(&qubit_local_state(p)?, grid)?;
            worst = worst.max((quad - negs[i][k]).abs());
        }
    }
    if worst > CROSS_CHECK_TOL {
        return Err(Error::ContractViolation(format!(
            "quadrature and closed-form site negativities differ by {worst:.3e}"
        )));
    }

    let block_rows = match blocks {
        None => None,
        Some(sampling) => {
            if sampling.stride == 0 {
                return Err(Error::Argument("block stride must be positive".into()));
            }
            let rows: Vec<Option<Vec<f64>>> = states
                .par_iter()
                .enumerate()
                .map(|(i, amps)| {
                    if i % sampling.stride != 0 {
                        return Ok(None);
                    }
                    (0..sites - 1)
                        .map(|b| two_mode_negativity(&block2_reduced_state(amps, b)?, &sampling.grid, &sampling.grid))
                        .collect::<Result<Vec<f64>>>()
                        .map(Some)
                })
                .collect::<Result<_>>()?;
            Some(rows)
        }
    };

    let labels = (0..sites).map(|k| k.to_string()).collect();
    let mut traj = Trajectory::assemble(times, labels, negs, probs, single_photon_negativity());
    traj.block_negativities = block_rows;
    traj.meta.insert("experiment".into(), json!("chain"));
    traj.meta.insert("sites".into(), json!(sites));
    traj.meta.insert("g".into(), json!(params.g()));
    traj.meta.insert("transfer_time".into(), json!(t_star));
    traj.meta.insert("couplings".into(), json!(profile.couplings()));
    traj.meta.insert("grid_extent".into(), json!(grid.extent()));
    traj.meta.insert("grid_points".into(), json!(grid.points()));
    traj.meta.insert("quadrature_cross_check_max_diff".into(), json!(worst));
    if let Some(s) = blocks {
        traj.meta.insert("block_grid_extent".into(), json!(s.grid.extent()));
        traj.meta.insert("block_grid_points".into(), json!(s.grid.points()));
        traj.meta.insert("block_stride".into(), json!(s.stride));
    }
    Ok(traj)
}

/// Two-qubit exchange with per-site amplitude damping at rate `gamma`,
/// sampled on the same grid as [`two_body_trajectory`].
pub fn damped_two_body_trajectory(
    params: ExchangeParams,
    gamma: f64,
    grid: &PhaseGrid,
    n_times: usize,
) -> Result<Trajectory> {
    let profile = pst_couplings(2, params.g())?;
    let times = uniform_times(params.period(), n_times)?;
    let start = SectorAmplitudes::localized(2, 0)?;
    let dt = max_damping_step(&profile, gamma);
    let run = amplitude_damping_evolve(&start, &profile, gamma, &times, dt)?;
    let rows: Vec<(Vec<f64>, Vec<f64>)> = run
        .states
        .par_iter()
        .map(|s| {
            // sector site 0 is B, site 1 is A
            let rho_b = s.local_state(0)?;
            let rho_a = s.local_state(1)?;
            let probs = s.site_probabilities();
            let na = single_mode_negativity(&rho_a, grid)?;
            let nb = single_mode_negativity(&rho_b, grid)?;
            Ok((vec![na, nb], vec![probs[1], probs[0]]))
        })
        .collect::<Result<_>>()?;
    let (negs, probs): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    let budget = single_mode_negativity(&crate::fock::fock_state(1, 2)?.density(), grid)?;
    let mut traj = Trajectory::assemble(times, vec!["A".into(), "B".into()], negs, probs, budget);
    traj.meta.insert("experiment".into(), json!("damping"));
    traj.meta.insert("g".into(), json!(params.g()));
    traj.meta.insert("gamma".into(), json!(gamma));
    traj.meta.insert("dt".into(), json!(dt));
    Ok(traj)
}

/// Pointwise `ε(t) = |N_tot^ideal(t) − N_tot^measured(t)|` and its
/// trapezoid time average.
pub fn tracking_infidelity(ideal: &Trajectory, measured: &Trajectory) -> Result<(Vec<f64>, f64)> {
    if ideal.len() != measured.len()
        || ideal.times.iter().zip(&measured.times).any(|(a, b)| (a - b).abs() > 1e-12 * a.abs().max(1.0))
    {
        return Err(Error::Argument("trajectories are sampled on different time grids".into()));
    }
    let eps: Vec<f64> = ideal.total.iter().zip(&measured.total).map(|(a, b)| (a - b).abs()).collect();
    let mean = trapezoid_mean(&ideal.times, &eps);
    Ok((eps, mean))
}

fn trapezoid_mean(times: &[f64], values: &[f64]) -> f64 {
    match times.len() {
        0 => 0.0,
        1 => values[0],
        n => {
            let span = times[n - 1] - times[0];
            if span <= 0.0 {
                return values.iter().sum::<f64>() / n as f64;
            }
            let area: f64 = times
                .windows(2)
                .zip(values.windows(2))
                .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
                .sum();
            area / span
        }
    }
}

/// Seed runs sharing one time grid.
#[derive(Debug, Clone)]
pub struct SeedComparison {
    pub labels: Vec<String>,
    pub trajectories: Vec<Trajectory>,
    /// `N_tot(t) / N_seed` per seed.
    pub normalized: Vec<Vec<f64>>,
    /// `(i, j, sup_t |n_i(t) − n_j(t)|)` over normalized curves.
    pub sup_distances: Vec<(usize, usize, f64)>,
}

/// Beam-splitter runs of `|0⟩_A ⊗ seed_B` over `[0, T]`.
pub fn seed_comparison(
    seeds: &[(String, StateVector)],
    params: ExchangeParams,
    grid: &PhaseGrid,
    n_times: usize,
) -> Result<SeedComparison> {
    let times = uniform_times(params.period(), n_times)?;
    let mut trajectories = Vec::with_capacity(seeds.len());
    for (label, seed) in seeds {
        if seed.dims().len() != 1 {
            return Err(Error::DimensionMismatch(format!("seed {label} has dims {:?}", seed.dims())));
        }
        let dim = seed.dims()[0];
        let budget = single_mode_negativity(&seed.density(), grid)?;
        if budget < MIN_SEED_BUDGET {
            return Err(Error::NoBudget { budget });
        }
        let splitter = BeamSplitter::new(params.g(), dim)?;
        let rows: Vec<(Vec<f64>, Vec<f64>, f64)> = times
            .par_iter()
            .map(|&t| {
                let ev = evolve_seed_with(seed, &splitter.propagator(t))?;
                let na = single_mode_negativity(&ev.rho_a, grid)?;
                let nb = single_mode_negativity(&ev.rho_b, grid)?;
                let pa = 1.0 - ev.rho_a.populations()[0];
                let pb = 1.0 - ev.rho_b.populations()[0];
                Ok((vec![na, nb], vec![pa, pb], ev.leakage))
            })
            .collect::<Result<_>>()?;
        let leakage = rows.iter().map(|r| r.2).fold(0.0, f64::max);
        let (negs, probs): (Vec<_>, Vec<_>) = rows.into_iter().map(|(n, p, _)| (n, p)).unzip();
        let mut traj = Trajectory::assemble(times.clone(), vec!["A".into(), "B".into()], negs, probs, budget);
        traj.meta.insert("experiment".into(), json!("seed"));
        traj.meta.insert("seed_label".into(), json!(label));
        traj.meta.insert("dim".into(), json!(dim));
        traj.meta.insert("g".into(), json!(params.g()));
        traj.meta.insert("max_leakage".into(), json!(leakage));
        traj.meta.insert("truncation_warning".into(), json!(leakage > crate::dynamics::LEAKAGE_WARNING));
        trajectories.push(traj);
    }
    let normalized: Vec<Vec<f64>> =
        trajectories.iter().map(|t| t.total.iter().map(|n| n / t.budget).collect()).collect();
    let mut sup_distances = Vec::new();
    for i in 0..normalized.len() {
        for j in i + 1..normalized.len() {
            let d = normalized[i].iter().zip(&normalized[j]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            sup_distances.push((i, j, d));
        }
    }
    Ok(SeedComparison {
        labels: seeds.iter().map(|s| s.0.clone()).collect(),
        trajectories,
        normalized,
        sup_distances,
    })
}
