//! Invariant checks run by `negbudget validate`.

use nalgebra::DMatrix;
use rand::{rngs::StdRng, Rng, SeedableRng};

use crate::budget::{
    block2_reduced_state, chain_trajectory_with, damped_two_body_trajectory, seed_comparison, tracking_infidelity,
    two_body_trajectory, SeedComparison,
};
use crate::dwigner::{discrete_sum_negativity, discrete_wigner, qutrit_stabilizer_states, reconstruct};
use crate::dynamics::{
    concurrence_closed_form, concurrence_from_purity, pst_couplings, reduced_excitation_probabilities,
    xy_two_qubit_state, BeamSplitter, ExchangeParams, SectorAmplitudes, SectorPropagator,
};
use crate::error::Result;
use crate::fock::{fock_state, tensor_product, DensityOperator, ModeOperator, StateVector, C64};
use crate::phase_space::{
    mixture_negativity_closed_form, single_mode_negativity, single_photon_negativity, two_mode_negativity, PhaseGrid,
};

use super::RunConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

type Check = Result<(bool, String)>;

fn outcome(name: &str, check: Check) -> CheckOutcome {
    match check {
        Ok((passed, detail)) => CheckOutcome { name: name.into(), passed, detail },
        Err(e) => CheckOutcome { name: name.into(), passed: false, detail: format!("error: {e}") },
    }
}

/// Runs every check with the grid, time count, rate and truncation of
/// `config`. Seed checks reuse one comparison at `config.dim` and one at
/// `config.dim + 10`.
pub fn run_checks(config: &RunConfig) -> Vec<CheckOutcome> {
    let grid = match PhaseGrid::new(config.grid_extent, config.grid_points) {
        Ok(g) => g,
        Err(e) => return vec![outcome("grid", Err(e))],
    };
    let params = match ExchangeParams::new(config.g) {
        Ok(p) => p,
        Err(e) => return vec![outcome("parameters", Err(e))],
    };
    let seeds = seed_runs(config, params, &grid, config.dim);
    let mut out = vec![
        outcome("budget-value", budget_value(&grid)),
        outcome("mixture-oracle", mixture_oracle(&grid)),
        outcome("concurrence-law", concurrence_law(params)),
        outcome("convexity-bound", convexity_bound(config, params, &grid, &seeds)),
        outcome("endpoint-saturation", endpoint_saturation(params, &grid)),
        outcome("pst-transfer", pst_transfer(config, params)),
        outcome("pst-mirror-symmetry", pst_mirror(params)),
        outcome("cross-implementation", cross_implementation(params, config.dim)),
        outcome("unitarity-and-number", unitarity_and_number(params, config.dim)),
    ];
    let larger = seed_runs(config, params, &grid, config.dim + 10);
    out.push(outcome("truncation-convergence", truncation_convergence(&seeds, &larger)));
    out.push(outcome("seed-ordering-shape", seed_shape(&seeds)));
    out.push(outcome("discrete-triviality", discrete_triviality()));
    out.push(outcome("tracking-infidelity", infidelity_monotone(params, &grid, config.times)));
    out.push(outcome("convexity-property", convexity_property(&grid)));
    out
}

fn seed_runs(config: &RunConfig, params: ExchangeParams, grid: &PhaseGrid, dim: usize) -> Result<SeedComparison> {
    let seeds = vec![
        ("fock".to_string(), fock_state(1, dim)?),
        ("cat".to_string(), crate::fock::odd_cat_state(C64::new(config.alpha, 0.0), dim)?),
        ("squeezed".to_string(), crate::fock::squeezed_fock_state(config.squeeze_r, 1, dim)?),
    ];
    seed_comparison(&seeds, params, grid, config.times)
}

fn budget_value(grid: &PhaseGrid) -> Check {
    let n = single_mode_negativity(&fock_state(1, 2)?.density(), grid)?;
    let err = (n - single_photon_negativity()).abs();
    Ok((err < 1e-4, format!("N(|1⟩) = {n:.9}, error {err:.2e}")))
}

fn mixture_oracle(grid: &PhaseGrid) -> Check {
    let mut worst = 0.0f64;
    for p in [0.0, 0.25, 0.5, 0.6, 0.75, 0.9, 1.0] {
        let quad = single_mode_negativity(&DensityOperator::excitation_mixture(p, 2)?, grid)?;
        worst = worst.max((quad - mixture_negativity_closed_form(p)?).abs());
    }
    Ok((worst < 1e-4, format!("max deviation {worst:.2e}")))
}

fn two_qubit_state(amps: &SectorAmplitudes) -> Result<StateVector> {
    // |i_A i_B⟩ at index 2 i_A + i_B; sector site 0 is B
    let c = amps.amplitudes();
    StateVector::new(vec![C64::new(0.0, 0.0), c[0], c[1], C64::new(0.0, 0.0)], vec![2, 2])
}

fn concurrence_law(params: ExchangeParams) -> Check {
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let t = params.period() * i as f64 / 999.0;
        let rho_a = two_qubit_state(&xy_two_qubit_state(params, t)?)?.reduced(&[0])?;
        let c = concurrence_from_purity(&rho_a)?;
        worst = worst.max((c - concurrence_closed_form(params, t)).abs());
    }
    Ok((worst < 1e-9, format!("max deviation {worst:.2e} over 1000 times")))
}

fn convexity_bound(config: &RunConfig, params: ExchangeParams, grid: &PhaseGrid, seeds: &Result<SeedComparison>) -> Check {
    let mut worst = two_body_trajectory(params, grid, config.times)?.max_excess();
    for n in [3, 4, 5] {
        worst = worst.max(chain_trajectory_with(n, params, grid, None, config.times)?.max_excess());
    }
    let seeds = seeds.as_ref().map_err(Clone::clone)?;
    for t in &seeds.trajectories {
        worst = worst.max(t.max_excess());
    }
    Ok((worst <= 1e-6, format!("max N_tot − N_budget = {worst:.3e}")))
}

fn endpoint_saturation(params: ExchangeParams, grid: &PhaseGrid) -> Check {
    let t = two_body_trajectory(params, grid, 5)?;
    let (n0, quarter, half) = (t.total[0], t.total[1], t.total[2]);
    let n1 = t.budget;
    let ok = (n0 - n1).abs() < 2e-4 && (half - n1).abs() < 2e-4 && quarter.abs() < 1e-6;
    Ok((ok, format!("N_tot(0) = {n0:.9}, N_tot(T/4) = {quarter:.3e}, N_tot(T/2) = {half:.9}, N₁ = {n1:.9}")))
}

fn pst_transfer(config: &RunConfig, params: ExchangeParams) -> Check {
    let sites = 4;
    let profile = pst_couplings(sites, params.g())?;
    let prop = SectorPropagator::new(&profile);
    let start = SectorAmplitudes::localized(sites, 0)?;
    let t_star = params.transfer_time();
    let end = prop.propagate(&start, t_star)?;
    let arrival = end.amplitudes()[sites - 1].norm();
    let mid = prop.propagate(&start, t_star / 2.0)?;
    let probs = reduced_excitation_probabilities(&mid);
    let max_p = probs.iter().cloned().fold(0.0, f64::max);
    let dark = probs.iter().map(|p| mixture_negativity_closed_form(p.clamp(0.0, 1.0))).collect::<Result<Vec<_>>>()?;
    let block_grid = PhaseGrid::new(config.block_grid_extent, config.block_grid_points)?;
    let mut bright = 0.0f64;
    for b in 0..sites - 1 {
        bright = bright.max(two_mode_negativity(&block2_reduced_state(&mid, b)?, &block_grid, &block_grid)?);
    }
    let ok = arrival >= 1.0 - 1e-9 && max_p < 0.5 && dark.iter().all(|n| *n == 0.0) && bright > 0.0;
    Ok((ok, format!("|c₃(t*)| = {arrival:.12}, mid max p = {max_p:.4}, mid max block N = {bright:.4e}")))
}

fn pst_mirror(params: ExchangeParams) -> Check {
    let mut worst = 0.0f64;
    for sites in [3, 4, 5, 6] {
        let prop = SectorPropagator::new(&pst_couplings(sites, params.g())?);
        let start = SectorAmplitudes::localized(sites, 0)?;
        let p0 = reduced_excitation_probabilities(&start);
        let p1 = reduced_excitation_probabilities(&prop.propagate(&start, params.transfer_time())?);
        for k in 0..sites {
            worst = worst.max((p1[k] - p0[sites - 1 - k]).abs());
        }
    }
    Ok((worst < 1e-9, format!("max |p_k(t*) − p_(N−1−k)(0)| = {worst:.2e}")))
}

fn cross_implementation(params: ExchangeParams, dim: usize) -> Check {
    let chain = SectorPropagator::new(&pst_couplings(2, params.g())?);
    let splitter = BeamSplitter::new(params.g(), dim)?;
    let start = SectorAmplitudes::localized(2, 0)?;
    let psi0 = tensor_product(&fock_state(0, dim)?, &fock_state(1, dim)?);
    let mut worst = 0.0f64;
    for i in 0..=200 {
        let t = 2.0 * params.period() * i as f64 / 200.0;
        let exact = xy_two_qubit_state(params, t)?;
        let sector = chain.propagate(&start, t)?;
        let psi = splitter.propagator(t).apply(&psi0)?;
        let bs = [psi.amplitudes()[1], psi.amplitudes()[dim]];
        for k in 0..2 {
            let e = exact.amplitudes()[k];
            worst = worst.max((sector.amplitudes()[k] - e).norm()).max((bs[k] - e).norm());
        }
    }
    Ok((worst < 1e-8, format!("max amplitude deviation {worst:.2e} over [0, 2T]")))
}

fn unitarity_and_number(params: ExchangeParams, dim: usize) -> Check {
    let splitter = BeamSplitter::new(params.g(), dim)?;
    let number = ModeOperator::number(dim).kron(&ModeOperator::identity(dim)).matrix()
        + ModeOperator::identity(dim).kron(&ModeOperator::number(dim)).matrix();
    let seed = crate::fock::odd_cat_state(C64::new(1.0, 0.3), dim)?;
    let psi0 = tensor_product(&fock_state(0, dim)?, &seed);
    let n0 = psi0.density().expectation(&number).re;
    let (mut defect, mut drift) = (0.0f64, 0.0f64);
    for i in 0..=8 {
        let t = params.period() * i as f64 / 8.0;
        let prop = splitter.propagator(t);
        defect = defect.max(prop.to_operator().unitarity_defect());
        let psi = prop.apply(&psi0)?;
        drift = drift.max((psi.density().expectation(&number).re - n0).abs());
    }
    let sector = SectorPropagator::new(&pst_couplings(4, params.g())?);
    for i in 0..=8 {
        let u = sector.unitary(params.transfer_time() * i as f64 / 8.0);
        let d = (u.adjoint() * &u - DMatrix::<C64>::identity(4, 4)).camax();
        defect = defect.max(d);
    }
    Ok((defect < 1e-9 && drift < 1e-9, format!("max ‖U†U − I‖ = {defect:.2e}, ⟨N⟩ drift {drift:.2e}")))
}

fn truncation_convergence(base: &Result<SeedComparison>, larger: &Result<SeedComparison>) -> Check {
    let base = base.as_ref().map_err(Clone::clone)?;
    let larger = larger.as_ref().map_err(Clone::clone)?;
    let mut worst = 0.0f64;
    for (a, b) in base.trajectories.iter().zip(&larger.trajectories) {
        worst = worst.max((a.budget - b.budget).abs());
        for (ra, rb) in a.site_negativities.iter().zip(&b.site_negativities) {
            for (x, y) in ra.iter().zip(rb) {
                worst = worst.max((x - y).abs());
            }
        }
    }
    Ok((worst < 1e-3, format!("max change {worst:.2e} with 10 more Fock levels")))
}

fn seed_shape(seeds: &Result<SeedComparison>) -> Check {
    let seeds = seeds.as_ref().map_err(Clone::clone)?;
    let budget = |label: &str| {
        seeds.labels.iter().position(|l| l == label).map(|i| seeds.trajectories[i].budget).unwrap_or(f64::NAN)
    };
    let (fock, cat, squeezed) = (budget("fock"), budget("cat"), budget("squeezed"));
    let mut ok = cat > squeezed && squeezed > fock;
    let mut detail = format!("budgets cat {cat:.9} squeezed {squeezed:.9} fock {fock:.9}");
    for (label, (curve, traj)) in seeds.labels.iter().zip(seeds.normalized.iter().zip(&seeds.trajectories)) {
        let period = traj.times.last().copied().unwrap_or(1.0);
        let (imin, vmin) = curve.iter().enumerate().fold((0, f64::INFINITY), |a, (i, v)| if *v < a.1 { (i, *v) } else { a });
        let at_min = traj.times[imin] / period;
        let half = curve[(curve.len() - 1) / 2];
        let good = (curve[0] - 1.0).abs() <= 0.02 && (0.2..=0.3).contains(&at_min) && half >= 0.95;
        ok &= good;
        detail.push_str(&format!("; {label}: start {:.4}, min {vmin:.4} at t/T {at_min:.4}, t=T/2 {half:.4}", curve[0]));
    }
    Ok((ok, detail))
}

fn discrete_triviality() -> Check {
    let mut worst = 0.0f64;
    for (_, s) in qutrit_stabilizer_states() {
        worst = worst.max(discrete_sum_negativity(&discrete_wigner(&s.density(), 3)?).abs());
    }
    let mut rng = StdRng::seed_from_u64(2024);
    let mut recon = 0.0f64;
    for _ in 0..100 {
        let rho = random_density(&mut rng, 3)?;
        let back = reconstruct(&discrete_wigner(&rho, 3)?)?;
        recon = recon.max((back - rho.matrix()).camax());
    }
    Ok((worst < 1e-12 && recon < 1e-12, format!("max stabilizer sum negativity {worst:.2e}, reconstruction {recon:.2e}")))
}

fn infidelity_monotone(params: ExchangeParams, grid: &PhaseGrid, times: usize) -> Check {
    let ideal = two_body_trajectory(params, grid, times)?;
    let mut means = Vec::new();
    for f in [0.0, 0.02, 0.05, 0.1] {
        let damped = damped_two_body_trajectory(params, f * params.g(), grid, times)?;
        means.push(tracking_infidelity(&ideal, &damped)?.1);
    }
    let ok = means[0] <= 1e-12 && means.windows(2).all(|w| w[1] > w[0]);
    let shown: Vec<String> = means.iter().map(|m| format!("{m:.3e}")).collect();
    Ok((ok, format!("mean ε at γ/g = 0, 0.02, 0.05, 0.1: {}", shown.join(", "))))
}

/// Random density operator of rank up to `d`.
pub(crate) fn random_density(rng: &mut StdRng, d: usize) -> Result<DensityOperator> {
    let g = DMatrix::<C64>::from_fn(d, d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let m = &g * g.adjoint();
    let tr = m.trace();
    DensityOperator::new(m / tr, vec![d])
}

fn random_pure(rng: &mut StdRng, d: usize) -> Result<DensityOperator> {
    let amps = (0..d).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    Ok(StateVector::new(amps, vec![d])?.density())
}

fn convexity_property(grid: &PhaseGrid) -> Check {
    let mut rng = StdRng::seed_from_u64(17);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..200 {
        let d = rng.gen_range(2..=4);
        let a = random_pure(&mut rng, d)?;
        let b = if rng.gen_bool(0.5) { random_pure(&mut rng, d)? } else { random_density(&mut rng, d)? };
        let lam = rng.gen_range(0.0..=1.0);
        let mix = a.mix(lam, &b)?;
        let n = |r: &DensityOperator| single_mode_negativity(r, grid);
        worst = worst.max(n(&mix)? - lam * n(&a)? - (1.0 - lam) * n(&b)?);
    }
    Ok((worst <= 1e-6, format!("max N(mix) − convex combination = {worst:.3e} over 200 mixtures")))
}
