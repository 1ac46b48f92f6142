//! The `negbudget` command line: one subcommand per experiment family.
//!
//! Every data file is deterministic for a given configuration; wall-clock
//! timestamps appear only in `run_meta.json`. Exit codes: 0 success,
//! 2 usage, 3 numerical-contract violation, 4 I/O.

mod config;
mod validate;

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde_json::{json, Map, Value};

pub use config::{parse_config, parse_config_text, Experiment, RunConfig};
pub use validate::{run_checks, CheckOutcome};

use crate::budget::{
    chain_trajectory_with, damped_two_body_trajectory, seed_comparison, tracking_infidelity, two_body_trajectory,
    BlockSampling, SeedComparison, Trajectory,
};
use crate::dwigner::{discrete_sum_negativity, discrete_wigner, qutrit_stabilizer_states, qutrit_strange_state};
use crate::dynamics::{xy_two_qubit_state, BeamSplitter, ExchangeParams};
use crate::error::Error;
use crate::fock::{fock_state, odd_cat_state, squeezed_fock_state, DensityOperator, StateVector, C64};
use crate::format_float as fmt;
use crate::phase_space::{wigner_single_mode, PhaseGrid};

/// Slack allowed above the budget before a run is declared in violation.
pub const BOUND_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Help or version text; not an error.
    Display(String),
    Usage(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Display(_) => 0,
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Display(s) => write!(f, "{s}"),
            CliError::Usage(s) => write!(f, "usage error: {s}"),
            CliError::Numerical(s) => write!(f, "numerical contract violated: {s}"),
            CliError::Io(s) => write!(f, "i/o error: {s}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Argument(_) | Error::OutOfRange { .. } | Error::DimensionMismatch(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("{}: {e}", path.display()))
}

/// Parses `argv`, runs the experiment, and returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let result = parse_config(argv).and_then(|config| run(&config));
    match result {
        Ok(()) => 0,
        Err(CliError::Display(text)) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("negbudget: {e}");
            e.exit_code()
        }
    }
}

/// Runs one experiment and writes its files into `config.out`.
pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let started = chrono::Utc::now();
    fs::create_dir_all(&config.out).map_err(io_err(&config.out))?;
    let results = match config.experiment {
        Experiment::TwoBody => run_two_body(config)?,
        Experiment::Chain => run_chain(config)?,
        Experiment::CvNative => run_cv_native(config)?,
        Experiment::Seeds => run_seeds(config)?,
        Experiment::Damping => run_damping(config)?,
        Experiment::Dwigner => run_dwigner(config)?,
        Experiment::Validate => run_validate(config)?,
    };
    let meta = json!({
        "experiment": config.experiment.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "started_at": started.to_rfc3339(),
        "finished_at": chrono::Utc::now().to_rfc3339(),
        "config": config,
        "results": results,
    });
    write_json(&config.out.join("run_meta.json"), &meta)
}

fn params(config: &RunConfig) -> Result<ExchangeParams, CliError> {
    Ok(ExchangeParams::new(config.g)?)
}

fn grid(config: &RunConfig) -> Result<PhaseGrid, CliError> {
    Ok(PhaseGrid::new(config.grid_extent, config.grid_points)?)
}

fn write_json(path: &Path, value: &Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    fs::write(path, text + "\n").map_err(io_err(path))
}

/// Writes `header` then one line per row, fields joined by commas.
fn write_csv(path: &Path, header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), CliError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut out = BufWriter::new(file);
    writeln!(out, "{header}").map_err(io_err(path))?;
    for row in rows {
        writeln!(out, "{}", row.join(",")).map_err(io_err(path))?;
    }
    out.flush().map_err(io_err(path))
}

fn write_field(path: &Path, rho: &DensityOperator, grid: &PhaseGrid) -> Result<(), CliError> {
    let field = wigner_single_mode(rho, grid)?;
    let file = File::create(path).map_err(io_err(path))?;
    let mut out = BufWriter::new(file);
    field.write_csv(&mut out).map_err(io_err(path))?;
    out.flush().map_err(io_err(path))
}

fn check_bound(traj: &Trajectory, what: &str) -> Result<(), CliError> {
    let excess = traj.max_excess();
    if excess > BOUND_SLACK {
        return Err(CliError::Numerical(format!(
            "convexity bound: {what} summed negativity exceeds its budget by {excess:.3e}"
        )));
    }
    Ok(())
}

/// Fractions of the period at which Wigner snapshots are written.
const SNAPSHOTS: [(&str, f64); 3] = [("0", 0.0), ("0.25", 0.25), ("0.5", 0.5)];

fn run_two_body(config: &RunConfig) -> Result<Value, CliError> {
    let p = params(config)?;
    let grid = grid(config)?;
    let traj = two_body_trajectory(p, &grid, config.times)?;
    check_bound(&traj, "two-body")?;
    let period = p.period();
    let conc = traj.concurrence.clone().unwrap_or_default();
    let rows = (0..traj.len()).map(|i| {
        vec![
            fmt(traj.times[i]),
            fmt(traj.times[i] / period),
            fmt(traj.site_negativities[i][0]),
            fmt(traj.site_negativities[i][1]),
            fmt(traj.total[i]),
            fmt(traj.budget),
            fmt(traj.gap[i]),
            fmt(conc[i]),
        ]
    });
    write_csv(&config.out.join("fig1_trajectory.csv"), "t,t_over_T,N_A,N_B,N_tot,N_budget,gap,concurrence", rows)?;
    for (label, frac) in SNAPSHOTS {
        let probs = crate::dynamics::reduced_excitation_probabilities(&xy_two_qubit_state(p, frac * period)?);
        let (pb, pa) = (probs[0], probs[1]);
        for (mode, prob) in [("A", pa), ("B", pb)] {
            let rho = DensityOperator::excitation_mixture(prob.clamp(0.0, 1.0), 2)?;
            write_field(&config.out.join(format!("fig2_wigner_{mode}_t{label}.csv")), &rho, &grid)?;
        }
    }
    Ok(Value::Object(traj.meta))
}

fn run_chain(config: &RunConfig) -> Result<Value, CliError> {
    let p = params(config)?;
    let grid = grid(config)?;
    let sampling = BlockSampling {
        grid: PhaseGrid::new(config.block_grid_extent, config.block_grid_points)?,
        stride: 4,
    };
    let traj = chain_trajectory_with(config.sites, p, &grid, Some(&sampling), config.times)?;
    check_bound(&traj, "chain")?;
    let t_star = p.transfer_time();
    let max_pk = traj.max_site_probability();
    let max_pb2 = traj.max_block_probability();
    let n = traj.len();
    write_csv(
        &config.out.join("fig3_summary.csv"),
        "t,t_over_tstar,N_tot_chain,N_budget,max_pk,max_pb2",
        (0..n).map(|i| {
            vec![
                fmt(traj.times[i]),
                fmt(traj.times[i] / t_star),
                fmt(traj.total[i]),
                fmt(traj.budget),
                fmt(max_pk[i]),
                fmt(max_pb2[i]),
            ]
        }),
    )?;
    let site_header = std::iter::once("t".to_string())
        .chain((0..config.sites).map(|k| format!("site_{k}")))
        .collect::<Vec<_>>()
        .join(",");
    let with_time = |i: usize, row: &[f64]| {
        std::iter::once(fmt(traj.times[i])).chain(row.iter().map(|v| fmt(*v))).collect::<Vec<_>>()
    };
    write_csv(
        &config.out.join("fig3_p_heatmap.csv"),
        &site_header,
        (0..n).map(|i| with_time(i, &traj.probabilities[i])),
    )?;
    write_csv(
        &config.out.join("fig3_nk_heatmap.csv"),
        &site_header,
        (0..n).map(|i| with_time(i, &traj.site_negativities[i])),
    )?;
    let block_header = std::iter::once("t".to_string())
        .chain((0..config.sites - 1).map(|b| format!("block_{b}")))
        .collect::<Vec<_>>()
        .join(",");
    let blocks = traj.block_negativities.clone().unwrap_or_default();
    write_csv(
        &config.out.join("fig3_block_heatmap.csv"),
        &block_header,
        blocks.iter().enumerate().map(|(i, row)| match row {
            Some(values) => with_time(i, values),
            None => std::iter::once(fmt(traj.times[i])).chain((0..config.sites - 1).map(|_| String::new())).collect(),
        }),
    )?;
    let mut meta = traj.meta;
    let peak = blocks.iter().flatten().flatten().cloned().fold(0.0, f64::max);
    meta.insert("max_block_negativity".into(), json!(peak));
    Ok(Value::Object(meta))
}

fn seeds(config: &RunConfig) -> Result<Vec<(String, StateVector)>, CliError> {
    Ok(vec![
        ("fock".into(), fock_state(1, config.dim)?),
        ("cat".into(), odd_cat_state(C64::new(config.alpha, 0.0), config.dim)?),
        ("squeezed".into(), squeezed_fock_state(config.squeeze_r, 1, config.dim)?),
    ])
}

fn run_cv_native(config: &RunConfig) -> Result<Value, CliError> {
    let p = params(config)?;
    let grid = grid(config)?;
    let seed = fock_state(1, config.dim)?;
    let cmp = seed_comparison(&[("fock".into(), seed.clone())], p, &grid, config.times)?;
    let traj = &cmp.trajectories[0];
    check_bound(traj, "cv-native")?;
    let period = p.period();
    write_csv(
        &config.out.join("fig4_trajectory.csv"),
        "t,t_over_T,N_A,N_B,N_tot,N_budget,gap",
        (0..traj.len()).map(|i| {
            vec![
                fmt(traj.times[i]),
                fmt(traj.times[i] / period),
                fmt(traj.site_negativities[i][0]),
                fmt(traj.site_negativities[i][1]),
                fmt(traj.total[i]),
                fmt(traj.budget),
                fmt(traj.gap[i]),
            ]
        }),
    )?;
    let splitter = BeamSplitter::new(p.g(), config.dim)?;
    for (label, frac) in SNAPSHOTS {
        let ev = crate::dynamics::evolve_seed_with(&seed, &splitter.propagator(frac * period))?;
        write_field(&config.out.join(format!("fig4_wigner_B_t{label}.csv")), &ev.rho_b, &grid)?;
    }
    warn_leakage(&cmp);
    Ok(Value::Object(traj.meta.clone()))
}

fn warn_leakage(cmp: &SeedComparison) {
    for (label, traj) in cmp.labels.iter().zip(&cmp.trajectories) {
        if traj.meta.get("truncation_warning") == Some(&Value::Bool(true)) {
            eprintln!(
                "negbudget: warning: seed {label} leaks {} into the top two Fock levels",
                traj.meta["max_leakage"]
            );
        }
    }
}

fn run_seeds(config: &RunConfig) -> Result<Value, CliError> {
    let p = params(config)?;
    let grid = grid(config)?;
    let cmp = seed_comparison(&seeds(config)?, p, &grid, config.times)?;
    let period = p.period();
    let mut rows = Vec::new();
    for (k, traj) in cmp.trajectories.iter().enumerate() {
        check_bound(traj, &format!("seed {}", cmp.labels[k]))?;
        for i in 0..traj.len() {
            rows.push(vec![
                fmt(traj.times[i]),
                fmt(traj.times[i] / period),
                cmp.labels[k].clone(),
                fmt(traj.total[i]),
                fmt(traj.budget),
                fmt(cmp.normalized[k][i]),
            ]);
        }
    }
    write_csv(&config.out.join("fig5_seeds.csv"), "t,t_over_T,seed_label,N_tot_abs,N_seed,N_tot_normalized", rows)?;
    warn_leakage(&cmp);
    let mut per_seed = Map::new();
    for (label, traj) in cmp.labels.iter().zip(&cmp.trajectories) {
        per_seed.insert(label.clone(), Value::Object(traj.meta.clone()));
    }
    let distances: Vec<Value> = cmp
        .sup_distances
        .iter()
        .map(|(i, j, d)| json!({ "a": cmp.labels[*i], "b": cmp.labels[*j], "sup_distance": d }))
        .collect();
    let budgets: Map<String, Value> =
        cmp.labels.iter().zip(&cmp.trajectories).map(|(l, t)| (l.clone(), json!(t.budget))).collect();
    Ok(json!({ "budgets": budgets, "sup_distances": distances, "seeds": per_seed }))
}

/// Damping rates swept when `--gamma` is absent, in units of `g`.
pub const DEFAULT_GAMMAS: [f64; 4] = [0.0, 0.02, 0.05, 0.1];

fn run_damping(config: &RunConfig) -> Result<Value, CliError> {
    let p = params(config)?;
    let grid = grid(config)?;
    let ideal = two_body_trajectory(p, &grid, config.times)?;
    let gammas: Vec<f64> = match config.gamma {
        Some(g) => vec![g],
        None => DEFAULT_GAMMAS.iter().map(|f| f * p.g()).collect(),
    };
    let mut rows = Vec::new();
    let mut means = Vec::new();
    for &gamma in &gammas {
        let damped = damped_two_body_trajectory(p, gamma, &grid, config.times)?;
        let (eps, mean) = tracking_infidelity(&ideal, &damped)?;
        for i in 0..ideal.len() {
            rows.push(vec![fmt(ideal.times[i]), fmt(gamma), fmt(ideal.total[i]), fmt(damped.total[i]), fmt(eps[i])]);
        }
        means.push(json!({ "gamma": gamma, "mean_epsilon": mean, "max_epsilon": eps.iter().cloned().fold(0.0, f64::max) }));
    }
    write_csv(&config.out.join("damping.csv"), "t,gamma,N_tot_ideal,N_tot_damped,epsilon", rows)?;
    Ok(json!({ "g": p.g(), "runs": means }))
}

fn qutrit_states(label: &str) -> Result<Vec<(String, DensityOperator)>, CliError> {
    let mut all: Vec<(String, DensityOperator)> =
        qutrit_stabilizer_states().into_iter().map(|(l, s)| (l, s.density())).collect();
    all.push(("strange".into(), qutrit_strange_state().density()));
    all.push(("mixed".into(), DensityOperator::maximally_mixed(vec![3])?));
    if label == "all" {
        return Ok(all);
    }
    all.into_iter()
        .find(|(l, _)| l == label)
        .map(|s| vec![s])
        .ok_or_else(|| CliError::Usage(format!("unknown qutrit state {label:?}")))
}

fn run_dwigner(config: &RunConfig) -> Result<Value, CliError> {
    let mut summaries = Vec::new();
    for (label, rho) in qutrit_states(&config.state)? {
        let w = discrete_wigner(&rho, 3)?;
        let path = config.out.join(format!("dwigner_{label}.csv"));
        let file = File::create(&path).map_err(io_err(&path))?;
        let mut out = BufWriter::new(file);
        w.write_csv(&mut out).and_then(|_| out.flush()).map_err(io_err(&path))?;
        let summary = json!({ "d": 3, "state_label": label, "sum_negativity": discrete_sum_negativity(&w) });
        write_json(&config.out.join(format!("dwigner_{label}.json")), &summary)?;
        summaries.push(summary);
    }
    Ok(Value::Array(summaries))
}

fn run_validate(config: &RunConfig) -> Result<Value, CliError> {
    let outcomes = run_checks(config);
    let mut failed = Vec::new();
    for o in &outcomes {
        println!("{} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
        if !o.passed {
            failed.push(o.name.clone());
        }
    }
    let report: Vec<Value> =
        outcomes.iter().map(|o| json!({ "check": o.name, "passed": o.passed, "detail": o.detail })).collect();
    write_json(&config.out.join("validate_report.json"), &Value::Array(report.clone()))?;
    if failed.is_empty() {
        Ok(Value::Array(report))
    } else {
        Err(CliError::Numerical(format!("failed checks: {}", failed.join(", "))))
    }
}
