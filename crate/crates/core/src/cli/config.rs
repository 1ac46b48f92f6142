//! Run configuration: command-line flags over a flat `key = value` file
//! over built-in defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use super::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Subcommand)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    /// Two-qubit exchange over one period (fig1, fig2 files).
    TwoBody,
    /// Perfect-state-transfer chain (fig3 files).
    Chain,
    /// Beam splitter with a single-photon seed in truncated Fock space (fig4 files).
    CvNative,
    /// Fock, odd-cat and squeezed-Fock seeds under the beam splitter (fig5 file).
    Seeds,
    /// Amplitude-damped two-qubit exchange and tracking infidelity.
    Damping,
    /// Qutrit discrete Wigner distributions.
    Dwigner,
    /// Runs the invariant suite; exits 0 iff every check passes.
    Validate,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::TwoBody => "two-body",
            Experiment::Chain => "chain",
            Experiment::CvNative => "cv-native",
            Experiment::Seeds => "seeds",
            Experiment::Damping => "damping",
            Experiment::Dwigner => "dwigner",
            Experiment::Validate => "validate",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "negbudget", version, about = "Phase-space negativity budgets under excitation-preserving dynamics")]
struct Cli {
    #[command(subcommand)]
    experiment: Experiment,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug, Default, Args)]
struct Flags {
    /// Exchange rate g.
    #[arg(long, global = true)]
    g: Option<f64>,
    /// Number of chain sites.
    #[arg(long, global = true)]
    sites: Option<usize>,
    /// Per-mode Fock truncation.
    #[arg(long, global = true)]
    dim: Option<usize>,
    /// Half-width L of the single-mode phase-space grid.
    #[arg(long = "grid-extent", visible_alias = "grid-l", global = true)]
    grid_extent: Option<f64>,
    /// Points per axis of the single-mode grid.
    #[arg(long = "grid-points", visible_alias = "grid-g", global = true)]
    grid_points: Option<usize>,
    /// Half-width of each axis of the two-mode block grid.
    #[arg(long = "block-grid-extent", global = true)]
    block_grid_extent: Option<f64>,
    /// Points per axis of the two-mode block grid.
    #[arg(long = "block-grid-points", global = true)]
    block_grid_points: Option<usize>,
    /// Number of uniform time samples.
    #[arg(long, global = true)]
    times: Option<usize>,
    /// Damping rate; without it the damping run sweeps 0, 0.02g, 0.05g, 0.1g.
    #[arg(long, global = true)]
    gamma: Option<f64>,
    /// Odd-cat amplitude.
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Squeezing parameter of the squeezed-Fock seed.
    #[arg(long = "squeeze-r", global = true)]
    squeeze_r: Option<f64>,
    /// Qutrit state for dwigner: strange, mixed, z0..z2, a<i>b<j>, or all.
    #[arg(long, global = true)]
    state: Option<String>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Flat key = value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub g: f64,
    pub sites: usize,
    pub dim: usize,
    pub grid_extent: f64,
    pub grid_points: usize,
    pub block_grid_extent: f64,
    pub block_grid_points: usize,
    pub times: usize,
    pub gamma: Option<f64>,
    pub alpha: f64,
    pub squeeze_r: f64,
    pub state: String,
    pub out: PathBuf,
}

impl RunConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        RunConfig {
            experiment,
            g: 1.0,
            sites: 4,
            dim: crate::fock::DEFAULT_DIM,
            grid_extent: 5.0,
            grid_points: 201,
            block_grid_extent: 4.5,
            block_grid_points: 61,
            times: 401,
            gamma: None,
            alpha: 1.4,
            squeeze_r: 0.35,
            state: "strange".into(),
            out: PathBuf::from("out"),
        }
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
            value.parse().map_err(|_| CliError::Usage(format!("malformed value for {key}: {value:?}")))
        }
        match key {
            "g" => self.g = num(key, value)?,
            "sites" => self.sites = num(key, value)?,
            "dim" => self.dim = num(key, value)?,
            "grid_extent" | "grid_l" => self.grid_extent = num(key, value)?,
            "grid_points" | "grid_g" => self.grid_points = num(key, value)?,
            "block_grid_extent" => self.block_grid_extent = num(key, value)?,
            "block_grid_points" => self.block_grid_points = num(key, value)?,
            "times" => self.times = num(key, value)?,
            "gamma" => self.gamma = Some(num(key, value)?),
            "alpha" => self.alpha = num(key, value)?,
            "squeeze_r" => self.squeeze_r = num(key, value)?,
            "state" => self.state = value.to_string(),
            "out" => self.out = PathBuf::from(value),
            _ => return Err(CliError::Usage(format!("unknown configuration key {key:?}"))),
        }
        Ok(())
    }

    fn apply_flags(&mut self, f: Flags) {
        macro_rules! take {
            ($($field:ident),*) => { $( if let Some(v) = f.$field { self.$field = v; } )* };
        }
        take!(g, sites, dim, grid_extent, grid_points, block_grid_extent, block_grid_points, times, alpha, squeeze_r, state, out);
        if f.gamma.is_some() {
            self.gamma = f.gamma;
        }
    }

    /// Rejects values no experiment can run with.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |name: &str, v: String| Err(CliError::Usage(format!("invalid {name}: {v}")));
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if !positive(self.g) {
            return bad("--g (must be > 0)", self.g.to_string());
        }
        if self.sites < 2 {
            return bad("--sites (must be ≥ 2)", self.sites.to_string());
        }
        if self.dim < 2 {
            return bad("--dim (must be ≥ 2)", self.dim.to_string());
        }
        if !positive(self.grid_extent) {
            return bad("--grid-extent (must be > 0)", self.grid_extent.to_string());
        }
        if self.grid_points < 2 {
            return bad("--grid-points (must be ≥ 2)", self.grid_points.to_string());
        }
        if !positive(self.block_grid_extent) {
            return bad("--block-grid-extent (must be > 0)", self.block_grid_extent.to_string());
        }
        if self.block_grid_points < 2 {
            return bad("--block-grid-points (must be ≥ 2)", self.block_grid_points.to_string());
        }
        if self.times < 2 {
            return bad("--times (must be ≥ 2)", self.times.to_string());
        }
        if let Some(gamma) = self.gamma {
            if !(gamma >= 0.0 && gamma.is_finite()) {
                return bad("--gamma (must be ≥ 0)", gamma.to_string());
            }
        }
        if !positive(self.alpha) {
            return bad("--alpha (must be > 0)", self.alpha.to_string());
        }
        if !(self.squeeze_r >= 0.0 && self.squeeze_r.is_finite()) {
            return bad("--squeeze-r (must be ≥ 0)", self.squeeze_r.to_string());
        }
        Ok(())
    }
}

/// Parses `key = value` lines. `#` and `;` start comments; keys may use
/// `-` or `_`.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split(['#', ';']).next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!("config line {}: expected key = value, got {raw:?}", n + 1)));
        };
        let key = key.trim().replace('-', "_");
        if out.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(CliError::Usage(format!("config line {}: duplicate key {key:?}", n + 1)));
        }
    }
    Ok(out)
}

fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text)
}

/// Builds a validated configuration from `argv` (including the program
/// name). Help and version requests surface as [`CliError::Display`].
pub fn parse_config<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => CliError::Display(e.to_string()),
        _ => CliError::Usage(e.to_string()),
    })?;
    let mut config = RunConfig::defaults(cli.experiment);
    if let Some(path) = &cli.flags.config {
        for (key, value) in read_config_file(path)? {
            config.set(&key, &value)?;
        }
    }
    config.apply_flags(cli.flags);
    config.validate()?;
    Ok(config)
}
