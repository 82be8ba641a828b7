//! Run configuration assembled from an optional key-value file and flags.
//!
//! The file holds one `key = value` per line using the long flag names
//! (`p`, `p-grid`, `delta`, `mechanism`, `mode`, `episodes`, `seed`,
//! `horizon`, `kmax`, `normalize`, `out`, `series`). Blank lines and `#`
//! comments are ignored. Flags given on the command line win.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use nsii_core::{MechanismKind, DEFAULT_TRUNCATION};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Analytic,
    Simulate,
    Dp,
    Crosscheck,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Analytic => "analytic",
            Mode::Simulate => "simulate",
            Mode::Dp => "dp",
            Mode::Crosscheck => "crosscheck",
        }
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Mode as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MechanismArg {
    Bhw,
    Nsii,
}

impl From<MechanismArg> for MechanismKind {
    fn from(m: MechanismArg) -> Self {
        match m {
            MechanismArg::Bhw => MechanismKind::Bhw,
            MechanismArg::Nsii => MechanismKind::Nsii,
        }
    }
}

/// Command-line flags. Anything left unset falls back to the config file and
/// then to the defaults.
#[derive(Debug, Clone, Default, Parser)]
#[command(
    name = "nsii",
    version,
    about = "Evaluate and simulate the BHW and NSII social-learning mechanisms"
)]
pub struct Cli {
    /// Single crossover probability.
    #[arg(long, conflicts_with = "p_grid")]
    pub p: Option<f64>,
    /// Crossover grid `start:stop:step` (stop inclusive).
    #[arg(long = "p-grid", value_name = "START:STOP:STEP")]
    pub p_grid: Option<String>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Restrict output to one mechanism (default: both).
    #[arg(long, value_enum)]
    pub mechanism: Option<MechanismArg>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Monte-Carlo episodes per point.
    #[arg(long)]
    pub episodes: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Simulation horizon, or DP horizon in dp mode.
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Chain truncation for the revenue solve.
    #[arg(long)]
    pub kmax: Option<usize>,
    /// Multiply welfare and revenue columns by (1 - delta).
    #[arg(long)]
    pub normalize: bool,
    /// CSV destination (stdout when absent or `-`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory for plot-ready `p value` series files.
    #[arg(long)]
    pub series: Option<PathBuf>,
    /// Key-value config file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Fully resolved run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub grid: Vec<f64>,
    pub delta: f64,
    pub mechanisms: Vec<MechanismKind>,
    pub mode: Mode,
    pub episodes: u64,
    pub seed: u64,
    pub horizon: usize,
    pub kmax: usize,
    pub normalize: bool,
    pub out: Option<PathBuf>,
    pub series: Option<PathBuf>,
}

pub const DEFAULT_GRID: &str = "0.005:0.495:0.005";
pub const DEFAULT_DELTA: f64 = 0.9;
pub const DEFAULT_EPISODES: u64 = 100_000;
pub const DEFAULT_DP_HORIZON: usize = 5;

const KEYS: [&str; 12] = [
    "p",
    "p-grid",
    "delta",
    "mechanism",
    "mode",
    "episodes",
    "seed",
    "horizon",
    "kmax",
    "normalize",
    "out",
    "series",
];

/// Parses the key-value config format.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("config line {}: expected `key = value`", lineno + 1)))?;
        let key = key.trim().to_string();
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Config(format!(
                "config line {}: unknown key `{key}`",
                lineno + 1
            )));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

fn parse_value<V: FromStr>(key: &str, value: &str) -> Result<V, CliError>
where
    V::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| CliError::Config(format!("invalid value `{value}` for `{key}`: {e}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, CliError> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(CliError::Config(format!("invalid boolean `{value}` for `{key}`"))),
    }
}

/// Expands `start:stop:step` with `stop` included when it lies on the grid.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Config(format!("p-grid `{spec}` must be start:stop:step")));
    }
    let start: f64 = parse_value("p-grid", parts[0])?;
    let stop: f64 = parse_value("p-grid", parts[1])?;
    let step: f64 = parse_value("p-grid", parts[2])?;
    if step.is_nan() || step <= 0.0 {
        return Err(CliError::Config(format!("p-grid step must be positive, got {step}")));
    }
    if stop < start {
        return Err(CliError::Config(format!("p-grid stop {stop} is below start {start}")));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

impl RunConfig {
    /// Merges the config file named by `cli.config` (if any) with the flags.
    pub fn resolve(cli: &Cli) -> Result<Self, CliError> {
        let file = match &cli.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
                parse_config_file(&text)?
            }
            None => BTreeMap::new(),
        };
        Self::from_sources(&file, cli)
    }

    pub fn from_sources(file: &BTreeMap<String, String>, cli: &Cli) -> Result<Self, CliError> {
        let get = |k: &str| file.get(k).map(String::as_str);

        let grid = match (cli.p, cli.p_grid.as_deref()) {
            (Some(p), _) => vec![p],
            (None, Some(g)) => parse_grid(g)?,
            (None, None) => match (get("p"), get("p-grid")) {
                (Some(_), Some(_)) => return Err(CliError::Config("config sets both `p` and `p-grid`".into())),
                (Some(p), None) => vec![parse_value("p", p)?],
                (None, Some(g)) => parse_grid(g)?,
                (None, None) => parse_grid(DEFAULT_GRID)?,
            },
        };
        if let Some(bad) = grid.iter().find(|&&p| !(p > 0.0 && p < 0.5)) {
            return Err(CliError::Config(format!(
                "crossover probability {bad} outside (0, 0.5)"
            )));
        }

        let delta = match cli.delta {
            Some(d) => d,
            None => get("delta")
                .map(|v| parse_value("delta", v))
                .transpose()?
                .unwrap_or(DEFAULT_DELTA),
        };
        if !(delta > 0.0 && delta < 1.0) {
            return Err(CliError::Config(format!("delta {delta} outside (0, 1)")));
        }

        let mechanism: Option<MechanismKind> = match cli.mechanism {
            Some(m) => Some(m.into()),
            None => get("mechanism").map(|v| parse_value("mechanism", v)).transpose()?,
        };
        let mechanisms = mechanism.map_or_else(|| MechanismKind::ALL.to_vec(), |m| vec![m]);

        let mode = match cli.mode {
            Some(m) => m,
            None => get("mode")
                .map(|v| parse_value("mode", v))
                .transpose()?
                .unwrap_or(Mode::Analytic),
        };

        let episodes = match cli.episodes {
            Some(e) => e,
            None => get("episodes")
                .map(|v| parse_value("episodes", v))
                .transpose()?
                .unwrap_or(DEFAULT_EPISODES),
        };
        if episodes == 0 {
            return Err(CliError::Config("episodes must be at least 1".into()));
        }

        let seed = match cli.seed {
            Some(s) => s,
            None => get("seed").map(|v| parse_value("seed", v)).transpose()?.unwrap_or(0),
        };

        let horizon = match cli.horizon {
            Some(h) => Some(h),
            None => get("horizon").map(|v| parse_value("horizon", v)).transpose()?,
        };
        let horizon = match (mode, horizon) {
            (Mode::Dp, Some(h)) if !(1..=nsii_core::mdp::MAX_DP_HORIZON).contains(&h) => {
                return Err(CliError::Config(format!(
                    "dp horizon must lie in 1..={}, got {h}",
                    nsii_core::mdp::MAX_DP_HORIZON
                )))
            }
            (_, Some(0)) => return Err(CliError::Config("horizon must be at least 1".into())),
            (_, Some(h)) => h,
            (Mode::Dp, None) => DEFAULT_DP_HORIZON,
            (_, None) => nsii_core::default_horizon(delta),
        };

        let kmax = match cli.kmax {
            Some(k) => k,
            None => get("kmax")
                .map(|v| parse_value("kmax", v))
                .transpose()?
                .unwrap_or(DEFAULT_TRUNCATION),
        };
        if kmax < 4 {
            return Err(CliError::Config(format!("kmax must be at least 4, got {kmax}")));
        }

        let normalize = cli.normalize
            || get("normalize")
                .map(|v| parse_bool("normalize", v))
                .transpose()?
                .unwrap_or(false);
        let path = |flag: &Option<PathBuf>, key: &str| flag.clone().or_else(|| get(key).map(PathBuf::from));
        let out = path(&cli.out, "out").filter(|p| p != Path::new("-"));
        let series = path(&cli.series, "series");

        Ok(Self {
            grid,
            delta,
            mechanisms,
            mode,
            episodes,
            seed,
            horizon,
            kmax,
            normalize,
            out,
            series,
        })
    }
}
