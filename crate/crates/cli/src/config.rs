//! Flag and config-file resolution.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::strategy::StrategySpec;

pub const DEFAULT_N: usize = 3;
pub const DEFAULT_PAYLOAD: usize = 8;
pub const DEFAULT_CHECKS: usize = 8;
pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 0x5EED;
pub const DEFAULT_REPLICAS: usize = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] qubitsec_core::Error),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Parses an angle in radians, accepting a `pi` multiplier suffix.
pub fn parse_angle(s: &str) -> Result<f64, CliError> {
    let s = s.trim();
    let bad = || CliError::Usage(format!("bad angle {s:?}"));
    let value = match s.strip_suffix("pi") {
        Some("") => PI,
        Some("-") => -PI,
        Some(m) => m.trim_end_matches('*').parse::<f64>().map_err(|_| bad())? * PI,
        None => s.parse::<f64>().map_err(|_| bad())?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

/// `start:stop:steps` with `steps` points from `start` up to but excluding
/// `stop`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaGrid {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl AlphaGrid {
    pub fn full_turn(steps: usize) -> Self {
        AlphaGrid {
            start: 0.0,
            stop: 2.0 * PI,
            steps,
        }
    }

    pub fn points(&self) -> Vec<f64> {
        let step = (self.stop - self.start) / self.steps as f64;
        (0..self.steps)
            .map(|i| self.start + i as f64 * step)
            .collect()
    }
}

impl Default for AlphaGrid {
    fn default() -> Self {
        AlphaGrid::full_turn(24)
    }
}

impl FromStr for AlphaGrid {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, steps] = parts.as_slice() else {
            return Err(CliError::Usage(format!(
                "alpha grid {s:?} is not start:stop:steps"
            )));
        };
        let steps: usize = steps
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("bad grid step count {steps:?}")))?;
        if steps == 0 {
            return Err(CliError::Usage("alpha grid needs at least one step".into()));
        }
        Ok(AlphaGrid {
            start: parse_angle(start)?,
            stop: parse_angle(stop)?,
            steps,
        })
    }
}

impl fmt::Display for AlphaGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.steps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Text,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LegName {
    Outbound,
    Return,
}

/// Flags shared by every subcommand. Unset flags fall back to the config
/// file, then to the built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML file with flat keys mirroring the long flag names.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Number of equally spaced angles in the scheme.
    #[arg(long)]
    pub n: Option<usize>,
    /// Payload qubits per frame.
    #[arg(long, value_name = "N")]
    pub payload: Option<usize>,
    /// Check qubits per frame.
    #[arg(long, value_name = "M")]
    pub checks: Option<usize>,
    /// Monte Carlo trials per estimate.
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Eavesdropper strategy, `tag[:params][@leg]`.
    #[arg(long, value_name = "SPEC")]
    pub strategy: Option<String>,
    /// Rotation angles swept, `start:stop:steps`.
    #[arg(long, value_name = "GRID")]
    pub alpha_grid: Option<String>,
    /// Identical copies the source emits per qubit.
    #[arg(long, value_name = "R")]
    pub replicas: Option<usize>,
    /// Allows `--disable-checks`.
    #[arg(long)]
    pub unsafe_test_mode: bool,
    /// Runs a leg without check qubits. Requires `--unsafe-test-mode`.
    #[arg(long, value_enum, value_name = "LEG")]
    pub disable_checks: Vec<LegName>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Worker threads. Defaults to the available parallelism.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub n: Option<usize>,
    pub payload: Option<usize>,
    pub checks: Option<usize>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub strategy: Option<String>,
    pub alpha_grid: Option<String>,
    pub replicas: Option<usize>,
    pub unsafe_test_mode: Option<bool>,
    pub disable_checks: Option<Vec<LegName>>,
    pub format: Option<OutputFormat>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub assert_secure: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Usage(format!("config file {}: {e}", path.display())))
    }
}

/// A fully resolved experiment. Everything that influences results is
/// serialized into reports; `out` and `workers` do not influence results.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub subcommand: String,
    pub n: usize,
    pub payload: usize,
    pub checks: usize,
    pub trials: u64,
    pub seed: u64,
    pub strategy: StrategySpec,
    pub alpha_grid: AlphaGrid,
    pub replicas: usize,
    pub unsafe_test_mode: bool,
    pub outbound_checks: bool,
    pub return_checks: bool,
    pub assert_secure: bool,
    pub format: OutputFormat,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    pub fn defaults(subcommand: &str) -> Self {
        ExperimentConfig {
            subcommand: subcommand.to_string(),
            n: DEFAULT_N,
            payload: DEFAULT_PAYLOAD,
            checks: DEFAULT_CHECKS,
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            strategy: StrategySpec::passive(),
            alpha_grid: AlphaGrid::default(),
            replicas: DEFAULT_REPLICAS,
            unsafe_test_mode: false,
            outbound_checks: true,
            return_checks: true,
            assert_secure: false,
            format: OutputFormat::Json,
            out: None,
            workers: None,
        }
    }

    /// Flags override the config file, which overrides the defaults.
    pub fn resolve(
        subcommand: &str,
        args: &CommonArgs,
        assert_secure: bool,
    ) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let d = Self::defaults(subcommand);
        let strategy = match args.strategy.as_ref().or(file.strategy.as_ref()) {
            Some(s) => s.parse()?,
            None => d.strategy,
        };
        let alpha_grid = match args.alpha_grid.as_ref().or(file.alpha_grid.as_ref()) {
            Some(s) => s.parse()?,
            None => d.alpha_grid,
        };
        let unsafe_test_mode = args.unsafe_test_mode || file.unsafe_test_mode.unwrap_or(false);
        let disabled = if args.disable_checks.is_empty() {
            file.disable_checks.unwrap_or_default()
        } else {
            args.disable_checks.clone()
        };
        if !disabled.is_empty() && !unsafe_test_mode {
            return Err(CliError::Usage(
                "--disable-checks requires --unsafe-test-mode".into(),
            ));
        }
        let config = ExperimentConfig {
            subcommand: subcommand.to_string(),
            n: args.n.or(file.n).unwrap_or(d.n),
            payload: args.payload.or(file.payload).unwrap_or(d.payload),
            checks: args.checks.or(file.checks).unwrap_or(d.checks),
            trials: args.trials.or(file.trials).unwrap_or(d.trials),
            seed: args.seed.or(file.seed).unwrap_or(d.seed),
            strategy,
            alpha_grid,
            replicas: args.replicas.or(file.replicas).unwrap_or(d.replicas),
            unsafe_test_mode,
            outbound_checks: !disabled.contains(&LegName::Outbound),
            return_checks: !disabled.contains(&LegName::Return),
            assert_secure: assert_secure || file.assert_secure.unwrap_or(false),
            format: args.format.or(file.format).unwrap_or(d.format),
            out: args.out.clone().or(file.out),
            workers: args.workers.or(file.workers),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let fail = |m: &str| Err(CliError::Usage(m.to_string()));
        if self.n < 2 {
            return fail("--n must be at least 2");
        }
        if self.payload < 1 {
            return fail("--payload must be at least 1");
        }
        if self.checks < 1 {
            return fail("--checks must be at least 1");
        }
        if self.trials < 1 {
            return fail("--trials must be at least 1");
        }
        if self.replicas < 1 {
            return fail("--replicas must be at least 1");
        }
        if self.workers == Some(0) {
            return fail("--workers must be at least 1");
        }
        if (!self.outbound_checks || !self.return_checks) && !self.unsafe_test_mode {
            return fail("disabling checks requires --unsafe-test-mode");
        }
        Ok(())
    }
}
