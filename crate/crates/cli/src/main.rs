use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use qubitsec_cli::commands::{cmd_attack, cmd_prop_check, cmd_session, DataSource, Outcome};
use qubitsec_cli::config::CommonArgs;
use qubitsec_cli::{CliError, ExperimentConfig, EXIT_BAND_FAILURE, EXIT_PASS, EXIT_USAGE};

/// Simulator for rotation-angle qubit authentication and round-trip data
/// transfer under configurable eavesdroppers.
#[derive(Debug, Parser)]
#[command(name = "qubitsec", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Statistical checks of the scheme's correctness, secrecy and detection.
    PropCheck {
        #[command(flatten)]
        common: CommonArgs,
        /// Fail when the scheme lets Eve identify Alice's angles.
        #[arg(long)]
        assert_secure: bool,
    },
    /// Run one eavesdropping strategy against its closed form.
    Attack {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// One full round trip on the given data.
    Session {
        #[command(flatten)]
        common: CommonArgs,
        /// Data as a bit string.
        #[arg(long, group = "data")]
        bits: Option<String>,
        /// Data as hex, two digits per byte.
        #[arg(long, group = "data")]
        hex: Option<String>,
        /// File holding a bit string or `0x`-prefixed hex.
        #[arg(long, group = "data", value_name = "PATH")]
        data_file: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(ExperimentConfig, Outcome), CliError> {
    let (name, common, assert_secure) = match &cli.command {
        Command::PropCheck {
            common,
            assert_secure,
        } => ("prop-check", common, *assert_secure),
        Command::Attack { common } => ("attack", common, false),
        Command::Session { common, .. } => ("session", common, false),
    };
    let config = ExperimentConfig::resolve(name, common, assert_secure)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = config.workers {
        pool = pool.num_threads(w);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    let outcome = pool.install(|| match &cli.command {
        Command::PropCheck { .. } => cmd_prop_check(&config).map(|r| Outcome::Sweep(Box::new(r))),
        Command::Attack { .. } => cmd_attack(&config).map(|r| Outcome::Sweep(Box::new(r))),
        Command::Session {
            bits,
            hex,
            data_file,
            ..
        } => {
            let source = match (bits, hex, data_file) {
                (Some(b), _, _) => Some(DataSource::Bits(b.clone())),
                (_, Some(h), _) => Some(DataSource::Hex(h.clone())),
                (_, _, Some(p)) => Some(DataSource::File(p.clone())),
                _ => None,
            };
            cmd_session(&config, source.as_ref()).map(|s| Outcome::Session(Box::new(s)))
        }
    })?;
    Ok((config, outcome))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let (config, outcome) = match run(cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("qubitsec: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let rendered = outcome.render(config.format);
    let written = match &config.out {
        Some(path) => std::fs::write(path, &rendered).map_err(|e| CliError::io(path, e)),
        None => std::io::stdout()
            .write_all(rendered.as_bytes())
            .map_err(|e| CliError::io(std::path::Path::new("<stdout>"), e)),
    };
    if let Err(e) = written {
        eprintln!("qubitsec: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    eprintln!(
        "qubitsec: finished in {:.3}s",
        start.elapsed().as_secs_f64()
    );
    ExitCode::from(if outcome.pass() {
        EXIT_PASS
    } else {
        EXIT_BAND_FAILURE
    })
}
