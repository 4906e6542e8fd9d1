use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cornerscale_cli::commands::{self, OracleQuery};
use cornerscale_cli::config::{Command, RunConfig, REFERENCE};
use cornerscale_cli::report::{Outcome, Provenance};
use cornerscale_cli::CliError;

/// Spectra, resonances and resolvent continuation on manifolds with
/// cylindrical, cusp and corner ends.
#[derive(Parser)]
#[command(name = "cornerscale", version, disable_version_flag = true)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "CORNERSCALE_THREADS")]
    threads: Option<usize>,

    /// Log progress to stderr.
    #[arg(long, short = 'v', global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Sub,
}

#[derive(Args)]
struct Io {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,

    /// Output directory; overrides `output.directory`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Sub {
    /// Bound states per transverse mode.
    Spectrum(Io),
    /// Theta-stable resonances and bound states, with a complex-plane plot.
    Resonances(Io),
    /// Rays of the essential spectrum of the scaled operator.
    EssentialSpectrum(Io),
    /// Continued resolvent matrix elements along a path.
    Continue(Io),
    /// Singular values of the parametrix residual.
    ParametrixCheck(Io),
    /// Limiting-absorption estimate on an interval.
    Lap(Io),
    /// Channel spectra, rays and resonances of a corner.
    Corner(Io),
    /// The command named in `task.command`.
    Run(Io),
    /// Matching-equation oracles; no config needed.
    Oracle {
        #[command(subcommand)]
        which: Oracle,
        /// Also write oracle.csv here.
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Print the annotated reference configuration.
    Schema,
}

#[derive(Subcommand)]
enum Oracle {
    /// Bound states of -d²/du² - V0·χ[0,a] with Dirichlet at 0.
    Well {
        /// Well depth (also accepted as -V0).
        #[arg(long = "V0", alias = "depth")]
        depth: f64,
        /// Well width.
        #[arg(short = 'a', long = "width")]
        width: f64,
        #[arg(long, default_value_t = 0.0)]
        mu: f64,
    },
    /// Resonances of a barrier in a search box.
    #[command(allow_negative_numbers = true)]
    Barrier {
        #[arg(long)]
        height: f64,
        #[arg(long)]
        start: f64,
        #[arg(long)]
        end: f64,
        #[arg(long, default_value_t = 0.0)]
        mu: f64,
        #[arg(long, num_args = 2, default_values_t = [0.05, 10.0])]
        re: Vec<f64>,
        #[arg(long, num_args = 2, default_values_t = [-1.0, -1e-4])]
        im: Vec<f64>,
    },
}

/// `-V0` is not a valid clap short flag; treat it as `--V0`.
fn normalize_args() -> Vec<String> {
    std::env::args()
        .map(|a| match a.strip_prefix("-V0") {
            Some(rest) if !a.starts_with("--") => format!("--V0{rest}"),
            _ => a,
        })
        .collect()
}

fn emit(outcome: &Outcome, dir: Option<&Path>, prov: &Provenance) -> Result<(), CliError> {
    for line in &outcome.summary {
        println!("{line}");
    }
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(dir) = dir {
        for p in outcome.write(dir, prov)? {
            log::info!("wrote {}", p.display());
        }
    }
    Ok(())
}

fn with_config(io: &Io, command: Option<Command>) -> Result<(), CliError> {
    let cfg = RunConfig::load(&io.config)?;
    let command = match command.or(cfg.task.command) {
        Some(c) => c,
        None => return Err(CliError::Schema("`run` needs task.command".into())),
    };
    log::info!(
        "{} with config {} ({})",
        command.name(),
        io.config.display(),
        cfg.hash()
    );
    let outcome = commands::run(&cfg, command)?;
    let dir = io
        .out
        .clone()
        .unwrap_or_else(|| cfg.output.directory.clone());
    emit(
        &outcome,
        Some(&dir),
        &Provenance::for_run(&cfg, command.name()),
    )
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Sub::Spectrum(io) => with_config(&io, Some(Command::Spectrum)),
        Sub::Resonances(io) => with_config(&io, Some(Command::Resonances)),
        Sub::EssentialSpectrum(io) => with_config(&io, Some(Command::EssentialSpectrum)),
        Sub::Continue(io) => with_config(&io, Some(Command::Continue)),
        Sub::ParametrixCheck(io) => with_config(&io, Some(Command::ParametrixCheck)),
        Sub::Lap(io) => with_config(&io, Some(Command::Lap)),
        Sub::Corner(io) => with_config(&io, Some(Command::Corner)),
        Sub::Run(io) => with_config(&io, None),
        Sub::Oracle { which, out } => {
            let q = match which {
                Oracle::Well { depth, width, mu } => OracleQuery::Well { depth, width, mu },
                Oracle::Barrier {
                    height,
                    start,
                    end,
                    mu,
                    re,
                    im,
                } => OracleQuery::Barrier {
                    height,
                    start,
                    end,
                    mu,
                    re: (re[0], re[1]),
                    im: (im[0], im[1]),
                },
            };
            emit(
                &commands::oracle_run(&q)?,
                out.as_deref(),
                &Provenance::default(),
            )
        }
        Sub::Schema => {
            print!("{REFERENCE}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse_from(normalize_args());
    env_logger::Builder::new()
        .filter_level(if cli.verbose {
            log::LevelFilter::Info
        } else {
            log::LevelFilter::Warn
        })
        .init();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(3);
        }
    }
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
