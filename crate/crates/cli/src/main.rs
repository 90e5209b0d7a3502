use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use isosurf_cli::config::{parse_grid, VerifyConfig};
use isosurf_cli::{commands, CliError, JobConfig, Overrides};

#[derive(Parser)]
#[command(
    name = "isosurf",
    version,
    about = "Invariant surfaces in simply and pseudo-isotropic space"
)]
struct Cli {
    /// JSON job configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Sampling grid, e.g. 64x32.
    #[arg(long, global = true, value_parser = parse_grid)]
    grid: Option<[usize; 2]>,
    /// Tolerance of the command (admissibility factor, round-trip bound,
    /// closed-form discrepancy, or verification scale).
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample an invariant surface into OBJ, CSV and a JSON report.
    Generate,
    /// Name the type, orbit and ruledness of a subgroup.
    Classify,
    /// Solve a prescribed curvature problem and check the round trip.
    Solve,
    /// Compare numeric and closed-form curvature on a grid.
    Curvature,
    /// Run the verification suites.
    Verify {
        /// Run only these suites (repeatable).
        #[arg(long = "suite")]
        suites: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Corrupt the closed-form curvature to check that the suites notice.
        #[arg(long)]
        inject_sign_flip: bool,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(p) => JobConfig::load(p)?,
        None => JobConfig::default(),
    };
    cfg.apply(&Overrides {
        out: cli.out,
        grid: cli.grid,
        tol: cli.tol,
    });
    let mut stdout = io::stdout().lock();
    match cli.command {
        Command::Generate => commands::generate(&cfg, &mut stdout).map(drop),
        Command::Classify => commands::classify(&cfg, &mut stdout).map(drop),
        Command::Solve => commands::solve(&cfg, &mut stdout).map(drop),
        Command::Curvature => commands::curvature(&cfg, &mut stdout).map(drop),
        Command::Verify {
            suites,
            seed,
            inject_sign_flip,
        } => {
            let v = cfg.verify.get_or_insert_with(VerifyConfig::default);
            if !suites.is_empty() {
                v.suites = suites;
            }
            if seed.is_some() {
                v.seed = seed;
            }
            v.inject_sign_flip |= inject_sign_flip;
            commands::verify(&cfg, &mut stdout).map(drop)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("isosurf: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
