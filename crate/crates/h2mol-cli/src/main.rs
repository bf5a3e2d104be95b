//! Command-line front end for the h2mol pipeline.
//!
//! Twelve subcommands cover the pipeline bottom to top: integrals and
//! spectra at fixed geometry, variational equilibria and sweeps, energy
//! curves, electron density, phonon and Morse fits, stretch couplings,
//! mean-field trajectories, dissociation-time sweeps with their decay
//! fit, the three special couplings, and a combined per-coupling report.
//!
//! Exit codes: 0 success, 2 for usage and input errors (including domain
//! refusals like a Morse fit past metastability), 3 for numerical
//! failures (an iteration missing its target). Expensive results are
//! cached content-addressed under `--cache-dir`, `$H2MOL_CACHE_DIR`, or
//! `./.h2mol-cache`; `--no-cache` bypasses the cache entirely. A JSON
//! config file (`--config`) can hold any flag; explicit flags win.

mod cache;
mod commands;
mod config;
mod render;

use std::fmt;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use cache::Cache;
use commands::TrajectoryOpts;
use config::{pick, pick_flag, require, RunConfig};
use h2mol::H2Error;

/// Errors of the front end, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad request: malformed flags, invalid values, domain refusals.
    Input(String),
    /// The physics layer rejected the request or failed numerically.
    Physics(H2Error),
    /// Output could not be written.
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) => write!(f, "{msg}"),
            CliError::Physics(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "output: {e}"),
        }
    }
}

impl From<H2Error> for CliError {
    fn from(e: H2Error) -> Self {
        CliError::Physics(e)
    }
}

impl CliError {
    /// Process exit code: 2 for input errors, 3 for numerical failures.
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Io(_) => 2,
            CliError::Physics(e) => match e {
                H2Error::InvalidInput(_)
                | H2Error::DegenerateBasis { .. }
                | H2Error::MorseDomain { .. } => 2,
                H2Error::QuadratureAccuracy { .. }
                | H2Error::EigenConvergence { .. }
                | H2Error::NoInteriorMinimum { .. }
                | H2Error::BracketFailure(_)
                | H2Error::NegativeCurvature { .. }
                | H2Error::StepUnderflow { .. }
                | H2Error::RankDeficient(_) => 3,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "h2mol",
    version,
    about = "Hydrogen molecule under balanced gain and loss: integrals, spectra, equilibria, phonons, and mean-field dynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON config file mirroring the flags; explicit flags win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Write output to this file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Cache directory (default: $H2MOL_CACHE_DIR or ./.h2mol-cache).
    #[arg(long, global = true, value_name = "DIR")]
    cache_dir: Option<PathBuf>,

    /// Bypass the result cache (neither read nor write).
    #[arg(long, global = true)]
    no_cache: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Hubbard integrals at one geometry, with quadrature cross-checks
    Integrals {
        /// Proton distance in a0
        #[arg(long = "R", value_name = "A0")]
        r: Option<f64>,
        /// Orbital exponent in 1/a0
        #[arg(long, value_name = "INV_A0")]
        alpha: Option<f64>,
    },
    /// Six two-electron levels and the symmetry phase at one geometry
    Spectrum {
        /// Proton distance in a0
        #[arg(long = "R", value_name = "A0")]
        r: Option<f64>,
        /// Orbital exponent in 1/a0
        #[arg(long, value_name = "INV_A0")]
        alpha: Option<f64>,
        /// Gain/loss strength in Ry
        #[arg(long, value_name = "RY")]
        gamma: Option<f64>,
    },
    /// Variational equilibrium at one coupling
    Equilibrium {
        /// Gain/loss strength in Ry
        #[arg(long, value_name = "RY")]
        gamma: Option<f64>,
    },
    /// Equilibrium table over a coupling grid (CSV)
    Sweep {
        /// First coupling in Ry
        #[arg(long, value_name = "RY")]
        gamma_from: Option<f64>,
        /// Last coupling in Ry
        #[arg(long, value_name = "RY")]
        gamma_to: Option<f64>,
        /// Number of grid points
        #[arg(long, value_name = "N")]
        steps: Option<usize>,
    },
    /// Alpha-optimized energy curve over an R grid (CSV)
    Curve {
        /// Gain/loss strength in Ry
        #[arg(long, value_name = "RY")]
        gamma: Option<f64>,
        /// Smallest proton distance in a0
        #[arg(long, value_name = "A0")]
        r_min: Option<f64>,
        /// Largest proton distance in a0
        #[arg(long, value_name = "A0")]
        r_max: Option<f64>,
        /// Number of grid points
        #[arg(long, value_name = "N")]
        steps: Option<usize>,
    },
    /// Electron density on the xz plane at the equilibrium geometry (CSV)
    Density {
        /// Gain/loss strength in Ry
        #[arg(long, value_name = "RY")]
        gamma: Option<f64>,
        /// Sampling plane; the density is axially symmetric, so only xz
        #[arg(long, value_name = "PLANE")]
        plane: Option<String>,
        /// Points per axis
        #[arg(long, value_name = "N")]
        n: Option<usize>,
    },
    /// Harmonic and Morse characterization of the bond at one coupling
    Phonons {
        /// Gain/loss strength in Ry
        #[arg(long, value_name = "RY")]
        gamma: Option<f64>,
    },
    /// Stretch derivatives of the six integrals at the equilibrium
    Couplings {
        /// Gain/loss strength in Ry
        #[arg(long, value_name = "RY")]
        gamma: Option<f64>,
    },
    /// One mean-field trajectory, streamed as CSV with a JSON footer
    Dynamics {
        /// Gain/loss strength in Ry
        #[arg(long, value_name = "RY")]
        gamma: Option<f64>,
        /// Time horizon in hbar/Ry
        #[arg(long, value_name = "T")]
        t_max: Option<f64>,
        /// Integrate the closed-system equations instead
        #[arg(long)]
        hermitian: bool,
        /// Start from the gamma = 0 equilibrium geometry
        #[arg(long)]
        frozen_geometry: bool,
        /// Relative tolerance per step
        #[arg(long, value_name = "TOL")]
        rtol: Option<f64>,
        /// Absolute tolerance per step
        #[arg(long, value_name = "TOL")]
        atol: Option<f64>,
    },
    /// Dissociation times over a coupling grid, with the decay-law fit
    TdSweep {
        /// First coupling in Ry (must be positive)
        #[arg(long, value_name = "RY")]
        from: Option<f64>,
        /// Last coupling in Ry
        #[arg(long, value_name = "RY")]
        to: Option<f64>,
        /// Number of grid points
        #[arg(long, value_name = "N")]
        steps: Option<usize>,
        /// Time horizon per trajectory in hbar/Ry
        #[arg(long, value_name = "T")]
        t_max: Option<f64>,
        /// Relative tolerance per step
        #[arg(long, value_name = "TOL")]
        rtol: Option<f64>,
        /// Absolute tolerance per step
        #[arg(long, value_name = "TOL")]
        atol: Option<f64>,
    },
    /// The three special couplings: symmetry breaking, metastability, breakup
    Thresholds,
    /// Every equilibrium property at one coupling, as one JSON document
    Report {
        /// Gain/loss strength in Ry (default 0)
        #[arg(long, value_name = "RY")]
        gamma: Option<f64>,
    },
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // clap prints help/version to stdout (exit 0) and usage errors to
        // stderr (exit 2) by itself.
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let cfg = RunConfig::load(cli.config.as_deref())?;
    let out = cli.out.or(cfg.out.clone());
    let out = out.as_deref();
    let cache_dir = cli
        .cache_dir
        .or(cfg.cache_dir.clone())
        .or_else(|| std::env::var_os("H2MOL_CACHE_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(".h2mol-cache"));
    let no_cache = pick_flag(cli.no_cache, cfg.no_cache);
    let cache = Cache::new(cache_dir, !no_cache);

    match cli.command {
        Command::Integrals { r, alpha } => {
            let r = require(r, cfg.r, "R")?;
            let alpha = require(alpha, cfg.alpha, "alpha")?;
            commands::integrals(out, r, alpha)
        }
        Command::Spectrum { r, alpha, gamma } => {
            let r = require(r, cfg.r, "R")?;
            let alpha = require(alpha, cfg.alpha, "alpha")?;
            let gamma = require(gamma, cfg.gamma, "gamma")?;
            commands::spectrum(out, r, alpha, gamma)
        }
        Command::Equilibrium { gamma } => {
            let gamma = require(gamma, cfg.gamma, "gamma")?;
            commands::equilibrium(&cache, out, gamma)
        }
        Command::Sweep {
            gamma_from,
            gamma_to,
            steps,
        } => {
            let from = require(gamma_from, cfg.gamma_from, "gamma-from")?;
            let to = require(gamma_to, cfg.gamma_to, "gamma-to")?;
            let steps = require(steps, cfg.steps, "steps")?;
            commands::sweep(&cache, out, from, to, steps)
        }
        Command::Curve {
            gamma,
            r_min,
            r_max,
            steps,
        } => {
            let gamma = require(gamma, cfg.gamma, "gamma")?;
            let r_min = require(r_min, cfg.r_min, "r-min")?;
            let r_max = require(r_max, cfg.r_max, "r-max")?;
            let steps = require(steps, cfg.steps, "steps")?;
            commands::curve(&cache, out, gamma, r_min, r_max, steps)
        }
        Command::Density { gamma, plane, n } => {
            let gamma = require(gamma, cfg.gamma, "gamma")?;
            let plane = pick(plane, cfg.plane.clone(), "xz".into());
            let n = pick(n, cfg.n, 201);
            commands::density(&cache, out, gamma, &plane, n)
        }
        Command::Phonons { gamma } => {
            let gamma = require(gamma, cfg.gamma, "gamma")?;
            commands::phonons(&cache, out, gamma)
        }
        Command::Couplings { gamma } => {
            let gamma = require(gamma, cfg.gamma, "gamma")?;
            commands::couplings(&cache, out, gamma)
        }
        Command::Dynamics {
            gamma,
            t_max,
            hermitian,
            frozen_geometry,
            rtol,
            atol,
        } => {
            let gamma = require(gamma, cfg.gamma, "gamma")?;
            let traj = TrajectoryOpts {
                t_max: pick(t_max, cfg.t_max, 200.0),
                rtol: pick(rtol, cfg.rtol, 1e-10),
                atol: pick(atol, cfg.atol, 1e-12),
                hermitian: pick_flag(hermitian, cfg.hermitian),
                frozen_geometry: pick_flag(frozen_geometry, cfg.frozen_geometry),
            };
            commands::dynamics(out, gamma, &traj)
        }
        Command::TdSweep {
            from,
            to,
            steps,
            t_max,
            rtol,
            atol,
        } => {
            let from = require(from, cfg.from, "from")?;
            let to = require(to, cfg.to, "to")?;
            let steps = require(steps, cfg.steps, "steps")?;
            let traj = TrajectoryOpts {
                t_max: pick(t_max, cfg.t_max, 200.0),
                rtol: pick(rtol, cfg.rtol, 1e-10),
                atol: pick(atol, cfg.atol, 1e-12),
                hermitian: false,
                frozen_geometry: false,
            };
            commands::td_sweep(&cache, out, from, to, steps, &traj)
        }
        Command::Thresholds => commands::thresholds(&cache, out),
        Command::Report { gamma } => {
            let gamma = pick(gamma, cfg.gamma, 0.0);
            commands::report(&cache, out, gamma)
        }
    }
}
