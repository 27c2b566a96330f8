//! Command-line front end for the band-filtered correlation library.
//!
//! Every subcommand assembles a [`SweepConfig`], hands it to the library
//! runner, and prints a one-line summary per artifact. Flags override fields
//! of a `--config` file; the subcommand always decides the run mode.
//!
//! Exit codes: 0 success, 1 validation or runtime error, 2 capacity limit
//! exceeded, 3 cross-check deviation above tolerance.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mollow_g2_core::params::BandPair;
use mollow_g2_core::sweep::{
    self, AxisSpec, GridSpec, OutputFormat, RunOutcome, SweepConfig, SweepMode,
};
use mollow_g2_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "mollow-g2",
    version,
    about = "Intensity correlations of band-filtered resonance fluorescence from a regular atomic chain",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Second-order correlation map over the detector-angle grid
    Map(CommonArgs),
    /// Cauchy-Schwarz parameter map plus violation-area fraction
    Csi(CommonArgs),
    /// Two-atom dressed-state relaxation trajectory
    Dynamics {
        #[command(flatten)]
        common: CommonArgs,
        /// Drive strength in units of the single-atom decay rate
        #[arg(long, value_name = "OMEGA")]
        rabi: Option<f64>,
        /// Laser-atom detuning in units of the single-atom decay rate
        #[arg(long, value_name = "DELTA")]
        detuning: Option<f64>,
        /// Integration horizon in units of the single-atom lifetime
        #[arg(long, value_name = "T")]
        t_end: Option<f64>,
        /// Fixed integrator step in units of the single-atom lifetime
        #[arg(long, value_name = "DT")]
        dt: Option<f64>,
    },
    /// Exact-diagonalization cross-check of the closed-form correlations
    OracleCheck {
        #[command(flatten)]
        common: CommonArgs,
        /// Atom numbers to verify, comma separated (each at most 12)
        #[arg(long, value_name = "N,N,...", value_delimiter = ',')]
        n_values: Option<Vec<usize>>,
        /// Phase-grid steps per detector axis
        #[arg(long, value_name = "STEPS")]
        grid_steps: Option<usize>,
    },
    /// Weak- vs strong-drive fringe profiles and their period ratio
    Resolution {
        #[command(flatten)]
        common: CommonArgs,
        /// Weak-drive strength in units of the single-atom decay rate
        #[arg(long, value_name = "OMEGA")]
        saturation: Option<f64>,
        /// Sample count per fringe profile
        #[arg(long, value_name = "N")]
        samples: Option<usize>,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// JSON run configuration; explicit flags override its fields
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Number of atoms in the chain
    #[arg(long, value_name = "N")]
    n_atoms: Option<usize>,
    /// Lattice spacing in units of the laser wavelength
    #[arg(long, value_name = "R")]
    spacing: Option<f64>,
    /// Ordered band pair such as LL, CC, or LR (repeat for several maps)
    #[arg(long = "pair", value_name = "PAIR")]
    pairs: Vec<BandPair>,
    /// Detector grid applied to both axes, as min:max:steps in radians
    #[arg(long, value_name = "MIN:MAX:STEPS")]
    grid: Option<String>,
    /// Worker threads (defaults to the available parallelism)
    #[arg(long, value_name = "K")]
    workers: Option<usize>,
    /// Output file; map and profile suffixes are appended when a run writes several files
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum, value_name = "FMT")]
    format: Option<FormatArg>,
    /// Accepted for interface stability; runs are deterministic, so only "none" is valid
    #[arg(long, value_name = "SEED")]
    seed: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(value: FormatArg) -> Self {
        match value {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

fn parse_grid(text: &str) -> Result<AxisSpec> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Validation(format!(
            "grid: expected min:max:steps, got '{text}'"
        )));
    }
    let field = |part: &str, what: &str| -> Result<f64> {
        part.trim()
            .parse()
            .map_err(|_| Error::Validation(format!("grid: {what} '{part}' is not a number")))
    };
    let min = field(parts[0], "minimum")?;
    let max = field(parts[1], "maximum")?;
    let steps = parts[2]
        .trim()
        .parse()
        .map_err(|_| Error::Validation(format!("grid: steps '{}' is not a count", parts[2])))?;
    Ok(AxisSpec { min, max, steps })
}

/// Loads the config file when given, then layers the shared flags on top.
fn build_config(mode: SweepMode, common: &CommonArgs) -> Result<SweepConfig> {
    if let Some(seed) = &common.seed {
        if seed != "none" {
            return Err(Error::Validation(format!(
                "seed: every run is deterministic; only 'none' is accepted, got '{seed}'"
            )));
        }
    }
    let mut config = match &common.config {
        Some(path) => SweepConfig::load(path)?,
        None => SweepConfig::with_mode(mode),
    };
    // The subcommand names the computation even if the file tags another mode.
    config.mode = mode;
    if let Some(n) = common.n_atoms {
        config.n_atoms = n;
    }
    if let Some(r) = common.spacing {
        config.spacing = r;
    }
    if !common.pairs.is_empty() {
        config.band_pairs = common.pairs.clone();
    }
    if let Some(text) = &common.grid {
        let axis = parse_grid(text)?;
        config.grid = GridSpec {
            alpha1: axis,
            alpha2: axis,
        };
    }
    if let Some(workers) = common.workers {
        config.workers = workers;
    }
    if let Some(out) = &common.out {
        config.out = Some(out.clone());
    }
    if let Some(format) = common.format {
        config.format = format.into();
    }
    Ok(config)
}

fn assemble(command: &Command) -> Result<SweepConfig> {
    match command {
        Command::Map(common) => build_config(SweepMode::Map, common),
        Command::Csi(common) => build_config(SweepMode::Csi, common),
        Command::Dynamics {
            common,
            rabi,
            detuning,
            t_end,
            dt,
        } => {
            let mut config = build_config(SweepMode::Dynamics, common)?;
            if let Some(v) = *rabi {
                config.dynamics.rabi = v;
            }
            if let Some(v) = *detuning {
                config.dynamics.detuning = v;
            }
            if let Some(v) = *t_end {
                config.dynamics.t_end = v;
            }
            if let Some(v) = *dt {
                config.dynamics.dt = v;
            }
            Ok(config)
        }
        Command::OracleCheck {
            common,
            n_values,
            grid_steps,
        } => {
            let mut config = build_config(SweepMode::OracleCheck, common)?;
            if let Some(ns) = n_values {
                config.oracle.n_values = ns.clone();
            }
            if let Some(steps) = *grid_steps {
                config.oracle.grid_steps = steps;
            }
            Ok(config)
        }
        Command::Resolution {
            common,
            saturation,
            samples,
        } => {
            let mut config = build_config(SweepMode::Resolution, common)?;
            if let Some(v) = *saturation {
                config.resolution.saturation_omega = v;
            }
            if let Some(v) = *samples {
                config.resolution.samples = v;
            }
            Ok(config)
        }
    }
}

fn location(path: &Option<PathBuf>) -> String {
    path.as_ref()
        .map(|p| format!(" -> {}", p.display()))
        .unwrap_or_default()
}

fn print_outcome(outcome: &RunOutcome) {
    match outcome {
        RunOutcome::Map(summaries) => {
            for s in summaries {
                println!(
                    "map {}: min {:.9} max {:.9}{}",
                    s.pair,
                    s.min,
                    s.max,
                    location(&s.path)
                );
            }
        }
        RunOutcome::Csi(s) => {
            println!(
                "csi: min {:.9} max {:.9} violation fraction {:.4}{}",
                s.min,
                s.max,
                s.violation_fraction,
                location(&s.path)
            );
        }
        RunOutcome::Dynamics(s) => {
            println!(
                "dynamics: final (x, y, z) = ({:.9}, {:.9}, {:.9}) steady-state residual {:.3e} secular check {} (margin {:.1}){}",
                s.final_state.x,
                s.final_state.y,
                s.final_state.z,
                s.steady_state_residual,
                if s.secular_pass { "pass" } else { "marginal" },
                s.secular_margin,
                location(&s.path)
            );
        }
        RunOutcome::OracleCheck(report) => {
            println!(
                "oracle check: pass (max deviation {:.3e} over {} band-pair cases, tolerance {:.1e})",
                report.max_deviation,
                report.entries.len(),
                report.tolerance
            );
        }
        RunOutcome::Resolution(s) => {
            println!(
                "resolution: weak period {:.6} strong period {:.6} ratio {:.6}{}{}",
                s.weak_period,
                s.strong_period,
                s.ratio,
                location(&s.weak_path),
                location(&s.strong_path)
            );
        }
    }
}

fn execute(cli: &Cli) -> Result<()> {
    let config = assemble(&cli.command)?;
    // With no output file the run streams its document to stdout (JSON maps,
    // or the cross-check report); keep stdout machine-readable in that case.
    let quiet = config.out.is_none()
        && (config.format == OutputFormat::Json || config.mode == SweepMode::OracleCheck);
    let outcome = sweep::run(&config)?;
    if !quiet {
        print_outcome(&outcome);
    }
    Ok(())
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Capacity(_) => 2,
        Error::Deviation(_) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests land here as well; keep their
            // conventional success status, map real usage errors to 1.
            let code = u8::from(err.use_stderr());
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
