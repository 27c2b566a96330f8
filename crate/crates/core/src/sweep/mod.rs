//! Run configuration and orchestration for parameter sweeps.
//!
//! A single JSON document describes one run: what to compute (`mode`), the
//! physical setup (atom number, chain spacing, band pairs), the detector
//! grid, parallelism, and output destination. Every mode writes its results
//! plus a metadata record that re-parses into an equivalent `SweepConfig`,
//! so each emitted file doubles as a reproduction recipe.

pub mod grid;
mod io;
mod runners;

use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::oracle::OracleReport;
use crate::params::{BandPair, PerBand};

pub use grid::{AxisSpec, GridSpec};
pub use io::RunMetadata;
pub use runners::{
    compute_csi_grid, compute_map_grid, run_csi, run_dynamics, run_map, run_oracle_check,
    run_resolution, CsiSummary, DynamicsSummary, MapGrid, PairSummary, ResolutionSummary,
};

/// What a run computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepMode {
    /// g² correlation map over the detector-angle grid.
    Map,
    /// Cauchy-Schwarz parameter map plus violation-area fraction.
    Csi,
    /// Time integration of the two-atom collective variables.
    Dynamics,
    /// Exact-diagonalization cross-check of the closed forms.
    OracleCheck,
    /// Weak- vs strong-field fringe profiles and their period ratio.
    Resolution,
}

/// Output file format for grid and trajectory data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Steady density operator used by the oracle cross-check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityChoice {
    /// Maximally mixed resonant steady state; the closed forms hold here.
    #[default]
    ResonantUniform,
    /// Two-atom density implied by the dynamics steady state (exploratory:
    /// away from resonance the closed forms are expected to deviate).
    DynamicsDerived,
}

fn default_n_atoms() -> usize {
    2
}
fn default_spacing() -> f64 {
    5.0
}
fn default_pairs() -> Vec<BandPair> {
    vec!["LL".parse().expect("static tag")]
}
fn default_workers() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

fn default_rabi() -> f64 {
    20.0
}
fn default_gammas() -> PerBand<f64> {
    PerBand::uniform(1.0)
}
fn default_initial() -> [f64; 3] {
    [-2.0, 0.0, 1.0]
}
fn default_t_end() -> f64 {
    50.0
}
fn default_dt() -> f64 {
    0.01
}
fn default_saturation() -> f64 {
    0.5
}
fn default_samples() -> usize {
    2001
}
fn default_oracle_n() -> Vec<usize> {
    vec![2, 3, 4, 5, 6]
}
fn default_oracle_steps() -> usize {
    21
}

/// Parameters for `mode = dynamics`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsConfig {
    /// Drive strength Ω/γ.
    #[serde(default = "default_rabi")]
    pub rabi: f64,
    /// Laser-atom detuning Δ/γ.
    #[serde(default)]
    pub detuning: f64,
    /// Spontaneous decay rate of each spectral band, in units of γ.
    #[serde(default = "default_gammas")]
    pub band_gammas: PerBand<f64>,
    /// Cross-atom coupling per band; when omitted, all three bands use the
    /// free-space kernel at the configured chain spacing.
    #[serde(default)]
    pub chi: Option<PerBand<f64>>,
    /// Initial (x, y, z).
    #[serde(default = "default_initial")]
    pub initial: [f64; 3],
    /// Integration horizon in units of 1/γ.
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    /// Fixed RK4 step in units of 1/γ.
    #[serde(default = "default_dt")]
    pub dt: f64,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        DynamicsConfig {
            rabi: default_rabi(),
            detuning: 0.0,
            band_gammas: default_gammas(),
            chi: None,
            initial: default_initial(),
            t_end: default_t_end(),
            dt: default_dt(),
        }
    }
}

/// Parameters for `mode = resolution`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolutionConfig {
    /// Weak-drive strength Ω/γ for the interference profile.
    #[serde(default = "default_saturation")]
    pub saturation_omega: f64,
    /// Sample count for each profile over δ ∈ [−2π, 2π].
    #[serde(default = "default_samples")]
    pub samples: usize,
}

impl Default for ResolutionConfig {
    fn default() -> Self {
        ResolutionConfig {
            saturation_omega: default_saturation(),
            samples: default_samples(),
        }
    }
}

/// Parameters for `mode = oracle-check`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    /// Atom numbers to verify.
    #[serde(default = "default_oracle_n")]
    pub n_values: Vec<usize>,
    /// δ-grid resolution per axis over [0, 2π].
    #[serde(default = "default_oracle_steps")]
    pub grid_steps: usize,
    /// Steady density operator to trace against.
    #[serde(default)]
    pub density: DensityChoice,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            n_values: default_oracle_n(),
            grid_steps: default_oracle_steps(),
            density: DensityChoice::default(),
        }
    }
}

/// Full description of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub mode: SweepMode,
    #[serde(default = "default_n_atoms")]
    pub n_atoms: usize,
    /// Chain spacing r₀/λ.
    #[serde(default = "default_spacing")]
    pub spacing: f64,
    /// Band pairs mapped by `mode = map`.
    #[serde(default = "default_pairs")]
    pub band_pairs: Vec<BandPair>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default = "default_workers")]
    pub workers: usize,
    /// Output path; JSON-format runs print to stdout when omitted.
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default)]
    pub dynamics: DynamicsConfig,
    #[serde(default)]
    pub resolution: ResolutionConfig,
    #[serde(default)]
    pub oracle: OracleConfig,
}

impl SweepConfig {
    /// A minimal config for `mode` with every other field at its default.
    pub fn with_mode(mode: SweepMode) -> Self {
        serde_json::from_value(serde_json::json!({ "mode": mode_tag(mode) }))
            .expect("default config is valid")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: SweepConfig = serde_json::from_str(text)?;
        Ok(config)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Validates every field, naming the offender in the error message.
    /// Oracle atom numbers are deliberately not range-checked here: the
    /// oracle module reports them as capacity errors.
    pub fn validate(&self) -> Result<()> {
        if self.n_atoms < 2 {
            return Err(Error::Validation(format!(
                "n_atoms: expected >= 2, got {}",
                self.n_atoms
            )));
        }
        if !(self.spacing.is_finite() && self.spacing > 0.0) {
            return Err(Error::Validation(format!(
                "spacing: expected > 0, got {}",
                self.spacing
            )));
        }
        if self.workers < 1 {
            return Err(Error::Validation("workers: expected >= 1, got 0".into()));
        }
        self.grid.validate()?;
        if self.mode == SweepMode::Map && self.band_pairs.is_empty() {
            return Err(Error::Validation(
                "band_pairs: at least one pair required for map mode".into(),
            ));
        }
        if self.format == OutputFormat::Csv
            && self.out.is_none()
            && self.mode != SweepMode::OracleCheck
        {
            return Err(Error::Validation(
                "out: required when format = csv (json-format runs may print to stdout)".into(),
            ));
        }

        let d = &self.dynamics;
        if !(d.rabi.is_finite() && d.rabi > 0.0) {
            return Err(Error::Validation(format!(
                "dynamics.rabi: expected > 0, got {}",
                d.rabi
            )));
        }
        if !d.detuning.is_finite() {
            return Err(Error::Validation(
                "dynamics.detuning: must be finite".into(),
            ));
        }
        for (g, name) in [
            (d.band_gammas.left, "left"),
            (d.band_gammas.center, "center"),
            (d.band_gammas.right, "right"),
        ] {
            if !(g.is_finite() && g > 0.0) {
                return Err(Error::Validation(format!(
                    "dynamics.band_gammas.{name}: expected > 0, got {g}"
                )));
            }
        }
        if let Some(chi) = &d.chi {
            for (c, name) in [
                (chi.left, "left"),
                (chi.center, "center"),
                (chi.right, "right"),
            ] {
                if !(c.is_finite() && c.abs() <= 1.0) {
                    return Err(Error::Validation(format!(
                        "dynamics.chi.{name}: expected within [-1, 1], got {c}"
                    )));
                }
            }
        }
        if !(d.t_end.is_finite() && d.t_end >= 0.0) {
            return Err(Error::Validation(format!(
                "dynamics.t_end: expected >= 0, got {}",
                d.t_end
            )));
        }
        if !(d.dt.is_finite() && d.dt > 0.0) {
            return Err(Error::Validation(format!(
                "dynamics.dt: expected > 0, got {}",
                d.dt
            )));
        }
        if !d.initial.iter().all(|v| v.is_finite()) {
            return Err(Error::Validation(
                "dynamics.initial: components must be finite".into(),
            ));
        }

        let r = &self.resolution;
        if !(r.saturation_omega.is_finite() && r.saturation_omega > 0.0) {
            return Err(Error::Validation(format!(
                "resolution.saturation_omega: expected > 0, got {}",
                r.saturation_omega
            )));
        }
        if r.samples < 2 {
            return Err(Error::Validation(format!(
                "resolution.samples: expected >= 2, got {}",
                r.samples
            )));
        }

        let o = &self.oracle;
        if o.grid_steps < 2 {
            return Err(Error::Validation(format!(
                "oracle.grid_steps: expected >= 2, got {}",
                o.grid_steps
            )));
        }
        if o.density == DensityChoice::DynamicsDerived && o.n_values.iter().any(|&n| n != 2) {
            return Err(Error::Validation(
                "oracle.n_values: dynamics-derived density is defined for two atoms only".into(),
            ));
        }
        Ok(())
    }
}

fn mode_tag(mode: SweepMode) -> &'static str {
    match mode {
        SweepMode::Map => "map",
        SweepMode::Csi => "csi",
        SweepMode::Dynamics => "dynamics",
        SweepMode::OracleCheck => "oracle-check",
        SweepMode::Resolution => "resolution",
    }
}

/// Result summary handed back to the caller after files are written.
#[derive(Debug, Clone)]
pub enum RunOutcome {
    Map(Vec<PairSummary>),
    Csi(CsiSummary),
    Dynamics(DynamicsSummary),
    OracleCheck(OracleReport),
    Resolution(ResolutionSummary),
}

/// Validates the config, dispatches on mode, writes all outputs, and
/// returns the in-memory summary. An oracle check whose deviation exceeds
/// tolerance returns a deviation error (after writing its report) so
/// callers can distinguish it from validation failures.
pub fn run(config: &SweepConfig) -> Result<RunOutcome> {
    config.validate()?;
    match config.mode {
        SweepMode::Map => run_map(config).map(RunOutcome::Map),
        SweepMode::Csi => run_csi(config).map(RunOutcome::Csi),
        SweepMode::Dynamics => run_dynamics(config).map(RunOutcome::Dynamics),
        SweepMode::Resolution => run_resolution(config).map(RunOutcome::Resolution),
        SweepMode::OracleCheck => {
            let report = run_oracle_check(config)?;
            if report.pass {
                Ok(RunOutcome::OracleCheck(report))
            } else {
                Err(Error::Deviation(format!(
                    "oracle check: max deviation {:e} at tolerance {:e}",
                    report.max_deviation, report.tolerance
                )))
            }
        }
    }
}
