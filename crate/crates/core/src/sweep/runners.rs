//! Mode runners: pure grid evaluation plus file emission.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use std::f64::consts::TAU;
use std::path::PathBuf;

use super::{io, DensityChoice, OutputFormat, SweepConfig};
use crate::correlations::{
    csi, fringe_periods, g2_chain, g2_strong_central_single_detector, g2_weak_field,
};
use crate::dynamics::{
    evolve, steady_state, steady_state_residual, DynamicsCoefficients, TwoAtomState,
};
use crate::error::{Error, Result};
use crate::oracle::{
    oracle_g2_with_density, oracle_sweep_report, OracleEntry, OracleReport, SteadyDensity,
    MAX_ORACLE_ATOMS, ORACLE_TOLERANCE,
};
use crate::params::{
    collective_coupling, secular_regime_check, BandPair, ChainGeometry, DressedParams, PerBand,
};

/// Values of one quantity over the detector-angle grid, rows indexed by α₁.
#[derive(Debug, Clone)]
pub struct MapGrid {
    pub alpha1: Vec<f64>,
    pub alpha2: Vec<f64>,
    /// Row-major: `values[i * alpha2.len() + j]` belongs to (α₁ᵢ, α₂ⱼ).
    pub values: Vec<f64>,
}

impl MapGrid {
    pub fn value_at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.alpha2.len() + j]
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PairSummary {
    pub pair: BandPair,
    pub min: f64,
    pub max: f64,
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CsiSummary {
    pub min: f64,
    pub max: f64,
    /// Fraction of grid points with χ < 1 (the nonclassical region).
    pub violation_fraction: f64,
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DynamicsSummary {
    pub final_state: TwoAtomState,
    pub steady_state_residual: f64,
    pub secular_pass: bool,
    pub secular_margin: f64,
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolutionSummary {
    pub saturation_omega: f64,
    pub weak_period: f64,
    pub strong_period: f64,
    pub ratio: f64,
    pub weak_path: Option<PathBuf>,
    pub strong_path: Option<PathBuf>,
}

fn build_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Validation(format!("workers: {e}")))
}

fn ensure_finite(values: &[f64], what: &str) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        None => Ok(()),
        Some(i) => Err(Error::Normalization(format!(
            "{what}: non-finite value at index {i}"
        ))),
    }
}

/// Evaluates one scalar kernel over the (α₁, α₂) grid. Cells are computed
/// independently and assembled in fixed row-major order, so the result is
/// identical for any worker count.
fn compute_grid<F>(config: &SweepConfig, what: &str, kernel: F) -> Result<MapGrid>
where
    F: Fn(f64, f64) -> Result<f64> + Sync,
{
    let geometry = ChainGeometry::new(config.n_atoms, config.spacing)?;
    let alpha1 = config.grid.alpha1.points();
    let alpha2 = config.grid.alpha2.points();
    let d1: Vec<f64> = alpha1
        .iter()
        .map(|&a| geometry.detection_phase(a))
        .collect();
    let d2: Vec<f64> = alpha2
        .iter()
        .map(|&a| geometry.detection_phase(a))
        .collect();
    let pool = build_pool(config.workers)?;
    let rows: Result<Vec<Vec<f64>>> = pool.install(|| {
        d1.par_iter()
            .map(|&p1| d2.iter().map(|&p2| kernel(p1, p2)).collect())
            .collect()
    });
    let values: Vec<f64> = rows?.into_iter().flatten().collect();
    ensure_finite(&values, what)?;
    Ok(MapGrid {
        alpha1,
        alpha2,
        values,
    })
}

/// g²_mn over the detector grid for one band pair.
pub fn compute_map_grid(config: &SweepConfig, pair: BandPair) -> Result<MapGrid> {
    let n = config.n_atoms;
    compute_grid(config, "map", |p1, p2| g2_chain(pair, n, p1, p2))
}

/// Cauchy-Schwarz parameter χ over the detector grid.
pub fn compute_csi_grid(config: &SweepConfig) -> Result<MapGrid> {
    let n = config.n_atoms;
    compute_grid(config, "csi", |p1, p2| csi(n, p1, p2).map(|c| c.left))
}

pub fn run_map(config: &SweepConfig) -> Result<Vec<PairSummary>> {
    let multi = config.band_pairs.len() > 1;
    let mut summaries = Vec::new();
    let mut grids = Vec::new();
    for &pair in &config.band_pairs {
        let grid = compute_map_grid(config, pair)?;
        let path = match (config.format, &config.out) {
            (OutputFormat::Csv, Some(out)) => {
                let p = if multi {
                    io::suffixed_path(out, &pair.to_string())
                } else {
                    out.clone()
                };
                io::write_map_csv(&p, &grid.alpha1, &grid.alpha2, &grid.values)?;
                Some(p)
            }
            (_, out) => out.clone(),
        };
        summaries.push(PairSummary {
            pair,
            min: grid.min_value(),
            max: grid.max_value(),
            path,
        });
        grids.push(grid);
    }
    let meta = io::metadata(config, serde_json::to_value(&summaries)?);
    match config.format {
        OutputFormat::Csv => {
            // `out` is guaranteed by validation for CSV runs
            io::write_sidecar(config.out.as_ref().expect("validated"), &meta)?;
        }
        OutputFormat::Json => {
            let mut per_pair = serde_json::Map::new();
            for (summary, grid) in summaries.iter().zip(&grids) {
                per_pair.insert(summary.pair.to_string(), io::nested_rows(grid));
            }
            let doc = json!({
                "metadata": meta,
                "alpha1": grids[0].alpha1,
                "alpha2": grids[0].alpha2,
                "values": per_pair,
            });
            io::write_json_value(config.out.as_deref(), &doc)?;
        }
    }
    Ok(summaries)
}

pub fn run_csi(config: &SweepConfig) -> Result<CsiSummary> {
    let grid = compute_csi_grid(config)?;
    let violating = grid.values.iter().filter(|&&v| v < 1.0).count();
    let violation_fraction = violating as f64 / grid.values.len() as f64;
    let mut summary = CsiSummary {
        min: grid.min_value(),
        max: grid.max_value(),
        violation_fraction,
        path: config.out.clone(),
    };
    let meta = io::metadata(config, serde_json::to_value(&summary)?);
    match config.format {
        OutputFormat::Csv => {
            let out = config.out.as_ref().expect("validated");
            io::write_map_csv(out, &grid.alpha1, &grid.alpha2, &grid.values)?;
            io::write_sidecar(out, &meta)?;
            summary.path = Some(out.clone());
        }
        OutputFormat::Json => {
            let doc = json!({
                "metadata": meta,
                "alpha1": grid.alpha1,
                "alpha2": grid.alpha2,
                "values": io::nested_rows(&grid),
            });
            io::write_json_value(config.out.as_deref(), &doc)?;
        }
    }
    Ok(summary)
}

/// Drive parameters and relaxation coefficients implied by the config.
fn dynamics_setup(config: &SweepConfig) -> Result<(DressedParams, DynamicsCoefficients)> {
    let d = &config.dynamics;
    let params = DressedParams::new(d.rabi, d.detuning, d.band_gammas)?;
    let chi = match &d.chi {
        Some(c) => *c,
        None => PerBand::uniform(collective_coupling(TAU * config.spacing)?.chi),
    };
    let coeffs = DynamicsCoefficients::from_params(&params, &chi)?;
    Ok((params, coeffs))
}

pub fn run_dynamics(config: &SweepConfig) -> Result<DynamicsSummary> {
    let d = &config.dynamics;
    let (params, coeffs) = dynamics_setup(config)?;
    let initial = TwoAtomState::new(d.initial[0], d.initial[1], d.initial[2]);
    let trajectory = evolve(&coeffs, initial, d.t_end, d.dt).map_err(|e| match e {
        Error::StepSize { dt, bound } => Error::Validation(format!(
            "dynamics.dt: step {dt} exceeds the stability bound {bound:.6e}; reduce dt below the bound"
        )),
        other => other,
    })?;
    let (_, final_state) = *trajectory.last().expect("trajectory includes t = 0");
    let residual = steady_state_residual(&coeffs, final_state);
    let secular = secular_regime_check(&params, 2, None);
    let summary = DynamicsSummary {
        final_state,
        steady_state_residual: residual,
        secular_pass: secular.pass,
        secular_margin: secular.margin,
        path: config.out.clone(),
    };
    let meta = io::metadata(config, serde_json::to_value(&summary)?);
    match config.format {
        OutputFormat::Csv => {
            let out = config.out.as_ref().expect("validated");
            io::write_trajectory_csv(out, &trajectory, residual)?;
            io::write_sidecar(out, &meta)?;
        }
        OutputFormat::Json => {
            let rows: Vec<[f64; 4]> = trajectory
                .iter()
                .map(|&(t, s)| [t, s.x, s.y, s.z])
                .collect();
            let doc = json!({
                "metadata": meta,
                "trajectory": rows,
                "steady_state_residual": residual,
            });
            io::write_json_value(config.out.as_deref(), &doc)?;
        }
    }
    Ok(summary)
}

/// Caps the worker count so concurrent oracle evaluations stay within a
/// 1 GiB transient-matrix budget (each worker holds O(4^N) complex entries).
fn capped_oracle_workers(requested: usize, n_values: &[usize]) -> usize {
    let n_max = n_values
        .iter()
        .copied()
        .max()
        .unwrap_or(2)
        .min(MAX_ORACLE_ATOMS);
    let per_worker_bytes = 6 * 16 * (1usize << (2 * n_max));
    let budget = 1usize << 30;
    requested.min((budget / per_worker_bytes).max(1))
}

/// Oracle report against the dynamics-derived two-atom density operator.
fn dynamics_density_report(config: &SweepConfig) -> Result<OracleReport> {
    let (_, coeffs) = dynamics_setup(config)?;
    let rho = SteadyDensity::from_two_atom_state(&steady_state(&coeffs)?)?;
    let steps = config.oracle.grid_steps;
    let deltas: Vec<f64> = (0..steps)
        .map(|i| TAU * i as f64 / (steps - 1) as f64)
        .collect();
    let mut entries = Vec::new();
    for pair in BandPair::all() {
        let mut max_deviation = 0.0f64;
        for &d1 in &deltas {
            for &d2 in &deltas {
                let got = oracle_g2_with_density(&rho, pair, d1, d2)?;
                let want = g2_chain(pair, 2, d1, d2)?;
                max_deviation = max_deviation.max((got - want).abs());
            }
        }
        entries.push(OracleEntry {
            n_atoms: 2,
            pair,
            max_deviation,
        });
    }
    let max_deviation = entries.iter().map(|e| e.max_deviation).fold(0.0, f64::max);
    Ok(OracleReport {
        tolerance: ORACLE_TOLERANCE,
        grid_steps: steps,
        entries,
        max_deviation,
        pass: max_deviation < ORACLE_TOLERANCE,
    })
}

/// Runs the oracle comparison and writes the JSON report (stdout when no
/// output path is configured). Returns the report unconditionally; mapping
/// a failed check onto an error/exit status is the caller's concern.
pub fn run_oracle_check(config: &SweepConfig) -> Result<OracleReport> {
    let o = &config.oracle;
    let report = match o.density {
        DensityChoice::ResonantUniform => {
            let workers = capped_oracle_workers(config.workers, &o.n_values);
            let pool = build_pool(workers)?;
            pool.install(|| oracle_sweep_report(&o.n_values, o.grid_steps))?
        }
        DensityChoice::DynamicsDerived => dynamics_density_report(config)?,
    };
    io::write_json_value(config.out.as_deref(), &serde_json::to_value(&report)?)?;
    if let Some(out) = &config.out {
        let meta = io::metadata(config, serde_json::to_value(&report)?);
        io::write_sidecar(out, &meta)?;
    }
    Ok(report)
}

pub fn run_resolution(config: &SweepConfig) -> Result<ResolutionSummary> {
    let r = &config.resolution;
    let omega = r.saturation_omega;
    let n = r.samples;
    let deltas: Vec<f64> = (0..n)
        .map(|i| {
            if i + 1 == n {
                TAU
            } else {
                -TAU + 2.0 * TAU * (i as f64 / (n - 1) as f64)
            }
        })
        .collect();
    let weak: Result<Vec<f64>> = deltas.iter().map(|&d| g2_weak_field(omega, d)).collect();
    let weak = weak?;
    let strong: Vec<f64> = deltas
        .iter()
        .map(|&d| g2_strong_central_single_detector(d))
        .collect();
    ensure_finite(&weak, "resolution.weak")?;
    let (weak_period, strong_period) = fringe_periods(omega)?;
    let mut summary = ResolutionSummary {
        saturation_omega: omega,
        weak_period,
        strong_period,
        ratio: weak_period / strong_period,
        weak_path: None,
        strong_path: None,
    };
    match config.format {
        OutputFormat::Csv => {
            let out = config.out.as_ref().expect("validated");
            let weak_path = io::suffixed_path(out, "weak");
            let strong_path = io::suffixed_path(out, "strong");
            io::write_profile_csv(&weak_path, &deltas, &weak)?;
            io::write_profile_csv(&strong_path, &deltas, &strong)?;
            summary.weak_path = Some(weak_path);
            summary.strong_path = Some(strong_path);
            let meta = io::metadata(config, serde_json::to_value(&summary)?);
            io::write_sidecar(out, &meta)?;
        }
        OutputFormat::Json => {
            summary.weak_path = config.out.clone();
            summary.strong_path = config.out.clone();
            let meta = io::metadata(config, serde_json::to_value(&summary)?);
            let doc = json!({
                "metadata": meta,
                "delta": deltas,
                "weak": weak,
                "strong": strong,
            });
            io::write_json_value(config.out.as_deref(), &doc)?;
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::{AxisSpec, SweepMode};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn small_map_config() -> SweepConfig {
        let mut config = SweepConfig::with_mode(SweepMode::Map);
        config.grid.alpha1 = AxisSpec {
            min: 0.0,
            max: PI,
            steps: 11,
        };
        config.grid.alpha2 = AxisSpec {
            min: 0.0,
            max: PI,
            steps: 11,
        };
        config.workers = 2;
        config
    }

    #[test]
    fn map_grid_matches_direct_evaluation() {
        let config = small_map_config();
        let pair: BandPair = "CC".parse().unwrap();
        let grid = compute_map_grid(&config, pair).unwrap();
        assert_eq!(grid.values.len(), 121);
        let geometry = ChainGeometry::new(2, 5.0).unwrap();
        for (i, &a1) in grid.alpha1.iter().enumerate() {
            for (j, &a2) in grid.alpha2.iter().enumerate() {
                let want = g2_chain(
                    pair,
                    2,
                    geometry.detection_phase(a1),
                    geometry.detection_phase(a2),
                )
                .unwrap();
                assert_eq!(grid.value_at(i, j), want);
            }
        }
    }

    #[test]
    fn grid_values_independent_of_worker_count() {
        let pair: BandPair = "LL".parse().unwrap();
        let mut config = small_map_config();
        let mut reference: Option<Vec<f64>> = None;
        for workers in [1, 3, 8] {
            config.workers = workers;
            let grid = compute_map_grid(&config, pair).unwrap();
            match &reference {
                None => reference = Some(grid.values),
                Some(r) => assert_eq!(&grid.values, r),
            }
        }
    }

    #[test]
    fn csi_grid_left_equals_right_variant() {
        let mut config = small_map_config();
        config.mode = SweepMode::Csi;
        let grid = compute_csi_grid(&config).unwrap();
        let geometry = ChainGeometry::new(2, 5.0).unwrap();
        for (i, &a1) in grid.alpha1.iter().enumerate() {
            for (j, &a2) in grid.alpha2.iter().enumerate() {
                let v = csi(
                    2,
                    geometry.detection_phase(a1),
                    geometry.detection_phase(a2),
                )
                .unwrap();
                assert_eq!(grid.value_at(i, j), v.left);
                assert_relative_eq!(v.left, v.right, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn oracle_worker_cap_respects_memory_budget() {
        assert_eq!(capped_oracle_workers(8, &[2, 3, 4]), 8);
        assert_eq!(capped_oracle_workers(64, &[12]), 1);
        assert_eq!(capped_oracle_workers(4, &[]), 4);
    }

    #[test]
    fn dynamics_summary_reports_convergence() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = SweepConfig::with_mode(SweepMode::Dynamics);
        config.format = OutputFormat::Json;
        config.out = Some(dir.path().join("run.json"));
        let summary = run_dynamics(&config).unwrap();
        assert!(summary.steady_state_residual < 1e-8);
        assert!(summary.secular_pass);
        assert_relative_eq!(summary.final_state.x, 0.0, epsilon = 1e-6);
    }

    #[test]
    fn step_size_error_names_the_field() {
        let mut config = SweepConfig::with_mode(SweepMode::Dynamics);
        config.format = OutputFormat::Json;
        config.dynamics.dt = 10.0;
        let err = run_dynamics(&config).unwrap_err().to_string();
        assert!(err.contains("dynamics.dt"), "{err}");
    }
}
