//! File emission: CSV data files, JSON documents, and metadata sidecars.
//!
//! Floats are written with Rust's shortest round-trip formatting, so files
//! are byte-reproducible and parse back to the exact computed values.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use super::runners::MapGrid;
use super::SweepConfig;
use crate::dynamics::TwoAtomState;
use crate::error::Result;

/// Provenance record attached to every run: the effective configuration
/// (which re-parses into an equivalent `SweepConfig`), the crate version,
/// the run time, and a mode-specific summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunMetadata {
    pub config: SweepConfig,
    pub version: String,
    pub timestamp_unix: u64,
    pub summary: Value,
}

pub fn metadata(config: &SweepConfig, summary: Value) -> RunMetadata {
    RunMetadata {
        config: config.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        summary,
    }
}

/// `maps.csv` + `LL` → `maps_LL.csv`; used when one run emits several files.
pub fn suffixed_path(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let name = match out.extension().and_then(|s| s.to_str()) {
        Some(ext) => format!("{stem}_{suffix}.{ext}"),
        None => format!("{stem}_{suffix}"),
    };
    out.with_file_name(name)
}

/// `maps.csv` → `maps.csv.meta.json`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out
        .file_name()
        .map(|s| s.to_os_string())
        .unwrap_or_else(|| "out".into());
    name.push(".meta.json");
    out.with_file_name(name)
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    ensure_parent(path)?;
    Ok(BufWriter::new(File::create(path)?))
}

pub fn write_sidecar(out: &Path, meta: &RunMetadata) -> Result<PathBuf> {
    let path = sidecar_path(out);
    let mut w = create(&path)?;
    serde_json::to_writer_pretty(&mut w, meta)?;
    writeln!(w)?;
    Ok(path)
}

/// Grid CSV: header `alpha1,alpha2,value`, row-major over (α₁, α₂).
pub fn write_map_csv(path: &Path, alpha1: &[f64], alpha2: &[f64], values: &[f64]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "alpha1,alpha2,value")?;
    for (i, &a1) in alpha1.iter().enumerate() {
        for (j, &a2) in alpha2.iter().enumerate() {
            writeln!(w, "{a1},{a2},{}", values[i * alpha2.len() + j])?;
        }
    }
    Ok(())
}

/// Trajectory CSV: header `t,x,y,z`, one row per step, and a final comment
/// line annotating the steady-state residual at the last state.
pub fn write_trajectory_csv(
    path: &Path,
    trajectory: &[(f64, TwoAtomState)],
    residual: f64,
) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "t,x,y,z")?;
    for &(t, s) in trajectory {
        writeln!(w, "{t},{},{},{}", s.x, s.y, s.z)?;
    }
    writeln!(w, "# steady_state_residual,{residual}")?;
    Ok(())
}

/// Fringe-profile CSV: header `delta,value`.
pub fn write_profile_csv(path: &Path, deltas: &[f64], values: &[f64]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "delta,value")?;
    for (&d, &v) in deltas.iter().zip(values) {
        writeln!(w, "{d},{v}")?;
    }
    Ok(())
}

/// Pretty JSON to a file, or to stdout when no path is given.
pub fn write_json_value(out: Option<&Path>, value: &Value) -> Result<()> {
    match out {
        Some(path) => {
            let mut w = create(path)?;
            serde_json::to_writer_pretty(&mut w, value)?;
            writeln!(w)?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            serde_json::to_writer_pretty(&mut stdout, value)?;
            writeln!(stdout)?;
        }
    }
    Ok(())
}

/// Grid values as a JSON array of rows (one row per α₁ point).
pub fn nested_rows(grid: &MapGrid) -> Value {
    let n2 = grid.alpha2.len();
    let rows: Vec<Value> = grid
        .values
        .chunks(n2)
        .map(|row| Value::from(row.to_vec()))
        .collect();
    Value::from(rows)
}
