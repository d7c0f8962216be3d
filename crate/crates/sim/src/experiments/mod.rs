//! Experiment implementations grouped by module of the core.

pub mod fields;
pub mod fock;
pub mod gauge;
pub mod multitime;
pub mod persistence;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;

use lpsim_core::dirac::SpinorField;
use lpsim_core::fock::{Representation, SectorShape};
use lpsim_core::grid::{GridSpec, ScalarField};
use lpsim_core::random::bandlimited_stream;
use lpsim_core::C64;

use crate::config::*;

/// Defaults shared by every experiment; each one adjusts what it needs.
pub(crate) fn base(id: &str) -> ExperimentConfig {
    ExperimentConfig {
        experiment: id.into(),
        seeds: vec![7],
        output_dir: PathBuf::from("results"),
        grid: GridConfig { n: 16, length: 2.0 * PI },
        physics: PhysicsConfig { e: 0.1, mass: 1.0 },
        regulator: RegulatorConfig { sigma_cells: 2.0 },
        integrator: IntegratorConfig { dt: 0.05, steps: 20 },
        sector: SectorConfig { m: 1, n_max: 1 },
        tolerances: BTreeMap::new(),
    }
}

pub(crate) fn grid(cfg: &ExperimentConfig) -> lpsim_core::Result<GridSpec> {
    GridSpec::new(cfg.grid.n, cfg.grid.length)
}

pub(crate) fn any(_: &ExperimentConfig) -> Result<(), String> {
    Ok(())
}

pub(crate) fn require_sector(cfg: &ExperimentConfig, m: usize, n_max: usize) -> Result<(), String> {
    if cfg.sector.m != m || cfg.sector.n_max != n_max {
        return Err(format!(
            "{} needs sector m = {m}, n_max = {n_max}, got m = {}, n_max = {}",
            cfg.experiment, cfg.sector.m, cfg.sector.n_max
        ));
    }
    Ok(())
}

pub(crate) fn max_grid(cfg: &ExperimentConfig, n: usize) -> Result<(), String> {
    if cfg.grid.n > n {
        return Err(format!("{} supports grid.n up to {n}, got {}", cfg.experiment, cfg.grid.n));
    }
    Ok(())
}

/// Bytes for `fields` complex scalar fields on an `n`³ grid.
pub(crate) fn field_bytes(n: usize, fields: usize) -> u128 {
    (n as u128).pow(3) * fields as u128 * 16
}

pub(crate) fn sector_bytes(cfg: &ExperimentConfig, n: usize, rep: Representation) -> u128 {
    let g = GridSpec { n, length: cfg.grid.length };
    SectorShape::new(g, cfg.sector.m, cfg.sector.n_max, rep).memory_estimate()
}

pub(crate) fn spinor(g: &GridSpec, cutoff: i64, seed: u64, mass: f64) -> SpinorField {
    let c: Vec<ScalarField> = (0..4).map(|s| bandlimited_stream(g, cutoff, seed, s)).collect();
    SpinorField { c: c.try_into().expect("four components"), mass, charge: 1.0 }
}

pub(crate) fn rel_diff(a: C64, b: C64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

/// `(x, log₂ y)` slope between two points.
pub(crate) fn log2_ratio(a: f64, b: f64) -> f64 {
    (a / b).log2()
}
