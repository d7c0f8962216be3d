//! The experiment table: one experiment per acceptance criterion.

use std::path::Path;

use crate::config::ExperimentConfig;
use crate::experiments::{fields, fock, gauge, multitime, persistence};
use crate::record::Outcome;

pub struct Experiment {
    pub id: &'static str,
    /// Acceptance criterion this experiment settles.
    pub criterion: u8,
    /// Short statement of the property being checked.
    pub anchor: &'static str,
    /// Names of the asserted scalars; tolerance overrides must use these.
    pub checks: &'static [&'static str],
    pub defaults: fn() -> ExperimentConfig,
    /// Experiment-specific schema on top of the shared checks.
    pub validate: fn(&ExperimentConfig) -> Result<(), String>,
    /// Peak memory estimate in bytes.
    pub memory: fn(&ExperimentConfig) -> u128,
    /// Runs the experiment; field files go to the given directory.
    pub run: fn(&ExperimentConfig, &Path) -> lpsim_core::Result<Outcome>,
}

pub static EXPERIMENTS: [&Experiment; 14] = [
    &fields::IP_EQUIVALENCE,
    &fields::FACTOR_EIGHT,
    &fields::GAUGE_INVARIANCE,
    &fock::SLICE_INDEPENDENCE,
    &fields::LP_CONSTRAINT,
    &fields::COULOMB_BIJECTION,
    &fields::DELTA_COVARIANCE,
    &fock::HAMILTONIAN_STRUCTURE,
    &fock::SECTOR_CONSTRAINTS,
    &multitime::EXTERNAL_SOURCE,
    &gauge::AFFINE_GAUGE,
    &gauge::RAMP_SUPERPOSITION,
    &multitime::TWO_TIME_CONSISTENCY,
    &persistence::DETERMINISM,
];

pub fn find(id: &str) -> Option<&'static Experiment> {
    EXPERIMENTS.iter().copied().find(|e| e.id == id)
}

/// `id  criterion  anchor` lines for `lp-sim list`.
pub fn table() -> String {
    let width = EXPERIMENTS.iter().map(|e| e.id.len()).max().unwrap_or(0);
    EXPERIMENTS
        .iter()
        .map(|e| format!("{:<width$}  {:>2}  {}\n", e.id, e.criterion, e.anchor))
        .collect()
}
