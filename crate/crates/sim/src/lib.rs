//! Experiment runner for the lattice multi-time simulator: configuration,
//! the experiment registry, diagnostics records and CSV output.

pub mod config;
pub mod experiments;
pub mod record;
pub mod registry;

use std::path::{Path, PathBuf};

use lpsim_core::fock::DEFAULT_MEMORY_BUDGET;

use config::ExperimentConfig;
use record::Record;
use registry::Experiment;

/// Build tag from `git describe`, fixed at compile time.
pub const BUILD_TAG: &str = env!("LP_SIM_BUILD_TAG");

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_SCHEMA: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("schema: {0}")]
    Schema(String),
    #[error("resource guard: estimated {needed} bytes exceeds budget {budget} bytes")]
    Resource { needed: u128, budget: u128 },
    #[error(transparent)]
    Core(lpsim_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<lpsim_core::Error> for RunError {
    fn from(e: lpsim_core::Error) -> Self {
        match e {
            lpsim_core::Error::Memory { needed, budget } => RunError::Resource { needed, budget },
            other => RunError::Core(other),
        }
    }
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Schema(_) => EXIT_SCHEMA,
            RunError::Resource { .. } => EXIT_RESOURCE,
            RunError::Core(_) | RunError::Io(_) => EXIT_CHECK_FAILED,
        }
    }
}

/// Memory budget in bytes: `LP_SIM_MEMORY_BUDGET` if set, else the core
/// default.
pub fn memory_budget() -> u128 {
    std::env::var("LP_SIM_MEMORY_BUDGET").ok().and_then(|v| v.parse().ok()).unwrap_or(DEFAULT_MEMORY_BUDGET)
}

pub fn output_dir(cfg: &ExperimentConfig) -> PathBuf {
    cfg.output_dir.join(&cfg.experiment)
}

/// Runs a validated config: guards memory, executes the experiment and
/// writes `record.json`, one CSV per series and `fields/`.
pub fn run_config(cfg: &ExperimentConfig, exp: &Experiment) -> Result<Record, RunError> {
    let needed = (exp.memory)(cfg);
    let budget = memory_budget();
    if needed > budget {
        return Err(RunError::Resource { needed, budget });
    }
    let dir = output_dir(cfg);
    let fields = dir.join("fields");
    std::fs::create_dir_all(&fields)?;
    log::info!("running {} into {}", exp.id, dir.display());
    let (outcome, error) = match (exp.run)(cfg, &fields) {
        Ok(o) => (o, None),
        Err(e) => {
            let e = RunError::from(e);
            if e.exit_code() != EXIT_CHECK_FAILED {
                return Err(e);
            }
            (record::Outcome::new(cfg), Some(e.to_string()))
        }
    };
    let series = record::write_series(&dir, &outcome.series)?;
    let record = Record {
        experiment: exp.id.into(),
        criterion: exp.criterion,
        anchor: exp.anchor.into(),
        build: BUILD_TAG.into(),
        config: cfg.clone(),
        passed: error.is_none() && outcome.passed(),
        scalars: outcome.scalars,
        series,
        fields: outcome.fields,
        error,
    };
    record::write_record(&dir, &record)?;
    Ok(record)
}

/// Loads, validates and runs one config file. Returns the exit code and the
/// record when one was written.
pub fn run_path(path: &Path) -> (i32, Option<Record>) {
    let result = config::load(path).and_then(|(cfg, exp)| run_config(&cfg, exp));
    match result {
        Ok(r) => (if r.passed { EXIT_PASS } else { EXIT_CHECK_FAILED }, Some(r)),
        Err(e) => {
            log::error!("{}: {e}", path.display());
            (e.exit_code(), None)
        }
    }
}

/// Caps the global worker pool at `LP_SIM_THREADS` when set.
pub fn init_thread_pool() {
    if let Some(n) = std::env::var("LP_SIM_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            log::warn!("thread pool already initialized: {e}");
        }
    }
}
