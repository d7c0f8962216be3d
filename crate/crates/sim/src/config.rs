//! Experiment configuration: TOML with flat sections, overlaid on the
//! defaults of the named experiment.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::registry::{self, Experiment};
use crate::RunError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsConfig {
    /// Coupling `e_x`.
    pub e: f64,
    /// Electron mass `m_x`.
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegulatorConfig {
    /// Smearing width in grid spacings.
    pub sigma_cells: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectorConfig {
    pub m: usize,
    pub n_max: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    pub grid: GridConfig,
    pub physics: PhysicsConfig,
    pub regulator: RegulatorConfig,
    pub integrator: IntegratorConfig,
    pub sector: SectorConfig,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

impl ExperimentConfig {
    pub fn spacing(&self) -> f64 {
        self.grid.length / self.grid.n as f64
    }

    pub fn sigma(&self) -> f64 {
        self.regulator.sigma_cells * self.spacing()
    }

    pub fn seed(&self) -> u64 {
        self.seeds[0]
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

fn merge(base: &mut toml::Value, over: toml::Value) {
    match (base, over) {
        (toml::Value::Table(b), toml::Value::Table(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_table() && v.is_table() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, o) => *b = o,
    }
}

/// Parses config text: the `experiment` key selects the defaults, every
/// other key overrides them. Unknown keys and ids are schema errors.
pub fn parse(text: &str) -> Result<(ExperimentConfig, &'static Experiment), RunError> {
    let user: toml::Value = text.parse().map_err(|e: toml::de::Error| RunError::Schema(e.to_string()))?;
    let id = user
        .get("experiment")
        .and_then(|v| v.as_str())
        .ok_or_else(|| RunError::Schema("missing string key `experiment`".into()))?;
    let exp = registry::find(id).ok_or_else(|| RunError::Schema(format!("unknown experiment id `{id}`")))?;
    let mut merged = toml::Value::try_from((exp.defaults)()).expect("defaults serialize");
    merge(&mut merged, user);
    let cfg: ExperimentConfig = merged.try_into().map_err(|e: toml::de::Error| RunError::Schema(e.to_string()))?;
    validate(&cfg, exp)?;
    Ok((cfg, exp))
}

pub fn load(path: &Path) -> Result<(ExperimentConfig, &'static Experiment), RunError> {
    let text = std::fs::read_to_string(path).map_err(|e| RunError::Schema(format!("{}: {e}", path.display())))?;
    parse(&text)
}

fn positive(name: &str, v: f64) -> Result<(), RunError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(RunError::Schema(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Checks shared by all experiments, then the experiment's own schema.
pub fn validate(cfg: &ExperimentConfig, exp: &Experiment) -> Result<(), RunError> {
    let schema = |m: String| Err(RunError::Schema(m));
    if cfg.seeds.is_empty() {
        return schema("seeds must not be empty".into());
    }
    if cfg.grid.n < 4 || cfg.grid.n > 128 || cfg.grid.n % 2 != 0 {
        return schema(format!("grid.n must be even and in [4, 128], got {}", cfg.grid.n));
    }
    positive("grid.length", cfg.grid.length)?;
    positive("physics.mass", cfg.physics.mass)?;
    if !cfg.physics.e.is_finite() || cfg.physics.e < 0.0 {
        return schema(format!("physics.e must be non-negative, got {}", cfg.physics.e));
    }
    if !(cfg.regulator.sigma_cells >= 2.0) || !cfg.regulator.sigma_cells.is_finite() {
        return schema(format!("regulator.sigma_cells must be at least 2, got {}", cfg.regulator.sigma_cells));
    }
    positive("integrator.dt", cfg.integrator.dt)?;
    if cfg.integrator.dt > cfg.spacing() / 4.0 * (1.0 + 1e-12) {
        return schema(format!("integrator.dt {} exceeds spacing/4 = {}", cfg.integrator.dt, cfg.spacing() / 4.0));
    }
    if cfg.integrator.steps == 0 {
        return schema("integrator.steps must be at least 1".into());
    }
    for (name, tol) in &cfg.tolerances {
        if !exp.checks.contains(&name.as_str()) {
            return schema(format!("unknown tolerance `{name}` for {}; expected one of {:?}", exp.id, exp.checks));
        }
        positive(&format!("tolerances.{name}"), *tol)?;
    }
    (exp.validate)(cfg).map_err(RunError::Schema)
}
