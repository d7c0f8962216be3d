//! Named results, diagnostics records and long-format CSV output.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;

pub const CSV_HEADER: &str = "series,x,y";

/// How a scalar is judged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Bound {
    AtMost { tolerance: f64 },
    AtLeast { tolerance: f64 },
    /// `|value / target − 1| ≤ tolerance`.
    Near { target: f64, tolerance: f64 },
    /// Reported without a pass/fail verdict.
    Diagnostic,
}

impl Bound {
    pub fn with_tolerance(self, tol: f64) -> Self {
        match self {
            Bound::AtMost { .. } => Bound::AtMost { tolerance: tol },
            Bound::AtLeast { .. } => Bound::AtLeast { tolerance: tol },
            Bound::Near { target, .. } => Bound::Near { target, tolerance: tol },
            Bound::Diagnostic => Bound::Diagnostic,
        }
    }

    pub fn holds(&self, v: f64) -> bool {
        match *self {
            Bound::AtMost { tolerance } => v <= tolerance,
            Bound::AtLeast { tolerance } => v >= tolerance,
            Bound::Near { target, tolerance } => (v / target - 1.0).abs() <= tolerance,
            Bound::Diagnostic => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scalar {
    pub name: String,
    pub value: f64,
    pub bound: Bound,
    pub anchor: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

/// Collects the output of one experiment.
#[derive(Debug, Default)]
pub struct Outcome {
    pub scalars: Vec<Scalar>,
    pub series: Vec<Series>,
    /// Files written under `fields/`, relative names.
    pub fields: Vec<String>,
    overrides: BTreeMap<String, f64>,
}

impl Outcome {
    pub fn new(cfg: &ExperimentConfig) -> Self {
        Self { overrides: cfg.tolerances.clone(), ..Default::default() }
    }

    /// Records an asserted scalar; a configured override replaces the
    /// default tolerance.
    pub fn check(&mut self, name: &str, value: f64, bound: Bound, anchor: &str) {
        let bound = match self.overrides.get(name) {
            Some(&t) => bound.with_tolerance(t),
            None => bound,
        };
        let passed = !value.is_nan() && bound.holds(value);
        self.scalars.push(Scalar { name: name.into(), value, bound, anchor: anchor.into(), passed });
    }

    pub fn diagnostic(&mut self, name: &str, value: f64, anchor: &str) {
        self.check(name, value, Bound::Diagnostic, anchor);
    }

    pub fn series(&mut self, name: &str, points: Vec<(f64, f64)>) {
        self.series.push(Series { name: name.into(), points });
    }

    pub fn passed(&self) -> bool {
        self.scalars.iter().all(|s| s.passed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRef {
    pub name: String,
    pub file: String,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub experiment: String,
    pub criterion: u8,
    pub anchor: String,
    pub build: String,
    pub config: ExperimentConfig,
    pub scalars: Vec<Scalar>,
    pub series: Vec<SeriesRef>,
    pub fields: Vec<String>,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Record {
    pub fn scalar(&self, name: &str) -> Option<&Scalar> {
        self.scalars.iter().find(|s| s.name == name)
    }
}

/// Long-format CSV with the exact header `series,x,y`. Numbers use the
/// shortest round-trip exponent form, so identical values give identical
/// bytes.
pub fn csv_text(series: &[&Series]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for s in series {
        for (x, y) in &s.points {
            writeln!(out, "{},{:e},{:e}", s.name, x, y).unwrap();
        }
    }
    out
}

pub fn parse_csv(text: &str) -> Result<Vec<Series>, String> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(format!("header must be `{CSV_HEADER}`"));
    }
    let mut out: Vec<Series> = Vec::new();
    for (i, line) in lines.enumerate() {
        let mut parts = line.rsplitn(3, ',');
        let (y, x, name) = match (parts.next(), parts.next(), parts.next()) {
            (Some(y), Some(x), Some(n)) => (y, x, n),
            _ => return Err(format!("line {}: expected three fields", i + 2)),
        };
        let num = |s: &str| s.parse::<f64>().map_err(|e| format!("line {}: {e}", i + 2));
        let p = (num(x)?, num(y)?);
        match out.last_mut() {
            Some(s) if s.name == name => s.points.push(p),
            _ => out.push(Series { name: name.into(), points: vec![p] }),
        }
    }
    Ok(out)
}

/// Writes one CSV per series and returns the references.
pub fn write_series(dir: &Path, series: &[Series]) -> std::io::Result<Vec<SeriesRef>> {
    let mut refs = Vec::new();
    for s in series {
        let file = format!("{}.csv", s.name);
        std::fs::write(dir.join(&file), csv_text(&[s]))?;
        refs.push(SeriesRef { name: s.name.clone(), file, points: s.points.len() });
    }
    Ok(refs)
}

pub fn write_record(dir: &Path, record: &Record) -> std::io::Result<PathBuf> {
    let path = dir.join("record.json");
    let mut text = serde_json::to_string_pretty(record).map_err(std::io::Error::other)?;
    text.push('\n');
    std::fs::write(&path, text)?;
    Ok(path)
}

pub fn read_record(path: &Path) -> Result<Record, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// Merges the series referenced by a record into `plot.csv` next to it.
pub fn emit_plot_data(record_path: &Path) -> Result<PathBuf, String> {
    let record = read_record(record_path)?;
    let dir = record_path.parent().unwrap_or(Path::new("."));
    let mut all = Vec::new();
    for r in &record.series {
        let text = std::fs::read_to_string(dir.join(&r.file)).map_err(|e| format!("{}: {e}", r.file))?;
        let parsed = parse_csv(&text).map_err(|e| format!("{}: {e}", r.file))?;
        all.extend(parsed);
    }
    let out = dir.join("plot.csv");
    let refs: Vec<&Series> = all.iter().collect();
    std::fs::write(&out, csv_text(&refs)).map_err(|e| e.to_string())?;
    Ok(out)
}
