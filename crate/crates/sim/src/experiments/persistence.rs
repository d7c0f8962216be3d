//! Determinism of re-runs and lossless field containers.

use std::path::Path;

use lpsim_core::container;
use lpsim_core::dirac::PropagatorSlab;
use lpsim_core::fock::*;
use lpsim_core::gauge::GaugeFunction;
use lpsim_core::maxwell::*;
use lpsim_core::random::{bandlimited_stream, complex_field};
use lpsim_core::Result;

use super::*;
use crate::config::ExperimentConfig;
use crate::record::{csv_text, Bound, Outcome};
use crate::registry::{Experiment, EXPERIMENTS};

const ANCHOR: &str = "identical configurations reproduce every result bit for bit and containers round-trip losslessly";

pub static DETERMINISM: Experiment = Experiment {
    id: "determinism",
    criterion: 14,
    anchor: ANCHOR,
    checks: &["rerun_mismatches", "container_mismatches"],
    defaults: || {
        let mut c = base("determinism");
        c.grid.n = 4;
        c
    },
    validate: |c| max_grid(c, 8),
    memory: |c| 8 * sector_bytes(c, c.grid.n, Representation::A) + field_bytes(16, 256),
    run: run_determinism,
};

/// Bit pattern of everything an experiment reports.
fn fingerprint(exp: &Experiment, fields: &Path) -> Result<(Vec<u64>, String, Vec<Vec<u8>>)> {
    let mut cfg = (exp.defaults)();
    cfg.tolerances.clear();
    let out = (exp.run)(&cfg, fields)?;
    let bits = out.scalars.iter().map(|s| s.value.to_bits()).collect();
    let csv = csv_text(&out.series.iter().collect::<Vec<_>>());
    let files = out
        .fields
        .iter()
        .map(|f| std::fs::read(fields.join(f.trim_start_matches("fields/"))))
        .collect::<std::io::Result<Vec<_>>>()?;
    Ok((bits, csv, files))
}

fn run_determinism(cfg: &ExperimentConfig, fields: &Path) -> Result<Outcome> {
    let mut out = Outcome::new(cfg);
    let scratch = fields.join("rerun");
    let mut mismatches = 0usize;
    let mut per = Vec::new();
    for (i, exp) in EXPERIMENTS.iter().filter(|e| e.id != DETERMINISM.id).enumerate() {
        let id = exp.id;
        let a = scratch.join(format!("{id}_a"));
        let b = scratch.join(format!("{id}_b"));
        std::fs::create_dir_all(&a)?;
        std::fs::create_dir_all(&b)?;
        let same = fingerprint(exp, &a)? == fingerprint(exp, &b)?;
        mismatches += usize::from(!same);
        per.push((i as f64, if same { 0.0 } else { 1.0 }));
    }
    std::fs::remove_dir_all(&scratch)?;
    out.check("rerun_mismatches", mismatches as f64, Bound::AtMost { tolerance: 0.0 }, ANCHOR);
    out.series("rerun_mismatch", per);

    let g = grid(cfg)?;
    let mut bad = 0usize;
    let f = random_constrained_f(&g, 2, cfg.seed(), 0);
    f.save(&fields.join("photon_f.bin"))?;
    bad += usize::from(PhotonF::load(&fields.join("photon_f.bin"))? != f);
    let a = random_lorenz_positive(&g, 2, cfg.seed(), 1);
    a.save(&fields.join("photon_a.bin"))?;
    bad += usize::from(PhotonA::load(&fields.join("photon_a.bin"))? != a);
    for (name, rep) in [("sector_f", Representation::F), ("sector_a", Representation::A)] {
        let st = SectorState::random(SectorShape::new(g, 1, 1, rep), 2, cfg.seed());
        st.save(&fields.join(name))?;
        bad += usize::from(SectorState::load(&fields.join(name))? != st);
        out.fields.push(format!("fields/{name}"));
    }
    let gf = GaugeFunction {
        theta: bandlimited_stream(&g, 2, cfg.seed(), 5),
        theta_dot: bandlimited_stream(&g, 2, cfg.seed(), 6),
        theta_ddot: bandlimited_stream(&g, 2, cfg.seed(), 7),
    };
    gf.save(&fields.join("gauge.bin"))?;
    bad += usize::from(GaugeFunction::load(&fields.join("gauge.bin"))? != gf);
    let slab = PropagatorSlab::build(&g, cfg.physics.mass, cfg.sigma(), &[0.0, 0.25, 0.5])?;
    slab.save(&fields.join("slab.bin"))?;
    bad += usize::from(PropagatorSlab::load(&fields.join("slab.bin"))? != slab);
    let raw = complex_field(&g, cfg.seed(), 9);
    container::write_fields(&fields.join("raw.bin"), "raw", &[&raw])?;
    let (_, back) = container::read_fields(&fields.join("raw.bin"), "raw")?;
    bad += usize::from(back.len() != 1 || back[0] != raw);
    out.fields.extend(["photon_f.bin", "photon_a.bin", "gauge.bin", "slab.bin", "raw.bin"].map(|f| format!("fields/{f}")));
    out.check("container_mismatches", bad as f64, Bound::AtMost { tolerance: 0.0 }, ANCHOR);
    Ok(out)
}
