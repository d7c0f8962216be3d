//! Gauge experiments: the affine transform against composed infinitesimal
//! steps, and the smooth-ramp superposition.

use std::f64::consts::PI;
use std::path::Path;

use lpsim_core::fock::*;
use lpsim_core::gauge::*;
use lpsim_core::grid::GridSpec;
use lpsim_core::random::bandlimited_stream;
use lpsim_core::{Result, C64};

use super::*;
use crate::config::ExperimentConfig;
use crate::record::{Bound, Outcome};
use crate::registry::Experiment;

fn gauge_function(g: &GridSpec, seed: u64) -> GaugeFunction {
    GaugeFunction {
        theta: bandlimited_stream(g, 2, seed, 0).scaled(C64::new(0.3, 0.0)),
        theta_dot: bandlimited_stream(g, 2, seed, 1),
        theta_ddot: bandlimited_stream(g, 2, seed, 2),
    }
}

fn rel(a: &SectorState, b: &SectorState) -> f64 {
    a.sub(b).l2_norm() / b.l2_norm()
}

fn small_fock(c: &ExperimentConfig) -> std::result::Result<(), String> {
    require_sector(c, 1, 1)?;
    max_grid(c, 4)?;
    if c.physics.e <= 0.0 {
        return Err(format!("{} needs physics.e > 0", c.experiment));
    }
    Ok(())
}

// ---------------------------------------------------------------------------

const AFFINE_ANCHOR: &str = "the finite affine gauge transform is the limit of composed infinitesimal transforms";

/// Step counts of the composition scan.
const KS: [usize; 3] = [8, 16, 32];

pub static AFFINE_GAUGE: Experiment = Experiment {
    id: "affine_gauge",
    criterion: 11,
    anchor: AFFINE_ANCHOR,
    checks: &["composition_slope", "constant_phase_error", "symmetry_defect"],
    defaults: || {
        let mut c = base("affine_gauge");
        c.grid.n = 4;
        c.physics.e = 0.5;
        c
    },
    validate: small_fock,
    memory: |c| 4 * sector_bytes(c, c.grid.n, Representation::A),
    run: run_affine_gauge,
};

fn run_affine_gauge(cfg: &ExperimentConfig, fields: &Path) -> Result<Outcome> {
    let g = grid(cfg)?;
    let e = cfg.physics.e;
    let mut out = Outcome::new(cfg);
    let st = SectorState::random(SectorShape::new(g, 1, 1, Representation::A), 2, cfg.seed());
    let gf = gauge_function(&g, cfg.seed() + 1);
    gf.save(&fields.join("gauge_function.bin"))?;
    out.fields.push("fields/gauge_function.bin".into());

    let finite = affine_gauge_transform_finite(&st, &gf, e)?;
    let mut scan = Vec::new();
    for &k in &KS {
        let mut s = st.clone();
        for _ in 0..k {
            s = affine_gauge_infinitesimal(&s, &gf, e, k)?;
        }
        scan.push((k as f64, rel(&s, &finite)));
    }
    let slopes: Vec<f64> = scan.windows(2).map(|w| log2_ratio(w[0].1, w[1].1)).collect();
    let slope = slopes.iter().sum::<f64>() / slopes.len() as f64;
    out.check("composition_slope", slope, Bound::Near { target: 1.0, tolerance: 0.15 }, AFFINE_ANCHOR);
    out.series("composition_error", scan);

    let c = C64::new(0.37, 0.0);
    let phase = affine_gauge_transform_finite(&st, &GaugeFunction::constant(g, c), e)?;
    out.check(
        "constant_phase_error",
        rel(&phase, &st.scaled((C64::i() * c).exp())),
        Bound::AtMost { tolerance: 1e-12 },
        "a constant gauge function multiplies the state by a global phase",
    );

    let mut defect = 0.0f64;
    for (m, n) in [(2, 0), (0, 2)] {
        let s = symmetrize(&SectorState::random(SectorShape::new(g, m, n, Representation::A), 2, cfg.seed() + 2));
        let t = affine_gauge_transform_finite(&s, &gf, e)?;
        defect = defect.max(rel(&symmetrize(&t), &t));
    }
    out.check(
        "symmetry_defect",
        defect,
        Bound::AtMost { tolerance: 1e-12 },
        "the transform keeps electron antisymmetry and photon symmetry",
    );
    Ok(out)
}

// ---------------------------------------------------------------------------

const RAMP_ANCHOR: &str = "an equal superposition with a ramped gauge copy equals the state before the ramp and vanishes after it";

pub static RAMP_SUPERPOSITION: Experiment = Experiment {
    id: "ramp_superposition",
    criterion: 12,
    anchor: RAMP_ANCHOR,
    checks: &["before_ramp_error", "after_ramp_norm", "midpoint_norm_error"],
    defaults: || {
        let mut c = base("ramp_superposition");
        c.grid.n = 4;
        c.physics.e = 0.5;
        c
    },
    validate: small_fock,
    memory: |c| 4 * sector_bytes(c, c.grid.n, Representation::A),
    run: run_ramp_superposition,
};

fn run_ramp_superposition(cfg: &ExperimentConfig, _: &Path) -> Result<Outcome> {
    let g = grid(cfg)?;
    let e = cfg.physics.e;
    let mut out = Outcome::new(cfg);
    let st = SectorState::random(SectorShape::new(g, 1, 1, Representation::A), 2, cfg.seed());
    let ramp = |reading, t| ramp_superposition_state(&st, reading, t, e);

    let mut before = 0.0f64;
    for t in [-1.0, -0.5, 0.0] {
        before = before.max(rel(&ramp(RampReading::Phase, t)?, &st));
    }
    let mut after = 0.0f64;
    for t in [1.0, 1.5, 2.0] {
        after = after.max(ramp(RampReading::Phase, t)?.l2_norm() / st.l2_norm());
    }
    out.check("before_ramp_error", before, Bound::AtMost { tolerance: 1e-12 }, RAMP_ANCHOR);
    out.check("after_ramp_norm", after, Bound::AtMost { tolerance: 1e-12 }, RAMP_ANCHOR);

    // The F representation carries no photon gauge terms: the midpoint is
    // |cos(π/4)| times the state.
    let f = SectorState::random(SectorShape::new(g, 1, 1, Representation::F), 2, cfg.seed());
    let mid = ramp_superposition_state(&f, RampReading::Phase, 0.5, e)?.l2_norm() / f.l2_norm();
    out.check(
        "midpoint_norm_error",
        (mid - (PI / 4.0).cos()).abs(),
        Bound::AtMost { tolerance: 1e-12 },
        "halfway through the ramp the two copies differ by a quarter turn",
    );

    let literal_after = ramp(RampReading::Literal, 1.5)?.l2_norm() / st.l2_norm();
    out.diagnostic("literal_after_ramp_norm", literal_after, "under the literal reading the state does not vanish after the ramp");
    let agree = if (literal_after - after).abs() <= 1e-12 { 1.0 } else { 0.0 };
    out.diagnostic("readings_agree", agree, "1 if the phase and literal readings give the same late-time state");

    let mut phase_curve = Vec::new();
    let mut literal_curve = Vec::new();
    for k in 0..=30 {
        let t = -0.25 + 0.05 * k as f64;
        phase_curve.push((t, ramp_superposition_state(&f, RampReading::Phase, t, e)?.l2_norm() / f.l2_norm()));
        literal_curve.push((t, ramp_superposition_state(&f, RampReading::Literal, t, e)?.l2_norm() / f.l2_norm()));
    }
    out.series("norm_phase_reading", phase_curve);
    out.series("norm_literal_reading", literal_curve);
    Ok(out)
}
