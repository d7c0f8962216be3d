//! Sector-state experiments: conservation of the photon and full products,
//! Hamiltonian structure and constraint growth under RK4.

use std::path::Path;

use lpsim_core::dirac::free_dirac_evolve;
use lpsim_core::fock::*;
use lpsim_core::grid::GridSpec;
use lpsim_core::maxwell::*;
use lpsim_core::Result;

use super::*;
use crate::config::ExperimentConfig;
use crate::record::{Bound, Outcome};
use crate::registry::Experiment;

fn shape(cfg: &ExperimentConfig, g: GridSpec) -> SectorShape {
    SectorShape::new(g, cfg.sector.m, cfg.sector.n_max, Representation::F)
}

fn params(cfg: &ExperimentConfig, e: f64, dt: f64) -> HamiltonianParams {
    HamiltonianParams::new(e, cfg.physics.mass, cfg.sigma(), dt)
}

fn self_product(s: &SectorState) -> Result<f64> {
    Ok(full_scalar_product(s, s)?.re)
}

// ---------------------------------------------------------------------------

const SLICE_ANCHOR: &str = "the photon product and the full scalar product do not depend on the time slice";

/// Ratio between the coarse interacting step and `integrator.dt`.
const COARSE: usize = 20;

pub static SLICE_INDEPENDENCE: Experiment = Experiment {
    id: "slice_independence",
    criterion: 4,
    anchor: SLICE_ANCHOR,
    checks: &["photon_product_drift", "free_full_product_drift", "interacting_drift_ratio"],
    defaults: || {
        let mut c = base("slice_independence");
        c.grid.n = 4;
        c.integrator = crate::config::IntegratorConfig { dt: 0.005, steps: 200 };
        c
    },
    validate: |c| {
        require_sector(c, 1, 1)?;
        max_grid(c, 8)?;
        if c.integrator.steps % (2 * COARSE) != 0 {
            return Err(format!("slice_independence needs integrator.steps divisible by {}", 2 * COARSE));
        }
        if COARSE as f64 * c.integrator.dt > c.spacing() / 4.0 {
            return Err(format!("coarse interacting step {}·dt exceeds spacing/4", COARSE));
        }
        Ok(())
    },
    memory: |c| sector_bytes(c, c.grid.n, Representation::F) + field_bytes(4 * c.grid.n, 48),
    run: run_slice_independence,
};

fn run_slice_independence(cfg: &ExperimentConfig, _: &Path) -> Result<Outcome> {
    let g = grid(cfg)?;
    let mut out = Outcome::new(cfg);
    let (dt, steps) = (cfg.integrator.dt, cfg.integrator.steps);
    let span = dt * steps as f64;

    // Photon product under exact free evolution, on a grid refined 4×.
    let gp = GridSpec::new(4 * cfg.grid.n, cfg.grid.length)?;
    let f = random_positive_energy_f(&gp, (gp.n / 4) as i64, cfg.seed(), 0);
    let h = random_positive_energy_f(&gp, (gp.n / 4) as i64, cfg.seed(), 1);
    let p0 = photon_ip_f(&f, &h)?;
    let mut photon = Vec::new();
    for k in 0..=10 {
        let t = span * k as f64 / 10.0;
        let pt = photon_ip_f(&free_maxwell_evolve(&f, t), &free_maxwell_evolve(&h, t))?;
        photon.push((t, (pt - p0).norm() / p0.norm()));
    }
    let worst = photon.iter().map(|p| p.1).fold(0.0, f64::max);
    out.check("photon_product_drift", worst, Bound::AtMost { tolerance: 1e-10 }, SLICE_ANCHOR);
    out.series("photon_product_drift", photon);

    // Full product at e = 0 over `steps` RK4 steps.
    let sh = shape(cfg, g);
    let psi0 = project_transverse(&SectorState::random(sh, 2, cfg.seed()))?;
    let n0 = self_product(&psi0)?;
    let free = params(cfg, 0.0, dt);
    let mut psi = psi0.clone();
    let mut drift = vec![(0.0, 0.0)];
    for chunk in 0..steps / 10 {
        psi = evolve(&psi, &free, 10)?;
        drift.push(((chunk + 1) as f64 * 10.0 * dt, (self_product(&psi)? - n0).abs() / n0));
    }
    let worst = drift.iter().map(|p| p.1).fold(0.0, f64::max);
    out.check("free_full_product_drift", worst, Bound::AtMost { tolerance: 1e-10 }, SLICE_ANCHOR);
    out.series("free_full_product_drift", drift);

    // Interacting drift over the same span at two step sizes.
    let e = cfg.physics.e;
    let coarse = COARSE as f64 * dt;
    let run = |step: f64, count: usize| -> Result<f64> {
        let out = evolve(&psi0, &params(cfg, e, step), count)?;
        Ok((self_product(&out)? - n0).abs() / n0)
    };
    let d1 = run(coarse, steps / COARSE)?;
    let d2 = run(coarse / 2.0, 2 * steps / COARSE)?;
    out.diagnostic("interacting_drift_coarse", d1, SLICE_ANCHOR);
    out.diagnostic("interacting_drift_fine", d2, SLICE_ANCHOR);
    out.diagnostic("interacting_c_coarse", d1 / coarse.powi(4), "drift divided by dt⁴");
    out.diagnostic("interacting_c_fine", d2 / (coarse / 2.0).powi(4), "drift divided by dt⁴");
    out.check(
        "interacting_drift_ratio",
        d1 / d2,
        Bound::Near { target: 16.0, tolerance: 0.3 },
        "interacting product drift scales like dt⁴ under halving",
    );
    out.series("interacting_drift", vec![(coarse, d1), (coarse / 2.0, d2)]);
    Ok(out)
}

// ---------------------------------------------------------------------------

const DECOUPLING_ANCHOR: &str = "at zero coupling every sector evolves with the free Dirac and Maxwell propagators";
const ADJOINT_ANCHOR: &str = "photon creation and annihilation are adjoint to each other in the full scalar product";

pub static HAMILTONIAN_STRUCTURE: Experiment = Experiment {
    id: "hamiltonian_structure",
    criterion: 8,
    anchor: DECOUPLING_ANCHOR,
    checks: &["decoupling_error", "decoupling_order_ratio", "adjointness_defect"],
    defaults: || {
        let mut c = base("hamiltonian_structure");
        c.grid.n = 8;
        c.physics.e = 0.5;
        c.integrator = crate::config::IntegratorConfig { dt: 0.05, steps: 20 };
        c
    },
    validate: |c| {
        require_sector(c, 1, 1)?;
        max_grid(c, 8)?;
        if c.integrator.steps % 2 != 0 {
            return Err("hamiltonian_structure needs an even integrator.steps for the 2·dt run".into());
        }
        if 2.0 * c.integrator.dt > c.spacing() / 4.0 {
            return Err("hamiltonian_structure also runs at 2·dt, which must not exceed spacing/4".into());
        }
        if c.physics.e == 0.0 {
            return Err("hamiltonian_structure needs physics.e > 0 for the adjointness check".into());
        }
        Ok(())
    },
    memory: |c| sector_bytes(c, c.grid.n, Representation::F),
    run: run_hamiltonian_structure,
};

fn run_hamiltonian_structure(cfg: &ExperimentConfig, _: &Path) -> Result<Outcome> {
    let g = grid(cfg)?;
    let sh = shape(cfg, g);
    let mut out = Outcome::new(cfg);
    let (dt, steps) = (cfg.integrator.dt, cfg.integrator.steps);
    let t = dt * steps as f64;

    let psi = spinor(&g, 2, cfg.seed(), cfg.physics.mass);
    let f = random_constrained_f(&g, 2, cfg.seed(), 0);
    let st = SectorState::product_f(sh, &[&psi], &[])?.add(&SectorState::product_f(sh, &[&psi], &[&f])?);
    let psi_t = free_dirac_evolve(&psi, t);
    let exact = SectorState::product_f(sh, &[&psi_t], &[])?
        .add(&SectorState::product_f(sh, &[&psi_t], &[&free_maxwell_evolve(&f, t)])?);
    let err = |step: f64, count: usize| -> Result<f64> {
        Ok(evolve(&st, &params(cfg, 0.0, step), count)?.sub(&exact).l2_norm() / exact.l2_norm())
    };
    let e2 = err(2.0 * dt, steps / 2)?;
    let e1 = err(dt, steps)?;
    out.check("decoupling_error", e1, Bound::AtMost { tolerance: 1e-4 }, DECOUPLING_ANCHOR);
    out.check("decoupling_order_ratio", e2 / e1, Bound::Near { target: 16.0, tolerance: 0.3 }, DECOUPLING_ANCHOR);
    out.series("decoupling_error", vec![(2.0 * dt, e2), (dt, e1)]);

    let p = params(cfg, cfg.physics.e, dt);
    let p0 = params(cfg, 0.0, dt);
    let a = project_transverse(&SectorState::random(sh, 2, cfg.seed() + 1))?;
    let b = project_transverse(&SectorState::random(sh, 2, cfg.seed() + 2))?;
    let coupling = |s: &SectorState| -> Result<SectorState> {
        Ok(lp_hamiltonian_apply(s, &p)?.sub(&lp_hamiltonian_apply(s, &p0)?))
    };
    let l = full_scalar_product(&a, &coupling(&b)?)?;
    let r = full_scalar_product(&coupling(&a)?, &b)?;
    out.check("adjointness_defect", rel_diff(l, r), Bound::AtMost { tolerance: 1e-8 }, ADJOINT_ANCHOR);
    out.diagnostic("coupling_matrix_element", l.norm(), "the coupling between the test states is not trivially zero");
    Ok(out)
}

// ---------------------------------------------------------------------------

const CONSTRAINT_ANCHOR: &str = "a state prepared on the sector constraints leaves them only through integrator error";

/// Reference runs use this many substeps per step.
const REFINE: usize = 16;

pub static SECTOR_CONSTRAINTS: Experiment = Experiment {
    id: "sector_constraints",
    criterion: 9,
    anchor: CONSTRAINT_ANCHOR,
    checks: &["prepared_residual", "integrator_growth_ratio"],
    defaults: || {
        let mut c = base("sector_constraints");
        c.grid = crate::config::GridConfig { n: 4, length: 4.0 };
        c.physics.e = 0.5;
        c.integrator = crate::config::IntegratorConfig { dt: 0.25, steps: 100 };
        c
    },
    validate: |c| {
        require_sector(c, 1, 1)?;
        max_grid(c, 8)
    },
    memory: |c| sector_bytes(c, c.grid.n, Representation::F),
    run: run_sector_constraints,
};

fn run_sector_constraints(cfg: &ExperimentConfig, _: &Path) -> Result<Outcome> {
    let g = grid(cfg)?;
    let sh = shape(cfg, g);
    let mut out = Outcome::new(cfg);
    let (dt, steps, e) = (cfg.integrator.dt, cfg.integrator.steps, cfg.physics.e);
    let p = params(cfg, e, dt);
    let st = impose_gauss_law(&SectorState::random(sh, 2, cfg.seed()), &p)?;
    let r0 = sector_constraint_residual(&st, &p)?[0];
    out.check("prepared_residual", r0.gauss.max(r0.magnetic), Bound::AtMost { tolerance: 1e-12 }, CONSTRAINT_ANCHOR);

    // The truncated dynamics itself moves the state off the constraint
    // surface; the integrator's share is the residual of the difference to
    // a run with REFINE-fold smaller steps, since the residual is linear.
    let reference = evolve(&st, &params(cfg, e, dt / REFINE as f64), steps * REFINE)?;
    let run = |k: usize| -> Result<(f64, f64)> {
        let q = params(cfg, e, dt / k as f64);
        let s = evolve(&st, &q, steps * k)?;
        let growth = sector_constraint_residual(&s.sub(&reference), &q)?[0].gauss_abs;
        Ok((growth, sector_constraint_residual(&s, &q)?[0].gauss))
    };
    let (g1, raw1) = run(1)?;
    let (g2, raw2) = run(2)?;
    out.check("integrator_growth_ratio", g1 / g2, Bound::Near { target: 16.0, tolerance: 0.3 }, CONSTRAINT_ANCHOR);
    out.diagnostic("integrator_growth_dt", g1, CONSTRAINT_ANCHOR);
    out.diagnostic("integrator_growth_half_dt", g2, CONSTRAINT_ANCHOR);
    let plateau = sector_constraint_residual(&reference, &p)?[0].gauss;
    out.diagnostic("truncated_dynamics_residual", plateau, "constraint residual of the truncated dynamics at the final time");
    out.series("gauss_residual", vec![(dt, raw1), (dt / 2.0, raw2), (dt / REFINE as f64, plateau)]);
    out.series("integrator_growth", vec![(dt, g1), (dt / 2.0, g2)]);
    Ok(out)
}
