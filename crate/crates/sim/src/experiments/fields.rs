//! Single-photon and single-electron experiments: the three photon products,
//! the factor-8 identity, gauge invariance, the free-field constraint, the
//! Coulomb bijection and tilted-plane delta covariance.

use std::path::Path;

use lpsim_core::dirac::*;
use lpsim_core::grid::{curl, GridSpec, ScalarField};
use lpsim_core::maxwell::*;
use lpsim_core::random::{bandlimited_stream, bandlimited_vector};
use lpsim_core::{Result, C64};

use super::*;
use crate::config::ExperimentConfig;
use crate::record::{Bound, Outcome};
use crate::registry::Experiment;

const CASES: u64 = 20;

fn cutoff(g: &GridSpec) -> i64 {
    (g.n / 4).max(2) as i64
}

// ---------------------------------------------------------------------------

const IP_ANCHOR: &str = "position, mode-space and field-strength photon products agree on Lorenz positive-energy fields";

pub static IP_EQUIVALENCE: Experiment = Experiment {
    id: "ip_equivalence",
    criterion: 1,
    anchor: IP_ANCHOR,
    checks: &["position_vs_fourier", "position_vs_field_strength"],
    defaults: || base("ip_equivalence"),
    validate: any,
    memory: |c| field_bytes(c.grid.n, 64),
    run: run_ip_equivalence,
};

fn run_ip_equivalence(cfg: &ExperimentConfig, fields: &Path) -> Result<Outcome> {
    let g = grid(cfg)?;
    let mut out = Outcome::new(cfg);
    let (mut pf, mut pfs, mut lorenz) = (0.0f64, 0.0f64, 0.0f64);
    let mut values = Vec::new();
    for k in 0..CASES {
        let a = random_lorenz_positive(&g, cutoff(&g), cfg.seed(), 2 * k);
        let b = random_lorenz_positive(&g, cutoff(&g), cfg.seed(), 2 * k + 1);
        let pos = photon_ip_position(&a, &b)?;
        let four = photon_ip_fourier(&a, &b)?;
        let fs = photon_ip_f(&d_apply(&a), &d_apply(&b))?;
        pf = pf.max(rel_diff(pos, four));
        pfs = pfs.max(rel_diff(pos, fs));
        lorenz = lorenz.max(lorenz_positive_residual(&a));
        values.push((k as f64, pos.re));
        if k == 0 {
            a.save(&fields.join("lorenz_case0.bin"))?;
            out.fields.push("fields/lorenz_case0.bin".into());
        }
    }
    out.check("position_vs_fourier", pf, Bound::AtMost { tolerance: 1e-10 }, IP_ANCHOR);
    out.check("position_vs_field_strength", pfs, Bound::AtMost { tolerance: 1e-10 }, IP_ANCHOR);
    out.diagnostic("lorenz_positive_residual", lorenz, "inputs satisfy the Lorenz condition and carry positive energy only");
    out.series("product_real_part", values);
    Ok(out)
}

// ---------------------------------------------------------------------------

const EIGHT_ANCHOR: &str = "the field-tensor sum equals eight times the energy-weighted product";
const BALANCE_ANCHOR: &str = "per mode the electric tensor entries carry half the weight of the magnetic ones";

pub static FACTOR_EIGHT: Experiment = Experiment {
    id: "factor_eight",
    criterion: 2,
    anchor: EIGHT_ANCHOR,
    checks: &["tensor_vs_energy", "electric_magnetic_balance"],
    defaults: || base("factor_eight"),
    validate: any,
    memory: |c| field_bytes(c.grid.n, 48),
    run: run_factor_eight,
};

fn run_factor_eight(cfg: &ExperimentConfig, _: &Path) -> Result<Outcome> {
    let g = grid(cfg)?;
    let mut out = Outcome::new(cfg);
    let (mut worst, mut balance) = (0.0f64, 0.0f64);
    let mut ratios = Vec::new();
    for k in 0..CASES {
        let f = random_constrained_f(&g, cutoff(&g), cfg.seed(), 2 * k);
        let h = random_constrained_f(&g, cutoff(&g), cfg.seed(), 2 * k + 1);
        let t = photon_tensor_sum(&f, &h)?;
        let e = lp_energy_product(&f, &h)?;
        worst = worst.max(rel_diff(t, e * 8.0));
        ratios.push((k as f64, (t / e).re));
        balance = balance.max(electric_magnetic_balance(&random_positive_energy_f(&g, cutoff(&g), cfg.seed(), k)));
    }
    out.check("tensor_vs_energy", worst, Bound::AtMost { tolerance: 1e-11 }, EIGHT_ANCHOR);
    out.check("electric_magnetic_balance", balance, Bound::AtMost { tolerance: 1e-11 }, BALANCE_ANCHOR);
    out.series("tensor_over_energy", ratios);
    Ok(out)
}

// ---------------------------------------------------------------------------

const GAUGE_ANCHOR: &str = "pure-gauge potentials are null vectors of the photon product";

pub static GAUGE_INVARIANCE: Experiment = Experiment {
    id: "gauge_invariance",
    criterion: 3,
    anchor: GAUGE_ANCHOR,
    checks: &["pure_gauge_product"],
    defaults: || {
        let mut c = base("gauge_invariance");
        c.physics.e = 0.3;
        c
    },
    validate: |c| if c.physics.e > 0.0 { Ok(()) } else { Err("gauge_invariance needs physics.e > 0".into()) },
    memory: |c| field_bytes(c.grid.n, 48),
    run: run_gauge_invariance,
};

fn run_gauge_invariance(cfg: &ExperimentConfig, _: &Path) -> Result<Outcome> {
    let g = grid(cfg)?;
    let mut out = Outcome::new(cfg);
    let mut worst = 0.0f64;
    let mut values = Vec::new();
    for k in 0..CASES {
        let a = random_lorenz_positive(&g, cutoff(&g), cfg.seed(), k);
        let th = |s: u64| bandlimited_stream(&g, cutoff(&g), cfg.seed() + 1, 3 * k + s);
        let pure = PhotonA::pure_gauge(&th(0), &th(1), &th(2), cfg.physics.e);
        let ip = photon_ip_position(&a, &pure)?;
        let v = ip.norm() / (a.norm() * pure.norm());
        worst = worst.max(v);
        values.push((k as f64, v));
    }
    out.check("pure_gauge_product", worst, Bound::AtMost { tolerance: 1e-9 }, GAUGE_ANCHOR);
    out.series("pure_gauge_product", values);
    Ok(out)
}

// ---------------------------------------------------------------------------

const LP_ANCHOR: &str = "the free-field magnetic constraint holds on positive energy only and is not kept by sourced dynamics";

pub static LP_CONSTRAINT: Experiment = Experiment {
    id: "lp_constraint",
    criterion: 5,
    anchor: LP_ANCHOR,
    checks: &["positive_energy_residual", "sourced_residual_at_t1", "negative_energy_residual", "free_residual_max"],
    defaults: || {
        let mut c = base("lp_constraint");
        c.integrator = crate::config::IntegratorConfig { dt: 0.05, steps: 20 };
        c
    },
    validate: |c| {
        let t = c.integrator.dt * c.integrator.steps as f64;
        if (t - 1.0).abs() > 1e-9 {
            return Err(format!("lp_constraint integrates to t = 1; dt·steps = {t}"));
        }
        Ok(())
    },
    memory: |c| field_bytes(c.grid.n, 48),
    run: run_lp_constraint,
};

fn run_lp_constraint(cfg: &ExperimentConfig, _: &Path) -> Result<Outcome> {
    let g = grid(cfg)?;
    let mut out = Outcome::new(cfg);
    let f = random_positive_energy_f(&g, cutoff(&g), cfg.seed(), 0);
    out.check("positive_energy_residual", lp_constraint_residual(&f), Bound::AtMost { tolerance: 1e-10 }, LP_ANCHOR);

    // Static current with a nonzero curl: a band-limited vector field.
    let mut j = Source::zeros(g);
    j.j = bandlimited_vector(&g, cutoff(&g), cfg.seed(), 90).scaled(C64::new(f.norm() / g.length.powf(1.5), 0.0));
    let curl_j = curl(&j.j).norm();
    out.diagnostic("source_curl_norm", curl_j, "the driving current is not curl free");
    let (dt, steps) = (cfg.integrator.dt, cfg.integrator.steps);
    let mut sourced = vec![(0.0, lp_constraint_residual(&f))];
    let mut free = vec![(0.0, lp_constraint_residual(&f))];
    let mut state = f.clone();
    for s in 1..=steps {
        state = sourced_maxwell_step(&state, &j, dt)?;
        let t = s as f64 * dt;
        sourced.push((t, lp_constraint_residual(&state)));
        free.push((t, lp_constraint_residual(&free_maxwell_evolve(&f, t))));
    }
    out.check("sourced_residual_at_t1", sourced.last().unwrap().1, Bound::AtLeast { tolerance: 1e-2 }, LP_ANCHOR);

    // The negative-energy branch: flip the magnetic field of a positive one.
    let neg = PhotonF { e: f.e.clone(), b: f.b.scaled(C64::new(-1.0, 0.0)) };
    out.check("negative_energy_residual", lp_constraint_residual(&neg), Bound::AtLeast { tolerance: 0.5 }, LP_ANCHOR);
    let worst = free.iter().map(|p| p.1).fold(0.0, f64::max);
    out.check("free_residual_max", worst, Bound::AtMost { tolerance: 1e-10 }, LP_ANCHOR);
    out.series("sourced_residual", sourced);
    out.series("free_residual", free);
    Ok(out)
}

// ---------------------------------------------------------------------------

const COULOMB_ANCHOR: &str = "the exterior derivative is a bijection between Coulomb potentials and constrained fields";

pub static COULOMB_BIJECTION: Experiment = Experiment {
    id: "coulomb_bijection",
    criterion: 6,
    anchor: COULOMB_ANCHOR,
    checks: &["d_after_inverse", "inverse_after_d"],
    defaults: || base("coulomb_bijection"),
    validate: any,
    memory: |c| field_bytes(c.grid.n, 64),
    run: run_coulomb_bijection,
};

/// Coulomb potential without null-mode content and with `Ȧ0 = 0`, the value
/// the source-free inverse assigns.
fn coulomb_potential_field(g: &GridSpec, seed: u64, k: u64) -> PhotonA {
    let c = cutoff(g);
    let mean_free = |f: ScalarField| {
        let m = f.mean();
        ScalarField { data: f.data.iter().map(|v| v - m).collect(), ..f }
    };
    PhotonA {
        a0: mean_free(bandlimited_stream(g, c, seed, 4 * k)),
        a: curl(&bandlimited_vector(g, c, seed, 4 * k + 1)),
        a0_dot: ScalarField::zeros(*g),
        a_dot: curl(&bandlimited_vector(g, c, seed, 4 * k + 2)),
        gauge: GaugeTag::Coulomb,
    }
}

fn run_coulomb_bijection(cfg: &ExperimentConfig, _: &Path) -> Result<Outcome> {
    let g = grid(cfg)?;
    let mut out = Outcome::new(cfg);
    let zero = Source::zeros(g);
    let (mut fwd, mut back) = (0.0f64, 0.0f64);
    let mut values = Vec::new();
    for k in 0..CASES {
        let f = random_constrained_f(&g, cutoff(&g), cfg.seed(), k);
        let r1 = d_apply(&d_inverse_coulomb(&f, &zero)?).sub(&f).norm() / f.norm();
        let a = coulomb_potential_field(&g, cfg.seed(), k);
        let r2 = d_inverse_coulomb(&d_apply(&a), &zero)?.sub(&a).norm() / a.norm();
        fwd = fwd.max(r1);
        back = back.max(r2);
        values.push((k as f64, r1.max(r2)));
    }
    out.check("d_after_inverse", fwd, Bound::AtMost { tolerance: 1e-11 }, COULOMB_ANCHOR);
    out.check("inverse_after_d", back, Bound::AtMost { tolerance: 1e-11 }, COULOMB_ANCHOR);
    out.series("round_trip_error", values);
    Ok(out)
}

// ---------------------------------------------------------------------------

const DELTA_ANCHOR: &str = "the smeared propagator contracted with the plane normal integrates to f(0) on every tilted plane";
const LEAK_ANCHOR: &str = "the smeared propagator vanishes outside the light cone widened by five widths";

pub static DELTA_COVARIANCE: Experiment = Experiment {
    id: "delta_covariance",
    criterion: 7,
    anchor: DELTA_ANCHOR,
    checks: &["worst_error_over_allowance", "off_cone_leakage"],
    defaults: || {
        let mut c = base("delta_covariance");
        c.grid.n = 32;
        c.integrator.dt = 0.04;
        c
    },
    validate: |c| {
        let sigma = c.sigma();
        if 1.0 + 5.0 * sigma >= c.grid.length / 2.0 {
            return Err(format!(
                "leakage ball of radius 1 + 5σ = {} does not fit in the half box {}",
                1.0 + 5.0 * sigma,
                c.grid.length / 2.0
            ));
        }
        max_grid(c, 64)
    },
    memory: |c| field_bytes(c.grid.n, 64),
    run: run_delta_covariance,
};

type TestFn = Box<dyn Fn(f64, [f64; 3]) -> C64 + Sync>;

fn test_functions() -> Vec<(&'static str, TestFn)> {
    vec![
        ("constant", Box::new(|_, _| C64::new(1.0, 0.0))),
        ("gaussian", Box::new(|t, x| C64::new((-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 2.0 - t * t).exp(), 0.0))),
        ("wave", Box::new(|t, x| C64::new((0.5 * x[0] - 0.3 * t).cos() + 0.2 * x[1], 0.1 * x[2]))),
    ]
}

fn run_delta_covariance(cfg: &ExperimentConfig, _: &Path) -> Result<Outcome> {
    let g = grid(cfg)?;
    let sigma = cfg.sigma();
    let mut out = Outcome::new(cfg);
    let masses = [0.5, 1.0];
    let tilts = [0.0, 0.1, 0.2];
    let mut worst = 0.0f64;
    let mut leak = 0.0f64;
    for &m in &masses {
        for (name, f) in test_functions() {
            let mut curve = Vec::new();
            for &tilt in &tilts {
                let plane = TiltedPlane::new([tilt, 0.0, 0.0])?;
                let r = tilted_plane_delta_integral(&g, m, sigma, &plane, f.as_ref())?;
                let expect = mat_scale(&mat_identity(), f(0.0, [0.0; 3]));
                let err = mat_max_abs_diff(&r.matrix, &expect);
                let allowance = (5.0 * sigma * sigma).max(r.interpolation_error);
                worst = worst.max(err / allowance);
                curve.push((tilt, err));
            }
            out.series(&format!("error_m{m}_{name}"), curve);
        }
        let center = [g.length / 2.0; 3];
        let cols = dirac_propagator_columns(&g, m, 1.0, sigma, center)?;
        leak = leak.max(propagator_leakage(&cols, center, 1.0 + 5.0 * sigma));
    }
    out.check("worst_error_over_allowance", worst, Bound::AtMost { tolerance: 1.0 }, DELTA_ANCHOR);
    out.check("off_cone_leakage", leak, Bound::AtMost { tolerance: 1e-6 }, LEAK_ANCHOR);
    Ok(out)
}
