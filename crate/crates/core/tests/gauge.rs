use std::f64::consts::PI;

use lpsim_core::container::deinterleave;
use lpsim_core::fock::*;
use lpsim_core::gauge::*;
use lpsim_core::grid::{curl, GridSpec};
use lpsim_core::maxwell::{GaugeTag, PhotonA};
use lpsim_core::random::{bandlimited_stream, bandlimited_vector};
use lpsim_core::C64;

fn grid4() -> GridSpec {
    GridSpec::new(4, 2.0 * PI).unwrap()
}

fn sigma(g: &GridSpec) -> f64 {
    2.0 * g.spacing()
}

fn coulomb_photon(g: &GridSpec, seed: u64) -> PhotonA {
    PhotonA {
        a0: bandlimited_stream(g, 2, seed, 0),
        a: curl(&bandlimited_vector(g, 2, seed, 1)),
        a0_dot: bandlimited_stream(g, 2, seed, 2),
        a_dot: curl(&bandlimited_vector(g, 2, seed, 3)),
        gauge: GaugeTag::Coulomb,
    }
}

fn slot_photon(st: &SectorState) -> PhotonA {
    let g = st.grid();
    let v = deinterleave(g, &st.sectors[1].arrays[0], 4).unwrap();
    let d = deinterleave(g, &st.sectors[1].arrays[1], 4).unwrap();
    PhotonA {
        a0: v[0].clone(),
        a: lpsim_core::grid::Vector3Field { c: [v[1].clone(), v[2].clone(), v[3].clone()] },
        a0_dot: d[0].clone(),
        a_dot: lpsim_core::grid::Vector3Field { c: [d[1].clone(), d[2].clone(), d[3].clone()] },
        gauge: GaugeTag::Coulomb,
    }
}

fn rel(a: &SectorState, b: &SectorState) -> f64 {
    a.sub(b).l2_norm() / b.l2_norm()
}

#[test]
fn theta_is_linear() {
    let g = grid4();
    let a = coulomb_photon(&g, 1);
    let b = coulomb_photon(&g, 2);
    let v = [0.6, 0.0, 0.8];
    let sum = PhotonA { a0: a.a0.add(&b.a0), a: a.a.add(&b.a), a0_dot: a.a0_dot.add(&b.a0_dot), a_dot: a.a_dot.add(&b.a_dot), gauge: GaugeTag::Coulomb };
    let lhs = theta_coulomb_tilt(&sum, v, 0.3).unwrap();
    let rhs = theta_coulomb_tilt(&a, v, 0.3).unwrap().add(&theta_coulomb_tilt(&b, v, 0.3).unwrap());
    assert!(lhs.sub(&rhs).norm() < 1e-13 * rhs.norm());
}

#[test]
fn zero_theta_is_the_identity() {
    let g = grid4();
    let st = SectorState::random(SectorShape::new(g, 1, 1, Representation::A), 2, 3);
    let th = ThetaOperator::new([1.0, 0.0, 0.0], 0.5).rescaled(0.0);
    let out = infinitesimal_gauge_transform(&st, &th, 0.1, sigma(&g)).unwrap();
    assert!(rel(&out, &st) < 1e-15);
    let f = SectorState::random(SectorShape::new(g, 0, 1, Representation::F), 2, 3);
    let th = ThetaOperator::new([1.0, 0.0, 0.0], 0.5);
    assert!(rel(&f_rep_gauge_transform(&f, &th, 0.1, sigma(&g)).unwrap(), &f) < 1e-15);
}

#[test]
fn rescaling_theta_against_ds_is_invisible() {
    let g = grid4();
    let st = SectorState::random(SectorShape::new(g, 1, 1, Representation::A), 2, 4);
    let th = ThetaOperator::new([0.0, 1.0, 0.0], 0.7);
    let a = infinitesimal_gauge_transform(&st, &th, 0.05, sigma(&g)).unwrap();
    let b = infinitesimal_gauge_transform(&st, &th.rescaled(2.5), 0.02, sigma(&g)).unwrap();
    assert!(rel(&a, &b) < 1e-13);
}

#[test]
fn transformed_photon_satisfies_tilted_coulomb_condition_to_second_order() {
    let g = grid4();
    let shape = SectorShape::new(g, 0, 1, Representation::A);
    let st = SectorState::product_a(shape, &[], &[&coulomb_photon(&g, 5)]).unwrap();
    let v = [1.0, 0.0, 0.0];
    let th = ThetaOperator::new(v, 0.4);
    let res = |ds: f64| {
        let out = infinitesimal_gauge_transform(&st, &th, ds, sigma(&g)).unwrap();
        tilted_coulomb_residual(&slot_photon(&out), v, ds)
    };
    let untransformed = tilted_coulomb_residual(&slot_photon(&st), v, 0.02);
    let (r1, r2) = (res(0.02), res(0.01));
    assert!(r1 < 0.1 * untransformed, "{r1} {untransformed}");
    assert!((r1 / r2 - 4.0).abs() < 0.05, "ratio {}", r1 / r2);
}

#[test]
fn f_and_a_routes_agree() {
    let g = grid4();
    let f = SectorState::random(SectorShape::new(g, 1, 1, Representation::F), 2, 6);
    let th = ThetaOperator::new([0.0, 0.6, 0.8], 0.9);
    let ds = 0.03;
    let direct = f_rep_gauge_transform(&f, &th, ds, sigma(&g)).unwrap().sub(&f);
    let a = to_a_representation(&f).unwrap();
    let moved = infinitesimal_gauge_transform(&a, &th, ds, sigma(&g)).unwrap();
    let via = to_f_representation(&moved).unwrap().sub(&to_f_representation(&a).unwrap());
    assert!(direct.l2_norm() > 1e-6);
    assert!(via.sub(&direct).l2_norm() < 1e-13 * f.l2_norm(), "{}", rel(&via, &direct));
}

#[test]
fn composition_of_tilts_is_additive_to_first_order() {
    let g = grid4();
    let st = SectorState::random(SectorShape::new(g, 1, 1, Representation::A), 2, 7);
    let t1 = ThetaOperator::new([1.0, 0.0, 0.0], 0.5);
    let t2 = ThetaOperator::new([0.0, 1.0, 0.0], 0.5);
    let t12 = ThetaOperator::new([1.0, 1.0, 0.0], 0.5);
    let s = sigma(&g);
    let gap = |ds: f64| {
        let two = infinitesimal_gauge_transform(&infinitesimal_gauge_transform(&st, &t1, ds, s).unwrap(), &t2, ds, s).unwrap();
        let one = infinitesimal_gauge_transform(&st, &t12, ds, s).unwrap();
        two.sub(&one).l2_norm()
    };
    let (a, b) = (gap(0.02), gap(0.01));
    assert!(a > 0.0 && (a / b - 4.0).abs() < 1e-6, "{}", a / b);
}

fn gauge_function(g: &GridSpec, seed: u64) -> GaugeFunction {
    GaugeFunction {
        theta: bandlimited_stream(g, 2, seed, 0).scaled(C64::new(0.3, 0.0)),
        theta_dot: bandlimited_stream(g, 2, seed, 1),
        theta_ddot: bandlimited_stream(g, 2, seed, 2),
    }
}

#[test]
fn constant_gauge_function_is_a_global_phase() {
    let g = grid4();
    let st = SectorState::random(SectorShape::new(g, 1, 1, Representation::A), 2, 8);
    let c = C64::new(0.37, 0.0);
    let out = affine_gauge_transform_finite(&st, &GaugeFunction::constant(g, c), 0.5).unwrap();
    assert!(rel(&out, &st.scaled((C64::i() * c).exp())) < 1e-14);
}

#[test]
fn adding_a_constant_changes_only_the_phase() {
    let g = grid4();
    let st = SectorState::random(SectorShape::new(g, 1, 1, Representation::A), 2, 9);
    let gf = gauge_function(&g, 1);
    let t0 = affine_gauge_transform_finite(&st, &gf, 0.5).unwrap();
    let tc = affine_gauge_transform_finite(&st, &gf.add_constant(C64::new(1.3, 0.0)), 0.5).unwrap();
    let cross = full_scalar_product(&tc, &t0).unwrap();
    let own = full_scalar_product(&t0, &t0).unwrap();
    assert!((cross.norm() - own.norm()).abs() < 1e-10 * own.norm());
    assert!(rel(&tc, &t0.scaled((C64::i() * 1.3).exp())) < 1e-13);
}

#[test]
fn f_representation_sees_only_the_electron_phase() {
    let g = grid4();
    let st = SectorState::random(SectorShape::new(g, 1, 1, Representation::F), 2, 10);
    let gf = gauge_function(&g, 2);
    let a = to_a_representation(&st).unwrap();
    let out = affine_gauge_transform_finite(&to_f_representation(&a).unwrap(), &gf, 0.5).unwrap();
    let via_a = to_f_representation(&affine_gauge_transform_finite(&a, &gf, 0.5).unwrap()).unwrap();
    assert!(rel(&via_a, &out) < 1e-12, "{}", rel(&via_a, &out));
}

#[test]
fn composed_infinitesimal_steps_converge_to_the_finite_transform() {
    let g = grid4();
    let st = SectorState::random(SectorShape::new(g, 1, 1, Representation::A), 2, 11);
    let gf = gauge_function(&g, 3);
    let finite = affine_gauge_transform_finite(&st, &gf, 0.5).unwrap();
    let compose = |k: usize| {
        let mut s = st.clone();
        for _ in 0..k {
            s = affine_gauge_infinitesimal(&s, &gf, 0.5, k).unwrap();
        }
        rel(&s, &finite)
    };
    let (a, b) = (compose(16), compose(32));
    assert!(b < a && (a / b - 2.0).abs() < 0.15, "{a} {b}");
}

#[test]
fn affine_transform_commutes_with_symmetrization() {
    let g = grid4();
    let st = SectorState::random(SectorShape::new(g, 0, 2, Representation::A), 2, 12);
    let gf = gauge_function(&g, 4);
    let a = affine_gauge_transform_finite(&symmetrize(&st), &gf, 0.5).unwrap();
    let b = symmetrize(&affine_gauge_transform_finite(&st, &gf, 0.5).unwrap());
    assert!(rel(&a, &b) < 1e-13);
}

#[test]
fn ramp_state_endpoints() {
    let g = grid4();
    let st = SectorState::random(SectorShape::new(g, 1, 1, Representation::A), 2, 13);
    let before = ramp_superposition_state(&st, RampReading::Phase, -0.5, 0.5).unwrap();
    let after = ramp_superposition_state(&st, RampReading::Phase, 1.5, 0.5).unwrap();
    assert!(rel(&before, &st) < 1e-14);
    assert!(after.l2_norm() < 1e-14 * st.l2_norm());
    // F representation: the ramp adds no photon terms, so the midpoint is
    // |cos(π/4)| times the original.
    let f = SectorState::random(SectorShape::new(g, 1, 1, Representation::F), 2, 13);
    let r = ramp_superposition_state(&f, RampReading::Phase, 0.5, 0.5).unwrap().l2_norm() / f.l2_norm();
    assert!((r - (PI / 4.0).cos()).abs() < 1e-14, "{r}");
    let literal = ramp_superposition_state(&st, RampReading::Literal, 1.5, 0.5).unwrap();
    assert!(literal.l2_norm() > 0.1 * st.l2_norm());
}
