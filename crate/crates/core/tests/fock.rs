use std::f64::consts::PI;

use lpsim_core::dirac::{dirac_inner_product, free_dirac_evolve, SpinorField};
use lpsim_core::fock::*;
use lpsim_core::grid::{GridSpec, ScalarField};
use lpsim_core::maxwell::{self, d_inverse_coulomb, photon_ip_position, PhotonF, Source};
use lpsim_core::C64;

fn grid4() -> GridSpec {
    GridSpec::new(4, 2.0 * PI).unwrap()
}

fn params(grid: &GridSpec, e: f64) -> HamiltonianParams {
    let h = grid.spacing();
    HamiltonianParams::new(e, 1.0, 2.0 * h, 0.01)
}

fn spinor(grid: &GridSpec, seed: u64) -> SpinorField {
    let c: Vec<ScalarField> = (0..4).map(|s| lpsim_core::random::bandlimited_stream(grid, 2, seed, s)).collect();
    SpinorField { c: c.try_into().unwrap(), mass: 1.0, charge: 1.0 }
}

fn sector_spinor(st: &SectorState) -> SpinorField {
    let g = st.grid();
    let d = st.sectors[0].data();
    let c: [ScalarField; 4] =
        std::array::from_fn(|s| ScalarField { grid: g, data: (0..g.sites()).map(|x| d[x * 4 + s]).collect() });
    SpinorField { c, mass: 1.0, charge: 1.0 }
}

#[test]
fn decoupled_electron_matches_free_dirac() {
    let g = grid4();
    let shape = SectorShape::new(g, 1, 0, Representation::F);
    let psi = spinor(&g, 1);
    let st = SectorState::product_f(shape, &[&psi], &[]).unwrap();
    let p = params(&g, 0.0);
    let steps = 16;
    let out = evolve(&st, &p, steps).unwrap();
    let exact = free_dirac_evolve(&psi, p.dt * steps as f64);
    let err = sector_spinor(&out).sub(&exact).norm() / psi.norm();
    // Local error (E dt)^5/120 per step with E ≲ 2.
    assert!(err < 1e-8, "{err}");
    let _ = dirac_inner_product(&psi, &psi).unwrap();
}

#[test]
fn decoupled_photon_matches_free_maxwell() {
    let g = grid4();
    let shape = SectorShape::new(g, 0, 1, Representation::F);
    let f = maxwell::random_constrained_f(&g, 2, 3, 0);
    let st = SectorState::product_f(shape, &[], &[&f]).unwrap();
    let p = params(&g, 0.0);
    let out = evolve(&st, &p, 16).unwrap();
    let exact = maxwell::free_maxwell_evolve(&f, p.dt * 16.0);
    let d = out.sectors[1].data();
    let comps: Vec<ScalarField> =
        (0..6).map(|c| ScalarField { grid: g, data: (0..g.sites()).map(|y| d[y * 6 + c]).collect() }).collect();
    let got = PhotonF::from_components(comps).unwrap();
    assert!(got.sub(&exact).norm() < 1e-8 * f.norm());
}

#[test]
fn evolution_is_linear() {
    let g = grid4();
    let shape = SectorShape::new(g, 1, 1, Representation::F);
    let a = SectorState::random(shape, 2, 1);
    let b = SectorState::random(shape, 2, 2);
    let p = params(&g, 0.3);
    let (x, y) = (C64::new(0.4, -1.1), C64::new(-0.2, 0.7));
    let lhs = evolve(&a.scaled(x).add(&b.scaled(y)), &p, 3).unwrap();
    let rhs = evolve(&a, &p, 3).unwrap().scaled(x).add(&evolve(&b, &p, 3).unwrap().scaled(y));
    assert!(lhs.sub(&rhs).l2_norm() < 1e-12 * lhs.l2_norm());
}

#[test]
fn coupling_is_adjoint_on_transverse_states() {
    let g = grid4();
    let shape = SectorShape::new(g, 1, 1, Representation::F);
    let p = params(&g, 0.7);
    let a = project_transverse(&SectorState::random(shape, 2, 5)).unwrap();
    let b = project_transverse(&SectorState::random(shape, 2, 6)).unwrap();
    let ha = lp_hamiltonian_apply(&a, &p).unwrap();
    let hb = lp_hamiltonian_apply(&b, &p).unwrap();
    let l = full_scalar_product(&a, &hb).unwrap();
    let r = full_scalar_product(&ha, &b).unwrap();
    assert!((l - r).norm() < 1e-12 * l.norm().max(r.norm()), "{l} {r}");
    // The coupling itself is not trivially zero.
    let p0 = params(&g, 0.0);
    let free = lp_hamiltonian_apply(&b, &p0).unwrap();
    assert!(hb.sub(&free).l2_norm() > 1e-3 * hb.l2_norm());
}

#[test]
fn orderings_of_annihilation_agree() {
    let g = grid4();
    let shape = SectorShape::new(g, 1, 1, Representation::F);
    let st = SectorState::random(shape, 2, 8);
    let d = annihilation_ordering_difference(&st, &params(&g, 0.5)).unwrap();
    assert!(d < 1e-12, "{d}");
}

#[test]
fn external_current_creation_scales_with_inverse_root_n() {
    let g = grid4();
    let shape = SectorShape::new(g, 0, 2, Representation::F);
    let mut p = params(&g, 0.0);
    let mut src = Source::zeros(g);
    src.j = lpsim_core::random::bandlimited_vector(&g, 2, 4, 0);
    p.external = Some(src);
    let h = SpectralHamiltonian::new(shape, &p).unwrap();
    let vac = vec![C64::new(1.0, 0.0)];
    let one = h.external_block(&vac, 1);
    let two = h.external_block(&one, 2);
    // Ψ2 = (1/√2)(J⊗J + J⊗J)·(−i)²: norm √2·‖J‖² versus ‖J‖ for Ψ1.
    let n1: f64 = one.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let n2: f64 = two.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    assert!((n2 / (n1 * n1) - 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn photon_slot_product_matches_position_form() {
    let g = grid4();
    let fa = maxwell::random_positive_energy_f(&g, 2, 1, 0);
    let fb = maxwell::random_constrained_f(&g, 2, 1, 1);
    let fb = maxwell::PhotonF { e: fb.e.clone(), b: fb.b.clone() };
    let fb = {
        // Transverse E keeps the A0 terms out of the comparison.
        let st = SectorState::product_f(SectorShape::new(g, 0, 1, Representation::F), &[], &[&fb]).unwrap();
        let t = project_transverse(&st).unwrap();
        let d = t.sectors[1].data();
        PhotonF::from_components(
            (0..6).map(|c| ScalarField { grid: g, data: (0..g.sites()).map(|y| d[y * 6 + c]).collect() }).collect(),
        )
        .unwrap()
    };
    let shape = SectorShape::new(g, 0, 1, Representation::F);
    let sa = SectorState::product_f(shape, &[], &[&fa]).unwrap();
    let sb = SectorState::product_f(shape, &[], &[&fb]).unwrap();
    let via_state = sector_products(&sa, &sb).unwrap()[1];
    let z = Source::zeros(g);
    let direct = photon_ip_position(&d_inverse_coulomb(&fa, &z).unwrap(), &d_inverse_coulomb(&fb, &z).unwrap()).unwrap();
    assert!((via_state - direct).norm() < 1e-12 * direct.norm(), "{via_state} {direct}");
    // Same value through the A representation of the state.
    let aa = to_a_representation(&sa).unwrap();
    let ab = to_a_representation(&sb).unwrap();
    let via_a = sector_products(&aa, &ab).unwrap()[1];
    assert!((via_a - direct).norm() < 1e-12 * direct.norm());
}

#[test]
fn dense_pairing_oracle_for_one_electron_one_photon() {
    let g = grid4();
    let shape = SectorShape::new(g, 1, 1, Representation::A);
    let a = SectorState::random(shape, 2, 11);
    let b = SectorState::random(shape, 2, 12);
    let fast = sector_products(&a, &b).unwrap()[1];
    // Brute force: photon position form for every fixed (x, s), summed with h³.
    let n3 = g.sites();
    let field = |st: &SectorState, mask: usize, x: usize, s: usize, c: usize| ScalarField {
        grid: g,
        data: (0..n3).map(|y| st.sectors[1].arrays[mask][(x * n3 + y) * 16 + s * 4 + c]).collect(),
    };
    let photon = |st: &SectorState, x: usize, s: usize| maxwell::PhotonA {
        a0: field(st, 0, x, s, 0),
        a: lpsim_core::grid::Vector3Field { c: [field(st, 0, x, s, 1), field(st, 0, x, s, 2), field(st, 0, x, s, 3)] },
        a0_dot: field(st, 1, x, s, 0),
        a_dot: lpsim_core::grid::Vector3Field { c: [field(st, 1, x, s, 1), field(st, 1, x, s, 2), field(st, 1, x, s, 3)] },
        gauge: maxwell::GaugeTag::Other,
    };
    let mut slow = C64::new(0.0, 0.0);
    for x in 0..n3 {
        for s in 0..4 {
            slow += photon_ip_position(&photon(&a, x, s), &photon(&b, x, s)).unwrap() * g.cell();
        }
    }
    assert!((fast - slow).norm() < 1e-10 * slow.norm(), "{fast} {slow}");
}

#[test]
fn product_factorizes_on_product_states() {
    let g = grid4();
    let shape = SectorShape::new(g, 1, 1, Representation::F);
    let (pa, pb) = (spinor(&g, 3), spinor(&g, 4));
    let (fa, fb) = (maxwell::random_positive_energy_f(&g, 2, 5, 0), maxwell::random_positive_energy_f(&g, 2, 5, 1));
    let sa = SectorState::product_f(shape, &[&pa], &[&fa]).unwrap();
    let sb = SectorState::product_f(shape, &[&pb], &[&fb]).unwrap();
    let lhs = full_scalar_product(&sa, &sb).unwrap();
    let rhs = dirac_inner_product(&pa, &pb).unwrap() * maxwell::photon_ip_f(&fa, &fb).unwrap();
    assert!((lhs - rhs).norm() < 1e-12 * rhs.norm());
    let only = SectorState::product_f(shape, &[&pa], &[]).unwrap();
    let v = full_scalar_product(&only, &only).unwrap();
    assert!((v.re - pa.norm().powi(2)).abs() < 1e-12 * v.re && v.im.abs() < 1e-14);
}

#[test]
fn representation_switch_round_trips() {
    let g = grid4();
    let shape = SectorShape::new(g, 1, 1, Representation::F);
    let st = project_transverse(&SectorState::random(shape, 2, 13)).unwrap();
    let back = to_f_representation(&to_a_representation(&st).unwrap()).unwrap();
    assert!(back.sub(&st).l2_norm() < 1e-12 * st.l2_norm());
    let mut missing = to_a_representation(&st).unwrap();
    missing.sectors[1].arrays.truncate(1);
    assert!(full_scalar_product(&missing, &missing).is_err());
}

#[test]
fn free_product_is_conserved() {
    let g = grid4();
    let shape = SectorShape::new(g, 1, 1, Representation::F);
    let st = SectorState::random(shape, 2, 14);
    let p = params(&g, 0.0);
    let before = full_scalar_product(&st, &st).unwrap();
    let after = full_scalar_product(&evolve(&st, &p, 20).unwrap(), &st.clone()).unwrap();
    let after_self = {
        let e = evolve(&st, &p, 20).unwrap();
        full_scalar_product(&e, &e).unwrap()
    };
    assert!((after_self - before).norm() < 1e-10 * st.l2_norm().powi(2));
    let _ = after;
}

#[test]
fn gauss_law_preparation_and_detector() {
    let g = GridSpec::new(4, 4.0).unwrap();
    let shape = SectorShape::new(g, 1, 1, Representation::F);
    let p = HamiltonianParams::new(0.5, 1.0, 2.0 * g.spacing(), g.spacing() / 4.0);
    let st = impose_gauss_law(&SectorState::random(shape, 2, 15), &p).unwrap();
    let r = sector_constraint_residual(&st, &p).unwrap();
    assert!(r[0].gauss < 1e-13 && r[0].magnetic < 1e-13, "{r:?}");
    let bad = SectorState::random(shape, 2, 16);
    let r = sector_constraint_residual(&bad, &p).unwrap();
    assert!(r[0].gauss > 1e-2 && r[0].magnetic > 1e-2);
    let free = project_transverse(&bad).unwrap();
    let r0 = sector_constraint_residual(&free, &HamiltonianParams { e: 0.0, ..p.clone() }).unwrap();
    assert!(r0[0].gauss < 1e-13 && r0[0].magnetic < 1e-13);
}

#[test]
fn ibc_flux_of_prepared_coulomb_sector() {
    let g = GridSpec::new(8, 8.0).unwrap();
    let shape = SectorShape::new(g, 1, 1, Representation::F);
    // The flux sphere must fit between 2σ and L/4, so σ is below the
    // dynamics floor of two spacings here.
    let sigma = g.spacing();
    let p = HamiltonianParams::new(0.3, 1.0, sigma, g.spacing() / 4.0);
    let psi = spinor(&g, 17);
    let st = SectorState::product_f(shape, &[&psi], &[]).unwrap();
    let prepared = impose_gauss_law(&st, &p).unwrap();
    let rep = ibc_residual(&prepared, &p, 2.0).unwrap();
    assert!(rep.mismatch_torus < 1e-3, "{rep:?}");
    assert!(rep.mismatch > 0.05);
    assert!(ibc_residual(&prepared, &p, 0.5 * sigma).is_err());
    let zero = ibc_residual(&st, &p, 2.0).unwrap();
    assert!(zero.left_norm < 1e-14);
}

#[test]
fn evolution_preserves_antisymmetry() {
    let g = grid4();
    let shape = SectorShape::new(g, 2, 0, Representation::F);
    let st = symmetrize(&SectorState::random(shape, 2, 18));
    let out = evolve(&st, &params(&g, 0.0), 4).unwrap();
    assert!(symmetrize(&out).sub(&out).l2_norm() < 1e-12 * out.l2_norm());
}
