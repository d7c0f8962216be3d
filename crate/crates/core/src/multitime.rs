//! Multi-time objects at desk scale: external point charges and the
//! coherent photon state they support, a Dirac test particle driven by that
//! state, the product-state reduction to a Dirac equation in an external
//! field, and the two-time consistency defect for the `(1,0)/(1,1)` pair.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dirac::{free_dirac_apply, gammas, SpinorField};
use crate::error::{Error, Result};
use crate::fock::{
    from_spectral, spectral_values, HamiltonianParams, HamiltonianParts, Representation, SectorShape, SectorState,
    SpectralHamiltonian,
};
use crate::grid::{
    apply_symbol, curl, divergence, gradient, inverse_laplacian, kernel_spectrum, neg_laplacian,
    GaussianRegulator, GridSpec, Regulator, ScalarField, SharpCutoffRegulator, Vector3Field,
};
use crate::maxwell::{d_apply, GaugeTag, PhotonA};
use crate::par;

type C64 = Complex64;
const I: C64 = C64 { re: 0.0, im: 1.0 };

/// External point charge at rest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointCharge {
    pub charge: f64,
    pub position: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ChargeSet {
    pub charges: Vec<PointCharge>,
}

impl ChargeSet {
    pub fn new(charges: Vec<PointCharge>) -> Self {
        Self { charges }
    }

    pub fn total_charge(&self) -> f64 {
        self.charges.iter().map(|c| c.charge).sum()
    }

    fn check(&self, grid: &GridSpec) -> Result<()> {
        for c in &self.charges {
            if c.position.iter().any(|&x| !(0.0..grid.length).contains(&x)) {
                return Err(Error::Precondition(format!("charge at {:?} outside the box", c.position)));
            }
        }
        Ok(())
    }

    /// `Σ e_j δ_σ(y − X_j)`.
    pub fn density(&self, grid: &GridSpec, sigma: f64) -> Result<ScalarField> {
        self.check(grid)?;
        self.density_with(grid, &GaussianRegulator { sigma })
    }

    fn density_with(&self, grid: &GridSpec, reg: &dyn Regulator) -> Result<ScalarField> {
        let mut rho = ScalarField::zeros(*grid);
        for c in &self.charges {
            rho = rho.add(&reg.sample(grid, c.position)?.scaled(C64::new(c.charge, 0.0)));
        }
        Ok(rho)
    }
}

/// Static Coulomb potential `A0 = (−Δ)⁻¹ρ_σ`, `𝐀 = 0`, zero mode dropped.
pub fn coulomb_potential(charges: &ChargeSet, grid: &GridSpec, sigma: f64) -> Result<PhotonA> {
    let rho = charges.density(grid, sigma)?;
    let mut a = PhotonA::zeros(*grid, GaugeTag::Coulomb);
    a.a0 = inverse_laplacian(&rho);
    Ok(a)
}

/// Coherent photon state with mode function `a`, truncated at `n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentSpec {
    pub a: PhotonA,
    pub n_max: usize,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `Ψ^(m,n) = ψ_1 ⊗ … ⊗ ψ_m ⊗ A^{⊗n}/√(n!)` for `n ≤ n_max`, in the
/// requested representation.
pub fn build_coherent(spec: &CoherentSpec, spinors: &[&SpinorField], rep: Representation) -> Result<SectorState> {
    let shape = SectorShape::new(spec.a.grid(), spinors.len(), spec.n_max, rep);
    shape.guard(None)?;
    let f = d_apply(&spec.a);
    let mut out = SectorState::zeros(shape);
    for n in 0..=spec.n_max {
        let s = C64::new(1.0 / factorial(n).sqrt(), 0.0);
        let term = match rep {
            Representation::A => SectorState::product_a(shape, spinors, &vec![&spec.a; n])?,
            Representation::F => SectorState::product_f(shape, spinors, &vec![&f; n])?,
        };
        out = out.add_scaled(s, &term);
    }
    Ok(out)
}

/// Residual of the sourced photon equation on a coherent state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalSourceReport {
    /// `‖LHS − RHS‖ / ‖RHS‖` per sector `n ≥ 1`.
    pub sector_residuals: Vec<f64>,
    /// Part of the sector-1 residual carried by the zero mode.
    pub zero_mode: f64,
    /// Sector-1 residual with the zero mode removed.
    pub remainder: f64,
}

/// `∂^μF_{μν} − J_ν` for one static photon function, as `(ν = 0, ν = i)`.
fn maxwell_residual(a: &PhotonA, rho: &ScalarField) -> (ScalarField, Vector3Field) {
    let f = d_apply(a);
    let r0 = divergence(&f.e).sub(rho);
    // Ė − ∇×B with Ė = −∇Ȧ0 (static mode function, 𝐀̈ = 0).
    let e_dot = gradient(&a.a0_dot).scaled(C64::new(-1.0, 0.0));
    (r0, e_dot.sub(&curl(&f.b)))
}

fn four_norm(s: &ScalarField, v: &Vector3Field) -> f64 {
    (s.norm().powi(2) + v.norm().powi(2)).sqrt()
}

fn four_inner(s: &ScalarField, v: &Vector3Field, t: &ScalarField, w: &Vector3Field) -> C64 {
    s.inner(t) + v.inner(w)
}

/// Norm of `Σ_k r(y_k) ⊗ A^{⊗(n−1)}(rest) / √(n!)` from the one-photon
/// norms and overlaps.
fn symmetric_sector_norm(n: usize, r2: f64, ra: C64, a2: f64) -> f64 {
    let nf = n as f64;
    let mut v = nf * r2 * a2.powi(n as i32 - 1);
    if n >= 2 {
        v += nf * (nf - 1.0) * ra.norm_sqr() * a2.powi(n as i32 - 2);
    }
    (v / factorial(n)).sqrt()
}

/// Evaluates `2∂^μ∂_[μΨ_ν]^(0,n) − J^ext_ν Ψ^(0,n−1)/√n` on the coherent
/// state with mode function `spec.a`, with the smeared external density.
pub fn verify_external_source_solution(spec: &CoherentSpec, charges: &ChargeSet, sigma: f64) -> Result<ExternalSourceReport> {
    let grid = spec.a.grid();
    let rho = charges.density(&grid, sigma)?;
    let (r0, ri) = maxwell_residual(&spec.a, &rho);
    let zero = Vector3Field::zeros(grid);
    let a_vec = spec.a.a.scaled(C64::new(-1.0, 0.0));
    let a2 = four_norm(&spec.a.a0, &a_vec).powi(2);
    let j2 = rho.norm().powi(2);
    let mut sector_residuals = Vec::new();
    for n in 1..=spec.n_max {
        let num = symmetric_sector_norm(n, four_norm(&r0, &ri).powi(2), four_inner(&r0, &ri, &spec.a.a0, &a_vec), a2);
        let den = symmetric_sector_norm(n, j2, four_inner(&rho, &zero, &spec.a.a0, &a_vec), a2);
        sector_residuals.push(if den > 0.0 { num / den } else { num });
    }
    let mean = r0.mean();
    let zero_part = ScalarField::from_fn(grid, |_| mean);
    let scale = four_norm(&rho, &zero).max(f64::MIN_POSITIVE);
    let scale = if j2 > 0.0 { scale } else { 1.0 };
    Ok(ExternalSourceReport {
        sector_residuals,
        zero_mode: zero_part.norm() / scale,
        remainder: four_norm(&r0.sub(&zero_part), &ri) / scale,
    })
}

/// Weak-form mismatch between the point-charge Coulomb potential and the
/// smeared source, tested against the lowest cosine mode along each axis
/// through the charge centroid: `Σ|⟨φ, −ΔA − ρ_σ⟩| / Σ|⟨φ, ρ_σ⟩|`.
pub fn weak_form_coulomb_residual(charges: &ChargeSet, grid: &GridSpec, sigma: f64) -> Result<f64> {
    charges.check(grid)?;
    let point = charges.density_with(grid, &SharpCutoffRegulator { k_max: f64::INFINITY })?;
    let a0 = inverse_laplacian(&point);
    let rho = charges.density(grid, sigma)?;
    let r = neg_laplacian(&a0).sub(&rho);
    let q: f64 = charges.charges.iter().map(|c| c.charge.abs()).sum::<f64>().max(f64::MIN_POSITIVE);
    let centre: [f64; 3] = std::array::from_fn(|a| charges.charges.iter().map(|c| c.charge.abs() * c.position[a]).sum::<f64>() / q);
    let k = 2.0 * std::f64::consts::PI / grid.length;
    let (mut num, mut den) = (0.0, 0.0);
    for axis in 0..3 {
        let phi = ScalarField::from_fn(*grid, |x| C64::new((k * (x[axis] - centre[axis])).cos(), 0.0));
        num += phi.inner(&r).norm();
        den += phi.inner(&rho).norm();
    }
    Ok(if den > 0.0 { num / den } else { num })
}

/// Relative change of a static coherent state under the sourced sector
/// evolution (`m = 0`, F representation) over `steps` steps.
pub fn static_coherent_drift(spec: &CoherentSpec, charges: &ChargeSet, p: &HamiltonianParams, steps: usize) -> Result<f64> {
    let grid = spec.a.grid();
    let mut p = p.clone();
    let mut src = crate::maxwell::Source::zeros(grid);
    src.j0 = charges.density(&grid, p.sigma)?;
    p.external = Some(src);
    let st = build_coherent(spec, &[], Representation::F)?;
    let out = crate::fock::evolve(&st, &p, steps)?;
    Ok(out.sub(&st).l2_norm() / st.l2_norm())
}

/// `g_σ * f` on the lattice, the pairing used by the coupling terms.
pub fn smear(f: &ScalarField, sigma: f64) -> Result<ScalarField> {
    let grid = f.grid;
    let ghat = kernel_spectrum(&GaussianRegulator { sigma }, &grid)?;
    let w = grid.cell() * (grid.sites() as f64).sqrt();
    Ok(apply_symbol(f, |m| C64::new(ghat[m] * w, 0.0)))
}

/// External potential acting on a spinor: `(A0 − α·𝐀)ψ`.
#[derive(Debug, Clone)]
pub struct ExternalPotential {
    pub a0: ScalarField,
    pub a: Vector3Field,
}

impl ExternalPotential {
    pub fn from_photon(a: &PhotonA) -> Self {
        Self { a0: a.a0.clone(), a: a.a.clone() }
    }

    pub fn smeared(&self, sigma: f64) -> Result<Self> {
        Ok(Self {
            a0: smear(&self.a0, sigma)?,
            a: Vector3Field { c: [smear(&self.a.c[0], sigma)?, smear(&self.a.c[1], sigma)?, smear(&self.a.c[2], sigma)?] },
        })
    }

    pub fn apply(&self, psi: &SpinorField) -> SpinorField {
        let g = gammas();
        let mut out = SpinorField::zeros(psi.grid(), psi.mass, psi.charge);
        for s in 0..4 {
            out.c[s] = psi.c[s].mul(&self.a0);
        }
        for a in 0..3 {
            let al = g.alpha(a + 1);
            for s in 0..4 {
                for sp in 0..4 {
                    if al[s][sp] != C64::new(0.0, 0.0) {
                        let t = psi.c[sp].mul(&self.a.c[a]).scaled(-al[s][sp]);
                        out.c[s] = out.c[s].add(&t);
                    }
                }
            }
        }
        out
    }
}

/// RK4 on a tower `i∂_t ψ_n = H_D ψ_n + e V ψ_{n+1}`, `ψ_{top}` free. A
/// single-level tower with `couple_self` is the Dirac equation in the
/// external potential.
fn tower_rk4(psi: &[SpinorField], v: &ExternalPotential, e: f64, dt: f64, steps: usize, couple_self: bool) -> Vec<SpinorField> {
    let rhs = |x: &[SpinorField]| -> Vec<SpinorField> {
        (0..x.len())
            .map(|n| {
                let mut h = free_dirac_apply(&x[n]);
                let src = if couple_self { Some(&x[n]) } else { x.get(n + 1) };
                if let Some(s) = src {
                    h = h.add(&v.apply(s).scaled(C64::new(e, 0.0)));
                }
                h.scaled(-I)
            })
            .collect()
    };
    let stage = |b: &[SpinorField], k: &[SpinorField], s: f64| -> Vec<SpinorField> {
        b.iter().zip(k).map(|(x, y)| x.add(&y.scaled(C64::new(s, 0.0)))).collect()
    };
    let mut cur = psi.to_vec();
    for _ in 0..steps {
        let k1 = rhs(&cur);
        let k2 = rhs(&stage(&cur, &k1, 0.5 * dt));
        let k3 = rhs(&stage(&cur, &k2, 0.5 * dt));
        let k4 = rhs(&stage(&cur, &k3, dt));
        cur = (0..cur.len())
            .map(|n| {
                cur[n]
                    .add(&k1[n].scaled(C64::new(dt / 6.0, 0.0)))
                    .add(&k2[n].scaled(C64::new(dt / 3.0, 0.0)))
                    .add(&k3[n].scaled(C64::new(dt / 3.0, 0.0)))
                    .add(&k4[n].scaled(C64::new(dt / 6.0, 0.0)))
            })
            .collect();
    }
    cur
}

/// Dirac evolution in a fixed external potential (RK4).
pub fn dirac_in_potential(psi: &SpinorField, v: &ExternalPotential, e: f64, dt: f64, steps: usize) -> SpinorField {
    tower_rk4(std::slice::from_ref(psi), v, e, dt, steps, true).remove(0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestParticleReport {
    /// `‖ψ_tower − ψ_external‖ / ‖ψ_external‖` at the final time.
    pub discrepancy: f64,
    /// `‖V_σ − V‖ / ‖V‖`, the smearing gap between the regularized and the
    /// pointwise potential.
    pub smearing_gap: f64,
}

/// Test particle in the coherent Coulomb state. Route one evolves `ψ` with
/// the smeared external potential; route two evolves the sector tower of
/// the product `ψ ⊗ coherent`, where sector `n` couples to sector `n + 1`
/// through the smeared pairing of the last photon slot and the top sector
/// is free.
pub fn test_particle_demo(psi0: &SpinorField, spec: &CoherentSpec, p: &HamiltonianParams, steps: usize) -> Result<TestParticleReport> {
    p.validate(&psi0.grid())?;
    let point = ExternalPotential::from_photon(&spec.a);
    // On the coherent state the pairing of sector n + 1 equals
    // √(n+1)·(1/√((n+1)!))·√(n!) V_σ ⊗ sector n = V_σ ⊗ sector n.
    let v = point.smeared(p.sigma)?;
    let tower = tower_rk4(&vec![psi0.clone(); spec.n_max + 1], &v, p.e, p.dt, steps, false);
    let direct = dirac_in_potential(psi0, &v, p.e, p.dt, steps);
    let vn = (point.a0.norm().powi(2) + point.a.norm().powi(2)).sqrt();
    let gap = (v.a0.sub(&point.a0).norm().powi(2) + v.a.sub(&point.a).norm().powi(2)).sqrt();
    Ok(TestParticleReport {
        discrepancy: tower[0].sub(&direct).norm() / direct.norm(),
        smearing_gap: if vn > 0.0 { gap / vn } else { 0.0 },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorizationReport {
    /// `‖e V ψ − (annihilation term of the product state)‖`.
    pub residual: f64,
    /// The same relative to `‖e V ψ‖` (equal to `residual` when that is 0).
    pub relative: f64,
}

/// Builds `ψ(T) ⊗ coherent(A)` with `ψ(T)` from the external-field Dirac
/// equation and compares the electron-equation coupling of the product
/// state with `e(A0 − α·𝐀)ψ`.
pub fn external_field_factorization_check(psi: &SpinorField, a: &PhotonA, p: &HamiltonianParams, steps: usize) -> Result<FactorizationReport> {
    let grid = psi.grid();
    p.validate(&grid)?;
    let v = ExternalPotential::from_photon(a);
    let psi_t = dirac_in_potential(psi, &v, p.e, p.dt, steps);
    let spec = CoherentSpec { a: a.clone(), n_max: 1 };
    let st = build_coherent(&spec, &[&psi_t], Representation::F)?;
    let mut hp = p.clone();
    hp.external = None;
    let h = SpectralHamiltonian::new(st.shape, &hp)?;
    let modes = spectral_values(&st);
    let coupled = vec![h.annihilation_block(&modes[1], 0), vec![Complex64::new(0.0, 0.0); modes[1].len()]];
    let rhs = from_spectral(st.shape, coupled);
    let lhs = v.apply(&psi_t).scaled(C64::new(p.e, 0.0)).interleaved();
    let diff = par::add_scaled(&lhs, C64::new(-1.0, 0.0), rhs.sectors[0].data());
    let cell = grid.cell();
    let residual = (par::norm_sqr(&diff) * cell).sqrt();
    let scale = (par::norm_sqr(&lhs) * cell).sqrt();
    Ok(FactorizationReport { residual, relative: if scale > 0.0 { residual / scale } else { residual } })
}

/// `(1,0)/(1,1)` wave function on a two-time slab: sectors of an
/// F-representation state with electron time `x0` and photon time `y0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoTimeState {
    pub state: SectorState,
    pub x0: f64,
    pub y0: f64,
    pub window: f64,
}

impl TwoTimeState {
    pub fn new(state: SectorState, window: f64) -> Result<Self> {
        let s = state.shape;
        if s.representation != Representation::F || s.m != 1 || s.n_max != 1 {
            return Err(Error::Shape("two-time states hold the (1,0) and (1,1) sectors in the F representation".into()));
        }
        Ok(Self { state, x0: 0.0, y0: 0.0, window })
    }

    fn advance(&self, h: &SpectralHamiltonian, parts: HamiltonianParts, dt: f64) -> Result<Self> {
        let (x0, y0) = if parts == HamiltonianParts::ELECTRON { (self.x0 + dt, self.y0) } else { (self.x0, self.y0 + dt) };
        if (x0 - y0).abs() > self.window * (1.0 + 1e-12) {
            return Err(Error::Window(format!("|x0 - y0| = {} exceeds the slab window {}", (x0 - y0).abs(), self.window)));
        }
        let psi = h.rk4_step_parts(&spectral_values(&self.state), dt, parts);
        Ok(Self { state: from_spectral(self.state.shape, psi), x0, y0, window: self.window })
    }
}

/// Advances the electron time then the photon time by `dt`, and in the
/// opposite order; returns `‖difference‖ / ‖Ψ‖`.
pub fn two_time_consistency_residual(state: &TwoTimeState, p: &HamiltonianParams, dt: f64) -> Result<f64> {
    let mut hp = p.clone();
    hp.external = None;
    let h = SpectralHamiltonian::new(state.state.shape, &hp)?;
    let (xy, yx) = par::join(
        || state.advance(&h, HamiltonianParts::ELECTRON, dt).and_then(|s| s.advance(&h, HamiltonianParts::PHOTON, dt)),
        || state.advance(&h, HamiltonianParts::PHOTON, dt).and_then(|s| s.advance(&h, HamiltonianParts::ELECTRON, dt)),
    );
    let (xy, yx) = (xy?, yx?);
    Ok(xy.state.sub(&yx.state).l2_norm() / state.state.l2_norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorial_and_sector_norm() {
        assert_eq!(factorial(0), 1.0);
        assert_eq!(factorial(4), 24.0);
        // n = 1: ‖r‖.
        assert!((symmetric_sector_norm(1, 4.0, C64::new(0.0, 0.0), 9.0) - 2.0).abs() < 1e-15);
    }
}
