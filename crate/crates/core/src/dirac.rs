//! Gamma matrices, the free Dirac propagator on the lattice, the Dirac
//! scalar product and current, and the tilted-plane delta integral.

use num_complex::Complex64;

use crate::container::{self, Header};
use crate::error::{Error, Result};
use crate::grid::{
    fft3_block, smeared_delta, Direction, GridSpec, ScalarField, Vector3Field,
};
use crate::par;

type C64 = Complex64;

/// Dense 4×4 complex matrix, row-major.
pub type Mat4 = [[C64; 4]; 4];

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Largest spatial tilt accepted by [`TiltedPlane`].
pub const TILT_MAX: f64 = 0.3;

pub fn mat_zero() -> Mat4 {
    [[ZERO; 4]; 4]
}

pub fn mat_identity() -> Mat4 {
    let mut m = mat_zero();
    for (a, row) in m.iter_mut().enumerate() {
        row[a] = ONE;
    }
    m
}

pub fn mat_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut m = mat_zero();
    for r in 0..4 {
        for c in 0..4 {
            m[r][c] = (0..4).map(|k| a[r][k] * b[k][c]).sum();
        }
    }
    m
}

pub fn mat_add(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut m = *a;
    for r in 0..4 {
        for c in 0..4 {
            m[r][c] += b[r][c];
        }
    }
    m
}

pub fn mat_scale(a: &Mat4, s: C64) -> Mat4 {
    let mut m = *a;
    m.iter_mut().flatten().for_each(|v| *v *= s);
    m
}

pub fn mat_adjoint(a: &Mat4) -> Mat4 {
    let mut m = mat_zero();
    for r in 0..4 {
        for c in 0..4 {
            m[r][c] = a[c][r].conj();
        }
    }
    m
}

pub fn mat_vec(a: &Mat4, v: &[C64; 4]) -> [C64; 4] {
    let mut out = [ZERO; 4];
    for r in 0..4 {
        out[r] = a[r][0] * v[0] + a[r][1] * v[1] + a[r][2] * v[2] + a[r][3] * v[3];
    }
    out
}

pub fn mat_max_abs_diff(a: &Mat4, b: &Mat4) -> f64 {
    let mut d: f64 = 0.0;
    for r in 0..4 {
        for c in 0..4 {
            d = d.max((a[r][c] - b[r][c]).norm());
        }
    }
    d
}

/// Minkowski metric `diag(+,-,-,-)`.
pub fn metric(mu: usize, nu: usize) -> f64 {
    match (mu, nu) {
        (0, 0) => 1.0,
        (a, b) if a == b => -1.0,
        _ => 0.0,
    }
}

/// The four gamma matrices `γ^μ`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaSet {
    pub gamma: [Mat4; 4],
}

impl GammaSet {
    /// `α^i = γ⁰γ^i` for `i` in 1..=3; `α^0 = I`.
    pub fn alpha(&self, i: usize) -> Mat4 {
        if i == 0 {
            mat_identity()
        } else {
            mat_mul(&self.gamma[0], &self.gamma[i])
        }
    }

    pub fn beta(&self) -> Mat4 {
        self.gamma[0]
    }

    /// `γ^μ u_μ` for a contravariant vector `u`.
    pub fn slash(&self, u: [f64; 4]) -> Mat4 {
        let mut m = mat_zero();
        for mu in 0..4 {
            m = mat_add(&m, &mat_scale(&self.gamma[mu], C64::new(metric(mu, mu) * u[mu], 0.0)));
        }
        m
    }
}

/// Builds a gamma-matrix set. Only `dirac_standard` is provided.
pub fn make_gammas(label: &str) -> Result<GammaSet> {
    if label != "dirac_standard" {
        return Err(Error::UnknownLabel(label.to_string()));
    }
    let sigma: [[[C64; 2]; 2]; 3] = [
        [[ZERO, ONE], [ONE, ZERO]],
        [[ZERO, -I], [I, ZERO]],
        [[ONE, ZERO], [ZERO, -ONE]],
    ];
    let mut g0 = mat_zero();
    g0[0][0] = ONE;
    g0[1][1] = ONE;
    g0[2][2] = -ONE;
    g0[3][3] = -ONE;
    let mut gamma = [g0, mat_zero(), mat_zero(), mat_zero()];
    for i in 0..3 {
        let g = &mut gamma[i + 1];
        for r in 0..2 {
            for c in 0..2 {
                g[r][c + 2] = sigma[i][r][c];
                g[r + 2][c] = -sigma[i][r][c];
            }
        }
    }
    Ok(GammaSet { gamma })
}

/// Shared standard-representation gamma matrices.
pub fn gammas() -> &'static GammaSet {
    static G: std::sync::OnceLock<GammaSet> = std::sync::OnceLock::new();
    G.get_or_init(|| make_gammas("dirac_standard").expect("standard representation"))
}

/// Free Dirac symbol `α·κ + mβ` at one mode.
pub fn dirac_symbol(kappa: [f64; 3], mass: f64) -> Mat4 {
    let g = gammas();
    let mut h = mat_scale(&g.beta(), C64::new(mass, 0.0));
    for i in 0..3 {
        h = mat_add(&h, &mat_scale(&g.alpha(i + 1), C64::new(kappa[i], 0.0)));
    }
    h
}

/// `exp(-i(α·κ + mβ)t)` in closed form; the symbol squares to `E²`.
pub fn dirac_exponential(kappa: [f64; 3], mass: f64, t: f64) -> Mat4 {
    let h = dirac_symbol(kappa, mass);
    let e = (kappa[0] * kappa[0] + kappa[1] * kappa[1] + kappa[2] * kappa[2] + mass * mass).sqrt();
    if e == 0.0 {
        return mat_identity();
    }
    let c = (e * t).cos();
    let s = (e * t).sin() / e;
    mat_add(&mat_scale(&mat_identity(), C64::new(c, 0.0)), &mat_scale(&h, C64::new(0.0, -s)))
}

/// Four-component spinor field with its mass and charge.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    pub c: [ScalarField; 4],
    pub mass: f64,
    pub charge: f64,
}

impl SpinorField {
    pub fn zeros(grid: GridSpec, mass: f64, charge: f64) -> Self {
        let z = ScalarField::zeros(grid);
        Self { c: [z.clone(), z.clone(), z.clone(), z], mass, charge }
    }

    pub fn grid(&self) -> GridSpec {
        self.c[0].grid
    }

    /// Scalar profile times a constant spinor.
    pub fn from_profile(profile: &ScalarField, spinor: [C64; 4], mass: f64, charge: f64) -> Self {
        Self {
            c: [
                profile.scaled(spinor[0]),
                profile.scaled(spinor[1]),
                profile.scaled(spinor[2]),
                profile.scaled(spinor[3]),
            ],
            mass,
            charge,
        }
    }

    pub fn check(&self) -> Result<()> {
        let g = self.grid();
        for c in &self.c {
            if c.grid != g {
                return Err(Error::SizeMismatch("spinor components on different grids".into()));
            }
            c.check_grid()?;
        }
        Ok(())
    }

    pub fn norm(&self) -> f64 {
        dirac_inner_product(self, self).map(|v| v.re.max(0.0).sqrt()).unwrap_or(f64::NAN)
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self { c: self.c.clone().map(|f| f.scaled(s)), mass: self.mass, charge: self.charge }
    }

    pub fn add(&self, o: &SpinorField) -> Self {
        let mut out = self.clone();
        for a in 0..4 {
            out.c[a] = self.c[a].add(&o.c[a]);
        }
        out
    }

    pub fn sub(&self, o: &SpinorField) -> Self {
        let mut out = self.clone();
        for a in 0..4 {
            out.c[a] = self.c[a].sub(&o.c[a]);
        }
        out
    }

    /// Components interleaved per site (spin fastest).
    pub fn interleaved(&self) -> Vec<C64> {
        container::interleave(&[&self.c[0], &self.c[1], &self.c[2], &self.c[3]])
    }

    pub fn from_interleaved(grid: GridSpec, data: &[C64], mass: f64, charge: f64) -> Result<Self> {
        let f = container::deinterleave(grid, data, 4)?;
        let [a, b, c, d]: [ScalarField; 4] =
            f.try_into().map_err(|_| Error::Format("expected four components".into()))?;
        Ok(Self { c: [a, b, c, d], mass, charge })
    }
}

/// Applies the per-mode matrix `sym(mode)` to a spinor in mode space.
pub fn apply_spinor_symbol(
    psi: &SpinorField,
    sym: impl Fn(usize) -> Mat4 + Sync + Send,
) -> SpinorField {
    let grid = psi.grid();
    let n = grid.n;
    let mut data = psi.interleaved();
    fft3_block(&mut data, n, 4, Direction::Forward);
    par::for_each_chunk(&mut data, 4, |mode, chunk| {
        let m = sym(mode);
        let v = [chunk[0], chunk[1], chunk[2], chunk[3]];
        chunk.copy_from_slice(&mat_vec(&m, &v));
    });
    fft3_block(&mut data, n, 4, Direction::Inverse);
    SpinorField::from_interleaved(grid, &data, psi.mass, psi.charge).expect("shape preserved")
}

/// Exact free evolution by time `t`.
pub fn free_dirac_evolve(psi: &SpinorField, t: f64) -> SpinorField {
    let modes = psi.grid().modes();
    let mass = psi.mass;
    apply_spinor_symbol(psi, |m| dirac_exponential(modes.kappa[m], mass, t))
}

/// `H_free ψ = (-i α·∇ + mβ) ψ`.
pub fn free_dirac_apply(psi: &SpinorField) -> SpinorField {
    let modes = psi.grid().modes();
    let mass = psi.mass;
    apply_spinor_symbol(psi, |m| dirac_symbol(modes.kappa[m], mass))
}

/// Flat-slice Dirac product `h³ Σ ψ†φ`.
pub fn dirac_inner_product(psi: &SpinorField, phi: &SpinorField) -> Result<C64> {
    psi.check()?;
    phi.check()?;
    if psi.grid() != phi.grid() {
        return Err(Error::SizeMismatch("spinors on different grids".into()));
    }
    Ok((0..4).map(|a| psi.c[a].inner(&phi.c[a])).sum())
}

/// Current `j^μ = ψ̄γ^μψ = ψ†α^μψ`.
#[derive(Debug, Clone)]
pub struct DiracCurrent {
    pub j0: ScalarField,
    pub j: Vector3Field,
}

pub fn dirac_current(psi: &SpinorField) -> DiracCurrent {
    let grid = psi.grid();
    let g = gammas();
    let alpha = [g.alpha(1), g.alpha(2), g.alpha(3)];
    let mut j0 = ScalarField::zeros(grid);
    let mut j = Vector3Field::zeros(grid);
    for s in 0..grid.sites() {
        let v = [psi.c[0].data[s], psi.c[1].data[s], psi.c[2].data[s], psi.c[3].data[s]];
        j0.data[s] = C64::new(v.iter().map(|x| x.norm_sqr()).sum(), 0.0);
        for i in 0..3 {
            let av = mat_vec(&alpha[i], &v);
            j.c[i].data[s] = (0..4).map(|a| v[a].conj() * av[a]).sum();
        }
    }
    DiracCurrent { j0, j }
}

/// Columns of the smeared propagator: column `s'` is the free evolution of
/// `δ_σ(x - center)` times column `s'` of `γ⁰`.
pub fn dirac_propagator_columns(
    grid: &GridSpec,
    mass: f64,
    t: f64,
    sigma: f64,
    center: [f64; 3],
) -> Result<[SpinorField; 4]> {
    let delta = smeared_delta(center, sigma, grid)?;
    let g0 = gammas().gamma[0];
    let col = |s: usize| {
        let spinor = [g0[0][s], g0[1][s], g0[2][s], g0[3][s]];
        free_dirac_evolve(&SpinorField::from_profile(&delta, spinor, mass, 0.0), t)
    };
    Ok([col(0), col(1), col(2), col(3)])
}

/// Largest probability density of the propagator columns outside the ball
/// of radius `radius` about `center`, relative to the overall largest.
pub fn propagator_leakage(cols: &[SpinorField; 4], center: [f64; 3], radius: f64) -> f64 {
    let grid = cols[0].grid();
    let mut peak: f64 = 0.0;
    let mut outside: f64 = 0.0;
    for s in 0..grid.sites() {
        let d = grid.displacement(s, center);
        let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        for col in cols {
            let rho: f64 = col.c.iter().map(|f| f.data[s].norm_sqr()).sum();
            peak = peak.max(rho);
            if r > radius {
                outside = outside.max(rho);
            }
        }
    }
    outside / peak
}

/// Spacelike plane through the origin with unit normal `u = (u⁰, 𝐮)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltedPlane {
    pub u: [f64; 4],
}

impl TiltedPlane {
    pub fn new(tilt: [f64; 3]) -> Result<Self> {
        let t2 = tilt[0] * tilt[0] + tilt[1] * tilt[1] + tilt[2] * tilt[2];
        if t2.sqrt() > TILT_MAX {
            return Err(Error::TiltTooLarge { tilt: t2.sqrt(), max: TILT_MAX });
        }
        Ok(Self { u: [(1.0 + t2).sqrt(), tilt[0], tilt[1], tilt[2]] })
    }

    /// Time of the plane above spatial point `x`.
    pub fn time_at(&self, x: [f64; 3]) -> f64 {
        (self.u[1] * x[0] + self.u[2] * x[1] + self.u[3] * x[2]) / self.u[0]
    }
}

/// Result of a tilted-plane integration.
#[derive(Debug, Clone)]
pub struct TiltedIntegral {
    pub matrix: Mat4,
    /// Estimated time-interpolation error (max entry).
    pub interpolation_error: f64,
    pub slices: usize,
}

fn lagrange_cubic(x: f64) -> [f64; 4] {
    // Nodes at -1, 0, 1, 2.
    [
        -x * (x - 1.0) * (x - 2.0) / 6.0,
        (x + 1.0) * (x - 1.0) * (x - 2.0) / 2.0,
        -(x + 1.0) * x * (x - 2.0) / 2.0,
        (x + 1.0) * x * (x - 1.0) / 6.0,
    ]
}

/// Integrates `S(x) γ^μ u_μ f(x)` over the plane `x⁰ = 𝐮·𝐱/u⁰` with the
/// propagator source at the box centre. `f` receives the time and the
/// displacement from the source. Propagator values between the stored
/// slices (spacing `h/2`) are interpolated with cubic Lagrange stencils; the
/// error estimate compares against the same rule on every second slice.
pub fn tilted_plane_delta_integral(
    grid: &GridSpec,
    mass: f64,
    sigma: f64,
    plane: &TiltedPlane,
    f: &(dyn Fn(f64, [f64; 3]) -> C64 + Sync),
) -> Result<TiltedIntegral> {
    let center = [grid.length / 2.0; 3];
    let dt = grid.spacing() / 2.0;
    let sites = grid.sites();
    let disp: Vec<[f64; 3]> = (0..sites).map(|s| grid.displacement(s, center)).collect();
    let tau: Vec<f64> = disp.iter().map(|d| plane.time_at(*d)).collect();
    let tmax = tau.iter().fold(0.0f64, |a, t| a.max(t.abs()));
    // Coarse stencils reach two coarse slices (four fine) beyond the plane.
    let half = (tmax / dt).ceil() as i64 + 6;
    let weight = grid.cell() / plane.u[0];
    let slash = gammas().slash(plane.u);
    let fvals: Vec<C64> = (0..sites).map(|s| f(tau[s], disp[s])).collect();

    let mut fine = mat_zero();
    let mut coarse = mat_zero();
    for k in -half..=half {
        let t = k as f64 * dt;
        let mut needed = false;
        let mut wf = vec![0.0; sites];
        let mut wc = vec![0.0; sites];
        for s in 0..sites {
            let x = tau[s] / dt;
            let base = x.floor() as i64;
            let l = lagrange_cubic(x - base as f64);
            for (o, w) in l.iter().enumerate() {
                if base - 1 + o as i64 == k {
                    wf[s] = *w;
                    needed = true;
                }
            }
            let xc = tau[s] / (2.0 * dt);
            let bc = xc.floor() as i64;
            let lc = lagrange_cubic(xc - bc as f64);
            for (o, w) in lc.iter().enumerate() {
                if 2 * (bc - 1 + o as i64) == k {
                    wc[s] = *w;
                    needed = true;
                }
            }
        }
        if !needed {
            continue;
        }
        if k == -half || k == half {
            return Err(Error::SlabTooThin(format!("stencil reaches slice {k}")));
        }
        let cols = dirac_propagator_columns(grid, mass, t, sigma, center)?;
        for s in 0..sites {
            if wf[s] == 0.0 && wc[s] == 0.0 {
                continue;
            }
            let mut smat = mat_zero();
            for (sp, col) in cols.iter().enumerate() {
                for a in 0..4 {
                    smat[a][sp] = col.c[a].data[s];
                }
            }
            let contrib = mat_scale(&mat_mul(&smat, &slash), fvals[s] * weight);
            if wf[s] != 0.0 {
                fine = mat_add(&fine, &mat_scale(&contrib, C64::new(wf[s], 0.0)));
            }
            if wc[s] != 0.0 {
                coarse = mat_add(&coarse, &mat_scale(&contrib, C64::new(wc[s], 0.0)));
            }
        }
    }
    Ok(TiltedIntegral {
        matrix: fine,
        interpolation_error: mat_max_abs_diff(&fine, &coarse) / 15.0,
        slices: (2 * half + 1) as usize,
    })
}

/// Stored propagator slices.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagatorSlab {
    pub grid: GridSpec,
    pub times: Vec<f64>,
    pub columns: Vec<[SpinorField; 4]>,
}

impl PropagatorSlab {
    pub fn build(grid: &GridSpec, mass: f64, sigma: f64, times: &[f64]) -> Result<Self> {
        let center = [grid.length / 2.0; 3];
        let columns = times
            .iter()
            .map(|&t| dirac_propagator_columns(grid, mass, t, sigma, center))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { grid: *grid, times: times.to_vec(), columns })
    }

    /// Writes the slab as one container; components are (slice, column, spin).
    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let count = 16 * self.times.len();
        let mut header = Header::new(self.grid, vec![self.grid.n; 3], count, "dirac_propagator_slab");
        header.metadata.insert("times".into(), serde_json::json!(self.times));
        header.metadata.insert("mass".into(), serde_json::json!(self.columns.first().map(|c| c[0].mass)));
        let mut fields = Vec::with_capacity(count);
        for cols in &self.columns {
            for col in cols {
                for comp in &col.c {
                    fields.push(comp);
                }
            }
        }
        container::write(path, &header, &container::interleave(&fields))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let (header, data) = container::read(path)?;
        if header.tag != "dirac_propagator_slab" {
            return Err(Error::Format(format!("unexpected tag {}", header.tag)));
        }
        let times: Vec<f64> = serde_json::from_value(
            header.metadata.get("times").cloned().ok_or_else(|| Error::Format("missing times".into()))?,
        )?;
        let mass: f64 = header.metadata.get("mass").and_then(|v| v.as_f64()).unwrap_or(0.0);
        let fields = container::deinterleave(header.grid, &data, header.component_count)?;
        let mut it = fields.into_iter();
        let mut columns = Vec::new();
        for _ in 0..times.len() {
            let mut next_col = || -> SpinorField {
                let c = [it.next().unwrap(), it.next().unwrap(), it.next().unwrap(), it.next().unwrap()];
                SpinorField { c, mass, charge: 0.0 }
            };
            columns.push([next_col(), next_col(), next_col(), next_col()]);
        }
        Ok(Self { grid: header.grid, times, columns })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn clifford_relations_hold_exactly() {
        let g = make_gammas("dirac_standard").unwrap();
        for mu in 0..4 {
            for nu in 0..4 {
                let ac = mat_add(&mat_mul(&g.gamma[mu], &g.gamma[nu]), &mat_mul(&g.gamma[nu], &g.gamma[mu]));
                let expect = mat_scale(&mat_identity(), C64::new(2.0 * metric(mu, nu), 0.0));
                assert_eq!(ac, expect);
                let tr: C64 = (0..4).map(|a| mat_mul(&g.gamma[mu], &g.gamma[nu])[a][a]).sum();
                assert_eq!(tr, C64::new(4.0 * metric(mu, nu), 0.0));
            }
        }
        assert_eq!(mat_adjoint(&g.gamma[0]), g.gamma[0]);
        for i in 1..4 {
            assert_eq!(mat_adjoint(&g.gamma[i]), mat_scale(&g.gamma[i], -ONE));
            assert_eq!(mat_adjoint(&g.alpha(i)), g.alpha(i));
        }
        assert_eq!(g.alpha(0), mat_identity());
        assert!(make_gammas("weyl").is_err());
    }

    #[test]
    fn gamma0_gamma_nu_is_self_adjoint() {
        let g = gammas();
        for nu in 0..4 {
            let lower = mat_scale(&g.gamma[nu], C64::new(metric(nu, nu), 0.0));
            let m = mat_mul(&g.gamma[0], &lower);
            assert_eq!(mat_adjoint(&m), m);
        }
    }

    #[test]
    fn zero_mode_massless_is_static() {
        let g = GridSpec::new(4, 1.0).unwrap();
        let f = ScalarField::from_fn(g, |_| ONE);
        let psi = SpinorField::from_profile(&f, [ONE, I, ZERO, ONE], 0.0, 0.0);
        let out = free_dirac_evolve(&psi, 0.7);
        assert!(out.sub(&psi).norm() < 1e-13);
    }

    #[test]
    fn evolution_is_unitary_and_a_group() {
        let g = GridSpec::new(8, 2.0).unwrap();
        let psi = SpinorField {
            c: std::array::from_fn(|a| crate::random::complex_field(&g, 11, a as u64)),
            mass: 0.7,
            charge: 0.0,
        };
        let n0 = psi.norm();
        let a = free_dirac_evolve(&psi, 0.3);
        assert!((a.norm() - n0).abs() < 1e-12 * n0);
        let ab = free_dirac_evolve(&a, -0.8);
        let direct = free_dirac_evolve(&psi, -0.5);
        assert!(ab.sub(&direct).norm() < 1e-12 * n0);
        assert!(free_dirac_evolve(&ab, 0.5).sub(&psi).norm() < 1e-12 * n0);
    }

    #[test]
    fn current_density_is_nonnegative() {
        let g = GridSpec::new(4, 1.0).unwrap();
        let psi = SpinorField {
            c: std::array::from_fn(|a| crate::random::complex_field(&g, 2, a as u64)),
            mass: 1.0,
            charge: 0.0,
        };
        let j = dirac_current(&psi);
        assert!(j.j0.data.iter().all(|v| v.re >= 0.0 && v.im == 0.0));
        assert!(j.j.c.iter().all(|c| c.data.iter().all(|v| v.im.abs() < 1e-12)));
        let zero = SpinorField::zeros(g, 1.0, 0.0);
        assert_eq!(dirac_current(&zero).j0.max_abs(), 0.0);
    }

    #[test]
    fn propagator_starts_as_smeared_gamma0_delta() {
        let g = GridSpec::new(8, 4.0).unwrap();
        let c = [2.0; 3];
        let cols = dirac_propagator_columns(&g, 1.0, 0.0, 2.0 * g.spacing(), c).unwrap();
        let d = smeared_delta(c, 2.0 * g.spacing(), &g).unwrap();
        let g0 = gammas().gamma[0];
        for s in 0..4 {
            for a in 0..4 {
                let expect = d.scaled(g0[a][s]);
                assert!(cols[s].c[a].sub(&expect).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn slab_round_trip() {
        let g = GridSpec::new(4, 2.0).unwrap();
        let slab = PropagatorSlab::build(&g, 0.5, g.spacing(), &[0.0, 0.25]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("slab.bin");
        slab.save(&p).unwrap();
        assert_eq!(PropagatorSlab::load(&p).unwrap(), slab);
    }

    #[test]
    fn zero_tilt_constant_function_gives_identity() {
        let g = GridSpec::new(16, 2.0 * PI).unwrap();
        let plane = TiltedPlane::new([0.0; 3]).unwrap();
        let r = tilted_plane_delta_integral(&g, 1.0, 2.0 * g.spacing(), &plane, &|_, _| ONE).unwrap();
        assert!(mat_max_abs_diff(&r.matrix, &mat_identity()) < 1e-12);
        assert!(TiltedPlane::new([0.31, 0.0, 0.0]).is_err());
    }
}
