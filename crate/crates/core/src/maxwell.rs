//! Complex photon wave functions in potential form `(A0, 𝐀)` and field form
//! `(𝐄, 𝐁)`, the Coulomb-gauge bijection between them, free and sourced
//! evolution, constraint residuals and the photon scalar products.
//!
//! Sign conventions: `A^μ = (A0, 𝐀)`, `A_μ = (A0, −𝐀)`, `𝐄 = −∇A0 − ∂₀𝐀`,
//! `𝐁 = ∇×𝐀`, `F_{0i} = E^i`, `F_{ij} = −ε_{ijk}B^k`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::container::{self, Header};
use crate::error::{Error, Result};
use crate::grid::{
    curl, divergence, fft3_block, gradient, inverse_laplacian, Direction, GridSpec, ScalarField,
    Vector3Field,
};
use crate::par;

type C64 = Complex64;
const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Relative tolerance on `∇·𝐁` accepted by [`d_inverse_coulomb`].
pub const B_DIVERGENCE_TOL: f64 = 1e-8;
/// Relative tolerance of the Lorenz/positive-energy guard.
pub const FOURIER_GUARD_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GaugeTag {
    Coulomb,
    Lorenz,
    Other,
}

/// Field-strength representation.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonF {
    pub e: Vector3Field,
    pub b: Vector3Field,
}

/// Potential representation with its time derivatives on the slice.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonA {
    pub a0: ScalarField,
    pub a: Vector3Field,
    pub a0_dot: ScalarField,
    pub a_dot: Vector3Field,
    pub gauge: GaugeTag,
}

/// Charge density and current.
#[derive(Debug, Clone, PartialEq)]
pub struct Source {
    pub j0: ScalarField,
    pub j: Vector3Field,
}

impl Source {
    pub fn zeros(grid: GridSpec) -> Self {
        Self { j0: ScalarField::zeros(grid), j: Vector3Field::zeros(grid) }
    }
}

impl PhotonF {
    pub fn zeros(grid: GridSpec) -> Self {
        Self { e: Vector3Field::zeros(grid), b: Vector3Field::zeros(grid) }
    }

    pub fn grid(&self) -> GridSpec {
        self.e.grid()
    }

    pub fn norm(&self) -> f64 {
        (self.e.norm().powi(2) + self.b.norm().powi(2)).sqrt()
    }

    pub fn sub(&self, o: &PhotonF) -> PhotonF {
        PhotonF { e: self.e.sub(&o.e), b: self.b.sub(&o.b) }
    }

    pub fn add(&self, o: &PhotonF) -> PhotonF {
        PhotonF { e: self.e.add(&o.e), b: self.b.add(&o.b) }
    }

    pub fn scaled(&self, s: C64) -> PhotonF {
        PhotonF { e: self.e.scaled(s), b: self.b.scaled(s) }
    }

    /// The six components `(E1, E2, E3, B1, B2, B3)`.
    pub fn components(&self) -> [&ScalarField; 6] {
        [&self.e.c[0], &self.e.c[1], &self.e.c[2], &self.b.c[0], &self.b.c[1], &self.b.c[2]]
    }

    pub fn from_components(c: Vec<ScalarField>) -> Result<Self> {
        let [e1, e2, e3, b1, b2, b3]: [ScalarField; 6] =
            c.try_into().map_err(|_| Error::Format("expected six components".into()))?;
        Ok(Self { e: Vector3Field { c: [e1, e2, e3] }, b: Vector3Field { c: [b1, b2, b3] } })
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        container::write_fields(path, "photon_F", &self.components())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let (_, f) = container::read_fields(path, "photon_F")?;
        Self::from_components(f)
    }
}

impl PhotonA {
    pub fn zeros(grid: GridSpec, gauge: GaugeTag) -> Self {
        Self {
            a0: ScalarField::zeros(grid),
            a: Vector3Field::zeros(grid),
            a0_dot: ScalarField::zeros(grid),
            a_dot: Vector3Field::zeros(grid),
            gauge,
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.a0.grid
    }

    /// The eight components `(A0, 𝐀, Ȧ0, 𝐀̇)`.
    pub fn components(&self) -> [&ScalarField; 8] {
        [
            &self.a0, &self.a.c[0], &self.a.c[1], &self.a.c[2], &self.a0_dot, &self.a_dot.c[0],
            &self.a_dot.c[1], &self.a_dot.c[2],
        ]
    }

    /// L² norm of values and dots together.
    pub fn norm(&self) -> f64 {
        self.components().iter().map(|c| c.norm().powi(2)).sum::<f64>().sqrt()
    }

    pub fn add(&self, o: &PhotonA) -> PhotonA {
        PhotonA {
            a0: self.a0.add(&o.a0),
            a: self.a.add(&o.a),
            a0_dot: self.a0_dot.add(&o.a0_dot),
            a_dot: self.a_dot.add(&o.a_dot),
            gauge: if self.gauge == o.gauge { self.gauge } else { GaugeTag::Other },
        }
    }

    pub fn sub(&self, o: &PhotonA) -> PhotonA {
        self.add(&o.scaled(C64::new(-1.0, 0.0)))
    }

    pub fn scaled(&self, s: C64) -> PhotonA {
        PhotonA {
            a0: self.a0.scaled(s),
            a: self.a.scaled(s),
            a0_dot: self.a0_dot.scaled(s),
            a_dot: self.a_dot.scaled(s),
            gauge: self.gauge,
        }
    }

    /// Pure gauge potential `A_μ = ∂_μθ / e` from `θ` and its first two
    /// time derivatives.
    pub fn pure_gauge(theta: &ScalarField, theta_dot: &ScalarField, theta_ddot: &ScalarField, e: f64) -> Self {
        let s = C64::new(1.0 / e, 0.0);
        let grad = gradient(theta).scaled(-s);
        let grad_dot = gradient(theta_dot).scaled(-s);
        PhotonA {
            a0: theta_dot.scaled(s),
            a: grad,
            a0_dot: theta_ddot.scaled(s),
            a_dot: grad_dot,
            gauge: GaugeTag::Other,
        }
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let mut header = Header::new(self.grid(), vec![self.grid().n; 3], 8, "photon_A");
        header.metadata.insert("gauge".into(), serde_json::to_value(self.gauge)?);
        container::write(path, &header, &container::interleave(&self.components()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let (header, data) = container::read(path)?;
        if header.tag != "photon_A" {
            return Err(Error::Format(format!("unexpected tag {}", header.tag)));
        }
        let gauge = header
            .metadata
            .get("gauge")
            .map(|v| serde_json::from_value(v.clone()))
            .transpose()?
            .unwrap_or(GaugeTag::Other);
        let mut f = container::deinterleave(header.grid, &data, 8)?.into_iter();
        let mut next = || f.next().expect("eight components");
        let a0 = next();
        let a = Vector3Field { c: [next(), next(), next()] };
        let a0_dot = next();
        let a_dot = Vector3Field { c: [next(), next(), next()] };
        Ok(Self { a0, a, a0_dot, a_dot, gauge })
    }
}

/// `F = dA`.
pub fn d_apply(a: &PhotonA) -> PhotonF {
    let e = gradient(&a.a0).add(&a.a_dot).scaled(C64::new(-1.0, 0.0));
    PhotonF { e, b: curl(&a.a) }
}

fn vec_inverse_laplacian(v: &Vector3Field) -> Vector3Field {
    v.map(inverse_laplacian)
}

/// Relative size of `∇·𝐁` against `k₁‖𝐁‖` with `k₁ = 2π/L`.
pub fn b_divergence_residual(f: &PhotonF) -> f64 {
    let grid = f.grid();
    let k1 = 2.0 * std::f64::consts::PI / grid.length;
    let nb = f.b.norm();
    let div = divergence(&f.b).norm();
    if nb == 0.0 {
        div
    } else {
        div / (k1 * nb)
    }
}

/// Coulomb-gauge potentials for a field: `A0 = (−Δ)⁻¹∇·𝐄`,
/// `𝐀 = (−Δ)⁻¹∇×𝐁`, `𝐀̇ = −𝐄 − ∇A0`, `Ȧ0 = (−Δ)⁻¹∇·(∇×𝐁 − 𝐉)`.
pub fn d_inverse_coulomb(f: &PhotonF, j: &Source) -> Result<PhotonA> {
    let r = b_divergence_residual(f);
    if r > B_DIVERGENCE_TOL {
        return Err(Error::Divergence(r));
    }
    let a0 = inverse_laplacian(&divergence(&f.e));
    let a = vec_inverse_laplacian(&curl(&f.b));
    let a_dot = f.e.add(&gradient(&a0)).scaled(C64::new(-1.0, 0.0));
    let a0_dot = inverse_laplacian(&divergence(&curl(&f.b).sub(&j.j)));
    Ok(PhotonA { a0, a, a0_dot, a_dot, gauge: GaugeTag::Coulomb })
}

/// Spectral coefficients of a vector field, one array per component.
pub(crate) fn forward_vec(v: &Vector3Field) -> [Vec<C64>; 3] {
    let n = v.grid().n;
    v.c.clone().map(|mut f| {
        fft3_block(&mut f.data, n, 1, Direction::Forward);
        f.data
    })
}

pub(crate) fn inverse_vec(grid: GridSpec, v: [Vec<C64>; 3]) -> Vector3Field {
    Vector3Field {
        c: v.map(|mut d| {
            fft3_block(&mut d, grid.n, 1, Direction::Inverse);
            ScalarField { grid, data: d }
        }),
    }
}

fn forward(f: &ScalarField) -> Vec<C64> {
    let mut d = f.data.clone();
    fft3_block(&mut d, f.grid.n, 1, Direction::Forward);
    d
}

pub(crate) fn cross_r(a: [f64; 3], b: [C64; 3]) -> [C64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot_r(a: [f64; 3], b: [C64; 3]) -> C64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn unit(k: [f64; 3], norm: f64) -> [f64; 3] {
    [k[0] / norm, k[1] / norm, k[2] / norm]
}

/// Splits a vector into parts along and across the unit vector `u`.
fn split(u: [f64; 3], v: [C64; 3]) -> ([C64; 3], [C64; 3]) {
    let p = dot_r(u, v);
    let l = [u[0] * p, u[1] * p, u[2] * p];
    (l, [v[0] - l[0], v[1] - l[1], v[2] - l[2]])
}

/// Applies `op(mode, E, B) -> (E, B)` in mode space.
fn map_modes(f: &PhotonF, op: impl Fn(usize, [C64; 3], [C64; 3]) -> ([C64; 3], [C64; 3]) + Sync) -> PhotonF {
    let grid = f.grid();
    let e = forward_vec(&f.e);
    let b = forward_vec(&f.b);
    let results = par::map_range(grid.sites(), |m| {
        op(m, [e[0][m], e[1][m], e[2][m]], [b[0][m], b[1][m], b[2][m]])
    });
    let mut eo: [Vec<C64>; 3] = std::array::from_fn(|_| Vec::with_capacity(grid.sites()));
    let mut bo: [Vec<C64>; 3] = std::array::from_fn(|_| Vec::with_capacity(grid.sites()));
    for (ev, bv) in results {
        for a in 0..3 {
            eo[a].push(ev[a]);
            bo[a].push(bv[a]);
        }
    }
    PhotonF { e: inverse_vec(grid, eo), b: inverse_vec(grid, bo) }
}

/// Exact free evolution: transverse parts rotate with `e^{∓i|κ|t}`,
/// longitudinal parts and null modes are static.
pub fn free_maxwell_evolve(f: &PhotonF, t: f64) -> PhotonF {
    let modes = f.grid().modes();
    map_modes(f, |m, e, b| {
        if modes.is_null(m) {
            return (e, b);
        }
        let w = modes.norm(m);
        let u = unit(modes.kappa[m], w);
        let (el, et) = split(u, e);
        let (bl, bt) = split(u, b);
        let (c, s) = ((w * t).cos(), (w * t).sin());
        let kb = cross_r(u, bt);
        let ke = cross_r(u, et);
        let mut eo = [C64::new(0.0, 0.0); 3];
        let mut bo = [C64::new(0.0, 0.0); 3];
        for a in 0..3 {
            eo[a] = el[a] + c * et[a] + I * s * kb[a];
            bo[a] = bl[a] + c * bt[a] - I * s * ke[a];
        }
        (eo, bo)
    })
}

/// Keeps the `e^{−i|κ|t}` branch of the transverse part.
pub fn positive_energy_project(f: &PhotonF) -> PhotonF {
    let modes = f.grid().modes();
    map_modes(f, |m, e, b| {
        let zero = [C64::new(0.0, 0.0); 3];
        if modes.is_null(m) {
            return (zero, zero);
        }
        let u = unit(modes.kappa[m], modes.norm(m));
        let (_, et) = split(u, e);
        let (_, bt) = split(u, b);
        let kb = cross_r(u, bt);
        let em = [(et[0] - kb[0]) * 0.5, (et[1] - kb[1]) * 0.5, (et[2] - kb[2]) * 0.5];
        (em, cross_r(u, em))
    })
}

/// Relative size of `𝐁 + i(−Δ)^{-1/2}∇×𝐄` over modes with `κ ≠ 0`.
pub fn lp_constraint_residual(f: &PhotonF) -> f64 {
    let grid = f.grid();
    let modes = grid.modes();
    let e = forward_vec(&f.e);
    let b = forward_vec(&f.b);
    let parts = par::map_range(grid.sites(), |m| {
        if modes.is_null(m) {
            return (0.0, 0.0);
        }
        let u = unit(modes.kappa[m], modes.norm(m));
        let ev = [e[0][m], e[1][m], e[2][m]];
        let bv = [b[0][m], b[1][m], b[2][m]];
        let ke = cross_r(u, ev);
        let (_, et) = split(u, ev);
        let r: f64 = (0..3).map(|a| (bv[a] - ke[a]).norm_sqr()).sum();
        let s: f64 = (0..3).map(|a| et[a].norm_sqr() + bv[a].norm_sqr()).sum();
        (r, s)
    });
    let (r, s) = parts.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    if s == 0.0 {
        0.0
    } else {
        (r / (0.5 * s)).sqrt()
    }
}

/// RK4 evolution of `∂₀𝐄 = ∇×𝐁 − 𝐉`, `∂₀𝐁 = −∇×𝐄` with a static source.
pub fn sourced_maxwell_evolve(f: &PhotonF, j: &Source, dt: f64, steps: usize) -> Result<PhotonF> {
    let grid = f.grid();
    let max = grid.spacing() / 4.0;
    if dt.abs() > max * (1.0 + 1e-12) {
        return Err(Error::TimeStep { dt, max });
    }
    let modes = grid.modes();
    let jh = forward_vec(&j.j);
    let out = map_modes(f, |m, e, b| {
        let k = modes.kappa[m];
        let jm = [jh[0][m], jh[1][m], jh[2][m]];
        let rhs = |e: [C64; 3], b: [C64; 3]| -> ([C64; 3], [C64; 3]) {
            let kb = cross_r(k, b);
            let ke = cross_r(k, e);
            (
                std::array::from_fn(|a| I * kb[a] - jm[a]),
                std::array::from_fn(|a| -I * ke[a]),
            )
        };
        let (mut e, mut b) = (e, b);
        for _ in 0..steps {
            let (k1e, k1b) = rhs(e, b);
            let (k2e, k2b) = rhs(
                std::array::from_fn(|a| e[a] + 0.5 * dt * k1e[a]),
                std::array::from_fn(|a| b[a] + 0.5 * dt * k1b[a]),
            );
            let (k3e, k3b) = rhs(
                std::array::from_fn(|a| e[a] + 0.5 * dt * k2e[a]),
                std::array::from_fn(|a| b[a] + 0.5 * dt * k2b[a]),
            );
            let (k4e, k4b) = rhs(
                std::array::from_fn(|a| e[a] + dt * k3e[a]),
                std::array::from_fn(|a| b[a] + dt * k3b[a]),
            );
            for a in 0..3 {
                e[a] += dt / 6.0 * (k1e[a] + 2.0 * k2e[a] + 2.0 * k3e[a] + k4e[a]);
                b[a] += dt / 6.0 * (k1b[a] + 2.0 * k2b[a] + 2.0 * k3b[a] + k4b[a]);
            }
        }
        (e, b)
    });
    Ok(out)
}

/// One RK4 step; see [`sourced_maxwell_evolve`].
pub fn sourced_maxwell_step(f: &PhotonF, j: &Source, dt: f64) -> Result<PhotonF> {
    sourced_maxwell_evolve(f, j, dt, 1)
}

/// Relative residuals of `∇·𝐄 = ρ` and `∇·𝐁 = 0`. Divergences are compared
/// with `k₁·‖field‖` (plus `‖ρ‖`), `k₁ = 2π/L`.
pub fn constraint_residuals(f: &PhotonF, rho: &ScalarField) -> (f64, f64) {
    let grid = f.grid();
    let k1 = 2.0 * std::f64::consts::PI / grid.length;
    let re = divergence(&f.e).sub(rho).norm();
    let de = k1 * f.e.norm() + rho.norm();
    let rb = divergence(&f.b).norm();
    let db = k1 * f.b.norm();
    (if de > 0.0 { re / de } else { re }, if db > 0.0 { rb / db } else { rb })
}

/// Flat-slice position-space photon product.
pub fn photon_ip_position(a: &PhotonA, b: &PhotonA) -> Result<C64> {
    if a.grid() != b.grid() {
        return Err(Error::SizeMismatch("photon fields on different grids".into()));
    }
    let grid = a.grid();
    let div_a = divergence(&a.a);
    let div_b = divergence(&b.a);
    let sum = par::sum_complex(grid.sites(), |r| {
        let mut s = C64::new(0.0, 0.0);
        for x in r {
            let av = |f: &Vector3Field| [f.c[0].data[x], f.c[1].data[x], f.c[2].data[x]];
            let (a0, aa, a0d, aad) = (a.a0.data[x], av(&a.a), a.a0_dot.data[x], av(&a.a_dot));
            let (b0, bb, b0d, bbd) = (b.a0.data[x], av(&b.a), b.a0_dot.data[x], av(&b.a_dot));
            let mink = |p0: C64, p: [C64; 3], q0: C64, q: [C64; 3]| {
                p0.conj() * q0 - (0..3).map(|i| p[i].conj() * q[i]).sum::<C64>()
            };
            s += mink(a0, aa, b0d, bbd) - a0.conj() * (b0d + div_b.data[x]) - mink(a0d, aad, b0, bb)
                + (a0d + div_a.data[x]).conj() * b0;
        }
        s
    });
    Ok(-I * sum * grid.cell())
}

/// Mode-space potentials `(Â0, 𝐀̂, dots)` of a photon field.
fn spectral_potentials(a: &PhotonA) -> ([Vec<C64>; 4], [Vec<C64>; 4]) {
    let v = [forward(&a.a0), forward(&a.a.c[0]), forward(&a.a.c[1]), forward(&a.a.c[2])];
    let d = [
        forward(&a.a0_dot),
        forward(&a.a_dot.c[0]),
        forward(&a.a_dot.c[1]),
        forward(&a.a_dot.c[2]),
    ];
    (v, d)
}

/// Relative violation of the Lorenz condition and of positive energy.
pub fn lorenz_positive_residual(a: &PhotonA) -> f64 {
    let grid = a.grid();
    let modes = grid.modes();
    let (v, d) = spectral_potentials(a);
    let mut num = 0.0;
    let mut den = 0.0;
    for m in 0..grid.sites() {
        let w = modes.norm(m);
        let k = modes.kappa[m];
        let lorenz = d[0][m] + I * (k[0] * v[1][m] + k[1] * v[2][m] + k[2] * v[3][m]);
        num += lorenz.norm_sqr();
        for c in 0..4 {
            num += (d[c][m] + I * w * v[c][m]).norm_sqr();
            den += w * w * v[c][m].norm_sqr() + d[c][m].norm_sqr();
        }
    }
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}

/// Mode-space product `−2 h³ Σ_κ |κ| Â*_μ B̂^μ`. Falls back to the position
/// form (with a warning) if either input is not a Lorenz positive-energy
/// field.
pub fn photon_ip_fourier(a: &PhotonA, b: &PhotonA) -> Result<C64> {
    if a.grid() != b.grid() {
        return Err(Error::SizeMismatch("photon fields on different grids".into()));
    }
    let ra = lorenz_positive_residual(a);
    let rb = lorenz_positive_residual(b);
    if ra > FOURIER_GUARD_TOL || rb > FOURIER_GUARD_TOL {
        log::warn!(
            "mode-space photon product needs Lorenz positive-energy inputs (residuals {ra:e}, {rb:e}); using the position form"
        );
        return photon_ip_position(a, b);
    }
    let grid = a.grid();
    let modes = grid.modes();
    let (va, _) = spectral_potentials(a);
    let (vb, _) = spectral_potentials(b);
    let sum = par::sum_complex(grid.sites(), |r| {
        r.map(|m| {
            let w = modes.norm(m);
            let mink = va[0][m].conj() * vb[0][m] - (1..4).map(|c| va[c][m].conj() * vb[c][m]).sum::<C64>();
            w * mink
        })
        .sum()
    });
    Ok(-2.0 * sum * grid.cell())
}

/// Mode-space field tensor `F̂_{μν}` at one mode.
fn tensor(e: [C64; 3], b: [C64; 3]) -> [[C64; 4]; 4] {
    let z = C64::new(0.0, 0.0);
    let mut f = [[z; 4]; 4];
    for i in 0..3 {
        f[0][i + 1] = e[i];
        f[i + 1][0] = -e[i];
    }
    // F_ij = −ε_ijk B^k
    f[1][2] = -b[2];
    f[2][1] = b[2];
    f[2][3] = -b[0];
    f[3][2] = b[0];
    f[3][1] = -b[1];
    f[1][3] = b[1];
    f
}

/// `h³ Σ_{κ≠0} |κ|⁻¹ Σ_{μν} F̂*_{μν} Ĝ_{μν}`, built from the tensor entries.
pub fn photon_tensor_sum(f: &PhotonF, g: &PhotonF) -> Result<C64> {
    if f.grid() != g.grid() {
        return Err(Error::SizeMismatch("photon fields on different grids".into()));
    }
    let grid = f.grid();
    let modes = grid.modes();
    let (fe, fb) = (forward_vec(&f.e), forward_vec(&f.b));
    let (ge, gb) = (forward_vec(&g.e), forward_vec(&g.b));
    let sum = par::sum_complex(grid.sites(), |r| {
        r.filter(|&m| !modes.is_null(m))
            .map(|m| {
                let tf = tensor([fe[0][m], fe[1][m], fe[2][m]], [fb[0][m], fb[1][m], fb[2][m]]);
                let tg = tensor([ge[0][m], ge[1][m], ge[2][m]], [gb[0][m], gb[1][m], gb[2][m]]);
                let mut s = C64::new(0.0, 0.0);
                for mu in 0..4 {
                    for nu in 0..4 {
                        s += tf[mu][nu].conj() * tg[mu][nu];
                    }
                }
                s / modes.norm(m)
            })
            .sum()
    });
    Ok(sum * grid.cell())
}

/// Field-strength form of the photon product, `½ Σ_{μν}` of the tensor
/// sum. This normalization coincides with the position and mode-space forms
/// on positive-energy fields.
pub fn photon_ip_f(f: &PhotonF, g: &PhotonF) -> Result<C64> {
    Ok(0.5 * photon_tensor_sum(f, g)?)
}

/// Energy-weighted product `h³ Σ_{κ≠0} (Ê*·Ê' + B̂*·B̂')/(4|κ|)`, assembled
/// from the field vectors.
pub fn lp_energy_product(f: &PhotonF, g: &PhotonF) -> Result<C64> {
    if f.grid() != g.grid() {
        return Err(Error::SizeMismatch("photon fields on different grids".into()));
    }
    let grid = f.grid();
    let modes = grid.modes();
    let (fe, fb) = (forward_vec(&f.e), forward_vec(&f.b));
    let (ge, gb) = (forward_vec(&g.e), forward_vec(&g.b));
    let sum = par::sum_complex(grid.sites(), |r| {
        r.filter(|&m| !modes.is_null(m))
            .map(|m| {
                let s: C64 = (0..3).map(|a| fe[a][m].conj() * ge[a][m] + fb[a][m].conj() * gb[a][m]).sum();
                s / (4.0 * modes.norm(m))
            })
            .sum()
    });
    Ok(sum * grid.cell())
}

/// Largest per-mode relative violation of `Σ_i |F̂_{0i}|² = ½ Σ_{ij} |F̂_{ij}|²`.
pub fn electric_magnetic_balance(f: &PhotonF) -> f64 {
    let grid = f.grid();
    let (fe, fb) = (forward_vec(&f.e), forward_vec(&f.b));
    let mut worst: f64 = 0.0;
    let total: f64 = (0..grid.sites())
        .map(|m| (0..3).map(|a| fe[a][m].norm_sqr() + fb[a][m].norm_sqr()).sum::<f64>())
        .fold(0.0, f64::max);
    for m in 0..grid.sites() {
        let t = tensor([fe[0][m], fe[1][m], fe[2][m]], [fb[0][m], fb[1][m], fb[2][m]]);
        let el: f64 = (1..4).map(|i| t[0][i].norm_sqr()).sum();
        let mag: f64 = (1..4).flat_map(|i| (1..4).map(move |j| (i, j))).map(|(i, j)| t[i][j].norm_sqr()).sum();
        worst = worst.max((el - 0.5 * mag).abs());
    }
    if total == 0.0 {
        worst
    } else {
        worst / total
    }
}

/// Random Lorenz-gauge positive-energy potential with modes `|n_a| < cutoff`.
pub fn random_lorenz_positive(grid: &GridSpec, cutoff: i64, seed: u64, stream: u64) -> PhotonA {
    let modes = grid.modes();
    let vec = crate::random::bandlimited_vector(grid, cutoff, seed, stream);
    let ah = forward_vec(&vec);
    let mut v: [Vec<C64>; 4] = std::array::from_fn(|_| vec![C64::new(0.0, 0.0); grid.sites()]);
    let mut d = v.clone();
    for m in 0..grid.sites() {
        if modes.is_null(m) {
            continue;
        }
        let w = modes.norm(m);
        let u = unit(modes.kappa[m], w);
        let a = [ah[0][m], ah[1][m], ah[2][m]];
        v[0][m] = dot_r(u, a);
        for c in 0..3 {
            v[c + 1][m] = a[c];
        }
        for c in 0..4 {
            d[c][m] = -I * w * v[c][m];
        }
    }
    let [v0, v1, v2, v3] = v;
    let [d0, d1, d2, d3] = d;
    let back = |x: Vec<C64>| {
        let mut x = x;
        fft3_block(&mut x, grid.n, 1, Direction::Inverse);
        ScalarField { grid: *grid, data: x }
    };
    PhotonA {
        a0: back(v0),
        a: Vector3Field { c: [back(v1), back(v2), back(v3)] },
        a0_dot: back(d0),
        a_dot: Vector3Field { c: [back(d1), back(d2), back(d3)] },
        gauge: GaugeTag::Lorenz,
    }
}

/// Random field with `∇·𝐁 = 0` exactly (𝐁 is a curl) and no null-mode
/// content.
pub fn random_constrained_f(grid: &GridSpec, cutoff: i64, seed: u64, stream: u64) -> PhotonF {
    let e = crate::random::bandlimited_vector(grid, cutoff, seed, 2 * stream);
    let pot = crate::random::bandlimited_vector(grid, cutoff, seed, 2 * stream + 1);
    PhotonF { e, b: curl(&pot) }
}

/// Random free positive-energy field (transverse, `𝐁 = κ̂×𝐄`).
pub fn random_positive_energy_f(grid: &GridSpec, cutoff: i64, seed: u64, stream: u64) -> PhotonF {
    positive_energy_project(&random_constrained_f(grid, cutoff, seed, stream))
}
