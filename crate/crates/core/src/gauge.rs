//! Gauge transformations of sector states: the Θ operator for tilted Coulomb
//! frames, infinitesimal transforms in the A and F representations, the
//! affine (c-number) transform and the ramp construction with a
//! time-dependent phase.
//!
//! Conventions: a gauge function `θ` acts as `A_μ ↦ A_μ − ∂_μθ/e`,
//! `ψ ↦ e^{iθ}ψ`. As photon components `(A0, 𝐀)` the four-vector `∂_μθ/e`
//! reads `(θ̇, −∇θ)/e`.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::container;
use crate::error::{Error, Result};
use crate::fock::{f_to_a_maps, joint_fft, slot_map, Layout, Representation, SectorState};
use crate::grid::{kernel_spectrum, Direction, GaussianRegulator, ModeTable, ScalarField};
use crate::maxwell::{GaugeTag, PhotonA};
use crate::par;

type C64 = Complex64;
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Linear map from Coulomb-gauge photon data to the gauge function that
/// restores the Coulomb condition in a frame tilted along `v`:
/// `ΘA = e Δ⁻¹(v·∇A0 − v·𝐀̇)`, scaled by `scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaOperator {
    pub v: [f64; 3],
    pub e: f64,
    pub scale: f64,
}

impl ThetaOperator {
    pub fn new(v: [f64; 3], e: f64) -> Self {
        Self { v, e, scale: 1.0 }
    }

    pub fn rescaled(&self, c: f64) -> Self {
        Self { scale: self.scale * c, ..*self }
    }

    /// Rows of `(θ, θ̇, θ̈)` per mode on `(A0, 𝐀, Ȧ0, 𝐀̇)`. Time derivatives
    /// use the free Coulomb-gauge closure `𝐀̈ = Δ𝐀 − ∇Ȧ0`, `Ä0 = 0`.
    fn rows(&self, modes: &ModeTable, q: usize) -> [[C64; 8]; 3] {
        let mut r = [[ZERO; 8]; 3];
        if modes.is_null(q) {
            return r;
        }
        let k = modes.kappa[q];
        let k2 = modes.kappa2[q];
        let vk = self.v[0] * k[0] + self.v[1] * k[1] + self.v[2] * k[2];
        let s = self.e * self.scale;
        // θ = −(s/κ²)(i v·κ A0 − v·𝐀̇)
        r[0][0] = -s * I * vk / k2;
        // θ̇ = −(s/κ²)(2i v·κ Ȧ0 + κ² v·𝐀)
        r[1][4] = -2.0 * s * I * vk / k2;
        // θ̈ = −s v·𝐀̇
        for a in 0..3 {
            r[0][5 + a] = C64::new(s * self.v[a] / k2, 0.0);
            r[1][1 + a] = C64::new(-s * self.v[a], 0.0);
            r[2][5 + a] = C64::new(-s * self.v[a], 0.0);
        }
        r
    }

    /// Per-mode 8×8 generator of the photon-slot shift
    /// `(A0, 𝐀; Ȧ0, 𝐀̇) += (−θ̇, ∇θ; −θ̈, ∇θ̇)/e`.
    fn slot_generator(&self, modes: &ModeTable, q: usize) -> [C64; 64] {
        let mut g = [ZERO; 64];
        if self.e == 0.0 {
            return g;
        }
        let r = self.rows(modes, q);
        let k = modes.kappa[q];
        let inv_e = 1.0 / self.e;
        for col in 0..8 {
            g[col] = -r[1][col] * inv_e;
            g[4 * 8 + col] = -r[2][col] * inv_e;
            for a in 0..3 {
                g[(1 + a) * 8 + col] = I * k[a] * r[0][col] * inv_e;
                g[(5 + a) * 8 + col] = I * k[a] * r[1][col] * inv_e;
            }
        }
        g
    }

    /// `ΘA` for one photon field.
    pub fn apply(&self, a: &PhotonA) -> Result<ScalarField> {
        if a.gauge != GaugeTag::Coulomb {
            return Err(Error::Gauge(format!("Θ needs Coulomb-gauge input, got {:?}", a.gauge)));
        }
        let grid = a.grid();
        let modes = grid.modes();
        let comps = a.components();
        let hats: Vec<Vec<C64>> = comps
            .iter()
            .map(|c| {
                let mut d = c.data.clone();
                crate::grid::fft3_block(&mut d, grid.n, 1, Direction::Forward);
                d
            })
            .collect();
        let mut out: Vec<C64> = (0..grid.sites())
            .map(|q| {
                let r = self.rows(&modes, q);
                (0..8).map(|c| r[0][c] * hats[c][q]).sum()
            })
            .collect();
        crate::grid::fft3_block(&mut out, grid.n, 1, Direction::Inverse);
        Ok(ScalarField { grid, data: out })
    }
}

/// `ΘA` for a Coulomb-gauge field and tilt direction `v`.
pub fn theta_coulomb_tilt(a: &PhotonA, v: [f64; 3], e: f64) -> Result<ScalarField> {
    ThetaOperator::new(v, e).apply(a)
}

/// First-order Coulomb residual in the tilted frame,
/// `‖∇·𝐀 − ds(v·∇A0 − v·𝐀̇)‖ / ‖𝐀‖`.
pub fn tilted_coulomb_residual(a: &PhotonA, v: [f64; 3], ds: f64) -> f64 {
    let div = crate::grid::divergence(&a.a);
    let grad = crate::grid::gradient(&a.a0);
    let mut src = ScalarField::zeros(a.grid());
    for k in 0..3 {
        src = src.add(&grad.c[k].sub(&a.a_dot.c[k]).scaled(C64::new(v[k], 0.0)));
    }
    div.sub(&src.scaled(C64::new(ds, 0.0))).norm() / a.a.norm().max(1e-300)
}

fn require(state: &SectorState, rep: Representation) -> Result<()> {
    if state.shape.representation != rep {
        return Err(Error::Representation(format!("expected {rep:?} representation")));
    }
    Ok(())
}

fn mode_arrays(state: &SectorState, n: usize) -> Vec<Vec<C64>> {
    let layout = state.layout(n);
    state.sectors[n]
        .arrays
        .iter()
        .map(|a| {
            let mut v = a.clone();
            joint_fft(&mut v, &layout, state.grid().n, Direction::Forward);
            v
        })
        .collect()
}

/// Pairs the last photon slot of mode-domain sector `n + 1` with `row(q)`
/// (applied to its components) and the smeared delta at each electron:
/// `h³ Σ_j Σ_q ĝ(q) row(q)·Φ̂(…, p_j − q, …, q)`.
fn electron_pairing(
    state: &SectorState,
    n: usize,
    src: &[C64],
    src_dim: usize,
    ghat: &[f64],
    row: &(dyn Fn(usize) -> Vec<C64> + Sync),
) -> Vec<C64> {
    let grid = state.grid();
    let layout = state.layout(n);
    let n3 = grid.sites();
    let sl = Layout::new(layout.m, n + 1, n3, 4);
    let rows: Vec<Vec<C64>> = (0..n3).map(row).collect();
    let comps = layout.comps;
    let mut out = vec![ZERO; layout.len()];
    par::for_each_chunk(&mut out, comps, |t, o| {
        let mut sd = vec![0; layout.slots];
        let mut src_d = vec![0; sl.slots];
        layout.site_digits(t, &mut sd);
        for j in 0..layout.m {
            for q in 0..n3 {
                if ghat[q] == 0.0 {
                    continue;
                }
                src_d[..layout.slots].copy_from_slice(&sd);
                src_d[j] = grid.mode_sub(sd[j], q);
                src_d[layout.slots] = q;
                let base = sl.site_index(&src_d) * comps * src_dim;
                let r = &rows[q];
                for (c, v) in o.iter_mut().enumerate() {
                    let s0 = base + c * src_dim;
                    let x: C64 = (0..src_dim).map(|d| r[d] * src[s0 + d]).sum();
                    *v += ghat[q] * x;
                }
            }
        }
    });
    let cell = grid.cell();
    out.iter_mut().for_each(|v| *v *= cell);
    out
}

/// Infinitesimal transform of an A-representation state: every photon slot
/// is shifted by `−∂(ΘA)/e·ds`, and the electrons pick up
/// `i√(n+1) Σ_j (Θ Ψ^(n+1))(y_{n+1} = x_j) ds`, with the evaluation done by
/// pairing with the smeared delta of width `sigma`.
pub fn infinitesimal_gauge_transform(state: &SectorState, theta: &ThetaOperator, ds: f64, sigma: f64) -> Result<SectorState> {
    require(state, Representation::A)?;
    for s in &state.sectors {
        if s.arrays.len() != 1 << s.n {
            return Err(Error::MissingDots);
        }
    }
    let grid = state.grid();
    let modes = grid.modes();
    let ghat = kernel_spectrum(&GaussianRegulator { sigma }, &grid)?;
    let hats: Vec<Vec<Vec<C64>>> = (0..state.sectors.len()).map(|n| mode_arrays(state, n)).collect();
    let mut out = state.clone();
    for n in 0..state.sectors.len() {
        let layout = state.layout(n);
        let mut acc: Vec<Vec<C64>> = vec![vec![ZERO; layout.len()]; 1 << n];
        // Photon-slot shifts.
        for k in 0..n {
            let slot = layout.m + k;
            let stride = layout.comp_strides[slot];
            let bit = 1 << k;
            let comps = layout.comps;
            for mask in 0..(1usize << n) {
                let lo = mask & !bit;
                let hi = mask | bit;
                let target = &mut acc[mask];
                par::for_each_chunk(target, comps, |t, o| {
                    let mut sd = vec![0; layout.slots];
                    layout.site_digits(t, &mut sd);
                    let g = theta.slot_generator(&modes, sd[slot]);
                    let rows = if mask & bit == 0 { 0 } else { 4 };
                    let block = |col: usize| -> Vec<C64> {
                        (0..16).map(|i| g[(rows + i / 4) * 8 + col + i % 4]).collect()
                    };
                    let span = t * comps..(t + 1) * comps;
                    let x = slot_map(&hats[n][lo][span.clone()], 4, stride, 4, &block(0));
                    let y = slot_map(&hats[n][hi][span], 4, stride, 4, &block(4));
                    for i in 0..comps {
                        o[i] += x[i] + y[i];
                    }
                });
            }
        }
        // Electron phase from the sector above.
        if n < state.shape.n_max && layout.m > 0 {
            let coef = I * ((n + 1) as f64).sqrt();
            let last = 1 << n;
            for mask in 0..(1usize << n) {
                // Interleave values and dots of the last slot as 8 components.
                let vals = &hats[n + 1][mask];
                let dots = &hats[n + 1][mask | last];
                let mut both = vec![ZERO; vals.len() * 2];
                for i in 0..vals.len() / 4 {
                    both[i * 8..i * 8 + 4].copy_from_slice(&vals[i * 4..i * 4 + 4]);
                    both[i * 8 + 4..i * 8 + 8].copy_from_slice(&dots[i * 4..i * 4 + 4]);
                }
                let p = electron_pairing(state, n, &both, 8, &ghat, &|q| theta.rows(&modes, q)[0].to_vec());
                par::axpy(&mut acc[mask], coef, &p);
            }
        }
        for (mask, a) in acc.iter_mut().enumerate() {
            joint_fft(a, &layout, grid.n, Direction::Inverse);
            par::axpy(&mut out.sectors[n].arrays[mask], C64::new(ds, 0.0), a);
        }
    }
    Ok(out)
}

/// Infinitesimal transform of an F-representation state: only the electron
/// term `i√(n+1) Σ_j (Θ d⁻¹ F^(n+1))(x_j) ds` survives.
pub fn f_rep_gauge_transform(state: &SectorState, theta: &ThetaOperator, ds: f64, sigma: f64) -> Result<SectorState> {
    require(state, Representation::F)?;
    let grid = state.grid();
    let modes = grid.modes();
    let ghat = kernel_spectrum(&GaussianRegulator { sigma }, &grid)?;
    let mut out = state.clone();
    if state.shape.m == 0 {
        return Ok(out);
    }
    // Θ∘d⁻¹ per mode: compose the Θ row with the Coulomb maps of (E, B).
    let row = |q: usize| -> Vec<C64> {
        let r = theta.rows(&modes, q)[0];
        let (lv, ld) = f_to_a_maps(&modes, q);
        (0..6)
            .map(|c| (0..4).map(|mu| r[mu] * lv[mu * 6 + c] + r[4 + mu] * ld[mu * 6 + c]).sum())
            .collect()
    };
    for n in 0..state.shape.n_max {
        let layout = state.layout(n);
        let above = mode_arrays(state, n + 1);
        let mut p = electron_pairing(state, n, &above[0], 6, &ghat, &row);
        joint_fft(&mut p, &layout, grid.n, Direction::Inverse);
        par::axpy(&mut out.sectors[n].arrays[0], I * ((n + 1) as f64).sqrt() * ds, &p);
    }
    Ok(out)
}

/// A c-number gauge function on one slice: `θ`, `θ̇`, `θ̈`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeFunction {
    pub theta: ScalarField,
    pub theta_dot: ScalarField,
    pub theta_ddot: ScalarField,
}

impl GaugeFunction {
    pub fn constant(grid: crate::grid::GridSpec, value: C64) -> Self {
        Self {
            theta: ScalarField::from_fn(grid, |_| value),
            theta_dot: ScalarField::zeros(grid),
            theta_ddot: ScalarField::zeros(grid),
        }
    }

    /// Spatially uniform function with the given time derivatives.
    pub fn uniform(grid: crate::grid::GridSpec, value: C64, dot: C64, ddot: C64) -> Self {
        Self {
            theta: ScalarField::from_fn(grid, |_| value),
            theta_dot: ScalarField::from_fn(grid, |_| dot),
            theta_ddot: ScalarField::from_fn(grid, |_| ddot),
        }
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self { theta: self.theta.scaled(s), theta_dot: self.theta_dot.scaled(s), theta_ddot: self.theta_ddot.scaled(s) }
    }

    pub fn add_constant(&self, c: C64) -> Self {
        Self { theta: self.theta.add(&ScalarField::from_fn(self.theta.grid, |_| c)), ..self.clone() }
    }

    /// Photon wave function `∂_μθ/e` as `(A0, 𝐀; Ȧ0, 𝐀̇)` components.
    pub fn photon(&self, e: f64) -> PhotonA {
        let mut p = PhotonA::pure_gauge(&self.theta, &self.theta_dot, &self.theta_ddot, e);
        p.gauge = GaugeTag::Other;
        p
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        container::write_fields(path, "gauge_theta", &[&self.theta, &self.theta_dot, &self.theta_ddot])
    }

    pub fn load(path: &Path) -> Result<Self> {
        let (_, f) = container::read_fields(path, "gauge_theta")?;
        let [theta, theta_dot, theta_ddot]: [ScalarField; 3] =
            f.try_into().map_err(|_| Error::Format("gauge_theta needs three fields".into()))?;
        Ok(Self { theta, theta_dot, theta_ddot })
    }
}

/// Electron phase `exp(i Σ_j θ(x_j))` applied to one sector array.
fn electron_phase(data: &[C64], layout: &Layout, theta: &ScalarField, scale: f64) -> Vec<C64> {
    let mut out = data.to_vec();
    let comps = layout.comps;
    par::for_each_chunk(&mut out, comps, |t, o| {
        let mut sd = vec![0; layout.slots];
        layout.site_digits(t, &mut sd);
        let s: C64 = (0..layout.m).map(|j| theta.data[sd[j]]).sum();
        let ph = (I * s * scale).exp();
        o.iter_mut().for_each(|v| *v *= ph);
    });
    out
}

/// Multiplies sector `n − #I` by the photon factors `Π_{k∈I} w(y_k)` and
/// places it in sector `n`, for one subset `I` of photon slots.
fn insert_factors(src: &[C64], src_layout: &Layout, layout: &Layout, subset: usize, w: &[Vec<&ScalarField>]) -> Vec<C64> {
    let comps = layout.comps;
    let m = layout.m;
    let mut out = vec![ZERO; layout.len()];
    par::for_each_chunk(&mut out, comps, |t, o| {
        let mut sd = vec![0; layout.slots];
        let mut cd = vec![0; layout.slots];
        layout.site_digits(t, &mut sd);
        let src_sites: Vec<usize> = (0..layout.slots).filter(|&s| s < m || subset >> (s - m) & 1 == 0).map(|s| sd[s]).collect();
        let base = src_layout.site_index(&src_sites) * src_layout.comps;
        for (c, v) in o.iter_mut().enumerate() {
            layout.comp_digits(c, &mut cd);
            let mut f = C64::new(1.0, 0.0);
            let mut src_c = Vec::with_capacity(src_layout.slots);
            for s in 0..layout.slots {
                if s >= m && subset >> (s - m) & 1 == 1 {
                    f *= w[s - m][cd[s]].data[sd[s]];
                } else {
                    src_c.push(cd[s]);
                }
            }
            *v = f * src[base + src_layout.comp_index(&src_c)];
        }
    });
    out
}

/// Finite affine transform with a c-number gauge function:
/// `Ψ̃^(n) = e^{iΣθ(x_j)} Σ_{I} (−1)^{#I} √((n−#I)!/n!) Π_{k∈I} (∂θ/e)(y_k) Ψ^(n−#I)`.
/// In the F representation the photon factors have zero field strength and
/// only the phase remains.
pub fn affine_gauge_transform_finite(state: &SectorState, g: &GaugeFunction, e: f64) -> Result<SectorState> {
    let grid = state.grid();
    let mut out = SectorState::zeros(state.shape);
    match state.shape.representation {
        Representation::F => {
            for s in &state.sectors {
                out.sectors[s.n].arrays[0] = electron_phase(s.data(), &state.layout(s.n), &g.theta, 1.0);
            }
        }
        Representation::A => {
            let ph = g.photon(e);
            let c = ph.components();
            let values: Vec<&ScalarField> = c[0..4].to_vec();
            let dots: Vec<&ScalarField> = c[4..8].to_vec();
            for n in 0..state.sectors.len() {
                let layout = state.layout(n);
                for subset in 0..(1usize << n) {
                    let size = subset.count_ones() as usize;
                    let lower = n - size;
                    let src_layout = state.layout(lower);
                    let coef = if size % 2 == 0 { 1.0 } else { -1.0 }
                        * ((1..=n).map(|x| x as f64).product::<f64>() / (1..=lower).map(|x| x as f64).product::<f64>()).sqrt().recip();
                    for mask in 0..(1usize << n) {
                        // Slots in the subset carry the gauge factor (dot if the mask bit is set);
                        // the remaining slots take their derivative bits from the lower sector.
                        let w: Vec<Vec<&ScalarField>> = (0..n)
                            .map(|k| if mask >> k & 1 == 1 { dots.clone() } else { values.clone() })
                            .collect();
                        let mut lower_mask = 0;
                        let mut pos = 0;
                        for k in 0..n {
                            if subset >> k & 1 == 0 {
                                if mask >> k & 1 == 1 {
                                    lower_mask |= 1 << pos;
                                }
                                pos += 1;
                            }
                        }
                        let src = &state.sectors[lower].arrays[lower_mask];
                        let term = insert_factors(src, &src_layout, &layout, subset, &w);
                        par::axpy(&mut out.sectors[n].arrays[mask], C64::new(coef, 0.0), &term);
                    }
                }
                for a in out.sectors[n].arrays.iter_mut() {
                    *a = electron_phase(a, &layout, &g.theta, 1.0);
                }
            }
        }
    }
    let _ = grid;
    Ok(out)
}

/// One step `1 + X/K` of the affine transform generated by `θ/K`.
pub fn affine_gauge_infinitesimal(state: &SectorState, g: &GaugeFunction, e: f64, k: usize) -> Result<SectorState> {
    let inv = 1.0 / k as f64;
    let mut out = state.clone();
    for s in &state.sectors {
        let layout = state.layout(s.n);
        for (mask, a) in s.arrays.iter().enumerate() {
            let mut v = a.clone();
            let comps = layout.comps;
            par::for_each_chunk(&mut v, comps, |t, o| {
                let mut sd = vec![0; layout.slots];
                layout.site_digits(t, &mut sd);
                let th: C64 = (0..layout.m).map(|j| g.theta.data[sd[j]]).sum();
                o.iter_mut().for_each(|x| *x *= I * th * inv);
            });
            par::axpy(&mut out.sectors[s.n].arrays[mask], C64::new(1.0, 0.0), &v);
        }
    }
    if state.shape.representation == Representation::A {
        let ph = g.photon(e);
        let c = ph.components();
        for n in 1..state.sectors.len() {
            let layout = state.layout(n);
            let src_layout = state.layout(n - 1);
            let coef = -inv / (n as f64).sqrt();
            for k in 0..n {
                for mask in 0..(1usize << n) {
                    let w: Vec<Vec<&ScalarField>> = (0..n)
                        .map(|_| if mask >> k & 1 == 1 { c[4..8].to_vec() } else { c[0..4].to_vec() })
                        .collect();
                    let lower_mask = (mask & ((1 << k) - 1)) | ((mask >> (k + 1)) << k);
                    let term = insert_factors(&state.sectors[n - 1].arrays[lower_mask], &src_layout, &layout, 1 << k, &w);
                    par::axpy(&mut out.sectors[n].arrays[mask], C64::new(coef, 0.0), &term);
                }
            }
        }
    }
    Ok(out)
}

/// Reading of the ramp gauge function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RampReading {
    /// `θ = π c(t)/m`.
    Phase,
    /// `θ = exp(iπ c(t)/m)`.
    Literal,
}

/// Smooth ramp from 0 (t ≤ 0) to 1 (t ≥ 1) with its first two derivatives.
pub fn smooth_ramp(t: f64) -> (f64, f64, f64) {
    // f(t) = e^{-1/t}, c = f(t)/(f(t) + f(1−t)); derivatives by central differences
    // of the closed form would lose digits, so use the analytic expressions.
    fn f(t: f64) -> (f64, f64, f64) {
        if t <= 0.0 {
            return (0.0, 0.0, 0.0);
        }
        let e = (-1.0 / t).exp();
        let d1 = e / (t * t);
        let d2 = e * (1.0 - 2.0 * t) / t.powi(4);
        (e, d1, d2)
    }
    if t <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    if t >= 1.0 {
        return (1.0, 0.0, 0.0);
    }
    let (a, a1, a2) = f(t);
    let (b, b1, b2) = f(1.0 - t);
    // b(t) = f(1−t): derivatives flip sign once.
    let (b1, b2) = (-b1, b2);
    let s = a + b;
    let s1 = a1 + b1;
    let s2 = a2 + b2;
    let c = a / s;
    let c1 = (a1 * s - a * s1) / (s * s);
    let c2 = (a2 * s - a * s2) / (s * s) - 2.0 * s1 * (a1 * s - a * s1) / (s * s * s);
    (c, c1, c2)
}

/// `Ψ' = ½Ψ + ½Ψ̆` on the equal-time slice `t_eval`, where `Ψ̆` is the
/// affine transform with the ramp gauge function.
pub fn ramp_superposition_state(state: &SectorState, reading: RampReading, t_eval: f64, e: f64) -> Result<SectorState> {
    let m = state.shape.m.max(1) as f64;
    let (c, c1, c2) = smooth_ramp(t_eval);
    let pi = std::f64::consts::PI;
    let (th, th1, th2) = match reading {
        RampReading::Phase => (C64::new(pi * c / m, 0.0), C64::new(pi * c1 / m, 0.0), C64::new(pi * c2 / m, 0.0)),
        RampReading::Literal => {
            let z = (I * pi * c / m).exp();
            let w1 = I * pi * c1 / m;
            let w2 = I * pi * c2 / m;
            (z, w1 * z, (w2 + w1 * w1) * z)
        }
    };
    let g = GaugeFunction::uniform(state.grid(), th, th1, th2);
    let breve = affine_gauge_transform_finite(state, &g, e)?;
    Ok(state.scaled(C64::new(0.5, 0.0)).add(&breve.scaled(C64::new(0.5, 0.0))))
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    #[test]
    fn ramp_endpoints_and_derivatives() {
        assert_eq!(smooth_ramp(-0.3), (0.0, 0.0, 0.0));
        assert_eq!(smooth_ramp(1.2), (1.0, 0.0, 0.0));
        let (c, _, _) = smooth_ramp(0.5);
        assert!((c - 0.5).abs() < 1e-15);
        let h = 1e-5;
        for t in [0.2, 0.5, 0.7] {
            let (_, d1, d2) = smooth_ramp(t);
            let fd1 = (smooth_ramp(t + h).0 - smooth_ramp(t - h).0) / (2.0 * h);
            let fd2 = (smooth_ramp(t + h).1 - smooth_ramp(t - h).1) / (2.0 * h);
            assert!((d1 - fd1).abs() < 1e-7 && (d2 - fd2).abs() < 1e-6);
        }
    }

    #[test]
    fn theta_vanishes_on_static_transverse_potential() {
        let g = GridSpec::new(8, 2.0 * std::f64::consts::PI).unwrap();
        let mut a = PhotonA::zeros(g, GaugeTag::Coulomb);
        let f = crate::maxwell::random_constrained_f(&g, 3, 1, 0);
        a.a = crate::maxwell::d_inverse_coulomb(&f, &crate::maxwell::Source::zeros(g)).unwrap().a;
        let th = theta_coulomb_tilt(&a, [1.0, 0.0, 0.0], 0.3).unwrap();
        assert!(th.norm() < 1e-14);
        let mut lorenz = a.clone();
        lorenz.gauge = GaugeTag::Lorenz;
        assert!(theta_coulomb_tilt(&lorenz, [1.0, 0.0, 0.0], 0.3).is_err());
    }

    #[test]
    fn theta_of_a_plane_wave() {
        let g = GridSpec::new(8, 2.0 * std::f64::consts::PI).unwrap();
        let e = 0.4;
        // 𝐀̇ = ẑ e^{i(x+z)}·a: ΘA = e Δ⁻¹(−v·𝐀̇) = −e·a e^{i(x+z)}/(−2) for v = ẑ.
        let amp = C64::new(0.3, -0.8);
        let mut a = PhotonA::zeros(g, GaugeTag::Coulomb);
        a.a_dot.c[2] = ScalarField::from_fn(g, |x| amp * C64::from_polar(1.0, x[0] + x[2]));
        let th = theta_coulomb_tilt(&a, [0.0, 0.0, 1.0], e).unwrap();
        let expect = a.a_dot.c[2].scaled(C64::new(e / 2.0, 0.0));
        assert!(th.sub(&expect).norm() < 1e-13);
    }

    #[test]
    fn gauge_function_round_trip() {
        let g = GridSpec::new(4, 1.0).unwrap();
        let f = GaugeFunction {
            theta: crate::random::complex_field(&g, 1, 0),
            theta_dot: crate::random::complex_field(&g, 1, 1),
            theta_ddot: crate::random::complex_field(&g, 1, 2),
        };
        let dir = tempfile::tempdir().unwrap();
        f.save(&dir.path().join("t.bin")).unwrap();
        assert_eq!(GaugeFunction::load(&dir.path().join("t.bin")).unwrap(), f);
    }
}
