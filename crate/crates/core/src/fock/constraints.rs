//! Sector constraint residuals, transverse projection, Gauss-law preparation
//! and the interior-boundary flux residual.

use num_complex::Complex64;
use serde::Serialize;

use super::hamiltonian::HamiltonianParams;
use super::{joint_fft, slot_fft, Representation, SectorState};
use crate::error::{Error, Result};
use crate::grid::{kernel_spectrum, Direction, GaussianRegulator};
use crate::par;

type C64 = Complex64;
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstraintResidual {
    pub n: usize,
    /// `‖∇·E − ρ‖ / (k₁‖E‖ + ‖ρ‖)` over modes with `κ ≠ 0`.
    pub gauss: f64,
    /// `‖∇·B‖ / (k₁‖B‖)`.
    pub magnetic: f64,
    /// `‖∇·E − ρ‖` without normalization.
    pub gauss_abs: f64,
    /// `‖∇·B‖` without normalization.
    pub magnetic_abs: f64,
}

fn require_f(state: &SectorState) -> Result<()> {
    if state.shape.representation != Representation::F {
        return Err(Error::Representation("F representation required".into()));
    }
    Ok(())
}

/// Mode-domain charge term for slot `k` of sector `n`:
/// `(e/√n) Σ_j ĝ(q_k) Ψ̂^(n−1)(…, p_j + q_k, …)`, indexed like sector `n`
/// with the slot-`k` component dropped.
fn charge_term(state: &SectorState, prev: &[C64], ghat: &[f64], e: f64, n: usize, k: usize) -> Vec<C64> {
    let layout = state.layout(n);
    let sl = state.layout(n - 1);
    let grid = state.grid();
    let m = layout.m;
    let rest = layout.comps / 6;
    let coef = e / (n as f64).sqrt();
    let mut out = vec![ZERO; layout.site_tuples * rest];
    // Components of sector n without slot k are exactly the components of sector n−1.
    debug_assert_eq!(rest, sl.comps);
    par::for_each_chunk(&mut out, rest, |t, chunk| {
        let mut sd = vec![0; layout.slots];
        layout.site_digits(t, &mut sd);
        let q = sd[m + k];
        let mut src_d: Vec<usize> = sd.iter().enumerate().filter(|&(s, _)| s != m + k).map(|(_, &d)| d).collect();
        for j in 0..m {
            let keep = src_d[j];
            src_d[j] = grid.mode_add(sd[j], q);
            let base = sl.site_index(&src_d) * sl.comps;
            for (c, v) in chunk.iter_mut().enumerate() {
                *v += coef * ghat[q] * prev[base + c];
            }
            src_d[j] = keep;
        }
    });
    out
}

/// Splits a sector's component index into (rest, component of slot `k`).
fn slot_split(layout: &super::Layout, k: usize) -> (usize, usize) {
    let s = layout.m + k;
    let stride = layout.comp_strides[s];
    (stride, layout.dims[s])
}

/// Per-sector residuals of `∇·E = ρ` and `∇·B = 0`, summed over photon
/// slots. The charge uses the same smeared delta as the Hamiltonian; null
/// modes (including the torus zero mode of the charge) are excluded.
pub fn sector_constraint_residual(state: &SectorState, p: &HamiltonianParams) -> Result<Vec<ConstraintResidual>> {
    require_f(state)?;
    let grid = state.grid();
    let modes = grid.modes();
    let ghat = kernel_spectrum(&GaussianRegulator { sigma: p.sigma }, &grid)?;
    let k1 = 2.0 * std::f64::consts::PI / grid.length;
    let spectral = super::hamiltonian::spectral_values(state);
    let mut out = Vec::new();
    for n in 1..state.sectors.len() {
        let layout = state.layout(n);
        let (mut r_e, mut n_e, mut n_rho, mut r_b, mut n_b) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for k in 0..n {
            let rho = charge_term(state, &spectral[n - 1], &ghat, p.e, n, k);
            let (stride, dim) = slot_split(&layout, k);
            let mut sd = vec![0; layout.slots];
            for t in 0..layout.site_tuples {
                layout.site_digits(t, &mut sd);
                let q = sd[layout.m + k];
                let kap = modes.kappa[q];
                let null = modes.is_null(q);
                let v = &spectral[n][t * layout.comps..(t + 1) * layout.comps];
                let outer = layout.comps / (dim * stride);
                for o in 0..outer {
                    for i in 0..stride {
                        let base = o * dim * stride + i;
                        let rest = o * stride + i;
                        let e: [C64; 3] = std::array::from_fn(|a| v[base + a * stride]);
                        let b: [C64; 3] = std::array::from_fn(|a| v[base + (3 + a) * stride]);
                        n_e += e.iter().map(|x| x.norm_sqr()).sum::<f64>();
                        n_b += b.iter().map(|x| x.norm_sqr()).sum::<f64>();
                        if null {
                            continue;
                        }
                        let div_e: C64 = (0..3).map(|a| I * kap[a] * e[a]).sum();
                        let div_b: C64 = (0..3).map(|a| I * kap[a] * b[a]).sum();
                        let r = rho[t * (layout.comps / 6) + rest];
                        r_e += (div_e - r).norm_sqr();
                        n_rho += r.norm_sqr();
                        r_b += div_b.norm_sqr();
                    }
                }
            }
        }
        let de = k1 * n_e.sqrt() + n_rho.sqrt();
        let db = k1 * n_b.sqrt();
        out.push(ConstraintResidual {
            n,
            gauss: if de > 0.0 { r_e.sqrt() / de } else { r_e.sqrt() },
            magnetic: if db > 0.0 { r_b.sqrt() / db } else { r_b.sqrt() },
            gauss_abs: r_e.sqrt(),
            magnetic_abs: r_b.sqrt(),
        });
    }
    Ok(out)
}

/// Removes longitudinal E and B parts and null-mode content from every
/// photon slot.
pub fn project_transverse(state: &SectorState) -> Result<SectorState> {
    require_f(state)?;
    let grid = state.grid();
    let modes = grid.modes();
    let mut out = state.clone();
    for s in out.sectors.iter_mut() {
        let layout = state.layout(s.n);
        let v = &mut s.arrays[0];
        joint_fft(v, &layout, grid.n, Direction::Forward);
        let comps = layout.comps;
        par::for_each_chunk(v, comps, |t, chunk| {
            let mut sd = vec![0; layout.slots];
            layout.site_digits(t, &mut sd);
            for k in 0..s.n {
                let (stride, dim) = slot_split(&layout, k);
                let q = sd[layout.m + k];
                let outer = comps / (dim * stride);
                for o in 0..outer {
                    for i in 0..stride {
                        let base = o * dim * stride + i;
                        if modes.is_null(q) {
                            for c in 0..6 {
                                chunk[base + c * stride] = ZERO;
                            }
                            continue;
                        }
                        let kap = modes.kappa[q];
                        let k2 = modes.kappa2[q];
                        for part in [0, 3] {
                            let d: C64 = (0..3).map(|a| kap[a] * chunk[base + (part + a) * stride]).sum();
                            for a in 0..3 {
                                chunk[base + (part + a) * stride] -= d * kap[a] / k2;
                            }
                        }
                    }
                }
            }
        });
        joint_fft(v, &layout, grid.n, Direction::Inverse);
    }
    Ok(out)
}

/// Replaces the longitudinal E part of the one-photon sector by the solution
/// of `∇·E = ρ` (non-null modes) and makes B transverse. Only `n_max ≤ 1`
/// is supported: for two or more photons the slots' longitudinal parts are
/// coupled.
pub fn impose_gauss_law(state: &SectorState, p: &HamiltonianParams) -> Result<SectorState> {
    require_f(state)?;
    if state.shape.n_max > 1 {
        return Err(Error::Precondition("Gauss-law preparation needs n_max <= 1".into()));
    }
    if state.shape.n_max == 0 {
        return Ok(state.clone());
    }
    let grid = state.grid();
    let modes = grid.modes();
    let ghat = kernel_spectrum(&GaussianRegulator { sigma: p.sigma }, &grid)?;
    let spectral = super::hamiltonian::spectral_values(state);
    let rho = charge_term(state, &spectral[0], &ghat, p.e, 1, 0);
    let layout = state.layout(1);
    let mut v = spectral[1].clone();
    let comps = layout.comps;
    let rest = comps / 6;
    par::for_each_chunk(&mut v, comps, |t, chunk| {
        let mut sd = vec![0; layout.slots];
        layout.site_digits(t, &mut sd);
        let q = sd[layout.m];
        for r in 0..rest {
            let base = r * 6;
            if modes.is_null(q) {
                for c in 0..6 {
                    chunk[base + c] = ZERO;
                }
                continue;
            }
            let kap = modes.kappa[q];
            let k2 = modes.kappa2[q];
            for part in [0, 3] {
                let d: C64 = (0..3).map(|a| kap[a] * chunk[base + part + a]).sum();
                for a in 0..3 {
                    chunk[base + part + a] -= d * kap[a] / k2;
                }
            }
            let rh = rho[t * rest + r];
            for a in 0..3 {
                chunk[base + a] += -I * kap[a] * rh / k2;
            }
        }
    });
    joint_fft(&mut v, &layout, grid.n, Direction::Inverse);
    let mut out = state.clone();
    out.sectors[1].arrays[0] = v;
    Ok(out)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                let pn = if n == 0 { 1.0 } else { p1 };
                let pm = if n == 0 { 0.0 } else { p0 };
                dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
                let dx = pn / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Product direction rule on the unit sphere; weights sum to `4π`.
pub fn sphere_rule(n_theta: usize, n_phi: usize) -> Vec<([f64; 3], f64)> {
    let mut out = Vec::with_capacity(n_theta * n_phi);
    for (ct, w) in gauss_legendre(n_theta) {
        let st = (1.0 - ct * ct).sqrt();
        for j in 0..n_phi {
            let ph = 2.0 * std::f64::consts::PI * j as f64 / n_phi as f64;
            out.push(([st * ph.cos(), st * ph.sin(), ct], w * 2.0 * std::f64::consts::PI / n_phi as f64));
        }
    }
    out
}

/// Fraction of a unit Gaussian charge of width `sigma` inside radius `r`.
pub fn gaussian_charge_fraction(r: f64, sigma: f64) -> f64 {
    let x = r / sigma;
    libm::erf(x / std::f64::consts::SQRT_2) - (2.0 / std::f64::consts::PI).sqrt() * x * (-0.5 * x * x).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IbcReport {
    pub radius: f64,
    pub left_norm: f64,
    pub right_norm: f64,
    /// `‖left − right‖ / ‖right‖` with the free-space charge fraction.
    pub mismatch: f64,
    /// Same, with the torus background `−(4π/3) r³/L³` added to the fraction.
    pub mismatch_torus: f64,
}

/// Flux of the last photon slot's E through a sphere of radius `r` around
/// each electron, compared with `e/√(n+1) · Ψ^(m,n) · q_σ(r)`.
pub fn ibc_residual(state: &SectorState, p: &HamiltonianParams, r: f64) -> Result<IbcReport> {
    require_f(state)?;
    let grid = state.grid();
    if r < 2.0 * p.sigma || r > grid.length / 4.0 {
        return Err(Error::Precondition(format!("radius {r} outside [2σ, L/4]")));
    }
    let modes = grid.modes();
    let n3 = grid.sites();
    let rule = sphere_rule(24, 48);
    // W(q) = r² Σ_ω w ω e^{i k·rω}
    let w: Vec<[C64; 3]> = (0..n3)
        .map(|q| {
            let k = modes.k_full[q];
            let mut acc = [ZERO; 3];
            for (d, wt) in &rule {
                let ph = C64::from_polar(1.0, r * (k[0] * d[0] + k[1] * d[1] + k[2] * d[2]));
                for a in 0..3 {
                    acc[a] += wt * r * r * d[a] * ph;
                }
            }
            acc
        })
        .collect();
    let q_free = gaussian_charge_fraction(r, p.sigma);
    let q_torus = q_free - 4.0 * std::f64::consts::PI / 3.0 * r.powi(3) / grid.length.powi(3);
    let norm = (n3 as f64).powf(-0.5);
    let (mut ln, mut rn, mut d1, mut d2) = (0.0, 0.0, 0.0, 0.0);
    for n1 in 1..state.sectors.len() {
        let n = n1 - 1;
        let sl = state.layout(n1);
        let layout = state.layout(n);
        let last = sl.slots - 1;
        let mut src = state.sectors[n1].data().to_vec();
        slot_fft(&mut src, &sl, grid.n, last, Direction::Forward);
        let right_coef = p.e / (n1 as f64).sqrt();
        let lower = state.sectors[n].data();
        for j in 0..layout.m {
            let mut sd = vec![0; sl.slots];
            for t in 0..layout.site_tuples {
                layout.site_digits(t, &mut sd[..layout.slots]);
                let x = grid.position(sd[j]);
                for c in 0..layout.comps {
                    let mut flux = ZERO;
                    for q in 0..n3 {
                        sd[last] = q;
                        let k = modes.k_full[q];
                        let ph = C64::from_polar(norm, k[0] * x[0] + k[1] * x[1] + k[2] * x[2]);
                        let base = sl.site_index(&sd) * sl.comps + c * 6;
                        let e: C64 = (0..3).map(|a| w[q][a] * src[base + a]).sum();
                        flux += ph * e;
                    }
                    let psi = lower[t * layout.comps + c];
                    let rf = right_coef * psi * q_free;
                    let rt = right_coef * psi * q_torus;
                    ln += flux.norm_sqr();
                    rn += rf.norm_sqr();
                    d1 += (flux - rf).norm_sqr();
                    d2 += (flux - rt).norm_sqr();
                }
            }
        }
    }
    let rel = |d: f64| if rn > 0.0 { (d / rn).sqrt() } else { d.sqrt() };
    Ok(IbcReport { radius: r, left_norm: ln.sqrt(), right_norm: rn.sqrt(), mismatch: rel(d1), mismatch_torus: rel(d2) })
}
