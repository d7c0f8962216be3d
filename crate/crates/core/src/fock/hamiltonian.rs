//! Single-time Hamiltonian on F-representation sectors, applied in the joint
//! mode domain.
//!
//! Per mode the free part is the Dirac symbol on every electron slot and
//! `(E, B) ↦ (−κ×B, κ×E)` on every photon slot. Creation into slot `k` from
//! electron `j` carries `−i e/√n · ĝ(q_k) · α_{c_k}` into the E components;
//! annihilation pairs the last photon slot with `ĝ` and acts with
//! `A0 − α·𝐀`, where `(A0, 𝐀)` are the Coulomb potentials of `(E, B)`.

use num_complex::Complex64;

use super::{add_slot_matvec, joint_fft, slot_fft, Layout, Representation, SectorShape, SectorState};
use crate::dirac::{dirac_symbol, gammas};
use crate::error::{Error, Result};
use crate::grid::{kernel_spectrum, Direction, GaussianRegulator, GridSpec, ModeTable};
use crate::maxwell::Source;
use crate::par;

type C64 = Complex64;
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Coupling, mass, regulator width and time step.
#[derive(Debug, Clone)]
pub struct HamiltonianParams {
    pub e: f64,
    pub mass: f64,
    pub sigma: f64,
    pub dt: f64,
    /// Static external source; its current feeds the photon sectors.
    pub external: Option<Source>,
}

impl HamiltonianParams {
    pub fn new(e: f64, mass: f64, sigma: f64, dt: f64) -> Self {
        Self { e, mass, sigma, dt, external: None }
    }

    pub fn validate(&self, grid: &GridSpec) -> Result<()> {
        let h = grid.spacing();
        if self.sigma < 2.0 * h * (1.0 - 1e-12) {
            return Err(Error::Resolution { sigma: self.sigma, spacing: h });
        }
        if !(self.dt > 0.0) || self.dt > h / 4.0 * (1.0 + 1e-12) {
            return Err(Error::TimeStep { dt: self.dt, max: h / 4.0 });
        }
        Ok(())
    }
}

/// `[κ×]` as a row-major 3×3 matrix.
pub(crate) fn cross_matrix(k: [f64; 3]) -> [[f64; 3]; 3] {
    [[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]]
}

/// Maps `(E, B)` to the Coulomb potentials `(A0, 𝐀)` at one mode, 4×6
/// row-major.
pub(crate) fn coulomb_potential_map(modes: &ModeTable, q: usize) -> [C64; 24] {
    let mut l = [ZERO; 24];
    if modes.is_null(q) {
        return l;
    }
    let k = modes.kappa[q];
    let k2 = modes.kappa2[q];
    let x = cross_matrix(k);
    for c in 0..3 {
        l[c] = I * k[c] / k2;
    }
    for a in 0..3 {
        for c in 0..3 {
            l[(1 + a) * 6 + 3 + c] = I * x[a][c] / k2;
        }
    }
    l
}

/// Mode-domain generator for one sector shape.
/// Selection of terms of the sector Hamiltonian. The electron generator
/// (free Dirac plus annihilation) advances the electron time; the photon
/// generator (free Maxwell plus creation and external current) advances the
/// photon time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HamiltonianParts {
    pub electron_free: bool,
    pub photon_free: bool,
    pub creation: bool,
    pub annihilation: bool,
    pub external: bool,
}

impl HamiltonianParts {
    pub const ALL: Self = Self { electron_free: true, photon_free: true, creation: true, annihilation: true, external: true };
    pub const ELECTRON: Self = Self { electron_free: true, photon_free: false, creation: false, annihilation: true, external: false };
    pub const PHOTON: Self = Self { electron_free: false, photon_free: true, creation: true, annihilation: false, external: true };
}

pub struct SpectralHamiltonian {
    shape: SectorShape,
    modes: std::sync::Arc<ModeTable>,
    e: f64,
    ghat: Vec<f64>,
    dirac: Vec<[C64; 16]>,
    maxwell: Vec<[C64; 36]>,
    /// `[s][s'][c]`: spinor matrix of `A0 − α·𝐀` per F component.
    coupling: Vec<[C64; 96]>,
    alpha: [[C64; 16]; 3],
    external: Option<[Vec<C64>; 3]>,
}

impl SpectralHamiltonian {
    pub fn new(shape: SectorShape, p: &HamiltonianParams) -> Result<Self> {
        if shape.representation != Representation::F {
            return Err(Error::Representation("dynamics need the F representation".into()));
        }
        let grid = shape.grid;
        let h = grid.spacing();
        if p.sigma < 2.0 * h * (1.0 - 1e-12) {
            return Err(Error::Resolution { sigma: p.sigma, spacing: h });
        }
        let modes = grid.modes();
        let ghat = kernel_spectrum(&GaussianRegulator { sigma: p.sigma }, &grid)?;
        let flat = |m: &crate::dirac::Mat4| -> [C64; 16] { std::array::from_fn(|i| m[i / 4][i % 4]) };
        let g = gammas();
        let alpha = [flat(&g.alpha(1)), flat(&g.alpha(2)), flat(&g.alpha(3))];
        let dirac = (0..grid.sites()).map(|q| flat(&dirac_symbol(modes.kappa[q], p.mass))).collect();
        let maxwell = (0..grid.sites())
            .map(|q| {
                let x = cross_matrix(modes.kappa[q]);
                let mut m = [ZERO; 36];
                for a in 0..3 {
                    for c in 0..3 {
                        m[a * 6 + 3 + c] = C64::new(-x[a][c], 0.0);
                        m[(3 + a) * 6 + c] = C64::new(x[a][c], 0.0);
                    }
                }
                m
            })
            .collect();
        let coupling = (0..grid.sites())
            .map(|q| {
                let l = coulomb_potential_map(&modes, q);
                let mut t = [ZERO; 96];
                for s in 0..4 {
                    for sp in 0..4 {
                        for c in 0..6 {
                            let mut v = if s == sp { l[c] } else { ZERO };
                            for a in 0..3 {
                                v -= alpha[a][s * 4 + sp] * l[(1 + a) * 6 + c];
                            }
                            t[(s * 4 + sp) * 6 + c] = v;
                        }
                    }
                }
                t
            })
            .collect();
        let external = p.external.as_ref().map(|src| crate::maxwell::forward_vec(&src.j));
        Ok(Self { shape, modes, e: p.e, ghat, dirac, maxwell, coupling, alpha, external })
    }

    pub fn shape(&self) -> &SectorShape {
        &self.shape
    }

    fn tuples_per_chunk(comps: usize) -> usize {
        (par::REDUCE_CHUNK / comps).max(1)
    }

    /// Free part on one sector.
    pub fn free_block(&self, src: &[C64], n: usize) -> Vec<C64> {
        self.free_block_parts(src, n, true, true)
    }

    /// Free part restricted to electron and/or photon slots.
    pub fn free_block_parts(&self, src: &[C64], n: usize, electrons: bool, photons: bool) -> Vec<C64> {
        let layout = self.shape.layout(n);
        let comps = layout.comps;
        let tpc = Self::tuples_per_chunk(comps);
        let mut out = vec![ZERO; src.len()];
        par::for_each_chunk(&mut out, comps * tpc, |ci, chunk| {
            let mut sd = vec![0; layout.slots];
            for (ti, o) in chunk.chunks_mut(comps).enumerate() {
                let t = ci * tpc + ti;
                layout.site_digits(t, &mut sd);
                let v = &src[t * comps..(t + 1) * comps];
                for s in 0..layout.slots {
                    if (s < layout.m && !electrons) || (s >= layout.m && !photons) {
                        continue;
                    }
                    let mat: &[C64] = if s < layout.m { &self.dirac[sd[s]] } else { &self.maxwell[sd[s]] };
                    add_slot_matvec(o, v, layout.dims[s], layout.comp_strides[s], mat);
                }
            }
        });
        out
    }

    /// Creation into sector `n` from sector `n − 1`.
    pub fn creation_block(&self, src: &[C64], n: usize) -> Vec<C64> {
        let layout = self.shape.layout(n);
        let mut out = vec![ZERO; layout.len()];
        if n == 0 || layout.m == 0 || self.e == 0.0 {
            return out;
        }
        let sl = self.shape.layout(n - 1);
        let grid = self.shape.grid;
        let coef = -I * self.e / (n as f64).sqrt();
        let comps = layout.comps;
        // For every (j, k, out component): (c_k, s_j, source component with s_j = 0).
        let m = layout.m;
        let tables: Vec<Vec<(usize, usize, usize)>> = (0..m * n)
            .map(|jk| {
                let (j, k) = (jk / n, jk % n);
                let mut cd = vec![0; layout.slots];
                (0..comps)
                    .map(|c| {
                        layout.comp_digits(c, &mut cd);
                        let ck = cd[m + k];
                        let sj = cd[j];
                        let mut sc: Vec<usize> = cd.clone();
                        sc.remove(m + k);
                        sc[j] = 0;
                        (ck, sj, sl.comp_index(&sc))
                    })
                    .collect()
            })
            .collect();
        let tpc = Self::tuples_per_chunk(comps);
        par::for_each_chunk(&mut out, comps * tpc, |ci, chunk| {
            let mut sd = vec![0; layout.slots];
            let mut src_d = vec![0; sl.slots];
            for (ti, o) in chunk.chunks_mut(comps).enumerate() {
                layout.site_digits(ci * tpc + ti, &mut sd);
                for k in 0..n {
                    let q = sd[m + k];
                    let gq = self.ghat[q];
                    for j in 0..m {
                        src_d.clear();
                        src_d.extend(sd.iter().enumerate().filter(|&(s, _)| s != m + k).map(|(_, &d)| d));
                        src_d[j] = grid.mode_add(sd[j], q);
                        let base = sl.site_index(&src_d) * sl.comps;
                        let stride = sl.comp_strides[j];
                        for (c, &(ck, sj, sc)) in tables[j * n + k].iter().enumerate() {
                            if ck >= 3 {
                                continue;
                            }
                            let a = &self.alpha[ck];
                            let mut v = ZERO;
                            for sp in 0..4 {
                                v += a[sj * 4 + sp] * src[base + sc + sp * stride];
                            }
                            o[c] += coef * gq * v;
                        }
                    }
                }
            }
        });
        out
    }

    /// Annihilation into sector `n` from sector `n + 1`.
    pub fn annihilation_block(&self, src: &[C64], n: usize) -> Vec<C64> {
        let layout = self.shape.layout(n);
        let mut out = vec![ZERO; layout.len()];
        if n >= self.shape.n_max || layout.m == 0 || self.e == 0.0 {
            return out;
        }
        let sl = self.shape.layout(n + 1);
        let grid = self.shape.grid;
        let n3 = grid.sites();
        let coef = self.e * ((n + 1) as f64).sqrt() * grid.cell();
        let comps = layout.comps;
        let m = layout.m;
        let tpc = Self::tuples_per_chunk(comps);
        par::for_each_chunk(&mut out, comps * tpc, |ci, chunk| {
            let mut sd = vec![0; layout.slots];
            let mut cd = vec![0; layout.slots];
            let mut src_d = vec![0; sl.slots];
            for (ti, o) in chunk.chunks_mut(comps).enumerate() {
                layout.site_digits(ci * tpc + ti, &mut sd);
                for j in 0..m {
                    let stride = layout.comp_strides[j] * 6;
                    for q in 0..n3 {
                        if self.modes.is_null(q) {
                            continue;
                        }
                        let gq = self.ghat[q];
                        src_d[..layout.slots].copy_from_slice(&sd);
                        src_d[j] = grid.mode_sub(sd[j], q);
                        src_d[layout.slots] = q;
                        let base = sl.site_index(&src_d) * sl.comps;
                        let t = &self.coupling[q];
                        for (c, oc) in o.iter_mut().enumerate() {
                            layout.comp_digits(c, &mut cd);
                            let sj = cd[j];
                            cd[j] = 0;
                            let sc = layout.comp_index(&cd) * 6;
                            let mut v = ZERO;
                            for sp in 0..4 {
                                let row = &t[(sj * 4 + sp) * 6..(sj * 4 + sp) * 6 + 6];
                                let s0 = base + sc + sp * stride;
                                for cp in 0..6 {
                                    v += row[cp] * src[s0 + cp];
                                }
                            }
                            *oc += coef * gq * v;
                        }
                    }
                }
            }
        });
        out
    }

    /// External-current creation into sector `n` from sector `n − 1`.
    pub fn external_block(&self, src: &[C64], n: usize) -> Vec<C64> {
        let layout = self.shape.layout(n);
        let mut out = vec![ZERO; layout.len()];
        let Some(jh) = &self.external else { return out };
        if n == 0 {
            return out;
        }
        let sl = self.shape.layout(n - 1);
        let m = layout.m;
        let comps = layout.comps;
        let coef = -I / (n as f64).sqrt();
        let tables: Vec<Vec<(usize, usize)>> = (0..n)
            .map(|k| {
                let mut cd = vec![0; layout.slots];
                (0..comps)
                    .map(|c| {
                        layout.comp_digits(c, &mut cd);
                        let ck = cd[m + k];
                        let mut sc = cd.clone();
                        sc.remove(m + k);
                        (ck, sl.comp_index(&sc))
                    })
                    .collect()
            })
            .collect();
        let tpc = Self::tuples_per_chunk(comps);
        par::for_each_chunk(&mut out, comps * tpc, |ci, chunk| {
            let mut sd = vec![0; layout.slots];
            let mut src_d = vec![0; sl.slots];
            for (ti, o) in chunk.chunks_mut(comps).enumerate() {
                layout.site_digits(ci * tpc + ti, &mut sd);
                for k in 0..n {
                    let q = sd[m + k];
                    src_d.clear();
                    src_d.extend(sd.iter().enumerate().filter(|&(s, _)| s != m + k).map(|(_, &d)| d));
                    let base = sl.site_index(&src_d) * sl.comps;
                    for (c, &(ck, sc)) in tables[k].iter().enumerate() {
                        if ck < 3 {
                            o[c] += coef * jh[ck][q] * src[base + sc];
                        }
                    }
                }
            }
        });
        out
    }

    /// `H Ψ` on mode-domain sector values.
    pub fn apply(&self, psi: &[Vec<C64>]) -> Vec<Vec<C64>> {
        self.apply_parts(psi, HamiltonianParts::ALL)
    }

    /// Sum of the selected terms of `H` on mode-domain sector values.
    pub fn apply_parts(&self, psi: &[Vec<C64>], parts: HamiltonianParts) -> Vec<Vec<C64>> {
        let n_max = self.shape.n_max;
        let one = C64::new(1.0, 0.0);
        (0..=n_max)
            .map(|n| {
                let mut o = self.free_block_parts(&psi[n], n, parts.electron_free, parts.photon_free);
                if n > 0 {
                    if parts.creation {
                        par::axpy(&mut o, one, &self.creation_block(&psi[n - 1], n));
                    }
                    if parts.external && self.external.is_some() {
                        par::axpy(&mut o, one, &self.external_block(&psi[n - 1], n));
                    }
                }
                if n < n_max && parts.annihilation {
                    par::axpy(&mut o, one, &self.annihilation_block(&psi[n + 1], n));
                }
                o
            })
            .collect()
    }

    /// One classical RK4 step of `i∂_t Ψ = HΨ`.
    pub fn rk4_step(&self, psi: &[Vec<C64>], dt: f64) -> Vec<Vec<C64>> {
        self.rk4_step_parts(psi, dt, HamiltonianParts::ALL)
    }

    /// One RK4 step with only the selected terms of `H`.
    pub fn rk4_step_parts(&self, psi: &[Vec<C64>], dt: f64, parts: HamiltonianParts) -> Vec<Vec<C64>> {
        let rhs = |x: &[Vec<C64>]| -> Vec<Vec<C64>> {
            self.apply_parts(x, parts)
                .into_iter()
                .map(|mut v| {
                    par::scale(&mut v, -I);
                    v
                })
                .collect()
        };
        let stage = |base: &[Vec<C64>], k: &[Vec<C64>], s: f64| -> Vec<Vec<C64>> {
            base.iter().zip(k).map(|(b, kk)| par::add_scaled(b, C64::new(s, 0.0), kk)).collect()
        };
        let k1 = rhs(psi);
        let k2 = rhs(&stage(psi, &k1, 0.5 * dt));
        let k3 = rhs(&stage(psi, &k2, 0.5 * dt));
        let k4 = rhs(&stage(psi, &k3, dt));
        psi.iter()
            .enumerate()
            .map(|(n, p)| {
                let mut out = p.clone();
                par::axpy(&mut out, C64::new(dt / 6.0, 0.0), &k1[n]);
                par::axpy(&mut out, C64::new(dt / 3.0, 0.0), &k2[n]);
                par::axpy(&mut out, C64::new(dt / 3.0, 0.0), &k3[n]);
                par::axpy(&mut out, C64::new(dt / 6.0, 0.0), &k4[n]);
                out
            })
            .collect()
    }
}

pub(crate) fn spectral_values(state: &SectorState) -> Vec<Vec<C64>> {
    let grid = state.grid();
    state
        .sectors
        .iter()
        .map(|s| {
            let mut v = s.data().to_vec();
            joint_fft(&mut v, &state.layout(s.n), grid.n, Direction::Forward);
            v
        })
        .collect()
}

pub(crate) fn from_spectral(shape: SectorShape, psi: Vec<Vec<C64>>) -> SectorState {
    let sectors = psi
        .into_iter()
        .enumerate()
        .map(|(n, mut v)| {
            joint_fft(&mut v, &shape.layout(n), shape.grid.n, Direction::Inverse);
            super::Sector { n, arrays: vec![v] }
        })
        .collect();
    SectorState { shape, sectors }
}

/// `H Ψ` for an F-representation state.
pub fn lp_hamiltonian_apply(state: &SectorState, p: &HamiltonianParams) -> Result<SectorState> {
    let h = SpectralHamiltonian::new(state.shape, p)?;
    Ok(from_spectral(state.shape, h.apply(&spectral_values(state))))
}

/// RK4 evolution over `steps` steps of size `p.dt`.
pub fn evolve(state: &SectorState, p: &HamiltonianParams, steps: usize) -> Result<SectorState> {
    p.validate(&state.grid())?;
    let h = SpectralHamiltonian::new(state.shape, p)?;
    let mut psi = spectral_values(state);
    for _ in 0..steps {
        psi = h.rk4_step(&psi, p.dt);
    }
    Ok(from_spectral(state.shape, psi))
}

/// The annihilation term into sector `n` computed in position space by
/// smearing the last photon slot, inverting `d` there and evaluating at
/// `y = x_j`.
pub fn annihilation_smear_then_invert(state: &SectorState, p: &HamiltonianParams, n: usize) -> Result<Vec<C64>> {
    let shape = state.shape;
    if shape.representation != Representation::F {
        return Err(Error::Representation("F representation required".into()));
    }
    let layout = shape.layout(n);
    if n >= shape.n_max || layout.m == 0 {
        return Ok(vec![ZERO; layout.len()]);
    }
    let grid = shape.grid;
    let n3 = grid.sites();
    let sl = shape.layout(n + 1);
    let last = sl.slots - 1;
    let modes = grid.modes();
    let ghat = kernel_spectrum(&GaussianRegulator { sigma: p.sigma }, &grid)?;
    let mut src = state.sectors[n + 1].data().to_vec();
    slot_fft(&mut src, &sl, grid.n, last, Direction::Forward);
    // Smear (convolution), then apply the Coulomb inverse of d: 6 → 4 components.
    let pot_layout = Layout::new(shape.m, n + 1, n3, 4);
    let mut pot = vec![ZERO; pot_layout.len()];
    let conv = grid.cell() * (n3 as f64).sqrt();
    let tuples = sl.site_tuples;
    let rest = sl.comps / 6;
    for t in 0..tuples {
        let q = t % n3;
        let l = coulomb_potential_map(&modes, q);
        let w = conv * ghat[q];
        for r in 0..rest {
            let s = &src[t * sl.comps + r * 6..t * sl.comps + r * 6 + 6];
            for mu in 0..4 {
                let v: C64 = (0..6).map(|c| l[mu * 6 + c] * s[c]).sum();
                pot[t * pot_layout.comps + r * 4 + mu] = w * v;
            }
        }
    }
    slot_fft(&mut pot, &pot_layout, grid.n, last, Direction::Inverse);
    let g = gammas();
    let alpha = [g.alpha(1), g.alpha(2), g.alpha(3)];
    let coef = p.e * ((n + 1) as f64).sqrt();
    let mut out = vec![ZERO; layout.len()];
    let mut sd = vec![0; layout.slots];
    let mut cd = vec![0; layout.slots];
    let mut pd = vec![0; pot_layout.slots];
    for t in 0..layout.site_tuples {
        layout.site_digits(t, &mut sd);
        for j in 0..layout.m {
            pd[..layout.slots].copy_from_slice(&sd);
            pd[layout.slots] = sd[j];
            let base = pot_layout.site_index(&pd) * pot_layout.comps;
            for c in 0..layout.comps {
                layout.comp_digits(c, &mut cd);
                let sj = cd[j];
                let mut v = ZERO;
                for sp in 0..4 {
                    cd[j] = sp;
                    let pc = base + layout.comp_index(&cd) * 4;
                    v += if sp == sj { pot[pc] } else { ZERO };
                    for a in 0..3 {
                        v -= alpha[a][sj][sp] * pot[pc + 1 + a];
                    }
                }
                out[t * layout.comps + c] += coef * v;
            }
        }
    }
    Ok(out)
}

/// Largest relative difference between the two operator orderings of the
/// annihilation term over all sectors.
pub fn annihilation_ordering_difference(state: &SectorState, p: &HamiltonianParams) -> Result<f64> {
    let h = SpectralHamiltonian::new(state.shape, p)?;
    let psi = spectral_values(state);
    let mut worst: f64 = 0.0;
    for n in 0..state.shape.n_max {
        let mut a = h.annihilation_block(&psi[n + 1], n);
        joint_fft(&mut a, &state.layout(n), state.grid().n, Direction::Inverse);
        let b = annihilation_smear_then_invert(state, p, n)?;
        let diff: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
        let scale = par::norm_sqr(&a).sqrt().max(1e-300);
        worst = worst.max(diff / scale);
    }
    Ok(worst)
}
