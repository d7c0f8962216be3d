//! Equal-time scalar product on a flat slice and the switch between the A and
//! F representations.
//!
//! Electron slots pair with the identity. A-representation photon slots pair
//! through the flat-slice photon form, written per mode as an 8×8 kernel on
//! (value, dot). F-representation photon slots pair through
//! `ω(F, G) = i∫(𝐄_F*·𝐀_G − 𝐀_F*·𝐄_G)` with Coulomb potentials, which is the
//! same form evaluated on `d⁻¹F`.

use num_complex::Complex64;

use super::hamiltonian::{coulomb_potential_map, cross_matrix};
use super::{joint_fft, slot_map, Layout, Representation, Sector, SectorState};
use crate::error::{Error, Result};
use crate::grid::{Direction, ModeTable};
use crate::par;

type C64 = Complex64;
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

/// `ω` kernel on `(E, B)`: `[[0, −X], [X, 0]]/|κ|²`, zero on null modes.
pub(crate) fn omega_kernel(modes: &ModeTable, q: usize) -> [C64; 36] {
    let mut k = [ZERO; 36];
    if modes.is_null(q) {
        return k;
    }
    let x = cross_matrix(modes.kappa[q]);
    let k2 = modes.kappa2[q];
    for a in 0..3 {
        for c in 0..3 {
            k[a * 6 + 3 + c] = C64::new(-x[a][c] / k2, 0.0);
            k[(3 + a) * 6 + c] = C64::new(x[a][c] / k2, 0.0);
        }
    }
    k
}

/// Blocks `(K_vv, K_vd, K_dv)` of the A-slot kernel; `K_dd = 0`.
pub(crate) fn a_kernel(modes: &ModeTable, q: usize) -> ([C64; 16], [C64; 16], [C64; 16]) {
    let k = modes.kappa[q];
    let mut vv = [ZERO; 16];
    let mut vd = [ZERO; 16];
    let mut dv = [ZERO; 16];
    for a in 0..3 {
        vv[1 + a] = C64::new(-k[a], 0.0);
        vv[(1 + a) * 4] = C64::new(-k[a], 0.0);
        vd[(1 + a) * 5] = I;
        dv[(1 + a) * 5] = -I;
    }
    (vv, vd, dv)
}

fn mode_arrays(sector: &Sector, layout: &Layout, n: usize) -> Vec<Vec<C64>> {
    sector
        .arrays
        .iter()
        .map(|a| {
            let mut v = a.clone();
            joint_fft(&mut v, layout, n, Direction::Forward);
            v
        })
        .collect()
}

fn check_dots(state: &SectorState) -> Result<()> {
    if state.shape.representation == Representation::A {
        for s in &state.sectors {
            if s.arrays.len() != 1 << s.n {
                return Err(Error::MissingDots);
            }
        }
    }
    Ok(())
}

/// Contribution of one sector, given mode-domain arrays.
fn sector_product(state: &SectorState, n: usize, a: &[Vec<C64>], b: &[Vec<C64>]) -> C64 {
    let layout = state.layout(n);
    let modes = state.grid().modes();
    let comps = layout.comps;
    let m = layout.m;
    let weight = state.grid().cell().powi((m + n) as i32);
    let rep = state.shape.representation;
    let sum = par::sum_complex(layout.site_tuples, |range| {
        let mut sd = vec![0; layout.slots];
        let mut acc = ZERO;
        for t in range {
            layout.site_digits(t, &mut sd);
            let span = t * comps..(t + 1) * comps;
            match rep {
                Representation::F => {
                    let mut v = b[0][span.clone()].to_vec();
                    for k in 0..n {
                        let s = m + k;
                        v = slot_map(&v, 6, layout.comp_strides[s], 6, &omega_kernel(&modes, sd[s]));
                    }
                    acc += a[0][span].iter().zip(&v).map(|(x, y)| x.conj() * y).sum::<C64>();
                }
                Representation::A => {
                    let mut v: Vec<Vec<C64>> = b.iter().map(|arr| arr[span.clone()].to_vec()).collect();
                    for k in 0..n {
                        let s = m + k;
                        let stride = layout.comp_strides[s];
                        let (vv, vd, dv) = a_kernel(&modes, sd[s]);
                        let bit = 1 << k;
                        let mut next = vec![Vec::new(); v.len()];
                        for mask in 0..v.len() {
                            next[mask] = if mask & bit == 0 {
                                let mut x = slot_map(&v[mask], 4, stride, 4, &vv);
                                let y = slot_map(&v[mask | bit], 4, stride, 4, &vd);
                                x.iter_mut().zip(&y).for_each(|(p, q)| *p += q);
                                x
                            } else {
                                slot_map(&v[mask & !bit], 4, stride, 4, &dv)
                            };
                        }
                        v = next;
                    }
                    for (mask, vm) in v.iter().enumerate() {
                        acc += a[mask][span.clone()].iter().zip(vm).map(|(x, y)| x.conj() * y).sum::<C64>();
                    }
                }
            }
        }
        acc
    });
    sum * weight
}

/// Full equal-time scalar product on the flat slice.
pub fn full_scalar_product(s: &SectorState, t: &SectorState) -> Result<C64> {
    s.check_compatible(t)?;
    check_dots(s)?;
    check_dots(t)?;
    let n = s.grid().n;
    let mut total = ZERO;
    for k in 0..s.sectors.len() {
        let layout = s.layout(k);
        let a = mode_arrays(&s.sectors[k], &layout, n);
        let b = mode_arrays(&t.sectors[k], &layout, n);
        total += sector_product(s, k, &a, &b);
    }
    Ok(total)
}

/// Product of mode-domain F-representation values (used by drift series).
pub fn full_scalar_product_modes(s: &SectorState, a: &[Vec<C64>], b: &[Vec<C64>]) -> C64 {
    (0..a.len())
        .map(|n| sector_product(s, n, &[a[n].clone()], &[b[n].clone()]))
        .sum()
}

/// Per-sector contributions of the product.
pub fn sector_products(s: &SectorState, t: &SectorState) -> Result<Vec<C64>> {
    s.check_compatible(t)?;
    check_dots(s)?;
    check_dots(t)?;
    let n = s.grid().n;
    Ok((0..s.sectors.len())
        .map(|k| {
            let layout = s.layout(k);
            sector_product(s, k, &mode_arrays(&s.sectors[k], &layout, n), &mode_arrays(&t.sectors[k], &layout, n))
        })
        .collect())
}

/// `(E, B) ↦ (A0, 𝐀)` and `(E, B) ↦ (Ȧ0, 𝐀̇)` at one mode (Coulomb gauge,
/// no source), 4×6 each.
pub(crate) fn f_to_a_maps(modes: &ModeTable, q: usize) -> ([C64; 24], [C64; 24]) {
    let lv = coulomb_potential_map(modes, q);
    let mut ld = [ZERO; 24];
    let k = modes.kappa[q];
    let k2 = modes.kappa2[q];
    for a in 0..3 {
        for c in 0..3 {
            let mut v = if a == c { -1.0 } else { 0.0 };
            if k2 > 0.0 {
                v += k[a] * k[c] / k2;
            }
            ld[(1 + a) * 6 + c] = C64::new(v, 0.0);
        }
    }
    (lv, ld)
}

/// `(A0, 𝐀) ↦ (E, B)` and `(Ȧ0, 𝐀̇) ↦ (E, B)` at one mode, 6×4 each.
fn a_to_f_maps(modes: &ModeTable, q: usize) -> ([C64; 24], [C64; 24]) {
    let k = modes.kappa[q];
    let x = cross_matrix(k);
    let mut mv = [ZERO; 24];
    let mut md = [ZERO; 24];
    for c in 0..3 {
        mv[c * 4] = -I * k[c];
        md[c * 4 + 1 + c] = C64::new(-1.0, 0.0);
        for a in 0..3 {
            mv[(3 + c) * 4 + 1 + a] = I * x[c][a];
        }
    }
    (mv, md)
}

/// Coulomb-gauge A representation of an F-representation state, with all
/// derivative arrays. Time derivatives of `A0` are set to zero (no source
/// in the photon slot).
pub fn to_a_representation(state: &SectorState) -> Result<SectorState> {
    if state.shape.representation != Representation::F {
        return Err(Error::Representation("expected the F representation".into()));
    }
    let grid = state.grid();
    let modes = grid.modes();
    let mut shape = state.shape;
    shape.representation = Representation::A;
    let mut out = SectorState::zeros(shape);
    for s in &state.sectors {
        let fl = state.layout(s.n);
        let al = shape.layout(s.n);
        let mut src = s.data().to_vec();
        joint_fft(&mut src, &fl, grid.n, Direction::Forward);
        for mask in 0..(1usize << s.n) {
            let mut dst = vec![ZERO; al.len()];
            par::for_each_chunk(&mut dst, al.comps, |t, chunk| {
                let mut sd = vec![0; fl.slots];
                fl.site_digits(t, &mut sd);
                let mut v = src[t * fl.comps..(t + 1) * fl.comps].to_vec();
                let mut dims = fl.dims.clone();
                for k in 0..s.n {
                    let slot = fl.m + k;
                    let stride: usize = dims[slot + 1..].iter().product();
                    let (lv, ld) = f_to_a_maps(&modes, sd[slot]);
                    v = slot_map(&v, 6, stride, 4, if mask >> k & 1 == 1 { &ld } else { &lv });
                    dims[slot] = 4;
                }
                chunk.copy_from_slice(&v);
            });
            joint_fft(&mut dst, &al, grid.n, Direction::Inverse);
            out.sectors[s.n].arrays[mask] = dst;
        }
    }
    Ok(out)
}

/// F representation `F = dA` in every photon slot.
pub fn to_f_representation(state: &SectorState) -> Result<SectorState> {
    if state.shape.representation != Representation::A {
        return Err(Error::Representation("expected the A representation".into()));
    }
    check_dots(state)?;
    let grid = state.grid();
    let modes = grid.modes();
    let mut shape = state.shape;
    shape.representation = Representation::F;
    let mut out = SectorState::zeros(shape);
    for s in &state.sectors {
        let al = state.layout(s.n);
        let fl = shape.layout(s.n);
        let src = mode_arrays(s, &al, grid.n);
        let mut dst = vec![ZERO; fl.len()];
        par::for_each_chunk(&mut dst, fl.comps, |t, chunk| {
            let mut sd = vec![0; al.slots];
            al.site_digits(t, &mut sd);
            for (mask, arr) in src.iter().enumerate() {
                let mut v = arr[t * al.comps..(t + 1) * al.comps].to_vec();
                let mut dims = al.dims.clone();
                for k in 0..s.n {
                    let slot = al.m + k;
                    let stride: usize = dims[slot + 1..].iter().product();
                    let (mv, md) = a_to_f_maps(&modes, sd[slot]);
                    v = slot_map(&v, 4, stride, 6, if mask >> k & 1 == 1 { &md } else { &mv });
                    dims[slot] = 6;
                }
                chunk.iter_mut().zip(&v).for_each(|(c, x)| *c += x);
            }
        });
        joint_fft(&mut dst, &fl, grid.n, Direction::Inverse);
        out.sectors[s.n].arrays[0] = dst;
    }
    Ok(out)
}
