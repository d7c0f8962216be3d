//! Truncated Fock families `Ψ^(m,n)`, `n = 0..=n_max`, at fixed electron
//! number `m`.
//!
//! A sector array is laid out as `[site of slot 0]…[site of slot m+n-1]
//! [component of slot 0]…[component of slot m+n-1]`: electron slots first,
//! then photon slots, with the component index fastest. Electron slots carry
//! four spinor components; photon slots carry `(E1, E2, E3, B1, B2, B3)` in
//! the F representation or `(A0, A1, A2, A3)` in the A representation. An
//! A-representation sector also stores the time derivatives in every subset
//! of its photon slots: `arrays[mask]` holds `∂_{y_k⁰}` for each bit `k` of
//! `mask`, and `arrays[0]` holds the values.

mod constraints;
mod hamiltonian;
mod product;

pub use constraints::*;
pub use hamiltonian::*;
pub use product::*;

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::container::{self, Header};
use crate::dirac::SpinorField;
use crate::error::{Error, Result};
use crate::grid::{fft3_strided, Direction, GridSpec};
use crate::maxwell::{PhotonA, PhotonF};
use crate::par;

type C64 = Complex64;

/// Working copies of a state assumed by the memory estimate (RK4 stages and
/// transform scratch).
pub const WORK_COPIES: u128 = 8;
/// Default memory budget in bytes.
pub const DEFAULT_MEMORY_BUDGET: u128 = 3 << 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Representation {
    A,
    F,
}

impl Representation {
    pub fn photon_components(self) -> usize {
        match self {
            Representation::A => 4,
            Representation::F => 6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorShape {
    pub grid: GridSpec,
    pub m: usize,
    pub n_max: usize,
    pub representation: Representation,
}

impl SectorShape {
    pub fn new(grid: GridSpec, m: usize, n_max: usize, representation: Representation) -> Self {
        Self { grid, m, n_max, representation }
    }

    pub fn layout(&self, n: usize) -> Layout {
        Layout::new(self.m, n, self.grid.sites(), self.representation.photon_components())
    }

    /// Number of arrays stored for sector `n`.
    pub fn arrays(&self, n: usize) -> usize {
        match self.representation {
            Representation::A => 1 << n,
            Representation::F => 1,
        }
    }

    /// Estimated peak memory in bytes.
    pub fn memory_estimate(&self) -> u128 {
        (0..=self.n_max)
            .map(|n| {
                let l = self.layout(n);
                (l.site_tuples as u128) * (l.comps as u128) * (self.arrays(n) as u128) * 16
            })
            .sum::<u128>()
            * WORK_COPIES
    }

    /// Refuses shapes above the budget. Without an explicit budget the
    /// default one applies together with `m·n_max ≤ 2` for `N ≥ 8`.
    pub fn guard(&self, budget: Option<u128>) -> Result<()> {
        let needed = self.memory_estimate();
        let limit = budget.unwrap_or(DEFAULT_MEMORY_BUDGET);
        if needed > limit {
            return Err(Error::Memory { needed, budget: limit });
        }
        if budget.is_none() && self.grid.n >= 8 && self.m * self.n_max > 2 {
            return Err(Error::Memory { needed, budget: limit });
        }
        Ok(())
    }
}

/// Index arithmetic for one sector.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub m: usize,
    pub n: usize,
    pub n3: usize,
    pub slots: usize,
    pub dims: Vec<usize>,
    pub comps: usize,
    pub comp_strides: Vec<usize>,
    pub site_tuples: usize,
}

impl Layout {
    pub fn new(m: usize, n: usize, n3: usize, photon_comps: usize) -> Self {
        let slots = m + n;
        let dims: Vec<usize> = (0..slots).map(|s| if s < m { 4 } else { photon_comps }).collect();
        let mut comp_strides = vec![1; slots];
        for s in (0..slots.saturating_sub(1)).rev() {
            comp_strides[s] = comp_strides[s + 1] * dims[s + 1];
        }
        let comps = dims.iter().product();
        Self { m, n, n3, slots, dims, comps, comp_strides, site_tuples: n3.pow(slots as u32) }
    }

    pub fn len(&self) -> usize {
        self.site_tuples * self.comps
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn site_digits(&self, mut s: usize, out: &mut [usize]) {
        for k in (0..self.slots).rev() {
            out[k] = s % self.n3;
            s /= self.n3;
        }
    }

    pub fn site_index(&self, digits: &[usize]) -> usize {
        digits.iter().fold(0, |acc, &d| acc * self.n3 + d)
    }

    pub fn comp_digits(&self, mut c: usize, out: &mut [usize]) {
        for k in (0..self.slots).rev() {
            out[k] = c % self.dims[k];
            c /= self.dims[k];
        }
    }

    pub fn comp_index(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.dims).fold(0, |acc, (&d, &n)| acc * n + d)
    }

    /// Stride in site-tuple units of slot `k`.
    pub fn site_stride(&self, k: usize) -> usize {
        self.n3.pow((self.slots - 1 - k) as u32)
    }
}

/// Unitary transform over every slot's lattice index.
pub(crate) fn joint_fft(data: &mut [C64], layout: &Layout, n: usize, dir: Direction) {
    for k in 0..layout.slots {
        fft3_strided(data, n, layout.site_stride(k) * layout.comps, dir);
    }
}

/// Transform over a single slot.
pub(crate) fn slot_fft(data: &mut [C64], layout: &Layout, n: usize, slot: usize, dir: Direction) {
    fft3_strided(data, n, layout.site_stride(slot) * layout.comps, dir);
}

/// `out += M v` on one component slot of a local component vector.
pub(crate) fn add_slot_matvec(out: &mut [C64], v: &[C64], dim: usize, stride: usize, mat: &[C64]) {
    let outer = v.len() / (dim * stride);
    for o in 0..outer {
        for i in 0..stride {
            let base = o * dim * stride + i;
            for a in 0..dim {
                let mut s = C64::new(0.0, 0.0);
                for b in 0..dim {
                    s += mat[a * dim + b] * v[base + b * stride];
                }
                out[base + a * stride] += s;
            }
        }
    }
}

/// `v ← M v` on one component slot (`M` is `rows × dim`, the slot dimension
/// becomes `rows`). Returns the new vector.
pub(crate) fn slot_map(v: &[C64], dim: usize, stride: usize, rows: usize, mat: &[C64]) -> Vec<C64> {
    let outer = v.len() / (dim * stride);
    let mut out = vec![C64::new(0.0, 0.0); outer * rows * stride];
    for o in 0..outer {
        for i in 0..stride {
            for a in 0..rows {
                let mut s = C64::new(0.0, 0.0);
                for b in 0..dim {
                    s += mat[a * dim + b] * v[o * dim * stride + b * stride + i];
                }
                out[o * rows * stride + a * stride + i] = s;
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sector {
    pub n: usize,
    pub arrays: Vec<Vec<C64>>,
}

impl Sector {
    pub fn data(&self) -> &[C64] {
        &self.arrays[0]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectorState {
    pub shape: SectorShape,
    pub sectors: Vec<Sector>,
}

impl SectorState {
    pub fn zeros(shape: SectorShape) -> Self {
        let sectors = (0..=shape.n_max)
            .map(|n| Sector {
                n,
                arrays: vec![vec![C64::new(0.0, 0.0); shape.layout(n).len()]; shape.arrays(n)],
            })
            .collect();
        Self { shape, sectors }
    }

    pub fn grid(&self) -> GridSpec {
        self.shape.grid
    }

    pub fn layout(&self, n: usize) -> Layout {
        self.shape.layout(n)
    }

    pub fn check_compatible(&self, o: &SectorState) -> Result<()> {
        if self.shape != o.shape {
            return Err(Error::Shape(format!("{:?} vs {:?}", self.shape, o.shape)));
        }
        Ok(())
    }

    pub fn map_arrays(&self, f: impl Fn(usize, usize, &[C64]) -> Vec<C64>) -> Self {
        let sectors = self
            .sectors
            .iter()
            .map(|s| Sector {
                n: s.n,
                arrays: s.arrays.iter().enumerate().map(|(k, a)| f(s.n, k, a)).collect(),
            })
            .collect();
        Self { shape: self.shape, sectors }
    }

    pub fn scaled(&self, s: C64) -> Self {
        self.map_arrays(|_, _, a| {
            let mut v = a.to_vec();
            par::scale(&mut v, s);
            v
        })
    }

    /// `self + s·o`.
    pub fn add_scaled(&self, s: C64, o: &SectorState) -> Self {
        assert_eq!(self.shape, o.shape, "sector shapes differ");
        self.map_arrays(|n, k, a| par::add_scaled(a, s, &o.sectors[n].arrays[k]))
    }

    pub fn add(&self, o: &SectorState) -> Self {
        self.add_scaled(C64::new(1.0, 0.0), o)
    }

    pub fn sub(&self, o: &SectorState) -> Self {
        self.add_scaled(C64::new(-1.0, 0.0), o)
    }

    /// Plain (positive) L² norm over all sectors and stored arrays, with the
    /// lattice measure.
    pub fn l2_norm(&self) -> f64 {
        let cell = self.grid().cell();
        self.sectors
            .iter()
            .map(|s| {
                let w = cell.powi((self.shape.m + s.n) as i32);
                s.arrays.iter().map(|a| par::norm_sqr(a)).sum::<f64>() * w
            })
            .sum::<f64>()
            .sqrt()
    }

    /// L² norm of one sector's values.
    pub fn sector_norm(&self, n: usize) -> f64 {
        let w = self.grid().cell().powi((self.shape.m + n) as i32);
        (par::norm_sqr(self.sectors[n].data()) * w).sqrt()
    }

    /// Applies the unitary transform over all slots of every stored array.
    pub fn transformed(&self, dir: Direction) -> Self {
        let grid = self.grid();
        self.map_arrays(|n, _, a| {
            let mut v = a.to_vec();
            joint_fft(&mut v, &self.shape.layout(n), grid.n, dir);
            v
        })
    }

    /// Seeded state whose every slot is band-limited (`|n_a| < cutoff`, no
    /// null modes). A-representation states get random derivative arrays.
    pub fn random(shape: SectorShape, cutoff: i64, seed: u64) -> Self {
        let grid = shape.grid;
        let modes = grid.modes();
        let keep: Vec<bool> = (0..grid.sites())
            .map(|m| {
                grid.coords(m).iter().all(|&u| u != grid.n / 2 && grid.mode_number(u).abs() < cutoff)
                    && !modes.is_null(m)
            })
            .collect();
        let mut st = SectorState::zeros(shape);
        for s in st.sectors.iter_mut() {
            let layout = shape.layout(s.n);
            for (k, arr) in s.arrays.iter_mut().enumerate() {
                let noise = crate::random::complex_values(arr.len(), seed, ((s.n as u64) << 16) + k as u64);
                let mut digits = vec![0; layout.slots];
                for (i, v) in arr.iter_mut().enumerate() {
                    layout.site_digits(i / layout.comps, &mut digits);
                    if digits.iter().all(|&d| keep[d]) {
                        *v = noise[i];
                    }
                }
                joint_fft(arr, &layout, grid.n, Direction::Inverse);
            }
        }
        st
    }

    /// Tensor product `ψ_1 ⊗ … ⊗ ψ_m ⊗ F_1 ⊗ … ⊗ F_n` placed in sector `n`
    /// (F representation, no symmetrization).
    pub fn product_f(shape: SectorShape, spinors: &[&SpinorField], photons: &[&PhotonF]) -> Result<Self> {
        if shape.representation != Representation::F || spinors.len() != shape.m || photons.len() > shape.n_max {
            return Err(Error::Shape("product does not fit the sector shape".into()));
        }
        let mut factors: Vec<Vec<&crate::grid::ScalarField>> = spinors.iter().map(|s| s.c.iter().collect()).collect();
        factors.extend(photons.iter().map(|p| p.components().to_vec()));
        let mut st = SectorState::zeros(shape);
        st.sectors[photons.len()].arrays[0] = tensor_product(&shape.layout(photons.len()), &factors);
        Ok(st)
    }

    /// Tensor product in the A representation; slot derivative arrays are the
    /// products with the photon dots substituted.
    pub fn product_a(shape: SectorShape, spinors: &[&SpinorField], photons: &[&PhotonA]) -> Result<Self> {
        if shape.representation != Representation::A || spinors.len() != shape.m || photons.len() > shape.n_max {
            return Err(Error::Shape("product does not fit the sector shape".into()));
        }
        let n = photons.len();
        let layout = shape.layout(n);
        let mut st = SectorState::zeros(shape);
        for mask in 0..(1usize << n) {
            let mut factors: Vec<Vec<&crate::grid::ScalarField>> =
                spinors.iter().map(|s| s.c.iter().collect()).collect();
            for (k, p) in photons.iter().enumerate() {
                let c = p.components();
                factors.push(if mask >> k & 1 == 1 { c[4..8].to_vec() } else { c[0..4].to_vec() });
            }
            st.sectors[n].arrays[mask] = tensor_product(&layout, &factors);
        }
        Ok(st)
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut files = Vec::new();
        for s in &self.sectors {
            let layout = self.layout(s.n);
            for (mask, a) in s.arrays.iter().enumerate() {
                let tag = format!("sector_m{}_n{}", self.shape.m, s.n);
                let file = if s.arrays.len() == 1 { format!("{tag}.bin") } else { format!("{tag}_d{mask}.bin") };
                let mut header = Header::new(self.grid(), vec![self.grid().n; 3 * layout.slots], layout.comps, &tag);
                header.metadata.insert("derivative_mask".into(), mask.into());
                container::write(&dir.join(&file), &header, a)?;
                files.push(serde_json::json!({ "n": s.n, "mask": mask, "tag": tag, "file": file }));
            }
        }
        let manifest = serde_json::json!({
            "shape": self.shape,
            "sectors": files,
            "layout": "electron sites, photon sites, then components; components fastest",
            "conventions": {
                "transform": "unitary",
                "spinor": "dirac_standard",
                "photon_F": ["E1", "E2", "E3", "B1", "B2", "B3"],
                "photon_A": ["A0", "A1", "A2", "A3"],
                "metric": "+---",
            },
        });
        std::fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let manifest: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.join("manifest.json"))?)?;
        let shape: SectorShape = serde_json::from_value(manifest["shape"].clone())?;
        let mut st = SectorState::zeros(shape);
        let entries = manifest["sectors"].as_array().ok_or_else(|| Error::Format("manifest lists no sectors".into()))?;
        for e in entries {
            let n = e["n"].as_u64().ok_or_else(|| Error::Format("sector without n".into()))? as usize;
            let mask = e["mask"].as_u64().unwrap_or(0) as usize;
            let file = e["file"].as_str().ok_or_else(|| Error::Format("sector without file".into()))?;
            let (header, data) = container::read(&dir.join(file))?;
            if header.tag != format!("sector_m{}_n{}", shape.m, n) || n > shape.n_max || mask >= shape.arrays(n) {
                return Err(Error::Format(format!("unexpected sector file {file}")));
            }
            if data.len() != shape.layout(n).len() {
                return Err(Error::SizeMismatch(format!("sector file {file} has {} values", data.len())));
            }
            st.sectors[n].arrays[mask] = data;
        }
        Ok(st)
    }
}

fn tensor_product(layout: &Layout, factors: &[Vec<&crate::grid::ScalarField>]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); layout.len()];
    let comps = layout.comps;
    par::for_each_chunk(&mut out, comps, |t, chunk| {
        let mut sd = vec![0; layout.slots];
        let mut cd = vec![0; layout.slots];
        layout.site_digits(t, &mut sd);
        for (c, v) in chunk.iter_mut().enumerate() {
            layout.comp_digits(c, &mut cd);
            let mut p = C64::new(1.0, 0.0);
            for k in 0..layout.slots {
                p *= factors[k][cd[k]].data[sd[k]];
            }
            *v = p;
        }
    });
    out
}

/// Permutations of `0..k` with their signs.
pub fn permutations(k: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, sign: f64, out: &mut Vec<(Vec<usize>, f64)>) {
        if rest.is_empty() {
            out.push((prefix.clone(), sign));
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            prefix.push(x);
            rec(prefix, rest, if i % 2 == 0 { sign } else { -sign }, out);
            prefix.pop();
            rest.insert(i, x);
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut (0..k).collect(), 1.0, &mut out);
    out
}

/// Reorders slots: slot `s` of the result is slot `perm[s]` of the input.
pub fn permute_slots(data: &[C64], layout: &Layout, perm: &[usize]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); data.len()];
    let comps = layout.comps;
    par::for_each_chunk(&mut out, comps, |t, chunk| {
        let mut sd = vec![0; layout.slots];
        let mut src = vec![0; layout.slots];
        let mut cd = vec![0; layout.slots];
        let mut sc = vec![0; layout.slots];
        layout.site_digits(t, &mut sd);
        for s in 0..layout.slots {
            src[perm[s]] = sd[s];
        }
        let base = layout.site_index(&src) * comps;
        for (c, v) in chunk.iter_mut().enumerate() {
            layout.comp_digits(c, &mut cd);
            for s in 0..layout.slots {
                sc[perm[s]] = cd[s];
            }
            *v = data[base + layout.comp_index(&sc)];
        }
    });
    out
}

/// Maps a derivative mask through a photon-slot permutation.
fn permute_mask(mask: usize, photon_perm: &[usize]) -> usize {
    let mut out = 0;
    for (s, &p) in photon_perm.iter().enumerate() {
        if mask >> p & 1 == 1 {
            out |= 1 << s;
        }
    }
    out
}

/// Antisymmetrizes electron slots and symmetrizes photon slots in every
/// sector.
pub fn symmetrize(state: &SectorState) -> SectorState {
    let m = state.shape.m;
    let electron_perms = permutations(m);
    let mut out = SectorState::zeros(state.shape);
    for s in &state.sectors {
        let layout = state.layout(s.n);
        let photon_perms = permutations(s.n);
        let weight = 1.0 / (electron_perms.len() * photon_perms.len()) as f64;
        for (pe, sign) in &electron_perms {
            for (pp, _) in &photon_perms {
                let mut perm: Vec<usize> = pe.clone();
                perm.extend(pp.iter().map(|&p| p + m));
                for (mask, a) in s.arrays.iter().enumerate() {
                    let moved = permute_slots(a, &layout, &perm);
                    let target = &mut out.sectors[s.n].arrays[permute_mask(mask, pp)];
                    par::axpy(target, C64::new(sign * weight, 0.0), &moved);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::ScalarField;

    fn shape(m: usize, n_max: usize) -> SectorShape {
        SectorShape::new(GridSpec::new(4, 2.0).unwrap(), m, n_max, Representation::F)
    }

    #[test]
    fn layout_digits_round_trip() {
        let l = Layout::new(1, 2, 64, 6);
        assert_eq!(l.comps, 4 * 36);
        let mut d = vec![0; 3];
        l.site_digits(12345, &mut d);
        assert_eq!(l.site_index(&d), 12345);
        l.comp_digits(100, &mut d);
        assert_eq!(d, vec![2, 4, 4]);
        assert_eq!(l.comp_index(&d), 100);
    }

    #[test]
    fn permutation_signs() {
        let p = permutations(3);
        assert_eq!(p.len(), 6);
        let odd = p.iter().filter(|(_, s)| *s < 0.0).count();
        assert_eq!(odd, 3);
        assert!(p.iter().any(|(q, s)| q == &vec![1, 0, 2] && *s < 0.0));
    }

    #[test]
    fn symmetrize_is_idempotent() {
        let st = SectorState::random(shape(0, 2), 2, 3);
        let a = symmetrize(&st);
        let b = symmetrize(&a);
        assert!(a.sub(&b).l2_norm() < 1e-14 * a.l2_norm());
    }

    #[test]
    fn photon_pair_is_swap_symmetric() {
        let sh = shape(0, 2);
        let st = symmetrize(&SectorState::random(sh, 2, 4));
        let layout = sh.layout(2);
        let swapped = permute_slots(st.sectors[2].data(), &layout, &[1, 0]);
        // Explicit transpose: (y1, c1, y2, c2) -> (y2, c2, y1, c1).
        let d = st.sectors[2].data();
        let n3 = 64;
        for y1 in (0..n3).step_by(7) {
            for y2 in (0..n3).step_by(5) {
                for c1 in 0..6 {
                    for c2 in 0..6 {
                        let a = d[(y1 * n3 + y2) * 36 + c1 * 6 + c2];
                        let b = d[(y2 * n3 + y1) * 36 + c2 * 6 + c1];
                        assert!((a - b).norm() < 1e-15);
                        assert!((swapped[(y1 * n3 + y2) * 36 + c1 * 6 + c2] - a).norm() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn identical_electrons_cancel() {
        let sh = shape(2, 0);
        let g = sh.grid;
        let prof = crate::random::bandlimited_field(&g, 2, 5);
        let psi = SpinorField::from_profile(&prof, [C64::new(1.0, 0.0), C64::new(0.0, 0.5), C64::new(0.0, 0.0), C64::new(0.2, 0.0)], 1.0, 1.0);
        let st = SectorState::product_f(sh, &[&psi, &psi], &[]).unwrap();
        assert!(st.l2_norm() > 0.1);
        assert!(symmetrize(&st).l2_norm() < 1e-15);
    }

    #[test]
    fn memory_guard_refuses_large_shapes() {
        let g = GridSpec::new(8, 1.0).unwrap();
        assert!(SectorShape::new(g, 1, 1, Representation::F).guard(None).is_ok());
        assert!(SectorShape::new(g, 0, 2, Representation::F).guard(None).is_ok());
        assert!(SectorShape::new(g, 2, 2, Representation::F).guard(None).is_err());
        assert!(SectorShape::new(g, 1, 1, Representation::F).guard(Some(1 << 20)).is_err());
    }

    #[test]
    fn persistence_round_trip() {
        let sh = SectorShape::new(GridSpec::new(4, 1.5).unwrap(), 1, 1, Representation::A);
        let st = SectorState::random(sh, 2, 9);
        let dir = tempfile::tempdir().unwrap();
        st.save(dir.path()).unwrap();
        assert_eq!(SectorState::load(dir.path()).unwrap(), st);
        assert!(dir.path().join("sector_m1_n1_d1.bin").exists());
    }

    #[test]
    fn product_matches_factors() {
        let sh = shape(1, 1);
        let g = sh.grid;
        let prof = crate::random::bandlimited_field(&g, 2, 1);
        let psi = SpinorField::from_profile(&prof, [C64::new(1.0, 0.0); 4], 1.0, 1.0);
        let f = crate::maxwell::random_constrained_f(&g, 2, 2, 0);
        let st = SectorState::product_f(sh, &[&psi], &[&f]).unwrap();
        let l = sh.layout(1);
        let idx = l.site_index(&[3, 17]) * l.comps + l.comp_index(&[2, 4]);
        let expect = psi.c[2].data[3] * f.b.c[1].data[17];
        assert!((st.sectors[1].data()[idx] - expect).norm() < 1e-15);
        let _ = ScalarField::zeros(g);
    }
}
