//! Periodic cubic lattice, unitary spectral transforms and the regulated delta.
//!
//! Sites are stored row-major, `idx = (i*N + j)*N + l`, with `i` along axis 1.
//! Mode index `u` in `0..N` corresponds to the integer wave number
//! `u` for `u < N/2` and `u - N` otherwise.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;

pub type C64 = Complex64;

/// Lattice size and box length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "L")]
    pub length: f64,
}

impl GridSpec {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 4 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!("N = {n} must be even and at least 4")));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidGrid(format!("L = {length} must be positive")));
        }
        Ok(Self { n, length })
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn sites(&self) -> usize {
        self.n * self.n * self.n
    }

    /// Lattice volume element `h³`.
    pub fn cell(&self) -> f64 {
        self.spacing().powi(3)
    }

    pub fn index(&self, i: usize, j: usize, l: usize) -> usize {
        (i * self.n + j) * self.n + l
    }

    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx / (n * n), (idx / n) % n, idx % n]
    }

    pub fn position(&self, idx: usize) -> [f64; 3] {
        let h = self.spacing();
        let c = self.coords(idx);
        [c[0] as f64 * h, c[1] as f64 * h, c[2] as f64 * h]
    }

    /// Signed wave number of a mode index along one axis.
    pub fn mode_number(&self, u: usize) -> i64 {
        if u < self.n / 2 {
            u as i64
        } else {
            u as i64 - self.n as i64
        }
    }

    /// Index of the mode `a + b` (wave numbers add modulo N).
    pub fn mode_add(&self, a: usize, b: usize) -> usize {
        let n = self.n;
        let [a0, a1, a2] = self.coords(a);
        let [b0, b1, b2] = self.coords(b);
        self.index((a0 + b0) % n, (a1 + b1) % n, (a2 + b2) % n)
    }

    /// Index of the mode `a - b`.
    pub fn mode_sub(&self, a: usize, b: usize) -> usize {
        let n = self.n;
        let [a0, a1, a2] = self.coords(a);
        let [b0, b1, b2] = self.coords(b);
        self.index((a0 + n - b0) % n, (a1 + n - b1) % n, (a2 + n - b2) % n)
    }

    /// Index of the mode `-a`.
    pub fn mode_neg(&self, a: usize) -> usize {
        self.mode_sub(0, a)
    }

    /// Minimal-image displacement from `center` to site `idx`.
    pub fn displacement(&self, idx: usize, center: [f64; 3]) -> [f64; 3] {
        let p = self.position(idx);
        let l = self.length;
        let mut d = [0.0; 3];
        for a in 0..3 {
            let mut x = p[a] - center[a];
            x -= l * (x / l).round();
            d[a] = x;
        }
        d
    }

    /// Cached wave-vector tables.
    pub fn modes(&self) -> Arc<ModeTable> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, u64), Arc<ModeTable>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let key = (self.n, self.length.to_bits());
        let mut guard = cache.lock().expect("mode cache poisoned");
        guard
            .entry(key)
            .or_insert_with(|| Arc::new(ModeTable::build(self)))
            .clone()
    }
}

/// Per-mode wave vectors.
///
/// `kappa` is the derivative symbol: the Nyquist component along any axis is
/// zero so that real fields stay real under differentiation. All Laplacians
/// in the crate are `|kappa|²`, which keeps `div curl = 0` and
/// `curl curl = grad div - Δ` exact. Modes with `kappa = 0` are null modes.
#[derive(Debug)]
pub struct ModeTable {
    pub kappa: Vec<[f64; 3]>,
    pub kappa2: Vec<f64>,
    /// Unmodified wave vectors, used for plane waves and interpolation.
    pub k_full: Vec<[f64; 3]>,
}

impl ModeTable {
    fn build(grid: &GridSpec) -> Self {
        let n = grid.n;
        let dk = 2.0 * PI / grid.length;
        let axis = |u: usize| -> (f64, f64) {
            let m = grid.mode_number(u);
            let full = dk * m as f64;
            let der = if u == n / 2 { 0.0 } else { full };
            (der, full)
        };
        let mut kappa = Vec::with_capacity(grid.sites());
        let mut k_full = Vec::with_capacity(grid.sites());
        for idx in 0..grid.sites() {
            let c = grid.coords(idx);
            let (a, fa) = axis(c[0]);
            let (b, fb) = axis(c[1]);
            let (d, fd) = axis(c[2]);
            kappa.push([a, b, d]);
            k_full.push([fa, fb, fd]);
        }
        let kappa2 = kappa.iter().map(|k| k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).collect();
        Self { kappa, kappa2, k_full }
    }

    pub fn is_null(&self, mode: usize) -> bool {
        self.kappa2[mode] == 0.0
    }

    pub fn norm(&self, mode: usize) -> f64 {
        self.kappa2[mode].sqrt()
    }
}

/// Complex scalar field on the lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: GridSpec,
    pub data: Vec<C64>,
}

impl ScalarField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, data: vec![C64::new(0.0, 0.0); grid.sites()] }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn([f64; 3]) -> C64) -> Self {
        let data = (0..grid.sites()).map(|i| f(grid.position(i))).collect();
        Self { grid, data }
    }

    pub fn from_data(grid: GridSpec, data: Vec<C64>) -> Result<Self> {
        if data.len() != grid.sites() {
            return Err(Error::SizeMismatch(format!(
                "{} values for {} sites",
                data.len(),
                grid.sites()
            )));
        }
        Ok(Self { grid, data })
    }

    pub fn check_grid(&self) -> Result<()> {
        if self.data.len() != self.grid.sites() {
            return Err(Error::SizeMismatch(format!(
                "{} values for {} sites",
                self.data.len(),
                self.grid.sites()
            )));
        }
        Ok(())
    }

    /// `h³ Σ conj(self) other`.
    pub fn inner(&self, other: &ScalarField) -> C64 {
        par::dot(&self.data, &other.data) * self.grid.cell()
    }

    /// Lattice L² norm, `sqrt(h³ Σ |f|²)`.
    pub fn norm(&self) -> f64 {
        (par::norm_sqr(&self.data) * self.grid.cell()).sqrt()
    }

    /// `h³ Σ f`.
    pub fn integral(&self) -> C64 {
        self.data.iter().sum::<C64>() * self.grid.cell()
    }

    pub fn mean(&self) -> C64 {
        self.data.iter().sum::<C64>() / self.grid.sites() as f64
    }

    pub fn scaled(&self, a: C64) -> Self {
        let mut out = self.clone();
        par::scale(&mut out.data, a);
        out
    }

    pub fn add(&self, other: &ScalarField) -> Self {
        Self { grid: self.grid, data: par::add_scaled(&self.data, C64::new(1.0, 0.0), &other.data) }
    }

    pub fn sub(&self, other: &ScalarField) -> Self {
        Self { grid: self.grid, data: par::add_scaled(&self.data, C64::new(-1.0, 0.0), &other.data) }
    }

    pub fn mul(&self, other: &ScalarField) -> Self {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a * b).collect();
        Self { grid: self.grid, data }
    }

    pub fn conj(&self) -> Self {
        Self { grid: self.grid, data: self.data.iter().map(|v| v.conj()).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Three-component vector field.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector3Field {
    pub c: [ScalarField; 3],
}

impl Vector3Field {
    pub fn zeros(grid: GridSpec) -> Self {
        Self { c: [ScalarField::zeros(grid), ScalarField::zeros(grid), ScalarField::zeros(grid)] }
    }

    pub fn grid(&self) -> GridSpec {
        self.c[0].grid
    }

    pub fn inner(&self, other: &Vector3Field) -> C64 {
        (0..3).map(|a| self.c[a].inner(&other.c[a])).sum()
    }

    pub fn norm(&self) -> f64 {
        (0..3).map(|a| self.c[a].norm().powi(2)).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self { c: [self.c[0].scaled(s), self.c[1].scaled(s), self.c[2].scaled(s)] }
    }

    pub fn add(&self, o: &Vector3Field) -> Self {
        Self { c: [self.c[0].add(&o.c[0]), self.c[1].add(&o.c[1]), self.c[2].add(&o.c[2])] }
    }

    pub fn sub(&self, o: &Vector3Field) -> Self {
        Self { c: [self.c[0].sub(&o.c[0]), self.c[1].sub(&o.c[1]), self.c[2].sub(&o.c[2])] }
    }

    pub fn map(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        Self { c: [f(&self.c[0]), f(&self.c[1]), f(&self.c[2])] }
    }

    pub fn check_grid(&self, grid: &GridSpec) -> Result<()> {
        for c in &self.c {
            if c.grid != *grid {
                return Err(Error::SizeMismatch("vector components on different grids".into()));
            }
            c.check_grid()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

fn plan(n: usize, dir: Direction) -> Arc<dyn Fft<f64>> {
    static PLANS: OnceLock<Mutex<(FftPlanner<f64>, HashMap<(usize, bool), Arc<dyn Fft<f64>>>)>> =
        OnceLock::new();
    let cell = PLANS.get_or_init(|| Mutex::new((FftPlanner::new(), HashMap::new())));
    let mut guard = cell.lock().expect("fft planner poisoned");
    let (planner, cache) = &mut *guard;
    let fwd = dir == Direction::Forward;
    cache
        .entry((n, fwd))
        .or_insert_with(|| {
            if fwd {
                planner.plan_fft_forward(n)
            } else {
                planner.plan_fft_inverse(n)
            }
        })
        .clone()
}

/// Unitary 3D transform of the lattice index of a block laid out as
/// `[N³][inner]`, independently for every inner offset.
pub fn fft3_block(block: &mut [C64], n: usize, inner: usize, dir: Direction) {
    let n3 = n * n * n;
    assert_eq!(block.len(), n3 * inner, "block length does not match N³·inner");
    let fft = plan(n, dir);
    let norm = (n3 as f64).powf(-0.5);
    for (pass, factor) in [n * n, n, 1].into_iter().enumerate() {
        let st = factor * inner;
        let last = pass == 2;
        // Each chunk is an N × st matrix whose rows are the transform index.
        par::for_each_chunk(block, n * st, |_, chunk| {
            let mut buf = vec![C64::new(0.0, 0.0); n * st];
            for t in 0..n {
                for b in 0..st {
                    buf[b * n + t] = chunk[t * st + b];
                }
            }
            let mut scratch = vec![C64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
            fft.process_with_scratch(&mut buf, &mut scratch);
            for t in 0..n {
                for b in 0..st {
                    let v = buf[b * n + t];
                    chunk[t * st + b] = if last { v * norm } else { v };
                }
            }
        });
    }
}

/// Unitary transform of the lattice index in an array laid out as
/// `[outer][N³][inner]`.
pub fn fft3_strided(data: &mut [C64], n: usize, inner: usize, dir: Direction) {
    let block = n * n * n * inner;
    assert_eq!(data.len() % block, 0, "array length is not a multiple of the block");
    for chunk in data.chunks_mut(block) {
        fft3_block(chunk, n, inner, dir);
    }
}

/// Unitary discrete Fourier transform of a scalar field.
pub fn transform(field: &ScalarField, dir: Direction) -> Result<ScalarField> {
    field.check_grid()?;
    let mut out = field.clone();
    fft3_block(&mut out.data, field.grid.n, 1, dir);
    Ok(out)
}

/// Applies the mode-space multiplier `sym(mode)` to a field.
pub fn apply_symbol(field: &ScalarField, sym: impl Fn(usize) -> C64 + Sync + Send) -> ScalarField {
    let mut out = field.clone();
    let n = field.grid.n;
    fft3_block(&mut out.data, n, 1, Direction::Forward);
    par::for_each_chunk(&mut out.data, par::REDUCE_CHUNK, |ci, c| {
        for (o, v) in c.iter_mut().enumerate() {
            *v *= sym(ci * par::REDUCE_CHUNK + o);
        }
    });
    fft3_block(&mut out.data, n, 1, Direction::Inverse);
    out
}

/// Spectral derivative along `axis` (0, 1 or 2).
pub fn spectral_derivative(field: &ScalarField, axis: usize) -> ScalarField {
    let modes = field.grid.modes();
    apply_symbol(field, |m| C64::new(0.0, modes.kappa[m][axis]))
}

/// `(−Δ)^{-1}` with every null mode set to zero.
pub fn inverse_laplacian(field: &ScalarField) -> ScalarField {
    let modes = field.grid.modes();
    apply_symbol(field, |m| {
        let k2 = modes.kappa2[m];
        C64::new(if k2 > 0.0 { 1.0 / k2 } else { 0.0 }, 0.0)
    })
}

/// `(−Δ)^{-1/2}` with every null mode set to zero.
pub fn inverse_sqrt_laplacian(field: &ScalarField) -> ScalarField {
    let modes = field.grid.modes();
    apply_symbol(field, |m| {
        let k2 = modes.kappa2[m];
        C64::new(if k2 > 0.0 { 1.0 / k2.sqrt() } else { 0.0 }, 0.0)
    })
}

/// `−Δ`.
pub fn neg_laplacian(field: &ScalarField) -> ScalarField {
    let modes = field.grid.modes();
    apply_symbol(field, |m| C64::new(modes.kappa2[m], 0.0))
}

pub fn gradient(f: &ScalarField) -> Vector3Field {
    Vector3Field {
        c: [spectral_derivative(f, 0), spectral_derivative(f, 1), spectral_derivative(f, 2)],
    }
}

pub fn divergence(v: &Vector3Field) -> ScalarField {
    spectral_derivative(&v.c[0], 0)
        .add(&spectral_derivative(&v.c[1], 1))
        .add(&spectral_derivative(&v.c[2], 2))
}

pub fn curl(v: &Vector3Field) -> Vector3Field {
    let d = |c: usize, a: usize| spectral_derivative(&v.c[c], a);
    Vector3Field {
        c: [d(2, 1).sub(&d(1, 2)), d(0, 2).sub(&d(2, 0)), d(1, 0).sub(&d(0, 1))],
    }
}

/// Discrete stand-in for the point delta. Implementations must have unit
/// lattice integral.
pub trait Regulator: Send + Sync + std::fmt::Debug {
    /// Samples the regulated delta centred at `center`.
    fn sample(&self, grid: &GridSpec, center: [f64; 3]) -> Result<ScalarField>;
    /// Characteristic width.
    fn width(&self) -> f64;
}

/// Periodized Gaussian of width `sigma`, separable and normalized per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianRegulator {
    pub sigma: f64,
}

impl GaussianRegulator {
    fn axis_profile(&self, grid: &GridSpec, c: f64) -> Vec<f64> {
        let n = grid.n;
        let h = grid.spacing();
        let l = grid.length;
        // Enough images that the omitted tails are below 1e-300.
        let images = ((40.0 * self.sigma) / l).ceil() as i64 + 1;
        let mut g: Vec<f64> = (0..n)
            .map(|i| {
                let x = i as f64 * h - c;
                (-images..=images)
                    .map(|w| {
                        let d = x + w as f64 * l;
                        (-d * d / (2.0 * self.sigma * self.sigma)).exp()
                    })
                    .sum()
            })
            .collect();
        let total: f64 = g.iter().sum::<f64>() * h;
        g.iter_mut().for_each(|v| *v /= total);
        g
    }
}

impl Regulator for GaussianRegulator {
    fn sample(&self, grid: &GridSpec, center: [f64; 3]) -> Result<ScalarField> {
        let h = grid.spacing();
        if !(self.sigma > 0.0) || 2.0 * self.sigma < h {
            return Err(Error::Resolution { sigma: self.sigma, spacing: h });
        }
        for c in center {
            if !(0.0..=grid.length).contains(&c) {
                return Err(Error::Precondition(format!("center {c} outside the box")));
            }
        }
        let gx = self.axis_profile(grid, center[0]);
        let gy = self.axis_profile(grid, center[1]);
        let gz = self.axis_profile(grid, center[2]);
        let n = grid.n;
        let mut data = Vec::with_capacity(grid.sites());
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    data.push(C64::new(gx[i] * gy[j] * gz[l], 0.0));
                }
            }
        }
        Ok(ScalarField { grid: *grid, data })
    }

    fn width(&self) -> f64 {
        self.sigma
    }
}

/// Sharp spherical cutoff in mode space: all modes with `|k| <= k_max` carry
/// unit weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharpCutoffRegulator {
    pub k_max: f64,
}

impl Regulator for SharpCutoffRegulator {
    fn sample(&self, grid: &GridSpec, center: [f64; 3]) -> Result<ScalarField> {
        let dk = 2.0 * PI / grid.length;
        if self.k_max < dk {
            return Err(Error::Resolution { sigma: self.width(), spacing: grid.spacing() });
        }
        let modes = grid.modes();
        let n3 = grid.sites() as f64;
        // δ(x) = L^{-3} Σ_{|k|≤kc} e^{ik(x-c)}; the unitary coefficient is N^{3/2}/L³ · e^{-ikc}.
        let mut hat = ScalarField::zeros(*grid);
        for m in 0..grid.sites() {
            let k = modes.k_full[m];
            let kk = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
            if kk <= self.k_max {
                let ph = -(k[0] * center[0] + k[1] * center[1] + k[2] * center[2]);
                hat.data[m] = C64::from_polar(n3.sqrt() / grid.length.powi(3), ph);
            }
        }
        transform(&hat, Direction::Inverse)
    }

    fn width(&self) -> f64 {
        PI / self.k_max
    }
}

/// Gaussian-regulated delta with unit lattice integral.
pub fn smeared_delta(center: [f64; 3], sigma: f64, grid: &GridSpec) -> Result<ScalarField> {
    GaussianRegulator { sigma }.sample(grid, center)
}

/// Unitary transform of the regulator centred at the origin. For the
/// Gaussian this is real and even in the mode index.
pub fn kernel_spectrum(reg: &dyn Regulator, grid: &GridSpec) -> Result<Vec<f64>> {
    let g = reg.sample(grid, [0.0; 3])?;
    let hat = transform(&g, Direction::Forward)?;
    // Symmetrize to remove transform round-off.
    Ok((0..grid.sites())
        .map(|m| 0.5 * (hat.data[m].re + hat.data[grid.mode_neg(m)].re))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct_dft(f: &ScalarField) -> Vec<C64> {
        let g = f.grid;
        let n = g.n as f64;
        (0..g.sites())
            .map(|m| {
                let km = g.coords(m);
                let mut s = C64::new(0.0, 0.0);
                for x in 0..g.sites() {
                    let xc = g.coords(x);
                    let ph = -2.0 * PI
                        * (km[0] * xc[0] + km[1] * xc[1] + km[2] * xc[2]) as f64
                        / n;
                    s += f.data[x] * C64::from_polar(1.0, ph);
                }
                s / n.powf(1.5)
            })
            .collect()
    }

    fn pseudo_random(grid: GridSpec, seed: u64) -> ScalarField {
        crate::random::complex_field(&grid, seed, 0)
    }

    #[test]
    fn fft_matches_direct_dft() {
        let g = GridSpec::new(4, 3.0).unwrap();
        let f = pseudo_random(g, 1);
        let fast = transform(&f, Direction::Forward).unwrap();
        let slow = direct_dft(&f);
        for (a, b) in fast.data.iter().zip(&slow) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn constant_maps_to_spike() {
        let g = GridSpec::new(8, 1.0).unwrap();
        let f = ScalarField::from_fn(g, |_| C64::new(2.0, 0.0));
        let hat = transform(&f, Direction::Forward).unwrap();
        assert!((hat.data[0] - C64::new(2.0 * 8f64.powf(1.5), 0.0)).norm() < 1e-10);
        assert!(hat.data[1..].iter().all(|v| v.norm() < 1e-10));
    }

    #[test]
    fn plane_wave_is_single_mode_and_eigenfunction() {
        let g = GridSpec::new(8, 2.0).unwrap();
        let k = 2.0 * PI / g.length;
        let f = ScalarField::from_fn(g, |x| C64::from_polar(1.0, k * x[0]));
        let hat = transform(&f, Direction::Forward).unwrap();
        let spike = g.index(1, 0, 0);
        for (m, v) in hat.data.iter().enumerate() {
            if m != spike {
                assert!(v.norm() < 1e-10);
            }
        }
        let d = spectral_derivative(&f, 0);
        for (a, b) in d.data.iter().zip(&f.data) {
            assert!((a - C64::new(0.0, k) * b).norm() < 1e-12);
        }
        let inv = inverse_laplacian(&f);
        for (a, b) in inv.data.iter().zip(&f.data) {
            assert!((a - b / (k * k)).norm() < 1e-12);
        }
        let isq = inverse_sqrt_laplacian(&f);
        for (a, b) in isq.data.iter().zip(&f.data) {
            assert!((a - b / k).norm() < 1e-12);
        }
    }

    #[test]
    fn constant_is_annihilated() {
        let g = GridSpec::new(8, 1.0).unwrap();
        let f = ScalarField::from_fn(g, |_| C64::new(1.5, -0.5));
        assert!(spectral_derivative(&f, 2).max_abs() < 1e-12);
        assert!(inverse_laplacian(&f).max_abs() < 1e-12);
    }

    #[test]
    fn round_trips() {
        let g = GridSpec::new(8, 1.7).unwrap();
        let f = crate::random::bandlimited_field(&g, 4, 0);
        let back = transform(&transform(&f, Direction::Forward).unwrap(), Direction::Inverse).unwrap();
        assert!(back.sub(&f).norm() <= 1e-13 * f.norm());
        let lap = neg_laplacian(&inverse_laplacian(&f));
        let zm = ScalarField::from_fn(g, |_| f.mean());
        assert!(lap.sub(&f.sub(&zm)).norm() <= 1e-12 * f.norm());
        let twice = inverse_sqrt_laplacian(&inverse_sqrt_laplacian(&f));
        assert!(twice.sub(&inverse_laplacian(&f)).norm() <= 1e-12 * inverse_laplacian(&f).norm());
    }

    #[test]
    fn mixed_derivatives_commute() {
        let g = GridSpec::new(8, 1.0).unwrap();
        let f = pseudo_random(g, 3);
        let a = spectral_derivative(&spectral_derivative(&f, 0), 1);
        let b = spectral_derivative(&spectral_derivative(&f, 1), 0);
        assert!(a.sub(&b).norm() <= 1e-13 * a.norm());
    }

    #[test]
    fn real_fields_stay_real() {
        let g = GridSpec::new(8, 1.0).unwrap();
        let f = ScalarField {
            grid: g,
            data: pseudo_random(g, 9).data.iter().map(|v| C64::new(v.re, 0.0)).collect(),
        };
        for a in 0..3 {
            assert!(spectral_derivative(&f, a).data.iter().all(|v| v.im.abs() < 1e-12));
        }
    }

    #[test]
    fn delta_normalization_and_guard() {
        let g = GridSpec::new(16, 4.0).unwrap();
        let h = g.spacing();
        let d = smeared_delta([2.0, 2.0, 2.0], 2.0 * h, &g).unwrap();
        assert!((d.integral() - C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(smeared_delta([1.0; 3], 0.49 * h, &g).is_err());
        assert!(smeared_delta([1.0; 3], 0.51 * h, &g).is_ok());
        let sharp = SharpCutoffRegulator { k_max: 3.0 * 2.0 * PI / g.length }.sample(&g, [1.0; 3]).unwrap();
        assert!((sharp.integral() - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn delta_first_moment_recovers_center() {
        let g = GridSpec::new(32, 4.0).unwrap();
        let c = [2.0, 1.9, 2.1];
        let d = smeared_delta(c, 2.0 * g.spacing(), &g).unwrap();
        let x = ScalarField::from_fn(g, |p| C64::new(p[0], 0.0));
        assert!((d.inner(&x).re - c[0]).abs() < 1e-10);
    }

    #[test]
    fn kernel_spectrum_is_real_even() {
        let g = GridSpec::new(8, 1.0).unwrap();
        let reg = GaussianRegulator { sigma: 2.0 * g.spacing() };
        let s = kernel_spectrum(&reg, &g).unwrap();
        for m in 0..g.sites() {
            assert_eq!(s[m], s[g.mode_neg(m)]);
        }
        assert!((s[0] - (g.sites() as f64).powf(-0.5) / g.cell()).abs() < 1e-10);
    }
}
