//! Seeded random fields. Every generator is a ChaCha stream selected by
//! `(seed, stream)`, so results do not depend on call order.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::grid::{fft3_block, Direction, GridSpec, ScalarField, Vector3Field};

pub fn rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut r = ChaCha20Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn complex_values(len: usize, seed: u64, stream: u64) -> Vec<Complex64> {
    let mut r = rng(seed, stream);
    (0..len)
        .map(|_| Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
        .collect()
}

/// White-noise complex field.
pub fn complex_field(grid: &GridSpec, seed: u64, stream: u64) -> ScalarField {
    ScalarField { grid: *grid, data: complex_values(grid.sites(), seed, stream) }
}

/// Random field whose modes satisfy `|n_a| < cutoff` on every axis and carry
/// no Nyquist or null-mode content.
pub fn bandlimited_field(grid: &GridSpec, cutoff: i64, seed: u64) -> ScalarField {
    bandlimited_stream(grid, cutoff, seed, 0)
}

pub fn bandlimited_stream(grid: &GridSpec, cutoff: i64, seed: u64, stream: u64) -> ScalarField {
    let modes = grid.modes();
    let mut r = rng(seed, stream);
    let mut data: Vec<Complex64> = (0..grid.sites())
        .map(|m| {
            let c = grid.coords(m);
            let keep = c.iter().all(|&u| {
                let k = grid.mode_number(u);
                u != grid.n / 2 && k.abs() < cutoff
            }) && !modes.is_null(m);
            let v = Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
            if keep {
                v
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    fft3_block(&mut data, grid.n, 1, Direction::Inverse);
    ScalarField { grid: *grid, data }
}

pub fn bandlimited_vector(grid: &GridSpec, cutoff: i64, seed: u64, stream: u64) -> Vector3Field {
    Vector3Field {
        c: [
            bandlimited_stream(grid, cutoff, seed, 3 * stream),
            bandlimited_stream(grid, cutoff, seed, 3 * stream + 1),
            bandlimited_stream(grid, cutoff, seed, 3 * stream + 2),
        ],
    }
}
