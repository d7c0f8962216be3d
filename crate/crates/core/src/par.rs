//! Data-parallel helpers. With the `parallel` feature the loops run on the
//! rayon pool; without it they run sequentially. Reductions are chunked with a
//! fixed chunk size and summed in index order, so results are bit-identical
//! for any thread count.

use num_complex::Complex64;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Chunk length used by deterministic reductions.
pub const REDUCE_CHUNK: usize = 4096;

/// Runs two closures, concurrently when the pool allows.
pub fn join<A, B, RA, RB>(a: A, b: B) -> (RA, RB)
where
    A: FnOnce() -> RA + Send,
    B: FnOnce() -> RB + Send,
    RA: Send,
    RB: Send,
{
    #[cfg(feature = "parallel")]
    return rayon::join(a, b);
    #[cfg(not(feature = "parallel"))]
    (a(), b())
}

/// Runs `f(chunk_index, chunk)` over consecutive chunks of `data`.
pub fn for_each_chunk<T, F>(data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    data.par_chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
    #[cfg(not(feature = "parallel"))]
    data.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
}

/// Zips two equally chunked slices.
pub fn for_each_chunk_zip<T, U, F>(a: &mut [T], b: &[U], chunk: usize, f: F)
where
    T: Send,
    U: Sync,
    F: Fn(usize, &mut [T], &[U]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    a.par_chunks_mut(chunk)
        .zip(b.par_chunks(chunk))
        .enumerate()
        .for_each(|(i, (x, y))| f(i, x, y));
    #[cfg(not(feature = "parallel"))]
    a.chunks_mut(chunk)
        .zip(b.chunks(chunk))
        .enumerate()
        .for_each(|(i, (x, y))| f(i, x, y));
}

/// Maps `0..n` in parallel, preserving order.
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    return (0..n).into_par_iter().map(f).collect();
    #[cfg(not(feature = "parallel"))]
    return (0..n).map(f).collect();
}

/// Deterministic sum of `f(range)` over fixed-size chunks of `0..len`.
pub fn sum_complex<F>(len: usize, f: F) -> Complex64
where
    F: Fn(std::ops::Range<usize>) -> Complex64 + Sync + Send,
{
    let chunks = len.div_ceil(REDUCE_CHUNK);
    let parts = map_range(chunks, |c| {
        let lo = c * REDUCE_CHUNK;
        f(lo..(lo + REDUCE_CHUNK).min(len))
    });
    parts.into_iter().sum()
}

/// Deterministic real-valued variant of [`sum_complex`].
pub fn sum_real<F>(len: usize, f: F) -> f64
where
    F: Fn(std::ops::Range<usize>) -> f64 + Sync + Send,
{
    let chunks = len.div_ceil(REDUCE_CHUNK);
    let parts = map_range(chunks, |c| {
        let lo = c * REDUCE_CHUNK;
        f(lo..(lo + REDUCE_CHUNK).min(len))
    });
    parts.into_iter().sum()
}

/// `Σ conj(a_i) b_i`, deterministic.
pub fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    assert_eq!(a.len(), b.len());
    sum_complex(a.len(), |r| {
        a[r.clone()]
            .iter()
            .zip(&b[r])
            .map(|(x, y)| x.conj() * y)
            .sum()
    })
}

/// `Σ |a_i|²`, deterministic.
pub fn norm_sqr(a: &[Complex64]) -> f64 {
    sum_real(a.len(), |r| a[r].iter().map(|x| x.norm_sqr()).sum())
}

/// `y += alpha x`.
pub fn axpy(y: &mut [Complex64], alpha: Complex64, x: &[Complex64]) {
    for_each_chunk_zip(y, x, REDUCE_CHUNK, |_, yc, xc| {
        for (a, b) in yc.iter_mut().zip(xc) {
            *a += alpha * b;
        }
    });
}

/// `out = a + alpha b`.
pub fn add_scaled(a: &[Complex64], alpha: Complex64, b: &[Complex64]) -> Vec<Complex64> {
    let mut out = a.to_vec();
    axpy(&mut out, alpha, b);
    out
}

/// Multiplies every element by `alpha`.
pub fn scale(y: &mut [Complex64], alpha: Complex64) {
    for_each_chunk(y, REDUCE_CHUNK, |_, c| c.iter_mut().for_each(|v| *v *= alpha));
}
