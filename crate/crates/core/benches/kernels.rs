//! Compares the data-parallel kernels on the default pool against the same
//! kernels on a single-thread pool. Build with `--no-default-features` to
//! time the sequential fallback instead.

use std::f64::consts::PI;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use lpsim_core::dirac::{free_dirac_evolve, SpinorField};
use lpsim_core::fock::{lp_hamiltonian_apply, HamiltonianParams, Representation, SectorShape, SectorState};
use lpsim_core::grid::{transform, Direction, GridSpec, ScalarField};
use lpsim_core::random::{bandlimited_stream, complex_field};

fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    let default = rayon::ThreadPoolBuilder::new().build().unwrap();
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    vec![("pool", default), ("one_thread", single)]
}

fn kernels(c: &mut Criterion) {
    let g32 = GridSpec::new(32, 2.0 * PI).unwrap();
    let field = complex_field(&g32, 1, 0);
    let comps: Vec<ScalarField> = (0..4).map(|s| bandlimited_stream(&g32, 6, 2, s)).collect();
    let psi = SpinorField { c: comps.try_into().unwrap(), mass: 1.0, charge: 1.0 };
    let g4 = GridSpec::new(4, 2.0 * PI).unwrap();
    let shape = SectorShape::new(g4, 1, 1, Representation::F);
    let state = SectorState::random(shape, 2, 3);
    let params = HamiltonianParams::new(0.3, 1.0, 2.0 * g4.spacing(), 0.01);

    let mut group = c.benchmark_group("kernels");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new("fft3_32", name), |b| {
            b.iter(|| pool.install(|| transform(&field, Direction::Forward).unwrap()))
        });
        group.bench_function(BenchmarkId::new("dirac_evolve_32", name), |b| {
            b.iter(|| pool.install(|| free_dirac_evolve(&psi, 0.5)))
        });
        group.bench_function(BenchmarkId::new("hamiltonian_apply_m1n1", name), |b| {
            b.iter(|| pool.install(|| lp_hamiltonian_apply(&state, &params).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);
