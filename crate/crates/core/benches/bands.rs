//! Sequential versus parallel execution of the data-parallel kernels: the
//! eta sweep of the band solver and the Floquet transform.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

use bergman_bands::band_solver::{compute_bands, eta_grid, BandConfig};
use bergman_bands::floquet::{floquet_forward, CellField};
use bergman_bands::geometry::{build_cell_quadrature, CellGeometry};
use bergman_bands::par::Execution;
use bergman_bands::symbols::{synthesize_profile, MomentConvention};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn band_sweep(c: &mut Criterion) {
    let profile = synthesize_profile(&[0.3, 0.2, 0.1], MomentConvention::Corrected).unwrap();
    let cell = CellGeometry::new(0.3, 0.05).unwrap();
    let mut group = c.benchmark_group("compute_bands");
    group.sample_size(10);
    for points in [17, 65] {
        let etas = eta_grid(points).unwrap();
        for (name, execution) in MODES {
            let cfg = BandConfig {
                execution,
                ..Default::default()
            };
            group.bench_with_input(BenchmarkId::new(name, points), &etas, |b, etas| {
                b.iter(|| compute_bands(&cell, &profile, black_box(etas), &cfg).unwrap())
            });
        }
    }
    group.finish();
}

fn floquet(c: &mut Criterion) {
    let cell = CellGeometry::new(0.3, 0.05).unwrap();
    let quad = build_cell_quadrature(&cell, 8, 16, 6).unwrap();
    let mut group = c.benchmark_group("floquet_forward");
    for m_half in [8, 32] {
        let field = CellField::random(m_half, quad.len(), &mut ChaCha8Rng::seed_from_u64(1));
        for (name, execution) in MODES {
            group.bench_with_input(BenchmarkId::new(name, m_half), &field, |b, f| {
                b.iter(|| floquet_forward(black_box(f), execution))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, band_sweep, floquet);
criterion_main!(benches);
