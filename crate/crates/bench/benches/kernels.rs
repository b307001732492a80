//! Benchmarks of the three numerical kernels that dominate every workflow:
//! the singular half-period quadrature, one adaptive geodesic shot, and a
//! small brute-force distance query.

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use revcut_core::geodesic::{shoot, StepControl};
use revcut_core::halfperiod;
use revcut_core::oracle::{distance, OracleConfig};
use revcut_core::surface::{lambda_surface, tamura, SurfacePoint};

fn bench_half_period(c: &mut Criterion) {
    let l5 = lambda_surface(5.0).unwrap();
    let tam = tamura();
    c.bench_function("phi lambda=5 nu=0.6", |b| {
        b.iter(|| halfperiod::phi(&l5, black_box(0.6)).unwrap())
    });
    c.bench_function("phi tamura nu=0.5", |b| {
        b.iter(|| halfperiod::phi(&tam, black_box(0.5)).unwrap())
    });
    c.bench_function("ell lambda=5 nu=0.6", |b| {
        b.iter(|| halfperiod::ell(&l5, black_box(0.6)).unwrap())
    });
}

fn bench_shoot(c: &mut Criterion) {
    let l5 = lambda_surface(5.0).unwrap();
    let ctrl = StepControl::default();
    let q = SurfacePoint::new(-0.3, 0.0);
    c.bench_function("shoot length 10", |b| {
        b.iter(|| shoot(&l5, q, black_box(1.2), 10.0, &ctrl).unwrap())
    });
}

fn bench_distance(c: &mut Criterion) {
    let l2 = lambda_surface(2.0).unwrap();
    let cfg = OracleConfig { fan_size: 64, max_winding: 1, ..OracleConfig::default() };
    let q = SurfacePoint::new(-0.3, 0.0);
    let x = SurfacePoint::new(0.4, 1.5);
    let mut g = c.benchmark_group("oracle");
    g.sample_size(10);
    g.bench_function("distance fan=64", |b| {
        b.iter(|| distance(&l2, q, black_box(x), &cfg).unwrap().best_length)
    });
    g.finish();
}

criterion_group!(benches, bench_half_period, bench_shoot, bench_distance);
criterion_main!(benches);
