use std::hint::black_box;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ous_core::harness::gen;
use ous_core::{calculus, compression, ModelContext, SeededRng};

fn spectra(c: &mut Criterion) {
    let mut group = c.benchmark_group("spectrum");
    for n in [2usize, 4, 8, 16] {
        let ctx = ModelContext::matrix(n).unwrap();
        let a = gen::random_element(&ctx, &mut SeededRng::new(0)).unwrap();
        group.bench_with_input(BenchmarkId::new("matrix", n), &a, |b, a| {
            b.iter(|| ctx.spectrum(black_box(a)).unwrap())
        });
    }
    for p in [2.0, 3.0] {
        let ctx = ModelContext::spin_lp(p, 8).unwrap();
        let a = gen::random_element(&ctx, &mut SeededRng::new(0)).unwrap();
        group.bench_with_input(BenchmarkId::new("spin8", p), &a, |b, a| {
            b.iter(|| ctx.spectrum(black_box(a)).unwrap())
        });
    }
    group.finish();
}

fn compressions(c: &mut Criterion) {
    let ctx = ModelContext::matrix(6).unwrap();
    let mut rng = SeededRng::new(1);
    let p = gen::random_projection(&ctx, &mut rng).unwrap();
    let a = gen::random_element(&ctx, &mut rng).unwrap();
    c.bench_function("compress/matrix6", |b| b.iter(|| ctx.compress(&p, black_box(&a)).unwrap()));
    c.bench_function("decomposition/least/matrix6", |b| {
        b.iter(|| compression::least_projection_decomposition(&ctx, black_box(&a)).unwrap())
    });
    c.bench_function("rs-integral/matrix6/0.125", |b| {
        b.iter(|| calculus::rs_integral_approx(&ctx, black_box(&a), 0.125).unwrap())
    });
}

criterion_group!(benches, spectra, compressions);
criterion_main!(benches);
