//! Microbenchmarks for the distance kernels, fast versus quadratic.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rankmedian::{dist, gen, oracles, Permutation};

fn random_pair(n: usize, seed: u64) -> (Permutation, Permutation) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (
        Permutation::random(n, &mut rng),
        Permutation::random(n, &mut rng),
    )
}

fn bench_kendall(c: &mut Criterion) {
    let mut group = c.benchmark_group("kendall");
    for &n in &[64usize, 256, 1024] {
        let (p, q) = random_pair(n, 11 + n as u64);
        group.bench_with_input(BenchmarkId::new("fast", n), &n, |b, _| {
            b.iter(|| dist::kendall(black_box(&p), black_box(&q)).unwrap())
        });
        if n <= 256 {
            group.bench_with_input(BenchmarkId::new("quadratic", n), &n, |b, _| {
                b.iter(|| oracles::naive_kendall(black_box(&p), black_box(&q)))
            });
        }
    }
    group.finish();
}

fn bench_ulam(c: &mut Criterion) {
    let mut group = c.benchmark_group("ulam");
    for &n in &[64usize, 256, 1024] {
        let (p, q) = random_pair(n, 23 + n as u64);
        group.bench_with_input(BenchmarkId::new("fast", n), &n, |b, _| {
            b.iter(|| dist::ulam_move(black_box(&p), black_box(&q)).unwrap())
        });
        if n <= 256 {
            group.bench_with_input(BenchmarkId::new("quadratic", n), &n, |b, _| {
                b.iter(|| oracles::naive_ulam_move(black_box(&p), black_box(&q)))
            });
        }
    }
    group.finish();
}

fn bench_weighted(c: &mut Criterion) {
    let mut group = c.benchmark_group("weighted");
    let n = 256;
    let (p, q) = random_pair(n, 37);
    let w = gen::random_weights(n, 41);
    group.bench_function("kendall", |b| {
        b.iter(|| dist::kendall_weighted(black_box(&p), black_box(&q), black_box(&w)).unwrap())
    });
    group.bench_function("ulam", |b| {
        b.iter(|| dist::ulam_move_weighted(black_box(&p), black_box(&q), black_box(&w)).unwrap())
    });
    group.finish();
}

criterion_group!(kernels, bench_kendall, bench_ulam, bench_weighted);
criterion_main!(kernels);
