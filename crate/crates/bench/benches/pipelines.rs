//! End-to-end benchmarks: the sampling pipeline per metric, Ulam
//! reconstruction, and a distributed median simulation.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rankmedian::mpc::{self, MpcConfig};
use rankmedian::reconstruct::{self, ReconstructParams};
use rankmedian::slack::{self, FrameworkConfig};
use rankmedian::{gen, solvers, Metric};

fn bench_aggregate(c: &mut Criterion) {
    let mut group = c.benchmark_group("aggregate");
    for metric in [Metric::Hamming, Metric::Footrule, Metric::Kendall, Metric::Ulam] {
        // The feedback-vertex-set solver is cubic in n, so keep the Ulam
        // instance smaller than the others.
        let n = if metric == Metric::Ulam { 48 } else { 128 };
        let p = gen::uniform_instance(n, 40, 5 + n as u64);
        let cfg = FrameworkConfig::for_instance(metric, n, 40, 0.5, 99).unwrap();
        let solver = solvers::default_solver(metric);
        group.bench_with_input(BenchmarkId::from_parameter(metric.name()), &n, |b, _| {
            b.iter(|| slack::aggregate(black_box(&p), metric, &cfg, solver.as_ref()).unwrap())
        });
    }
    group.finish();
}

fn bench_reconstruct(c: &mut Criterion) {
    let mut group = c.benchmark_group("reconstruct");
    group.sample_size(10);
    let params = ReconstructParams {
        tuple_cap: 400,
        ..Default::default()
    };
    for &n in &[16usize, 64] {
        let (q, _) = gen::planted_instance(n, 5, 1, 17 + n as u64);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| reconstruct::scalable_median_reconstruct(black_box(&q), &params).unwrap())
        });
    }
    group.finish();
}

fn bench_mpc_median(c: &mut Criterion) {
    let mut group = c.benchmark_group("mpc-median");
    let cfg = MpcConfig::default();
    for &n in &[64usize, 256] {
        let q = gen::uniform_instance(n, 3, 29 + n as u64);
        group.bench_with_input(BenchmarkId::new("hamming", n), &n, |b, _| {
            b.iter(|| mpc::mpc_hamming_median(black_box(&q), &cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(pipelines, bench_aggregate, bench_reconstruct, bench_mpc_median);
criterion_main!(pipelines);
