use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use fubini_core::exactnum::{int, ratio};
use fubini_core::fubini::{route_agreement, FubiniFamily};
use fubini_core::identities::{mc_fubini_with, McConfig};
use fubini_core::{DistSpec, Execution};

fn catalog() -> Vec<DistSpec> {
    vec![
        DistSpec::Degenerate(int(1)),
        DistSpec::Bernoulli(ratio(1, 2)),
        DistSpec::Poisson(int(1)),
        DistSpec::GeometricOnSupport1(ratio(1, 2)),
        DistSpec::StdExponential,
    ]
}

const POLICIES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn bench_route_agreement(c: &mut Criterion) {
    let dists = catalog();
    let mut group = c.benchmark_group("route_agreement_n10");
    group.sample_size(10);
    for (name, exec) in POLICIES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| route_agreement(black_box(&dists), 10, &int(1), exec))
        });
    }
    group.finish();
}

fn bench_families(c: &mut Criterion) {
    let dists = catalog();
    let mut group = c.benchmark_group("fubini_family_n24");
    group.sample_size(10);
    for (name, exec) in POLICIES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| FubiniFamily::build_many(black_box(&dists), 24, exec))
        });
    }
    group.finish();
}

fn bench_monte_carlo(c: &mut Criterion) {
    let dist = DistSpec::StdExponential;
    let mut group = c.benchmark_group("monte_carlo_200k");
    group.sample_size(10);
    for (name, exec) in POLICIES {
        let cfg = McConfig::new(200_000, 7).with_execution(exec);
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| mc_fubini_with(&dist, 2, &int(1), black_box(cfg)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_route_agreement,
    bench_families,
    bench_monte_carlo
);
criterion_main!(benches);
