use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use clsr_core::clsr::{build_clsr, ClsrConfig};
use clsr_core::dataset::generate;
use clsr_core::domains::{self, BURGER};
use clsr_core::eval::{evaluate, sample_pairs};
use clsr_core::pipeline::{build_parallel, BuildConfig};
use clsr_core::plsr::{build_plsr, PlsrConfig};

fn modes() -> Vec<(&'static str, bool)> {
    let mut m = vec![("sequential", false)];
    if clsr_core::par::AVAILABLE {
        m.push(("parallel", true));
    }
    m
}

fn pipeline(c: &mut Criterion) {
    let dom = domains::by_name(BURGER).unwrap();
    let data = generate(&dom, 5000, 0.58, 1).unwrap();
    let agents = domains::default_agents(BURGER).unwrap();
    let (base, _) = build_parallel(&data, &dom, &BuildConfig::default()).unwrap();
    let mut full = base.clone();
    build_clsr(&mut full, &agents, &ClsrConfig::default()).unwrap();
    let pairs = sample_pairs(&full, 500, 1);

    let mut g = c.benchmark_group("burger");
    g.sample_size(10);
    for (name, parallel) in modes() {
        g.bench_with_input(BenchmarkId::new("plsr", name), &parallel, |b, &parallel| {
            let config = PlsrConfig {
                parallel,
                ..PlsrConfig::default()
            };
            b.iter(|| {
                let mut r = base.clone();
                build_plsr(&mut r, &config).unwrap()
            })
        });
        g.bench_with_input(BenchmarkId::new("clsr", name), &parallel, |b, &parallel| {
            let config = ClsrConfig {
                parallel,
                ..ClsrConfig::default()
            };
            b.iter(|| {
                let mut r = base.clone();
                build_clsr(&mut r, &agents, &config).unwrap()
            })
        });
        g.bench_with_input(BenchmarkId::new("evaluate", name), &parallel, |b, &parallel| {
            b.iter(|| evaluate(&full, &pairs, parallel).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, pipeline);
criterion_main!(benches);
