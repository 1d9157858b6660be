use actdiag_bench::{fork_join, load};
use actdiag_core::{build_lts, check_deadlock, check_determinism, translate, CheckOptions, TranslationConfig};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const CORPUS: [&str; 5] = [
    "c1_cloud_network.json",
    "c2_storage.json",
    "c3_motivating.json",
    "c4_hotel.json",
    "c5_ecommerce.json",
];

fn opts(jobs: usize) -> CheckOptions {
    CheckOptions {
        state_limit: 2_000_000,
        jobs,
    }
}

fn corpus(c: &mut Criterion) {
    let mut g = c.benchmark_group("corpus");
    g.sample_size(10);
    for name in CORPUS {
        let d = load(name);
        let m = translate(&d, &TranslationConfig::default()).unwrap();
        g.bench_function(BenchmarkId::new("translate", name), |b| {
            b.iter(|| translate(&d, &TranslationConfig::default()).unwrap())
        });
        g.bench_function(BenchmarkId::new("check-all", name), |b| {
            b.iter(|| {
                let l = build_lts(&m, &opts(1)).unwrap();
                (check_deadlock(&l), check_determinism(&l))
            })
        });
    }
    g.finish();
}

fn scaling(c: &mut Criterion) {
    let mut g = c.benchmark_group("fork-join");
    g.sample_size(10);
    for width in 2..=4 {
        let m = translate(&fork_join(width, 3), &TranslationConfig::default()).unwrap();
        for jobs in [1, 4] {
            g.bench_with_input(BenchmarkId::new(format!("jobs{jobs}"), width), &m, |b, m| {
                b.iter(|| build_lts(m, &opts(jobs)).unwrap().len())
            });
        }
    }
    g.finish();
}

criterion_group!(benches, corpus, scaling);
criterion_main!(benches);
