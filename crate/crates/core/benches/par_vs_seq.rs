//! Parallel-vs-sequential benchmarks for the data-parallel hot paths.
//!
//! The library keys all randomness by sample index, so the same API produces
//! identical results on any pool size; these benches pin rayon pools of 1 and
//! N threads against each other on the same inputs. For a build with the
//! parallel code paths compiled out entirely, run with
//! `--no-default-features`.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use measure_change::bayes::{evidence, CatalogEntry, FitFamily, ModelCatalog, ParamBox};
use measure_change::density::Density;
use measure_change::sample_set::SampleSet;
use measure_change::strategies::mixed_update;

fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("pool")
}

fn bench_draws(c: &mut Criterion) {
    let d = Density::gamma(224.6, 0.1565).unwrap();
    let mut g = c.benchmark_group("draw_10k_gamma");
    let single = pool(1);
    g.bench_function("seq_1_thread", |b| {
        b.iter(|| single.install(|| black_box(d.sample_n(10_000, 7))))
    });
    g.bench_function("par_default_pool", |b| b.iter(|| black_box(d.sample_n(10_000, 7))));
    g.finish();
}

fn bench_mixed(c: &mut Criterion) {
    let p = Density::normal(10.0, 1.0).unwrap();
    let q = Density::normal(11.0, 1.0).unwrap();
    let s = SampleSet::draw(&p, 10_000, 3);
    let mut g = c.benchmark_group("mixed_update_10k");
    g.sample_size(20);
    let single = pool(1);
    g.bench_function("seq_1_thread", |b| {
        b.iter(|| single.install(|| black_box(mixed_update(&s, &p, &q, 5).unwrap())))
    });
    g.bench_function("par_default_pool", |b| {
        b.iter(|| black_box(mixed_update(&s, &p, &q, 5).unwrap()))
    });
    g.finish();
}

fn bench_evidence(c: &mut Criterion) {
    let d = Density::gamma(74.3, 0.468).unwrap();
    let data = d.sample_n(79, 11);
    let entry = CatalogEntry {
        family: FitFamily::Gamma,
        prior: ParamBox::new(vec![(15.0, 380.0), (0.09, 2.4)]).unwrap(),
        prior_prob: 1.0,
    };
    let _ = ModelCatalog::new(vec![entry.clone()]).unwrap();
    let mut g = c.benchmark_group("evidence_1e4_draws");
    g.sample_size(20);
    let single = pool(1);
    g.bench_function("seq_1_thread", |b| {
        b.iter(|| single.install(|| black_box(evidence(&data, &entry, 10_000, 13).unwrap())))
    });
    g.bench_function("par_default_pool", |b| {
        b.iter(|| black_box(evidence(&data, &entry, 10_000, 13).unwrap()))
    });
    g.finish();
}

criterion_group!(benches, bench_draws, bench_mixed, bench_evidence);
criterion_main!(benches);
