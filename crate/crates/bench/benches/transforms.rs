use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pbs_bench::corpus;
use pbs_core::canonical::canonicalize;
use pbs_core::flatten;
use pbs_core::frontend::{parse, print_module};
use pbs_core::rules::{random_rewrites, rule, verify_soundness};
use pbs_core::unroll::{check_unrollable, unroll};

fn canonical_forms(c: &mut Criterion) {
    let mut group = c.benchmark_group("canonicalize");
    for n in [2, 4, 6] {
        let ds = corpus(11, 20, n, 30, 0);
        group.bench_with_input(BenchmarkId::from_parameter(n), &ds, |b, ds| {
            b.iter(|| ds.iter().map(|d| canonicalize(d).unwrap().n).sum::<usize>())
        });
    }
    group.finish();
}

fn unrolling(c: &mut Criterion) {
    let ds: Vec<_> = corpus(12, 60, 2, 12, 2)
        .into_iter()
        .filter(|d| check_unrollable(d).unwrap().eligible && d.count_traces() > 0)
        .take(10)
        .collect();
    c.bench_function("unroll/q2", |b| {
        b.iter(|| ds.iter().map(|d| unroll(d).unwrap().count_traces()).sum::<usize>())
    });
}

fn rewriting(c: &mut Criterion) {
    let bsbsbs = rule("bsbsbs").unwrap();
    c.bench_function("verify_soundness/bsbsbs", |b| {
        b.iter(|| verify_soundness(bsbsbs, 2, 20, 0).passed())
    });
    let start = flatten(&corpus(13, 1, 3, 10, 0)[0]);
    c.bench_function("random_rewrites/10", |b| {
        b.iter(|| {
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            random_rewrites(&start, 10, 60, &mut rng).unwrap().1.len()
        })
    });
}

fn text(c: &mut Criterion) {
    let texts: Vec<String> = corpus(14, 50, 3, 25, 0).iter().map(|d| print_module(d, "d")).collect();
    c.bench_function("parse/50", |b| {
        b.iter(|| texts.iter().map(|t| parse(t).unwrap().definitions.len()).sum::<usize>())
    });
    let ds = corpus(15, 50, 3, 25, 0);
    c.bench_function("print/50", |b| {
        b.iter(|| ds.iter().map(|d| print_module(d, "d").len()).sum::<usize>())
    });
}

criterion_group!(benches, canonical_forms, unrolling, rewriting, text);
criterion_main!(benches);
