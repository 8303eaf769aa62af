use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use pbs_bench::corpus;
use pbs_core::denot::{adequacy_check, denote_raw};
use pbs_core::diagram::{qs_builder, GateElement};
use pbs_core::{eval_path, routed_map, Polarisation};

fn path_semantics(c: &mut Criterion) {
    let qs = qs_builder(GateElement::symbol("U"), GateElement::symbol("V"));
    c.bench_function("eval_path/qswitch", |b| {
        b.iter(|| eval_path(black_box(&qs), Polarisation::V, 0).unwrap())
    });
    let mut group = c.benchmark_group("routed_map");
    for n in [2, 4, 6] {
        let ds = corpus(7, 20, n, 30, 0);
        group.bench_with_input(BenchmarkId::from_parameter(n), &ds, |b, ds| {
            b.iter(|| ds.iter().map(|d| routed_map(d).unwrap().n).sum::<usize>())
        });
    }
    group.finish();
}

fn denotation(c: &mut Criterion) {
    let mut group = c.benchmark_group("denote_raw");
    for q in [1, 2, 3] {
        let ds = corpus(8, 10, 3, 20, q);
        group.bench_with_input(BenchmarkId::from_parameter(q), &ds, |b, ds| {
            b.iter(|| ds.iter().map(|d| denote_raw(d, q).unwrap().n).sum::<usize>())
        });
    }
    group.finish();
    let ds = corpus(9, 10, 3, 20, 2);
    c.bench_function("adequacy_check/q2", |b| {
        b.iter(|| ds.iter().all(|d| adequacy_check(d, 2, 1e-9).unwrap()))
    });
}

criterion_group!(benches, path_semantics, denotation);
criterion_main!(benches);
