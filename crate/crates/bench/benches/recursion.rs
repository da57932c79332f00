use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use quasikernel_bench::{list_literal, load, stream_at, LIST, MIXED, STREAMS};
use quasikernel_core::cpo::{factorial_functional, flat_cpo, lfp, pfun_cpo};
use quasikernel_core::{Fuel, PVal, Ty};

fn fold_lists(c: &mut Criterion) {
    let env = load(LIST);
    let mut group = c.benchmark_group("fold-sum");
    for n in [8, 32, 128] {
        let expr = format!("sum {}", list_literal(n));
        group.bench_with_input(BenchmarkId::from_parameter(n), &expr, |b, e| {
            b.iter(|| env.eval_str(e, &mut Fuel::new(10_000_000)).unwrap())
        });
    }
    group.finish();
}

fn fold_trees(c: &mut Criterion) {
    let env = load(MIXED);
    let mut tree = "tip".to_string();
    for i in 0..6 {
        tree = if i % 2 == 0 { format!("fork ({tree}) ({tree})") } else { format!("node true ({tree})") };
    }
    let expr = format!("fold[Mix] 1 (\\b n -> succ n) plus ({tree})");
    c.bench_function("fold-mix-size", |b| b.iter(|| env.eval_str(&expr, &mut Fuel::new(10_000_000)).unwrap()));
}

fn unfold_streams(c: &mut Criterion) {
    let env = load(STREAMS);
    let mut group = c.benchmark_group("stream-observe");
    for k in [4, 16, 64] {
        let expr = stream_at(k);
        group.bench_with_input(BenchmarkId::from_parameter(k), &expr, |b, e| {
            b.iter(|| env.eval_str(e, &mut Fuel::new(10_000_000)).unwrap())
        });
    }
    group.finish();
}

fn factorial_fixed_point(c: &mut Criterion) {
    let cpo = pfun_cpo(Ty::Nat, flat_cpo(Ty::Nat));
    let f = factorial_functional();
    c.bench_function("lfp-factorial", |b| {
        b.iter(|| {
            let mut fuel = Fuel::new(10_000_000);
            let fix = lfp(&cpo, &*f, 32, &mut fuel).unwrap();
            fix.value.apply(&PVal::nat(10), &mut fuel).unwrap()
        })
    });
}

criterion_group!(benches, fold_lists, fold_trees, unfold_streams, factorial_fixed_point);
criterion_main!(benches);
