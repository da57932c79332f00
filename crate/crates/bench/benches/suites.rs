use criterion::{criterion_group, criterion_main, Criterion};
use quasikernel_bench::{load, LIST, STREAMS};
use quasikernel_core::checks::{lab_suite, run_suite, LabTarget};
use quasikernel_core::{CheckConfig, Suite};

fn suites(c: &mut Criterion) {
    let cfg = CheckConfig::default();
    let list = load(LIST);
    let streams = load(STREAMS);
    let mut group = c.benchmark_group("suites");
    group.sample_size(10);
    group.bench_function("initial-list", |b| b.iter(|| run_suite(&list, Suite::Initial, &cfg)));
    group.bench_function("final-streams", |b| b.iter(|| run_suite(&streams, Suite::Final, &cfg)));
    group.bench_function("lab-rere", |b| b.iter(|| lab_suite(LabTarget::Rere)));
    group.finish();
}

criterion_group!(benches, suites);
criterion_main!(benches);
