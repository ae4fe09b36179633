use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use notjs::client::{bench_table, corpus};
use notjs::engine::{fuzz, GenConfig, Limits};
use notjs::sensitivity::STANDARD_SET;

fn batches(c: &mut Criterion) {
    let programs = corpus();
    let mut group = c.benchmark_group("batch");
    group.sample_size(10);
    for parallel in [false, true] {
        let mode = if parallel { "parallel" } else { "sequential" };
        group.bench_with_input(BenchmarkId::new("fuzz_20x7", mode), &parallel, |b, &par| {
            b.iter(|| fuzz(0..20, &STANDARD_SET, 10_000, GenConfig::default(), Limits::default(), par).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("bench_table", mode), &parallel, |b, &par| {
            b.iter(|| bench_table(&programs, &STANDARD_SET, Limits::default(), par).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, batches);
criterion_main!(benches);
