use criterion::{criterion_group, criterion_main, Criterion};
use facered::batch::{map_instances, map_sequential};
use facered::rigidity::{gen_laman, random_generic_config, rigidity_verdicts, EdgeKind, Framework};

fn instances() -> Vec<Framework> {
    (0..16u64)
        .map(|seed| {
            let mut g = gen_laman(5 + seed as usize % 4, seed).unwrap();
            let extra = g.non_edges()[0];
            g.add_edge(extra.0, extra.1, EdgeKind::Bar).unwrap();
            random_generic_config(&g, 2, 100 + seed).unwrap()
        })
        .collect()
}

fn bench_batch(c: &mut Criterion) {
    let fs = instances();
    let mut group = c.benchmark_group("laman_plus_one_x16");
    group.sample_size(10);
    group.bench_function("sequential", |b| b.iter(|| map_sequential(&fs, rigidity_verdicts)));
    group.bench_function("batch", |b| b.iter(|| map_instances(&fs, None, rigidity_verdicts)));
    group.finish();
}

criterion_group!(benches, bench_batch);
criterion_main!(benches);
