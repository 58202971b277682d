use criterion::{criterion_group, criterion_main, Criterion};
use orthwalk::counting::{count_excursions, CountOptions};
use orthwalk::coxeter::{classify, diagram_from_angles, DEFAULT_DENOM_CAP};
use orthwalk::report::{analyze, AnalyzeOptions};
use orthwalk::spectral::angle_geometry;
use orthwalk::{critical_point, models};
use std::hint::black_box;

fn pipeline(c: &mut Criterion) {
    let two_fifths = models::two_fifths_rotation();
    c.bench_function("critical_point/two_fifths", |b| b.iter(|| critical_point(black_box(&two_fifths)).unwrap()));

    let tandem = models::tandem(4);
    let delta = critical_point(&tandem).unwrap().delta;
    c.bench_function("classify/tandem_4d", |b| {
        b.iter(|| classify(&diagram_from_angles(&angle_geometry(black_box(&delta)).unwrap(), DEFAULT_DENOM_CAP)))
    });

    let simple = models::simple_walk(2);
    let opts = CountOptions::default();
    c.bench_function("count/simple_2d_n100", |b| {
        b.iter(|| count_excursions(&simple, &[0, 0], &[0, 0], black_box(100), &opts).unwrap())
    });

    let identity = models::identity_covariance();
    let mut group = c.benchmark_group("analyze");
    group.sample_size(10);
    group.bench_function("identity_covariance", |b| b.iter(|| analyze(&identity, &AnalyzeOptions::default())));
    group.finish();
}

criterion_group!(benches, pipeline);
criterion_main!(benches);
