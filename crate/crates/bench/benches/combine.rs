use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use hypiso_bench::worked_system;
use hypiso_core::sampling::{random_point, rng};
use hypiso_core::{estimate_delta_four_point, simultaneous_hyperbolic, GroupWord, SearchSchedule, SpaceModel};

fn classify(c: &mut Criterion) {
    let sys = worked_system();
    let word = GroupWord::parse("f^5 g f^-2 g").unwrap();
    c.bench_function("classify plane word", |b| {
        b.iter(|| {
            let action = &sys.actions()[0];
            action.model.classify(&action.evaluate(black_box(&word)).unwrap()).unwrap()
        })
    });
    let tree = SpaceModel::bass_serre(2, 3, 4).unwrap();
    let g = tree.parse_isometry("s t s t^-1 s t").unwrap();
    c.bench_function("classify bass-serre isometry", |b| b.iter(|| tree.classify(black_box(&g)).unwrap()));
}

fn combine(c: &mut Criterion) {
    let sys = worked_system();
    let schedule = SearchSchedule::default();
    c.bench_function("combine worked system", |b| b.iter(|| simultaneous_hyperbolic(black_box(&sys), &schedule).unwrap()));
}

fn delta(c: &mut Criterion) {
    let plane = SpaceModel::half_plane();
    let mut r = rng(1);
    let sample: Vec<_> = (0..12).map(|_| random_point(&mut r, &plane, 3)).collect();
    let base = plane.basepoint();
    c.bench_function("plane four-point delta, 12 points", |b| {
        b.iter(|| estimate_delta_four_point(&plane, black_box(&sample), &base).unwrap())
    });
    let tree = SpaceModel::cayley_tree(2, 3).unwrap();
    let points = tree.ball().unwrap().vertices.clone();
    let base = tree.basepoint();
    c.bench_function("cayley four-point delta, radius 3", |b| {
        b.iter(|| estimate_delta_four_point(&tree, black_box(&points[..20]), &base).unwrap())
    });
}

criterion_group!(benches, classify, combine, delta);
criterion_main!(benches);
