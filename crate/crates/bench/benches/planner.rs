use criterion::{black_box, criterion_group, criterion_main, Criterion};

use sak_core::annulus::plan_reflections;
use sak_core::corpus;
use sak_core::cuts::enumerate_cuts;
use sak_core::equivalence::quiver_automorphisms;
use sak_core::fixtures::{pair_cut, surface};
use sak_core::grading::{solve_levels, weight_of_cut};
use sak_core::moves::{dict_check, MoveKind};
use sak_core::quiver::quiver_of;

fn building(c: &mut Criterion) {
    let pants = surface("pants");
    c.bench_function("quiver_of pants", |b| b.iter(|| quiver_of(black_box(&pants))));
    let fig = surface("figure1");
    c.bench_function("enumerate_cuts figure1", |b| b.iter(|| enumerate_cuts(black_box(&fig)).unwrap()));
    c.bench_function("automorphisms pants", |b| b.iter(|| quiver_automorphisms(&quiver_of(&pants))));
}

fn levels(c: &mut Criterion) {
    let s = surface("pants");
    let c1 = pair_cut(&s, &[("9", "8"), ("4", "2"), ("11", "2"), ("12", "1"), ("5", "7"), ("13", "3"), ("12", "14"), ("16", "17")]).unwrap();
    let c2 = pair_cut(&s, &[("9", "8"), ("4", "2"), ("2", "1"), ("3", "12"), ("5", "7"), ("6", "13"), ("12", "14"), ("17", "18")]).unwrap();
    let (w1, w2) = (weight_of_cut(&s, &c1), weight_of_cut(&s, &c2));
    c.bench_function("solve_levels pants", |b| b.iter(|| solve_levels(black_box(&w1), black_box(&w2)).unwrap()));
    let f = surface("figure1");
    let cut = pair_cut(&f, &[("2", "6"), ("7", "5")]).unwrap();
    let v = f.arc_index("2").unwrap();
    c.bench_function("dict_check figure1", |b| b.iter(|| dict_check(&f, &cut, v, MoveKind::Reflect, false).unwrap()));
}

fn planner(c: &mut Criterion) {
    let s = surface("lem1a");
    let c1 = pair_cut(&s, &[("i", "m"), ("j", "l")]).unwrap();
    let c2 = pair_cut(&s, &[("a", "i"), ("c", "j")]).unwrap();
    c.bench_function("plan lem1a", |b| b.iter(|| plan_reflections(&s, &c1, &c2, None).unwrap()));
    let mut r = corpus::rng(corpus::DEFAULT_SEED);
    let pairs: Vec<_> = (0..6).map(|_| corpus::annulus_pair(&mut r, 4)).collect();
    let mut g = c.benchmark_group("random annulus pairs");
    g.sample_size(10);
    g.bench_function("plan 6 pairs, ≤ 4 internal", |b| {
        b.iter(|| {
            for (s, c1, c2) in &pairs {
                black_box(plan_reflections(s, c1, c2, None).unwrap());
            }
        })
    });
    g.finish();
}

criterion_group!(benches, building, levels, planner);
criterion_main!(benches);
