use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dwork_bench::{rank_one, rank_three, ring, sample_polynomial};
use dwork_core::dwork::{classical_l, fredholm_determinant, theta_splitting, BlockOperator, FiberEvaluator};
use dwork_core::moment::{unit_root_l_euler, MomentFamily, MomentMode};
use dwork_core::padic::{default_digit_count, PAdicExponent, RingElement, RingTower};

fn ring_arithmetic(c: &mut Criterion) {
    let mut group = c.benchmark_group("ring");
    for n_pi in [10u32, 30] {
        let ctx = ring(5, n_pi);
        let x = &RingElement::one(&ctx) + &RingElement::uniformizer(&ctx);
        let y = x.pow(7);
        group.bench_with_input(BenchmarkId::new("mul", n_pi), &n_pi, |b, _| b.iter(|| black_box(&x) * black_box(&y)));
        group.bench_with_input(BenchmarkId::new("inv", n_pi), &n_pi, |b, _| {
            b.iter(|| black_box(&y).inv_unit().unwrap())
        });
    }
    group.finish();
}

fn classical(c: &mut Criterion) {
    let mut group = c.benchmark_group("classical_l");
    group.sample_size(20);
    for n in [1usize, 2] {
        let ctx = ring(3, 20);
        let theta = theta_splitting(&ctx, None).unwrap();
        let f = sample_polynomial(n);
        let degree = if n == 1 { 6 } else { 3 };
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| classical_l(&f, &theta, degree, None).unwrap())
        });
    }
    group.finish();
}

fn fredholm(c: &mut Criterion) {
    let ctx = ring(3, 20);
    let spec = rank_one(&ctx, &sample_polynomial(1));
    let op = BlockOperator::assemble(spec.matrix(), 3, None).unwrap();
    c.bench_function("fredholm/x+x^2", |b| b.iter(|| fredholm_determinant(&op, 6).unwrap()));
}

fn moments(c: &mut Criterion) {
    let mut group = c.benchmark_group("moments");
    group.sample_size(10);
    let n_pi = 12;
    let spec = rank_three(n_pi);
    let kappa = PAdicExponent::minus_one(3, default_digit_count(3, n_pi));
    let family = MomentFamily::new(&spec).unwrap();
    group.bench_function("matrix/rank3", |b| {
        b.iter(|| family.moment_matrix(&kappa, MomentMode::ExactKappa).unwrap())
    });
    group.bench_function("assembled/rank3", |b| {
        b.iter(|| family.l_unit_assembled(&kappa, None, 3, 3).unwrap())
    });
    let tower = RingTower::new(3, 1, 4, n_pi).unwrap();
    let spec = dwork_core::dwork::SigmaModuleSpec::from_json(tower.base(), dwork_bench::RANK_THREE).unwrap();
    group.bench_function("euler/rank3", |b| {
        b.iter(|| {
            let fibers = FiberEvaluator::new(&tower, spec.matrix()).unwrap();
            unit_root_l_euler(&fibers, &kappa, 4).unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, ring_arithmetic, classical, fredholm, moments);
criterion_main!(benches);
