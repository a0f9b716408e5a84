use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use hodge_limit::dmodlocal::{kernel_generators_check, LocalModel};
use hodge_limit::fixtures::{kodaira, random_nilpotent};
use hodge_limit::mellinverify::{primitive_pairing_constant, ModelChart, QuadratureConfig, SeparableTestFunction};
use hodge_limit::sncdegeneration::{e2_page, Alpha, Degeneration};
use hodge_limit::weightfilt::{monodromy_filtration, NilpotentEndo};

fn bench_rref(c: &mut Criterion) {
    let mut group = c.benchmark_group("rref");
    for dim in [4usize, 8, 12] {
        // A conjugated nilpotent has the coefficient growth of real inputs.
        let (m, _) = random_nilpotent(7, dim);
        group.bench_with_input(BenchmarkId::from_parameter(dim), &m, |b, m| b.iter(|| black_box(m.rref())));
    }
    group.finish();
}

fn bench_filtration(c: &mut Criterion) {
    let mut group = c.benchmark_group("monodromy_filtration");
    for dim in [4usize, 6, 8] {
        let op = NilpotentEndo::new(random_nilpotent(11, dim).0).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(dim), &op, |b, op| {
            b.iter(|| monodromy_filtration(black_box(op)).unwrap())
        });
    }
    group.finish();
}

fn bench_e2(c: &mut Criterion) {
    let mut group = c.benchmark_group("e2_page");
    for n in [3u32, 5] {
        let deg = Degeneration::new(kodaira(n)).unwrap();
        group.bench_with_input(BenchmarkId::new("kodaira", n), &deg, |b, deg| {
            b.iter(|| e2_page(black_box(deg), &Alpha::zero()).unwrap())
        });
    }
    group.finish();
}

fn bench_local_model(c: &mut Criterion) {
    let m = LocalModel::new(2, vec![1, 1, 1], Alpha::zero(), 6).unwrap();
    c.bench_function("kernel_generators n=2 r=2", |b| b.iter(|| kernel_generators_check(black_box(&m), 2).unwrap()));
}

fn bench_mellin(c: &mut Criterion) {
    let chart = ModelChart::with_sections(2, vec![2, 3, 1], Alpha::new(1, 2), &[], &[]).unwrap();
    let eta = SeparableTestFunction::standard(3);
    let cfg = QuadratureConfig::default();
    c.bench_function("pairing_constant e=(2,3,1)", |b| {
        b.iter(|| primitive_pairing_constant(black_box(&chart), &eta, &cfg).unwrap())
    });
}

criterion_group!(benches, bench_rref, bench_filtration, bench_e2, bench_local_model, bench_mellin);
criterion_main!(benches);
