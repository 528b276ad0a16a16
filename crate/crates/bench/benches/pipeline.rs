use criterion::{criterion_group, criterion_main, Criterion};
use d4quad_bench::{triple, type_a_instance};
use d4quad_core::linforms::p_bound;
use d4quad_core::oracle::extend_triple;
use d4quad_core::pipeline::{verify_family_with, VerifyOptions};
use d4quad_core::reduction::dp_reduce;
use d4quad_core::sequences::InitialKind;
use d4quad_core::tuples::FamilyClass;
use num_bigint::BigInt;
use std::hint::black_box;

fn reduction(c: &mut Criterion) {
    let inst = type_a_instance(2, 7, "c1+", 253_000_000_000_000_000);
    c.bench_function("dp_reduce k=2 p=7 c1+", |b| b.iter(|| dp_reduce(black_box(&inst))));
}

fn bounds(c: &mut Criterion) {
    let class: FamilyClass = "c1".parse().unwrap();
    c.bench_function("p_bound k=2 c1 a", |b| {
        b.iter(|| p_bound(black_box(2), class, InitialKind::TypeA))
    });
}

fn extension(c: &mut Criterion) {
    let t = triple(2, 7, "c1+");
    let d_max = BigInt::from(10u64.pow(10));
    c.bench_function("extend_triple 4,8,24", |b| {
        b.iter(|| extend_triple(&BigInt::from(4), &BigInt::from(8), &BigInt::from(24), black_box(&d_max)))
    });
    c.bench_function("extend_triple k=2 p=7 c1+", |b| {
        b.iter(|| extend_triple(&t.a, &t.b, &t.c, black_box(&d_max)))
    });
}

fn verify(c: &mut Criterion) {
    let opts = VerifyOptions {
        p_max: Some(12),
        ..VerifyOptions::default()
    };
    let family = "c1+".parse().unwrap();
    let mut g = c.benchmark_group("verify");
    g.sample_size(10);
    g.bench_function("k=2 c1+ p<=12", |b| {
        b.iter(|| verify_family_with(2, family, black_box(&opts)))
    });
    g.finish();
}

criterion_group!(benches, reduction, bounds, extension, verify);
criterion_main!(benches);
