use criterion::{criterion_group, criterion_main, Criterion};
use shuffle_stab::coproducts::{delta_w, primitives_basis};
use shuffle_stab::stabilizers::DegreeData;
use shuffle_stab::WPoly;

fn coproduct(c: &mut Criterion) {
    let a = WPoly::from_parts(&[3, 1, 2, 2]);
    c.bench_function("delta_w weight 8", |b| b.iter(|| delta_w(&a)));
}

fn primitives(c: &mut Criterion) {
    c.bench_function("primitives_basis 7", |b| {
        b.iter(|| primitives_basis(7).unwrap())
    });
}

fn stabilizer(c: &mut Criterion) {
    let mut g = c.benchmark_group("stabilizer");
    g.sample_size(10);
    g.bench_function("degree data + stab_w_lie, d=8", |b| {
        b.iter(|| DegreeData::new(8).unwrap().stab_w_lie())
    });
    g.finish();
}

criterion_group!(benches, coproduct, primitives, stabilizer);
criterion_main!(benches);
