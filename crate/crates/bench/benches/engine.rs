use blockforge::catalog::catalog;
use blockforge::compiler::{compile, CompileOptions};
use blockforge::expr::{f_z2, BooleanFunction};
use blockforge::gsm::{enumerate_gsm, enumerate_gsm_with, GsmOptions};
use blockforge::language::named;
use blockforge::metrics::geometry_report;
use blockforge::search::{search_minimal, SearchOptions};
use blockforge_bench::random_unit_disk;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn gsm(c: &mut Criterion) {
    let mut g = c.benchmark_group("gsm");
    for n in [16, 32, 48] {
        let k = random_unit_disk(n, 4, 11);
        let opts = GsmOptions {
            max_atoms: 64,
            ..GsmOptions::default()
        };
        g.bench_with_input(BenchmarkId::new("random_unit_disk", n), &k, |b, k| {
            b.iter(|| enumerate_gsm_with(black_box(k), &opts).unwrap())
        });
    }
    let scu = catalog("SCU").unwrap().complex;
    g.bench_function("scu", |b| b.iter(|| enumerate_gsm(black_box(&scu)).unwrap()));
    g.finish();
}

fn search(c: &mut Criterion) {
    let mut g = c.benchmark_group("search");
    g.sample_size(10);
    let opts = SearchOptions {
        parallel: false,
        ..SearchOptions::default()
    };
    g.bench_function("nor_up_to_5", |b| b.iter(|| search_minimal(&named::nor(), 5, &opts).unwrap()));
    g.bench_function("xnor_up_to_6", |b| b.iter(|| search_minimal(&named::xnor(), 6, &opts).unwrap()));
    g.finish();
}

fn metrics(c: &mut Criterion) {
    let k = random_unit_disk(48, 0, 5);
    c.bench_function("geometry_report_48", |b| b.iter(|| geometry_report(black_box(&k)).unwrap()));
}

fn compiler(c: &mut Criterion) {
    let mut g = c.benchmark_group("compile");
    g.sample_size(10);
    let opts = CompileOptions::default();
    let maj = BooleanFunction::parse("(x1 & x2) | (x2 & x3) | (x1 & x3)").unwrap();
    g.bench_function("majority3", |b| b.iter(|| compile(black_box(&maj), &opts).unwrap()));
    let par = f_z2(3);
    g.bench_function("parity3", |b| b.iter(|| compile(black_box(&par), &opts).unwrap()));
    g.finish();
}

criterion_group!(benches, gsm, search, metrics, compiler);
criterion_main!(benches);
