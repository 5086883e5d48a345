use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use topkat::{decide_equal, decide_fail_equal, parse_term, Alphabet};
use topkat_bench::{blowup, pinned, random_pair, Query};

fn decide(q: &Query) -> bool {
    decide_equal(&q.left, &q.right, &q.alphabet).unwrap().is_equal()
}

fn pinned_queries(c: &mut Criterion) {
    let mut group = c.benchmark_group("pinned");
    for q in pinned() {
        group.bench_function(q.name.as_str(), |b| b.iter(|| decide(black_box(&q))));
    }
    group.finish();
}

fn blowup_family(c: &mut Criterion) {
    let mut group = c.benchmark_group("blowup");
    for k in [2, 4, 6] {
        let q = blowup(k);
        group.bench_with_input(BenchmarkId::from_parameter(k), &q, |b, q| b.iter(|| decide(black_box(q))));
    }
    group.finish();
}

fn random_sizes(c: &mut Criterion) {
    let mut group = c.benchmark_group("random");
    group.sample_size(20);
    for size in [15, 30, 60] {
        let (independent, rewritten) = random_pair(size, 13);
        for q in [independent, rewritten] {
            group.bench_function(q.name.as_str(), |b| b.iter(|| decide(black_box(&q))));
        }
    }
    group.finish();
}

fn fail_split(c: &mut Criterion) {
    let a = Alphabet::new(["p"], ["b", "c", "d"]).unwrap();
    let l = parse_term("(b;(c;fail + ~c;p))*;~b", &a).unwrap();
    let r = parse_term("(b;~c;p)*;(~b + b;c;fail)", &a).unwrap();
    c.bench_function("fail/error-in-loop", |b| {
        b.iter(|| decide_fail_equal(black_box(&l), black_box(&r), &a).unwrap().is_equal())
    });
}

criterion_group!(benches, pinned_queries, blowup_family, random_sizes, fail_split);
criterion_main!(benches);
