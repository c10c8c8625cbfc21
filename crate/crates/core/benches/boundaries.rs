//! Per-boundary window processing, sequential against rayon. Without the
//! `parallel` feature both rows run sequentially.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use lzpm::editdist::search_errors;
use lzpm::hamming::search_hamming;
use lzpm::harness::{generate_sized, Profile};
use lzpm::lzindex::lz78_parse;
use lzpm::{Mode, Parallelism, SearchOptions};

fn boundaries(c: &mut Criterion) {
    let mut group = c.benchmark_group("boundaries");
    group.sample_size(10);
    for (profile, mode, m, k) in [
        (Profile::Uniform, Mode::Hamming, 64, 4),
        (Profile::Periodic, Mode::Hamming, 256, 2),
        (Profile::Planted, Mode::Edit, 64, 3),
        (Profile::Periodic, Mode::Edit, 256, 2),
    ] {
        let inst = generate_sized(profile, 200_000, m, k, 4, mode, 1);
        let (cb, ct) = lz78_parse(&inst.text);
        for parallelism in [Parallelism::Sequential, Parallelism::Parallel] {
            let opts = SearchOptions { parallelism, ..Default::default() };
            let id = BenchmarkId::new(format!("{profile}/{mode:?}/m{m}/k{k}"), format!("{parallelism:?}"));
            group.bench_function(id, |b| {
                b.iter(|| match mode {
                    Mode::Hamming => search_hamming(&ct, &cb, black_box(&inst.pattern), k, opts),
                    Mode::Edit => search_errors(&ct, &cb, black_box(&inst.pattern), k, opts),
                })
            });
        }
    }
    group.finish();
}

criterion_group!(benches, boundaries);
criterion_main!(benches);
