//! Engines against the oracles on generated corpora. Sizes default small;
//! `SEEDS`, `MAXN`, `MAXM` and `MAXK` scale them up.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lzpm::editdist::{lv_suffix_grid, lv_verify, lv_window, search_errors};
use lzpm::hamming::{periodic_windows, search_hamming, HammingPattern};
use lzpm::harness::{generate_instance, oracle_edit, oracle_hamming, Instance, InstanceLimits, Profile};
use lzpm::lzindex::{lz78_parse, PatternTrie};
use lzpm::pcreduce::{build_ph, verify_hamming_at, PcString};
use lzpm::textcore::PatternIndex;
use lzpm::{Letter, MatchReport, Metrics, Mode, Parallelism, SearchOptions};

fn env(name: &str, default: u64) -> u64 {
    std::env::var(name).ok().and_then(|s| s.parse().ok()).unwrap_or(default)
}

fn instance(seed: u64, mode: Mode) -> Instance {
    let lim = InstanceLimits {
        max_n: env("MAXN", 3000) as usize,
        max_m: env("MAXM", 200) as usize,
        max_k: env("MAXK", 4) as usize,
        sigma: [2, 4, 26][(seed / 5 % 3) as usize],
    };
    generate_instance(Profile::ALL[(seed % 5) as usize], lim, mode, seed)
}

fn describe(inst: &Instance, got: &MatchReport, want: &MatchReport) -> String {
    let g: BTreeSet<_> = got.hits.iter().collect();
    let w: BTreeSet<_> = want.hits.iter().collect();
    format!(
        "N={} m={} k={}: missing {:?}, extra {:?}",
        inst.text.len(),
        inst.pattern.len(),
        inst.k,
        w.difference(&g).take(5).collect::<Vec<_>>(),
        g.difference(&w).take(5).collect::<Vec<_>>()
    )
}

#[test]
fn hamming_engines_match_oracle() {
    let mut total = Metrics::default();
    for seed in 0..env("SEEDS", 1500) {
        let inst = instance(seed, Mode::Hamming);
        let (cb, ct) = lz78_parse(&inst.text);
        let want = oracle_hamming(&inst.text, &inst.pattern, inst.k);
        for basic in [false, true] {
            let opts = SearchOptions { basic_periodic: basic, ..Default::default() };
            let (got, mt) = search_hamming(&ct, &cb, &inst.pattern, inst.k, opts);
            assert!(got == want, "seed {seed} basic={basic} {}", describe(&inst, &got, &want));
            total.absorb(&mt);
        }
    }
    assert!(total.naive_windows > 0 && total.nonperiodic_windows > 0 && total.periodic_windows > 0);
    assert!(total.fine_runs > 0 && total.black_breaks > 0, "{}", total.to_record());
}

#[test]
fn edit_engine_matches_oracle() {
    let mut total = Metrics::default();
    for seed in 0..env("SEEDS", 1500) {
        let inst = instance(seed, Mode::Edit);
        let (cb, ct) = lz78_parse(&inst.text);
        let want = oracle_edit(&inst.text, &inst.pattern, inst.k);
        let (got, mt) = search_errors(&ct, &cb, &inst.pattern, inst.k, SearchOptions::default());
        assert!(got == want, "seed {seed} {}", describe(&inst, &got, &want));
        total.absorb(&mt);
    }
    assert!(total.naive_windows > 0 && total.nonperiodic_windows > 0 && total.periodic_windows > 0);
    assert!(total.fine_runs > 0, "{}", total.to_record());
}

#[test]
fn parallel_and_sequential_agree() {
    for seed in 0..200 {
        for mode in [Mode::Hamming, Mode::Edit] {
            let inst = instance(seed, mode);
            let (cb, ct) = lz78_parse(&inst.text);
            let run = |parallelism| {
                let opts = SearchOptions { parallelism, ..Default::default() };
                match mode {
                    Mode::Hamming => search_hamming(&ct, &cb, &inst.pattern, inst.k, opts),
                    Mode::Edit => search_errors(&ct, &cb, &inst.pattern, inst.k, opts),
                }
            };
            assert_eq!(run(Parallelism::Sequential), run(Parallelism::Parallel), "seed {seed} {mode:?}");
        }
    }
}

#[test]
fn black_alignments_match_direct_verification() {
    let mut checked = 0;
    for seed in 0..env("SEEDS", 1500) / 2 {
        let lim = InstanceLimits { max_n: 3000, max_m: 200, max_k: 4, sigma: [2, 4, 26][(seed % 3) as usize] };
        let profile = [Profile::Periodic, Profile::Adversarial][(seed % 2) as usize];
        let inst = generate_instance(profile, lim, Mode::Hamming, seed);
        let (cb, ct) = lz78_parse(&inst.text);
        let pt = PatternTrie::new(&cb, &inst.pattern).unwrap();
        let ph = build_ph(&ct, &pt, inst.k);
        let hp = HammingPattern::new(&inst.pattern, inst.k);
        for mut w in periodic_windows(&ct, &pt, &ph, &hp) {
            for a in 0..=w.last_alignment().unwrap() {
                if let Ok((d, _)) = w.verify_black_alignment(a) {
                    checked += 1;
                    assert_eq!(d, verify_hamming_at(&w.pc, &pt.pattern, a, inst.k), "seed {seed} alignment {a}");
                }
            }
        }
    }
    assert!(checked > 0);
}

fn dp(a: &[Letter], b: &[Letter]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for i in 1..=a.len() {
        let mut cur = vec![i; b.len() + 1];
        for j in 1..=b.len() {
            cur[j] = (prev[j - 1] + usize::from(a[i - 1] != b[j - 1])).min(prev[j] + 1).min(cur[j - 1] + 1);
        }
        prev = cur;
    }
    prev[b.len()]
}

#[test]
fn diagonal_waves_match_dp() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..2000 {
        let sigma = rng.gen_range(2..4);
        let tn = rng.gen_range(1..60);
        let pn = rng.gen_range(1..30);
        let t: Vec<Letter> = (0..tn).map(|_| rng.gen_range(0..sigma)).collect();
        let p: Vec<Letter> = (0..pn).map(|_| rng.gen_range(0..sigma)).collect();
        let k = rng.gen_range(0..6);
        let idx = PatternIndex::new(&p).unwrap();
        let pc = PcString::from_text(&idx, &t);
        let want = oracle_edit(&t, &p, k);
        assert_eq!(lv_window(&pc, &idx, 1, t.len(), k), want.hits, "t={t:?} p={p:?} k={k}");
        for e in 1..=t.len() {
            let w = want.hits.iter().find(|h| h.0 == e).map(|h| h.1);
            assert_eq!(lv_verify(&pc, &idx, e, k), w, "t={t:?} p={p:?} k={k} end {e}");
        }
        for (i, row) in lv_suffix_grid(&t, &p, k).iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert_eq!(v, dp(&t[i..], &p[j..]).min(k + 1));
            }
        }
    }
}

/// Clean periodic text with a few foreign letters and a pattern with one
/// deletion: most ends come from fine runs, which must agree with the oracle.
#[test]
fn periodic_fine_runs_propagate() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut fine = 0;
    for round in 0..40 {
        let q = rng.gen_range(2..5);
        let u: Vec<Letter> = (0..q).map(|_| rng.gen_range(0..3)).collect();
        let n = 8000;
        let mut text: Vec<Letter> = (0..n).map(|i| u[i % q]).collect();
        for _ in 0..6 {
            let i = rng.gen_range(0..n);
            text[i] = 3;
        }
        let m = rng.gen_range(200..500);
        let s = rng.gen_range(0..n - m);
        let mut pattern = text[s..s + m].to_vec();
        let k = rng.gen_range(1..4);
        pattern.remove(rng.gen_range(0..m));
        let (cb, ct) = lz78_parse(&text);
        let (got, mt) = search_errors(&ct, &cb, &pattern, k, SearchOptions::default());
        assert_eq!(got, oracle_edit(&text, &pattern, k), "round {round}");
        fine += mt.fine_runs;
    }
    assert!(fine > 0);
}
