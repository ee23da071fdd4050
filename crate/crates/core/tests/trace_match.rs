use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use seqteach::matching::{
    classify_strategy, common_pair_ranks, contingency, match_traces, normalize, simulate_participant, MatchConfig,
    StrategyCategory,
};
use seqteach::stats::{chi_squared_2x2, spearman};
use seqteach::zoo::{machine_trace, AlgorithmId, BankSizes, QuestionBank, QuestionSpec, Trace};

fn unordered(t: &Trace) -> Vec<(i64, i64)> {
    t.pairs.iter().map(|&p| normalize(p)).collect()
}

fn sort_questions(seed: u64) -> Vec<QuestionSpec> {
    let bank = QuestionBank::generate(seed, BankSizes::default()).unwrap();
    bank.sort_training.into_iter().chain(bank.sort_test).collect()
}

#[test]
fn noise_free_traces_classify_to_their_own_family() {
    let (mut ok, mut total) = (0, 0);
    for q in sort_questions(2024) {
        let input = q.values();
        for alg in AlgorithmId::ALL {
            let sim = simulate_participant(alg, 0.0, &q, 0).unwrap();
            let c = classify_strategy(&sim.trace, &input, &MatchConfig::default()).unwrap();
            total += 1;
            if c.category == alg.category().into() {
                ok += 1;
                continue;
            }
            let winner = c.best.expect("a noise-free trace always matches itself").algorithm;
            let (_, wt) = machine_trace(winner, &input).unwrap();
            assert_eq!(
                unordered(&wt),
                unordered(&sim.trace),
                "{} misread as {} on {input:?}",
                alg.name(),
                winner.name()
            );
        }
    }
    assert!(ok as f64 / total as f64 >= 0.95, "{ok}/{total}");
}

#[test]
fn insertion_trace_is_insertion() {
    let input = [4, 6, 5, 2, 3, 1];
    let (_, t) = machine_trace(AlgorithmId::IsLinearBwd, &input).unwrap();
    let c = classify_strategy(&t, &input, &MatchConfig::default()).unwrap();
    assert_eq!(c.category, StrategyCategory::IS);
}

#[test]
fn trace_avoiding_machine_pairs_is_other() {
    let input = [4, 6, 5, 2, 3, 1];
    let used: BTreeSet<(i64, i64)> = AlgorithmId::ALL
        .iter()
        .flat_map(|&a| unordered(&machine_trace(a, &input).unwrap().1))
        .collect();
    let mut pairs: Vec<(i64, i64)> = input.iter().map(|&x| (x, x)).collect();
    for &a in &input {
        for &b in &input {
            if a < b && !used.contains(&(a, b)) {
                pairs.push((a, b));
            }
        }
    }
    let c = classify_strategy(&Trace::new(pairs), &input, &MatchConfig::default()).unwrap();
    assert_eq!(c.category, StrategyCategory::Other);
    assert!(c.best.is_none());
}

#[test]
fn disjoint_traces_counting() {
    let h = Trace::new(vec![(1, 2), (2, 3)]);
    let m = Trace::new(vec![(1, 3), (1, 1)]);
    assert_eq!(contingency(&h, &m, &[1, 2, 3]).unwrap().cells, [[3, 3], [3, 1]]);
}

#[test]
fn yates_reference_values() {
    let (stat, p) = chi_squared_2x2([[13, 1], [1, 10]], true);
    assert!((stat - 14.3).abs() < 0.05, "{stat}");
    assert!(p < 0.001);
    let (raw, _) = chi_squared_2x2([[13, 1], [1, 10]], false);
    assert!((raw - 17.5).abs() < 0.05, "{raw}");
    assert_eq!(chi_squared_2x2([[5, 5], [5, 5]], true), (0.0, 1.0));
}

fn accuracy(noise: f64, runs: usize, seed: u64) -> f64 {
    let qs = sort_questions(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ok = 0;
    for run in 0..runs {
        let alg = AlgorithmId::ALL[rng.random_range(0..AlgorithmId::ALL.len())];
        let q = &qs[rng.random_range(0..qs.len())];
        let sim = simulate_participant(alg, noise, q, run as u64).unwrap();
        if sim.trace.is_empty() {
            continue;
        }
        let c = classify_strategy(&sim.trace, &q.values(), &MatchConfig::default()).unwrap();
        ok += (c.category == alg.category().into()) as usize;
    }
    ok as f64 / runs as f64
}

#[test]
fn accuracy_falls_with_noise() {
    let a0 = accuracy(0.0, 500, 5);
    let a1 = accuracy(0.1, 500, 5);
    let a3 = accuracy(0.3, 500, 5);
    assert!(a0 > a1 && a1 > a3, "{a0} {a1} {a3}");
}

fn closed_form(t: [[u64; 2]; 2]) -> f64 {
    let (a, b, c, d) = (t[0][0] as f64, t[0][1] as f64, t[1][0] as f64, t[1][1] as f64);
    let n = a + b + c + d;
    let num = ((a * d - b * c).abs() - n / 2.0).max(0.0).powi(2) * n;
    num / ((a + b) * (c + d) * (a + c) * (b + d))
}

fn ranks_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<usize>)> {
    (3usize..12).prop_flat_map(|m| {
        let perm = || Just((1..=m).map(|v| v as f64).collect::<Vec<_>>()).prop_shuffle();
        (perm(), perm(), Just((0..m).collect::<Vec<_>>()).prop_shuffle())
    })
}

fn random_trace(items: usize) -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((1..=items as i64, 1..=items as i64), 1..20)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn yates_matches_closed_form(t in [[1u64..60, 1u64..60], [1u64..60, 1u64..60]]) {
        let (stat, _) = chi_squared_2x2(t, true);
        prop_assert!((stat - closed_form(t)).abs() < 1e-9);
    }
}

proptest! {
    #[test]
    fn spearman_relabel_invariant((xs, ys, perm) in ranks_strategy()) {
        let (r1, _) = spearman(&xs, &ys).unwrap();
        let px: Vec<f64> = perm.iter().map(|&i| xs[i]).collect();
        let py: Vec<f64> = perm.iter().map(|&i| ys[i]).collect();
        let (r2, _) = spearman(&px, &py).unwrap();
        prop_assert!((r1 - r2).abs() < 1e-12);
    }

    #[test]
    fn contingency_cells_sum(h in random_trace(7), m in random_trace(7)) {
        let items: Vec<i64> = (1..=7).collect();
        let t = contingency(&Trace::new(h), &Trace::new(m), &items).unwrap();
        prop_assert_eq!(t.total(), 28 + 4);
        prop_assert!(t.cells.iter().flatten().all(|&c| c >= 1));
    }

    #[test]
    fn looser_thresholds_only_add_matches(h in random_trace(6), alg in 0usize..24) {
        let items: Vec<i64> = (1..=6).collect();
        let alg = AlgorithmId::ALL[alg];
        let (_, m) = machine_trace(alg, &items).unwrap();
        let h = Trace::new(h);
        let strict = match_traces(alg, &h, &m, &items, &MatchConfig::default()).unwrap();
        let no_yates = MatchConfig { yates: false, ..MatchConfig::default() };
        let wider = MatchConfig { chi2_alpha: 0.05, rho_alpha: 0.1, ..MatchConfig::default() };
        for cfg in [no_yates, wider] {
            let loose = match_traces(alg, &h, &m, &items, &cfg).unwrap();
            prop_assert!(!strict.matched || loose.matched);
        }
        if strict.matched {
            prop_assert!(strict.chi2_p < 0.025 && strict.rho.unwrap() > 0.0 && strict.rho_p.unwrap() < 0.05);
        }
    }

    #[test]
    fn common_ranks_are_permutations(h in random_trace(6), m in random_trace(6)) {
        let (hr, mr) = common_pair_ranks(&Trace::new(h), &Trace::new(m));
        let mut sorted = mr.clone();
        sorted.sort_by(f64::total_cmp);
        prop_assert_eq!(&sorted, &hr);
    }
}
