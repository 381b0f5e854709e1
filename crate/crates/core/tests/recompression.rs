mod support;

use proptest::prelude::*;

use recomp::grammar::{Grammar, Rule, SymbolId};
use recomp::recompression::reference::recompress_naive;
use recomp::recompression::{
    bcomp_string, collect_pair_frequencies, compute_nocc, deterministic_partition, recompress, LevelGrammar,
    PairMaps, RecompressionError, Recompressor, RlslpBuilder, Strategy as Partitioning,
};

use support::*;

fn strategy_strategy() -> impl Strategy<Value = Partitioning> {
    prop::sample::select(Partitioning::ALL.to_vec())
}

/// Every rule of an RLSLP is a pair, a run, or the single-terminal start.
fn assert_rlslp_shape(g: &Grammar) {
    let last = g.rules.len() - 1;
    for (i, r) in g.rules.iter().enumerate() {
        match r {
            Rule::Sequence(rhs) => assert!(
                rhs.len() == 2 || (i == last && rhs.len() == 1),
                "rule {} has {} symbols",
                i + 1,
                rhs.len()
            ),
            Rule::Run { exponent, .. } => assert!(*exponent >= 2),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn engines_agree_phase_by_phase(seed in any::<u64>(), strategy in strategy_strategy()) {
        let mut r = rng(seed);
        let text = corpus_text(&mut r, 2000);
        let g = corpus_grammar(&mut r, &text);
        let ls = lock_step(&text, &g, strategy, seed);
        prop_assert_eq!(ls.first_divergence(), None);
        prop_assert_eq!(ls.reference_rlslp.expand().unwrap(), text.clone());
        prop_assert_eq!(ls.compressed_rlslp.expand().unwrap(), text);
        for lv in ls.bcomp_levels() {
            prop_assert!(!has_equal_neighbours(lv));
        }
    }

    #[test]
    fn same_strategy_same_rlslp(seed in any::<u64>(), strategy in strategy_strategy()) {
        let mut r = rng(seed);
        let text = corpus_text(&mut r, 2000);
        let g = corpus_grammar(&mut r, &text);
        let compressed = recompress(&g, strategy, seed).unwrap();
        let reference = recompress_naive(&text, strategy, seed).unwrap();
        assert_rlslp_shape(&compressed.rlslp);
        prop_assert_eq!(&compressed.rlslp, &reference.rlslp);
        prop_assert_eq!(compressed.telemetry.rounds(), reference.telemetry.rounds());
        prop_assert!((compressed.telemetry.rounds() as f64) <= round_bound(text.len()));
    }

    #[test]
    fn pair_frequencies_match_level_string(seed in any::<u64>()) {
        let mut r = rng(seed);
        let text = corpus_text(&mut r, 1500);
        let g = corpus_grammar(&mut r, &text);
        let mut level = LevelGrammar::from_grammar(&g).unwrap();
        let mut acc = RlslpBuilder::new(256);
        for _ in 0..3 {
            let s = level.level_string();
            let pairs = collect_pair_frequencies(&level);
            prop_assert_eq!(&pairs, &PairMaps::from_string(&s));
            let unequal = s.windows(2).filter(|w| w[0] != w[1]).count() as u64;
            prop_assert_eq!(pairs.total_weight(), unequal);
            level = recomp::recompression::bcomp(&level, &mut acc);
        }
    }

    #[test]
    fn deterministic_partition_covers_a_quarter(
        s in proptest::collection::vec(0u8..12, 2..500),
    ) {
        let mut acc = RlslpBuilder::new(256);
        let syms: Vec<SymbolId> = s.iter().map(|&c| SymbolId::terminal(c)).collect();
        let level = bcomp_string(&syms, &mut acc);
        let pairs = PairMaps::from_string(&level);
        prop_assume!(!pairs.is_empty());
        let part = deterministic_partition(&pairs);
        prop_assert!(4 * part.covered_weight(&pairs) >= pairs.total_weight());
    }

    #[test]
    fn nocc_matches_tree_walk(seed in any::<u64>()) {
        let g = random_grammar(&mut rng(seed), 1000);
        prop_assert_eq!(compute_nocc(&g), brute_force_nocc(&g));
    }
}

#[test]
fn long_runs_use_overflow() {
    // Exponents beyond 255 go through the overflow list.
    let text: Vec<u8> = [b"a".repeat(300), b"b".repeat(1000), b"a".repeat(300), b"c".repeat(70_000)].concat();
    let g = Grammar::bytes(vec![Rule::Sequence(text.iter().map(|&c| SymbolId::terminal(c)).collect())]);
    for strategy in Partitioning::ALL {
        let r = recompress(&g, strategy, 7).unwrap();
        assert_eq!(r.rlslp.expand().unwrap(), text);
        let exps: Vec<u64> = r
            .rlslp
            .rules
            .iter()
            .filter_map(|r| match r {
                Rule::Run { exponent, .. } => Some(*exponent),
                _ => None,
            })
            .collect();
        assert!(exps.contains(&300) && exps.contains(&1000) && exps.contains(&70_000), "{exps:?}");
    }
}

#[test]
fn single_symbol_text() {
    let g = Grammar::bytes(vec![Rule::Sequence(vec![SymbolId::terminal(b'q')])]);
    let r = recompress(&g, Partitioning::Deterministic, 0).unwrap();
    assert_eq!(r.rlslp.expand().unwrap(), b"q");
    assert_eq!(r.telemetry.rounds(), 0);
}

#[test]
fn rejects_bad_input() {
    let t = SymbolId::terminal;
    let runs = Grammar::bytes(vec![Rule::Run { base: t(b'a'), exponent: 3 }]);
    assert!(matches!(recompress(&runs, Partitioning::Mixed, 0), Err(RecompressionError::RunRuleInInput(_))));
    assert!(recompress(&Grammar::bytes(vec![]), Partitioning::Mixed, 0).is_err());
    let dangling = Grammar::bytes(vec![Rule::pair(t(b'a'), SymbolId::rule(5))]);
    assert!(recompress(&dangling, Partitioning::Mixed, 0).is_err());
}

#[test]
fn injected_partitions_run_out() {
    use std::collections::VecDeque;
    use recomp::recompression::PartitionSource;
    let text = fibonacci_text(500);
    let g = Grammar::bytes(vec![Rule::Sequence(text.iter().map(|&c| SymbolId::terminal(c)).collect())]);
    let err = Recompressor::new(PartitionSource::Injected(VecDeque::new())).run(&g).unwrap_err();
    assert!(matches!(err, RecompressionError::PartitionsExhausted(_)), "{err}");
}

#[test]
fn telemetry_tsv_lines() {
    let text = fibonacci_text(4000);
    let r = recompress_naive(&text, Partitioning::Mixed, 1).unwrap();
    let tsv = r.telemetry.to_tsv();
    let mut lines = tsv.lines();
    assert_eq!(lines.next(), Some("round\tphase\tmetric\tvalue"));
    for l in lines {
        let f: Vec<&str> = l.split('\t').collect();
        assert_eq!(f.len(), 4, "{l}");
        assert!(f[0].parse::<usize>().is_ok() && (f[1] == "bcomp" || f[1] == "pcomp"), "{l}");
    }
}
