//! Corpus generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use recomp::convert::{lz_to_slg, prune_slp, slg_to_slp};
use recomp::grammar::{Grammar, Rule, SymbolId};
use recomp::lz::parse_bentley_mcilroy;
use recomp::pipeline::gen_dataset;
use recomp::recompression::reference::recompress_string;
use recomp::recompression::{
    LevelGrammar, Phase, PartitionKind, PartitionSource, PhaseRecord, Recompressor, Strategy, Telemetry, TraceOptions,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform text over the first `sigma` byte values (`sigma` = 256 for all).
pub fn random_text(rng: &mut impl Rng, n: usize, sigma: u16) -> Vec<u8> {
    (0..n).map(|_| rng.random_range(0..sigma) as u8).collect()
}

/// Concatenated runs `c^k` with long exponents, so run counts pass 255.
pub fn runs_text(rng: &mut impl Rng, n: usize) -> Vec<u8> {
    let mut t = Vec::with_capacity(n);
    while t.len() < n {
        let c = rng.random_range(b'a'..=b'c');
        let k = rng.random_range(1..=600).min(n - t.len());
        t.extend(std::iter::repeat_n(c, k));
    }
    t
}

/// Duplicated random base with mutations.
pub fn repetitive_text(rng: &mut impl Rng, n: usize) -> Vec<u8> {
    let base_len = rng.random_range(1..=n.clamp(1, 64));
    let sigma = rng.random_range(1..=4);
    let base = random_text(rng, base_len, sigma);
    let rate = [0.0, 1e-3, 1e-2, 0.1][rng.random_range(0..4)];
    gen_dataset(&base, n as u64, rate, rng.random()).unwrap()
}

pub fn fibonacci_text(n: usize) -> Vec<u8> {
    let (mut a, mut b) = (b"a".to_vec(), b"ab".to_vec());
    while b.len() < n {
        let next = [b.clone(), a].concat();
        a = b;
        b = next;
    }
    b.truncate(n);
    b
}

/// Text of length `1..=max_n` from one of several families.
pub fn corpus_text(rng: &mut impl Rng, max_n: usize) -> Vec<u8> {
    let n = rng.random_range(1..=max_n);
    match rng.random_range(0..6) {
        0 => {
            let sigma = [1, 2, 3, 4, 256][rng.random_range(0..5)];
            random_text(rng, n, sigma)
        }
        1 => runs_text(rng, n),
        2 => fibonacci_text(n),
        _ => repetitive_text(rng, n),
    }
}

/// A grammar for `text` built in one of several ways, so the compressed
/// engine sees pruned SLPs, unpruned SLPs, n-ary SLGs and flat rules.
pub fn corpus_grammar(rng: &mut impl Rng, text: &[u8]) -> Grammar {
    let b = rng.random_range(2..=64);
    let slg = lz_to_slg(&parse_bentley_mcilroy(text, b)).unwrap();
    match rng.random_range(0..5) {
        0 => slg,
        1 => slg_to_slp(&slg),
        2 => Grammar::bytes(vec![Rule::Sequence(text.iter().map(|&c| SymbolId::terminal(c)).collect())]),
        3 => chunked_grammar(rng, text),
        _ => prune_slp(&slg_to_slp(&slg)),
    }
}

/// Random n-ary grammar: the text cut into pieces, identical pieces shared,
/// then the piece sequence cut again.
pub fn chunked_grammar(rng: &mut impl Rng, text: &[u8]) -> Grammar {
    let mut rules: Vec<Rule> = Vec::new();
    let mut level: Vec<SymbolId> = text.iter().map(|&c| SymbolId::terminal(c)).collect();
    while level.len() > 1 {
        let mut next = Vec::new();
        let mut i = 0;
        while i < level.len() {
            let k = rng.random_range(1..=4).min(level.len() - i);
            let rhs = level[i..i + k].to_vec();
            let existing = rules.iter().position(|r| *r == Rule::Sequence(rhs.clone()));
            let id = existing.unwrap_or_else(|| {
                rules.push(Rule::Sequence(rhs));
                rules.len() - 1
            });
            next.push(SymbolId::rule(id));
            i += k;
        }
        level = next;
    }
    if rules.is_empty() || level[0] != SymbolId::rule(rules.len() - 1) {
        rules.push(Rule::Sequence(level));
    }
    Grammar::bytes(rules)
}

/// Random SLG or RLSLP whose derivation tree has at most `max_nodes` nodes.
pub fn random_grammar(rng: &mut impl Rng, max_nodes: u64) -> Grammar {
    loop {
        let r = rng.random_range(1..=30);
        let mut rules = Vec::with_capacity(r);
        fn pick(rng: &mut impl Rng, i: usize) -> SymbolId {
            if i > 0 && rng.random_bool(0.6) {
                SymbolId::rule(rng.random_range(0..i))
            } else {
                SymbolId::terminal(rng.random_range(b'a'..=b'd'))
            }
        }
        for i in 0..r {
            if rng.random_bool(0.15) {
                rules.push(Rule::Run { base: pick(rng, i), exponent: rng.random_range(2..=5) });
            } else {
                let k = rng.random_range(1..=4);
                rules.push(Rule::Sequence((0..k).map(|_| pick(rng, i)).collect()));
            }
        }
        let g = Grammar::bytes(rules);
        if tree_nodes(&g) <= max_nodes {
            return g;
        }
    }
}

/// Number of nonterminal nodes in the derivation tree of the start rule,
/// counted without memoization (a run rule `X^d` has `d` children).
pub fn tree_nodes(g: &Grammar) -> u64 {
    let mut memo = vec![None::<u64>; g.rules.len()];
    fn go(g: &Grammar, i: usize, memo: &mut Vec<Option<u64>>) -> u64 {
        if let Some(v) = memo[i] {
            return v;
        }
        let child = |s: SymbolId, memo: &mut Vec<Option<u64>>| s.rule_index().map_or(0, |c| go(g, c, memo));
        let v = 1u64.saturating_add(match &g.rules[i] {
            Rule::Sequence(rhs) => rhs.iter().fold(0u64, |acc, &s| acc.saturating_add(child(s, memo))),
            Rule::Run { base, exponent } => exponent.saturating_mul(child(*base, memo)),
        });
        memo[i] = Some(v);
        v
    }
    go(g, g.rules.len() - 1, &mut memo)
}

/// Occurrences of each rule found by walking the whole derivation tree.
pub fn brute_force_nocc(g: &Grammar) -> Vec<u64> {
    let mut occ = vec![0u64; g.rules.len()];
    let mut stack = vec![g.rules.len() - 1];
    while let Some(i) = stack.pop() {
        occ[i] += 1;
        match &g.rules[i] {
            Rule::Sequence(rhs) => stack.extend(rhs.iter().filter_map(|s| s.rule_index())),
            Rule::Run { base, exponent } => {
                if let Some(c) = base.rule_index() {
                    stack.extend(std::iter::repeat_n(c, *exponent as usize));
                }
            }
        }
    }
    occ
}

/// One recorded phase of the compressed engine.
pub struct ObservedPhase {
    pub record: PhaseRecord,
    pub level: Vec<SymbolId>,
}

/// Outcome of running both engines on one text under the same partitions.
pub struct LockStep {
    pub reference_levels: Vec<(Phase, Vec<SymbolId>)>,
    pub compressed: Vec<ObservedPhase>,
    pub reference_telemetry: Telemetry,
    pub compressed_telemetry: Telemetry,
    pub reference_rlslp: Grammar,
    pub compressed_rlslp: Grammar,
}

impl LockStep {
    /// First phase at which the level strings differ, if any.
    pub fn first_divergence(&self) -> Option<usize> {
        if self.reference_levels.len() != self.compressed.len() {
            return Some(self.reference_levels.len().min(self.compressed.len()));
        }
        self.reference_levels
            .iter()
            .zip(&self.compressed)
            .position(|((ph, lv), obs)| *ph != obs.record.phase || *lv != obs.level)
    }

    /// Every level string after a BComp phase, from both engines.
    pub fn bcomp_levels(&self) -> impl Iterator<Item = &[SymbolId]> {
        let r = self.reference_levels.iter().filter(|(p, _)| *p == Phase::BComp).map(|(_, l)| &l[..]);
        let c = self.compressed.iter().filter(|o| o.record.phase == Phase::BComp).map(|o| &o.level[..]);
        r.chain(c)
    }
}

/// Runs the reference on `text` with `strategy`, then the compressed engine
/// on `g` with the reference's partitions injected.
pub fn lock_step(text: &[u8], g: &Grammar, strategy: Strategy, seed: u64) -> LockStep {
    let reference = recompress_string(
        text,
        PartitionSource::Strategy { strategy, seed },
        TraceOptions { keep_levels: true, keep_partitions: true },
    )
    .unwrap();
    let partitions: VecDeque<_> = reference.partitions().into();
    let mut observed = Vec::new();
    let compressed = Recompressor::new(PartitionSource::Injected(partitions))
        .observe(|rec: &PhaseRecord, lg: &LevelGrammar| {
            observed.push(ObservedPhase { record: rec.clone(), level: lg.level_string() })
        })
        .run(g)
        .unwrap();
    LockStep {
        reference_levels: reference.trace.iter().map(|e| (e.phase, e.level.clone().unwrap())).collect(),
        compressed: observed,
        reference_telemetry: reference.telemetry,
        compressed_telemetry: compressed.telemetry,
        reference_rlslp: reference.rlslp,
        compressed_rlslp: compressed.rlslp,
    }
}

/// Deterministic PComp rounds as `(replaced, total)` pair weights.
pub fn deterministic_rounds(t: &Telemetry) -> impl Iterator<Item = (u64, u64)> + '_ {
    t.records
        .iter()
        .filter(|r| r.partition == Some(PartitionKind::Deterministic))
        .map(|r| (r.pair_weight_replaced, r.pair_weight_total))
}

pub fn has_equal_neighbours(s: &[SymbolId]) -> bool {
    s.windows(2).any(|w| w[0] == w[1])
}

pub fn round_bound(n: usize) -> f64 {
    8.0 * (n as f64).log2() + 8.0
}
