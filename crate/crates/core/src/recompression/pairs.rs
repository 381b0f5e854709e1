//! Occurrence counts and adjacent-pair frequencies of a level grammar.

use rustc_hash::FxHashMap;

use crate::grammar::{Grammar, Rule, SymbolId};

use super::level::{LevelGrammar, Sym};

/// Parent lists of every rule in CSR form: `parents(c)` yields `(p, m)` when
/// rule `p` refers to `c` exactly `m` times (run exponents included).
#[derive(Clone, Debug)]
pub struct ReverseGraph {
    offsets: Vec<usize>,
    edges: Vec<(u32, u64)>,
}

impl ReverseGraph {
    /// `children(i, out)` appends `(child, multiplicity)` pairs of rule `i`;
    /// repeated children are merged.
    pub fn build(num_rules: usize, mut children: impl FnMut(usize, &mut Vec<(usize, u64)>)) -> Self {
        let mut per_rule: Vec<(usize, u64)> = Vec::new();
        let mut forward: Vec<(u32, u32, u64)> = Vec::new();
        let mut degree = vec![0usize; num_rules + 1];
        for p in 0..num_rules {
            per_rule.clear();
            children(p, &mut per_rule);
            per_rule.sort_unstable_by_key(|&(c, _)| c);
            let mut k = 0;
            while k < per_rule.len() {
                let c = per_rule[k].0;
                let mut m = 0;
                while k < per_rule.len() && per_rule[k].0 == c {
                    m += per_rule[k].1;
                    k += 1;
                }
                forward.push((c as u32, p as u32, m));
                degree[c + 1] += 1;
            }
        }
        for i in 0..num_rules {
            degree[i + 1] += degree[i];
        }
        let mut fill = degree.clone();
        let mut edges = vec![(0u32, 0u64); forward.len()];
        for (c, p, m) in forward {
            edges[fill[c as usize]] = (p, m);
            fill[c as usize] += 1;
        }
        ReverseGraph { offsets: degree, edges }
    }

    pub fn parents(&self, c: usize) -> &[(u32, u64)] {
        &self.edges[self.offsets[c]..self.offsets[c + 1]]
    }

    /// Number of occurrences of each rule in the derivation tree of the last
    /// rule. Every parent has a larger index than its children.
    pub fn occurrences(&self) -> Vec<u64> {
        let n = self.offsets.len() - 1;
        let mut occ = vec![0u64; n];
        if n == 0 {
            return occ;
        }
        occ[n - 1] = 1;
        for c in (0..n - 1).rev() {
            occ[c] = self
                .parents(c)
                .iter()
                .map(|&(p, m)| occ[p as usize].saturating_mul(m))
                .fold(0u64, u64::saturating_add);
        }
        occ
    }
}

/// `nOcc` of every rule of an SLG or RLSLP.
pub fn compute_nocc(g: &Grammar) -> Vec<u64> {
    ReverseGraph::build(g.rules.len(), |i, out| match &g.rules[i] {
        Rule::Sequence(rhs) => out.extend(rhs.iter().filter_map(|s| s.rule_index()).map(|c| (c, 1))),
        Rule::Run { base, exponent } => out.extend(base.rule_index().map(|c| (c, *exponent))),
    })
    .occurrences()
}

/// `nOcc` of every rule of a level grammar.
pub fn level_nocc(g: &LevelGrammar) -> Vec<u64> {
    ReverseGraph::build(g.num_rules(), |i, out| {
        out.extend(g.rule(i).iter().filter_map(|s| match *s {
            Sym::Rule(c) => Some((c as usize, 1)),
            _ => None,
        }))
    })
    .occurrences()
}

/// First and last level symbol of every rule.
pub fn boundary_symbols(g: &LevelGrammar) -> (Vec<SymbolId>, Vec<SymbolId>) {
    let r = g.num_rules();
    let mut lms = Vec::with_capacity(r);
    let mut rms = Vec::with_capacity(r);
    for i in 0..r {
        let rhs = g.rule(i);
        let first = match rhs[0] {
            Sym::Level(x) => x,
            Sym::Rule(c) => lms[c as usize],
            Sym::Fresh(_) => unreachable!("fresh symbol in level grammar"),
        };
        let last = match rhs[rhs.len() - 1] {
            Sym::Level(x) => x,
            Sym::Rule(c) => rms[c as usize],
            Sym::Fresh(_) => unreachable!("fresh symbol in level grammar"),
        };
        lms.push(first);
        rms.push(last);
    }
    (lms, rms)
}

/// Frequencies of adjacent pairs `ab`, `a ≠ b`, in the level string.
///
/// Pairs are normalized so that the first component has the larger
/// [`SymbolId::order_key`]: `ab` with `a ≻ b` counts towards `direct[(a,
/// b)]` and `ab` with `a ≺ b` towards `swapped[(b, a)]`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PairMaps {
    pub direct: FxHashMap<(SymbolId, SymbolId), u64>,
    pub swapped: FxHashMap<(SymbolId, SymbolId), u64>,
}

impl PairMaps {
    pub fn add(&mut self, a: SymbolId, b: SymbolId, weight: u64) {
        if a == b || weight == 0 {
            return;
        }
        if a.order_key() > b.order_key() {
            *self.direct.entry((a, b)).or_default() += weight;
        } else {
            *self.swapped.entry((b, a)).or_default() += weight;
        }
    }

    /// Pairs in text orientation with their frequencies.
    pub fn directed(&self) -> impl Iterator<Item = ((SymbolId, SymbolId), u64)> + '_ {
        self.direct
            .iter()
            .map(|(&k, &w)| (k, w))
            .chain(self.swapped.iter().map(|(&(a, b), &w)| ((b, a), w)))
    }

    pub fn total_weight(&self) -> u64 {
        self.directed().map(|(_, w)| w).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.direct.is_empty() && self.swapped.is_empty()
    }

    /// Frequencies counted directly over a string.
    pub fn from_string(s: &[SymbolId]) -> Self {
        let mut m = PairMaps::default();
        for w in s.windows(2) {
            m.add(w[0], w[1], 1);
        }
        m
    }
}

/// Pair frequencies of the level string of `g`, weighting every boundary
/// between neighbouring right-hand-side entries by the rule's `nOcc`.
pub fn collect_pair_frequencies(g: &LevelGrammar) -> PairMaps {
    let occ = level_nocc(g);
    let (lms, rms) = boundary_symbols(g);
    let first = |s: Sym| match s {
        Sym::Level(x) => x,
        Sym::Rule(c) => lms[c as usize],
        Sym::Fresh(_) => unreachable!(),
    };
    let last = |s: Sym| match s {
        Sym::Level(x) => x,
        Sym::Rule(c) => rms[c as usize],
        Sym::Fresh(_) => unreachable!(),
    };
    let mut maps = PairMaps::default();
    for (i, &k) in occ.iter().enumerate() {
        if k == 0 {
            continue;
        }
        for w in g.rule(i).windows(2) {
            maps.add(last(w[0]), first(w[1]), k);
        }
    }
    maps
}
