use rustc_hash::FxHashMap;

use crate::grammar::{Grammar, Rule, SymbolId};

/// Accumulates the output RLSLP across rounds and hands out fresh symbols.
///
/// Within one phase the fresh symbols are numbered in a canonical order of
/// their keys (run keys by `(base, exponent)`, pair keys by `(left,
/// right)`, symbols compared by [`SymbolId::order_key`]). Both engines
/// therefore produce the same symbol for the same key regardless of the
/// order in which they discover it.
#[derive(Clone, Debug)]
pub struct RlslpBuilder {
    alphabet_size: u64,
    rules: Vec<Rule>,
    /// Run key → rule symbol; spans all rounds.
    blocks: FxHashMap<(SymbolId, u64), SymbolId>,
}

impl RlslpBuilder {
    pub fn new(alphabet_size: u64) -> Self {
        RlslpBuilder { alphabet_size, rules: Vec::new(), blocks: FxHashMap::default() }
    }

    pub fn rule_count(&self) -> usize {
        self.rules.len()
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// Symbol of the run rule `X → X^d`, if one exists.
    pub fn block_symbol(&self, base: SymbolId, exponent: u64) -> Option<SymbolId> {
        self.blocks.get(&(base, exponent)).copied()
    }

    /// Names run keys `(X, d)`, `d ≥ 2`; the result is parallel to `keys`.
    pub fn name_runs(&mut self, keys: &[(SymbolId, u64)]) -> Vec<SymbolId> {
        let mut order: Vec<usize> = (0..keys.len()).collect();
        order.sort_unstable_by_key(|&i| (keys[i].0.order_key(), keys[i].1));
        let mut out = vec![SymbolId(0); keys.len()];
        for i in order {
            let (base, exponent) = keys[i];
            debug_assert!(exponent >= 2);
            out[i] = match self.blocks.get(&(base, exponent)) {
                Some(&s) => s,
                None => {
                    self.rules.push(Rule::Run { base, exponent });
                    let s = SymbolId::rule(self.rules.len() - 1);
                    self.blocks.insert((base, exponent), s);
                    s
                }
            };
        }
        out
    }

    /// Names distinct pair keys `(a, b)`; the result is parallel to `keys`.
    pub fn name_pairs(&mut self, keys: &[(SymbolId, SymbolId)]) -> Vec<SymbolId> {
        let mut order: Vec<usize> = (0..keys.len()).collect();
        order.sort_unstable_by_key(|&i| (keys[i].0.order_key(), keys[i].1.order_key()));
        let mut out = vec![SymbolId(0); keys.len()];
        for i in order {
            let (a, b) = keys[i];
            self.rules.push(Rule::pair(a, b));
            out[i] = SymbolId::rule(self.rules.len() - 1);
        }
        out
    }

    /// Closes the grammar so that `last` is its start symbol.
    pub fn finish(mut self, last: SymbolId) -> Grammar {
        if last != SymbolId::rule(self.rules.len().wrapping_sub(1)) || self.rules.is_empty() {
            self.rules.push(Rule::Sequence(vec![last]));
        }
        Grammar::new(self.alphabet_size, self.rules)
    }
}

/// Insertion-ordered key collection used while a phase is in progress.
#[derive(Debug)]
pub(crate) struct KeyIndex<K> {
    index: FxHashMap<K, u32>,
    keys: Vec<K>,
}

impl<K: Copy + Eq + std::hash::Hash> KeyIndex<K> {
    pub(crate) fn new() -> Self {
        KeyIndex { index: FxHashMap::default(), keys: Vec::new() }
    }

    pub(crate) fn slot(&mut self, key: K) -> u32 {
        let next = self.keys.len() as u32;
        *self.index.entry(key).or_insert_with(|| {
            self.keys.push(key);
            next
        })
    }

    pub(crate) fn keys(&self) -> &[K] {
        &self.keys
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(c: u8) -> SymbolId {
        SymbolId::terminal(c)
    }

    #[test]
    fn canonical_naming_ignores_discovery_order() {
        let mut a = RlslpBuilder::new(256);
        let mut b = RlslpBuilder::new(256);
        let keys = [(t(b'b'), 3), (t(b'a'), 2), (t(b'a'), 5)];
        let mut rev = keys;
        rev.reverse();
        let na = a.name_runs(&keys);
        let mut nb = b.name_runs(&rev);
        nb.reverse();
        assert_eq!(na, nb);
        assert_eq!(a.rules(), b.rules());
        assert_eq!(na, vec![SymbolId(3), SymbolId(1), SymbolId(2)]);
    }

    #[test]
    fn run_rules_are_reused() {
        let mut a = RlslpBuilder::new(256);
        let first = a.name_runs(&[(t(b'a'), 4)]);
        let again = a.name_runs(&[(t(b'a'), 4)]);
        assert_eq!(first, again);
        assert_eq!(a.rule_count(), 1);
        assert_eq!(a.block_symbol(t(b'a'), 4), Some(SymbolId(1)));
    }

    #[test]
    fn finish_single_terminal() {
        let g = RlslpBuilder::new(256).finish(t(b'z'));
        assert_eq!(g.rules, vec![Rule::Sequence(vec![t(b'z')])]);
        let mut b = RlslpBuilder::new(256);
        let p = b.name_pairs(&[(t(b'a'), t(b'b'))]);
        let g = b.finish(p[0]);
        assert_eq!(g.len(), 1);
        assert_eq!(g.expand().unwrap(), b"ab");
    }
}
