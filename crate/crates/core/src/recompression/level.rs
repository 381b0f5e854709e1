use crate::grammar::{Grammar, Rule, SymbolId};

use super::RecompressionError;

/// Right-hand-side entry of a level grammar.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sym {
    /// A symbol of the current level string (an RLSLP terminal or rule).
    Level(SymbolId),
    /// Reference to an earlier rule of the level grammar (0-based).
    Rule(u32),
    /// Fresh symbol of the phase in progress, named when the phase ends.
    Fresh(u32),
}

/// The working grammar of one round, stored as a flat rule array.
///
/// Its expansion over level symbols is the current level string; the last
/// rule is the start. Every rule is reachable from the start.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LevelGrammar {
    offsets: Vec<usize>,
    rhs: Vec<Sym>,
}

impl LevelGrammar {
    pub fn new() -> Self {
        LevelGrammar { offsets: vec![0], rhs: Vec::new() }
    }

    /// Level grammar of an SLG; terminals become level symbols and rules
    /// not reachable from the start are dropped.
    pub fn from_grammar(g: &Grammar) -> Result<Self, RecompressionError> {
        g.validate().map_err(crate::grammar::GrammarError::from)?;
        let last = g.rules.len().checked_sub(1).ok_or(RecompressionError::EmptyInput)?;
        let mut reachable = vec![false; g.rules.len()];
        reachable[last] = true;
        for i in (0..=last).rev() {
            if !reachable[i] {
                continue;
            }
            match &g.rules[i] {
                Rule::Sequence(rhs) => {
                    for c in rhs.iter().filter_map(|s| s.rule_index()) {
                        reachable[c] = true;
                    }
                }
                Rule::Run { .. } => return Err(RecompressionError::RunRuleInInput(i + 1)),
            }
        }
        let mut new_id = vec![u32::MAX; g.rules.len()];
        let mut out = LevelGrammar::new();
        for i in 0..=last {
            if let (true, Rule::Sequence(rhs)) = (reachable[i], &g.rules[i]) {
                new_id[i] = out.num_rules() as u32;
                out.push_rule(rhs.iter().map(|&s| match s.rule_index() {
                    Some(c) => Sym::Rule(new_id[c]),
                    None => Sym::Level(s),
                }));
            }
        }
        Ok(out)
    }

    pub fn num_rules(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Total number of right-hand-side entries.
    pub fn size(&self) -> usize {
        self.rhs.len()
    }

    pub fn rule(&self, i: usize) -> &[Sym] {
        &self.rhs[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn push_rule(&mut self, syms: impl IntoIterator<Item = Sym>) {
        self.rhs.extend(syms);
        self.offsets.push(self.rhs.len());
    }

    pub fn last_rule(&self) -> usize {
        self.num_rules() - 1
    }

    /// Replaces every `Fresh(k)` by `Level(names[k])`.
    pub(crate) fn resolve(&mut self, names: &[SymbolId]) {
        for s in &mut self.rhs {
            if let Sym::Fresh(k) = *s {
                *s = Sym::Level(names[k as usize]);
            }
        }
    }

    /// Level-string length of every rule.
    pub fn lengths(&self) -> Vec<u64> {
        let mut len = Vec::with_capacity(self.num_rules());
        for i in 0..self.num_rules() {
            let l = self
                .rule(i)
                .iter()
                .map(|s| match *s {
                    Sym::Rule(c) => len[c as usize],
                    _ => 1,
                })
                .sum::<u64>();
            len.push(l);
        }
        len
    }

    pub fn level_len(&self) -> u64 {
        self.lengths().last().copied().unwrap_or(0)
    }

    /// Expands the level string. Meant for oracles and small inputs.
    pub fn level_string(&self) -> Vec<SymbolId> {
        let mut out = Vec::new();
        if self.num_rules() == 0 {
            return out;
        }
        let mut stack = vec![(self.last_rule(), 0usize)];
        while let Some(top) = stack.last_mut() {
            let (r, pos) = *top;
            match self.rule(r).get(pos) {
                None => {
                    stack.pop();
                }
                Some(&s) => {
                    top.1 += 1;
                    match s {
                        Sym::Level(x) => out.push(x),
                        Sym::Rule(c) => stack.push((c as usize, 0)),
                        Sym::Fresh(_) => panic!("unresolved fresh symbol"),
                    }
                }
            }
        }
        out
    }

    /// The single level symbol, once the level string has length 1.
    pub fn single_symbol(&self) -> Option<SymbolId> {
        let mut r = self.last_rule();
        loop {
            match self.rule(r) {
                [Sym::Level(x)] => return Some(*x),
                [Sym::Rule(c)] => r = *c as usize,
                _ => return None,
            }
        }
    }
}
