//! Factorization → SLG → SLP → pruned SLP.

mod avl;
mod prune;

pub use avl::lz_to_slg;
pub use prune::prune_slp;

use crate::grammar::{Grammar, Rule, SymbolId};

/// Replaces every sequence rule with more than two symbols by a left comb of
/// binary rules. Rules are renumbered; the start symbol stays last.
pub fn slg_to_slp(g: &Grammar) -> Grammar {
    let mut new_index: Vec<SymbolId> = Vec::with_capacity(g.rules.len());
    let mut rules: Vec<Rule> = Vec::with_capacity(g.rules.len());
    let map = |s: SymbolId, new_index: &[SymbolId]| match s.rule_index() {
        Some(i) => new_index[i],
        None => s,
    };
    for rule in &g.rules {
        match rule {
            Rule::Sequence(rhs) if rhs.len() > 2 => {
                let mut acc = map(rhs[0], &new_index);
                for &s in &rhs[1..] {
                    rules.push(Rule::pair(acc, map(s, &new_index)));
                    acc = SymbolId::rule(rules.len() - 1);
                }
            }
            Rule::Sequence(rhs) => {
                rules.push(Rule::Sequence(rhs.iter().map(|&s| map(s, &new_index)).collect()))
            }
            Rule::Run { base, exponent } => {
                rules.push(Rule::Run { base: map(*base, &new_index), exponent: *exponent })
            }
        }
        new_index.push(SymbolId::rule(rules.len() - 1));
    }
    Grammar::new(g.alphabet_size, rules)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lz::parse_bentley_mcilroy;

    fn t(c: u8) -> SymbolId {
        SymbolId::terminal(c)
    }

    #[test]
    fn left_comb() {
        let g = Grammar::bytes(vec![Rule::Sequence(vec![t(b'a'), t(b'b'), t(b'c'), t(b'd')])]);
        let slp = slg_to_slp(&g);
        assert_eq!(slp.len(), 3);
        assert_eq!(slp.rules[0], Rule::pair(t(b'a'), t(b'b')));
        assert_eq!(slp.rules[1], Rule::pair(SymbolId(1), t(b'c')));
        assert_eq!(slp.rules[2], Rule::pair(SymbolId(2), t(b'd')));
        assert_eq!(slp.expand().unwrap(), b"abcd");
    }

    #[test]
    fn binary_input_unchanged() {
        let g = Grammar::bytes(vec![
            Rule::pair(t(b'a'), t(b'b')),
            Rule::pair(SymbolId(1), SymbolId(1)),
        ]);
        assert_eq!(slg_to_slp(&g), g);
    }

    #[test]
    fn renumbers_references() {
        let g = Grammar::bytes(vec![
            Rule::Sequence(vec![t(b'x'), t(b'y'), t(b'z')]),
            Rule::Sequence(vec![SymbolId(1), t(b'-'), SymbolId(1), SymbolId(1)]),
        ]);
        let slp = slg_to_slp(&g);
        assert!(slp.validate().is_ok());
        assert!(slp.rules.iter().all(|r| r.symbols().len() <= 2));
        assert_eq!(slp.expand().unwrap(), b"xyz-xyzxyz");
    }

    #[test]
    fn pipeline_grammars_keep_expansion() {
        let text: Vec<u8> = b"abracadabra".iter().cycle().take(3000).copied().collect();
        let slg = lz_to_slg(&parse_bentley_mcilroy(&text, 4)).unwrap();
        let slp = slg_to_slp(&slg);
        assert_eq!(slp.expand().unwrap(), text);
    }
}
