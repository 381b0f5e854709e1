//! Pair compression on the level grammar.

use crate::grammar::SymbolId;

use super::level::{LevelGrammar, Sym};
use super::partition::Partition;
use super::rlslp::{KeyIndex, RlslpBuilder};

#[derive(Clone, Copy, Debug)]
enum Item {
    Loose(SymbolId),
    Cap(Sym),
}

/// Replaces every occurrence of a pair `ab` with `a ∈ Σ_L`, `b ∈ Σ_R` by a
/// fresh symbol and returns the next level grammar.
///
/// Each rule `A` is rewritten as `LB(A) · cap(A) · RB(A)`, where `LB(A)` is
/// its first symbol if that is a right symbol, `RB(A)` its last symbol if
/// that is a left symbol, and the cap is the compressed remainder. The
/// popped symbols are the only ones that may pair across rule boundaries.
pub fn pcomp(g: &LevelGrammar, part: &Partition, acc: &mut RlslpBuilder) -> LevelGrammar {
    let r = g.num_rules();
    let mut lb: Vec<Option<SymbolId>> = Vec::with_capacity(r);
    let mut rb: Vec<Option<SymbolId>> = Vec::with_capacity(r);
    let mut cap_of: Vec<Option<Sym>> = Vec::with_capacity(r);
    let mut keys: KeyIndex<(SymbolId, SymbolId)> = KeyIndex::new();
    let mut out = LevelGrammar::new();
    let mut items: Vec<Item> = Vec::new();
    // (symbol, came from a loose level symbol)
    let mut merged: Vec<(Sym, bool)> = Vec::new();

    for i in 0..r {
        items.clear();
        for &s in g.rule(i) {
            match s {
                Sym::Level(x) => items.push(Item::Loose(x)),
                Sym::Rule(c) => {
                    let c = c as usize;
                    items.extend(lb[c].map(Item::Loose));
                    items.extend(cap_of[c].map(Item::Cap));
                    items.extend(rb[c].map(Item::Loose));
                }
                Sym::Fresh(_) => unreachable!("fresh symbol in input level grammar"),
            }
        }

        merged.clear();
        let mut k = 0;
        while k < items.len() {
            match (items[k], items.get(k + 1)) {
                (Item::Loose(a), Some(&Item::Loose(b))) if part.crosses(a, b) => {
                    merged.push((Sym::Fresh(keys.slot((a, b))), false));
                    k += 2;
                }
                (Item::Loose(a), _) => {
                    merged.push((Sym::Level(a), true));
                    k += 1;
                }
                (Item::Cap(s), _) => {
                    merged.push((s, false));
                    k += 1;
                }
            }
        }

        let mut body = &merged[..];
        let mut left = None;
        let mut right = None;
        if let Some(&(Sym::Level(x), true)) = body.first() {
            if !part.is_left(x) {
                left = Some(x);
                body = &body[1..];
            }
        }
        if let Some(&(Sym::Level(y), true)) = body.last() {
            if part.is_left(y) {
                right = Some(y);
                body = &body[..body.len() - 1];
            }
        }
        lb.push(left);
        rb.push(right);
        cap_of.push(match body {
            [] => None,
            [(s, _)] => Some(*s),
            _ => {
                out.push_rule(body.iter().map(|&(s, _)| s));
                Some(Sym::Rule(out.num_rules() as u32 - 1))
            }
        });
    }

    let s = r - 1;
    let wrapper: Vec<Sym> = lb[s]
        .map(Sym::Level)
        .into_iter()
        .chain(cap_of[s])
        .chain(rb[s].map(Sym::Level))
        .collect();
    let last = out.num_rules().checked_sub(1).map(|l| Sym::Rule(l as u32));
    if wrapper.len() != 1 || Some(wrapper[0]) != last {
        out.push_rule(wrapper);
    }

    let names = acc.name_pairs(keys.keys());
    out.resolve(&names);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{Grammar, Rule};
    use crate::recompression::reference::pcomp_string;

    fn t(c: u8) -> SymbolId {
        SymbolId::terminal(c)
    }

    #[test]
    fn pairs_across_rule_boundaries() {
        // A → a b, S → A A A b
        let g = Grammar::bytes(vec![
            Rule::pair(t(b'a'), t(b'b')),
            Rule::Sequence(vec![SymbolId(1), SymbolId(1), SymbolId(1), t(b'b')]),
        ]);
        let lg = LevelGrammar::from_grammar(&g).unwrap();
        let text: Vec<SymbolId> = b"abababb".iter().map(|&c| t(c)).collect();
        for left in [vec![t(b'a')], vec![t(b'b')]] {
            let part = Partition::from_left(left);
            let mut a = RlslpBuilder::new(256);
            let mut b = RlslpBuilder::new(256);
            let next = pcomp(&lg, &part, &mut a);
            assert_eq!(next.level_string(), pcomp_string(&text, &part, &mut b));
            assert_eq!(a.rules(), b.rules());
        }
    }

    #[test]
    fn single_pair_collapses_to_one_symbol() {
        let g = Grammar::bytes(vec![Rule::pair(t(b'x'), t(b'y'))]);
        let lg = LevelGrammar::from_grammar(&g).unwrap();
        let mut acc = RlslpBuilder::new(256);
        let next = pcomp(&lg, &Partition::from_left([t(b'x')]), &mut acc);
        assert_eq!(next.level_string(), vec![SymbolId(1)]);
        assert_eq!(next.single_symbol(), Some(SymbolId(1)));
        let next = pcomp(&lg, &Partition::from_left([t(b'y')]), &mut acc);
        assert_eq!(next.level_string(), vec![t(b'x'), t(b'y')]);
    }
}
