//! Block compression on the level grammar.

use crate::grammar::SymbolId;

use super::level::{LevelGrammar, Sym};
use super::rlslp::{KeyIndex, RlslpBuilder};
use super::runs::{RunTable, RunTables};

#[derive(Clone, Copy, Debug)]
enum Item {
    Block(SymbolId, u64),
    Cap(Sym),
}

fn push_block(items: &mut Vec<Item>, x: SymbolId, d: u64) {
    if let Some(Item::Block(y, e)) = items.last_mut() {
        if *y == x {
            *e += d;
            return;
        }
    }
    items.push(Item::Block(x, d));
}

/// Replaces every maximal run `X^d`, `d ≥ 2`, of the level string by a run
/// symbol and returns the next level grammar.
///
/// Each rule `A` is rewritten as `LR(A) · cap(A) · RR(A)` where `LR` and
/// `RR` are its outermost maximal runs and the cap holds what lies between
/// them with all runs already replaced. Caps of length 0 or 1 are inlined
/// into the parents; longer caps become rules. A wrapper around the start
/// restores the outer runs.
pub fn bcomp(g: &LevelGrammar, acc: &mut RlslpBuilder) -> LevelGrammar {
    bcomp_with_runs(g, acc).0
}

/// Outermost maximal runs of every rule of `g`.
pub fn compute_runs(g: &LevelGrammar) -> RunTables {
    bcomp_with_runs(g, &mut RlslpBuilder::new(0)).1
}

pub(crate) fn bcomp_with_runs(g: &LevelGrammar, acc: &mut RlslpBuilder) -> (LevelGrammar, RunTables) {
    let r = g.num_rules();
    let mut runs = RunTables {
        left: RunTable::with_capacity(r),
        right: RunTable::with_capacity(r),
        full: Vec::with_capacity(r),
    };
    let mut cap_of: Vec<Option<Sym>> = Vec::with_capacity(r);
    let mut keys: KeyIndex<(SymbolId, u64)> = KeyIndex::new();
    let mut out = LevelGrammar::new();
    let mut items: Vec<Item> = Vec::new();

    let mut block_sym = |x: SymbolId, d: u64| {
        if d == 1 {
            Sym::Level(x)
        } else {
            Sym::Fresh(keys.slot((x, d)))
        }
    };

    for i in 0..r {
        items.clear();
        for &s in g.rule(i) {
            match s {
                Sym::Level(x) => push_block(&mut items, x, 1),
                Sym::Rule(c) => {
                    let c = c as usize;
                    let (x, d) = runs.left.get(c);
                    push_block(&mut items, x, d);
                    if let Some(cap) = cap_of[c] {
                        items.push(Item::Cap(cap));
                    }
                    if !runs.full[c] {
                        let (y, e) = runs.right.get(c);
                        push_block(&mut items, y, e);
                    }
                }
                Sym::Fresh(_) => unreachable!("fresh symbol in input level grammar"),
            }
        }
        let (Item::Block(x, d), Item::Block(y, e)) = (items[0], items[items.len() - 1]) else {
            unreachable!("rule expansions start and end with a run");
        };
        runs.left.push(x, d);
        runs.right.push(y, e);
        if items.len() == 1 {
            runs.full.push(true);
            cap_of.push(None);
            continue;
        }
        runs.full.push(false);
        let middle = &items[1..items.len() - 1];
        let mut sym_of = |it: &Item| match *it {
            Item::Block(x, d) => block_sym(x, d),
            Item::Cap(s) => s,
        };
        cap_of.push(match middle {
            [] => None,
            [one] => Some(sym_of(one)),
            _ => {
                out.push_rule(middle.iter().map(&mut sym_of));
                Some(Sym::Rule(out.num_rules() as u32 - 1))
            }
        });
    }

    let s = r - 1;
    let mut wrapper = Vec::with_capacity(3);
    let (x, d) = runs.left.get(s);
    wrapper.push(block_sym(x, d));
    if let Some(cap) = cap_of[s] {
        wrapper.push(cap);
    }
    if !runs.full[s] {
        let (y, e) = runs.right.get(s);
        wrapper.push(block_sym(y, e));
    }
    out.push_rule(wrapper);

    let names = acc.name_runs(keys.keys());
    out.resolve(&names);
    (out, runs)
}
