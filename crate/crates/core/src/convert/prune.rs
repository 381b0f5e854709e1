use rustc_hash::FxHashMap;

use crate::grammar::{Grammar, Rule, SymbolId};

/// Removes redundant rules without changing the expansion of the start:
///
/// * a unary rule `A → X` is substituted into its users (the start rule is
///   kept when it is `S → c` for a terminal `c`);
/// * rules with identical right-hand sides are merged into the first one;
/// * rules unreachable from the start are dropped.
///
/// Applying it twice gives the same grammar as applying it once.
pub fn prune_slp(g: &Grammar) -> Grammar {
    if g.rules.is_empty() {
        return g.clone();
    }
    let last = g.rules.len() - 1;
    // Canonical replacement symbol for each old rule.
    let mut canon: Vec<SymbolId> = Vec::with_capacity(g.rules.len());
    let mut rewritten: Vec<Option<Rule>> = Vec::with_capacity(g.rules.len());
    let mut seen: FxHashMap<Rule, usize> = FxHashMap::default();
    let map = |s: SymbolId, canon: &[SymbolId]| match s.rule_index() {
        Some(i) => canon[i],
        None => s,
    };

    for (i, rule) in g.rules.iter().enumerate() {
        let rule = match rule {
            Rule::Sequence(rhs) => Rule::Sequence(rhs.iter().map(|&s| map(s, &canon)).collect()),
            Rule::Run { base, exponent } => Rule::Run { base: map(*base, &canon), exponent: *exponent },
        };
        if let Rule::Sequence(rhs) = &rule {
            if rhs.len() == 1 && (i != last || !rhs[0].is_terminal()) {
                canon.push(rhs[0]);
                rewritten.push(None);
                continue;
            }
        }
        match seen.get(&rule) {
            Some(&first) => {
                canon.push(SymbolId::rule(first));
                rewritten.push(None);
            }
            None => {
                seen.insert(rule.clone(), i);
                canon.push(SymbolId::rule(i));
                rewritten.push(Some(rule));
            }
        }
    }

    let start = canon[last].rule_index().expect("start resolves to a rule");
    let mut reachable = vec![false; start + 1];
    reachable[start] = true;
    for i in (0..=start).rev() {
        if reachable[i] {
            for s in rewritten[i].as_ref().expect("canonical rule").symbols() {
                if let Some(c) = s.rule_index() {
                    reachable[c] = true;
                }
            }
        }
    }

    let mut new_id = vec![usize::MAX; start + 1];
    let mut rules = Vec::new();
    for i in 0..=start {
        if !reachable[i] {
            continue;
        }
        new_id[i] = rules.len();
        let remap = |s: SymbolId| match s.rule_index() {
            Some(c) => SymbolId::rule(new_id[c]),
            None => s,
        };
        rules.push(match rewritten[i].take().expect("canonical rule") {
            Rule::Sequence(rhs) => Rule::Sequence(rhs.into_iter().map(remap).collect()),
            Rule::Run { base, exponent } => Rule::Run { base: remap(base), exponent },
        });
    }
    Grammar::new(g.alphabet_size, rules)
}
