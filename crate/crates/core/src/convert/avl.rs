//! LZ77-like factorization to straight-line grammar via height-balanced
//! (AVL) concatenation.
//!
//! The processed prefix is covered by one balanced root. Each copy phrase
//! is cut out of the root as O(log n) existing nodes, which are joined into
//! a phrase node and appended. Nodes are hash-consed on their two children.

use rustc_hash::FxHashMap;

use crate::grammar::{Grammar, Rule, SymbolId};
use crate::lz::{LzError, LzFactorization, Phrase};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Piece {
    Term(u8),
    Node(u32),
}

#[derive(Clone, Copy, Debug)]
struct Node {
    left: Piece,
    right: Piece,
    height: u32,
    len: u64,
}

#[derive(Default)]
struct AvlBuilder {
    nodes: Vec<Node>,
    dedup: FxHashMap<(Piece, Piece), u32>,
}

impl AvlBuilder {
    fn height(&self, p: Piece) -> u32 {
        match p {
            Piece::Term(_) => 0,
            Piece::Node(i) => self.nodes[i as usize].height,
        }
    }

    fn len(&self, p: Piece) -> u64 {
        match p {
            Piece::Term(_) => 1,
            Piece::Node(i) => self.nodes[i as usize].len,
        }
    }

    fn children(&self, p: Piece) -> (Piece, Piece) {
        match p {
            Piece::Node(i) => {
                let n = &self.nodes[i as usize];
                (n.left, n.right)
            }
            Piece::Term(_) => unreachable!("terminal has no children"),
        }
    }

    fn mk(&mut self, left: Piece, right: Piece) -> Piece {
        if let Some(&id) = self.dedup.get(&(left, right)) {
            return Piece::Node(id);
        }
        let node = Node {
            left,
            right,
            height: self.height(left).max(self.height(right)) + 1,
            len: self.len(left) + self.len(right),
        };
        let id = self.nodes.len() as u32;
        self.nodes.push(node);
        self.dedup.insert((left, right), id);
        Piece::Node(id)
    }

    /// Concatenation preserving the AVL height condition.
    fn join(&mut self, a: Piece, b: Piece) -> Piece {
        let (ha, hb) = (self.height(a), self.height(b));
        if ha.abs_diff(hb) <= 1 {
            self.mk(a, b)
        } else if ha > hb {
            self.join_right(a, b)
        } else {
            self.join_left(a, b)
        }
    }

    // h(a) > h(b) + 1: descend the right spine of `a`.
    fn join_right(&mut self, a: Piece, b: Piece) -> Piece {
        let (l, c) = self.children(a);
        let (hl, hc, hb) = (self.height(l), self.height(c), self.height(b));
        if hc <= hb + 1 {
            if hc.max(hb) <= hl {
                let t = self.mk(c, b);
                return self.mk(l, t);
            }
            let (c1, c2) = self.children(c);
            let left = self.mk(l, c1);
            let right = self.mk(c2, b);
            self.mk(left, right)
        } else {
            let t = self.join_right(c, b);
            if self.height(t) <= hl + 1 {
                self.mk(l, t)
            } else {
                let (t1, t2) = self.children(t);
                let left = self.mk(l, t1);
                self.mk(left, t2)
            }
        }
    }

    // h(b) > h(a) + 1: mirror image of `join_right`.
    fn join_left(&mut self, a: Piece, b: Piece) -> Piece {
        let (c, r) = self.children(b);
        let (hr, hc, ha) = (self.height(r), self.height(c), self.height(a));
        if hc <= ha + 1 {
            if hc.max(ha) <= hr {
                let t = self.mk(a, c);
                return self.mk(t, r);
            }
            let (c1, c2) = self.children(c);
            let left = self.mk(a, c1);
            let right = self.mk(c2, r);
            self.mk(left, right)
        } else {
            let t = self.join_left(a, c);
            if self.height(t) <= hr + 1 {
                self.mk(t, r)
            } else {
                let (t1, t2) = self.children(t);
                let right = self.mk(t2, r);
                self.mk(t1, right)
            }
        }
    }

    fn balanced_literals(&mut self, bytes: &[u8]) -> Piece {
        match bytes.len() {
            1 => Piece::Term(bytes[0]),
            n => {
                let (l, r) = bytes.split_at(n / 2);
                let l = self.balanced_literals(l);
                let r = self.balanced_literals(r);
                self.join(l, r)
            }
        }
    }

    /// Maximal nodes covering `[lo, hi)` of `p`, in text order.
    fn decompose(&self, p: Piece, lo: u64, hi: u64, out: &mut Vec<Piece>) {
        if lo == 0 && hi == self.len(p) {
            out.push(p);
            return;
        }
        let (l, r) = self.children(p);
        let ll = self.len(l);
        if lo < ll {
            self.decompose(l, lo, hi.min(ll), out);
        }
        if hi > ll {
            self.decompose(r, lo.saturating_sub(ll), hi - ll, out);
        }
    }

    /// Joins pieces whose heights rise then fall, smallest first on each side.
    fn join_all(&mut self, pieces: &[Piece]) -> Piece {
        let peak = (0..pieces.len())
            .max_by_key(|&i| (self.height(pieces[i]), std::cmp::Reverse(i)))
            .expect("nonempty piece list");
        let mut left = pieces[0];
        for &p in &pieces[1..=peak] {
            left = self.join(left, p);
        }
        let Some((&last, rest)) = pieces[peak + 1..].split_last() else {
            return left;
        };
        let mut right = last;
        for &p in rest.iter().rev() {
            right = self.join(p, right);
        }
        self.join(left, right)
    }

    fn extract(&mut self, root: Piece, lo: u64, hi: u64) -> Piece {
        let mut pieces = Vec::new();
        self.decompose(root, lo, hi, &mut pieces);
        self.join_all(&pieces)
    }

    fn into_grammar(self, root: Piece) -> Grammar {
        let id = match root {
            Piece::Term(c) => {
                return Grammar::bytes(vec![Rule::Sequence(vec![SymbolId::terminal(c)])])
            }
            Piece::Node(id) => id as usize,
        };
        let mut reachable = vec![false; id + 1];
        reachable[id] = true;
        for i in (0..=id).rev() {
            if reachable[i] {
                for child in [self.nodes[i].left, self.nodes[i].right] {
                    if let Piece::Node(c) = child {
                        reachable[c as usize] = true;
                    }
                }
            }
        }
        let mut new_id = vec![u32::MAX; id + 1];
        let mut rules = Vec::new();
        let sym = |p: Piece, new_id: &[u32]| match p {
            Piece::Term(c) => SymbolId::terminal(c),
            Piece::Node(c) => SymbolId::rule(new_id[c as usize] as usize),
        };
        for i in 0..=id {
            if reachable[i] {
                new_id[i] = rules.len() as u32;
                let n = self.nodes[i];
                rules.push(Rule::pair(sym(n.left, &new_id), sym(n.right, &new_id)));
            }
        }
        Grammar::bytes(rules)
    }
}

/// Converts a factorization into a binary SLG whose start rule expands to
/// the decoded text. Runs of consecutive literals are first built into a
/// balanced tree.
pub fn lz_to_slg(fz: &LzFactorization) -> Result<Grammar, LzError> {
    fz.check()?;
    let mut b = AvlBuilder::default();
    let mut root: Option<Piece> = None;
    let mut literals: Vec<u8> = Vec::new();
    let append = |b: &mut AvlBuilder, root: &mut Option<Piece>, p: Piece| {
        *root = Some(match *root {
            None => p,
            Some(r) => b.join(r, p),
        });
    };

    for ph in &fz.phrases {
        match *ph {
            Phrase::Literal(c) => literals.push(c),
            Phrase::Copy { source, len } => {
                if !literals.is_empty() {
                    let p = b.balanced_literals(&literals);
                    literals.clear();
                    append(&mut b, &mut root, p);
                }
                let r = root.expect("checked factorization starts with a literal");
                let mut cur = b.len(r);
                let start = source - 1;
                let period = cur - start;
                let mut done = 0u64;
                while done < len {
                    // Every offset ≡ start (mod period) behind the copied
                    // part is an equivalent source; use the earliest one.
                    let r = root.unwrap();
                    let from = start + done % period;
                    let take = (len - done).min(cur - from);
                    let p = b.extract(r, from, from + take);
                    append(&mut b, &mut root, p);
                    done += take;
                    cur += take;
                }
            }
        }
    }
    if !literals.is_empty() {
        let p = b.balanced_literals(&literals);
        append(&mut b, &mut root, p);
    }
    let root = root.expect("checked factorization is nonempty");
    Ok(b.into_grammar(root))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lz::{parse_bentley_mcilroy, parse_exact_lz77};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn check_avl(b: &AvlBuilder) {
        for n in &b.nodes {
            let (hl, hr) = (b.height(n.left), b.height(n.right));
            assert!(hl.abs_diff(hr) <= 1, "unbalanced node {hl} vs {hr}");
        }
    }

    #[test]
    fn single_literal() {
        let fz = LzFactorization::new(vec![Phrase::Literal(b'a')], 1);
        let g = lz_to_slg(&fz).unwrap();
        assert!(g.len() <= 2);
        assert_eq!(g.expand().unwrap(), b"a");
    }

    #[test]
    fn overlapping_copy() {
        let fz = LzFactorization::new(vec![Phrase::Literal(b'a'), Phrase::Copy { source: 1, len: 3 }], 4);
        assert_eq!(lz_to_slg(&fz).unwrap().expand().unwrap(), b"aaaa");
        let fz = parse_exact_lz77(b"abcabcabcabcabcabcabcab");
        assert_eq!(lz_to_slg(&fz).unwrap().expand().unwrap(), b"abcabcabcabcabcabcabcab");
    }

    #[test]
    fn joins_stay_balanced() {
        let mut b = AvlBuilder::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut pieces = Vec::new();
        for _ in 0..200 {
            let k = rng.random_range(1..300);
            let bytes: Vec<u8> = (0..k).map(|_| rng.random_range(0..3)).collect();
            pieces.push((b.balanced_literals(&bytes), bytes));
        }
        for _ in 0..400 {
            let i = rng.random_range(0..pieces.len());
            let j = rng.random_range(0..pieces.len());
            let p = b.join(pieces[i].0, pieces[j].0);
            let bytes = [pieces[i].1.clone(), pieces[j].1.clone()].concat();
            let g = b.clone_grammar(p);
            assert_eq!(g.expand().unwrap(), bytes);
            pieces.push((p, bytes));
        }
        check_avl(&b);
    }

    impl AvlBuilder {
        fn clone_grammar(&self, root: Piece) -> Grammar {
            AvlBuilder { nodes: self.nodes.clone(), dedup: FxHashMap::default() }.into_grammar(root)
        }
    }

    #[test]
    fn random_texts_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for case in 0..300 {
            let n = rng.random_range(1..=10_000);
            let sigma = [1u8, 2, 4, 0][case % 4];
            let text: Vec<u8> = (0..n)
                .map(|_| if sigma == 0 { rng.random() } else { rng.random_range(0..sigma) })
                .collect();
            let fz = parse_bentley_mcilroy(&text, 8);
            let g = lz_to_slg(&fz).unwrap();
            assert_eq!(g.expand().unwrap(), text, "case {case}");
            if n >= 2 {
                let bound = 4.0 * fz.len() as f64 * (n as f64).log2();
                assert!((g.len() as f64) <= bound, "{} rules > {bound}", g.len());
            }
        }
    }

    proptest! {
        #[test]
        fn exact_parse_round_trip(text in proptest::collection::vec(0u8..4, 1..400)) {
            let fz = parse_exact_lz77(&text);
            let g = lz_to_slg(&fz).unwrap();
            prop_assert!(g.validate().is_ok());
            prop_assert_eq!(g.expand().unwrap(), text);
        }
    }
}
