//! Splitting the level alphabet into left and right symbols for PComp.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;

use crate::grammar::SymbolId;

use super::pairs::PairMaps;
use super::RecompressionError;

/// How partitions are chosen across PComp rounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Greedy choice with a guaranteed quarter of the pair weight.
    Deterministic,
    /// Independent fair coin per symbol.
    Randomized,
    /// Deterministic on even PComp rounds, randomized on odd ones.
    Mixed,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Deterministic, Strategy::Randomized, Strategy::Mixed];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Deterministic => "deterministic",
            Strategy::Randomized => "randomized",
            Strategy::Mixed => "mixed",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = RecompressionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "deterministic" | "det" => Ok(Strategy::Deterministic),
            "randomized" | "rand" | "random" => Ok(Strategy::Randomized),
            "mixed" => Ok(Strategy::Mixed),
            _ => Err(RecompressionError::UnknownStrategy(s.to_string())),
        }
    }
}

/// Which rule produced a partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartitionKind {
    Deterministic,
    Randomized,
    Injected,
}

impl PartitionKind {
    pub fn name(self) -> &'static str {
        match self {
            PartitionKind::Deterministic => "deterministic",
            PartitionKind::Randomized => "randomized",
            PartitionKind::Injected => "injected",
        }
    }
}

/// Assignment of level symbols to the left (`Σ_L`) or right (`Σ_R`) side.
/// Symbols not mentioned are on the right.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Partition {
    left: FxHashMap<SymbolId, bool>,
}

impl Partition {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_left(symbols: impl IntoIterator<Item = SymbolId>) -> Self {
        Partition { left: symbols.into_iter().map(|s| (s, true)).collect() }
    }

    pub fn set(&mut self, s: SymbolId, left: bool) {
        self.left.insert(s, left);
    }

    #[inline]
    pub fn is_left(&self, s: SymbolId) -> bool {
        self.left.get(&s).copied().unwrap_or(false)
    }

    /// Whether an occurrence of `ab` is replaced under this partition.
    #[inline]
    pub fn crosses(&self, a: SymbolId, b: SymbolId) -> bool {
        a != b && self.is_left(a) && !self.is_left(b)
    }

    /// Total frequency of pairs that this partition replaces.
    pub fn covered_weight(&self, pairs: &PairMaps) -> u64 {
        pairs.directed().filter(|&((a, b), _)| self.crosses(a, b)).map(|(_, w)| w).sum()
    }

    fn flip(&mut self) {
        for v in self.left.values_mut() {
            *v = !*v;
        }
    }
}

/// Greedy partition: visiting symbols in increasing order, each goes to the
/// side opposite the heavier of its already placed neighbours. At least half
/// the pair weight then crosses sides, and orienting the result towards the
/// heavier direction keeps at least a quarter as `Σ_L Σ_R` pairs.
pub fn deterministic_partition(pairs: &PairMaps) -> Partition {
    // (larger, smaller, weight) with both orientations merged.
    let mut adj: Vec<(SymbolId, SymbolId, u64)> = pairs.direct.iter().map(|(&(a, b), &w)| (a, b, w)).collect();
    adj.extend(pairs.swapped.iter().map(|(&(a, b), &w)| (a, b, w)));
    adj.sort_unstable_by_key(|&(a, b, _)| (a.order_key(), b.order_key()));

    let mut part = Partition::new();
    let mut i = 0;
    while i < adj.len() {
        let a = adj[i].0;
        let (mut to_left, mut to_right) = (0u64, 0u64);
        while i < adj.len() && adj[i].0 == a {
            let (_, b, w) = adj[i];
            // An unplaced smaller neighbour only appears as a smaller
            // component; it is settled on the left.
            if *part.left.entry(b).or_insert(true) {
                to_left += w;
            } else {
                to_right += w;
            }
            i += 1;
        }
        part.set(a, to_left <= to_right);
    }

    let (mut lr, mut rl) = (0u64, 0u64);
    for ((a, b), w) in pairs.directed() {
        match (part.is_left(a), part.is_left(b)) {
            (true, false) => lr += w,
            (false, true) => rl += w,
            _ => {}
        }
    }
    if rl > lr {
        part.flip();
    }
    part
}

/// Fair coin per symbol, drawn in increasing symbol order.
pub fn randomized_partition(pairs: &PairMaps, rng: &mut impl Rng) -> Partition {
    let mut symbols: Vec<SymbolId> = pairs.directed().flat_map(|((a, b), _)| [a, b]).collect();
    symbols.sort_unstable_by_key(|s| s.order_key());
    symbols.dedup();
    let mut part = Partition::new();
    for s in symbols {
        part.set(s, rng.random::<bool>());
    }
    part
}

/// Where the partitions of successive PComp rounds come from.
#[derive(Clone, Debug)]
pub enum PartitionSource {
    Strategy { strategy: Strategy, seed: u64 },
    /// Use these partitions in order; running out is an error.
    Injected(VecDeque<Partition>),
}

#[derive(Debug)]
pub struct Partitioner {
    source: PartitionSource,
    rng: ChaCha8Rng,
    round: usize,
}

impl Partitioner {
    pub fn new(source: PartitionSource) -> Self {
        let seed = match source {
            PartitionSource::Strategy { seed, .. } => seed,
            PartitionSource::Injected(_) => 0,
        };
        Partitioner { source, rng: ChaCha8Rng::seed_from_u64(seed), round: 0 }
    }

    pub fn from_strategy(strategy: Strategy, seed: u64) -> Self {
        Self::new(PartitionSource::Strategy { strategy, seed })
    }

    pub fn next(&mut self, pairs: &PairMaps) -> Result<(Partition, PartitionKind), RecompressionError> {
        let round = self.round;
        self.round += 1;
        match &mut self.source {
            PartitionSource::Injected(queue) => queue
                .pop_front()
                .map(|p| (p, PartitionKind::Injected))
                .ok_or(RecompressionError::PartitionsExhausted(round)),
            PartitionSource::Strategy { strategy, .. } => {
                let det = match strategy {
                    Strategy::Deterministic => true,
                    Strategy::Randomized => false,
                    Strategy::Mixed => round.is_multiple_of(2),
                };
                Ok(if det {
                    (deterministic_partition(pairs), PartitionKind::Deterministic)
                } else {
                    (randomized_partition(pairs, &mut self.rng), PartitionKind::Randomized)
                })
            }
        }
    }
}
