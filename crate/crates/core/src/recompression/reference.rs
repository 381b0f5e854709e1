//! Recompression on the explicit level string.
//!
//! Memory is linear in the text. Used as a baseline and to check the
//! compressed engine phase by phase: under the same partitions both produce
//! the same level strings and the same RLSLP.

use crate::grammar::{Grammar, SymbolId};

use super::partition::{Partition, PartitionSource, Partitioner, Strategy};
use super::pairs::PairMaps;
use super::rlslp::{KeyIndex, RlslpBuilder};
use super::{round_limit, Phase, PhaseRecord, RecompressionError, Telemetry};

fn bcomp_in_place(s: &mut Vec<SymbolId>, acc: &mut RlslpBuilder) {
    let mut keys: KeyIndex<(SymbolId, u64)> = KeyIndex::new();
    let mut slots: Vec<u32> = Vec::new();
    let mut i = 0;
    while i < s.len() {
        let x = s[i];
        let mut j = i + 1;
        while j < s.len() && s[j] == x {
            j += 1;
        }
        if j - i >= 2 {
            slots.push(keys.slot((x, (j - i) as u64)));
        }
        i = j;
    }
    let names = acc.name_runs(keys.keys());

    let (mut i, mut w, mut k) = (0, 0, 0);
    while i < s.len() {
        let x = s[i];
        let mut j = i + 1;
        while j < s.len() && s[j] == x {
            j += 1;
        }
        s[w] = if j - i >= 2 {
            k += 1;
            names[slots[k - 1] as usize]
        } else {
            x
        };
        w += 1;
        i = j;
    }
    s.truncate(w);
}

fn pcomp_in_place(s: &mut Vec<SymbolId>, part: &Partition, acc: &mut RlslpBuilder) {
    let mut keys: KeyIndex<(SymbolId, SymbolId)> = KeyIndex::new();
    let mut slots: Vec<u32> = Vec::new();
    let mut i = 0;
    while i < s.len() {
        if i + 1 < s.len() && part.crosses(s[i], s[i + 1]) {
            slots.push(keys.slot((s[i], s[i + 1])));
            i += 2;
        } else {
            i += 1;
        }
    }
    let names = acc.name_pairs(keys.keys());

    let (mut i, mut w, mut k) = (0, 0, 0);
    while i < s.len() {
        if i + 1 < s.len() && part.crosses(s[i], s[i + 1]) {
            s[w] = names[slots[k] as usize];
            k += 1;
            i += 2;
        } else {
            s[w] = s[i];
            i += 1;
        }
        w += 1;
    }
    s.truncate(w);
}

/// Replaces every maximal run `X^d`, `d ≥ 2`, by its run symbol.
pub fn bcomp_string(s: &[SymbolId], acc: &mut RlslpBuilder) -> Vec<SymbolId> {
    let mut v = s.to_vec();
    bcomp_in_place(&mut v, acc);
    v
}

/// Replaces, left to right, every pair `ab` with `a ∈ Σ_L`, `b ∈ Σ_R`.
pub fn pcomp_string(s: &[SymbolId], part: &Partition, acc: &mut RlslpBuilder) -> Vec<SymbolId> {
    let mut v = s.to_vec();
    pcomp_in_place(&mut v, part, acc);
    v
}

#[derive(Clone, Copy, Debug, Default)]
pub struct TraceOptions {
    /// Keep the level string after every phase.
    pub keep_levels: bool,
    /// Keep the partition of every PComp phase.
    pub keep_partitions: bool,
}

#[derive(Clone, Debug)]
pub struct TraceEntry {
    pub round: usize,
    pub phase: Phase,
    pub level_len: u64,
    pub level: Option<Vec<SymbolId>>,
    pub partition: Option<Partition>,
}

#[derive(Clone, Debug)]
pub struct ReferenceRun {
    pub rlslp: Grammar,
    pub telemetry: Telemetry,
    pub trace: Vec<TraceEntry>,
}

impl ReferenceRun {
    /// The partitions used, in order, for replaying the run elsewhere.
    pub fn partitions(&self) -> Vec<Partition> {
        self.trace.iter().filter_map(|e| e.partition.clone()).collect()
    }
}

/// Recompresses `text` by materializing every level string.
pub fn recompress_string(
    text: &[u8],
    source: PartitionSource,
    opts: TraceOptions,
) -> Result<ReferenceRun, RecompressionError> {
    if text.is_empty() {
        return Err(RecompressionError::EmptyInput);
    }
    let mut partitioner = Partitioner::new(source);
    let mut s: Vec<SymbolId> = text.iter().map(|&c| SymbolId::terminal(c)).collect();
    let limit = round_limit(s.len() as u64);
    let mut acc = RlslpBuilder::new(256);
    let mut telemetry = Telemetry::default();
    let mut trace = Vec::new();
    let mut round = 0;

    let mut push = |record: PhaseRecord, s: &[SymbolId], part: Option<Partition>, telemetry: &mut Telemetry| {
        trace.push(TraceEntry {
            round: record.round,
            phase: record.phase,
            level_len: s.len() as u64,
            level: opts.keep_levels.then(|| s.to_vec()),
            partition: if opts.keep_partitions { part } else { None },
        });
        telemetry.records.push(record);
    };

    while s.len() > 1 {
        if round >= limit {
            return Err(RecompressionError::NoProgress { rounds: round, level_len: s.len() as u64 });
        }
        let before = s.len() as u64;
        let rules_before = acc.rule_count();
        bcomp_in_place(&mut s, &mut acc);
        let record = PhaseRecord {
            round,
            phase: Phase::BComp,
            level_len_before: before,
            level_len_after: s.len() as u64,
            working_size: s.len() as u64,
            new_rules: (acc.rule_count() - rules_before) as u64,
            pair_weight_total: 0,
            pair_weight_replaced: 0,
            partition: None,
        };
        push(record, &s, None, &mut telemetry);
        if s.len() == 1 {
            break;
        }

        let pairs = PairMaps::from_string(&s);
        let (part, kind) = partitioner.next(&pairs)?;
        let before = s.len() as u64;
        let rules_before = acc.rule_count();
        pcomp_in_place(&mut s, &part, &mut acc);
        let record = PhaseRecord {
            round,
            phase: Phase::PComp,
            level_len_before: before,
            level_len_after: s.len() as u64,
            working_size: s.len() as u64,
            new_rules: (acc.rule_count() - rules_before) as u64,
            pair_weight_total: pairs.total_weight(),
            pair_weight_replaced: before - s.len() as u64,
            partition: Some(kind),
        };
        push(record, &s, Some(part), &mut telemetry);
        round += 1;
    }

    Ok(ReferenceRun { rlslp: acc.finish(s[0]), telemetry, trace })
}

/// Plain string-level recompression with a partition strategy.
pub fn recompress_naive(text: &[u8], strategy: Strategy, seed: u64) -> Result<ReferenceRun, RecompressionError> {
    recompress_string(text, PartitionSource::Strategy { strategy, seed }, TraceOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::Rule;

    fn t(c: u8) -> SymbolId {
        SymbolId::terminal(c)
    }

    fn syms(s: &[u8]) -> Vec<SymbolId> {
        s.iter().map(|&c| t(c)).collect()
    }

    #[test]
    fn block_compression() {
        let mut acc = RlslpBuilder::new(256);
        let out = bcomp_string(&syms(b"aaabccbbbb"), &mut acc);
        // (a,3) (b,4) (c,2) named in canonical order
        assert_eq!(out, vec![SymbolId(1), t(b'b'), SymbolId(3), SymbolId(2)]);
        assert_eq!(
            acc.rules(),
            &[
                Rule::Run { base: t(b'a'), exponent: 3 },
                Rule::Run { base: t(b'b'), exponent: 4 },
                Rule::Run { base: t(b'c'), exponent: 2 },
            ]
        );
    }

    #[test]
    fn pair_compression_left_to_right() {
        let mut acc = RlslpBuilder::new(256);
        let part = Partition::from_left([t(b'a'), t(b'c')]);
        let out = pcomp_string(&syms(b"abcbab"), &part, &mut acc);
        assert_eq!(out, vec![SymbolId(1), SymbolId(2), SymbolId(1)]);
        assert_eq!(acc.rules(), &[Rule::pair(t(b'a'), t(b'b')), Rule::pair(t(b'c'), t(b'b'))]);
    }

    #[test]
    fn whole_runs() {
        for text in [&b"a"[..], b"ab", b"aaaa", b"abababab", b"banana", b"mississippi"] {
            for s in Strategy::ALL {
                let run = recompress_naive(text, s, 1).unwrap();
                assert_eq!(run.rlslp.expand().unwrap(), text);
            }
        }
        assert!(recompress_naive(b"", Strategy::Mixed, 0).is_err());
    }
}
