//! Recompression driven entirely on level grammars.

use crate::grammar::Grammar;

use super::bcomp::bcomp;
use super::level::LevelGrammar;
use super::pairs::collect_pair_frequencies;
use super::partition::{PartitionSource, Partitioner, Strategy};
use super::pcomp::pcomp;
use super::rlslp::RlslpBuilder;
use super::{round_limit, Phase, PhaseRecord, RecompressionError, Telemetry};

#[derive(Clone, Debug)]
pub struct Recompression {
    pub rlslp: Grammar,
    pub telemetry: Telemetry,
}

type Observer<'a> = Box<dyn FnMut(&PhaseRecord, &LevelGrammar) + 'a>;

/// Configurable recompression run.
pub struct Recompressor<'a> {
    partitioner: Partitioner,
    observer: Option<Observer<'a>>,
}

impl<'a> Recompressor<'a> {
    pub fn new(source: PartitionSource) -> Self {
        Recompressor { partitioner: Partitioner::new(source), observer: None }
    }

    pub fn with_strategy(strategy: Strategy, seed: u64) -> Self {
        Self::new(PartitionSource::Strategy { strategy, seed })
    }

    /// Called after every phase with its record and the new level grammar.
    pub fn observe(mut self, f: impl FnMut(&PhaseRecord, &LevelGrammar) + 'a) -> Self {
        self.observer = Some(Box::new(f));
        self
    }

    pub fn run(mut self, slp: &Grammar) -> Result<Recompression, RecompressionError> {
        let mut level = LevelGrammar::from_grammar(slp)?;
        let n = *slp.expansion_lengths()?.last().ok_or(RecompressionError::EmptyInput)?;
        let limit = round_limit(n);
        let mut acc = RlslpBuilder::new(slp.alphabet_size);
        let mut telemetry = Telemetry::default();
        let mut len = n;
        let mut round = 0;

        while len > 1 {
            if round >= limit {
                return Err(RecompressionError::NoProgress { rounds: round, level_len: len });
            }
            let rules_before = acc.rule_count();
            let next = bcomp(&level, &mut acc);
            let after = next.level_len();
            let record = PhaseRecord {
                round,
                phase: Phase::BComp,
                level_len_before: len,
                level_len_after: after,
                working_size: next.size() as u64,
                new_rules: (acc.rule_count() - rules_before) as u64,
                pair_weight_total: 0,
                pair_weight_replaced: 0,
                partition: None,
            };
            level = next;
            len = after;
            self.emit(record, &level, &mut telemetry);
            if len == 1 {
                break;
            }

            let pairs = collect_pair_frequencies(&level);
            let (part, kind) = self.partitioner.next(&pairs)?;
            let replaced = part.covered_weight(&pairs);
            let rules_before = acc.rule_count();
            let next = pcomp(&level, &part, &mut acc);
            let after = next.level_len();
            debug_assert_eq!(after, len - replaced);
            let record = PhaseRecord {
                round,
                phase: Phase::PComp,
                level_len_before: len,
                level_len_after: after,
                working_size: next.size() as u64,
                new_rules: (acc.rule_count() - rules_before) as u64,
                pair_weight_total: pairs.total_weight(),
                pair_weight_replaced: replaced,
                partition: Some(kind),
            };
            level = next;
            len = after;
            self.emit(record, &level, &mut telemetry);
            round += 1;
        }

        let last = level.single_symbol().expect("level string of length 1");
        Ok(Recompression { rlslp: acc.finish(last), telemetry })
    }

    fn emit(&mut self, record: PhaseRecord, level: &LevelGrammar, telemetry: &mut Telemetry) {
        if let Some(f) = self.observer.as_mut() {
            f(&record, level);
        }
        telemetry.records.push(record);
    }
}

/// Recompresses an SLP (or any SLG without run rules) into an RLSLP with
/// the same expansion.
pub fn recompress(slp: &Grammar, strategy: Strategy, seed: u64) -> Result<Recompression, RecompressionError> {
    Recompressor::with_strategy(strategy, seed).run(slp)
}
