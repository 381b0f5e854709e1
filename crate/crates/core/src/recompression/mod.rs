//! Recompression of an SLP into a run-length SLP (RLSLP).
//!
//! Rounds alternate block compression (maximal runs `X^d` become one
//! symbol) and pair compression (pairs `ab` with `a ∈ Σ_L`, `b ∈ Σ_R`
//! become one symbol) until the level string is a single symbol. The
//! compressed engine in [`engine`] runs each phase on a grammar for the
//! level string; [`reference`] runs the same phases on the explicit string.

mod bcomp;
pub mod engine;
mod level;
mod pairs;
mod partition;
mod pcomp;
pub mod reference;
mod rlslp;
mod runs;

use std::fmt;
use std::io::{self, Write};

pub use bcomp::{bcomp, compute_runs};
pub use engine::{recompress, Recompression, Recompressor};
pub use level::{LevelGrammar, Sym};
pub use pairs::{boundary_symbols, collect_pair_frequencies, compute_nocc, level_nocc, PairMaps, ReverseGraph};
pub use partition::{
    deterministic_partition, randomized_partition, Partition, PartitionKind, PartitionSource, Partitioner, Strategy,
};
pub use pcomp::pcomp;
pub use reference::{bcomp_string, pcomp_string, recompress_string, ReferenceRun, TraceEntry, TraceOptions};
pub use rlslp::RlslpBuilder;
pub use runs::{RunTable, RunTables, OVERFLOW};

use crate::grammar::GrammarError;

#[derive(Debug, thiserror::Error)]
pub enum RecompressionError {
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error("input grammar has no rules")]
    EmptyInput,
    #[error("input rule {0} is a run rule; recompression expects an SLG")]
    RunRuleInInput(usize),
    #[error("no partition left for PComp round {0}")]
    PartitionsExhausted(usize),
    #[error("unknown strategy {0:?} (expected deterministic, randomized or mixed)")]
    UnknownStrategy(String),
    #[error("level string still has length {level_len} after {rounds} rounds")]
    NoProgress { rounds: usize, level_len: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    BComp,
    PComp,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::BComp => "bcomp",
            Phase::PComp => "pcomp",
        })
    }
}

/// Counters of one phase.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseRecord {
    pub round: usize,
    pub phase: Phase,
    pub level_len_before: u64,
    pub level_len_after: u64,
    /// Size of the working representation after the phase: total rhs
    /// length of the level grammar, or the string length for the reference.
    pub working_size: u64,
    /// RLSLP rules added by the phase.
    pub new_rules: u64,
    /// PComp only: frequency of all pairs of distinct symbols.
    pub pair_weight_total: u64,
    /// PComp only: frequency of the pairs the partition replaced.
    pub pair_weight_replaced: u64,
    pub partition: Option<PartitionKind>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Telemetry {
    pub records: Vec<PhaseRecord>,
}

impl Telemetry {
    pub fn rounds(&self) -> usize {
        self.records.last().map_or(0, |r| r.round + 1)
    }

    /// Long-format TSV with columns `round phase metric value`.
    pub fn write_tsv(&self, w: &mut impl Write) -> io::Result<()> {
        writeln!(w, "round\tphase\tmetric\tvalue")?;
        for r in &self.records {
            let mut row = |metric: &str, value: &dyn fmt::Display| writeln!(w, "{}\t{}\t{metric}\t{value}", r.round, r.phase);
            row("level_length_before", &r.level_len_before)?;
            row("level_length_after", &r.level_len_after)?;
            row("working_size", &r.working_size)?;
            row("new_rules", &r.new_rules)?;
            if r.phase == Phase::PComp {
                row("pair_weight_total", &r.pair_weight_total)?;
                row("pair_weight_replaced", &r.pair_weight_replaced)?;
            }
            if let Some(kind) = r.partition {
                row("partition", &kind.name())?;
            }
        }
        Ok(())
    }

    pub fn to_tsv(&self) -> String {
        let mut buf = Vec::new();
        self.write_tsv(&mut buf).expect("writing to a Vec");
        String::from_utf8(buf).expect("ascii output")
    }
}

/// Round budget before giving up on a level string of length `n`.
pub(crate) fn round_limit(n: u64) -> usize {
    let log = 64 - n.leading_zeros() as usize;
    64 * log + 64
}
