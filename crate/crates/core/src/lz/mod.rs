//! LZ77-like factorizations: phrase types, decoding and statistics, plus
//! two parsers (exact greedy LZ77 and Bentley–McIlroy).

mod bentley_mcilroy;
mod exact;
pub mod fingerprint;
pub mod suffix_array;

pub use bentley_mcilroy::{parse_bentley_mcilroy, BmConfig, DEFAULT_BLOCK_SIZE};
pub use exact::parse_exact_lz77;

use thiserror::Error;

/// One phrase. Copy sources are 1-based text positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phrase {
    Literal(u8),
    Copy { source: u64, len: u64 },
}

impl Phrase {
    /// Number of text bytes the phrase covers.
    pub fn len(&self) -> u64 {
        match self {
            Phrase::Literal(_) => 1,
            Phrase::Copy { len, .. } => *len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(p, ℓ)` pair form; literals have `ℓ = 0` and carry the byte in `p`.
    pub fn as_pair(&self) -> (u64, u64) {
        match *self {
            Phrase::Literal(b) => (b as u64, 0),
            Phrase::Copy { source, len } => (source, len),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LzFactorization {
    pub phrases: Vec<Phrase>,
    pub original_length: u64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LzError {
    #[error("phrase {index} at position {position} references source {src} not before it")]
    BadSource { index: usize, position: u64, src: u64 },
    #[error("phrase {index} has length 0")]
    EmptyPhrase { index: usize },
    #[error("phrases cover {covered} bytes but the factorization declares {declared}")]
    LengthMismatch { covered: u64, declared: u64 },
}

/// Phrase count and average phrase length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FactorizationStats {
    pub phrases: u64,
    pub length: u64,
    pub avg_phrase_len: f64,
}

impl FactorizationStats {
    /// Average phrase length rounded for display.
    pub fn rounded_avg(&self) -> u64 {
        self.avg_phrase_len.round() as u64
    }
}

impl LzFactorization {
    pub fn new(phrases: Vec<Phrase>, original_length: u64) -> Self {
        LzFactorization { phrases, original_length }
    }

    pub fn len(&self) -> usize {
        self.phrases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phrases.is_empty()
    }

    /// Checks that every copy references an earlier position and that the
    /// phrase lengths add up to `original_length`.
    pub fn check(&self) -> Result<(), LzError> {
        let mut pos = 0u64;
        for (index, ph) in self.phrases.iter().enumerate() {
            if let Phrase::Copy { source, len } = *ph {
                if len == 0 {
                    return Err(LzError::EmptyPhrase { index });
                }
                if source == 0 || source > pos {
                    return Err(LzError::BadSource { index, position: pos + 1, src: source });
                }
            }
            pos += ph.len();
        }
        if pos != self.original_length {
            return Err(LzError::LengthMismatch { covered: pos, declared: self.original_length });
        }
        Ok(())
    }

    /// Rebuilds the text by left-to-right copying; overlapping sources are
    /// copied byte by byte.
    pub fn decode(&self) -> Result<Vec<u8>, LzError> {
        self.check()?;
        let mut out = Vec::with_capacity(self.original_length as usize);
        for ph in &self.phrases {
            match *ph {
                Phrase::Literal(b) => out.push(b),
                Phrase::Copy { source, len } => {
                    let start = (source - 1) as usize;
                    let len = len as usize;
                    if start + len <= out.len() {
                        out.extend_from_within(start..start + len);
                    } else {
                        for k in 0..len {
                            let b = out[start + k];
                            out.push(b);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn stats(&self) -> FactorizationStats {
        let f = self.phrases.len() as u64;
        FactorizationStats {
            phrases: f,
            length: self.original_length,
            avg_phrase_len: if f == 0 { 0.0 } else { self.original_length as f64 / f as f64 },
        }
    }
}
