use rustc_hash::FxHashMap;

use super::fingerprint::{RollingHash, DEFAULT_BASE};
use super::{LzFactorization, Phrase};

pub const DEFAULT_BLOCK_SIZE: usize = 50;

#[derive(Clone, Debug)]
pub struct BmConfig {
    /// Block width B; also the minimum match length.
    pub block_size: usize,
    /// Base of the polynomial fingerprint.
    pub base: u64,
}

impl Default for BmConfig {
    fn default() -> Self {
        BmConfig { block_size: DEFAULT_BLOCK_SIZE, base: DEFAULT_BASE }
    }
}

impl BmConfig {
    pub fn new(block_size: usize) -> Self {
        BmConfig { block_size, ..Default::default() }
    }

    /// Fingerprints every B-aligned block once it lies entirely behind the
    /// scan position, slides a B-wide window over the unmatched text, and on
    /// a verified fingerprint hit extends the match forward as far as it
    /// goes. Bytes not covered by a match become literals.
    pub fn parse(&self, text: &[u8]) -> LzFactorization {
        let b = self.block_size;
        assert!(b >= 2, "block size must be at least 2");
        let n = text.len();
        let mut phrases = Vec::new();
        let literals = |phrases: &mut Vec<Phrase>, from: usize, to: usize| {
            phrases.extend(text[from..to].iter().map(|&c| Phrase::Literal(c)));
        };

        let rh = RollingHash::new(self.base, b);
        let mut table: FxHashMap<u64, u32> = FxHashMap::default();
        table.reserve(n / b);
        let mut next_block = 0usize;
        let mut lit_start = 0usize;
        let mut window: Option<u64> = None;
        let mut j = 0usize;
        while j + b <= n {
            while next_block + b <= j {
                let fp = rh.hash(&text[next_block..next_block + b]);
                table.entry(fp).or_insert(next_block as u32);
                next_block += b;
            }
            let h = window.unwrap_or_else(|| rh.hash(&text[j..j + b]));
            if let Some(&q) = table.get(&h) {
                let q = q as usize;
                if text[q..q + b] == text[j..j + b] {
                    let len = b + common_prefix(&text[q + b..], &text[j + b..]);
                    literals(&mut phrases, lit_start, j);
                    phrases.push(Phrase::Copy { source: q as u64 + 1, len: len as u64 });
                    j += len;
                    lit_start = j;
                    window = None;
                    continue;
                }
            }
            window = (j + b < n).then(|| rh.roll(h, text[j], text[j + b]));
            j += 1;
        }
        literals(&mut phrases, lit_start, n);
        LzFactorization::new(phrases, n as u64)
    }
}

/// Bentley–McIlroy parse with block size `block_size` and the default base.
pub fn parse_bentley_mcilroy(text: &[u8], block_size: usize) -> LzFactorization {
    BmConfig::new(block_size).parse(text)
}

fn common_prefix(a: &[u8], b: &[u8]) -> usize {
    let max = a.len().min(b.len());
    let mut k = 0;
    while k + 8 <= max {
        let x = u64::from_le_bytes(a[k..k + 8].try_into().unwrap());
        let y = u64::from_le_bytes(b[k..k + 8].try_into().unwrap());
        let d = x ^ y;
        if d != 0 {
            return k + (d.trailing_zeros() / 8) as usize;
        }
        k += 8;
    }
    while k < max && a[k] == b[k] {
        k += 1;
    }
    k
}
