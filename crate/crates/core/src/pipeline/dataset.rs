//! Synthetic repetitive datasets: a base sequence duplicated up to the
//! target size, then sprinkled with point mutations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};

/// DNA-like sample (32 KiB over `ACGT`) bundled for tests and benchmarks.
pub static SAMPLE_DNA: &[u8] = include_bytes!("../../data/sample_dna.txt");

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum DatasetError {
    #[error("mutation rate {0} is not in [0, 1]")]
    BadRate(f64),
    #[error("base sequence is empty")]
    EmptyBase,
    #[error("target size {target} is smaller than the base ({base} bytes)")]
    TargetTooSmall { target: u64, base: u64 },
}

/// Duplicates `base` until it reaches `target_size` bytes, then replaces
/// each position with probability `rate` by a different symbol drawn
/// uniformly from the base alphabet.
///
/// Mutation positions are drawn left to right as geometric gaps from one
/// seeded stream, so the output for size `S` is a prefix of the output for
/// any larger size under the same seed and rate. A base with a single
/// distinct symbol is never mutated.
pub fn gen_dataset(base: &[u8], target_size: u64, rate: f64, seed: u64) -> Result<Vec<u8>, DatasetError> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(DatasetError::BadRate(rate));
    }
    if base.is_empty() {
        return Err(DatasetError::EmptyBase);
    }
    if target_size < base.len() as u64 {
        return Err(DatasetError::TargetTooSmall { target: target_size, base: base.len() as u64 });
    }
    let n = target_size as usize;
    let mut text = Vec::with_capacity(n);
    text.extend_from_slice(base);
    while text.len() < n {
        let take = text.len().min(n - text.len());
        text.extend_from_within(..take);
    }

    let mut alphabet = base.to_vec();
    alphabet.sort_unstable();
    alphabet.dedup();
    if rate == 0.0 || alphabet.len() < 2 {
        return Ok(text);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gaps = Geometric::new(rate).expect("rate in (0, 1]");
    let mut pos = 0u64;
    loop {
        pos = pos.saturating_add(gaps.sample(&mut rng));
        if pos >= target_size {
            break;
        }
        let cur = text[pos as usize];
        let at = alphabet.binary_search(&cur).expect("symbol from base alphabet");
        let mut k = rng.random_range(0..alphabet.len() - 1);
        if k >= at {
            k += 1;
        }
        text[pos as usize] = alphabet[k];
        pos += 1;
    }
    Ok(text)
}
