use super::suffix_array::{lcp_array, suffix_array};
use super::{LzFactorization, Phrase};

/// Greedy LZ77: each phrase is the longest prefix of the remaining text that
/// occurs starting at an earlier position (overlap allowed). Among equally
/// long sources the rightmost one is chosen. A symbol with no earlier
/// occurrence becomes a literal.
///
/// Longest previous factors are found by walking outward from the suffix's
/// rank in the suffix array while the running LCP minimum stays at least
/// the best length seen, so work is proportional to the number of
/// suffixes sharing the phrase, per phrase.
pub fn parse_exact_lz77(text: &[u8]) -> LzFactorization {
    let n = text.len();
    let sa = suffix_array(text);
    let lcp = lcp_array(text, &sa);
    let mut rank = vec![0u32; n];
    for (r, &s) in sa.iter().enumerate() {
        rank[s as usize] = r as u32;
    }

    let mut phrases = Vec::new();
    let mut i = 0usize;
    while i < n {
        let r = rank[i] as usize;
        let mut best = 0u32;
        let mut src = 0u32;
        let consider = |m: u32, p: u32, best: &mut u32, src: &mut u32| {
            if (p as usize) < i && (m > *best || (m == *best && p > *src)) {
                *best = m;
                *src = p;
            }
        };

        let mut m = u32::MAX;
        for rr in (0..r).rev() {
            m = m.min(lcp[rr + 1]);
            if m == 0 || m < best {
                break;
            }
            consider(m, sa[rr], &mut best, &mut src);
        }
        let mut m = u32::MAX;
        for rr in r + 1..n {
            m = m.min(lcp[rr]);
            if m == 0 || m < best {
                break;
            }
            consider(m, sa[rr], &mut best, &mut src);
        }

        if best == 0 {
            phrases.push(Phrase::Literal(text[i]));
            i += 1;
        } else {
            phrases.push(Phrase::Copy { source: src as u64 + 1, len: best as u64 });
            i += best as usize;
        }
    }
    LzFactorization::new(phrases, n as u64)
}
