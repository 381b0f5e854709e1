mod support;

use proptest::prelude::*;

use recomp::convert::{lz_to_slg, prune_slp, slg_to_slp};
use recomp::format::{decode_factorization, decode_grammar, encode_factorization, encode_grammar};
use recomp::grammar::{Rule, SymbolId};
use recomp::lz::{parse_bentley_mcilroy, parse_exact_lz77, Phrase};

use support::{corpus_text, rng};

fn text_strategy() -> impl Strategy<Value = Vec<u8>> {
    prop_oneof![
        proptest::collection::vec(any::<u8>(), 1..400),
        proptest::collection::vec(b'a'..=b'c', 1..800),
        any::<u64>().prop_map(|s| corpus_text(&mut rng(s), 3000)),
    ]
}

/// Longest previous occurrence of `text[i..]` (sources may overlap `i`).
fn longest_previous(text: &[u8], i: usize) -> usize {
    (0..i)
        .map(|p| text[p..].iter().zip(&text[i..]).take_while(|(a, b)| a == b).count())
        .max()
        .unwrap_or(0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn bentley_mcilroy_decodes(text in text_strategy(), b in 2usize..80) {
        let fz = parse_bentley_mcilroy(&text, b);
        prop_assert!(fz.check().is_ok());
        prop_assert_eq!(fz.decode().unwrap(), text);
        for ph in &fz.phrases {
            if let Phrase::Copy { len, .. } = ph {
                prop_assert!(*len as usize >= b);
            }
        }
    }

    #[test]
    fn exact_parse_is_greedy(text in proptest::collection::vec(b'a'..=b'c', 1..300)) {
        let fz = parse_exact_lz77(&text);
        prop_assert_eq!(fz.decode().unwrap(), text.clone());
        let mut i = 0;
        for ph in &fz.phrases {
            let best = longest_previous(&text, i);
            match ph {
                Phrase::Literal(c) => {
                    prop_assert_eq!(best, 0);
                    prop_assert_eq!(*c, text[i]);
                }
                Phrase::Copy { len, .. } => prop_assert_eq!(*len as usize, best),
            }
            i += ph.len() as usize;
        }
    }

    #[test]
    fn exact_never_more_phrases_than_block_parse(text in text_strategy(), b in 2usize..40) {
        prop_assert!(parse_exact_lz77(&text).len() <= parse_bentley_mcilroy(&text, b).len());
    }

    #[test]
    fn grammar_stages_preserve_text(text in text_strategy(), b in 2usize..64) {
        let fz = parse_bentley_mcilroy(&text, b);
        let slg = lz_to_slg(&fz).unwrap();
        prop_assert_eq!(slg.expand().unwrap(), text.clone());

        let slp = slg_to_slp(&slg);
        prop_assert!(slp.validate().is_ok());
        prop_assert_eq!(slp.expand().unwrap(), text.clone());
        for r in &slp.rules {
            if let Rule::Sequence(rhs) = r {
                prop_assert!(rhs.len() <= 2);
            }
        }

        let pruned = prune_slp(&slp);
        prop_assert_eq!(pruned.expand().unwrap(), text.clone());
        prop_assert!(pruned.rules.len() <= slp.rules.len());
        prop_assert_eq!(prune_slp(&pruned), pruned.clone());
        // No unary rule survives except a start rule over one terminal.
        let last = pruned.rules.len() - 1;
        for (i, r) in pruned.rules.iter().enumerate() {
            if let Rule::Sequence(rhs) = r {
                prop_assert!(rhs.len() == 2 || (i == last && rhs.len() == 1 && rhs[0].is_terminal()));
            }
        }
    }

    #[test]
    fn formats_round_trip(text in text_strategy(), b in 2usize..64) {
        let fz = parse_bentley_mcilroy(&text, b);
        prop_assert_eq!(decode_factorization(&encode_factorization(&fz)).unwrap(), fz.clone());
        let g = slg_to_slp(&lz_to_slg(&fz).unwrap());
        prop_assert_eq!(decode_grammar(&encode_grammar(&g)).unwrap(), g);
    }
}

#[test]
fn truncated_files_are_rejected() {
    let g = slg_to_slp(&lz_to_slg(&parse_bentley_mcilroy(b"abracadabra abracadabra", 4)).unwrap());
    let bytes = encode_grammar(&g);
    for cut in 0..bytes.len() {
        assert!(decode_grammar(&bytes[..cut]).is_err(), "prefix of {cut} bytes accepted");
    }
    let fz = parse_exact_lz77(b"mississippi");
    let bytes = encode_factorization(&fz);
    for cut in 0..bytes.len() {
        assert!(decode_factorization(&bytes[..cut]).is_err(), "prefix of {cut} bytes accepted");
    }
}

#[test]
fn single_byte_text() {
    let fz = parse_bentley_mcilroy(b"x", 50);
    assert_eq!(fz.phrases, vec![Phrase::Literal(b'x')]);
    let g = prune_slp(&slg_to_slp(&lz_to_slg(&fz).unwrap()));
    assert_eq!(g.rules, vec![Rule::Sequence(vec![SymbolId::terminal(b'x')])]);
}
