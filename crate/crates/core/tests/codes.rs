use std::collections::HashSet;

use chrono::DateTime;
use proptest::prelude::*;
use sigcode_core::codegen::{
    damm, decode_auto, decode_numeric, decode_words, encode_numeric, encode_words, match_code, ChainConfig, ChainValue,
    CodeFormat, DecodeError, MatchVerdict, SharedSecret, Wordlist,
};

fn chain_values(seed: u8, n: u32) -> Vec<ChainValue> {
    let secret = SharedSecret::from_bytes([seed; 32], 1, DateTime::UNIX_EPOCH);
    ChainConfig::default()
        .walk(&secret, "GEN-2024")
        .unwrap()
        .take(n as usize)
        .collect()
}

#[test]
fn ten_thousand_codes_are_distinct() {
    let mut numeric = HashSet::new();
    let mut words = HashSet::new();
    let wl = Wordlist::english();
    for seed in 0..10u8 {
        for v in chain_values(seed, 1000) {
            assert!(numeric.insert(encode_numeric(&v, 20).unwrap().text));
            assert!(words.insert(encode_words(&v, 6, &wl).unwrap().text));
        }
    }
    assert_eq!(numeric.len(), 10_000);
}

#[test]
fn every_single_digit_error_is_caught() {
    for v in chain_values(7, 100) {
        let code = encode_numeric(&v, 20).unwrap().text.replace('-', "");
        let digits = code.as_bytes();
        assert!(damm::verify(digits));
        for i in 0..digits.len() {
            for d in b'0'..=b'9' {
                if d == digits[i] {
                    continue;
                }
                let mut bad = digits.to_vec();
                bad[i] = d;
                let text = String::from_utf8(bad).unwrap();
                assert_eq!(decode_numeric(&text), Err(DecodeError::ChecksumMismatch), "{text}");
            }
            if i + 1 < digits.len() && digits[i] != digits[i + 1] {
                let mut bad = digits.to_vec();
                bad.swap(i, i + 1);
                let text = String::from_utf8(bad).unwrap();
                assert_eq!(decode_numeric(&text), Err(DecodeError::ChecksumMismatch), "{text}");
            }
        }
    }
}

#[test]
fn decoder_agrees_with_brute_force_nearest_word() {
    let wl = Wordlist::english();
    let words = wl.words();
    let probes = [
        "abandn",
        "zoo",
        "zooo",
        "acount",
        "blnket",
        "cabbgae",
        "xylophone",
        "qqqq",
        "tomatoe",
        "wrold",
        "ab",
        "absrd",
        "lettuce",
        "letuce",
        "lettuse",
        "pizze",
        "brainn",
        "quzi",
        "mouth",
        "moth",
    ];
    let extra: Vec<String> = words.iter().step_by(97).map(|w| format!("{}x", &w[1..])).collect();
    for probe in probes.iter().map(|s| s.to_string()).chain(extra) {
        let dists: Vec<usize> = words.iter().map(|w| strsim::damerau_levenshtein(&probe, w)).collect();
        let best = *dists.iter().min().unwrap();
        let winners: Vec<usize> = (0..words.len()).filter(|&i| dists[i] == best).collect();
        let expected = if best <= 2 && winners.len() == 1 {
            Some(winners[0] as u16)
        } else {
            None
        };
        let got = wl.resolve(&probe).ok().map(|r| r.index);
        assert_eq!(got, expected, "probe {probe}");
    }
}

#[test]
fn matcher_distinguishes_mismatch_from_transcription_error() {
    let wl = Wordlist::english();
    let vs = chain_values(3, 2);
    let code = encode_numeric(&vs[0], 20).unwrap().text;
    assert_eq!(
        match_code(&code, &vs[0], CodeFormat::NUMERIC_20, &wl),
        MatchVerdict::Match { corrections: 0 }
    );
    assert_eq!(
        match_code(&code, &vs[1], CodeFormat::NUMERIC_20, &wl),
        MatchVerdict::Mismatch
    );
    assert!(matches!(
        match_code("1234-5678", &vs[0], CodeFormat::NUMERIC_20, &wl),
        MatchVerdict::TranscriptionError(_)
    ));
}

proptest! {
    #[test]
    fn numeric_round_trip(bytes in any::<[u8; 32]>(), long in any::<bool>()) {
        let v = ChainValue::from_parts(bytes, 0, "E");
        let len = if long { 20 } else { 14 };
        let text = encode_numeric(&v, len).unwrap().text;
        let decoded = decode_auto(&text, &Wordlist::english()).unwrap();
        prop_assert!(decoded.matches(&v));
        prop_assert_eq!(decoded.format(), CodeFormat::numeric(len).unwrap());
    }

    #[test]
    fn word_round_trip(bytes in any::<[u8; 32]>(), n in 4u8..=6) {
        let wl = Wordlist::english();
        let v = ChainValue::from_parts(bytes, 0, "E");
        let text = encode_words(&v, n, &wl).unwrap().text;
        let p = decode_words(&text.to_uppercase(), &wl).unwrap();
        prop_assert_eq!(p.corrections, 0);
        prop_assert!(decode_auto(&text, &wl).unwrap().matches(&v));
        let other = ChainValue::from_parts(bytes.map(|b| !b), 0, "E");
        prop_assert!(!decode_auto(&text, &wl).unwrap().matches(&other));
    }

    #[test]
    fn decoding_arbitrary_text_never_panics(text in "\\PC{0,40}") {
        let _ = decode_auto(&text, &Wordlist::english());
    }
}
