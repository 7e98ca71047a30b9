use subtle::ConstantTimeEq;

use super::numeric::{decode_numeric, payload_digits, NumericPayload};
use super::words::{decode_words, word_indices, Wordlist, WordsPayload};
use super::{ChainValue, CodeFormat, DecodeError};

/// A transcribed code after decoding, before comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodedCode {
    Numeric(NumericPayload),
    Words(WordsPayload),
}

impl DecodedCode {
    pub fn format(&self) -> CodeFormat {
        match self {
            DecodedCode::Numeric(p) => CodeFormat::Numeric(p.code_length()),
            DecodedCode::Words(p) => CodeFormat::Words(p.word_count()),
        }
    }

    pub fn corrections(&self) -> usize {
        match self {
            DecodedCode::Numeric(_) => 0,
            DecodedCode::Words(p) => p.corrections,
        }
    }

    /// Constant-time comparison against the rendering of `value` in this
    /// code's own format.
    pub fn matches(&self, value: &ChainValue) -> bool {
        match self {
            DecodedCode::Numeric(p) => {
                let expected = payload_digits(value, p.code_length());
                bool::from(p.as_str().as_bytes().ct_eq(expected.as_str().as_bytes()))
            }
            DecodedCode::Words(p) => {
                let expected = WordsPayload {
                    indices: word_indices(value, p.word_count()),
                    corrections: 0,
                };
                bool::from(p.bits().ct_eq(&expected.bits()))
            }
        }
    }
}

/// Decodes a code whose format is inferred from its characters: digits,
/// hyphens and whitespace mean numeric; letters and whitespace mean words.
pub fn decode_auto(text: &str, wordlist: &Wordlist) -> Result<DecodedCode, DecodeError> {
    let significant = || text.chars().filter(|c| !c.is_whitespace());
    if significant().next().is_none() {
        return Err(DecodeError::MalformedCode("code is empty".into()));
    }
    if significant().all(|c| c.is_ascii_digit() || c == '-') {
        decode_numeric(text).map(DecodedCode::Numeric)
    } else if significant().all(|c| c.is_alphabetic()) {
        decode_words(text, wordlist).map(DecodedCode::Words)
    } else {
        Err(DecodeError::MalformedCode(
            "code mixes digits, letters or punctuation".into(),
        ))
    }
}

/// Decodes `text` as the given format.
pub fn decode_as(text: &str, format: CodeFormat, wordlist: &Wordlist) -> Result<DecodedCode, DecodeError> {
    let decoded = match format {
        CodeFormat::Numeric(_) => DecodedCode::Numeric(decode_numeric(text)?),
        CodeFormat::Words(_) => DecodedCode::Words(decode_words(text, wordlist)?),
    };
    if decoded.format() != format {
        return Err(DecodeError::MalformedCode(format!(
            "expected {format}, got {}",
            decoded.format()
        )));
    }
    Ok(decoded)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatchVerdict {
    Match { corrections: usize },
    Mismatch,
    TranscriptionError(DecodeError),
}

/// Compares a transcribed code with the expected chain value.
pub fn match_code(transcribed: &str, expected: &ChainValue, format: CodeFormat, wordlist: &Wordlist) -> MatchVerdict {
    match decode_as(transcribed, format, wordlist) {
        Err(e) => MatchVerdict::TranscriptionError(e),
        Ok(decoded) if decoded.matches(expected) => MatchVerdict::Match {
            corrections: decoded.corrections(),
        },
        Ok(_) => MatchVerdict::Mismatch,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codegen::{encode_numeric, encode_words};

    fn v(fill: u8) -> ChainValue {
        ChainValue::from_parts([fill; 32], 3, "E")
    }

    #[test]
    fn identity_matches() {
        let wl = Wordlist::english();
        for fmt in [CodeFormat::NUMERIC_14, CodeFormat::NUMERIC_20] {
            let text = encode_numeric(&v(5), fmt.length()).unwrap().text;
            assert_eq!(
                match_code(&text, &v(5), fmt, &wl),
                MatchVerdict::Match { corrections: 0 }
            );
        }
        for n in 4..=6 {
            let text = encode_words(&v(5), n, &wl).unwrap().text;
            assert_eq!(
                match_code(&text, &v(5), CodeFormat::Words(n), &wl),
                MatchVerdict::Match { corrections: 0 }
            );
        }
    }

    #[test]
    fn other_value_mismatches() {
        let wl = Wordlist::english();
        let text = encode_numeric(&v(5), 20).unwrap().text;
        assert_eq!(
            match_code(&text, &v(6), CodeFormat::NUMERIC_20, &wl),
            MatchVerdict::Mismatch
        );
        let words = encode_words(&v(5), 6, &wl).unwrap().text;
        assert_eq!(
            match_code(&words, &v(6), CodeFormat::WORDS_6, &wl),
            MatchVerdict::Mismatch
        );
    }

    #[test]
    fn flipped_digit_is_transcription_error() {
        let wl = Wordlist::english();
        let mut text = encode_numeric(&v(5), 20).unwrap().text.into_bytes();
        text[0] = if text[0] == b'9' { b'0' } else { text[0] + 1 };
        let text = String::from_utf8(text).unwrap();
        assert_eq!(
            match_code(&text, &v(5), CodeFormat::NUMERIC_20, &wl),
            MatchVerdict::TranscriptionError(DecodeError::ChecksumMismatch)
        );
    }

    #[test]
    fn wrong_length_for_format() {
        let wl = Wordlist::english();
        let text = encode_numeric(&v(5), 14).unwrap().text;
        assert!(matches!(
            match_code(&text, &v(5), CodeFormat::NUMERIC_20, &wl),
            MatchVerdict::TranscriptionError(DecodeError::MalformedCode(_))
        ));
    }

    #[test]
    fn auto_detection() {
        let wl = Wordlist::english();
        let num = encode_numeric(&v(1), 20).unwrap().text;
        assert!(matches!(decode_auto(&num, &wl), Ok(DecodedCode::Numeric(_))));
        let words = encode_words(&v(1), 5, &wl).unwrap().text;
        let decoded = decode_auto(&words, &wl).unwrap();
        assert_eq!(decoded.format(), CodeFormat::Words(5));
        assert!(decoded.matches(&v(1)));
        for bad in ["", "   ", "abandon 1234", "0000-0000-0000-00!", "ability_able"] {
            assert!(
                matches!(decode_auto(bad, &wl), Err(DecodeError::MalformedCode(_))),
                "{bad:?}"
            );
        }
    }
}
