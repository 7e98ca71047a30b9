//! Deterministic code generation.
//!
//! A voter's secret seeds one hash chain per election:
//!
//! ```text
//! secret   = SHA-256(0x00 || registration_blob || nonce)
//! value(0) = SHA-256(0x01 || secret || election_id)
//! value(i) = SHA-256(0x02 || value(i-1))
//! ```
//!
//! Chain values are shown to voters as hyphenated decimal codes with a Damm
//! check digit, or as short sentences over a 2048-word list. Both renderings
//! carry far fewer than 256 bits (about 63 for 20 digits, 66 for six words),
//! which is enough against rate-limited online guessing but is not a full
//! commitment to the chain value.
//!
//! Every function here is pure.

mod chain;
pub mod damm;
mod format;
mod matching;
mod numeric;
mod secret;
pub mod vectors;
mod words;

pub use chain::{chain_value, ChainConfig, ChainValue, ChainWalk, DEFAULT_MAX_CHAIN_LENGTH};
pub use format::{CodeFormat, RenderedCode};
pub use matching::{decode_as, decode_auto, match_code, DecodedCode, MatchVerdict};
pub use numeric::{decode_numeric, encode_numeric, render_payload, NumericPayload};
pub use secret::{derive_secret, derive_secret_bytes, SharedSecret, SECRET_LEN};
pub use words::{
    damerau_levenshtein, decode_words, encode_words, Resolved, Wordlist, WordsPayload, MAX_CORRECTION_DISTANCE,
    WORDLIST_LEN,
};

pub(crate) const DOMAIN_SECRET: u8 = 0x00;
pub(crate) const DOMAIN_CHAIN_SEED: u8 = 0x01;
pub(crate) const DOMAIN_CHAIN_STEP: u8 = 0x02;
pub(crate) const DOMAIN_FINGERPRINT: u8 = 0x03;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CodegenError {
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error("chain exhausted: index {index} is beyond the {max}-code chain")]
    ChainExhausted { index: u32, max: u32 },
    #[error("unsupported code format {0}")]
    InvalidFormat(String),
    #[error("wordlist: {0}")]
    Wordlist(String),
}

/// Why a transcribed code could not be read.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecodeError {
    #[error("malformed code: {0}")]
    MalformedCode(String),
    #[error("check digit mismatch (probable transcription error)")]
    ChecksumMismatch,
    #[error("word {0:?} matches no list word unambiguously")]
    UnrecoverableWord(String),
}

/// Renders `value` in `format`.
pub fn render(value: &ChainValue, format: CodeFormat, wordlist: &Wordlist) -> Result<RenderedCode, CodegenError> {
    match format {
        CodeFormat::Numeric(n) => encode_numeric(value, n),
        CodeFormat::Words(n) => encode_words(value, n, wordlist),
    }
}
