//! Envelope validation.
//!
//! For each received envelope the office recomputes the voter's chain and
//! classifies the transcribed code:
//!
//! | where it matches                                   | disposition    |
//! |----------------------------------------------------|----------------|
//! | `[current, current + window]`, current secret      | `VALID` (consumed, index moves to `j + 1`) |
//! | `[current - back_scan, current - 1]`, current secret | `EXPIRED`    |
//! | `[0, back_scan]`, previous secret                  | `STALE_SECRET` |
//! | nowhere                                            | `INVALID`      |
//!
//! Undecodable text is `MALFORMED`; an unknown voter id is `UNKNOWN_VOTER`.
//! An expired match never moves the chain.

mod batch;
mod input;
mod report;

use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::codegen::{decode_auto, ChainConfig, DecodeError, DecodedCode, SharedSecret, Wordlist};
use crate::par::Execution;
use crate::registrar::{consume, Registrar, ValidationEventData, VoterRecord, VoterStatus};

pub use batch::validate_batch;
pub use input::{parse_envelope_csv, write_envelope_csv, BatchInputError, ENVELOPE_CSV_HEADER};
pub use report::{notification_list, BatchReport, Notification, Summary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Disposition {
    Valid,
    Expired,
    StaleSecret,
    Invalid,
    Malformed,
    UnknownVoter,
}

impl Disposition {
    pub const ALL: [Disposition; 6] = [
        Disposition::Valid,
        Disposition::Expired,
        Disposition::StaleSecret,
        Disposition::Invalid,
        Disposition::Malformed,
        Disposition::UnknownVoter,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Disposition::Valid => "VALID",
            Disposition::Expired => "EXPIRED",
            Disposition::StaleSecret => "STALE_SECRET",
            Disposition::Invalid => "INVALID",
            Disposition::Malformed => "MALFORMED",
            Disposition::UnknownVoter => "UNKNOWN_VOTER",
        }
    }
}

impl fmt::Display for Disposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Disposition {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Disposition::ALL
            .into_iter()
            .find(|d| d.as_str() == s)
            .ok_or_else(|| format!("unknown disposition {s:?}"))
    }
}

/// A received envelope as keyed in by the office.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnvelopeRecord {
    pub envelope_id: String,
    pub voter_id: String,
    pub election_id: String,
    pub code_text: String,
    pub received_at: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationResult {
    pub envelope_id: String,
    pub voter_id: String,
    pub election_id: String,
    pub status: Disposition,
    pub matched_index: Option<u32>,
    pub corrections: usize,
    pub reason: String,
}

/// Scan ranges around the voter's current index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationConfig {
    /// Codes up to this many steps ahead are accepted (offline token drift).
    pub window: u32,
    /// How far back to look for expired and stale-secret codes.
    pub back_scan: u32,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self {
            window: 3,
            back_scan: 8,
            execution: Execution::default(),
        }
    }
}

impl ValidationConfig {
    pub fn new(window: u32, back_scan: u32) -> Self {
        Self {
            window,
            back_scan,
            ..Self::default()
        }
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }
}

pub(crate) struct Verdict {
    pub status: Disposition,
    pub matched_index: Option<u32>,
    pub corrections: usize,
    pub reason: String,
}

impl Verdict {
    fn new(status: Disposition, matched_index: Option<u32>, corrections: usize, reason: impl Into<String>) -> Self {
        Self {
            status,
            matched_index,
            corrections,
            reason: reason.into(),
        }
    }
}

pub(crate) fn malformed_reason(err: &DecodeError) -> String {
    match err {
        DecodeError::ChecksumMismatch => "check digit failed: probable transcription error".to_owned(),
        other => other.to_string(),
    }
}

/// First index in `range` whose value under `secret` matches `code`.
fn scan(
    chain: &ChainConfig,
    secret: &SharedSecret,
    election_id: &str,
    lo: u32,
    hi_inclusive: u32,
    code: &DecodedCode,
) -> Option<u32> {
    if lo > hi_inclusive {
        return None;
    }
    chain
        .walk(secret, election_id)
        .ok()?
        .skip(lo as usize)
        .take_while(|v| v.index() <= hi_inclusive)
        .find(|v| code.matches(v))
        .map(|v| v.index())
}

/// Classifies one decoded envelope against a voter record, consuming the
/// code on a VALID match.
pub(crate) fn classify(
    record: &mut VoterRecord,
    election_id: &str,
    decoded: Result<&DecodedCode, &DecodeError>,
    election_open: bool,
    chain: &ChainConfig,
    config: &ValidationConfig,
) -> Verdict {
    let code = match decoded {
        Ok(c) => c,
        Err(e) => return Verdict::new(Disposition::Malformed, None, 0, malformed_reason(e)),
    };
    let corrections = code.corrections();
    if !election_open {
        return Verdict::new(Disposition::Invalid, None, corrections, "election is not open");
    }
    if record.status != VoterStatus::Active {
        return Verdict::new(Disposition::Invalid, None, corrections, "voter is suspended");
    }
    let current = record.chain_state(election_id).current_index;
    let last_usable = chain.max_chain_length.saturating_sub(1);

    let window_hi = current.saturating_add(config.window).min(last_usable);
    if let Some(j) = scan(chain, &record.secret, election_id, current, window_hi, code) {
        consume(record, election_id, j);
        let reason = if j == current {
            "matched current code".to_owned()
        } else {
            format!("matched code {} ahead of current index", j - current)
        };
        return Verdict::new(Disposition::Valid, Some(j), corrections, reason);
    }
    if current > 0 {
        let lo = current.saturating_sub(config.back_scan);
        let hi = (current - 1).min(last_usable);
        if let Some(j) = scan(chain, &record.secret, election_id, lo, hi, code) {
            return Verdict::new(
                Disposition::Expired,
                Some(j),
                corrections,
                format!("code {j} was superseded; current index is {current}"),
            );
        }
    }
    if let Some(prior) = &record.prior_secret {
        let hi = config.back_scan.min(last_usable);
        if let Some(j) = scan(chain, prior, election_id, 0, hi, code) {
            return Verdict::new(
                Disposition::StaleSecret,
                Some(j),
                corrections,
                format!(
                    "code was generated from secret version {}, which has been replaced",
                    prior.version()
                ),
            );
        }
    }
    Verdict::new(
        Disposition::Invalid,
        None,
        corrections,
        "code does not match the voter's chain",
    )
}

/// Validates a single envelope and records the outcome.
pub fn validate_envelope(
    registrar: &mut Registrar,
    envelope: &EnvelopeRecord,
    config: &ValidationConfig,
) -> ValidationResult {
    let decoded = decode_auto(&envelope.code_text, registrar.wordlist());
    let chain = registrar.chain_config();
    let open = registrar.has_election(&envelope.election_id);
    let verdict = match registrar.voters_mut().get_mut(&envelope.voter_id) {
        None => Verdict::new(Disposition::UnknownVoter, None, 0, "no such voter"),
        Some(record) => classify(record, &envelope.election_id, decoded.as_ref(), open, &chain, config),
    };
    finish(registrar, envelope, verdict)
}

pub(crate) fn finish(registrar: &mut Registrar, envelope: &EnvelopeRecord, v: Verdict) -> ValidationResult {
    let now = registrar.clock().now();
    registrar.append_validation_event(
        ValidationEventData {
            envelope_id: &envelope.envelope_id,
            voter_id: &envelope.voter_id,
            election_id: &envelope.election_id,
            status: v.status,
            matched_index: v.matched_index,
            detail: &v.reason,
        },
        now,
    );
    ValidationResult {
        envelope_id: envelope.envelope_id.clone(),
        voter_id: envelope.voter_id.clone(),
        election_id: envelope.election_id.clone(),
        status: v.status,
        matched_index: v.matched_index,
        corrections: v.corrections,
        reason: v.reason,
    }
}

/// Decodes with the registrar's wordlist; exposed for tools that pre-check codes.
pub fn decode_envelope_code(text: &str, wordlist: &Wordlist) -> Result<DecodedCode, DecodeError> {
    decode_auto(text, wordlist)
}
