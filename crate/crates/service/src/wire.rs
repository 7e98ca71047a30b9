//! Request and response bodies. Field names are part of the public contract.

use std::collections::BTreeMap;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sigcode_core::registrar::{ChainState, VoterRecord, VoterStatus};
use sigcode_core::RenderedCode;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegisterRequest {
    pub name: String,
    pub address: String,
    pub dob: String,
}

/// The only bodies that carry secret bytes: registration and rotation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecretDisclosure {
    pub voter_id: String,
    pub secret_hex: String,
    pub secret_version: u32,
    pub voter_token: String,
    pub token_expires_at: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoterView {
    pub voter_id: String,
    pub status: VoterStatus,
    pub secret_version: u32,
    pub secret_created_at: DateTime<Utc>,
    pub elections: BTreeMap<String, ChainState>,
}

impl From<&VoterRecord> for VoterView {
    fn from(r: &VoterRecord) -> Self {
        VoterView {
            voter_id: r.voter_id.clone(),
            status: r.status,
            secret_version: r.secret.version(),
            secret_created_at: r.secret.created_at(),
            elections: r.elections.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ElectionRequest {
    pub election_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElectionCreated {
    pub election_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeView {
    pub voter_id: String,
    pub election_id: String,
    pub index: u32,
    pub numeric20: String,
    pub words6: String,
}

impl CodeView {
    pub fn new(voter_id: &str, numeric: RenderedCode, words: RenderedCode) -> Self {
        CodeView {
            voter_id: voter_id.to_owned(),
            election_id: numeric.election_id,
            index: numeric.index,
            numeric20: numeric.text,
            words6: words.text,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionView {
    pub voter_id: String,
    pub voter_token: String,
    pub token_expires_at: DateTime<Utc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnvelopeRequest {
    #[serde(default)]
    pub envelope_id: Option<String>,
    pub voter_id: String,
    pub election_id: String,
    pub code_text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub batch_id: String,
    pub created_at: DateTime<Utc>,
    pub envelopes: usize,
    pub counts: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<u64>,
}
