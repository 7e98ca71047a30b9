//! The election office's authoritative state: voters, their secrets, one
//! chain position per (voter, election), and an append-only audit log.
//!
//! The registrar owns the chain index. Voters can only move it forward
//! (viewing a code never does); validation consumes a matched index. Every
//! mutation appends exactly one [`AuditEvent`], and replaying the log over an
//! empty registrar with the same nonce source reproduces the state exactly.

mod audit;
mod nonce;
mod store;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::Arc;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::clock::{Clock, SystemClock};
use crate::codegen::{
    self, derive_secret_bytes, ChainConfig, ChainValue, CodeFormat, CodegenError, RenderedCode, SharedSecret, Wordlist,
};
use crate::validation::Disposition;

pub use audit::{Actor, AuditAction, AuditEvent, AuditLog};
pub use nonce::{NonceSource, OsNonceSource, SeededNonceSource};
pub use store::{decode_store, encode_store, STORE_MAGIC};

#[derive(Debug, thiserror::Error)]
pub enum RegistrarError {
    #[error("registration duplicates voter {voter_id}")]
    DuplicateRegistration { voter_id: String },
    #[error("election {0} is already open")]
    DuplicateElection(String),
    #[error("unknown voter {0}")]
    UnknownVoter(String),
    #[error("unknown election {0}")]
    UnknownElection(String),
    #[error("voter {0} is suspended")]
    VoterSuspended(String),
    #[error("registration field {0} is empty")]
    MissingField(&'static str),
    #[error("chain exhausted for voter {voter_id} in {election_id} (max {max} codes)")]
    ChainExhausted {
        voter_id: String,
        election_id: String,
        max: u32,
    },
    #[error(transparent)]
    Codegen(#[from] CodegenError),
    #[error("store corrupt at byte {offset}: {reason}")]
    StoreCorrupt { offset: u64, reason: String },
    #[error("store was written with wordlist {store}, but {loaded} is loaded")]
    WordlistMismatch { store: String, loaded: String },
    #[error("audit replay diverged at event {sequence}: {reason}")]
    ReplayDivergence { sequence: u64, reason: String },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Registration data as entered. Matching ignores case and spacing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegistrationFields {
    pub name: String,
    pub address: String,
    pub dob: String,
}

fn normalize(field: &str) -> String {
    field.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

impl RegistrationFields {
    pub fn new(name: impl Into<String>, address: impl Into<String>, dob: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            address: address.into(),
            dob: dob.into(),
        }
    }

    /// Length-prefixed normalized fields; the input to secret derivation.
    pub fn canonical_blob(&self) -> Result<Vec<u8>, RegistrarError> {
        let mut blob = b"sigcode-registration-v1".to_vec();
        for (label, value) in [("name", &self.name), ("address", &self.address), ("dob", &self.dob)] {
            let norm = normalize(value);
            if norm.is_empty() {
                return Err(RegistrarError::MissingField(label));
            }
            blob.extend_from_slice(&(norm.len() as u32).to_be_bytes());
            blob.extend_from_slice(norm.as_bytes());
        }
        Ok(blob)
    }

    fn dedup_key(&self) -> Result<String, RegistrarError> {
        Ok(hex::encode(Sha256::digest(self.canonical_blob()?)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VoterStatus {
    Active,
    Suspended,
}

/// Position of one voter in one election's chain.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainState {
    pub current_index: u32,
    pub last_validated_index: Option<u32>,
    pub advanced_at: Option<DateTime<Utc>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoterRecord {
    pub voter_id: String,
    pub registration_fields: RegistrationFields,
    pub secret: SharedSecret,
    /// The secret replaced by the most recent rotation, kept so its codes can
    /// be reported as stale rather than invalid.
    pub prior_secret: Option<SharedSecret>,
    pub elections: BTreeMap<String, ChainState>,
    pub status: VoterStatus,
}

impl VoterRecord {
    /// Chain state for an election; an open election the voter has not
    /// touched yet starts at index 0.
    pub fn chain_state(&self, election_id: &str) -> ChainState {
        self.elections.get(election_id).cloned().unwrap_or_default()
    }
}

/// Result of a registration: the only time the secret leaves the registrar
/// outside of a rotation.
#[derive(Debug, Clone)]
pub struct Registered {
    pub voter_id: String,
    pub secret: SharedSecret,
}

/// Everything that is persisted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoreState {
    pub chain: ChainConfig,
    pub voters: BTreeMap<String, VoterRecord>,
    pub elections: BTreeSet<String>,
    pub next_voter_number: u64,
    pub audit: AuditLog,
    registrations: BTreeMap<String, String>,
}

impl StoreState {
    pub fn empty(chain: ChainConfig) -> Self {
        Self {
            chain,
            voters: BTreeMap::new(),
            elections: BTreeSet::new(),
            next_voter_number: 1,
            audit: AuditLog::default(),
            registrations: BTreeMap::new(),
        }
    }

    pub(crate) fn rebuild_registrations(&mut self) -> Result<(), RegistrarError> {
        self.registrations.clear();
        for (id, v) in &self.voters {
            self.registrations
                .insert(v.registration_fields.dedup_key()?, id.clone());
        }
        Ok(())
    }
}

pub struct Registrar {
    state: StoreState,
    nonces: Box<dyn NonceSource>,
    clock: Arc<dyn Clock>,
    wordlist: Arc<Wordlist>,
}

impl std::fmt::Debug for Registrar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Registrar")
            .field("voters", &self.state.voters.len())
            .field("elections", &self.state.elections)
            .field("audit_events", &self.state.audit.len())
            .finish()
    }
}

impl Registrar {
    pub fn new(
        chain: ChainConfig,
        nonces: Box<dyn NonceSource>,
        clock: Arc<dyn Clock>,
        wordlist: Arc<Wordlist>,
    ) -> Self {
        Self {
            state: StoreState::empty(chain),
            nonces,
            clock,
            wordlist,
        }
    }

    /// OS randomness, wall clock, bundled wordlist, 1024-code chains.
    pub fn with_defaults() -> Self {
        Self::new(
            ChainConfig::default(),
            Box::new(OsNonceSource),
            Arc::new(SystemClock),
            Wordlist::english(),
        )
    }

    pub fn state(&self) -> &StoreState {
        &self.state
    }

    pub fn chain_config(&self) -> ChainConfig {
        self.state.chain
    }

    pub fn wordlist(&self) -> &Arc<Wordlist> {
        &self.wordlist
    }

    pub fn clock(&self) -> &Arc<dyn Clock> {
        &self.clock
    }

    pub fn audit(&self) -> &[AuditEvent] {
        self.state.audit.events()
    }

    pub fn voter(&self, voter_id: &str) -> Option<&VoterRecord> {
        self.state.voters.get(voter_id)
    }

    pub fn voter_count(&self) -> usize {
        self.state.voters.len()
    }

    pub fn has_election(&self, election_id: &str) -> bool {
        self.state.elections.contains(election_id)
    }

    pub(crate) fn voters_mut(&mut self) -> &mut BTreeMap<String, VoterRecord> {
        &mut self.state.voters
    }

    fn active_voter(&self, voter_id: &str) -> Result<&VoterRecord, RegistrarError> {
        let v = self
            .state
            .voters
            .get(voter_id)
            .ok_or_else(|| RegistrarError::UnknownVoter(voter_id.to_owned()))?;
        if v.status != VoterStatus::Active {
            return Err(RegistrarError::VoterSuspended(voter_id.to_owned()));
        }
        Ok(v)
    }

    fn require_election(&self, election_id: &str) -> Result<(), RegistrarError> {
        if self.has_election(election_id) {
            Ok(())
        } else {
            Err(RegistrarError::UnknownElection(election_id.to_owned()))
        }
    }

    fn fresh_secret_bytes(&mut self, blob: &[u8]) -> Result<[u8; 32], RegistrarError> {
        let mut nonce = [0u8; 32];
        self.nonces.fill(&mut nonce);
        Ok(derive_secret_bytes(blob, &nonce)?)
    }

    pub fn register_voter(&mut self, fields: RegistrationFields) -> Result<Registered, RegistrarError> {
        let now = self.clock.now();
        self.register_voter_at(fields, now)
    }

    fn register_voter_at(
        &mut self,
        fields: RegistrationFields,
        at: DateTime<Utc>,
    ) -> Result<Registered, RegistrarError> {
        let blob = fields.canonical_blob()?;
        let key = fields.dedup_key()?;
        if let Some(existing) = self.state.registrations.get(&key) {
            return Err(RegistrarError::DuplicateRegistration {
                voter_id: existing.clone(),
            });
        }
        let voter_id = format!("V{:06}", self.state.next_voter_number);
        let secret = SharedSecret::from_bytes(self.fresh_secret_bytes(&blob)?, 1, at);
        self.state.next_voter_number += 1;
        self.state.registrations.insert(key, voter_id.clone());
        self.state.voters.insert(
            voter_id.clone(),
            VoterRecord {
                voter_id: voter_id.clone(),
                registration_fields: fields.clone(),
                secret: secret.clone(),
                prior_secret: None,
                elections: BTreeMap::new(),
                status: VoterStatus::Active,
            },
        );
        self.state.audit.append(
            at,
            Actor::Official,
            &voter_id,
            AuditAction::RegisterVoter {
                fields,
                secret_version: 1,
                secret_fingerprint: secret.fingerprint(),
            },
            "voter registered; secret disclosed once",
        );
        Ok(Registered { voter_id, secret })
    }

    pub fn open_election(&mut self, election_id: &str) -> Result<(), RegistrarError> {
        let now = self.clock.now();
        self.open_election_at(election_id, now)
    }

    fn open_election_at(&mut self, election_id: &str, at: DateTime<Utc>) -> Result<(), RegistrarError> {
        if election_id.trim().is_empty() {
            return Err(CodegenError::MalformedInput("election id is empty".into()).into());
        }
        if !self.state.elections.insert(election_id.to_owned()) {
            return Err(RegistrarError::DuplicateElection(election_id.to_owned()));
        }
        self.state.audit.append(
            at,
            Actor::Official,
            "",
            AuditAction::OpenElection {
                election_id: election_id.to_owned(),
            },
            "election opened",
        );
        Ok(())
    }

    /// Issues a replacement secret and restarts every chain at index 0.
    pub fn rotate_secret(&mut self, voter_id: &str, actor: Actor) -> Result<SharedSecret, RegistrarError> {
        let now = self.clock.now();
        self.rotate_secret_at(voter_id, actor, now)
    }

    fn rotate_secret_at(
        &mut self,
        voter_id: &str,
        actor: Actor,
        at: DateTime<Utc>,
    ) -> Result<SharedSecret, RegistrarError> {
        let blob = self.active_voter(voter_id)?.registration_fields.canonical_blob()?;
        let bytes = self.fresh_secret_bytes(&blob)?;
        let record = self.state.voters.get_mut(voter_id).expect("checked above");
        let fresh = record.secret.successor(bytes, at);
        record.prior_secret = Some(std::mem::replace(&mut record.secret, fresh.clone()));
        record.elections.values_mut().for_each(|s| *s = ChainState::default());
        self.state.audit.append(
            at,
            actor,
            voter_id,
            AuditAction::RotateSecret {
                secret_version: fresh.version(),
                secret_fingerprint: fresh.fingerprint(),
            },
            "secret rotated; chains restarted",
        );
        Ok(fresh)
    }

    /// Moves the voter's code forward one step, expiring the current one.
    pub fn advance_index(&mut self, voter_id: &str, election_id: &str) -> Result<u32, RegistrarError> {
        let now = self.clock.now();
        self.advance_index_at(voter_id, election_id, now)
    }

    fn advance_index_at(
        &mut self,
        voter_id: &str,
        election_id: &str,
        at: DateTime<Utc>,
    ) -> Result<u32, RegistrarError> {
        self.require_election(election_id)?;
        let chain = self.state.chain;
        let current = self.active_voter(voter_id)?.chain_state(election_id).current_index;
        let next = current + 1;
        if chain.check_index(next).is_err() {
            return Err(RegistrarError::ChainExhausted {
                voter_id: voter_id.to_owned(),
                election_id: election_id.to_owned(),
                max: chain.max_chain_length,
            });
        }
        let record = self.state.voters.get_mut(voter_id).expect("checked above");
        let state = record.elections.entry(election_id.to_owned()).or_default();
        state.current_index = next;
        state.advanced_at = Some(at);
        self.state.audit.append(
            at,
            Actor::Voter,
            voter_id,
            AuditAction::AdvanceIndex {
                election_id: election_id.to_owned(),
                new_index: next,
            },
            format!("code advanced to index {next}"),
        );
        Ok(next)
    }

    pub fn set_status(&mut self, voter_id: &str, status: VoterStatus, actor: Actor) -> Result<(), RegistrarError> {
        let now = self.clock.now();
        self.set_status_at(voter_id, status, actor, now)
    }

    fn set_status_at(
        &mut self,
        voter_id: &str,
        status: VoterStatus,
        actor: Actor,
        at: DateTime<Utc>,
    ) -> Result<(), RegistrarError> {
        let record = self
            .state
            .voters
            .get_mut(voter_id)
            .ok_or_else(|| RegistrarError::UnknownVoter(voter_id.to_owned()))?;
        record.status = status;
        self.state
            .audit
            .append(at, actor, voter_id, AuditAction::SetStatus { status }, "status changed");
        Ok(())
    }

    pub fn chain_state(&self, voter_id: &str, election_id: &str) -> Result<ChainState, RegistrarError> {
        self.require_election(election_id)?;
        self.state
            .voters
            .get(voter_id)
            .map(|v| v.chain_state(election_id))
            .ok_or_else(|| RegistrarError::UnknownVoter(voter_id.to_owned()))
    }

    /// The chain value the voter should write right now. Read-only.
    pub fn current_value(&self, voter_id: &str, election_id: &str) -> Result<ChainValue, RegistrarError> {
        self.require_election(election_id)?;
        let record = self.active_voter(voter_id)?;
        let index = record.chain_state(election_id).current_index;
        self.state
            .chain
            .chain_value(&record.secret, election_id, index)
            .map_err(|e| match e {
                CodegenError::ChainExhausted { max, .. } => RegistrarError::ChainExhausted {
                    voter_id: voter_id.to_owned(),
                    election_id: election_id.to_owned(),
                    max,
                },
                other => other.into(),
            })
    }

    /// The current code rendered in `format`. Viewing never advances the index.
    pub fn current_code(
        &self,
        voter_id: &str,
        election_id: &str,
        format: CodeFormat,
    ) -> Result<RenderedCode, RegistrarError> {
        let value = self.current_value(voter_id, election_id)?;
        Ok(codegen::render(&value, format, &self.wordlist)?)
    }

    /// Records a validation outcome. A VALID match at `j` consumes the code:
    /// the chain moves to `j + 1`.
    pub(crate) fn record_validation(&mut self, outcome: ValidationEventData<'_>, at: DateTime<Utc>) {
        if let (Disposition::Valid, Some(j)) = (outcome.status, outcome.matched_index) {
            if let Some(record) = self.state.voters.get_mut(outcome.voter_id) {
                consume(record, outcome.election_id, j);
            }
        }
        self.append_validation_event(outcome, at);
    }

    /// Appends the event only; the consumption already happened in place.
    pub(crate) fn append_validation_event(&mut self, outcome: ValidationEventData<'_>, at: DateTime<Utc>) {
        self.state.audit.append(
            at,
            Actor::System,
            outcome.voter_id,
            AuditAction::ValidateEnvelope {
                envelope_id: outcome.envelope_id.to_owned(),
                election_id: outcome.election_id.to_owned(),
                status: outcome.status,
                matched_index: outcome.matched_index,
            },
            outcome.detail,
        );
    }

    /// Re-applies `events` to an empty registrar.
    ///
    /// `nonces` must yield the same sequence the original run drew; each
    /// regenerated secret is checked against the recorded fingerprint.
    pub fn replay(
        events: &[AuditEvent],
        chain: ChainConfig,
        nonces: Box<dyn NonceSource>,
        wordlist: Arc<Wordlist>,
    ) -> Result<Registrar, RegistrarError> {
        let mut r = Registrar::new(chain, nonces, Arc::new(SystemClock), wordlist);
        for event in events {
            let diverged = |reason: String| RegistrarError::ReplayDivergence {
                sequence: event.sequence,
                reason,
            };
            let at = event.timestamp;
            let applied = match &event.action {
                AuditAction::RegisterVoter { fields, .. } => r.register_voter_at(fields.clone(), at).map(|_| ()),
                AuditAction::OpenElection { election_id } => r.open_election_at(election_id, at),
                AuditAction::RotateSecret { .. } => r.rotate_secret_at(&event.voter_id, event.actor, at).map(|_| ()),
                AuditAction::AdvanceIndex { election_id, .. } => {
                    r.advance_index_at(&event.voter_id, election_id, at).map(|_| ())
                }
                AuditAction::ValidateEnvelope {
                    envelope_id,
                    election_id,
                    status,
                    matched_index,
                } => {
                    r.record_validation(
                        ValidationEventData {
                            envelope_id,
                            voter_id: &event.voter_id,
                            election_id,
                            status: *status,
                            matched_index: *matched_index,
                            detail: &event.detail,
                        },
                        at,
                    );
                    Ok(())
                }
                AuditAction::SetStatus { status } => r.set_status_at(&event.voter_id, *status, event.actor, at),
            };
            applied.map_err(|e| diverged(e.to_string()))?;
            let produced = r.state.audit.events().last().expect("one event per mutation");
            if produced != event {
                return Err(diverged(format!("recorded {event:?}, replayed {produced:?}")));
            }
        }
        Ok(r)
    }

    pub fn save_store(&self, path: impl AsRef<Path>) -> Result<(), RegistrarError> {
        let path = path.as_ref();
        let bytes = encode_store(&self.state, self.wordlist.checksum());
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, bytes)?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load_store(
        path: impl AsRef<Path>,
        nonces: Box<dyn NonceSource>,
        clock: Arc<dyn Clock>,
        wordlist: Arc<Wordlist>,
    ) -> Result<Registrar, RegistrarError> {
        let bytes = std::fs::read(path)?;
        let state = decode_store(&bytes, wordlist.checksum())?;
        Ok(Self::from_state(state, nonces, clock, wordlist))
    }

    /// Wraps an existing state, e.g. a snapshot taken with [`Registrar::state`].
    pub fn from_state(
        mut state: StoreState,
        nonces: Box<dyn NonceSource>,
        clock: Arc<dyn Clock>,
        wordlist: Arc<Wordlist>,
    ) -> Registrar {
        state
            .rebuild_registrations()
            .expect("stored fields were canonical when registered");
        Registrar {
            state,
            nonces,
            clock,
            wordlist,
        }
    }
}

/// Moves a chain past a validated index.
pub(crate) fn consume(record: &mut VoterRecord, election_id: &str, matched: u32) {
    let state = record.elections.entry(election_id.to_owned()).or_default();
    state.current_index = state.current_index.max(matched + 1);
    state.last_validated_index = Some(matched);
}

/// The parts of a validation outcome that go into the audit log.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ValidationEventData<'a> {
    pub envelope_id: &'a str,
    pub voter_id: &'a str,
    pub election_id: &'a str,
    pub status: Disposition,
    pub matched_index: Option<u32>,
    pub detail: &'a str,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::ManualClock;

    fn registrar(seed: u64) -> Registrar {
        let mut r = Registrar::new(
            ChainConfig::default(),
            Box::new(SeededNonceSource::new(seed)),
            Arc::new(ManualClock::new(DateTime::UNIX_EPOCH)),
            Wordlist::english(),
        );
        r.open_election("GEN-2024").unwrap();
        r
    }

    fn fields(i: usize) -> RegistrationFields {
        RegistrationFields::new(format!("Voter {i}"), format!("{i} Main St"), "1970-01-01")
    }

    #[test]
    fn register_assigns_version_one() {
        let mut r = registrar(1);
        let reg = r.register_voter(fields(1)).unwrap();
        assert_eq!(reg.voter_id, "V000001");
        assert_eq!(reg.secret.version(), 1);
        assert_eq!(r.voter(&reg.voter_id).unwrap().status, VoterStatus::Active);
    }

    #[test]
    fn duplicate_registration_detected_after_normalization() {
        let mut r = registrar(1);
        let first = r.register_voter(fields(1)).unwrap();
        let again = RegistrationFields::new("  VOTER   1 ", "1 main st", "1970-01-01");
        match r.register_voter(again) {
            Err(RegistrarError::DuplicateRegistration { voter_id }) => {
                assert_eq!(voter_id, first.voter_id)
            }
            other => panic!("expected duplicate, got {other:?}"),
        }
        assert_eq!(r.audit().len(), 2);
    }

    #[test]
    fn empty_fields_rejected() {
        let mut r = registrar(1);
        assert!(matches!(
            r.register_voter(RegistrationFields::new("x", "  ", "y")),
            Err(RegistrarError::MissingField("address"))
        ));
    }

    #[test]
    fn distinct_voters_get_distinct_secrets() {
        let mut r = registrar(5);
        let mut seen = std::collections::HashSet::new();
        for i in 0..1000 {
            let reg = r.register_voter(fields(i)).unwrap();
            assert!(seen.insert(*reg.secret.bytes()));
        }
    }

    #[test]
    fn rotation_bumps_version_and_resets_chains() {
        let mut r = registrar(2);
        let id = r.register_voter(fields(1)).unwrap().voter_id;
        r.advance_index(&id, "GEN-2024").unwrap();
        r.advance_index(&id, "GEN-2024").unwrap();
        let old = r.voter(&id).unwrap().secret.clone();
        let fresh = r.rotate_secret(&id, Actor::Voter).unwrap();
        assert_eq!(fresh.version(), 2);
        let rec = r.voter(&id).unwrap();
        assert_eq!(rec.prior_secret.as_ref(), Some(&old));
        assert!(rec.elections.values().all(|s| s.current_index == 0));
        assert!(matches!(
            r.rotate_secret("V999999", Actor::Official),
            Err(RegistrarError::UnknownVoter(_))
        ));
    }

    #[test]
    fn rotation_isolates_codes() {
        let mut r = registrar(3);
        let id = r.register_voter(fields(1)).unwrap().voter_id;
        let old = r.voter(&id).unwrap().secret.clone();
        r.rotate_secret(&id, Actor::Voter).unwrap();
        let new = r.voter(&id).unwrap().secret.clone();
        let cfg = r.chain_config();
        let wl = Wordlist::english();
        let render_all = |s: &SharedSecret| -> std::collections::HashSet<String> {
            cfg.walk(s, "GEN-2024")
                .unwrap()
                .take(65)
                .flat_map(|v| {
                    [
                        codegen::encode_numeric(&v, 20).unwrap().text,
                        codegen::encode_words(&v, 6, &wl).unwrap().text,
                    ]
                })
                .collect()
        };
        assert!(render_all(&old).is_disjoint(&render_all(&new)));
    }

    #[test]
    fn advance_and_exhaust() {
        let mut r = Registrar::new(
            ChainConfig::default(),
            Box::new(SeededNonceSource::new(1)),
            Arc::new(SystemClock),
            Wordlist::english(),
        );
        r.open_election("E").unwrap();
        let id = r.register_voter(fields(1)).unwrap().voter_id;
        assert_eq!(r.advance_index(&id, "E").unwrap(), 1);
        for expected in 2..1024 {
            assert_eq!(r.advance_index(&id, "E").unwrap(), expected);
        }
        // 1024th advance
        assert!(matches!(
            r.advance_index(&id, "E"),
            Err(RegistrarError::ChainExhausted { max: 1024, .. })
        ));
        assert_eq!(r.chain_state(&id, "E").unwrap().current_index, 1023);
    }

    #[test]
    fn advance_requires_open_election_and_active_voter() {
        let mut r = registrar(4);
        let id = r.register_voter(fields(1)).unwrap().voter_id;
        assert!(matches!(
            r.advance_index(&id, "NOPE"),
            Err(RegistrarError::UnknownElection(_))
        ));
        r.set_status(&id, VoterStatus::Suspended, Actor::Official).unwrap();
        assert!(matches!(
            r.advance_index(&id, "GEN-2024"),
            Err(RegistrarError::VoterSuspended(_))
        ));
    }

    #[test]
    fn viewing_is_pure() {
        let mut r = registrar(6);
        let id = r.register_voter(fields(1)).unwrap().voter_id;
        let before = r.state().clone();
        let a = r.current_code(&id, "GEN-2024", CodeFormat::NUMERIC_20).unwrap();
        let b = r.current_code(&id, "GEN-2024", CodeFormat::NUMERIC_20).unwrap();
        let _ = r.current_code(&id, "GEN-2024", CodeFormat::WORDS_6).unwrap();
        assert_eq!(a, b);
        assert_eq!(&before, r.state());
        r.advance_index(&id, "GEN-2024").unwrap();
        let c = r.current_code(&id, "GEN-2024", CodeFormat::NUMERIC_20).unwrap();
        assert_ne!(a.text, c.text);
        assert_eq!(c.index, 1);
    }

    #[test]
    fn both_formats_render_one_value() {
        let mut r = registrar(7);
        let id = r.register_voter(fields(1)).unwrap().voter_id;
        let value = r.current_value(&id, "GEN-2024").unwrap();
        let wl = Wordlist::english();
        assert_eq!(
            r.current_code(&id, "GEN-2024", CodeFormat::NUMERIC_20).unwrap().text,
            codegen::encode_numeric(&value, 20).unwrap().text
        );
        assert_eq!(
            r.current_code(&id, "GEN-2024", CodeFormat::WORDS_6).unwrap().text,
            codegen::encode_words(&value, 6, &wl).unwrap().text
        );
    }

    #[test]
    fn unknown_lookups() {
        let r = registrar(8);
        assert!(matches!(
            r.current_code("V000042", "GEN-2024", CodeFormat::NUMERIC_20),
            Err(RegistrarError::UnknownVoter(_))
        ));
        assert!(matches!(
            r.current_code("V000042", "X", CodeFormat::NUMERIC_20),
            Err(RegistrarError::UnknownElection(_))
        ));
    }

    #[test]
    fn every_mutation_logs_once_and_replays() {
        let clock = ManualClock::new(DateTime::UNIX_EPOCH);
        let mut r = Registrar::new(
            ChainConfig::default(),
            Box::new(SeededNonceSource::new(11)),
            Arc::new(clock.clone()),
            Wordlist::english(),
        );
        r.open_election("A").unwrap();
        r.open_election("B").unwrap();
        let ids: Vec<String> = (0..5)
            .map(|i| {
                clock.advance(chrono::Duration::seconds(1));
                r.register_voter(fields(i)).unwrap().voter_id
            })
            .collect();
        let mut expected = 2 + 5;
        r.advance_index(&ids[0], "A").unwrap();
        r.advance_index(&ids[1], "B").unwrap();
        r.rotate_secret(&ids[1], Actor::Voter).unwrap();
        r.set_status(&ids[2], VoterStatus::Suspended, Actor::Official).unwrap();
        expected += 4;
        assert_eq!(r.audit().len(), expected);
        // Failed operations log nothing.
        assert!(r.advance_index(&ids[2], "A").is_err());
        assert_eq!(r.audit().len(), expected);

        let replayed = Registrar::replay(
            r.audit(),
            r.chain_config(),
            Box::new(SeededNonceSource::new(11)),
            Wordlist::english(),
        )
        .unwrap();
        assert_eq!(replayed.state(), r.state());

        let wrong = Registrar::replay(
            r.audit(),
            r.chain_config(),
            Box::new(SeededNonceSource::new(12)),
            Wordlist::english(),
        );
        assert!(matches!(
            wrong,
            Err(RegistrarError::ReplayDivergence { sequence: 3, .. })
        ));
    }
}
