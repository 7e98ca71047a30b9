use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::{RegistrationFields, VoterStatus};
use crate::validation::Disposition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Actor {
    Voter,
    Official,
    System,
}

/// What happened. Carries enough to re-apply the mutation on replay.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AuditAction {
    RegisterVoter {
        fields: RegistrationFields,
        secret_version: u32,
        secret_fingerprint: String,
    },
    OpenElection {
        election_id: String,
    },
    RotateSecret {
        secret_version: u32,
        secret_fingerprint: String,
    },
    AdvanceIndex {
        election_id: String,
        new_index: u32,
    },
    ValidateEnvelope {
        envelope_id: String,
        election_id: String,
        status: Disposition,
        matched_index: Option<u32>,
    },
    SetStatus {
        status: VoterStatus,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditEvent {
    pub sequence: u64,
    pub timestamp: DateTime<Utc>,
    pub actor: Actor,
    pub action: AuditAction,
    pub voter_id: String,
    pub detail: String,
}

impl AuditEvent {
    /// One line of JSON, no trailing newline.
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("audit events always serialize")
    }

    pub fn from_line(line: &str) -> Result<AuditEvent, serde_json::Error> {
        serde_json::from_str(line)
    }
}

/// Append-only event log with gapless sequence numbers starting at 1.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AuditLog {
    events: Vec<AuditEvent>,
}

impl AuditLog {
    pub fn events(&self) -> &[AuditEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn next_sequence(&self) -> u64 {
        self.events.len() as u64 + 1
    }

    pub(crate) fn append(
        &mut self,
        timestamp: DateTime<Utc>,
        actor: Actor,
        voter_id: &str,
        action: AuditAction,
        detail: impl Into<String>,
    ) -> &AuditEvent {
        let event = AuditEvent {
            sequence: self.next_sequence(),
            timestamp,
            actor,
            action,
            voter_id: voter_id.to_owned(),
            detail: detail.into(),
        };
        self.events.push(event);
        self.events.last().expect("just pushed")
    }

    /// Rebuilds a log from stored events, checking the sequence is gapless.
    pub(crate) fn from_events(events: Vec<AuditEvent>) -> Result<AuditLog, (usize, String)> {
        for (i, e) in events.iter().enumerate() {
            if e.sequence != i as u64 + 1 {
                return Err((i, format!("sequence {} where {} expected", e.sequence, i + 1)));
            }
        }
        Ok(AuditLog { events })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequence_is_gapless() {
        let mut log = AuditLog::default();
        for i in 0..3 {
            log.append(
                DateTime::UNIX_EPOCH,
                Actor::Official,
                "",
                AuditAction::OpenElection {
                    election_id: format!("E{i}"),
                },
                "",
            );
        }
        let seqs: Vec<u64> = log.events().iter().map(|e| e.sequence).collect();
        assert_eq!(seqs, vec![1, 2, 3]);

        let mut events = log.events().to_vec();
        events.remove(1);
        assert!(AuditLog::from_events(events).is_err());
    }

    #[test]
    fn line_round_trip() {
        let mut log = AuditLog::default();
        let e = log
            .append(
                DateTime::UNIX_EPOCH,
                Actor::System,
                "V000001",
                AuditAction::ValidateEnvelope {
                    envelope_id: "env-1".into(),
                    election_id: "E".into(),
                    status: Disposition::Valid,
                    matched_index: Some(2),
                },
                "matched",
            )
            .clone();
        let line = e.to_line();
        assert!(!line.contains('\n'));
        assert!(line.contains("\"VALIDATE_ENVELOPE\""));
        assert_eq!(AuditEvent::from_line(&line).unwrap(), e);
    }
}
