//! Single-file store.
//!
//! ```text
//! SIGCODE-STORE 1
//! META <len>\n<json>\n
//! ELECTION <len>\n<json>\n        (repeated)
//! VOTER <len>\n<json>\n           (repeated)
//! AUDIT wordlist-sha256=<hex> events=<n>
//! <one JSON audit event per line>
//! END
//! ```
//!
//! Records are length-prefixed; the audit segment is plain lines so it can be
//! tailed with ordinary tools.

use serde::{Deserialize, Serialize};

use super::{AuditEvent, AuditLog, RegistrarError, StoreState, VoterRecord};
use crate::codegen::ChainConfig;

pub const STORE_MAGIC: &str = "SIGCODE-STORE 1";

#[derive(Serialize, Deserialize)]
struct Meta {
    max_chain_length: u32,
    next_voter_number: u64,
}

fn push_record(out: &mut Vec<u8>, kind: &str, json: &[u8]) {
    out.extend_from_slice(format!("{kind} {}\n", json.len()).as_bytes());
    out.extend_from_slice(json);
    out.push(b'\n');
}

pub fn encode_store(state: &StoreState, wordlist_checksum: &[u8; 32]) -> Vec<u8> {
    let mut out = format!("{STORE_MAGIC}\n").into_bytes();
    let meta = Meta {
        max_chain_length: state.chain.max_chain_length,
        next_voter_number: state.next_voter_number,
    };
    push_record(&mut out, "META", &serde_json::to_vec(&meta).expect("meta serializes"));
    for e in &state.elections {
        push_record(&mut out, "ELECTION", &serde_json::to_vec(e).expect("string serializes"));
    }
    for v in state.voters.values() {
        push_record(&mut out, "VOTER", &serde_json::to_vec(v).expect("voter serializes"));
    }
    out.extend_from_slice(
        format!(
            "AUDIT wordlist-sha256={} events={}\n",
            hex::encode(wordlist_checksum),
            state.audit.len()
        )
        .as_bytes(),
    );
    for e in state.audit.events() {
        out.extend_from_slice(e.to_line().as_bytes());
        out.push(b'\n');
    }
    out.extend_from_slice(b"END\n");
    out
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn corrupt(&self, reason: impl Into<String>) -> RegistrarError {
        RegistrarError::StoreCorrupt {
            offset: self.pos as u64,
            reason: reason.into(),
        }
    }

    fn line(&mut self) -> Result<&'a str, RegistrarError> {
        let rest = &self.bytes[self.pos..];
        let end = rest
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| self.corrupt("unexpected end of file"))?;
        let line = std::str::from_utf8(&rest[..end]).map_err(|_| self.corrupt("invalid UTF-8"))?;
        self.pos += end + 1;
        Ok(line)
    }

    fn take(&mut self, len: usize) -> Result<&'a [u8], RegistrarError> {
        if self.bytes.len() < self.pos + len + 1 {
            return Err(self.corrupt("record runs past end of file"));
        }
        let body = &self.bytes[self.pos..self.pos + len];
        if self.bytes[self.pos + len] != b'\n' {
            return Err(RegistrarError::StoreCorrupt {
                offset: (self.pos + len) as u64,
                reason: "record length does not match body".into(),
            });
        }
        self.pos += len + 1;
        Ok(body)
    }
}

fn parse_json<T: for<'de> Deserialize<'de>>(body: &[u8], offset: usize) -> Result<T, RegistrarError> {
    serde_json::from_slice(body).map_err(|e| RegistrarError::StoreCorrupt {
        offset: offset as u64,
        reason: e.to_string(),
    })
}

pub fn decode_store(bytes: &[u8], wordlist_checksum: &[u8; 32]) -> Result<StoreState, RegistrarError> {
    let mut cur = Cursor { bytes, pos: 0 };
    if cur.line()? != STORE_MAGIC {
        return Err(RegistrarError::StoreCorrupt {
            offset: 0,
            reason: "not a sigcode store (bad header)".into(),
        });
    }
    let mut meta: Option<Meta> = None;
    let mut state = StoreState::empty(ChainConfig::default());
    let audit_header = loop {
        let at = cur.pos;
        let line = cur.line()?;
        if line.starts_with("AUDIT ") {
            break line;
        }
        let (kind, len) = line
            .split_once(' ')
            .and_then(|(k, l)| Some((k, l.parse::<usize>().ok()?)))
            .ok_or_else(|| RegistrarError::StoreCorrupt {
                offset: at as u64,
                reason: format!("bad record header {line:?}"),
            })?;
        let body_at = cur.pos;
        let body = cur.take(len)?;
        match kind {
            "META" => meta = Some(parse_json(body, body_at)?),
            "ELECTION" => {
                state.elections.insert(parse_json::<String>(body, body_at)?);
            }
            "VOTER" => {
                let v: VoterRecord = parse_json(body, body_at)?;
                state.voters.insert(v.voter_id.clone(), v);
            }
            other => {
                return Err(RegistrarError::StoreCorrupt {
                    offset: at as u64,
                    reason: format!("unknown record kind {other:?}"),
                })
            }
        }
    };
    let meta = meta.ok_or_else(|| cur.corrupt("missing META record"))?;
    state.chain = ChainConfig {
        max_chain_length: meta.max_chain_length,
    };
    state.next_voter_number = meta.next_voter_number;

    let mut checksum = None;
    let mut count = None;
    for field in audit_header["AUDIT ".len()..].split(' ') {
        match field.split_once('=') {
            Some(("wordlist-sha256", v)) => checksum = Some(v.to_owned()),
            Some(("events", v)) => count = v.parse::<usize>().ok(),
            _ => {}
        }
    }
    let (checksum, count) = checksum
        .zip(count)
        .ok_or_else(|| cur.corrupt(format!("bad audit header {audit_header:?}")))?;
    let loaded = hex::encode(wordlist_checksum);
    if checksum != loaded {
        return Err(RegistrarError::WordlistMismatch {
            store: checksum,
            loaded,
        });
    }
    let mut events = Vec::with_capacity(count);
    for _ in 0..count {
        let at = cur.pos;
        let line = cur.line()?;
        events.push(AuditEvent::from_line(line).map_err(|e| RegistrarError::StoreCorrupt {
            offset: at as u64,
            reason: format!("audit event: {e}"),
        })?);
    }
    state.audit = AuditLog::from_events(events).map_err(|(_, reason)| cur.corrupt(reason))?;
    if cur.line()? != "END" {
        return Err(cur.corrupt("missing END marker"));
    }
    if cur.pos != bytes.len() {
        return Err(cur.corrupt("trailing bytes after END"));
    }
    state.rebuild_registrations()?;
    Ok(state)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use chrono::DateTime;

    use super::*;
    use crate::clock::ManualClock;
    use crate::codegen::Wordlist;
    use crate::registrar::{Actor, Registrar, RegistrationFields, SeededNonceSource};

    fn populated() -> Registrar {
        let mut r = Registrar::new(
            ChainConfig::default(),
            Box::new(SeededNonceSource::new(1)),
            Arc::new(ManualClock::new(DateTime::UNIX_EPOCH)),
            Wordlist::english(),
        );
        r.open_election("GEN-2024").unwrap();
        for i in 0..4 {
            r.register_voter(RegistrationFields::new(format!("n{i}"), "addr, \"quoted\"\nline", "d"))
                .unwrap();
        }
        r.advance_index("V000002", "GEN-2024").unwrap();
        r.rotate_secret("V000003", Actor::Official).unwrap();
        r
    }

    #[test]
    fn round_trip() {
        let r = populated();
        let wl = Wordlist::english();
        let bytes = encode_store(r.state(), wl.checksum());
        let back = decode_store(&bytes, wl.checksum()).unwrap();
        assert_eq!(&back, r.state());
    }

    #[test]
    fn empty_store() {
        let wl = Wordlist::english();
        let bytes = encode_store(&StoreState::empty(ChainConfig::default()), wl.checksum());
        let back = decode_store(&bytes, wl.checksum()).unwrap();
        assert_eq!(back.voters.len(), 0);
        assert!(back.audit.is_empty());
    }

    #[test]
    fn truncation_is_corrupt_everywhere() {
        let r = populated();
        let wl = Wordlist::english();
        let bytes = encode_store(r.state(), wl.checksum());
        for cut in (0..bytes.len()).step_by(7) {
            match decode_store(&bytes[..cut], wl.checksum()) {
                Err(RegistrarError::StoreCorrupt { offset, .. }) => {
                    assert!(offset as usize <= cut, "offset {offset} beyond cut {cut}")
                }
                other => panic!("cut at {cut}: expected corruption, got {other:?}"),
            }
        }
    }

    #[test]
    fn wordlist_mismatch_rejected() {
        let r = populated();
        let bytes = encode_store(r.state(), &[0u8; 32]);
        assert!(matches!(
            decode_store(&bytes, Wordlist::english().checksum()),
            Err(RegistrarError::WordlistMismatch { .. })
        ));
    }

    #[test]
    fn tampered_length_reports_offset() {
        let r = populated();
        let wl = Wordlist::english();
        let text = String::from_utf8(encode_store(r.state(), wl.checksum())).unwrap();
        let meta_line_end = text.find('\n').unwrap() + 1;
        let broken = text.replacen("META ", "META 1", 1);
        match decode_store(broken.as_bytes(), wl.checksum()) {
            Err(RegistrarError::StoreCorrupt { offset, .. }) => {
                assert!(offset as usize >= meta_line_end)
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn file_round_trip() {
        let r = populated();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("store.sig");
        r.save_store(&path).unwrap();
        let back = Registrar::load_store(
            &path,
            Box::new(SeededNonceSource::new(0)),
            Arc::new(ManualClock::new(DateTime::UNIX_EPOCH)),
            Wordlist::english(),
        )
        .unwrap();
        assert_eq!(back.state(), r.state());
        // the dedup index is rebuilt on load
        let mut back = back;
        assert!(back
            .register_voter(RegistrationFields::new("N0", "addr, \"quoted\" line", "D"))
            .is_err());
    }
}
