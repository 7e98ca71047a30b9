//! Bearer-token sessions.

use std::collections::HashMap;

use chrono::{DateTime, Duration, Utc};
use rand::RngCore;
use serde::{Deserialize, Serialize};
use subtle::ConstantTimeEq;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "voter_id", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Principal {
    Voter(String),
    Official,
}

impl Principal {
    /// Officials may act on any voter; voters only on themselves.
    pub fn may_access(&self, voter_id: &str) -> bool {
        match self {
            Principal::Official => true,
            Principal::Voter(own) => own == voter_id,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiSession {
    pub principal: Principal,
    pub token: String,
    pub expires_at: DateTime<Utc>,
}

#[derive(Debug)]
pub struct Sessions {
    official_token: String,
    ttl: Duration,
    voters: HashMap<String, ApiSession>,
}

impl Sessions {
    pub fn new(official_token: impl Into<String>, ttl: Duration) -> Self {
        Self {
            official_token: official_token.into(),
            ttl,
            voters: HashMap::new(),
        }
    }

    pub fn issue_voter(&mut self, voter_id: &str, now: DateTime<Utc>) -> ApiSession {
        let mut raw = [0u8; 24];
        rand::rng().fill_bytes(&mut raw);
        let session = ApiSession {
            principal: Principal::Voter(voter_id.to_owned()),
            token: format!("vt_{}", hex::encode(raw)),
            expires_at: now + self.ttl,
        };
        self.voters.insert(session.token.clone(), session.clone());
        session
    }

    pub fn authenticate(&mut self, token: &str, now: DateTime<Utc>) -> Option<Principal> {
        if !self.official_token.is_empty() && constant_eq(token.as_bytes(), self.official_token.as_bytes()) {
            return Some(Principal::Official);
        }
        match self.voters.get(token) {
            Some(s) if s.expires_at > now => Some(s.principal.clone()),
            Some(_) => {
                self.voters.remove(token);
                None
            }
            None => None,
        }
    }
}

fn constant_eq(a: &[u8], b: &[u8]) -> bool {
    a.ct_eq(b).into()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_expire() {
        let t = DateTime::UNIX_EPOCH;
        let mut s = Sessions::new("official", Duration::hours(1));
        let v = s.issue_voter("V000001", t);
        assert_eq!(s.authenticate(&v.token, t), Some(Principal::Voter("V000001".into())));
        assert_eq!(s.authenticate("official", t), Some(Principal::Official));
        assert_eq!(s.authenticate("nope", t), None);
        assert_eq!(s.authenticate(&v.token, t + Duration::hours(2)), None);
    }

    #[test]
    fn empty_official_token_never_matches() {
        let mut s = Sessions::new("", Duration::hours(1));
        assert_eq!(s.authenticate("", DateTime::UNIX_EPOCH), None);
    }
}
