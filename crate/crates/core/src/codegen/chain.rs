use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{CodegenError, SharedSecret, DOMAIN_CHAIN_SEED, DOMAIN_CHAIN_STEP};

/// Default number of codes per (secret, election) chain.
pub const DEFAULT_MAX_CHAIN_LENGTH: u32 = 1024;

/// One link of a voter's per-election hash chain.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainValue {
    bytes: [u8; 32],
    index: u32,
    election_id: String,
}

impl ChainValue {
    pub fn bytes(&self) -> &[u8; 32] {
        &self.bytes
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn election_id(&self) -> &str {
        &self.election_id
    }

    /// Builds a value from raw parts. Intended for tests and vector tooling.
    pub fn from_parts(bytes: [u8; 32], index: u32, election_id: impl Into<String>) -> Self {
        Self {
            bytes,
            index,
            election_id: election_id.into(),
        }
    }

    /// The next link: `SHA-256(0x02 || value)`.
    pub fn next(&self) -> ChainValue {
        ChainValue {
            bytes: step(&self.bytes),
            index: self.index + 1,
            election_id: self.election_id.clone(),
        }
    }
}

impl std::fmt::Debug for ChainValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "ChainValue({}#{} {})",
            self.election_id,
            self.index,
            hex::encode(&self.bytes[..6])
        )
    }
}

fn seed(secret: &SharedSecret, election_id: &str) -> [u8; 32] {
    Sha256::new()
        .chain_update([DOMAIN_CHAIN_SEED])
        .chain_update(secret.bytes())
        .chain_update(election_id.as_bytes())
        .finalize()
        .into()
}

fn step(prev: &[u8; 32]) -> [u8; 32] {
    Sha256::new()
        .chain_update([DOMAIN_CHAIN_STEP])
        .chain_update(prev)
        .finalize()
        .into()
}

/// Chain parameters shared by the registrar and validator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainConfig {
    /// Number of usable indices; valid indices are `0..max_chain_length`.
    pub max_chain_length: u32,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            max_chain_length: DEFAULT_MAX_CHAIN_LENGTH,
        }
    }
}

impl ChainConfig {
    pub fn check_index(&self, index: u32) -> Result<(), CodegenError> {
        if index >= self.max_chain_length {
            Err(CodegenError::ChainExhausted {
                index,
                max: self.max_chain_length,
            })
        } else {
            Ok(())
        }
    }

    /// Value at `index` of the chain for `(secret, election_id)`.
    pub fn chain_value(
        &self,
        secret: &SharedSecret,
        election_id: &str,
        index: u32,
    ) -> Result<ChainValue, CodegenError> {
        self.check_index(index)?;
        let mut walker = self.walk(secret, election_id)?;
        Ok(walker.nth(index as usize).expect("index checked against bound"))
    }

    /// Iterates the chain from index 0 up to the configured bound.
    pub fn walk(&self, secret: &SharedSecret, election_id: &str) -> Result<ChainWalk, CodegenError> {
        if election_id.is_empty() {
            return Err(CodegenError::MalformedInput("election id is empty".into()));
        }
        Ok(ChainWalk {
            next: Some(ChainValue {
                bytes: seed(secret, election_id),
                index: 0,
                election_id: election_id.to_owned(),
            }),
            limit: self.max_chain_length,
        })
    }
}

/// `chain_value` under the default chain bound.
pub fn chain_value(secret: &SharedSecret, election_id: &str, index: u32) -> Result<ChainValue, CodegenError> {
    ChainConfig::default().chain_value(secret, election_id, index)
}

/// Iterator over successive chain values.
#[derive(Debug, Clone)]
pub struct ChainWalk {
    next: Option<ChainValue>,
    limit: u32,
}

impl Iterator for ChainWalk {
    type Item = ChainValue;

    fn next(&mut self) -> Option<ChainValue> {
        let current = self.next.take()?;
        if current.index >= self.limit {
            return None;
        }
        if current.index + 1 < self.limit {
            self.next = Some(current.next());
        }
        Some(current)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::DateTime;

    fn secret11() -> SharedSecret {
        SharedSecret::from_bytes([0x11; 32], 1, DateTime::UNIX_EPOCH)
    }

    #[test]
    fn golden_values() {
        // Frozen from tests/data/reference_vectors.py --extras.
        let s = secret11();
        let cases = [
            (0, "13bc7527e57e8c288e594a978cb74ca74bd21fc8270ef63d21535556b1dad879"),
            (1, "d1449f58d1a50795ba219940d58c595b68663140aaa6ec66c986dee05ab1638d"),
            (64, "86e76c62392601a3740d8bb6b852e29825acfde9bd23ed2de8c126f27087bfa0"),
        ];
        for (i, expected) in cases {
            let v = chain_value(&s, "GEN-2024", i).unwrap();
            assert_eq!(hex::encode(v.bytes()), expected, "index {i}");
            assert_eq!(v.index(), i);
        }
    }

    #[test]
    fn election_binding() {
        let s = secret11();
        let a = chain_value(&s, "A", 0).unwrap();
        let b = chain_value(&s, "B", 0).unwrap();
        assert_eq!(
            hex::encode(a.bytes()),
            "bfce33d53daf7341003c08a2cca4f755ce65053e418c6902ce3d8d6426c0a61e"
        );
        assert_eq!(
            hex::encode(b.bytes()),
            "71696e9135915a828a349988aafbd47594a2285bec8791c9ca5af2232228e3bb"
        );
        assert_ne!(a.bytes(), b.bytes());
    }

    #[test]
    fn recurrence_holds_over_first_65() {
        let s = secret11();
        for i in 0..=64u32 {
            let here = chain_value(&s, "GEN-2024", i).unwrap();
            let there = chain_value(&s, "GEN-2024", i + 1).unwrap();
            let mut input = vec![0x02];
            input.extend_from_slice(here.bytes());
            let expected: [u8; 32] = Sha256::digest(&input).into();
            assert_eq!(there.bytes(), &expected);
        }
    }

    #[test]
    fn bound_enforced() {
        let s = secret11();
        let cfg = ChainConfig::default();
        assert!(cfg.chain_value(&s, "E", 1023).is_ok());
        assert!(matches!(
            cfg.chain_value(&s, "E", 1024),
            Err(CodegenError::ChainExhausted { index: 1024, max: 1024 })
        ));
        assert_eq!(cfg.walk(&s, "E").unwrap().count(), 1024);
        let small = ChainConfig { max_chain_length: 3 };
        assert_eq!(small.walk(&s, "E").unwrap().last().unwrap().index(), 2);
    }

    #[test]
    fn empty_election_rejected() {
        assert!(matches!(
            chain_value(&secret11(), "", 0),
            Err(CodegenError::MalformedInput(_))
        ));
    }
}
