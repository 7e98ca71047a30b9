use std::fmt;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{CodegenError, DOMAIN_SECRET};

pub const SECRET_LEN: usize = 32;

/// The key a voter shares with the registrar. Every code the voter writes on
/// an envelope is derived from it.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharedSecret {
    #[serde(with = "hex_bytes")]
    bytes: [u8; SECRET_LEN],
    version: u32,
    created_at: DateTime<Utc>,
}

impl SharedSecret {
    pub fn from_bytes(bytes: [u8; SECRET_LEN], version: u32, created_at: DateTime<Utc>) -> Self {
        assert!(version >= 1, "secret versions start at 1");
        Self {
            bytes,
            version,
            created_at,
        }
    }

    /// Parses a 64-character hex string into a version 1 secret.
    pub fn from_hex(text: &str, created_at: DateTime<Utc>) -> Result<Self, CodegenError> {
        let mut bytes = [0u8; SECRET_LEN];
        hex::decode_to_slice(text.trim(), &mut bytes)
            .map_err(|e| CodegenError::MalformedInput(format!("secret hex: {e}")))?;
        Ok(Self::from_bytes(bytes, 1, created_at))
    }

    pub fn bytes(&self) -> &[u8; SECRET_LEN] {
        &self.bytes
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.bytes)
    }

    pub fn version(&self) -> u32 {
        self.version
    }

    pub fn created_at(&self) -> DateTime<Utc> {
        self.created_at
    }

    /// Short public identifier of the secret, safe to log.
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::new()
            .chain_update([super::DOMAIN_FINGERPRINT])
            .chain_update(self.bytes)
            .finalize();
        hex::encode(&digest[..8])
    }

    /// Replacement secret one version up.
    pub(crate) fn successor(&self, bytes: [u8; SECRET_LEN], created_at: DateTime<Utc>) -> Self {
        Self::from_bytes(bytes, self.version + 1, created_at)
    }
}

impl fmt::Debug for SharedSecret {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SharedSecret")
            .field("bytes", &"<redacted>")
            .field("fingerprint", &self.fingerprint())
            .field("version", &self.version)
            .field("created_at", &self.created_at)
            .finish()
    }
}

/// `SHA-256(0x00 || registration_blob || nonce)`.
pub fn derive_secret_bytes(registration_blob: &[u8], nonce: &[u8]) -> Result<[u8; SECRET_LEN], CodegenError> {
    if registration_blob.is_empty() {
        return Err(CodegenError::MalformedInput("registration blob is empty".into()));
    }
    if nonce.is_empty() {
        return Err(CodegenError::MalformedInput("nonce is empty".into()));
    }
    Ok(Sha256::new()
        .chain_update([DOMAIN_SECRET])
        .chain_update(registration_blob)
        .chain_update(nonce)
        .finalize()
        .into())
}

/// Derives a version 1 secret from the canonical registration bytes and a
/// fresh random nonce. The nonce must come from a CSPRNG; this function only
/// checks that it is present.
pub fn derive_secret(
    registration_blob: &[u8],
    nonce: &[u8],
    created_at: DateTime<Utc>,
) -> Result<SharedSecret, CodegenError> {
    derive_secret_bytes(registration_blob, nonce).map(|bytes| SharedSecret::from_bytes(bytes, 1, created_at))
}

mod hex_bytes {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bytes: &[u8; 32], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[u8; 32], D::Error> {
        let text = String::deserialize(d)?;
        let mut out = [0u8; 32];
        hex::decode_to_slice(&text, &mut out).map_err(D::Error::custom)?;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn epoch() -> DateTime<Utc> {
        DateTime::UNIX_EPOCH
    }

    #[test]
    fn golden_derivation() {
        // Frozen from tests/data/reference_vectors.py (hashlib).
        let zero = derive_secret(b"abc", &[0u8; 32], epoch()).unwrap();
        assert_eq!(
            zero.to_hex(),
            "e50d154bd792fbe03c717d20a06aa4e6dd38d98bf3dc6305dec983dbb26c3fe3"
        );
        assert_eq!(zero.version(), 1);
        let ff = derive_secret(b"abc", &[0xff; 32], epoch()).unwrap();
        assert_eq!(
            ff.to_hex(),
            "fecedb11e076305c1d64484611985cdc459a81dc227b151cd0d6d4a85703536e"
        );
    }

    #[test]
    fn deterministic() {
        let a = derive_secret(b"abc", &[7u8; 32], epoch()).unwrap();
        let b = derive_secret(b"abc", &[7u8; 32], epoch()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_inputs_rejected() {
        assert!(matches!(
            derive_secret(b"", &[0u8; 32], epoch()),
            Err(CodegenError::MalformedInput(_))
        ));
        assert!(matches!(
            derive_secret(b"abc", &[], epoch()),
            Err(CodegenError::MalformedInput(_))
        ));
    }

    #[test]
    fn debug_never_prints_bytes() {
        let s = derive_secret(b"abc", &[0u8; 32], epoch()).unwrap();
        let shown = format!("{s:?}");
        assert!(!shown.contains(&s.to_hex()));
        assert!(shown.contains("redacted"));
    }

    #[test]
    fn serde_round_trip() {
        let s = derive_secret(b"abc", &[3u8; 32], epoch()).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        let back: SharedSecret = serde_json::from_str(&json).unwrap();
        assert_eq!(s, back);
    }
}
