//! Golden-vector lines: `secret_hex, election_id, index, numeric20, words6`.

use super::{encode_numeric, encode_words, ChainConfig, CodegenError, SharedSecret, Wordlist};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldenVector {
    pub secret_hex: String,
    pub election_id: String,
    pub index: u32,
    pub numeric20: String,
    pub words6: String,
}

impl GoldenVector {
    pub fn to_line(&self) -> String {
        format!(
            "{}, {}, {}, {}, {}",
            self.secret_hex, self.election_id, self.index, self.numeric20, self.words6
        )
    }

    pub fn parse_line(line: &str) -> Result<GoldenVector, CodegenError> {
        let bad = || CodegenError::MalformedInput(format!("bad vector line: {line:?}"));
        // The election id may itself contain ", ", so peel fields from both ends.
        let (secret_hex, rest) = line.split_once(", ").ok_or_else(bad)?;
        let mut tail = rest.rsplitn(4, ", ");
        let words6 = tail.next().ok_or_else(bad)?;
        let numeric20 = tail.next().ok_or_else(bad)?;
        let index = tail.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let election_id = tail.next().ok_or_else(bad)?;
        Ok(GoldenVector {
            secret_hex: secret_hex.to_owned(),
            election_id: election_id.to_owned(),
            index,
            numeric20: numeric20.to_owned(),
            words6: words6.to_owned(),
        })
    }
}

/// Vectors for indices `0..=max_index` of one chain.
pub fn golden_vectors(
    secret: &SharedSecret,
    election_id: &str,
    max_index: u32,
    chain: &ChainConfig,
    wordlist: &Wordlist,
) -> Result<Vec<GoldenVector>, CodegenError> {
    chain.check_index(max_index)?;
    chain
        .walk(secret, election_id)?
        .take(max_index as usize + 1)
        .map(|value| {
            Ok(GoldenVector {
                secret_hex: secret.to_hex(),
                election_id: election_id.to_owned(),
                index: value.index(),
                numeric20: encode_numeric(&value, 20)?.text,
                words6: encode_words(&value, 6, wordlist)?.text,
            })
        })
        .collect()
}
