use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::CodegenError;

/// How a chain value is shown to a human.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum CodeFormat {
    /// Decimal digits, the last one a Damm check digit. 14 or 20 digits.
    Numeric(u8),
    /// Words from the bundled 2048-entry list. 4, 5 or 6 words.
    Words(u8),
}

impl CodeFormat {
    pub const NUMERIC_14: CodeFormat = CodeFormat::Numeric(14);
    pub const NUMERIC_20: CodeFormat = CodeFormat::Numeric(20);
    pub const WORDS_6: CodeFormat = CodeFormat::Words(6);

    pub fn numeric(digits: u8) -> Result<Self, CodegenError> {
        CodeFormat::Numeric(digits).validated()
    }

    pub fn words(count: u8) -> Result<Self, CodegenError> {
        CodeFormat::Words(count).validated()
    }

    pub fn validated(self) -> Result<Self, CodegenError> {
        let ok = match self {
            CodeFormat::Numeric(n) => n == 14 || n == 20,
            CodeFormat::Words(n) => (4..=6).contains(&n),
        };
        if ok {
            Ok(self)
        } else {
            Err(CodegenError::InvalidFormat(self.to_string()))
        }
    }

    pub fn length(self) -> u8 {
        match self {
            CodeFormat::Numeric(n) | CodeFormat::Words(n) => n,
        }
    }
}

impl fmt::Display for CodeFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeFormat::Numeric(n) => write!(f, "numeric-{n}"),
            CodeFormat::Words(n) => write!(f, "words-{n}"),
        }
    }
}

impl FromStr for CodeFormat {
    type Err = CodegenError;

    /// Accepts `numeric-20`, `words-6`, and the bare kinds `numeric` / `words`
    /// (meaning 20 digits and 6 words).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        let (kind, len) = match lower.split_once('-') {
            Some((k, n)) => (
                k.to_owned(),
                Some(n.parse::<u8>().map_err(|_| CodegenError::InvalidFormat(s.into()))?),
            ),
            None => (lower.clone(), None),
        };
        match kind.as_str() {
            "numeric" => CodeFormat::numeric(len.unwrap_or(20)),
            "words" => CodeFormat::words(len.unwrap_or(6)),
            _ => Err(CodegenError::InvalidFormat(s.into())),
        }
    }
}

impl TryFrom<String> for CodeFormat {
    type Error = CodegenError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<CodeFormat> for String {
    fn from(f: CodeFormat) -> String {
        f.to_string()
    }
}

/// A chain value as text, tagged with where it came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderedCode {
    pub text: String,
    pub format: CodeFormat,
    pub election_id: String,
    pub index: u32,
}

impl fmt::Display for RenderedCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}
