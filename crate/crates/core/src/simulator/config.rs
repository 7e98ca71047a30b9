use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::codegen::CodeFormat;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("config field {field}: {message}")]
    InvalidField { field: String, message: String },
    #[error("config line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("outcomes are not comparable: {0}")]
    ConfigMismatch(String),
    #[error("scenario setup failed: {0}")]
    Setup(String),
}

/// One threat-model scenario. All rates default to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub n_voters: usize,
    pub election_id: String,
    pub format: CodeFormat,
    /// Fraction of voters whose ballot a coercer takes over.
    pub coercion_rate: f64,
    /// Fraction of the remaining voters for whom an impersonator mails a ballot.
    pub impersonation_rate: f64,
    /// Per-code probability of one substituted digit (numeric formats).
    pub digit_typo_rate: f64,
    /// Per-code probability of one single-character edit in one word (word formats).
    pub word_typo_rate: f64,
    /// Fraction of coerced voters who advance their code before the ballot arrives.
    pub cancel_probability: f64,
    pub rng_seed: u64,
    pub window: u32,
    pub back_scan: u32,
    /// Handwritten-signature model used for side-by-side comparison, if set.
    pub baseline_false_accept: Option<f64>,
    pub baseline_false_reject: Option<f64>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n_voters: 1000,
            election_id: "GEN-2024".into(),
            format: CodeFormat::NUMERIC_20,
            coercion_rate: 0.0,
            impersonation_rate: 0.0,
            digit_typo_rate: 0.0,
            word_typo_rate: 0.0,
            cancel_probability: 0.0,
            rng_seed: 0,
            window: 3,
            back_scan: 8,
            baseline_false_accept: None,
            baseline_false_reject: None,
        }
    }
}

fn invalid(field: &str, message: impl Into<String>) -> SimError {
    SimError::InvalidField {
        field: field.into(),
        message: message.into(),
    }
}

fn check_rate(field: &str, v: f64) -> Result<(), SimError> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(invalid(field, format!("{v} is outside [0, 1]")))
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.n_voters < 1 {
            return Err(invalid("n_voters", "must be at least 1"));
        }
        if self.election_id.trim().is_empty() {
            return Err(invalid("election_id", "must not be empty"));
        }
        self.format.validated().map_err(|e| invalid("format", e.to_string()))?;
        for (field, v) in [
            ("coercion_rate", self.coercion_rate),
            ("impersonation_rate", self.impersonation_rate),
            ("digit_typo_rate", self.digit_typo_rate),
            ("word_typo_rate", self.word_typo_rate),
            ("cancel_probability", self.cancel_probability),
        ] {
            check_rate(field, v)?;
        }
        if let Some(v) = self.baseline_false_accept {
            check_rate("baseline_false_accept", v)?;
        }
        if let Some(v) = self.baseline_false_reject {
            check_rate("baseline_false_reject", v)?;
        }
        Ok(())
    }

    /// Both baseline parameters, when the config asks for a comparison.
    pub fn baseline(&self) -> Option<(f64, f64)> {
        self.baseline_false_accept.zip(self.baseline_false_reject)
    }

    /// Parses `key = value` lines. `#` starts a comment. Keys are the field names.
    pub fn parse(text: &str) -> Result<ScenarioConfig, SimError> {
        let mut cfg = ScenarioConfig::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| SimError::Syntax {
                line: n + 1,
                message: format!("expected key = value, got {line:?}"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let num = |field: &str| -> Result<f64, SimError> {
                value
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| invalid(field, format!("{value:?} is not a number")))
            };
            let int = |field: &str| -> Result<u64, SimError> {
                value
                    .parse::<u64>()
                    .map_err(|_| invalid(field, format!("{value:?} is not a non-negative integer")))
            };
            match key {
                "n_voters" => cfg.n_voters = int(key)? as usize,
                "election_id" => cfg.election_id = value.to_owned(),
                "format" => {
                    cfg.format = value
                        .parse()
                        .map_err(|e: crate::codegen::CodegenError| invalid(key, e.to_string()))?
                }
                "coercion_rate" => cfg.coercion_rate = num(key)?,
                "impersonation_rate" => cfg.impersonation_rate = num(key)?,
                "digit_typo_rate" => cfg.digit_typo_rate = num(key)?,
                "word_typo_rate" => cfg.word_typo_rate = num(key)?,
                "cancel_probability" => cfg.cancel_probability = num(key)?,
                "rng_seed" => cfg.rng_seed = int(key)?,
                "window" => cfg.window = int(key)? as u32,
                "back_scan" => cfg.back_scan = int(key)? as u32,
                "baseline_false_accept" => cfg.baseline_false_accept = Some(num(key)?),
                "baseline_false_reject" => cfg.baseline_false_reject = Some(num(key)?),
                other => return Err(invalid(other, "unknown field")),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "n_voters = {}", self.n_voters);
        let _ = writeln!(s, "election_id = {}", self.election_id);
        let _ = writeln!(s, "format = {}", self.format);
        let _ = writeln!(s, "coercion_rate = {}", self.coercion_rate);
        let _ = writeln!(s, "impersonation_rate = {}", self.impersonation_rate);
        let _ = writeln!(s, "digit_typo_rate = {}", self.digit_typo_rate);
        let _ = writeln!(s, "word_typo_rate = {}", self.word_typo_rate);
        let _ = writeln!(s, "cancel_probability = {}", self.cancel_probability);
        let _ = writeln!(s, "rng_seed = {}", self.rng_seed);
        let _ = writeln!(s, "window = {}", self.window);
        let _ = writeln!(s, "back_scan = {}", self.back_scan);
        if let Some(v) = self.baseline_false_accept {
            let _ = writeln!(s, "baseline_false_accept = {v}");
        }
        if let Some(v) = self.baseline_false_reject {
            let _ = writeln!(s, "baseline_false_reject = {v}");
        }
        s
    }
}
