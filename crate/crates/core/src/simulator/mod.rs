//! Seeded threat-model scenarios.
//!
//! A scenario registers a voter population, decides per voter whether a
//! coercer takes the ballot, an impersonator mails one, or the voter votes
//! honestly, optionally corrupts the transcription, and runs the resulting
//! batch through the validator. A second model replaces cryptographic
//! validation with Bernoulli handwritten-signature checks for comparison.
//!
//! Per-voter randomness comes from its own ChaCha8 stream (stream `i + 1` of
//! the scenario seed), drawn in a fixed order regardless of outcome. Changing
//! one rate therefore only moves thresholds; it never reshuffles the draws.
//!
//! Insider and nation-state adversaries are not simulated: the scheme makes
//! no claim against them.

mod config;
pub mod noise;

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::sync::Arc;

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clock::ManualClock;
use crate::codegen::{self, ChainConfig, ChainValue, Wordlist};
use crate::par::{self, Execution};
use crate::registrar::{Registrar, RegistrationFields, SeededNonceSource};
use crate::validation::{validate_batch, BatchReport, Disposition, EnvelopeRecord, Summary, ValidationConfig};

pub use config::{ScenarioConfig, SimError};

/// Salt mixed into the scenario seed for registration nonces.
const NONCE_SALT: u64 = 0x6e6f_6e63_655f_7365;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EnvelopeClass {
    Honest,
    Coerced,
    Impersonation,
}

impl EnvelopeClass {
    pub const ALL: [EnvelopeClass; 3] = [
        EnvelopeClass::Honest,
        EnvelopeClass::Coerced,
        EnvelopeClass::Impersonation,
    ];
}

impl fmt::Display for EnvelopeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EnvelopeClass::Honest => "honest",
            EnvelopeClass::Coerced => "coerced",
            EnvelopeClass::Impersonation => "impersonation",
        })
    }
}

/// What happened to one injected envelope.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub envelope_id: String,
    pub voter_id: String,
    pub class: EnvelopeClass,
    pub noised: bool,
    pub cancelled: bool,
    pub status: Disposition,
    pub matched_index: Option<u32>,
    pub corrections: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioOutcome {
    pub config: ScenarioConfig,
    /// Which model produced the dispositions.
    pub model: Model,
    pub counts: Summary,
    pub by_class: BTreeMap<EnvelopeClass, Summary>,
    /// Fraction of coerced envelopes that were not counted.
    pub coercion_detection_rate: Option<f64>,
    /// Fraction of impersonation envelopes that were not counted.
    pub impersonation_detection_rate: Option<f64>,
    /// MALFORMED share of envelopes written by the voter or coercer.
    pub transcription_failure_rate: f64,
    pub trace: Vec<TraceEntry>,
    pub report: BatchReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    SignatureCodes,
    HandwrittenBaseline { false_accept: f64, false_reject: f64 },
}

impl ScenarioOutcome {
    pub fn envelopes(&self) -> usize {
        self.trace.len()
    }

    pub fn class_summary(&self, class: EnvelopeClass) -> Summary {
        self.by_class.get(&class).cloned().unwrap_or_default()
    }

    fn accepted_rate(&self, class: EnvelopeClass) -> Option<f64> {
        let s = self.class_summary(class);
        (s.total() > 0).then(|| s.count(Disposition::Valid) as f64 / s.total() as f64)
    }

    fn build(config: ScenarioConfig, model: Model, trace: Vec<TraceEntry>, report: BatchReport) -> Self {
        let mut by_class: BTreeMap<EnvelopeClass, Summary> = BTreeMap::new();
        for t in &trace {
            by_class.entry(t.class).or_default().add(t.status);
        }
        let detection = |class| {
            by_class
                .get(&class)
                .filter(|s| s.total() > 0)
                .map(|s| 1.0 - s.count(Disposition::Valid) as f64 / s.total() as f64)
        };
        let written: Vec<&TraceEntry> = trace
            .iter()
            .filter(|t| t.class != EnvelopeClass::Impersonation)
            .collect();
        let transcription_failure_rate = if written.is_empty() {
            0.0
        } else {
            written.iter().filter(|t| t.status == Disposition::Malformed).count() as f64 / written.len() as f64
        };
        ScenarioOutcome {
            coercion_detection_rate: detection(EnvelopeClass::Coerced),
            impersonation_detection_rate: detection(EnvelopeClass::Impersonation),
            counts: report.summary.clone(),
            by_class,
            transcription_failure_rate,
            trace,
            report,
            model,
            config,
        }
    }

    /// Aligned plain-text summary.
    pub fn summary_table(&self) -> String {
        let mut s = String::new();
        let model = match self.model {
            Model::SignatureCodes => "signature codes".to_owned(),
            Model::HandwrittenBaseline {
                false_accept,
                false_reject,
            } => {
                format!("handwritten baseline (false accept {false_accept}, false reject {false_reject})")
            }
        };
        let _ = writeln!(
            s,
            "scenario: {} voters, {} envelopes, seed {}, {}",
            self.config.n_voters,
            self.envelopes(),
            self.config.rng_seed,
            model
        );
        let _ = writeln!(
            s,
            "{:<14} {:>8} {:>8} {:>8} {:>14}",
            "status", "honest", "coerced", "imperson", "total"
        );
        for d in Disposition::ALL {
            let _ = writeln!(
                s,
                "{:<14} {:>8} {:>8} {:>8} {:>14}",
                d.as_str(),
                self.class_summary(EnvelopeClass::Honest).count(d),
                self.class_summary(EnvelopeClass::Coerced).count(d),
                self.class_summary(EnvelopeClass::Impersonation).count(d),
                self.counts.count(d)
            );
        }
        let rate = |r: Option<f64>| r.map(|v| format!("{:.4}", v)).unwrap_or_else(|| "n/a".into());
        let _ = writeln!(
            s,
            "coercion detection rate:      {}",
            rate(self.coercion_detection_rate)
        );
        let _ = writeln!(
            s,
            "impersonation detection rate: {}",
            rate(self.impersonation_detection_rate)
        );
        let _ = writeln!(
            s,
            "transcription failure rate:   {:.4}",
            self.transcription_failure_rate
        );
        let _ = writeln!(
            s,
            "note: typo rates (digit {}, word {}) are placeholders, not measured human error rates",
            self.config.digit_typo_rate, self.config.word_typo_rate
        );
        s
    }
}

/// Draws for one voter, taken in a fixed order.
struct VoterDraws {
    coerce: f64,
    impersonate: f64,
    cancel: f64,
    typo: f64,
    typo_a: u64,
    typo_b: u64,
    forged: [u8; 32],
}

impl VoterDraws {
    fn new(seed: u64, voter: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(voter as u64 + 1);
        let coerce = rng.random();
        let impersonate = rng.random();
        let cancel = rng.random();
        let typo = rng.random();
        let typo_a = rng.next_u64();
        let typo_b = rng.next_u64();
        let mut forged = [0u8; 32];
        rng.fill_bytes(&mut forged);
        Self {
            coerce,
            impersonate,
            cancel,
            typo,
            typo_a,
            typo_b,
            forged,
        }
    }

    fn class(&self, cfg: &ScenarioConfig) -> EnvelopeClass {
        if self.coerce < cfg.coercion_rate {
            EnvelopeClass::Coerced
        } else if self.impersonate < cfg.impersonation_rate {
            EnvelopeClass::Impersonation
        } else {
            EnvelopeClass::Honest
        }
    }
}

fn start_time() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2024, 11, 5, 0, 0, 0).single().expect("valid date")
}

pub fn voter_fields(i: usize) -> RegistrationFields {
    RegistrationFields::new(
        format!("Simulated Voter {i}"),
        format!("{i} Simulation Way"),
        format!("19{:02}-01-01", i % 100),
    )
}

/// Nonce seed used by a scenario's registrar; replaying its audit log needs it.
pub fn nonce_seed(cfg: &ScenarioConfig) -> u64 {
    cfg.rng_seed ^ NONCE_SALT
}

/// Runs the signature-code model.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioOutcome, SimError> {
    run_scenario_with_registrar(config).map(|(o, _)| o)
}

/// Runs the signature-code model and also returns the registrar it built.
pub fn run_scenario_with_registrar(config: &ScenarioConfig) -> Result<(ScenarioOutcome, Registrar), SimError> {
    config.validate()?;
    let setup = |e: crate::registrar::RegistrarError| SimError::Setup(e.to_string());
    let clock = ManualClock::new(start_time());
    let wordlist = Wordlist::english();
    let mut registrar = Registrar::new(
        ChainConfig::default(),
        Box::new(SeededNonceSource::new(nonce_seed(config))),
        Arc::new(clock.clone()),
        wordlist.clone(),
    );
    registrar.open_election(&config.election_id).map_err(setup)?;
    let mut voter_ids = Vec::with_capacity(config.n_voters);
    for i in 0..config.n_voters {
        voter_ids.push(registrar.register_voter(voter_fields(i)).map_err(setup)?.voter_id);
    }
    clock.advance(Duration::days(1));

    let typo_rate = match config.format {
        codegen::CodeFormat::Numeric(_) => config.digit_typo_rate,
        codegen::CodeFormat::Words(_) => config.word_typo_rate,
    };
    let mut envelopes = Vec::with_capacity(config.n_voters);
    let mut trace = Vec::with_capacity(config.n_voters);
    for (i, voter_id) in voter_ids.iter().enumerate() {
        let draws = VoterDraws::new(config.rng_seed, i);
        let class = draws.class(config);
        let mut cancelled = false;
        let mut noised = false;
        let code = match class {
            EnvelopeClass::Impersonation => {
                let fake = ChainValue::from_parts(draws.forged, 0, config.election_id.clone());
                codegen::render(&fake, config.format, &wordlist)
                    .map_err(|e| SimError::Setup(e.to_string()))?
                    .text
            }
            EnvelopeClass::Honest | EnvelopeClass::Coerced => {
                let mut text = registrar
                    .current_code(voter_id, &config.election_id, config.format)
                    .map_err(setup)?
                    .text;
                if draws.typo < typo_rate {
                    text = noise::apply(&text, config.format, draws.typo_a, draws.typo_b);
                    noised = true;
                }
                if class == EnvelopeClass::Coerced && draws.cancel < config.cancel_probability {
                    registrar.advance_index(voter_id, &config.election_id).map_err(setup)?;
                    cancelled = true;
                }
                text
            }
        };
        let envelope_id = format!("ENV-{i:06}");
        envelopes.push(EnvelopeRecord {
            envelope_id: envelope_id.clone(),
            voter_id: voter_id.clone(),
            election_id: config.election_id.clone(),
            code_text: code,
            received_at: start_time() + Duration::days(2) + Duration::seconds(i as i64),
        });
        trace.push(TraceEntry {
            envelope_id,
            voter_id: voter_id.clone(),
            class,
            noised,
            cancelled,
            status: Disposition::Invalid,
            matched_index: None,
            corrections: 0,
        });
    }
    clock.advance(Duration::days(3));

    let validation = ValidationConfig::new(config.window, config.back_scan);
    let report = validate_batch(&mut registrar, envelopes, &validation);
    // Envelope ids sort in voter order, as do the receipt times.
    for (t, r) in trace.iter_mut().zip(&report.results) {
        debug_assert_eq!(t.envelope_id, r.envelope_id);
        t.status = r.status;
        t.matched_index = r.matched_index;
        t.corrections = r.corrections;
    }
    Ok((
        ScenarioOutcome::build(config.clone(), Model::SignatureCodes, trace, report),
        registrar,
    ))
}

/// Handwritten-signature model on the same population.
///
/// One `f64` is drawn per envelope, in envelope order, from the default
/// ChaCha8 stream of the scenario seed. Honest envelopes are rejected when
/// the draw is below `false_reject`; coerced and impersonation envelopes are
/// accepted when it is below `false_accept`. Accepted means VALID, rejected
/// means INVALID.
pub fn run_baseline(
    config: &ScenarioConfig,
    false_accept: f64,
    false_reject: f64,
) -> Result<ScenarioOutcome, SimError> {
    config.validate()?;
    for (field, v) in [("false_accept", false_accept), ("false_reject", false_reject)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(SimError::InvalidField {
                field: field.into(),
                message: format!("{v} is outside [0, 1]"),
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut trace = Vec::with_capacity(config.n_voters);
    let mut results = Vec::with_capacity(config.n_voters);
    for i in 0..config.n_voters {
        let class = VoterDraws::new(config.rng_seed, i).class(config);
        let u: f64 = rng.random();
        let accepted = match class {
            EnvelopeClass::Honest => u >= false_reject,
            EnvelopeClass::Coerced | EnvelopeClass::Impersonation => u < false_accept,
        };
        let status = if accepted {
            Disposition::Valid
        } else {
            Disposition::Invalid
        };
        let envelope_id = format!("ENV-{i:06}");
        let voter_id = format!("V{:06}", i + 1);
        trace.push(TraceEntry {
            envelope_id: envelope_id.clone(),
            voter_id: voter_id.clone(),
            class,
            noised: false,
            cancelled: false,
            status,
            matched_index: None,
            corrections: 0,
        });
        results.push(crate::validation::ValidationResult {
            envelope_id,
            voter_id,
            election_id: config.election_id.clone(),
            status,
            matched_index: None,
            corrections: 0,
            reason: if accepted {
                "signature accepted"
            } else {
                "signature rejected"
            }
            .into(),
        });
    }
    Ok(ScenarioOutcome::build(
        config.clone(),
        Model::HandwrittenBaseline {
            false_accept,
            false_reject,
        },
        trace,
        BatchReport::new(results),
    ))
}

/// Runs independent scenarios, in parallel when available. Each run is
/// itself deterministic, so the output does not depend on `execution`.
pub fn run_scenarios(configs: Vec<ScenarioConfig>, execution: Execution) -> Vec<Result<ScenarioOutcome, SimError>> {
    par::map(execution, configs, |c| run_scenario(&c))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub class: EnvelopeClass,
    pub envelopes: usize,
    pub scheme_accept_rate: f64,
    pub baseline_accept_rate: f64,
    /// Positive when the signature-code scheme does better: fewer adversarial
    /// envelopes counted, or more honest ones.
    pub improvement: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
    pub scheme_expired_rate_coerced: Option<f64>,
}

impl Comparison {
    pub fn row(&self, class: EnvelopeClass) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.class == class)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<14} {:>9} {:>14} {:>16} {:>12}",
            "class", "envelopes", "scheme_accept", "baseline_accept", "improvement"
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:<14} {:>9} {:>14.4} {:>16.4} {:>+12.4}",
                r.class.to_string(),
                r.envelopes,
                r.scheme_accept_rate,
                r.baseline_accept_rate,
                r.improvement
            );
        }
        if let Some(e) = self.scheme_expired_rate_coerced {
            let _ = writeln!(s, "coerced envelopes cancelled as EXPIRED: {e:.4}");
        }
        s.push_str("not simulated: insiders and nation-state attackers (no mitigation claimed)\n");
        s
    }
}

/// Side-by-side rates per adversary class.
pub fn compare_report(scheme: &ScenarioOutcome, baseline: &ScenarioOutcome) -> Result<Comparison, SimError> {
    let (a, b) = (&scheme.config, &baseline.config);
    let mismatch = |what: &str| Err(SimError::ConfigMismatch(format!("{what} differs")));
    if a.n_voters != b.n_voters {
        return mismatch("n_voters");
    }
    if a.rng_seed != b.rng_seed {
        return mismatch("rng_seed");
    }
    if a.coercion_rate != b.coercion_rate || a.impersonation_rate != b.impersonation_rate {
        return mismatch("adversary mix");
    }
    let rows = EnvelopeClass::ALL
        .into_iter()
        .filter_map(|class| {
            let envelopes = scheme.class_summary(class).total();
            let s = scheme.accepted_rate(class)?;
            let b = baseline.accepted_rate(class)?;
            let improvement = match class {
                EnvelopeClass::Honest => s - b,
                _ => b - s,
            };
            Some(ComparisonRow {
                class,
                envelopes,
                scheme_accept_rate: s,
                baseline_accept_rate: b,
                improvement,
            })
        })
        .collect();
    let coerced = scheme.class_summary(EnvelopeClass::Coerced);
    Ok(Comparison {
        rows,
        scheme_expired_rate_coerced: (coerced.total() > 0)
            .then(|| coerced.count(Disposition::Expired) as f64 / coerced.total() as f64),
    })
}
