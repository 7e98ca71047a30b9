//! Envelope signature codes for mailed ballots.
//!
//! Voters write a short code derived from a secret they share with the
//! election office instead of a handwritten signature. The office recomputes
//! the code and counts the ballot only when it matches. Voters can advance
//! their code at any time, which cancels a ballot a coercer has already
//! mailed with the old one.
//!
//! - [`codegen`]: secret derivation, hash chains, numeric and word renderings.
//! - [`registrar`]: voter records, secret rotation, chain positions, audit log, store file.
//! - [`validation`]: envelope dispositions, batch processing and reports.
//! - [`simulator`]: seeded coercion / impersonation / transcription-noise scenarios.

pub mod clock;
pub mod codegen;
pub mod par;
pub mod registrar;
pub mod simulator;
pub mod validation;

pub use clock::{Clock, ManualClock, SystemClock};
pub use codegen::{ChainValue, CodeFormat, RenderedCode, SharedSecret, Wordlist};
pub use registrar::{Registrar, RegistrarError, RegistrationFields};
pub use validation::{Disposition, EnvelopeRecord, ValidationConfig, ValidationResult};
