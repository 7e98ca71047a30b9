use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{Disposition, ValidationResult};

/// Counts per disposition, always listed in [`Disposition::ALL`] order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    counts: [usize; 6],
}

impl Summary {
    pub fn count(&self, d: Disposition) -> usize {
        self.counts[d as usize]
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub(crate) fn add(&mut self, d: Disposition) {
        self.counts[d as usize] += 1;
    }

    pub fn iter(&self) -> impl Iterator<Item = (Disposition, usize)> + '_ {
        Disposition::ALL.into_iter().map(|d| (d, self.count(d)))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchReport {
    pub results: Vec<ValidationResult>,
    pub summary: Summary,
}

impl BatchReport {
    pub fn new(results: Vec<ValidationResult>) -> Self {
        let mut summary = Summary::default();
        results.iter().for_each(|r| summary.add(r.status));
        Self { results, summary }
    }

    pub fn all_valid(&self) -> bool {
        self.summary.count(Disposition::Valid) == self.summary.total()
    }

    /// The report text: a CSV block with one row per envelope, a blank line,
    /// then `status,count` rows and a `TOTAL` row. Field order never changes.
    pub fn to_text(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(["envelope_id", "status", "matched_index", "corrections", "reason"])
            .expect("in-memory write");
        for r in &self.results {
            let matched = r.matched_index.map(|i| i.to_string()).unwrap_or_default();
            w.write_record([
                r.envelope_id.as_str(),
                r.status.as_str(),
                &matched,
                &r.corrections.to_string(),
                &r.reason,
            ])
            .expect("in-memory write");
        }
        let mut text = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 in, utf-8 out");
        text.push_str("\nstatus,count\n");
        for (d, n) in self.summary.iter() {
            let _ = writeln!(text, "{d},{n}");
        }
        let _ = writeln!(text, "TOTAL,{}", self.summary.total());
        text
    }
}

/// One voter to notify about an envelope that will not be counted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Notification {
    pub voter_id: String,
    pub envelope_id: String,
    pub status: Disposition,
    pub reason: String,
}

fn notice(r: &ValidationResult) -> String {
    match r.status {
        Disposition::Valid => String::new(),
        Disposition::Expired => format!(
            "The signature code on envelope {} had already been replaced by a newer code, so this ballot will not be counted. If you did not advance your code yourself, contact the elections office.",
            r.envelope_id
        ),
        Disposition::StaleSecret => format!(
            "The signature code on envelope {} was made with a secret that has since been replaced. Generate a code from your current secret.",
            r.envelope_id
        ),
        Disposition::Invalid => format!(
            "The signature code on envelope {} does not match our records ({}).",
            r.envelope_id, r.reason
        ),
        Disposition::Malformed => format!(
            "The signature code on envelope {} could not be read: {}.",
            r.envelope_id, r.reason
        ),
        Disposition::UnknownVoter => format!(
            "Envelope {} names voter {}, who is not on the rolls.",
            r.envelope_id, r.voter_id
        ),
    }
}

/// Every non-VALID envelope, in report order, with mailing text.
pub fn notification_list(report: &BatchReport) -> Vec<Notification> {
    report
        .results
        .iter()
        .filter(|r| r.status != Disposition::Valid)
        .map(|r| Notification {
            voter_id: r.voter_id.clone(),
            envelope_id: r.envelope_id.clone(),
            status: r.status,
            reason: notice(r),
        })
        .collect()
}
