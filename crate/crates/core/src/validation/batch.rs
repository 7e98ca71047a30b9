use std::collections::{BTreeMap, HashSet};

use super::{classify, finish, BatchReport, EnvelopeRecord, ValidationConfig, Verdict};
use crate::codegen::{decode_auto, DecodeError, DecodedCode};
use crate::par;
use crate::registrar::{Registrar, VoterRecord};
use crate::validation::Disposition;

/// One voter's record with its envelopes, in processing order.
type VoterWork = (
    VoterRecord,
    Vec<(usize, EnvelopeRecord, Result<DecodedCode, DecodeError>)>,
);

struct Pending {
    envelope: EnvelopeRecord,
    decoded: Result<DecodedCode, DecodeError>,
    verdict: Option<Verdict>,
}

/// Validates a batch in `(received_at, envelope_id)` order.
///
/// Envelopes for different voters are independent, so voters are processed
/// in parallel (per `config.execution`); each voter's envelopes run strictly
/// in order. Audit events are appended afterwards in processing order, so the
/// log and report are identical in either execution mode.
pub fn validate_batch(
    registrar: &mut Registrar,
    mut envelopes: Vec<EnvelopeRecord>,
    config: &ValidationConfig,
) -> BatchReport {
    envelopes.sort_by(|a, b| {
        a.received_at
            .cmp(&b.received_at)
            .then_with(|| a.envelope_id.cmp(&b.envelope_id))
    });

    let wordlist = registrar.wordlist().clone();
    let mut pending: Vec<Pending> = par::map(config.execution, envelopes, |envelope| {
        let decoded = decode_auto(&envelope.code_text, &wordlist);
        Pending {
            envelope,
            decoded,
            verdict: None,
        }
    });

    let mut seen = HashSet::new();
    let mut groups: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (pos, p) in pending.iter_mut().enumerate() {
        if !seen.insert(p.envelope.envelope_id.clone()) {
            p.verdict = Some(Verdict::new(Disposition::Malformed, None, 0, "duplicate envelope id"));
        } else if registrar.voter(&p.envelope.voter_id).is_none() {
            p.verdict = Some(Verdict::new(Disposition::UnknownVoter, None, 0, "no such voter"));
        } else {
            groups.entry(p.envelope.voter_id.clone()).or_default().push(pos);
        }
    }

    // Move the affected records out so each worker owns one voter.
    let mut work: Vec<VoterWork> = groups
        .into_iter()
        .map(|(voter_id, positions)| {
            let record = registrar.voters_mut().remove(&voter_id).expect("voter checked above");
            let items = positions
                .into_iter()
                .map(|pos| {
                    let p = &mut pending[pos];
                    let decoded = std::mem::replace(&mut p.decoded, Err(DecodeError::MalformedCode(String::new())));
                    (pos, p.envelope.clone(), decoded)
                })
                .collect();
            (record, items)
        })
        .collect();

    let chain = registrar.chain_config();
    let open: HashSet<String> = registrar.state().elections.iter().cloned().collect();
    let verdicts: Vec<(VoterRecord, Vec<(usize, Verdict)>)> =
        par::map(config.execution, std::mem::take(&mut work), |(mut record, items)| {
            let out = items
                .into_iter()
                .map(|(pos, envelope, decoded)| {
                    let verdict = classify(
                        &mut record,
                        &envelope.election_id,
                        decoded.as_ref(),
                        open.contains(&envelope.election_id),
                        &chain,
                        config,
                    );
                    (pos, verdict)
                })
                .collect();
            (record, out)
        });

    for (record, out) in verdicts {
        registrar.voters_mut().insert(record.voter_id.clone(), record);
        for (pos, verdict) in out {
            pending[pos].verdict = Some(verdict);
        }
    }

    let results = pending
        .into_iter()
        .map(|p| {
            let verdict = p.verdict.expect("every envelope classified");
            finish(registrar, &p.envelope, verdict)
        })
        .collect();
    BatchReport::new(results)
}
