use std::io::{Read, Write};

use chrono::{DateTime, SecondsFormat, Utc};

use super::EnvelopeRecord;

pub const ENVELOPE_CSV_HEADER: [&str; 5] = ["envelope_id", "voter_id", "election_id", "code_text", "received_at"];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct BatchInputError {
    pub line: u64,
    pub message: String,
}

/// Reads an envelope batch: RFC 4180 CSV with the fixed header
/// `envelope_id,voter_id,election_id,code_text,received_at`.
pub fn parse_envelope_csv(input: impl Read) -> Result<Vec<EnvelopeRecord>, BatchInputError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(input);
    let mut records = reader.records();
    let header = match records.next() {
        None => {
            return Err(BatchInputError {
                line: 1,
                message: "missing header".into(),
            })
        }
        Some(r) => r.map_err(|e| csv_error(&e))?,
    };
    if header.iter().map(str::trim).ne(ENVELOPE_CSV_HEADER) {
        return Err(BatchInputError {
            line: 1,
            message: format!("header must be {}", ENVELOPE_CSV_HEADER.join(",")),
        });
    }
    let mut out = Vec::new();
    for row in records {
        let row = row.map_err(|e| csv_error(&e))?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let bad = |message: String| BatchInputError { line, message };
        if row.len() != 5 {
            return Err(bad(format!("expected 5 fields, found {}", row.len())));
        }
        let field = |i: usize| row.get(i).unwrap_or_default();
        for (i, name) in [(0, "envelope_id"), (1, "voter_id"), (2, "election_id")] {
            if field(i).trim().is_empty() {
                return Err(bad(format!("{name} is empty")));
            }
        }
        let received_at = DateTime::parse_from_rfc3339(field(4).trim())
            .map_err(|e| bad(format!("received_at {:?}: {e}", field(4))))?
            .with_timezone(&Utc);
        out.push(EnvelopeRecord {
            envelope_id: field(0).trim().to_owned(),
            voter_id: field(1).trim().to_owned(),
            election_id: field(2).trim().to_owned(),
            code_text: field(3).to_owned(),
            received_at,
        });
    }
    Ok(out)
}

fn csv_error(e: &csv::Error) -> BatchInputError {
    BatchInputError {
        line: e.position().map(|p| p.line()).unwrap_or(0),
        message: e.to_string(),
    }
}

/// Writes envelopes in the batch input format.
pub fn write_envelope_csv(envelopes: &[EnvelopeRecord], out: impl Write) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(ENVELOPE_CSV_HEADER)?;
    for e in envelopes {
        w.write_record([
            e.envelope_id.as_str(),
            &e.voter_id,
            &e.election_id,
            &e.code_text,
            &e.received_at.to_rfc3339_opts(SecondsFormat::Secs, true),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_quoted_fields() {
        let csv = "envelope_id,voter_id,election_id,code_text,received_at\n\
                   E1,V000001,GEN-2024,\"beauty together, enemy\",2024-11-05T12:00:00Z\n\
                   E2,V000002,GEN-2024,0377-5205-1267-9204-9853,2024-11-05T13:00:00+01:00\n";
        let rows = parse_envelope_csv(csv.as_bytes()).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].code_text, "beauty together, enemy");
        assert_eq!(rows[0].received_at, rows[1].received_at);
    }

    #[test]
    fn missing_header() {
        let err = parse_envelope_csv("E1,V1,G,0000,2024-11-05T12:00:00Z\n".as_bytes()).unwrap_err();
        assert_eq!(err.line, 1);
        assert!(parse_envelope_csv("".as_bytes()).is_err());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let csv = "envelope_id,voter_id,election_id,code_text,received_at\n\
                   E1,V1,G,0000,2024-11-05T12:00:00Z\n\
                   E2,V1,G,0000,yesterday\n";
        let err = parse_envelope_csv(csv.as_bytes()).unwrap_err();
        assert_eq!(err.line, 3);
        let csv = "envelope_id,voter_id,election_id,code_text,received_at\nE1,V1\n";
        assert_eq!(parse_envelope_csv(csv.as_bytes()).unwrap_err().line, 2);
    }

    #[test]
    fn writer_output_parses_back() {
        let rows = vec![EnvelopeRecord {
            envelope_id: "E\"1".into(),
            voter_id: "V1".into(),
            election_id: "G, 2024".into(),
            code_text: "a b\nc".into(),
            received_at: DateTime::UNIX_EPOCH,
        }];
        let mut buf = Vec::new();
        write_envelope_csv(&rows, &mut buf).unwrap();
        assert_eq!(parse_envelope_csv(buf.as_slice()).unwrap(), rows);
    }
}
