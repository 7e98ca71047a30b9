use super::{damm, ChainValue, CodeFormat, CodegenError, DecodeError, RenderedCode};

/// Digits of a numeric code without its check digit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NumericPayload(String);

impl NumericPayload {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Total rendered length, check digit included.
    pub fn code_length(&self) -> u8 {
        (self.0.len() + 1) as u8
    }
}

/// `value mod 10^(length-1)`, zero padded.
pub(crate) fn payload_digits(value: &ChainValue, length: u8) -> NumericPayload {
    let payload_len = length as u32 - 1;
    let modulus = 10u128.pow(payload_len);
    let rem = value
        .bytes()
        .iter()
        .fold(0u128, |acc, &b| (acc * 256 + b as u128) % modulus);
    NumericPayload(format!("{rem:0width$}", width = payload_len as usize))
}

fn group(digits: &str) -> String {
    digits
        .as_bytes()
        .chunks(4)
        .map(|c| std::str::from_utf8(c).expect("ascii digits"))
        .collect::<Vec<_>>()
        .join("-")
}

/// Adds a check digit to a payload and groups it for display.
pub fn render_payload(payload: &NumericPayload) -> String {
    let mut digits = payload.0.clone();
    digits.push((b'0' + damm::check_digit(digits.as_bytes())) as char);
    group(&digits)
}

/// Renders a chain value as a 14- or 20-digit code, hyphenated every four digits.
pub fn encode_numeric(value: &ChainValue, length: u8) -> Result<RenderedCode, CodegenError> {
    let format = CodeFormat::numeric(length)?;
    Ok(RenderedCode {
        text: render_payload(&payload_digits(value, length)),
        format,
        election_id: value.election_id().to_owned(),
        index: value.index(),
    })
}

/// Parses a transcribed numeric code. Hyphens and whitespace are ignored.
pub fn decode_numeric(text: &str) -> Result<NumericPayload, DecodeError> {
    let digits: String = text.chars().filter(|c| !(c.is_whitespace() || *c == '-')).collect();
    if let Some(bad) = digits.chars().find(|c| !c.is_ascii_digit()) {
        return Err(DecodeError::MalformedCode(format!(
            "unexpected character {bad:?} in numeric code"
        )));
    }
    if digits.len() != 14 && digits.len() != 20 {
        return Err(DecodeError::MalformedCode(format!(
            "numeric code has {} digits, expected 14 or 20",
            digits.len()
        )));
    }
    if !damm::verify(digits.as_bytes()) {
        return Err(DecodeError::ChecksumMismatch);
    }
    let mut payload = digits;
    payload.pop();
    Ok(NumericPayload(payload))
}
