//! Transcription noise: at most one small error per code.

use crate::codegen::CodeFormat;

/// Replaces one digit (hyphens skipped) with a different digit.
pub fn substitute_digit(code: &str, position_draw: u64, value_draw: u64) -> String {
    let digit_positions: Vec<usize> = code
        .char_indices()
        .filter(|(_, c)| c.is_ascii_digit())
        .map(|(i, _)| i)
        .collect();
    if digit_positions.is_empty() {
        return code.to_owned();
    }
    let at = digit_positions[(position_draw % digit_positions.len() as u64) as usize];
    let mut bytes = code.as_bytes().to_vec();
    let old = bytes[at] - b'0';
    bytes[at] = b'0' + (old + 1 + (value_draw % 9) as u8) % 10;
    String::from_utf8(bytes).expect("ascii in, ascii out")
}

/// Applies one single-character edit (substitution, insertion, deletion or
/// adjacent transposition) to one word of a sentence.
pub fn edit_word(code: &str, word_draw: u64, edit_draw: u64) -> String {
    let mut words: Vec<String> = code.split(' ').map(str::to_owned).collect();
    let k = (word_draw % words.len() as u64) as usize;
    let mut w = words[k].clone().into_bytes();
    let letter = |d: u64| b'a' + (d % 26) as u8;
    let kind = edit_draw % 4;
    let rest = edit_draw / 4;
    let pos = (rest % w.len() as u64) as usize;
    let rest = rest / w.len() as u64;
    match kind {
        0 => w.insert((rest % (w.len() as u64 + 1)) as usize, letter(rest / 7)),
        1 if w.len() > 1 => {
            w.remove(pos);
        }
        2 if w.len() > 1 && w[pos % (w.len() - 1)] != w[pos % (w.len() - 1) + 1] => {
            let i = pos % (w.len() - 1);
            w.swap(i, i + 1);
        }
        _ => {
            let old = w[pos];
            w[pos] = b'a' + ((old - b'a') as u64 + 1 + rest % 25) as u8 % 26;
        }
    }
    words[k] = String::from_utf8(w).expect("ascii letters");
    words.join(" ")
}

pub fn apply(code: &str, format: CodeFormat, a: u64, b: u64) -> String {
    match format {
        CodeFormat::Numeric(_) => substitute_digit(code, a, b),
        CodeFormat::Words(_) => edit_word(code, a, b),
    }
}
