//! Word-sentence rendering of chain values and typo-tolerant decoding.

use std::collections::HashMap;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use sha2::{Digest, Sha256};

use super::{ChainValue, CodeFormat, CodegenError, DecodeError, RenderedCode};

pub const WORDLIST_LEN: usize = 2048;
const BITS_PER_WORD: u32 = 11;
/// Largest Damerau-Levenshtein distance at which a token is still corrected.
pub const MAX_CORRECTION_DISTANCE: usize = 2;

static ENGLISH: &str = include_str!("../../data/english.txt");

/// A validated 2048-word list plus lookup structures.
#[derive(Debug)]
pub struct Wordlist {
    words: Vec<String>,
    lookup: HashMap<String, u16>,
    checksum: [u8; 32],
    max_word_len: usize,
    deletions: OnceLock<HashMap<Vec<u8>, Vec<u16>>>,
}

impl PartialEq for Wordlist {
    fn eq(&self, other: &Self) -> bool {
        self.checksum == other.checksum
    }
}

impl Wordlist {
    /// The bundled BIP-39 English list.
    pub fn english() -> Arc<Wordlist> {
        static CELL: OnceLock<Arc<Wordlist>> = OnceLock::new();
        CELL.get_or_init(|| Arc::new(Wordlist::parse(ENGLISH.as_bytes()).expect("bundled wordlist is valid")))
            .clone()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Wordlist, CodegenError> {
        let path = path.as_ref();
        let raw = std::fs::read(path).map_err(|e| CodegenError::Wordlist(format!("{}: {e}", path.display())))?;
        Wordlist::parse(&raw)
    }

    /// Parses one word per line: exactly 2048 lines, strictly sorted, lowercase ASCII.
    pub fn parse(raw: &[u8]) -> Result<Wordlist, CodegenError> {
        let checksum: [u8; 32] = Sha256::digest(raw).into();
        let text = std::str::from_utf8(raw).map_err(|_| CodegenError::Wordlist("wordlist is not UTF-8".into()))?;
        let text = text.strip_suffix('\n').unwrap_or(text);
        let words: Vec<String> = text.split('\n').map(|w| w.trim_end_matches('\r').to_owned()).collect();
        if words.len() != WORDLIST_LEN {
            return Err(CodegenError::Wordlist(format!(
                "expected {WORDLIST_LEN} words, found {}",
                words.len()
            )));
        }
        for (line, w) in words.iter().enumerate() {
            if w.is_empty() || !w.bytes().all(|b| b.is_ascii_lowercase()) {
                return Err(CodegenError::Wordlist(format!(
                    "line {}: {w:?} is not a lowercase ASCII word",
                    line + 1
                )));
            }
            if line > 0 && words[line - 1] >= *w {
                return Err(CodegenError::Wordlist(format!(
                    "line {}: {w:?} is out of order",
                    line + 1
                )));
            }
        }
        let lookup = words.iter().enumerate().map(|(i, w)| (w.clone(), i as u16)).collect();
        let max_word_len = words.iter().map(String::len).max().unwrap_or(0);
        Ok(Wordlist {
            words,
            lookup,
            checksum,
            max_word_len,
            deletions: OnceLock::new(),
        })
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn word(&self, index: u16) -> &str {
        &self.words[index as usize]
    }

    pub fn index_of(&self, word: &str) -> Option<u16> {
        self.lookup.get(word).copied()
    }

    /// SHA-256 of the raw file bytes.
    pub fn checksum(&self) -> &[u8; 32] {
        &self.checksum
    }

    pub fn checksum_hex(&self) -> String {
        hex::encode(self.checksum)
    }

    // Every string reachable from a word by deleting up to two characters.
    // Two strings within Damerau-Levenshtein distance 2 always share such a
    // string, so this yields a complete candidate set for correction.
    fn deletion_index(&self) -> &HashMap<Vec<u8>, Vec<u16>> {
        self.deletions.get_or_init(|| {
            let mut map: HashMap<Vec<u8>, Vec<u16>> = HashMap::new();
            for (i, w) in self.words.iter().enumerate() {
                for variant in deletion_variants(w.as_bytes(), MAX_CORRECTION_DISTANCE) {
                    let ids = map.entry(variant).or_default();
                    if ids.last() != Some(&(i as u16)) {
                        ids.push(i as u16);
                    }
                }
            }
            map
        })
    }

    /// Resolves a single token to a word index, correcting typos.
    pub fn resolve(&self, token: &str) -> Result<Resolved, DecodeError> {
        if let Some(i) = self.index_of(token) {
            return Ok(Resolved { index: i, distance: 0 });
        }
        let unrecoverable = || DecodeError::UnrecoverableWord(token.to_owned());
        if token.len() > self.max_word_len + MAX_CORRECTION_DISTANCE {
            return Err(unrecoverable());
        }
        let index = self.deletion_index();
        let mut candidates: Vec<u16> = deletion_variants(token.as_bytes(), MAX_CORRECTION_DISTANCE)
            .iter()
            .filter_map(|v| index.get(v))
            .flatten()
            .copied()
            .collect();
        candidates.sort_unstable();
        candidates.dedup();

        let mut best: Option<(usize, u16)> = None;
        let mut tied = false;
        for id in candidates {
            let d = damerau_levenshtein(token.as_bytes(), self.word(id).as_bytes());
            if d > MAX_CORRECTION_DISTANCE {
                continue;
            }
            match best {
                Some((bd, _)) if d > bd => {}
                Some((bd, _)) if d == bd => tied = true,
                _ => {
                    best = Some((d, id));
                    tied = false;
                }
            }
        }
        match best {
            Some((distance, index)) if !tied => Ok(Resolved { index, distance }),
            _ => Err(unrecoverable()),
        }
    }
}

/// Result of resolving one token against the list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Resolved {
    pub index: u16,
    pub distance: usize,
}

fn deletion_variants(word: &[u8], depth: usize) -> Vec<Vec<u8>> {
    let mut out = vec![word.to_vec()];
    let mut frontier = vec![word.to_vec()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for w in &frontier {
            for i in 0..w.len() {
                let mut v = w.clone();
                v.remove(i);
                next.push(v);
            }
        }
        next.sort_unstable();
        next.dedup();
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Unrestricted Damerau-Levenshtein distance over bytes.
pub fn damerau_levenshtein(a: &[u8], b: &[u8]) -> usize {
    let (n, m) = (a.len(), b.len());
    if n == 0 || m == 0 {
        return n.max(m);
    }
    let inf = n + m;
    let w = m + 2;
    let mut d = vec![0usize; (n + 2) * w];
    let mut last_row = [0usize; 256];
    d[0] = inf;
    for i in 0..=n {
        d[(i + 1) * w] = inf;
        d[(i + 1) * w + 1] = i;
    }
    for j in 0..=m {
        d[j + 1] = inf;
        d[w + j + 1] = j;
    }
    for i in 1..=n {
        let mut last_match_col = 0;
        for j in 1..=m {
            let k = last_row[b[j - 1] as usize];
            let l = last_match_col;
            let cost = if a[i - 1] == b[j - 1] {
                last_match_col = j;
                0
            } else {
                1
            };
            let substitute = d[i * w + j] + cost;
            let insert = d[(i + 1) * w + j] + 1;
            let delete = d[i * w + j + 1] + 1;
            let transpose = d[k * w + l] + (i - k - 1) + 1 + (j - l - 1);
            d[(i + 1) * w + j + 1] = substitute.min(insert).min(delete).min(transpose);
        }
        last_row[a[i - 1] as usize] = i;
    }
    d[(n + 1) * w + m + 1]
}

/// Word indices carried by the leading `count * 11` bits of a chain value.
pub(crate) fn word_indices(value: &ChainValue, count: u8) -> Vec<u16> {
    let head = u128::from_be_bytes(value.bytes()[..16].try_into().expect("16 bytes"));
    (0..count as u32)
        .map(|k| ((head >> (128 - BITS_PER_WORD * (k + 1))) & 0x7ff) as u16)
        .collect()
}

/// Renders the first `11 * n_words` bits of a chain value as a sentence.
pub fn encode_words(value: &ChainValue, n_words: u8, wordlist: &Wordlist) -> Result<RenderedCode, CodegenError> {
    let format = CodeFormat::words(n_words)?;
    let text = word_indices(value, n_words)
        .into_iter()
        .map(|i| wordlist.word(i))
        .collect::<Vec<_>>()
        .join(" ");
    Ok(RenderedCode {
        text,
        format,
        election_id: value.election_id().to_owned(),
        index: value.index(),
    })
}

/// Decoded word code: one 11-bit index per word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordsPayload {
    pub indices: Vec<u16>,
    /// Number of tokens that needed typo correction.
    pub corrections: usize,
}

impl WordsPayload {
    pub fn word_count(&self) -> u8 {
        self.indices.len() as u8
    }

    /// The indices packed MSB-first, `11 * word_count` bits, zero padded.
    pub fn bits(&self) -> Vec<u8> {
        let mut acc: u128 = 0;
        for &i in &self.indices {
            acc = (acc << BITS_PER_WORD) | i as u128;
        }
        let nbits = BITS_PER_WORD as usize * self.indices.len();
        let acc = acc << (128 - nbits);
        acc.to_be_bytes()[..nbits.div_ceil(8)].to_vec()
    }
}

/// Parses a transcribed word code, correcting at most distance-2 typos per word.
pub fn decode_words(text: &str, wordlist: &Wordlist) -> Result<WordsPayload, DecodeError> {
    let lowered = text.to_lowercase();
    let tokens: Vec<&str> = lowered.split_whitespace().collect();
    if !(4..=6).contains(&tokens.len()) {
        return Err(DecodeError::MalformedCode(format!(
            "word code has {} words, expected 4 to 6",
            tokens.len()
        )));
    }
    let mut indices = Vec::with_capacity(tokens.len());
    let mut corrections = 0;
    for token in tokens {
        let resolved = wordlist.resolve(token)?;
        if resolved.distance > 0 {
            corrections += 1;
        }
        indices.push(resolved.index);
    }
    Ok(WordsPayload { indices, corrections })
}
