//! Cased WordPiece tokenizer with support for appending whole-word tokens.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::TextError;

const BASE_VOCAB: &str = include_str!("../../config/base_vocab.txt");

pub const PAD: &str = "[PAD]";
pub const UNK: &str = "[UNK]";
pub const CLS: &str = "[CLS]";
pub const SEP: &str = "[SEP]";
pub const MASK: &str = "[MASK]";
pub const SPECIAL_TOKENS: [&str; 5] = [PAD, UNK, CLS, SEP, MASK];
pub const CONTINUATION: &str = "##";
const MAX_CHARS_PER_WORD: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Encoding {
    pub ids: Vec<u32>,
    pub tokens: Vec<String>,
    /// True for `[CLS]`, `[SEP]` and other marker tokens.
    pub special: Vec<bool>,
    /// Set when the input had to be cut to fit the maximum length.
    pub truncated: bool,
}

impl Encoding {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tokenizer {
    vocab: Vec<String>,
    index: HashMap<String, u32>,
    base_len: usize,
}

/// Splits on whitespace and isolates every punctuation character.
pub fn pre_tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        let mut current = String::new();
        for c in chunk.chars() {
            if is_punctuation(c) {
                if !current.is_empty() {
                    out.push(std::mem::take(&mut current));
                }
                out.push(c.to_string());
            } else {
                current.push(c);
            }
        }
        if !current.is_empty() {
            out.push(current);
        }
    }
    out
}

pub fn is_punctuation(c: char) -> bool {
    !c.is_alphanumeric() && !c.is_whitespace()
}

/// Distinct words of the given expressions: whitespace split, case kept,
/// punctuation removed. Order of first appearance is preserved.
pub fn vocabulary_terms<'a>(texts: impl IntoIterator<Item = &'a str>) -> Vec<String> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for text in texts {
        for word in pre_tokenize(text) {
            if word.chars().all(is_punctuation) {
                continue;
            }
            if seen.insert(word.clone()) {
                out.push(word);
            }
        }
    }
    out
}

impl Tokenizer {
    /// The bundled base vocabulary: special markers, characters, common
    /// German function words and a few suffix pieces.
    pub fn base_german() -> Self {
        Self::from_vocab(BASE_VOCAB.lines().map(str::to_string).filter(|l| !l.is_empty()).collect())
            .expect("bundled vocabulary is valid")
    }

    pub fn from_vocab(vocab: Vec<String>) -> Result<Self, TextError> {
        for (i, special) in SPECIAL_TOKENS.iter().enumerate() {
            if vocab.get(i).map(String::as_str) != Some(*special) {
                return Err(TextError::InvalidVocabulary(format!(
                    "expected {special} at position {i}"
                )));
            }
        }
        let mut index = HashMap::with_capacity(vocab.len());
        for (i, tok) in vocab.iter().enumerate() {
            if index.insert(tok.clone(), i as u32).is_some() {
                return Err(TextError::InvalidVocabulary(format!("duplicate token '{tok}'")));
            }
        }
        let base_len = vocab.len();
        Ok(Self {
            vocab,
            index,
            base_len,
        })
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    pub fn added_tokens(&self) -> &[String] {
        &self.vocab[self.base_len..]
    }

    pub fn token_id(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.vocab.get(id as usize).map(String::as_str)
    }

    pub fn pad_id(&self) -> u32 {
        0
    }

    pub fn unk_id(&self) -> u32 {
        1
    }

    pub fn cls_id(&self) -> u32 {
        2
    }

    pub fn sep_id(&self) -> u32 {
        3
    }

    pub fn is_special_id(&self, id: u32) -> bool {
        (id as usize) < SPECIAL_TOKENS.len()
    }

    /// Appends every term not yet in the vocabulary as a single token and
    /// returns how many were added.
    pub fn extend_vocabulary(&mut self, terms: &[String]) -> usize {
        let mut added = 0;
        for term in terms {
            let term = term.trim();
            if term.is_empty() || self.index.contains_key(term) {
                continue;
            }
            self.index.insert(term.to_string(), self.vocab.len() as u32);
            self.vocab.push(term.to_string());
            added += 1;
        }
        added
    }

    fn word_pieces(&self, word: &str, out: &mut Vec<u32>) {
        if let Some(&id) = self.index.get(word) {
            out.push(id);
            return;
        }
        let chars: Vec<(usize, char)> = word.char_indices().collect();
        if chars.len() > MAX_CHARS_PER_WORD {
            out.push(self.unk_id());
            return;
        }
        let mut pieces = Vec::new();
        let mut start = 0;
        while start < chars.len() {
            let mut end = chars.len();
            let mut found = None;
            while start < end {
                let from = chars[start].0;
                let to = chars.get(end).map_or(word.len(), |c| c.0);
                let piece = if start > 0 {
                    format!("{CONTINUATION}{}", &word[from..to])
                } else {
                    word[from..to].to_string()
                };
                if let Some(&id) = self.index.get(&piece) {
                    found = Some(id);
                    break;
                }
                end -= 1;
            }
            match found {
                Some(id) => {
                    pieces.push(id);
                    start = end;
                }
                None => {
                    out.push(self.unk_id());
                    return;
                }
            }
        }
        out.extend(pieces);
    }

    /// Token ids of `text` without markers.
    pub fn tokenize_ids(&self, text: &str) -> Vec<u32> {
        let mut ids = Vec::new();
        for word in pre_tokenize(text) {
            self.word_pieces(&word, &mut ids);
        }
        ids
    }

    /// `[CLS] text [SEP]`, truncated to `max_len` tokens in total.
    pub fn encode(&self, text: &str, max_len: usize) -> Encoding {
        let body = self.tokenize_ids(text);
        let room = max_len.saturating_sub(2);
        let truncated = body.len() > room;
        let mut ids = Vec::with_capacity(body.len().min(room) + 2);
        ids.push(self.cls_id());
        ids.extend(body.into_iter().take(room));
        ids.push(self.sep_id());
        self.encoding_of(ids, truncated)
    }

    pub fn encoding_of(&self, ids: Vec<u32>, truncated: bool) -> Encoding {
        let tokens = ids
            .iter()
            .map(|&id| self.token(id).unwrap_or(UNK).to_string())
            .collect();
        let special = ids.iter().map(|&id| self.is_special_id(id)).collect();
        Encoding {
            ids,
            tokens,
            special,
            truncated,
        }
    }

    /// Joins tokens back into text, gluing `##` continuations and dropping
    /// markers.
    pub fn decode(&self, ids: &[u32]) -> String {
        let mut out = String::new();
        for &id in ids {
            if self.is_special_id(id) && id != self.unk_id() {
                continue;
            }
            let tok = self.token(id).unwrap_or(UNK);
            if let Some(rest) = tok.strip_prefix(CONTINUATION) {
                out.push_str(rest);
            } else {
                if !out.is_empty() {
                    out.push(' ');
                }
                out.push_str(tok);
            }
        }
        out
    }

    /// Writes `vocab.txt` (base vocabulary) and `added_tokens.json`.
    pub fn save(&self, dir: &Path) -> Result<(), TextError> {
        let mut base = self.vocab[..self.base_len].join("\n");
        base.push('\n');
        fs::write(dir.join("vocab.txt"), base).map_err(|e| TextError::io(dir, e))?;
        let added: BTreeMap<&str, usize> = self
            .added_tokens()
            .iter()
            .enumerate()
            .map(|(i, t)| (t.as_str(), self.base_len + i))
            .collect();
        let json = serde_json::to_string_pretty(&added).expect("map serializes");
        fs::write(dir.join("added_tokens.json"), json).map_err(|e| TextError::io(dir, e))
    }

    pub fn load(dir: &Path) -> Result<Self, TextError> {
        let vocab_text =
            fs::read_to_string(dir.join("vocab.txt")).map_err(|e| TextError::io(dir, e))?;
        let mut tok = Self::from_vocab(
            vocab_text.lines().filter(|l| !l.is_empty()).map(str::to_string).collect(),
        )?;
        let added_path = dir.join("added_tokens.json");
        if added_path.exists() {
            let text = fs::read_to_string(&added_path).map_err(|e| TextError::io(dir, e))?;
            let added: BTreeMap<String, usize> = serde_json::from_str(&text)
                .map_err(|e| TextError::InvalidVocabulary(format!("added_tokens.json: {e}")))?;
            let mut ordered: Vec<(usize, String)> = added.into_iter().map(|(t, i)| (i, t)).collect();
            ordered.sort();
            for (expected, (id, token)) in (tok.vocab.len()..).zip(ordered) {
                if id != expected {
                    return Err(TextError::InvalidVocabulary(format!(
                        "added token '{token}' has id {id}, expected {expected}"
                    )));
                }
                tok.extend_vocabulary(&[token]);
            }
        }
        Ok(tok)
    }
}
