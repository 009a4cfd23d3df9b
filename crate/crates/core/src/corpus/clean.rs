use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::sample::TextSample;

pub fn normalize_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

const TERMINAL: [char; 3] = ['.', '!', '?'];
const CLOSERS: [char; 7] = ['"', '\'', '»', '«', '“', '”', ')'];

/// True when the text ends in `.`, `!` or `?`, ignoring closing quotes or
/// brackets after the punctuation mark.
pub fn ends_with_terminal_punctuation(text: &str) -> bool {
    text.trim_end()
        .trim_end_matches(CLOSERS)
        .ends_with(TERMINAL)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanPolicy {
    pub dedup: bool,
    pub min_tokens: usize,
    pub require_terminal_punctuation: bool,
}

impl CleanPolicy {
    /// Generated sentences: deduplicated, at least three tokens, and
    /// terminated; anything else is treated as a cut-off fragment.
    pub fn generated() -> Self {
        Self {
            dedup: true,
            min_tokens: 3,
            require_terminal_punctuation: true,
        }
    }

    /// Free-text survey answers: only empty and single-word answers go.
    pub fn survey() -> Self {
        Self {
            dedup: false,
            min_tokens: 2,
            require_terminal_punctuation: false,
        }
    }
}

impl Default for CleanPolicy {
    fn default() -> Self {
        Self::generated()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RemovalReason {
    Empty,
    SingleWord,
    TooShort,
    Truncated,
    Duplicate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemovedSample {
    pub sample: TextSample,
    pub reason: RemovalReason,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CleanReport {
    pub kept: Vec<TextSample>,
    pub removed: Vec<RemovedSample>,
}

/// Why `text` would be dropped under `policy`, ignoring duplication.
pub fn rejection_reason(text: &str, policy: &CleanPolicy) -> Option<RemovalReason> {
    let tokens = text.split_whitespace().count();
    if tokens == 0 {
        Some(RemovalReason::Empty)
    } else if tokens == 1 {
        Some(RemovalReason::SingleWord)
    } else if tokens < policy.min_tokens {
        Some(RemovalReason::TooShort)
    } else if policy.require_terminal_punctuation && !ends_with_terminal_punctuation(text) {
        Some(RemovalReason::Truncated)
    } else {
        None
    }
}

pub fn clean_with(samples: Vec<TextSample>, policy: &CleanPolicy) -> CleanReport {
    let mut report = CleanReport::default();
    let mut seen = HashSet::new();
    for mut sample in samples {
        sample.text = normalize_whitespace(&sample.text);
        let reason = rejection_reason(&sample.text, policy).or_else(|| {
            (policy.dedup && !seen.insert(sample.text.clone())).then_some(RemovalReason::Duplicate)
        });
        match reason {
            Some(reason) => report.removed.push(RemovedSample { sample, reason }),
            None => report.kept.push(sample),
        }
    }
    report
}

/// Cleans generated sentences with the default policy.
pub fn clean_samples(samples: Vec<TextSample>) -> Vec<TextSample> {
    clean_with(samples, &CleanPolicy::generated()).kept
}
