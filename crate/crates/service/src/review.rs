//! Expert verdicts on attribution packets: an append-only audit log, the
//! current verdict per (packet, reviewer), and agreement aggregation.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use burnout_core::explainer::AttributionPacket;
use burnout_core::jsonl::{self, JsonlError};
use burnout_core::seed::content_hash;
use serde::{Deserialize, Serialize};

pub const VERDICT_LOG: &str = "verdicts.jsonl";
pub const REVIEWER_TOKENS: &str = "reviewer_tokens.txt";

/// Body of `POST /packets/{id}/verdicts`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerdictInput {
    pub agree: bool,
    #[serde(default)]
    pub reason: Option<String>,
    /// Sequence number of the verdict this one replaces; 0 means "no
    /// verdict yet". Omit for plain last-write-wins.
    #[serde(default)]
    pub expected_seq: Option<u64>,
}

/// One entry of the audit log. The newest entry per (packet, reviewer) is
/// the reviewer's current verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReviewVerdict {
    pub seq: u64,
    pub packet_id: String,
    pub reviewer_id: String,
    pub agree: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    /// Unix time in milliseconds.
    pub timestamp: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replaces: Option<u64>,
}

#[derive(Debug, thiserror::Error)]
pub enum VerdictError {
    #[error("verdict changed concurrently: expected sequence {expected}, current is {current}")]
    Conflict { expected: u64, current: u64 },
    #[error(transparent)]
    Store(#[from] JsonlError),
}

/// Reviewers are identified by a hash of their invite token; the token
/// itself is never stored.
pub fn reviewer_id(token: &str) -> String {
    content_hash(token.as_bytes())[..16].to_string()
}

/// Invite tokens, one per line. A missing file means nobody may review.
pub fn load_tokens(path: &Path) -> std::io::Result<BTreeSet<String>> {
    match std::fs::read_to_string(path) {
        Ok(text) => Ok(text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(String::from)
            .collect()),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(BTreeSet::new()),
        Err(e) => Err(e),
    }
}

#[derive(Debug)]
pub struct VerdictStore {
    path: PathBuf,
    log: Vec<ReviewVerdict>,
    current: BTreeMap<(String, String), usize>,
}

impl VerdictStore {
    pub fn open(path: impl Into<PathBuf>) -> Result<Self, JsonlError> {
        let path = path.into();
        let log: Vec<ReviewVerdict> = jsonl::read_all(&path)?;
        let mut store = Self {
            path,
            log: Vec::new(),
            current: BTreeMap::new(),
        };
        for v in log {
            store.index(v);
        }
        Ok(store)
    }

    fn index(&mut self, v: ReviewVerdict) {
        self.current
            .insert((v.packet_id.clone(), v.reviewer_id.clone()), self.log.len());
        self.log.push(v);
    }

    fn next_seq(&self) -> u64 {
        self.log.last().map_or(1, |v| v.seq + 1)
    }

    pub fn current_seq(&self, packet_id: &str, reviewer_id: &str) -> u64 {
        self.current
            .get(&(packet_id.to_string(), reviewer_id.to_string()))
            .map_or(0, |&i| self.log[i].seq)
    }

    /// Appends a verdict. With `expected_seq` set, the write only happens
    /// if the reviewer's current verdict still has that sequence number.
    pub fn record(
        &mut self,
        packet_id: &str,
        reviewer_id: &str,
        input: VerdictInput,
        timestamp: u64,
    ) -> Result<ReviewVerdict, VerdictError> {
        let current = self.current_seq(packet_id, reviewer_id);
        if let Some(expected) = input.expected_seq {
            if expected != current {
                return Err(VerdictError::Conflict { expected, current });
            }
        }
        let verdict = ReviewVerdict {
            seq: self.next_seq(),
            packet_id: packet_id.to_string(),
            reviewer_id: reviewer_id.to_string(),
            agree: input.agree,
            reason: input.reason.map(|r| r.trim().to_string()).filter(|r| !r.is_empty()),
            timestamp,
            replaces: (current > 0).then_some(current),
        };
        jsonl::append(&self.path, &verdict)?;
        self.index(verdict.clone());
        Ok(verdict)
    }

    /// Current verdicts, one per (packet, reviewer).
    pub fn current(&self) -> impl Iterator<Item = &ReviewVerdict> {
        self.current.values().map(|&i| &self.log[i])
    }

    /// Every entry for a packet, oldest first.
    pub fn audit(&self, packet_id: &str) -> Vec<&ReviewVerdict> {
        self.log.iter().filter(|v| v.packet_id == packet_id).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PacketAgreement {
    pub packet_id: String,
    pub example: String,
    pub olbi_cutoff: String,
    pub ai_label: String,
    /// agree / total, or null without verdicts
    pub agreement: Option<f64>,
    pub agree: usize,
    pub verdicts: usize,
    /// Reasons given, ordered by reviewer.
    pub reasons: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub packets: Vec<PacketAgreement>,
}

/// One row per packet, in packet order. Expects at most one verdict per
/// (packet, reviewer); when given several the last one counts.
pub fn agreement_report<'a>(
    packets: &[AttributionPacket],
    verdicts: impl IntoIterator<Item = &'a ReviewVerdict>,
) -> AgreementReport {
    let mut by_packet: BTreeMap<&str, BTreeMap<&str, &ReviewVerdict>> = BTreeMap::new();
    for v in verdicts {
        by_packet
            .entry(v.packet_id.as_str())
            .or_default()
            .insert(v.reviewer_id.as_str(), v);
    }
    let packets = packets
        .iter()
        .map(|p| {
            let vs = by_packet.get(p.id.as_str());
            let total = vs.map_or(0, BTreeMap::len);
            let agree = vs.map_or(0, |vs| vs.values().filter(|v| v.agree).count());
            PacketAgreement {
                packet_id: p.id.clone(),
                example: p.text.clone(),
                olbi_cutoff: p.olbi_summary.clone(),
                ai_label: p.prediction.label.display_name().to_string(),
                agreement: (total > 0).then(|| agree as f64 / total as f64),
                agree,
                verdicts: total,
                reasons: vs
                    .map(|vs| vs.values().filter_map(|v| v.reason.clone()).collect())
                    .unwrap_or_default(),
            }
        })
        .collect();
    AgreementReport { packets }
}
