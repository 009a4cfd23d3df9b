use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::attribute::{Attribution, TokenAttribution, WordAttribution};
use super::ExplainError;
use crate::evaluator::LabeledText;
use crate::html::escape;
use crate::jsonl;
use crate::olbi::RuleId;
use crate::seed::content_hash;
use crate::survey::QuestionId;
use crate::trainer::Prediction;
use crate::Label;

pub const PACKETS_FILE: &str = "packets.jsonl";
pub const HTML_DIR: &str = "html";

/// Everything a reviewer sees for one prediction. The id is a hash of all
/// other fields, so regenerating an unchanged packet gives the same id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributionPacket {
    pub id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub question_id: Option<QuestionId>,
    pub prediction: Prediction,
    pub olbi_labels: BTreeMap<RuleId, Label>,
    pub olbi_summary: String,
    pub tokens: Vec<TokenAttribution>,
    pub words: Vec<WordAttribution>,
    pub target: Label,
    pub f_input: f64,
    pub f_baseline: f64,
    pub residual: f64,
    pub method: String,
    pub steps: usize,
    pub model: String,
    pub dataset: String,
    pub warnings: Vec<String>,
}

/// "burnout" when every rule says so, "No burnout" when none does, and
/// "k/n burnout" otherwise.
pub fn olbi_summary(labels: &BTreeMap<RuleId, Label>) -> String {
    let n = labels.len();
    let k = labels.values().filter(|l| l.is_burnout()).count();
    match k {
        0 => Label::NoBurnout.display_name().to_string(),
        k if k == n => Label::Burnout.display_name().to_string(),
        k => format!("{k}/{n} burnout"),
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ModelRef<'a> {
    pub model: &'a str,
    pub dataset: &'a str,
}

pub fn render_packet(
    sample: &LabeledText,
    prediction: Prediction,
    attribution: &Attribution,
    model: ModelRef<'_>,
) -> Result<AttributionPacket, ExplainError> {
    if attribution.tokens.is_empty() {
        return Err(ExplainError::EmptyAttribution);
    }
    let mut warnings = Vec::new();
    if attribution.truncated {
        warnings.push(format!(
            "text truncated to {} tokens; later words were not attributed",
            attribution.tokens.len()
        ));
    }
    let tolerance = 0.05 * attribution.delta().abs() + 0.01;
    if attribution.residual > tolerance {
        warnings.push(format!(
            "completeness residual {:.4} exceeds {:.4}; consider more integration steps",
            attribution.residual, tolerance
        ));
    }
    let mut packet = AttributionPacket {
        id: String::new(),
        text: sample.text.clone(),
        question_id: Some(sample.question_id),
        prediction,
        olbi_summary: olbi_summary(&sample.labels),
        olbi_labels: sample.labels.clone(),
        tokens: attribution.tokens.clone(),
        words: attribution.words.clone(),
        target: attribution.target,
        f_input: attribution.f_input,
        f_baseline: attribution.f_baseline,
        residual: attribution.residual,
        method: attribution.method.clone(),
        steps: attribution.steps,
        model: model.model.to_string(),
        dataset: model.dataset.to_string(),
        warnings,
    };
    packet.id = packet_hash(&packet);
    Ok(packet)
}

fn packet_hash(packet: &AttributionPacket) -> String {
    let mut unhashed = packet.clone();
    unhashed.id.clear();
    let bytes = serde_json::to_vec(&unhashed).expect("packet serializes");
    content_hash(&bytes)[..16].to_string()
}

impl AttributionPacket {
    pub fn verify_id(&self) -> bool {
        self.id == packet_hash(self)
    }
}

/// Background for a score relative to the largest magnitude in the
/// packet: warm for evidence towards the prediction, cool against it.
pub fn score_color(score: f64, max_abs: f64) -> String {
    let intensity = if max_abs > 0.0 { (score.abs() / max_abs).min(1.0) } else { 0.0 };
    let (r, g, b) = if score >= 0.0 { (220, 60, 30) } else { (30, 90, 220) };
    format!("rgba({r}, {g}, {b}, {intensity:.3})")
}

pub fn render_html(packet: &AttributionPacket) -> String {
    let max_abs = packet.words.iter().map(|w| w.score.abs()).fold(0.0, f64::max);
    let mut out = String::new();
    let _ = write!(
        out,
        "<!DOCTYPE html>\n<html lang=\"de\">\n<head>\n<meta charset=\"utf-8\">\n<title>Packet {id}</title>\n\
         <style>\nbody {{ font-family: sans-serif; max-width: 48em; margin: 2em auto; }}\n\
         .labels {{ display: flex; gap: 2em; }}\n.labels div {{ border: 1px solid #ccc; padding: 0.5em 1em; }}\n\
         .text span {{ padding: 0.1em 0.2em; border-radius: 0.2em; }}\n</style>\n</head>\n<body>\n\
         <h1>Packet {id}</h1>\n<div class=\"labels\">\n<div class=\"olbi\">OLBI cut-off: <strong>{olbi}</strong></div>\n\
         <div class=\"ai\">AI: <strong>{ai}</strong> ({score:.3})</div>\n</div>\n<p class=\"text\">",
        id = escape(&packet.id),
        olbi = escape(&packet.olbi_summary),
        ai = packet.prediction.label.display_name(),
        score = packet.prediction.score,
    );
    for (i, w) in packet.words.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(
            out,
            "<span style=\"background: {}\" title=\"{:+.4}\">{}</span>",
            score_color(w.score, max_abs),
            w.score,
            escape(&w.word)
        );
    }
    out.push_str("</p>\n<table class=\"rules\">\n");
    for (rule, label) in &packet.olbi_labels {
        let _ = writeln!(
            out,
            "<tr><td>{}</td><td>{}</td></tr>",
            escape(rule.heading()),
            label.display_name()
        );
    }
    let _ = write!(
        out,
        "</table>\n<p class=\"meta\">model {} trained on {}; {} with {} steps; residual {:.4}</p>\n",
        escape(&packet.model),
        escape(&packet.dataset),
        escape(&packet.method),
        packet.steps,
        packet.residual
    );
    for w in &packet.warnings {
        let _ = writeln!(out, "<p class=\"warning\">{}</p>", escape(w));
    }
    out.push_str("</body>\n</html>\n");
    out
}

/// Writes `packets.jsonl` and one HTML page per packet into `dir`,
/// replacing earlier output.
pub fn write_packets(dir: &Path, packets: &[AttributionPacket]) -> Result<(), ExplainError> {
    let html_dir = dir.join(HTML_DIR);
    std::fs::create_dir_all(&html_dir).map_err(|e| ExplainError::io(&html_dir, e))?;
    let path = dir.join(PACKETS_FILE);
    let mut body = String::new();
    for p in packets {
        body.push_str(&serde_json::to_string(p).expect("packet serializes"));
        body.push('\n');
        let page = html_dir.join(format!("{}.html", p.id));
        std::fs::write(&page, render_html(p)).map_err(|e| ExplainError::io(&page, e))?;
    }
    std::fs::write(&path, body).map_err(|e| ExplainError::io(&path, e))
}

pub fn read_packets(dir: &Path) -> Result<Vec<AttributionPacket>, ExplainError> {
    Ok(jsonl::read_all(&dir.join(PACKETS_FILE))?)
}

/// Which test texts get a review packet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReviewSelection {
    All,
    Random { count: usize, seed: u64 },
}

/// Indices of the selected texts, in ascending order.
pub fn select_for_review(n: usize, selection: ReviewSelection) -> Vec<usize> {
    match selection {
        ReviewSelection::All => (0..n).collect(),
        ReviewSelection::Random { count, seed } => {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            idx.truncate(count.min(n));
            idx.sort_unstable();
            idx
        }
    }
}
