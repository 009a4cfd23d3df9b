use std::fmt::Write as _;
use std::io;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::rules::{CutoffRule, RuleId};
use super::score::OlbiScore;
use super::OlbiError;
use crate::label::Label;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistributionRow {
    pub rule: RuleId,
    pub burnout: usize,
    pub no_burnout: usize,
}

/// Per-rule label counts over a set of respondents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistributionTable {
    pub rows: Vec<DistributionRow>,
    pub respondents: usize,
}

pub fn label_distribution(
    scores: &[OlbiScore],
    rules: &[Arc<dyn CutoffRule>],
) -> Result<DistributionTable, OlbiError> {
    if scores.is_empty() {
        return Err(OlbiError::EmptyTable);
    }
    let rows = rules
        .iter()
        .map(|rule| {
            let burnout = scores
                .iter()
                .filter(|s| rule.classify(s) == Label::Burnout)
                .count();
            DistributionRow {
                rule: rule.id(),
                burnout,
                no_burnout: scores.len() - burnout,
            }
        })
        .collect();
    Ok(DistributionTable {
        rows,
        respondents: scores.len(),
    })
}

impl DistributionTable {
    pub fn row(&self, rule: RuleId) -> Option<&DistributionRow> {
        self.rows.iter().find(|r| r.rule == rule)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<24}{:>24}{:>28}",
            "Cut-Off Value", "Nr. Burnout (Label 1)", "Nr. No Burnout (Label 0)"
        );
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{:<24}{:>24}{:>28}",
                row.rule.heading(),
                row.burnout,
                row.no_burnout
            );
        }
        let _ = writeln!(out, "({} respondents)", self.respondents);
        out
    }

    pub fn render_html(&self) -> String {
        let mut out = String::from(
            "<table class=\"distribution\">\n<thead><tr><th>Cut-Off Value</th>\
             <th>Nr. Burnout (Label 1)</th><th>Nr. No Burnout (Label 0)</th></tr></thead>\n<tbody>\n",
        );
        for row in &self.rows {
            let _ = writeln!(
                out,
                "<tr><td>{}</td><td>{}</td><td>{}</td></tr>",
                row.rule.heading(),
                row.burnout,
                row.no_burnout
            );
        }
        out.push_str("</tbody>\n</table>\n");
        out
    }

    pub fn write_csv<W: io::Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["cutoff", "burnout", "no_burnout"])?;
        for row in &self.rows {
            w.write_record([
                row.rule.name().to_string(),
                row.burnout.to_string(),
                row.no_burnout.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Writes `respondent_id, exhaustion_mean, disengagement_mean, total,
/// label_<rule>...` rows.
pub fn write_scores_csv<W: io::Write>(
    writer: W,
    scores: &[(String, OlbiScore)],
    rules: &[Arc<dyn CutoffRule>],
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec![
        "respondent_id".to_string(),
        "exhaustion_mean".to_string(),
        "disengagement_mean".to_string(),
        "total".to_string(),
    ];
    header.extend(rules.iter().map(|r| format!("label_{}", r.id().name())));
    w.write_record(&header)?;
    for (id, score) in scores {
        let mut record = vec![
            id.clone(),
            score.exhaustion_mean.to_string(),
            score.disengagement_mean.to_string(),
            score.total.to_string(),
        ];
        record.extend(rules.iter().map(|r| r.classify(score).to_string()));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}
