use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::corpus::{normalize_whitespace, rejection_reason, CleanPolicy};
use crate::olbi::{CutoffRule, InventoryConfig, OlbiScore, RuleId};
use crate::survey::{QuestionId, SurveyRecord};
use crate::Label;

/// One free-text answer with the labels its author receives under each
/// cut-off rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledText {
    pub text: String,
    pub respondent_id: String,
    pub question_id: QuestionId,
    pub labels: BTreeMap<RuleId, Label>,
}

impl LabeledText {
    pub fn label(&self, rule: RuleId) -> Option<Label> {
        self.labels.get(&rule).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredRespondent {
    pub respondent_id: String,
    pub score: OlbiScore,
    pub labels: BTreeMap<RuleId, Label>,
    /// Answers kept for the test set.
    pub texts: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestSet {
    pub rules: Vec<RuleId>,
    pub texts: Vec<LabeledText>,
    /// Every scored respondent, including those without usable answers.
    pub respondents: Vec<ScoredRespondent>,
    /// Answers dropped as empty or single-word.
    pub dropped_answers: usize,
}

impl TestSet {
    pub fn labels(&self, rule: RuleId) -> Vec<Label> {
        self.texts
            .iter()
            .map(|t| t.label(rule).expect("every text carries all assembled rules"))
            .collect()
    }

    pub fn excluded_respondents(&self) -> impl Iterator<Item = &str> {
        self.respondents
            .iter()
            .filter(|r| r.texts == 0)
            .map(|r| r.respondent_id.as_str())
    }

    pub fn scores(&self) -> Vec<OlbiScore> {
        self.respondents.iter().map(|r| r.score).collect()
    }
}

/// Whether a free-text answer is usable as a test text.
pub fn usable_answer(text: &str) -> Option<String> {
    let text = normalize_whitespace(text);
    rejection_reason(&text, &CleanPolicy::survey()).is_none().then_some(text)
}

/// Scores every record and turns each usable answer into a labelled text.
/// Respondents with no usable answer are kept in `respondents` (they
/// still count towards the label distribution) but contribute no texts.
pub fn assemble_test_set(
    records: &[SurveyRecord],
    config: &InventoryConfig,
    rules: &[Arc<dyn CutoffRule>],
) -> Result<TestSet, EvalError> {
    let mut set = TestSet {
        rules: rules.iter().map(|r| r.id()).collect(),
        texts: Vec::new(),
        respondents: Vec::new(),
        dropped_answers: 0,
    };
    for record in records {
        let score = record
            .score(&config.inventory, &config.keying)
            .map_err(|source| EvalError::Score {
                respondent: record.respondent_id.clone(),
                source,
            })?;
        let labels: BTreeMap<RuleId, Label> = rules.iter().map(|r| (r.id(), r.classify(&score))).collect();
        let mut kept = 0;
        for (question_id, raw) in record.free_text.iter() {
            match usable_answer(raw) {
                Some(text) => {
                    kept += 1;
                    set.texts.push(LabeledText {
                        text,
                        respondent_id: record.respondent_id.clone(),
                        question_id,
                        labels: labels.clone(),
                    });
                }
                None => set.dropped_answers += 1,
            }
        }
        if kept == 0 {
            log::info!(
                "respondent {} has no usable free-text answer and is left out of the test set",
                record.respondent_id
            );
        }
        set.respondents.push(ScoredRespondent {
            respondent_id: record.respondent_id.clone(),
            score,
            labels,
            texts: kept,
        });
    }
    Ok(set)
}
