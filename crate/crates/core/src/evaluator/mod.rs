//! Real-world evaluation: survey answers labelled by inventory cut-offs,
//! classification metrics, and the distribution and F1 reports.

mod assemble;
mod report;

use thiserror::Error;

pub use assemble::{assemble_test_set, usable_answer, LabeledText, ScoredRespondent, TestSet};
pub use report::{cross_evaluate, respondent_majority, Cell, ModelUnderTest, Table4Report, Table4Row};
pub use crate::metrics::{compute_metrics, Confusion, Metrics, MetricsError};

use crate::olbi::{label_distribution, rules, DistributionTable, OlbiError};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("respondent {respondent}: {source}")]
    Score {
        respondent: String,
        #[source]
        source: OlbiError,
    },
    #[error(transparent)]
    Olbi(#[from] OlbiError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// Per-respondent label counts under every listed rule.
pub fn distribution_report(test: &TestSet) -> Result<DistributionTable, EvalError> {
    let rules: Vec<_> = test.rules.iter().map(|&id| rules::rule(id)).collect();
    Ok(label_distribution(&test.scores(), &rules)?)
}

/// Artifact directory for `dataset` under a model root.
pub fn artifact_dir(model_dir: &std::path::Path, dataset: crate::corpus::DatasetName) -> std::path::PathBuf {
    model_dir.join(dataset.as_str())
}

/// Loads the four dataset classifiers from `model_dir/<dataset>/`. A
/// missing or unreadable artifact becomes an error row, not a failure.
pub fn load_models(model_dir: &std::path::Path) -> Vec<ModelUnderTest> {
    crate::corpus::DatasetName::ALL
        .into_iter()
        .map(|dataset| {
            let dir = artifact_dir(model_dir, dataset);
            let artifact = if dir.join(crate::trainer::CONFIG_FILE).exists() {
                crate::trainer::ClassifierArtifact::load(&dir).map_err(|e| e.to_string())
            } else {
                Err(format!("no artifact at {}", dir.display()))
            };
            ModelUnderTest { dataset, artifact }
        })
        .collect()
}
