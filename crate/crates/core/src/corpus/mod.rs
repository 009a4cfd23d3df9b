//! Training corpora: the online baseline, curated expression pairs (v1),
//! generated sentence augmentation (v2), cleaning, combination and splits.

pub mod augment;
mod clean;
pub mod demo;
mod expressions;
pub mod generators;
mod ops;
mod sample;

use std::path::Path;

pub use augment::{
    build_v2, make_prompts, plan_jobs, run_augmentation, V2Build, AugmentOptions, AugmentationJob, AugmentationOutput,
    JobFailure, QuarantineEntry, BATCH_SIZE, PROMPT_TEMPLATE,
};
pub use clean::{
    clean_samples, clean_with, ends_with_terminal_punctuation, normalize_whitespace,
    rejection_reason, CleanPolicy, CleanReport, RemovalReason, RemovedSample,
};
pub use expressions::{
    build_v1, load_expression_table, parse_expression_table_str, write_expression_table,
    ExpressionRecord,
};
pub use generators::{GenerationError, GeneratorConfig, TextGenerator};
pub use ops::{combine, split, train_size};
pub use sample::{
    load_online_corpus, read_samples_jsonl, write_samples_jsonl, Dataset, DatasetName, LabelCounts,
    Source, TextSample,
};


#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("invalid expression record '{seed}': {reason}")]
    InvalidRecord { seed: String, reason: String },
    #[error("duplicate seed expression '{0}'")]
    DuplicateSeed(String),
    #[error("{0} is empty")]
    EmptyDataset(String),
    #[error("split ratio must lie strictly between 0 and 1, got {0}")]
    InvalidRatio(f64),
    #[error("need at least 2 samples to split, got {0}")]
    TooSmallToSplit(usize),
    #[error("unknown dataset '{0}' (expected online, v1, v2 or combined)")]
    UnknownDataset(String),
    #[error("configuration error: {0}")]
    Config(String),
}

impl CorpusError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CorpusError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub(crate) fn csv(path: &Path, err: csv::Error) -> Self {
        let line = err.position().map(|p| p.line() as usize).unwrap_or(0);
        match err.into_kind() {
            csv::ErrorKind::Io(e) => CorpusError::io(path, e),
            other => CorpusError::Parse {
                path: path.display().to_string(),
                line,
                message: format!("{other:?}"),
            },
        }
    }
}
