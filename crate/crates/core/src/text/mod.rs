mod tokenizer;

use std::path::Path;

pub use tokenizer::{
    is_punctuation, pre_tokenize, vocabulary_terms, Encoding, Tokenizer, CLS, CONTINUATION, MASK,
    PAD, SEP, SPECIAL_TOKENS, UNK,
};

#[derive(Debug, thiserror::Error)]
pub enum TextError {
    #[error("invalid vocabulary: {0}")]
    InvalidVocabulary(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl TextError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        TextError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
