//! Token attributions for classifier predictions and the review packets
//! built from them.

mod attribute;
pub mod integrators;
mod packet;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use attribute::{
    attribute, attribute_ids, baseline_ids, merge_words, Attribution, AttributeOptions, TokenAttribution,
    WordAttribution, DEFAULT_STEPS, MIN_STEPS,
};
pub use integrators::{PathIntegrator, DEFAULT_INTEGRATOR};
pub use packet::{
    olbi_summary, read_packets, render_html, render_packet, score_color, select_for_review, write_packets,
    AttributionPacket, ModelRef, ReviewSelection, HTML_DIR, PACKETS_FILE,
};

use crate::jsonl::JsonlError;
use crate::registry::RegistryError;

#[derive(Debug, Error)]
pub enum ExplainError {
    #[error("at least {min} integration steps are required, got {0}", min = MIN_STEPS)]
    TooFewSteps(usize),
    #[error("text is empty")]
    EmptyText,
    #[error("refusing to render a packet without attribution scores")]
    EmptyAttribution,
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Store(#[from] JsonlError),
}

impl ExplainError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}
