//! Dataset curation over precomputed utterance metadata.
//!
//! Perception models (landmarking, blur scoring, sync confidence, lip motion,
//! language ID) run upstream; records carry their scores and this module
//! applies the thresholds.

mod filter;
mod record;
mod speakers;

pub use filter::{
    apply_filters, filter_manifest, FilterDecision, FilterOutcome, FilterProfile, FilterSummary, Rule, PROFILE_NAMES,
};
pub use record::ManifestRecord;
pub use speakers::{build_speaker_table, SpeakerTable, UtteranceEmbedding};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("record {id}: {message}")]
    InvalidRecord { id: String, message: String },
    #[error("unknown filter profile {name:?}; valid profiles: {}", PROFILE_NAMES.join(", "))]
    UnknownProfile { name: String },
    #[error("invalid filter profile: {0}")]
    InvalidProfile(String),
    #[error(transparent)]
    Attention(#[from] crate::attention::AttentionError),
}
