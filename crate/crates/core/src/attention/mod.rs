//! Multi-source Gaussian-mixture attention.
//!
//! Each encoder (video, text) has its own monotonic GMM attention with no shared
//! weights. At decoder step `t` the query `q_t = [prenet_t; speaker]` is mapped
//! to per-mixture `(w_hat, delta_hat, sigma_hat)`. Means advance by
//! `exp(delta_hat) > 0`, so alignment can only move forward. The two contexts
//! are concatenated as `[video; text]` and projected by one affine layer.
//!
//! Forward and backward passes are written by hand; [`grad_check`] verifies them
//! against central differences.

mod config;
pub mod diagnostics;
mod gmm;
mod grad;
mod multi_source;
mod speaker;

pub use config::AttentionConfig;
pub use gmm::{gmm_attention_step, gmm_energies, GmmAttentionParams, GmmAttentionState, GmmGradients, GmmStep};
pub use grad::{grad_check, numerical_gradient};
pub use multi_source::{
    attention_maps_json, fuse_contexts, multi_source_step, unroll_attention, AttentionMap, MultiSourceGradients,
    MultiSourceParams, MultiSourceStep, Unroll,
};
pub use speaker::{aggregate_speaker_embedding, compose_query, SpeakerEmbedding, SPEAKER_DIM};

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AttentionError {
    #[error("{what}: expected dimension {expected}, got {got}")]
    DimensionMismatch { what: &'static str, expected: usize, got: usize },
    #[error("invalid encoder output: {0}")]
    InvalidEncoder(String),
    #[error("non-finite {quantity} in {source_kind} attention at step {step}")]
    NonFinite { step: usize, source_kind: SourceKind, quantity: &'static str },
    #[error("speaker embeddings average to norm {norm:e}; cannot normalize")]
    DegenerateSpeaker { norm: f64 },
    #[error("no utterance embeddings to aggregate")]
    NoEmbeddings,
    #[error("speaker embedding is not finite")]
    NonFiniteEmbedding,
    #[error("attention unroll needs at least one query")]
    NoQueries,
    #[error("token {index} has id {id}, outside an alphabet of {alphabet}")]
    InvalidToken { index: usize, id: u32, alphabet: u32 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("function evaluation is not finite at coordinate {coordinate:?}")]
    NonFiniteEvaluation { coordinate: Option<usize> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceKind {
    Video,
    Text,
}

impl std::fmt::Display for SourceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SourceKind::Video => "video",
            SourceKind::Text => "text",
        })
    }
}

/// Encoder hidden states, `T_src x D_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct EncoderOutput {
    hidden: Array2<f64>,
    source: SourceKind,
}

impl EncoderOutput {
    pub fn new(hidden: Array2<f64>, source: SourceKind) -> Result<Self, AttentionError> {
        if hidden.nrows() == 0 || hidden.ncols() == 0 {
            return Err(AttentionError::InvalidEncoder(format!("shape {:?} is empty", hidden.dim())));
        }
        if hidden.iter().any(|v| !v.is_finite()) {
            return Err(AttentionError::InvalidEncoder("hidden states must be finite".into()));
        }
        Ok(Self { hidden, source })
    }

    pub fn hidden(&self) -> &Array2<f64> {
        &self.hidden
    }

    pub fn source(&self) -> SourceKind {
        self.source
    }

    pub fn len(&self) -> usize {
        self.hidden.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.hidden.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.hidden.ncols()
    }
}

/// Phoneme ids over an alphabet of `alphabet_size` symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSequence {
    tokens: Vec<u32>,
    alphabet_size: u32,
}

impl TokenSequence {
    pub fn new(tokens: Vec<u32>, alphabet_size: u32) -> Result<Self, AttentionError> {
        if let Some((index, &id)) = tokens.iter().enumerate().find(|(_, &id)| id >= alphabet_size) {
            return Err(AttentionError::InvalidToken { index, id, alphabet: alphabet_size });
        }
        Ok(Self { tokens, alphabet_size })
    }

    pub fn tokens(&self) -> &[u32] {
        &self.tokens
    }

    pub fn alphabet_size(&self) -> u32 {
        self.alphabet_size
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}
