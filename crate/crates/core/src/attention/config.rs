use serde::{Deserialize, Serialize};

use super::{AttentionError, SPEAKER_DIM};

/// Attention dimensions.
///
/// `model_dim` is the width of encoder hidden states and of the fused output;
/// `context_dim` is the per-source context width. The query is
/// `prenet_dim + 256` wide (pre-net output followed by the speaker embedding).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AttentionConfig {
    pub prenet_dim: usize,
    pub model_dim: usize,
    pub context_dim: usize,
    pub num_mixtures: usize,
    pub fusion_bias: bool,
    /// Parameters are drawn uniformly from `[-init_scale, init_scale]`.
    pub init_scale: f64,
}

impl Default for AttentionConfig {
    fn default() -> Self {
        Self::desk()
    }
}

impl AttentionConfig {
    /// Small dimensions for tests and gradient checks.
    pub fn desk() -> Self {
        Self { prenet_dim: 8, model_dim: 16, context_dim: 8, num_mixtures: 5, fusion_bias: true, init_scale: 0.05 }
    }

    /// Full-size dimensions (2048-wide attention input, 128-dim context per source,
    /// 256-unit pre-net). Only meant for shape checks.
    pub fn full() -> Self {
        Self { prenet_dim: 256, model_dim: 2048, context_dim: 128, ..Self::desk() }
    }

    pub fn query_dim(&self) -> usize {
        self.prenet_dim + SPEAKER_DIM
    }

    pub fn validate(&self) -> Result<(), AttentionError> {
        if self.model_dim == 0 || self.context_dim == 0 || self.num_mixtures == 0 {
            return Err(AttentionError::Config("attention dimensions must be positive".into()));
        }
        if !(self.init_scale.is_finite() && self.init_scale > 0.0) {
            return Err(AttentionError::Config(format!("init scale {} must be positive", self.init_scale)));
        }
        Ok(())
    }
}
