//! Objective evaluation toolkit for visually-driven text-to-speech.
//!
//! The crate is split along the evaluation workflow:
//!
//! - [`dsp`]: framing, log-mel spectrograms, MFCCs, YIN pitch/voicing and WAV input.
//! - [`metrics`]: length alignment, MCD, FFE/GPE/VDE, WER, the L1 + L2 spectrogram
//!   loss and corpus aggregation.
//! - [`attention`]: per-source Gaussian-mixture monotonic attention with
//!   concat-and-project fusion, hand-written gradients and a finite-difference checker.
//! - [`pipeline`]: dataset curation thresholds over precomputed utterance metadata.

pub mod attention;
pub mod dsp;
pub mod metrics;
pub mod pipeline;

pub use dsp::{AudioBuffer, CepstralFeatures, FrameSpec, MelFeatures, PitchContour};
pub use metrics::{MetricReport, Summary};
