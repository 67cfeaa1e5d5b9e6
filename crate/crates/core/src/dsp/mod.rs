//! Deterministic signal-processing primitives.
//!
//! Every function here is a pure function of its arguments. Framing never pads:
//! a signal of `n` samples analysed with window `w` and hop `h` yields
//! `floor((n - w) / h) + 1` frames, and signals shorter than one window are rejected.

mod audio;
mod frame;
mod mel;
mod mfcc;
pub mod wav;
mod yin;

pub use audio::AudioBuffer;
pub use frame::{frame_count, frame_signal, hann_window, FrameSpec};
pub use mel::{hz_to_mel, mel_spectrogram, mel_to_hz, MelConfig, MelFeatures, MelFilterbank, LOG_FLOOR};
pub use mfcc::{dct_ii_matrix, mfcc, CepstralFeatures, MIN_CEPSTRAL_COEFFS};
pub use yin::{yin_pitch, PitchContour, YinConfig};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DspError {
    #[error("signal of {samples} samples is shorter than one analysis window of {window} samples")]
    InputTooShort { samples: usize, window: usize },
    #[error("invalid audio: {0}")]
    InvalidAudio(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}
