//! Objective evaluation metrics.
//!
//! All metrics compare a reference against a prediction of the same length;
//! [`align_to_reference`] brings the prediction to the reference length first
//! (clip when too long, pad when too short). Undefined rates (GPE with no
//! commonly voiced frame, WER with an empty reference) are `None`, never 0.

mod align;
mod evaluate;
mod loss;
mod mcd;
mod pitch;
mod report;
mod wer;

pub use align::{align_cepstra, align_contours, align_to_reference, AlignedPair};
pub use evaluate::{evaluate_pair, EvalConfig, EvalError};
pub use loss::{spectrogram_loss, spectrogram_loss_raw};
pub use mcd::{mcd, mcd_frames, McdConfig, MCD_DB_SCALE};
pub use pitch::{ffe, gpe, pitch_error_counts, vde, PitchErrorCounts, GROSS_PITCH_ERROR_RATIO};
pub use report::{aggregate_reports, MetricReport, MetricStats, Summary};
pub use wer::{normalize_transcript, wer, word_errors, WordErrors};

use thiserror::Error;

use crate::dsp::DspError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("reference sequence is empty")]
    EmptyReference,
    #[error("sequences are not aligned: reference has {reference} frames, prediction has {predicted}")]
    LengthMismatch { reference: usize, predicted: usize },
    #[error("feature shapes differ: {reference:?} vs {predicted:?}")]
    ShapeMismatch { reference: (usize, usize), predicted: (usize, usize) },
    #[error("contours use different frame rates: {reference} ms vs {predicted} ms hop")]
    FrameRateMismatch { reference: f64, predicted: f64 },
    #[error("MCD needs coefficients 1..={k} but features carry only {available}")]
    NotEnoughCoefficients { k: usize, available: usize },
    #[error("sample rates differ: {reference} Hz vs {predicted} Hz")]
    SampleRateMismatch { reference: u32, predicted: u32 },
    #[error("no reports to aggregate")]
    NoReports,
    #[error(transparent)]
    Dsp(#[from] DspError),
}
