//! Frame-level pitch and voicing error rates.
//!
//! With reference `(p, v)` and prediction `(p', v')` over `T` aligned frames:
//!
//! - FFE = `sum_t (1[|p - p'| > 0.2 p] * 1[v = v'] + 1[v != v']) / T`
//! - GPE = gross pitch errors over frames voiced in both contours
//! - VDE = `sum_t 1[v != v'] / T`
//!
//! The pitch term is relative to the reference pitch.

use super::MetricError;
use crate::dsp::PitchContour;

/// Relative deviation above which a frame counts as a gross pitch error.
pub const GROSS_PITCH_ERROR_RATIO: f64 = 0.2;

/// Per-frame indicator totals shared by FFE, GPE and VDE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PitchErrorCounts {
    pub frames: usize,
    pub voicing_errors: usize,
    pub common_voiced: usize,
    pub gross_pitch_errors: usize,
}

impl PitchErrorCounts {
    pub fn ffe(&self) -> f64 {
        (self.gross_pitch_errors + self.voicing_errors) as f64 / self.frames as f64
    }

    pub fn gpe(&self) -> Option<f64> {
        (self.common_voiced > 0).then(|| self.gross_pitch_errors as f64 / self.common_voiced as f64)
    }

    pub fn vde(&self) -> f64 {
        self.voicing_errors as f64 / self.frames as f64
    }
}

pub fn pitch_error_counts(reference: &PitchContour, predicted: &PitchContour) -> Result<PitchErrorCounts, MetricError> {
    if reference.is_empty() {
        return Err(MetricError::EmptyReference);
    }
    if reference.len() != predicted.len() {
        return Err(MetricError::LengthMismatch { reference: reference.len(), predicted: predicted.len() });
    }
    let mut counts = PitchErrorCounts { frames: reference.len(), ..Default::default() };
    for ((p, v), (q, w)) in reference.frames().zip(predicted.frames()) {
        if v != w {
            counts.voicing_errors += 1;
        } else if v {
            counts.common_voiced += 1;
            if (p - q).abs() > GROSS_PITCH_ERROR_RATIO * p {
                counts.gross_pitch_errors += 1;
            }
        }
    }
    Ok(counts)
}

pub fn ffe(reference: &PitchContour, predicted: &PitchContour) -> Result<f64, MetricError> {
    Ok(pitch_error_counts(reference, predicted)?.ffe())
}

/// `None` when no frame is voiced in both contours.
pub fn gpe(reference: &PitchContour, predicted: &PitchContour) -> Result<Option<f64>, MetricError> {
    Ok(pitch_error_counts(reference, predicted)?.gpe())
}

pub fn vde(reference: &PitchContour, predicted: &PitchContour) -> Result<f64, MetricError> {
    Ok(pitch_error_counts(reference, predicted)?.vde())
}
