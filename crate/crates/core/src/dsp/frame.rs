use std::f64::consts::PI;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::{AudioBuffer, DspError};

/// Analysis window and hop, in milliseconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FrameSpec {
    pub window_ms: f64,
    pub hop_ms: f64,
}

impl FrameSpec {
    pub fn new(window_ms: f64, hop_ms: f64) -> Result<Self, DspError> {
        let spec = Self { window_ms, hop_ms };
        spec.validate()?;
        Ok(spec)
    }

    /// 25 ms window, 10 ms hop: the MFCC analysis used by MCD.
    pub fn mfcc_default() -> Self {
        Self { window_ms: 25.0, hop_ms: 10.0 }
    }

    pub fn validate(&self) -> Result<(), DspError> {
        if !(self.hop_ms.is_finite() && self.window_ms.is_finite()) {
            return Err(DspError::Config("frame durations must be finite".into()));
        }
        if !(self.hop_ms > 0.0 && self.hop_ms <= self.window_ms) {
            return Err(DspError::Config(format!(
                "frame spec requires 0 < hop ({} ms) <= window ({} ms)",
                self.hop_ms, self.window_ms
            )));
        }
        Ok(())
    }

    pub fn window_samples(&self, sample_rate: u32) -> usize {
        ms_to_samples(self.window_ms, sample_rate)
    }

    pub fn hop_samples(&self, sample_rate: u32) -> usize {
        ms_to_samples(self.hop_ms, sample_rate)
    }
}

impl Default for FrameSpec {
    fn default() -> Self {
        Self::mfcc_default()
    }
}

pub(crate) fn ms_to_samples(ms: f64, sample_rate: u32) -> usize {
    ((ms * sample_rate as f64 / 1000.0).round() as usize).max(1)
}

/// Number of full frames; `None` when the signal is shorter than one window.
pub fn frame_count(num_samples: usize, window: usize, hop: usize) -> Option<usize> {
    if window == 0 || hop == 0 || num_samples < window {
        None
    } else {
        Some((num_samples - window) / hop + 1)
    }
}

/// Periodic Hann window.
pub fn hann_window(len: usize) -> Vec<f64> {
    (0..len).map(|n| 0.5 - 0.5 * (2.0 * PI * n as f64 / len as f64).cos()).collect()
}

/// Slices `audio` into Hann-windowed frames, one per row.
pub fn frame_signal(audio: &AudioBuffer, spec: &FrameSpec) -> Result<Array2<f64>, DspError> {
    spec.validate()?;
    let window = spec.window_samples(audio.sample_rate());
    let hop = spec.hop_samples(audio.sample_rate());
    frame_samples(audio.samples(), window, hop)
}

pub(crate) fn frame_samples(samples: &[f64], window: usize, hop: usize) -> Result<Array2<f64>, DspError> {
    let count =
        frame_count(samples.len(), window, hop).ok_or(DspError::InputTooShort { samples: samples.len(), window })?;
    let hann = hann_window(window);
    Ok(Array2::from_shape_fn((count, window), |(t, i)| samples[t * hop + i] * hann[i]))
}
