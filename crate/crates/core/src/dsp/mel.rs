use std::sync::Arc;

use ndarray::Array2;
use rustfft::{num_complex::Complex, Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::frame::{frame_count, hann_window};
use super::{AudioBuffer, DspError, FrameSpec};

/// Floor applied to mel energies before the natural log.
pub const LOG_FLOOR: f64 = 1e-10;

/// HTK mel scale.
pub fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MelConfig {
    pub bins: usize,
    pub fmin: f64,
    pub fmax: f64,
}

impl Default for MelConfig {
    fn default() -> Self {
        Self { bins: 80, fmin: 125.0, fmax: 7600.0 }
    }
}

impl MelConfig {
    pub fn validate(&self, sample_rate: u32) -> Result<(), DspError> {
        if self.bins == 0 {
            return Err(DspError::Config("mel filterbank needs at least one bin".into()));
        }
        let nyquist = sample_rate as f64 / 2.0;
        if !(self.fmin >= 0.0 && self.fmin < self.fmax && self.fmax <= nyquist) {
            return Err(DspError::Config(format!(
                "mel range requires 0 <= fmin ({}) < fmax ({}) <= nyquist ({nyquist})",
                self.fmin, self.fmax
            )));
        }
        Ok(())
    }
}

/// Triangular filters, peak height 1, equally spaced on the mel scale.
#[derive(Debug, Clone)]
pub struct MelFilterbank {
    weights: Array2<f64>,
    centers_hz: Vec<f64>,
    fft_size: usize,
}

impl MelFilterbank {
    pub fn new(sample_rate: u32, fft_size: usize, config: &MelConfig) -> Result<Self, DspError> {
        config.validate(sample_rate)?;
        let num_freqs = fft_size / 2 + 1;
        let lo = hz_to_mel(config.fmin);
        let hi = hz_to_mel(config.fmax);
        let edges: Vec<f64> =
            (0..config.bins + 2).map(|i| mel_to_hz(lo + (hi - lo) * i as f64 / (config.bins + 1) as f64)).collect();
        let bin_hz = sample_rate as f64 / fft_size as f64;

        let mut weights = Array2::zeros((config.bins, num_freqs));
        for m in 0..config.bins {
            let (left, center, right) = (edges[m], edges[m + 1], edges[m + 2]);
            for k in 0..num_freqs {
                let f = k as f64 * bin_hz;
                let w = if f > left && f <= center {
                    (f - left) / (center - left)
                } else if f > center && f < right {
                    (right - f) / (right - center)
                } else {
                    0.0
                };
                weights[[m, k]] = w;
            }
            if weights.row(m).iter().all(|&w| w == 0.0) {
                return Err(DspError::Config(format!(
                    "{} mel bins exceed the resolution of a {fft_size}-point FFT: filter {m} \
                     ({left:.1}-{right:.1} Hz) covers no frequency bin",
                    config.bins
                )));
            }
        }
        Ok(Self { weights, centers_hz: edges[1..=config.bins].to_vec(), fft_size })
    }

    pub fn weights(&self) -> &Array2<f64> {
        &self.weights
    }

    pub fn centers_hz(&self) -> &[f64] {
        &self.centers_hz
    }

    pub fn fft_size(&self) -> usize {
        self.fft_size
    }
}

/// Framed log-mel energies, one row per frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MelFeatures {
    pub frames: Array2<f64>,
    pub frame_spec: FrameSpec,
}

impl MelFeatures {
    pub fn num_frames(&self) -> usize {
        self.frames.nrows()
    }

    pub fn mel_bins(&self) -> usize {
        self.frames.ncols()
    }
}

/// Magnitude STFT of Hann frames zero-padded to the next power of two,
/// followed by the mel filterbank and `ln(max(e, LOG_FLOOR))`.
pub fn mel_spectrogram(audio: &AudioBuffer, spec: &FrameSpec, config: &MelConfig) -> Result<MelFeatures, DspError> {
    spec.validate()?;
    let sr = audio.sample_rate();
    let window = spec.window_samples(sr);
    let hop = spec.hop_samples(sr);
    let fft_size = window.next_power_of_two();
    let bank = MelFilterbank::new(sr, fft_size, config)?;
    let count =
        frame_count(audio.len(), window, hop).ok_or(DspError::InputTooShort { samples: audio.len(), window })?;

    let fft: Arc<dyn Fft<f64>> = FftPlanner::new().plan_fft_forward(fft_size);
    let hann = hann_window(window);
    let samples = audio.samples();
    let num_freqs = fft_size / 2 + 1;
    let mut buf = vec![Complex::new(0.0, 0.0); fft_size];
    let mut magnitude = vec![0.0; num_freqs];
    let mut frames = Array2::zeros((count, config.bins));

    for t in 0..count {
        let start = t * hop;
        for (i, slot) in buf.iter_mut().enumerate() {
            let v = if i < window { samples[start + i] * hann[i] } else { 0.0 };
            *slot = Complex::new(v, 0.0);
        }
        fft.process(&mut buf);
        for (k, m) in magnitude.iter_mut().enumerate() {
            *m = buf[k].norm();
        }
        for (m, out) in frames.row_mut(t).iter_mut().enumerate() {
            let energy: f64 = bank.weights.row(m).iter().zip(&magnitude).map(|(w, x)| w * x).sum();
            *out = energy.max(LOG_FLOOR).ln();
        }
    }
    Ok(MelFeatures { frames, frame_spec: *spec })
}
