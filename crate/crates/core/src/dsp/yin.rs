//! YIN fundamental-frequency tracking.
//!
//! Each frame of `window_ms` is analysed independently:
//!
//! 1. difference function `d(tau) = sum_j (x_j - x_{j+tau})^2` over an integration
//!    span of `window - tau_max` samples,
//! 2. cumulative-mean normalisation `d'(tau) = d(tau) * tau / sum_{i=1..tau} d(i)`,
//! 3. the first lag in the search range whose `d'` drops below `threshold`, walked
//!    forward to the bottom of that dip,
//! 4. parabolic interpolation of `d'` around the chosen lag.
//!
//! A frame with no dip below the threshold is unvoiced. The voicing decision is
//! exactly that threshold crossing.

use serde::{Deserialize, Serialize};

use super::frame::{frame_count, ms_to_samples};
use super::{AudioBuffer, DspError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct YinConfig {
    pub hop_ms: f64,
    pub window_ms: f64,
    pub f_min: f64,
    pub f_max: f64,
    pub threshold: f64,
}

impl Default for YinConfig {
    fn default() -> Self {
        Self { hop_ms: 12.5, window_ms: 64.0, f_min: 60.0, f_max: 500.0, threshold: 0.1 }
    }
}

impl YinConfig {
    pub fn validate(&self, sample_rate: u32) -> Result<(), DspError> {
        let nyquist = sample_rate as f64 / 2.0;
        if !(self.hop_ms > 0.0 && self.hop_ms <= self.window_ms) {
            return Err(DspError::Config(format!(
                "pitch hop ({} ms) must be positive and at most the window ({} ms)",
                self.hop_ms, self.window_ms
            )));
        }
        if !(self.f_min >= 50.0 && self.f_min < self.f_max && self.f_max <= nyquist) {
            return Err(DspError::Config(format!(
                "pitch range requires 50 <= f_min ({}) < f_max ({}) <= nyquist ({nyquist})",
                self.f_min, self.f_max
            )));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(DspError::Config(format!("YIN threshold {} outside (0, 1)", self.threshold)));
        }
        let (_, tau_max) = self.lag_range(sample_rate);
        let window = ms_to_samples(self.window_ms, sample_rate);
        if 2 * tau_max > window {
            return Err(DspError::Config(format!(
                "a {} ms window cannot hold two periods at f_min = {} Hz",
                self.window_ms, self.f_min
            )));
        }
        Ok(())
    }

    /// Inclusive search bounds on the lag, in samples.
    fn lag_range(&self, sample_rate: u32) -> (usize, usize) {
        let sr = sample_rate as f64;
        let tau_min = ((sr / self.f_max).floor() as usize).max(2);
        let tau_max = (sr / self.f_min).ceil() as usize + 1;
        (tau_min, tau_max)
    }
}

/// Per-frame pitch (Hz, 0 when unvoiced) and voicing flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PitchContour {
    pitch: Vec<f64>,
    voiced: Vec<bool>,
    hop_ms: f64,
}

impl PitchContour {
    pub fn new(pitch: Vec<f64>, voiced: Vec<bool>, hop_ms: f64) -> Result<Self, DspError> {
        if pitch.len() != voiced.len() {
            return Err(DspError::InvalidAudio(format!(
                "pitch has {} frames but voicing has {}",
                pitch.len(),
                voiced.len()
            )));
        }
        for (t, (&p, &v)) in pitch.iter().zip(&voiced).enumerate() {
            if !p.is_finite() || p < 0.0 || (p > 0.0) != v {
                return Err(DspError::InvalidAudio(format!("frame {t}: pitch {p} inconsistent with voiced = {v}")));
            }
        }
        Ok(Self { pitch, voiced, hop_ms })
    }

    /// Builds a contour from pitch values alone; zero marks an unvoiced frame.
    pub fn from_pitch(pitch: Vec<f64>, hop_ms: f64) -> Result<Self, DspError> {
        let voiced = pitch.iter().map(|&p| p > 0.0).collect();
        Self::new(pitch, voiced, hop_ms)
    }

    pub fn from_frames(frames: impl IntoIterator<Item = (f64, bool)>, hop_ms: f64) -> Result<Self, DspError> {
        let (pitch, voiced) = frames.into_iter().unzip();
        Self::new(pitch, voiced, hop_ms)
    }

    pub fn unvoiced(len: usize, hop_ms: f64) -> Self {
        Self { pitch: vec![0.0; len], voiced: vec![false; len], hop_ms }
    }

    pub fn pitch(&self) -> &[f64] {
        &self.pitch
    }

    pub fn voiced(&self) -> &[bool] {
        &self.voiced
    }

    pub fn hop_ms(&self) -> f64 {
        self.hop_ms
    }

    pub fn len(&self) -> usize {
        self.pitch.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pitch.is_empty()
    }

    pub fn frames(&self) -> impl Iterator<Item = (f64, bool)> + '_ {
        self.pitch.iter().copied().zip(self.voiced.iter().copied())
    }

    pub fn voiced_fraction(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        self.voiced.iter().filter(|&&v| v).count() as f64 / self.len() as f64
    }

    /// Median pitch over voiced frames.
    pub fn median_voiced_pitch(&self) -> Option<f64> {
        let mut voiced: Vec<f64> = self.frames().filter(|f| f.1).map(|f| f.0).collect();
        if voiced.is_empty() {
            return None;
        }
        voiced.sort_by(f64::total_cmp);
        let mid = voiced.len() / 2;
        Some(if voiced.len().is_multiple_of(2) { 0.5 * (voiced[mid - 1] + voiced[mid]) } else { voiced[mid] })
    }
}

pub fn yin_pitch(audio: &AudioBuffer, config: &YinConfig) -> Result<PitchContour, DspError> {
    let sr = audio.sample_rate();
    config.validate(sr)?;
    let window = ms_to_samples(config.window_ms, sr);
    let hop = ms_to_samples(config.hop_ms, sr);
    let samples = audio.samples();
    let count =
        frame_count(samples.len(), window, hop).ok_or(DspError::InputTooShort { samples: samples.len(), window })?;

    let (tau_min, tau_max) = config.lag_range(sr);
    let span = window - tau_max;
    let mut diff = vec![0.0; tau_max + 1];
    let mut pitch = Vec::with_capacity(count);

    for t in 0..count {
        let frame = &samples[t * hop..t * hop + window];
        difference(frame, span, &mut diff);
        cumulative_mean_normalize(&mut diff);
        let f0 = pick_lag(&diff, tau_min, tau_max, config.threshold)
            .map(|lag| sr as f64 / lag)
            .filter(|f| *f >= config.f_min && *f <= config.f_max)
            .unwrap_or(0.0);
        pitch.push(f0);
    }
    PitchContour::from_pitch(pitch, config.hop_ms)
}

fn difference(frame: &[f64], span: usize, out: &mut [f64]) {
    let head = &frame[..span];
    for (tau, d) in out.iter_mut().enumerate() {
        let lagged = &frame[tau..tau + span];
        *d = head.iter().zip(lagged).map(|(a, b)| (a - b) * (a - b)).sum();
    }
}

fn cumulative_mean_normalize(d: &mut [f64]) {
    d[0] = 1.0;
    let mut running = 0.0;
    for (tau, v) in d.iter_mut().enumerate().skip(1) {
        running += *v;
        *v = if running > 0.0 { *v * tau as f64 / running } else { 1.0 };
    }
}

/// Fractional lag of the first dip below `threshold`, or `None` when unvoiced.
fn pick_lag(cmnd: &[f64], tau_min: usize, tau_max: usize, threshold: f64) -> Option<f64> {
    let mut tau = (tau_min..tau_max).find(|&tau| cmnd[tau] < threshold)?;
    while tau + 1 < tau_max && cmnd[tau + 1] < cmnd[tau] {
        tau += 1;
    }
    let (a, b, c) = (cmnd[tau - 1], cmnd[tau], cmnd[tau + 1]);
    let curvature = a - 2.0 * b + c;
    let offset = if curvature > 0.0 { (0.5 * (a - c) / curvature).clamp(-1.0, 1.0) } else { 0.0 };
    Some(tau as f64 + offset)
}
