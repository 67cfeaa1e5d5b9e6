use ndarray::Array2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{align_cepstra, align_contours, mcd, normalize_transcript, pitch_error_counts, word_errors};
use super::{McdConfig, MetricError, MetricReport};
use crate::dsp::{
    mel_spectrogram, mfcc, yin_pitch, AudioBuffer, CepstralFeatures, DspError, FrameSpec, MelConfig, MelFeatures,
    PitchContour, YinConfig, LOG_FLOOR,
};

/// Feature extraction and metric settings for [`evaluate_pair`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub frame: FrameSpec,
    pub mel: MelConfig,
    pub mfcc_coeffs: usize,
    pub mcd: McdConfig,
    pub yin: YinConfig,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            frame: FrameSpec::mfcc_default(),
            mel: MelConfig::default(),
            mfcc_coeffs: 13,
            mcd: McdConfig::default(),
            yin: YinConfig::default(),
        }
    }
}

impl EvalConfig {
    pub fn validate(&self, sample_rate: u32) -> Result<(), MetricError> {
        self.frame.validate()?;
        self.mel.validate(sample_rate)?;
        self.yin.validate(sample_rate)?;
        if self.mcd.k > self.mfcc_coeffs {
            return Err(MetricError::NotEnoughCoefficients { k: self.mcd.k, available: self.mfcc_coeffs });
        }
        if self.mfcc_coeffs + 1 > self.mel.bins {
            return Err(DspError::Config(format!(
                "{} cepstral coefficients need more than {} mel bins",
                self.mfcc_coeffs, self.mel.bins
            ))
            .into());
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("utterance {id}: {error}")]
pub struct EvalError {
    pub id: String,
    #[source]
    pub error: MetricError,
}

/// Computes MCD, FFE, GPE, VDE and (when a hypothesis transcript is given) WER
/// for one reference/prediction pair.
///
/// Pitch contours are padded with unvoiced frames and cepstra with the MFCC of a
/// log-floor (silent) frame. A prediction shorter than one analysis window is
/// treated as zero frames and padded entirely.
pub fn evaluate_pair(
    id: &str,
    reference: &AudioBuffer,
    predicted: &AudioBuffer,
    reference_text: &str,
    hypothesis_text: Option<&str>,
    config: &EvalConfig,
) -> Result<MetricReport, EvalError> {
    evaluate(reference, predicted, reference_text, hypothesis_text, config)
        .map_err(|error| EvalError { id: id.to_owned(), error })
        .map(|mut report| {
            report.id = id.to_owned();
            report
        })
}

fn evaluate(
    reference: &AudioBuffer,
    predicted: &AudioBuffer,
    reference_text: &str,
    hypothesis_text: Option<&str>,
    config: &EvalConfig,
) -> Result<MetricReport, MetricError> {
    if reference.sample_rate() != predicted.sample_rate() {
        return Err(MetricError::SampleRateMismatch {
            reference: reference.sample_rate(),
            predicted: predicted.sample_rate(),
        });
    }
    config.validate(reference.sample_rate())?;

    let ref_pitch = yin_pitch(reference, &config.yin)?;
    let pred_pitch = or_empty(yin_pitch(predicted, &config.yin), || PitchContour::unvoiced(0, config.yin.hop_ms))?;
    let (ref_pitch, pred_pitch) = align_contours(&ref_pitch, &pred_pitch)?;
    let pitch = pitch_error_counts(&ref_pitch, &pred_pitch)?;

    let ref_ceps = cepstra(reference, config)?;
    let pred_ceps = or_empty(cepstra(predicted, config), || CepstralFeatures {
        frames: Array2::zeros((0, config.mfcc_coeffs + 1)),
        frame_spec: config.frame,
    })?;
    let pad = silent_cepstrum(config)?;
    let (ref_ceps, pred_ceps) = align_cepstra(&ref_ceps, &pred_ceps, &pad)?;
    let mcd = mcd(&ref_ceps, &pred_ceps, &config.mcd)?;

    let words =
        hypothesis_text.map(|hyp| word_errors(&normalize_transcript(reference_text), &normalize_transcript(hyp)));

    Ok(MetricReport {
        id: String::new(),
        mcd,
        ffe: pitch.ffe(),
        gpe: pitch.gpe(),
        vde: pitch.vde(),
        wer: words.and_then(|w| w.rate()),
        word_edits: words.filter(|w| w.reference_words > 0).map(|w| w.edits()),
        reference_words: words.filter(|w| w.reference_words > 0).map(|w| w.reference_words),
        lse_c: None,
        lse_d: None,
        pitch_frames: ref_pitch.len(),
        mfcc_frames: ref_ceps.num_frames(),
    })
}

fn or_empty<T>(result: Result<T, DspError>, empty: impl FnOnce() -> T) -> Result<T, MetricError> {
    match result {
        Err(DspError::InputTooShort { .. }) => Ok(empty()),
        other => Ok(other?),
    }
}

fn cepstra(audio: &AudioBuffer, config: &EvalConfig) -> Result<CepstralFeatures, DspError> {
    mfcc(&mel_spectrogram(audio, &config.frame, &config.mel)?, config.mfcc_coeffs)
}

fn silent_cepstrum(config: &EvalConfig) -> Result<ndarray::Array1<f64>, DspError> {
    let floor =
        MelFeatures { frames: Array2::from_elem((1, config.mel.bins), LOG_FLOOR.ln()), frame_spec: config.frame };
    Ok(mfcc(&floor, config.mfcc_coeffs)?.frames.row(0).to_owned())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const SR: u32 = 16_000;

    fn tone(freq: f64, secs: f64) -> AudioBuffer {
        let n = (secs * SR as f64) as usize;
        let samples = (0..n)
            .map(|i| {
                let t = i as f64 / SR as f64;
                0.4 * (2.0 * PI * freq * t).sin() + 0.2 * (4.0 * PI * freq * t).sin()
            })
            .collect();
        AudioBuffer::new(samples, SR).unwrap()
    }

    #[test]
    fn self_comparison_is_perfect() {
        let x = tone(180.0, 0.8);
        let r = evaluate_pair("u1", &x, &x, "the quick fox", Some("The quick fox."), &EvalConfig::default()).unwrap();
        assert_eq!(r.id, "u1");
        assert_eq!(r.mcd, 0.0);
        assert_eq!(r.ffe, 0.0);
        assert_eq!(r.vde, 0.0);
        assert_eq!(r.gpe, Some(0.0));
        assert_eq!(r.wer, Some(0.0));
    }

    #[test]
    fn silence_prediction_misses_every_voiced_frame() {
        let x = tone(150.0, 0.6);
        let silence = AudioBuffer::silence(x.len(), SR).unwrap();
        let r = evaluate_pair("u", &x, &silence, "a", None, &EvalConfig::default()).unwrap();
        let voiced = yin_pitch(&x, &YinConfig::default()).unwrap().voiced_fraction();
        assert_eq!(r.vde, voiced);
        assert_eq!(r.gpe, None);
        assert_eq!(r.wer, None);
    }

    #[test]
    fn short_prediction_is_padded() {
        let x = tone(200.0, 0.5);
        let short = AudioBuffer::new(x.samples()[..100].to_vec(), SR).unwrap();
        let r = evaluate_pair("u", &x, &short, "", None, &EvalConfig::default()).unwrap();
        assert!(r.vde > 0.9);
        assert!(r.mcd > 0.0);
    }

    #[test]
    fn errors_carry_the_id() {
        let x = tone(200.0, 0.5);
        let other = AudioBuffer::new(x.samples().to_vec(), 22_050).unwrap();
        let err = evaluate_pair("utt-7", &x, &other, "", None, &EvalConfig::default()).unwrap_err();
        assert_eq!(err.id, "utt-7");
        assert!(err.to_string().contains("utt-7"));
    }

    #[test]
    fn silent_pad_has_energy_only_in_c0() {
        let pad = silent_cepstrum(&EvalConfig::default()).unwrap();
        assert!((pad[0] - LOG_FLOOR.ln() * 80f64.sqrt()).abs() < 1e-9);
        assert!(pad.iter().skip(1).all(|c| c.abs() < 1e-9));
    }
}
