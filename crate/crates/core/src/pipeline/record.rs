use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::PipelineError;

/// Metadata for one utterance. Fields not listed here are kept in `extra`
/// and written back unchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRecord {
    pub id: String,
    /// Seconds.
    pub duration: f64,
    pub transcript: String,
    pub language_confidence_en: f64,
    /// Degrees, per-clip maximum.
    pub max_abs_yaw: f64,
    /// Degrees, per-clip maximum.
    pub max_abs_pitch: f64,
    /// Pixels, per-clip minimum.
    pub min_eye_distance: f64,
    pub blur_score: f64,
    pub av_sync_confidence: f64,
    pub lip_motion_score: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speaker_id: Option<String>,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

impl ManifestRecord {
    /// Parses and validates one JSONL line (1-based `line` for messages).
    pub fn from_json_line(text: &str, line: usize) -> Result<Self, PipelineError> {
        let record: Self =
            serde_json::from_str(text).map_err(|e| PipelineError::Parse { line, message: e.to_string() })?;
        record.validate().map_err(|e| PipelineError::Parse { line, message: e.to_string() })?;
        Ok(record)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let invalid = |message: String| Err(PipelineError::InvalidRecord { id: self.id.clone(), message });
        let numbers = [
            ("duration", self.duration),
            ("language_confidence_en", self.language_confidence_en),
            ("max_abs_yaw", self.max_abs_yaw),
            ("max_abs_pitch", self.max_abs_pitch),
            ("min_eye_distance", self.min_eye_distance),
            ("blur_score", self.blur_score),
            ("av_sync_confidence", self.av_sync_confidence),
            ("lip_motion_score", self.lip_motion_score),
        ];
        if let Some((name, _)) = numbers.iter().find(|(_, v)| !v.is_finite()) {
            return invalid(format!("{name} is not finite"));
        }
        if self.duration <= 0.0 {
            return invalid(format!("duration {} must be positive", self.duration));
        }
        if !(0.0..=1.0).contains(&self.language_confidence_en) {
            return invalid(format!("language confidence {} outside [0, 1]", self.language_confidence_en));
        }
        for (name, v) in [
            ("max_abs_yaw", self.max_abs_yaw),
            ("max_abs_pitch", self.max_abs_pitch),
            ("min_eye_distance", self.min_eye_distance),
            ("blur_score", self.blur_score),
            ("lip_motion_score", self.lip_motion_score),
        ] {
            if v < 0.0 {
                return invalid(format!("{name} {v} must be nonnegative"));
            }
        }
        Ok(())
    }
}
