use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{ManifestRecord, PipelineError};
use crate::metrics::normalize_transcript;

pub const PROFILE_NAMES: [&str; 3] = ["lsvsr", "voxceleb2", "grid"];

/// Rejection reasons. `Malformed` marks lines that failed to parse; it is
/// never produced by [`apply_filters`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Duration,
    WordsPerSecond,
    Language,
    FaceAngle,
    EyeDistance,
    Blur,
    AvSync,
    LipMotion,
    Malformed,
}

impl Rule {
    pub const FILTERS: [Rule; 8] = [
        Rule::Duration,
        Rule::WordsPerSecond,
        Rule::Language,
        Rule::FaceAngle,
        Rule::EyeDistance,
        Rule::Blur,
        Rule::AvSync,
        Rule::LipMotion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Duration => "duration",
            Rule::WordsPerSecond => "words_per_second",
            Rule::Language => "language",
            Rule::FaceAngle => "face_angle",
            Rule::EyeDistance => "eye_distance",
            Rule::Blur => "blur",
            Rule::AvSync => "av_sync",
            Rule::LipMotion => "lip_motion",
            Rule::Malformed => "malformed",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Thresholds and the set of rules that are checked. Every bound is
/// inclusive on the accepting side: a record sitting exactly on a threshold
/// passes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterProfile {
    pub min_duration: f64,
    pub max_duration: f64,
    pub min_words_per_second: f64,
    /// Applies to both yaw and pitch.
    pub max_face_angle: f64,
    pub min_eye_distance: f64,
    /// Blur scores above this are rejected.
    pub max_blur: f64,
    pub min_av_sync: f64,
    pub min_lip_motion: f64,
    pub min_language_confidence: f64,
    pub enabled: BTreeSet<Rule>,
}

impl FilterProfile {
    pub fn lsvsr() -> Self {
        Self {
            min_duration: 1.0,
            max_duration: 6.0,
            min_words_per_second: 1.0,
            max_face_angle: 15.0,
            min_eye_distance: 80.0,
            max_blur: 0.5,
            min_av_sync: 0.5,
            min_lip_motion: 0.5,
            min_language_confidence: 0.5,
            enabled: Rule::FILTERS.into_iter().collect(),
        }
    }

    pub fn voxceleb2() -> Self {
        Self { max_face_angle: 30.0, ..Self::lsvsr() }
    }

    /// Same thresholds as LSVSR with every rule switched off.
    pub fn grid() -> Self {
        Self { enabled: BTreeSet::new(), ..Self::lsvsr() }
    }

    pub fn by_name(name: &str) -> Result<Self, PipelineError> {
        match name {
            "lsvsr" => Ok(Self::lsvsr()),
            "voxceleb2" => Ok(Self::voxceleb2()),
            "grid" => Ok(Self::grid()),
            _ => Err(PipelineError::UnknownProfile { name: name.to_string() }),
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let values = [
            self.min_duration,
            self.max_duration,
            self.min_words_per_second,
            self.max_face_angle,
            self.min_eye_distance,
            self.max_blur,
            self.min_av_sync,
            self.min_lip_motion,
            self.min_language_confidence,
        ];
        if values.iter().any(|v| !v.is_finite()) {
            return Err(PipelineError::InvalidProfile("thresholds must be finite".into()));
        }
        if self.min_duration >= self.max_duration {
            return Err(PipelineError::InvalidProfile(format!(
                "min_duration {} must be below max_duration {}",
                self.min_duration, self.max_duration
            )));
        }
        if self.enabled.contains(&Rule::Malformed) {
            return Err(PipelineError::InvalidProfile("\"malformed\" is not a filter rule".into()));
        }
        Ok(())
    }

    fn passes(&self, rule: Rule, record: &ManifestRecord) -> bool {
        match rule {
            Rule::Duration => (self.min_duration..=self.max_duration).contains(&record.duration),
            Rule::WordsPerSecond => {
                let words = normalize_transcript(&record.transcript).len() as f64;
                words / record.duration >= self.min_words_per_second
            }
            Rule::Language => record.language_confidence_en >= self.min_language_confidence,
            Rule::FaceAngle => record.max_abs_yaw <= self.max_face_angle && record.max_abs_pitch <= self.max_face_angle,
            Rule::EyeDistance => record.min_eye_distance >= self.min_eye_distance,
            Rule::Blur => record.blur_score <= self.max_blur,
            Rule::AvSync => record.av_sync_confidence >= self.min_av_sync,
            Rule::LipMotion => record.lip_motion_score >= self.min_lip_motion,
            Rule::Malformed => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterDecision {
    pub id: String,
    pub accepted: bool,
    pub failed_rules: Vec<Rule>,
    /// 1-based manifest line, set by [`filter_manifest`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Checks every enabled rule; `failed_rules` lists all failures in rule order.
pub fn apply_filters(record: &ManifestRecord, profile: &FilterProfile) -> FilterDecision {
    let failed_rules: Vec<Rule> = Rule::FILTERS
        .into_iter()
        .filter(|rule| profile.enabled.contains(rule) && !profile.passes(*rule, record))
        .collect();
    FilterDecision { id: record.id.clone(), accepted: failed_rules.is_empty(), failed_rules, line: None, error: None }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterSummary {
    pub total: usize,
    pub accepted: usize,
    pub rejected: usize,
    pub per_rule_failures: BTreeMap<Rule, usize>,
}

impl FilterSummary {
    fn new() -> Self {
        let per_rule_failures = Rule::FILTERS.into_iter().chain([Rule::Malformed]).map(|r| (r, 0)).collect();
        Self { total: 0, accepted: 0, rejected: 0, per_rule_failures }
    }

    fn record(&mut self, decision: &FilterDecision) {
        self.total += 1;
        if decision.accepted {
            self.accepted += 1;
        } else {
            self.rejected += 1;
        }
        for rule in &decision.failed_rules {
            *self.per_rule_failures.entry(*rule).or_default() += 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterOutcome {
    pub accepted: Vec<ManifestRecord>,
    pub decisions: Vec<FilterDecision>,
    pub summary: FilterSummary,
}

/// Filters JSONL manifest lines in order. Blank lines are skipped; any other
/// line that fails to parse gets a `malformed` decision and counts toward
/// the total.
pub fn filter_manifest<I, S>(lines: I, profile: &FilterProfile) -> FilterOutcome
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut outcome = FilterOutcome { accepted: Vec::new(), decisions: Vec::new(), summary: FilterSummary::new() };
    for (index, line) in lines.into_iter().enumerate() {
        let text = line.as_ref().trim();
        if text.is_empty() {
            continue;
        }
        let number = index + 1;
        let decision = match ManifestRecord::from_json_line(text, number) {
            Ok(record) => {
                let decision = FilterDecision { line: Some(number), ..apply_filters(&record, profile) };
                if decision.accepted {
                    outcome.accepted.push(record);
                }
                decision
            }
            Err(e) => FilterDecision {
                id: malformed_id(text, number),
                accepted: false,
                failed_rules: vec![Rule::Malformed],
                line: Some(number),
                error: Some(e.to_string()),
            },
        };
        outcome.summary.record(&decision);
        outcome.decisions.push(decision);
    }
    outcome
}

fn malformed_id(text: &str, line: usize) -> String {
    serde_json::from_str::<serde_json::Value>(text)
        .ok()
        .and_then(|v| v.get("id").and_then(|id| id.as_str()).map(str::to_string))
        .unwrap_or_else(|| format!("line:{line}"))
}
