use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::MetricError;

/// Per-utterance metric values. Serialized as one JSONL line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub id: String,
    pub mcd: f64,
    pub ffe: f64,
    /// `None` (JSON `null`) when no frame is voiced in both contours.
    pub gpe: Option<f64>,
    pub vde: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wer: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word_edits: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_words: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lse_c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lse_d: Option<f64>,
    pub pitch_frames: usize,
    pub mfcc_frames: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricStats {
    pub mean: Option<f64>,
    pub count: usize,
    pub excluded: usize,
}

impl MetricStats {
    fn from_values(values: impl Iterator<Item = Option<f64>>) -> Self {
        let (mut sum, mut count, mut excluded) = (0.0, 0, 0);
        for v in values {
            match v {
                Some(v) => {
                    sum += v;
                    count += 1;
                }
                None => excluded += 1,
            }
        }
        Self { mean: (count > 0).then(|| sum / count as f64), count, excluded }
    }
}

/// Corpus summary: `{metric: {mean, count, excluded}}` plus the utterance count.
///
/// `wer` is the macro average of per-utterance rates; `wer_corpus` pools edits
/// and reference words across utterances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub utterances: usize,
    #[serde(flatten)]
    pub metrics: BTreeMap<String, MetricStats>,
}

impl Summary {
    pub fn get(&self, metric: &str) -> Option<&MetricStats> {
        self.metrics.get(metric)
    }

    pub fn mean(&self, metric: &str) -> Option<f64> {
        self.get(metric).and_then(|s| s.mean)
    }
}

/// Reduces reports in input order, so the result does not depend on how they were produced.
pub fn aggregate_reports(reports: &[MetricReport]) -> Result<Summary, MetricError> {
    if reports.is_empty() {
        return Err(MetricError::NoReports);
    }
    let stats = |f: fn(&MetricReport) -> Option<f64>| MetricStats::from_values(reports.iter().map(f));
    let mut metrics = BTreeMap::new();
    metrics.insert("mcd".to_owned(), stats(|r| Some(r.mcd)));
    metrics.insert("ffe".to_owned(), stats(|r| Some(r.ffe)));
    metrics.insert("gpe".to_owned(), stats(|r| r.gpe));
    metrics.insert("vde".to_owned(), stats(|r| Some(r.vde)));
    metrics.insert("wer".to_owned(), stats(|r| r.wer));
    metrics.insert("lse_c".to_owned(), stats(|r| r.lse_c));
    metrics.insert("lse_d".to_owned(), stats(|r| r.lse_d));

    let (mut edits, mut words, mut count) = (0usize, 0usize, 0usize);
    for r in reports {
        if let (Some(_), Some(e), Some(w)) = (r.wer, r.word_edits, r.reference_words) {
            edits += e;
            words += w;
            count += 1;
        }
    }
    metrics.insert(
        "wer_corpus".to_owned(),
        MetricStats { mean: (words > 0).then(|| edits as f64 / words as f64), count, excluded: reports.len() - count },
    );
    Ok(Summary { utterances: reports.len(), metrics })
}
