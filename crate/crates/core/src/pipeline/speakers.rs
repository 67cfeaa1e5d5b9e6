use std::collections::BTreeMap;

use ndarray::Array1;
use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::attention::{aggregate_speaker_embedding, AttentionError, SpeakerEmbedding};

/// One utterance's embedding from the upstream speaker model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtteranceEmbedding {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speaker_id: Option<String>,
    pub embedding: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct SpeakerTable {
    /// Aggregated embedding per known speaker.
    pub speakers: BTreeMap<String, SpeakerEmbedding>,
    /// Utterances without a speaker id, embedded individually.
    pub utterances: BTreeMap<String, SpeakerEmbedding>,
    /// Speakers (or speakerless utterance ids) whose mean had no direction.
    pub degenerate: Vec<String>,
}

impl SpeakerTable {
    /// Embedding for an utterance: its speaker's aggregate if known,
    /// otherwise its own.
    pub fn lookup(&self, utterance_id: &str, speaker_id: Option<&str>) -> Option<&SpeakerEmbedding> {
        match speaker_id {
            Some(s) => self.speakers.get(s),
            None => self.utterances.get(utterance_id),
        }
    }
}

/// Averages embeddings per speaker. Wrong dimensions or non-finite values are
/// errors; a degenerate mean only flags that speaker.
pub fn build_speaker_table(items: &[UtteranceEmbedding]) -> Result<SpeakerTable, PipelineError> {
    let mut grouped: BTreeMap<&str, Vec<Array1<f64>>> = BTreeMap::new();
    let mut table = SpeakerTable::default();
    for item in items {
        let vector = Array1::from(item.embedding.clone());
        let result = match &item.speaker_id {
            Some(speaker) => {
                grouped.entry(speaker.as_str()).or_default().push(vector);
                continue;
            }
            None => aggregate_speaker_embedding(std::slice::from_ref(&vector)),
        };
        match result {
            Ok(e) => {
                table.utterances.insert(item.id.clone(), e);
            }
            Err(AttentionError::DegenerateSpeaker { .. }) => table.degenerate.push(item.id.clone()),
            Err(e) => return Err(PipelineError::InvalidRecord { id: item.id.clone(), message: e.to_string() }),
        }
    }
    for (speaker, vectors) in grouped {
        match aggregate_speaker_embedding(&vectors) {
            Ok(e) => {
                table.speakers.insert(speaker.to_string(), e);
            }
            Err(AttentionError::DegenerateSpeaker { .. }) => table.degenerate.push(speaker.to_string()),
            Err(e) => {
                return Err(PipelineError::InvalidRecord { id: format!("speaker {speaker}"), message: e.to_string() })
            }
        }
    }
    Ok(table)
}
