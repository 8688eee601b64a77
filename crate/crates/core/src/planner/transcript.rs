//! Provider-call transcripts: every call is recorded (prompt, completion,
//! latency, token counts when available) and a recorded transcript can be
//! replayed as a provider, reproducing the original run exactly.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::provider::{Completion, Decoding, LlmProvider};
use super::PlannerError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TranscriptRecord {
    pub tag: String,
    pub prompt: String,
    pub completion: String,
    pub latency_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prompt_tokens: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub completion_tokens: Option<u64>,
}

/// Wraps a provider and records every call.
pub struct RecordingProvider<'a> {
    inner: &'a dyn LlmProvider,
    records: Mutex<Vec<TranscriptRecord>>,
}

impl<'a> RecordingProvider<'a> {
    pub fn new(inner: &'a dyn LlmProvider) -> Self {
        Self { inner, records: Mutex::new(Vec::new()) }
    }

    pub fn call_count(&self) -> usize {
        self.records.lock().unwrap().len()
    }

    pub fn into_transcript(self) -> Vec<TranscriptRecord> {
        self.records.into_inner().unwrap()
    }
}

impl LlmProvider for RecordingProvider<'_> {
    fn send(
        &self,
        tag: &str,
        prompt: &str,
        decoding: &Decoding,
    ) -> Result<Completion, PlannerError> {
        let started = Instant::now();
        let completion = self.inner.send(tag, prompt, decoding)?;
        self.records.lock().unwrap().push(TranscriptRecord {
            tag: tag.to_string(),
            prompt: prompt.to_string(),
            completion: completion.text.clone(),
            latency_ms: started.elapsed().as_millis() as u64,
            prompt_tokens: completion.prompt_tokens,
            completion_tokens: completion.completion_tokens,
        });
        Ok(completion)
    }
}

/// Serves completions from a recorded transcript, verifying that each call
/// repeats the recorded prompt. A drifted prompt means the replayed run is
/// no longer the recorded run, so it fails loudly.
pub struct ReplayProvider {
    records: Vec<TranscriptRecord>,
    cursor: Mutex<usize>,
}

impl ReplayProvider {
    pub fn new(records: Vec<TranscriptRecord>) -> Self {
        Self { records, cursor: Mutex::new(0) }
    }
}

impl LlmProvider for ReplayProvider {
    fn send(
        &self,
        tag: &str,
        prompt: &str,
        _decoding: &Decoding,
    ) -> Result<Completion, PlannerError> {
        let mut cursor = self.cursor.lock().unwrap();
        let Some(record) = self.records.get(*cursor) else {
            return Err(PlannerError::Script(format!(
                "transcript exhausted at call {} (tag `{tag}`)",
                *cursor + 1
            )));
        };
        if record.tag != tag || record.prompt != prompt {
            return Err(PlannerError::Script(format!(
                "replay mismatch at call {}: recorded tag `{}`, got `{tag}`",
                *cursor + 1,
                record.tag
            )));
        }
        *cursor += 1;
        Ok(Completion::text_only(record.completion.clone()))
    }
}

pub fn write_transcript<W: Write>(
    records: &[TranscriptRecord],
    mut w: W,
) -> Result<(), PlannerError> {
    for record in records {
        let line = serde_json::to_string(record)
            .map_err(|e| PlannerError::Script(format!("serialize transcript: {e}")))?;
        writeln!(w, "{line}").map_err(|e| PlannerError::Script(e.to_string()))?;
    }
    Ok(())
}

pub fn read_transcript<R: Read>(reader: R) -> Result<Vec<TranscriptRecord>, PlannerError> {
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|e| PlannerError::Script(format!("line {}: {e}", idx + 1)))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: TranscriptRecord = serde_json::from_str(&line)
            .map_err(|e| PlannerError::Script(format!("line {}: {e}", idx + 1)))?;
        out.push(record);
    }
    Ok(out)
}

pub fn read_transcript_path(path: &Path) -> Result<Vec<TranscriptRecord>, PlannerError> {
    let file = std::fs::File::open(path)
        .map_err(|e| PlannerError::Script(format!("{}: {e}", path.display())))?;
    read_transcript(file)
}
