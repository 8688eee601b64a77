//! Scripted mock provider for offline runs and tests.
//!
//! A script is an ordered list of `(matcher, response)` pairs consumed
//! strictly in order: each incoming call must match the next entry, either
//! because the matcher equals the call's operation tag or because it is a
//! substring of the prompt. Anything else is a hard error, which keeps test
//! runs honest about the exact sequence of planner calls they make.

use std::io::{BufRead, BufReader, Read};
use std::path::Path;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::provider::{Completion, Decoding, LlmProvider};
use super::PlannerError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MockEntry {
    #[serde(rename = "match")]
    pub matcher: String,
    pub response: String,
}

#[derive(Debug, Clone, Default)]
pub struct MockScript {
    pub entries: Vec<MockEntry>,
}

impl MockScript {
    pub fn new(entries: Vec<MockEntry>) -> Self {
        Self { entries }
    }

    /// Convenience for building scripts in tests: `(matcher, response)`.
    pub fn from_pairs<M: Into<String>, R: Into<String>>(
        pairs: impl IntoIterator<Item = (M, R)>,
    ) -> Self {
        Self {
            entries: pairs
                .into_iter()
                .map(|(m, r)| MockEntry { matcher: m.into(), response: r.into() })
                .collect(),
        }
    }

    /// Reads a JSONL script: one `{"match": ..., "response": ...}` per line.
    pub fn read<R: Read>(reader: R) -> Result<Self, PlannerError> {
        let mut entries = Vec::new();
        for (idx, line) in BufReader::new(reader).lines().enumerate() {
            let line = line.map_err(|e| PlannerError::Script(format!("line {}: {e}", idx + 1)))?;
            if line.trim().is_empty() {
                continue;
            }
            let entry: MockEntry = serde_json::from_str(&line)
                .map_err(|e| PlannerError::Script(format!("line {}: {e}", idx + 1)))?;
            entries.push(entry);
        }
        Ok(Self { entries })
    }

    pub fn read_path(path: &Path) -> Result<Self, PlannerError> {
        let file = std::fs::File::open(path)
            .map_err(|e| PlannerError::Script(format!("{}: {e}", path.display())))?;
        Self::read(file)
    }
}

/// One run's worth of scripted completions. The cursor is owned by this
/// provider instance, so concurrent runs each build their own.
pub struct MockProvider {
    script: MockScript,
    cursor: Mutex<usize>,
}

impl MockProvider {
    pub fn new(script: MockScript) -> Self {
        Self { script, cursor: Mutex::new(0) }
    }

    pub fn consumed(&self) -> usize {
        *self.cursor.lock().unwrap()
    }
}

impl LlmProvider for MockProvider {
    fn send(
        &self,
        tag: &str,
        prompt: &str,
        _decoding: &Decoding,
    ) -> Result<Completion, PlannerError> {
        let mut cursor = self.cursor.lock().unwrap();
        let Some(entry) = self.script.entries.get(*cursor) else {
            return Err(PlannerError::Script(format!(
                "script exhausted at call {} (tag `{tag}`)",
                *cursor + 1
            )));
        };
        if entry.matcher != tag && !prompt.contains(&entry.matcher) {
            return Err(PlannerError::Script(format!(
                "script entry {} expects `{}` but got tag `{tag}`",
                *cursor + 1,
                entry.matcher
            )));
        }
        *cursor += 1;
        Ok(Completion::text_only(entry.response.clone()))
    }
}
