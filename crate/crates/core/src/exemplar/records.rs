//! Dataset records: the JSONL wire format shared by training and test
//! splits, plus the training-question view that guarantees gold paths.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read};

use serde::{Deserialize, Serialize};

use crate::kg::ReasoningPath;

use super::template::TopicEntityAnnotation;
use super::ExemplarError;

/// One dataset line: `{"id", "question", "topic_entities", "answers",
/// "gold_paths"?}`. Training records carry gold paths; test records may not.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub id: String,
    pub question: String,
    #[serde(default)]
    pub topic_entities: Vec<TopicEntityAnnotation>,
    #[serde(default)]
    pub answers: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gold_paths: Vec<ReasoningPath>,
}

/// A solved question usable as a retrieval exemplar: its gold reasoning
/// paths are guaranteed non-empty.
#[derive(Debug, Clone, Serialize)]
pub struct TrainingQuestion {
    pub id: String,
    pub text: String,
    pub topic_entities: Vec<TopicEntityAnnotation>,
    pub answers: Vec<String>,
    pub gold_paths: Vec<ReasoningPath>,
}

impl TryFrom<DatasetRecord> for TrainingQuestion {
    type Error = ExemplarError;

    fn try_from(record: DatasetRecord) -> Result<Self, Self::Error> {
        if record.gold_paths.is_empty() {
            return Err(ExemplarError::MissingGoldPaths { id: record.id });
        }
        Ok(TrainingQuestion {
            id: record.id,
            text: record.question,
            topic_entities: record.topic_entities,
            answers: record.answers,
            gold_paths: record.gold_paths,
        })
    }
}

impl TrainingQuestion {
    /// Relation-name-plus-direction sequences of every gold path; used for
    /// path-diversity filtering during retrieval.
    pub fn path_signatures(&self) -> Vec<Vec<(String, crate::kg::Direction)>> {
        self.gold_paths.iter().map(|p| p.signature()).collect()
    }
}

/// Reads JSONL records, reporting parse failures with 1-based line numbers.
/// Blank lines are rejected: every line must be one JSON object.
pub fn read_records<R: Read>(reader: R) -> Result<Vec<DatasetRecord>, ExemplarError> {
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| ExemplarError::Records { line: line_no, msg: e.to_string() })?;
        let record: DatasetRecord = serde_json::from_str(&line)
            .map_err(|e| ExemplarError::Records { line: line_no, msg: e.to_string() })?;
        out.push(record);
    }
    Ok(out)
}

pub fn read_records_path(path: &std::path::Path) -> Result<Vec<DatasetRecord>, ExemplarError> {
    let file = std::fs::File::open(path)
        .map_err(|e| ExemplarError::Records { line: 0, msg: format!("{}: {e}", path.display()) })?;
    read_records(file)
}

/// Converts records to training questions keyed by id. Duplicate ids are an
/// error listing every duplicate.
pub fn training_store(
    records: Vec<DatasetRecord>,
) -> Result<BTreeMap<String, TrainingQuestion>, ExemplarError> {
    let mut store = BTreeMap::new();
    let mut duplicates = Vec::new();
    for record in records {
        let question = TrainingQuestion::try_from(record)?;
        if store.contains_key(&question.id) {
            duplicates.push(question.id.clone());
        } else {
            store.insert(question.id.clone(), question);
        }
    }
    if !duplicates.is_empty() {
        duplicates.sort();
        duplicates.dedup();
        return Err(ExemplarError::DuplicateIds(duplicates));
    }
    Ok(store)
}

#[cfg(test)]
mod tests {
    use super::*;

    const LINE: &str = r#"{"id":"t1","question":"what country was carol born in","topic_entities":[{"id":"carol","mention":"carol","category":"person"}],"answers":["sylvania"],"gold_paths":[[{"head":"carol","relation":"born_in","tail":"rivertown","direction":"outgoing"},{"head":"rivertown","relation":"located_in","tail":"sylvania","direction":"outgoing"}]]}"#;

    #[test]
    fn parses_full_record() {
        let records = read_records(LINE.as_bytes()).unwrap();
        assert_eq!(records.len(), 1);
        let r = &records[0];
        assert_eq!(r.id, "t1");
        assert_eq!(r.topic_entities[0].mention, "carol");
        assert_eq!(r.gold_paths[0].len(), 2);
    }

    #[test]
    fn malformed_line_reports_number() {
        let input = format!("{LINE}\nnot json\n");
        let err = read_records(input.as_bytes()).unwrap_err();
        match err {
            ExemplarError::Records { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn training_question_requires_gold_paths() {
        let record = DatasetRecord {
            id: "x".into(),
            question: "q".into(),
            topic_entities: vec![],
            answers: vec!["a".into()],
            gold_paths: vec![],
        };
        assert!(matches!(
            TrainingQuestion::try_from(record),
            Err(ExemplarError::MissingGoldPaths { .. })
        ));
    }

    #[test]
    fn duplicate_ids_listed() {
        let records = vec![
            serde_json::from_str::<DatasetRecord>(LINE).unwrap(),
            serde_json::from_str::<DatasetRecord>(LINE).unwrap(),
        ];
        match training_store(records) {
            Err(ExemplarError::DuplicateIds(ids)) => assert_eq!(ids, vec!["t1".to_string()]),
            other => panic!("unexpected {other:?}"),
        }
    }
}
