//! Exemplar retrieval: question templating, embedding, the persisted
//! nearest-neighbor index, and threshold/diversity-filtered lookup of solved
//! training questions with their gold reasoning paths.

mod index;
mod records;
mod template;

pub use index::{
    build_index, extract_guide_relations, load_index, retrieve, save_index, Exemplar,
    ExemplarIndex, IndexEntry, IndexMetadata, RetrievalConfig,
};
pub use records::{
    read_records, read_records_path, training_store, DatasetRecord, TrainingQuestion,
};
pub use template::{
    template_question, TemplateOutcome, TemplatedQuestion, TopicEntityAnnotation,
    TEMPLATING_VERSION,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExemplarError {
    #[error("duplicate question ids: {}", .0.join(", "))]
    DuplicateIds(Vec<String>),
    #[error("training record {id} has no gold paths")]
    MissingGoldPaths { id: String },
    #[error("records line {line}: {msg}")]
    Records { line: usize, msg: String },
    #[error("index format error: {0}")]
    Format(String),
    #[error("index file corrupt: {0}")]
    Corrupt(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Embed(#[from] crate::embed::EmbedError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
