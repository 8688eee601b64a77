//! Knowledge-graph question answering with exemplar-guided exploration.
//!
//! The pipeline: training questions are entity-templated, embedded, and
//! indexed offline. At answer time, similar solved questions are retrieved
//! with their gold reasoning paths and injected into the planning prompts.
//! An iterative agent then explores the graph — pruning relations (with the
//! retrieved paths' relations unioned in), expanding entities, updating
//! memory, and reflecting — with a first-iteration lookahead that
//! instantiates exemplar relation paths directly and can answer without any
//! further exploration.
//!
//! Modules map to the subsystems:
//! - [`kg`]: triple storage, neighbor queries, path instantiation, and the
//!   remote endpoint client.
//! - [`embed`]: embedding providers (HTTP and deterministic offline).
//! - [`exemplar`]: templating, the persisted index, and retrieval.
//! - [`planner`]: prompt construction, response parsing, mock scripting,
//!   and transcripts.
//! - [`engine`]: the agent control loop.
//! - [`eval`]: the batch harness, scoring, and reports.

pub mod config;
pub mod embed;
pub mod engine;
pub mod eval;
pub mod exemplar;
pub mod kg;
pub mod planner;

pub use config::AppConfig;
pub use embed::{EmbeddingProvider, EmbeddingVector};
pub use engine::{AgentState, EngineConfig, RunCounters, RunResult};
pub use exemplar::{Exemplar, ExemplarIndex, RetrievalConfig, TopicEntityAnnotation};
pub use kg::{Direction, EntityId, KnowledgeGraph, Relation, RelationPath, ReasoningPath, Triple};
pub use planner::{LlmProvider, MockProvider, MockScript, SubObjectiveList};
