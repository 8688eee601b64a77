//! Batch evaluation: dataset ingestion, per-question agent execution,
//! Hits@1 scoring, and instrumentation reports.

mod normalize;
mod report;
mod runner;

pub use normalize::{any_match, normalize_answer};
pub use report::{
    aggregate, render_stats_table, EvalReport, LookaheadSummary, QuestionOutcome,
    RelationHistogram, StatsSummary, REPORT_VERSION,
};
pub use runner::{
    ask, build_index_file, evaluate, manifest_path, AskOutput, EvalOptions, EvalRun,
    IndexManifest, LlmSource, ProviderHandle, QuestionTrace, RunContext, RunOptions,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("no records in test file")]
    NoRecords,
    #[error("report {file}: {msg}")]
    Report { file: String, msg: String },
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Dataset(#[from] crate::exemplar::ExemplarError),
    #[error(transparent)]
    Kg(#[from] crate::kg::KgError),
    #[error(transparent)]
    Embed(#[from] crate::embed::EmbedError),
    #[error(transparent)]
    Planner(#[from] crate::planner::PlannerError),
    #[error(transparent)]
    Run(#[from] crate::engine::RunError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
