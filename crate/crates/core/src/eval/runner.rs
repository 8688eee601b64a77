//! Batch evaluation and single-question execution: context assembly from
//! configuration, per-question agent runs (optionally parallel), scoring,
//! and index building.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::config::{AppConfig, EmbeddingKind, LlmKind};
use crate::embed::{
    embed_one, EmbeddingProvider, HashEmbeddingProvider, HttpEmbeddingConfig,
    HttpEmbeddingProvider,
};
use crate::engine::{
    self, EmbeddingScorer, EngineConfig, PruneTrace, RunDeps, RunResult,
};
use crate::exemplar::{
    build_index, load_index, read_records_path, retrieve, save_index, training_store,
    DatasetRecord, Exemplar, ExemplarIndex, RetrievalConfig, TopicEntityAnnotation,
    TrainingQuestion, template_question,
};
use crate::kg::{
    load_triples_path, EntityId, KnowledgeGraph, Relation, ReasoningPath, SparqlBackend,
    SparqlConfig,
};
use crate::planner::{HttpChatConfig, HttpChatProvider, LlmProvider, MockProvider, MockScript};

use super::normalize::any_match;
use super::report::{EvalReport, QuestionOutcome};
use super::HarnessError;

use std::collections::BTreeSet;
use std::time::Duration;

/// Everything a run needs, assembled once per process from configuration.
pub struct RunContext {
    pub kg: Box<dyn KnowledgeGraph>,
    pub embedder: Box<dyn EmbeddingProvider>,
    pub llm: LlmSource,
    pub retrieval: RetrievalConfig,
    pub engine: EngineConfig,
    pub index: Option<ExemplarIndex>,
    pub store: BTreeMap<String, TrainingQuestion>,
    pub validate_paths: bool,
    pub parallel: usize,
}

/// Where completions come from. HTTP providers are shared across runs; a
/// mock script is instantiated fresh per run so each run owns its cursor.
pub enum LlmSource {
    Http(Arc<HttpChatProvider>),
    Script(MockScript),
    Unconfigured,
}

pub enum ProviderHandle {
    Shared(Arc<HttpChatProvider>),
    Owned(MockProvider),
}

impl ProviderHandle {
    pub fn provider(&self) -> &dyn LlmProvider {
        match self {
            ProviderHandle::Shared(p) => p.as_ref(),
            ProviderHandle::Owned(p) => p,
        }
    }
}

impl RunContext {
    /// Builds the context from a config document. `kg_override` replaces the
    /// configured graph source; `need_index` controls whether the persisted
    /// index and training store must be present.
    pub fn build(
        config: &AppConfig,
        kg_override: Option<&str>,
        need_index: bool,
    ) -> Result<Self, HarnessError> {
        let source = kg_override.unwrap_or(&config.kg.source);
        if source.is_empty() {
            return Err(HarnessError::Config(
                "no knowledge graph configured; set [kg].source or pass --kg".into(),
            ));
        }
        let kg: Box<dyn KnowledgeGraph> =
            if source.starts_with("http://") || source.starts_with("https://") {
                Box::new(SparqlBackend::new(SparqlConfig {
                    endpoint: source.to_string(),
                    timeout: config.kg.timeout(),
                    retries: config.kg.retries,
                    backoff: config.kg.backoff(),
                    iri_prefix: config.kg.iri_prefix.clone(),
                })?)
            } else {
                Box::new(load_triples_path(Path::new(source))?)
            };

        let embedder: Box<dyn EmbeddingProvider> = match config.embedding_provider.kind {
            EmbeddingKind::Hash => {
                Box::new(HashEmbeddingProvider::new(config.embedding_provider.dimension))
            }
            EmbeddingKind::Http => Box::new(HttpEmbeddingProvider::new(HttpEmbeddingConfig {
                base_url: config.embedding_provider.base_url.clone(),
                model: config.embedding_provider.model.clone(),
                dimension: config.embedding_provider.dimension,
                timeout: Duration::from_secs(config.embedding_provider.timeout_secs),
                retries: config.embedding_provider.retries,
                backoff: Duration::from_millis(config.embedding_provider.backoff_ms),
                max_batch: config.embedding_provider.max_batch,
            })?),
        };

        let llm = match config.llm_provider.kind {
            LlmKind::Http if !config.llm_provider.base_url.is_empty() => {
                LlmSource::Http(Arc::new(HttpChatProvider::new(HttpChatConfig {
                    base_url: config.llm_provider.base_url.clone(),
                    model: config.llm_provider.model.clone(),
                    timeout: Duration::from_secs(config.llm_provider.timeout_secs),
                    retries: config.llm_provider.retries,
                    backoff: Duration::from_millis(config.llm_provider.backoff_ms),
                })?))
            }
            LlmKind::Mock => match &config.llm_provider.mock_script {
                Some(path) => LlmSource::Script(MockScript::read_path(path)?),
                None => LlmSource::Unconfigured,
            },
            _ => LlmSource::Unconfigured,
        };

        let (index, store) = if need_index {
            let index_path = config.harness.index.as_ref().ok_or_else(|| {
                HarnessError::Config(
                    "exemplar retrieval needs [harness].index (or run with --no-exemplars)".into(),
                )
            })?;
            let train_path = config.harness.train.as_ref().ok_or_else(|| {
                HarnessError::Config("exemplar retrieval needs [harness].train".into())
            })?;
            let index = load_index(index_path)?;
            let store = training_store(read_records_path(train_path)?)?;
            (Some(index), store)
        } else {
            (None, BTreeMap::new())
        };

        Ok(Self {
            kg,
            embedder,
            llm,
            retrieval: config.retrieval.clone(),
            engine: config.engine.clone(),
            index,
            store,
            validate_paths: config.harness.validate_paths,
            parallel: config.harness.parallel.max(1),
        })
    }

    /// A provider for one run. `mock_override` takes precedence over the
    /// configured source.
    pub fn provider_for_run(
        &self,
        mock_override: Option<&Path>,
    ) -> Result<ProviderHandle, HarnessError> {
        if let Some(path) = mock_override {
            return Ok(ProviderHandle::Owned(MockProvider::new(MockScript::read_path(path)?)));
        }
        match &self.llm {
            LlmSource::Http(provider) => Ok(ProviderHandle::Shared(Arc::clone(provider))),
            LlmSource::Script(script) => {
                Ok(ProviderHandle::Owned(MockProvider::new(script.clone())))
            }
            LlmSource::Unconfigured => Err(HarnessError::Config(
                "no completion provider configured; set [llm_provider] or pass --mock".into(),
            )),
        }
    }

    /// Templates the question with its annotations, embeds it, and retrieves
    /// exemplars from the loaded index.
    pub fn retrieve_exemplars(
        &self,
        question: &str,
        annotations: &[TopicEntityAnnotation],
    ) -> Result<Vec<Exemplar>, HarnessError> {
        let index = self.index.as_ref().ok_or_else(|| {
            HarnessError::Config("no exemplar index loaded".into())
        })?;
        self.retrieval.validate()?;
        let templated = template_question(question, annotations).question.text;
        let query = embed_one(self.embedder.as_ref(), &templated)?;
        Ok(retrieve(index, &self.store, &query, &self.retrieval))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IndexManifest {
    pub records: usize,
    pub dimension: usize,
    pub provider: String,
    pub templating_version: String,
}

pub fn manifest_path(index_path: &Path) -> PathBuf {
    let mut name = index_path.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    index_path.with_file_name(name)
}

/// Reads training records, builds the index over templated texts, persists
/// it, and writes a manifest next to it. Identical inputs produce
/// byte-identical outputs.
pub fn build_index_file(
    embedder: &dyn EmbeddingProvider,
    train: &Path,
    out: &Path,
) -> Result<IndexManifest, HarnessError> {
    let records = read_records_path(train)?;
    let questions: Vec<TrainingQuestion> = records
        .into_iter()
        .map(TrainingQuestion::try_from)
        .collect::<Result<_, _>>()?;
    let index = build_index(&questions, embedder)?;
    save_index(&index, out)?;
    let manifest = IndexManifest {
        records: index.len(),
        dimension: index.dimension(),
        provider: index.metadata().provider.clone(),
        templating_version: index.metadata().templating_version.clone(),
    };
    let mut text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    text.push('\n');
    std::fs::write(manifest_path(out), text)?;
    Ok(manifest)
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub no_exemplars: bool,
    pub mock_script: Option<PathBuf>,
}

#[derive(Debug)]
pub struct AskOutput {
    pub result: RunResult,
    pub exemplar_count: usize,
}

/// Runs a single question end to end and returns the result for rendering.
pub fn ask(
    ctx: &RunContext,
    question: &str,
    topics: &[TopicEntityAnnotation],
    options: &RunOptions,
) -> Result<AskOutput, HarnessError> {
    let exemplars = if options.no_exemplars {
        Vec::new()
    } else {
        ctx.retrieve_exemplars(question, topics)?
    };
    let exemplar_count = exemplars.len();
    let topic_ids: Vec<EntityId> = topics.iter().map(|t| t.entity.clone()).collect();
    let handle = ctx.provider_for_run(options.mock_script.as_deref())?;
    let scorer = EmbeddingScorer::new(ctx.embedder.as_ref());
    let deps = RunDeps {
        kg: ctx.kg.as_ref(),
        provider: handle.provider(),
        scorer: &scorer,
        exemplars,
    };
    let (mut result, _state) = engine::run(&deps, &ctx.engine, question, &topic_ids)?;
    result.counters.guided = !options.no_exemplars;
    Ok(AskOutput { result, exemplar_count })
}

#[derive(Debug, Clone, Default)]
pub struct EvalOptions {
    pub no_exemplars: bool,
    pub parallel: Option<usize>,
    /// Directory of per-question scripts named `<question id>.jsonl`.
    pub mock_dir: Option<PathBuf>,
}

/// Engine-level evidence kept alongside each report entry; used for path
/// soundness sweeps and set-level assertions, never serialized into the
/// report.
#[derive(Debug)]
pub struct QuestionTrace {
    pub id: String,
    pub prune_trace: Vec<PruneTrace>,
    pub stored_paths: Vec<ReasoningPath>,
    pub candidate_history: Vec<EntityId>,
    pub guide_relations: BTreeSet<Relation>,
    pub supporting_paths: Vec<ReasoningPath>,
}

#[derive(Debug)]
pub struct EvalRun {
    pub report: EvalReport,
    pub traces: Vec<QuestionTrace>,
}

/// Runs every record, scores Hits@1 by normalized exact match, and
/// assembles the deterministic report. Individual run failures are recorded
/// as incorrect with an error note; the harness keeps going.
pub fn evaluate(
    ctx: &RunContext,
    records: &[DatasetRecord],
    options: &EvalOptions,
) -> Result<EvalRun, HarnessError> {
    if records.is_empty() {
        return Err(HarnessError::NoRecords);
    }
    if !options.no_exemplars && ctx.index.is_none() {
        return Err(HarnessError::Config(
            "evaluation with exemplars needs a loaded index; pass --no-exemplars to skip".into(),
        ));
    }

    let workers = options.parallel.unwrap_or(ctx.parallel).max(1).min(records.len());
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<(QuestionOutcome, QuestionTrace)>>> =
        (0..records.len()).map(|_| Mutex::new(None)).collect();

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= records.len() {
                    break;
                }
                let item = run_one(ctx, &records[i], options);
                *slots[i].lock().unwrap() = Some(item);
            });
        }
    });

    let mut outcomes = Vec::with_capacity(records.len());
    let mut traces = Vec::with_capacity(records.len());
    for slot in slots {
        let (outcome, trace) = slot.into_inner().unwrap().expect("worker filled every slot");
        outcomes.push(outcome);
        traces.push(trace);
    }
    traces.sort_by(|a, b| a.id.cmp(&b.id));
    let report = EvalReport::assemble(outcomes, !options.no_exemplars);
    Ok(EvalRun { report, traces })
}

fn run_one(
    ctx: &RunContext,
    record: &DatasetRecord,
    options: &EvalOptions,
) -> (QuestionOutcome, QuestionTrace) {
    let empty_trace = || QuestionTrace {
        id: record.id.clone(),
        prune_trace: Vec::new(),
        stored_paths: Vec::new(),
        candidate_history: Vec::new(),
        guide_relations: BTreeSet::new(),
        supporting_paths: Vec::new(),
    };
    let failure = |msg: String| {
        (
            QuestionOutcome {
                id: record.id.clone(),
                predicted: Vec::new(),
                correct: false,
                error: Some(msg),
                counters: Default::default(),
            },
            empty_trace(),
        )
    };

    if record.answers.is_empty() {
        return failure("record has no gold answers".into());
    }
    let topic_ids: Vec<EntityId> =
        record.topic_entities.iter().map(|t| t.entity.clone()).collect();

    let exemplars = if options.no_exemplars {
        Vec::new()
    } else {
        match ctx.retrieve_exemplars(&record.question, &record.topic_entities) {
            Ok(exemplars) => exemplars,
            Err(e) => return failure(format!("retrieval failed: {e}")),
        }
    };

    let mock_override = options.mock_dir.as_ref().map(|dir| dir.join(format!("{}.jsonl", record.id)));
    let handle = match ctx.provider_for_run(mock_override.as_deref()) {
        Ok(handle) => handle,
        Err(e) => return failure(format!("provider setup failed: {e}")),
    };
    let scorer = EmbeddingScorer::new(ctx.embedder.as_ref());
    let deps = RunDeps {
        kg: ctx.kg.as_ref(),
        provider: handle.provider(),
        scorer: &scorer,
        exemplars,
    };
    let (mut result, state) = match engine::run(&deps, &ctx.engine, &record.question, &topic_ids)
    {
        Ok(pair) => pair,
        Err(e) => return failure(format!("run failed: {e}")),
    };
    result.counters.guided = !options.no_exemplars;

    let mut stored_paths = state.memory.paths.clone();
    for entity in state.memory.history_entities() {
        if let Some(path) = state.memory.history_path(&entity) {
            if !stored_paths.contains(path) {
                stored_paths.push(path.clone());
            }
        }
    }
    let mut error = None;
    if ctx.validate_paths {
        for path in stored_paths.iter().chain(&result.supporting_paths) {
            match path.verify(ctx.kg.as_ref()) {
                Ok(true) => {}
                Ok(false) => {
                    error = Some(format!("stored path failed validation: {}", path.render()));
                    break;
                }
                Err(e) => {
                    error = Some(format!("path validation error: {e}"));
                    break;
                }
            }
        }
    }

    let correct = error.is_none() && any_match(&result.answers, &record.answers);
    let outcome = QuestionOutcome {
        id: record.id.clone(),
        predicted: result.answers.clone(),
        correct,
        error,
        counters: result.counters.clone(),
    };
    let trace = QuestionTrace {
        id: record.id.clone(),
        prune_trace: state.prune_trace,
        stored_paths,
        candidate_history: state.memory.history_entities(),
        guide_relations: state.guide_relations,
        supporting_paths: result.supporting_paths,
    };
    (outcome, trace)
}
