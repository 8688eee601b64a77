//! `kgqa` — build an exemplar index, answer single questions, run batch
//! evaluations, and aggregate instrumentation reports.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use kgqa_core::config::AppConfig;
use kgqa_core::eval::{
    aggregate, ask, build_index_file, evaluate, render_stats_table, EvalOptions, EvalReport,
    RunContext, RunOptions,
};
use kgqa_core::exemplar::{read_records_path, TopicEntityAnnotation};
use kgqa_core::kg::EntityId;
use kgqa_core::planner::write_transcript;

#[derive(Parser)]
#[command(name = "kgqa", version, about = "Knowledge-graph question answering with exemplar-guided exploration")]
struct Cli {
    /// Configuration file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Knowledge graph override: a triple TSV path or a SPARQL endpoint URL.
    #[arg(long, global = true)]
    kg: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build and persist the exemplar index from training records.
    BuildIndex {
        /// Training records (JSONL).
        #[arg(long)]
        train: PathBuf,
        /// Output index file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Answer a single question.
    Ask {
        #[arg(long)]
        question: String,
        /// Topic entity ids, comma-separated; `id:category` supplies a
        /// category for templating.
        #[arg(long)]
        topics: String,
        /// Run without exemplar retrieval.
        #[arg(long)]
        no_exemplars: bool,
        /// Scripted mock completions for this run (JSONL).
        #[arg(long)]
        mock: Option<PathBuf>,
        /// Write the provider-call transcript here (JSONL).
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    /// Run a test file and write an evaluation report.
    Eval {
        /// Test records (JSONL).
        #[arg(long)]
        test: PathBuf,
        /// Report output path (JSON).
        #[arg(long)]
        out: PathBuf,
        /// Concurrent question runs.
        #[arg(long)]
        parallel: Option<usize>,
        /// Directory of per-question mock scripts named `<id>.jsonl`.
        #[arg(long)]
        mock_dir: Option<PathBuf>,
        /// Run without exemplar retrieval.
        #[arg(long)]
        no_exemplars: bool,
    },
    /// Aggregate one or more reports into the relation-count and lookahead
    /// tables.
    Stats {
        /// Report files produced by `eval`.
        #[arg(required = true)]
        reports: Vec<PathBuf>,
        /// Write the aggregated summary as JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_config(path: &Option<PathBuf>) -> Result<AppConfig> {
    match path {
        Some(path) => Ok(AppConfig::load(path)?),
        None => Ok(AppConfig::default()),
    }
}

fn parse_topics(spec: &str) -> Result<Vec<TopicEntityAnnotation>> {
    let mut topics = Vec::new();
    for piece in spec.split(',') {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        let (id, category) = match piece.split_once(':') {
            Some((id, category)) => (id.trim(), Some(category.trim().to_string())),
            None => (piece, None),
        };
        if id.is_empty() {
            bail!("topic entity id must be non-empty in `{piece}`");
        }
        topics.push(TopicEntityAnnotation::new(EntityId::new(id), id, category));
    }
    if topics.is_empty() {
        bail!("at least one topic entity is required");
    }
    Ok(topics)
}

fn main() -> Result<()> {
    env_logger::init();
    let cli = Cli::parse();
    let config = load_config(&cli.config)?;

    match cli.command {
        Command::BuildIndex { train, out } => {
            let ctx_config = config.clone();
            // index building needs only the embedding provider; build a
            // context without graph or index requirements
            let embedder = embedder_only(&ctx_config)?;
            let manifest = build_index_file(embedder.as_ref(), &train, &out)?;
            println!(
                "indexed {} records (dimension {}, provider {}, templating {}) -> {}",
                manifest.records,
                manifest.dimension,
                manifest.provider,
                manifest.templating_version,
                out.display()
            );
        }
        Command::Ask { question, topics, no_exemplars, mock, transcript } => {
            let topics = parse_topics(&topics)?;
            let ctx = RunContext::build(&config, cli.kg.as_deref(), !no_exemplars)
                .context("cannot assemble run context")?;
            let options = RunOptions { no_exemplars, mock_script: mock };
            let output = ask(&ctx, &question, &topics, &options)?;
            if output.result.answers.is_empty() {
                println!("(no answer)");
            } else {
                println!("{}", output.result.answers.join(", "));
            }
            for path in &output.result.supporting_paths {
                println!("{}", path.render());
            }
            let c = &output.result.counters;
            println!("exemplars: {}", output.exemplar_count);
            println!("iterations_used: {}", c.iterations_used);
            println!("llm_calls: {}", c.llm_calls);
            println!(
                "lookahead: triggered={} answered={}",
                c.lookahead_triggered, c.lookahead_answered
            );
            println!("relation_counts: {:?}", c.relation_counts);
            if c.forced_answer {
                println!("forced_answer: true");
            }
            if let Some(path) = transcript {
                let file = std::fs::File::create(&path)
                    .with_context(|| format!("cannot create {}", path.display()))?;
                write_transcript(&output.result.transcript, file)?;
                println!("transcript: {}", path.display());
            }
        }
        Command::Eval { test, out, parallel, mock_dir, no_exemplars } => {
            let records = read_records_path(&test)?;
            let ctx = RunContext::build(&config, cli.kg.as_deref(), !no_exemplars)
                .context("cannot assemble run context")?;
            let options = EvalOptions { no_exemplars, parallel, mock_dir };
            let run = evaluate(&ctx, &records, &options)?;
            std::fs::write(&out, run.report.to_json_pretty())
                .with_context(|| format!("cannot write {}", out.display()))?;
            let correct = run.report.per_question.iter().filter(|o| o.correct).count();
            println!(
                "hits@1 = {:.4} ({} / {})",
                run.report.hits_at_1,
                correct,
                run.report.per_question.len()
            );
            println!(
                "lookahead: triggered {} ({:.1}%), early correct {} ({:.1}% of triggered)",
                run.report.lookahead.triggered,
                run.report.lookahead.triggered_pct,
                run.report.lookahead.early_correct,
                run.report.lookahead.early_correct_pct
            );
            for outcome in run.report.per_question.iter().filter(|o| o.error.is_some()) {
                eprintln!("{}: {}", outcome.id, outcome.error.as_deref().unwrap_or(""));
            }
            println!("report: {}", out.display());
        }
        Command::Stats { reports, out } => {
            let mut loaded = Vec::with_capacity(reports.len());
            for path in &reports {
                loaded.push(EvalReport::load(path)?);
            }
            let stats = aggregate(&loaded);
            print!("{}", render_stats_table(&stats));
            if let Some(path) = out {
                let mut text = serde_json::to_string_pretty(&stats)?;
                text.push('\n');
                std::fs::write(&path, text)
                    .with_context(|| format!("cannot write {}", path.display()))?;
            }
        }
    }
    Ok(())
}

fn embedder_only(
    config: &AppConfig,
) -> Result<Box<dyn kgqa_core::embed::EmbeddingProvider>> {
    use kgqa_core::config::EmbeddingKind;
    use kgqa_core::embed::{HashEmbeddingProvider, HttpEmbeddingConfig, HttpEmbeddingProvider};
    use std::time::Duration;
    Ok(match config.embedding_provider.kind {
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
    })
}
