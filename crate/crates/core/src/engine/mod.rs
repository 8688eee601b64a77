//! The agent control loop: initialization from topic entities, the
//! first-iteration lookahead shortcut, per-iteration relation and entity
//! exploration, memory updates, sufficiency evaluation, and reflection with
//! backtracking.

mod scorer;
mod state;

pub use scorer::{EmbeddingScorer, RelevanceScorer, ScoreError, UniformScorer};
pub use state::{AgentState, Frontier, Memory, PruneTrace, RunCounters, RunResult};

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exemplar::{extract_guide_relations, Exemplar};
use crate::kg::{
    instantiate_relation_path, Direction, EntityId, KgError, KnowledgeGraph, Relation,
    RelationPath, ReasoningPath, Triple,
};
use crate::planner::{
    LlmProvider, Planner, PlannerError, ReflectionDecision, SubObjectiveList,
};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("a run needs at least one topic entity")]
    EmptyTopics,
    #[error("invalid engine configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Kg(#[from] KgError),
    #[error(transparent)]
    Planner(#[from] PlannerError),
    #[error(transparent)]
    Scorer(#[from] ScoreError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct EngineConfig {
    /// Maximum exploration iterations (`D_max`).
    pub max_iterations: usize,
    /// Candidate-entity cap per expansion (`W`); larger sets are filtered by
    /// the relevance scorer.
    pub entity_cap: usize,
    /// Instantiation cap per (guide path, topic entity) during lookahead.
    pub lookahead_path_cap: usize,
    /// Total verdict-call budget for one lookahead.
    pub lookahead_verdict_cap: usize,
    /// When set, lookahead also tries each frontier guide relation as a
    /// prefix to whole exemplar paths instead of requiring the exemplar path
    /// itself to start with a frontier relation.
    pub lookahead_suffix_match: bool,
    /// Relation-name prefixes excluded from candidate sets.
    pub relation_blocklist: Vec<String>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            max_iterations: 4,
            entity_cap: 30,
            lookahead_path_cap: 8,
            lookahead_verdict_cap: 5,
            lookahead_suffix_match: false,
            relation_blocklist: Vec::new(),
        }
    }
}

pub struct RunDeps<'a> {
    pub kg: &'a dyn KnowledgeGraph,
    pub provider: &'a dyn LlmProvider,
    pub scorer: &'a dyn RelevanceScorer,
    pub exemplars: Vec<Exemplar>,
}

/// A pending path extension: path `path_index` is to be extended through
/// `relation` in `direction` during entity exploration.
#[derive(Debug, Clone)]
pub struct PendingStub {
    pub path_index: usize,
    pub relation: Relation,
    pub direction: Direction,
}

/// `selected ∪ (candidates ∩ guide)`: the model's picks plus every candidate
/// whose relation name appears in the guide set. This is the single code
/// path deciding the relation set used to extend paths.
pub fn final_relation_set(
    selected: &[(Relation, Direction)],
    candidates: &[(Relation, Direction)],
    guide: &BTreeSet<Relation>,
) -> Vec<(Relation, Direction)> {
    let mut out: BTreeSet<(Relation, Direction)> = selected.iter().cloned().collect();
    for (relation, direction) in candidates {
        if guide.contains(relation) {
            out.insert((relation.clone(), *direction));
        }
    }
    out.into_iter().collect()
}

pub(crate) fn candidate_relations(
    kg: &dyn KnowledgeGraph,
    entity: &EntityId,
    blocklist: &[String],
) -> Result<Vec<(Relation, Direction)>, KgError> {
    let mut relations = kg.relations_of(entity)?;
    if !blocklist.is_empty() {
        relations.retain(|(r, _)| !blocklist.iter().any(|prefix| r.name().starts_with(prefix)));
    }
    Ok(relations)
}

/// Seeds the run: one zero-step path per topic entity, statuses from the
/// decomposition, and the guide relations extracted from the exemplars.
pub fn init_state(
    question: &str,
    topics: &[EntityId],
    exemplars: Vec<Exemplar>,
    objectives: SubObjectiveList,
) -> Result<AgentState, RunError> {
    if topics.is_empty() {
        return Err(RunError::EmptyTopics);
    }
    let guide_relations = extract_guide_relations(&exemplars);
    let mut memory = Memory::default();
    memory.paths = topics.iter().cloned().map(ReasoningPath::seed).collect();
    memory.statuses = objectives;
    Ok(AgentState {
        question: question.to_string(),
        topic_entities: topics.to_vec(),
        iteration: 0,
        memory,
        exemplars,
        guide_relations,
        counters: RunCounters::default(),
        prune_trace: Vec::new(),
    })
}

/// A lookahead hit: the accepted path and the answers read off it.
#[derive(Debug, Clone)]
pub struct LookaheadHit {
    pub answers: Vec<String>,
    pub path: ReasoningPath,
}

/// Before the first iteration only: intersect the relations reachable from
/// the topic entities with the guide relations. If the intersection is
/// non-empty, instantiate the matching exemplar relation paths from the
/// topic entities and ask for a verdict on each instantiation, in exemplar
/// similarity order, until one is accepted or the budget runs out.
pub fn smart_lookahead(
    state: &mut AgentState,
    kg: &dyn KnowledgeGraph,
    planner: &Planner,
    config: &EngineConfig,
) -> Result<Option<LookaheadHit>, RunError> {
    assert_eq!(state.iteration, 0, "lookahead runs once, before iteration 1");
    if state.guide_relations.is_empty() {
        return Ok(None);
    }

    let mut frontier_pairs: BTreeSet<(Relation, Direction)> = BTreeSet::new();
    for entity in &state.topic_entities {
        frontier_pairs
            .extend(candidate_relations(kg, entity, &config.relation_blocklist)?);
    }
    let frontier_names: BTreeSet<&str> =
        frontier_pairs.iter().map(|(r, _)| r.name()).collect();
    let forward: BTreeSet<Relation> = state
        .guide_relations
        .iter()
        .filter(|r| frontier_names.contains(r.name()))
        .cloned()
        .collect();
    if forward.is_empty() {
        return Ok(None);
    }
    state.counters.lookahead_triggered = true;

    let mut verdicts = 0usize;
    let mut seen_shapes: BTreeSet<Vec<(String, Direction)>> = BTreeSet::new();
    for guide_path in guide_candidate_paths(state, &forward, &frontier_pairs, config) {
        let shape: Vec<(String, Direction)> =
            guide_path.steps().iter().map(|(r, d)| (r.name().to_string(), *d)).collect();
        if !seen_shapes.insert(shape) {
            continue;
        }
        for topic in state.topic_entities.clone() {
            let instances =
                instantiate_relation_path(kg, &topic, &guide_path, config.lookahead_path_cap)?;
            for instance in instances {
                if verdicts >= config.lookahead_verdict_cap {
                    return Ok(None);
                }
                verdicts += 1;
                for i in 0..instance.len() {
                    state.memory.subgraph.insert(instance.triple_at(i));
                }
                let verdict = planner.lookahead_verdict(&state.question, &instance)?;
                if verdict.sufficient {
                    state.counters.lookahead_answered = true;
                    return Ok(Some(LookaheadHit { answers: verdict.answer, path: instance }));
                }
            }
        }
    }
    Ok(None)
}

/// Guide relation paths eligible for lookahead, ordered by exemplar
/// similarity (the exemplar list is already sorted), then gold-path order.
/// Default mode takes whole exemplar paths whose first relation is in the
/// frontier intersection; suffix mode instead prepends each eligible
/// frontier relation to whole exemplar paths.
fn guide_candidate_paths(
    state: &AgentState,
    forward: &BTreeSet<Relation>,
    frontier_pairs: &BTreeSet<(Relation, Direction)>,
    config: &EngineConfig,
) -> Vec<RelationPath> {
    let mut out = Vec::new();
    for exemplar in &state.exemplars {
        for gold in &exemplar.question.gold_paths {
            let Some(path) = gold.relation_path() else { continue };
            if config.lookahead_suffix_match {
                for (relation, direction) in frontier_pairs {
                    if !forward.contains(relation) {
                        continue;
                    }
                    let mut steps = vec![(relation.clone(), *direction)];
                    steps.extend_from_slice(path.steps());
                    if let Ok(prefixed) = RelationPath::new(steps) {
                        out.push(prefixed);
                    }
                }
            } else if forward.contains(&path.first().0) {
                out.push(path);
            }
        }
    }
    out
}

/// Per distinct frontier entity: fetch candidate relations, ask the model to
/// prune them, union in the guide-matched candidates, and emit one pending
/// stub per (active path, final relation). Entities with no candidate
/// relations make no pruning call and contribute no stubs.
pub fn relation_exploration(
    state: &mut AgentState,
    kg: &dyn KnowledgeGraph,
    planner: &Planner,
    config: &EngineConfig,
) -> Result<Vec<PendingStub>, RunError> {
    let mut final_sets: Vec<(EntityId, Vec<(Relation, Direction)>)> = Vec::new();
    for entity in state.frontier().entities() {
        let candidates = candidate_relations(kg, &entity, &config.relation_blocklist)?;
        if candidates.is_empty() {
            state.prune_trace.push(PruneTrace {
                entity: entity.clone(),
                candidates,
                selected: Vec::new(),
                guide_matched: Vec::new(),
                final_set: Vec::new(),
            });
            final_sets.push((entity, Vec::new()));
            continue;
        }
        let selection = planner.prune_relations(
            &state.question,
            &state.memory.statuses,
            &entity,
            &candidates,
            &state.exemplars,
        )?;
        let guide_matched: Vec<(Relation, Direction)> = candidates
            .iter()
            .filter(|(r, _)| state.guide_relations.contains(r))
            .cloned()
            .collect();
        let final_set =
            final_relation_set(&selection.selected, &candidates, &state.guide_relations);
        state.counters.relation_counts.push(final_set.len());
        state.prune_trace.push(PruneTrace {
            entity: entity.clone(),
            candidates,
            selected: selection.selected,
            guide_matched,
            final_set: final_set.clone(),
        });
        final_sets.push((entity, final_set));
    }

    let mut stubs = Vec::new();
    for (path_index, path) in state.memory.paths.iter().enumerate() {
        let Some((_, final_set)) = final_sets.iter().find(|(e, _)| e == path.tail()) else {
            continue;
        };
        for (relation, direction) in final_set {
            stubs.push(PendingStub {
                path_index,
                relation: relation.clone(),
                direction: *direction,
            });
        }
    }
    Ok(stubs)
}

/// Expands every pending stub, caps oversized candidate sets by relevance
/// score (ties broken by ascending id), and records the new triples and
/// candidates into memory. Returns the extended paths with their new tail
/// facts; an empty return is the dead-end signal.
pub fn entity_exploration(
    state: &mut AgentState,
    kg: &dyn KnowledgeGraph,
    scorer: &dyn RelevanceScorer,
    config: &EngineConfig,
    stubs: &[PendingStub],
) -> Result<Vec<(ReasoningPath, Triple)>, RunError> {
    let active = state.memory.paths.clone();
    let mut extended = Vec::new();
    for stub in stubs {
        let path = &active[stub.path_index];
        let mut candidates = kg.expand(path.tail(), &stub.relation, stub.direction)?;
        if candidates.len() > config.entity_cap {
            candidates = cap_by_relevance(&state.question, candidates, config.entity_cap, scorer)?;
        }
        for entity in candidates {
            let new_path = path.extended(stub.relation.clone(), stub.direction, entity.clone());
            let triple = new_path.triple_at(new_path.len() - 1);
            state.memory.subgraph.insert(triple.clone());
            state.memory.record_candidate(entity, new_path.clone());
            extended.push((new_path, triple));
        }
    }
    Ok(extended)
}

/// Keeps the `cap` best-scored entities, ties by ascending id; the survivors
/// are returned in id order.
fn cap_by_relevance(
    question: &str,
    candidates: Vec<EntityId>,
    cap: usize,
    scorer: &dyn RelevanceScorer,
) -> Result<Vec<EntityId>, RunError> {
    let labels: Vec<String> =
        candidates.iter().map(|e| e.display_label().to_string()).collect();
    let scores = scorer.score(question, &labels)?;
    if scores.len() != candidates.len() {
        return Err(ScoreError(format!(
            "scorer returned {} scores for {} labels",
            scores.len(),
            candidates.len()
        ))
        .into());
    }
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .expect("scores are finite")
            .then_with(|| candidates[a].id().cmp(candidates[b].id()))
    });
    order.truncate(cap);
    let mut kept: Vec<EntityId> =
        order.into_iter().map(|i| candidates[i].clone()).collect();
    kept.sort();
    Ok(kept)
}

pub enum StepOutcome {
    Continue,
    Finish { answers: Vec<String> },
}

/// Post-exploration evaluation. On a dead end, reflection is invoked
/// immediately; otherwise the sufficiency check runs first and reflection
/// only on an insufficient verdict. Reflection is skipped entirely when
/// `allow_reflection` is false (the final iteration, where its outcome could
/// never be acted on).
pub fn evaluate_and_reflect(
    state: &mut AgentState,
    planner: &Planner,
    dead_end: bool,
    allow_reflection: bool,
) -> Result<StepOutcome, RunError> {
    if !dead_end {
        let verdict = planner.evaluate_sufficiency(
            &state.question,
            &state.memory.statuses,
            &state.memory.paths,
            false,
        )?;
        if verdict.sufficient {
            return Ok(StepOutcome::Finish { answers: verdict.answer });
        }
    }
    if allow_reflection {
        let frontier = state.frontier().entities();
        let history = state.memory.history_entities();
        let decision = planner.reflect(
            &state.question,
            &state.memory.statuses,
            &state.memory.paths,
            &frontier,
            &history,
            dead_end,
        )?;
        apply_backtrack(state, decision);
    }
    Ok(StepOutcome::Continue)
}

/// Re-adds previously seen candidates to the frontier by resuming the stored
/// path that first reached them. Entities already on the frontier are
/// skipped.
fn apply_backtrack(state: &mut AgentState, decision: ReflectionDecision) {
    let current: BTreeSet<EntityId> =
        state.memory.paths.iter().map(|p| p.tail().clone()).collect();
    let mut additions = Vec::new();
    for entity in decision.backtrack_entities {
        if current.contains(&entity) {
            continue;
        }
        if let Some(path) = state.memory.history_path(&entity) {
            if !state.memory.paths.contains(path) && !additions.contains(path) {
                additions.push(path.clone());
            }
        }
    }
    state.memory.paths.extend(additions);
}

fn memory_summary(state: &AgentState) -> String {
    let recent: Vec<String> = state
        .memory
        .subgraph
        .iter()
        .rev()
        .take(8)
        .map(|t| t.to_string())
        .collect();
    format!(
        "{} triples explored, {} candidate entities seen. Recent facts: {}",
        state.memory.subgraph.len(),
        state.memory.history_len(),
        if recent.is_empty() { "(none)".to_string() } else { recent.join("; ") }
    )
}

/// The full loop: decompose, init, lookahead, then up to `max_iterations`
/// rounds of relation and entity exploration with memory updates and
/// evaluation, ending early on a sufficient verdict or falling back to a
/// forced best-effort answer at budget exhaustion.
pub fn run(
    deps: &RunDeps,
    config: &EngineConfig,
    question: &str,
    topics: &[EntityId],
) -> Result<(RunResult, AgentState), RunError> {
    if config.max_iterations < 1 {
        return Err(RunError::Config("max_iterations must be at least 1".into()));
    }
    let planner = Planner::new(deps.provider);
    let objectives = planner.decompose(question, topics, &deps.exemplars)?;
    let mut state = init_state(question, topics, deps.exemplars.clone(), objectives)?;

    if let Some(hit) = smart_lookahead(&mut state, deps.kg, &planner, config)? {
        state.counters.iterations_used = 0;
        state.memory.paths = vec![hit.path.clone()];
        return Ok(seal(state, planner, hit.answers, vec![hit.path]));
    }

    let mut outcome: Option<Vec<String>> = None;
    for d in 1..=config.max_iterations {
        state.iteration = d;
        let allow_reflection = d < config.max_iterations;

        let stubs = relation_exploration(&mut state, deps.kg, &planner, config)?;
        let extended =
            entity_exploration(&mut state, deps.kg, deps.scorer, config, &stubs)?;
        let dead_end = extended.is_empty();

        if !dead_end {
            let kept = planner.select_paths(question, &extended)?;
            let latest: Vec<ReasoningPath> =
                kept.iter().map(|&i| extended[i].0.clone()).collect();
            state.memory.paths = latest.clone();
            let summary = memory_summary(&state);
            planner.update_statuses(question, &mut state.memory.statuses, &summary, &latest)?;
        }

        match evaluate_and_reflect(&mut state, &planner, dead_end, allow_reflection)? {
            StepOutcome::Finish { answers } => {
                state.counters.iterations_used = d;
                outcome = Some(answers);
                break;
            }
            StepOutcome::Continue => {}
        }
    }

    let answers = match outcome {
        Some(answers) => answers,
        None => {
            let verdict = planner.evaluate_sufficiency(
                question,
                &state.memory.statuses,
                &state.memory.paths,
                true,
            )?;
            state.counters.forced_answer = true;
            state.counters.iterations_used = config.max_iterations;
            verdict.answer
        }
    };
    let supporting = state.memory.paths.clone();
    Ok(seal(state, planner, answers, supporting))
}

fn seal(
    mut state: AgentState,
    planner: Planner,
    answers: Vec<String>,
    supporting_paths: Vec<ReasoningPath>,
) -> (RunResult, AgentState) {
    state.counters.llm_calls = planner.call_count();
    let transcript = planner.into_transcript();
    let result = RunResult {
        answers,
        supporting_paths,
        counters: state.counters.clone(),
        transcript,
    };
    (result, state)
}
