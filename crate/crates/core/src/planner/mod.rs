//! LLM-facing logic: prompt construction for each decision point, response
//! parsing with validation against what the prompt offered, and safe
//! fallbacks for malformed completions. No operation ever issues more than
//! two provider calls.

mod mock;
mod parse;
pub mod prompts;
mod provider;
mod transcript;

pub use mock::{MockEntry, MockProvider, MockScript};
pub use provider::{
    Completion, Decoding, HttpChatConfig, HttpChatProvider, LlmProvider, LLM_API_KEY_VAR,
};
pub use transcript::{
    read_transcript, read_transcript_path, write_transcript, RecordingProvider, ReplayProvider,
    TranscriptRecord,
};

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exemplar::Exemplar;
use crate::kg::{Direction, EntityId, Relation, ReasoningPath, Triple};

#[derive(Debug, Error)]
pub enum PlannerError {
    #[error("provider transport error: {0}")]
    Transport(String),
    #[error("scripted mock error: {0}")]
    Script(String),
    #[error("{op}: completion could not be parsed after reprompt: {last}")]
    Unparseable { op: &'static str, last: String },
    #[error("{0}")]
    Invalid(String),
}

/// Ordered decomposition of the question, with one status per item.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SubObjectiveList {
    pub items: Vec<String>,
    pub statuses: Vec<String>,
}

impl SubObjectiveList {
    pub fn new(items: Vec<String>) -> Self {
        let statuses = vec!["unknown".to_string(); items.len()];
        Self { items, statuses }
    }

    /// Applies new statuses positionally; items without a new status keep
    /// their previous one.
    pub fn apply_statuses(&mut self, new_statuses: &[String]) {
        for (i, status) in new_statuses.iter().enumerate().take(self.items.len()) {
            self.statuses[i] = status.clone();
        }
    }
}

/// Relations chosen by the model, guaranteed to be a subset of the offered
/// candidates.
#[derive(Debug, Clone)]
pub struct RelationSelection {
    pub selected: Vec<(Relation, Direction)>,
    pub raw_response: String,
    /// Names in the completion that were not offered.
    pub dropped: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SufficiencyVerdict {
    pub sufficient: bool,
    pub answer: Vec<String>,
    pub rationale: String,
}

impl SufficiencyVerdict {
    pub fn insufficient(rationale: impl Into<String>) -> Self {
        Self { sufficient: false, answer: Vec::new(), rationale: rationale.into() }
    }
}

#[derive(Debug, Clone)]
pub struct ReflectionDecision {
    pub correct_course: bool,
    pub backtrack_entities: Vec<EntityId>,
    pub reason: String,
    /// Ids in the completion that were not in the historical candidate set.
    pub dropped: Vec<String>,
}

impl ReflectionDecision {
    pub fn keep_course(reason: impl Into<String>) -> Self {
        Self {
            correct_course: true,
            backtrack_entities: Vec::new(),
            reason: reason.into(),
            dropped: Vec::new(),
        }
    }
}

const REPROMPT_SUFFIX: &str =
    "\n\nYour previous reply could not be used. Respond ONLY in the required format.";

fn decoding_for(tag: &str) -> Decoding {
    let max_tokens = match tag {
        prompts::tags::SELECT_PATHS => 120,
        prompts::tags::PRUNE_RELATIONS | prompts::tags::UPDATE_STATUSES => 300,
        prompts::tags::REFLECT => 300,
        _ => 400,
    };
    Decoding { temperature: 0.0, max_tokens }
}

/// Binds a provider to the planning operations and records every call.
pub struct Planner<'a> {
    provider: RecordingProvider<'a>,
}

impl<'a> Planner<'a> {
    pub fn new(provider: &'a dyn LlmProvider) -> Self {
        Self { provider: RecordingProvider::new(provider) }
    }

    pub fn call_count(&self) -> usize {
        self.provider.call_count()
    }

    pub fn into_transcript(self) -> Vec<TranscriptRecord> {
        self.provider.into_transcript()
    }

    fn call(&self, tag: &'static str, prompt: &str) -> Result<String, PlannerError> {
        Ok(self.provider.send(tag, prompt, &decoding_for(tag))?.text)
    }

    /// Breaks the question into ordered sub-objectives. Retrieved exemplars,
    /// when present, are rendered into the prompt so the decomposition can
    /// mirror their reasoning steps; otherwise a built-in one-shot example is
    /// used. Accepts a JSON array or a numbered list; anything else after one
    /// reprompt is an error.
    pub fn decompose(
        &self,
        question: &str,
        topics: &[EntityId],
        exemplars: &[Exemplar],
    ) -> Result<SubObjectiveList, PlannerError> {
        let tag = prompts::tags::DECOMPOSE;
        let prompt = prompts::decompose(question, topics, exemplars);
        let mut last = self.call(tag, &prompt)?;
        if let Some(items) = parse::string_list(&last) {
            return Ok(SubObjectiveList::new(items));
        }
        last = self.call(tag, &format!("{prompt}{REPROMPT_SUFFIX}"))?;
        match parse::string_list(&last) {
            Some(items) => Ok(SubObjectiveList::new(items)),
            None => Err(PlannerError::Unparseable { op: tag, last }),
        }
    }

    /// Selects relations around `entity`. Only names present in `candidates`
    /// survive; unknown names are dropped and logged. An empty selection is
    /// reprompted once and then falls back to the empty set (the engine's
    /// guide-relation union can still rescue the iteration).
    pub fn prune_relations(
        &self,
        question: &str,
        objectives: &SubObjectiveList,
        entity: &EntityId,
        candidates: &[(Relation, Direction)],
        exemplars: &[Exemplar],
    ) -> Result<RelationSelection, PlannerError> {
        assert!(!candidates.is_empty(), "prune_relations requires candidates");
        let tag = prompts::tags::PRUNE_RELATIONS;
        let prompt = prompts::prune_relations(question, objectives, entity, candidates, exemplars);

        let mut raw = self.call(tag, &prompt)?;
        let mut selection = filter_candidates(&raw, candidates);
        if selection.0.is_empty() {
            raw = self.call(tag, &format!("{prompt}{REPROMPT_SUFFIX}"))?;
            selection = filter_candidates(&raw, candidates);
        }
        let (selected, dropped) = selection;
        if !dropped.is_empty() {
            log::debug!("prune_relations dropped unoffered names: {}", dropped.join(", "));
        }
        Ok(RelationSelection { selected, raw_response: raw, dropped })
    }

    /// Chooses which extended paths survive into the next frontier.
    /// Out-of-range indices are dropped; if nothing valid remains, the first
    /// listed path is kept so exploration never stalls on a parse failure.
    pub fn select_paths(
        &self,
        question: &str,
        extended: &[(ReasoningPath, Triple)],
    ) -> Result<BTreeSet<usize>, PlannerError> {
        assert!(!extended.is_empty(), "select_paths requires candidate paths");
        let tag = prompts::tags::SELECT_PATHS;
        let raw = self.call(tag, &prompts::select_paths(question, extended))?;
        let mut kept: BTreeSet<usize> = parse::indices(&raw)
            .into_iter()
            .filter(|&i| i >= 0 && (i as usize) < extended.len())
            .map(|i| i as usize)
            .collect();
        if kept.is_empty() {
            log::debug!("select_paths kept nothing usable from `{raw}`; keeping path 0");
            kept.insert(0);
        }
        Ok(kept)
    }

    /// Asks whether the gathered paths suffice to answer. A verdict claiming
    /// sufficiency without any answer is demoted to insufficient. With
    /// `forced` the prompt instructs a best-effort answer at budget
    /// exhaustion.
    pub fn evaluate_sufficiency(
        &self,
        question: &str,
        objectives: &SubObjectiveList,
        paths: &[ReasoningPath],
        forced: bool,
    ) -> Result<SufficiencyVerdict, PlannerError> {
        let tag =
            if forced { prompts::tags::FORCED_ANSWER } else { prompts::tags::SUFFICIENCY };
        let prompt = prompts::sufficiency(question, objectives, paths, forced);
        let verdict = self.verdict_with_reprompt(tag, &prompt)?;
        Ok(enforce_answer_presence(verdict))
    }

    /// Judges a lookahead candidate path. Beyond the usual sufficiency
    /// enforcement, a sufficient verdict must name an entity that actually
    /// lies on the path.
    pub fn lookahead_verdict(
        &self,
        question: &str,
        path: &ReasoningPath,
    ) -> Result<SufficiencyVerdict, PlannerError> {
        let tag = prompts::tags::LOOKAHEAD;
        let prompt = prompts::lookahead(question, path);
        let mut verdict = enforce_answer_presence(self.verdict_with_reprompt(tag, &prompt)?);
        if verdict.sufficient && !answer_on_path(&verdict.answer, path) {
            log::debug!("lookahead answer not on candidate path; treating as insufficient");
            verdict.sufficient = false;
        }
        Ok(verdict)
    }

    fn verdict_with_reprompt(
        &self,
        tag: &'static str,
        prompt: &str,
    ) -> Result<SufficiencyVerdict, PlannerError> {
        let raw = self.call(tag, prompt)?;
        if let Some(v) = parse::verdict(&raw) {
            return Ok(to_verdict(v));
        }
        let raw = self.call(tag, &format!("{prompt}{REPROMPT_SUFFIX}"))?;
        match parse::verdict(&raw) {
            Some(v) => Ok(to_verdict(v)),
            None => Ok(SufficiencyVerdict::insufficient("completion was unparseable")),
        }
    }

    /// Decides whether to keep course or re-add previously seen entities to
    /// the frontier. Backtrack ids are validated against the historical
    /// candidate set offered in the prompt; unknown ids are dropped.
    pub fn reflect(
        &self,
        question: &str,
        objectives: &SubObjectiveList,
        paths: &[ReasoningPath],
        next_frontier: &[EntityId],
        history: &[EntityId],
        dead_end: bool,
    ) -> Result<ReflectionDecision, PlannerError> {
        let tag = prompts::tags::REFLECT;
        let prompt =
            prompts::reflect(question, objectives, paths, next_frontier, history, dead_end);
        let mut parsed = parse::reflection(&self.call(tag, &prompt)?);
        if parsed.is_none() {
            parsed = parse::reflection(&self.call(tag, &format!("{prompt}{REPROMPT_SUFFIX}"))?);
        }
        let Some(decision) = parsed else {
            return Ok(ReflectionDecision::keep_course("completion was unparseable"));
        };

        let mut backtrack = Vec::new();
        let mut dropped = Vec::new();
        for id in decision.backtrack {
            match history.iter().find(|e| e.id() == id) {
                Some(entity) => {
                    if !backtrack.contains(entity) {
                        backtrack.push(entity.clone());
                    }
                }
                None => dropped.push(id),
            }
        }
        if !dropped.is_empty() {
            log::debug!("reflect dropped non-historical ids: {}", dropped.join(", "));
        }
        Ok(ReflectionDecision {
            correct_course: decision.correct_course,
            backtrack_entities: backtrack,
            reason: decision.reason,
            dropped,
        })
    }

    /// Refreshes per-objective statuses from the latest exploration results.
    /// Single call; a garbled or short reply keeps previous statuses where it
    /// provides nothing better.
    pub fn update_statuses(
        &self,
        question: &str,
        objectives: &mut SubObjectiveList,
        memory_summary: &str,
        latest_paths: &[ReasoningPath],
    ) -> Result<(), PlannerError> {
        let tag = prompts::tags::UPDATE_STATUSES;
        let raw = self.call(
            tag,
            &prompts::update_statuses(question, objectives, memory_summary, latest_paths),
        )?;
        match parse::statuses(&raw) {
            Some(new_statuses) => objectives.apply_statuses(&new_statuses),
            None => log::debug!("update_statuses reply unparseable; keeping previous statuses"),
        }
        Ok(())
    }
}

fn to_verdict(v: parse::VerdictJson) -> SufficiencyVerdict {
    SufficiencyVerdict {
        sufficient: v.sufficient,
        answer: v
            .answer
            .into_iter()
            .map(|a| a.trim().to_string())
            .filter(|a| !a.is_empty())
            .collect(),
        rationale: v.reason,
    }
}

fn enforce_answer_presence(mut verdict: SufficiencyVerdict) -> SufficiencyVerdict {
    if verdict.sufficient && verdict.answer.is_empty() {
        log::debug!("sufficient verdict without an answer; treating as insufficient");
        verdict.sufficient = false;
    }
    verdict
}

fn answer_on_path(answers: &[String], path: &ReasoningPath) -> bool {
    answers.iter().any(|answer| {
        let wanted = answer.trim().to_lowercase();
        path.entities().iter().any(|e| {
            e.display_label().to_lowercase() == wanted || e.id().to_lowercase() == wanted
        })
    })
}

/// Splits parsed relation names into (offered candidates they match, names
/// that were never offered). Matching is by exact name after trimming; a
/// name selects every candidate direction it appears with.
fn filter_candidates(
    raw: &str,
    candidates: &[(Relation, Direction)],
) -> (Vec<(Relation, Direction)>, Vec<String>) {
    let mut names = parse::relation_names(raw);
    names.dedup();
    let mut selected = Vec::new();
    let mut dropped = Vec::new();
    for name in &names {
        let mut any = false;
        for (relation, direction) in candidates {
            if relation.name() == name {
                any = true;
                if !selected.contains(&(relation.clone(), *direction)) {
                    selected.push((relation.clone(), *direction));
                }
            }
        }
        if !any && !dropped.contains(name) {
            dropped.push(name.clone());
        }
    }
    selected.sort();
    (selected, dropped)
}
