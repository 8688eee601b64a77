//! Run state: the active path set, explored-subgraph memory, candidate
//! history, and per-run instrumentation counters.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::exemplar::Exemplar;
use crate::kg::{Direction, EntityId, Relation, ReasoningPath, Triple};
use crate::planner::{SubObjectiveList, TranscriptRecord};

/// View of the entities to explore next: the tails of the active paths.
pub struct Frontier<'a> {
    pub paths: &'a [ReasoningPath],
}

impl Frontier<'_> {
    /// Distinct frontier entities in path order.
    pub fn entities(&self) -> Vec<EntityId> {
        let mut out: Vec<EntityId> = Vec::new();
        for path in self.paths {
            if !out.contains(path.tail()) {
                out.push(path.tail().clone());
            }
        }
        out
    }
}

/// Everything remembered across iterations. The subgraph and candidate
/// history only ever grow; the active path set is replaced each iteration by
/// the paths the model chose to continue.
#[derive(Debug, Default)]
pub struct Memory {
    pub subgraph: BTreeSet<Triple>,
    /// The active reasoning paths (lengths may differ).
    pub paths: Vec<ReasoningPath>,
    pub statuses: SubObjectiveList,
    // candidate entity -> first path that reached it, for backtracking
    candidate_history: BTreeMap<EntityId, ReasoningPath>,
}

impl Memory {
    pub fn record_candidate(&mut self, entity: EntityId, path: ReasoningPath) {
        self.candidate_history.entry(entity).or_insert(path);
    }

    pub fn history_contains(&self, entity: &EntityId) -> bool {
        self.candidate_history.contains_key(entity)
    }

    pub fn history_entities(&self) -> Vec<EntityId> {
        self.candidate_history.keys().cloned().collect()
    }

    pub fn history_path(&self, entity: &EntityId) -> Option<&ReasoningPath> {
        self.candidate_history.get(entity)
    }

    pub fn history_len(&self) -> usize {
        self.candidate_history.len()
    }
}

/// One relation-pruning call: what was offered, what the model picked, what
/// the guide set forced in, and the final union.
#[derive(Debug, Clone)]
pub struct PruneTrace {
    pub entity: EntityId,
    pub candidates: Vec<(Relation, Direction)>,
    pub selected: Vec<(Relation, Direction)>,
    pub guide_matched: Vec<(Relation, Direction)>,
    pub final_set: Vec<(Relation, Direction)>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RunCounters {
    pub lookahead_triggered: bool,
    pub lookahead_answered: bool,
    /// Size of the final relation set, one entry per pruning call.
    pub relation_counts: Vec<usize>,
    pub llm_calls: usize,
    pub iterations_used: usize,
    pub forced_answer: bool,
    /// Whether the run had exemplar guidance enabled.
    pub guided: bool,
}

#[derive(Debug)]
pub struct AgentState {
    pub question: String,
    pub topic_entities: Vec<EntityId>,
    /// Current iteration `D`; 0 before the loop starts.
    pub iteration: usize,
    pub memory: Memory,
    pub exemplars: Vec<Exemplar>,
    pub guide_relations: BTreeSet<Relation>,
    pub counters: RunCounters,
    pub prune_trace: Vec<PruneTrace>,
}

impl AgentState {
    pub fn frontier(&self) -> Frontier<'_> {
        Frontier { paths: &self.memory.paths }
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub answers: Vec<String>,
    pub supporting_paths: Vec<ReasoningPath>,
    pub counters: RunCounters,
    pub transcript: Vec<TranscriptRecord>,
}

impl RunResult {
    /// JSON view with human-readable path renderings. The transcript is a
    /// separate artifact and is not embedded here.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "answers": self.answers,
            "supporting_paths": self.supporting_paths.iter().map(|p| p.render()).collect::<Vec<_>>(),
            "counters": self.counters,
        })
    }
}
