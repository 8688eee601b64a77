//! Prompt templates for every planning decision point. Templates are stable
//! and versioned: golden-transcript tests depend on their exact wording.

use std::fmt::Write as _;

use crate::exemplar::Exemplar;
use crate::kg::{Direction, EntityId, Relation, ReasoningPath, Triple};

use super::SubObjectiveList;

pub const PROMPT_VERSION: &str = "pv1";

pub mod tags {
    pub const DECOMPOSE: &str = "decompose";
    pub const PRUNE_RELATIONS: &str = "prune_relations";
    pub const SELECT_PATHS: &str = "select_paths";
    pub const SUFFICIENCY: &str = "sufficiency";
    pub const FORCED_ANSWER: &str = "forced_answer";
    pub const REFLECT: &str = "reflect";
    pub const LOOKAHEAD: &str = "lookahead";
    pub const UPDATE_STATUSES: &str = "update_statuses";
}

fn push_exemplar_block(out: &mut String, exemplars: &[Exemplar]) {
    if exemplars.is_empty() {
        return;
    }
    out.push_str("Solved examples similar to this question:\n");
    for (i, ex) in exemplars.iter().enumerate() {
        let _ = writeln!(out, "Example {}:", i + 1);
        let _ = writeln!(out, "  question: {}", ex.question.text);
        for path in &ex.question.gold_paths {
            let _ = writeln!(out, "  reasoning path: {}", path.render());
        }
    }
    out.push('\n');
}

fn push_objectives(out: &mut String, objectives: &SubObjectiveList) {
    out.push_str("Sub-objectives and their current status:\n");
    for (i, (item, status)) in objectives.items.iter().zip(&objectives.statuses).enumerate() {
        let _ = writeln!(out, "{}. {} [status: {}]", i + 1, item, status);
    }
}

fn push_paths(out: &mut String, paths: &[ReasoningPath]) {
    if paths.is_empty() {
        out.push_str("(no reasoning paths explored yet)\n");
        return;
    }
    for path in paths {
        let _ = writeln!(out, "- {}", path.render());
    }
}

// One-shot fallback used when no exemplars were retrieved.
const DEFAULT_DECOMPOSITION_EXAMPLE: &str = "Example:\n  question: what is the capital of the country where A was born\n  sub-objectives: [\"find where A was born\", \"find the country of that place\", \"find the capital of that country\"]\n\n";

pub fn decompose(question: &str, topics: &[EntityId], exemplars: &[Exemplar]) -> String {
    let mut out = String::new();
    out.push_str(
        "You are planning how to answer a question over a knowledge graph.\n\
         Break the question into a short ordered list of executable sub-objectives.\n\
         Each sub-objective should correspond to one hop or lookup in the graph.\n\
         Respond with a JSON array of strings.\n\n",
    );
    if exemplars.is_empty() {
        out.push_str(DEFAULT_DECOMPOSITION_EXAMPLE);
    } else {
        push_exemplar_block(&mut out, exemplars);
    }
    let _ = writeln!(out, "Question: {question}");
    let topic_list: Vec<&str> = topics.iter().map(|t| t.display_label()).collect();
    let _ = writeln!(out, "Topic entities: {}", topic_list.join(", "));
    out.push_str("Sub-objectives:");
    out
}

pub fn prune_relations(
    question: &str,
    objectives: &SubObjectiveList,
    entity: &EntityId,
    candidates: &[(Relation, Direction)],
    exemplars: &[Exemplar],
) -> String {
    let mut out = String::new();
    out.push_str(
        "You are exploring a knowledge graph to answer a question.\n\
         From the candidate relations around the current entity, select the ones\n\
         most likely to lead to the answer. Respond with a JSON array of relation\n\
         names taken verbatim from the candidate list.\n\n",
    );
    push_exemplar_block(&mut out, exemplars);
    let _ = writeln!(out, "Question: {question}");
    push_objectives(&mut out, objectives);
    let _ = writeln!(out, "Current entity: {}", entity.display_label());
    out.push_str("Candidate relations:\n");
    for (relation, direction) in candidates {
        let _ = writeln!(out, "- {relation} [{direction}]");
    }
    out.push_str("Selected relations:");
    out
}

pub fn select_paths(question: &str, extended: &[(ReasoningPath, Triple)]) -> String {
    let mut out = String::new();
    out.push_str(
        "You are exploring a knowledge graph to answer a question.\n\
         Below are candidate reasoning paths extended this iteration. Select the\n\
         paths most relevant to the question. Respond with a JSON array of the\n\
         selected path indices.\n\n",
    );
    let _ = writeln!(out, "Question: {question}");
    out.push_str("Candidate paths:\n");
    for (i, (path, triple)) in extended.iter().enumerate() {
        let _ = writeln!(out, "{i}. {} (new fact: {})", path.render(), triple);
    }
    out.push_str("Selected indices:");
    out
}

pub fn sufficiency(
    question: &str,
    objectives: &SubObjectiveList,
    paths: &[ReasoningPath],
    forced: bool,
) -> String {
    let mut out = String::new();
    out.push_str(
        "You are answering a question over a knowledge graph.\n\
         Decide whether the reasoning paths gathered so far are sufficient to\n\
         answer the question. Respond with JSON:\n\
         {\"sufficient\": true|false, \"answer\": [\"...\"], \"reason\": \"...\"}\n\n",
    );
    if forced {
        out.push_str(
            "The exploration budget is exhausted. Answer with best effort from the\n\
             paths below and your own knowledge, even if uncertain.\n\n",
        );
    }
    let _ = writeln!(out, "Question: {question}");
    push_objectives(&mut out, objectives);
    out.push_str("Reasoning paths:\n");
    push_paths(&mut out, paths);
    out.push_str("Verdict:");
    out
}

pub fn reflect(
    question: &str,
    objectives: &SubObjectiveList,
    paths: &[ReasoningPath],
    next_frontier: &[EntityId],
    history: &[EntityId],
    dead_end: bool,
) -> String {
    let mut out = String::new();
    out.push_str(
        "You are exploring a knowledge graph to answer a question.\n\
         The information gathered so far is not sufficient. Decide whether the\n\
         current exploration direction is still promising, or whether previously\n\
         seen entities should be revisited. Respond with JSON:\n\
         {\"correct_course\": true|false, \"backtrack\": [\"entity id\", ...], \"reason\": \"...\"}\n\
         Backtrack entities must be chosen from the previously seen candidates list.\n\n",
    );
    if dead_end {
        out.push_str("Note: the latest iteration found no relations or entities to extend any path (dead end).\n\n");
    }
    let _ = writeln!(out, "Question: {question}");
    push_objectives(&mut out, objectives);
    out.push_str("Reasoning paths:\n");
    push_paths(&mut out, paths);
    let frontier_list: Vec<&str> = next_frontier.iter().map(|e| e.id()).collect();
    let _ = writeln!(out, "Entities queued for the next iteration: {}", frontier_list.join(", "));
    let history_list: Vec<&str> = history.iter().map(|e| e.id()).collect();
    let _ = writeln!(out, "Previously seen candidates: {}", history_list.join(", "));
    out.push_str("Decision:");
    out
}

pub fn lookahead(question: &str, path: &ReasoningPath) -> String {
    let mut out = String::new();
    out.push_str(
        "You are answering a question over a knowledge graph.\n\
         A candidate reasoning path was found by following the relation pattern of\n\
         a similar solved question. Decide whether this path alone is a correct and\n\
         complete basis for answering. The answer must be an entity on the path.\n\
         Respond with JSON:\n\
         {\"sufficient\": true|false, \"answer\": [\"...\"], \"reason\": \"...\"}\n\n",
    );
    let _ = writeln!(out, "Question: {question}");
    let _ = writeln!(out, "Candidate path: {}", path.render());
    out.push_str("Verdict:");
    out
}

pub fn update_statuses(
    question: &str,
    objectives: &SubObjectiveList,
    memory_summary: &str,
    latest_paths: &[ReasoningPath],
) -> String {
    let mut out = String::new();
    out.push_str(
        "You are tracking progress while exploring a knowledge graph.\n\
         Update the status of each sub-objective given the latest exploration\n\
         results. Respond with a JSON array of status strings, one per\n\
         sub-objective, in order.\n\n",
    );
    let _ = writeln!(out, "Question: {question}");
    push_objectives(&mut out, objectives);
    let _ = writeln!(out, "Memory: {memory_summary}");
    out.push_str("Latest paths:\n");
    push_paths(&mut out, latest_paths);
    out.push_str("Statuses:");
    out
}
