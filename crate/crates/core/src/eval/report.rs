//! Evaluation reports: per-question outcomes, the relation-count histogram
//! split by guidance, the lookahead summary, and multi-report aggregation.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::engine::RunCounters;

use super::HarnessError;

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuestionOutcome {
    pub id: String,
    pub predicted: Vec<String>,
    pub correct: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub counters: RunCounters,
}

/// Count-of-final-relations frequency, one bucket set per guidance mode.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RelationHistogram {
    pub guided: BTreeMap<usize, u64>,
    pub unguided: BTreeMap<usize, u64>,
}

impl RelationHistogram {
    pub fn merge(&mut self, other: &RelationHistogram) {
        for (count, freq) in &other.guided {
            *self.guided.entry(*count).or_default() += freq;
        }
        for (count, freq) in &other.unguided {
            *self.unguided.entry(*count).or_default() += freq;
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct LookaheadSummary {
    pub total: u64,
    pub triggered: u64,
    /// Percentage of all questions that triggered the lookahead.
    pub triggered_pct: f64,
    /// Questions answered early by the lookahead with a correct answer.
    pub early_correct: u64,
    /// Percentage of triggered questions answered early and correctly.
    pub early_correct_pct: f64,
}

impl LookaheadSummary {
    pub fn from_outcomes(outcomes: &[QuestionOutcome]) -> Self {
        let total = outcomes.len() as u64;
        let triggered =
            outcomes.iter().filter(|o| o.counters.lookahead_triggered).count() as u64;
        let early_correct = outcomes
            .iter()
            .filter(|o| o.counters.lookahead_answered && o.correct)
            .count() as u64;
        Self::from_counts(total, triggered, early_correct)
    }

    pub fn from_counts(total: u64, triggered: u64, early_correct: u64) -> Self {
        let triggered_pct =
            if total == 0 { 0.0 } else { triggered as f64 / total as f64 * 100.0 };
        let early_correct_pct = if triggered == 0 {
            0.0
        } else {
            early_correct as f64 / triggered as f64 * 100.0
        };
        Self { total, triggered, triggered_pct, early_correct, early_correct_pct }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub version: u32,
    /// Whether the suite ran with exemplar guidance.
    pub guided: bool,
    pub hits_at_1: f64,
    pub per_question: Vec<QuestionOutcome>,
    pub relation_histogram: RelationHistogram,
    pub lookahead: LookaheadSummary,
}

impl EvalReport {
    /// Assembles a report from per-question outcomes. Outcomes are sorted by
    /// id so the serialized report is deterministic regardless of run order.
    pub fn assemble(mut outcomes: Vec<QuestionOutcome>, guided: bool) -> Self {
        outcomes.sort_by(|a, b| a.id.cmp(&b.id));
        let correct = outcomes.iter().filter(|o| o.correct).count();
        let hits_at_1 =
            if outcomes.is_empty() { 0.0 } else { correct as f64 / outcomes.len() as f64 };
        let mut histogram = RelationHistogram::default();
        for outcome in &outcomes {
            let bucket =
                if guided { &mut histogram.guided } else { &mut histogram.unguided };
            for count in &outcome.counters.relation_counts {
                *bucket.entry(*count).or_default() += 1;
            }
        }
        let lookahead = LookaheadSummary::from_outcomes(&outcomes);
        Self {
            version: REPORT_VERSION,
            guided,
            hits_at_1,
            per_question: outcomes,
            relation_histogram: histogram,
            lookahead,
        }
    }

    pub fn to_json_pretty(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Report {
            file: path.display().to_string(),
            msg: e.to_string(),
        })?;
        let report: EvalReport =
            serde_json::from_str(&text).map_err(|e| HarnessError::Report {
                file: path.display().to_string(),
                msg: e.to_string(),
            })?;
        if report.version != REPORT_VERSION {
            return Err(HarnessError::Report {
                file: path.display().to_string(),
                msg: format!(
                    "unsupported report version {} (expected {REPORT_VERSION})",
                    report.version
                ),
            });
        }
        Ok(report)
    }
}

/// Cross-report aggregation: element-wise histogram merge plus summed
/// lookahead counts with recomputed percentages.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StatsSummary {
    pub reports: usize,
    pub relation_histogram: RelationHistogram,
    pub lookahead: LookaheadSummary,
}

pub fn aggregate(reports: &[EvalReport]) -> StatsSummary {
    let mut histogram = RelationHistogram::default();
    let mut total = 0;
    let mut triggered = 0;
    let mut early_correct = 0;
    for report in reports {
        histogram.merge(&report.relation_histogram);
        total += report.lookahead.total;
        triggered += report.lookahead.triggered;
        early_correct += report.lookahead.early_correct;
    }
    StatsSummary {
        reports: reports.len(),
        relation_histogram: histogram,
        lookahead: LookaheadSummary::from_counts(total, triggered, early_correct),
    }
}

/// Aligned-column console rendering of an aggregated summary.
pub fn render_stats_table(stats: &StatsSummary) -> String {
    let mut out = String::new();
    out.push_str("relation count histogram\n");
    out.push_str(&format!("{:>8}  {:>8}  {:>8}\n", "count", "guided", "unguided"));
    let mut counts: Vec<usize> = stats
        .relation_histogram
        .guided
        .keys()
        .chain(stats.relation_histogram.unguided.keys())
        .copied()
        .collect();
    counts.sort_unstable();
    counts.dedup();
    for count in counts {
        out.push_str(&format!(
            "{:>8}  {:>8}  {:>8}\n",
            count,
            stats.relation_histogram.guided.get(&count).copied().unwrap_or(0),
            stats.relation_histogram.unguided.get(&count).copied().unwrap_or(0),
        ));
    }
    out.push('\n');
    out.push_str("lookahead\n");
    out.push_str(&format!(
        "{:>16}  {} / {} ({:.1}%)\n",
        "triggered", stats.lookahead.triggered, stats.lookahead.total, stats.lookahead.triggered_pct
    ));
    out.push_str(&format!(
        "{:>16}  {} / {} ({:.1}%)\n",
        "early correct",
        stats.lookahead.early_correct,
        stats.lookahead.triggered,
        stats.lookahead.early_correct_pct
    ));
    out
}
