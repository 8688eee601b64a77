//! Uniform access to a knowledge graph: triple storage, neighbor-relation
//! queries, entity expansion, and bounded relation-path instantiation. The
//! in-memory store and the remote endpoint client sit behind one trait.

mod memory;
mod sparql;
mod types;

pub use memory::{load_triples, load_triples_path, InMemoryGraph};
pub use sparql::{SparqlBackend, SparqlConfig};
pub use types::{Direction, EntityId, Relation, RelationPath, ReasoningPath, Triple};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum KgError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("backend request failed for query `{query}`: {msg}")]
    Backend { query: String, msg: String },
    #[error("malformed endpoint response: {0}")]
    Protocol(String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type KgResult<T> = Result<T, KgError>;

/// Read-only graph access. Implementations must be safe for concurrent
/// readers; all methods are pure queries.
pub trait KnowledgeGraph: Send + Sync {
    /// Every `(r, Outgoing)` with a triple `(e, r, ·)` plus every
    /// `(r, Incoming)` with a triple `(·, r, e)`, sorted by relation name
    /// then direction. Unknown entities yield an empty set.
    fn relations_of(&self, entity: &EntityId) -> KgResult<Vec<(Relation, Direction)>>;

    /// All tails of `(e, r, ?)` for `Outgoing`, all heads of `(?, r, e)` for
    /// `Incoming`; sorted by id, deduplicated.
    fn expand(
        &self,
        entity: &EntityId,
        relation: &Relation,
        direction: Direction,
    ) -> KgResult<Vec<EntityId>>;

    fn has_triple(&self, triple: &Triple) -> KgResult<bool> {
        Ok(self
            .expand(&triple.head, &triple.relation, Direction::Outgoing)?
            .contains(&triple.tail))
    }
}

/// Depth-first enumeration of all entity sequences realizing `path` from
/// `start`, truncated to at most `cap` results. Hops are explored in
/// lexicographic entity-id order, so the output is deterministic and, when
/// truncated, keeps the lexicographically smallest walks.
pub fn instantiate_relation_path(
    graph: &dyn KnowledgeGraph,
    start: &EntityId,
    path: &RelationPath,
    cap: usize,
) -> KgResult<Vec<ReasoningPath>> {
    assert!(cap >= 1, "instantiation cap must be at least 1");
    let mut out = Vec::new();
    let seed = ReasoningPath::seed(start.clone());
    walk(graph, &seed, path.steps(), cap, &mut out)?;
    Ok(out)
}

fn walk(
    graph: &dyn KnowledgeGraph,
    prefix: &ReasoningPath,
    remaining: &[(Relation, Direction)],
    cap: usize,
    out: &mut Vec<ReasoningPath>,
) -> KgResult<()> {
    if remaining.is_empty() {
        out.push(prefix.clone());
        return Ok(());
    }
    let (relation, direction) = &remaining[0];
    for next in graph.expand(prefix.tail(), relation, *direction)? {
        if out.len() >= cap {
            break;
        }
        let extended = prefix.extended(relation.clone(), *direction, next);
        walk(graph, &extended, &remaining[1..], cap, out)?;
    }
    Ok(())
}
