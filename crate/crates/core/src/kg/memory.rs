//! In-memory triple store loaded from tab-separated files.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::{Direction, EntityId, KgError, KgResult, KnowledgeGraph, Relation, Triple};

/// Immutable triple store with forward and inverse adjacency. Safe for any
/// number of concurrent readers once constructed.
#[derive(Debug, Default)]
pub struct InMemoryGraph {
    triples: BTreeSet<Triple>,
    // head id -> relation name -> tail ids
    outgoing: HashMap<String, BTreeMap<String, BTreeSet<String>>>,
    // tail id -> relation name -> head ids
    incoming: HashMap<String, BTreeMap<String, BTreeSet<String>>>,
}

impl InMemoryGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_triples(triples: impl IntoIterator<Item = Triple>) -> Self {
        let mut g = Self::new();
        for t in triples {
            g.insert(t);
        }
        g
    }

    fn insert(&mut self, triple: Triple) {
        self.outgoing
            .entry(triple.head.id().to_string())
            .or_default()
            .entry(triple.relation.name().to_string())
            .or_default()
            .insert(triple.tail.id().to_string());
        self.incoming
            .entry(triple.tail.id().to_string())
            .or_default()
            .entry(triple.relation.name().to_string())
            .or_default()
            .insert(triple.head.id().to_string());
        self.triples.insert(triple);
    }

    pub fn triple_count(&self) -> usize {
        self.triples.len()
    }

    pub fn triples(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    /// Writes the graph back out as sorted TSV. Loading the result yields an
    /// identical graph (load/serialize is idempotent modulo ordering and
    /// duplicate removal).
    pub fn write_tsv<W: Write>(&self, mut w: W) -> KgResult<()> {
        for t in &self.triples {
            writeln!(w, "{}\t{}\t{}", t.head.id(), t.relation.name(), t.tail.id())?;
        }
        Ok(())
    }
}

impl KnowledgeGraph for InMemoryGraph {
    fn relations_of(&self, entity: &EntityId) -> KgResult<Vec<(Relation, Direction)>> {
        let mut out = Vec::new();
        if let Some(by_rel) = self.outgoing.get(entity.id()) {
            for name in by_rel.keys() {
                out.push((Relation::new(name.clone()), Direction::Outgoing));
            }
        }
        if let Some(by_rel) = self.incoming.get(entity.id()) {
            for name in by_rel.keys() {
                out.push((Relation::new(name.clone()), Direction::Incoming));
            }
        }
        out.sort();
        Ok(out)
    }

    fn expand(
        &self,
        entity: &EntityId,
        relation: &Relation,
        direction: Direction,
    ) -> KgResult<Vec<EntityId>> {
        let table = match direction {
            Direction::Outgoing => &self.outgoing,
            Direction::Incoming => &self.incoming,
        };
        let ids = table
            .get(entity.id())
            .and_then(|by_rel| by_rel.get(relation.name()));
        Ok(ids
            .map(|set| set.iter().map(EntityId::new).collect())
            .unwrap_or_default())
    }

    fn has_triple(&self, triple: &Triple) -> KgResult<bool> {
        Ok(self.triples.contains(triple))
    }
}

/// Parses `head \t relation \t tail` lines into a graph. Duplicate lines are
/// deduplicated. Lines with a field count other than 3 or with an empty
/// field are reported with their 1-based line number.
pub fn load_triples<R: Read>(reader: R) -> KgResult<InMemoryGraph> {
    let mut graph = InMemoryGraph::new();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(KgError::Parse {
                line: line_no,
                msg: format!("expected 3 tab-separated fields, got {}", fields.len()),
            });
        }
        if fields.iter().any(|f| f.is_empty()) {
            return Err(KgError::Parse { line: line_no, msg: "empty field".into() });
        }
        graph.insert(Triple::new(
            EntityId::new(fields[0]),
            Relation::new(fields[1]),
            EntityId::new(fields[2]),
        ));
    }
    Ok(graph)
}

pub fn load_triples_path(path: &Path) -> KgResult<InMemoryGraph> {
    load_triples(std::fs::File::open(path)?)
}
