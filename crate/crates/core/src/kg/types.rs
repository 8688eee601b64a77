//! Graph atoms: entities, relations, triples, and the path types built from them.

use std::cmp::Ordering;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{KgError, KnowledgeGraph};

/// A graph node. Identity is the `id` string alone; the optional label is
/// display metadata and never participates in equality, ordering or hashing.
#[derive(Debug, Clone)]
pub struct EntityId {
    id: String,
    label: Option<String>,
}

impl EntityId {
    pub fn new(id: impl Into<String>) -> Self {
        let id = id.into();
        assert!(!id.is_empty(), "entity id must be non-empty");
        Self { id, label: None }
    }

    pub fn with_label(id: impl Into<String>, label: impl Into<String>) -> Self {
        let mut e = Self::new(id);
        e.label = Some(label.into());
        e
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    /// Label when known, otherwise the id. Unnamed intermediate nodes are
    /// rendered by id.
    pub fn display_label(&self) -> &str {
        self.label.as_deref().unwrap_or(&self.id)
    }
}

impl PartialEq for EntityId {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}
impl Eq for EntityId {}

impl PartialOrd for EntityId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for EntityId {
    fn cmp(&self, other: &Self) -> Ordering {
        self.id.cmp(&other.id)
    }
}

impl std::hash::Hash for EntityId {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.id.hash(state);
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_label())
    }
}

impl Serialize for EntityId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.id)
    }
}

impl<'de> Deserialize<'de> for EntityId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let id = String::deserialize(deserializer)?;
        if id.is_empty() {
            return Err(D::Error::custom("entity id must be non-empty"));
        }
        Ok(EntityId { id, label: None })
    }
}

/// A fully qualified relation name. Equality is exact string equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Relation(String);

impl Relation {
    pub fn new(name: impl Into<String>) -> Self {
        let name = name.into();
        assert!(!name.is_empty(), "relation name must be non-empty");
        Relation(name)
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Relation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let name = String::deserialize(deserializer)?;
        if name.is_empty() {
            return Err(D::Error::custom("relation name must be non-empty"));
        }
        Ok(Relation(name))
    }
}

/// Traversal orientation of an edge relative to the entity being explored:
/// `Outgoing` follows head-to-tail, `Incoming` tail-to-head.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Outgoing,
    Incoming,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Outgoing => f.write_str("outgoing"),
            Direction::Incoming => f.write_str("incoming"),
        }
    }
}

/// One stored fact `(head, relation, tail)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub head: EntityId,
    pub relation: Relation,
    pub tail: EntityId,
}

impl Triple {
    pub fn new(head: EntityId, relation: Relation, tail: EntityId) -> Self {
        Self { head, relation, tail }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.head.id(), self.relation, self.tail.id())
    }
}

/// An abstract walk shape: an ordered sequence of relations with traversal
/// directions but no concrete entities. Always at least one step long.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RelationPath {
    steps: Vec<(Relation, Direction)>,
}

impl RelationPath {
    pub fn new(steps: Vec<(Relation, Direction)>) -> Result<Self, KgError> {
        if steps.is_empty() {
            return Err(KgError::InvalidPath("relation path must have at least one step".into()));
        }
        Ok(Self { steps })
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn steps(&self) -> &[(Relation, Direction)] {
        &self.steps
    }

    pub fn first(&self) -> &(Relation, Direction) {
        &self.steps[0]
    }
}

impl fmt::Display for RelationPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (r, d)) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match d {
                Direction::Outgoing => write!(f, "{r}")?,
                Direction::Incoming => write!(f, "~{r}")?,
            }
        }
        Ok(())
    }
}

/// A concrete walk through the graph: entities interleaved with directed
/// relation steps. A zero-step path is a bare starting entity, used to seed
/// exploration; instantiated and deserialized paths always have steps.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReasoningPath {
    entities: Vec<EntityId>,
    steps: Vec<(Relation, Direction)>,
}

impl ReasoningPath {
    /// A path consisting of a single entity and no steps.
    pub fn seed(entity: EntityId) -> Self {
        Self { entities: vec![entity], steps: Vec::new() }
    }

    pub fn from_parts(
        entities: Vec<EntityId>,
        steps: Vec<(Relation, Direction)>,
    ) -> Result<Self, KgError> {
        if entities.is_empty() || entities.len() != steps.len() + 1 {
            return Err(KgError::InvalidPath(format!(
                "path needs {} entities for {} steps, got {}",
                steps.len() + 1,
                steps.len(),
                entities.len()
            )));
        }
        Ok(Self { entities, steps })
    }

    /// Returns a new path with one more hop appended.
    pub fn extended(&self, relation: Relation, direction: Direction, entity: EntityId) -> Self {
        let mut entities = self.entities.clone();
        let mut steps = self.steps.clone();
        entities.push(entity);
        steps.push((relation, direction));
        Self { entities, steps }
    }

    pub fn entities(&self) -> &[EntityId] {
        &self.entities
    }

    pub fn steps(&self) -> &[(Relation, Direction)] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn start(&self) -> &EntityId {
        &self.entities[0]
    }

    pub fn tail(&self) -> &EntityId {
        self.entities.last().expect("path has at least one entity")
    }

    pub fn last_step(&self) -> Option<&(Relation, Direction)> {
        self.steps.last()
    }

    /// The relation-only shape of this path, if it has any steps.
    pub fn relation_path(&self) -> Option<RelationPath> {
        RelationPath::new(self.steps.clone()).ok()
    }

    /// Relation names plus directions, the identity used for path diversity.
    pub fn signature(&self) -> Vec<(String, Direction)> {
        self.steps.iter().map(|(r, d)| (r.name().to_string(), *d)).collect()
    }

    /// The stored triple for step `i`, oriented back to head/tail order.
    pub fn triple_at(&self, i: usize) -> Triple {
        let (r, d) = &self.steps[i];
        match d {
            Direction::Outgoing => {
                Triple::new(self.entities[i].clone(), r.clone(), self.entities[i + 1].clone())
            }
            Direction::Incoming => {
                Triple::new(self.entities[i + 1].clone(), r.clone(), self.entities[i].clone())
            }
        }
    }

    /// Checks every step against the backend. A path is sound when each of
    /// its oriented triples is present in the graph.
    pub fn verify(&self, graph: &dyn KnowledgeGraph) -> Result<bool, KgError> {
        for i in 0..self.steps.len() {
            if !graph.has_triple(&self.triple_at(i))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Renders `a --r--> b <--s-- c` style chains using display labels.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(self.entities[0].display_label());
        for (i, (r, d)) in self.steps.iter().enumerate() {
            match d {
                Direction::Outgoing => {
                    out.push_str(&format!(" --{}--> ", r));
                }
                Direction::Incoming => {
                    out.push_str(&format!(" <--{}-- ", r));
                }
            }
            out.push_str(self.entities[i + 1].display_label());
        }
        out
    }
}

impl fmt::Display for ReasoningPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Wire form of one path step as it appears in dataset files.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct StepRecord {
    head: EntityId,
    relation: Relation,
    tail: EntityId,
    direction: Direction,
}

impl Serialize for ReasoningPath {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let records: Vec<StepRecord> = (0..self.steps.len())
            .map(|i| {
                let t = self.triple_at(i);
                StepRecord {
                    head: t.head,
                    relation: t.relation,
                    tail: t.tail,
                    direction: self.steps[i].1,
                }
            })
            .collect();
        records.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ReasoningPath {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let records = Vec::<StepRecord>::deserialize(deserializer)?;
        if records.is_empty() {
            return Err(D::Error::custom("reasoning path must have at least one step"));
        }
        let mut entities = Vec::with_capacity(records.len() + 1);
        let mut steps = Vec::with_capacity(records.len());
        for (i, rec) in records.into_iter().enumerate() {
            let (from, to) = match rec.direction {
                Direction::Outgoing => (rec.head, rec.tail),
                Direction::Incoming => (rec.tail, rec.head),
            };
            if i == 0 {
                entities.push(from);
            } else if entities.last() != Some(&from) {
                return Err(D::Error::custom(format!(
                    "discontinuous path at step {i}: expected source {:?}, got {:?}",
                    entities.last().map(|e| e.id()),
                    from.id()
                )));
            }
            entities.push(to);
            steps.push((rec.relation, rec.direction));
        }
        Ok(ReasoningPath { entities, steps })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(id: &str) -> EntityId {
        EntityId::new(id)
    }

    #[test]
    fn entity_equality_ignores_label() {
        let a = EntityId::with_label("m.01", "Alice");
        let b = EntityId::new("m.01");
        assert_eq!(a, b);
        assert_eq!(a.display_label(), "Alice");
        assert_eq!(b.display_label(), "m.01");
    }

    #[test]
    fn relation_path_rejects_empty() {
        assert!(RelationPath::new(vec![]).is_err());
    }

    #[test]
    fn path_render_mixes_directions() {
        let p = ReasoningPath::seed(e("frank"))
            .extended(Relation::new("born_in"), Direction::Outgoing, e("rivertown"))
            .extended(Relation::new("flows_through"), Direction::Incoming, e("verde_river"));
        assert_eq!(p.render(), "frank --born_in--> rivertown <--flows_through-- verde_river");
        assert_eq!(
            p.triple_at(1),
            Triple::new(e("verde_river"), Relation::new("flows_through"), e("rivertown"))
        );
    }

    #[test]
    fn path_serde_round_trip() {
        let p = ReasoningPath::seed(e("a"))
            .extended(Relation::new("r1"), Direction::Outgoing, e("b"))
            .extended(Relation::new("r2"), Direction::Incoming, e("c"));
        let json = serde_json::to_string(&p).unwrap();
        let back: ReasoningPath = serde_json::from_str(&json).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn path_deserialize_rejects_discontinuity() {
        let json = r#"[
            {"head":"a","relation":"r","tail":"b","direction":"outgoing"},
            {"head":"x","relation":"s","tail":"y","direction":"outgoing"}
        ]"#;
        assert!(serde_json::from_str::<ReasoningPath>(json).is_err());
    }
}
