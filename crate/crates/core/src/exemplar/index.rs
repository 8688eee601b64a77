//! The exemplar index: templated-question embeddings, a versioned binary
//! persistence format, and exact threshold-plus-diversity retrieval.

use std::collections::{BTreeMap, HashSet};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::embed::{embed_batch, EmbeddingProvider, EmbeddingVector};
use crate::kg::{Direction, Relation};

use super::records::TrainingQuestion;
use super::template::{template_question, TEMPLATING_VERSION};
use super::ExemplarError;

const MAGIC: &[u8; 8] = b"EXQIDX\0\n";
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexMetadata {
    pub provider: String,
    pub templating_version: String,
}

#[derive(Debug, Clone)]
pub struct IndexEntry {
    pub id: String,
    pub vector: EmbeddingVector,
}

/// Immutable nearest-neighbor structure over templated-question embeddings.
/// Search is an exact inner-product scan; vectors are unit-norm so scores
/// are cosines.
#[derive(Debug, Clone)]
pub struct ExemplarIndex {
    dimension: usize,
    entries: Vec<IndexEntry>,
    metadata: IndexMetadata,
}

impl ExemplarIndex {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[IndexEntry] {
        &self.entries
    }

    pub fn metadata(&self) -> &IndexMetadata {
        &self.metadata
    }
}

/// Retrieval knobs: `k` results at most, each scoring at least `tau`, chosen
/// from the top `overfetch` candidates before diversity filtering.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RetrievalConfig {
    pub k: usize,
    pub tau: f32,
    pub overfetch: usize,
}

impl Default for RetrievalConfig {
    fn default() -> Self {
        Self { k: 3, tau: 0.85, overfetch: 20 }
    }
}

impl RetrievalConfig {
    pub fn validate(&self) -> Result<(), ExemplarError> {
        if self.k < 1 || self.overfetch < self.k {
            return Err(ExemplarError::Config(format!(
                "retrieval requires overfetch >= k >= 1, got k={} overfetch={}",
                self.k, self.overfetch
            )));
        }
        if !(-1.0..=1.0).contains(&self.tau) {
            return Err(ExemplarError::Config(format!("tau must be in [-1, 1], got {}", self.tau)));
        }
        Ok(())
    }
}

/// A retrieved solved question together with the similarity that selected it.
#[derive(Debug, Clone)]
pub struct Exemplar {
    pub question: TrainingQuestion,
    pub templated_text: String,
    pub similarity: f32,
}

/// Embeds the templated text of every record and assembles the index.
/// Entry order follows record order, so identical inputs build identical
/// indexes.
pub fn build_index(
    records: &[TrainingQuestion],
    provider: &dyn EmbeddingProvider,
) -> Result<ExemplarIndex, ExemplarError> {
    if records.is_empty() {
        return Err(ExemplarError::Config("cannot build an index from zero records".into()));
    }
    let mut seen = HashSet::new();
    let mut duplicates: Vec<String> = Vec::new();
    for r in records {
        if !seen.insert(r.id.as_str()) {
            duplicates.push(r.id.clone());
        }
    }
    if !duplicates.is_empty() {
        duplicates.sort();
        duplicates.dedup();
        return Err(ExemplarError::DuplicateIds(duplicates));
    }

    let texts: Vec<String> = records
        .iter()
        .map(|r| template_question(&r.text, &r.topic_entities).question.text)
        .collect();
    let vectors = embed_batch(provider, &texts)?;
    let entries = records
        .iter()
        .zip(vectors)
        .map(|(r, vector)| IndexEntry { id: r.id.clone(), vector })
        .collect();
    Ok(ExemplarIndex {
        dimension: provider.dimension(),
        entries,
        metadata: IndexMetadata {
            provider: provider.name().to_string(),
            templating_version: TEMPLATING_VERSION.to_string(),
        },
    })
}

/// Scores every entry by inner product, keeps the top `overfetch` (ties by
/// ascending id), drops scores below `tau`, then scans in score order keeping
/// an entry only when no already-kept entry shares a gold relation-path
/// signature with it. Returns at most `k` exemplars, best first.
pub fn retrieve(
    index: &ExemplarIndex,
    store: &BTreeMap<String, TrainingQuestion>,
    query: &EmbeddingVector,
    config: &RetrievalConfig,
) -> Vec<Exemplar> {
    assert_eq!(
        query.len(),
        index.dimension,
        "query vector dimension must match the index"
    );

    let mut scored: Vec<(f32, &IndexEntry)> = index
        .entries
        .iter()
        .map(|entry| (query.dot(&entry.vector), entry))
        .collect();
    scored.sort_by(|(sa, ea), (sb, eb)| {
        sb.partial_cmp(sa).expect("scores are finite").then_with(|| ea.id.cmp(&eb.id))
    });
    scored.truncate(config.overfetch);
    scored.retain(|(score, _)| *score >= config.tau);

    let mut kept_signatures: HashSet<Vec<(String, Direction)>> = HashSet::new();
    let mut out = Vec::new();
    for (score, entry) in scored {
        if out.len() == config.k {
            break;
        }
        let Some(question) = store.get(&entry.id) else {
            log::debug!("index entry {} missing from training store, skipping", entry.id);
            continue;
        };
        let signatures = question.path_signatures();
        if signatures.iter().any(|s| kept_signatures.contains(s)) {
            continue;
        }
        kept_signatures.extend(signatures);
        let templated_text =
            template_question(&question.text, &question.topic_entities).question.text;
        out.push(Exemplar { question: question.clone(), templated_text, similarity: score });
    }
    out
}

/// Union of all relations across all gold paths of all exemplars, sorted.
pub fn extract_guide_relations(
    exemplars: &[Exemplar],
) -> std::collections::BTreeSet<Relation> {
    exemplars
        .iter()
        .flat_map(|ex| ex.question.gold_paths.iter())
        .flat_map(|path| path.steps().iter().map(|(r, _)| r.clone()))
        .collect()
}

fn write_u32<W: Write>(w: &mut W, v: u32) -> std::io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

fn write_u64<W: Write>(w: &mut W, v: u64) -> std::io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

fn write_str<W: Write>(w: &mut W, s: &str) -> std::io::Result<()> {
    write_u32(w, s.len() as u32)?;
    w.write_all(s.as_bytes())
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8]) -> Result<(), ExemplarError> {
    r.read_exact(buf).map_err(|_| ExemplarError::Corrupt("unexpected end of file".into()))
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32, ExemplarError> {
    let mut buf = [0u8; 4];
    read_exact(r, &mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64, ExemplarError> {
    let mut buf = [0u8; 8];
    read_exact(r, &mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

fn read_str<R: Read>(r: &mut R) -> Result<String, ExemplarError> {
    let len = read_u32(r)? as usize;
    if len > 1 << 20 {
        return Err(ExemplarError::Corrupt(format!("string length {len} out of range")));
    }
    let mut buf = vec![0u8; len];
    read_exact(r, &mut buf)?;
    String::from_utf8(buf).map_err(|_| ExemplarError::Corrupt("invalid UTF-8 string".into()))
}

/// Layout: magic, format version, dimension, entry count, metadata strings,
/// id table, then one row-major block of little-endian f32 vectors.
pub fn save_index(index: &ExemplarIndex, path: &Path) -> Result<(), ExemplarError> {
    let file = std::fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    w.write_all(MAGIC)?;
    write_u32(&mut w, FORMAT_VERSION)?;
    write_u32(&mut w, index.dimension as u32)?;
    write_u64(&mut w, index.entries.len() as u64)?;
    write_str(&mut w, &index.metadata.provider)?;
    write_str(&mut w, &index.metadata.templating_version)?;
    for entry in &index.entries {
        write_str(&mut w, &entry.id)?;
    }
    for entry in &index.entries {
        for value in entry.vector.values() {
            w.write_all(&value.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn load_index(path: &Path) -> Result<ExemplarIndex, ExemplarError> {
    let file = std::fs::File::open(path)?;
    let mut r = BufReader::new(file);

    let mut magic = [0u8; 8];
    read_exact(&mut r, &mut magic)?;
    if &magic != MAGIC {
        return Err(ExemplarError::Format("bad magic bytes; not an exemplar index file".into()));
    }
    let version = read_u32(&mut r)?;
    if version != FORMAT_VERSION {
        return Err(ExemplarError::Format(format!(
            "unsupported index format version {version} (expected {FORMAT_VERSION})"
        )));
    }
    let dimension = read_u32(&mut r)? as usize;
    let count = read_u64(&mut r)? as usize;
    let provider = read_str(&mut r)?;
    let templating_version = read_str(&mut r)?;

    let mut ids = Vec::with_capacity(count);
    for _ in 0..count {
        ids.push(read_str(&mut r)?);
    }
    let mut entries = Vec::with_capacity(count);
    for id in ids {
        let mut values = Vec::with_capacity(dimension);
        for _ in 0..dimension {
            let mut buf = [0u8; 4];
            read_exact(&mut r, &mut buf)?;
            values.push(f32::from_le_bytes(buf));
        }
        entries.push(IndexEntry { id, vector: EmbeddingVector::from_raw(values) });
    }
    let mut trailer = [0u8; 1];
    if r.read(&mut trailer).map_err(ExemplarError::from)? != 0 {
        return Err(ExemplarError::Corrupt("trailing bytes after vector block".into()));
    }
    Ok(ExemplarIndex {
        dimension,
        entries,
        metadata: IndexMetadata { provider, templating_version },
    })
}
