//! Exemplar store integration tests: retrieval against a brute-force oracle,
//! index persistence, diversity filtering, and the HTTP embedding client.

mod support;

use std::collections::BTreeMap;
use std::time::Duration;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use kgqa_core::embed::{
    embed_batch, EmbedError, EmbeddingProvider, EmbeddingVector, HashEmbeddingProvider,
    HttpEmbeddingConfig, HttpEmbeddingProvider,
};
use kgqa_core::exemplar::{
    build_index, extract_guide_relations, load_index, retrieve, save_index, Exemplar,
    ExemplarError, RetrievalConfig, TopicEntityAnnotation, TrainingQuestion, template_question,
};
use kgqa_core::kg::{Direction, EntityId, Relation, ReasoningPath};

use support::{CannedResponse, TestServer};

fn question(id: &str, text: &str, path_relations: &[(&str, Direction)]) -> TrainingQuestion {
    let mut path = ReasoningPath::seed(EntityId::new(format!("{id}_e0")));
    for (i, (name, direction)) in path_relations.iter().enumerate() {
        path = path.extended(
            Relation::new(*name),
            *direction,
            EntityId::new(format!("{id}_e{}", i + 1)),
        );
    }
    TrainingQuestion {
        id: id.to_string(),
        text: text.to_string(),
        topic_entities: vec![],
        answers: vec!["x".to_string()],
        gold_paths: vec![path],
    }
}

fn store_of(questions: &[TrainingQuestion]) -> BTreeMap<String, TrainingQuestion> {
    questions.iter().map(|q| (q.id.clone(), q.clone())).collect()
}

/// Deterministic random unit vectors for oracle tests.
fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> EmbeddingVector {
    loop {
        let raw: Vec<f32> = (0..dim).map(|_| rng.random_range(-1.0f32..1.0)).collect();
        if let Ok(v) = EmbeddingVector::from_raw(raw).normalized() {
            return v;
        }
    }
}

struct FixedProvider {
    dim: usize,
    vectors: BTreeMap<String, Vec<f32>>,
}

impl EmbeddingProvider for FixedProvider {
    fn name(&self) -> &str {
        "fixed"
    }
    fn dimension(&self) -> usize {
        self.dim
    }
    fn embed_raw(&self, texts: &[String]) -> Result<Vec<Vec<f32>>, EmbedError> {
        texts
            .iter()
            .map(|t| {
                self.vectors
                    .get(t)
                    .cloned()
                    .ok_or_else(|| EmbedError::Provider(format!("no vector for `{t}`")))
            })
            .collect()
    }
}

/// Independent exact scan with the same tie-breaking contract: score
/// descending, then ascending id, threshold, then signature dedup, then k.
fn oracle_retrieve(
    entries: &[(String, EmbeddingVector)],
    store: &BTreeMap<String, TrainingQuestion>,
    query: &EmbeddingVector,
    config: &RetrievalConfig,
) -> Vec<(String, f32)> {
    let mut scored: Vec<(f32, &String)> = entries
        .iter()
        .map(|(id, v)| {
            let mut acc = 0.0f32;
            for i in 0..v.len() {
                acc += query.values()[i] * v.values()[i];
            }
            (acc, id)
        })
        .collect();
    scored.sort_by(|(sa, ia), (sb, ib)| sb.partial_cmp(sa).unwrap().then(ia.cmp(ib)));
    scored.truncate(config.overfetch);
    scored.retain(|(s, _)| *s >= config.tau);
    let mut kept: Vec<(String, f32)> = Vec::new();
    let mut seen_signatures: Vec<Vec<(String, Direction)>> = Vec::new();
    for (score, id) in scored {
        if kept.len() == config.k {
            break;
        }
        let sigs = store[id].path_signatures();
        if sigs.iter().any(|s| seen_signatures.contains(s)) {
            continue;
        }
        seen_signatures.extend(sigs);
        kept.push((id.clone(), score));
    }
    kept
}

#[test]
fn retrieval_matches_brute_force_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let dim = 16;
    // distinct relation names per question: no diversity collisions
    let questions: Vec<TrainingQuestion> = (0..60)
        .map(|i| {
            question(
                &format!("q{i:03}"),
                &format!("question number {i}"),
                &[(&format!("rel_{i}"), Direction::Outgoing)],
            )
        })
        .collect();
    let store = store_of(&questions);
    let entries: Vec<(String, EmbeddingVector)> =
        questions.iter().map(|q| (q.id.clone(), random_unit(&mut rng, dim))).collect();

    let provider = FixedProvider {
        dim,
        vectors: questions
            .iter()
            .zip(&entries)
            .map(|(q, (_, v))| (q.text.clone(), v.values().to_vec()))
            .collect(),
    };
    let index = build_index(&questions, &provider).unwrap();
    // the oracle scans exactly what the index stores; its independence is in
    // the scoring loop, ordering, tie-breaking, and filtering logic
    let stored: Vec<(String, EmbeddingVector)> =
        index.entries().iter().map(|en| (en.id.clone(), en.vector.clone())).collect();

    let config = RetrievalConfig { k: 5, tau: -1.0, overfetch: 20 };
    for _ in 0..25 {
        let query = random_unit(&mut rng, dim);
        let got: Vec<(String, f32)> = retrieve(&index, &store, &query, &config)
            .into_iter()
            .map(|ex| (ex.question.id, ex.similarity))
            .collect();
        let expected = oracle_retrieve(&stored, &store, &query, &config);
        assert_eq!(got, expected);
    }
}

#[test]
fn self_match_scores_one() {
    let provider = HashEmbeddingProvider::new(32);
    let questions =
        vec![question("a", "where was X born", &[("born_in", Direction::Outgoing)])];
    let store = store_of(&questions);
    let index = build_index(&questions, &provider).unwrap();
    let query = embed_batch(&provider, &["where was X born".into()]).unwrap().remove(0);
    let result = retrieve(&index, &store, &query, &RetrievalConfig { k: 3, tau: 0.9, overfetch: 5 });
    assert_eq!(result.len(), 1);
    assert!((result[0].similarity - 1.0).abs() <= 1e-6);
}

#[test]
fn threshold_filters_everything() {
    let provider = HashEmbeddingProvider::new(32);
    let questions =
        vec![question("a", "where was X born", &[("born_in", Direction::Outgoing)])];
    let store = store_of(&questions);
    let index = build_index(&questions, &provider).unwrap();
    let query =
        embed_batch(&provider, &["a completely different question".into()]).unwrap().remove(0);
    let result =
        retrieve(&index, &store, &query, &RetrievalConfig { k: 3, tau: 0.85, overfetch: 5 });
    assert!(result.is_empty());
}

#[test]
fn diversity_drops_identical_signatures() {
    let provider = HashEmbeddingProvider::new(32);
    // Same templated text => same vector => scores tie; ascending-id break.
    let questions = vec![
        question("t2", "where was X born", &[("born_in", Direction::Outgoing)]),
        question("t1", "where was X born", &[("born_in", Direction::Outgoing)]),
        question("t3", "where was X born", &[("birthplace", Direction::Outgoing)]),
    ];
    let store = store_of(&questions);
    let index = build_index(&questions, &provider).unwrap();
    let query = embed_batch(&provider, &["where was X born".into()]).unwrap().remove(0);
    let result =
        retrieve(&index, &store, &query, &RetrievalConfig { k: 3, tau: 0.5, overfetch: 10 });
    let ids: Vec<&str> = result.iter().map(|ex| ex.question.id.as_str()).collect();
    assert_eq!(ids, vec!["t1", "t3"], "t2 shares t1's signature and is dropped");
}

#[test]
fn results_sorted_and_bounded() {
    let provider = HashEmbeddingProvider::new(32);
    let questions: Vec<TrainingQuestion> = (0..10)
        .map(|i| {
            question(
                &format!("q{i}"),
                &format!("text {i}"),
                &[(&format!("r{i}"), Direction::Outgoing)],
            )
        })
        .collect();
    let store = store_of(&questions);
    let index = build_index(&questions, &provider).unwrap();
    let query = embed_batch(&provider, &["text 3".into()]).unwrap().remove(0);
    let config = RetrievalConfig { k: 4, tau: -1.0, overfetch: 10 };
    let result = retrieve(&index, &store, &query, &config);
    assert!(result.len() <= config.k);
    for pair in result.windows(2) {
        assert!(pair[0].similarity >= pair[1].similarity);
    }
    for ex in &result {
        assert!(ex.similarity >= config.tau);
    }
}

#[test]
fn build_index_entries_match_independent_embedding() {
    let provider = HashEmbeddingProvider::new(24);
    let questions: Vec<TrainingQuestion> = (0..50)
        .map(|i| {
            let mut q = question(
                &format!("q{i:02}"),
                &format!("what is fact {i} about alice"),
                &[("r", Direction::Outgoing)],
            );
            q.topic_entities = vec![TopicEntityAnnotation::new(
                EntityId::new("alice"),
                "alice",
                Some("person".into()),
            )];
            q
        })
        .collect();
    let index = build_index(&questions, &provider).unwrap();
    assert_eq!(index.len(), 50);
    for (entry, q) in index.entries().iter().zip(&questions) {
        let templated = template_question(&q.text, &q.topic_entities).question.text;
        assert!(templated.contains("<person>"));
        let expected = embed_batch(&provider, &[templated]).unwrap().remove(0);
        assert_eq!(entry.vector, expected, "entry {}", entry.id);
    }
}

#[test]
fn duplicate_ids_fail_build() {
    let provider = HashEmbeddingProvider::new(8);
    let questions = vec![
        question("dup", "a", &[("r", Direction::Outgoing)]),
        question("dup", "b", &[("r", Direction::Outgoing)]),
    ];
    match build_index(&questions, &provider) {
        Err(ExemplarError::DuplicateIds(ids)) => assert_eq!(ids, vec!["dup".to_string()]),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn save_load_round_trip_is_exact() {
    let provider = HashEmbeddingProvider::new(24);
    let questions: Vec<TrainingQuestion> = (0..50)
        .map(|i| {
            question(
                &format!("q{i:02}"),
                &format!("unique text {i}"),
                &[("r", Direction::Outgoing)],
            )
        })
        .collect();
    let index = build_index(&questions, &provider).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("index.bin");
    save_index(&index, &path).unwrap();
    let loaded = load_index(&path).unwrap();
    assert_eq!(loaded.dimension(), index.dimension());
    assert_eq!(loaded.metadata(), index.metadata());
    assert_eq!(loaded.len(), index.len());
    for (a, b) in index.entries().iter().zip(loaded.entries()) {
        assert_eq!(a.id, b.id);
        assert_eq!(a.vector.values(), b.vector.values(), "vectors bit-identical");
    }

    // identical inputs -> byte-identical files
    let path2 = dir.path().join("index2.bin");
    save_index(&build_index(&questions, &provider).unwrap(), &path2).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&path2).unwrap());
}

#[test]
fn corrupted_files_are_rejected() {
    let provider = HashEmbeddingProvider::new(8);
    let questions = vec![question("a", "text", &[("r", Direction::Outgoing)])];
    let index = build_index(&questions, &provider).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("index.bin");
    save_index(&index, &path).unwrap();

    let mut bytes = std::fs::read(&path).unwrap();
    bytes[0] ^= 0xFF;
    let bad_magic = dir.path().join("bad_magic.bin");
    std::fs::write(&bad_magic, &bytes).unwrap();
    assert!(matches!(load_index(&bad_magic), Err(ExemplarError::Format(_))));

    let good = std::fs::read(&path).unwrap();
    let truncated = dir.path().join("truncated.bin");
    std::fs::write(&truncated, &good[..good.len() - 3]).unwrap();
    assert!(matches!(load_index(&truncated), Err(ExemplarError::Corrupt(_))));
}

#[test]
fn retrieve_after_reload_equals_direct() {
    let provider = HashEmbeddingProvider::new(16);
    let questions: Vec<TrainingQuestion> = (0..20)
        .map(|i| {
            question(
                &format!("q{i:02}"),
                &format!("text {i}"),
                &[(&format!("r{i}"), Direction::Outgoing)],
            )
        })
        .collect();
    let store = store_of(&questions);
    let index = build_index(&questions, &provider).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("index.bin");
    save_index(&index, &path).unwrap();
    let reloaded = load_index(&path).unwrap();

    let config = RetrievalConfig { k: 5, tau: -1.0, overfetch: 10 };
    let query = embed_batch(&provider, &["text 7".into()]).unwrap().remove(0);
    let direct: Vec<(String, f32)> = retrieve(&index, &store, &query, &config)
        .into_iter()
        .map(|ex| (ex.question.id, ex.similarity))
        .collect();
    let roundtripped: Vec<(String, f32)> = retrieve(&reloaded, &store, &query, &config)
        .into_iter()
        .map(|ex| (ex.question.id, ex.similarity))
        .collect();
    assert_eq!(direct, roundtripped);
}

#[test]
fn guide_relations_union_over_gold_paths() {
    assert!(extract_guide_relations(&[]).is_empty());

    let q1 = question(
        "a",
        "x",
        &[("born_in", Direction::Outgoing), ("located_in", Direction::Outgoing)],
    );
    let q2 = question("b", "y", &[("born_in", Direction::Outgoing)]);
    let exemplars: Vec<Exemplar> = [q1, q2]
        .into_iter()
        .map(|q| Exemplar { templated_text: q.text.clone(), similarity: 1.0, question: q })
        .collect();
    let guide = extract_guide_relations(&exemplars);
    let names: Vec<&str> = guide.iter().map(|r| r.name()).collect();
    assert_eq!(names, vec!["born_in", "located_in"]);
}

#[test]
fn http_embedder_preserves_order() {
    let body = r#"{"data": [{"embedding": [1.0, 0.0]}, {"embedding": [0.0, 2.0]}, {"embedding": [3.0, 0.0]}]}"#;
    let server = TestServer::start(vec![CannedResponse::ok(body)]);
    let provider = HttpEmbeddingProvider::new(HttpEmbeddingConfig {
        base_url: server.url.clone(),
        model: "test-model".into(),
        dimension: 2,
        timeout: Duration::from_secs(5),
        retries: 0,
        backoff: Duration::from_millis(1),
        max_batch: 64,
    })
    .unwrap();
    let vectors =
        embed_batch(&provider, &["a".into(), "b".into(), "c".into()]).unwrap();
    assert_eq!(vectors[0].values(), &[1.0, 0.0]);
    assert_eq!(vectors[1].values(), &[0.0, 1.0]);
    assert_eq!(vectors[2].values(), &[1.0, 0.0]);

    let bodies = server.finish();
    let request: serde_json::Value = serde_json::from_str(&bodies[0]).unwrap();
    assert_eq!(request["model"], "test-model");
    assert_eq!(request["input"].as_array().unwrap().len(), 3);
}

#[test]
fn http_embedder_wrong_dimension_is_protocol_error() {
    let body = r#"{"data": [{"embedding": [1.0, 0.0, 0.0]}]}"#;
    let server = TestServer::start(vec![CannedResponse::ok(body)]);
    let provider = HttpEmbeddingProvider::new(HttpEmbeddingConfig {
        base_url: server.url.clone(),
        model: "m".into(),
        dimension: 2,
        timeout: Duration::from_secs(5),
        retries: 0,
        backoff: Duration::from_millis(1),
        max_batch: 64,
    })
    .unwrap();
    let err = embed_batch(&provider, &["a".into()]).unwrap_err();
    match err {
        EmbedError::Dimension { expected, actual } => assert_eq!((expected, actual), (2, 3)),
        other => panic!("unexpected {other:?}"),
    }
    server.finish();
}

#[test]
fn http_embedder_retries_then_fails() {
    let server = TestServer::start(vec![CannedResponse::error(500), CannedResponse::error(500)]);
    let provider = HttpEmbeddingProvider::new(HttpEmbeddingConfig {
        base_url: server.url.clone(),
        model: "m".into(),
        dimension: 2,
        timeout: Duration::from_secs(5),
        retries: 1,
        backoff: Duration::from_millis(1),
        max_batch: 64,
    })
    .unwrap();
    assert!(matches!(embed_batch(&provider, &["a".into()]), Err(EmbedError::Provider(_))));
    assert_eq!(server.finish().len(), 2);
}
