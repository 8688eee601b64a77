//! A hand-designed offline evaluation suite: a small geography/people graph,
//! 20 solved training questions, 12 test questions, and mock completion
//! scripts for both guided and unguided runs.
//!
//! Every script is written against the engine's exact call order per
//! iteration (prune per frontier entity, select, status update, sufficiency,
//! then reflection except on the final iteration), so the suite doubles as a
//! regression net for that order. Expected counters below are hand-derived
//! from the graph and scripts.
//!
//! Designed outcomes across the 12 questions:
//! - q01..q04 trigger the lookahead and answer early (iterations 0);
//! - q05..q07 trigger it, get rejected, and answer via exploration;
//! - q08..q10, q12 retrieve no exemplars (unmatched question shapes);
//! - q11 retrieves an exemplar but the guide relations miss its topic
//!   entity, so the lookahead never triggers; at the second hop the pruner
//!   returns nothing and the guide-relation union rescues the iteration;
//! - q12 dead-ends on a wrong branch and recovers by backtracking.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use kgqa_core::config::{AppConfig, EmbeddingKind, LlmKind};
use kgqa_core::exemplar::{DatasetRecord, TopicEntityAnnotation};
use kgqa_core::kg::{Direction, EntityId, Relation, ReasoningPath};
use kgqa_core::planner::MockEntry;

pub const KG_TSV: &str = "\
alice\tborn_in\tspringfield
bob\tborn_in\tspringfield
carol\tborn_in\trivertown
dave\tborn_in\tlakeside
erin\tborn_in\thillview
frank\tborn_in\trivertown
grace\tlives_in\taldport
grace\tworks_for\tacme
springfield\tlocated_in\tfreedonia
rivertown\tlocated_in\tsylvania
lakeside\tlocated_in\tfreedonia
hillview\tlocated_in\tborduria
aldport\tlocated_in\tfreedonia
mosgrad\tlocated_in\tsylvania
veslat\tlocated_in\tborduria
freedonia\tcapital\taldport
sylvania\tcapital\tmosgrad
borduria\tcapital\tveslat
freedonia\tofficial_language\tfreedonian
sylvania\tofficial_language\tsylvan
borduria\tofficial_language\tbordurian
alice\tworks_for\tacme
bob\tworks_for\tglobex
carol\tworks_for\tacme
acme\theadquartered_in\taldport
globex\theadquartered_in\tmosgrad
acme\tfounded_by\tcarol
globex\tfounded_by\tdave
alice\tspouse_of\tbob
alice\tplays\tviolin
bob\tplays\tpiano
dave\tplays\tviolin
carol\tplays\tcello
verde_river\tflows_through\trivertown
verde_river\tflows_through\tlakeside
azul_river\tflows_through\tspringfield
";

fn e(id: &str) -> EntityId {
    EntityId::new(id)
}

fn path(start: &str, hops: &[(&str, Direction, &str)]) -> ReasoningPath {
    let mut p = ReasoningPath::seed(e(start));
    for (relation, direction, target) in hops {
        p = p.extended(Relation::new(*relation), *direction, e(target));
    }
    p
}

fn topic(id: &str, category: &str) -> TopicEntityAnnotation {
    TopicEntityAnnotation::new(e(id), id, Some(category.to_string()))
}

fn record(
    id: &str,
    question: &str,
    topics: Vec<TopicEntityAnnotation>,
    answers: &[&str],
    gold_paths: Vec<ReasoningPath>,
) -> DatasetRecord {
    DatasetRecord {
        id: id.to_string(),
        question: question.to_string(),
        topic_entities: topics,
        answers: answers.iter().map(|a| a.to_string()).collect(),
        gold_paths,
    }
}

use Direction::{Incoming as IN, Outgoing as OUT};

/// The 20 solved training questions backing the exemplar index.
pub fn training_records() -> Vec<DatasetRecord> {
    vec![
        record(
            "t01",
            "what country was carol born in",
            vec![topic("carol", "person")],
            &["sylvania"],
            vec![path("carol", &[("born_in", OUT, "rivertown"), ("located_in", OUT, "sylvania")])],
        ),
        record(
            "t02",
            "what country was erin born in",
            vec![topic("erin", "person")],
            &["borduria"],
            vec![path("erin", &[("born_in", OUT, "hillview"), ("located_in", OUT, "borduria")])],
        ),
        record(
            "t03",
            "what is the capital of the country where erin was born",
            vec![topic("erin", "person")],
            &["veslat"],
            vec![path(
                "erin",
                &[
                    ("born_in", OUT, "hillview"),
                    ("located_in", OUT, "borduria"),
                    ("capital", OUT, "veslat"),
                ],
            )],
        ),
        record(
            "t04",
            "where is the company bob works for headquartered",
            vec![topic("bob", "person")],
            &["mosgrad"],
            vec![path(
                "bob",
                &[("works_for", OUT, "globex"), ("headquartered_in", OUT, "mosgrad")],
            )],
        ),
        record(
            "t05",
            "who founded the company where alice works",
            vec![topic("alice", "person")],
            &["carol"],
            vec![path("alice", &[("works_for", OUT, "acme"), ("founded_by", OUT, "carol")])],
        ),
        record(
            "t06",
            "which river flows through the city where dave was born",
            vec![topic("dave", "person")],
            &["verde_river"],
            vec![path(
                "dave",
                &[("born_in", OUT, "lakeside"), ("flows_through", IN, "verde_river")],
            )],
        ),
        record(
            "t07",
            "what language is spoken in the country where frank was born",
            vec![topic("frank", "person")],
            &["sylvan"],
            vec![path(
                "frank",
                &[
                    ("born_in", OUT, "rivertown"),
                    ("located_in", OUT, "sylvania"),
                    ("official_language", OUT, "sylvan"),
                ],
            )],
        ),
        record(
            "t08",
            "who is the spouse of alice",
            vec![topic("alice", "person")],
            &["bob"],
            vec![path("alice", &[("spouse_of", OUT, "bob")])],
        ),
        record(
            "t09",
            "which company is headquartered in mosgrad",
            vec![topic("mosgrad", "city")],
            &["globex"],
            vec![path("mosgrad", &[("headquartered_in", IN, "globex")])],
        ),
        record(
            "t10",
            "which country is springfield located in",
            vec![topic("springfield", "city")],
            &["freedonia"],
            vec![path("springfield", &[("located_in", OUT, "freedonia")])],
        ),
        record(
            "t11",
            "what is the capital of sylvania",
            vec![topic("sylvania", "country")],
            &["mosgrad"],
            vec![path("sylvania", &[("capital", OUT, "mosgrad")])],
        ),
        record(
            "t12",
            "what language is spoken in freedonia",
            vec![topic("freedonia", "country")],
            &["freedonian"],
            vec![path("freedonia", &[("official_language", OUT, "freedonian")])],
        ),
        record(
            "t13",
            "which cities does the verde river flow through",
            vec![TopicEntityAnnotation::new(e("verde_river"), "verde river", Some("river".into()))],
            &["rivertown", "lakeside"],
            vec![path("verde_river", &[("flows_through", OUT, "rivertown")])],
        ),
        record(
            "t14",
            "who works for acme",
            vec![topic("acme", "company")],
            &["alice", "carol"],
            vec![path("acme", &[("works_for", IN, "alice")])],
        ),
        record(
            "t15",
            "where was the founder of globex born",
            vec![topic("globex", "company")],
            &["lakeside"],
            vec![path("globex", &[("founded_by", OUT, "dave"), ("born_in", OUT, "lakeside")])],
        ),
        record(
            "t16",
            "what country is the headquarters of acme in",
            vec![topic("acme", "company")],
            &["freedonia"],
            vec![path(
                "acme",
                &[("headquartered_in", OUT, "aldport"), ("located_in", OUT, "freedonia")],
            )],
        ),
        record(
            "t17",
            "which river flows through springfield",
            vec![topic("springfield", "city")],
            &["azul_river"],
            vec![path("springfield", &[("flows_through", IN, "azul_river")])],
        ),
        record(
            "t18",
            "what is the capital of the country where acme is headquartered",
            vec![topic("acme", "company")],
            &["aldport"],
            vec![path(
                "acme",
                &[
                    ("headquartered_in", OUT, "aldport"),
                    ("located_in", OUT, "freedonia"),
                    ("capital", OUT, "aldport"),
                ],
            )],
        ),
        record(
            "t19",
            "which instrument does the founder of acme play",
            vec![topic("acme", "company")],
            &["cello"],
            vec![path("acme", &[("founded_by", OUT, "carol"), ("plays", OUT, "cello")])],
        ),
        record(
            "t20",
            "in which country was the spouse of alice born",
            vec![topic("alice", "person")],
            &["freedonia"],
            vec![path(
                "alice",
                &[
                    ("spouse_of", OUT, "bob"),
                    ("born_in", OUT, "springfield"),
                    ("located_in", OUT, "freedonia"),
                ],
            )],
        ),
    ]
}

/// The 12 test questions. Gold paths are omitted, as on a real test split.
pub fn test_records() -> Vec<DatasetRecord> {
    vec![
        record("q01", "what country was alice born in", vec![topic("alice", "person")], &["freedonia"], vec![]),
        record("q02", "what country was dave born in", vec![topic("dave", "person")], &["freedonia"], vec![]),
        record(
            "q03",
            "what is the capital of the country where carol was born",
            vec![topic("carol", "person")],
            &["mosgrad"],
            vec![],
        ),
        record(
            "q04",
            "where is the company alice works for headquartered",
            vec![topic("alice", "person")],
            &["aldport"],
            vec![],
        ),
        record(
            "q05",
            "who founded the company where bob works",
            vec![topic("bob", "person")],
            &["dave"],
            vec![],
        ),
        record(
            "q06",
            "which river flows through the city where frank was born",
            vec![topic("frank", "person")],
            &["verde_river"],
            vec![],
        ),
        record(
            "q07",
            "what language is spoken in the country where erin was born",
            vec![topic("erin", "person")],
            &["bordurian"],
            vec![],
        ),
        record("q08", "what instrument does bob play", vec![topic("bob", "person")], &["piano"], vec![]),
        record(
            "q09",
            "in which city was the spouse of alice born",
            vec![topic("alice", "person")],
            &["springfield"],
            vec![],
        ),
        record("q10", "what company did carol found", vec![topic("carol", "person")], &["acme"], vec![]),
        record("q11", "what country was grace born in", vec![topic("grace", "person")], &["freedonia"], vec![]),
        record(
            "q12",
            "where was the spouse of bob born",
            vec![topic("bob", "person")],
            &["springfield"],
            vec![],
        ),
    ]
}

const NOT_YET: &str = r#"{"sufficient": false, "answer": [], "reason": "the paths do not answer the question yet"}"#;
const KEEP_COURSE: &str = r#"{"correct_course": true, "backtrack": [], "reason": "current direction is fine"}"#;

fn accept(answer: &str) -> String {
    format!(r#"{{"sufficient": true, "answer": ["{answer}"], "reason": "the reasoning path answers the question"}}"#)
}

fn reject() -> String {
    r#"{"sufficient": false, "answer": [], "reason": "this path alone is not convincing"}"#.to_string()
}

type Script = Vec<(&'static str, String)>;

fn early_answer_script(objectives: &str, answer: &str) -> Script {
    vec![
        ("decompose", objectives.to_string()),
        ("lookahead", accept(answer)),
    ]
}

/// One full exploration iteration that keeps exploring afterwards.
fn hop(select: &str, statuses: &str, relations: &str) -> Script {
    vec![
        ("prune_relations", relations.to_string()),
        ("select_paths", select.to_string()),
        ("update_statuses", statuses.to_string()),
        ("sufficiency", NOT_YET.to_string()),
        ("reflect", KEEP_COURSE.to_string()),
    ]
}

/// The final exploration iteration, accepting an answer.
fn last_hop(select: &str, statuses: &str, relations: &str, answer: &str) -> Script {
    vec![
        ("prune_relations", relations.to_string()),
        ("select_paths", select.to_string()),
        ("update_statuses", statuses.to_string()),
        ("sufficiency", accept(answer)),
    ]
}

fn guided_scripts() -> BTreeMap<&'static str, Script> {
    let mut scripts = BTreeMap::new();
    scripts.insert(
        "q01",
        early_answer_script(
            r#"["find where alice was born", "find the country of that place"]"#,
            "freedonia",
        ),
    );
    scripts.insert(
        "q02",
        early_answer_script(
            r#"["find where dave was born", "find the country of that place"]"#,
            "freedonia",
        ),
    );
    scripts.insert(
        "q03",
        early_answer_script(
            r#"["find where carol was born", "find that place's country", "find the country's capital"]"#,
            "mosgrad",
        ),
    );
    scripts.insert(
        "q04",
        early_answer_script(
            r#"["find the company alice works for", "find its headquarters"]"#,
            "aldport",
        ),
    );

    let mut q05 = vec![
        ("decompose", r#"["find the company where bob works", "find who founded it"]"#.to_string()),
        ("lookahead", reject()),
    ];
    q05.extend(hop("[0]", r#"["resolved: globex", "unknown"]"#, r#"["works_for"]"#));
    q05.extend(last_hop("[0]", r#"["resolved: globex", "resolved: dave"]"#, r#"["founded_by"]"#, "dave"));
    scripts.insert("q05", q05);

    let mut q06 = vec![
        ("decompose", r#"["find where frank was born", "find the river flowing through it"]"#.to_string()),
        ("lookahead", reject()),
    ];
    q06.extend(hop("[0]", r#"["resolved: rivertown", "unknown"]"#, r#"["born_in"]"#));
    // guide forces born_in(in) alongside; extensions: carol, frank, verde_river
    q06.extend(last_hop(
        "[2]",
        r#"["resolved: rivertown", "resolved: verde_river"]"#,
        r#"["flows_through"]"#,
        "verde_river",
    ));
    scripts.insert("q06", q06);

    let mut q07 = vec![
        (
            "decompose",
            r#"["find where erin was born", "find that place's country", "find its language"]"#
                .to_string(),
        ),
        ("lookahead", reject()),
    ];
    q07.extend(hop("[0]", r#"["resolved: hillview", "unknown", "unknown"]"#, r#"["born_in"]"#));
    // extensions: erin (guide-forced born_in), borduria
    q07.extend(hop("[1]", r#"["resolved: hillview", "resolved: borduria", "unknown"]"#, r#"["located_in"]"#));
    // extensions: hillview, veslat (guide-forced located_in), bordurian
    q07.extend(last_hop(
        "[2]",
        r#"["resolved: hillview", "resolved: borduria", "resolved: bordurian"]"#,
        r#"["official_language"]"#,
        "bordurian",
    ));
    scripts.insert("q07", q07);

    for (id, script) in shared_scripts() {
        scripts.insert(id, script);
    }

    let mut q11 = vec![(
        "decompose",
        r#"["find where grace is from", "find the country of that place"]"#.to_string(),
    )];
    q11.extend(hop("[0]", r#"["resolved: aldport", "unknown"]"#, r#"["lives_in"]"#));
    // the pruner gives up twice; the guide union forces located_in
    q11.push(("prune_relations", "[]".to_string()));
    q11.push(("prune_relations", "[]".to_string()));
    q11.extend(vec![
        ("select_paths", "[0]".to_string()),
        ("update_statuses", r#"["resolved: aldport", "resolved: freedonia"]"#.to_string()),
        ("sufficiency", accept("freedonia")),
    ]);
    scripts.insert("q11", q11);

    scripts
}

/// Questions whose flow is identical with and without exemplar guidance
/// (nothing similar exists in the training set).
fn shared_scripts() -> BTreeMap<&'static str, Script> {
    let mut scripts = BTreeMap::new();

    scripts.insert(
        "q08",
        vec![
            ("decompose", r#"["find the instrument bob plays"]"#.to_string()),
            ("prune_relations", r#"["plays"]"#.to_string()),
            ("select_paths", "[0]".to_string()),
            ("update_statuses", r#"["resolved: piano"]"#.to_string()),
            ("sufficiency", accept("piano")),
        ],
    );

    let mut q09 = vec![(
        "decompose",
        r#"["find the spouse of alice", "find where that person was born"]"#.to_string(),
    )];
    q09.extend(hop("[0]", r#"["resolved: bob", "unknown"]"#, r#"["spouse_of"]"#));
    q09.extend(last_hop("[0]", r#"["resolved: bob", "resolved: springfield"]"#, r#"["born_in"]"#, "springfield"));
    scripts.insert("q09", q09);

    scripts.insert(
        "q10",
        vec![
            ("decompose", r#"["find the company carol founded"]"#.to_string()),
            ("prune_relations", r#"["founded_by"]"#.to_string()),
            ("select_paths", "[0]".to_string()),
            ("update_statuses", r#"["resolved: acme"]"#.to_string()),
            ("sufficiency", accept("acme")),
        ],
    );

    // wrong branch first, then reflection backtracks to the spouse
    let q12 = vec![
        (
            "decompose",
            r#"["find the spouse of bob", "find where that person was born"]"#.to_string(),
        ),
        ("prune_relations", r#"["spouse_of", "works_for"]"#.to_string()),
        ("select_paths", "[1]".to_string()),
        ("update_statuses", r#"["in progress", "unknown"]"#.to_string()),
        ("sufficiency", NOT_YET.to_string()),
        (
            "reflect",
            r#"{"correct_course": false, "backtrack": ["alice"], "reason": "the spouse branch was dropped; revisit alice"}"#
                .to_string(),
        ),
        ("prune_relations", "[]".to_string()),
        ("prune_relations", "[]".to_string()),
        ("prune_relations", r#"["born_in"]"#.to_string()),
        ("select_paths", "[0]".to_string()),
        ("update_statuses", r#"["resolved: alice", "resolved: springfield"]"#.to_string()),
        ("sufficiency", accept("springfield")),
    ];
    scripts.insert("q12", q12);

    scripts
}

fn plain_scripts() -> BTreeMap<&'static str, Script> {
    let mut scripts = BTreeMap::new();

    let two_hop = |objectives: &str,
                   first_rel: &str,
                   first_status: &str,
                   second_rel: &str,
                   final_status: &str,
                   answer: &str| {
        let mut script = vec![("decompose", objectives.to_string())];
        script.extend(hop("[0]", first_status, first_rel));
        script.extend(last_hop("[0]", final_status, second_rel, answer));
        script
    };

    scripts.insert(
        "q01",
        two_hop(
            r#"["find where alice was born", "find the country of that place"]"#,
            r#"["born_in"]"#,
            r#"["resolved: springfield", "unknown"]"#,
            r#"["located_in"]"#,
            r#"["resolved: springfield", "resolved: freedonia"]"#,
            "freedonia",
        ),
    );
    scripts.insert(
        "q02",
        two_hop(
            r#"["find where dave was born", "find the country of that place"]"#,
            r#"["born_in"]"#,
            r#"["resolved: lakeside", "unknown"]"#,
            r#"["located_in"]"#,
            r#"["resolved: lakeside", "resolved: freedonia"]"#,
            "freedonia",
        ),
    );

    let mut q03 = vec![(
        "decompose",
        r#"["find where carol was born", "find that place's country", "find the country's capital"]"#
            .to_string(),
    )];
    q03.extend(hop("[0]", r#"["resolved: rivertown", "unknown", "unknown"]"#, r#"["born_in"]"#));
    q03.extend(hop("[0]", r#"["resolved: rivertown", "resolved: sylvania", "unknown"]"#, r#"["located_in"]"#));
    q03.extend(last_hop(
        "[0]",
        r#"["resolved: rivertown", "resolved: sylvania", "resolved: mosgrad"]"#,
        r#"["capital"]"#,
        "mosgrad",
    ));
    scripts.insert("q03", q03);

    scripts.insert(
        "q04",
        two_hop(
            r#"["find the company alice works for", "find its headquarters"]"#,
            r#"["works_for"]"#,
            r#"["resolved: acme", "unknown"]"#,
            r#"["headquartered_in"]"#,
            r#"["resolved: acme", "resolved: aldport"]"#,
            "aldport",
        ),
    );
    scripts.insert(
        "q05",
        two_hop(
            r#"["find the company where bob works", "find who founded it"]"#,
            r#"["works_for"]"#,
            r#"["resolved: globex", "unknown"]"#,
            r#"["founded_by"]"#,
            r#"["resolved: globex", "resolved: dave"]"#,
            "dave",
        ),
    );
    scripts.insert(
        "q06",
        two_hop(
            r#"["find where frank was born", "find the river flowing through it"]"#,
            r#"["born_in"]"#,
            r#"["resolved: rivertown", "unknown"]"#,
            r#"["flows_through"]"#,
            r#"["resolved: rivertown", "resolved: verde_river"]"#,
            "verde_river",
        ),
    );

    let mut q07 = vec![(
        "decompose",
        r#"["find where erin was born", "find that place's country", "find its language"]"#
            .to_string(),
    )];
    q07.extend(hop("[0]", r#"["resolved: hillview", "unknown", "unknown"]"#, r#"["born_in"]"#));
    q07.extend(hop("[0]", r#"["resolved: hillview", "resolved: borduria", "unknown"]"#, r#"["located_in"]"#));
    q07.extend(last_hop(
        "[0]",
        r#"["resolved: hillview", "resolved: borduria", "resolved: bordurian"]"#,
        r#"["official_language"]"#,
        "bordurian",
    ));
    scripts.insert("q07", q07);

    for (id, script) in shared_scripts() {
        scripts.insert(id, script);
    }

    scripts.insert(
        "q11",
        two_hop(
            r#"["find where grace is from", "find the country of that place"]"#,
            r#"["lives_in"]"#,
            r#"["resolved: aldport", "unknown"]"#,
            r#"["located_in"]"#,
            r#"["resolved: aldport", "resolved: freedonia"]"#,
            "freedonia",
        ),
    );

    scripts
}

fn write_jsonl_records(path: &Path, records: &[DatasetRecord]) -> std::io::Result<()> {
    let mut out = String::new();
    for record in records {
        out.push_str(&serde_json::to_string(record).expect("record serializes"));
        out.push('\n');
    }
    std::fs::write(path, out)
}

fn write_script(path: &Path, script: &Script) -> std::io::Result<()> {
    let mut out = String::new();
    for (matcher, response) in script {
        let entry = MockEntry { matcher: matcher.to_string(), response: response.clone() };
        out.push_str(&serde_json::to_string(&entry).expect("entry serializes"));
        out.push('\n');
    }
    std::fs::write(path, out)
}

/// Paths of a materialized suite.
pub struct Suite {
    pub dir: PathBuf,
    pub kg: PathBuf,
    pub train: PathBuf,
    pub test: PathBuf,
    pub mocks_guided: PathBuf,
    pub mocks_plain: PathBuf,
    pub config: PathBuf,
    pub index: PathBuf,
}

/// Writes the whole suite (graph, datasets, scripts, config) into `dir`.
/// The index file named in the config is not created here; building it is
/// part of what the harness under test does.
pub fn write_suite(dir: &Path) -> std::io::Result<Suite> {
    std::fs::create_dir_all(dir)?;
    let suite = Suite {
        dir: dir.to_path_buf(),
        kg: dir.join("kg.tsv"),
        train: dir.join("train.jsonl"),
        test: dir.join("test.jsonl"),
        mocks_guided: dir.join("mocks"),
        mocks_plain: dir.join("mocks_plain"),
        config: dir.join("config.toml"),
        index: dir.join("index.bin"),
    };
    std::fs::write(&suite.kg, KG_TSV)?;
    write_jsonl_records(&suite.train, &training_records())?;
    write_jsonl_records(&suite.test, &test_records())?;

    std::fs::create_dir_all(&suite.mocks_guided)?;
    for (id, script) in guided_scripts() {
        write_script(&suite.mocks_guided.join(format!("{id}.jsonl")), &script)?;
    }
    std::fs::create_dir_all(&suite.mocks_plain)?;
    for (id, script) in plain_scripts() {
        write_script(&suite.mocks_plain.join(format!("{id}.jsonl")), &script)?;
    }

    let mut config = AppConfig::default();
    config.kg.source = suite.kg.display().to_string();
    config.embedding_provider.kind = EmbeddingKind::Hash;
    config.embedding_provider.dimension = 64;
    config.llm_provider.kind = LlmKind::Mock;
    config.harness.index = Some(suite.index.clone());
    config.harness.train = Some(suite.train.clone());
    let text = toml::to_string_pretty(&config).expect("config serializes");
    std::fs::write(&suite.config, text)?;
    Ok(suite)
}

/// Question ids designed to trigger the lookahead.
pub fn expected_triggered() -> Vec<&'static str> {
    vec!["q01", "q02", "q03", "q04", "q05", "q06", "q07"]
}

/// Question ids designed to answer early through the lookahead.
pub fn expected_early_answered() -> Vec<&'static str> {
    vec!["q01", "q02", "q03", "q04"]
}

/// Gold answer per test question.
pub fn expected_answers() -> BTreeMap<&'static str, &'static str> {
    let mut map = BTreeMap::new();
    map.insert("q01", "freedonia");
    map.insert("q02", "freedonia");
    map.insert("q03", "mosgrad");
    map.insert("q04", "aldport");
    map.insert("q05", "dave");
    map.insert("q06", "verde_river");
    map.insert("q07", "bordurian");
    map.insert("q08", "piano");
    map.insert("q09", "springfield");
    map.insert("q10", "acme");
    map.insert("q11", "freedonia");
    map.insert("q12", "springfield");
    map
}

/// Hand-derived relation-count histogram for the guided run.
pub fn expected_guided_histogram() -> BTreeMap<usize, u64> {
    BTreeMap::from([(0, 1), (1, 10), (2, 5)])
}

/// Hand-derived relation-count histogram for the unguided run.
pub fn expected_plain_histogram() -> BTreeMap<usize, u64> {
    BTreeMap::from([(0, 1), (1, 23), (2, 1)])
}

/// Per-question iteration counts for the guided run.
pub fn expected_guided_iterations() -> BTreeMap<&'static str, usize> {
    BTreeMap::from([
        ("q01", 0),
        ("q02", 0),
        ("q03", 0),
        ("q04", 0),
        ("q05", 2),
        ("q06", 2),
        ("q07", 3),
        ("q08", 1),
        ("q09", 2),
        ("q10", 1),
        ("q11", 2),
        ("q12", 2),
    ])
}
