use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use groundfact_checker::{
    check_batch_llm, check_decomposed, check_facts, chunk, decide, score_claim, Checker, CheckerError, CheckerOutput,
    ChunkPlan, ChunkStrategy, LexicalStub, LlmChecker, RemoteChecker, ScoreRange, ThresholdPolicy,
};
use groundfact_core::text::{LineSplitter, RuleSplitter};
use groundfact_core::{EvidenceDoc, SupportLabel};
use groundfact_decomp::AtomicFact;
use groundfact_llm::template::indexed_claims;
use groundfact_llm::{Bindings, Gateway, MockBackend, TemplateName};
use proptest::prelude::*;

/// Scores looked up by (chunk, claim); unknown pairs fail.
struct Table(HashMap<(String, String), f64>);

impl Checker for Table {
    fn identity(&self) -> String {
        "table".into()
    }

    fn score(&self, chunk: &str, claim: &str) -> Result<CheckerOutput, CheckerError> {
        let s = *self
            .0
            .get(&(chunk.to_string(), claim.to_string()))
            .ok_or_else(|| CheckerError::Protocol(format!("unscripted chunk {chunk:?}")))?;
        CheckerOutput::new(s, ScoreRange::UNIT)
    }
}

fn words(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

#[test]
fn whitespace_greedy_counts() {
    let doc = words("w", 1200).join(" ");
    let sizes: Vec<usize> = chunk(&doc, &ChunkPlan::default(), &RuleSplitter)
        .iter()
        .map(|c| c.split_whitespace().count())
        .collect();
    assert_eq!(sizes, [500, 500, 200]);
}

#[test]
fn sentence_packing_flushes_before_overflow() {
    let sentence = |tag: &str| words(tag, 199).join(" ") + " end.";
    let doc = [sentence("A"), sentence("B"), sentence("C")].join(" ");
    let plan = ChunkPlan::new(ChunkStrategy::Sentence, 350).unwrap();
    let chunks = chunk(&doc, &plan, &RuleSplitter);
    assert_eq!(chunks.len(), 3);
    assert!(chunks.iter().all(|c| c.split_whitespace().count() == 200));
    assert!(chunks[1].starts_with("B0 "));

    let long = words("x", 599).join(" ") + " end.";
    let plan = ChunkPlan::new(ChunkStrategy::Sentence, 500).unwrap();
    let chunks = chunk(&long, &plan, &RuleSplitter);
    assert_eq!(chunks.len(), 1);
    assert_eq!(chunks[0].split_whitespace().count(), 600);

    let mixed = ["one two three.", "four five.", "six seven eight nine."].join("\n");
    let plan = ChunkPlan::new(ChunkStrategy::Sentence, 5).unwrap();
    assert_eq!(
        chunk(&mixed, &plan, &LineSplitter),
        ["one two three. four five.", "six seven eight nine."]
    );
}

/// Five documents of 15 tokens, three chunks of five tokens each.
fn grid(seed: u64) -> (Vec<EvidenceDoc>, Table, f64) {
    let mut state = seed;
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut table = HashMap::new();
    let mut docs = Vec::new();
    let mut brute = f64::MIN;
    for d in 0..5 {
        let mut tokens = Vec::new();
        for c in 0..3 {
            let chunk_tokens = words(&format!("d{d}c{c}t"), 5);
            let score = next();
            brute = brute.max(score);
            table.insert((chunk_tokens.join(" "), "claim".to_string()), score);
            tokens.extend(chunk_tokens);
        }
        docs.push(EvidenceDoc::new(format!("d{d}"), tokens.join(" ")).unwrap());
    }
    (docs, Table(table), brute)
}

#[test]
fn max_over_fifteen_pairs() {
    let plan = ChunkPlan::new(ChunkStrategy::Whitespace, 5).unwrap();
    for seed in [1, 7, 99, 2024] {
        let (docs, table, brute) = grid(seed);
        let out = score_claim(&table, &docs, "claim", &plan, &RuleSplitter).unwrap();
        assert_eq!(out.score, brute);
    }
}

#[test]
fn duplicate_supporting_document_changes_nothing() {
    let plan = ChunkPlan::new(ChunkStrategy::Whitespace, 5).unwrap();
    let (mut docs, table, _) = grid(3);
    let before = score_claim(&table, &docs, "claim", &plan, &RuleSplitter).unwrap();
    let best = docs
        .iter()
        .max_by(|a, b| {
            let sa = score_claim(&table, std::slice::from_ref(*a), "claim", &plan, &RuleSplitter).unwrap().score;
            let sb = score_claim(&table, std::slice::from_ref(*b), "claim", &plan, &RuleSplitter).unwrap().score;
            sa.total_cmp(&sb)
        })
        .unwrap()
        .clone();
    docs.push(best);
    let after = score_claim(&table, &docs, "claim", &plan, &RuleSplitter).unwrap();
    assert_eq!(before, after);
    for t in [0.1, 0.5, 0.9, before.score] {
        let p = ThresholdPolicy::Fixed { value: t };
        assert_eq!(decide(&before, &p).unwrap(), decide(&after, &p).unwrap());
    }
}

#[test]
fn failing_chunk_aborts_the_claim() {
    let plan = ChunkPlan::new(ChunkStrategy::Whitespace, 5).unwrap();
    let (mut docs, table, _) = grid(5);
    docs.push(EvidenceDoc::new("extra", "unknown tokens here").unwrap());
    assert!(score_claim(&table, &docs, "claim", &plan, &RuleSplitter).is_err());
    assert!(matches!(
        score_claim(&table, &[], "claim", &plan, &RuleSplitter),
        Err(CheckerError::NoEvidence)
    ));
}

proptest! {
    #[test]
    fn permutation_invariant(seed in 0u64..1000, rot in 0usize..5) {
        let plan = ChunkPlan::new(ChunkStrategy::Whitespace, 5).unwrap();
        let (docs, table, _) = grid(seed);
        let mut rotated = docs.clone();
        rotated.rotate_left(rot);
        rotated.reverse();
        let a = score_claim(&table, &docs, "claim", &plan, &RuleSplitter).unwrap();
        let b = score_claim(&table, &rotated, "claim", &plan, &RuleSplitter).unwrap();
        prop_assert_eq!(a, b);
    }
}

fn evidence() -> Vec<EvidenceDoc> {
    vec![
        EvidenceDoc::new("e1", "The library opened in 1998 on Elm Street.").unwrap(),
        EvidenceDoc::new("e2", "Its reading room seats 120 visitors.").unwrap(),
    ]
}

fn facts(texts: &[&str]) -> Vec<AtomicFact> {
    AtomicFact::list(texts.iter().copied())
}

#[test]
fn decomposed_all_rule() {
    let plan = ChunkPlan::default();
    let p = ThresholdPolicy::Fixed { value: 0.5 };
    let ev = evidence();
    let all = check_facts(
        &LexicalStub,
        &ev,
        &facts(&["The library opened in 1998.", "The library is on Elm Street.", "The reading room seats 120."]),
        &plan,
        &p,
        &RuleSplitter,
    )
    .unwrap();
    assert_eq!(all.label, SupportLabel::Supported);
    let labels: Vec<u8> = all.facts.iter().map(|f| f.label.as_u8()).collect();
    assert_eq!(labels, [1, 1, 1]);

    let one_bad = check_facts(
        &LexicalStub,
        &ev,
        &facts(&["The library opened in 1998.", "The library closed during winter storms.", "The reading room seats 120."]),
        &plan,
        &p,
        &RuleSplitter,
    )
    .unwrap();
    let labels: Vec<u8> = one_bad.facts.iter().map(|f| f.label.as_u8()).collect();
    assert_eq!(labels, [1, 0, 1]);
    assert_eq!(one_bad.label, SupportLabel::Unsupported);
}

#[test]
fn single_fact_decomposition_matches_plain_decide() {
    let plan = ChunkPlan::default();
    let ev = evidence();
    let mock = Arc::new(MockBackend::new());
    let claims = ["The library opened in 1998.", "The library closed in 2005.", "Visitors love the reading room."];
    for c in claims {
        let mut b = Bindings::new();
        b.insert("sentence".into(), c.into());
        mock.script(TemplateName::SentenceDecomposition, &b, format!("- {c}"));
    }
    let gw = Gateway::from_arc(mock);
    for c in claims {
        for t in [0.3, 0.5, 0.7] {
            let p = ThresholdPolicy::Fixed { value: t };
            let plain = decide(&score_claim(&LexicalStub, &ev, c, &plan, &RuleSplitter).unwrap(), &p).unwrap();
            let wrapped = check_decomposed(&gw, &LexicalStub, &ev, c, &plan, &p, &RuleSplitter).unwrap();
            assert_eq!(wrapped.label, plain, "{c} at {t}");
        }
    }
}

fn batch_mock(claims: &[String], reply: &str) -> Gateway {
    let mock = Arc::new(MockBackend::new());
    let mut b = Bindings::new();
    b.insert("document".into(), "Doc.".into());
    b.insert("claims".into(), indexed_claims(claims));
    mock.script(TemplateName::MultiClaimEval, &b, reply);
    Gateway::from_arc(mock)
}

#[test]
fn multi_claim_answers() {
    let claims: Vec<String> = ["a.", "b.", "c."].iter().map(|s| s.to_string()).collect();
    let gw = batch_mock(&claims, r#"{"[1]": "yes", "[2]": "no", "[3]": "Yes"}"#);
    let labels = check_batch_llm(&gw, "Doc.", &claims).unwrap();
    assert_eq!(labels.iter().map(|l| l.as_u8()).collect::<Vec<_>>(), [1, 0, 1]);

    let gw = batch_mock(&claims, r#"{"[1]": "yes", "[2]": "yes", "[3]": "yes"}"#);
    assert!(check_batch_llm(&gw, "Doc.", &claims).unwrap().iter().all(|l| l.is_supported()));

    let gw = batch_mock(&claims, r#"{"[1]": "yes", "[3]": "no"}"#);
    assert!(matches!(check_batch_llm(&gw, "Doc.", &claims), Err(CheckerError::MissingIndex(2))));

    let gw = batch_mock(&claims, r#"{"[1]": "yes", "[2]": "no", "[3]": "no", "[4]": "no"}"#);
    assert!(matches!(check_batch_llm(&gw, "Doc.", &claims), Err(CheckerError::ExtraIndex(k)) if k == "[4]"));

    assert!(matches!(check_batch_llm(&gw, "Doc.", &[]), Err(CheckerError::NoClaims)));
}

#[test]
fn llm_checker_scores_one_or_zero() {
    let mock = Arc::new(MockBackend::new());
    for (claim, answer) in [("x.", "Yes"), ("y.", "no")] {
        let mut b = Bindings::new();
        b.insert("document".into(), "Doc.".into());
        b.insert("claim".into(), claim.into());
        mock.script(TemplateName::ZeroShotEval, &b, answer);
    }
    let checker = LlmChecker::new(Arc::new(Gateway::from_arc(mock.clone())), "judge-model");
    assert_eq!(checker.score("Doc.", "x.").unwrap().score, 1.0);
    assert_eq!(checker.score("Doc.", "y.").unwrap().score, 0.0);
    assert!(checker.identity().starts_with("llm:judge-model@mock:"));
}

fn serve_remote(seen: Arc<Mutex<Vec<serde_json::Value>>>) -> String {
    use axum::routing::post;
    use axum::{extract::State, Json, Router};
    let (tx, rx) = std::sync::mpsc::channel();
    std::thread::spawn(move || {
        tokio::runtime::Runtime::new().unwrap().block_on(async move {
            let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
            tx.send(listener.local_addr().unwrap()).unwrap();
            let app = Router::new()
                .route(
                    "/score",
                    post(
                        |State(seen): State<Arc<Mutex<Vec<serde_json::Value>>>>, Json(body): Json<serde_json::Value>| async move {
                            let doc = body["doc"].as_str().unwrap_or_default().to_string();
                            seen.lock().unwrap().push(body);
                            let score = if doc.contains("supports") { 0.8 } else { -0.4 };
                            Json(serde_json::json!({"score": score, "v_min": -1.0, "v_max": 1.0}))
                        },
                    ),
                )
                .route(
                    "/broken",
                    post(|| async { Json(serde_json::json!({"score": 3.0, "v_min": -1.0, "v_max": 1.0})) }),
                )
                .with_state(seen);
            axum::serve(listener, app).await.unwrap();
        });
    });
    format!("http://{}", rx.recv().unwrap())
}

#[test]
fn remote_checker_contract() {
    let seen = Arc::new(Mutex::new(Vec::new()));
    let base = serve_remote(seen.clone());
    let remote = RemoteChecker::new(format!("{base}/score"), Duration::from_secs(5));
    let docs = vec![
        EvidenceDoc::new("a", "This text supports the claim.").unwrap(),
        EvidenceDoc::new("b", "Unrelated text.").unwrap(),
    ];
    let out = score_claim(&remote, &docs, "The claim.", &ChunkPlan::default(), &RuleSplitter).unwrap();
    assert_eq!(out.score, 0.8);
    assert_eq!(out.range, ScoreRange::new(-1.0, 1.0).unwrap());
    assert_eq!(decide(&out, &ThresholdPolicy::Midpoint).unwrap(), SupportLabel::Supported);
    let alone = score_claim(&remote, &docs[1..], "The claim.", &ChunkPlan::default(), &RuleSplitter).unwrap();
    assert_eq!(decide(&alone, &ThresholdPolicy::Midpoint).unwrap(), SupportLabel::Unsupported);
    assert_eq!(seen.lock().unwrap()[0]["claim"], "The claim.");

    let broken = RemoteChecker::new(format!("{base}/broken"), Duration::from_secs(5));
    assert!(matches!(broken.score("d", "c"), Err(CheckerError::ScoreOutOfRange { .. })));
    let missing = RemoteChecker::new(format!("{base}/nope"), Duration::from_secs(5));
    assert!(matches!(missing.score("d", "c"), Err(CheckerError::Status { status: 404, .. })));
}
