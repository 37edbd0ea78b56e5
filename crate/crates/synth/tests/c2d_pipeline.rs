use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use groundfact_core::SupportLabel;
use groundfact_decomp::AtomicFact;
use groundfact_llm::{Bindings, Gateway, MockBackend, MockReply, TemplateName};
use groundfact_synth::batch::c2d_batch;
use groundfact_synth::c2d::{expand_fact, run_c2d, C2dClaim, C2dConfig};
use groundfact_synth::simp::run_c2d_simp;
use groundfact_synth::{GateKind, Provenance, RejectionStats, Stage, SynthError, SynthTuple};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn claims() -> Vec<C2dClaim> {
    std::fs::read_to_string(fixture("c2d_claims.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn claim(id: &str) -> C2dClaim {
    claims().into_iter().find(|c| c.id == id).unwrap()
}

fn gateway() -> (Arc<MockBackend>, Gateway) {
    let mock = Arc::new(MockBackend::from_file(&fixture("c2d_mock.jsonl")).unwrap());
    (mock.clone(), Gateway::from_arc(mock))
}

/// Label from provenance alone: the supporting document supports every
/// subclaim; an omission document supports a subclaim iff it lacks the fact.
fn rederive(t: &SynthTuple) -> SupportLabel {
    match &t.provenance {
        Provenance::C2dSupport { .. } => SupportLabel::Supported,
        Provenance::C2dOmission { omitted_fact, subset, .. } => {
            if subset.members().iter().any(|m| m == omitted_fact) {
                SupportLabel::Unsupported
            } else {
                SupportLabel::Supported
            }
        }
        other => panic!("unexpected provenance {other:?}"),
    }
}

#[test]
fn two_fact_claim_yields_fifteen_tuples() {
    let (_, gw) = gateway();
    let started = Instant::now();
    let out = run_c2d(&gw, &claim("harbor"), &C2dConfig::default()).unwrap();
    assert!(started.elapsed().as_secs_f64() < 5.0);
    assert_eq!(out.dropped, None);
    assert_eq!(out.facts.len(), 2);
    assert_eq!(out.nonsupporting.len(), 4);
    assert_eq!(out.tuples.len(), 15);
    assert_eq!(out.tuples.len(), ((1 << out.facts.len()) - 1) * (out.nonsupporting.len() + 1));
    for t in &out.tuples {
        assert_eq!(t.label, rederive(t), "{t:?}");
    }
    let negatives = out.tuples.iter().filter(|t| t.label == SupportLabel::Unsupported).count();
    assert_eq!(negatives, 8);
    for doc in &out.nonsupporting {
        let residual = doc.gate_trace.iter().find(|g| g.gate == GateKind::Residual).unwrap();
        assert!(!residual.all_entailed());
    }
    assert_eq!(out.stats.pair_gate.rejected, 0);
    assert_eq!(out.stats.pair_gate.checked, 2);
    assert_eq!(out.stats.nonsupport_discard.checked, 4);
}

#[test]
fn singleton_subclaims_are_verbatim_facts() {
    let (mock, gw) = gateway();
    let out = run_c2d(&gw, &claim("harbor"), &C2dConfig::default()).unwrap();
    let singles: Vec<&str> = out
        .tuples
        .iter()
        .filter(|t| matches!(&t.provenance, Provenance::C2dSupport { subset, .. } if subset.len() == 1))
        .map(|t| t.claim.as_str())
        .collect();
    let facts: Vec<&str> = out.facts.iter().map(|f| f.text.as_str()).collect();
    assert_eq!(singles, facts);
    assert_eq!(mock.call_count(TemplateName::MergeFacts), 1);
}

#[test]
fn exhausted_expansion_drops_the_claim() {
    let (_, gw) = gateway();
    let out = run_c2d(&gw, &claim("faint"), &C2dConfig::default()).unwrap();
    assert!(out.tuples.is_empty());
    assert!(out.dropped.unwrap().contains("fact expansion"));
    assert_eq!(out.stats.pair_gate.rejected, 3);
    assert_eq!(out.stats.pair_gate.checked, 3);
}

#[test]
fn expand_fact_signals_skip_after_attempts() {
    let (mock, gw) = gateway();
    let fact = AtomicFact {
        index: 0,
        text: "Around 900 spectators fainted during the open-air concert.".into(),
    };
    let mut stats = RejectionStats::default();
    let err = expand_fact(&gw, &fact, 3, &mut stats).unwrap_err();
    assert!(matches!(
        err,
        SynthError::Dropped {
            stage: Stage::FactExpansion,
            attempts: 3
        }
    ));
    assert_eq!(stats.pair_gate.rejected, 3);
    assert_eq!(mock.call_count(TemplateName::AtomicExpansion), 3);
}

#[test]
fn retry_then_pass_counts_one_rejection() {
    let mock = Arc::new(MockBackend::new());
    let fact = "The bridge opened in 1932.";
    let mut claim = Bindings::new();
    claim.insert("claim".into(), fact.into());
    mock.script_sequence(
        TemplateName::AtomicExpansion,
        &claim,
        vec![
            MockReply::Text("Sentence 1: The bridge opened in 1932.\nSentence 2: It spans a river.".into()),
            MockReply::Text("Sentence 1: The bridge opened four years after work began.\nSentence 2: Work began in 1928.".into()),
        ],
    );
    let ent = |source: &str, answer: &str| {
        let mut b = Bindings::new();
        b.insert("source".into(), source.into());
        b.insert("claim".into(), fact.into());
        mock.script(TemplateName::EntailmentCheck, &b, answer);
    };
    ent("The bridge opened in 1932. It spans a river.", "yes");
    ent("The bridge opened in 1932.", "yes");
    ent("The bridge opened four years after work began. Work began in 1928.", "yes");
    ent("The bridge opened four years after work began.", "no");
    ent("Work began in 1928.", "no");
    let gw = Gateway::from_arc(mock.clone());
    let mut stats = RejectionStats::default();
    let pair = expand_fact(&gw, &AtomicFact { index: 0, text: fact.into() }, 3, &mut stats).unwrap();
    assert_eq!(pair.second, "Work began in 1928.");
    assert_eq!((stats.pair_gate.rejected, stats.pair_gate.checked), (1, 2));
}

#[test]
fn redundant_candidate_is_discarded_and_document_retried() {
    let (_, gw) = gateway();
    let out = run_c2d(&gw, &claim("ferry"), &C2dConfig::default()).unwrap();
    let supporting = out.supporting.as_ref().unwrap();
    assert_eq!(supporting.gate_trace.len(), 2);
    assert!(!supporting.gate_trace[0].all_entailed());
    assert!(supporting.gate_trace[1].all_entailed());
    assert_eq!(supporting.gate_trace[1].checks.len(), 4);
    assert_eq!(out.stats.support_doc_gate.rejected, 1);
    assert_eq!(out.nonsupporting.len(), 3);
    assert_eq!(out.stats.nonsupport_discard.rejected, 1);
    assert_eq!(out.tuples.len(), 3 * 4);
    for t in &out.tuples {
        assert_eq!(t.label, rederive(t));
    }
}

#[test]
fn batch_is_ordered_and_worker_independent() {
    let (_, gw1) = gateway();
    let (_, gw8) = gateway();
    let a = c2d_batch(&gw1, &claims(), &C2dConfig::default(), 1);
    let b = c2d_batch(&gw8, &claims(), &C2dConfig::default(), 8);
    assert_eq!(a.tuples, b.tuples);
    assert_eq!(a.stats, b.stats);
    assert_eq!(a.tuples.len(), 27);
    assert_eq!(a.dropped.len(), 1);
    assert!(a.failed.is_empty());
    let ids: Vec<&str> = a.tuples.iter().map(|t| t.provenance.source_id()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
}

#[test]
fn simple_baseline_gives_two_tuples() {
    let (_, gw) = gateway();
    let tuples = run_c2d_simp(&gw, &claim("harbor")).unwrap();
    assert_eq!(tuples.len(), 2);
    assert_eq!(tuples[0].label, SupportLabel::Supported);
    assert_eq!(tuples[1].label, SupportLabel::Unsupported);
    assert!(matches!(
        &tuples[1].provenance,
        Provenance::C2dSimpRevision { revision_type, .. } if revision_type == "Number revision"
    ));
    assert!(tuples[1].doc.contains("6,000"));
}

#[test]
fn simple_baseline_rejects_bad_json() {
    let mock = Arc::new(MockBackend::new());
    let c = C2dClaim {
        id: "x".into(),
        claim: "A claim.".into(),
    };
    let mut b = Bindings::new();
    b.insert("claim".into(), c.claim.clone());
    mock.script(TemplateName::C2dSimpSupport, &b, "An article.");
    b.insert("article".into(), "An article.".into());
    mock.script(TemplateName::C2dSimpNonsupport, &b, "{\"revision_type\": \"Entity revision\"}");
    let gw = Gateway::from_arc(mock);
    assert!(matches!(run_c2d_simp(&gw, &c), Err(SynthError::Format { .. })));
}
