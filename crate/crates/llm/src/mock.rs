//! Scripted backend keyed by (template name, binding digest).
//!
//! Fixture files are JSON lines. Each line names a template and either its
//! bindings (digested on load) or a precomputed digest, plus one `response`
//! or a `responses` sequence:
//!
//! ```text
//! {"template": "entailment-check", "bindings": {"source": "...", "claim": "..."}, "response": "yes"}
//! {"template": "atomic-expansion", "digest": "0f3a...", "responses": [{"status": 503}, "Sentence 1: ..."]}
//! ```
//!
//! Sequences are consumed one entry per call and the last entry repeats once
//! the sequence is exhausted.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::backend::{Backend, BackendError, Dispatch};
use crate::template::{binding_digest, Bindings, TemplateName};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MockReply {
    Text(String),
    Failure {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        error: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        status: Option<u16>,
    },
}

impl MockReply {
    pub fn transport(msg: &str) -> Self {
        MockReply::Failure {
            error: Some(msg.to_string()),
            status: None,
        }
    }

    pub fn status(code: u16) -> Self {
        MockReply::Failure {
            error: None,
            status: Some(code),
        }
    }

    fn resolve(&self) -> Result<String, BackendError> {
        match self {
            MockReply::Text(t) => Ok(t.clone()),
            MockReply::Failure { status: Some(code), error } => Err(BackendError::Status {
                status: *code,
                body: error.clone().unwrap_or_default(),
            }),
            MockReply::Failure { error, status: None } => {
                Err(BackendError::Transport(error.clone().unwrap_or_else(|| "scripted failure".into())))
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FixtureLine {
    template: TemplateName,
    #[serde(default)]
    bindings: Option<Bindings>,
    #[serde(default)]
    digest: Option<String>,
    #[serde(default)]
    response: Option<MockReply>,
    #[serde(default)]
    responses: Option<Vec<MockReply>>,
}

#[derive(Debug, Default)]
struct Script {
    replies: Vec<MockReply>,
    served: usize,
}

type Key = (TemplateName, String);

#[derive(Debug, Default)]
pub struct MockBackend {
    scripts: Mutex<HashMap<Key, Script>>,
    calls: Mutex<Vec<Key>>,
}

impl MockBackend {
    pub fn new() -> Self {
        Self::default()
    }

    /// Scripts a single reply for the template and bindings.
    pub fn script(&self, template: TemplateName, bindings: &Bindings, reply: impl Into<String>) -> &Self {
        self.script_sequence(template, bindings, vec![MockReply::Text(reply.into())])
    }

    pub fn script_sequence(&self, template: TemplateName, bindings: &Bindings, replies: Vec<MockReply>) -> &Self {
        self.script_digest(template, binding_digest(bindings), replies)
    }

    pub fn script_digest(&self, template: TemplateName, digest: String, replies: Vec<MockReply>) -> &Self {
        assert!(!replies.is_empty(), "a mock script needs at least one reply");
        let mut scripts = self.scripts.lock().unwrap();
        scripts.insert((template, digest), Script { replies, served: 0 });
        self
    }

    pub fn from_jsonl(text: &str) -> Result<Self, String> {
        let mock = MockBackend::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fx: FixtureLine = serde_json::from_str(line).map_err(|e| format!("fixture line {}: {e}", n + 1))?;
            let digest = match (&fx.bindings, fx.digest) {
                (Some(b), None) => binding_digest(b),
                (None, Some(d)) => d,
                _ => return Err(format!("fixture line {}: give exactly one of `bindings` or `digest`", n + 1)),
            };
            let replies = match (fx.response, fx.responses) {
                (Some(r), None) => vec![r],
                (None, Some(rs)) if !rs.is_empty() => rs,
                _ => {
                    return Err(format!(
                        "fixture line {}: give exactly one of `response` or a non-empty `responses`",
                        n + 1
                    ))
                }
            };
            mock.script_digest(fx.template, digest, replies);
        }
        Ok(mock)
    }

    pub fn from_file(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::from_jsonl(&text)
    }

    /// Every (template, digest) pair dispatched so far, in call order.
    pub fn calls(&self) -> Vec<(TemplateName, String)> {
        self.calls.lock().unwrap().clone()
    }

    pub fn call_count(&self, template: TemplateName) -> usize {
        self.calls.lock().unwrap().iter().filter(|(t, _)| *t == template).count()
    }

    fn fixture_digest(&self) -> String {
        let scripts = self.scripts.lock().unwrap();
        let ordered: BTreeMap<(String, &String), &Vec<MockReply>> = scripts
            .iter()
            .map(|((t, d), s)| ((t.as_str().to_string(), d), &s.replies))
            .collect();
        let mut hasher = Sha256::new();
        for ((t, d), replies) in ordered {
            hasher.update(t.as_bytes());
            hasher.update(d.as_bytes());
            hasher.update(serde_json::to_vec(replies).unwrap_or_default());
        }
        hex::encode(hasher.finalize().as_slice())[..16].to_string()
    }
}

impl Backend for MockBackend {
    fn identity(&self) -> String {
        format!("mock:{}", self.fixture_digest())
    }

    fn send(&self, call: &Dispatch<'_>) -> Result<String, BackendError> {
        let key = (call.template, call.digest.to_string());
        self.calls.lock().unwrap().push(key.clone());
        let mut scripts = self.scripts.lock().unwrap();
        let script = scripts.get_mut(&key).ok_or_else(|| BackendError::FixtureMissing {
            template: call.template,
            digest: call.digest.to_string(),
        })?;
        let idx = script.served.min(script.replies.len() - 1);
        script.served += 1;
        script.replies[idx].resolve()
    }
}
