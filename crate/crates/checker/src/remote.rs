use std::time::Duration;

use serde::Deserialize;
use serde_json::json;

use crate::{Checker, CheckerError, CheckerOutput, ScoreRange};

/// Client for a checker served over HTTP: `POST {"doc", "claim"}` answered
/// with `{"score", "v_min", "v_max"}`.
pub struct RemoteChecker {
    agent: ureq::Agent,
    url: String,
}

#[derive(Deserialize)]
struct Reply {
    score: f64,
    v_min: f64,
    v_max: f64,
}

impl RemoteChecker {
    pub fn new(url: impl Into<String>, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        Self { agent, url: url.into() }
    }
}

impl Checker for RemoteChecker {
    fn identity(&self) -> String {
        format!("remote:{}", self.url)
    }

    fn score(&self, chunk: &str, claim: &str) -> Result<CheckerOutput, CheckerError> {
        let mut resp = self
            .agent
            .post(&self.url)
            .send_json(json!({"doc": chunk, "claim": claim}))
            .map_err(|e| CheckerError::Transport(e.to_string()))?;
        let status = resp.status().as_u16();
        let body = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| CheckerError::Transport(e.to_string()))?;
        if !(200..300).contains(&status) {
            return Err(CheckerError::Status { status, body });
        }
        let reply: Reply = serde_json::from_str(&body).map_err(|e| CheckerError::Protocol(e.to_string()))?;
        CheckerOutput::new(reply.score, ScoreRange::new(reply.v_min, reply.v_max)?)
    }
}
