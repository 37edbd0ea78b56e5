//! Live chat-completions backend.

use std::time::Duration;

use serde_json::{json, Value};

use crate::backend::{Backend, BackendError, Dispatch};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(120);

pub struct HttpBackend {
    agent: ureq::Agent,
    endpoint: String,
    api_key: Option<String>,
}

impl HttpBackend {
    /// `base_url` is the API root; requests go to `{base_url}/chat/completions`.
    pub fn new(base_url: &str, api_key: Option<String>, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        Self {
            agent,
            endpoint: format!("{}/chat/completions", base_url.trim_end_matches('/')),
            api_key,
        }
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }
}

fn content_of(body: &Value) -> Option<&str> {
    body.get("choices")?.get(0)?.get("message")?.get("content")?.as_str()
}

impl Backend for HttpBackend {
    fn identity(&self) -> String {
        format!("http:{}", self.endpoint)
    }

    fn send(&self, call: &Dispatch<'_>) -> Result<String, BackendError> {
        let payload = json!({
            "model": call.model,
            "messages": [{"role": "user", "content": call.prompt}],
            "temperature": call.temperature,
        });
        let mut req = self.agent.post(&self.endpoint);
        if let Some(key) = &self.api_key {
            req = req.header("Authorization", format!("Bearer {key}"));
        }
        let mut resp = req
            .send_json(&payload)
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        let status = resp.status().as_u16();
        let text = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        if !(200..300).contains(&status) {
            return Err(BackendError::Status { status, body: text });
        }
        let body: Value = serde_json::from_str(&text).map_err(|e| BackendError::Protocol(e.to_string()))?;
        content_of(&body)
            .map(str::to_string)
            .ok_or_else(|| BackendError::Protocol("response has no choices[0].message.content".into()))
    }
}
