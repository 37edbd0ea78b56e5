use thiserror::Error;

use crate::template::TemplateName;

/// A fully rendered call, as handed to a backend.
#[derive(Debug, Clone, Copy)]
pub struct Dispatch<'a> {
    pub request_id: u64,
    pub template: TemplateName,
    pub digest: &'a str,
    pub model: &'a str,
    pub prompt: &'a str,
    pub temperature: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BackendError {
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("malformed backend response: {0}")]
    Protocol(String),
    #[error("no fixture scripted for template {template} with binding digest {digest}")]
    FixtureMissing { template: TemplateName, digest: String },
}

impl BackendError {
    /// Transport failures and 5xx responses are retried; everything else is not.
    pub fn is_retryable(&self) -> bool {
        match self {
            BackendError::Transport(_) => true,
            BackendError::Status { status, .. } => *status >= 500,
            BackendError::Protocol(_) | BackendError::FixtureMissing { .. } => false,
        }
    }
}

pub trait Backend: Send + Sync {
    /// Stable description recorded in run manifests.
    fn identity(&self) -> String;

    fn send(&self, call: &Dispatch<'_>) -> Result<String, BackendError>;
}

impl<B: Backend + ?Sized> Backend for std::sync::Arc<B> {
    fn identity(&self) -> String {
        (**self).identity()
    }

    fn send(&self, call: &Dispatch<'_>) -> Result<String, BackendError> {
        (**self).send(call)
    }
}
