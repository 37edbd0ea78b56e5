use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Duration;

use groundfact_llm::Gateway;

use crate::{Checker, CheckerError, LexicalStub, LlmChecker, RemoteChecker};

/// A checker named on the command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckerSpec {
    Remote(String),
    Llm(String),
    Stub,
}

impl CheckerSpec {
    pub fn needs_gateway(&self) -> bool {
        matches!(self, CheckerSpec::Llm(_))
    }

    /// `gateway` is required for `llm:` checkers and ignored otherwise.
    pub fn build(&self, gateway: Option<Arc<Gateway>>, timeout: Duration) -> Result<Arc<dyn Checker>, CheckerError> {
        Ok(match self {
            CheckerSpec::Remote(url) => Arc::new(RemoteChecker::new(url.clone(), timeout)),
            CheckerSpec::Llm(model) => {
                let gw = gateway.ok_or_else(|| CheckerError::BadSpec(self.to_string()))?;
                Arc::new(LlmChecker::new(gw, model.clone()))
            }
            CheckerSpec::Stub => Arc::new(LexicalStub),
        })
    }
}

impl FromStr for CheckerSpec {
    type Err = CheckerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once(':') {
            None if s == "stub" => Ok(CheckerSpec::Stub),
            Some(("remote", url)) if !url.is_empty() => Ok(CheckerSpec::Remote(url.to_string())),
            Some(("llm", model)) if !model.is_empty() => Ok(CheckerSpec::Llm(model.to_string())),
            _ => Err(CheckerError::BadSpec(s.to_string())),
        }
    }
}

impl fmt::Display for CheckerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckerSpec::Remote(u) => write!(f, "remote:{u}"),
            CheckerSpec::Llm(m) => write!(f, "llm:{m}"),
            CheckerSpec::Stub => f.write_str("stub"),
        }
    }
}
