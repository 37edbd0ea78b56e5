//! TOML gateway configuration.
//!
//! ```toml
//! backend = "http"            # or "mock"
//! base_url = "https://api.openai.com/v1"
//! api_key_env = "OPENAI_API_KEY"
//! max_in_flight = 8
//! timeout_secs = 120
//!
//! [retry]
//! max_attempts = 3
//! base_delay_ms = 500
//!
//! [routing]
//! default = "gpt-4-0125-preview"
//! merge-facts = "gpt-3.5-turbo-0125"
//!
//! [prices."gpt-4-0125-preview"]
//! prompt = 0.01
//! completion = 0.03
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::backend::Backend;
use crate::gateway::{Gateway, RetryPolicy, Routing, DEFAULT_MAX_IN_FLIGHT};
use crate::http::HttpBackend;
use crate::ledger::PriceTable;
use crate::mock::MockBackend;
use crate::template::TemplateName;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parsing gateway config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("routing key {0:?} is neither `default` nor a template name")]
    UnknownRoute(String),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    #[default]
    Http,
    Mock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RetryConfig {
    #[serde(default = "default_attempts")]
    pub max_attempts: u32,
    #[serde(default = "default_delay_ms")]
    pub base_delay_ms: u64,
}

impl Default for RetryConfig {
    fn default() -> Self {
        Self {
            max_attempts: default_attempts(),
            base_delay_ms: default_delay_ms(),
        }
    }
}

fn default_attempts() -> u32 {
    3
}

fn default_delay_ms() -> u64 {
    500
}

fn default_key_env() -> String {
    "OPENAI_API_KEY".into()
}

fn default_base_url() -> String {
    "https://api.openai.com/v1".into()
}

fn default_in_flight() -> usize {
    DEFAULT_MAX_IN_FLIGHT
}

fn default_timeout() -> u64 {
    120
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GatewayConfig {
    #[serde(default)]
    pub backend: BackendKind,
    /// JSONL fixture file for the mock backend.
    #[serde(default)]
    pub fixtures: Option<PathBuf>,
    #[serde(default = "default_base_url")]
    pub base_url: String,
    #[serde(default = "default_key_env")]
    pub api_key_env: String,
    #[serde(default = "default_in_flight")]
    pub max_in_flight: usize,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
    #[serde(default)]
    pub retry: RetryConfig,
    #[serde(default)]
    pub routing: BTreeMap<String, String>,
    #[serde(default)]
    pub prices: PriceTable,
}

impl Default for GatewayConfig {
    fn default() -> Self {
        toml::from_str("").expect("empty config uses defaults")
    }
}

impl GatewayConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: GatewayConfig = toml::from_str(text)?;
        cfg.routing()?;
        if cfg.max_in_flight == 0 {
            return Err(ConfigError::Invalid("max_in_flight must be at least 1".into()));
        }
        if cfg.retry.max_attempts == 0 {
            return Err(ConfigError::Invalid("retry.max_attempts must be at least 1".into()));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = Self::from_toml(&text)?;
        if let (Some(fx), Some(dir)) = (&cfg.fixtures, path.parent()) {
            if fx.is_relative() {
                cfg.fixtures = Some(dir.join(fx));
            }
        }
        Ok(cfg)
    }

    pub fn routing(&self) -> Result<Routing, ConfigError> {
        let mut routing = Routing::default();
        for (key, model) in &self.routing {
            if key == "default" {
                routing.default_model = model.clone();
            } else {
                let name: TemplateName = key.parse().map_err(|_| ConfigError::UnknownRoute(key.clone()))?;
                routing.overrides.insert(name, model.clone());
            }
        }
        Ok(routing)
    }

    pub fn retry_policy(&self) -> RetryPolicy {
        RetryPolicy {
            max_attempts: self.retry.max_attempts,
            base_delay: Duration::from_millis(self.retry.base_delay_ms),
        }
    }

    /// Short sha256 of the canonical JSON form, for run manifests.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&canonical).as_slice())[..16].to_string()
    }

    pub fn backend(&self) -> Result<Arc<dyn Backend>, ConfigError> {
        match self.backend {
            BackendKind::Mock => {
                let path = self
                    .fixtures
                    .as_ref()
                    .ok_or_else(|| ConfigError::Invalid("mock backend needs `fixtures`".into()))?;
                let mock = MockBackend::from_file(path).map_err(ConfigError::Invalid)?;
                Ok(Arc::new(mock))
            }
            BackendKind::Http => {
                let key = std::env::var(&self.api_key_env).ok();
                Ok(Arc::new(HttpBackend::new(
                    &self.base_url,
                    key,
                    Duration::from_secs(self.timeout_secs),
                )))
            }
        }
    }

    pub fn build(&self) -> Result<Gateway, ConfigError> {
        self.build_with(self.backend()?)
    }

    /// Applies routing, retry and concurrency settings to a caller-supplied backend.
    pub fn build_with(&self, backend: Arc<dyn Backend>) -> Result<Gateway, ConfigError> {
        Ok(Gateway::from_arc(backend)
            .with_routing(self.routing()?)
            .with_retry(self.retry_policy())
            .with_max_in_flight(self.max_in_flight))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gateway::{DEFAULT_MODEL, LIGHT_MODEL};

    #[test]
    fn empty_config_defaults() {
        let cfg = GatewayConfig::default();
        assert_eq!(cfg.backend, BackendKind::Http);
        assert_eq!(cfg.api_key_env, "OPENAI_API_KEY");
        assert_eq!(cfg.max_in_flight, 8);
        assert_eq!(cfg.retry.max_attempts, 3);
        assert_eq!(cfg.routing().unwrap(), Routing::default());
    }

    #[test]
    fn routing_overrides() {
        let cfg = GatewayConfig::from_toml(
            r#"
            [routing]
            default = "local"
            entailment-check = "judge"
            "#,
        )
        .unwrap();
        let r = cfg.routing().unwrap();
        assert_eq!(r.model_for(TemplateName::EntailmentCheck), "judge");
        assert_eq!(r.model_for(TemplateName::PassageGen), "local");
        assert_eq!(r.model_for(TemplateName::MergeFacts), LIGHT_MODEL);
        assert_ne!(r.default_model, DEFAULT_MODEL);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(matches!(
            GatewayConfig::from_toml("[routing]\nbogus = \"m\""),
            Err(ConfigError::UnknownRoute(_))
        ));
        assert!(GatewayConfig::from_toml("max_in_flight = 0").is_err());
        assert!(GatewayConfig::from_toml("surprise = 1").is_err());
    }

    #[test]
    fn digest_tracks_content() {
        let a = GatewayConfig::default();
        let b = GatewayConfig::from_toml("max_in_flight = 2").unwrap();
        assert_eq!(a.digest(), GatewayConfig::default().digest());
        assert_ne!(a.digest(), b.digest());
    }

    #[test]
    fn mock_backend_from_relative_fixture() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("fx.jsonl"),
            r#"{"template": "entailment-check", "bindings": {"source": "s", "claim": "c"}, "response": "yes"}"#,
        )
        .unwrap();
        let path = dir.path().join("gw.toml");
        std::fs::write(&path, "backend = \"mock\"\nfixtures = \"fx.jsonl\"\n").unwrap();
        let gw = GatewayConfig::load(&path).unwrap().build().unwrap();
        let req = crate::LlmRequest::new(TemplateName::EntailmentCheck)
            .bind("source", "s")
            .bind("claim", "c");
        assert_eq!(gw.complete(&req).unwrap(), "yes");
        assert!(gw.backend_identity().starts_with("mock:"));
    }
}
