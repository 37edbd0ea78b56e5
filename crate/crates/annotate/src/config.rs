//! Service configuration.
//!
//! ```toml
//! tasks = "tasks.jsonl"
//! log = "events.jsonl"
//! annotators_per_task = 3
//! static_dir = "ui/dist"
//!
//! [tokens]
//! "s3cret-a" = { name = "ann-a", role = "annotator" }
//! "s3cret-z" = { name = "lead", role = "adjudicator" }
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::AnnotateError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Annotator,
    Adjudicator,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TokenEntry {
    pub name: String,
    pub role: Role,
}

fn default_per_task() -> usize {
    3
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnotateConfig {
    /// JSONL file of [`crate::TaskSpec`].
    pub tasks: PathBuf,
    /// Append-only event log; created when missing.
    pub log: PathBuf,
    #[serde(default = "default_per_task")]
    pub annotators_per_task: usize,
    #[serde(default)]
    pub static_dir: Option<PathBuf>,
    /// Bearer token to identity.
    pub tokens: BTreeMap<String, TokenEntry>,
}

impl AnnotateConfig {
    pub fn from_toml(text: &str) -> Result<Self, AnnotateError> {
        let cfg: AnnotateConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Relative paths resolve against the config file's directory.
    pub fn load(path: &Path) -> Result<Self, AnnotateError> {
        let text = std::fs::read_to_string(path).map_err(|source| AnnotateError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = Self::from_toml(&text)?;
        if let Some(dir) = path.parent() {
            let resolve = |p: &mut PathBuf| {
                if p.is_relative() {
                    *p = dir.join(&*p);
                }
            };
            resolve(&mut cfg.tasks);
            resolve(&mut cfg.log);
            if let Some(s) = cfg.static_dir.as_mut() {
                resolve(s);
            }
        }
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), AnnotateError> {
        if self.annotators_per_task < 2 {
            return Err(AnnotateError::InvalidConfig(
                "annotators_per_task must be at least 2".into(),
            ));
        }
        let mut names = std::collections::BTreeSet::new();
        for entry in self.tokens.values() {
            if !names.insert(&entry.name) {
                return Err(AnnotateError::InvalidConfig(format!(
                    "name {:?} is bound to more than one token",
                    entry.name
                )));
            }
        }
        let annotators = self.tokens.values().filter(|e| e.role == Role::Annotator).count();
        if annotators < self.annotators_per_task {
            return Err(AnnotateError::InvalidConfig(format!(
                "{annotators} annotator token(s) cannot fill {} verdicts per task",
                self.annotators_per_task
            )));
        }
        Ok(())
    }

    pub fn identity(&self, token: &str) -> Option<&TokenEntry> {
        self.tokens.get(token)
    }
}
