//! Run manifests: what was run, on which inputs, producing which bytes.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::io::{file_digest, sibling, write_file};
use crate::BenchError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: Vec<String>,
    pub config_digest: String,
    pub seeds: BTreeMap<String, u64>,
    pub backend: Option<String>,
    /// Directory the command ran in; relative paths below resolve against it.
    #[serde(default)]
    pub workdir: PathBuf,
    pub started_at: String,
    pub finished_at: String,
    /// sha256 of every input file, keyed by path as given.
    pub inputs: BTreeMap<String, String>,
    /// sha256 of every output file, keyed by path as written.
    pub outputs: BTreeMap<String, String>,
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

impl RunManifest {
    pub fn start(command: Vec<String>, config_digest: impl Into<String>) -> Self {
        Self {
            command,
            config_digest: config_digest.into(),
            seeds: BTreeMap::new(),
            backend: None,
            workdir: std::env::current_dir().unwrap_or_default(),
            started_at: now(),
            finished_at: String::new(),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
        }
    }

    pub fn seed(mut self, name: &str, value: u64) -> Self {
        self.seeds.insert(name.to_string(), value);
        self
    }

    pub fn backend(mut self, identity: Option<String>) -> Self {
        self.backend = identity;
        self
    }

    pub fn input(&mut self, path: &Path) -> Result<(), BenchError> {
        self.inputs
            .insert(path.display().to_string(), file_digest(path)?);
        Ok(())
    }

    /// Digests `outputs` and writes the manifest next to the first of them
    /// as `<name>.manifest.json`.
    pub fn finish(mut self, outputs: &[&Path]) -> Result<PathBuf, BenchError> {
        let primary = outputs.first().ok_or_else(|| BenchError::Usage("manifest without outputs".into()))?;
        for p in outputs {
            self.outputs.insert(p.display().to_string(), file_digest(p)?);
        }
        self.finished_at = now();
        let path = sibling(primary, ".manifest.json");
        let mut text = serde_json::to_string_pretty(&self).expect("manifest serializes");
        text.push('\n');
        write_file(&path, text.as_bytes())?;
        Ok(path)
    }

    pub fn load(path: &Path) -> Result<Self, BenchError> {
        let text = crate::io::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| BenchError::Schema {
            path: path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        })
    }

    /// Paths whose current digest differs from the recorded one.
    pub fn stale_files(&self) -> Vec<String> {
        self.inputs
            .iter()
            .chain(self.outputs.iter())
            .filter(|(p, digest)| file_digest(&self.workdir.join(p)).ok().as_ref() != Some(*digest))
            .map(|(p, _)| p.clone())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digests_are_recomputable() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("in.jsonl");
        let out = dir.path().join("out.json");
        std::fs::write(&input, "a\n").unwrap();
        std::fs::write(&out, "b\n").unwrap();
        let mut m = RunManifest::start(vec!["groundfact".into(), "eval".into()], "abc").seed("split", 7);
        m.input(&input).unwrap();
        let path = m.finish(&[&out]).unwrap();
        assert!(path.ends_with("out.json.manifest.json"));
        let loaded = RunManifest::load(&path).unwrap();
        assert!(loaded.stale_files().is_empty());
        assert_eq!(loaded.seeds["split"], 7);
        std::fs::write(&out, "changed\n").unwrap();
        assert_eq!(loaded.stale_files(), [out.display().to_string()]);
    }
}
