//! Task state backed by an append-only JSONL event log.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::report::{agreement_report, AgreementReport};
use crate::task::{Task, TaskSpec, Verdict};
use crate::AnnotateError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Event {
    Verdict {
        task: String,
        annotator: String,
        verdict: Verdict,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        elapsed_ms: Option<u64>,
        at: String,
    },
    Adjudication {
        task: String,
        adjudicator: String,
        verdict: Verdict,
        at: String,
    },
}

struct Inner {
    tasks: BTreeMap<String, Task>,
    log: File,
}

pub struct Store {
    inner: Mutex<Inner>,
    required: usize,
}

fn apply(tasks: &mut BTreeMap<String, Task>, event: &Event, required: usize) -> Result<(), AnnotateError> {
    match event {
        Event::Verdict {
            task,
            annotator,
            verdict,
            elapsed_ms,
            ..
        } => tasks
            .get_mut(task)
            .ok_or_else(|| AnnotateError::UnknownTask(task.clone()))?
            .submit(annotator, *verdict, *elapsed_ms, required),
        Event::Adjudication { task, verdict, .. } => tasks
            .get_mut(task)
            .ok_or_else(|| AnnotateError::UnknownTask(task.clone()))?
            .adjudicate(*verdict),
    }
}

fn read_lines(path: &Path) -> Result<Vec<(usize, String)>, AnnotateError> {
    let file = File::open(path).map_err(|source| AnnotateError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| AnnotateError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        if !line.trim().is_empty() {
            out.push((i + 1, line));
        }
    }
    Ok(out)
}

fn malformed(path: &Path, line: usize, message: impl ToString) -> AnnotateError {
    AnnotateError::Malformed {
        path: PathBuf::from(path),
        line,
        message: message.to_string(),
    }
}

pub fn load_tasks(path: &Path) -> Result<Vec<TaskSpec>, AnnotateError> {
    read_lines(path)?
        .into_iter()
        .map(|(n, line)| serde_json::from_str(&line).map_err(|e| malformed(path, n, e)))
        .collect()
}

impl Store {
    pub fn open(tasks: &Path, log: &Path, required: usize) -> Result<Self, AnnotateError> {
        Self::from_specs(load_tasks(tasks)?, log, required)
    }

    /// Builds the task table and replays any events already in `log`.
    pub fn from_specs(specs: Vec<TaskSpec>, log: &Path, required: usize) -> Result<Self, AnnotateError> {
        let mut tasks = BTreeMap::new();
        for spec in specs {
            let id = spec.id.clone();
            if tasks.insert(id.clone(), Task::new(spec)).is_some() {
                return Err(AnnotateError::DuplicateTask(id));
            }
        }
        if log.exists() {
            for (n, line) in read_lines(log)? {
                let event: Event = serde_json::from_str(&line).map_err(|e| malformed(log, n, e))?;
                apply(&mut tasks, &event, required).map_err(|e| malformed(log, n, e))?;
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(log)?;
        Ok(Self {
            inner: Mutex::new(Inner { tasks, log: file }),
            required,
        })
    }

    pub fn required(&self) -> usize {
        self.required
    }

    /// Validates `event` against a copy of its task, appends it to the log,
    /// and only then commits the new task state.
    pub fn record(&self, event: Event) -> Result<Task, AnnotateError> {
        let mut inner = self.inner.lock().unwrap();
        let id = match &event {
            Event::Verdict { task, .. } | Event::Adjudication { task, .. } => task.clone(),
        };
        let mut scratch = BTreeMap::new();
        let current = inner
            .tasks
            .get(&id)
            .ok_or_else(|| AnnotateError::UnknownTask(id.clone()))?
            .clone();
        scratch.insert(id.clone(), current);
        apply(&mut scratch, &event, self.required)?;
        let mut line = serde_json::to_string(&event).expect("event serializes");
        line.push('\n');
        inner.log.write_all(line.as_bytes())?;
        inner.log.sync_data()?;
        let updated = scratch.remove(&id).expect("task present");
        inner.tasks.insert(id, updated.clone());
        Ok(updated)
    }

    pub fn submit(
        &self,
        task: &str,
        annotator: &str,
        verdict: Verdict,
        elapsed_ms: Option<u64>,
    ) -> Result<Task, AnnotateError> {
        self.record(Event::Verdict {
            task: task.to_string(),
            annotator: annotator.to_string(),
            verdict,
            elapsed_ms,
            at: now(),
        })
    }

    pub fn adjudicate(&self, task: &str, adjudicator: &str, verdict: Verdict) -> Result<Task, AnnotateError> {
        self.record(Event::Adjudication {
            task: task.to_string(),
            adjudicator: adjudicator.to_string(),
            verdict,
            at: now(),
        })
    }

    pub fn task(&self, id: &str) -> Option<Task> {
        self.inner.lock().unwrap().tasks.get(id).cloned()
    }

    /// All tasks in id order.
    pub fn tasks(&self) -> Vec<Task> {
        self.inner.lock().unwrap().tasks.values().cloned().collect()
    }

    pub fn report(&self) -> Result<AgreementReport, AnnotateError> {
        let inner = self.inner.lock().unwrap();
        agreement_report(inner.tasks.values())
    }
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Status;
    use groundfact_core::SupportLabel;
    use Verdict::{Supported as S, Unsupported as U};

    fn specs() -> Vec<TaskSpec> {
        (1..=2)
            .map(|i| TaskSpec {
                id: format!("t{i}"),
                pipeline: "d2c".into(),
                document: "D".into(),
                claim: "C".into(),
                label: SupportLabel::Supported,
            })
            .collect()
    }

    #[test]
    fn replay_restores_state() {
        let dir = tempfile::tempdir().unwrap();
        let log = dir.path().join("events.jsonl");
        {
            let store = Store::from_specs(specs(), &log, 2).unwrap();
            store.submit("t1", "a", S, Some(1200)).unwrap();
            store.submit("t1", "b", U, None).unwrap();
            store.adjudicate("t1", "lead", S).unwrap();
            store.submit("t2", "a", U, None).unwrap();
            assert!(store.submit("t2", "a", S, None).is_err());
        }
        let lines = std::fs::read_to_string(&log).unwrap().lines().count();
        assert_eq!(lines, 4);
        let store = Store::from_specs(specs(), &log, 2).unwrap();
        let t1 = store.task("t1").unwrap();
        assert_eq!(t1.status(), Status::Resolved);
        assert_eq!(t1.resolved(), Some(S));
        assert_eq!(t1.verdicts()["a"].elapsed_ms, Some(1200));
        assert_eq!(store.task("t2").unwrap().verdict_of("a"), Some(U));
    }

    #[test]
    fn corrupt_log_names_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let log = dir.path().join("events.jsonl");
        std::fs::write(
            &log,
            "{\"type\":\"verdict\",\"task\":\"t1\",\"annotator\":\"a\",\"verdict\":\"supported\",\"at\":\"x\"}\n\
             {\"type\":\"adjudication\",\"task\":\"t1\",\"adjudicator\":\"z\",\"verdict\":\"supported\",\"at\":\"x\"}\n",
        )
        .unwrap();
        match Store::from_specs(specs(), &log, 2) {
            Err(AnnotateError::Malformed { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected malformed log, got {:?}", other.err()),
        }
    }

    #[test]
    fn duplicate_task_ids_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let mut s = specs();
        s.push(s[0].clone());
        assert!(matches!(
            Store::from_specs(s, &dir.path().join("e.jsonl"), 2),
            Err(AnnotateError::DuplicateTask(_))
        ));
    }
}
