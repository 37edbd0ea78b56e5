//! Normalizing raw benchmark rows and describing the result.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use groundfact_core::text::word_count;
use groundfact_core::{IngestRow, UnsplitRecord};
use serde::{Deserialize, Serialize};

use crate::datasets::sort_datasets;
use crate::io::read_jsonl;
use crate::BenchError;

fn schema(path: &Path, line: usize, message: impl ToString) -> BenchError {
    BenchError::Schema {
        path: PathBuf::from(path),
        line,
        message: message.to_string(),
    }
}

/// Reads raw rows from every input, unifies their labels and rejects
/// duplicate ids. `dataset` applies to rows that do not name their own.
pub fn ingest(inputs: &[PathBuf], dataset: Option<&str>) -> Result<Vec<UnsplitRecord>, BenchError> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for path in inputs {
        for (line, row) in read_jsonl::<IngestRow>(path)? {
            let fallback = match (&row.dataset, dataset) {
                (Some(_), _) => "",
                (None, Some(d)) => d,
                (None, None) => return Err(schema(path, line, "row has no dataset and --dataset was not given")),
            };
            let rec = row.normalize(fallback).map_err(|e| schema(path, line, e))?;
            if !seen.insert(rec.grounded.id.clone()) {
                return Err(schema(path, line, format!("duplicate id {:?}", rec.grounded.id)));
            }
            out.push(rec);
        }
    }
    if out.is_empty() {
        return Err(BenchError::Data("no records in input".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub dataset: String,
    pub size: usize,
    /// Words over all evidence documents of a record, averaged over records.
    pub mean_doc_words: f64,
    pub mean_claim_words: f64,
    pub negative_pct: f64,
}

pub fn stats(records: &[UnsplitRecord]) -> Vec<DatasetStats> {
    let mut groups: BTreeMap<&str, Vec<&UnsplitRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(&r.dataset).or_default().push(r);
    }
    let mut names: Vec<&str> = groups.keys().copied().collect();
    sort_datasets(&mut names);
    names
        .into_iter()
        .map(|name| {
            let g = &groups[name];
            let n = g.len() as f64;
            let doc_words: usize = g
                .iter()
                .map(|r| r.grounded.evidence.iter().map(|d| word_count(&d.text)).sum::<usize>())
                .sum();
            let claim_words: usize = g.iter().map(|r| word_count(&r.grounded.text)).sum();
            let negatives = g.iter().filter(|r| !r.gold.is_supported()).count();
            DatasetStats {
                dataset: name.to_string(),
                size: g.len(),
                mean_doc_words: doc_words as f64 / n,
                mean_claim_words: claim_words as f64 / n,
                negative_pct: 100.0 * negatives as f64 / n,
            }
        })
        .collect()
}

fn pct(v: f64) -> String {
    if (v - v.round()).abs() < 1e-9 {
        format!("{v:.0}%")
    } else {
        format!("{v:.1}%")
    }
}

pub fn render_stats(stats: &[DatasetStats]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<18} {:>6} {:>11} {:>12} {:>9}",
        "Dataset", "Size", "Doc. Words", "Claim Words", "% of Neg"
    );
    for s in stats {
        let _ = writeln!(
            out,
            "{:<18} {:>6} {:>11.1} {:>12.1} {:>9}",
            s.dataset,
            s.size,
            s.mean_doc_words,
            s.mean_claim_words,
            pct(s.negative_pct)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, lines: &[&str]) -> PathBuf {
        let p = dir.join(name);
        std::fs::write(&p, lines.join("\n")).unwrap();
        p
    }

    #[test]
    fn four_records_one_negative() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            dir.path(),
            "raw.jsonl",
            &[
                r#"{"id":"1","query_group":"a","claim":"A b c.","docs":["One two three four."],"raw_label":"supported"}"#,
                r#"{"id":"2","query_group":"b","claim":"A b.","docs":["One two.", "Three four."],"raw_label":"complete"}"#,
                r#"{"id":"3","query_group":"c","claim":"A.","docs":["One two three four."],"raw_label":"fully attributable"}"#,
                r#"{"id":"4","query_group":"d","claim":"A b c d e f.","docs":["One two three four."],"raw_label":"refute"}"#,
            ],
        );
        let recs = ingest(&[p], Some("Toy")).unwrap();
        let s = stats(&recs);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].size, 4);
        assert_eq!(s[0].negative_pct, 25.0);
        assert_eq!(s[0].mean_doc_words, 4.0);
        assert_eq!(s[0].mean_claim_words, 3.0);
        assert!(render_stats(&s).contains(" 25%"));
    }

    #[test]
    fn missing_docs_reports_its_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            dir.path(),
            "raw.jsonl",
            &[
                r#"{"id":"1","query_group":"a","claim":"A.","docs":["D."],"raw_label":"supported"}"#,
                "",
                r#"{"id":"2","query_group":"b","claim":"B.","raw_label":"supported"}"#,
            ],
        );
        match ingest(&[p], Some("Toy")) {
            Err(BenchError::Schema { line, message, .. }) => {
                assert_eq!(line, 3);
                assert!(message.contains("docs"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn three_way_labels_collapse() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            dir.path(),
            "wice.jsonl",
            &[
                r#"{"id":"1","query_group":"a","claim":"A.","docs":["D."],"raw_label":"supported"}"#,
                r#"{"id":"2","query_group":"b","claim":"B.","docs":["D."],"raw_label":"partially-supported"}"#,
                r#"{"id":"3","query_group":"c","claim":"C.","docs":["D."],"raw_label":"non-supported"}"#,
            ],
        );
        let labels: Vec<u8> = ingest(&[p], Some("Wice")).unwrap().iter().map(|r| r.gold.as_u8()).collect();
        assert_eq!(labels, [1, 0, 0]);
    }

    #[test]
    fn rejects_unknown_labels_and_duplicates() {
        let dir = tempfile::tempdir().unwrap();
        let bad = write(
            dir.path(),
            "bad.jsonl",
            &[r#"{"id":"1","query_group":"a","claim":"A.","docs":["D."],"raw_label":"totally-legit"}"#],
        );
        assert!(matches!(ingest(&[bad], Some("X")), Err(BenchError::Schema { line: 1, .. })));
        let row = r#"{"id":"1","query_group":"a","claim":"A.","docs":["D."],"raw_label":"supported"}"#;
        let dup = write(dir.path(), "dup.jsonl", &[row, row]);
        assert!(matches!(ingest(&[dup], Some("X")), Err(BenchError::Schema { line: 2, .. })));
        let nodata = write(dir.path(), "nodata.jsonl", &[row]);
        assert!(ingest(&[nodata], None).is_err());
    }
}
