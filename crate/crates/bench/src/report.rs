//! Human-readable results table: one row per run, one column per dataset
//! plus the average.

use std::fmt::Write as _;

use crate::datasets::sort_datasets;
use crate::eval::EvalReport;

/// `runs` pairs a row label with its report. A `*` marks a dataset where the
/// run is not significantly worse than the champion it was compared with.
pub fn render_table(runs: &[(String, &EvalReport)]) -> String {
    let mut names: Vec<String> = Vec::new();
    for (_, r) in runs {
        for d in &r.datasets {
            if !names.contains(&d.dataset) {
                names.push(d.dataset.clone());
            }
        }
    }
    sort_datasets(&mut names);
    let label_width = runs.iter().map(|(l, _)| l.len() + 14).max().unwrap_or(5).max(5);
    let width = names.iter().map(|n| n.len()).max().unwrap_or(0).max(7);

    let mut out = String::new();
    let _ = write!(out, "{:<label_width$}", "Model");
    for n in &names {
        let _ = write!(out, " {n:>width$}");
    }
    let _ = writeln!(out, " {:>width$}", "Avg");

    for (label, r) in runs {
        let _ = write!(out, "{label:<label_width$}");
        for n in &names {
            let cell = match r.dataset(n) {
                Some(d) => {
                    let mark = match &d.bootstrap {
                        Some(b) if !b.significant => "*",
                        _ => "",
                    };
                    format!("{:.1}{mark}", d.bacc * 100.0)
                }
                None => "-".into(),
            };
            let _ = write!(out, " {cell:>width$}");
        }
        let _ = writeln!(out, " {:>width$.1}", r.average_bacc * 100.0);

        if r.decompose {
            let _ = write!(out, "{:<label_width$}", format!("{label} decomp. delta"));
            for n in &names {
                let cell = r
                    .dataset(n)
                    .and_then(|d| d.decompose_delta)
                    .map(|v| format!("{:+.1}", v * 100.0))
                    .unwrap_or_else(|| "-".into());
                let _ = write!(out, " {cell:>width$}");
            }
            let avg = r.plain_average_bacc.map(|p| format!("{:+.1}", (r.average_bacc - p) * 100.0));
            let _ = writeln!(out, " {:>width$}", avg.unwrap_or_else(|| "-".into()));
        }
        if r.decontextualize {
            let _ = write!(out, "{:<label_width$}", format!("{label} rewritten %"));
            for n in &names {
                let cell = r
                    .dataset(n)
                    .and_then(|d| d.rewritten_fraction)
                    .map(|v| format!("{:.0}", v * 100.0))
                    .unwrap_or_else(|| "-".into());
                let _ = write!(out, " {cell:>width$}");
            }
            let _ = writeln!(out, " {:>width$}", "");
        }
    }
    out
}
