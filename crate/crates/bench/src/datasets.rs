//! Canonical dataset ordering for human-readable tables.

/// Column order of the results table; any other dataset follows these,
/// alphabetically.
pub const TABLE_ORDER: [&str; 10] = [
    "AggreFact-CNN",
    "AggreFact-XSum",
    "TofuEval-MediaS",
    "TofuEval-MeetB",
    "Wice",
    "Reveal",
    "ClaimVerify",
    "FactCheck-GPT",
    "ExpertQA",
    "Lfqa",
];

fn rank(name: &str) -> usize {
    TABLE_ORDER
        .iter()
        .position(|d| d.eq_ignore_ascii_case(name))
        .unwrap_or(TABLE_ORDER.len())
}

pub fn sort_datasets<S: AsRef<str>>(names: &mut [S]) {
    names.sort_by(|a, b| {
        let (a, b) = (a.as_ref(), b.as_ref());
        rank(a).cmp(&rank(b)).then_with(|| a.cmp(b))
    });
}
