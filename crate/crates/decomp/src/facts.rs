use std::fmt;

use serde::{Deserialize, Serialize};

use crate::DecompError;

/// Largest claim the power-set step will accept (255 subsets).
pub const DEFAULT_ATOM_CAP: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomicFact {
    /// Zero-based position in the parent claim's fact list.
    pub index: usize,
    pub text: String,
}

impl AtomicFact {
    pub fn list<S: Into<String>>(texts: impl IntoIterator<Item = S>) -> Vec<AtomicFact> {
        texts
            .into_iter()
            .enumerate()
            .map(|(index, t)| AtomicFact { index, text: t.into() })
            .collect()
    }
}

/// A non-empty, sorted set of zero-based fact indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct FactSubset(Vec<usize>);

impl FactSubset {
    pub fn new(mut members: Vec<usize>, fact_count: usize) -> Result<Self, DecompError> {
        members.sort_unstable();
        members.dedup();
        if members.is_empty() {
            return Err(DecompError::InvalidSubset("subset is empty".into()));
        }
        if let Some(&bad) = members.iter().find(|&&i| i >= fact_count) {
            return Err(DecompError::InvalidSubset(format!(
                "index {bad} out of range for {fact_count} facts"
            )));
        }
        Ok(FactSubset(members))
    }

    pub fn members(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, index: usize) -> bool {
        self.0.binary_search(&index).is_ok()
    }

    pub fn texts<'a>(&self, facts: &'a [AtomicFact]) -> Vec<&'a str> {
        self.0.iter().map(|&i| facts[i].text.as_str()).collect()
    }
}

impl TryFrom<Vec<usize>> for FactSubset {
    type Error = String;

    fn try_from(v: Vec<usize>) -> Result<Self, Self::Error> {
        FactSubset::new(v, usize::MAX).map_err(|e| e.to_string())
    }
}

impl From<FactSubset> for Vec<usize> {
    fn from(s: FactSubset) -> Self {
        s.0
    }
}

/// Written with one-based indices, e.g. `{1,3}`.
impl fmt::Display for FactSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inner: Vec<String> = self.0.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "{{{}}}", inner.join(","))
    }
}

/// All non-empty subsets, ordered by size and then lexicographically.
pub fn power_set(facts: &[AtomicFact], cap: usize) -> Result<Vec<FactSubset>, DecompError> {
    let l = facts.len();
    if l == 0 {
        return Err(DecompError::InvalidSubset("no facts to enumerate".into()));
    }
    if l > cap {
        return Err(DecompError::TooManyAtoms { count: l, cap });
    }
    let mut out = Vec::with_capacity((1usize << l) - 1);
    for size in 1..=l {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            out.push(FactSubset(combo.clone()));
            let Some(pos) = (0..size).rev().find(|&p| combo[p] < l - size + p) else { break };
            combo[pos] += 1;
            for q in pos + 1..size {
                combo[q] = combo[q - 1] + 1;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn facts(n: usize) -> Vec<AtomicFact> {
        AtomicFact::list((0..n).map(|i| format!("fact {i}.")))
    }

    #[test]
    fn small_sets() {
        let two: Vec<String> = power_set(&facts(2), 8).unwrap().iter().map(|s| s.to_string()).collect();
        assert_eq!(two, ["{1}", "{2}", "{1,2}"]);
        let three: Vec<String> = power_set(&facts(3), 8).unwrap().iter().map(|s| s.to_string()).collect();
        assert_eq!(three, ["{1}", "{2}", "{3}", "{1,2}", "{1,3}", "{2,3}", "{1,2,3}"]);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            power_set(&facts(9), DEFAULT_ATOM_CAP),
            Err(DecompError::TooManyAtoms { count: 9, cap: 8 })
        ));
        assert_eq!(power_set(&facts(8), DEFAULT_ATOM_CAP).unwrap().len(), 255);
        assert!(power_set(&[], 8).is_err());
    }

    #[test]
    fn subset_validation() {
        assert!(FactSubset::new(vec![], 3).is_err());
        assert!(FactSubset::new(vec![3], 3).is_err());
        let s = FactSubset::new(vec![2, 0, 2], 3).unwrap();
        assert_eq!(s.members(), &[0, 2]);
        assert!(s.contains(2) && !s.contains(1));
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, "[0,2]");
        assert!(serde_json::from_str::<FactSubset>("[]").is_err());
    }

    proptest! {
        #[test]
        fn power_set_is_complete_and_unique(l in 1usize..=8) {
            let subsets = power_set(&facts(l), DEFAULT_ATOM_CAP).unwrap();
            prop_assert_eq!(subsets.len(), (1usize << l) - 1);
            let unique: HashSet<_> = subsets.iter().collect();
            prop_assert_eq!(unique.len(), subsets.len());
            for pair in subsets.windows(2) {
                let key = |s: &FactSubset| (s.len(), s.members().to_vec());
                prop_assert!(key(&pair[0]) < key(&pair[1]));
            }
            prop_assert!(subsets.iter().all(|s| !s.is_empty() && s.members().iter().all(|&i| i < l)));
        }
    }
}
