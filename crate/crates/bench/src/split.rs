use std::collections::BTreeMap;

use groundfact_core::{make_split, BenchRecord, UnsplitRecord};

use crate::BenchError;

/// Splits each dataset on its own so every dataset gets close to the
/// requested validation fraction. Output keeps input order.
pub fn split_by_dataset(records: Vec<UnsplitRecord>, seed: u64, fraction: f64) -> Result<Vec<BenchRecord>, BenchError> {
    let mut order: BTreeMap<String, usize> = BTreeMap::new();
    let mut groups: BTreeMap<String, Vec<UnsplitRecord>> = BTreeMap::new();
    for (i, r) in records.into_iter().enumerate() {
        order.insert(r.grounded.id.clone(), i);
        groups.entry(r.dataset.clone()).or_default().push(r);
    }
    let mut out = Vec::with_capacity(order.len());
    for (dataset, group) in groups {
        let split = make_split(group, seed, fraction).map_err(|e| BenchError::Data(format!("dataset {dataset:?}: {e}")))?;
        out.extend(split);
    }
    out.sort_by_key(|r| order[r.id()]);
    Ok(out)
}
