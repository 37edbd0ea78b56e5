//! Validation/test partitioning at query-group granularity.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::CoreError;
use crate::types::{BenchRecord, Split, UnsplitRecord};

/// Assigns every query group to a split.
///
/// Groups are sorted, shuffled by a seeded permutation, then visited in that
/// order; a group joins validation when doing so moves the validation record
/// count closer to `fraction * total`. All remaining groups go to test.
pub fn assign_groups<'a, I>(groups: I, seed: u64, fraction: f64) -> Result<BTreeMap<String, Split>, CoreError>
where
    I: IntoIterator<Item = &'a str>,
{
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(CoreError::BadFraction(fraction));
    }
    let mut sizes: BTreeMap<String, usize> = BTreeMap::new();
    for g in groups {
        *sizes.entry(g.to_string()).or_default() += 1;
    }
    let total: usize = sizes.values().sum();
    if total == 0 {
        return Err(CoreError::EmptySplitInput);
    }
    if sizes.len() < 2 {
        return Err(CoreError::CannotSplit(format!(
            "all {total} records share a single query group"
        )));
    }

    let mut order: Vec<(&String, usize)> = sizes.iter().map(|(g, n)| (g, *n)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let target = fraction * total as f64;
    let mut in_validation = 0usize;
    let mut assignment = BTreeMap::new();
    for (group, size) in order {
        let before = (in_validation as f64 - target).abs();
        let after = ((in_validation + size) as f64 - target).abs();
        let split = if after < before {
            in_validation += size;
            Split::Validation
        } else {
            Split::Test
        };
        assignment.insert(group.clone(), split);
    }
    if in_validation == 0 || in_validation == total {
        return Err(CoreError::CannotSplit(format!(
            "group sizes do not permit a {fraction} validation fraction"
        )));
    }
    Ok(assignment)
}

/// Splits records into validation and test sets, keeping every query group on
/// one side. Output preserves input order.
pub fn make_split(records: Vec<UnsplitRecord>, seed: u64, fraction: f64) -> Result<Vec<BenchRecord>, CoreError> {
    if records.is_empty() {
        return Err(CoreError::EmptySplitInput);
    }
    let assignment = assign_groups(records.iter().map(|r| r.grounded.query_group.as_str()), seed, fraction)?;
    Ok(records
        .into_iter()
        .map(|r| {
            let split = assignment[&r.grounded.query_group];
            r.with_split(split)
        })
        .collect())
}
