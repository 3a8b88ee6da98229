//! Deterministic, label-stratified fold assignment for the mine/detect and
//! cross-validation splits.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::IntervalDatabase;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldSpec {
    pub mining_folds: usize,
    pub cv_folds: usize,
    pub seed: u64,
}

impl Default for FoldSpec {
    fn default() -> Self {
        FoldSpec {
            mining_folds: 3,
            cv_folds: 10,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    pub mining_fold: usize,
    pub cv_fold: usize,
}

/// Assigns every entity a mining fold and a cv fold.
///
/// Entities are shuffled with a seeded generator, grouped by label and dealt
/// round-robin, so each fold dimension is balanced to within one entity and
/// labels are spread evenly.
pub fn assign_folds(
    db: &IntervalDatabase,
    spec: &FoldSpec,
) -> Result<BTreeMap<String, FoldAssignment>> {
    let entries: Vec<(String, Option<String>)> = db
        .entities()
        .iter()
        .map(|e| (e.id.clone(), e.label.clone()))
        .collect();
    assign_folds_for(&entries, spec)
}

pub fn assign_folds_for(
    entities: &[(String, Option<String>)],
    spec: &FoldSpec,
) -> Result<BTreeMap<String, FoldAssignment>> {
    for (name, k) in [("mining", spec.mining_folds), ("cv", spec.cv_folds)] {
        if k < 2 {
            return Err(Error::InvalidArgument(format!(
                "{name} folds must be at least 2, got {k}"
            )));
        }
        if entities.len() < k {
            return Err(Error::InvalidArgument(format!(
                "{} entities cannot fill {k} {name} folds",
                entities.len()
            )));
        }
    }
    let mut sorted: Vec<&(String, Option<String>)> = entities.iter().collect();
    sorted.sort_by(|a, b| a.0.cmp(&b.0));

    let mining = deal(&sorted, spec.mining_folds, spec.seed);
    let cv = deal(&sorted, spec.cv_folds, spec.seed.wrapping_add(0x9E37_79B9));
    Ok(sorted
        .iter()
        .map(|(id, _)| {
            (
                id.clone(),
                FoldAssignment {
                    mining_fold: mining[id],
                    cv_fold: cv[id],
                },
            )
        })
        .collect())
}

fn deal(sorted: &[&(String, Option<String>)], folds: usize, seed: u64) -> BTreeMap<String, usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<&(String, Option<String>)> = sorted.to_vec();
    order.shuffle(&mut rng);
    let mut strata: BTreeMap<Option<&str>, Vec<&str>> = BTreeMap::new();
    for (id, label) in order {
        strata.entry(label.as_deref()).or_default().push(id);
    }
    strata
        .into_values()
        .flatten()
        .enumerate()
        .map(|(pos, id)| (id.to_string(), pos % folds))
        .collect()
}
