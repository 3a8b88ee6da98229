//! Exhaustive reference miner for small databases.
//!
//! Enumerates every strictly increasing index subset of every entity,
//! classifies all pairs directly and filters instances with the reference
//! semantic-adjacency predicates. Shares nothing with the Karma/Lego path
//! beyond pair classification, so the two can check each other.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::karmalego::{Instances, MiningConfig, SupportStats, Tirp};
use crate::model::IntervalDatabase;
use crate::relations::classify_pair;
use crate::sac::instance_satisfies;

pub const MAX_INTERVALS_PER_ENTITY: usize = 16;
pub const MAX_PATTERN_SIZE: usize = 5;

/// Every frequent pattern of size at most `k_max`, in canonical order.
pub fn brute_force_mine(
    db: &IntervalDatabase,
    cfg: &MiningConfig,
    k_max: usize,
) -> Result<Vec<(Tirp, SupportStats)>> {
    if k_max == 0 || k_max > MAX_PATTERN_SIZE {
        return Err(Error::OracleLimit(format!(
            "pattern size bound {k_max} outside 1..={MAX_PATTERN_SIZE}"
        )));
    }
    if let Some(e) = db
        .entities()
        .iter()
        .find(|e| e.intervals.len() > MAX_INTERVALS_PER_ENTITY)
    {
        return Err(Error::OracleLimit(format!(
            "entity `{}` has {} intervals (limit {MAX_INTERVALS_PER_ENTITY})",
            e.id,
            e.intervals.len()
        )));
    }

    let mut found: HashMap<Tirp, Instances> = HashMap::new();
    let mut subset: Vec<usize> = Vec::with_capacity(k_max);
    for (ei, entity) in db.entities().iter().enumerate() {
        let n = entity.intervals.len();
        // odometer over increasing subsets, in lexicographic order
        let mut stack: Vec<usize> = vec![0];
        while let Some(&next) = stack.last() {
            if next >= n {
                stack.pop();
                subset.pop();
                if let Some(top) = stack.last_mut() {
                    *top += 1;
                }
                continue;
            }
            subset.push(next);
            if let Some(tirp) = pattern_of(db, ei, &subset, cfg)? {
                if instance_satisfies(cfg.sac, entity, &subset) {
                    let idx: Vec<u32> = subset.iter().map(|&i| i as u32).collect();
                    found
                        .entry(tirp)
                        .or_insert_with(|| Instances::new(subset.len()))
                        .push(ei as u32, &idx);
                }
            }
            if subset.len() < k_max {
                stack.push(next + 1);
            } else {
                subset.pop();
                *stack.last_mut().expect("non-empty") += 1;
            }
        }
    }

    let total = db.len();
    let mut out: Vec<(Tirp, SupportStats)> = found
        .into_iter()
        .map(|(t, mut inst)| {
            inst.sort();
            (t, SupportStats::from_instances(inst, total))
        })
        .filter(|(_, st)| cfg.min_support.is_met(st.supporting, total))
        .collect();
    out.sort_by(|a, b| a.0.canonical_cmp(&b.0));
    Ok(out)
}

fn pattern_of(
    db: &IntervalDatabase,
    entity: usize,
    subset: &[usize],
    cfg: &MiningConfig,
) -> Result<Option<Tirp>> {
    let ivs = &db.entities()[entity].intervals;
    let mut relations = Vec::with_capacity(subset.len() * subset.len() / 2);
    for j in 1..subset.len() {
        for i in 0..j {
            match classify_pair(&ivs[subset[i]], &ivs[subset[j]], &cfg.relations)? {
                Some(r) => relations.push(r),
                None => return Ok(None),
            }
        }
    }
    Ok(Some(Tirp {
        symbols: subset.iter().map(|&i| ivs[i].symbol).collect(),
        relations,
    }))
}
