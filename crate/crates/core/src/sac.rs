//! Semantic adjacency criteria: reference predicates over concrete
//! instances.
//!
//! A pair of intervals separated by a strict gap is *semantically adjacent*
//! when no other interval of either one's semantic type covers any part of
//! that gap. The three criteria differ in which pairs of a pattern instance
//! must be adjacent:
//!
//! * sequential: lexicographically successive pairs only,
//! * conservative: every pair,
//! * liberal: every pair whose semantic types differ.
//!
//! Pairs without a strict gap (meets, overlaps, containment, ...) are never
//! constrained.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{EntityRecord, SymbolicInterval};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SacMode {
    #[default]
    None,
    Ssac,
    Csac,
    Lsac,
}

impl SacMode {
    pub const ALL: [SacMode; 4] = [SacMode::None, SacMode::Ssac, SacMode::Csac, SacMode::Lsac];

    pub fn as_str(self) -> &'static str {
        match self {
            SacMode::None => "none",
            SacMode::Ssac => "ssac",
            SacMode::Csac => "csac",
            SacMode::Lsac => "lsac",
        }
    }

    /// Whether the pair at pattern positions `(p, q)`, `p < q`, is subject to
    /// the criterion, ignoring the gap test.
    pub fn constrains(
        self,
        p: usize,
        q: usize,
        a: &SymbolicInterval,
        b: &SymbolicInterval,
    ) -> bool {
        match self {
            SacMode::None => false,
            SacMode::Ssac => q == p + 1,
            SacMode::Csac => true,
            SacMode::Lsac => a.sem_type() != b.sem_type(),
        }
    }
}

impl FromStr for SacMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(SacMode::None),
            "ssac" => Ok(SacMode::Ssac),
            "csac" => Ok(SacMode::Csac),
            "lsac" => Ok(SacMode::Lsac),
            _ => Err(Error::InvalidArgument(format!(
                "unknown SAC mode `{s}` (expected none, ssac, csac or lsac)"
            ))),
        }
    }
}

impl fmt::Display for SacMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[inline]
pub fn has_strict_gap(a: &SymbolicInterval, b: &SymbolicInterval) -> bool {
    a.end < b.start
}

/// True iff no other interval of the entity sharing a semantic type with
/// interval `i` or interval `j` reaches into the open gap between them.
///
/// Requires `intervals[i].end < intervals[j].start`.
pub fn gap_clear(entity: &EntityRecord, i: usize, j: usize) -> bool {
    let ivs = &entity.intervals;
    let (a, b) = (&ivs[i], &ivs[j]);
    debug_assert!(
        i != j && has_strict_gap(a, b),
        "gap_clear needs a strict gap"
    );
    !ivs.iter().enumerate().any(|(t, iv)| {
        t != i
            && t != j
            && iv.end > a.end
            && iv.start < b.start
            && (iv.sem_type() == a.sem_type() || iv.sem_type() == b.sem_type())
    })
}

/// Checks a concrete instance (interval indices in pattern order) against
/// the criterion.
pub fn instance_satisfies(mode: SacMode, entity: &EntityRecord, indices: &[usize]) -> bool {
    if mode == SacMode::None {
        return true;
    }
    let ivs = &entity.intervals;
    for q in 1..indices.len() {
        let first = if mode == SacMode::Ssac { q - 1 } else { 0 };
        for p in first..q {
            let (a, b) = (&ivs[indices[p]], &ivs[indices[q]]);
            if mode.constrains(p, q, a, b)
                && has_strict_gap(a, b)
                && !gap_clear(entity, indices[p], indices[q])
            {
                return false;
            }
        }
    }
    true
}

/// Whether a two-interval instance `(i, j)` may be indexed during the pair
/// enumeration phase.
pub fn karma_pair_admissible(mode: SacMode, entity: &EntityRecord, i: usize, j: usize) -> bool {
    let (a, b) = (&entity.intervals[i], &entity.intervals[j]);
    match mode {
        SacMode::None => true,
        SacMode::Lsac if a.sem_type() == b.sem_type() => true,
        _ => !has_strict_gap(a, b) || gap_clear(entity, i, j),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ConceptId, Symbol, ValueId};

    fn iv(s: i64, e: i64, c: u32, v: u32) -> SymbolicInterval {
        SymbolicInterval::new(s, e, Symbol::new(ConceptId(c), ValueId(v))).unwrap()
    }

    fn entity(ivs: Vec<SymbolicInterval>) -> EntityRecord {
        crate::model::normalize_entity(EntityRecord::new("e", ivs)).unwrap()
    }

    const MED: u32 = 0;
    const HGB: u32 = 1;
    const HIGH: u32 = 0;
    const LOW: u32 = 1;

    #[test]
    fn gap_clear_examples() {
        // M_High[0,10], H_High[20,30], H_Low[40,50]
        let e = entity(vec![
            iv(0, 10, MED, HIGH),
            iv(20, 30, HGB, HIGH),
            iv(40, 50, HGB, LOW),
        ]);
        assert!(!gap_clear(&e, 0, 2));
        assert!(gap_clear(&e, 0, 1));

        // A1[0,2], B1[3,5], A2[8,10] with A and B different concepts
        let e = entity(vec![iv(0, 2, 0, 0), iv(3, 5, 1, 0), iv(8, 10, 0, 0)]);
        assert!(gap_clear(&e, 0, 2));
    }

    #[test]
    fn gap_intruder_touching_endpoint_only() {
        // intruder ends exactly where the gap starts: not inside
        let e = entity(vec![iv(0, 5, 0, 0), iv(2, 5, 0, 1), iv(9, 12, 1, 0)]);
        assert!(gap_clear(&e, 0, 2));
        // intruder starts exactly where the gap ends
        let e = entity(vec![iv(0, 5, 0, 0), iv(9, 12, 1, 0), iv(9, 20, 1, 1)]);
        assert!(gap_clear(&e, 0, 1));
    }

    #[test]
    fn counting_instance() {
        let e = entity(vec![iv(0, 2, 0, 1), iv(4, 6, 0, 1), iv(8, 10, 0, 1)]);
        let inst = [0, 1, 2];
        assert!(!instance_satisfies(SacMode::Csac, &e, &inst));
        assert!(instance_satisfies(SacMode::Lsac, &e, &inst));
        assert!(instance_satisfies(SacMode::Ssac, &e, &inst));
        assert!(instance_satisfies(SacMode::None, &e, &inst));
    }

    #[test]
    fn pair_admissibility() {
        // A1, B (contradicting A in between? no: A2 intrudes), A3 same concept
        let e = entity(vec![iv(0, 2, 0, 0), iv(4, 6, 0, 1), iv(8, 10, 0, 0)]);
        assert!(karma_pair_admissible(SacMode::Lsac, &e, 0, 2));
        assert!(!karma_pair_admissible(SacMode::Csac, &e, 0, 2));

        // meets: no strict gap
        let e = entity(vec![iv(0, 5, 0, 0), iv(1, 7, 0, 1), iv(5, 9, 1, 0)]);
        assert!(karma_pair_admissible(SacMode::Csac, &e, 0, 2));

        // Med_High[0,10], Med_Low[12,15], HGB_Low[20,30]
        let e = entity(vec![
            iv(0, 10, MED, HIGH),
            iv(12, 15, MED, LOW),
            iv(20, 30, HGB, LOW),
        ]);
        assert!(!karma_pair_admissible(SacMode::Ssac, &e, 0, 2));
        assert!(karma_pair_admissible(SacMode::None, &e, 0, 2));
    }

    #[test]
    fn mode_parsing() {
        for m in SacMode::ALL {
            assert_eq!(m.as_str().parse::<SacMode>().unwrap(), m);
        }
        assert!("SAC".parse::<SacMode>().is_err());
    }
}
