//! Temporal relations between lexicographically ordered interval pairs.
//!
//! Under lexicographic ordering only seven of Allen's thirteen relations can
//! occur. They can optionally be coarsened to three abstract relations. Both
//! sets come with a composition (transitivity) table used to generate
//! candidate patterns.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{SymbolicInterval, TimeStamp};

/// Seven lexicographic Allen relations followed by the three abstract ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[repr(u8)]
pub enum Relation {
    Before = 0,
    Meets,
    Overlaps,
    FinishedBy,
    Contains,
    Starts,
    Equal,
    AbstractBefore,
    AbstractOverlaps,
    AbstractContains,
}

pub const ALLEN7: [Relation; 7] = [
    Relation::Before,
    Relation::Meets,
    Relation::Overlaps,
    Relation::FinishedBy,
    Relation::Contains,
    Relation::Starts,
    Relation::Equal,
];

pub const ABSTRACT3: [Relation; 3] = [
    Relation::AbstractBefore,
    Relation::AbstractOverlaps,
    Relation::AbstractContains,
];

impl Relation {
    pub fn code(self) -> char {
        match self {
            Relation::Before => '<',
            Relation::Meets => 'm',
            Relation::Overlaps => 'o',
            Relation::FinishedBy => 'f',
            Relation::Contains => 'c',
            Relation::Starts => 's',
            Relation::Equal => '=',
            Relation::AbstractBefore => 'B',
            Relation::AbstractOverlaps => 'O',
            Relation::AbstractContains => 'C',
        }
    }

    pub fn from_code(c: char) -> Option<Relation> {
        Some(match c {
            '<' => Relation::Before,
            'm' => Relation::Meets,
            'o' => Relation::Overlaps,
            'f' => Relation::FinishedBy,
            'c' => Relation::Contains,
            's' => Relation::Starts,
            '=' => Relation::Equal,
            'B' => Relation::AbstractBefore,
            'O' => Relation::AbstractOverlaps,
            'C' => Relation::AbstractContains,
            _ => return None,
        })
    }

    pub fn is_abstract(self) -> bool {
        self as u8 >= Relation::AbstractBefore as u8
    }

    /// Maps an Allen relation into its abstract class; abstract relations map
    /// to themselves.
    pub fn to_abstract(self) -> Relation {
        match self {
            Relation::Before | Relation::Meets => Relation::AbstractBefore,
            Relation::Overlaps => Relation::AbstractOverlaps,
            Relation::FinishedBy | Relation::Contains | Relation::Starts | Relation::Equal => {
                Relation::AbstractContains
            }
            r => r,
        }
    }

    fn slot(self) -> usize {
        if self.is_abstract() {
            self as usize - Relation::AbstractBefore as usize
        } else {
            self as usize
        }
    }

    fn kind_members(self) -> &'static [Relation] {
        if self.is_abstract() {
            &ABSTRACT3
        } else {
            &ALLEN7
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code())
    }
}

/// A set of relations of one kind, as a bitmask over [`Relation`] discriminants.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct RelationSet(u16);

impl RelationSet {
    pub const EMPTY: RelationSet = RelationSet(0);

    pub fn all_of(mode: RelationMode) -> RelationSet {
        mode.relations().iter().copied().collect()
    }

    pub fn contains(self, r: Relation) -> bool {
        self.0 & (1 << r as u8) != 0
    }

    pub fn insert(&mut self, r: Relation) {
        self.0 |= 1 << r as u8;
    }

    pub fn union(self, other: RelationSet) -> RelationSet {
        RelationSet(self.0 | other.0)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Relation> {
        ALLEN7
            .iter()
            .chain(ABSTRACT3.iter())
            .copied()
            .filter(move |r| self.contains(*r))
    }
}

impl FromIterator<Relation> for RelationSet {
    fn from_iter<I: IntoIterator<Item = Relation>>(iter: I) -> Self {
        let mut s = RelationSet::EMPTY;
        for r in iter {
            s.insert(r);
        }
        s
    }
}

impl fmt::Display for RelationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for r in self.iter() {
            write!(f, "{}", r.code())?;
        }
        write!(f, "}}")
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationMode {
    #[default]
    Allen7,
    Abstract3,
}

impl RelationMode {
    pub fn relations(self) -> &'static [Relation] {
        match self {
            RelationMode::Allen7 => &ALLEN7,
            RelationMode::Abstract3 => &ABSTRACT3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RelationMode::Allen7 => "allen7",
            RelationMode::Abstract3 => "abstract3",
        }
    }
}

impl FromStr for RelationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "allen7" => Ok(RelationMode::Allen7),
            "abstract3" => Ok(RelationMode::Abstract3),
            _ => Err(Error::InvalidArgument(format!(
                "unknown relation set `{s}` (expected allen7 or abstract3)"
            ))),
        }
    }
}

impl fmt::Display for RelationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RelationConfig {
    /// Endpoint equality tolerance, in time units.
    pub epsilon: TimeStamp,
    /// Largest gap still classified as BEFORE; `None` is unbounded.
    pub max_gap: Option<TimeStamp>,
    pub mode: RelationMode,
}

impl RelationConfig {
    pub fn new(mode: RelationMode) -> Self {
        RelationConfig {
            mode,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.epsilon < 0 {
            return Err(Error::InvalidArgument(
                "epsilon must be non-negative".into(),
            ));
        }
        if matches!(self.max_gap, Some(g) if g < 0) {
            return Err(Error::InvalidArgument(
                "max gap must be non-negative".into(),
            ));
        }
        Ok(())
    }

    /// The shipped composition tables are exact only for crisp endpoints.
    pub fn composition_is_sound(&self) -> bool {
        self.epsilon == 0
    }
}

/// Relation between `a` and `b`, where `a` does not come after `b`
/// lexicographically. Returns `None` when the pair is BEFORE but farther
/// apart than `max_gap`.
pub fn classify_pair(
    a: &SymbolicInterval,
    b: &SymbolicInterval,
    cfg: &RelationConfig,
) -> Result<Option<Relation>> {
    if a > b {
        return Err(Error::NotLexicographic);
    }
    Ok(classify_ordered(a, b, cfg))
}

/// [`classify_pair`] without the ordering check, for callers that already
/// iterate a normalized entity in index order.
#[inline]
pub fn classify_ordered(
    a: &SymbolicInterval,
    b: &SymbolicInterval,
    cfg: &RelationConfig,
) -> Option<Relation> {
    let eps = cfg.epsilon;
    let eq = |x: TimeStamp, y: TimeStamp| (x - y).abs() <= eps;
    let r = if eq(a.start, b.start) {
        if eq(a.end, b.end) {
            Relation::Equal
        } else if a.end < b.end {
            Relation::Starts
        } else {
            // reachable only with a positive tolerance
            Relation::Contains
        }
    } else if eq(a.end, b.end) {
        Relation::FinishedBy
    } else if a.end > b.end {
        Relation::Contains
    } else if eq(a.end, b.start) {
        Relation::Meets
    } else if a.end < b.start {
        if matches!(cfg.max_gap, Some(g) if b.start - a.end > g) {
            return None;
        }
        Relation::Before
    } else {
        Relation::Overlaps
    };
    Some(match cfg.mode {
        RelationMode::Allen7 => r,
        RelationMode::Abstract3 => r.to_abstract(),
    })
}

/// Seven-relation composition table, row = rel(A,B), column = rel(B,C), cell
/// = every possible rel(A,C). Built by exhaustive enumeration of interval
/// triples (zero-length intervals included) on a small integer grid; the
/// builder lives in the test suite.
const ALLEN_COMPOSITION: [[&str; 7]; 7] = [
    //  <      m      o        f        c          s      =
    ["<", "<", "<", "<", "<", "<", "<"],
    ["<", "<", "<", "<", "<", "m", "m"],
    ["<", "<", "<mo", "<mo", "<mofc", "o", "o"],
    ["<", "m", "o", "f", "c", "mo", "f"],
    ["<mofc", "ofc", "ofc", "c", "c", "ofc", "c"],
    ["<", "<", "<mo", "<mo", "<mofc", "s", "s"],
    ["<", "m", "o", "f", "c", "s", "="],
];

fn parse_cell(cell: &str) -> RelationSet {
    cell.chars()
        .map(|c| Relation::from_code(c).expect("valid code in table"))
        .collect()
}

fn allen_table() -> &'static [[RelationSet; 7]; 7] {
    use std::sync::OnceLock;
    static TABLE: OnceLock<[[RelationSet; 7]; 7]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [[RelationSet::EMPTY; 7]; 7];
        for (i, row) in ALLEN_COMPOSITION.iter().enumerate() {
            for (j, cell) in row.iter().enumerate() {
                t[i][j] = parse_cell(cell);
            }
        }
        t
    })
}

fn abstract_table() -> &'static [[RelationSet; 3]; 3] {
    use std::sync::OnceLock;
    static TABLE: OnceLock<[[RelationSet; 3]; 3]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [[RelationSet::EMPTY; 3]; 3];
        for r1 in ALLEN7 {
            for r2 in ALLEN7 {
                let cell = &mut t[r1.to_abstract().slot()][r2.to_abstract().slot()];
                for c in allen_table()[r1.slot()][r2.slot()].iter() {
                    cell.insert(c.to_abstract());
                }
            }
        }
        t
    })
}

/// All relations rel(A,C) consistent with rel(A,B) = `r1` and rel(B,C) = `r2`.
/// Mixing an Allen relation with an abstract one yields the empty set.
pub fn compose(r1: Relation, r2: Relation) -> RelationSet {
    match (r1.is_abstract(), r2.is_abstract()) {
        (false, false) => allen_table()[r1.slot()][r2.slot()],
        (true, true) => abstract_table()[r1.slot()][r2.slot()],
        _ => RelationSet::EMPTY,
    }
}

/// Every relation of the same kind as `r`, used when composition cannot
/// prune (non-zero tolerance).
pub fn universe_of(r: Relation) -> RelationSet {
    r.kind_members().iter().copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ConceptId, Symbol, ValueId};

    fn iv(s: i64, e: i64) -> SymbolicInterval {
        SymbolicInterval::new(s, e, Symbol::new(ConceptId(0), ValueId(0))).unwrap()
    }

    fn allen(a: (i64, i64), b: (i64, i64)) -> Option<Relation> {
        classify_pair(&iv(a.0, a.1), &iv(b.0, b.1), &RelationConfig::default()).unwrap()
    }

    #[test]
    fn classify_examples() {
        assert_eq!(allen((0, 5), (7, 9)), Some(Relation::Before));
        assert_eq!(allen((0, 5), (5, 9)), Some(Relation::Meets));
        assert_eq!(allen((0, 9), (2, 7)), Some(Relation::Contains));
        assert_eq!(allen((0, 5), (3, 9)), Some(Relation::Overlaps));
        assert_eq!(allen((0, 5), (3, 5)), Some(Relation::FinishedBy));
        assert_eq!(allen((0, 5), (0, 9)), Some(Relation::Starts));
        assert_eq!(allen((0, 5), (0, 5)), Some(Relation::Equal));
        let cfg = RelationConfig {
            max_gap: Some(1),
            ..Default::default()
        };
        assert_eq!(classify_pair(&iv(0, 5), &iv(7, 9), &cfg).unwrap(), None);
        assert_eq!(
            classify_pair(&iv(0, 5), &iv(6, 9), &cfg).unwrap(),
            Some(Relation::Before)
        );
    }

    #[test]
    fn classify_rejects_reversed_pair() {
        let r = classify_pair(&iv(3, 5), &iv(0, 9), &RelationConfig::default());
        assert!(matches!(r, Err(Error::NotLexicographic)));
    }

    #[test]
    fn epsilon_softens_equalities() {
        let cfg = RelationConfig {
            epsilon: 1,
            ..Default::default()
        };
        let c = |a: (i64, i64), b: (i64, i64)| {
            classify_pair(&iv(a.0, a.1), &iv(b.0, b.1), &cfg).unwrap()
        };
        assert_eq!(c((0, 5), (6, 9)), Some(Relation::Meets));
        assert_eq!(c((0, 5), (1, 6)), Some(Relation::Equal));
        assert_eq!(c((0, 5), (1, 9)), Some(Relation::Starts));
        assert_eq!(c((0, 9), (1, 5)), Some(Relation::Contains));
    }

    #[test]
    fn abstract_mapping() {
        assert_eq!(Relation::Meets.to_abstract(), Relation::AbstractBefore);
        assert_eq!(Relation::Equal.to_abstract(), Relation::AbstractContains);
        assert_eq!(Relation::Overlaps.to_abstract(), Relation::AbstractOverlaps);
        assert_eq!(Relation::Starts.to_abstract(), Relation::AbstractContains);
        assert_eq!(
            Relation::FinishedBy.to_abstract(),
            Relation::AbstractContains
        );
        let cfg = RelationConfig::new(RelationMode::Abstract3);
        assert_eq!(
            classify_pair(&iv(0, 5), &iv(5, 9), &cfg).unwrap(),
            Some(Relation::AbstractBefore)
        );
    }

    #[test]
    fn composition_examples() {
        use Relation::*;
        assert_eq!(compose(Before, Before), [Before].into_iter().collect());
        assert_eq!(
            compose(Contains, Contains),
            [Contains].into_iter().collect()
        );
        assert_eq!(compose(Overlaps, Before), [Before].into_iter().collect());
        assert_eq!(compose(Before, AbstractBefore), RelationSet::EMPTY);
        assert_eq!(
            compose(AbstractBefore, AbstractBefore),
            [AbstractBefore].into_iter().collect()
        );
    }

    #[test]
    fn codes_round_trip() {
        for r in ALLEN7.iter().chain(ABSTRACT3.iter()) {
            assert_eq!(Relation::from_code(r.code()), Some(*r));
        }
        assert_eq!(Relation::from_code('x'), None);
        assert_eq!(
            "abstract3".parse::<RelationMode>().unwrap(),
            RelationMode::Abstract3
        );
        assert!("allen13".parse::<RelationMode>().is_err());
    }
}
