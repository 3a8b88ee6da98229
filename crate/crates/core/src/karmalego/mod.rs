//! Frequent time-interval-relation pattern (TIRP) mining.
//!
//! Mining runs in two phases. [`karma`] indexes every ordered interval pair
//! of every entity under its `(symbol, relation, symbol)` key and keeps the
//! frequent keys as 2-sized patterns. [`lego`] then grows each 2-sized
//! pattern one interval at a time, generating candidate relation columns by
//! transitivity and extending recorded instances through the pair index.

mod karma;
mod lego;
mod support;
mod tree;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{EntityRecord, Symbol, SymbolTable, TimeStamp};
use crate::relations::{Relation, RelationConfig};
use crate::sac::SacMode;

pub use karma::{karma, GapIndex, PairIndex, PairKey, Successor};
pub use lego::{generate_candidates, lego, search_supporting_instances, MiningContext};
pub use support::{Instances, SupportStats};
pub use tree::{EnumerationTree, MiningStats, TreeNode};

/// Minimum vertical support as an exact fraction in `(0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct MinSupport {
    num: u64,
    den: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl MinSupport {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 || num == 0 || num > den {
            return Err(Error::InvalidArgument(format!(
                "minimum support must lie in (0, 1], got {num}/{den}"
            )));
        }
        let g = gcd(num, den);
        Ok(MinSupport {
            num: num / g,
            den: den / g,
        })
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    /// `count / total >= num / den`, compared without floating point.
    #[inline]
    pub fn is_met(&self, count: usize, total: usize) -> bool {
        total > 0 && (count as u128) * (self.den as u128) >= (self.num as u128) * (total as u128)
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl FromStr for MinSupport {
    type Err = Error;

    /// Accepts `P/Q`, a decimal such as `0.35`, or `1`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("cannot parse minimum support `{s}`"));
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p = p.trim().parse().map_err(|_| bad())?;
            let q = q.trim().parse().map_err(|_| bad())?;
            return MinSupport::new(p, q);
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if int.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        if frac.len() > 18 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let int: u64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let den = 10u64.pow(frac.len() as u32);
        let frac_val: u64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| bad())?
        };
        let num = int
            .checked_mul(den)
            .and_then(|v| v.checked_add(frac_val))
            .ok_or_else(bad)?;
        MinSupport::new(num, den)
    }
}

impl TryFrom<String> for MinSupport {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<MinSupport> for String {
    fn from(m: MinSupport) -> String {
        m.to_string()
    }
}

impl fmt::Display for MinSupport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MiningConfig {
    pub min_support: MinSupport,
    pub relations: RelationConfig,
    pub sac: SacMode,
    /// Largest pattern size to grow; `None` is unbounded.
    pub max_size: Option<usize>,
}

impl MiningConfig {
    pub fn new(min_support: MinSupport) -> Self {
        MiningConfig {
            min_support,
            relations: RelationConfig::default(),
            sac: SacMode::None,
            max_size: None,
        }
    }

    pub fn with_sac(mut self, sac: SacMode) -> Self {
        self.sac = sac;
        self
    }

    pub fn with_relations(mut self, relations: RelationConfig) -> Self {
        self.relations = relations;
        self
    }

    pub fn with_max_size(mut self, max: usize) -> Self {
        self.max_size = Some(max);
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.relations.validate()?;
        if self.max_size == Some(0) {
            return Err(Error::InvalidArgument(
                "max pattern size must be positive".into(),
            ));
        }
        Ok(())
    }

    pub(crate) fn allows_size(&self, k: usize) -> bool {
        self.max_size.is_none_or(|m| k <= m)
    }
}

/// A pattern: `k` symbols in lexicographic order plus the `(k²−k)/2`
/// pairwise relations, stored column by column (for each interval `j`, the
/// relations of pairs `(0,j), (1,j), …, (j−1,j)`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Tirp {
    pub symbols: Vec<Symbol>,
    pub relations: Vec<Relation>,
}

#[inline]
pub(crate) fn column_offset(j: usize) -> usize {
    j * (j.saturating_sub(1)) / 2
}

impl Tirp {
    pub fn single(sym: Symbol) -> Self {
        Tirp {
            symbols: vec![sym],
            relations: Vec::new(),
        }
    }

    pub fn pair(a: Symbol, r: Relation, b: Symbol) -> Self {
        Tirp {
            symbols: vec![a, b],
            relations: vec![r],
        }
    }

    pub fn size(&self) -> usize {
        self.symbols.len()
    }

    /// Relation between pattern positions `i < j`.
    pub fn relation(&self, i: usize, j: usize) -> Relation {
        debug_assert!(i < j && j < self.size());
        self.relations[column_offset(j) + i]
    }

    pub fn last_symbol(&self) -> Symbol {
        *self.symbols.last().expect("non-empty pattern")
    }

    /// Appends a symbol with its relation column.
    pub fn extended(&self, sym: Symbol, column: &[Relation]) -> Tirp {
        debug_assert_eq!(column.len(), self.size());
        let mut t = self.clone();
        t.symbols.push(sym);
        t.relations.extend_from_slice(column);
        t
    }

    /// The pattern without its last interval.
    pub fn prefix(&self) -> Tirp {
        let k = self.size();
        Tirp {
            symbols: self.symbols[..k - 1].to_vec(),
            relations: self.relations[..column_offset(k - 1)].to_vec(),
        }
    }

    /// Every relation agrees with transitivity through every middle interval.
    pub fn is_consistent(&self) -> bool {
        let k = self.size();
        if self.relations.len() != column_offset(k) {
            return false;
        }
        for j in 0..k {
            for m in 0..j {
                for i in 0..m {
                    let allowed =
                        crate::relations::compose(self.relation(i, m), self.relation(m, j));
                    if !allowed.contains(self.relation(i, j)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Canonical order: size, then symbols, then relations.
    pub fn canonical_cmp(&self, other: &Tirp) -> Ordering {
        self.size()
            .cmp(&other.size())
            .then_with(|| self.symbols.cmp(&other.symbols))
            .then_with(|| self.relations.cmp(&other.relations))
    }

    pub fn relation_codes(&self) -> String {
        self.relations.iter().map(|r| r.code()).collect()
    }

    pub fn display<'a>(&'a self, table: &'a SymbolTable) -> TirpDisplay<'a> {
        TirpDisplay { tirp: self, table }
    }
}

pub struct TirpDisplay<'a> {
    tirp: &'a Tirp,
    table: &'a SymbolTable,
}

impl fmt::Display for TirpDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.tirp.symbols.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", self.table.display(*s))?;
        }
        write!(f, " [{}]", self.tirp.relation_codes())
    }
}

/// From the earliest start to the latest end of an instance.
pub fn instance_span(entity: &EntityRecord, indices: &[u32]) -> TimeStamp {
    let ivs = &entity.intervals;
    let first = ivs[indices[0] as usize].start;
    let last_end = indices
        .iter()
        .map(|&i| ivs[i as usize].end)
        .max()
        .expect("non-empty instance");
    last_end - first
}

/// Karma followed by Lego from every 2-sized pattern.
pub fn mine(db: &crate::model::IntervalDatabase, cfg: &MiningConfig) -> Result<EnumerationTree> {
    cfg.validate()?;
    let ctx = MiningContext::new(db, cfg);
    Ok(ctx.run())
}
