use std::collections::{BTreeMap, HashMap};

use crate::model::{ConceptId, EntityRecord, IntervalDatabase, Symbol, TimeStamp};
use crate::par;
use crate::relations::{classify_ordered, Relation};
use crate::sac::{has_strict_gap, SacMode};

use super::support::{Instances, SupportStats};
use super::MiningConfig;

/// `(first symbol, relation, second symbol)`.
pub type PairKey = (Symbol, Relation, Symbol);

/// A later interval related to some earlier interval of the same entity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Successor {
    pub relation: Relation,
    pub symbol: Symbol,
    pub index: u32,
    /// Whether the pair passes the configured criterion as a 2-sized
    /// instance.
    pub admissible: bool,
}

/// Per-entity lookup answering "does anything of concept `c` reach into the
/// gap `(a.end, b.start)`" in logarithmic time.
///
/// For each concept, interval starts are sorted (the entity is normalized)
/// and paired with the running maximum of ends. An interval intrudes into
/// the gap iff it starts before `b.start` and ends after `a.end`; the pair's
/// own intervals never qualify, so no exclusion is needed.
#[derive(Clone, Debug, Default)]
pub struct GapIndex {
    concepts: HashMap<ConceptId, (Vec<TimeStamp>, Vec<TimeStamp>)>,
}

impl GapIndex {
    pub fn new(entity: &EntityRecord) -> Self {
        let mut concepts: HashMap<ConceptId, (Vec<TimeStamp>, Vec<TimeStamp>)> = HashMap::new();
        for iv in &entity.intervals {
            let (starts, max_ends) = concepts.entry(iv.sem_type()).or_default();
            let running = max_ends.last().copied().unwrap_or(TimeStamp::MIN);
            starts.push(iv.start);
            max_ends.push(running.max(iv.end));
        }
        GapIndex { concepts }
    }

    fn intrudes(&self, concept: ConceptId, gap_start: TimeStamp, gap_end: TimeStamp) -> bool {
        let Some((starts, max_ends)) = self.concepts.get(&concept) else {
            return false;
        };
        let n = starts.partition_point(|&s| s < gap_end);
        n > 0 && max_ends[n - 1] > gap_start
    }

    /// Same contract as [`crate::sac::gap_clear`].
    pub fn gap_clear(&self, entity: &EntityRecord, i: usize, j: usize) -> bool {
        let (a, b) = (&entity.intervals[i], &entity.intervals[j]);
        !self.intrudes(a.sem_type(), a.end, b.start)
            && (a.sem_type() == b.sem_type() || !self.intrudes(b.sem_type(), a.end, b.start))
    }

    /// True when the pair has no strict gap or its gap is clear.
    #[inline]
    pub fn adjacent(&self, entity: &EntityRecord, i: usize, j: usize) -> bool {
        !has_strict_gap(&entity.intervals[i], &entity.intervals[j]) || self.gap_clear(entity, i, j)
    }
}

/// Output of the pair-enumeration phase: every ordered pair of every entity
/// (for instance extension), plus the frequent 1- and 2-sized patterns.
#[derive(Debug, Default)]
pub struct PairIndex {
    successors: Vec<Vec<Vec<Successor>>>,
    gaps: Vec<GapIndex>,
    pub(crate) singles: BTreeMap<Symbol, SupportStats>,
    pub(crate) pairs: BTreeMap<PairKey, SupportStats>,
    by_first: HashMap<Symbol, Vec<(Relation, Symbol)>>,
    pub(crate) symbol_candidates: u64,
    pub(crate) pair_candidates: u64,
}

impl PairIndex {
    /// Later intervals of `entity` that stand in relation `rel` to interval
    /// `i` and carry symbol `sym`.
    pub fn next(&self, entity: u32, i: u32, rel: Relation, sym: Symbol) -> &[Successor] {
        let list = &self.successors[entity as usize][i as usize];
        let lo = list.partition_point(|s| (s.relation, s.symbol) < (rel, sym));
        let hi = list.partition_point(|s| (s.relation, s.symbol) <= (rel, sym));
        &list[lo..hi]
    }

    pub fn gap_index(&self, entity: u32) -> &GapIndex {
        &self.gaps[entity as usize]
    }

    pub fn is_frequent(&self, key: &PairKey) -> bool {
        self.pairs.contains_key(key)
    }

    pub fn frequent_pairs(&self) -> &BTreeMap<PairKey, SupportStats> {
        &self.pairs
    }

    pub fn frequent_singles(&self) -> &BTreeMap<Symbol, SupportStats> {
        &self.singles
    }

    /// Frequent keys starting with `sym`, in key order.
    pub fn extensions_of(&self, sym: Symbol) -> &[(Relation, Symbol)] {
        self.by_first.get(&sym).map(Vec::as_slice).unwrap_or(&[])
    }
}

struct EntityPairs {
    successors: Vec<Vec<Successor>>,
    gaps: GapIndex,
    admissible: BTreeMap<PairKey, Vec<[u32; 2]>>,
    seen_keys: Vec<PairKey>,
}

fn scan_entity(entity: &EntityRecord, cfg: &MiningConfig) -> EntityPairs {
    let ivs = &entity.intervals;
    let gaps = GapIndex::new(entity);
    let mut successors = Vec::with_capacity(ivs.len());
    let mut admissible: BTreeMap<PairKey, Vec<[u32; 2]>> = BTreeMap::new();
    let mut seen_keys = Vec::new();
    for i in 0..ivs.len() {
        let mut succ = Vec::new();
        for j in i + 1..ivs.len() {
            let Some(rel) = classify_ordered(&ivs[i], &ivs[j], &cfg.relations) else {
                // starts only grow with j, so the gap only widens
                break;
            };
            let ok = match cfg.sac {
                SacMode::None => true,
                SacMode::Lsac if ivs[i].sem_type() == ivs[j].sem_type() => true,
                _ => gaps.adjacent(entity, i, j),
            };
            let key = (ivs[i].symbol, rel, ivs[j].symbol);
            seen_keys.push(key);
            if ok {
                admissible
                    .entry(key)
                    .or_default()
                    .push([i as u32, j as u32]);
            }
            succ.push(Successor {
                relation: rel,
                symbol: ivs[j].symbol,
                index: j as u32,
                admissible: ok,
            });
        }
        succ.sort_unstable();
        successors.push(succ);
    }
    seen_keys.sort_unstable();
    seen_keys.dedup();
    EntityPairs {
        successors,
        gaps,
        admissible,
        seen_keys,
    }
}

/// Indexes every ordered interval pair, keeping as 2-sized instances only
/// the pairs admissible under the configured criterion, then prunes keys and
/// symbols below the support threshold.
pub fn karma(db: &IntervalDatabase, cfg: &MiningConfig) -> PairIndex {
    let total = db.len();
    let scans = par::map_collect(db.entities(), |_, e| scan_entity(e, cfg));

    let mut singles: BTreeMap<Symbol, Instances> = BTreeMap::new();
    for (ei, e) in db.entities().iter().enumerate() {
        for (i, iv) in e.intervals.iter().enumerate() {
            singles
                .entry(iv.symbol)
                .or_insert_with(|| Instances::new(1))
                .push(ei as u32, &[i as u32]);
        }
    }
    let symbol_candidates = singles.len() as u64;
    let singles: BTreeMap<Symbol, SupportStats> = singles
        .into_iter()
        .map(|(s, inst)| (s, SupportStats::from_instances(inst, total)))
        .filter(|(_, st)| cfg.min_support.is_met(st.supporting, total))
        .collect();

    let mut pair_instances: BTreeMap<PairKey, Instances> = BTreeMap::new();
    let mut all_keys: Vec<PairKey> = Vec::new();
    let mut successors = Vec::with_capacity(scans.len());
    let mut gaps = Vec::with_capacity(scans.len());
    for (ei, scan) in scans.into_iter().enumerate() {
        for (key, list) in scan.admissible {
            let inst = pair_instances
                .entry(key)
                .or_insert_with(|| Instances::new(2));
            for p in list {
                inst.push(ei as u32, &p);
            }
        }
        all_keys.extend(scan.seen_keys);
        successors.push(scan.successors);
        gaps.push(scan.gaps);
    }
    all_keys.sort_unstable();
    all_keys.dedup();

    let pairs: BTreeMap<PairKey, SupportStats> = if cfg.allows_size(2) {
        pair_instances
            .into_iter()
            .map(|(k, inst)| (k, SupportStats::from_instances(inst, total)))
            .filter(|(_, st)| cfg.min_support.is_met(st.supporting, total))
            .collect()
    } else {
        BTreeMap::new()
    };
    let mut by_first: HashMap<Symbol, Vec<(Relation, Symbol)>> = HashMap::new();
    for &(a, r, b) in pairs.keys() {
        by_first.entry(a).or_default().push((r, b));
    }

    PairIndex {
        successors,
        gaps,
        singles,
        pairs,
        by_first,
        symbol_candidates,
        pair_candidates: all_keys.len() as u64,
    }
}
