use std::collections::BTreeMap;

use crate::model::{IntervalDatabase, Symbol};
use crate::par;
use crate::relations::{classify_ordered, compose, universe_of, Relation, RelationSet};
use crate::sac::SacMode;

use super::karma::{karma, PairIndex};
use super::support::{Instances, SupportStats};
use super::tree::{EnumerationTree, MiningStats, TreeNode};
use super::{MiningConfig, Tirp};

/// Everything the extension phase reads: the database, the configuration
/// and the pair index built by [`karma`].
pub struct MiningContext<'a> {
    pub db: &'a IntervalDatabase,
    pub cfg: &'a MiningConfig,
    pub index: PairIndex,
}

/// Allowed relations for each slot `(i, k)` of a new column, given the
/// parent's relations `(i, k-1)` and the relation `r` of the new pair
/// `(k-1, k)`.
fn slot_sets(parent: &Tirp, r: Relation, sound: bool) -> Vec<RelationSet> {
    let k = parent.size();
    (0..k - 1)
        .map(|i| {
            if sound {
                compose(parent.relation(i, k - 1), r)
            } else {
                universe_of(r)
            }
        })
        .collect()
}

/// Candidate `(k+1)`-sized patterns extending `parent` with `new_symbol`,
/// where `r` relates the parent's last interval to the new one. Each slot of
/// the new column ranges over the composition of the parent's relation to
/// its last interval with `r`; candidates are the cartesian product.
pub fn generate_candidates(parent: &Tirp, new_symbol: Symbol, r: Relation) -> Vec<Tirp> {
    let sets = slot_sets(parent, r, true);
    let mut columns: Vec<Vec<Relation>> = vec![Vec::with_capacity(parent.size())];
    for set in &sets {
        columns = columns
            .into_iter()
            .flat_map(|col| {
                set.iter().map(move |rel| {
                    let mut c = col.clone();
                    c.push(rel);
                    c
                })
            })
            .collect();
    }
    columns
        .into_iter()
        .map(|mut col| {
            col.push(r);
            parent.extended(new_symbol, &col)
        })
        .collect()
}

fn candidate_count(sets: &[RelationSet]) -> u64 {
    sets.iter()
        .fold(1u64, |acc, s| acc.saturating_mul(s.len() as u64))
}

impl<'a> MiningContext<'a> {
    pub fn new(db: &'a IntervalDatabase, cfg: &'a MiningConfig) -> Self {
        MiningContext {
            db,
            cfg,
            index: karma(db, cfg),
        }
    }

    /// Extends every parent instance by every later interval `j` with
    /// symbol `sym` and relation `r` to the parent's last interval, grouping
    /// the surviving extensions by their realized relation column.
    ///
    /// An extension survives when every earlier interval relates to `j`
    /// (within the gap bound), each such relation lies in the candidate slot
    /// set, each earlier pair's key is frequent (skipped under the sequential
    /// criterion, where non-successive pairs are unconstrained), and every
    /// pair the criterion constrains is semantically adjacent.
    fn extend(
        &self,
        parent: &Tirp,
        instances: &Instances,
        r: Relation,
        sym: Symbol,
        only: Option<&[Relation]>,
    ) -> BTreeMap<Vec<Relation>, Instances> {
        let k = parent.size();
        let sets = slot_sets(parent, r, self.cfg.relations.composition_is_sound());
        let sac = self.cfg.sac;
        let check_keys = sac != SacMode::Ssac;
        let mut groups: BTreeMap<Vec<Relation>, Instances> = BTreeMap::new();
        let mut column = Vec::with_capacity(k);
        let mut extended = Vec::with_capacity(k + 1);

        for (e, idx) in instances.iter() {
            let entity = &self.db.entities()[e as usize];
            let gaps = self.index.gap_index(e);
            let last = idx[k - 1];
            'next: for succ in self.index.next(e, last, r, sym) {
                if sac != SacMode::None && !succ.admissible {
                    continue;
                }
                let j = succ.index as usize;
                let b = &entity.intervals[j];
                column.clear();
                for (p, set) in sets.iter().enumerate() {
                    let a = &entity.intervals[idx[p] as usize];
                    let Some(rel) = classify_ordered(a, b, &self.cfg.relations) else {
                        continue 'next;
                    };
                    if !set.contains(rel)
                        || (check_keys && !self.index.is_frequent(&(a.symbol, rel, sym)))
                        || (sac.constrains(p, k, a, b)
                            && !gaps.adjacent(entity, idx[p] as usize, j))
                    {
                        continue 'next;
                    }
                    column.push(rel);
                }
                column.push(r);
                if only.is_some_and(|o| o != column.as_slice()) {
                    continue;
                }
                extended.clear();
                extended.extend_from_slice(idx);
                extended.push(succ.index);
                groups
                    .entry(column.clone())
                    .or_insert_with(|| Instances::new(k + 1))
                    .push(e, &extended);
            }
        }
        groups
    }

    /// Grows `nodes[at]` recursively, appending frequent children.
    fn grow(&self, nodes: &mut Vec<TreeNode>, at: usize, stats: &mut MiningStats) {
        let k = nodes[at].tirp.size();
        if !self.cfg.allows_size(k + 1) {
            return;
        }
        let total = self.db.len();
        let last = nodes[at].tirp.last_symbol();
        let sound = self.cfg.relations.composition_is_sound();
        for &(r, sym) in self.index.extensions_of(last) {
            let sets = slot_sets(&nodes[at].tirp, r, sound);
            stats.add_candidates(k + 1, candidate_count(&sets));
            let groups = self.extend(&nodes[at].tirp, &nodes[at].stats.instances, r, sym, None);
            for (column, inst) in groups {
                let st = SupportStats::from_instances(inst, total);
                if !self.cfg.min_support.is_met(st.supporting, total) {
                    continue;
                }
                let child = nodes.len();
                let tirp = nodes[at].tirp.extended(sym, &column);
                nodes.push(TreeNode {
                    tirp,
                    stats: st,
                    parent: Some(at),
                    children: Vec::new(),
                });
                nodes[at].children.push(child);
                self.grow(nodes, child, stats);
            }
        }
    }

    /// Builds the full enumeration tree.
    pub fn run(&self) -> EnumerationTree {
        let total = self.db.len();
        let mut tree = EnumerationTree {
            total_entities: total,
            ..Default::default()
        };
        tree.stats.add_candidates(1, self.index.symbol_candidates);
        if self.cfg.allows_size(2) {
            tree.stats.add_candidates(2, self.index.pair_candidates);
        }

        let mut root_of: BTreeMap<Symbol, usize> = BTreeMap::new();
        for (sym, st) in &self.index.singles {
            let id = tree.push(TreeNode {
                tirp: Tirp::single(*sym),
                stats: st.clone(),
                parent: None,
                children: Vec::new(),
            });
            root_of.insert(*sym, id);
        }

        let seeds: Vec<(&super::PairKey, &SupportStats)> = self.index.pairs.iter().collect();
        let subtrees = par::map_collect(&seeds, |_, (key, st)| {
            let mut nodes = vec![TreeNode {
                tirp: Tirp::pair(key.0, key.1, key.2),
                stats: (*st).clone(),
                parent: None,
                children: Vec::new(),
            }];
            let mut stats = MiningStats::default();
            self.grow(&mut nodes, 0, &mut stats);
            (key.0, nodes, stats)
        });
        for (first, nodes, stats) in subtrees {
            tree.stats.merge(&stats);
            let parent = root_of[&first];
            tree.graft(parent, nodes);
        }
        tree
    }
}

/// Lego step for a single node of an existing tree.
pub fn lego(ctx: &MiningContext<'_>, tree: &mut EnumerationTree, node: usize) {
    let mut nodes = vec![TreeNode {
        parent: None,
        children: Vec::new(),
        ..tree.nodes[node].clone()
    }];
    let mut stats = MiningStats::default();
    ctx.grow(&mut nodes, 0, &mut stats);
    tree.stats.merge(&stats);
    let children: Vec<TreeNode> = nodes.into_iter().skip(1).collect();
    if children.is_empty() {
        return;
    }
    // re-root: children of the local root hang under `node`
    let offset = tree.nodes.len();
    for mut n in children {
        n.parent = Some(match n.parent {
            Some(0) | None => node,
            Some(p) => p - 1 + offset,
        });
        for c in &mut n.children {
            *c = *c - 1 + offset;
        }
        let id = tree.nodes.len();
        if n.parent == Some(node) {
            tree.nodes[node].children.push(id);
        }
        tree.nodes.push(n);
    }
}

/// Supporting instances of one candidate, found by extending the instances
/// of its prefix.
pub fn search_supporting_instances(
    ctx: &MiningContext<'_>,
    candidate: &Tirp,
    parent_instances: &Instances,
) -> SupportStats {
    let k = candidate.size();
    let parent = candidate.prefix();
    let column = &candidate.relations[super::column_offset(k - 1)..];
    let r = *column.last().expect("candidate of size >= 2");
    let groups = ctx.extend(
        &parent,
        parent_instances,
        r,
        candidate.last_symbol(),
        Some(column),
    );
    let inst = groups
        .into_values()
        .next()
        .unwrap_or_else(|| Instances::new(k));
    SupportStats::from_instances(inst, ctx.db.len())
}
