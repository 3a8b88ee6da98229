use serde::{Deserialize, Serialize};

use super::support::SupportStats;
use super::Tirp;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeNode {
    pub tirp: Tirp,
    pub stats: SupportStats,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

/// Candidate counts observed while mining, indexed by pattern size.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MiningStats {
    pub candidates_per_size: Vec<u64>,
}

impl MiningStats {
    pub(crate) fn add_candidates(&mut self, size: usize, n: u64) {
        if self.candidates_per_size.len() <= size {
            self.candidates_per_size.resize(size + 1, 0);
        }
        self.candidates_per_size[size] = self.candidates_per_size[size].saturating_add(n);
    }

    pub(crate) fn merge(&mut self, other: &MiningStats) {
        for (size, &n) in other.candidates_per_size.iter().enumerate() {
            self.add_candidates(size, n);
        }
    }

    /// Largest number of candidates generated for any single pattern size.
    pub fn peak_candidates(&self) -> u64 {
        self.candidates_per_size.iter().copied().max().unwrap_or(0)
    }

    pub fn total_candidates(&self) -> u64 {
        self.candidates_per_size.iter().sum()
    }
}

/// Prefix tree of frequent patterns. Level-1 nodes are the roots; each child
/// extends its parent by one interval.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationTree {
    pub nodes: Vec<TreeNode>,
    pub roots: Vec<usize>,
    /// Number of entities in the mined database.
    pub total_entities: usize,
    pub stats: MiningStats,
}

impl EnumerationTree {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub(crate) fn push(&mut self, node: TreeNode) -> usize {
        let id = self.nodes.len();
        match node.parent {
            Some(p) => self.nodes[p].children.push(id),
            None => self.roots.push(id),
        }
        self.nodes.push(node);
        id
    }

    /// Appends a detached subtree whose parent links are local to it; its
    /// first node is attached under `parent`.
    pub(crate) fn graft(&mut self, parent: usize, subtree: Vec<TreeNode>) {
        let offset = self.nodes.len();
        for (local, mut node) in subtree.into_iter().enumerate() {
            node.parent = Some(match node.parent {
                Some(p) => p + offset,
                None => parent,
            });
            for c in &mut node.children {
                *c += offset;
            }
            if local == 0 {
                self.nodes[parent].children.push(offset);
            }
            self.nodes.push(node);
        }
    }

    /// Nodes in canonical order: size, symbols, relations.
    pub fn patterns(&self) -> Vec<&TreeNode> {
        let mut v: Vec<&TreeNode> = self.nodes.iter().collect();
        v.sort_by(|a, b| a.tirp.canonical_cmp(&b.tirp));
        v
    }

    pub fn find(&self, tirp: &Tirp) -> Option<&TreeNode> {
        self.nodes.iter().find(|n| &n.tirp == tirp)
    }

    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|n| n.tirp.size()).max().unwrap_or(0)
    }
}
