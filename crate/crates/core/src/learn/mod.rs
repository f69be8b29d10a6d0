//! Constraint-based structure learning: a shared adjacency phase plus the
//! orientation phases for AMP chain graphs and MCCGs.

mod amp;
mod mccg;

use std::collections::BTreeMap;

pub use amp::{apply_rules, finalize, learn_amp, learn_amp_with, AmpLearnResult, AmpOptions, Rule};
pub use mccg::{fix_c1c2, learn_mccg, MccgLearnResult};

use crate::error::Result;
use crate::nodeset::NodeSet;
use crate::oracle::IndependenceOracle;

/// Mark at one end of a learned edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EndMark {
    /// Unspecified: an arrowhead may still end up here.
    Circle,
    /// The end is known not to be an arrowhead.
    Block,
}

/// Undirected skeleton whose edge ends carry marks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedGraph {
    names: Vec<String>,
    adj: Vec<NodeSet>,
    /// `block[a]` holds `b` when `a`'s end of the edge `a b` is blocked.
    block: Vec<NodeSet>,
}

impl MarkedGraph {
    pub fn new(names: Vec<String>, adj: Vec<NodeSet>) -> Self {
        let n = adj.len();
        MarkedGraph {
            names,
            adj,
            block: vec![NodeSet::EMPTY; n],
        }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn adj(&self, a: usize) -> NodeSet {
        self.adj[a]
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(b)
    }

    /// Mark at `a`'s end of the edge between `a` and `b`.
    pub fn mark(&self, a: usize, b: usize) -> EndMark {
        if self.block[a].contains(b) {
            EndMark::Block
        } else {
            EndMark::Circle
        }
    }

    pub fn blocked(&self, a: usize, b: usize) -> bool {
        self.block[a].contains(b)
    }

    /// Blocks `a`'s end of the edge `a b`; returns whether this is new.
    pub fn add_block(&mut self, a: usize, b: usize) -> bool {
        debug_assert!(self.adjacent(a, b));
        let new = !self.block[a].contains(b);
        self.block[a].insert(b);
        new
    }

    /// Edges as `(a, b)` with `a < b`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.node_count())
            .flat_map(|a| {
                self.adj[a]
                    .iter()
                    .filter(move |&b| b > a)
                    .map(move |b| (a, b))
            })
            .collect()
    }

    /// Every blocked end as `(at, other)`.
    pub fn blocks(&self) -> Vec<(usize, usize)> {
        (0..self.node_count())
            .flat_map(|a| self.block[a].iter().map(move |b| (a, b)))
            .collect()
    }
}

/// Separating sets found while removing edges, keyed by unordered pair.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SeparatorTable {
    map: BTreeMap<(usize, usize), NodeSet>,
}

impl SeparatorTable {
    fn key(a: usize, b: usize) -> (usize, usize) {
        (a.min(b), a.max(b))
    }

    pub fn insert(&mut self, a: usize, b: usize, s: NodeSet) {
        self.map.insert(Self::key(a, b), s);
    }

    pub fn get(&self, a: usize, b: usize) -> Option<NodeSet> {
        self.map.get(&Self::key(a, b)).copied()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), NodeSet)> + '_ {
        self.map.iter().map(|(&k, &v)| (k, v))
    }

    /// `{"A|B":["C"],...}` with sorted keys and members.
    pub fn to_json(&self, names: &[String]) -> String {
        let map: BTreeMap<String, Vec<&str>> = self
            .iter()
            .map(|((a, b), s)| {
                (
                    format!("{}|{}", names[a], names[b]),
                    s.iter().map(|i| names[i].as_str()).collect(),
                )
            })
            .collect();
        serde_json::to_string(&map).expect("separators serialize")
    }
}

/// Removes edges from the complete graph: for `l = 0, 1, ...` and each
/// ordered adjacent pair, the first `l`-subset of `pool(adj, a, b)` that
/// separates the pair (lexicographic order) is recorded and the edge
/// dropped.
fn discover_skeleton(
    oracle: &dyn IndependenceOracle,
    pool: impl Fn(&[NodeSet], usize, usize) -> NodeSet,
) -> Result<(Vec<NodeSet>, SeparatorTable)> {
    let n = oracle.variables().len();
    let mut adj: Vec<NodeSet> = (0..n).map(|i| NodeSet::full(n).without(i)).collect();
    let mut seps = SeparatorTable::default();
    for l in 0..=n.saturating_sub(2) {
        for a in 0..n {
            for b in 0..n {
                if !adj[b].contains(a) {
                    continue;
                }
                let cand = pool(&adj, a, b);
                if cand.len() < l {
                    continue;
                }
                for s in cand.subsets_of_size(l) {
                    if oracle.independent(a, b, s)? {
                        seps.insert(a, b, s);
                        adj[a].remove(b);
                        adj[b].remove(a);
                        break;
                    }
                }
            }
        }
    }
    Ok((adj, seps))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separator_table_is_symmetric_and_serializes() {
        let mut t = SeparatorTable::default();
        t.insert(2, 0, NodeSet::singleton(1));
        assert_eq!(t.get(0, 2), Some(NodeSet::singleton(1)));
        let names: Vec<String> = ["A", "B", "C"].iter().map(|s| s.to_string()).collect();
        assert_eq!(t.to_json(&names), r#"{"A|C":["B"]}"#);
    }

    #[test]
    fn marks_only_grow() {
        let mut m = MarkedGraph::new(
            vec!["A".into(), "B".into()],
            vec![NodeSet::singleton(1), NodeSet::singleton(0)],
        );
        assert_eq!(m.mark(0, 1), EndMark::Circle);
        assert!(m.add_block(0, 1));
        assert!(!m.add_block(0, 1));
        assert_eq!(m.mark(0, 1), EndMark::Block);
        assert_eq!(m.mark(1, 0), EndMark::Circle);
    }
}
