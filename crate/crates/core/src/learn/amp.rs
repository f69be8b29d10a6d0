//! Learning AMP chain graphs: skeleton search over the two-step
//! neighbourhood, then block propagation by four rules and orientation.

use super::{discover_skeleton, MarkedGraph, SeparatorTable};
use crate::error::{CgError, Result};
use crate::graph::{EdgeKind, MixedGraph};
use crate::nodeset::NodeSet;
use crate::oracle::IndependenceOracle;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    R1,
    R2,
    R3,
    R4,
}

/// Which rules run, in which order within each pass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmpOptions {
    pub schedule: Vec<Rule>,
}

impl Default for AmpOptions {
    fn default() -> Self {
        AmpOptions {
            schedule: vec![Rule::R1, Rule::R2, Rule::R3, Rule::R4],
        }
    }
}

impl AmpOptions {
    pub fn reversed() -> Self {
        AmpOptions {
            schedule: vec![Rule::R4, Rule::R3, Rule::R2, Rule::R1],
        }
    }
}

#[derive(Clone, Debug)]
pub struct AmpLearnResult {
    pub graph: MixedGraph,
    pub separators: SeparatorTable,
    /// Marks after the rules reached their fixpoint.
    pub marks: MarkedGraph,
}

pub fn learn_amp(oracle: &dyn IndependenceOracle) -> Result<AmpLearnResult> {
    learn_amp_with(oracle, &AmpOptions::default())
}

pub fn learn_amp_with(
    oracle: &dyn IndependenceOracle,
    opts: &AmpOptions,
) -> Result<AmpLearnResult> {
    let names = oracle.variables().to_vec();
    MixedGraph::new(names.clone())?;
    let (adj, separators) = discover_skeleton(oracle, |adj, a, b| {
        let near = adj[a];
        let two_steps = near.iter().fold(near, |acc, v| acc.union(adj[v]));
        two_steps.without(a).without(b)
    })?;
    let mut marks = MarkedGraph::new(names, adj);
    apply_rules_with(&mut marks, &separators, opts);
    let graph = finalize(&marks)?;
    Ok(AmpLearnResult {
        graph,
        separators,
        marks,
    })
}

/// Runs the default rule schedule to its fixpoint.
pub fn apply_rules(h: &mut MarkedGraph, seps: &SeparatorTable) {
    apply_rules_with(h, seps, &AmpOptions::default());
}

fn apply_rules_with(h: &mut MarkedGraph, seps: &SeparatorTable, opts: &AmpOptions) {
    loop {
        let mut changed = false;
        for rule in &opts.schedule {
            changed |= match rule {
                Rule::R1 => rule1(h, seps),
                Rule::R2 => rule2(h, seps),
                Rule::R3 => rule3(h),
                Rule::R4 => rule4(h, seps),
            };
        }
        if !changed {
            return;
        }
    }
}

fn separator(seps: &SeparatorTable, a: usize, c: usize) -> NodeSet {
    seps.get(a, c)
        .expect("non-adjacent pairs carry a separator")
}

/// Induced `a - b - c` with `b` outside `S_ac`: block the outer ends.
fn rule1(h: &mut MarkedGraph, seps: &SeparatorTable) -> bool {
    let mut changed = false;
    for a in 0..h.node_count() {
        for b in h.adj(a) {
            for c in h.adj(b).without(a) {
                if h.adjacent(a, c) || separator(seps, a, c).contains(b) {
                    continue;
                }
                changed |= h.add_block(a, b);
                changed |= h.add_block(c, b);
            }
        }
    }
    changed
}

/// Induced `a |-o b - c` with `b` in `S_ac`: block `b`'s end of `b c`.
fn rule2(h: &mut MarkedGraph, seps: &SeparatorTable) -> bool {
    let mut changed = false;
    for a in 0..h.node_count() {
        for b in h.adj(a) {
            if !h.blocked(a, b) {
                continue;
            }
            for c in h.adj(b).without(a) {
                if !h.adjacent(a, c) && separator(seps, a, c).contains(b) {
                    changed |= h.add_block(b, c);
                }
            }
        }
    }
    changed
}

/// Chordless cycle `a |-o ... |-o b` closed by `a b`: block `a`'s end.
fn rule3(h: &mut MarkedGraph) -> bool {
    let mut changed = false;
    for a in 0..h.node_count() {
        for b in h.adj(a) {
            if !h.blocked(a, b) && blocked_chordless_path(h, a, b) {
                changed |= h.add_block(a, b);
            }
        }
    }
    changed
}

/// Whether a path `a = v1, ..., vk = b` with `k >= 3` exists whose every
/// edge is blocked at its start, such that the cycle it forms with `a b` is
/// chordless.
fn blocked_chordless_path(h: &MarkedGraph, a: usize, b: usize) -> bool {
    fn extend(
        h: &MarkedGraph,
        path: &mut Vec<usize>,
        on_path: NodeSet,
        a: usize,
        b: usize,
    ) -> bool {
        let v = *path.last().unwrap();
        let earlier = on_path.without(v);
        for w in h.adj(v).difference(on_path) {
            if !h.blocked(v, w) {
                continue;
            }
            if w == b {
                // closing: b may touch only v and a
                if path.len() >= 2 && h.adj(b).intersection(earlier).without(a).is_empty() {
                    return true;
                }
                continue;
            }
            // w may touch only v among the path so far
            if !h.adj(w).intersection(earlier).is_empty() {
                continue;
            }
            path.push(w);
            let found = extend(h, path, on_path.with(w), a, b);
            path.pop();
            if found {
                return true;
            }
        }
        false
    }
    extend(h, &mut vec![a], NodeSet::singleton(a), a, b)
}

/// `a` adjacent to `b`, `c`, `d`; `c |-o b` and `d |-o b`; `c`, `d`
/// non-adjacent with `a` in `S_cd`: block `a`'s end of `a b`.
fn rule4(h: &mut MarkedGraph, seps: &SeparatorTable) -> bool {
    let mut changed = false;
    for a in 0..h.node_count() {
        for b in h.adj(a) {
            if h.blocked(a, b) {
                continue;
            }
            let both = h.adj(a).intersection(h.adj(b));
            let fires = both.iter().any(|c| {
                h.blocked(c, b)
                    && both.iter().any(|d| {
                        d > c
                            && h.blocked(d, b)
                            && !h.adjacent(c, d)
                            && separator(seps, c, d).contains(a)
                    })
            });
            if fires {
                changed |= h.add_block(a, b);
            }
        }
    }
    changed
}

/// Edges blocked at exactly one end point away from it; all others become
/// undirected. A result with a semidirected cycle is reported as a
/// learning failure carrying the graph.
pub fn finalize(h: &MarkedGraph) -> Result<MixedGraph> {
    let mut g = MixedGraph::new(h.names().to_vec())?;
    for (a, b) in h.edges() {
        match (h.blocked(a, b), h.blocked(b, a)) {
            (true, false) => g.add_edge(a, b, EdgeKind::Directed)?,
            (false, true) => g.add_edge(b, a, EdgeKind::Directed)?,
            _ => g.add_edge(a, b, EdgeKind::Undirected)?,
        }
    }
    if g.has_semidirected_cycle() {
        return Err(CgError::LearnFailure {
            diagnostics: format!("result has a semidirected cycle: {g}"),
            graph: Box::new(g),
        });
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::all_chain_graphs;
    use crate::equivalence::{is_deflagged, triplex_equivalent};
    use crate::graph::End;
    use crate::oracle::GraphOracle;

    fn g(edges: &str) -> MixedGraph {
        MixedGraph::from_edges(&[], edges).unwrap()
    }

    fn learn(truth: &MixedGraph) -> AmpLearnResult {
        learn_amp(&GraphOracle::new(truth.clone()).unwrap()).unwrap()
    }

    fn path3(sep: NodeSet) -> (MarkedGraph, SeparatorTable) {
        let names = vec!["A".into(), "B".into(), "C".into()];
        let adj = vec![NodeSet::singleton(1), NodeSet(0b101), NodeSet::singleton(1)];
        let mut seps = SeparatorTable::default();
        seps.insert(0, 2, sep);
        (MarkedGraph::new(names, adj), seps)
    }

    #[test]
    fn learns_faithful_undirected_graph_unchanged() {
        let truth = g("A--B A--C B--D C--D D--E");
        assert_eq!(learn(&truth).graph, truth);
    }

    #[test]
    fn learns_immorality() {
        let truth = g("A->B C->B");
        assert_eq!(learn(&truth).graph, truth);
    }

    #[test]
    fn learns_empty_graph() {
        let truth = MixedGraph::lettered(3);
        let out = learn(&truth);
        assert_eq!(out.graph, truth);
        assert_eq!(out.separators.len(), 3);
    }

    #[test]
    fn rule1_blocks_outer_ends() {
        let (mut h, seps) = path3(NodeSet::EMPTY);
        assert!(rule1(&mut h, &seps));
        assert!(h.blocked(0, 1) && h.blocked(2, 1));
        assert!(!h.blocked(1, 0) && !h.blocked(1, 2));
        assert_eq!(finalize(&h).unwrap(), g("A->B C->B"));
    }

    #[test]
    fn rule2_propagates_through_separator() {
        let (mut h, seps) = path3(NodeSet::singleton(1));
        h.add_block(0, 1);
        assert!(!rule1(&mut h, &seps));
        assert!(rule2(&mut h, &seps));
        assert!(h.blocked(1, 2));
        assert_eq!(finalize(&h).unwrap(), g("A->B B->C"));
    }

    #[test]
    fn rule3_closes_triangle() {
        let names = vec!["A".into(), "B".into(), "M".into()];
        let adj = vec![NodeSet(0b110), NodeSet(0b101), NodeSet(0b011)];
        let mut h = MarkedGraph::new(names, adj);
        h.add_block(0, 2);
        h.add_block(2, 1);
        assert!(rule3(&mut h));
        assert!(h.blocked(0, 1));
        assert!(!h.blocked(1, 0));
    }

    #[test]
    fn rule3_ignores_cycles_with_chords() {
        // square A-M-N-B-A with chord A-N
        let names: Vec<String> = ["A", "B", "M", "N"].iter().map(|s| s.to_string()).collect();
        let (a, b, m, n) = (0, 1, 2, 3);
        let mut adj = vec![NodeSet::EMPTY; 4];
        for (x, y) in [(a, m), (m, n), (n, b), (b, a), (a, n)] {
            adj[x].insert(y);
            adj[y].insert(x);
        }
        let mut h = MarkedGraph::new(names, adj);
        h.add_block(a, m);
        h.add_block(m, n);
        h.add_block(n, b);
        // A-M-N-B is chorded by A-N, but A-N-B is a chordless triangle
        // only if A |-o N, which is not the case
        assert!(!blocked_chordless_path(&h, a, b));
        h.add_block(a, n);
        assert!(blocked_chordless_path(&h, a, b));
    }

    #[test]
    fn finalize_mapping() {
        let (mut h, _) = path3(NodeSet::EMPTY);
        h.add_block(0, 1);
        h.add_block(1, 0);
        h.add_block(1, 2);
        assert_eq!(finalize(&h).unwrap(), g("A--B B->C"));
    }

    /// Whether `a`'s end of edge `a b` is an arrowhead in `truth`.
    fn arrowhead(truth: &MixedGraph, a: usize, b: usize) -> bool {
        truth.end(a, b) == Some(End::Head)
    }

    /// Chordless cycles as node sequences starting at their smallest node,
    /// each listed once per direction.
    fn chordless_cycles(h: &MarkedGraph) -> Vec<Vec<usize>> {
        fn walk(h: &MarkedGraph, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            let v = *path.last().unwrap();
            let s = path[0];
            if path.len() >= 3 && h.adjacent(v, s) && is_chordless(h, path) {
                out.push(path.clone());
            }
            for w in h.adj(v) {
                if w > s && !path.contains(&w) {
                    path.push(w);
                    walk(h, path, out);
                    path.pop();
                }
            }
        }
        fn is_chordless(h: &MarkedGraph, cyc: &[usize]) -> bool {
            let k = cyc.len();
            (0..k)
                .all(|i| (i + 2..k).all(|j| (i == 0 && j == k - 1) || !h.adjacent(cyc[i], cyc[j])))
        }
        let mut out = Vec::new();
        for s in 0..h.node_count() {
            walk(h, &mut vec![s], &mut out);
        }
        out
    }

    fn learner_invariant_violations(truth: &MixedGraph, out: &AmpLearnResult) -> Vec<String> {
        let h = &out.marks;
        let mut bad = Vec::new();
        for (x, y) in h.blocks() {
            if arrowhead(truth, x, y) {
                bad.push(format!("block at arrowhead {x}-{y}"));
            }
        }
        for a in 0..h.node_count() {
            for b in h.adj(a) {
                for c in h.adj(b).intersection(h.adj(a)) {
                    let plain = |x: usize, y: usize| !h.blocked(x, y) && !h.blocked(y, x);
                    if h.blocked(a, b) && plain(b, c) && plain(a, c) {
                        bad.push(format!("shape |-o - - on {a},{b},{c}"));
                    }
                }
            }
        }
        for cyc in chordless_cycles(h) {
            let k = cyc.len();
            for dir in [false, true] {
                let seq: Vec<usize> = if dir {
                    cyc.iter().rev().copied().collect()
                } else {
                    cyc.clone()
                };
                let step = |i: usize| (seq[i], seq[(i + 1) % k]);
                let forward = (0..k).any(|i| {
                    let (u, v) = step(i);
                    h.blocked(u, v) && !h.blocked(v, u)
                });
                let backward = (0..k).any(|i| {
                    let (u, v) = step(i);
                    h.blocked(v, u) && !h.blocked(u, v)
                });
                if forward && !backward {
                    bad.push(format!("one-way blocked cycle {seq:?}"));
                }
            }
        }
        bad
    }

    #[test]
    fn recovery_and_invariants_on_all_four_node_graphs() {
        for n in 1..=4 {
            for truth in all_chain_graphs(n) {
                let out = learn(&truth);
                assert!(out.graph.is_chain_graph().unwrap());
                assert!(
                    triplex_equivalent(&out.graph, &truth).unwrap(),
                    "{truth:?} -> {:?}",
                    out.graph
                );
                assert!(is_deflagged(&out.graph, 5).unwrap(), "{truth:?}");
                let bad = learner_invariant_violations(&truth, &out);
                assert!(bad.is_empty(), "{truth:?}: {bad:?}");
                let rev = learn_amp_with(
                    &GraphOracle::new(truth.clone()).unwrap(),
                    &AmpOptions::reversed(),
                )
                .unwrap();
                assert_eq!(rev.graph, out.graph, "schedule dependence on {truth:?}");
            }
        }
    }

    #[test]
    fn chordless_cycle_finder() {
        let sq = g("A--B B--C C--D D--A");
        let h = MarkedGraph::new(sq.names().to_vec(), (0..4).map(|i| sq.adj(i)).collect());
        assert_eq!(chordless_cycles(&h).len(), 2);
        let chorded = g("A--B B--C C--D D--A A--C");
        let h = MarkedGraph::new(
            chorded.names().to_vec(),
            (0..4).map(|i| chorded.adj(i)).collect(),
        );
        // two triangles, each found in both directions
        assert_eq!(chordless_cycles(&h).len(), 4);
    }
}
