//! Brute-force reference implementations shared by the integration tests.
//! Nothing here calls into the library's separation or equivalence code.
#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use cgkit_core::{is_head_no_tail, End, MixedGraph, NodeSet};

pub fn g(edges: &str) -> MixedGraph {
    MixedGraph::from_edges(&[], edges).unwrap()
}

/// AMP separation by breadth-first search over `(previous, current)` route
/// states. A route may revisit nodes; an inner node passes when it is
/// head-no-tail and in `z`, or neither.
pub fn route_separated(g: &MixedGraph, x: NodeSet, y: NodeSet, z: NodeSet) -> bool {
    let n = g.node_count();
    let mut seen = vec![vec![false; n]; n];
    let mut queue = VecDeque::new();
    for a in x {
        for b in g.adj(a) {
            if !seen[a][b] {
                seen[a][b] = true;
                queue.push_back((a, b));
            }
        }
    }
    while let Some((p, c)) = queue.pop_front() {
        if y.contains(c) {
            return false;
        }
        let into = g.end(c, p).unwrap();
        for nx in g.adj(c) {
            let hnt = is_head_no_tail(into, g.end(c, nx).unwrap());
            if hnt != z.contains(c) || seen[c][nx] {
                continue;
            }
            seen[c][nx] = true;
            queue.push_back((c, nx));
        }
    }
    true
}

/// Separation in a graph with undirected and bidirected edges by listing
/// every simple path between `x` and `y`: a path is open when each inner
/// node is in `z` exactly when both path ends at it are not undirected.
pub fn path_separated(g: &MixedGraph, x: NodeSet, y: NodeSet, z: NodeSet) -> bool {
    fn open_from(g: &MixedGraph, path: &mut Vec<usize>, y: NodeSet, z: NodeSet) -> bool {
        let cur = *path.last().unwrap();
        if path.len() > 1 && y.contains(cur) {
            return true;
        }
        for nx in g.adj(cur) {
            if path.contains(&nx) {
                continue;
            }
            if path.len() > 1 {
                let prev = path[path.len() - 2];
                let hnt = is_head_no_tail(g.end(cur, prev).unwrap(), g.end(cur, nx).unwrap());
                if hnt != z.contains(cur) {
                    continue;
                }
            }
            path.push(nx);
            if open_from(g, path, y, z) {
                return true;
            }
            path.pop();
        }
        false
    }
    !x.iter().any(|a| open_from(g, &mut vec![a], y, z))
}

/// Every `(x, y, z)` over `n` nodes with `x`, `y` non-empty and the three
/// sets pairwise disjoint.
pub fn triples(n: usize) -> Vec<(NodeSet, NodeSet, NodeSet)> {
    let mut out = Vec::new();
    for code in 0..4u32.pow(n as u32) {
        let mut s = [NodeSet::EMPTY; 4];
        let mut c = code;
        for i in 0..n {
            s[(c % 4) as usize].insert(i);
            c /= 4;
        }
        if !s[1].is_empty() && !s[2].is_empty() {
            out.push((s[1], s[2], s[3]));
        }
    }
    out
}

pub fn skeleton(g: &MixedGraph) -> u64 {
    let n = g.node_count();
    let mut bits = 0u64;
    let mut k = 0;
    for a in 0..n {
        for b in a + 1..n {
            if g.end(a, b).is_some() {
                bits |= 1 << k;
            }
            k += 1;
        }
    }
    bits
}

/// `(a, b, c)` with `a < c` non-adjacent and `b` a head-no-tail middle.
pub fn triplexes(g: &MixedGraph) -> BTreeSet<(usize, usize, usize)> {
    unshielded(g, is_head_no_tail)
}

/// Triplexes with exactly one arrowhead at the middle.
pub fn flags(g: &MixedGraph) -> BTreeSet<(usize, usize, usize)> {
    unshielded(g, |ea, ec| {
        matches!((ea, ec), (End::Head, End::Line) | (End::Line, End::Head))
    })
}

fn unshielded(g: &MixedGraph, keep: impl Fn(End, End) -> bool) -> BTreeSet<(usize, usize, usize)> {
    let n = g.node_count();
    let mut out = BTreeSet::new();
    for b in 0..n {
        for a in 0..n {
            for c in a + 1..n {
                let (Some(ea), Some(ec)) = (g.end(b, a), g.end(b, c)) else {
                    continue;
                };
                if a != b && c != b && g.end(a, c).is_none() && keep(ea, ec) {
                    out.insert((a, b, c));
                }
            }
        }
    }
    out
}

pub type ClassKey = (Vec<String>, u64, BTreeSet<(usize, usize, usize)>);

pub fn class_key(g: &MixedGraph) -> ClassKey {
    (g.names().to_vec(), skeleton(g), triplexes(g))
}

pub fn same_class(g: &MixedGraph, h: &MixedGraph) -> bool {
    class_key(g) == class_key(h)
}

pub fn bidirected_pairs(g: &MixedGraph) -> BTreeSet<(usize, usize)> {
    let n = g.node_count();
    let mut out = BTreeSet::new();
    for a in 0..n {
        for b in a + 1..n {
            if g.bid(a).contains(b) {
                out.insert((a, b));
            }
        }
    }
    out
}

/// Semidirected cycle by search from each node along undirected edges and
/// forward directed edges, requiring at least one directed step.
pub fn has_semidirected_cycle(g: &MixedGraph) -> bool {
    let n = g.node_count();
    for s in 0..n {
        // state: (node, used a directed edge yet)
        let mut seen = vec![[false; 2]; n];
        let mut stack = vec![(s, 0usize)];
        while let Some((v, d)) = stack.pop() {
            for w in g.adj(v) {
                let step = match (g.end(v, w), g.end(w, v)) {
                    (Some(End::Line), _) => Some(d),
                    (Some(End::Tail), Some(End::Head)) => Some(1),
                    _ => None,
                };
                let Some(nd) = step else { continue };
                if w == s && nd == 1 {
                    return true;
                }
                if !seen[w][nd] {
                    seen[w][nd] = true;
                    stack.push((w, nd));
                }
            }
        }
    }
    false
}
