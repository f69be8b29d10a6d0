//! Learning MCCGs: skeleton search over current adjacencies, undirected
//! triplex middles, then repair until the result is maximal.

use super::{discover_skeleton, SeparatorTable};
use crate::error::Result;
use crate::graph::{EdgeKind, MixedGraph};
use crate::oracle::IndependenceOracle;

#[derive(Clone, Debug)]
pub struct MccgLearnResult {
    pub graph: MixedGraph,
    pub separators: SeparatorTable,
}

pub fn learn_mccg(oracle: &dyn IndependenceOracle) -> Result<MccgLearnResult> {
    let names = oracle.variables().to_vec();
    let (adj, separators) = discover_skeleton(oracle, |adj, a, b| adj[a].without(b))?;
    let mut g = MixedGraph::new(names)?;
    for (a, &nb) in adj.iter().enumerate() {
        for b in nb.iter().filter(|&b| b > a) {
            g.add_edge(a, b, EdgeKind::Bidirected)?;
        }
    }
    // every a <-> b <-> c with b separating a and c: b's edges go undirected
    let mut to_line = Vec::new();
    for b in 0..g.node_count() {
        for a in g.adj(b) {
            for c in g.adj(b).iter().filter(|&c| c > a) {
                if g.adjacent(a, c) {
                    continue;
                }
                let s = separators
                    .get(a, c)
                    .expect("non-adjacent pairs carry a separator");
                if s.contains(b) {
                    to_line.push((a, b));
                    to_line.push((b, c));
                }
            }
        }
    }
    for (x, y) in to_line {
        g.set_edge(x, y, EdgeKind::Undirected)?;
    }
    let graph = fix_c1c2(&g)?;
    Ok(MccgLearnResult { graph, separators })
}

/// Turns bidirected edges undirected, one at a time, until the graph is an
/// MCCG. Each round takes the first bidirected edge (lexicographic order)
/// with an end point in the middle of an induced undirected path `x - e - y`;
/// failing that, the first one whose ends share an undirected component.
pub fn fix_c1c2(g: &MixedGraph) -> Result<MixedGraph> {
    if g.has_directed() {
        return Err(crate::error::CgError::WrongGraphKind {
            expected: "a graph without directed edges",
            found: "directed edges".into(),
        });
    }
    let mut cur = g.clone();
    loop {
        let bid: Vec<(usize, usize)> = cur
            .edges()
            .into_iter()
            .filter(|e| e.kind == EdgeKind::Bidirected)
            .map(|e| (e.from, e.to))
            .collect();
        let middle = |e: usize| {
            let u = cur.und(e);
            u.iter()
                .any(|x| u.iter().any(|y| y > x && !cur.adjacent(x, y)))
        };
        let hit = bid
            .iter()
            .find(|&&(a, b)| middle(a) || middle(b))
            .or_else(|| bid.iter().find(|&&(a, b)| cur.component_of(a).contains(b)));
        match hit {
            Some(&(a, b)) => cur.set_edge(a, b, EdgeKind::Undirected)?,
            None => return Ok(cur),
        }
    }
}
