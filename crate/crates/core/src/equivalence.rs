//! Triplex equivalence, feasible bidirectings and the canonical member of
//! an MCCG equivalence class with the most bidirected edges.

use std::collections::BTreeSet;

use crate::error::{CgError, Result};
use crate::graph::{EdgeKind, MixedGraph};
use crate::nodeset::NodeSet;

/// Default node bound for brute-force class enumeration.
pub const DEFAULT_CLASS_BOUND: usize = 5;

/// Graph family a class is enumerated in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Chain,
    Mccg,
}

impl Family {
    /// Family of `g`, or `None` when `g` has only undirected edges and so
    /// belongs to both.
    pub fn of(g: &MixedGraph) -> Result<Option<Family>> {
        match (g.has_directed(), g.has_bidirected()) {
            (true, true) => Err(CgError::WrongGraphKind {
                expected: "a chain graph or an MCCG",
                found: "directed and bidirected edges together".into(),
            }),
            (true, false) => Ok(Some(Family::Chain)),
            (false, true) => Ok(Some(Family::Mccg)),
            (false, false) => Ok(None),
        }
    }

    fn require(self, g: &MixedGraph) -> Result<()> {
        match self {
            Family::Chain => g.require_chain_graph(),
            Family::Mccg => g.require_mccg(),
        }
    }
}

fn same_nodes(g: &MixedGraph, h: &MixedGraph) -> Result<()> {
    if g.names() == h.names() {
        Ok(())
    } else {
        Err(CgError::Precondition(
            "graphs are over different node sets".into(),
        ))
    }
}

/// Same adjacencies and same triplexes. Both graphs must be chain graphs or
/// both MCCGs.
pub fn triplex_equivalent(g: &MixedGraph, h: &MixedGraph) -> Result<bool> {
    same_nodes(g, h)?;
    let family = match (Family::of(g)?, Family::of(h)?) {
        (Some(a), Some(b)) if a != b => {
            return Err(CgError::WrongGraphKind {
                expected: "two graphs of the same family",
                found: "a chain graph and an MCCG".into(),
            })
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => Family::Chain,
    };
    family.require(g)?;
    family.require(h)?;
    Ok(g.skeleton() == h.skeleton() && g.triplexes() == h.triplexes())
}

/// Markov equivalence of two MCCGs, decided through triplex equivalence.
pub fn markov_equivalent_mccg(g: &MixedGraph, h: &MixedGraph) -> Result<bool> {
    g.require_mccg()?;
    h.require_mccg()?;
    triplex_equivalent(g, h)
}

/// Turns every edge of the complete undirected component `k` bidirected.
pub fn feasible_bidirect(g: &MixedGraph, k: NodeSet) -> Result<MixedGraph> {
    g.require_mccg()?;
    let Some(first) = k.min() else {
        return Err(CgError::Precondition("empty component".into()));
    };
    if !k.is_subset(g.nodes()) || g.component_of(first) != k {
        return Err(CgError::Precondition(format!(
            "{} is not an undirected component",
            g.fmt_set(k)
        )));
    }
    if !g.is_complete(k) {
        return Err(CgError::Precondition(format!(
            "{} is not complete",
            g.fmt_set(k)
        )));
    }
    let mut h = g.clone();
    for a in k {
        for b in k.iter().filter(|&b| b > a) {
            h.set_edge(a, b, EdgeKind::Bidirected)?;
        }
    }
    Ok(h)
}

/// Applies feasible bidirectings until none is left, always taking the
/// component with the smallest node first.
pub fn blargest(g: &MixedGraph) -> Result<MixedGraph> {
    g.require_mccg()?;
    let mut cur = g.clone();
    loop {
        let next = cur
            .undirected_components()
            .into_iter()
            .find(|k| k.len() >= 2 && cur.is_complete(*k));
        match next {
            Some(k) => cur = feasible_bidirect(&cur, k)?,
            None => return Ok(cur),
        }
    }
}

/// Every graph of `family` over the nodes of `g` with the same adjacencies
/// and triplexes, found by trying each edge-type assignment on the skeleton.
pub fn enumerate_triplex_class(
    g: &MixedGraph,
    family: Family,
    bound: usize,
) -> Result<BTreeSet<MixedGraph>> {
    if g.node_count() > bound {
        return Err(CgError::BoundExceeded {
            bound,
            actual: g.node_count(),
        });
    }
    family.require(g)?;
    let skel: Vec<(usize, usize)> = g.skeleton().into_iter().collect();
    let choices: &[(EdgeKind, bool)] = match family {
        Family::Chain => &[
            (EdgeKind::Undirected, true),
            (EdgeKind::Directed, true),
            (EdgeKind::Directed, false),
        ],
        Family::Mccg => &[(EdgeKind::Undirected, true), (EdgeKind::Bidirected, true)],
    };
    let k = choices.len();
    let target = g.triplexes();
    let empty = MixedGraph::new(g.names().to_vec())?;
    let mut out = BTreeSet::new();
    for code in 0..k.pow(skel.len() as u32) {
        let mut h = empty.clone();
        let mut c = code;
        for &(a, b) in &skel {
            let (kind, fwd) = choices[c % k];
            c /= k;
            let (x, y) = if fwd { (a, b) } else { (b, a) };
            h.add_edge(x, y, kind)?;
        }
        let valid = match family {
            Family::Chain => !h.has_semidirected_cycle(),
            Family::Mccg => h.is_mccg()?,
        };
        if valid && h.triplexes() == target {
            out.insert(h);
        }
    }
    Ok(out)
}

/// True iff every flag of `g` appears in every chain graph triplex
/// equivalent to it.
pub fn is_deflagged(g: &MixedGraph, bound: usize) -> Result<bool> {
    let flags = g.flags();
    if flags.is_empty() {
        g.require_chain_graph()?;
        return Ok(true);
    }
    let class = enumerate_triplex_class(g, Family::Chain, bound)?;
    Ok(class.iter().all(|h| flags.is_subset(&h.flags())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::all_mccgs;
    use crate::separation::{all_queries, mccg_separated};

    fn g(edges: &str) -> MixedGraph {
        MixedGraph::from_edges(&[], edges).unwrap()
    }

    #[test]
    fn triplex_equivalence_examples() {
        let dg = g("A->C B->D C--D D--E B->E");
        let dh = g("A->C B->D C--D D->E B->E");
        assert!(triplex_equivalent(&dg, &dh).unwrap());
        assert!(triplex_equivalent(&g("A<->B B--C"), &g("A--B B<->C")).unwrap());
        assert!(!triplex_equivalent(&g("A->B C->B"), &g("A->B B->C")).unwrap());
        assert!(triplex_equivalent(&g("A->B"), &g("A--B")).unwrap());
        assert!(triplex_equivalent(&g("A->B"), &g("A<->B")).is_err());
        assert!(triplex_equivalent(&g("A->B"), &g("A->C")).is_err());
    }

    #[test]
    fn markov_equivalence_examples() {
        // both carry the triplex ({A,C},B) and induce the same model
        assert!(markov_equivalent_mccg(&g("A<->B B<->C"), &g("A<->B B--C")).unwrap());
        assert!(!markov_equivalent_mccg(&g("A<->B B<->C"), &g("A--B B--C")).unwrap());
        let x = g("A<->B B--C");
        assert!(markov_equivalent_mccg(&x, &x).unwrap());
        assert!(markov_equivalent_mccg(&x, &g("A--B B<->C")).unwrap());
    }

    fn model(g: &MixedGraph) -> BTreeSet<crate::separation::SeparationQuery> {
        all_queries(g.node_count())
            .into_iter()
            .filter(|q| mccg_separated(g, q).unwrap())
            .collect()
    }

    #[test]
    fn markov_equivalence_on_three_nodes_matches_models() {
        let all = all_mccgs(3);
        for a in &all {
            for b in &all {
                assert_eq!(
                    markov_equivalent_mccg(a, b).unwrap(),
                    model(a) == model(b),
                    "{a:?} {b:?}"
                );
            }
        }
    }

    #[test]
    fn bidirecting() {
        let x = g("A<->B B--C");
        let k = x.set_of(&["B", "C"]).unwrap();
        let y = feasible_bidirect(&x, k).unwrap();
        assert_eq!(y, g("A<->B B<->C"));
        assert!(triplex_equivalent(&x, &y).unwrap());
        assert_eq!(feasible_bidirect(&x, x.set_of(&["A"]).unwrap()).unwrap(), x);
        let path = g("A--B B--C");
        assert!(feasible_bidirect(&path, path.nodes()).is_err());
        assert!(feasible_bidirect(&x, x.set_of(&["B"]).unwrap()).is_err());
    }

    #[test]
    fn blargest_examples() {
        assert_eq!(blargest(&g("A<->B B--C")).unwrap(), g("A<->B B<->C"));
        let path = g("A--B B--C");
        assert_eq!(blargest(&path).unwrap(), path);
        let ex = g("A--B A--C B<->D C<->D");
        assert_eq!(blargest(&ex).unwrap(), ex);
        assert_eq!(
            blargest(&g("A--B B--C A--C")).unwrap(),
            g("A<->B B<->C A<->C")
        );
    }

    #[test]
    fn class_enumeration() {
        let class = enumerate_triplex_class(&g("A<->B B--C"), Family::Mccg, 5).unwrap();
        let want: BTreeSet<_> = [g("A<->B B--C"), g("A--B B<->C"), g("A<->B B<->C")].into();
        assert_eq!(class, want);
        let minimal: Vec<_> = class
            .iter()
            .filter(|h| {
                h.edges()
                    .iter()
                    .filter(|e| e.kind == EdgeKind::Bidirected)
                    .count()
                    == 1
            })
            .collect();
        assert_eq!(minimal.len(), 2);

        let tri = g("A--B B--C A--C");
        let class = enumerate_triplex_class(&tri, Family::Chain, 5).unwrap();
        // a triangle has no triplex, so the class is every chain graph on it
        let brute: Vec<MixedGraph> = crate::enumerate::all_chain_graphs(3)
            .into_iter()
            .filter(|h| h.edge_count() == 3 && h.triplexes().is_empty())
            .collect();
        assert_eq!(class.len(), brute.len());

        let single = MixedGraph::new(["A"]).unwrap();
        assert_eq!(
            enumerate_triplex_class(&single, Family::Chain, 5)
                .unwrap()
                .len(),
            1
        );
        assert!(enumerate_triplex_class(&MixedGraph::lettered(6), Family::Chain, 5).is_err());
    }

    #[test]
    fn deflagged_examples() {
        assert!(is_deflagged(&g("A->C B->D C--D D--E B->E"), 5).unwrap());
        assert!(is_deflagged(&g("A->C B->D C--D D->E B->E"), 5).unwrap());
        assert!(is_deflagged(&g("A--B B--C"), 5).unwrap());
        // the class of A->B--C also holds A->B<-C, which lacks the flag
        assert!(!is_deflagged(&g("A->B B--C"), 5).unwrap());
    }

    #[test]
    fn every_class_member_has_the_same_blargest() {
        for x in all_mccgs(4) {
            let top = blargest(&x).unwrap();
            assert!(markov_equivalent_mccg(&x, &top).unwrap());
            for y in enumerate_triplex_class(&x, Family::Mccg, 5).unwrap() {
                assert_eq!(blargest(&y).unwrap(), top, "{x:?} vs {y:?}");
            }
        }
    }
}
