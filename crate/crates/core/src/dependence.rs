//! Reading dependencies off an MCCG: `X` is joined to `Y` given `Z` when
//! some `A ∈ X`, `B ∈ Y` are linked by exactly one `U`-open path for a
//! suitable `U` with `Z ⊆ U ⊆ X ∪ Y ∪ Z ∖ {A, B}`.
//!
//! The guarantees hold when the graph is a minimal MCCG of the
//! distribution, which cannot be checked from the graph alone; the graph is
//! taken as ground truth.

use crate::closure::{
    dependence_base, full_model, wtc_dependence_closure, CiTriple, DependenceForm, TripleSet,
};
use crate::error::{CgError, Result};
use crate::graph::{is_head_no_tail, EdgeKind, MixedGraph};
use crate::nodeset::NodeSet;
use crate::separation::{all_queries, ccg_path_open, mccg_separated, OpenRule, SeparationKind};

/// The path and conditioning set that make `X` joined to `Y` given `Z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JoinWitness {
    pub a: usize,
    pub b: usize,
    pub path: Vec<usize>,
    pub u: NodeSet,
}

impl JoinWitness {
    pub fn describe(&self, g: &MixedGraph) -> String {
        let path: Vec<&str> = self.path.iter().map(|&i| g.name(i)).collect();
        format!("path={} U={}", path.join(","), g.fmt_set(self.u))
    }
}

/// Edge sets of the biconnected components of the skeleton of `g`.
fn biconnected_edge_sets(g: &MixedGraph) -> Vec<Vec<(usize, usize)>> {
    struct State {
        disc: Vec<Option<usize>>,
        low: Vec<usize>,
        time: usize,
        stack: Vec<(usize, usize)>,
        out: Vec<Vec<(usize, usize)>>,
    }
    fn visit(g: &MixedGraph, u: usize, parent: Option<usize>, s: &mut State) {
        s.disc[u] = Some(s.time);
        s.low[u] = s.time;
        s.time += 1;
        for v in g.adj(u) {
            match s.disc[v] {
                None => {
                    s.stack.push((u, v));
                    visit(g, v, Some(u), s);
                    s.low[u] = s.low[u].min(s.low[v]);
                    if s.low[v] >= s.disc[u].unwrap() {
                        let mut comp = Vec::new();
                        while let Some(e) = s.stack.pop() {
                            comp.push(e);
                            if e == (u, v) {
                                break;
                            }
                        }
                        s.out.push(comp);
                    }
                }
                Some(dv) if Some(v) != parent && dv < s.disc[u].unwrap() => {
                    s.stack.push((u, v));
                    s.low[u] = s.low[u].min(dv);
                }
                _ => {}
            }
        }
    }
    let n = g.node_count();
    let mut s = State {
        disc: vec![None; n],
        low: vec![0; n],
        time: 0,
        stack: Vec::new(),
        out: Vec::new(),
    };
    for v in 0..n {
        if s.disc[v].is_none() {
            visit(g, v, None, &mut s);
        }
    }
    s.out
}

/// Whether some cycle of `g` has both an undirected and a bidirected edge.
pub fn has_mixed_cycle(g: &MixedGraph) -> bool {
    biconnected_edge_sets(g).iter().any(|comp| {
        let kinds: Vec<EdgeKind> = comp
            .iter()
            .map(|&(a, b)| g.edge_kind(a, b).unwrap())
            .collect();
        kinds.contains(&EdgeKind::Undirected) && kinds.contains(&EdgeKind::Bidirected)
    })
}

/// Whether the skeleton of `g` has no cycle.
pub fn is_forest(g: &MixedGraph) -> bool {
    biconnected_edge_sets(g).iter().all(|comp| comp.len() == 1)
}

/// Number of `u`-open simple paths between `a` and `b`, counting stops at
/// `limit`.
fn count_open_paths(
    g: &MixedGraph,
    a: usize,
    b: usize,
    u: NodeSet,
    rule: OpenRule,
    limit: usize,
) -> usize {
    #[allow(clippy::too_many_arguments)]
    fn dfs(
        g: &MixedGraph,
        v: usize,
        prev: Option<usize>,
        visited: NodeSet,
        b: usize,
        u: NodeSet,
        rule: OpenRule,
        limit: usize,
        count: &mut usize,
    ) {
        for w in g.adj(v).difference(visited) {
            if let Some(p) = prev {
                let triplex = is_head_no_tail(g.end(v, p).unwrap(), g.end(v, w).unwrap());
                let open = if triplex {
                    u.contains(v)
                } else {
                    !u.contains(v) || (rule == OpenRule::General && !g.bid(v).is_empty())
                };
                if !open {
                    continue;
                }
            }
            if w == b {
                *count += 1;
            } else {
                dfs(g, w, Some(v), visited.with(w), b, u, rule, limit, count);
            }
            if *count >= limit {
                return;
            }
        }
    }
    let mut count = 0;
    dfs(
        g,
        a,
        None,
        NodeSet::singleton(a),
        b,
        u,
        rule,
        limit,
        &mut count,
    );
    count
}

/// Simple paths between `a` and `b` whose interior avoids `avoid`, shortest
/// first, then lexicographic.
fn simple_paths(g: &MixedGraph, a: usize, b: usize, avoid: NodeSet) -> Vec<Vec<usize>> {
    fn dfs(
        g: &MixedGraph,
        path: &mut Vec<usize>,
        visited: NodeSet,
        b: usize,
        avoid: NodeSet,
        out: &mut Vec<Vec<usize>>,
    ) {
        let v = *path.last().unwrap();
        for w in g.adj(v).difference(visited) {
            path.push(w);
            if w == b {
                out.push(path.clone());
            } else if !avoid.contains(w) {
                dfs(g, path, visited.with(w), b, avoid, out);
            }
            path.pop();
        }
    }
    let mut out = Vec::new();
    dfs(g, &mut vec![a], NodeSet::singleton(a), b, avoid, &mut out);
    out.sort_by(|p, q| p.len().cmp(&q.len()).then_with(|| p.cmp(q)));
    out
}

fn check_input(g: &MixedGraph, q: &CiTriple) -> Result<()> {
    g.require_mccg()?;
    q.validate(g)?;
    if has_mixed_cycle(g) {
        return Err(CgError::Precondition(
            "graph has a cycle with both undirected and bidirected edges".into(),
        ));
    }
    Ok(())
}

/// Decides whether `X` is joined to `Y` given `Z`, where a non-triplex node
/// with a spouse never blocks a path. For each path the
/// conditioning set is the canonical one: the nodes of `X ∪ Y ∪ Z` that are
/// in `Z`, on the path or without spouse, minus the endpoints. Candidates
/// are tried by `(A, B)`, then path length, then node sequence.
pub fn joined(g: &MixedGraph, q: &CiTriple) -> Result<Option<JoinWitness>> {
    joined_with_rule(g, q, OpenRule::General)
}

/// [`joined`] under an explicit path-opening rule.
pub fn joined_with_rule(
    g: &MixedGraph,
    q: &CiTriple,
    rule: OpenRule,
) -> Result<Option<JoinWitness>> {
    check_input(g, q)?;
    let pool = q.x.union(q.y).union(q.z);
    let no_spouse: NodeSet = g.nodes().iter().filter(|&v| g.bid(v).is_empty()).collect();
    for a in q.x {
        for b in q.y {
            for path in simple_paths(g, a, b, q.x.union(q.y)) {
                let on_path: NodeSet = path.iter().copied().collect();
                let u = pool
                    .intersection(q.z.union(on_path).union(no_spouse))
                    .without(a)
                    .without(b);
                if ccg_path_open(g, &path, u, rule) && count_open_paths(g, a, b, u, rule, 2) == 1 {
                    return Ok(Some(JoinWitness { a, b, path, u }));
                }
            }
        }
    }
    Ok(None)
}

/// Reference decision trying every `U` with `Z ⊆ U ⊆ X ∪ Y ∪ Z ∖ {A, B}`
/// and every path. Exponential; meant for cross-checking [`joined`].
pub fn joined_any_u(g: &MixedGraph, q: &CiTriple, rule: OpenRule) -> Result<bool> {
    check_input(g, q)?;
    for a in q.x {
        for b in q.y {
            let free = q.x.union(q.y).without(a).without(b);
            for extra in free.subsets() {
                let u = q.z.union(extra);
                if count_open_paths(g, a, b, u, rule, 2) == 1 {
                    return Ok(true);
                }
            }
        }
    }
    Ok(false)
}

/// Every canonical triple over `g` that is joined.
pub fn joined_model(g: &MixedGraph, rule: OpenRule) -> Result<TripleSet> {
    let mut out = TripleSet::empty(g.node_count());
    for q in all_queries(g.node_count()) {
        if q.x.min() < q.y.min() && joined_with_rule(g, &q, rule)?.is_some() {
            out.insert(q)?;
        }
    }
    Ok(out)
}

/// Comparison of the joined triples with the dependence closure.
#[derive(Clone, Debug)]
pub struct SoundCompleteReport {
    pub joined: TripleSet,
    pub closure: TripleSet,
    /// Joined but not derivable.
    pub unsound: Vec<CiTriple>,
    /// Derivable but not joined.
    pub incomplete: Vec<CiTriple>,
}

impl SoundCompleteReport {
    pub fn holds(&self) -> bool {
        self.unsound.is_empty() && self.incomplete.is_empty()
    }
}

/// Default node bound for the exhaustive dependency checks.
pub const DEFAULT_DEPENDENCE_BOUND: usize = 5;

/// Closes the dependence base of `g` against its separations and compares
/// the result with the joined triples.
pub fn verify_sound_complete(g: &MixedGraph, bound: usize) -> Result<SoundCompleteReport> {
    if g.node_count() > bound {
        return Err(CgError::BoundExceeded {
            bound,
            actual: g.node_count(),
        });
    }
    g.require_mccg()?;
    if has_mixed_cycle(g) {
        return Err(CgError::Precondition(
            "graph has a cycle with both undirected and bidirected edges".into(),
        ));
    }
    let sep = full_model(g, SeparationKind::Mccg)?;
    let closure = wtc_dependence_closure(&dependence_base(g, DependenceForm::Component)?, &sep)?;
    let joined = joined_model(g, OpenRule::General)?;
    Ok(SoundCompleteReport {
        unsound: joined.difference(&closure),
        incomplete: closure.difference(&joined),
        joined,
        closure,
    })
}

/// For a graph without cycles, checks that every triple is either
/// separated or joined, never both.
pub fn faithful_if_acyclic(g: &MixedGraph) -> Result<bool> {
    g.require_mccg()?;
    if !is_forest(g) {
        return Err(CgError::Precondition("graph has a cycle".into()));
    }
    for q in all_queries(g.node_count()) {
        if mccg_separated(g, &q)? == joined(g, &q)?.is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::all_mccgs;
    use crate::separation::{concentration_projection, covariance_projection};

    fn g(edges: &str) -> MixedGraph {
        MixedGraph::from_edges(&[], edges).unwrap()
    }

    fn q(g: &MixedGraph, x: &str, y: &str, z: &str) -> CiTriple {
        CiTriple::from_names(g, x, y, z).unwrap()
    }

    #[test]
    fn cycle_detection() {
        assert!(has_mixed_cycle(&g("A--B B<->C A<->C")));
        assert!(!has_mixed_cycle(&g("A--B B--C A--C")));
        assert!(!has_mixed_cycle(&g("A--B B<->C C<->D")));
        assert!(is_forest(&g("A--B B<->C C<->D")));
        assert!(!is_forest(&g("A--B B--C A--C")));
        // two triangles sharing a node: each is single-kind
        assert!(!has_mixed_cycle(&g("A--B B--C A--C C<->D D<->E C<->E")));
    }

    #[test]
    fn single_edge() {
        let x = g("A<->B");
        let w = joined(&x, &q(&x, "A", "B", "")).unwrap().unwrap();
        assert_eq!(w.path, vec![0, 1]);
        assert_eq!(w.u, NodeSet::EMPTY);
        let r = verify_sound_complete(&x, 5).unwrap();
        assert!(r.holds());
        assert_eq!(r.joined.len(), 1);
    }

    #[test]
    fn mixed_cycle_is_rejected() {
        let x = g("A--B B<->C A<->C");
        assert!(x.is_mccg().unwrap());
        assert!(joined(&x, &q(&x, "A", "B", "")).is_err());
        assert!(verify_sound_complete(&x, 5).is_err());
    }

    #[test]
    fn leaf_spouse_on_a_triangle() {
        // B - C given A is a base dependence, given A, D it is not derivable;
        // no path between B and C can tell the two apart
        let x = g("A--B A--C B--C A<->D");
        let r = verify_sound_complete(&x, 5).unwrap();
        assert!(r.unsound.is_empty());
        assert_eq!(r.incomplete, vec![q(&x, "B", "C", "A")]);
        let simplified = joined_model(&x, OpenRule::Simplified).unwrap();
        assert!(simplified.contains(&q(&x, "B", "C", "A,D")));
        assert!(!r.closure.contains(&q(&x, "B", "C", "A,D")));
    }

    #[test]
    fn chain_of_spouses() {
        let x = g("A<->B B<->C");
        let r = verify_sound_complete(&x, 5).unwrap();
        assert!(r.holds(), "{r:?}");
        assert!(r.joined.contains(&q(&x, "A", "C", "B")));
        assert!(faithful_if_acyclic(&x).unwrap());
    }

    #[test]
    fn trees_are_faithful() {
        assert!(faithful_if_acyclic(&g("A--B B<->C")).unwrap());
        assert!(faithful_if_acyclic(&g("C<->A C<->B C<->D")).unwrap());
        assert!(faithful_if_acyclic(&g("A--B B--C A--C")).is_err());
    }

    #[test]
    fn witnesses_only_touch_x_and_y_at_their_ends() {
        for x in all_mccgs(4).into_iter().filter(|x| !has_mixed_cycle(x)) {
            for t in all_queries(4) {
                if let Some(w) = joined(&x, &t).unwrap() {
                    let inner: NodeSet = w.path[1..w.path.len() - 1].iter().copied().collect();
                    assert!(inner.is_disjoint(t.x.union(t.y)));
                    assert!(t.z.is_subset(w.u));
                    assert!(!mccg_separated(&x, &t).unwrap());
                }
            }
        }
    }

    #[test]
    fn canonical_u_matches_all_u_on_four_nodes() {
        for x in all_mccgs(4).into_iter().filter(|x| !has_mixed_cycle(x)) {
            for t in all_queries(4) {
                assert_eq!(
                    joined(&x, &t).unwrap().is_some(),
                    joined_any_u(&x, &t, OpenRule::General).unwrap(),
                    "{x:?} {t:?}"
                );
            }
        }
    }

    #[test]
    fn triangle_with_spouse_triangle() {
        let x = g("A--B A--C B--C C<->D C<->E D<->E");
        let t = q(&x, "A", "D", "B,C");
        let w = joined(&x, &t).unwrap().unwrap();
        assert_eq!(w.describe(&x), "path=A,C,D U={B,C}");
        // A - C - B stays open given C because C has spouses, so the base
        // dependence of A - B given C is not joined
        let r = verify_sound_complete(&x, 5).unwrap();
        assert!(r.unsound.is_empty());
        assert_eq!(r.incomplete, vec![q(&x, "A", "B", "C")]);

        let h = covariance_projection(&x).unwrap();
        assert_eq!(h, g("A<->B A<->C B<->C C<->D C<->E D<->E"));
        assert!(joined(&h, &q(&h, "A", "D", "B,C")).unwrap().is_none());
        let f = concentration_projection(&x).unwrap();
        assert_eq!(f.edge_count(), 10);
        assert!(joined(&f, &q(&f, "A", "D", "B,C")).unwrap().is_none());
    }
}
