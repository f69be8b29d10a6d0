//! Simple mixed graphs over named nodes and their topological queries.
//!
//! Nodes are kept in lexicographic order of their names; a node's index is
//! its rank in that order, so every iteration over indices is deterministic.
//! Each adjacent pair carries exactly one edge: undirected (`A -- B`),
//! directed (`A -> B`) or bidirected (`A <-> B`).

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::error::{CgError, Result};
use crate::nodeset::{NodeSet, MAX_NODES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeKind {
    Undirected,
    Directed,
    Bidirected,
}

impl EdgeKind {
    pub fn token(self) -> &'static str {
        match self {
            EdgeKind::Undirected => "--",
            EdgeKind::Directed => "->",
            EdgeKind::Bidirected => "<->",
        }
    }

    pub fn from_token(tok: &str) -> Result<Self> {
        match tok {
            "--" => Ok(EdgeKind::Undirected),
            "->" => Ok(EdgeKind::Directed),
            "<->" => Ok(EdgeKind::Bidirected),
            other => Err(CgError::InvalidEdgeToken(other.to_string())),
        }
    }
}

/// The mark an edge carries at one of its ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum End {
    /// End of an undirected edge.
    Line,
    /// Tail of a directed edge.
    Tail,
    /// Arrowhead: head of a directed edge, or either end of a bidirected one.
    Head,
}

/// An edge in canonical form: `from < to` unless the edge is directed, in
/// which case `from` is the tail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub kind: EdgeKind,
}

/// `({a, c}, b)` with `a < c`: the non-adjacent pair `a`, `c` both adjacent
/// to the center `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triplex {
    pub a: usize,
    pub c: usize,
    pub b: usize,
}

/// Head-no-tail classification of a node from the two edge ends it shows
/// along a route. The same rule yields AMP head-no-tail nodes, MCCG triplex
/// nodes and, on induced subgraphs, triplexes of both graph families.
pub fn is_head_no_tail(e1: End, e2: End) -> bool {
    matches!(
        (e1, e2),
        (End::Head, End::Head) | (End::Head, End::Line) | (End::Line, End::Head)
    )
}

/// A violation of one of the two maximality constraints on
/// covariance-concentration graphs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum MccgViolation {
    /// Induced `a -- c -- b` where `c <-> spouse`.
    C1 {
        a: usize,
        c: usize,
        b: usize,
        spouse: usize,
    },
    /// `a <-> b` whose ends are joined by an undirected path.
    C2 { a: usize, b: usize },
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MixedGraph {
    names: Vec<String>,
    und: Vec<NodeSet>,
    bid: Vec<NodeSet>,
    /// `ch[i]` holds every `j` with `i -> j`.
    ch: Vec<NodeSet>,
    /// `pa[i]` holds every `j` with `j -> i`.
    pa: Vec<NodeSet>,
}

impl MixedGraph {
    /// Empty graph over the given names; names are sorted.
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.iter().any(|n| n.is_empty()) {
            return Err(CgError::EmptyName);
        }
        names.sort();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(CgError::DuplicateNode(w[0].clone()));
        }
        if names.len() > MAX_NODES {
            return Err(CgError::TooManyNodes {
                max: MAX_NODES,
                got: names.len(),
            });
        }
        let n = names.len();
        Ok(MixedGraph {
            names,
            und: vec![NodeSet::EMPTY; n],
            bid: vec![NodeSet::EMPTY; n],
            ch: vec![NodeSet::EMPTY; n],
            pa: vec![NodeSet::EMPTY; n],
        })
    }

    /// Empty graph over `A, B, C, ...`.
    pub fn lettered(n: usize) -> Self {
        let names = (0..n).map(|i| {
            if i < 26 {
                ((b'A' + i as u8) as char).to_string()
            } else {
                format!("Z{i:02}")
            }
        });
        MixedGraph::new(names).expect("generated names are valid")
    }

    /// Builds a graph from node names and a compact edge list such as
    /// `"A->D, C--D, B<->E"`. Nodes mentioned only in edges are added.
    pub fn from_edges(nodes: &[&str], edges: &str) -> Result<Self> {
        let parsed: Vec<(String, &'static str, String)> = edges
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(parse_edge_token)
            .collect::<Result<_>>()?;
        let mut all: BTreeSet<String> = nodes.iter().map(|s| s.to_string()).collect();
        for (a, _, b) in &parsed {
            all.insert(a.clone());
            all.insert(b.clone());
        }
        let mut g = MixedGraph::new(all)?;
        for (a, op, b) in parsed {
            let (ia, ib) = (g.index(&a)?, g.index(&b)?);
            match op {
                "<-" => g.add_edge(ib, ia, EdgeKind::Directed)?,
                op => g.add_edge(ia, ib, EdgeKind::from_token(op)?)?,
            }
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn nodes(&self) -> NodeSet {
        NodeSet::full(self.names.len())
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index(&self, name: &str) -> Result<usize> {
        self.names
            .binary_search_by(|n| n.as_str().cmp(name))
            .map_err(|_| CgError::UnknownNode(name.to_string()))
    }

    pub fn set_of<S: AsRef<str>>(&self, names: &[S]) -> Result<NodeSet> {
        names
            .iter()
            .map(|n| self.index(n.as_ref()))
            .collect::<Result<Vec<_>>>()
            .map(|v| v.into_iter().collect())
    }

    pub fn set_names(&self, s: NodeSet) -> Vec<&str> {
        s.iter().map(|i| self.name(i)).collect()
    }

    /// `{A,B}`-style rendering of a node set.
    pub fn fmt_set(&self, s: NodeSet) -> String {
        format!("{{{}}}", self.set_names(s).join(","))
    }

    fn check_pair(&self, a: usize, b: usize) -> Result<()> {
        let n = self.node_count();
        if a >= n || b >= n {
            return Err(CgError::UnknownNode(format!("#{}", a.max(b))));
        }
        if a == b {
            return Err(CgError::SelfLoop(self.names[a].clone()));
        }
        Ok(())
    }

    /// Adds an edge; for [`EdgeKind::Directed`] the edge is `a -> b`.
    pub fn add_edge(&mut self, a: usize, b: usize, kind: EdgeKind) -> Result<()> {
        self.check_pair(a, b)?;
        if self.adjacent(a, b) {
            return Err(CgError::DuplicateEdge(
                self.names[a].clone(),
                self.names[b].clone(),
            ));
        }
        self.put(a, b, kind);
        Ok(())
    }

    /// Replaces whatever edge joins `a` and `b` (if any) with the given one.
    pub fn set_edge(&mut self, a: usize, b: usize, kind: EdgeKind) -> Result<()> {
        self.check_pair(a, b)?;
        self.clear(a, b);
        self.put(a, b, kind);
        Ok(())
    }

    pub fn remove_edge(&mut self, a: usize, b: usize) {
        self.clear(a, b);
    }

    fn put(&mut self, a: usize, b: usize, kind: EdgeKind) {
        match kind {
            EdgeKind::Undirected => {
                self.und[a].insert(b);
                self.und[b].insert(a);
            }
            EdgeKind::Bidirected => {
                self.bid[a].insert(b);
                self.bid[b].insert(a);
            }
            EdgeKind::Directed => {
                self.ch[a].insert(b);
                self.pa[b].insert(a);
            }
        }
    }

    fn clear(&mut self, a: usize, b: usize) {
        self.und[a].remove(b);
        self.und[b].remove(a);
        self.bid[a].remove(b);
        self.bid[b].remove(a);
        self.ch[a].remove(b);
        self.ch[b].remove(a);
        self.pa[a].remove(b);
        self.pa[b].remove(a);
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj(a).contains(b)
    }

    /// Every node adjacent to `i`, by any edge kind.
    pub fn adj(&self, i: usize) -> NodeSet {
        self.und[i]
            .union(self.bid[i])
            .union(self.ch[i])
            .union(self.pa[i])
    }

    pub fn und(&self, i: usize) -> NodeSet {
        self.und[i]
    }

    pub fn bid(&self, i: usize) -> NodeSet {
        self.bid[i]
    }

    pub fn children_of(&self, i: usize) -> NodeSet {
        self.ch[i]
    }

    pub fn parents_of(&self, i: usize) -> NodeSet {
        self.pa[i]
    }

    /// The mark at `a`'s end of the edge between `a` and `b`.
    pub fn end(&self, a: usize, b: usize) -> Option<End> {
        if self.und[a].contains(b) {
            Some(End::Line)
        } else if self.bid[a].contains(b) || self.pa[a].contains(b) {
            Some(End::Head)
        } else if self.ch[a].contains(b) {
            Some(End::Tail)
        } else {
            None
        }
    }

    /// Kind of the edge between `a` and `b`; for directed edges use
    /// [`MixedGraph::end`] or [`MixedGraph::has_arrow`] for orientation.
    pub fn edge_kind(&self, a: usize, b: usize) -> Option<EdgeKind> {
        if self.und[a].contains(b) {
            Some(EdgeKind::Undirected)
        } else if self.bid[a].contains(b) {
            Some(EdgeKind::Bidirected)
        } else if self.ch[a].contains(b) || self.pa[a].contains(b) {
            Some(EdgeKind::Directed)
        } else {
            None
        }
    }

    /// True iff `a -> b`.
    pub fn has_arrow(&self, a: usize, b: usize) -> bool {
        self.ch[a].contains(b)
    }

    /// All edges in canonical form, sorted by `(min end, max end)`.
    pub fn edges(&self) -> Vec<Edge> {
        let n = self.node_count();
        let mut out = Vec::new();
        for a in 0..n {
            for b in self.adj(a).iter().filter(|&b| b > a) {
                let e = match self.edge_kind(a, b).expect("adjacent") {
                    EdgeKind::Directed if self.has_arrow(b, a) => Edge {
                        from: b,
                        to: a,
                        kind: EdgeKind::Directed,
                    },
                    kind => Edge {
                        from: a,
                        to: b,
                        kind,
                    },
                };
                out.push(e);
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        (0..self.node_count())
            .map(|i| self.adj(i).len())
            .sum::<usize>()
            / 2
    }

    pub fn has_undirected(&self) -> bool {
        self.und.iter().any(|s| !s.is_empty())
    }

    pub fn has_directed(&self) -> bool {
        self.ch.iter().any(|s| !s.is_empty())
    }

    pub fn has_bidirected(&self) -> bool {
        self.bid.iter().any(|s| !s.is_empty())
    }

    fn check_set(&self, x: NodeSet) -> Result<()> {
        if x.is_subset(self.nodes()) {
            Ok(())
        } else {
            let bad = x.difference(self.nodes()).min().unwrap_or(0);
            Err(CgError::UnknownNode(format!("#{bad}")))
        }
    }

    fn gather(&self, x: NodeSet, rel: &[NodeSet]) -> Result<NodeSet> {
        self.check_set(x)?;
        let all = x.iter().fold(NodeSet::EMPTY, |acc, i| acc.union(rel[i]));
        Ok(all.difference(x))
    }

    /// `pa_G(X)`: tails of directed edges into `X`, outside `X`.
    pub fn parents(&self, x: NodeSet) -> Result<NodeSet> {
        self.gather(x, &self.pa)
    }

    pub fn children(&self, x: NodeSet) -> Result<NodeSet> {
        self.gather(x, &self.ch)
    }

    /// `ne_G(X)`.
    pub fn neighbors(&self, x: NodeSet) -> Result<NodeSet> {
        self.gather(x, &self.und)
    }

    /// `sp_G(X)`.
    pub fn spouses(&self, x: NodeSet) -> Result<NodeSet> {
        self.gather(x, &self.bid)
    }

    /// `ad_G(X)`, over every edge kind.
    pub fn adjacents(&self, x: NodeSet) -> Result<NodeSet> {
        self.check_set(x)?;
        let all = x
            .iter()
            .fold(NodeSet::EMPTY, |acc, i| acc.union(self.adj(i)));
        Ok(all.difference(x))
    }

    /// Nodes reachable from `x` in one descending step (`->` forward or `--`).
    fn descend_step(&self, i: usize) -> NodeSet {
        self.ch[i].union(self.und[i])
    }

    /// `de_G(X)`: endpoints outside `X` of descending routes starting in `X`.
    pub fn descendants(&self, x: NodeSet) -> Result<NodeSet> {
        self.check_set(x)?;
        Ok(self.reach(x, |i| self.descend_step(i)).difference(x))
    }

    /// Closure of `start` under `step`, including `start` itself.
    fn reach(&self, start: NodeSet, step: impl Fn(usize) -> NodeSet) -> NodeSet {
        let mut seen = start;
        let mut queue: VecDeque<usize> = start.iter().collect();
        while let Some(v) = queue.pop_front() {
            for w in step(v).difference(seen) {
                seen.insert(w);
                queue.push_back(w);
            }
        }
        seen
    }

    fn components(&self, rel: &[NodeSet]) -> Vec<NodeSet> {
        let mut left = self.nodes();
        let mut out = Vec::new();
        while let Some(i) = left.min() {
            let comp = self.reach(NodeSet::singleton(i), |v| rel[v]);
            left = left.difference(comp);
            out.push(comp);
        }
        out
    }

    /// Undirected connectivity components, ordered by their smallest node.
    pub fn undirected_components(&self) -> Vec<NodeSet> {
        self.components(&self.und)
    }

    pub fn bidirected_components(&self) -> Vec<NodeSet> {
        self.components(&self.bid)
    }

    /// `co_G(a)`.
    pub fn component_of(&self, a: usize) -> NodeSet {
        self.reach(NodeSet::singleton(a), |v| self.und[v])
    }

    /// True iff every pair in `x` is joined by an undirected edge.
    pub fn is_complete(&self, x: NodeSet) -> bool {
        x.iter().all(|i| x.without(i).is_subset(self.und[i]))
    }

    /// True iff some descending cycle uses at least one directed edge.
    pub fn has_semidirected_cycle(&self) -> bool {
        let n = self.node_count();
        (0..n).any(|u| {
            self.ch[u].iter().any(|v| {
                self.reach(NodeSet::singleton(v), |i| self.descend_step(i))
                    .contains(u)
            })
        })
    }

    /// Chain-graph test: undirected and directed edges only, no
    /// semidirected cycle. Bidirected edges are an input error.
    pub fn is_chain_graph(&self) -> Result<bool> {
        if self.has_bidirected() {
            return Err(CgError::WrongGraphKind {
                expected: "a graph without bidirected edges",
                found: "bidirected edge".into(),
            });
        }
        Ok(!self.has_semidirected_cycle())
    }

    pub fn require_chain_graph(&self) -> Result<()> {
        if self.is_chain_graph()? {
            Ok(())
        } else {
            Err(CgError::WrongGraphKind {
                expected: "a chain graph",
                found: "a semidirected cycle".into(),
            })
        }
    }

    /// Covariance-concentration graph: no directed edges.
    pub fn is_ccg(&self) -> bool {
        !self.has_directed()
    }

    /// Every violation of the two maximality constraints, in node order.
    pub fn mccg_violations(&self) -> Result<Vec<MccgViolation>> {
        if !self.is_ccg() {
            return Err(CgError::WrongGraphKind {
                expected: "a graph with undirected and bidirected edges only",
                found: "directed edge".into(),
            });
        }
        let mut out = Vec::new();
        for c in 0..self.node_count() {
            let Some(spouse) = self.bid[c].min() else {
                continue;
            };
            let ne = self.und[c];
            for a in ne {
                for b in ne.iter().filter(|&b| b > a) {
                    if !self.adjacent(a, b) {
                        out.push(MccgViolation::C1 { a, c, b, spouse });
                    }
                }
            }
        }
        for comp in self.undirected_components() {
            for a in comp {
                for b in self.bid[a].intersection(comp).iter().filter(|&b| b > a) {
                    out.push(MccgViolation::C2 { a, b });
                }
            }
        }
        Ok(out)
    }

    pub fn is_mccg(&self) -> Result<bool> {
        Ok(self.mccg_violations()?.is_empty())
    }

    pub fn require_mccg(&self) -> Result<()> {
        let v = self.mccg_violations()?;
        if v.is_empty() {
            Ok(())
        } else {
            Err(CgError::WrongGraphKind {
                expected: "a maximal covariance-concentration graph",
                found: self.describe_violation(&v[0]),
            })
        }
    }

    pub fn describe_violation(&self, v: &MccgViolation) -> String {
        let nm = |i: usize| self.name(i);
        match *v {
            MccgViolation::C1 { a, c, b, spouse } => format!(
                "C1: induced {}--{}--{} with {}<->{}",
                nm(a),
                nm(c),
                nm(b),
                nm(c),
                nm(spouse)
            ),
            MccgViolation::C2 { a, b } => format!(
                "C2: {}<->{} closes a cycle with an undirected path",
                nm(a),
                nm(b)
            ),
        }
    }

    /// Triplexes `({a,c},b)`: induced `a ? b ? c` with `a`, `c`
    /// non-adjacent and the ends at `b` head-no-tail. On chain graphs these
    /// are the `->b<-`, `->b--` and `--b<-` patterns; on
    /// covariance-concentration graphs `<->b<->`, `<->b--` and `--b<->`.
    pub fn triplexes(&self) -> BTreeSet<Triplex> {
        self.unshielded(|g, a, b, c| is_head_no_tail(g.end(b, a).unwrap(), g.end(b, c).unwrap()))
    }

    /// Flags `a -> b -- c`, reported as `({a,c},b)`.
    pub fn flags(&self) -> BTreeSet<Triplex> {
        self.unshielded(|g, a, b, c| {
            let (ea, ec) = (g.end(b, a).unwrap(), g.end(b, c).unwrap());
            g.pa[b].contains(a) && ec == End::Line || g.pa[b].contains(c) && ea == End::Line
        })
    }

    /// Immoralities `a -> b <- c`.
    pub fn immoralities(&self) -> BTreeSet<Triplex> {
        self.unshielded(|g, a, b, c| g.pa[b].contains(a) && g.pa[b].contains(c))
    }

    fn unshielded(&self, pred: impl Fn(&Self, usize, usize, usize) -> bool) -> BTreeSet<Triplex> {
        let mut out = BTreeSet::new();
        for b in 0..self.node_count() {
            let ad = self.adj(b);
            for a in ad {
                for c in ad.iter().filter(|&c| c > a) {
                    if !self.adjacent(a, c) && pred(self, a, b, c) {
                        out.insert(Triplex { a, c, b });
                    }
                }
            }
        }
        out
    }

    /// Undirected skeleton as a set of `(min, max)` pairs.
    pub fn skeleton(&self) -> BTreeSet<(usize, usize)> {
        self.edges()
            .into_iter()
            .map(|e| (e.from.min(e.to), e.from.max(e.to)))
            .collect()
    }

    /// `G_X`: nodes of `x` with every edge whose ends both lie in `x`.
    pub fn induced_subgraph(&self, x: NodeSet) -> Result<MixedGraph> {
        self.check_set(x)?;
        let keep: Vec<usize> = x.iter().collect();
        let mut g = MixedGraph::new(keep.iter().map(|&i| self.names[i].clone()))?;
        let pos: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        for e in self.edges() {
            if let (Some(&a), Some(&b)) = (pos.get(&e.from), pos.get(&e.to)) {
                g.put(a, b, e.kind);
            }
        }
        Ok(g)
    }

    /// Marginal MCCG over `u`: `G_U` plus `A -- B` whenever an undirected
    /// path joins `A` and `B` through nodes outside `u` only.
    pub fn marginalize_mccg(&self, u: NodeSet) -> Result<MixedGraph> {
        self.require_mccg()?;
        self.check_set(u)?;
        let mut g = self.induced_subgraph(u)?;
        let outside = self.nodes().difference(u);
        let keep: Vec<usize> = u.iter().collect();
        for (ka, &a) in keep.iter().enumerate() {
            // undirected reach from a through marginalized nodes only
            let mut seen = NodeSet::singleton(a);
            let mut queue = VecDeque::from([a]);
            let mut hits = NodeSet::EMPTY;
            while let Some(v) = queue.pop_front() {
                for w in self.und[v].difference(seen) {
                    seen.insert(w);
                    if outside.contains(w) {
                        queue.push_back(w);
                    } else if v != a {
                        hits.insert(w);
                    }
                }
            }
            for b in hits {
                let kb = keep.iter().position(|&k| k == b).expect("b in u");
                if kb > ka && !g.adjacent(ka, kb) {
                    g.put(ka, kb, EdgeKind::Undirected);
                }
            }
        }
        Ok(g)
    }

    /// Applies the node permutation `perm` (old index -> new index) and
    /// renames nodes so that new index `k` carries the old name of index `k`.
    /// The result is isomorphic to `self`.
    pub fn permuted(&self, perm: &[usize]) -> MixedGraph {
        let mut g = MixedGraph::new(self.names.clone()).expect("same names");
        for e in self.edges() {
            g.put(perm[e.from], perm[e.to], e.kind);
        }
        g
    }

    /// Renders the graph in the compact edge-list syntax accepted by
    /// [`MixedGraph::from_edges`].
    pub fn edge_list(&self) -> String {
        self.edges()
            .iter()
            .map(|e| format!("{}{}{}", self.name(e.from), e.kind.token(), self.name(e.to)))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

fn parse_edge_token(tok: &str) -> Result<(String, &'static str, String)> {
    for op in ["<->", "->", "<-", "--"] {
        if let Some(pos) = tok.find(op) {
            let (a, b) = (&tok[..pos], &tok[pos + op.len()..]);
            if a.is_empty() || b.is_empty() {
                break;
            }
            return Ok((a.to_string(), op, b.to_string()));
        }
    }
    Err(CgError::Parse(format!("cannot read edge `{tok}`")))
}

impl fmt::Debug for MixedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "MixedGraph[{}]({})",
            self.names.join(","),
            self.edge_list()
        )
    }
}

impl fmt::Display for MixedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.edge_list())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(nodes: &[&str], edges: &str) -> MixedGraph {
        MixedGraph::from_edges(nodes, edges).unwrap()
    }

    fn set(g: &MixedGraph, names: &[&str]) -> NodeSet {
        g.set_of(names).unwrap()
    }

    /// Brute-force descendants: enumerate descending routes of at most |V| steps.
    fn descendants_by_routes(g: &MixedGraph, x: NodeSet) -> NodeSet {
        fn walk(g: &MixedGraph, v: usize, left: usize, acc: &mut NodeSet) {
            acc.insert(v);
            if left == 0 {
                return;
            }
            for w in 0..g.node_count() {
                if g.has_arrow(v, w) || g.end(v, w) == Some(End::Line) {
                    walk(g, w, left - 1, acc);
                }
            }
        }
        let mut acc = NodeSet::EMPTY;
        for v in x {
            walk(g, v, g.node_count(), &mut acc);
        }
        acc.difference(x)
    }

    /// Brute-force semidirected cycle search over routes of at most 2|V| steps.
    fn semidirected_by_routes(g: &MixedGraph) -> bool {
        fn walk(g: &MixedGraph, start: usize, v: usize, left: usize, directed: bool) -> bool {
            if left == 0 {
                return false;
            }
            (0..g.node_count()).any(|w| {
                let arrow = g.has_arrow(v, w);
                let step = arrow || g.end(v, w) == Some(End::Line);
                step && ((w == start && (directed || arrow))
                    || walk(g, start, w, left - 1, directed || arrow))
            })
        }
        (0..g.node_count()).any(|s| walk(g, s, s, 2 * g.node_count(), false))
    }

    #[test]
    fn family_queries() {
        let a = g(&[], "A->B");
        assert_eq!(a.neighbors(set(&a, &["B"])).unwrap(), NodeSet::EMPTY);

        let f = g(&[], "A->D B->E C--D D--E");
        assert_eq!(f.parents(set(&f, &["D"])).unwrap(), set(&f, &["A"]));
        assert_eq!(f.neighbors(set(&f, &["D"])).unwrap(), set(&f, &["C", "E"]));

        let h = g(&[], "A<->B B--C");
        assert_eq!(h.spouses(set(&h, &["B"])).unwrap(), set(&h, &["A"]));
        assert_eq!(h.adjacents(set(&h, &["B"])).unwrap(), set(&h, &["A", "C"]));
    }

    #[test]
    fn unknown_node_is_an_error() {
        let a = g(&[], "A->B");
        assert!(matches!(a.set_of(&["Q"]), Err(CgError::UnknownNode(_))));
        assert!(a.parents(NodeSet::singleton(5)).is_err());
    }

    #[test]
    fn descendants_examples() {
        let c = g(&[], "A->B B--C");
        assert_eq!(
            c.descendants(set(&c, &["A"])).unwrap(),
            set(&c, &["B", "C"])
        );
        let f = g(&[], "A->D B->E C--D D--E");
        assert_eq!(
            f.descendants(set(&f, &["A"])).unwrap(),
            set(&f, &["C", "D", "E"])
        );
        assert_eq!(
            descendants_by_routes(&f, set(&f, &["A"])),
            set(&f, &["C", "D", "E"])
        );
        assert_eq!(f.descendants(f.nodes()).unwrap(), NodeSet::EMPTY);
    }

    #[test]
    fn components() {
        let x = g(&[], "A--B C<->D");
        assert_eq!(
            x.undirected_components(),
            vec![set(&x, &["A", "B"]), set(&x, &["C"]), set(&x, &["D"])]
        );
        assert_eq!(
            x.bidirected_components(),
            vec![set(&x, &["A"]), set(&x, &["B"]), set(&x, &["C", "D"])]
        );
        let e2 = g(&[], "A--B A--C B--C C<->D C<->E D<->E");
        assert_eq!(
            e2.undirected_components(),
            vec![
                set(&e2, &["A", "B", "C"]),
                set(&e2, &["D"]),
                set(&e2, &["E"])
            ]
        );
        let empty = MixedGraph::new(["A", "B"]).unwrap();
        assert_eq!(empty.undirected_components().len(), 2);
        assert_eq!(empty.bidirected_components().len(), 2);
    }

    #[test]
    fn chain_graph_examples() {
        assert!(!g(&[], "A->B B--C C--A").is_chain_graph().unwrap());
        assert!(g(&[], "A->B C->B").is_chain_graph().unwrap());
        assert!(g(&[], "A->D B--E C--D D--E B--D").is_chain_graph().unwrap());
        assert!(g(&[], "A<->B").is_chain_graph().is_err());
    }

    #[test]
    fn mccg_examples() {
        let non_max = g(&[], "A--B B--C C--D D--E A<->D B<->E C<->F");
        let v = non_max.mccg_violations().unwrap();
        assert!(!v.is_empty());
        let (a, d) = (non_max.index("A").unwrap(), non_max.index("D").unwrap());
        assert!(v.contains(&MccgViolation::C2 { a, b: d }));

        assert!(g(&[], "A--B A--C B<->D C<->D").is_mccg().unwrap());

        let c1 = g(&[], "A--C C--B C<->D");
        let v = c1.mccg_violations().unwrap();
        assert!(matches!(v.as_slice(), [MccgViolation::C1 { .. }]));
        assert!(g(&[], "A->B").is_mccg().is_err());
    }

    #[test]
    fn triplex_examples() {
        let imm = g(&[], "A->B C->B");
        let t = Triplex { a: 0, c: 2, b: 1 };
        assert_eq!(imm.triplexes(), BTreeSet::from([t]));
        assert_eq!(imm.immoralities(), BTreeSet::from([t]));
        assert!(imm.flags().is_empty());

        let flag = g(&[], "A->B B--C");
        assert_eq!(flag.flags(), BTreeSet::from([t]));
        assert_eq!(flag.triplexes(), BTreeSet::from([t]));
        assert!(flag.immoralities().is_empty());

        assert_eq!(g(&[], "A<->B B--C").triplexes(), BTreeSet::from([t]));
        assert!(g(&[], "A--B B--C A--C").triplexes().is_empty());
    }

    #[test]
    fn induced_subgraph_examples() {
        let x = g(&[], "A--B B--C C--D D--E A<->D B<->E C<->F");
        let sub = x.induced_subgraph(set(&x, &["A", "B", "C", "D"])).unwrap();
        assert_eq!(sub, g(&[], "A--B B--C C--D A<->D"));
        assert_eq!(x.induced_subgraph(x.nodes()).unwrap(), x);
        let one = g(&[], "A->B");
        assert_eq!(one.induced_subgraph(one.nodes()).unwrap(), one);
    }

    #[test]
    fn marginalization_examples() {
        let chain = g(&[], "A--B B--C");
        let m = chain.marginalize_mccg(set(&chain, &["A", "C"])).unwrap();
        assert_eq!(m, g(&[], "A--C"));

        let mixed = g(&[], "A--B B<->C");
        let m = mixed.marginalize_mccg(set(&mixed, &["A", "C"])).unwrap();
        assert_eq!(m, MixedGraph::new(["A", "C"]).unwrap());

        assert_eq!(mixed.marginalize_mccg(mixed.nodes()).unwrap(), mixed);
    }

    #[test]
    fn edge_parsing_round_trip() {
        let x = g(&["Z"], "B<-A, C<->B D--C");
        assert_eq!(x.edge_list(), "A->B, B<->C, C--D");
        assert_eq!(x.node_count(), 5);
        assert!(MixedGraph::from_edges(&[], "A=>B").is_err());
        assert!(MixedGraph::from_edges(&[], "A--A").is_err());
        assert!(MixedGraph::from_edges(&[], "A--B A->B").is_err());
        assert!(MixedGraph::new(["A", "A"]).is_err());
        assert!(MixedGraph::new([""]).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        /// Random graph over up to 6 nodes; `kinds` selects the edge kinds.
        fn arb_graph(kinds: &'static [u8]) -> impl Strategy<Value = MixedGraph> {
            (1usize..=6).prop_flat_map(move |n| {
                let pairs = n * (n - 1) / 2;
                proptest::collection::vec(0u8..5, pairs).prop_map(move |codes| {
                    let mut g = MixedGraph::lettered(n);
                    let mut k = 0;
                    for a in 0..n {
                        for b in a + 1..n {
                            let c = codes[k];
                            k += 1;
                            if !kinds.contains(&c) {
                                continue;
                            }
                            match c {
                                1 => g.put(a, b, EdgeKind::Undirected),
                                2 => g.put(a, b, EdgeKind::Directed),
                                3 => g.put(b, a, EdgeKind::Directed),
                                4 => g.put(a, b, EdgeKind::Bidirected),
                                _ => {}
                            }
                        }
                    }
                    g
                })
            })
        }

        proptest! {
            #[test]
            fn descendants_match_route_enumeration(g in arb_graph(&[1, 2, 3]), mask in any::<u64>()) {
                let x = NodeSet(mask).intersection(g.nodes());
                prop_assert_eq!(g.descendants(x).unwrap(), descendants_by_routes(&g, x));
            }

            #[test]
            fn semidirected_cycles_match_route_enumeration(g in arb_graph(&[1, 2, 3])) {
                prop_assert_eq!(g.has_semidirected_cycle(), semidirected_by_routes(&g));
            }

            #[test]
            fn components_are_symmetric(g in arb_graph(&[1, 4])) {
                for a in 0..g.node_count() {
                    for b in g.component_of(a) {
                        prop_assert!(g.component_of(b).contains(a));
                    }
                }
            }

            #[test]
            fn triplexes_follow_relabeling(g in arb_graph(&[1, 2, 3, 4]), seed in any::<u64>()) {
                let n = g.node_count();
                // a pseudo-random permutation from the seed
                let mut perm: Vec<usize> = (0..n).collect();
                let mut s = seed;
                for i in (1..n).rev() {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    perm.swap(i, (s >> 33) as usize % (i + 1));
                }
                let h = g.permuted(&perm);
                let mapped: BTreeSet<Triplex> = g
                    .triplexes()
                    .into_iter()
                    .map(|t| {
                        let (a, c) = (perm[t.a].min(perm[t.c]), perm[t.a].max(perm[t.c]));
                        Triplex { a, c, b: perm[t.b] }
                    })
                    .collect();
                prop_assert_eq!(h.triplexes(), mapped);
            }

            #[test]
            fn marginal_of_mccg_is_mccg(g in arb_graph(&[1, 4]), mask in any::<u64>()) {
                prop_assume!(g.is_mccg().unwrap());
                let u = NodeSet(mask).intersection(g.nodes());
                prop_assert!(g.marginalize_mccg(u).unwrap().is_mccg().unwrap());
            }
        }
    }
}
