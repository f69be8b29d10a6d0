//! Separation in AMP chain graphs, maximal covariance-concentration graphs
//! and the ancestral graphs they translate into.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{CgError, Result};
use crate::graph::{is_head_no_tail, EdgeKind, End, MixedGraph};
use crate::nodeset::NodeSet;

/// `X ⊥ Y | Z` over node indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SeparationQuery {
    pub x: NodeSet,
    pub y: NodeSet,
    pub z: NodeSet,
}

impl SeparationQuery {
    pub fn new(x: NodeSet, y: NodeSet, z: NodeSet) -> Self {
        SeparationQuery { x, y, z }
    }

    pub fn pair(a: usize, b: usize, z: NodeSet) -> Self {
        SeparationQuery::new(NodeSet::singleton(a), NodeSet::singleton(b), z)
    }

    pub fn swapped(self) -> Self {
        SeparationQuery::new(self.y, self.x, self.z)
    }

    /// Checks that the sets are pairwise disjoint, `X` and `Y` are
    /// non-empty, and everything lies within `g`.
    pub fn validate(&self, g: &MixedGraph) -> Result<()> {
        let all = g.nodes();
        if self.x.is_empty() || self.y.is_empty() {
            return Err(CgError::InvalidQuery("X and Y must be non-empty".into()));
        }
        if !self.x.union(self.y).union(self.z).is_subset(all) {
            return Err(CgError::InvalidQuery(
                "set mentions a node outside the graph".into(),
            ));
        }
        if !self.x.is_disjoint(self.y) || !self.x.is_disjoint(self.z) || !self.y.is_disjoint(self.z)
        {
            return Err(CgError::InvalidQuery(
                "X, Y and Z must be pairwise disjoint".into(),
            ));
        }
        Ok(())
    }

    /// Parses comma-separated node names.
    pub fn from_names(g: &MixedGraph, x: &str, y: &str, z: &str) -> Result<Self> {
        let parse = |s: &str| -> Result<NodeSet> {
            let names: Vec<&str> = s
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .collect();
            g.set_of(&names)
        };
        let q = SeparationQuery::new(parse(x)?, parse(y)?, parse(z)?);
        q.validate(g)?;
        Ok(q)
    }
}

/// Every valid query over `n` nodes: each node is in X, Y, Z or none.
pub fn all_queries(n: usize) -> Vec<SeparationQuery> {
    let mut out = Vec::new();
    let total = 4usize.pow(n as u32);
    for code in 0..total {
        let (mut x, mut y, mut z) = (NodeSet::EMPTY, NodeSet::EMPTY, NodeSet::EMPTY);
        let mut c = code;
        for i in 0..n {
            match c % 4 {
                1 => x.insert(i),
                2 => y.insert(i),
                3 => z.insert(i),
                _ => {}
            }
            c /= 4;
        }
        if !x.is_empty() && !y.is_empty() {
            out.push(SeparationQuery::new(x, y, z));
        }
    }
    out
}

/// The edge end at the current node through which a route arrived.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArrivalKind {
    Start,
    ArrowIn,
    ArrowOut,
    Line,
}

impl ArrivalKind {
    pub fn from_end(e: End) -> Self {
        match e {
            End::Head => ArrivalKind::ArrowIn,
            End::Tail => ArrivalKind::ArrowOut,
            End::Line => ArrivalKind::Line,
        }
    }

    fn index(self) -> usize {
        self as usize
    }

    fn end(self) -> Option<End> {
        match self {
            ArrivalKind::Start => None,
            ArrivalKind::ArrowIn => Some(End::Head),
            ArrivalKind::ArrowOut => Some(End::Tail),
            ArrivalKind::Line => Some(End::Line),
        }
    }
}

/// Whether a route may pass through `b`, arriving by end `a` and leaving by
/// end `d` (both ends at `b`).
fn transit_allowed(a: End, d: End, in_z: bool) -> bool {
    is_head_no_tail(a, d) == in_z
}

/// Which separation criterion to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SeparationKind {
    Amp,
    Mccg,
    Mag,
}

impl SeparationKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "amp" => Ok(SeparationKind::Amp),
            "mccg" => Ok(SeparationKind::Mccg),
            "mag" => Ok(SeparationKind::Mag),
            other => Err(CgError::Parse(format!("unknown separation kind `{other}`"))),
        }
    }

    /// AMP for graphs without bidirected edges, MCCG otherwise.
    pub fn for_graph(g: &MixedGraph) -> Self {
        if g.has_bidirected() {
            SeparationKind::Mccg
        } else {
            SeparationKind::Amp
        }
    }
}

pub fn separated(g: &MixedGraph, kind: SeparationKind, q: &SeparationQuery) -> Result<bool> {
    match kind {
        SeparationKind::Amp => amp_separated(g, q),
        SeparationKind::Mccg => mccg_separated(g, q),
        SeparationKind::Mag => mag_separated(g, q),
    }
}

/// Nodes at the far end of some `z`-open route starting in `x`, following
/// AMP transit rules. Works on any graph; only meaningful on chain graphs.
pub fn amp_reachable(g: &MixedGraph, x: NodeSet, z: NodeSet) -> NodeSet {
    let n = g.node_count();
    let mut seen = vec![[false; 4]; n];
    let mut queue = VecDeque::new();
    for v in x {
        seen[v][ArrivalKind::Start.index()] = true;
        queue.push_back((v, ArrivalKind::Start));
    }
    let mut reached = NodeSet::EMPTY;
    while let Some((v, arr)) = queue.pop_front() {
        for w in g.adj(v) {
            let d = g.end(v, w).expect("adjacent");
            if let Some(a) = arr.end() {
                if !transit_allowed(a, d, z.contains(v)) {
                    continue;
                }
            }
            reached.insert(w);
            let next = ArrivalKind::from_end(g.end(w, v).expect("adjacent"));
            if !seen[w][next.index()] {
                seen[w][next.index()] = true;
                queue.push_back((w, next));
            }
        }
    }
    reached
}

/// AMP separation in a chain graph.
pub fn amp_separated(g: &MixedGraph, q: &SeparationQuery) -> Result<bool> {
    g.require_chain_graph()?;
    q.validate(g)?;
    Ok(amp_reachable(g, q.x, q.z).is_disjoint(q.y))
}

/// Literal route enumeration: tries every route of at most `max_len` edges
/// from `X`, testing each interior node against the Z-open condition.
/// A route revisiting a (node, arrival) state is not extended, since the
/// loop between the two visits can be cut out.
pub fn brute_force_amp_separated(
    g: &MixedGraph,
    q: &SeparationQuery,
    max_len: usize,
) -> Result<bool> {
    q.validate(g)?;
    if max_len < 3 * g.node_count() {
        return Err(CgError::Precondition(format!(
            "route bound {max_len} is below 3|V| = {}",
            3 * g.node_count()
        )));
    }
    fn extend(
        g: &MixedGraph,
        q: &SeparationQuery,
        route: &mut Vec<usize>,
        states: &mut BTreeSet<(usize, Option<End>)>,
        left: usize,
    ) -> bool {
        let v = *route.last().unwrap();
        if route.len() > 1 && q.y.contains(v) {
            return true;
        }
        if left == 0 {
            return false;
        }
        let arrived = (route.len() > 1).then(|| g.end(v, route[route.len() - 2]).unwrap());
        for w in 0..g.node_count() {
            let Some(d) = g.end(v, w) else { continue };
            if let Some(a) = arrived {
                let hnt = is_head_no_tail(a, d);
                let ok = (hnt && q.z.contains(v)) || (!hnt && !q.z.contains(v));
                if !ok {
                    continue;
                }
            }
            let state = (w, g.end(w, v));
            if !states.insert(state) {
                continue;
            }
            route.push(w);
            let found = extend(g, q, route, states, left - 1);
            route.pop();
            states.remove(&state);
            if found {
                return true;
            }
        }
        false
    }
    for s in q.x {
        let mut states = BTreeSet::from([(s, None)]);
        if extend(g, q, &mut vec![s], &mut states, max_len) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Which Z-open definition to apply to covariance-concentration graph paths.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpenRule {
    /// Triplex nodes in `Z`, non-triplex nodes outside `Z`.
    Simplified,
    /// As above, but a non-triplex node with a spouse may also be in `Z`.
    General,
}

/// Whether the simple path `path` of a covariance-concentration graph is
/// `z`-open. The endpoints are unconstrained.
pub fn ccg_path_open(g: &MixedGraph, path: &[usize], z: NodeSet, rule: OpenRule) -> bool {
    path.windows(3).all(|w| {
        let b = w[1];
        let triplex = is_head_no_tail(g.end(b, w[0]).unwrap(), g.end(b, w[2]).unwrap());
        if triplex {
            z.contains(b)
        } else {
            !z.contains(b) || (rule == OpenRule::General && !g.bid(b).is_empty())
        }
    })
}

/// Depth-first search over simple paths from `x`, extending only through
/// nodes that satisfy the open condition. Returns the reached nodes.
fn ccg_reachable(g: &MixedGraph, x: NodeSet, z: NodeSet, rule: OpenRule, stop: NodeSet) -> NodeSet {
    #[allow(clippy::too_many_arguments)]
    fn dfs(
        g: &MixedGraph,
        v: usize,
        arrived: Option<End>,
        visited: NodeSet,
        z: NodeSet,
        rule: OpenRule,
        stop: NodeSet,
        reached: &mut NodeSet,
    ) -> bool {
        for w in g.adj(v).difference(visited) {
            let d = g.end(v, w).unwrap();
            if let Some(a) = arrived {
                let ok = if is_head_no_tail(a, d) {
                    z.contains(v)
                } else {
                    !z.contains(v) || (rule == OpenRule::General && !g.bid(v).is_empty())
                };
                if !ok {
                    continue;
                }
            }
            reached.insert(w);
            if stop.contains(w) {
                return true;
            }
            if dfs(g, w, g.end(w, v), visited.with(w), z, rule, stop, reached) {
                return true;
            }
        }
        false
    }
    let mut reached = NodeSet::EMPTY;
    for s in x {
        if dfs(
            g,
            s,
            None,
            NodeSet::singleton(s),
            z,
            rule,
            stop,
            &mut reached,
        ) {
            break;
        }
    }
    reached
}

/// Route search in the latent expansion of `g` without building it. Each
/// `v <-> w` stands for `v <- L -> w`; `L` is never head-no-tail and never
/// in `z`, so a route entering it may go on to either `v` or `w`, arriving
/// by an arrowhead.
fn mccg_reachable(g: &MixedGraph, x: NodeSet, z: NodeSet) -> NodeSet {
    let n = g.node_count();
    let mut seen = vec![[false; 4]; n];
    let mut queue = VecDeque::new();
    for v in x {
        seen[v][ArrivalKind::Start.index()] = true;
        queue.push_back((v, ArrivalKind::Start));
    }
    let mut reached = NodeSet::EMPTY;
    let mut visit = |w: usize, arr: ArrivalKind, queue: &mut VecDeque<_>| {
        reached.insert(w);
        if !seen[w][arr.index()] {
            seen[w][arr.index()] = true;
            queue.push_back((w, arr));
        }
    };
    while let Some((v, arr)) = queue.pop_front() {
        let leaves = |d: End| {
            arr.end()
                .is_none_or(|a| transit_allowed(a, d, z.contains(v)))
        };
        if leaves(End::Line) {
            for w in g.und(v) {
                visit(w, ArrivalKind::Line, &mut queue);
            }
        }
        if leaves(End::Head) && !g.bid(v).is_empty() {
            for w in g.bid(v).with(v) {
                visit(w, ArrivalKind::ArrowIn, &mut queue);
            }
        }
    }
    reached
}

/// MCCG separation: AMP separation in the latent expansion.
pub fn mccg_separated(g: &MixedGraph, q: &SeparationQuery) -> Result<bool> {
    g.require_mccg()?;
    q.validate(g)?;
    Ok(mccg_reachable(g, q.x, q.z).is_disjoint(q.y))
}

/// Separation in any covariance-concentration graph under the general
/// definition, where a non-triplex node with a spouse never blocks.
pub fn ccg_separated_general(g: &MixedGraph, q: &SeparationQuery) -> Result<bool> {
    if !g.is_ccg() {
        return Err(CgError::WrongGraphKind {
            expected: "a graph with undirected and bidirected edges only",
            found: "directed edge".into(),
        });
    }
    q.validate(g)?;
    Ok(ccg_reachable(g, q.x, q.z, OpenRule::General, q.y).is_disjoint(q.y))
}

/// Name of the latent node standing in for `a <-> b`.
pub fn latent_name(a: &str, b: &str) -> String {
    format!("_L_{a}_{b}")
}

/// Chain graph in which every `A <-> B` becomes `A <- L -> B` for a fresh
/// latent `L`.
pub fn latent_expand(g: &MixedGraph) -> Result<MixedGraph> {
    g.require_mccg()?;
    let bid: Vec<(usize, usize)> = g
        .edges()
        .into_iter()
        .filter(|e| e.kind == EdgeKind::Bidirected)
        .map(|e| (e.from, e.to))
        .collect();
    let mut names: Vec<String> = g.names().to_vec();
    for &(a, b) in &bid {
        let l = latent_name(g.name(a), g.name(b));
        if g.index(&l).is_ok() {
            return Err(CgError::DuplicateNode(l));
        }
        names.push(l);
    }
    let mut h = MixedGraph::new(names)?;
    for e in g.edges() {
        let (a, b) = (h.index(g.name(e.from))?, h.index(g.name(e.to))?);
        match e.kind {
            EdgeKind::Bidirected => {
                let l = h.index(&latent_name(g.name(e.from), g.name(e.to)))?;
                h.add_edge(l, a, EdgeKind::Directed)?;
                h.add_edge(l, b, EdgeKind::Directed)?;
            }
            kind => h.add_edge(a, b, kind)?,
        }
    }
    Ok(h)
}

/// Maps the node set `s` of `from` onto the equally named nodes of `to`.
pub fn map_set(from: &MixedGraph, to: &MixedGraph, s: NodeSet) -> Result<NodeSet> {
    s.iter().map(|i| to.index(from.name(i))).collect()
}

/// Ancestral graph with the same separations: every `A <-> B -- C` becomes
/// `A <-> B <- C`. Undirected edges whose ends both have spouses turn
/// bidirected. Ends that gain a spouse this way already had one, so a
/// single simultaneous pass reaches the fixpoint.
pub fn mag_translate(g: &MixedGraph) -> Result<MixedGraph> {
    g.require_mccg()?;
    let mut cur = g.clone();
    loop {
        let mut next = cur.clone();
        let has_spouse = |i: usize| !cur.bid(i).is_empty();
        for e in cur.edges() {
            if e.kind != EdgeKind::Undirected {
                continue;
            }
            let (a, b) = (e.from, e.to);
            match (has_spouse(a), has_spouse(b)) {
                (true, true) => next.set_edge(a, b, EdgeKind::Bidirected)?,
                (false, true) => next.set_edge(a, b, EdgeKind::Directed)?,
                (true, false) => next.set_edge(b, a, EdgeKind::Directed)?,
                (false, false) => {}
            }
        }
        if next == cur {
            return Ok(cur);
        }
        cur = next;
    }
}

/// `san_G(X)`: nodes outside `X` with a directed path into `X`.
pub fn strict_ancestors(g: &MixedGraph, x: NodeSet) -> NodeSet {
    let mut seen = x;
    let mut queue: VecDeque<usize> = x.iter().collect();
    while let Some(v) = queue.pop_front() {
        for w in g.parents_of(v).difference(seen) {
            seen.insert(w);
            queue.push_back(w);
        }
    }
    seen.difference(x)
}

/// Separation in an ancestral graph by enumerating simple paths: colliders
/// must lie in `Z ∪ san(Z)`, every other interior node outside `Z`.
pub fn mag_separated(g: &MixedGraph, q: &SeparationQuery) -> Result<bool> {
    q.validate(g)?;
    let active = q.z.union(strict_ancestors(g, q.z));
    #[allow(clippy::too_many_arguments)]
    fn dfs(
        g: &MixedGraph,
        path: &mut Vec<usize>,
        visited: NodeSet,
        q: &SeparationQuery,
        active: NodeSet,
    ) -> bool {
        let v = *path.last().unwrap();
        if path.len() > 1 && q.y.contains(v) {
            return true;
        }
        for w in g.adj(v).difference(visited) {
            if path.len() > 1 {
                let u = path[path.len() - 2];
                let collider = g.end(v, u) == Some(End::Head) && g.end(v, w) == Some(End::Head);
                let ok = if collider {
                    active.contains(v)
                } else {
                    !q.z.contains(v)
                };
                if !ok {
                    continue;
                }
            }
            path.push(w);
            let found = dfs(g, path, visited.with(w), q, active);
            path.pop();
            if found {
                return true;
            }
        }
        false
    }
    for s in q.x {
        if dfs(g, &mut vec![s], NodeSet::singleton(s), q, active) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Bidirected graph joining every marginally dependent pair.
pub fn covariance_projection(g: &MixedGraph) -> Result<MixedGraph> {
    project(g, EdgeKind::Bidirected, |_, _| NodeSet::EMPTY)
}

/// Undirected graph joining every pair dependent given all other nodes.
pub fn concentration_projection(g: &MixedGraph) -> Result<MixedGraph> {
    project(g, EdgeKind::Undirected, |a, b| {
        g.nodes().without(a).without(b)
    })
}

fn project(
    g: &MixedGraph,
    kind: EdgeKind,
    cond: impl Fn(usize, usize) -> NodeSet,
) -> Result<MixedGraph> {
    g.require_mccg()?;
    let mut h = MixedGraph::new(g.names().to_vec())?;
    let n = g.node_count();
    for a in 0..n {
        for b in a + 1..n {
            if !mccg_separated(g, &SeparationQuery::pair(a, b, cond(a, b)))? {
                h.add_edge(a, b, kind)?;
            }
        }
    }
    Ok(h)
}

/// Every `S ⊆ V \ {a, b}` separating `a` from `b`, in increasing bit order.
pub fn separator_list(
    g: &MixedGraph,
    kind: SeparationKind,
    a: usize,
    b: usize,
) -> Result<Vec<NodeSet>> {
    let pool = g.nodes().without(a).without(b);
    let mut out = Vec::new();
    for s in pool.subsets() {
        if separated(g, kind, &SeparationQuery::pair(a, b, s))? {
            out.push(s);
        }
    }
    Ok(out)
}
