//! Finite sets of conditional (in)dependence triples and their closure under
//! the graphoid properties plus composition and weak transitivity.
//!
//! A triple `X ⊥ Y | Z` is stored under its base-4 code (digit 1 for X, 2
//! for Y, 3 for Z) in both orientations, so symmetry is built in.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{CgError, Result};
use crate::graph::{EdgeKind, MixedGraph};
use crate::nodeset::NodeSet;
use crate::oracle::IndependenceOracle;
use crate::separation::{all_queries, separated, SeparationKind, SeparationQuery};

/// `X ⊥ Y | Z` (or `X ⊥̸ Y | Z` in a dependence set).
pub type CiTriple = SeparationQuery;

/// Largest universe `full_model` will enumerate.
pub const MODEL_NODE_LIMIT: usize = 7;
/// Largest universe the closures run on.
pub const CLOSURE_NODE_LIMIT: usize = 6;

fn code(t: &CiTriple) -> usize {
    let digit = |s: NodeSet, d: usize| s.iter().map(|i| d << (2 * i)).sum::<usize>();
    digit(t.x, 1) + digit(t.y, 2) + digit(t.z, 3)
}

fn decode(n: usize, mut c: usize) -> CiTriple {
    let mut t = CiTriple::new(NodeSet::EMPTY, NodeSet::EMPTY, NodeSet::EMPTY);
    for i in 0..n {
        match c & 3 {
            1 => t.x.insert(i),
            2 => t.y.insert(i),
            3 => t.z.insert(i),
            _ => {}
        }
        c >>= 2;
    }
    t
}

fn valid(n: usize, t: &CiTriple) -> bool {
    !t.x.is_empty()
        && !t.y.is_empty()
        && t.x.is_disjoint(t.y)
        && t.x.is_disjoint(t.z)
        && t.y.is_disjoint(t.z)
        && t.x.union(t.y).union(t.z).is_subset(NodeSet::full(n))
}

/// Orients a triple so that `min(X) < min(Y)`.
pub fn canonical(t: CiTriple) -> CiTriple {
    if t.x.min() < t.y.min() {
        t
    } else {
        t.swapped()
    }
}

/// Set of triples over a fixed universe of `n` nodes.
#[derive(Clone, PartialEq, Eq)]
pub struct TripleSet {
    n: usize,
    bits: Vec<u64>,
}

pub type IndependenceModel = TripleSet;

impl TripleSet {
    pub fn empty(n: usize) -> Self {
        assert!(n <= MODEL_NODE_LIMIT, "universe too large");
        let words = (1usize << (2 * n)).div_ceil(64);
        TripleSet {
            n,
            bits: vec![0; words],
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    fn has_code(&self, c: usize) -> bool {
        self.bits[c / 64] >> (c % 64) & 1 == 1
    }

    fn set_code(&mut self, c: usize) {
        self.bits[c / 64] |= 1 << (c % 64);
    }

    /// Membership of `X ⊥ Y | Z` in either orientation; invalid triples are
    /// never members.
    pub fn contains(&self, t: &CiTriple) -> bool {
        valid(self.n, t) && self.has_code(code(t))
    }

    /// Adds `t` in both orientations; returns whether it was new.
    pub fn insert(&mut self, t: CiTriple) -> Result<bool> {
        if !valid(self.n, &t) {
            return Err(CgError::InvalidQuery(format!(
                "not a valid triple over {} nodes: {t:?}",
                self.n
            )));
        }
        Ok(self.insert_unchecked(t))
    }

    fn insert_unchecked(&mut self, t: CiTriple) -> bool {
        let c = code(&t);
        if self.has_code(c) {
            return false;
        }
        self.set_code(c);
        self.set_code(code(&t.swapped()));
        true
    }

    /// Members in canonical orientation, ordered by code.
    pub fn iter(&self) -> impl Iterator<Item = CiTriple> + '_ {
        (0..1usize << (2 * self.n))
            .filter(|&c| self.has_code(c))
            .map(|c| decode(self.n, c))
            .filter(|t| canonical(*t) == *t)
    }

    pub fn len(&self) -> usize {
        self.iter().count()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &TripleSet) -> bool {
        self.n == other.n && self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    /// Triples in `self` but not in `other`, canonical.
    pub fn difference(&self, other: &TripleSet) -> Vec<CiTriple> {
        self.iter().filter(|t| !other.contains(t)).collect()
    }

    /// Every valid triple not in `self`.
    pub fn complement(&self) -> TripleSet {
        let mut out = TripleSet::empty(self.n);
        for t in all_queries(self.n) {
            if !self.contains(&t) {
                out.insert_unchecked(t);
            }
        }
        out
    }

    /// One `X|Y|Z` line per canonical member, names comma-separated.
    pub fn to_lines(&self, names: &[String]) -> Vec<String> {
        let fmt = |s: NodeSet| {
            s.iter()
                .map(|i| names[i].as_str())
                .collect::<Vec<_>>()
                .join(",")
        };
        let mut lines: Vec<String> = self
            .iter()
            .map(|t| format!("{}|{}|{}", fmt(t.x), fmt(t.y), fmt(t.z)))
            .collect();
        lines.sort();
        lines
    }
}

impl fmt::Debug for TripleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Every valid triple separated in `g` under `kind`.
pub fn full_model(g: &MixedGraph, kind: SeparationKind) -> Result<IndependenceModel> {
    let n = g.node_count();
    if n > MODEL_NODE_LIMIT {
        return Err(CgError::BoundExceeded {
            bound: MODEL_NODE_LIMIT,
            actual: n,
        });
    }
    let mut m = TripleSet::empty(n);
    for q in all_queries(n) {
        if q.x.min() < q.y.min() && separated(g, kind, &q)? {
            m.insert_unchecked(q);
        }
    }
    Ok(m)
}

/// `A ⊥ B` for non-adjacent pairs in different undirected components and
/// `A ⊥ B | ne(A)` for non-adjacent pairs sharing one.
pub fn local_separation_base(g: &MixedGraph) -> Result<Vec<CiTriple>> {
    g.require_mccg()?;
    let mut out = BTreeSet::new();
    for a in 0..g.node_count() {
        let co = g.component_of(a);
        for b in g.nodes().without(a).difference(g.adj(a)) {
            let z = if co.contains(b) {
                g.und(a)
            } else {
                NodeSet::EMPTY
            };
            out.insert(CiTriple::pair(a, b, z));
        }
    }
    Ok(out.into_iter().collect())
}

/// Checks that `q` partitions the nodes of `g`, keeps undirected edges
/// inside its blocks and bidirected edges across them.
pub fn check_partition(g: &MixedGraph, q: &[NodeSet]) -> Result<()> {
    let mut seen = NodeSet::EMPTY;
    for &block in q {
        if block.is_empty() || !block.is_disjoint(seen) {
            return Err(CgError::Precondition(
                "partition blocks must be non-empty and disjoint".into(),
            ));
        }
        seen = seen.union(block);
    }
    if seen != g.nodes() {
        return Err(CgError::Precondition(
            "partition does not cover the nodes".into(),
        ));
    }
    let block_of = |v: usize| q.iter().position(|b| b.contains(v));
    for e in g.edges() {
        let same = block_of(e.from) == block_of(e.to);
        let ok = match e.kind {
            EdgeKind::Undirected => same,
            EdgeKind::Bidirected => !same,
            EdgeKind::Directed => false,
        };
        if !ok {
            return Err(CgError::Precondition(format!(
                "partition is inconsistent with {} {} {}",
                g.name(e.from),
                e.kind.token(),
                g.name(e.to)
            )));
        }
    }
    Ok(())
}

/// `A ⊥ B` for non-adjacent pairs in different blocks of `q` and
/// `A ⊥ B | Q ∖ {A, B}` for non-adjacent pairs in the same block `Q`.
pub fn pairwise_separation_base(g: &MixedGraph, q: &[NodeSet]) -> Result<Vec<CiTriple>> {
    g.require_mccg()?;
    check_partition(g, q)?;
    let mut out = Vec::new();
    for a in 0..g.node_count() {
        let block = *q
            .iter()
            .find(|b| b.contains(a))
            .expect("partition covers a");
        for b in g.nodes().difference(g.adj(a)).iter().filter(|&b| b > a) {
            let z = if block.contains(b) {
                block.without(a).without(b)
            } else {
                NodeSet::EMPTY
            };
            out.push(CiTriple::pair(a, b, z));
        }
    }
    Ok(out)
}

fn check_universe(n: usize) -> Result<()> {
    if n > CLOSURE_NODE_LIMIT {
        return Err(CgError::BoundExceeded {
            bound: CLOSURE_NODE_LIMIT,
            actual: n,
        });
    }
    Ok(())
}

/// Non-empty subsets of `s`.
fn nonempty_subsets(s: NodeSet) -> impl Iterator<Item = NodeSet> {
    s.subsets().filter(|w| !w.is_empty())
}

/// Closure of `base` under symmetry, decomposition, weak union,
/// contraction, intersection and composition. Weak transitivity has a
/// disjunctive consequent and is checked separately by
/// [`weak_transitivity_gaps`].
pub fn wtc_closure(base: &[CiTriple], n: usize) -> Result<IndependenceModel> {
    check_universe(n)?;
    let all = NodeSet::full(n);
    let mut m = TripleSet::empty(n);
    let mut work = Vec::new();
    for &t in base {
        if m.insert(t)? {
            work.push(t);
            work.push(t.swapped());
        }
    }
    let add = |m: &mut TripleSet, work: &mut Vec<CiTriple>, t: CiTriple| {
        if m.insert_unchecked(t) {
            work.push(t);
            work.push(t.swapped());
        }
    };
    while let Some(t) = work.pop() {
        let (x, y, z) = (t.x, t.y, t.z);
        let rest = all.difference(x).difference(y).difference(z);
        for w in nonempty_subsets(y).filter(|&w| w != y) {
            // decomposition and weak union
            add(&mut m, &mut work, CiTriple::new(x, w, z));
            add(
                &mut m,
                &mut work,
                CiTriple::new(x, y.difference(w), z.union(w)),
            );
        }
        for w in nonempty_subsets(z) {
            let zr = z.difference(w);
            // contraction with t = X ⊥ Y | Zr ∪ W
            if m.contains(&CiTriple::new(x, w, zr)) {
                add(&mut m, &mut work, CiTriple::new(x, y.union(w), zr));
            }
            // intersection with t = X ⊥ Y | Zr ∪ W
            if m.contains(&CiTriple::new(x, w, zr.union(y))) {
                add(&mut m, &mut work, CiTriple::new(x, y.union(w), zr));
            }
        }
        for v in nonempty_subsets(rest) {
            // contraction with t = X ⊥ W | Z, partner X ⊥ V | Z ∪ W
            if m.contains(&CiTriple::new(x, v, z.union(y))) {
                add(&mut m, &mut work, CiTriple::new(x, v.union(y), z));
            }
            // composition
            if m.contains(&CiTriple::new(x, v, z)) {
                add(&mut m, &mut work, CiTriple::new(x, y.union(v), z));
            }
        }
    }
    Ok(m)
}

/// Weak-transitivity instances `X ⊥ Y | Z ∧ X ⊥ Y | Z ∪ K` in `m` where
/// neither `X ⊥ K | Z` nor `K ⊥ Y | Z` is in `m`, as `(X ⊥ Y | Z, K)`.
pub fn weak_transitivity_gaps(m: &TripleSet) -> Vec<(CiTriple, usize)> {
    let mut gaps = Vec::new();
    for t in m.iter() {
        let rest = NodeSet::full(m.n)
            .difference(t.x)
            .difference(t.y)
            .difference(t.z);
        for k in rest {
            let kk = NodeSet::singleton(k);
            if m.contains(&CiTriple::new(t.x, t.y, t.z.with(k)))
                && !m.contains(&CiTriple::new(t.x, kk, t.z))
                && !m.contains(&CiTriple::new(kk, t.y, t.z))
            {
                gaps.push((t, k));
            }
        }
    }
    gaps
}

/// Which conditioning set an undirected edge's base dependence uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DependenceForm {
    /// `A ⊥̸ B | K ∖ {A, B}` with `K` the undirected component.
    #[default]
    Component,
    /// `A ⊥̸ B | ne(A) ∖ B`.
    Neighbors,
}

/// `A ⊥̸ B` for every bidirected edge, and for every undirected edge the
/// dependence given the rest of its component (or of `ne(A)`).
pub fn dependence_base(g: &MixedGraph, form: DependenceForm) -> Result<Vec<CiTriple>> {
    g.require_mccg()?;
    let mut out = Vec::new();
    for e in g.edges() {
        let (a, b) = (e.from, e.to);
        match e.kind {
            EdgeKind::Bidirected => out.push(CiTriple::pair(a, b, NodeSet::EMPTY)),
            _ => match form {
                DependenceForm::Component => {
                    let k = g.component_of(a);
                    out.push(CiTriple::pair(a, b, k.without(a).without(b)));
                }
                DependenceForm::Neighbors => {
                    out.push(CiTriple::pair(a, b, g.und(a).without(b)));
                    out.push(CiTriple::pair(b, a, g.und(b).without(a)));
                }
            },
        }
    }
    Ok(out)
}

/// Least set of dependences containing `base` and closed under the
/// contrapositive forms of symmetry, decomposition, weak union, both
/// contractions, intersection, both weak transitivities and composition.
/// Independence antecedents are looked up in `sep`.
pub fn wtc_dependence_closure(base: &[CiTriple], sep: &IndependenceModel) -> Result<TripleSet> {
    let n = sep.node_count();
    check_universe(n)?;
    let all = NodeSet::full(n);
    let mut d = TripleSet::empty(n);
    let mut work = Vec::new();
    for &t in base {
        if d.insert(t)? {
            work.push(t);
            work.push(t.swapped());
        }
    }
    let add = |d: &mut TripleSet, work: &mut Vec<CiTriple>, t: CiTriple| {
        if d.insert_unchecked(t) {
            work.push(t);
            work.push(t.swapped());
        }
    };
    let indep = |x, y, z| sep.contains(&CiTriple::new(x, y, z));
    while let Some(t) = work.pop() {
        let (x, y, z) = (t.x, t.y, t.z);
        let rest = all.difference(x).difference(y).difference(z);
        for w in nonempty_subsets(rest) {
            // decomposition
            add(&mut d, &mut work, CiTriple::new(x, y.union(w), z));
        }
        for w in nonempty_subsets(z) {
            // weak union
            add(
                &mut d,
                &mut work,
                CiTriple::new(x, y.union(w), z.difference(w)),
            );
        }
        // t = X ⊥̸ Yp ∪ W | Z split every way
        for yp in nonempty_subsets(y).filter(|&s| s != y) {
            let w = y.difference(yp);
            if indep(x, yp, z.union(w)) {
                // contraction1
                add(&mut d, &mut work, CiTriple::new(x, w, z));
            }
            if indep(x, w, z) {
                // contraction2
                add(&mut d, &mut work, CiTriple::new(x, yp, z.union(w)));
            }
            if indep(x, yp, z.union(w)) {
                // intersection
                add(&mut d, &mut work, CiTriple::new(x, w, z.union(yp)));
            }
            if indep(x, yp, z) {
                // composition
                add(&mut d, &mut work, CiTriple::new(x, w, z));
            }
        }
        // weak transitivity with t = X ⊥̸ K | Z as the first premise
        if y.len() == 1 {
            let k = y;
            for yy in nonempty_subsets(rest) {
                if !d.contains(&CiTriple::new(k, yy, z)) {
                    continue;
                }
                if indep(x, yy, z) {
                    add(&mut d, &mut work, CiTriple::new(x, yy, z.union(k)));
                }
                if indep(x, yy, z.union(k)) {
                    add(&mut d, &mut work, CiTriple::new(x, yy, z));
                }
            }
        }
    }
    Ok(d)
}

/// Outcome of the two local Markov conditions for one node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MarkovCheck {
    pub node: usize,
    /// `A ⊥ co(A) ∖ A ∖ ne(A) | pa(A ∪ ne(A)) ∪ ne(A)`
    pub c1: bool,
    /// `A ⊥ V ∖ A ∖ de(A) ∖ pa(A) | pa(A)`
    pub c2: bool,
}

/// Evaluates both local Markov conditions of the chain graph `g` for every
/// node against `oracle`. An empty right-hand side holds vacuously.
pub fn check_markov_c1c2(
    g: &MixedGraph,
    oracle: &dyn IndependenceOracle,
) -> Result<Vec<MarkovCheck>> {
    g.require_chain_graph()?;
    if oracle.variables() != g.names() {
        return Err(CgError::Precondition(
            "oracle and graph have different variables".into(),
        ));
    }
    let mut out = Vec::new();
    for a in 0..g.node_count() {
        let aa = NodeSet::singleton(a);
        let ne = g.neighbors(aa)?;
        let pa = g.parents(aa)?;
        let y1 = g.component_of(a).without(a).difference(ne);
        let z1 = g.parents(ne.with(a))?.union(ne);
        let y2 = g
            .nodes()
            .without(a)
            .difference(g.descendants(aa)?)
            .difference(pa);
        let holds = |y: NodeSet, z: NodeSet| -> Result<bool> {
            if y.is_empty() {
                Ok(true)
            } else {
                oracle.independent_sets(aa, y, z)
            }
        };
        out.push(MarkovCheck {
            node: a,
            c1: holds(y1, z1)?,
            c2: holds(y2, pa)?,
        });
    }
    Ok(out)
}
