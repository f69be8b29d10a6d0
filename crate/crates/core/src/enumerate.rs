//! Exhaustive and random generation of small graphs.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{EdgeKind, MixedGraph};
use crate::learn::fix_c1c2;

/// Every graph over `A, B, ...` (n nodes) whose pairs each take one of the
/// given options: `None` for no edge, `Some((kind, forward))` otherwise,
/// where `forward = false` reverses a directed edge. Only graphs passing
/// `keep` are collected.
fn all_assignments(
    n: usize,
    options: &[Option<(EdgeKind, bool)>],
    keep: impl Fn(&MixedGraph) -> bool,
) -> Vec<MixedGraph> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    let k = options.len();
    let total = k.pow(pairs.len() as u32);
    let base = MixedGraph::lettered(n);
    let mut out = Vec::new();
    for code in 0..total {
        let mut g = base.clone();
        let mut c = code;
        for &(a, b) in &pairs {
            if let Some((kind, fwd)) = options[c % k] {
                let (x, y) = if fwd { (a, b) } else { (b, a) };
                g.add_edge(x, y, kind).expect("fresh pair");
            }
            c /= k;
        }
        if keep(&g) {
            out.push(g);
        }
    }
    out
}

/// All chain graphs over `n` labeled nodes.
pub fn all_chain_graphs(n: usize) -> Vec<MixedGraph> {
    let opts = [
        None,
        Some((EdgeKind::Undirected, true)),
        Some((EdgeKind::Directed, true)),
        Some((EdgeKind::Directed, false)),
    ];
    all_assignments(n, &opts, |g| !g.has_semidirected_cycle())
}

/// All graphs with undirected and bidirected edges over `n` labeled nodes.
pub fn all_ccgs(n: usize) -> Vec<MixedGraph> {
    let opts = [
        None,
        Some((EdgeKind::Undirected, true)),
        Some((EdgeKind::Bidirected, true)),
    ];
    all_assignments(n, &opts, |_| true)
}

/// All maximal covariance-concentration graphs over `n` labeled nodes.
pub fn all_mccgs(n: usize) -> Vec<MixedGraph> {
    let opts = [
        None,
        Some((EdgeKind::Undirected, true)),
        Some((EdgeKind::Bidirected, true)),
    ];
    all_assignments(n, &opts, |g| g.is_mccg().expect("no directed edges"))
}

/// Random chain graph: nodes are shuffled and cut into ordered blocks;
/// pairs inside a block get undirected edges, pairs across blocks directed
/// edges from the earlier block, each with probability `density`.
pub fn random_chain_graph<R: Rng>(n: usize, density: f64, rng: &mut R) -> MixedGraph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut block = vec![0usize; n];
    let mut cur = 0;
    for (pos, &v) in order.iter().enumerate() {
        if pos > 0 && rng.random_bool(0.5) {
            cur += 1;
        }
        block[v] = cur;
    }
    let mut g = MixedGraph::lettered(n);
    for (i, &a) in order.iter().enumerate() {
        for &b in &order[i + 1..] {
            if !rng.random_bool(density) {
                continue;
            }
            let kind = if block[a] == block[b] {
                EdgeKind::Undirected
            } else {
                EdgeKind::Directed
            };
            g.add_edge(a, b, kind).expect("fresh pair");
        }
    }
    g
}

/// Random MCCG: a random covariance-concentration graph repaired by turning
/// offending bidirected edges undirected until both constraints hold.
pub fn random_mccg<R: Rng>(n: usize, density: f64, rng: &mut R) -> MixedGraph {
    let mut g = MixedGraph::lettered(n);
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(density) {
                let kind = if rng.random_bool(0.5) {
                    EdgeKind::Undirected
                } else {
                    EdgeKind::Bidirected
                };
                g.add_edge(a, b, kind).expect("fresh pair");
            }
        }
    }
    fix_c1c2(&g).expect("no directed edges")
}
