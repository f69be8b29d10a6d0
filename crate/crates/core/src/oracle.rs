//! Independence oracles: exact ones backed by a graph or a covariance
//! matrix, and a Fisher z-test on sample data. Gaussian models faithful to a
//! given graph are generated by random parameterization plus rejection.
//!
//! Every oracle indexes its variables in sorted name order, matching the
//! node indices of a [`MixedGraph`] over the same names.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{CgError, Result};
use crate::graph::MixedGraph;
use crate::nodeset::NodeSet;
use crate::separation::{latent_expand, separated, SeparationKind, SeparationQuery};

/// Answers `A ⊥ B | S` queries over a fixed set of variables.
pub trait IndependenceOracle {
    /// Variable names in sorted order; index `i` names variable `i`.
    fn variables(&self) -> &[String];

    fn independent(&self, a: usize, b: usize, s: NodeSet) -> Result<bool>;

    /// `X ⊥ Y | Z`, by default as the conjunction of all pairwise queries,
    /// which is exact for models satisfying composition.
    fn independent_sets(&self, x: NodeSet, y: NodeSet, z: NodeSet) -> Result<bool> {
        for a in x {
            for b in y {
                if !self.independent(a, b, z)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Whether queries may be issued from several threads at once.
    fn concurrency_safe(&self) -> bool {
        true
    }
}

/// Answers queries by separation in a chain graph or an MCCG.
#[derive(Clone, Debug)]
pub struct GraphOracle {
    graph: MixedGraph,
    kind: SeparationKind,
}

impl GraphOracle {
    pub fn new(graph: MixedGraph) -> Result<Self> {
        let kind = SeparationKind::for_graph(&graph);
        match kind {
            SeparationKind::Mccg => graph.require_mccg()?,
            _ => graph.require_chain_graph()?,
        }
        Ok(GraphOracle { graph, kind })
    }

    pub fn graph(&self) -> &MixedGraph {
        &self.graph
    }

    pub fn kind(&self) -> SeparationKind {
        self.kind
    }
}

impl IndependenceOracle for GraphOracle {
    fn variables(&self) -> &[String] {
        self.graph.names()
    }

    fn independent(&self, a: usize, b: usize, s: NodeSet) -> Result<bool> {
        separated(&self.graph, self.kind, &SeparationQuery::pair(a, b, s))
    }

    fn independent_sets(&self, x: NodeSet, y: NodeSet, z: NodeSet) -> Result<bool> {
        separated(&self.graph, self.kind, &SeparationQuery::new(x, y, z))
    }
}

/// A zero-mean Gaussian given by its covariance matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianModel {
    names: Vec<String>,
    cov: DMatrix<f64>,
}

impl GaussianModel {
    /// Checks symmetry (within 1e-12) and positive definiteness (smallest
    /// eigenvalue above 1e-9); variables are reordered by name.
    pub fn new(names: Vec<String>, cov: DMatrix<f64>) -> Result<Self> {
        let p = names.len();
        if cov.nrows() != p || cov.ncols() != p {
            return Err(CgError::Parse(format!(
                "covariance is {}x{} but there are {p} variables",
                cov.nrows(),
                cov.ncols()
            )));
        }
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&i, &j| names[i].cmp(&names[j]));
        if order.windows(2).any(|w| names[w[0]] == names[w[1]]) {
            return Err(CgError::DuplicateNode("covariance variable".into()));
        }
        let cov = DMatrix::from_fn(p, p, |i, j| cov[(order[i], order[j])]);
        let names: Vec<String> = order.iter().map(|&i| names[i].clone()).collect();
        for i in 0..p {
            for j in 0..i {
                if (cov[(i, j)] - cov[(j, i)]).abs() > 1e-12 {
                    return Err(CgError::Numerical("covariance is not symmetric".into()));
                }
            }
        }
        let min_eig = cov.clone().symmetric_eigenvalues().min();
        if p > 0 && (min_eig.is_nan() || min_eig <= 1e-9) {
            return Err(CgError::Numerical(format!(
                "covariance is not positive definite (smallest eigenvalue {min_eig:e})"
            )));
        }
        Ok(GaussianModel { names, cov })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn partial_correlation(&self, a: usize, b: usize, s: NodeSet) -> Result<f64> {
        partial_correlation(&self.cov, a, b, s)
    }

    /// `n` independent draws as the rows of an `n × p` matrix.
    pub fn sample(&self, n: usize, seed: u64) -> Result<DMatrix<f64>> {
        let p = self.names.len();
        let chol = self
            .cov
            .clone()
            .cholesky()
            .ok_or_else(|| CgError::Numerical("covariance has no Cholesky factor".into()))?;
        let l = chol.l();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = DMatrix::zeros(n, p);
        for r in 0..n {
            let z = DVector::from_fn(p, |_, _| rng.sample::<f64, _>(StandardNormal));
            let x = &l * z;
            for c in 0..p {
                out[(r, c)] = x[c];
            }
        }
        Ok(out)
    }
}

/// Partial correlation of `a` and `b` given `s` from the Schur complement of
/// the covariance block over `s`.
pub fn partial_correlation(cov: &DMatrix<f64>, a: usize, b: usize, s: NodeSet) -> Result<f64> {
    let idx: Vec<usize> = s.iter().collect();
    let pair = [a, b];
    let mut c = DMatrix::from_fn(2, 2, |i, j| cov[(pair[i], pair[j])]);
    if !idx.is_empty() {
        let ss = DMatrix::from_fn(idx.len(), idx.len(), |i, j| cov[(idx[i], idx[j])]);
        let ps = DMatrix::from_fn(2, idx.len(), |i, j| cov[(pair[i], idx[j])]);
        let chol = ss
            .cholesky()
            .ok_or_else(|| CgError::Numerical("singular conditioning block".into()))?;
        let solved = chol.solve(&ps.transpose());
        c -= &ps * solved;
    }
    let (va, vb) = (c[(0, 0)], c[(1, 1)]);
    if !(va > 0.0 && vb > 0.0) {
        return Err(CgError::Numerical(
            "non-positive conditional variance".into(),
        ));
    }
    Ok(c[(0, 1)] / (va * vb).sqrt())
}

/// Independent iff the absolute partial correlation is below `tol`.
#[derive(Clone, Debug)]
pub struct ExactGaussianOracle {
    model: GaussianModel,
    tol: f64,
}

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

pub fn exact_gaussian_oracle(model: GaussianModel, tol: f64) -> ExactGaussianOracle {
    ExactGaussianOracle { model, tol }
}

impl IndependenceOracle for ExactGaussianOracle {
    fn variables(&self) -> &[String] {
        self.model.names()
    }

    fn independent(&self, a: usize, b: usize, s: NodeSet) -> Result<bool> {
        Ok(self.model.partial_correlation(a, b, s)?.abs() < self.tol)
    }
}

/// Fisher z-test on the sample partial correlation.
#[derive(Clone, Debug)]
pub struct FisherZOracle {
    names: Vec<String>,
    n: usize,
    cov: DMatrix<f64>,
    critical: f64,
}

/// Builds the test from an `n × p` data matrix whose columns are named by
/// `names`. The sample covariance is computed once here.
pub fn fisher_z_oracle(
    names: Vec<String>,
    data: &DMatrix<f64>,
    alpha: f64,
) -> Result<FisherZOracle> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(CgError::InvalidQuery(format!(
            "alpha must lie in (0,1), got {alpha}"
        )));
    }
    if data.ncols() != names.len() {
        return Err(CgError::Parse(format!(
            "data has {} columns but {} names",
            data.ncols(),
            names.len()
        )));
    }
    let n = data.nrows();
    if n < 2 {
        return Err(CgError::Precondition("need at least two samples".into()));
    }
    let p = names.len();
    let means: Vec<f64> = (0..p).map(|j| data.column(j).mean()).collect();
    let centered = DMatrix::from_fn(n, p, |i, j| data[(i, j)] - means[j]);
    let cov = (centered.transpose() * &centered) / (n as f64 - 1.0);
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&i, &j| names[i].cmp(&names[j]));
    if order.windows(2).any(|w| names[w[0]] == names[w[1]]) {
        return Err(CgError::DuplicateNode("data column".into()));
    }
    let cov = DMatrix::from_fn(p, p, |i, j| cov[(order[i], order[j])]);
    let names = order.iter().map(|&i| names[i].clone()).collect();
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    Ok(FisherZOracle {
        names,
        n,
        cov,
        critical: normal.inverse_cdf(1.0 - alpha / 2.0),
    })
}

impl FisherZOracle {
    pub fn sample_size(&self) -> usize {
        self.n
    }
}

impl IndependenceOracle for FisherZOracle {
    fn variables(&self) -> &[String] {
        &self.names
    }

    fn independent(&self, a: usize, b: usize, s: NodeSet) -> Result<bool> {
        if self.n <= s.len() + 3 {
            return Err(CgError::Precondition(format!(
                "{} samples are too few to condition on {} variables",
                self.n,
                s.len()
            )));
        }
        let r = match partial_correlation(&self.cov, a, b, s) {
            Ok(r) => r,
            // a degenerate sample reads as dependence
            Err(CgError::Numerical(_)) => return Ok(false),
            Err(e) => return Err(e),
        };
        if !r.is_finite() || r.abs() >= 1.0 - 1e-15 {
            return Ok(false);
        }
        let stat = ((self.n - s.len() - 3) as f64).sqrt() * r.atanh();
        Ok(stat.abs() <= self.critical)
    }
}

/// Parameters of the random draw behind [`gen_gaussian`].
pub const MAX_ATTEMPTS: usize = 100;
const EXHAUSTIVE_LIMIT: usize = 8;

/// Random Gaussian model faithful to a chain graph or an MCCG. MCCGs are
/// latent-expanded first and the latents marginalized out afterwards. Each
/// draw is checked against every separation of `g` (a sample of
/// conditioning sets above 8 nodes) and redrawn on mismatch.
pub fn gen_gaussian(g: &MixedGraph, seed: u64) -> Result<GaussianModel> {
    let oracle = GraphOracle::new(g.clone())?;
    let h = if g.has_bidirected() {
        latent_expand(g)?
    } else {
        g.clone()
    };
    let keep: Vec<usize> = g
        .names()
        .iter()
        .map(|n| h.index(n))
        .collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let full = parameterize(&h, &mut rng)?;
        let cov = DMatrix::from_fn(keep.len(), keep.len(), |i, j| full[(keep[i], keep[j])]);
        let Ok(model) = GaussianModel::new(g.names().to_vec(), cov) else {
            continue;
        };
        if agrees_with_graph(&model, &oracle, &mut rng)? {
            return Ok(model);
        }
    }
    Err(CgError::FaithfulnessRejected {
        attempts: MAX_ATTEMPTS,
    })
}

fn signed<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    let v = rng.random_range(lo..hi);
    if rng.random_bool(0.5) {
        v
    } else {
        -v
    }
}

/// Covariance of `X = B X + e`, where `B` holds the directed-edge
/// coefficients and `e` has a precision matrix supported on the undirected
/// edges.
fn parameterize<R: Rng>(h: &MixedGraph, rng: &mut R) -> Result<DMatrix<f64>> {
    let n = h.node_count();
    let mut b = DMatrix::<f64>::zeros(n, n);
    let mut omega = DMatrix::<f64>::zeros(n, n);
    for e in h.edges() {
        match e.kind {
            crate::graph::EdgeKind::Directed => b[(e.to, e.from)] = signed(rng, 0.2, 0.8),
            crate::graph::EdgeKind::Undirected => {
                let w = signed(rng, 0.1, 0.5);
                omega[(e.from, e.to)] = w;
                omega[(e.to, e.from)] = w;
            }
            crate::graph::EdgeKind::Bidirected => {
                return Err(CgError::WrongGraphKind {
                    expected: "a chain graph",
                    found: "bidirected edge".into(),
                })
            }
        }
    }
    for i in 0..n {
        let off: f64 = (0..n)
            .filter(|&j| j != i)
            .map(|j| omega[(i, j)].abs())
            .sum();
        omega[(i, i)] = off + rng.random_range(0.5..1.5);
    }
    let noise = omega
        .try_inverse()
        .ok_or_else(|| CgError::Numerical("singular noise precision".into()))?;
    let a = (DMatrix::<f64>::identity(n, n) - b)
        .try_inverse()
        .ok_or_else(|| CgError::Numerical("singular structural matrix".into()))?;
    let cov = &a * noise * a.transpose();
    Ok((&cov + cov.transpose()) * 0.5)
}

fn agrees_with_graph<R: Rng>(
    model: &GaussianModel,
    oracle: &GraphOracle,
    rng: &mut R,
) -> Result<bool> {
    let n = model.names().len();
    let exact = ExactGaussianOracle {
        model: model.clone(),
        tol: DEFAULT_TOLERANCE,
    };
    for a in 0..n {
        for b in a + 1..n {
            let pool = NodeSet::full(n).without(a).without(b);
            let conds: Vec<NodeSet> = if n <= EXHAUSTIVE_LIMIT {
                pool.subsets().collect()
            } else {
                (0..64)
                    .map(|_| NodeSet(rng.random::<u64>()).intersection(pool))
                    .collect()
            };
            for s in conds {
                let zero = match exact.independent(a, b, s) {
                    Ok(z) => z,
                    Err(CgError::Numerical(_)) => return Ok(false),
                    Err(e) => return Err(e),
                };
                if zero != oracle.independent(a, b, s)? {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
