//! Exhaustive property harness over all small graphs.

use std::collections::BTreeMap;
use std::fmt;

use crate::closure::{
    full_model, local_separation_base, pairwise_separation_base, weak_transitivity_gaps,
    wtc_closure,
};
use crate::dependence::{faithful_if_acyclic, has_mixed_cycle, is_forest, verify_sound_complete};
use crate::enumerate::{all_chain_graphs, all_mccgs};
use crate::equivalence::{blargest, is_deflagged, markov_equivalent_mccg, triplex_equivalent};
use crate::error::{CgError, Result};
use crate::graph::MixedGraph;
use crate::learn::{learn_amp_with, learn_mccg, AmpOptions};
use crate::oracle::GraphOracle;
use crate::separation::{
    all_queries, amp_separated, brute_force_amp_separated, latent_expand, map_set, mccg_separated,
    SeparationKind, SeparationQuery,
};

/// Largest bound `verify_all` accepts.
pub const MAX_VERIFY_BOUND: usize = 5;
/// Node cap for the properties whose cost grows fastest.
const HEAVY_CAP: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyResult {
    pub name: &'static str,
    pub max_nodes: usize,
    pub checked: usize,
    pub failures: usize,
    pub counterexample: Option<String>,
}

impl PropertyResult {
    fn new(name: &'static str, max_nodes: usize) -> Self {
        PropertyResult {
            name,
            max_nodes,
            checked: 0,
            failures: 0,
            counterexample: None,
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
            if self.counterexample.is_none() {
                self.counterexample = Some(describe());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub bound: usize,
    pub results: Vec<PropertyResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(PropertyResult::passed)
    }

    pub fn get(&self, name: &str) -> Option<&PropertyResult> {
        self.results.iter().find(|r| r.name == name)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<28} {:>5} {:>9} {:>8}  status",
            "property", "nodes", "checked", "failed"
        )?;
        for r in &self.results {
            let status = if r.passed() { "PASS" } else { "FAIL" };
            writeln!(
                f,
                "{:<28} {:>5} {:>9} {:>8}  {status}",
                r.name, r.max_nodes, r.checked, r.failures
            )?;
            if let Some(c) = &r.counterexample {
                writeln!(f, "    counterexample: {c}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub bound: usize,
    /// Rule schedule handed to the AMP learner.
    pub amp: AmpOptions,
}

impl VerifyOptions {
    pub fn new(bound: usize) -> Self {
        VerifyOptions {
            bound,
            amp: AmpOptions::default(),
        }
    }
}

pub fn verify_all(bound: usize) -> Result<VerifyReport> {
    verify_all_with(&VerifyOptions::new(bound))
}

pub fn verify_all_with(opts: &VerifyOptions) -> Result<VerifyReport> {
    let bound = opts.bound;
    if bound > MAX_VERIFY_BOUND {
        return Err(CgError::BoundExceeded {
            bound: MAX_VERIFY_BOUND,
            actual: bound,
        });
    }
    let heavy = bound.min(HEAVY_CAP);
    let cgs: Vec<MixedGraph> = (1..=heavy).flat_map(all_chain_graphs).collect();
    let small_mccgs: Vec<MixedGraph> = (1..=heavy).flat_map(all_mccgs).collect();
    let mccgs: Vec<MixedGraph> = (1..=bound).flat_map(all_mccgs).collect();

    let mut amp_sep = PropertyResult::new("amp-separation", heavy);
    for g in &cgs {
        for q in all_queries(g.node_count()) {
            let fast = amp_separated(g, &q)?;
            let slow = brute_force_amp_separated(g, &q, 3 * g.node_count())?;
            amp_sep.record(fast == slow, || format!("{g:?} {}", show(g, &q)));
        }
    }

    let mut mccg_sep = PropertyResult::new("mccg-separation-latent", heavy);
    for g in &small_mccgs {
        let big = latent_expand(g)?;
        for q in all_queries(g.node_count()) {
            let lifted = SeparationQuery::new(
                map_set(g, &big, q.x)?,
                map_set(g, &big, q.y)?,
                map_set(g, &big, q.z)?,
            );
            let ok = mccg_separated(g, &q)? == amp_separated(&big, &lifted)?;
            mccg_sep.record(ok, || format!("{g:?} {}", show(g, &q)));
        }
    }

    let mut amp_learn = PropertyResult::new("amp-learner-recovery", heavy);
    let mut amp_order = PropertyResult::new("amp-rule-order", heavy);
    for g in &cgs {
        let oracle = GraphOracle::new(g.clone())?;
        let out = learn_amp_with(&oracle, &opts.amp);
        let ok = match &out {
            Ok(r) => {
                triplex_equivalent(&r.graph, g)? && is_deflagged(&r.graph, bound.max(HEAVY_CAP))?
            }
            Err(_) => false,
        };
        amp_learn.record(ok, || match &out {
            Ok(r) => format!("{g:?} learned {:?}", r.graph),
            Err(e) => format!("{g:?}: {e}"),
        });
        if let Ok(r) = &out {
            let mut reversed = opts.amp.clone();
            reversed.schedule.reverse();
            let other = learn_amp_with(&oracle, &reversed).ok().map(|o| o.graph);
            amp_order.record(other.as_ref() == Some(&r.graph), || {
                format!("{g:?}: {:?} vs reversed {:?}", r.graph, other)
            });
        }
    }

    let mut mccg_learn = PropertyResult::new("mccg-learner-blargest", bound);
    for g in &mccgs {
        let learned = learn_mccg(&GraphOracle::new(g.clone())?)?.graph;
        let want = blargest(g)?;
        mccg_learn.record(learned == want, || {
            format!("{g:?} learned {learned:?}, want {want:?}")
        });
    }

    let mut closure = PropertyResult::new("closure-local-pairwise", bound);
    for g in &mccgs {
        let n = g.node_count();
        let model = full_model(g, SeparationKind::Mccg)?;
        let cl = wtc_closure(&local_separation_base(g)?, n)?;
        let cp = wtc_closure(&pairwise_separation_base(g, &g.undirected_components())?, n)?;
        let ok = cl == model && cp == model && weak_transitivity_gaps(&cl).is_empty();
        closure.record(ok, || {
            format!(
                "{g:?}: I-cl {:?}, cl-I {:?}",
                model.difference(&cl),
                cl.difference(&model)
            )
        });
    }

    let mut deps = PropertyResult::new("dependence-joined-closure", heavy);
    for g in small_mccgs.iter().filter(|g| !has_mixed_cycle(g)) {
        let r = verify_sound_complete(g, heavy)?;
        deps.record(r.holds(), || {
            format!(
                "{g:?}: joined only {}, closure only {}",
                list(g, &r.unsound),
                list(g, &r.incomplete)
            )
        });
    }

    let mut trees = PropertyResult::new("dependence-tree-faithful", bound);
    for g in mccgs.iter().filter(|g| is_forest(g)) {
        trees.record(faithful_if_acyclic(g)?, || format!("{g:?}"));
    }

    let mut equiv = PropertyResult::new("markov-equivalence", heavy);
    let mut by_skeleton: BTreeMap<_, Vec<&MixedGraph>> = BTreeMap::new();
    for g in &small_mccgs {
        by_skeleton
            .entry((g.names().to_vec(), g.skeleton()))
            .or_default()
            .push(g);
    }
    for group in by_skeleton.values() {
        let models: Vec<_> = group
            .iter()
            .map(|g| full_model(g, SeparationKind::Mccg))
            .collect::<Result<_>>()?;
        for (i, a) in group.iter().enumerate() {
            for (j, b) in group.iter().enumerate().skip(i + 1) {
                let ok = markov_equivalent_mccg(a, b)? == (models[i] == models[j]);
                equiv.record(ok, || format!("{a:?} vs {b:?}"));
            }
        }
    }

    Ok(VerifyReport {
        bound,
        results: vec![
            amp_sep, mccg_sep, amp_learn, amp_order, mccg_learn, closure, deps, trees, equiv,
        ],
    })
}

fn show(g: &MixedGraph, q: &SeparationQuery) -> String {
    format!(
        "{} _|_ {} | {}",
        g.fmt_set(q.x),
        g.fmt_set(q.y),
        g.fmt_set(q.z)
    )
}

fn list(g: &MixedGraph, ts: &[SeparationQuery]) -> String {
    let parts: Vec<String> = ts.iter().map(|t| show(g, t)).collect();
    format!("[{}]", parts.join("; "))
}
