//! The iterative rounding and degree adaptation loop.
//!
//! Each iteration solves the relaxation on the current contracted graph,
//! deletes 0-edges, contracts 1-edges, pins the tight spanning-tree sets,
//! computes `Q`, and then removes edges from degree constraints (type A, then
//! type B) wherever the slack `|U| - x(U)` is at most 4.

mod removal;
mod state;

pub use removal::{remove_edges_from_degree_constraint, remove_from_part, Removal};
pub use state::{
    compute_q, compute_q_in_order, slack, AdaptationCounters, AlgoState, ConstraintDecomposition,
    EdgeClasses,
};

use crate::error::{Error, Result};
use crate::graph::{EdgeSet, NodeSet};
use crate::instance::Instance;
use crate::lp::RationalVector;
use crate::matroid::Matroid;
use crate::oracle::lemmas;
use crate::rational::{self, Rational};
use crate::{EdgeId, NodeId, SolverConfig, VertexId};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;

/// Names of the runtime checks, as reported in [`Error::Invariant`].
pub mod checks {
    pub const REMOVAL_PROPERTIES: &str = "removal properties";
    pub const REMOVAL_PRECONDITION: &str = "removal precondition";
    pub const ADAPTATION_COUNTERS: &str = "adaptation counters";
    pub const SPARSITY: &str = "support sparsity";
    pub const CHAIN: &str = "tight chain bound";
    pub const PROGRESS: &str = "progress";
    pub const F2_NONEMPTY: &str = "F2 nonempty";
    pub const Q_PERSISTENCE: &str = "Q persistence";
    pub const LAMINAR: &str = "laminar bound";
    pub const LP_MONOTONE: &str = "LP monotonicity";
    pub const VERTEX: &str = "vertex certificate";
    pub const LP_FEASIBLE: &str = "LP feasibility";
    pub const DECOMPOSITION: &str = "decomposition ground";
    pub const TREE: &str = "final tree";
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum AdaptationKind {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdaptationRecord {
    pub iteration: usize,
    pub kind: AdaptationKind,
    pub node: NodeId,
    pub removed: Vec<EdgeId>,
    /// `|U| - x(U)`.
    #[serde(with = "crate::rational")]
    pub slack: Rational,
    pub affected_vertices: Vec<VertexId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    Lp {
        iteration: usize,
        #[serde(with = "crate::rational")]
        objective: Rational,
        support: usize,
        cuts: usize,
        pivots: usize,
    },
    Delete {
        iteration: usize,
        edges: Vec<EdgeId>,
    },
    Contract {
        iteration: usize,
        edge: EdgeId,
        node: NodeId,
    },
    Fix {
        iteration: usize,
        vertices: Vec<VertexId>,
    },
    Q {
        iteration: usize,
        nodes: Vec<NodeId>,
    },
    Adapt(AdaptationRecord),
}

/// How many times each runtime check was evaluated (and passed) in a run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CheckCounts {
    pub removal_audits: usize,
    pub removal_audits_skipped: usize,
    pub removal_feasibility: usize,
    pub counter_updates: usize,
    pub sparsity: usize,
    pub chain_bounds: usize,
    pub progress: usize,
    pub q_persistence: usize,
    pub q_order_checks: usize,
    pub q_order_mismatches: usize,
    pub laminar_bounds: usize,
    pub lp_monotone: usize,
    pub vertex_certificates: usize,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    /// Original edge ids, ascending.
    pub tree: Vec<EdgeId>,
    pub cost: Rational,
    /// `|T ∩ δ(v)| - r_v(T ∩ δ(v))` against the input matroids.
    pub violations: BTreeMap<VertexId, usize>,
    pub lp_initial: Rational,
    pub iterations: usize,
    pub trace: Vec<TraceEvent>,
    pub adaptations: Vec<AdaptationRecord>,
    pub counters: BTreeMap<VertexId, AdaptationCounters>,
    pub checks: CheckCounts,
}

impl SolveResult {
    pub fn max_violation(&self) -> usize {
        self.violations.values().copied().max().unwrap_or(0)
    }
}

/// Minimum number of tree edges to drop at `v` to make the rest independent.
pub fn tree_violation(m_v: &Matroid, tree_edges_at_v: &[EdgeId]) -> Result<usize> {
    m_v.min_removals_to_independent(tree_edges_at_v)
}

/// Violations of every input constraint by `tree`.
pub fn violations(inst: &Instance, tree: &[EdgeId]) -> Result<BTreeMap<VertexId, usize>> {
    inst.vertices()
        .iter()
        .map(|&v| {
            let at_v: Vec<EdgeId> = inst
                .delta(v)
                .into_iter()
                .filter(|e| tree.contains(e))
                .collect();
            Ok((v, tree_violation(inst.constraint(v), &at_v)?))
        })
        .collect()
}

/// Asserts that when no type B adaptation applies, a type A adaptation does,
/// and that `F_2` is nonempty while more than one node remains.
pub fn assert_progress(
    st: &AlgoState,
    x: &RationalVector,
    q: &NodeSet,
    threshold: &Rational,
) -> Result<()> {
    if st.h.node_count() <= 1 {
        return Ok(());
    }
    let classes = st.classify_edges()?;
    if classes.f2.is_empty() {
        return Err(Error::invariant(
            checks::F2_NONEMPTY,
            format!(
                "iteration {}: no edge is contained at both ends; {}",
                st.iteration,
                dump(st, x)
            ),
        ));
    }
    let candidate = |u: EdgeSet| !u.is_empty() && slack(&u, x) <= *threshold;
    let nodes: Vec<NodeId> = st.h.nodes().collect();
    for &w in &nodes {
        if candidate(st.type_b_set(w, q)?) {
            return Ok(());
        }
    }
    for &w in &nodes {
        if candidate(st.type_a_set(w)?) {
            return Ok(());
        }
    }
    Err(Error::invariant(
        checks::PROGRESS,
        format!(
            "iteration {}: neither adaptation applies; {}",
            st.iteration,
            dump(st, x)
        ),
    ))
}

fn dump(st: &AlgoState, x: &RationalVector) -> String {
    let edges: Vec<String> =
        st.h.edges()
            .map(|(f, e)| {
                format!(
                    "{f}:{}-{}={}",
                    e.ends[0],
                    e.ends[1],
                    rational::to_text(&x.get(f))
                )
            })
            .collect();
    let parts: Vec<String> = st
        .decomposition
        .iter()
        .map(|(w, d)| {
            let kinds: Vec<String> = d
                .parts()
                .iter()
                .map(|(v, m)| format!("{v}:{}{}", m.kind_name(), m.ground()))
                .collect();
            format!("{w}[{}]", kinds.join(" "))
        })
        .collect();
    format!(
        "edges [{}], constraints [{}]",
        edges.join(", "),
        parts.join(", ")
    )
}

struct Run<'a> {
    cfg: &'a SolverConfig,
    st: AlgoState,
    trace: Vec<TraceEvent>,
    records: Vec<AdaptationRecord>,
    checks: CheckCounts,
}

impl Run<'_> {
    fn adapt(
        &mut self,
        kind: AdaptationKind,
        w: NodeId,
        u: EdgeSet,
        x: &RationalVector,
    ) -> Result<()> {
        let cfg = self.cfg;
        let old = self.st.decomposition_of(w)?.clone();
        if cfg.debug_asserts {
            if let Some(why) =
                lemmas::removal_keeps_feasibility(&old, x, cfg.limits.matroid_ground)?
            {
                return Err(Error::invariant(checks::REMOVAL_PRECONDITION, why));
            }
        }
        let removal = remove_edges_from_degree_constraint(&old, &u, x, cfg.limits.matroid_ground)?;
        if cfg.debug_asserts {
            let audit = lemmas::audit_removal(&old, &removal, &u, x, &cfg.limits)?;
            if !audit.passed() {
                return Err(Error::invariant(
                    checks::REMOVAL_PROPERTIES,
                    format!(
                        "removing {u:?} at node {w}: {}",
                        audit.witness.unwrap_or_default()
                    ),
                ));
            }
            self.checks.removal_audits += 1;
            if audit.transform.is_none() {
                self.checks.removal_audits_skipped += 1;
            }
        } else if let Some(why) =
            lemmas::removal_keeps_feasibility(&removal.decomposition, x, cfg.limits.matroid_ground)?
        {
            return Err(Error::invariant(checks::REMOVAL_PROPERTIES, why));
        }
        self.checks.removal_feasibility += 1;

        for &v in &removal.affected {
            let c = self.st.counters.entry(v).or_default();
            let n = match kind {
                AdaptationKind::A => &mut c.type_a,
                AdaptationKind::B => &mut c.type_b,
            };
            *n += 1;
            if *n > 1 {
                return Err(Error::invariant(
                    checks::ADAPTATION_COUNTERS,
                    format!("vertex {v} received a second type {kind:?} adaptation at node {w}"),
                ));
            }
            self.checks.counter_updates += 1;
        }
        let record = AdaptationRecord {
            iteration: self.st.iteration,
            kind,
            node: w,
            slack: slack(&u, x),
            removed: u.into_iter().collect(),
            affected_vertices: removal.affected.clone(),
        };
        log::debug!("type {kind:?} adaptation at node {w}: {:?}", record.removed);
        self.st.decomposition.insert(w, removal.decomposition);
        self.trace.push(TraceEvent::Adapt(record.clone()));
        self.records.push(record);
        Ok(())
    }

    fn check_chain_bounds(&mut self, x: &RationalVector) -> Result<()> {
        for (&w, d) in &self.st.decomposition {
            let n = d.node_matroid()?;
            let delta = self.st.h.delta(w)?;
            if n.ground().to_set() != delta {
                return Err(Error::invariant(
                    checks::DECOMPOSITION,
                    format!(
                        "node {w}: constraint ground {} differs from incident edges {delta:?}",
                        n.ground()
                    ),
                ));
            }
            let chain = lemmas::check_chain_bound(&n, x, self.cfg.limits.matroid_ground)?;
            if !chain.passed {
                return Err(Error::invariant(
                    checks::CHAIN,
                    format!(
                        "node {w}: tight chain of length {} exceeds x(δ(w)) = {}",
                        chain.length,
                        rational::to_text(&chain.bound)
                    ),
                ));
            }
            self.checks.chain_bounds += 1;
        }
        Ok(())
    }

    fn check_q_order(&mut self, x: &RationalVector, q: &NodeSet) -> Result<()> {
        let mut order: Vec<NodeId> = self.st.h.nodes().collect();
        let seed = self.cfg.seed.wrapping_add(self.st.iteration as u64);
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let other = compute_q_in_order(&self.st.h, x, &order)?;
        self.checks.q_order_checks += 1;
        if other != *q {
            self.checks.q_order_mismatches += 1;
            log::warn!(
                "iteration {}: Q depends on the order: {q:?} vs {other:?} for order {order:?}",
                self.st.iteration
            );
        }
        Ok(())
    }

    fn iterate(&mut self, costs: &BTreeMap<EdgeId, Rational>, prev: &mut Iteration) -> Result<()> {
        let cfg = self.cfg;
        self.st.iteration += 1;
        let it = self.st.iteration;

        // a) solve and delete 0-edges
        let sol = match self.st.solve(costs, cfg) {
            Err(e) if e.is_infeasible() && it > 1 => {
                return Err(Error::invariant(
                    checks::LP_FEASIBLE,
                    format!("iteration {it}: {e}"),
                ))
            }
            r => r?,
        };
        if !sol.vertex_certificate {
            return Err(Error::invariant(checks::VERTEX, format!("iteration {it}")));
        }
        self.checks.vertex_certificates += 1;
        let total = costs_of(costs, &self.st.chosen) + &sol.objective;
        if let Some(before) = &prev.total {
            if total > *before {
                return Err(Error::invariant(
                    checks::LP_MONOTONE,
                    format!(
                        "iteration {it}: chosen cost plus LP value rose from {} to {}",
                        rational::to_text(before),
                        rational::to_text(&total)
                    ),
                ));
            }
            self.checks.lp_monotone += 1;
        }
        prev.total = Some(total);
        prev.lp_initial.get_or_insert_with(|| sol.objective.clone());
        self.trace.push(TraceEvent::Lp {
            iteration: it,
            objective: sol.objective.clone(),
            support: sol.support_size(),
            cuts: sol.stats.cuts,
            pivots: sol.stats.pivots,
        });
        let x = sol.x;
        let deleted = self.st.delete_zero_edges(&x)?;
        if !deleted.is_empty() {
            self.trace.push(TraceEvent::Delete {
                iteration: it,
                edges: deleted.clone(),
            });
        }
        let (w, f) = (self.st.h.node_count(), self.st.h.edge_count());
        if f > 3 * w.saturating_sub(1) {
            return Err(Error::invariant(
                checks::SPARSITY,
                format!("iteration {it}: {f} edges on {w} nodes"),
            ));
        }
        self.checks.sparsity += 1;
        if cfg.debug_asserts {
            self.check_chain_bounds(&x)?;
        }

        // b) contract 1-edges
        let contracted = self.st.contract_one_edges(&x)?;
        for &(edge, node) in &contracted {
            self.trace.push(TraceEvent::Contract {
                iteration: it,
                edge,
                node,
            });
        }
        if self.st.h.node_count() <= 1 {
            return Ok(());
        }
        let x = x.restrict(&self.st.h.edge_ids().collect::<Vec<_>>());

        // c) pin tight spanning-tree sets
        for s in self.st.fix_tight_sets(&x)? {
            self.trace.push(TraceEvent::Fix {
                iteration: it,
                vertices: s.into_iter().collect(),
            });
        }

        let q = compute_q(&self.st.h, &x)?;
        self.trace.push(TraceEvent::Q {
            iteration: it,
            nodes: q.iter().copied().collect(),
        });
        for w in &prev.q {
            if self.st.h.contains_node(*w) && !q.contains(w) {
                return Err(Error::invariant(
                    checks::Q_PERSISTENCE,
                    format!("iteration {it}: node {w} left Q"),
                ));
            }
        }
        self.checks.q_persistence += 1;
        prev.q = q.clone();
        if cfg.debug_asserts {
            self.check_q_order(&x, &q)?;
            let lb = lemmas::laminar_diagnostic(&self.st.h, &x)?;
            if !lb.passed {
                return Err(Error::invariant(
                    checks::LAMINAR,
                    format!("iteration {it}: {lb:?}"),
                ));
            }
            self.checks.laminar_bounds += 1;
        }

        assert_progress(&self.st, &x, &q, &cfg.slack_threshold)?;
        self.checks.progress += 1;

        // d) type A
        let before = self.records.len();
        let nodes: Vec<NodeId> = self.st.h.nodes().collect();
        for &w in &nodes {
            let u = self.st.type_a_set(w)?;
            if !u.is_empty() && slack(&u, &x) <= cfg.slack_threshold {
                self.adapt(AdaptationKind::A, w, u, &x)?;
            }
        }
        // e) type B
        for &w in &nodes {
            let u = self.st.type_b_set(w, &q)?;
            if !u.is_empty() && slack(&u, &x) <= cfg.slack_threshold {
                self.adapt(AdaptationKind::B, w, u, &x)?;
            }
        }

        if deleted.is_empty() && contracted.is_empty() && self.records.len() == before {
            return Err(Error::Stuck {
                iteration: it,
                detail: dump(&self.st, &x),
            });
        }
        Ok(())
    }
}

#[derive(Default)]
struct Iteration {
    total: Option<Rational>,
    lp_initial: Option<Rational>,
    q: NodeSet,
}

fn costs_of(costs: &BTreeMap<EdgeId, Rational>, edges: &[EdgeId]) -> Rational {
    edges.iter().filter_map(|e| costs.get(e)).sum()
}

/// Runs the algorithm on `inst`.
///
/// Returns [`Error::Infeasible`] when the relaxation has no solution, which
/// includes disconnected graphs.
pub fn run(inst: &Instance, cfg: &SolverConfig) -> Result<SolveResult> {
    if inst.vertices().is_empty() {
        return Err(Error::Precondition("the graph has no vertices".into()));
    }
    if !inst.is_connected() {
        return Err(Error::Infeasible {
            reason: "the graph is disconnected".into(),
            certificate: None,
        });
    }
    for &v in inst.vertices() {
        let d = inst.delta(v).len();
        if d > cfg.limits.matroid_ground {
            return Err(Error::LimitExceeded {
                what: "vertex degree",
                size: d,
                limit: cfg.limits.matroid_ground,
            });
        }
    }
    let costs = inst.costs();
    let mut run = Run {
        cfg,
        st: AlgoState::new(inst),
        trace: Vec::new(),
        records: Vec::new(),
        checks: CheckCounts::default(),
    };
    let mut prev = Iteration::default();
    let max_iterations = 4 * (inst.vertices().len() + inst.edges().len()) + 8;
    while run.st.h.node_count() > 1 {
        if run.st.iteration >= max_iterations {
            return Err(Error::Stuck {
                iteration: run.st.iteration,
                detail: format!("no termination after {max_iterations} iterations"),
            });
        }
        run.iterate(&costs, &mut prev)?;
    }

    let mut tree = run.st.chosen.clone();
    tree.sort_unstable();
    if tree.len() + 1 != inst.vertices().len() {
        return Err(Error::invariant(
            checks::TREE,
            format!(
                "{} edges chosen for {} vertices",
                tree.len(),
                inst.vertices().len()
            ),
        ));
    }
    let cost = inst.cost_of(&tree);
    Ok(SolveResult {
        violations: violations(inst, &tree)?,
        tree,
        cost,
        lp_initial: prev.lp_initial.unwrap_or_default(),
        iterations: run.st.iteration,
        trace: run.trace,
        adaptations: run.records,
        counters: run.st.counters,
        checks: run.checks,
    })
}
