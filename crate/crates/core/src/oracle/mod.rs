//! Brute-force ground truth at desk scale.

pub mod lemmas;

use crate::config::Limits;
use crate::error::{Error, Result};
use crate::graph::{EdgeSet, Multigraph};
use crate::instance::Instance;
use crate::rational::{self, Rational};
use crate::rounding::{self, SolveResult};
use crate::{EdgeId, NodeId, VertexId};
use serde::Serialize;
use std::collections::BTreeMap;

/// Violation bound guaranteed for every vertex.
pub const VIOLATION_BOUND: usize = 8;

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&self, mut i: usize) -> usize {
        while self.0[i] != i {
            i = self.0[i];
        }
        i
    }
}

fn check_oracle_size(g: &Multigraph, limits: &Limits) -> Result<()> {
    if g.node_count() > limits.oracle_nodes {
        return Err(Error::LimitExceeded {
            what: "node count for tree enumeration",
            size: g.node_count(),
            limit: limits.oracle_nodes,
        });
    }
    if g.edge_count() > limits.oracle_edges {
        return Err(Error::LimitExceeded {
            what: "edge count for tree enumeration",
            size: g.edge_count(),
            limit: limits.oracle_edges,
        });
    }
    Ok(())
}

/// Calls `visit` once per spanning tree of `g`.
pub fn for_each_spanning_tree(
    g: &Multigraph,
    limits: &Limits,
    mut visit: impl FnMut(&[EdgeId]),
) -> Result<()> {
    check_oracle_size(g, limits)?;
    let nodes: Vec<NodeId> = g.nodes().collect();
    let idx = |w: NodeId| nodes.binary_search(&w).expect("edge end is a node");
    let edges: Vec<(EdgeId, usize, usize)> = g
        .edges()
        .map(|(f, e)| (f, idx(e.ends[0]), idx(e.ends[1])))
        .collect();
    let need = nodes.len().saturating_sub(1);
    // parent pointers without path compression so undoing a union is a pop
    let mut uf = UnionFind((0..nodes.len()).collect());
    let mut chosen: Vec<EdgeId> = Vec::with_capacity(need);

    fn rec(
        i: usize,
        edges: &[(EdgeId, usize, usize)],
        need: usize,
        uf: &mut UnionFind,
        chosen: &mut Vec<EdgeId>,
        visit: &mut dyn FnMut(&[EdgeId]),
    ) {
        if chosen.len() == need {
            visit(chosen);
            return;
        }
        if edges.len() - i < need - chosen.len() {
            return;
        }
        let (f, a, b) = edges[i];
        let (ra, rb) = (uf.find(a), uf.find(b));
        if ra != rb {
            uf.0[ra] = rb;
            chosen.push(f);
            rec(i + 1, edges, need, uf, chosen, visit);
            chosen.pop();
            uf.0[ra] = ra;
        }
        rec(i + 1, edges, need, uf, chosen, visit);
    }
    rec(0, &edges, need, &mut uf, &mut chosen, &mut visit);
    Ok(())
}

/// Every spanning tree of `g`, each as ascending edge ids.
pub fn enumerate_spanning_trees(g: &Multigraph, limits: &Limits) -> Result<Vec<Vec<EdgeId>>> {
    let mut out = Vec::new();
    for_each_spanning_tree(g, limits, |t| out.push(t.to_vec()))?;
    Ok(out)
}

/// Minimum cost over spanning trees respecting every `M_v`, with a cheapest
/// tree (first in enumeration order). `None` when no tree is feasible.
pub fn brute_force_opt(
    inst: &Instance,
    limits: &Limits,
) -> Result<Option<(Rational, Vec<EdgeId>)>> {
    let g = Multigraph::from_instance(inst);
    let costs = inst.costs();
    let masks: BTreeMap<VertexId, Vec<EdgeId>> = inst
        .vertices()
        .iter()
        .map(|&v| (v, inst.delta(v)))
        .collect();
    let mut best: Option<(Rational, Vec<EdgeId>)> = None;
    let mut failure = None;
    for_each_spanning_tree(&g, limits, |t| {
        if failure.is_some() {
            return;
        }
        let cost: Rational = t.iter().map(|e| &costs[e]).sum();
        if best.as_ref().is_some_and(|(c, _)| cost >= *c) {
            return;
        }
        for (v, delta) in &masks {
            let at_v: Vec<EdgeId> = delta.iter().copied().filter(|e| t.contains(e)).collect();
            match inst.constraint(*v).is_independent(&at_v) {
                Ok(true) => {}
                Ok(false) => return,
                Err(e) => {
                    failure = Some(e);
                    return;
                }
            }
        }
        best = Some((cost, t.to_vec()));
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(best),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub status: CheckStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl CheckOutcome {
    fn pass() -> Self {
        CheckOutcome {
            status: CheckStatus::Pass,
            witness: None,
        }
    }

    fn fail(witness: impl Into<String>) -> Self {
        CheckOutcome {
            status: CheckStatus::Fail,
            witness: Some(witness.into()),
        }
    }

    fn skipped(why: impl Into<String>) -> Self {
        CheckOutcome {
            status: CheckStatus::Skipped,
            witness: Some(why.into()),
        }
    }

    fn test(ok: bool, witness: impl FnOnce() -> String) -> Self {
        if ok {
            Self::pass()
        } else {
            Self::fail(witness())
        }
    }
}

/// Names of the checks in an [`OracleReport`].
pub mod check {
    pub const TREE: &str = "tree_spanning";
    pub const COST: &str = "cost_consistent";
    pub const COST_LE_LP: &str = "cost_le_lp";
    pub const VIOLATIONS: &str = "violations_consistent";
    pub const VIOLATION_BOUND: &str = "violation_bound";
    pub const COST_LE_OPT: &str = "cost_le_opt";
    pub const LP_LE_OPT: &str = "lp_le_opt";
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    #[serde(with = "crate::rational")]
    pub lp_value: Rational,
    #[serde(serialize_with = "serialize_opt")]
    pub integral_opt: Option<Rational>,
    #[serde(with = "crate::rational")]
    pub tree_cost: Rational,
    pub max_violation: usize,
    pub checks: BTreeMap<String, CheckOutcome>,
}

fn serialize_opt<S: serde::Serializer>(
    q: &Option<Rational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match q {
        Some(q) => s.serialize_str(&rational::to_text(q)),
        None => s.serialize_none(),
    }
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.checks.values().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|(_, c)| c.status == CheckStatus::Fail)
            .map(|(k, _)| k.as_str())
            .collect()
    }

    pub fn status(&self, name: &str) -> Option<CheckStatus> {
        self.checks.get(name).map(|c| c.status)
    }
}

fn tree_problem(inst: &Instance, tree: &[EdgeId]) -> Option<String> {
    let n = inst.vertices().len();
    if tree.len() + 1 != n {
        return Some(format!("{} edges for {n} vertices", tree.len()));
    }
    let index: BTreeMap<VertexId, usize> = inst
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i))
        .collect();
    let mut uf = UnionFind((0..n).collect());
    let mut seen = EdgeSet::new();
    for &f in tree {
        if !seen.insert(f) {
            return Some(format!("edge {f} repeated"));
        }
        let Some(e) = inst.edge(f) else {
            return Some(format!("edge {f} is not in the instance"));
        };
        let (a, b) = (uf.find(index[&e.u]), uf.find(index[&e.v]));
        if a == b {
            return Some(format!("edge {f} closes a cycle"));
        }
        uf.0[a] = b;
    }
    None
}

/// Checks a result against the instance and, when the instance is small
/// enough, against the brute-force optimum.
pub fn verify_solution(
    inst: &Instance,
    result: &SolveResult,
    limits: &Limits,
) -> Result<OracleReport> {
    let mut checks = BTreeMap::new();
    let mut put = |name: &str, c: CheckOutcome| {
        checks.insert(name.to_string(), c);
    };

    let tree_err = tree_problem(inst, &result.tree);
    let tree_ok = tree_err.is_none();
    put(
        check::TREE,
        CheckOutcome::test(tree_ok, || tree_err.unwrap_or_default()),
    );

    let actual = if tree_ok {
        inst.cost_of(&result.tree)
    } else {
        result.cost.clone()
    };
    put(
        check::COST,
        if tree_ok {
            CheckOutcome::test(actual == result.cost, || {
                format!(
                    "reported {} but the tree costs {}",
                    rational::to_text(&result.cost),
                    rational::to_text(&actual)
                )
            })
        } else {
            CheckOutcome::skipped("tree is invalid")
        },
    );
    put(
        check::COST_LE_LP,
        CheckOutcome::test(result.cost <= result.lp_initial, || {
            format!(
                "cost {} exceeds the LP value {}",
                rational::to_text(&result.cost),
                rational::to_text(&result.lp_initial)
            )
        }),
    );

    let recomputed = if tree_ok {
        Some(rounding::violations(inst, &result.tree)?)
    } else {
        None
    };
    put(
        check::VIOLATIONS,
        match &recomputed {
            Some(v) => CheckOutcome::test(*v == result.violations, || {
                format!("reported {:?}, recomputed {v:?}", result.violations)
            }),
            None => CheckOutcome::skipped("tree is invalid"),
        },
    );
    let max_violation = recomputed
        .iter()
        .chain(std::iter::once(&result.violations))
        .flat_map(|m| m.values().copied())
        .max()
        .unwrap_or(0);
    put(
        check::VIOLATION_BOUND,
        CheckOutcome::test(max_violation <= VIOLATION_BOUND, || {
            format!("violation {max_violation} exceeds {VIOLATION_BOUND}")
        }),
    );

    let integral_opt = match brute_force_opt(inst, limits) {
        Ok(opt) => {
            match &opt {
                Some((opt, _)) => {
                    put(
                        check::COST_LE_OPT,
                        CheckOutcome::test(result.cost <= *opt, || {
                            format!(
                                "cost {} exceeds the integral optimum {}",
                                rational::to_text(&result.cost),
                                rational::to_text(opt)
                            )
                        }),
                    );
                    put(
                        check::LP_LE_OPT,
                        CheckOutcome::test(result.lp_initial <= *opt, || {
                            format!(
                                "LP value {} exceeds the integral optimum {}",
                                rational::to_text(&result.lp_initial),
                                rational::to_text(opt)
                            )
                        }),
                    );
                }
                None => {
                    put(
                        check::COST_LE_OPT,
                        CheckOutcome::skipped("no feasible tree"),
                    );
                    put(check::LP_LE_OPT, CheckOutcome::skipped("no feasible tree"));
                }
            }
            opt.map(|(c, _)| c)
        }
        Err(Error::LimitExceeded { what, size, limit }) => {
            let why = format!("{what}: {size} > {limit}");
            put(check::COST_LE_OPT, CheckOutcome::skipped(why.clone()));
            put(check::LP_LE_OPT, CheckOutcome::skipped(why));
            None
        }
        Err(e) => return Err(e),
    };

    Ok(OracleReport {
        lp_value: result.lp_initial.clone(),
        integral_opt,
        tree_cost: result.cost.clone(),
        max_violation,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::{GroundSet, Matroid};
    use crate::rational::int;
    use crate::SolverConfig;

    fn multigraph(n: u32, edges: &[(u32, u32)]) -> Multigraph {
        let vs: Vec<VertexId> = (0..n).map(VertexId).collect();
        let es: Vec<_> = edges
            .iter()
            .enumerate()
            .map(|(i, &(u, v))| (EdgeId(i as u32), VertexId(u), VertexId(v)))
            .collect();
        Multigraph::new(&vs, &es)
    }

    #[test]
    fn tree_counts() {
        let l = Limits::default();
        assert_eq!(
            enumerate_spanning_trees(&multigraph(3, &[(0, 1), (1, 2), (0, 2)]), &l)
                .unwrap()
                .len(),
            3
        );
        assert_eq!(
            enumerate_spanning_trees(&multigraph(4, &[(0, 1), (1, 2), (2, 3)]), &l)
                .unwrap()
                .len(),
            1
        );
        let c4 = multigraph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert_eq!(enumerate_spanning_trees(&c4, &l).unwrap().len(), 4);
        // K4 has 4^2 = 16 spanning trees
        let k4 = multigraph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(enumerate_spanning_trees(&k4, &l).unwrap().len(), 16);
        assert_eq!(
            enumerate_spanning_trees(&multigraph(1, &[]), &l).unwrap(),
            vec![Vec::<EdgeId>::new()]
        );
    }

    #[test]
    fn enumeration_limit() {
        let l = Limits {
            oracle_edges: 2,
            ..Limits::default()
        };
        let g = multigraph(3, &[(0, 1), (1, 2), (0, 2)]);
        assert!(matches!(
            enumerate_spanning_trees(&g, &l),
            Err(Error::LimitExceeded { .. })
        ));
    }

    fn uniform_everywhere(n: u32, edges: &[(u32, u32, i64)], k: usize) -> Instance {
        let probe = Instance::from_edge_list(n, edges, BTreeMap::new()).unwrap();
        let c = probe
            .vertices()
            .iter()
            .map(|&v| {
                (
                    v,
                    Matroid::uniform(GroundSet::new(probe.delta(v)).unwrap(), k),
                )
            })
            .collect();
        Instance::from_edge_list(n, edges, c).unwrap()
    }

    #[test]
    fn brute_force_examples() {
        let l = Limits::default();
        let free = Instance::from_edge_list(3, &[(0, 1, 5), (1, 2, 1), (0, 2, 2)], BTreeMap::new())
            .unwrap();
        assert_eq!(brute_force_opt(&free, &l).unwrap().unwrap().0, int(3));
        let tri = uniform_everywhere(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)], 2);
        assert_eq!(brute_force_opt(&tri, &l).unwrap().unwrap().0, int(2));
        let edges = [(0, 1, 1), (0, 2, 1), (0, 3, 1)];
        let probe = Instance::from_edge_list(4, &edges, BTreeMap::new()).unwrap();
        let c = BTreeMap::from([(
            VertexId(0),
            Matroid::uniform(GroundSet::new(probe.delta(VertexId(0))).unwrap(), 1),
        )]);
        let star = Instance::from_edge_list(4, &edges, c).unwrap();
        assert!(brute_force_opt(&star, &l).unwrap().is_none());
    }

    fn solved() -> (Instance, SolveResult) {
        let inst = uniform_everywhere(
            4,
            &[(0, 1, 1), (1, 2, 2), (2, 3, 1), (3, 0, 2), (0, 2, 3)],
            2,
        );
        let r = rounding::run(&inst, &SolverConfig::default()).unwrap();
        (inst, r)
    }

    #[test]
    fn honest_result_passes() {
        let (inst, r) = solved();
        let rep = verify_solution(&inst, &r, &Limits::default()).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert_eq!(rep.status(check::COST_LE_OPT), Some(CheckStatus::Pass));
    }

    #[test]
    fn corrupted_cost_is_detected() {
        let (inst, mut r) = solved();
        r.cost -= int(1);
        let rep = verify_solution(&inst, &r, &Limits::default()).unwrap();
        assert_eq!(rep.status(check::COST), Some(CheckStatus::Fail));
        assert!(rep.checks[check::COST].witness.is_some());
    }

    #[test]
    fn corrupted_tree_is_detected() {
        let (inst, mut r) = solved();
        r.tree.pop();
        let rep = verify_solution(&inst, &r, &Limits::default()).unwrap();
        assert_eq!(rep.status(check::TREE), Some(CheckStatus::Fail));
        assert!(!rep.passed());
    }

    #[test]
    fn inflated_violation_is_detected() {
        let (inst, mut r) = solved();
        *r.violations.get_mut(&VertexId(0)).unwrap() += 9;
        let rep = verify_solution(&inst, &r, &Limits::default()).unwrap();
        assert_eq!(rep.status(check::VIOLATIONS), Some(CheckStatus::Fail));
        assert_eq!(rep.status(check::VIOLATION_BOUND), Some(CheckStatus::Fail));
    }
}
