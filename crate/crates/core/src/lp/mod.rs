//! Exact LP machinery for the relaxation
//!
//! ```text
//! min c·x  s.t.  x ∈ P_st(H),  x|δ(w) ∈ P_{N_w}  for every node w
//! ```
//!
//! solved by cutting planes over an exact simplex, with subset-enumeration
//! separation for both polytope families.

pub mod linalg;
mod separation;
mod simplex;
mod tight;

pub use separation::{separate_matroid, separate_spanning_tree, subset_sums};
pub use simplex::solve_vertex_lp;
pub use tight::{
    build_laminar_tight_family, enumerate_tight_st_sets, independent_subfamily, is_laminar,
};

use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::graph::{EdgeSet, Multigraph, NodeSet};
use crate::matroid::Matroid;
use crate::rational::{self, Rational};
use crate::{EdgeId, NodeId};
use linalg::RowBasis;
use num_traits::{One, Zero};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

/// Exact values keyed by edge id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RationalVector(BTreeMap<EdgeId, Rational>);

impl RationalVector {
    pub fn zeros(keys: impl IntoIterator<Item = EdgeId>) -> Self {
        RationalVector(keys.into_iter().map(|e| (e, Rational::zero())).collect())
    }

    pub fn get(&self, e: EdgeId) -> Rational {
        self.0.get(&e).cloned().unwrap_or_default()
    }

    pub fn get_ref(&self, e: EdgeId) -> Option<&Rational> {
        self.0.get(&e)
    }

    pub fn set(&mut self, e: EdgeId, v: Rational) {
        self.0.insert(e, v);
    }

    pub fn remove(&mut self, e: EdgeId) -> Option<Rational> {
        self.0.remove(&e)
    }

    pub fn keys(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.0.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (EdgeId, &Rational)> + '_ {
        self.0.iter().map(|(&e, v)| (e, v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum<'a>(&self, edges: impl IntoIterator<Item = &'a EdgeId>) -> Rational {
        edges
            .into_iter()
            .filter_map(|e| self.0.get(e))
            .fold(Rational::zero(), |a, b| a + b)
    }

    pub fn total(&self) -> Rational {
        self.0.values().fold(Rational::zero(), |a, b| a + b)
    }

    pub fn dot(&self, other: &RationalVector) -> Rational {
        self.0
            .iter()
            .filter_map(|(e, v)| other.0.get(e).map(|w| v * w))
            .fold(Rational::zero(), |a, b| a + b)
    }

    pub fn support(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.0.iter().filter(|(_, v)| !v.is_zero()).map(|(&e, _)| e)
    }

    pub fn restrict<'a>(&self, keys: impl IntoIterator<Item = &'a EdgeId>) -> RationalVector {
        RationalVector(keys.into_iter().map(|&e| (e, self.get(e))).collect())
    }

    pub fn is_integral(&self) -> bool {
        self.0.values().all(rational::is_integral)
    }

    pub fn as_map(&self) -> &BTreeMap<EdgeId, Rational> {
        &self.0
    }
}

impl FromIterator<(EdgeId, Rational)> for RationalVector {
    fn from_iter<T: IntoIterator<Item = (EdgeId, Rational)>>(iter: T) -> Self {
        RationalVector(iter.into_iter().collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Sense {
    Le,
    Eq,
}

/// Identifies the family and generating set of a constraint.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstraintTag {
    /// `x(F[S]) ≤ |S| - 1`, or `=` when the set is fixed.
    SpanningTreeSet(NodeSet),
    /// `x(C) ≤ r(C)` for the degree constraint part at `node` whose ground
    /// contains `subset`.
    MatroidSet { node: NodeId, subset: EdgeSet },
    /// `x(F) = |W| - 1`.
    CardinalityEquality,
    /// `x(e) ≤ 1`.
    Bound(EdgeId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearConstraint {
    pub coefficients: BTreeMap<EdgeId, Rational>,
    pub sense: Sense,
    pub rhs: Rational,
    pub tag: ConstraintTag,
}

impl LinearConstraint {
    /// `Σ_{e ∈ edges} x(e) (sense) rhs`.
    pub fn unit<'a>(
        edges: impl IntoIterator<Item = &'a EdgeId>,
        sense: Sense,
        rhs: Rational,
        tag: ConstraintTag,
    ) -> Self {
        LinearConstraint {
            coefficients: edges.into_iter().map(|&e| (e, Rational::one())).collect(),
            sense,
            rhs,
            tag,
        }
    }

    pub fn coefficient(&self, e: EdgeId) -> Rational {
        self.coefficients.get(&e).cloned().unwrap_or_default()
    }

    pub fn lhs(&self, x: &RationalVector) -> Rational {
        self.coefficients
            .iter()
            .map(|(&e, a)| a * x.get(e))
            .fold(Rational::zero(), |a, b| a + b)
    }

    pub fn is_tight(&self, x: &RationalVector) -> bool {
        self.lhs(x) == self.rhs
    }

    pub fn is_satisfied(&self, x: &RationalVector) -> bool {
        let lhs = self.lhs(x);
        match self.sense {
            Sense::Le => lhs <= self.rhs,
            Sense::Eq => lhs == self.rhs,
        }
    }

    /// How far `x` is on the wrong side (positive when violated).
    pub fn violation(&self, x: &RationalVector) -> Rational {
        let d = self.lhs(x) - &self.rhs;
        match self.sense {
            Sense::Le => d,
            Sense::Eq => num_traits::Signed::abs(&d),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LpStats {
    pub pivots: usize,
    pub rounds: usize,
    pub cuts: usize,
}

/// An exact optimal point together with the constraints tight at it.
#[derive(Debug, Clone)]
pub struct BasicSolution {
    pub x: RationalVector,
    pub objective: Rational,
    pub tight: Vec<LinearConstraint>,
    /// The tight constraints restricted to the support have full column rank.
    pub vertex_certificate: bool,
    pub stats: LpStats,
}

impl BasicSolution {
    pub fn support_size(&self) -> usize {
        self.x.support().count()
    }
}

/// A degree constraint (or one direct-sum part of it) at a node.
#[derive(Debug, Clone)]
pub struct DegreeConstraint {
    pub node: NodeId,
    pub matroid: Matroid,
}

fn st_row(g: &Multigraph, s: &NodeSet, sense: Sense) -> Result<LinearConstraint> {
    let edges = g.edges_within(s)?;
    Ok(LinearConstraint::unit(
        &edges,
        sense,
        rational::from_usize(s.len().saturating_sub(1)),
        ConstraintTag::SpanningTreeSet(s.clone()),
    ))
}

/// The equality rows `x(F) = |W| - 1` and `x(F[L]) = |L| - 1` for the fixed
/// sets, reduced to a linearly independent subfamily. An inconsistent fixed
/// set makes the system infeasible.
fn equality_rows(g: &Multigraph, fixed_sets: &[NodeSet]) -> Result<Vec<LinearConstraint>> {
    let edges: Vec<EdgeId> = g.edge_ids().collect();
    let all = g.node_set();
    let card = LinearConstraint::unit(
        &edges,
        Sense::Eq,
        rational::from_usize(g.node_count().saturating_sub(1)),
        ConstraintTag::CardinalityEquality,
    );
    let augmented = |c: &LinearConstraint| {
        let mut row: Vec<Rational> = edges.iter().map(|&e| c.coefficient(e)).collect();
        row.push(c.rhs.clone());
        row
    };
    let mut basis = RowBasis::default();
    basis.insert(augmented(&card));
    let mut out = vec![card];
    let mut seen = BTreeSet::new();
    for s in fixed_sets {
        if s.len() < 2 || *s == all || !seen.insert(s.clone()) {
            continue;
        }
        let c = st_row(g, s, Sense::Eq)?;
        let row = augmented(&c);
        let residual = basis.reduce(row.clone());
        let (coeffs, rhs) = residual.split_at(edges.len());
        if coeffs.iter().all(|v| v.is_zero()) {
            if !rhs[0].is_zero() {
                return Err(Error::Infeasible {
                    reason: format!("fixed spanning tree set {s:?} is inconsistent"),
                    certificate: None,
                });
            }
            continue;
        }
        basis.insert(row);
        out.push(c);
    }
    Ok(out)
}

/// Solves the relaxation on `g` by cutting planes.
///
/// Starts from `x(F) = |W| - 1`, `0 ≤ x ≤ 1` and the fixed-set equalities,
/// then alternates exact solves with spanning-tree and matroid separation
/// until the point lies in every polytope. The returned point is a vertex of
/// a relaxation containing the full LP and lies in the full LP, hence is a
/// vertex of it.
pub fn solve_lp1(
    g: &Multigraph,
    costs: &BTreeMap<EdgeId, Rational>,
    constraints: &[DegreeConstraint],
    fixed_sets: &[NodeSet],
    cfg: &SolverConfig,
) -> Result<BasicSolution> {
    if g.node_count() > cfg.limits.st_nodes {
        return Err(Error::LimitExceeded {
            what: "node count for spanning-tree separation",
            size: g.node_count(),
            limit: cfg.limits.st_nodes,
        });
    }
    for dc in constraints {
        if dc.matroid.ground().len() > cfg.limits.matroid_ground {
            return Err(Error::LimitExceeded {
                what: "degree constraint ground",
                size: dc.matroid.ground().len(),
                limit: cfg.limits.matroid_ground,
            });
        }
    }
    let objective: RationalVector = g
        .edge_ids()
        .map(|e| (e, costs.get(&e).cloned().unwrap_or_default()))
        .collect();
    let mut rows = equality_rows(g, fixed_sets)?;
    for e in g.edge_ids() {
        rows.push(LinearConstraint::unit(
            [e].iter(),
            Sense::Le,
            Rational::one(),
            ConstraintTag::Bound(e),
        ));
    }
    let mut present: BTreeSet<(ConstraintTag, Sense)> =
        rows.iter().map(|c| (c.tag.clone(), c.sense)).collect();
    let mut cuts = 0;
    for round in 1..=cfg.max_cut_rounds {
        let mut sol = solve_vertex_lp(&rows, &objective)?;
        let mut new_cuts = Vec::new();
        if let Some(c) = separate_spanning_tree(g, &sol.x)? {
            new_cuts.push(c);
        }
        for dc in constraints {
            if dc.matroid.is_free_kind() {
                continue;
            }
            let xr = sol.x.restrict(dc.matroid.ground().elements());
            if let Some(c) = separate_matroid(dc.node, &dc.matroid, &xr, cfg.limits.matroid_ground)?
            {
                new_cuts.push(c);
            }
        }
        if new_cuts.is_empty() {
            sol.stats.rounds = round;
            sol.stats.cuts = cuts;
            log::trace!(
                "lp solved in {round} rounds, {cuts} cuts, objective {}",
                rational::to_text(&sol.objective)
            );
            return Ok(sol);
        }
        for c in new_cuts {
            if !present.insert((c.tag.clone(), c.sense)) {
                return Err(Error::invariant(
                    "cutting-plane progress",
                    format!("separated constraint {:?} is already present", c.tag),
                ));
            }
            log::trace!("cut {:?}", c.tag);
            rows.push(c);
            cuts += 1;
        }
    }
    Err(Error::LimitExceeded {
        what: "cutting-plane rounds",
        size: cfg.max_cut_rounds + 1,
        limit: cfg.max_cut_rounds,
    })
}
