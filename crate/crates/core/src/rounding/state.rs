use crate::error::{Error, Result};
use crate::graph::{EdgeSet, Multigraph, NodeSet};
use crate::instance::Instance;
use crate::lp::{self, BasicSolution, DegreeConstraint, RationalVector};
use crate::matroid::{contract_matroid, direct_sum, Matroid};
use crate::rational::{self, Rational};
use crate::{EdgeId, NodeId, SolverConfig, VertexId};
use num_traits::{One, Zero};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

/// `N_w` written as a direct sum of one matroid per original vertex in `w`.
#[derive(Debug, Clone)]
pub struct ConstraintDecomposition {
    parts: BTreeMap<VertexId, Matroid>,
}

impl ConstraintDecomposition {
    pub fn new(parts: BTreeMap<VertexId, Matroid>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for m in parts.values() {
            for e in m.ground().iter() {
                if !seen.insert(e) {
                    return Err(Error::OverlappingGrounds(e));
                }
            }
        }
        Ok(ConstraintDecomposition { parts })
    }

    pub fn single(v: VertexId, m: Matroid) -> Self {
        ConstraintDecomposition {
            parts: BTreeMap::from([(v, m)]),
        }
    }

    pub fn parts(&self) -> &BTreeMap<VertexId, Matroid> {
        &self.parts
    }

    pub fn part(&self, v: VertexId) -> Option<&Matroid> {
        self.parts.get(&v)
    }

    /// The direct sum of the parts.
    pub fn node_matroid(&self) -> Result<Matroid> {
        let parts: Vec<Matroid> = self.parts.values().cloned().collect();
        direct_sum(&parts)
    }

    pub fn ground(&self) -> EdgeSet {
        self.parts
            .values()
            .flat_map(|m| m.ground().iter())
            .collect()
    }

    pub fn part_containing(&self, f: EdgeId) -> Option<(VertexId, &Matroid)> {
        self.parts
            .iter()
            .find(|(_, m)| m.ground().contains(f))
            .map(|(&v, m)| (v, m))
    }

    /// Whether `f` is contained in the constraint, i.e. not a free element.
    pub fn is_contained(&self, f: EdgeId) -> Result<bool> {
        let (_, m) = self.part_containing(f).ok_or(Error::UnknownEdge(f))?;
        Ok(!m.is_free_element(f)?)
    }

    fn map_part(&mut self, f: EdgeId, op: impl FnOnce(&Matroid) -> Result<Matroid>) -> Result<()> {
        let (v, m) = self.part_containing(f).ok_or(Error::UnknownEdge(f))?;
        let new = op(m)?;
        self.parts.insert(v, new);
        Ok(())
    }

    fn delete(&mut self, f: EdgeId) -> Result<()> {
        self.map_part(f, |m| {
            let keep: Vec<EdgeId> = m.ground().iter().filter(|&e| e != f).collect();
            m.restrict(&keep)
        })
    }

    fn contract(&mut self, f: EdgeId) -> Result<()> {
        self.map_part(f, |m| contract_matroid(m, &[f]))
    }

    fn absorb(&mut self, other: ConstraintDecomposition) {
        self.parts.extend(other.parts);
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct AdaptationCounters {
    pub type_a: u32,
    pub type_b: u32,
}

/// `F_0`, `F_1`, `F_2`: edges contained in zero, one or two endpoint
/// constraints.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeClasses {
    pub f0: EdgeSet,
    pub f1: EdgeSet,
    pub f2: EdgeSet,
}

#[derive(Debug, Clone)]
pub struct AlgoState {
    pub h: Multigraph,
    pub decomposition: BTreeMap<NodeId, ConstraintDecomposition>,
    /// Pinned tight spanning-tree sets as sets of original vertices.
    pub fixed_sets: BTreeSet<BTreeSet<VertexId>>,
    pub chosen: Vec<EdgeId>,
    pub counters: BTreeMap<VertexId, AdaptationCounters>,
    pub iteration: usize,
}

impl AlgoState {
    pub fn new(inst: &Instance) -> Self {
        let h = Multigraph::from_instance(inst);
        let decomposition = inst
            .constraints()
            .iter()
            .map(|(&v, m)| (NodeId(v.0), ConstraintDecomposition::single(v, m.clone())))
            .collect();
        AlgoState {
            h,
            decomposition,
            fixed_sets: BTreeSet::new(),
            chosen: Vec::new(),
            counters: inst
                .vertices()
                .iter()
                .map(|&v| (v, AdaptationCounters::default()))
                .collect(),
            iteration: 0,
        }
    }

    pub fn decomposition_of(&self, w: NodeId) -> Result<&ConstraintDecomposition> {
        self.decomposition.get(&w).ok_or(Error::UnknownNode(w))
    }

    /// Fixed sets projected onto the current nodes; sets collapsing to a
    /// single node are dropped.
    pub fn projected_fixed_sets(&self) -> Vec<NodeSet> {
        let projected: BTreeSet<NodeSet> = self
            .fixed_sets
            .iter()
            .map(|s| self.h.project(s))
            .filter(|s| s.len() >= 2)
            .collect();
        projected.into_iter().collect()
    }

    /// One LP constraint block per decomposition part.
    pub fn degree_constraints(&self) -> Vec<DegreeConstraint> {
        self.decomposition
            .iter()
            .flat_map(|(&node, d)| {
                d.parts().values().map(move |m| DegreeConstraint {
                    node,
                    matroid: m.clone(),
                })
            })
            .collect()
    }

    pub fn solve(
        &self,
        costs: &BTreeMap<EdgeId, Rational>,
        cfg: &SolverConfig,
    ) -> Result<BasicSolution> {
        lp::solve_lp1(
            &self.h,
            costs,
            &self.degree_constraints(),
            &self.projected_fixed_sets(),
            cfg,
        )
    }

    fn end_parts(&self, f: EdgeId) -> Result<[NodeId; 2]> {
        Ok(self.h.edge(f)?.ends)
    }

    fn decomposition_mut(&mut self, w: NodeId) -> Result<&mut ConstraintDecomposition> {
        self.decomposition.get_mut(&w).ok_or(Error::UnknownNode(w))
    }

    /// Step a: deletes every edge with `x(f) = 0`; returns the deleted ids.
    pub fn delete_zero_edges(&mut self, x: &RationalVector) -> Result<Vec<EdgeId>> {
        let zero: Vec<EdgeId> = self.h.edge_ids().filter(|&e| x.get(e).is_zero()).collect();
        for &f in &zero {
            for w in self.end_parts(f)? {
                self.decomposition_mut(w)?.delete(f)?;
            }
            self.h.delete_edge(f)?;
        }
        Ok(zero)
    }

    /// Step b: contracts every edge with `x(f) = 1` in ascending id order,
    /// contracting `f` in the endpoint parts and merging the decompositions.
    pub fn contract_one_edges(&mut self, x: &RationalVector) -> Result<Vec<(EdgeId, NodeId)>> {
        let ones: Vec<EdgeId> = self.h.edge_ids().filter(|&e| x.get(e).is_one()).collect();
        let mut out = Vec::new();
        for f in ones {
            let [w1, w2] = self.end_parts(f)?;
            let mut d1 = self
                .decomposition
                .remove(&w1)
                .ok_or(Error::UnknownNode(w1))?;
            let mut d2 = self
                .decomposition
                .remove(&w2)
                .ok_or(Error::UnknownNode(w2))?;
            d1.contract(f)?;
            d2.contract(f)?;
            d1.absorb(d2);
            let c = self.h.contract_edge(f)?;
            for &l in &c.removed_loops {
                if !x.get(l).is_zero() {
                    return Err(Error::invariant(
                        "loop removal",
                        format!(
                            "edge {l} became a self-loop with value {}",
                            rational::to_text(&x.get(l))
                        ),
                    ));
                }
                // once for each endpoint part
                d1.delete(l)?;
                d1.delete(l)?;
            }
            self.decomposition.insert(c.node, d1);
            self.chosen.push(f);
            out.push((f, c.node));
        }
        Ok(out)
    }

    /// Step c: pins every tight spanning-tree set of the current graph.
    /// Returns the newly added sets.
    pub fn fix_tight_sets(&mut self, x: &RationalVector) -> Result<Vec<BTreeSet<VertexId>>> {
        let mut added = Vec::new();
        for s in lp::enumerate_tight_st_sets(&self.h, x)? {
            let pre = self.h.preimage(&s);
            if self.fixed_sets.insert(pre.clone()) {
                added.push(pre);
            }
        }
        Ok(added)
    }

    pub fn is_contained(&self, f: EdgeId, w: NodeId) -> Result<bool> {
        self.decomposition_of(w)?.is_contained(f)
    }

    pub fn classify_edges(&self) -> Result<EdgeClasses> {
        let mut classes = EdgeClasses::default();
        for (f, e) in self.h.edges() {
            let n = e
                .ends
                .iter()
                .map(|&w| self.is_contained(f, w))
                .collect::<Result<Vec<bool>>>()?
                .into_iter()
                .filter(|&c| c)
                .count();
            match n {
                0 => classes.f0.insert(f),
                1 => classes.f1.insert(f),
                _ => classes.f2.insert(f),
            };
        }
        Ok(classes)
    }

    /// `δ(w) ∩ F_2`.
    pub fn type_a_set(&self, w: NodeId) -> Result<EdgeSet> {
        let mut u = EdgeSet::new();
        for f in self.h.delta(w)? {
            let other = self.h.other_end(f, w)?;
            if self.is_contained(f, w)? && self.is_contained(f, other)? {
                u.insert(f);
            }
        }
        Ok(u)
    }

    /// Edges of `δ(w)` contained in `N_w` with no endpoint in `q`.
    pub fn type_b_set(&self, w: NodeId, q: &NodeSet) -> Result<EdgeSet> {
        let mut u = EdgeSet::new();
        if q.contains(&w) {
            return Ok(u);
        }
        for f in self.h.delta(w)? {
            if !q.contains(&self.h.other_end(f, w)?) && self.is_contained(f, w)? {
                u.insert(f);
            }
        }
        Ok(u)
    }
}

/// `|U| - x(U)`.
pub fn slack(u: &EdgeSet, x: &RationalVector) -> Rational {
    rational::from_usize(u.len()) - x.sum(u)
}

/// Grows `Q` by scanning `order` and adding the first node `w ∉ Q` with
/// `x(δ(w) ∩ F[W \ Q]) = 1`, until none qualifies.
pub fn compute_q_in_order(g: &Multigraph, x: &RationalVector, order: &[NodeId]) -> Result<NodeSet> {
    if let Some(f) = g.edge_ids().find(|&f| x.get(f).is_one()) {
        return Err(Error::Precondition(format!(
            "edge {f} has value 1; Q is defined only without 1-edges"
        )));
    }
    let mut q = NodeSet::new();
    loop {
        let mut next = None;
        for &w in order {
            if q.contains(&w) {
                continue;
            }
            let mut sum = Rational::zero();
            for f in g.delta(w)? {
                if !q.contains(&g.other_end(f, w)?) {
                    sum += x.get(f);
                }
            }
            if sum.is_one() {
                next = Some(w);
                break;
            }
        }
        match next {
            Some(w) => {
                q.insert(w);
            }
            None => return Ok(q),
        }
    }
}

/// `Q` built in ascending node order.
pub fn compute_q(g: &Multigraph, x: &RationalVector) -> Result<NodeSet> {
    let order: Vec<NodeId> = g.nodes().collect();
    compute_q_in_order(g, x, &order)
}
