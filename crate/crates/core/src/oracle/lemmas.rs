//! Lemma-level diagnostics evaluated on intermediate states of the algorithm.

use crate::config::Limits;
use crate::error::{Error, Result};
use crate::graph::{EdgeSet, Multigraph, NodeSet};
use crate::lp::{self, separate_matroid, subset_sums, RationalVector};
use crate::matroid::{independent_masks, Matroid};
use crate::rational::{self, Rational};
use crate::rounding::{compute_q, ConstraintDecomposition, Removal};
use num_traits::One;
use serde::Serialize;

/// Longest chain `∅ ⊊ C_1 ⊊ ... ⊊ C_p` of sets with `x(C) = r(C)`.
pub fn longest_tight_chain(m: &Matroid, x: &RationalVector, limit: usize) -> Result<usize> {
    let ground = m.ground();
    let n = ground.len();
    if n > limit {
        return Err(Error::LimitExceeded {
            what: "matroid ground for chain search",
            size: n,
            limit,
        });
    }
    let xs: Vec<Rational> = ground.iter().map(|e| x.get(e)).collect();
    let sums = subset_sums(&xs);
    let size = 1usize << n;
    // best[S]: longest chain ending in a tight subset of S
    let mut best = vec![0usize; size];
    for s in 1..size {
        let below = (0..n)
            .filter(|i| s >> i & 1 == 1)
            .map(|i| best[s & !(1 << i)])
            .max()
            .unwrap_or(0);
        let tight = sums[s] == rational::from_usize(m.rank_mask(s as u64));
        best[s] = if tight { below + 1 } else { below };
    }
    Ok(best[size - 1])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainBound {
    pub length: usize,
    #[serde(with = "crate::rational")]
    pub bound: Rational,
    pub passed: bool,
}

/// Checks that the longest tight chain of `m` is at most `x(ground)`.
pub fn check_chain_bound(m: &Matroid, x: &RationalVector, limit: usize) -> Result<ChainBound> {
    let length = longest_tight_chain(m, x, limit)?;
    let bound = x.sum(m.ground().elements());
    Ok(ChainBound {
        length,
        passed: rational::from_usize(length) <= bound,
        bound,
    })
}

/// Degree-two nodes whose two incident edges have values different from 1,
/// both alone and summed.
pub fn compute_s(g: &Multigraph, y: &RationalVector) -> Result<NodeSet> {
    let mut s = NodeSet::new();
    for w in g.nodes() {
        let delta: Vec<_> = g.delta(w)?.into_iter().collect();
        if delta.len() != 2 {
            continue;
        }
        let (a, b) = (y.get(delta[0]), y.get(delta[1]));
        if !a.is_one() && !b.is_one() && !(a + b).is_one() {
            s.insert(w);
        }
    }
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LaminarBound {
    pub family_size: usize,
    pub bound: i64,
    pub s_size: usize,
    pub q_size: usize,
    pub passed: bool,
}

/// Checks `|family| ≤ |W| - 1 - ⌊|S(G', y')| / 2⌋` with `G' = G[W \ Q]`.
pub fn check_laminar_bounds(
    g: &Multigraph,
    y: &RationalVector,
    family: &[NodeSet],
) -> Result<LaminarBound> {
    let q = compute_q(g, y)?;
    let rest: NodeSet = g.nodes().filter(|w| !q.contains(w)).collect();
    let sub = g.induced_subgraph(&rest)?;
    let y_sub = y.restrict(&sub.edge_ids().collect::<Vec<_>>());
    let s = compute_s(&sub, &y_sub)?;
    let bound = g.node_count() as i64 - 1 - (s.len() / 2) as i64;
    Ok(LaminarBound {
        family_size: family.len(),
        bound,
        s_size: s.len(),
        q_size: q.len(),
        passed: family.len() as i64 <= bound.max(0),
    })
}

/// The laminar-bound diagnostic on all tight sets of `g` under `y`.
pub fn laminar_diagnostic(g: &Multigraph, y: &RationalVector) -> Result<LaminarBound> {
    let tight = lp::enumerate_tight_st_sets(g, y)?;
    let laminar = lp::build_laminar_tight_family(g, y, &tight)?;
    let independent = lp::independent_subfamily(g, y, &laminar)?;
    check_laminar_bounds(g, y, &independent)
}

/// Outcome of re-checking one removal against the four removal properties.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RemovalAudit {
    /// Same vertex parts over the same grounds.
    pub structure: bool,
    /// Every edge of `U` is a free element of the new constraint.
    pub free: bool,
    /// Every independent set of a new part becomes independent in the old
    /// part after at most `⌈|U| - x(U)⌉` removals. `None` when a part exceeds
    /// the audit size.
    pub transform: Option<bool>,
    /// The LP point stays in the new matroid polytope.
    pub feasible: bool,
    /// Description of the first failure.
    pub witness: Option<String>,
}

impl RemovalAudit {
    pub fn passed(&self) -> bool {
        self.structure && self.free && self.transform != Some(false) && self.feasible
    }
}

/// Item iv only: `x|δ(w)` is in the polytope of every new part.
pub fn removal_keeps_feasibility(
    new: &ConstraintDecomposition,
    x: &RationalVector,
    limit: usize,
) -> Result<Option<String>> {
    for (&v, m) in new.parts() {
        let xr = x.restrict(m.ground().elements());
        if let Some(c) = separate_matroid(crate::NodeId(v.0), m, &xr, limit)? {
            return Ok(Some(format!(
                "part of vertex {v}: x({:?}) > {}",
                c.coefficients.keys().collect::<Vec<_>>(),
                rational::to_text(&c.rhs)
            )));
        }
    }
    Ok(None)
}

/// Re-checks a removal of `u` from `old` by enumeration.
pub fn audit_removal(
    old: &ConstraintDecomposition,
    removal: &Removal,
    u: &EdgeSet,
    x: &RationalVector,
    limits: &Limits,
) -> Result<RemovalAudit> {
    let new = &removal.decomposition;
    let mut witness: Option<String> = None;
    let fail = |w: &mut Option<String>, msg: String| {
        if w.is_none() {
            *w = Some(msg);
        }
    };

    let structure = old.parts().len() == new.parts().len()
        && old
            .parts()
            .iter()
            .all(|(v, m)| new.part(*v).is_some_and(|n| n.ground() == m.ground()));
    if !structure {
        fail(&mut witness, "parts or part grounds changed".into());
    }

    let mut free = true;
    for &f in u {
        let ok = match new.part_containing(f) {
            Some((_, m)) => m.is_free_element(f)?,
            None => false,
        };
        if !ok {
            free = false;
            fail(&mut witness, format!("edge {f} is not free after removal"));
        }
    }

    let slack = rational::from_usize(u.len()) - x.sum(u);
    let bound = rational::ceil_i64(&slack).max(0) as usize;
    let mut transform_ok = structure;
    let mut skipped = false;
    if structure {
        for (&v, before) in old.parts() {
            let u_i: Vec<_> = before.ground().iter().filter(|e| u.contains(e)).collect();
            if u_i.is_empty() {
                continue;
            }
            let after = &new.parts()[&v];
            if after.ground().len() > limits.audit_ground {
                skipped = true;
                continue;
            }
            let t = u_i.len() - rational::floor_i64(&x.sum(&u_i)).max(0) as usize;
            let cap = bound.min(t);
            for mask in independent_masks(after) {
                let removals = mask.count_ones() as usize - before.rank_mask(mask);
                if removals > cap {
                    transform_ok = false;
                    fail(
                        &mut witness,
                        format!(
                            "independent set {:?} of vertex {v} needs {removals} removals, allowed {cap}",
                            after.ground().subset(mask)
                        ),
                    );
                    break;
                }
            }
        }
    }
    let transform = match (transform_ok, skipped) {
        (false, _) => Some(false),
        (true, true) => None,
        (true, false) => Some(true),
    };

    let infeasible = removal_keeps_feasibility(new, x, limits.matroid_ground)?;
    let feasible = infeasible.is_none();
    if let Some(w) = infeasible {
        fail(&mut witness, w);
    }

    Ok(RemovalAudit {
        structure,
        free,
        transform,
        feasible,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::GroundSet;
    use crate::rational::ratio;
    use crate::rounding::remove_edges_from_degree_constraint;
    use crate::{EdgeId, NodeId, VertexId};
    use std::collections::BTreeMap;

    fn cycle4() -> Multigraph {
        let vs: Vec<VertexId> = (0..4).map(VertexId).collect();
        let es = [(0, 0, 1), (1, 1, 2), (2, 2, 3), (3, 3, 0)]
            .map(|(i, u, v)| (EdgeId(i), VertexId(u), VertexId(v)));
        Multigraph::new(&vs, &es)
    }

    fn all(v: Rational, n: u32) -> RationalVector {
        (0..n).map(|i| (EdgeId(i), v.clone())).collect()
    }

    #[test]
    fn s_on_cycle() {
        let g = cycle4();
        assert_eq!(compute_s(&g, &all(ratio(3, 4), 4)).unwrap().len(), 4);
        assert!(compute_s(&g, &all(ratio(1, 2), 4)).unwrap().is_empty());
    }

    #[test]
    fn laminar_bound_on_cycle() {
        let g = cycle4();
        let y = all(ratio(3, 4), 4);
        let r = check_laminar_bounds(&g, &y, &[g.node_set()]).unwrap();
        assert_eq!(r.bound, 1);
        assert!(r.passed);
        let d = laminar_diagnostic(&g, &y).unwrap();
        assert_eq!(d.family_size, 1);
        assert!(check_laminar_bounds(&g, &y, &[]).unwrap().passed);
    }

    #[test]
    fn laminar_bound_can_fail() {
        let g = cycle4();
        let y = all(ratio(3, 4), 4);
        let two = [g.node_set(), NodeSet::from([NodeId(0), NodeId(1)])];
        assert!(!check_laminar_bounds(&g, &y, &two).unwrap().passed);
    }

    #[test]
    fn chain_bounds() {
        let u = Matroid::uniform(GroundSet::new([EdgeId(0), EdgeId(1)]).unwrap(), 1);
        let half = all(ratio(1, 2), 2);
        let c = check_chain_bound(&u, &half, 16).unwrap();
        assert_eq!(c.length, 1);
        assert!(c.passed);
        let free = Matroid::free(GroundSet::new([EdgeId(0), EdgeId(1)]).unwrap());
        assert_eq!(longest_tight_chain(&free, &half, 16).unwrap(), 0);
        // x = (1, 1) on the free matroid: tight chain {0} ⊂ {0,1}
        assert_eq!(
            longest_tight_chain(&free, &all(ratio(1, 1), 2), 16).unwrap(),
            2
        );
    }

    #[test]
    fn audit_accepts_the_construction() {
        let ground = GroundSet::new([EdgeId(0), EdgeId(1), EdgeId(2)]).unwrap();
        let dec = ConstraintDecomposition::single(VertexId(0), Matroid::uniform(ground, 1));
        let x: RationalVector = [
            (EdgeId(0), ratio(1, 3)),
            (EdgeId(1), ratio(1, 3)),
            (EdgeId(2), ratio(1, 3)),
        ]
        .into_iter()
        .collect();
        let u = EdgeSet::from([EdgeId(0), EdgeId(1)]);
        let r = remove_edges_from_degree_constraint(&dec, &u, &x, 16).unwrap();
        let a = audit_removal(&dec, &r, &u, &x, &Limits::default()).unwrap();
        assert!(a.passed(), "{a:?}");
        assert_eq!(a.transform, Some(true));
    }

    #[test]
    fn audit_rejects_a_bad_removal() {
        // replace the constraint by a free matroid: U is free and x feasible,
        // but {0,1,2} needs two removals while the slack allows one
        let ground = GroundSet::new([EdgeId(0), EdgeId(1), EdgeId(2)]).unwrap();
        let old = ConstraintDecomposition::single(VertexId(0), Matroid::uniform(ground.clone(), 1));
        let x: RationalVector = [
            (EdgeId(0), ratio(1, 2)),
            (EdgeId(1), ratio(1, 4)),
            (EdgeId(2), ratio(1, 4)),
        ]
        .into_iter()
        .collect();
        let u = EdgeSet::from([EdgeId(0)]);
        let bogus = Removal {
            decomposition: ConstraintDecomposition::single(VertexId(0), Matroid::free(ground)),
            affected: vec![VertexId(0)],
            part_bounds: BTreeMap::from([(VertexId(0), 5)]),
        };
        let a = audit_removal(&old, &bogus, &u, &x, &Limits::default()).unwrap();
        assert_eq!(a.transform, Some(false));
        assert!(!a.passed());
        assert!(a.witness.is_some());
    }
}
