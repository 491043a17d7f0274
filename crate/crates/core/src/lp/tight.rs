//! Tight spanning-tree sets and laminar subfamilies of them.

use super::linalg::{Insert, RowBasis};
use super::separation::InducedWeights;
use super::RationalVector;
use crate::error::{Error, Result};
use crate::graph::{Multigraph, NodeSet};
use crate::rational::Rational;
use crate::EdgeId;
use num_traits::{One, Zero};
use std::collections::BTreeSet;

/// Every `S ⊆ W` with `|S| ≥ 2` and `x(F[S]) = |S| - 1`, in mask order.
pub fn enumerate_tight_st_sets(g: &Multigraph, x: &RationalVector) -> Result<Vec<NodeSet>> {
    let table = InducedWeights::new(g, x)?;
    Ok(table
        .tight_masks()
        .into_iter()
        .map(|m| table.node_set(m))
        .collect())
}

fn laminar_pair(a: &NodeSet, b: &NodeSet) -> bool {
    a.is_disjoint(b) || a.is_subset(b) || b.is_subset(a)
}

pub fn is_laminar(family: &[NodeSet]) -> bool {
    family
        .iter()
        .enumerate()
        .all(|(i, a)| family[i + 1..].iter().all(|b| laminar_pair(a, b)))
}

fn characteristic(g: &Multigraph, s: &NodeSet, support: &[EdgeId]) -> Result<Vec<Rational>> {
    let inside = g.edges_within(s)?;
    Ok(support
        .iter()
        .map(|e| {
            if inside.contains(e) {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .collect())
}

fn is_tight(g: &Multigraph, x: &RationalVector, s: &NodeSet) -> Result<bool> {
    Ok(x.sum(&g.edges_within(s)?) == crate::rational::from_usize(s.len() - 1))
}

/// A maximal laminar subfamily of `tight` whose characteristic vectors on the
/// support of `x` span those of every set in `tight`.
///
/// Crossing tight sets are uncrossed first: for tight `A`, `B` with
/// `A ∩ B ≠ ∅`, both `A ∩ B` and `A ∪ B` must be tight too, which is checked.
pub fn build_laminar_tight_family(
    g: &Multigraph,
    x: &RationalVector,
    tight: &[NodeSet],
) -> Result<Vec<NodeSet>> {
    let mut family: BTreeSet<NodeSet> = BTreeSet::new();
    for s in tight {
        if s.len() < 2 || !is_tight(g, x, s)? {
            return Err(Error::invariant(
                "tight family",
                format!("{s:?} is not a tight spanning tree set"),
            ));
        }
        family.insert(s.clone());
    }
    let mut queue: Vec<NodeSet> = family.iter().cloned().collect();
    while let Some(a) = queue.pop() {
        let current: Vec<NodeSet> = family.iter().cloned().collect();
        for b in current {
            if laminar_pair(&a, &b) {
                continue;
            }
            let meet: NodeSet = a.intersection(&b).copied().collect();
            let join: NodeSet = a.union(&b).copied().collect();
            for c in [meet, join] {
                if c.len() < 2 {
                    continue;
                }
                if !is_tight(g, x, &c)? {
                    return Err(Error::invariant(
                        "uncrossing",
                        format!("{c:?} obtained from tight {a:?} and {b:?} is not tight"),
                    ));
                }
                if family.insert(c.clone()) {
                    queue.push(c);
                }
            }
        }
    }

    // largest sets first so the top-level structure is kept
    let mut ordered: Vec<NodeSet> = family.into_iter().collect();
    ordered.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    let mut laminar: Vec<NodeSet> = Vec::new();
    for s in &ordered {
        if laminar.iter().all(|l| laminar_pair(l, s)) {
            laminar.push(s.clone());
        }
    }

    let support: Vec<EdgeId> = x.support().collect();
    let mut basis = RowBasis::default();
    for l in &laminar {
        basis.insert(characteristic(g, l, &support)?);
    }
    for s in &ordered {
        if !basis.contains(&characteristic(g, s, &support)?) {
            return Err(Error::invariant(
                "laminar span",
                format!("tight set {s:?} is outside the span of the laminar family"),
            ));
        }
    }
    Ok(laminar)
}

/// A linearly independent subfamily of `family` with the same span on the
/// support of `x`, keeping the first occurrence of each new direction.
pub fn independent_subfamily(
    g: &Multigraph,
    x: &RationalVector,
    family: &[NodeSet],
) -> Result<Vec<NodeSet>> {
    let support: Vec<EdgeId> = x.support().collect();
    let mut basis = RowBasis::default();
    let mut out = Vec::new();
    for s in family {
        if basis.insert(characteristic(g, s, &support)?) == Insert::Added {
            out.push(s.clone());
        }
    }
    Ok(out)
}
