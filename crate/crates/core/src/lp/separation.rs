//! Exact separation by subset enumeration.
//!
//! Sums are accumulated over bitmasks. When every value fits a common
//! denominator in `i128` the tables are integer; otherwise they fall back to
//! exact rationals.

use super::{ConstraintTag, LinearConstraint, RationalVector, Sense};
use crate::error::{Error, Result};
use crate::graph::{Multigraph, NodeSet};
use crate::matroid::{bits, Matroid};
use crate::rational::{self, Rational};
use crate::{EdgeId, NodeId};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::ops::Add;

/// Largest node count for which the mask tables are built.
const MAX_MASK_BITS: usize = 26;

/// `sums[mask] = Σ_{i ∈ mask} weights[i]`.
pub fn subset_sums<T>(weights: &[T]) -> Vec<T>
where
    T: Clone + Zero,
    for<'a> &'a T: Add<&'a T, Output = T>,
{
    let mut sums = vec![T::zero(); 1usize << weights.len()];
    for mask in 1..sums.len() {
        let low = mask.trailing_zeros() as usize;
        sums[mask] = &sums[mask & (mask - 1)] + &weights[low];
    }
    sums
}

/// Values scaled to a common denominator, if everything fits in `i128` with
/// room for sums of `headroom` terms.
pub(crate) fn scale(values: &[Rational], headroom: usize) -> Option<(i128, Vec<i128>)> {
    let mut den = BigInt::one();
    for v in values {
        den = den.lcm(v.denom());
    }
    let bound = BigInt::from(i128::MAX / (headroom.max(1) as i128 + 1));
    if den > bound {
        return None;
    }
    let mut out = Vec::with_capacity(values.len());
    for v in values {
        let s = v.numer() * (&den / v.denom());
        if s.magnitude() > bound.magnitude() {
            return None;
        }
        out.push(s.to_i128()?);
    }
    Some((den.to_i128()?, out))
}

/// `x(F[S])` for every subset `S` of the node list.
pub(crate) enum InducedTable {
    Scaled { den: i128, w: Vec<i128> },
    Exact(Vec<Rational>),
}

pub(crate) struct InducedWeights {
    pub nodes: Vec<NodeId>,
    pub table: InducedTable,
}

fn induced<T>(n: usize, adj: &[Vec<T>]) -> Vec<T>
where
    T: Clone + Zero,
    for<'a> &'a T: Add<&'a T, Output = T>,
{
    let mut w = vec![T::zero(); 1usize << n];
    for mask in 1..w.len() {
        let v = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let mut acc = w[rest].clone();
        for u in bits(rest as u64) {
            acc = &acc + &adj[v][u];
        }
        w[mask] = acc;
    }
    w
}

impl InducedWeights {
    pub fn new(g: &Multigraph, x: &RationalVector) -> Result<Self> {
        let nodes: Vec<NodeId> = g.nodes().collect();
        let n = nodes.len();
        if n > MAX_MASK_BITS {
            return Err(Error::LimitExceeded {
                what: "node count for subset enumeration",
                size: n,
                limit: MAX_MASK_BITS,
            });
        }
        let index = |w: NodeId| nodes.binary_search(&w).expect("edge end is a node");
        let mut adj = vec![vec![Rational::zero(); n]; n];
        for (e, ge) in g.edges() {
            let (a, b) = (index(ge.ends[0]), index(ge.ends[1]));
            let v = x.get(e);
            adj[a][b] += &v;
            adj[b][a] += v;
        }
        let flat: Vec<Rational> = adj.iter().flatten().cloned().collect();
        let headroom = g.edge_count() + n + 1;
        let table = match scale(&flat, headroom) {
            Some((den, scaled)) => {
                let adj: Vec<Vec<i128>> = scaled.chunks(n.max(1)).map(<[i128]>::to_vec).collect();
                InducedTable::Scaled {
                    den,
                    w: induced(n, &adj),
                }
            }
            None => InducedTable::Exact(induced(n, &adj)),
        };
        Ok(InducedWeights { nodes, table })
    }

    pub fn node_set(&self, mask: usize) -> NodeSet {
        bits(mask as u64).map(|i| self.nodes[i]).collect()
    }

    fn masks(&self) -> impl Iterator<Item = usize> {
        (1usize..1 << self.nodes.len()).filter(|m| m.count_ones() >= 2)
    }

    /// The set maximising `x(F[S]) - (|S| - 1)` when that is positive; the
    /// first such mask wins ties.
    pub fn most_violated(&self) -> Option<usize> {
        match &self.table {
            InducedTable::Scaled { den, w } => {
                argmax_positive(self.masks(), |m| w[m] - den * (m.count_ones() as i128 - 1))
            }
            InducedTable::Exact(w) => argmax_positive(self.masks(), |m| {
                &w[m] - rational::from_usize(m.count_ones() as usize - 1)
            }),
        }
    }

    /// Masks of all sets with `|S| ≥ 2` and `x(F[S]) = |S| - 1`.
    pub fn tight_masks(&self) -> Vec<usize> {
        match &self.table {
            InducedTable::Scaled { den, w } => self
                .masks()
                .filter(|&m| w[m] == den * (m.count_ones() as i128 - 1))
                .collect(),
            InducedTable::Exact(w) => self
                .masks()
                .filter(|&m| w[m] == rational::from_usize(m.count_ones() as usize - 1))
                .collect(),
        }
    }
}

fn argmax_positive<T: PartialOrd + Zero>(
    masks: impl Iterator<Item = usize>,
    excess: impl Fn(usize) -> T,
) -> Option<usize> {
    let mut best: Option<(usize, T)> = None;
    for m in masks {
        let e = excess(m);
        if e > T::zero() && best.as_ref().is_none_or(|(_, b)| e > *b) {
            best = Some((m, e));
        }
    }
    best.map(|(m, _)| m)
}

/// Most violated `x(F[S]) ≤ |S| - 1` over all `S ⊆ W`, `|S| ≥ 2`.
pub fn separate_spanning_tree(
    g: &Multigraph,
    x: &RationalVector,
) -> Result<Option<LinearConstraint>> {
    let table = InducedWeights::new(g, x)?;
    let Some(mask) = table.most_violated() else {
        return Ok(None);
    };
    let s = table.node_set(mask);
    let edges = g.edges_within(&s)?;
    Ok(Some(LinearConstraint::unit(
        &edges,
        Sense::Le,
        rational::from_usize(s.len() - 1),
        ConstraintTag::SpanningTreeSet(s),
    )))
}

/// Most violated `x(C) ≤ r(C)` over all nonempty `C` in the ground of `m`.
/// `x` is read on the ground only.
pub fn separate_matroid(
    node: NodeId,
    m: &Matroid,
    x: &RationalVector,
    limit: usize,
) -> Result<Option<LinearConstraint>> {
    let ground = m.ground();
    if ground.len() > limit {
        return Err(Error::LimitExceeded {
            what: "matroid ground for separation",
            size: ground.len(),
            limit,
        });
    }
    let xs: Vec<Rational> = ground.iter().map(|e| x.get(e)).collect();
    let masks = 1usize..1 << ground.len();
    let best = match scale(&xs, ground.len() + 1) {
        Some((den, scaled)) => {
            let sums = subset_sums(&scaled);
            argmax_positive(masks, |c| sums[c] - den * m.rank_mask(c as u64) as i128)
        }
        None => {
            let sums = subset_sums(&xs);
            argmax_positive(masks, |c| {
                &sums[c] - rational::from_usize(m.rank_mask(c as u64))
            })
        }
    };
    Ok(best.map(|c| {
        let subset: Vec<EdgeId> = ground.subset(c as u64);
        LinearConstraint::unit(
            &subset,
            Sense::Le,
            rational::from_usize(m.rank_mask(c as u64)),
            ConstraintTag::MatroidSet {
                node,
                subset: subset.iter().copied().collect(),
            },
        )
    }))
}
