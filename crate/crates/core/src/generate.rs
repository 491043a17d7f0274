//! Deterministic random instances with a planted feasible spanning tree.
//!
//! A random spanning tree `T` is drawn first and extra edges are added on top.
//! Every capacity is at least the number of `T` edges it covers, so `T`
//! satisfies each `M_v` and the instance is feasible with probability 1. Most
//! capacities are exactly tight on `T`, and `T` is expensive relative to the
//! other edges.

use crate::error::{Error, Result};
use crate::instance::{Edge, Instance};
use crate::matroid::{GroundSet, Matroid};
use crate::rational::{self, Rational};
use crate::{EdgeId, VertexId};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstraintKind {
    /// `Uniform(B_v)`, the classical degree bound.
    UniformDeg,
    /// Capacities on blocks of a random partition of `δ(v)`.
    Partition,
    /// One or two disjoint inner sets nested inside `δ(v)`, each capped.
    Laminar,
    /// Each vertex draws one of the three kinds above.
    Mixed,
}

impl ConstraintKind {
    pub const ALL: [ConstraintKind; 4] = [
        ConstraintKind::UniformDeg,
        ConstraintKind::Partition,
        ConstraintKind::Laminar,
        ConstraintKind::Mixed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConstraintKind::UniformDeg => "uniform-deg",
            ConstraintKind::Partition => "partition",
            ConstraintKind::Laminar => "laminar",
            ConstraintKind::Mixed => "mixed",
        }
    }
}

impl fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConstraintKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Precondition(format!("unknown generator kind `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorParams {
    pub kind: ConstraintKind,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
}

/// Largest edge count accepted, so every `δ(v)` fits a subset mask.
pub const MAX_EDGES: usize = 64;

/// Parameters of the fuzz campaign for `seed`: `3 ≤ n ≤ 8`, `min(2n - 2, 14) ≤ m ≤ 14`,
/// kinds cycling through uniform, partition and laminar.
pub fn fuzz_params(seed: u64) -> GeneratorParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_f022);
    let n = rng.gen_range(3..=8);
    let m = rng.gen_range((2 * n - 2).min(14)..=14);
    let kind = [
        ConstraintKind::UniformDeg,
        ConstraintKind::Partition,
        ConstraintKind::Laminar,
    ][(seed % 3) as usize];
    GeneratorParams { kind, n, m, seed }
}

/// A generated instance and its metadata (parameters, planted tree and cost).
#[derive(Debug, Clone)]
pub struct Generated {
    pub instance: Instance,
    pub planted_tree: Vec<EdgeId>,
    pub metadata: Value,
}

/// Planted edges cost in `[4, 10]`, the others in `[0, 6]`, so the cheapest
/// trees tend to run into the capacities.
fn random_cost(rng: &mut ChaCha8Rng, planted: bool) -> Rational {
    let den = rng.gen_range(1..=4i64);
    let lo = if planted { 4 * den } else { 0 };
    rational::ratio(rng.gen_range(lo..=lo + 6 * den), den)
}

/// Capacity for a set holding `in_tree` planted edges out of `size`.
fn capacity(rng: &mut ChaCha8Rng, in_tree: usize, size: usize) -> usize {
    (in_tree + usize::from(rng.gen_bool(0.3))).min(size)
}

fn uniform_deg(rng: &mut ChaCha8Rng, ground: GroundSet, planted: &BTreeSet<EdgeId>) -> Matroid {
    let in_tree = ground.iter().filter(|e| planted.contains(e)).count();
    let cap = capacity(rng, in_tree, ground.len());
    Matroid::uniform(ground, cap)
}

fn partition(
    rng: &mut ChaCha8Rng,
    ground: GroundSet,
    planted: &BTreeSet<EdgeId>,
) -> Result<Matroid> {
    let mut edges = ground.elements().to_vec();
    edges.shuffle(rng);
    let parts = rng.gen_range(1..=edges.len().min(3));
    let mut blocks: Vec<Vec<EdgeId>> = vec![Vec::new(); parts];
    for (i, e) in edges.into_iter().enumerate() {
        // the first `parts` edges seed one block each so no block is empty
        let b = if i < parts {
            i
        } else {
            rng.gen_range(0..parts)
        };
        blocks[b].push(e);
    }
    let blocks: Vec<(Vec<EdgeId>, usize)> = blocks
        .into_iter()
        .map(|mut b| {
            b.sort_unstable();
            let in_tree = b.iter().filter(|e| planted.contains(e)).count();
            let cap = capacity(rng, in_tree, b.len());
            (b, cap)
        })
        .collect();
    Matroid::partition(ground, &blocks)
}

fn laminar(rng: &mut ChaCha8Rng, ground: GroundSet, planted: &BTreeSet<EdgeId>) -> Result<Matroid> {
    let count = |s: &[EdgeId]| s.iter().filter(|e| planted.contains(e)).count();
    let mut edges = ground.elements().to_vec();
    edges.shuffle(rng);
    let mut sets = Vec::new();
    let inner = if edges.len() >= 4 {
        rng.gen_range(1..=2)
    } else {
        1
    };
    let mut rest = &edges[..];
    for _ in 0..inner {
        if rest.len() < 2 {
            break;
        }
        let size = rng.gen_range(1..rest.len());
        let mut s = rest[..size].to_vec();
        rest = &rest[size..];
        s.sort_unstable();
        let cap = capacity(rng, count(&s), s.len());
        sets.push((s, cap));
    }
    let all = ground.elements().to_vec();
    let cap = capacity(rng, count(&all), all.len());
    sets.push((all, cap));
    Matroid::laminar(ground, &sets)
}

pub fn generate(p: &GeneratorParams) -> Result<Generated> {
    if p.n < 2 {
        return Err(Error::Precondition(format!(
            "n = {} but at least 2 vertices are needed",
            p.n
        )));
    }
    if p.m < p.n - 1 {
        return Err(Error::Precondition(format!(
            "m = {} edges cannot connect {} vertices",
            p.m, p.n
        )));
    }
    if p.m > MAX_EDGES {
        return Err(Error::Precondition(format!(
            "m = {} exceeds {MAX_EDGES}",
            p.m
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut order: Vec<u32> = (0..p.n as u32).collect();
    order.shuffle(&mut rng);

    let mut pairs = Vec::with_capacity(p.m);
    // half of the planted trees are paths, whose degree 2 caps give
    // fractional relaxations far more often than bushy trees do
    let path = rng.gen_bool(0.5);
    for i in 1..p.n {
        let j = if path { i - 1 } else { rng.gen_range(0..i) };
        pairs.push((order[i], order[j]));
    }
    while pairs.len() < p.m {
        let u = rng.gen_range(0..p.n as u32);
        let v = rng.gen_range(0..p.n as u32);
        if u != v {
            pairs.push((u, v));
        }
    }
    // shuffle ids so the planted tree is not simply the lowest edge ids
    let mut ids: Vec<u32> = (0..p.m as u32).collect();
    ids.shuffle(&mut rng);
    let mut edges: Vec<Edge> = pairs
        .iter()
        .zip(&ids)
        .enumerate()
        .map(|(i, (&(u, v), &id))| Edge {
            id: EdgeId(id),
            u: VertexId(u.min(v)),
            v: VertexId(u.max(v)),
            cost: random_cost(&mut rng, i < p.n - 1),
        })
        .collect();
    let planted: BTreeSet<EdgeId> = ids[..p.n - 1].iter().map(|&i| EdgeId(i)).collect();
    edges.sort_by_key(|e| e.id);

    let vertices: Vec<VertexId> = (0..p.n as u32).map(VertexId).collect();
    let mut constraints = BTreeMap::new();
    let mut kinds = BTreeMap::new();
    for &v in &vertices {
        let delta: Vec<EdgeId> = edges
            .iter()
            .filter(|e| e.u == v || e.v == v)
            .map(|e| e.id)
            .collect();
        let ground = GroundSet::new(delta)?;
        let kind = match p.kind {
            ConstraintKind::Mixed => [
                ConstraintKind::UniformDeg,
                ConstraintKind::Partition,
                ConstraintKind::Laminar,
            ][rng.gen_range(0..3)],
            k => k,
        };
        let m = match kind {
            ConstraintKind::UniformDeg => uniform_deg(&mut rng, ground, &planted),
            ConstraintKind::Partition => partition(&mut rng, ground, &planted)?,
            _ => laminar(&mut rng, ground, &planted)?,
        };
        kinds.insert(v.to_string(), kind.name());
        constraints.insert(v, m);
    }
    let instance = Instance::new(vertices, edges, constraints)?;
    let planted_tree: Vec<EdgeId> = planted.into_iter().collect();
    let metadata = json!({
        "generator": p.kind.name(),
        "n": p.n,
        "m": p.m,
        "seed": p.seed,
        "vertex_kinds": kinds,
        "planted_tree": planted_tree,
        "planted_cost": rational::to_text(&instance.cost_of(&planted_tree)),
        "feasibility_probability": 1,
    });
    Ok(Generated {
        instance,
        planted_tree,
        metadata,
    })
}
