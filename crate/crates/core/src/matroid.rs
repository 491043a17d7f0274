//! Matroids over edge ids, given by rank oracles.
//!
//! Primitive kinds (free, uniform, partition, laminar, explicit table) are
//! evaluated directly. Derived kinds (direct sum, union, contraction, loop
//! extension, restriction) keep references to their operands and evaluate
//! ranks through the defining formulas. Union ranks enumerate subsets, so a
//! ground-size limit guards their construction.
//!
//! Subsets are handled internally as `u64` bitmasks over the sorted ground set.

use crate::error::{Error, Result};
use crate::EdgeId;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

/// Default limit on ground sizes for enumeration-based ranks.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 16;

const MASK_BITS: usize = 64;

/// Sorted, duplicate-free edge ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GroundSet(Vec<EdgeId>);

impl GroundSet {
    pub fn new(elements: impl IntoIterator<Item = EdgeId>) -> Result<Self> {
        let mut v: Vec<EdgeId> = elements.into_iter().collect();
        v.sort_unstable();
        if let Some(w) = v.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidMatroid(format!(
                "duplicate ground element {}",
                w[0]
            )));
        }
        if v.len() > MASK_BITS {
            return Err(Error::LimitExceeded {
                what: "matroid ground set",
                size: v.len(),
                limit: MASK_BITS,
            });
        }
        Ok(GroundSet(v))
    }

    pub fn empty() -> Self {
        GroundSet(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn elements(&self) -> &[EdgeId] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.0.binary_search(&e).is_ok()
    }

    pub fn index_of(&self, e: EdgeId) -> Option<usize> {
        self.0.binary_search(&e).ok()
    }

    pub fn full_mask(&self) -> u64 {
        low_bits(self.len())
    }

    /// Bitmask of `subset`; errors on elements outside the ground set.
    pub fn mask_of<'a>(&self, subset: impl IntoIterator<Item = &'a EdgeId>) -> Result<u64> {
        let mut mask = 0u64;
        for &e in subset {
            let i = self.index_of(e).ok_or(Error::UnknownElement(e))?;
            mask |= 1 << i;
        }
        Ok(mask)
    }

    pub fn subset(&self, mask: u64) -> Vec<EdgeId> {
        bits(mask).map(|i| self.0[i]).collect()
    }

    pub fn to_set(&self) -> BTreeSet<EdgeId> {
        self.0.iter().copied().collect()
    }

    pub fn is_disjoint(&self, other: &GroundSet) -> bool {
        self.0.iter().all(|&e| !other.contains(e))
    }
}

impl fmt::Display for GroundSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

pub(crate) fn low_bits(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub(crate) fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i)
        }
    })
}

/// Maps the elements of a child ground set to bit positions of a parent
/// ground set.
#[derive(Debug, Clone)]
struct Embedding {
    positions: Vec<u8>,
}

impl Embedding {
    fn new(child: &GroundSet, parent: &GroundSet) -> Self {
        let positions = child
            .iter()
            .map(|e| parent.index_of(e).expect("child element in parent ground") as u8)
            .collect();
        Embedding { positions }
    }

    fn pull(&self, parent_mask: u64) -> u64 {
        let mut m = 0;
        for (i, &p) in self.positions.iter().enumerate() {
            m |= ((parent_mask >> p) & 1) << i;
        }
        m
    }

    fn push(&self, child_mask: u64) -> u64 {
        let mut m = 0;
        for i in bits(child_mask) {
            m |= 1 << self.positions[i];
        }
        m
    }
}

/// The parameters of a primitive matroid kind, expressed with edge ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Primitive {
    Free,
    Uniform {
        rank: usize,
    },
    /// Blocks partition the ground set.
    Partition {
        blocks: Vec<(Vec<EdgeId>, usize)>,
    },
    /// Nested or disjoint sets with capacities; elements outside every set
    /// are unconstrained.
    Laminar {
        sets: Vec<(Vec<EdgeId>, usize)>,
    },
    /// `ranks[mask]` for every subset mask of the ground set.
    Explicit {
        ranks: Vec<u32>,
    },
}

#[derive(Debug)]
enum Kind {
    Free,
    Uniform(usize),
    Partition(Vec<(u64, usize)>),
    Laminar(LaminarFamily),
    Explicit(Vec<u32>),
    DirectSum(Vec<(Matroid, Embedding)>),
    Union(Matroid, Matroid),
    Contraction {
        base: Matroid,
        contracted: u64,
        contracted_rank: usize,
        embed: Embedding,
    },
    LoopExtension {
        base: Matroid,
        embed: Embedding,
    },
    Restriction {
        base: Matroid,
        embed: Embedding,
    },
}

#[derive(Debug)]
struct LaminarFamily {
    /// (mask, capacity) sorted by increasing cardinality.
    sets: Vec<(u64, usize)>,
    parent: Vec<Option<usize>>,
}

impl LaminarFamily {
    fn new(mut sets: Vec<(u64, usize)>) -> Result<Self> {
        sets.sort_by_key(|&(m, _)| (m.count_ones(), m));
        for (i, &(a, _)) in sets.iter().enumerate() {
            for &(b, _) in &sets[i + 1..] {
                if a & b != 0 && a & b != a && a & b != b {
                    return Err(Error::InvalidMatroid(
                        "laminar family contains crossing sets".into(),
                    ));
                }
            }
        }
        let parent = (0..sets.len())
            .map(|i| (i + 1..sets.len()).find(|&j| sets[j].0 & sets[i].0 == sets[i].0))
            .collect();
        Ok(LaminarFamily { sets, parent })
    }

    fn rank(&self, a: u64) -> usize {
        let n = self.sets.len();
        let mut value = vec![0usize; n];
        let mut covered = vec![0u64; n];
        let mut top = 0usize;
        let mut top_covered = 0u64;
        for i in 0..n {
            let (mask, cap) = self.sets[i];
            let loose = (a & mask & !covered[i]).count_ones() as usize;
            value[i] = (value[i] + loose).min(cap);
            match self.parent[i] {
                Some(p) => {
                    value[p] += value[i];
                    covered[p] |= mask;
                }
                None => {
                    top += value[i];
                    top_covered |= mask;
                }
            }
        }
        top + (a & !top_covered).count_ones() as usize
    }
}

struct Inner {
    ground: GroundSet,
    kind: Kind,
    memo: Option<Mutex<HashMap<u64, u32>>>,
}

/// An immutable matroid. Cloning is cheap; derived matroids share their
/// operands and rank caches.
#[derive(Clone)]
pub struct Matroid(Arc<Inner>);

impl fmt::Debug for Matroid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind_name(), self.ground())
    }
}

impl Matroid {
    fn build(ground: GroundSet, kind: Kind) -> Self {
        let memo = match kind {
            Kind::DirectSum(_) | Kind::Union(..) | Kind::Contraction { .. } => {
                Some(Mutex::new(HashMap::new()))
            }
            _ => None,
        };
        Matroid(Arc::new(Inner { ground, kind, memo }))
    }

    pub fn free(ground: GroundSet) -> Self {
        Self::build(ground, Kind::Free)
    }

    pub fn uniform(ground: GroundSet, rank: usize) -> Self {
        Self::build(ground, Kind::Uniform(rank))
    }

    pub fn partition(ground: GroundSet, blocks: &[(Vec<EdgeId>, usize)]) -> Result<Self> {
        let mut seen = 0u64;
        let mut masks = Vec::with_capacity(blocks.len());
        for (edges, cap) in blocks {
            let m = ground.mask_of(edges)?;
            if m & seen != 0 {
                return Err(Error::InvalidMatroid("partition blocks overlap".into()));
            }
            seen |= m;
            masks.push((m, *cap));
        }
        if seen != ground.full_mask() {
            return Err(Error::InvalidMatroid(
                "partition blocks do not cover the ground set".into(),
            ));
        }
        Ok(Self::build(ground, Kind::Partition(masks)))
    }

    pub fn laminar(ground: GroundSet, sets: &[(Vec<EdgeId>, usize)]) -> Result<Self> {
        let masks = sets
            .iter()
            .map(|(edges, cap)| Ok((ground.mask_of(edges)?, *cap)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::build(
            ground,
            Kind::Laminar(LaminarFamily::new(masks)?),
        ))
    }

    /// A matroid given by its full rank table, validated on construction.
    pub fn explicit(ground: GroundSet, ranks: Vec<u32>) -> Result<Self> {
        let n = ground.len();
        if n > DEFAULT_ENUMERATION_LIMIT {
            return Err(Error::LimitExceeded {
                what: "explicit rank table ground",
                size: n,
                limit: DEFAULT_ENUMERATION_LIMIT,
            });
        }
        if ranks.len() != 1 << n {
            return Err(Error::InvalidMatroid(format!(
                "rank table has {} entries, expected {}",
                ranks.len(),
                1usize << n
            )));
        }
        validate_rank_table(n, |m| ranks[m as usize] as usize)
            .map_err(|e| Error::InvalidMatroid(format!("rank table: {e}")))?;
        Ok(Self::build(ground, Kind::Explicit(ranks)))
    }

    pub fn from_primitive(ground: GroundSet, p: &Primitive) -> Result<Self> {
        match p {
            Primitive::Free => Ok(Self::free(ground)),
            Primitive::Uniform { rank } => Ok(Self::uniform(ground, *rank)),
            Primitive::Partition { blocks } => Self::partition(ground, blocks),
            Primitive::Laminar { sets } => Self::laminar(ground, sets),
            Primitive::Explicit { ranks } => Self::explicit(ground, ranks.clone()),
        }
    }

    /// The primitive parameters, if this is a primitive kind.
    pub fn primitive(&self) -> Option<Primitive> {
        let g = self.ground();
        let sets = |v: &[(u64, usize)]| v.iter().map(|&(m, c)| (g.subset(m), c)).collect();
        match &self.0.kind {
            Kind::Free => Some(Primitive::Free),
            Kind::Uniform(k) => Some(Primitive::Uniform { rank: *k }),
            Kind::Partition(b) => Some(Primitive::Partition { blocks: sets(b) }),
            Kind::Laminar(l) => Some(Primitive::Laminar {
                sets: sets(&l.sets),
            }),
            Kind::Explicit(r) => Some(Primitive::Explicit { ranks: r.clone() }),
            _ => None,
        }
    }

    /// `base` extended by `loops`, which are rank-zero elements.
    pub fn loop_extension(base: &Matroid, loops: &[EdgeId]) -> Result<Self> {
        let loops = GroundSet::new(loops.iter().copied())?;
        if let Some(&e) = loops
            .elements()
            .iter()
            .find(|&&e| base.ground().contains(e))
        {
            return Err(Error::OverlappingGrounds(e));
        }
        let ground = GroundSet::new(base.ground().iter().chain(loops.iter()))?;
        let embed = Embedding::new(base.ground(), &ground);
        Ok(Self::build(
            ground,
            Kind::LoopExtension {
                base: base.clone(),
                embed,
            },
        ))
    }

    /// The restriction (deletion minor) of `self` to `keep`.
    pub fn restrict(&self, keep: &[EdgeId]) -> Result<Self> {
        let ground = GroundSet::new(keep.iter().copied())?;
        for &e in ground.elements() {
            if !self.ground().contains(e) {
                return Err(Error::UnknownElement(e));
            }
        }
        if ground.len() == self.ground().len() {
            return Ok(self.clone());
        }
        let embed = Embedding::new(&ground, self.ground());
        Ok(Self::build(
            ground,
            Kind::Restriction {
                base: self.clone(),
                embed,
            },
        ))
    }

    pub fn ground(&self) -> &GroundSet {
        &self.0.ground
    }

    pub fn kind_name(&self) -> &'static str {
        match &self.0.kind {
            Kind::Free => "free",
            Kind::Uniform(_) => "uniform",
            Kind::Partition(_) => "partition",
            Kind::Laminar(_) => "laminar",
            Kind::Explicit(_) => "explicit",
            Kind::DirectSum(_) => "direct-sum",
            Kind::Union(..) => "union",
            Kind::Contraction { .. } => "contraction",
            Kind::LoopExtension { .. } => "loop-extension",
            Kind::Restriction { .. } => "restriction",
        }
    }

    pub fn is_free_kind(&self) -> bool {
        matches!(self.0.kind, Kind::Free)
    }

    /// Rank of the subset encoded by `mask` over [`Matroid::ground`].
    pub fn rank_mask(&self, mask: u64) -> usize {
        debug_assert_eq!(mask & !self.ground().full_mask(), 0);
        if let Some(memo) = &self.0.memo {
            if let Some(&r) = memo.lock().unwrap().get(&mask) {
                return r as usize;
            }
            let r = self.compute_rank(mask);
            memo.lock().unwrap().insert(mask, r as u32);
            r
        } else {
            self.compute_rank(mask)
        }
    }

    fn compute_rank(&self, a: u64) -> usize {
        match &self.0.kind {
            Kind::Free => a.count_ones() as usize,
            Kind::Uniform(k) => (a.count_ones() as usize).min(*k),
            Kind::Partition(blocks) => blocks
                .iter()
                .map(|&(m, cap)| ((a & m).count_ones() as usize).min(cap))
                .sum(),
            Kind::Laminar(family) => family.rank(a),
            Kind::Explicit(table) => table[a as usize] as usize,
            Kind::DirectSum(parts) => parts.iter().map(|(m, e)| m.rank_mask(e.pull(a))).sum(),
            Kind::Union(left, right) => {
                // r(A) = min over B ⊆ A of |A \ B| + r1(B) + r2(B)
                let mut best = a.count_ones() as usize;
                let mut b = a;
                loop {
                    let cand =
                        (a & !b).count_ones() as usize + left.rank_mask(b) + right.rank_mask(b);
                    best = best.min(cand);
                    if b == 0 {
                        break;
                    }
                    b = (b - 1) & a;
                }
                best
            }
            Kind::Contraction {
                base,
                contracted,
                contracted_rank,
                embed,
            } => base.rank_mask(embed.push(a) | contracted) - contracted_rank,
            Kind::LoopExtension { base, embed } => base.rank_mask(embed.pull(a)),
            Kind::Restriction { base, embed } => base.rank_mask(embed.push(a)),
        }
    }

    pub fn rank(&self, subset: &[EdgeId]) -> Result<usize> {
        Ok(self.rank_mask(self.ground().mask_of(subset)?))
    }

    pub fn full_rank(&self) -> usize {
        self.rank_mask(self.ground().full_mask())
    }

    pub fn is_independent(&self, subset: &[EdgeId]) -> Result<bool> {
        let m = self.ground().mask_of(subset)?;
        Ok(self.rank_mask(m) == m.count_ones() as usize)
    }

    pub fn is_independent_mask(&self, mask: u64) -> bool {
        self.rank_mask(mask) == mask.count_ones() as usize
    }

    /// Whether `e` is a coloop, i.e. can be added to every independent set.
    pub fn is_free_element(&self, e: EdgeId) -> Result<bool> {
        let i = self.ground().index_of(e).ok_or(Error::UnknownElement(e))?;
        Ok(self.is_free_index(i))
    }

    pub(crate) fn is_free_index(&self, i: usize) -> bool {
        if self.is_free_kind() {
            return true;
        }
        let full = self.ground().full_mask();
        self.rank_mask(full) == self.rank_mask(full & !(1 << i)) + 1
    }

    /// The minimum number of elements to delete from `subset` to make it
    /// independent; by the exchange property this is `|A| - r(A)`.
    pub fn min_removals_to_independent(&self, subset: &[EdgeId]) -> Result<usize> {
        let m = self.ground().mask_of(subset)?;
        Ok(m.count_ones() as usize - self.rank_mask(m))
    }
}

/// Direct sum of matroids on pairwise disjoint grounds.
pub fn direct_sum(parts: &[Matroid]) -> Result<Matroid> {
    let mut all = Vec::new();
    let mut seen = BTreeSet::new();
    for p in parts {
        for e in p.ground().iter() {
            if !seen.insert(e) {
                return Err(Error::OverlappingGrounds(e));
            }
            all.push(e);
        }
    }
    let ground = GroundSet::new(all)?;
    if parts.is_empty() {
        return Ok(Matroid::free(ground));
    }
    if parts.len() == 1 {
        return Ok(parts[0].clone());
    }
    let children = parts
        .iter()
        .map(|p| (p.clone(), Embedding::new(p.ground(), &ground)))
        .collect();
    Ok(Matroid::build(ground, Kind::DirectSum(children)))
}

/// Matroid union with the default enumeration limit.
pub fn matroid_union(m1: &Matroid, m2: &Matroid) -> Result<Matroid> {
    matroid_union_with_limit(m1, m2, DEFAULT_ENUMERATION_LIMIT)
}

pub fn matroid_union_with_limit(m1: &Matroid, m2: &Matroid, limit: usize) -> Result<Matroid> {
    if m1.ground() != m2.ground() {
        return Err(Error::GroundMismatch);
    }
    if m1.ground().len() > limit {
        return Err(Error::LimitExceeded {
            what: "matroid union ground",
            size: m1.ground().len(),
            limit,
        });
    }
    if m1.is_free_kind() {
        return Ok(m1.clone());
    }
    if m2.is_free_kind() {
        return Ok(m2.clone());
    }
    Ok(Matroid::build(
        m1.ground().clone(),
        Kind::Union(m1.clone(), m2.clone()),
    ))
}

/// `m / c`: the matroid on `ground \ c` with rank `r(A ∪ c) - r(c)`.
pub fn contract_matroid(m: &Matroid, c: &[EdgeId]) -> Result<Matroid> {
    let contracted = m.ground().mask_of(c)?;
    if contracted == 0 {
        return Ok(m.clone());
    }
    let ground = GroundSet::new(m.ground().iter().filter(|e| !c.contains(e)))?;
    if m.is_free_kind() {
        return Ok(Matroid::free(ground));
    }
    let embed = Embedding::new(&ground, m.ground());
    Ok(Matroid::build(
        ground,
        Kind::Contraction {
            base: m.clone(),
            contracted,
            contracted_rank: m.rank_mask(contracted),
            embed,
        },
    ))
}

/// Checks normalization, unit increase and (local) submodularity of a rank
/// function on `n` elements by enumeration.
pub fn validate_rank_table(
    n: usize,
    rank: impl Fn(u64) -> usize,
) -> std::result::Result<(), String> {
    if rank(0) != 0 {
        return Err("rank of the empty set is not zero".into());
    }
    let full = low_bits(n);
    for a in 0..=full {
        let ra = rank(a);
        for i in bits(full & !a) {
            let rai = rank(a | 1 << i);
            if rai != ra && rai != ra + 1 {
                return Err(format!(
                    "adding element {i} to {a:#b} changes rank by more than one"
                ));
            }
            for j in bits(full & !a & !(1 << i)) {
                if j < i {
                    continue;
                }
                let raj = rank(a | 1 << j);
                let raij = rank(a | 1 << i | 1 << j);
                if rai + raj < raij + ra {
                    return Err(format!("submodularity fails at {a:#b} with {i},{j}"));
                }
            }
        }
    }
    Ok(())
}

/// Independent sets of `m` as masks, in increasing mask order.
pub fn independent_masks(m: &Matroid) -> Vec<u64> {
    (0..=m.ground().full_mask())
        .filter(|&s| m.is_independent_mask(s))
        .collect()
}
