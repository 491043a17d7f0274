//! Removing a set of edges `U` from a degree constraint.
//!
//! For each part `N_i` with ground `S_i` and `U_i = S_i ∩ U ≠ ∅`:
//!
//! ```text
//! M1 = Uniform(|U_i| - ⌊x(U_i)⌋) on U_i, extended by loops S_i \ U_i
//! M2 = M1 ∨ N_i
//! M3 = M2 / U_i
//! N'_i = M3 ⊕ Free(U_i)
//! ```

use super::state::ConstraintDecomposition;
use crate::error::{Error, Result};
use crate::graph::EdgeSet;
use crate::lp::RationalVector;
use crate::matroid::{contract_matroid, direct_sum, matroid_union_with_limit, GroundSet, Matroid};
use crate::rational;
use crate::{EdgeId, VertexId};
use std::collections::BTreeMap;

#[derive(Debug, Clone)]
pub struct Removal {
    pub decomposition: ConstraintDecomposition,
    /// Vertices whose part had a nonempty `U_i`.
    pub affected: Vec<VertexId>,
    /// `|U_i| - ⌊x(U_i)⌋` per affected part.
    pub part_bounds: BTreeMap<VertexId, usize>,
}

/// The adapted part for `U_i`, which must be a nonempty subset of the ground.
pub fn remove_from_part(
    part: &Matroid,
    u_i: &[EdgeId],
    x: &RationalVector,
    limit: usize,
) -> Result<(Matroid, usize)> {
    let s_i = part.ground();
    let u_ground = GroundSet::new(u_i.iter().copied())?;
    for &e in u_i {
        if !s_i.contains(e) {
            return Err(Error::UnknownElement(e));
        }
    }
    let x_u = x.sum(u_i);
    let t = u_i.len() - rational::floor_i64(&x_u).max(0) as usize;
    let loops: Vec<EdgeId> = s_i.iter().filter(|e| !u_ground.contains(*e)).collect();
    let m1 = Matroid::loop_extension(&Matroid::uniform(u_ground.clone(), t), &loops)?;
    let m2 = matroid_union_with_limit(&m1, part, limit)?;
    let m3 = contract_matroid(&m2, u_i)?;
    let new = direct_sum(&[m3, Matroid::free(u_ground)])?;
    Ok((new, t))
}

/// Removes `u ⊆ δ(w)` from `N_w`, part by part. Parts with `U_i = ∅` are kept.
pub fn remove_edges_from_degree_constraint(
    dec: &ConstraintDecomposition,
    u: &EdgeSet,
    x: &RationalVector,
    limit: usize,
) -> Result<Removal> {
    let ground = dec.ground();
    if let Some(&e) = u.iter().find(|e| !ground.contains(e)) {
        return Err(Error::UnknownEdge(e));
    }
    let mut parts = BTreeMap::new();
    let mut affected = Vec::new();
    let mut part_bounds = BTreeMap::new();
    for (&v, m) in dec.parts() {
        let u_i: Vec<EdgeId> = m.ground().iter().filter(|e| u.contains(e)).collect();
        if u_i.is_empty() {
            parts.insert(v, m.clone());
            continue;
        }
        let (new, t) = remove_from_part(m, &u_i, x, limit)?;
        parts.insert(v, new);
        affected.push(v);
        part_bounds.insert(v, t);
    }
    Ok(Removal {
        decomposition: ConstraintDecomposition::new(parts)?,
        affected,
        part_bounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::independent_masks;
    use crate::rational::ratio;

    fn ids(v: &[u32]) -> Vec<EdgeId> {
        v.iter().map(|&i| EdgeId(i)).collect()
    }

    #[test]
    fn uniform_part_becomes_free() {
        let part = Matroid::uniform(GroundSet::new(ids(&[1, 2])).unwrap(), 1);
        let x = RationalVector::from_iter([(EdgeId(1), ratio(1, 2)), (EdgeId(2), ratio(1, 2))]);
        let (new, t) = remove_from_part(&part, &ids(&[1, 2]), &x, 16).unwrap();
        assert_eq!(t, 1);
        assert_eq!(new.rank(&ids(&[1, 2])).unwrap(), 2);
        assert!(new.is_free_element(EdgeId(1)).unwrap());
    }

    #[test]
    fn free_part_stays_free() {
        let part = Matroid::free(GroundSet::new(ids(&[1, 2, 3])).unwrap());
        let x = RationalVector::from_iter(ids(&[1, 2, 3]).into_iter().map(|e| (e, ratio(1, 3))));
        let (new, _) = remove_from_part(&part, &ids(&[2]), &x, 16).unwrap();
        assert_eq!(independent_masks(&new).len(), 8);
    }

    #[test]
    fn untouched_parts_are_kept() {
        let a = Matroid::uniform(GroundSet::new(ids(&[1, 2])).unwrap(), 1);
        let b = Matroid::uniform(GroundSet::new(ids(&[3, 4])).unwrap(), 1);
        let dec =
            ConstraintDecomposition::new(BTreeMap::from([(VertexId(0), a), (VertexId(1), b)]))
                .unwrap();
        let x = RationalVector::from_iter(ids(&[1, 2, 3, 4]).into_iter().map(|e| (e, ratio(1, 2))));
        let r =
            remove_edges_from_degree_constraint(&dec, &EdgeSet::from([EdgeId(3)]), &x, 16).unwrap();
        assert_eq!(r.affected, vec![VertexId(1)]);
        assert_eq!(
            r.decomposition.part(VertexId(0)).unwrap().kind_name(),
            "uniform"
        );
        assert!(!r.decomposition.is_contained(EdgeId(3)).unwrap());
        // x(3) = 1/2 leaves a full unit of slack, which also frees the other edge
        assert!(!r.decomposition.is_contained(EdgeId(4)).unwrap());
        assert!(r.decomposition.is_contained(EdgeId(1)).unwrap());
    }

    #[test]
    fn rejects_foreign_edges() {
        let a = Matroid::uniform(GroundSet::new(ids(&[1, 2])).unwrap(), 1);
        let dec = ConstraintDecomposition::single(VertexId(0), a);
        let r = remove_edges_from_degree_constraint(
            &dec,
            &EdgeSet::from([EdgeId(9)]),
            &RationalVector::default(),
            16,
        );
        assert!(matches!(r, Err(Error::UnknownEdge(_))));
    }
}
