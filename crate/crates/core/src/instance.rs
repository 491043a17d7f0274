use crate::error::{Error, Result};
use crate::matroid::{GroundSet, Matroid};
use crate::rational::{self, Rational};
use crate::{EdgeId, VertexId};
use num_traits::Zero;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: EdgeId,
    pub u: VertexId,
    pub v: VertexId,
    pub cost: Rational,
}

/// An input graph with nonnegative rational costs and one matroid `M_v` over
/// `δ(v)` per vertex.
#[derive(Debug, Clone)]
pub struct Instance {
    vertices: Vec<VertexId>,
    edges: Vec<Edge>,
    constraints: BTreeMap<VertexId, Matroid>,
}

impl Instance {
    /// Validates and builds an instance. Vertices without an entry in
    /// `constraints` get the free matroid.
    pub fn new(
        vertices: Vec<VertexId>,
        mut edges: Vec<Edge>,
        mut constraints: BTreeMap<VertexId, Matroid>,
    ) -> Result<Self> {
        let mut vs = vertices;
        vs.sort_unstable();
        if let Some(w) = vs.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::parse(
                "vertices",
                format!("duplicate vertex {}", w[0]),
            ));
        }
        let vset: BTreeSet<VertexId> = vs.iter().copied().collect();
        edges.sort_by_key(|e| e.id);
        if let Some(w) = edges.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(Error::parse(
                "edges",
                format!("duplicate edge id {}", w[0].id),
            ));
        }
        for e in &edges {
            let ctx = format!("edge {}", e.id);
            if !vset.contains(&e.u) || !vset.contains(&e.v) {
                return Err(Error::parse(ctx, "endpoint is not a listed vertex"));
            }
            if e.u == e.v {
                return Err(Error::parse(ctx, "self-loops are not allowed"));
            }
            if e.cost < Rational::zero() {
                return Err(Error::parse(ctx, "cost is negative"));
            }
        }
        for v in constraints.keys() {
            if !vset.contains(v) {
                return Err(Error::parse(
                    format!("constraints.{v}"),
                    "constraint for an unknown vertex",
                ));
            }
        }
        let mut inst = Instance {
            vertices: vs,
            edges,
            constraints: BTreeMap::new(),
        };
        for &v in &inst.vertices {
            let delta = GroundSet::new(inst.delta(v))?;
            let m = match constraints.remove(&v) {
                Some(m) => {
                    if m.ground() != &delta {
                        return Err(Error::parse(
                            format!("constraints.{v}"),
                            format!(
                                "ground {} differs from incident edges {}",
                                m.ground(),
                                delta
                            ),
                        ));
                    }
                    m
                }
                None => Matroid::free(delta),
            };
            inst.constraints.insert(v, m);
        }
        Ok(inst)
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges
            .binary_search_by_key(&id, |e| e.id)
            .ok()
            .map(|i| &self.edges[i])
    }

    pub fn constraint(&self, v: VertexId) -> &Matroid {
        &self.constraints[&v]
    }

    pub fn constraints(&self) -> &BTreeMap<VertexId, Matroid> {
        &self.constraints
    }

    /// Edge ids incident to `v`, ascending.
    pub fn delta(&self, v: VertexId) -> Vec<EdgeId> {
        self.edges
            .iter()
            .filter(|e| e.u == v || e.v == v)
            .map(|e| e.id)
            .collect()
    }

    pub fn cost_of<'a>(&self, edges: impl IntoIterator<Item = &'a EdgeId>) -> Rational {
        edges
            .into_iter()
            .map(|&id| self.edge(id).map(|e| e.cost.clone()).unwrap_or_default())
            .fold(Rational::zero(), |a, b| a + b)
    }

    pub fn costs(&self) -> BTreeMap<EdgeId, Rational> {
        self.edges.iter().map(|e| (e.id, e.cost.clone())).collect()
    }

    pub fn is_connected(&self) -> bool {
        let Some(&start) = self.vertices.first() else {
            return true;
        };
        let mut adj: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
        for e in &self.edges {
            adj.entry(e.u).or_default().push(e.v);
            adj.entry(e.v).or_default().push(e.u);
        }
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &w in adj.get(&v).into_iter().flatten() {
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen.len() == self.vertices.len()
    }

    /// Convenience constructor for tests and fixtures: integer costs, all
    /// constraints free unless given.
    pub fn from_edge_list(
        n: u32,
        edges: &[(u32, u32, i64)],
        constraints: BTreeMap<VertexId, Matroid>,
    ) -> Result<Self> {
        let vertices = (0..n).map(VertexId).collect();
        let edges = edges
            .iter()
            .enumerate()
            .map(|(i, &(u, v, c))| Edge {
                id: EdgeId(i as u32),
                u: VertexId(u),
                v: VertexId(v),
                cost: rational::int(c),
            })
            .collect();
        Instance::new(vertices, edges, constraints)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_constraints_default_to_free() {
        let inst = Instance::from_edge_list(2, &[(0, 1, 3)], BTreeMap::new()).unwrap();
        assert_eq!(inst.constraint(VertexId(0)).kind_name(), "free");
        assert_eq!(inst.delta(VertexId(1)), vec![EdgeId(0)]);
        assert!(inst.is_connected());
    }

    #[test]
    fn constraint_ground_must_match_delta() {
        let g = GroundSet::new([EdgeId(0)]).unwrap();
        let c = BTreeMap::from([(VertexId(0), Matroid::uniform(g, 1))]);
        let err = Instance::from_edge_list(3, &[(0, 1, 1), (0, 2, 1)], c).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(Instance::from_edge_list(2, &[(0, 0, 1)], BTreeMap::new()).is_err());
        assert!(Instance::from_edge_list(2, &[(0, 5, 1)], BTreeMap::new()).is_err());
        assert!(Instance::from_edge_list(2, &[(0, 1, -1)], BTreeMap::new()).is_err());
    }

    #[test]
    fn connectivity() {
        let inst = Instance::from_edge_list(3, &[(0, 1, 1)], BTreeMap::new()).unwrap();
        assert!(!inst.is_connected());
    }
}
