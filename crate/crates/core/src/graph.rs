//! The contracted multigraph `H = (W, F)`.

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::{EdgeId, NodeId, VertexId};
use std::collections::{BTreeMap, BTreeSet};

pub type NodeSet = BTreeSet<NodeId>;
pub type EdgeSet = BTreeSet<EdgeId>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphEdge {
    /// Current endpoint nodes, never equal.
    pub ends: [NodeId; 2],
    /// Endpoints in the input graph.
    pub original: [VertexId; 2],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contraction {
    pub node: NodeId,
    /// Edges parallel to the contracted one; they became self-loops and were
    /// removed.
    pub removed_loops: Vec<EdgeId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multigraph {
    members: BTreeMap<NodeId, BTreeSet<VertexId>>,
    edges: BTreeMap<EdgeId, GraphEdge>,
    vertex_map: BTreeMap<VertexId, NodeId>,
    next_node: u32,
}

impl Multigraph {
    /// One node per vertex, with node id equal to the vertex id.
    pub fn from_instance(inst: &Instance) -> Self {
        let edges: Vec<(EdgeId, VertexId, VertexId)> =
            inst.edges().iter().map(|e| (e.id, e.u, e.v)).collect();
        Self::new(inst.vertices(), &edges)
    }

    pub fn new(vertices: &[VertexId], edges: &[(EdgeId, VertexId, VertexId)]) -> Self {
        let members = vertices
            .iter()
            .map(|&v| (NodeId(v.0), BTreeSet::from([v])))
            .collect();
        let vertex_map = vertices.iter().map(|&v| (v, NodeId(v.0))).collect();
        let edges = edges
            .iter()
            .filter(|(_, u, v)| u != v)
            .map(|&(id, u, v)| {
                (
                    id,
                    GraphEdge {
                        ends: [NodeId(u.0), NodeId(v.0)],
                        original: [u, v],
                    },
                )
            })
            .collect();
        let next_node = vertices.iter().map(|v| v.0 + 1).max().unwrap_or(0);
        Multigraph {
            members,
            edges,
            vertex_map,
            next_node,
        }
    }

    pub fn node_count(&self) -> usize {
        self.members.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.members.keys().copied()
    }

    pub fn node_set(&self) -> NodeSet {
        self.members.keys().copied().collect()
    }

    pub fn contains_node(&self, w: NodeId) -> bool {
        self.members.contains_key(&w)
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, &GraphEdge)> + '_ {
        self.edges.iter().map(|(&id, e)| (id, e))
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.keys().copied()
    }

    pub fn edge(&self, f: EdgeId) -> Result<&GraphEdge> {
        self.edges.get(&f).ok_or(Error::UnknownEdge(f))
    }

    pub fn members(&self, w: NodeId) -> Result<&BTreeSet<VertexId>> {
        self.members.get(&w).ok_or(Error::UnknownNode(w))
    }

    pub fn node_of(&self, v: VertexId) -> Option<NodeId> {
        self.vertex_map.get(&v).copied()
    }

    pub fn vertex_map(&self) -> &BTreeMap<VertexId, NodeId> {
        &self.vertex_map
    }

    /// The original endpoint of `f` that lies inside node `w`.
    pub fn vertex_at(&self, f: EdgeId, w: NodeId) -> Result<VertexId> {
        let e = self.edge(f)?;
        if e.ends[0] == w {
            Ok(e.original[0])
        } else if e.ends[1] == w {
            Ok(e.original[1])
        } else {
            Err(Error::UnknownNode(w))
        }
    }

    pub fn other_end(&self, f: EdgeId, w: NodeId) -> Result<NodeId> {
        let e = self.edge(f)?;
        if e.ends[0] == w {
            Ok(e.ends[1])
        } else if e.ends[1] == w {
            Ok(e.ends[0])
        } else {
            Err(Error::UnknownNode(w))
        }
    }

    fn check_node(&self, w: NodeId) -> Result<()> {
        if self.members.contains_key(&w) {
            Ok(())
        } else {
            Err(Error::UnknownNode(w))
        }
    }

    /// `δ(w)`: edges incident to `w`.
    pub fn delta(&self, w: NodeId) -> Result<EdgeSet> {
        self.check_node(w)?;
        Ok(self
            .edges
            .iter()
            .filter(|(_, e)| e.ends.contains(&w))
            .map(|(&id, _)| id)
            .collect())
    }

    /// `F[S]`: edges with both endpoints in `s`.
    pub fn edges_within(&self, s: &NodeSet) -> Result<EdgeSet> {
        for &w in s {
            self.check_node(w)?;
        }
        Ok(self
            .edges
            .iter()
            .filter(|(_, e)| s.contains(&e.ends[0]) && s.contains(&e.ends[1]))
            .map(|(&id, _)| id)
            .collect())
    }

    pub fn delete_edge(&mut self, f: EdgeId) -> Result<()> {
        self.edges
            .remove(&f)
            .map(|_| ())
            .ok_or(Error::UnknownEdge(f))
    }

    /// Merges the endpoints of `f` into a fresh node and drops the self-loops
    /// this creates (including `f`).
    pub fn contract_edge(&mut self, f: EdgeId) -> Result<Contraction> {
        let [a, b] = self.edge(f)?.ends;
        let node = NodeId(self.next_node);
        self.next_node += 1;
        let mut merged = self.members.remove(&a).expect("endpoint exists");
        merged.extend(self.members.remove(&b).expect("endpoint exists"));
        for &v in &merged {
            self.vertex_map.insert(v, node);
        }
        self.members.insert(node, merged);
        self.edges.remove(&f);
        let mut removed_loops = Vec::new();
        self.edges.retain(|&id, e| {
            for end in e.ends.iter_mut() {
                if *end == a || *end == b {
                    *end = node;
                }
            }
            if e.ends[0] == e.ends[1] {
                removed_loops.push(id);
                false
            } else {
                true
            }
        });
        Ok(Contraction {
            node,
            removed_loops,
        })
    }

    /// `H[S]`.
    pub fn induced_subgraph(&self, s: &NodeSet) -> Result<Multigraph> {
        let within = self.edges_within(s)?;
        Ok(Multigraph {
            members: self
                .members
                .iter()
                .filter(|(w, _)| s.contains(w))
                .map(|(&w, m)| (w, m.clone()))
                .collect(),
            edges: self
                .edges
                .iter()
                .filter(|(id, _)| within.contains(id))
                .map(|(&id, &e)| (id, e))
                .collect(),
            vertex_map: self
                .vertex_map
                .iter()
                .filter(|(_, w)| s.contains(w))
                .map(|(&v, &w)| (v, w))
                .collect(),
            next_node: self.next_node,
        })
    }

    pub fn is_connected(&self) -> bool {
        let Some(start) = self.nodes().next() else {
            return true;
        };
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(w) = stack.pop() {
            for e in self.edges.values() {
                if e.ends.contains(&w) {
                    let o = if e.ends[0] == w { e.ends[1] } else { e.ends[0] };
                    if seen.insert(o) {
                        stack.push(o);
                    }
                }
            }
        }
        seen.len() == self.node_count()
    }

    /// The node set `{ node_of(v) : v ∈ vertices }`.
    pub fn project(&self, vertices: &BTreeSet<VertexId>) -> NodeSet {
        vertices
            .iter()
            .filter_map(|v| self.vertex_map.get(v).copied())
            .collect()
    }

    /// All original vertices contained in the nodes of `s`.
    pub fn preimage(&self, s: &NodeSet) -> BTreeSet<VertexId> {
        s.iter()
            .filter_map(|w| self.members.get(w))
            .flatten()
            .copied()
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: u32, edges: &[(u32, u32)]) -> Multigraph {
        let vs: Vec<VertexId> = (0..n).map(VertexId).collect();
        let es: Vec<_> = edges
            .iter()
            .enumerate()
            .map(|(i, &(u, v))| (EdgeId(i as u32), VertexId(u), VertexId(v)))
            .collect();
        Multigraph::new(&vs, &es)
    }

    fn ns(ids: &[u32]) -> NodeSet {
        ids.iter().map(|&i| NodeId(i)).collect()
    }

    fn es(ids: &[u32]) -> EdgeSet {
        ids.iter().map(|&i| EdgeId(i)).collect()
    }

    fn check_invariants(g: &Multigraph, n_vertices: usize) {
        let total: usize = g.members.values().map(|m| m.len()).sum();
        assert_eq!(total, n_vertices);
        assert!(g.members.values().all(|m| !m.is_empty()));
        assert!(g.edges.values().all(|e| e.ends[0] != e.ends[1]));
        let degree_sum: usize = g.nodes().map(|w| g.delta(w).unwrap().len()).sum();
        assert_eq!(degree_sum, 2 * g.edge_count());
    }

    #[test]
    fn delta_examples() {
        let tri = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(tri.delta(NodeId(0)).unwrap(), es(&[0, 2]));
        let par = graph(2, &[(0, 1), (0, 1)]);
        assert_eq!(par.delta(NodeId(0)).unwrap(), es(&[0, 1]));
        let iso = graph(3, &[(0, 1)]);
        assert!(iso.delta(NodeId(2)).unwrap().is_empty());
        assert!(matches!(iso.delta(NodeId(9)), Err(Error::UnknownNode(_))));
    }

    #[test]
    fn edges_within_examples() {
        let tri = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(tri.edges_within(&ns(&[0, 1])).unwrap(), es(&[0]));
        assert_eq!(tri.edges_within(&ns(&[0, 1, 2])).unwrap(), es(&[0, 1, 2]));
        assert!(tri.edges_within(&ns(&[])).unwrap().is_empty());
        assert!(tri.edges_within(&ns(&[7])).is_err());
    }

    #[test]
    fn contract_path() {
        let mut g = graph(3, &[(0, 1), (1, 2)]);
        let c = g.contract_edge(EdgeId(0)).unwrap();
        assert_eq!(c.node, NodeId(3));
        assert!(c.removed_loops.is_empty());
        assert_eq!(g.node_set(), ns(&[2, 3]));
        assert_eq!(g.edge(EdgeId(1)).unwrap().ends, [NodeId(3), NodeId(2)]);
        assert_eq!(g.node_of(VertexId(0)), Some(NodeId(3)));
        assert_eq!(g.node_of(VertexId(1)), Some(NodeId(3)));
        check_invariants(&g, 3);
    }

    #[test]
    fn contract_triangle_makes_parallel_edges() {
        let mut g = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        let c = g.contract_edge(EdgeId(0)).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.delta(c.node).unwrap(), es(&[1, 2]));
        assert_eq!(g.delta(NodeId(2)).unwrap(), es(&[1, 2]));
        check_invariants(&g, 3);
    }

    #[test]
    fn contract_removes_parallel_loop() {
        let mut g = graph(2, &[(0, 1), (0, 1)]);
        let before = g.edge_count();
        let c = g.contract_edge(EdgeId(0)).unwrap();
        assert_eq!(c.removed_loops, vec![EdgeId(1)]);
        assert_eq!(g.edge_count(), before - 1 - c.removed_loops.len());
        assert_eq!(g.node_count(), 1);
        check_invariants(&g, 2);
        assert!(g.contract_edge(EdgeId(0)).is_err());
    }

    #[test]
    fn delete_examples() {
        let mut g = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        g.delete_edge(EdgeId(0)).unwrap();
        assert_eq!(g.delta(NodeId(0)).unwrap(), es(&[2]));
        assert_eq!(g.node_count(), 3);
        let mut single = graph(2, &[(0, 1)]);
        single.delete_edge(EdgeId(0)).unwrap();
        assert_eq!(single.node_count(), 2);
        assert!(!single.is_connected());
        assert!(single.delete_edge(EdgeId(0)).is_err());
    }

    #[test]
    fn induced_subgraph_examples() {
        let tri = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        let sub = tri.induced_subgraph(&ns(&[0, 1])).unwrap();
        assert_eq!(sub.edge_ids().collect::<EdgeSet>(), es(&[0]));
        assert_eq!(tri.induced_subgraph(&tri.node_set()).unwrap(), tri);
        let cyc = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let path = cyc.induced_subgraph(&ns(&[0, 1, 2])).unwrap();
        assert_eq!(path.edge_count(), 2);
        assert!(path.is_connected());
    }

    #[test]
    fn repeated_contraction_keeps_partition() {
        let mut g = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (1, 3)]);
        for f in [0, 2, 3] {
            let before = g.edge_count();
            let c = g.contract_edge(EdgeId(f)).unwrap();
            assert_eq!(g.edge_count(), before - 1 - c.removed_loops.len());
            check_invariants(&g, 5);
        }
        assert_eq!(g.node_count(), 2);
        let preimage = g.preimage(&g.node_set());
        assert_eq!(preimage.len(), 5);
    }
}
