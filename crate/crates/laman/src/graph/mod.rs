//! Finite undirected multigraphs with stable edge identifiers.
//!
//! Edges are named by [`EdgeId`] rather than by their endpoint pair, so
//! parallel edges stay distinct and the identity of an edge survives
//! contraction and deletion. Endpoints are stored as an unordered set of
//! size one (a self-loop) or two.

mod bigraph;
pub(crate) mod uf;

pub use bigraph::Bigraph;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use uf::UnionFind;

/// Identifier of a vertex. Opaque apart from its total order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

/// Identifier of an edge. Stable under contraction and deletion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// The endpoint set of an edge: two distinct vertices, or one for a self-loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ends {
    a: VertexId,
    b: VertexId,
}

impl Ends {
    /// Endpoint set `{a, b}`; `a == b` makes a self-loop.
    pub fn new(a: VertexId, b: VertexId) -> Self {
        if a <= b {
            Ends { a, b }
        } else {
            Ends { a: b, b: a }
        }
    }

    pub fn loop_at(v: VertexId) -> Self {
        Ends { a: v, b: v }
    }

    pub fn is_loop(&self) -> bool {
        self.a == self.b
    }

    /// The two endpoints in ascending order (equal for a self-loop).
    pub fn pair(&self) -> (VertexId, VertexId) {
        (self.a, self.b)
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.a == v || self.b == v
    }

    /// The other endpoint, given one of them.
    pub fn other(&self, v: VertexId) -> VertexId {
        if self.a == v {
            self.b
        } else {
            self.a
        }
    }

    fn map(&self, mut f: impl FnMut(VertexId) -> VertexId) -> Ends {
        Ends::new(f(self.a), f(self.b))
    }
}

/// A finite undirected multigraph: a vertex set plus a map from edge
/// identifiers to endpoint sets. Self-loops and parallel edges are allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiGraph {
    vertices: BTreeSet<VertexId>,
    edges: BTreeMap<EdgeId, Ends>,
}

impl Default for MultiGraph {
    fn default() -> Self {
        Self::new()
    }
}

impl MultiGraph {
    pub fn new() -> Self {
        MultiGraph {
            vertices: BTreeSet::new(),
            edges: BTreeMap::new(),
        }
    }

    /// Builds a simple graph on vertices `0..`, one edge per listed pair.
    /// Edge `k` of the slice gets identifier `EdgeId(k)`.
    pub fn from_edges(pairs: &[(u32, u32)]) -> Self {
        let mut g = MultiGraph::new();
        for &(u, v) in pairs {
            g.add_vertex(VertexId(u));
            g.add_vertex(VertexId(v));
        }
        for (k, &(u, v)) in pairs.iter().enumerate() {
            g.insert_edge(EdgeId(k as u32), Ends::new(VertexId(u), VertexId(v)));
        }
        g
    }

    pub fn add_vertex(&mut self, v: VertexId) {
        self.vertices.insert(v);
    }

    /// Inserts an edge with an explicit identifier. Endpoints must already
    /// be vertices. Replacing an existing identifier is a caller bug.
    pub fn insert_edge(&mut self, id: EdgeId, ends: Ends) {
        assert!(
            self.vertices.contains(&ends.a) && self.vertices.contains(&ends.b),
            "edge endpoints must be vertices of the graph"
        );
        let prev = self.edges.insert(id, ends);
        assert!(prev.is_none(), "duplicate edge identifier {id}");
    }

    /// Adds an edge with a fresh identifier, creating missing endpoints.
    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> EdgeId {
        self.add_vertex(u);
        self.add_vertex(v);
        let id = EdgeId(self.edges.keys().next_back().map_or(0, |e| e.0 + 1));
        self.edges.insert(id, Ends::new(u, v));
        id
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.iter().copied()
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, Ends)> + '_ {
        self.edges.iter().map(|(&id, &e)| (id, e))
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.keys().copied()
    }

    pub fn ends(&self, e: EdgeId) -> Result<Ends> {
        self.edges.get(&e).copied().ok_or(Error::UnknownEdge(e))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Number of edge endpoints at `v`; a self-loop contributes two.
    pub fn degree(&self, v: VertexId) -> usize {
        self.edges
            .values()
            .map(|e| match (e.a == v, e.b == v) {
                (true, true) => 2,
                (true, false) | (false, true) => 1,
                (false, false) => 0,
            })
            .sum()
    }

    pub fn neighbors(&self, v: VertexId) -> BTreeSet<VertexId> {
        self.edges
            .values()
            .filter(|e| e.contains(v) && !e.is_loop())
            .map(|e| e.other(v))
            .collect()
    }

    /// Edges joining `u` and `v` (in either order).
    pub fn edges_between(&self, u: VertexId, v: VertexId) -> Vec<EdgeId> {
        let want = Ends::new(u, v);
        self.edges
            .iter()
            .filter(|(_, &e)| e == want)
            .map(|(&id, _)| id)
            .collect()
    }

    pub fn has_self_loop(&self) -> bool {
        self.edges.values().any(|e| e.is_loop())
    }

    /// True when no edge is a loop and no two edges share an endpoint pair.
    pub fn is_simple(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.edges
            .values()
            .all(|e| !e.is_loop() && seen.insert(*e))
    }

    fn vertex_index(&self) -> BTreeMap<VertexId, usize> {
        self.vertices
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i))
            .collect()
    }

    fn component_union(&self, skip: Option<EdgeId>) -> (BTreeMap<VertexId, usize>, UnionFind) {
        let index = self.vertex_index();
        let mut uf = UnionFind::new(index.len());
        for (&id, e) in &self.edges {
            if Some(id) == skip {
                continue;
            }
            uf.union(index[&e.a], index[&e.b]);
        }
        (index, uf)
    }

    /// Partition of the vertex set into connected components.
    pub fn components(&self) -> Vec<BTreeSet<VertexId>> {
        let (index, mut uf) = self.component_union(None);
        let mut blocks: BTreeMap<usize, BTreeSet<VertexId>> = BTreeMap::new();
        for (&v, &i) in &index {
            blocks.entry(uf.find(i)).or_default().insert(v);
        }
        blocks.into_values().collect()
    }

    pub fn component_count(&self) -> usize {
        let (index, mut uf) = self.component_union(None);
        (0..index.len()).filter(|&i| uf.find(i) == i).count()
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() <= 1
    }

    /// `|V|` minus the number of connected components.
    pub fn dimension(&self) -> usize {
        self.vertex_count() - self.component_count()
    }

    /// True when removing `e` (keeping all vertices) splits its component.
    /// Parallel copies and self-loops are never bridges.
    pub fn is_bridge(&self, e: EdgeId) -> Result<bool> {
        let ends = self.ends(e)?;
        if ends.is_loop() {
            return Ok(false);
        }
        let before = self.component_count();
        let (index, mut uf) = self.component_union(Some(e));
        let after = (0..index.len()).filter(|&i| uf.find(i) == i).count();
        Ok(after > before)
    }

    fn check_subset(&self, s: &BTreeSet<EdgeId>) -> Result<()> {
        for &e in s {
            if !self.edges.contains_key(&e) {
                return Err(Error::UnknownEdge(e));
            }
        }
        Ok(())
    }

    /// The quotient by `s`: vertices are the classes of "connected inside the
    /// subgraph on `s`" (untouched vertices stay as singleton classes, named
    /// by their class representative), the edges in `s` disappear, and every
    /// surviving edge keeps its identifier and joins the classes of its old
    /// endpoints, becoming a self-loop when those classes coincide.
    pub fn contract(&self, s: &BTreeSet<EdgeId>) -> Result<MultiGraph> {
        self.check_subset(s)?;
        let index = self.vertex_index();
        let verts: Vec<VertexId> = self.vertices.iter().copied().collect();
        let mut uf = UnionFind::new(verts.len());
        for &e in s {
            let ends = self.edges[&e];
            uf.union(index[&ends.a], index[&ends.b]);
        }
        // Each class is named by its least member.
        let mut class_name: BTreeMap<usize, VertexId> = BTreeMap::new();
        for (i, &v) in verts.iter().enumerate() {
            let root = uf.find(i);
            let name = class_name.entry(root).or_insert(v);
            if v < *name {
                *name = v;
            }
        }
        let mut out = MultiGraph::new();
        for i in 0..verts.len() {
            let root = uf.find(i);
            out.add_vertex(class_name[&root]);
        }
        for (&id, e) in &self.edges {
            if s.contains(&id) {
                continue;
            }
            let ea = class_name[&uf.find(index[&e.a])];
            let eb = class_name[&uf.find(index[&e.b])];
            out.insert_edge(id, Ends::new(ea, eb));
        }
        Ok(out)
    }

    /// Removes the edges in `s` and drops every vertex left without an
    /// incident edge.
    pub fn delete(&self, s: &BTreeSet<EdgeId>) -> Result<MultiGraph> {
        self.check_subset(s)?;
        let mut out = MultiGraph::new();
        for (&id, e) in &self.edges {
            if s.contains(&id) {
                continue;
            }
            out.add_vertex(e.a);
            out.add_vertex(e.b);
            out.insert_edge(id, *e);
        }
        Ok(out)
    }

    /// Relabels vertices through `f`, which must be injective on the vertex
    /// set. Edge identifiers are unchanged.
    pub fn relabel(&self, mut f: impl FnMut(VertexId) -> VertexId) -> MultiGraph {
        let mut out = MultiGraph::new();
        for &v in &self.vertices {
            out.add_vertex(f(v));
        }
        assert_eq!(out.vertex_count(), self.vertex_count(), "relabeling must be injective");
        for (&id, e) in &self.edges {
            out.insert_edge(id, e.map(&mut f));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eid(k: u32) -> EdgeId {
        EdgeId(k)
    }

    fn triangle() -> MultiGraph {
        MultiGraph::from_edges(&[(1, 2), (2, 3), (1, 3)])
    }

    /// Six vertices a..f as 0..5; edges a-b, b-c, e-f, d-a, and two
    /// parallel d-c copies.
    fn six_vertex_example() -> MultiGraph {
        // a=0 b=1 c=2 d=3 e=4 f=5
        MultiGraph::from_edges(&[(0, 1), (1, 2), (4, 5), (3, 0), (3, 2), (3, 2)])
    }

    #[test]
    fn components_of_empty_graph() {
        assert!(MultiGraph::new().components().is_empty());
    }

    #[test]
    fn components_of_triangle() {
        let blocks = triangle().components();
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].len(), 3);
    }

    #[test]
    fn components_of_two_disjoint_edges() {
        let g = MultiGraph::from_edges(&[(1, 2), (3, 4)]);
        let blocks = g.components();
        assert_eq!(blocks.len(), 2);
        assert!(blocks.iter().all(|b| b.len() == 2));
    }

    #[test]
    fn self_loop_does_not_merge_blocks() {
        let mut g = MultiGraph::from_edges(&[(1, 2)]);
        g.add_vertex(VertexId(9));
        g.insert_edge(eid(7), Ends::loop_at(VertexId(9)));
        assert_eq!(g.components().len(), 2);
    }

    #[test]
    fn dimension_examples() {
        assert_eq!(MultiGraph::from_edges(&[(0, 1)]).dimension(), 1);
        assert_eq!(MultiGraph::from_edges(&[(0, 1), (2, 3)]).dimension(), 2);
        assert_eq!(triangle().dimension(), 2);
    }

    #[test]
    fn contract_six_vertex_example() {
        // Contract {d-a, first d-c copy}: a, c, d merge into one class; the
        // surviving d-c copy becomes a self-loop, a-b and b-c become a
        // parallel pair, e-f is untouched.
        let g = six_vertex_example();
        let s: BTreeSet<_> = [eid(3), eid(4)].into();
        let q = g.contract(&s).unwrap();
        assert_eq!(q.vertex_count(), 4);
        assert_eq!(q.edge_count(), 4);
        let loops: Vec<_> = q.edges().filter(|(_, e)| e.is_loop()).collect();
        assert_eq!(loops.len(), 1);
        assert_eq!(loops[0].0, eid(5));
        // a-b and b-c now join the same two classes.
        assert_eq!(q.ends(eid(0)).unwrap(), q.ends(eid(1)).unwrap());
        assert_eq!(
            q.ends(eid(2)).unwrap(),
            Ends::new(VertexId(4), VertexId(5))
        );
    }

    #[test]
    fn contract_nothing_is_identity() {
        let g = six_vertex_example();
        assert_eq!(g.contract(&BTreeSet::new()).unwrap(), g);
    }

    #[test]
    fn contract_whole_triangle() {
        let q = triangle().contract(&[eid(0), eid(1), eid(2)].into()).unwrap();
        assert_eq!(q.vertex_count(), 1);
        assert_eq!(q.edge_count(), 0);
    }

    #[test]
    fn contract_unknown_edge_is_an_error() {
        let err = triangle().contract(&[eid(17)].into()).unwrap_err();
        assert_eq!(err, Error::UnknownEdge(eid(17)));
        let err = triangle().delete(&[eid(17)].into()).unwrap_err();
        assert_eq!(err, Error::UnknownEdge(eid(17)));
        let err = triangle().is_bridge(eid(17)).unwrap_err();
        assert_eq!(err, Error::UnknownEdge(eid(17)));
    }

    #[test]
    fn delete_six_vertex_example() {
        let g = six_vertex_example();
        let s: BTreeSet<_> = [eid(3), eid(4)].into();
        let d = g.delete(&s).unwrap();
        assert_eq!(d.vertex_count(), 6);
        assert_eq!(d.edge_count(), 4);
        assert_eq!(d.ends(eid(5)).unwrap(), Ends::new(VertexId(2), VertexId(3)));
    }

    #[test]
    fn delete_drops_isolated_vertices() {
        let g = MultiGraph::from_edges(&[(0, 1)]);
        let d = g.delete(&[eid(0)].into()).unwrap();
        assert_eq!(d.vertex_count(), 0);
        assert_eq!(d.edge_count(), 0);
    }

    #[test]
    fn bridge_examples() {
        let path = MultiGraph::from_edges(&[(1, 2), (2, 3)]);
        assert!(path.is_bridge(eid(0)).unwrap());
        for e in triangle().edge_ids() {
            assert!(!triangle().is_bridge(e).unwrap());
        }
        let parallel = MultiGraph::from_edges(&[(1, 2), (1, 2)]);
        assert!(!parallel.is_bridge(eid(0)).unwrap());
        assert!(!parallel.is_bridge(eid(1)).unwrap());
    }

    #[test]
    fn self_loop_detection() {
        assert!(!triangle().has_self_loop());
        // Contracting one triangle edge leaves a parallel pair, not a loop.
        let q = triangle().contract(&[eid(0)].into()).unwrap();
        assert!(!q.has_self_loop());
        // Contracting one copy of a parallel pair makes the other a loop.
        let parallel = MultiGraph::from_edges(&[(1, 2), (1, 2)]);
        let q = parallel.contract(&[eid(0)].into()).unwrap();
        assert!(q.has_self_loop());
        let mut lonely = MultiGraph::new();
        lonely.add_vertex(VertexId(0));
        lonely.insert_edge(eid(0), Ends::loop_at(VertexId(0)));
        assert!(lonely.has_self_loop());
    }

    #[test]
    fn degrees_and_neighbors() {
        let g = six_vertex_example();
        assert_eq!(g.degree(VertexId(3)), 3);
        assert_eq!(g.neighbors(VertexId(3)), [VertexId(0), VertexId(2)].into());
        let mut h = MultiGraph::new();
        h.add_vertex(VertexId(0));
        h.insert_edge(eid(0), Ends::loop_at(VertexId(0)));
        assert_eq!(h.degree(VertexId(0)), 2);
    }
}
