//! Half-edge multigraph model with exact rational edge lengths.
//!
//! Vertex and edge ids are opaque strings; the canonical order is
//! lexicographic on ids. Loops and multiple edges are first-class. The
//! orientation of every edge is fixed at construction (src -> dst, the
//! side-0 half-edge is the source) and never mutated afterwards.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use itertools::Itertools;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::Error;

/// Symbolic length of an edge: a scalar multiple of one length variable.
/// Plain graphs use (own id, 1); total graphs of covers use the base edge
/// id, with multiplier 1/2 on dilated preimages.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymLength {
    pub var: String,
    pub mult: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphEdge {
    pub id: String,
    pub src: usize,
    pub dst: usize,
    pub length: BigRational,
    pub sym: SymLength,
}

impl GraphEdge {
    pub fn is_loop(&self) -> bool {
        self.src == self.dst
    }
}

/// A half-edge, identified by its edge index and side (0 = rooted at src,
/// 1 = rooted at dst). The fixed-point-free pairing swaps the sides.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfEdge {
    pub edge: usize,
    pub side: u8,
}

impl HalfEdge {
    pub fn pair(self) -> HalfEdge {
        HalfEdge { edge: self.edge, side: 1 - self.side }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricGraph {
    vertices: Vec<String>,
    edges: Vec<GraphEdge>,
}

/// Sorted set of edge ids, a subset of some ambient graph's edges.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct EdgeSet(pub BTreeSet<String>);

impl EdgeSet {
    pub fn new<I: IntoIterator<Item = S>, S: Into<String>>(ids: I) -> Self {
        EdgeSet(ids.into_iter().map(Into::into).collect())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.0.contains(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|s| s.as_str())
    }
}

impl fmt::Display for EdgeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.0.iter().join(","))
    }
}

/// Union-find over vertex indices.
pub(crate) struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    pub fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect() }
    }

    pub fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let r = self.find(self.parent[x]);
            self.parent[x] = r;
        }
        self.parent[x]
    }

    /// Returns true if the two were in different classes.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        // keep the smaller index as representative
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

impl MetricGraph {
    /// Builds a graph from vertex ids and `(edge id, src id, dst id, length)`
    /// tuples. Ids are sorted; each edge gets the default symbolic length
    /// (its own id with multiplier one).
    pub fn new(
        vertices: Vec<String>,
        edges: Vec<(String, String, String, BigRational)>,
    ) -> Result<Self, Error> {
        let edges = edges
            .into_iter()
            .map(|(id, s, d, l)| {
                let sym = SymLength { var: id.clone(), mult: BigRational::one() };
                (id, s, d, l, sym)
            })
            .collect();
        Self::with_sym_lengths(vertices, edges)
    }

    /// As [`MetricGraph::new`] but with explicit symbolic lengths.
    pub fn with_sym_lengths(
        mut vertices: Vec<String>,
        edges: Vec<(String, String, String, BigRational, SymLength)>,
    ) -> Result<Self, Error> {
        if vertices.is_empty() {
            return Err(Error::Parse("graph needs at least one vertex".into()));
        }
        vertices.sort();
        for (a, b) in vertices.iter().tuple_windows() {
            if a == b {
                return Err(Error::DuplicateId(a.clone()));
            }
        }
        let vidx: BTreeMap<&str, usize> =
            vertices.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        let mut built: Vec<GraphEdge> = Vec::with_capacity(edges.len());
        for (id, s, d, length, sym) in edges {
            let src = *vidx.get(s.as_str()).ok_or_else(|| Error::UnknownVertex(s.clone()))?;
            let dst = *vidx.get(d.as_str()).ok_or_else(|| Error::UnknownVertex(d.clone()))?;
            if length <= BigRational::zero() {
                return Err(Error::NonPositiveLength(id));
            }
            built.push(GraphEdge { id, src, dst, length, sym });
        }
        built.sort_by(|a, b| a.id.cmp(&b.id));
        for (a, b) in built.iter().tuple_windows() {
            if a.id == b.id {
                return Err(Error::DuplicateId(a.id.clone()));
            }
        }
        Ok(MetricGraph { vertices, edges: built })
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }

    pub fn edge(&self, idx: usize) -> &GraphEdge {
        &self.edges[idx]
    }

    pub fn vertex_name(&self, idx: usize) -> &str {
        &self.vertices[idx]
    }

    pub fn vertex_index(&self, id: &str) -> Result<usize, Error> {
        self.vertices
            .binary_search_by(|v| v.as_str().cmp(id))
            .map_err(|_| Error::UnknownVertex(id.to_string()))
    }

    pub fn edge_index(&self, id: &str) -> Result<usize, Error> {
        self.edges
            .binary_search_by(|e| e.id.as_str().cmp(id))
            .map_err(|_| Error::UnknownEdge(id.to_string()))
    }

    /// All half-edges in canonical order.
    pub fn half_edges(&self) -> impl Iterator<Item = HalfEdge> + '_ {
        (0..self.edges.len()).flat_map(|e| [HalfEdge { edge: e, side: 0 }, HalfEdge { edge: e, side: 1 }])
    }

    /// Root vertex of a half-edge.
    pub fn root(&self, h: HalfEdge) -> usize {
        let e = &self.edges[h.edge];
        if h.side == 0 {
            e.src
        } else {
            e.dst
        }
    }

    /// Half-edges rooted at a vertex (the tangent space). Loops contribute
    /// both sides.
    pub fn tangent(&self, v: usize) -> Vec<HalfEdge> {
        self.half_edges().filter(|&h| self.root(h) == v).collect()
    }

    fn dsu_over(&self, skip: &[bool]) -> Dsu {
        let mut dsu = Dsu::new(self.vertices.len());
        for (i, e) in self.edges.iter().enumerate() {
            if !skip[i] {
                dsu.union(e.src, e.dst);
            }
        }
        dsu
    }

    pub fn num_components(&self) -> usize {
        let skip = vec![false; self.edges.len()];
        let mut dsu = self.dsu_over(&skip);
        (0..self.vertices.len()).filter(|&v| dsu.find(v) == v).count()
    }

    pub fn is_connected(&self) -> bool {
        self.num_components() <= 1
    }

    /// First Betti number: #E - #V + #components.
    pub fn genus(&self) -> usize {
        self.edges.len() + self.num_components() - self.vertices.len()
    }

    /// Partition of vertices into connected components, ordered by smallest
    /// vertex id. Each entry lists vertex indices in ascending order.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let skip = vec![false; self.edges.len()];
        let mut dsu = self.dsu_over(&skip);
        let mut comps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..self.vertices.len() {
            comps.entry(dsu.find(v)).or_default().push(v);
        }
        comps.into_values().collect()
    }

    /// Edge sets whose removal leaves a connected subgraph on all vertices;
    /// for sets of size genus these are exactly the complements of spanning
    /// trees. Emitted in lexicographic order of edge ids.
    pub fn spanning_tree_complements(&self) -> Result<Vec<EdgeSet>, Error> {
        if !self.is_connected() {
            return Err(Error::NotConnected);
        }
        let g = self.genus();
        let n = self.edges.len();
        let mut out = Vec::new();
        for combo in (0..n).combinations(g) {
            let mut skip = vec![false; n];
            for &i in &combo {
                skip[i] = true;
            }
            let mut dsu = self.dsu_over(&skip);
            let root0 = dsu.find(0);
            if (0..self.vertices.len()).all(|v| dsu.find(v) == root0) {
                out.push(EdgeSet::new(combo.iter().map(|&i| self.edges[i].id.clone())));
            }
        }
        Ok(out)
    }

    fn resolve_set(&self, s: &EdgeSet) -> Result<Vec<usize>, Error> {
        s.iter().map(|id| self.edge_index(id)).collect()
    }

    /// Contracts every edge in `s`: each connected component of the subgraph
    /// spanned by `s` collapses to one vertex (named by its smallest member).
    /// Loops formed by edges of `s` are discarded; other edges keep their
    /// ids, lengths, and symbolic lengths. Also returns the vertex and edge
    /// maps (contracted edges map to None).
    #[allow(clippy::type_complexity)]
    pub fn contract_edges(
        &self,
        s: &EdgeSet,
    ) -> Result<(MetricGraph, BTreeMap<String, String>, BTreeMap<String, Option<String>>), Error>
    {
        let idxs = self.resolve_set(s)?;
        let mut in_set = vec![false; self.edges.len()];
        for &i in &idxs {
            in_set[i] = true;
        }
        let mut dsu = Dsu::new(self.vertices.len());
        for &i in &idxs {
            dsu.union(self.edges[i].src, self.edges[i].dst);
        }
        // representative = smallest vertex index in the class, hence the
        // lexicographically smallest id
        let mut new_name: BTreeMap<usize, String> = BTreeMap::new();
        for v in 0..self.vertices.len() {
            let r = dsu.find(v);
            new_name.entry(r).or_insert_with(|| self.vertices[r].clone());
        }
        let mut vertex_map = BTreeMap::new();
        for v in 0..self.vertices.len() {
            let r = dsu.find(v);
            vertex_map.insert(self.vertices[v].clone(), new_name[&r].clone());
        }
        let vertices: Vec<String> = new_name.values().cloned().collect();
        let mut edges = Vec::new();
        let mut edge_map = BTreeMap::new();
        for (i, e) in self.edges.iter().enumerate() {
            if in_set[i] {
                edge_map.insert(e.id.clone(), None);
                continue;
            }
            let src = vertex_map[&self.vertices[e.src]].clone();
            let dst = vertex_map[&self.vertices[e.dst]].clone();
            edges.push((e.id.clone(), src, dst, e.length.clone(), e.sym.clone()));
            edge_map.insert(e.id.clone(), Some(e.id.clone()));
        }
        let g = MetricGraph::with_sym_lengths(vertices, edges)?;
        Ok((g, vertex_map, edge_map))
    }

    /// Removes the edges in `s`, keeping all vertices.
    pub fn delete_edges(&self, s: &EdgeSet) -> Result<MetricGraph, Error> {
        let idxs = self.resolve_set(s)?;
        let mut in_set = vec![false; self.edges.len()];
        for &i in &idxs {
            in_set[i] = true;
        }
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|(i, _)| !in_set[*i])
            .map(|(_, e)| {
                (
                    e.id.clone(),
                    self.vertices[e.src].clone(),
                    self.vertices[e.dst].clone(),
                    e.length.clone(),
                    e.sym.clone(),
                )
            })
            .collect();
        MetricGraph::with_sym_lengths(self.vertices.clone(), edges)
    }

    /// The subgraph induced by a set of vertex indices plus a set of edge
    /// indices (used for component preimages). Edges must have both
    /// endpoints in the vertex set.
    pub fn subgraph(&self, verts: &BTreeSet<usize>, edge_idxs: &BTreeSet<usize>) -> MetricGraph {
        let vertices: Vec<String> = verts.iter().map(|&v| self.vertices[v].clone()).collect();
        let edges = edge_idxs
            .iter()
            .map(|&i| {
                let e = &self.edges[i];
                (
                    e.id.clone(),
                    self.vertices[e.src].clone(),
                    self.vertices[e.dst].clone(),
                    e.length.clone(),
                    e.sym.clone(),
                )
            })
            .collect();
        MetricGraph::with_sym_lengths(vertices, edges).expect("induced subgraph is well-formed")
    }

    /// True if deleting the edge increases the component count.
    pub fn is_bridge(&self, edge_idx: usize) -> bool {
        let e = &self.edges[edge_idx];
        if e.is_loop() {
            return false;
        }
        let mut skip = vec![false; self.edges.len()];
        skip[edge_idx] = true;
        let mut dsu = self.dsu_over(&skip);
        dsu.find(e.src) != dsu.find(e.dst)
    }

    pub fn edge_set_all(&self) -> EdgeSet {
        EdgeSet::new(self.edges.iter().map(|e| e.id.clone()))
    }
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;
    use num_bigint::BigInt;

    pub fn rat(n: i64) -> BigRational {
        BigRational::from(BigInt::from(n))
    }

    pub fn graph(vertices: &[&str], edges: &[(&str, &str, &str, i64)]) -> MetricGraph {
        MetricGraph::new(
            vertices.iter().map(|s| s.to_string()).collect(),
            edges
                .iter()
                .map(|(id, s, d, l)| (id.to_string(), s.to_string(), d.to_string(), rat(*l)))
                .collect(),
        )
        .unwrap()
    }

    /// Single vertex with one loop.
    pub fn circle() -> MetricGraph {
        graph(&["v"], &[("e", "v", "v", 1)])
    }

    /// Two vertices joined by three parallel edges.
    pub fn theta() -> MetricGraph {
        graph(&["u", "v"], &[("e1", "u", "v", 1), ("e2", "u", "v", 1), ("e3", "u", "v", 1)])
    }

    pub fn k4() -> MetricGraph {
        graph(
            &["a", "b", "c", "d"],
            &[
                ("e1", "a", "b", 1),
                ("e2", "a", "c", 1),
                ("e3", "a", "d", 1),
                ("e4", "b", "c", 1),
                ("e5", "b", "d", 1),
                ("e6", "c", "d", 1),
            ],
        )
    }

    /// The base graph of the running example: two undilated loops hanging
    /// off a central path through a two-edge circle (f1, f2).
    pub fn fig1_base() -> MetricGraph {
        graph(
            &["v1", "v2", "v3", "v4", "v5"],
            &[
                ("e1", "v1", "v1", 1),
                ("e2", "v1", "v2", 1),
                ("e3", "v3", "v4", 1),
                ("e4", "v4", "v5", 1),
                ("e5", "v5", "v5", 1),
                ("f1", "v2", "v3", 1),
                ("f2", "v2", "v3", 1),
            ],
        )
    }
}

#[cfg(test)]
mod tests {
    use super::testutil::*;
    use super::*;

    #[test]
    fn genus_circle_tree_fig1() {
        assert_eq!(circle().genus(), 1);
        let tree = graph(
            &["a", "b", "c", "d", "e"],
            &[("t1", "a", "b", 1), ("t2", "b", "c", 1), ("t3", "c", "d", 1), ("t4", "d", "e", 1)],
        );
        assert_eq!(tree.genus(), 0);
        assert_eq!(fig1_base().genus(), 3);
    }

    #[test]
    fn components_basic() {
        assert_eq!(circle().num_components(), 1);
        let two_loops = graph(&["a", "b"], &[("e1", "a", "a", 1), ("e2", "b", "b", 1)]);
        assert_eq!(two_loops.num_components(), 2);
        assert_eq!(two_loops.connected_components(), vec![vec![0], vec![1]]);
    }

    #[test]
    fn fig1_deletion_ranks() {
        // r({e1,e3,e4}) = 3 and r({e2,e3,e5}) = 3 component counts
        let g = fig1_base();
        let d = g.delete_edges(&EdgeSet::new(["e1", "e3", "e4"])).unwrap();
        assert_eq!(d.num_components(), 3);
        let d = g.delete_edges(&EdgeSet::new(["e2", "e3", "e5"])).unwrap();
        assert_eq!(d.num_components(), 3);
    }

    #[test]
    fn spanning_tree_complements_loop_and_theta() {
        assert_eq!(circle().spanning_tree_complements().unwrap(), vec![EdgeSet::new(["e"])]);
        let sets = theta().spanning_tree_complements().unwrap();
        assert_eq!(
            sets,
            vec![EdgeSet::new(["e1", "e2"]), EdgeSet::new(["e1", "e3"]), EdgeSet::new(["e2", "e3"])]
        );
    }

    #[test]
    fn spanning_tree_complements_match_brute_force() {
        // brute force over all genus-subsets checking connectivity directly
        for g in [theta(), k4(), fig1_base()] {
            let want: Vec<EdgeSet> = (0..g.num_edges())
                .combinations(g.genus())
                .filter_map(|combo| {
                    let set = EdgeSet::new(combo.iter().map(|&i| g.edge(i).id.clone()));
                    let rest = g.delete_edges(&set).unwrap();
                    (rest.num_components() == 1).then_some(set)
                })
                .collect();
            assert_eq!(g.spanning_tree_complements().unwrap(), want);
        }
    }

    #[test]
    fn k4_has_sixteen_spanning_trees() {
        assert_eq!(k4().spanning_tree_complements().unwrap().len(), 16);
    }

    #[test]
    fn spanning_tree_complements_require_connected() {
        let two_loops = graph(&["a", "b"], &[("e1", "a", "a", 1), ("e2", "b", "b", 1)]);
        assert!(matches!(two_loops.spanning_tree_complements(), Err(Error::NotConnected)));
    }

    #[test]
    fn contract_bridge_and_nonbridge() {
        let g = theta();
        let (c, vmap, emap) = g.contract_edges(&EdgeSet::new(["e1"])).unwrap();
        assert_eq!(c.num_vertices(), 1);
        assert_eq!(c.num_edges(), 2);
        assert_eq!(c.genus(), g.genus());
        assert_eq!(vmap["v"], "u");
        assert_eq!(emap["e1"], None);
        assert_eq!(emap["e2"], Some("e2".to_string()));

        let path = graph(&["a", "b", "c"], &[("e1", "a", "b", 1), ("e2", "b", "c", 1)]);
        let (c, _, _) = path.contract_edges(&EdgeSet::new(["e1"])).unwrap();
        assert_eq!(c.num_vertices(), 2);
        assert_eq!(c.genus(), 0);
    }

    #[test]
    fn contract_loop_in_disc_base() {
        // base of the discontinuity example: dilated u, edge e, loop f at v
        let g = graph(&["u", "v"], &[("e", "u", "v", 1), ("f", "v", "v", 1)]);
        let (c, _, _) = g.contract_edges(&EdgeSet::new(["f"])).unwrap();
        assert_eq!(c.num_vertices(), 2);
        assert_eq!(c.num_edges(), 1);
        assert_eq!(c.genus(), 0);
    }

    #[test]
    fn contract_unknown_edge_errors() {
        assert!(matches!(
            circle().contract_edges(&EdgeSet::new(["nope"])),
            Err(Error::UnknownEdge(_))
        ));
    }

    #[test]
    fn delete_loop_and_bridge() {
        let g = graph(&["a", "b"], &[("e1", "a", "b", 1), ("e2", "a", "a", 1)]);
        let d = g.delete_edges(&EdgeSet::new(["e2"])).unwrap();
        assert_eq!(d.genus(), g.genus() - 1);
        let d = g.delete_edges(&EdgeSet::new(["e1"])).unwrap();
        assert_eq!(d.num_components(), 2);
    }

    #[test]
    fn euler_count_preserved_by_nonloop_contraction() {
        let g = k4();
        let before = g.num_edges() as i64 - g.num_vertices() as i64 + g.num_components() as i64;
        let (c, _, _) = g.contract_edges(&EdgeSet::new(["e4"])).unwrap();
        let after = c.num_edges() as i64 - c.num_vertices() as i64 + c.num_components() as i64;
        assert_eq!(before, after);
    }

    #[test]
    fn contract_delete_commute_on_disjoint_sets() {
        let g = fig1_base();
        let contract = EdgeSet::new(["e2"]);
        let delete = EdgeSet::new(["e5"]);
        let a = g.contract_edges(&contract).unwrap().0.delete_edges(&delete).unwrap();
        let b = g.delete_edges(&delete).unwrap().contract_edges(&contract).unwrap().0;
        assert_eq!(a, b);
    }

    #[test]
    fn complements_are_tree_complements() {
        let g = fig1_base();
        for c in g.spanning_tree_complements().unwrap() {
            assert_eq!(c.len(), g.genus());
            let rest = g.delete_edges(&c).unwrap();
            assert_eq!(rest.num_components(), 1);
            assert_eq!(rest.genus(), 0);
        }
    }

    #[test]
    fn bridges_and_loops() {
        let g = graph(&["a", "b"], &[("e1", "a", "b", 1), ("e2", "a", "a", 1)]);
        assert!(g.is_bridge(g.edge_index("e1").unwrap()));
        assert!(!g.is_bridge(g.edge_index("e2").unwrap()));
        assert!(!theta().is_bridge(0));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            MetricGraph::new(vec!["a".into()], vec![("e".into(), "a".into(), "b".into(), rat(1))]),
            Err(Error::UnknownVertex(_))
        ));
        assert!(matches!(
            MetricGraph::new(vec!["a".into()], vec![("e".into(), "a".into(), "a".into(), rat(0))]),
            Err(Error::NonPositiveLength(_))
        ));
        assert!(matches!(
            MetricGraph::new(
                vec!["a".into()],
                vec![
                    ("e".into(), "a".into(), "a".into(), rat(1)),
                    ("e".into(), "a".into(), "a".into(), rat(2))
                ]
            ),
            Err(Error::DuplicateId(_))
        ));
    }

    #[test]
    fn half_edge_model() {
        let g = circle();
        let hs: Vec<_> = g.half_edges().collect();
        assert_eq!(hs.len(), 2);
        for h in hs {
            assert_ne!(h, h.pair());
            assert_eq!(h, h.pair().pair());
            assert_eq!(g.root(h), 0);
        }
        assert_eq!(g.tangent(0).len(), 2);
    }
}
