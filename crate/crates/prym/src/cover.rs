//! Harmonic double covers with dilation: representation, voltage
//! construction, validation, dilation statistics, deck involution,
//! cover-level contraction and dilated-vertex resolution.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::graph::{Dsu, EdgeSet, HalfEdge, MetricGraph, SymLength};
use crate::Error;

/// Degree-two harmonic morphism of metric graphs. The degree function
/// takes values in {1, 2}; degree-2 vertices and edges are dilated.
///
/// Orientation bookkeeping: every total edge carries a pushforward sign
/// telling whether its orientation agrees with its base edge's. Lifts of
/// base loops are canonically assigned sign +1 (the combinatorial data
/// does not determine a half-edge lift for loops, so we fix one).
#[derive(Clone, Debug)]
pub struct DoubleCover {
    base: MetricGraph,
    total: MetricGraph,
    vertex_map: Vec<usize>,
    edge_map: Vec<usize>,
    vertex_degree: Vec<u8>,
    edge_degree: Vec<u8>,
    push_sign: Vec<i8>,
    vertex_partner: Vec<usize>,
    edge_partner: Vec<usize>,
}

/// Voltage data for constructing a double cover over a base graph:
/// a dilation subgraph plus a sign on every edge with two undilated
/// endpoints.
#[derive(Clone, Debug)]
pub struct VoltageSpec {
    pub base: MetricGraph,
    pub dilated_vertices: BTreeSet<String>,
    pub dilated_edges: EdgeSet,
    pub signs: BTreeMap<String, i8>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoverClass {
    Free,
    EdgeFree,
    Dilated,
}

impl CoverClass {
    pub fn as_str(self) -> &'static str {
        match self {
            CoverClass::Free => "free",
            CoverClass::EdgeFree => "edge-free",
            CoverClass::Dilated => "dilated",
        }
    }
}

/// Counts attached to the dilation subgraph, plus the invariants
/// A = g - m_d + n_d - d, B = d - 1, C = m_d - n_d + d (absent for free
/// covers, where the dilation subgraph is empty).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DilationStats {
    pub m_d: usize,
    pub n_d: usize,
    pub d: usize,
    pub h: usize,
    pub g_base: usize,
    pub g_total: usize,
    pub class: CoverClass,
    pub abc: Option<(i64, i64, i64)>,
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// The nontrivial deck transformation of the cover, as vertex and edge
/// permutations of the total graph; `edge_sign[e]` is the chain-level sign
/// with which edge e maps onto its partner.
#[derive(Clone, Debug)]
pub struct Involution {
    pub vertex: Vec<usize>,
    pub edge: Vec<usize>,
    pub edge_sign: Vec<i8>,
}

impl DoubleCover {
    /// Assembles a cover from explicit data. Enforces the structural
    /// invariants needed for the maps to make sense (global degree two on
    /// every fiber, endpoint compatibility); the softer invariants
    /// (harmonicity, lengths, dilation closure, connectivity) are left to
    /// [`DoubleCover::validate`].
    pub fn from_parts(
        base: MetricGraph,
        total: MetricGraph,
        vertex_map: &BTreeMap<String, String>,
        edge_map: &BTreeMap<String, String>,
        vertex_degree: &BTreeMap<String, u8>,
        edge_degree: &BTreeMap<String, u8>,
    ) -> Result<Self, Error> {
        let nv = total.num_vertices();
        let ne = total.num_edges();
        let mut vmap = vec![usize::MAX; nv];
        let mut vdeg = vec![0u8; nv];
        for i in 0..nv {
            let name = total.vertex_name(i);
            let img = vertex_map
                .get(name)
                .ok_or_else(|| Error::InvalidCover(format!("vertex {name} has no image")))?;
            vmap[i] = base.vertex_index(img)?;
            let d = *vertex_degree
                .get(name)
                .ok_or_else(|| Error::InvalidCover(format!("vertex {name} has no degree")))?;
            if d != 1 && d != 2 {
                return Err(Error::InvalidCover(format!("vertex {name} has degree {d}")));
            }
            vdeg[i] = d;
        }
        let mut emap = vec![usize::MAX; ne];
        let mut edeg = vec![0u8; ne];
        for i in 0..ne {
            let id = &total.edge(i).id;
            let img = edge_map
                .get(id)
                .ok_or_else(|| Error::InvalidCover(format!("edge {id} has no image")))?;
            emap[i] = base.edge_index(img)?;
            let d = *edge_degree
                .get(id)
                .ok_or_else(|| Error::InvalidCover(format!("edge {id} has no degree")))?;
            if d != 1 && d != 2 {
                return Err(Error::InvalidCover(format!("edge {id} has degree {d}")));
            }
            edeg[i] = d;
        }

        // fibers must have global degree two; derive partners
        let mut vertex_partner = vec![usize::MAX; nv];
        for b in 0..base.num_vertices() {
            let fiber: Vec<usize> = (0..nv).filter(|&i| vmap[i] == b).collect();
            let total_deg: u8 = fiber.iter().map(|&i| vdeg[i]).sum();
            if total_deg != 2 {
                return Err(Error::InvalidCover(format!(
                    "vertex {} has fiber of total degree {total_deg}",
                    base.vertex_name(b)
                )));
            }
            match fiber.len() {
                1 => vertex_partner[fiber[0]] = fiber[0],
                2 => {
                    vertex_partner[fiber[0]] = fiber[1];
                    vertex_partner[fiber[1]] = fiber[0];
                }
                _ => unreachable!(),
            }
        }
        let mut edge_partner = vec![usize::MAX; ne];
        for b in 0..base.num_edges() {
            let fiber: Vec<usize> = (0..ne).filter(|&i| emap[i] == b).collect();
            let total_deg: u8 = fiber.iter().map(|&i| edeg[i]).sum();
            if total_deg != 2 {
                return Err(Error::InvalidCover(format!(
                    "edge {} has fiber of total degree {total_deg}",
                    base.edge(b).id
                )));
            }
            match fiber.len() {
                1 => edge_partner[fiber[0]] = fiber[0],
                2 => {
                    edge_partner[fiber[0]] = fiber[1];
                    edge_partner[fiber[1]] = fiber[0];
                }
                _ => unreachable!(),
            }
        }

        // endpoint compatibility and pushforward signs
        let mut push_sign = vec![1i8; ne];
        for i in 0..ne {
            let te = total.edge(i);
            let be = base.edge(emap[i]);
            let (ps, pt) = (vmap[te.src], vmap[te.dst]);
            if be.is_loop() {
                if ps != be.src || pt != be.src {
                    return Err(Error::InvalidCover(format!(
                        "edge {} does not cover the endpoints of {}",
                        te.id, be.id
                    )));
                }
                push_sign[i] = 1; // canonical half-edge lift for loops
            } else if (ps, pt) == (be.src, be.dst) {
                push_sign[i] = 1;
            } else if (ps, pt) == (be.dst, be.src) {
                push_sign[i] = -1;
            } else {
                return Err(Error::InvalidCover(format!(
                    "edge {} does not cover the endpoints of {}",
                    te.id, be.id
                )));
            }
        }

        // symbolic lengths of the total graph are always expressed in the
        // base edge variables, halved on dilated edges
        let half = BigRational::new(1.into(), 2.into());
        let total = {
            let edges = (0..ne)
                .map(|i| {
                    let e = total.edge(i);
                    let be = base.edge(emap[i]);
                    let mult = if edeg[i] == 2 { half.clone() } else { BigRational::one() };
                    (
                        e.id.clone(),
                        total.vertex_name(e.src).to_string(),
                        total.vertex_name(e.dst).to_string(),
                        e.length.clone(),
                        SymLength { var: be.sym.var.clone(), mult: mult * &be.sym.mult },
                    )
                })
                .collect();
            MetricGraph::with_sym_lengths(total.vertices().to_vec(), edges)?
        };

        Ok(DoubleCover {
            base,
            total,
            vertex_map: vmap,
            edge_map: emap,
            vertex_degree: vdeg,
            edge_degree: edeg,
            push_sign,
            vertex_partner,
            edge_partner,
        })
    }

    /// Builds the double cover determined by voltage data: dilated vertices
    /// and edges get single degree-2 preimages; an undilated vertex v gets
    /// preimages v+ and v-; an undilated edge between undilated endpoints
    /// joins same-superscript preimages when its sign is +1 and crosses
    /// when it is -1.
    pub fn build_from_voltage(spec: &VoltageSpec) -> Result<Self, Error> {
        let base = &spec.base;
        if !base.is_connected() {
            return Err(Error::NotConnected);
        }
        for v in &spec.dilated_vertices {
            base.vertex_index(v)?;
        }
        let dil_v: BTreeSet<usize> =
            spec.dilated_vertices.iter().map(|v| base.vertex_index(v).unwrap()).collect();
        let mut dil_e = vec![false; base.num_edges()];
        for id in spec.dilated_edges.iter() {
            let i = base.edge_index(id)?;
            let e = base.edge(i);
            if !dil_v.contains(&e.src) || !dil_v.contains(&e.dst) {
                return Err(Error::DilationClosure(format!(
                    "dilated edge {id} has an undilated endpoint"
                )));
            }
            dil_e[i] = true;
        }
        // signs must be given exactly on undilated edges between undilated
        // endpoints
        let mut needs_sign: BTreeSet<&str> = BTreeSet::new();
        for (i, e) in base.edges().iter().enumerate() {
            if !dil_e[i] && !dil_v.contains(&e.src) && !dil_v.contains(&e.dst) {
                needs_sign.insert(e.id.as_str());
            }
        }
        for id in spec.signs.keys() {
            if !needs_sign.contains(id.as_str()) {
                return Err(Error::InvalidCover(format!("sign given for edge {id} which takes none")));
            }
        }
        for id in &needs_sign {
            match spec.signs.get(*id) {
                Some(1) | Some(-1) => {}
                Some(s) => return Err(Error::InvalidCover(format!("sign of {id} must be +1 or -1, got {s}"))),
                None => return Err(Error::InvalidCover(format!("missing sign for edge {id}"))),
            }
        }

        let lift_v = |v: usize, plus: bool| -> String {
            let name = base.vertex_name(v);
            if dil_v.contains(&v) {
                name.to_string()
            } else if plus {
                format!("{name}+")
            } else {
                format!("{name}-")
            }
        };

        let mut vertices = Vec::new();
        let mut vertex_map = BTreeMap::new();
        let mut vertex_degree = BTreeMap::new();
        for v in 0..base.num_vertices() {
            let name = base.vertex_name(v).to_string();
            if dil_v.contains(&v) {
                vertices.push(name.clone());
                vertex_map.insert(name.clone(), name.clone());
                vertex_degree.insert(name, 2);
            } else {
                for plus in [true, false] {
                    let lift = lift_v(v, plus);
                    vertices.push(lift.clone());
                    vertex_map.insert(lift.clone(), name.clone());
                    vertex_degree.insert(lift, 1);
                }
            }
        }

        let half = BigRational::new(1.into(), 2.into());
        let mut edges = Vec::new();
        let mut edge_map = BTreeMap::new();
        let mut edge_degree = BTreeMap::new();
        for (i, e) in base.edges().iter().enumerate() {
            if dil_e[i] {
                edges.push((
                    e.id.clone(),
                    lift_v(e.src, true),
                    lift_v(e.dst, true),
                    &e.length * &half,
                ));
                edge_map.insert(e.id.clone(), e.id.clone());
                edge_degree.insert(e.id.clone(), 2);
                continue;
            }
            let sign = spec.signs.get(&e.id).copied().unwrap_or(1);
            for plus in [true, false] {
                let lid = format!("{}{}", e.id, if plus { "+" } else { "-" });
                let src = lift_v(e.src, plus);
                let dst = lift_v(e.dst, if sign == 1 { plus } else { !plus });
                edges.push((lid.clone(), src, dst, e.length.clone()));
                edge_map.insert(lid.clone(), e.id.clone());
                edge_degree.insert(lid, 1);
            }
        }

        let total = MetricGraph::new(vertices, edges)?;
        DoubleCover::from_parts(base.clone(), total, &vertex_map, &edge_map, &vertex_degree, &edge_degree)
    }

    pub fn base(&self) -> &MetricGraph {
        &self.base
    }

    pub fn total(&self) -> &MetricGraph {
        &self.total
    }

    pub fn vertex_image(&self, total_vertex: usize) -> usize {
        self.vertex_map[total_vertex]
    }

    pub fn edge_image(&self, total_edge: usize) -> usize {
        self.edge_map[total_edge]
    }

    pub fn push_sign(&self, total_edge: usize) -> i8 {
        self.push_sign[total_edge]
    }

    pub fn vertex_degree(&self, total_vertex: usize) -> u8 {
        self.vertex_degree[total_vertex]
    }

    pub fn edge_degree(&self, total_edge: usize) -> u8 {
        self.edge_degree[total_edge]
    }

    pub fn vertex_fiber(&self, base_vertex: usize) -> Vec<usize> {
        (0..self.total.num_vertices()).filter(|&i| self.vertex_map[i] == base_vertex).collect()
    }

    pub fn edge_fiber(&self, base_edge: usize) -> Vec<usize> {
        (0..self.total.num_edges()).filter(|&i| self.edge_map[i] == base_edge).collect()
    }

    pub fn is_dilated_base_vertex(&self, base_vertex: usize) -> bool {
        self.vertex_fiber(base_vertex).iter().any(|&i| self.vertex_degree[i] == 2)
    }

    pub fn is_dilated_base_edge(&self, base_edge: usize) -> bool {
        self.edge_fiber(base_edge).iter().any(|&i| self.edge_degree[i] == 2)
    }

    /// The half-edge map of the morphism.
    pub fn half_edge_image(&self, h: HalfEdge) -> HalfEdge {
        let side = if self.push_sign[h.edge] == 1 { h.side } else { 1 - h.side };
        HalfEdge { edge: self.edge_map[h.edge], side }
    }

    /// Checks every cover invariant; the report lists each violation.
    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        // dilation closure at the base level
        for b in 0..self.base.num_edges() {
            if !self.is_dilated_base_edge(b) {
                continue;
            }
            let e = self.base.edge(b);
            for (v, side) in [(e.src, 0), (e.dst, 1)] {
                if !self.is_dilated_base_vertex(v) {
                    r.violations.push(format!(
                        "dilated half-edge {}:{side} roots at undilated vertex {}",
                        e.id,
                        self.base.vertex_name(v)
                    ));
                }
            }
        }
        // harmonicity: at each total vertex, the preimages of each base
        // half-edge carry total degree equal to the vertex degree
        for tv in 0..self.total.num_vertices() {
            let bv = self.vertex_map[tv];
            let want = self.vertex_degree[tv];
            let mut seen: BTreeMap<HalfEdge, u8> = BTreeMap::new();
            for h in self.total.tangent(tv) {
                *seen.entry(self.half_edge_image(h)).or_insert(0) += self.edge_degree[h.edge];
            }
            for h in self.base.tangent(bv) {
                let got = seen.get(&h).copied().unwrap_or(0);
                if got != want {
                    r.violations.push(format!(
                        "harmonicity fails at {}: half-edge {}:{} has preimage degree {got}, vertex degree {want}",
                        self.total.vertex_name(tv),
                        self.base.edge(h.edge).id,
                        h.side
                    ));
                }
            }
            for h in seen.keys() {
                if self.base.root(*h) != bv {
                    r.violations.push(format!(
                        "half-edge image of a half-edge at {} does not root at its vertex image",
                        self.total.vertex_name(tv)
                    ));
                }
            }
        }
        // length rule
        let half = BigRational::new(1.into(), 2.into());
        for i in 0..self.total.num_edges() {
            let te = self.total.edge(i);
            let be = self.base.edge(self.edge_map[i]);
            let want = if self.edge_degree[i] == 2 { &be.length * &half } else { be.length.clone() };
            if te.length != want {
                r.violations.push(format!(
                    "length rule fails on edge {}: has {}, expected {}",
                    te.id, te.length, want
                ));
            }
        }
        if !self.total.is_connected() {
            r.violations.push("total graph disconnected".to_string());
        }
        r
    }

    pub fn dilation_stats(&self) -> DilationStats {
        let dil_v: Vec<usize> =
            (0..self.base.num_vertices()).filter(|&v| self.is_dilated_base_vertex(v)).collect();
        let dil_e: Vec<usize> =
            (0..self.base.num_edges()).filter(|&e| self.is_dilated_base_edge(e)).collect();
        let m_d = dil_e.len();
        let n_d = dil_v.len();
        let d = if n_d == 0 {
            0
        } else {
            let mut dsu = Dsu::new(self.base.num_vertices());
            for &e in &dil_e {
                let ed = self.base.edge(e);
                dsu.union(ed.src, ed.dst);
            }
            let roots: BTreeSet<usize> = dil_v.iter().map(|&v| dsu.find(v)).collect();
            roots.len()
        };
        let g_base = self.base.genus();
        let g_total = self.total.genus();
        let h = g_total - g_base;
        let class = if n_d == 0 {
            CoverClass::Free
        } else if m_d == 0 {
            CoverClass::EdgeFree
        } else {
            CoverClass::Dilated
        };
        let abc = (class != CoverClass::Free).then(|| {
            let (m, n, dd, g) = (m_d as i64, n_d as i64, d as i64, g_base as i64);
            (g - m + n - dd, dd - 1, m - n + dd)
        });
        DilationStats { m_d, n_d, d, h, g_base, g_total, class, abc }
    }

    /// The unique nontrivial deck transformation: swaps the two preimages
    /// of every undilated vertex and edge, fixes dilated preimages.
    pub fn involution(&self) -> Involution {
        let edge_sign = (0..self.total.num_edges())
            .map(|i| self.push_sign[i] * self.push_sign[self.edge_partner[i]])
            .collect();
        Involution {
            vertex: self.vertex_partner.clone(),
            edge: self.edge_partner.clone(),
            edge_sign,
        }
    }

    /// Contracts each connected component of the base subgraph spanned by
    /// `s`, and each component of its preimage in the total graph. The
    /// degree of a collapsed total vertex is the global degree of the cover
    /// restricted to that component.
    pub fn contract_cover(&self, s: &EdgeSet) -> Result<DoubleCover, Error> {
        let base_idxs: Vec<usize> = s.iter().map(|id| self.base.edge_index(id)).collect::<Result<_, _>>()?;
        let total_set = EdgeSet::new(
            (0..self.total.num_edges())
                .filter(|&i| base_idxs.contains(&self.edge_map[i]))
                .map(|i| self.total.edge(i).id.clone()),
        );
        let (new_base, vmap_b, _emap_b) = self.base.contract_edges(s)?;
        let (new_total, vmap_t, _emap_t) = self.total.contract_edges(&total_set)?;

        let mut vertex_map = BTreeMap::new();
        let mut vertex_degree = BTreeMap::new();
        for w in new_total.vertices() {
            // the collapsed vertex keeps the name of its smallest member,
            // which is itself an old total vertex
            let old = self.total.vertex_index(w)?;
            let b_old = self.vertex_map[old];
            let image = vmap_b[self.base.vertex_name(b_old)].clone();
            // representative old base vertex carrying the new base name
            let b_rep = self.base.vertex_index(&image)?;
            let deg: u8 = (0..self.total.num_vertices())
                .filter(|&tv| vmap_t[self.total.vertex_name(tv)] == *w && self.vertex_map[tv] == b_rep)
                .map(|tv| self.vertex_degree[tv])
                .sum();
            vertex_map.insert(w.clone(), image);
            vertex_degree.insert(w.clone(), deg);
        }
        let mut edge_map = BTreeMap::new();
        let mut edge_degree = BTreeMap::new();
        for e in new_total.edges() {
            let old = self.total.edge_index(&e.id)?;
            edge_map.insert(e.id.clone(), self.base.edge(self.edge_map[old]).id.clone());
            edge_degree.insert(e.id.clone(), self.edge_degree[old]);
        }
        DoubleCover::from_parts(new_base, new_total, &vertex_map, &edge_map, &vertex_degree, &edge_degree)
    }

    /// Resolves a dilated vertex with no incident dilated edges by
    /// attaching a loop: the base gains a loop at v, the total replaces the
    /// single preimage by two vertices joined by the two loop lifts, and
    /// the previously incident lifted half-edges are distributed between
    /// them. The split, when given, maps half-edge keys "edge:side" to a
    /// sign; by default each pair of lifts is split lexicographically.
    pub fn resolve_dilated_vertex(
        &self,
        v: &str,
        loop_length: BigRational,
        split: Option<&BTreeMap<String, bool>>,
    ) -> Result<DoubleCover, Error> {
        let bv = self.base.vertex_index(v)?;
        if !self.is_dilated_base_vertex(bv) {
            return Err(Error::InvalidCover(format!("vertex {v} is not dilated")));
        }
        for h in self.base.tangent(bv) {
            if self.is_dilated_base_edge(h.edge) {
                return Err(Error::InvalidCover(format!(
                    "vertex {v} has incident dilated edge {}",
                    self.base.edge(h.edge).id
                )));
            }
        }
        if loop_length <= BigRational::zero() {
            return Err(Error::NonPositiveLength("resolution loop".into()));
        }
        let tv = self.vertex_fiber(bv)[0];
        let tv_name = self.total.vertex_name(tv).to_string();

        // decide the sign of each total half-edge rooted at the preimage
        let at_tv: Vec<HalfEdge> = self.total.tangent(tv);
        let key = |h: HalfEdge| format!("{}:{}", self.total.edge(h.edge).id, h.side);
        let mut assign: BTreeMap<HalfEdge, bool> = BTreeMap::new();
        match split {
            Some(map) => {
                for &h in &at_tv {
                    let k = key(h);
                    let plus = *map
                        .get(&k)
                        .ok_or_else(|| Error::InvalidCover(format!("split misses half-edge {k}")))?;
                    assign.insert(h, plus);
                }
                if map.len() != at_tv.len() {
                    return Err(Error::InvalidCover("split names extra half-edges".into()));
                }
            }
            None => {
                // group by base half-edge; first of each pair goes to +
                let mut groups: BTreeMap<HalfEdge, Vec<HalfEdge>> = BTreeMap::new();
                for &h in &at_tv {
                    groups.entry(self.half_edge_image(h)).or_default().push(h);
                }
                for (_, mut pair) in groups {
                    pair.sort_by_key(|&h| (self.total.edge(h.edge).id.clone(), h.side));
                    for (i, h) in pair.into_iter().enumerate() {
                        assign.insert(h, i == 0);
                    }
                }
            }
        }
        // each base half-edge's two preimages must land on opposite sides
        {
            let mut groups: BTreeMap<HalfEdge, Vec<bool>> = BTreeMap::new();
            for (&h, &plus) in &assign {
                groups.entry(self.half_edge_image(h)).or_default().push(plus);
            }
            for (bh, signs) in groups {
                if signs.len() != 2 || signs[0] == signs[1] {
                    return Err(Error::InvalidCover(format!(
                        "split does not separate the preimages of half-edge {}:{}",
                        self.base.edge(bh.edge).id,
                        bh.side
                    )));
                }
            }
        }

        let loop_id = format!("{v}_res");
        let plus_name = format!("{tv_name}+");
        let minus_name = format!("{tv_name}-");

        // new base: old base plus the resolving loop
        let mut base_edges: Vec<(String, String, String, BigRational)> = self
            .base
            .edges()
            .iter()
            .map(|e| {
                (
                    e.id.clone(),
                    self.base.vertex_name(e.src).to_string(),
                    self.base.vertex_name(e.dst).to_string(),
                    e.length.clone(),
                )
            })
            .collect();
        base_edges.push((loop_id.clone(), v.to_string(), v.to_string(), loop_length.clone()));
        let new_base = MetricGraph::new(self.base.vertices().to_vec(), base_edges)?;

        // new total: re-root half-edges at the split vertex, add lifts
        let mut total_vertices: Vec<String> =
            self.total.vertices().iter().filter(|&n| n != &tv_name).cloned().collect();
        total_vertices.push(plus_name.clone());
        total_vertices.push(minus_name.clone());
        let lifted = |h: HalfEdge| -> String {
            if self.total.root(h) != tv {
                return self.total.vertex_name(self.total.root(h)).to_string();
            }
            if assign[&h] {
                plus_name.clone()
            } else {
                minus_name.clone()
            }
        };
        let mut total_edges: Vec<(String, String, String, BigRational)> = (0..self.total.num_edges())
            .map(|i| {
                let e = self.total.edge(i);
                (
                    e.id.clone(),
                    lifted(HalfEdge { edge: i, side: 0 }),
                    lifted(HalfEdge { edge: i, side: 1 }),
                    e.length.clone(),
                )
            })
            .collect();
        total_edges.push((format!("{loop_id}+"), plus_name.clone(), minus_name.clone(), loop_length.clone()));
        total_edges.push((format!("{loop_id}-"), minus_name.clone(), plus_name.clone(), loop_length.clone()));
        let new_total = MetricGraph::new(total_vertices, total_edges)?;

        let mut vertex_map = BTreeMap::new();
        let mut vertex_degree = BTreeMap::new();
        for (i, name) in self.total.vertices().iter().enumerate() {
            if i == tv {
                continue;
            }
            vertex_map.insert(name.clone(), self.base.vertex_name(self.vertex_map[i]).to_string());
            vertex_degree.insert(name.clone(), self.vertex_degree[i]);
        }
        for name in [&plus_name, &minus_name] {
            vertex_map.insert(name.clone(), v.to_string());
            vertex_degree.insert(name.clone(), 1);
        }
        let mut edge_map = BTreeMap::new();
        let mut edge_degree = BTreeMap::new();
        for (i, e) in self.total.edges().iter().enumerate() {
            edge_map.insert(e.id.clone(), self.base.edge(self.edge_map[i]).id.clone());
            edge_degree.insert(e.id.clone(), self.edge_degree[i]);
        }
        for suffix in ["+", "-"] {
            let id = format!("{loop_id}{suffix}");
            edge_map.insert(id.clone(), loop_id.clone());
            edge_degree.insert(id, 1);
        }
        DoubleCover::from_parts(new_base, new_total, &vertex_map, &edge_map, &vertex_degree, &edge_degree)
    }
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;
    use crate::graph::testutil::{fig1_base, graph};

    pub fn voltage(
        base: MetricGraph,
        dilated_vertices: &[&str],
        dilated_edges: &[&str],
        signs: &[(&str, i8)],
    ) -> VoltageSpec {
        VoltageSpec {
            base,
            dilated_vertices: dilated_vertices.iter().map(|s| s.to_string()).collect(),
            dilated_edges: EdgeSet::new(dilated_edges.iter().copied()),
            signs: signs.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    /// The running example: dilated middle circle {f1, f2} with its two
    /// vertices, an isolated dilated vertex v4, and odd loops on each side.
    pub fn fig1_cover() -> DoubleCover {
        DoubleCover::build_from_voltage(&voltage(
            fig1_base(),
            &["v2", "v3", "v4"],
            &["f1", "f2"],
            &[("e1", -1), ("e5", -1)],
        ))
        .unwrap()
    }

    /// Left cover of the discontinuity example: dilated vertex u, edge e to
    /// an undilated vertex carrying an odd loop f.
    pub fn disc_left_cover() -> DoubleCover {
        let base = graph(&["u", "v"], &[("e", "u", "v", 1), ("f", "v", "v", 1)]);
        DoubleCover::build_from_voltage(&voltage(base, &["u"], &[], &[("f", -1)])).unwrap()
    }

    /// Circle with one dilated vertex and an undilated loop.
    pub fn dilated_circle_cover() -> DoubleCover {
        let base = graph(&["v"], &[("e", "v", "v", 1)]);
        DoubleCover::build_from_voltage(&voltage(base, &["v"], &[], &[])).unwrap()
    }

    /// Connected free double cover of the circle.
    pub fn free_circle_cover() -> DoubleCover {
        let base = graph(&["v"], &[("e", "v", "v", 1)]);
        DoubleCover::build_from_voltage(&voltage(base, &[], &[], &[("e", -1)])).unwrap()
    }

    /// Fully dilated cover over an arbitrary base.
    pub fn fully_dilated(base: MetricGraph) -> DoubleCover {
        let verts: Vec<String> = base.vertices().to_vec();
        let edges: Vec<String> = base.edges().iter().map(|e| e.id.clone()).collect();
        let spec = VoltageSpec {
            base,
            dilated_vertices: verts.into_iter().collect(),
            dilated_edges: EdgeSet::new(edges),
            signs: BTreeMap::new(),
        };
        DoubleCover::build_from_voltage(&spec).unwrap()
    }

    /// Free cover of the theta graph (connected: crossing on e2).
    pub fn free_theta_cover() -> DoubleCover {
        let base = crate::graph::testutil::theta();
        DoubleCover::build_from_voltage(&voltage(base, &[], &[], &[("e1", 1), ("e2", -1), ("e3", 1)]))
            .unwrap()
    }

}

#[cfg(test)]
mod tests {
    use super::testutil::*;
    use super::*;
    use crate::graph::testutil::{circle, fig1_base, graph, rat, theta};

    #[test]
    fn free_circle_odd_cover_connected() {
        let c = free_circle_cover();
        assert!(c.validate().ok());
        assert_eq!(c.total().genus(), 1);
        assert_eq!(c.base().genus(), 1);
        assert_eq!(c.dilation_stats().class, CoverClass::Free);
    }

    #[test]
    fn free_circle_trivial_cover_disconnected() {
        let base = circle();
        let c = DoubleCover::build_from_voltage(&voltage(base, &[], &[], &[("e", 1)])).unwrap();
        let report = c.validate();
        assert!(!report.ok());
        assert!(report.violations.iter().any(|v| v.contains("disconnected")));
    }

    #[test]
    fn fig1_cover_shape() {
        let c = fig1_cover();
        assert!(c.validate().ok(), "{:?}", c.validate().violations);
        assert_eq!(c.base().genus(), 3);
        assert_eq!(c.total().genus(), 6);
        let stats = c.dilation_stats();
        assert_eq!((stats.m_d, stats.n_d, stats.d, stats.h), (2, 3, 2, 3));
        assert_eq!(stats.class, CoverClass::Dilated);
        // A + B = h
        let (a, b, cc) = stats.abc.unwrap();
        assert_eq!(a + b, stats.h as i64);
        assert_eq!((a, b, cc), (2, 1, 1));
    }

    #[test]
    fn disc_covers_stats() {
        let left = disc_left_cover();
        assert!(left.validate().ok());
        assert_eq!(left.dilation_stats().d, 1);
        let right = left.contract_cover(&EdgeSet::new(["f"])).unwrap();
        assert!(right.validate().ok());
        let stats = right.dilation_stats();
        assert_eq!(stats.d, 2);
        assert_eq!(stats.n_d, 2);
        assert_eq!(stats.h, 1);
    }

    #[test]
    fn voltage_rejects_dilation_closure_violation() {
        let base = graph(&["u", "v"], &[("e", "u", "v", 1)]);
        let spec = voltage(base, &["u"], &["e"], &[]);
        assert!(matches!(DoubleCover::build_from_voltage(&spec), Err(Error::DilationClosure(_))));
    }

    #[test]
    fn voltage_rejects_missing_and_extra_signs() {
        let base = circle();
        assert!(matches!(
            DoubleCover::build_from_voltage(&voltage(base.clone(), &[], &[], &[])),
            Err(Error::InvalidCover(_))
        ));
        assert!(matches!(
            DoubleCover::build_from_voltage(&voltage(base, &["v"], &[], &[("e", -1)])),
            Err(Error::InvalidCover(_))
        ));
    }

    #[test]
    fn validate_flags_bad_length() {
        // hand-built cover of the circle with a wrong lift length
        let base = circle();
        let total = graph(&["w+", "w-"], &[("a", "w+", "w-", 2), ("b", "w-", "w+", 1)]);
        let maps = |pairs: &[(&str, &str)]| -> BTreeMap<String, String> {
            pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
        };
        let degs = |pairs: &[(&str, u8)]| -> BTreeMap<String, u8> {
            pairs.iter().map(|(a, b)| (a.to_string(), *b)).collect()
        };
        let c = DoubleCover::from_parts(
            base,
            total,
            &maps(&[("w+", "v"), ("w-", "v")]),
            &maps(&[("a", "e"), ("b", "e")]),
            &degs(&[("w+", 1), ("w-", 1)]),
            &degs(&[("a", 1), ("b", 1)]),
        )
        .unwrap();
        let report = c.validate();
        assert!(report.violations.iter().any(|v| v.contains("length rule fails on edge a")));
    }

    #[test]
    fn validate_flags_dilated_edge_at_undilated_vertex() {
        // base: edge between u (dilated) and v (undilated); claim the edge
        // is dilated. Fiber degrees still sum to two everywhere.
        let base = graph(&["u", "v"], &[("e", "u", "v", 2)]);
        let total = graph(&["u~", "v1", "v2"], &[("e~", "u~", "v1", 1)]);
        // fiber of v: {v1, v2}; v2 is an isolated vertex over v
        let mut vm = BTreeMap::new();
        vm.insert("u~".to_string(), "u".to_string());
        vm.insert("v1".to_string(), "v".to_string());
        vm.insert("v2".to_string(), "v".to_string());
        let mut em = BTreeMap::new();
        em.insert("e~".to_string(), "e".to_string());
        let mut vd = BTreeMap::new();
        vd.insert("u~".to_string(), 2);
        vd.insert("v1".to_string(), 1);
        vd.insert("v2".to_string(), 1);
        let mut ed = BTreeMap::new();
        ed.insert("e~".to_string(), 2);
        let c = DoubleCover::from_parts(base, total, &vm, &em, &vd, &ed).unwrap();
        let report = c.validate();
        assert!(
            report.violations.iter().any(|v| v.contains("dilated half-edge e:1")),
            "{:?}",
            report.violations
        );
    }

    #[test]
    fn involution_properties() {
        for c in [fig1_cover(), disc_left_cover(), free_theta_cover(), dilated_circle_cover()] {
            let inv = c.involution();
            for v in 0..c.total().num_vertices() {
                assert_eq!(inv.vertex[inv.vertex[v]], v);
                assert_eq!(c.vertex_image(inv.vertex[v]), c.vertex_image(v));
            }
            for e in 0..c.total().num_edges() {
                assert_eq!(inv.edge[inv.edge[e]], e);
                assert_eq!(c.edge_image(inv.edge[e]), c.edge_image(e));
                assert_eq!(inv.edge_sign[e] * inv.edge_sign[inv.edge[e]], 1);
                if c.edge_degree(e) == 2 {
                    assert_eq!(inv.edge[e], e);
                    assert_eq!(inv.edge_sign[e], 1);
                }
            }
        }
    }

    #[test]
    fn involution_identity_on_fully_dilated() {
        let c = fully_dilated(theta());
        let inv = c.involution();
        for v in 0..c.total().num_vertices() {
            assert_eq!(inv.vertex[v], v);
        }
        for e in 0..c.total().num_edges() {
            assert_eq!(inv.edge[e], e);
        }
    }

    #[test]
    fn involution_swaps_free_circle_lifts() {
        let c = free_circle_cover();
        let inv = c.involution();
        assert_eq!(inv.edge[0], 1);
        assert_eq!(inv.edge[1], 0);
        assert_eq!(inv.vertex[0], 1);
    }

    #[test]
    fn fig1_involution_swaps_lifts_fixes_dilated() {
        let c = fig1_cover();
        let inv = c.involution();
        for e in 0..c.total().num_edges() {
            let id = &c.total().edge(e).id;
            if id.starts_with('f') {
                assert_eq!(inv.edge[e], e, "{id}");
            } else {
                assert_ne!(inv.edge[e], e, "{id}");
            }
        }
    }

    #[test]
    fn global_degree_two_everywhere() {
        for c in [fig1_cover(), disc_left_cover(), free_theta_cover()] {
            for b in 0..c.base().num_vertices() {
                let s: u8 = c.vertex_fiber(b).iter().map(|&i| c.vertex_degree(i)).sum();
                assert_eq!(s, 2);
            }
            for b in 0..c.base().num_edges() {
                let s: u8 = c.edge_fiber(b).iter().map(|&i| c.edge_degree(i)).sum();
                assert_eq!(s, 2);
            }
        }
    }

    #[test]
    fn contract_nothing_is_identity() {
        let c = fig1_cover();
        let c2 = c.contract_cover(&EdgeSet::default()).unwrap();
        assert_eq!(c.base(), c2.base());
        assert_eq!(c.total(), c2.total());
    }

    #[test]
    fn contract_dilated_edge_decrements_m_d() {
        let c = fig1_cover();
        let c2 = c.contract_cover(&EdgeSet::new(["f1"])).unwrap();
        assert!(c2.validate().ok(), "{:?}", c2.validate().violations);
        let s1 = c.dilation_stats();
        let s2 = c2.dilation_stats();
        assert_eq!(s2.m_d, s1.m_d - 1);
        assert_eq!(s2.d, s1.d);
        assert_eq!(s2.h, s1.h);
    }

    #[test]
    fn contract_full_dilation_subgraph_is_edge_free_same_d() {
        let c = fig1_cover();
        let c2 = c.contract_cover(&EdgeSet::new(["f1", "f2"])).unwrap();
        assert!(c2.validate().ok());
        let s2 = c2.dilation_stats();
        assert_eq!(s2.class, CoverClass::EdgeFree);
        assert_eq!(s2.d, c.dilation_stats().d);
    }

    #[test]
    fn resolve_dilated_vertex_shape() {
        let c = dilated_circle_cover();
        let r = c.resolve_dilated_vertex("v", rat(1), None).unwrap();
        assert!(r.validate().ok(), "{:?}", r.validate().violations);
        let s0 = c.dilation_stats();
        let s1 = r.dilation_stats();
        assert_eq!(s1.n_d, s0.n_d - 1);
        assert_eq!(s1.d, s0.d - 1);
        assert_eq!(s1.m_d, s0.m_d);
        assert_eq!(s1.g_base, s0.g_base + 1);
        assert_eq!(s1.g_total, s0.g_total + 1);
        assert_eq!(s1.class, CoverClass::Free);
    }

    #[test]
    fn resolve_then_contract_restores_stats() {
        let c = disc_left_cover();
        let r = c.resolve_dilated_vertex("u", rat(2), None).unwrap();
        assert!(r.validate().ok());
        let back = r.contract_cover(&EdgeSet::new(["u_res"])).unwrap();
        assert!(back.validate().ok());
        assert_eq!(back.dilation_stats(), c.dilation_stats());
    }

    #[test]
    fn resolve_rejects_bad_targets() {
        let c = fig1_cover();
        // v2 has incident dilated edges
        assert!(c.resolve_dilated_vertex("v2", rat(1), None).is_err());
        // v1 is not dilated
        assert!(c.resolve_dilated_vertex("v1", rat(1), None).is_err());
        // v4 is fine
        assert!(c.resolve_dilated_vertex("v4", rat(1), None).is_ok());
    }

    #[test]
    fn contract_disc_loop_matches_right_cover() {
        let left = disc_left_cover();
        let right = left.contract_cover(&EdgeSet::new(["f"])).unwrap();
        assert_eq!(right.base().num_edges(), 1);
        assert_eq!(right.base().num_vertices(), 2);
        assert_eq!(right.total().num_edges(), 2);
        assert_eq!(right.total().num_vertices(), 2);
        assert!(right.is_dilated_base_vertex(right.base().vertex_index("u").unwrap()));
        assert!(right.is_dilated_base_vertex(right.base().vertex_index("v").unwrap()));
    }

    #[test]
    fn build_from_voltage_validates_ok() {
        let base = fig1_base();
        for c in [fig1_cover(), disc_left_cover(), fully_dilated(base)] {
            assert!(c.validate().ok(), "{:?}", c.validate().violations);
        }
    }
}
