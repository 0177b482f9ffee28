//! Seeded random generation of connected base graphs and valid double
//! covers of a requested class. Deterministic for a fixed seed.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cover::{CoverClass, DoubleCover, VoltageSpec};
use crate::graph::{EdgeSet, MetricGraph};
use crate::Error;

pub const MAX_VERTICES: usize = 10;
pub const MAX_EDGES: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenMode {
    Free,
    EdgeFree,
    General,
}

impl GenMode {
    pub fn parse(s: &str) -> Result<Self, Error> {
        match s {
            "free" => Ok(GenMode::Free),
            "edge-free" => Ok(GenMode::EdgeFree),
            "general" => Ok(GenMode::General),
            _ => Err(Error::Parse(format!("unknown mode: {s}"))),
        }
    }
}

/// Connected base graph on `vertices` named v1..vN with `edges` edges:
/// a random spanning tree plus random extra edges (loops allowed), with
/// small random rational lengths.
pub fn random_base(
    rng: &mut ChaCha8Rng,
    vertices: usize,
    edges: usize,
) -> Result<MetricGraph, Error> {
    if vertices == 0 || vertices > MAX_VERTICES || edges > MAX_EDGES {
        return Err(Error::Infeasible(format!(
            "need 1..={MAX_VERTICES} vertices and at most {MAX_EDGES} edges"
        )));
    }
    if edges + 1 < vertices {
        return Err(Error::Infeasible("not enough edges for a connected graph".into()));
    }
    let name = |i: usize| format!("v{}", i + 1);
    let verts: Vec<String> = (0..vertices).map(name).collect();
    let mut list = Vec::new();
    let length = |rng: &mut ChaCha8Rng| {
        BigRational::new(BigInt::from(rng.gen_range(1..=12i64)), BigInt::from(rng.gen_range(1..=4i64)))
    };
    for i in 1..vertices {
        let j = rng.gen_range(0..i);
        list.push((format!("e{}", list.len() + 1), name(j), name(i), length(rng)));
    }
    while list.len() < edges {
        let a = rng.gen_range(0..vertices);
        let b = rng.gen_range(0..vertices);
        list.push((format!("e{}", list.len() + 1), name(a), name(b), length(rng)));
    }
    MetricGraph::new(verts, list)
}

fn sign_edges(base: &MetricGraph, dilated_vertices: &BTreeSet<String>, dilated_edges: &EdgeSet) -> Vec<String> {
    base.edges()
        .iter()
        .filter(|e| {
            !dilated_edges.contains(&e.id)
                && !dilated_vertices.contains(base.vertex_name(e.src))
                && !dilated_vertices.contains(base.vertex_name(e.dst))
        })
        .map(|e| e.id.clone())
        .collect()
}

fn build(spec: &VoltageSpec) -> Option<(VoltageSpec, DoubleCover)> {
    let cover = DoubleCover::build_from_voltage(spec).ok()?;
    cover.validate().ok().then(|| (spec.clone(), cover))
}

/// If the free (or dilation-free) cover came out disconnected, flipping
/// the sign of any non-tree edge makes its fundamental cycle odd and
/// reconnects the total graph.
fn reconnect_by_flip(spec: &mut VoltageSpec) -> bool {
    let base = &spec.base;
    let mut dsu = crate::graph::Dsu::new(base.num_vertices());
    for e in base.edges() {
        if dsu.union(e.src, e.dst) {
            continue;
        }
        if spec.dilated_edges.contains(&e.id)
            || spec.dilated_vertices.contains(base.vertex_name(e.src))
            || spec.dilated_vertices.contains(base.vertex_name(e.dst))
        {
            continue;
        }
        let s = spec.signs.entry(e.id.clone()).or_insert(1);
        *s = -*s;
        return true;
    }
    false
}

/// Generates a valid cover of the requested class. Deterministic for a
/// fixed seed; fails with `Infeasible` when the parameters cannot yield
/// the class (for instance a free cover over a tree).
pub fn generate(
    vertices: usize,
    edges: usize,
    mode: GenMode,
    seed: u64,
) -> Result<(VoltageSpec, DoubleCover), Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if mode == GenMode::Free && edges + 1 == vertices {
        return Err(Error::Infeasible("a free cover of a tree is disconnected".into()));
    }
    for _attempt in 0..100 {
        let base = random_base(&mut rng, vertices, edges)?;
        let mut dilated_vertices: BTreeSet<String> = BTreeSet::new();
        let mut dilated_edges: BTreeSet<String> = BTreeSet::new();
        match mode {
            GenMode::Free => {}
            GenMode::EdgeFree => {
                let k = rng.gen_range(1..=vertices);
                while dilated_vertices.len() < k {
                    let v = rng.gen_range(0..vertices);
                    dilated_vertices.insert(base.vertex_name(v).to_string());
                }
            }
            GenMode::General => {
                let k = rng.gen_range(0..=vertices);
                while dilated_vertices.len() < k {
                    let v = rng.gen_range(0..vertices);
                    dilated_vertices.insert(base.vertex_name(v).to_string());
                }
                for e in base.edges() {
                    if dilated_vertices.contains(base.vertex_name(e.src))
                        && dilated_vertices.contains(base.vertex_name(e.dst))
                        && rng.gen_bool(0.5)
                    {
                        dilated_edges.insert(e.id.clone());
                    }
                }
            }
        }
        let dilated_edges = EdgeSet::new(dilated_edges);
        let signs: BTreeMap<String, i8> = sign_edges(&base, &dilated_vertices, &dilated_edges)
            .into_iter()
            .map(|id| (id, if rng.gen_bool(0.5) { 1 } else { -1 }))
            .collect();
        let mut spec = VoltageSpec { base, dilated_vertices, dilated_edges, signs };
        if let Some(found) = build(&spec) {
            return Ok(found);
        }
        // disconnected total: try to flip one non-tree sign
        if reconnect_by_flip(&mut spec) {
            if let Some(found) = build(&spec) {
                return Ok(found);
            }
        }
    }
    Err(Error::Infeasible("no valid cover found for the given parameters".into()))
}

pub fn class_of(mode: GenMode) -> Option<CoverClass> {
    match mode {
        GenMode::Free => Some(CoverClass::Free),
        GenMode::EdgeFree => Some(CoverClass::EdgeFree),
        GenMode::General => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_for_fixed_seed() {
        let (a, _) = generate(4, 6, GenMode::General, 11).unwrap();
        let (b, _) = generate(4, 6, GenMode::General, 11).unwrap();
        assert_eq!(a.base, b.base);
        assert_eq!(a.dilated_vertices, b.dilated_vertices);
        assert_eq!(a.dilated_edges, b.dilated_edges);
        assert_eq!(a.signs, b.signs);
    }

    #[test]
    fn free_mode_yields_free_connected_covers() {
        for seed in 0..20 {
            let (_, c) = generate(4, 6, GenMode::Free, seed).unwrap();
            assert!(c.validate().ok());
            assert_eq!(c.dilation_stats().class, CoverClass::Free);
        }
    }

    #[test]
    fn edge_free_mode_contract() {
        for seed in 0..20 {
            let (_, c) = generate(5, 7, GenMode::EdgeFree, seed).unwrap();
            let stats = c.dilation_stats();
            assert_eq!(stats.class, CoverClass::EdgeFree);
            assert!(stats.n_d >= 1);
            assert_eq!(stats.m_d, 0);
        }
    }

    #[test]
    fn general_mode_valid() {
        for seed in 0..30 {
            let (_, c) = generate(5, 8, GenMode::General, seed).unwrap();
            assert!(c.validate().ok());
        }
    }

    #[test]
    fn infeasible_parameters() {
        assert!(matches!(generate(3, 1, GenMode::General, 0), Err(Error::Infeasible(_))));
        assert!(matches!(generate(3, 2, GenMode::Free, 0), Err(Error::Infeasible(_))));
        assert!(matches!(generate(20, 14, GenMode::General, 0), Err(Error::Infeasible(_))));
    }

    #[test]
    fn random_base_connected() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let g = random_base(&mut rng, 6, 9).unwrap();
            assert!(g.is_connected());
            assert_eq!(g.num_vertices(), 6);
            assert_eq!(g.num_edges(), 9);
        }
    }
}
