//! Ogod enumeration, Jacobian and Prym polynomials, the three Prym volume
//! routes, and verifiers for the identities relating them.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::cover::{CoverClass, DoubleCover};
use crate::graph::{Dsu, EdgeSet, GraphEdge, HalfEdge, MetricGraph};
use crate::homology::{cycle_basis, gram_det_sym, kernel_pushforward_basis};
use crate::poly::{Monomial, MultiPoly};
use crate::Error;

/// An h-element set of undilated base edges whose removal leaves
/// components with connected preimage; the rank is the component count.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Ogod {
    pub edges: EdgeSet,
    pub rank: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

impl CheckStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Skipped => "skipped",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn push(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            detail: detail.into(),
        });
    }

    pub fn skip(&mut self, name: impl Into<String>, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            status: CheckStatus::Skipped,
            detail: detail.into(),
        });
    }
}

/// Outcome of the Thm A style identity J(total) = 2^exponent * Pr * J(base).
#[derive(Clone, Debug)]
pub struct ThmAReport {
    pub holds: bool,
    pub exponent: i64,
    pub lhs: MultiPoly,
    pub rhs: MultiPoly,
}

/// The symbolic length of an edge as a polynomial: mult * x_var.
fn sym_poly(e: &GraphEdge) -> MultiPoly {
    MultiPoly::term(e.sym.mult.clone(), Monomial::var(&e.sym.var))
}

/// Jacobian polynomial: the sum over spanning-tree complements of the
/// products of symbolic edge lengths. Homogeneous of degree genus in the
/// length variables (with rational coefficients when edges carry halved
/// symbolic lengths).
pub fn jacobian_polynomial(g: &MetricGraph) -> Result<MultiPoly, Error> {
    let mut out = MultiPoly::zero();
    for comp in g.spanning_tree_complements()? {
        let mut term = MultiPoly::one();
        for id in comp.iter() {
            term = term.mul(&sym_poly(g.edge(g.edge_index(id)?)));
        }
        out = out.add(&term);
    }
    Ok(out)
}

/// The same polynomial by deletion-contraction: loops factor out their
/// length, bridges contract away, and any other edge splits the sum.
pub fn jacobian_polynomial_dc(g: &MetricGraph) -> Result<MultiPoly, Error> {
    if !g.is_connected() {
        return Err(Error::NotConnected);
    }
    fn rec(g: &MetricGraph) -> Result<MultiPoly, Error> {
        if g.num_edges() == 0 {
            return Ok(MultiPoly::one());
        }
        let e = g.edge(0);
        let id = EdgeSet::new([e.id.clone()]);
        let x = sym_poly(e);
        if e.is_loop() {
            return Ok(x.mul(&rec(&g.delete_edges(&id)?)?));
        }
        if g.is_bridge(0) {
            return rec(&g.contract_edges(&id)?.0);
        }
        let contracted = rec(&g.contract_edges(&id)?.0)?;
        let deleted = rec(&g.delete_edges(&id)?)?;
        Ok(contracted.add(&x.mul(&deleted)))
    }
    rec(g)
}

fn require_prym_ready(c: &DoubleCover) -> Result<(), Error> {
    if !c.base().is_connected() {
        return Err(Error::NotConnected);
    }
    if !c.total().is_connected() {
        return Err(Error::TotalDisconnected);
    }
    Ok(())
}

fn undilated_base_edges(c: &DoubleCover) -> Vec<usize> {
    (0..c.base().num_edges()).filter(|&e| !c.is_dilated_base_edge(e)).collect()
}

/// Connected components of base minus an edge subset, as (vertices, edges)
/// index sets; every vertex of the base belongs to some component.
fn complement_components(
    base: &MetricGraph,
    removed: &[bool],
) -> Vec<(BTreeSet<usize>, BTreeSet<usize>)> {
    let mut dsu = Dsu::new(base.num_vertices());
    for (i, e) in base.edges().iter().enumerate() {
        if !removed[i] {
            dsu.union(e.src, e.dst);
        }
    }
    let mut comps: std::collections::BTreeMap<usize, (BTreeSet<usize>, BTreeSet<usize>)> =
        Default::default();
    for v in 0..base.num_vertices() {
        comps.entry(dsu.find(v)).or_default().0.insert(v);
    }
    for (i, e) in base.edges().iter().enumerate() {
        if !removed[i] {
            comps.entry(dsu.find(e.src)).or_default().1.insert(i);
        }
    }
    comps.into_values().collect()
}

/// Direct ogod test for one subset: every component of base minus F must
/// have connected preimage. Returns the rank on success.
fn ogod_rank_direct(c: &DoubleCover, removed: &[bool]) -> Option<usize> {
    let comps = complement_components(c.base(), removed);
    // union all total edges whose base image survives; preimages of
    // distinct base components cannot touch, so one pass suffices
    let mut dsu = Dsu::new(c.total().num_vertices());
    for t in 0..c.total().num_edges() {
        if !removed[c.edge_image(t)] {
            let e = c.total().edge(t);
            dsu.union(e.src, e.dst);
        }
    }
    for (verts, _) in &comps {
        let mut root = None;
        for &v in verts {
            for t in c.vertex_fiber(v) {
                let r = dsu.find(t);
                match root {
                    None => root = Some(r),
                    Some(r0) if r0 != r => return None,
                    _ => {}
                }
            }
        }
    }
    Some(comps.len())
}

/// All ogods by exhaustive subset scan with the direct preimage test, in
/// lexicographic order of edge sets.
pub fn enumerate_ogods(c: &DoubleCover) -> Result<Vec<Ogod>, Error> {
    require_prym_ready(c)?;
    let stats = c.dilation_stats();
    let candidates = undilated_base_edges(c);
    let mut out = Vec::new();
    for subset in candidates.iter().combinations(stats.h) {
        let mut removed = vec![false; c.base().num_edges()];
        for &&i in &subset {
            removed[i] = true;
        }
        if let Some(rank) = ogod_rank_direct(c, &removed) {
            out.push(Ogod {
                edges: EdgeSet::new(subset.iter().map(|&&i| c.base().edge(i).id.clone())),
                rank,
            });
        }
    }
    out.sort();
    Ok(out)
}

/// Connected components of the dilation subgraph, as (vertices, edges).
fn dilation_components(c: &DoubleCover) -> Vec<(BTreeSet<usize>, BTreeSet<usize>)> {
    let base = c.base();
    let dil_v: BTreeSet<usize> =
        (0..base.num_vertices()).filter(|&v| c.is_dilated_base_vertex(v)).collect();
    if dil_v.is_empty() {
        return Vec::new();
    }
    let mut dsu = Dsu::new(base.num_vertices());
    let mut dil_e = Vec::new();
    for e in 0..base.num_edges() {
        if c.is_dilated_base_edge(e) {
            let edge = base.edge(e);
            dsu.union(edge.src, edge.dst);
            dil_e.push(e);
        }
    }
    let mut comps: std::collections::BTreeMap<usize, (BTreeSet<usize>, BTreeSet<usize>)> =
        Default::default();
    for &v in &dil_v {
        comps.entry(dsu.find(v)).or_default().0.insert(v);
    }
    for e in dil_e {
        comps.entry(dsu.find(base.edge(e).src)).or_default().1.insert(e);
    }
    comps.into_values().collect()
}

fn subgraph_genus(verts: &BTreeSet<usize>, edges: &BTreeSet<usize>) -> i64 {
    // connected subgraph on its own vertex set
    edges.len() as i64 - verts.len() as i64 + 1
}

/// Checks whether the unique cycle of a genus-one dilation-free component
/// has nontrivial monodromy, by lifting a closed walk around it.
fn cycle_monodromy_nontrivial(
    c: &DoubleCover,
    verts: &BTreeSet<usize>,
    edges: &BTreeSet<usize>,
) -> bool {
    let base = c.base();
    // spanning tree of the component; exactly one non-tree edge
    let mut dsu = Dsu::new(base.num_vertices());
    let mut in_tree: BTreeSet<usize> = BTreeSet::new();
    let mut extra = None;
    for &i in edges {
        let e = base.edge(i);
        if dsu.union(e.src, e.dst) {
            in_tree.insert(i);
        } else {
            extra = Some(i);
        }
    }
    let e0 = extra.expect("genus-one component has a non-tree edge");
    // parent pointers toward src(e0)
    let start = base.edge(e0).src;
    let mut parent: std::collections::BTreeMap<usize, usize> = Default::default();
    let mut queue = std::collections::VecDeque::from([start]);
    let mut seen: BTreeSet<usize> = BTreeSet::from([start]);
    while let Some(v) = queue.pop_front() {
        for &i in &in_tree {
            let e = base.edge(i);
            for (a, b) in [(e.src, e.dst), (e.dst, e.src)] {
                if a == v && verts.contains(&b) && seen.insert(b) {
                    parent.insert(b, i);
                    queue.push_back(b);
                }
            }
        }
    }
    // closed walk: e0 forward, then tree path dst(e0) -> src(e0)
    let mut walk: Vec<(usize, bool)> = vec![(e0, true)];
    let mut v = base.edge(e0).dst;
    while v != start {
        let i = parent[&v];
        let e = base.edge(i);
        let forward = e.dst == v; // walk traverses i from the far end toward v... reversed below
        // we are walking v -> parent, i.e. against the direction that led to v
        walk.push((i, !forward));
        v = if e.dst == v { e.src } else { e.dst };
    }
    // lift the walk edge by edge
    let start_lift = c.vertex_fiber(start)[0];
    let mut cur = start_lift;
    for (i, forward) in walk {
        let want = HalfEdge { edge: i, side: if forward { 0 } else { 1 } };
        let t = c
            .total()
            .tangent(cur)
            .into_iter()
            .find(|&h| c.half_edge_image(h) == want)
            .expect("undilated half-edge has a unique lift at each preimage vertex");
        cur = c.total().root(t.pair());
    }
    cur != start_lift
}

/// Ogods by the classification route: each component of base minus F
/// either contains a unique dilation component of equal genus, or is
/// dilation-free of genus one with nontrivial monodromy.
pub fn enumerate_ogods_classified(c: &DoubleCover) -> Result<Vec<Ogod>, Error> {
    require_prym_ready(c)?;
    let stats = c.dilation_stats();
    let candidates = undilated_base_edges(c);
    let dil_comps = dilation_components(c);
    let mut out = Vec::new();
    'subset: for subset in candidates.iter().combinations(stats.h) {
        let mut removed = vec![false; c.base().num_edges()];
        for &&i in &subset {
            removed[i] = true;
        }
        let comps = complement_components(c.base(), &removed);
        for (verts, edges) in &comps {
            let inside: Vec<&(BTreeSet<usize>, BTreeSet<usize>)> =
                dil_comps.iter().filter(|(dv, _)| dv.is_subset(verts)).collect();
            let ok = match inside.len() {
                0 => {
                    subgraph_genus(verts, edges) == 1
                        && cycle_monodromy_nontrivial(c, verts, edges)
                }
                1 => subgraph_genus(verts, edges) == subgraph_genus(&inside[0].0, &inside[0].1),
                _ => false,
            };
            if !ok {
                continue 'subset;
            }
        }
        out.push(Ogod {
            edges: EdgeSet::new(subset.iter().map(|&&i| c.base().edge(i).id.clone())),
            rank: comps.len(),
        });
    }
    out.sort();
    Ok(out)
}

/// Prym polynomial: the sum over ogods of 4^(rank-1) times the product of
/// the edge lengths of the ogod. Homogeneous of degree h.
pub fn prym_polynomial(c: &DoubleCover) -> Result<MultiPoly, Error> {
    let mut out = MultiPoly::zero();
    for ogod in enumerate_ogods(c)? {
        let mut term = MultiPoly::constant(BigRational::from(BigInt::from(4).pow(
            (ogod.rank - 1) as u32,
        )));
        for id in ogod.edges.iter() {
            term = term.mul(&sym_poly(c.base().edge(c.base().edge_index(id)?)));
        }
        out = out.add(&term);
    }
    Ok(out)
}

/// Squared Prym volume by the combinatorial formula: 2^(1-d) * Pr for
/// covers with dilation, Pr itself for free covers.
pub fn prym_volume_combinatorial(c: &DoubleCover) -> Result<MultiPoly, Error> {
    require_prym_ready(c)?;
    let stats = c.dilation_stats();
    let pr = prym_polynomial(c)?;
    Ok(match stats.class {
        CoverClass::Free => pr,
        _ => pr.scale(&MultiPoly::pow2(1 - stats.d as i64)),
    })
}

/// Squared Prym volume via the Jacobian quotient: the Gram determinant of
/// a full cycle basis of the total graph divided by that of the base,
/// scaled by 2^(m_d - n_d + d) (or 1/2 in the free case).
pub fn prym_volume_homology(c: &DoubleCover) -> Result<MultiPoly, Error> {
    require_prym_ready(c)?;
    let stats = c.dilation_stats();
    let num = gram_det_sym(c.total(), &cycle_basis(c.total()));
    let den = gram_det_sym(c.base(), &cycle_basis(c.base()));
    let q = num.exact_div(&den).map_err(|_| {
        Error::Internal("Jacobian quotient is not a polynomial".into())
    })?;
    Ok(match stats.class {
        CoverClass::Free => q.scale(&MultiPoly::pow2(-1)),
        _ => {
            let (m, n, d) = (stats.m_d as i64, stats.n_d as i64, stats.d as i64);
            q.scale(&MultiPoly::pow2(m - n + d))
        }
    })
}

/// Squared Prym volume via the kernel lattice: the Gram determinant of a
/// Z-basis of Ker(pushforward) scaled by 2^(-A). Dilated covers only.
pub fn prym_volume_kernel(c: &DoubleCover) -> Result<MultiPoly, Error> {
    require_prym_ready(c)?;
    let stats = c.dilation_stats();
    let (a, _, _) = match stats.abc {
        None => return Err(Error::KernelRouteFree),
        Some(abc) => abc,
    };
    let basis = kernel_pushforward_basis(c)?;
    let det = gram_det_sym(c.total(), &basis);
    Ok(det.scale(&MultiPoly::pow2(-a)))
}

/// Checks J(total) = 2^(1 - m_d + n_d - 2d) * Pr * J(base) as an exact
/// polynomial identity in the base edge lengths. For free covers the
/// exponent is 1.
pub fn verify_thm_a(c: &DoubleCover) -> Result<ThmAReport, Error> {
    require_prym_ready(c)?;
    let stats = c.dilation_stats();
    let (m, n, d) = (stats.m_d as i64, stats.n_d as i64, stats.d as i64);
    let exponent = 1 - m + n - 2 * d;
    let lhs = jacobian_polynomial(c.total())?;
    let rhs = prym_polynomial(c)?
        .mul(&jacobian_polynomial(c.base())?)
        .scale(&MultiPoly::pow2(exponent));
    Ok(ThmAReport { holds: lhs == rhs, exponent, lhs, rhs })
}

/// Checks the deformation relations used in the Thm A induction: loop
/// resolution multiplies J(base) by the loop length and perturbs Pr by a
/// multiple of it; dilated-edge contraction preserves Pr; and the
/// deletion-contraction branch at a dilated edge behaves per Lemma CD.
pub fn verify_deformation_moves(c: &DoubleCover) -> Result<Report, Error> {
    require_prym_ready(c)?;
    let mut report = Report::default();
    let base = c.base();

    // resolvable dilated vertices: dilated, no incident dilated edge
    let mut any_vertex = false;
    for v in 0..base.num_vertices() {
        if !c.is_dilated_base_vertex(v) {
            continue;
        }
        if base.tangent(v).iter().any(|h| c.is_dilated_base_edge(h.edge)) {
            continue;
        }
        any_vertex = true;
        let name = base.vertex_name(v).to_string();
        let resolved = c.resolve_dilated_vertex(&name, BigRational::one(), None)?;
        let loop_id = format!("{name}_res");
        let x = MultiPoly::var(&loop_id);
        let j_old = jacobian_polynomial(base)?;
        let j_new = jacobian_polynomial(resolved.base())?;
        report.push(
            format!("resolve {name}: J(base') = x_loop * J(base)"),
            j_new == x.mul(&j_old),
            format!("loop {loop_id}"),
        );
        let pr_old = prym_polynomial(c)?;
        let pr_new = prym_polynomial(&resolved)?;
        let diff = pr_new.sub(&pr_old);
        report.push(
            format!("resolve {name}: Pr' - Pr divisible by x_loop"),
            diff.exact_div(&x).is_ok(),
            format!("difference has {} terms", diff.num_terms()),
        );
    }
    if !any_vertex {
        report.skip("loop resolution", "no resolvable dilated vertex");
    }

    // dilated edges: contraction preserves Pr, and Lemma CD holds at e
    let mut any_edge = false;
    for e in 0..base.num_edges() {
        if !c.is_dilated_base_edge(e) {
            continue;
        }
        any_edge = true;
        let edge = base.edge(e);
        let id = edge.id.clone();
        let set = EdgeSet::new([id.clone()]);
        let contracted = c.contract_cover(&set)?;
        let pr_old = prym_polynomial(c)?;
        let pr_new = prym_polynomial(&contracted)?;
        report.push(
            format!("contract {id}: Pr invariant"),
            pr_new == pr_old,
            String::new(),
        );
        let j = jacobian_polynomial(base)?;
        let x = sym_poly(edge);
        let branch = if edge.is_loop() {
            let deleted = jacobian_polynomial(&base.delete_edges(&set)?)?;
            ("loop", j == x.mul(&deleted))
        } else if base.is_bridge(e) {
            let contracted_j = jacobian_polynomial(&base.contract_edges(&set)?.0)?;
            ("bridge", j == contracted_j)
        } else {
            let contracted_j = jacobian_polynomial(&base.contract_edges(&set)?.0)?;
            let deleted = jacobian_polynomial(&base.delete_edges(&set)?)?;
            ("general", j == contracted_j.add(&x.mul(&deleted)))
        };
        report.push(
            format!("deletion-contraction at {id} ({} branch)", branch.0),
            branch.1,
            String::new(),
        );
    }
    if !any_edge {
        report.skip("dilated edge contraction", "no dilated edge");
    }
    Ok(report)
}

/// Identity tags accepted by the verifier, in reporting order.
pub const IDENTITIES: &[&str] =
    &["thm-a", "thm-b", "main", "cd", "free-volume", "pushpull", "ogod-classify", "moves"];

/// Runs one named identity check against a cover. Identities that do not
/// apply to the cover's class come back as skipped, not as failures.
pub fn verify_identity(c: &DoubleCover, tag: &str) -> Result<Check, Error> {
    require_prym_ready(c)?;
    let stats = c.dilation_stats();
    let free = stats.class == CoverClass::Free;
    let check = |ok: bool, detail: String| Check {
        name: tag.to_string(),
        status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
        detail,
    };
    let skipped = |detail: &str| Check {
        name: tag.to_string(),
        status: CheckStatus::Skipped,
        detail: detail.to_string(),
    };
    Ok(match tag {
        "thm-a" => {
            let r = verify_thm_a(c)?;
            check(r.holds, format!("exponent {}", r.exponent))
        }
        "thm-b" => {
            if free {
                skipped("kernel route undefined for free covers")
            } else {
                let ok = prym_volume_homology(c)? == prym_volume_kernel(c)?;
                check(ok, "homology = kernel".into())
            }
        }
        "main" => {
            let comb = prym_volume_combinatorial(c)?;
            let mut ok = comb == prym_volume_homology(c)?;
            if !free {
                ok = ok && comb == prym_volume_kernel(c)?;
            }
            check(ok, "route agreement".into())
        }
        "cd" => {
            let ok = jacobian_polynomial(c.base())? == jacobian_polynomial_dc(c.base())?
                && jacobian_polynomial(c.total())? == jacobian_polynomial_dc(c.total())?;
            check(ok, "deletion-contraction on base and total".into())
        }
        "free-volume" => {
            if !free {
                skipped("cover is not free")
            } else {
                let lhs = jacobian_polynomial(c.total())?;
                let rhs = prym_polynomial(c)?
                    .mul(&jacobian_polynomial(c.base())?)
                    .scale(&MultiPoly::pow2(1));
                check(lhs == rhs, "J(total) = 2 Pr J(base)".into())
            }
        }
        "pushpull" => {
            use crate::homology::*;
            let inv = c.involution();
            let two = BigInt::from(2);
            let mut ok = true;
            for e in 0..c.base().num_edges() {
                let ch = Chain::edge(e);
                ok &= pushforward(c, &pullback(c, &ch)) == ch.scale(&two);
            }
            for e in 0..c.total().num_edges() {
                let ch = Chain::edge(e);
                ok &= pullback(c, &pushforward(c, &ch)) == ch.add(&involution_push(&inv, &ch));
                ok &= involution_push(&inv, &involution_push(&inv, &ch)) == ch;
            }
            let total_basis = cycle_basis(c.total());
            for a in &total_basis {
                for b in &total_basis {
                    ok &= pairing_sym(c.total(), &involution_push(&inv, a), &involution_push(&inv, b))
                        == pairing_sym(c.total(), a, b);
                }
            }
            let base_basis = cycle_basis(c.base());
            for a in &base_basis {
                for b in &base_basis {
                    let up = pairing_sym(c.total(), &pullback(c, a), &pullback(c, b));
                    ok &= up == pairing_sym(c.base(), a, b).scale(&BigRational::from(two.clone()));
                }
            }
            ok &= kernel_pushforward_basis(c)?.len() == stats.h;
            if let Some((a, b, cc)) = stats.abc {
                ok &= kernel_involution_basis(c, false)?.len() as i64 == a + cc;
                ok &= kernel_involution_basis(c, true)?.len() as i64 == a + b;
            }
            check(ok, "chain maps, pairings, and lattice ranks".into())
        }
        "ogod-classify" => {
            let ok = enumerate_ogods(c)? == enumerate_ogods_classified(c)?;
            check(ok, "direct enumeration = classification".into())
        }
        "moves" => {
            let report = verify_deformation_moves(c)?;
            if report.checks.iter().all(|ch| ch.status == CheckStatus::Skipped) {
                skipped("no resolvable dilated vertex or dilated edge")
            } else {
                check(report.passed(), format!("{} sub-checks", report.checks.len()))
            }
        }
        _ => return Err(Error::Parse(format!("unknown identity: {tag}"))),
    })
}
