//! Independent cross-check oracles: weighted matrix-tree determinant,
//! exhaustive ogod scan with BFS connectivity, and randomized numeric
//! evaluation of the volume identities. These deliberately avoid the code
//! paths of the main routes.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cover::DoubleCover;
use crate::graph::{EdgeSet, MetricGraph};
use crate::volumes::{self, Ogod, Report};
use crate::Error;

/// Determinant of a rational matrix by plain Gaussian elimination.
fn rational_det(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut det = BigRational::one();
    for k in 0..n {
        let pivot = match (k..n).find(|&i| !m[i][k].is_zero()) {
            None => return BigRational::zero(),
            Some(p) => p,
        };
        if pivot != k {
            m.swap(pivot, k);
            det = -det;
        }
        det *= &m[k][k];
        let inv = m[k][k].clone();
        for j in k..n {
            m[k][j] = &m[k][j] / &inv;
        }
        for i in k + 1..n {
            if m[i][k].is_zero() {
                continue;
            }
            let f = m[i][k].clone();
            for j in k..n {
                let sub = &f * &m[k][j];
                m[i][j] -= sub;
            }
        }
    }
    det
}

/// Weighted matrix-tree value: (prod of lengths) times the determinant of
/// the reduced Laplacian with conductances 1/length. Equals the Jacobian
/// polynomial evaluated at the same lengths.
pub fn matrix_tree_value(
    g: &MetricGraph,
    lengths: &BTreeMap<String, BigRational>,
) -> Result<BigRational, Error> {
    if !g.is_connected() {
        return Err(Error::NotConnected);
    }
    let n = g.num_vertices();
    let mut lap = vec![vec![BigRational::zero(); n]; n];
    let mut product = BigRational::one();
    for e in g.edges() {
        let l = lengths
            .get(&e.id)
            .ok_or_else(|| Error::MissingVariable(e.id.clone()))?;
        if *l <= BigRational::zero() {
            return Err(Error::NonPositiveLength(e.id.clone()));
        }
        product *= l;
        if e.is_loop() {
            continue;
        }
        let c = l.recip();
        lap[e.src][e.src] += &c;
        lap[e.dst][e.dst] += &c;
        lap[e.src][e.dst] -= &c;
        lap[e.dst][e.src] -= &c;
    }
    // strike the last row and column
    let reduced: Vec<Vec<BigRational>> =
        (0..n - 1).map(|i| (0..n - 1).map(|j| lap[i][j].clone()).collect()).collect();
    Ok(product * rational_det(reduced))
}

/// BFS connectivity over an explicit vertex/edge subset, avoiding the
/// union-find used by the main enumerator.
fn bfs_connected(
    num_vertices: usize,
    edges: &[(usize, usize)],
    verts: &[usize],
    edge_ok: &dyn Fn(usize) -> bool,
) -> bool {
    if verts.is_empty() {
        return true;
    }
    let mut allowed = vec![false; num_vertices];
    for &v in verts {
        allowed[v] = true;
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); num_vertices];
    for (i, &(s, d)) in edges.iter().enumerate() {
        if edge_ok(i) && allowed[s] && allowed[d] {
            adj[s].push(d);
            adj[d].push(s);
        }
    }
    let mut seen = vec![false; num_vertices];
    let mut queue = std::collections::VecDeque::from([verts[0]]);
    seen[verts[0]] = true;
    let mut count = 1;
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                count += 1;
                queue.push_back(w);
            }
        }
    }
    count == verts.iter().filter(|&&v| allowed[v]).count()
        && verts.iter().all(|&v| seen[v])
}

/// Exhaustive ogod scan: checks every h-subset of undilated edges with a
/// BFS-based preimage connectivity test.
pub fn brute_ogods(c: &DoubleCover) -> Result<Vec<Ogod>, Error> {
    if !c.total().is_connected() {
        return Err(Error::TotalDisconnected);
    }
    let base = c.base();
    let undilated: Vec<usize> =
        (0..base.num_edges()).filter(|&e| !c.is_dilated_base_edge(e)).collect();
    if undilated.len() > 20 {
        return Err(Error::SizeGuard(format!(
            "brute ogod scan limited to 20 undilated edges, got {}",
            undilated.len()
        )));
    }
    let h = c.total().genus() - base.genus();
    let base_edges: Vec<(usize, usize)> = base.edges().iter().map(|e| (e.src, e.dst)).collect();
    let total_edges: Vec<(usize, usize)> =
        c.total().edges().iter().map(|e| (e.src, e.dst)).collect();
    let mut out = Vec::new();
    for subset in undilated.iter().combinations(h) {
        let removed: Vec<bool> = (0..base.num_edges())
            .map(|i| subset.iter().any(|&&j| j == i))
            .collect();
        // components of base minus F by repeated BFS
        let mut comp_of = vec![usize::MAX; base.num_vertices()];
        let mut num_comps = 0;
        for start in 0..base.num_vertices() {
            if comp_of[start] != usize::MAX {
                continue;
            }
            let id = num_comps;
            num_comps += 1;
            comp_of[start] = id;
            let mut queue = std::collections::VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for (i, &(s, d)) in base_edges.iter().enumerate() {
                    if removed[i] {
                        continue;
                    }
                    for (a, b) in [(s, d), (d, s)] {
                        if a == v && comp_of[b] == usize::MAX {
                            comp_of[b] = id;
                            queue.push_back(b);
                        }
                    }
                }
            }
        }
        let mut ok = true;
        for comp in 0..num_comps {
            let verts: Vec<usize> =
                (0..base.num_vertices()).filter(|&v| comp_of[v] == comp).collect();
            let pre_verts: Vec<usize> = verts.iter().flat_map(|&v| c.vertex_fiber(v)).collect();
            let connected = bfs_connected(
                c.total().num_vertices(),
                &total_edges,
                &pre_verts,
                &|t| {
                    let b = c.edge_image(t);
                    !removed[b] && comp_of[base.edge(b).src] == comp
                },
            );
            if !connected {
                ok = false;
                break;
            }
        }
        if ok {
            out.push(Ogod {
                edges: EdgeSet::new(subset.iter().map(|&&i| base.edge(i).id.clone())),
                rank: num_comps,
            });
        }
    }
    out.sort();
    Ok(out)
}

fn random_lengths(g: &MetricGraph, rng: &mut ChaCha8Rng) -> BTreeMap<String, BigRational> {
    g.edges()
        .iter()
        .map(|e| {
            let num = rng.gen_range(1..=24i64);
            let den = rng.gen_range(1..=8i64);
            (e.id.clone(), BigRational::new(BigInt::from(num), BigInt::from(den)))
        })
        .collect()
}

/// Evaluates both sides of the volume identities at random positive
/// rational lengths; equality is exact per trial. The Jacobian values come
/// from the matrix-tree oracle, not from polynomial evaluation.
pub fn numeric_gram_check(c: &DoubleCover, trials: usize, seed: u64) -> Result<Report, Error> {
    if !c.total().is_connected() {
        return Err(Error::TotalDisconnected);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = Report::default();
    let stats = c.dilation_stats();
    let exponent = 1 - stats.m_d as i64 + stats.n_d as i64 - 2 * stats.d as i64;
    let pr = volumes::prym_polynomial(c)?;
    let combinatorial = volumes::prym_volume_combinatorial(c)?;
    let homology = volumes::prym_volume_homology(c)?;
    let kernel = match stats.abc {
        Some(_) => Some(volumes::prym_volume_kernel(c)?),
        None => None,
    };
    for trial in 0..trials {
        let lengths = random_lengths(c.base(), &mut rng);
        // total-graph lengths follow the length rule
        let half = BigRational::new(1.into(), 2.into());
        let total_lengths: BTreeMap<String, BigRational> = c
            .total()
            .edges()
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let l = &lengths[&c.base().edge(c.edge_image(i)).id];
                let l = if c.edge_degree(i) == 2 { l * &half } else { l.clone() };
                (e.id.clone(), l)
            })
            .collect();
        let j_total = matrix_tree_value(c.total(), &total_lengths)?;
        let j_base = matrix_tree_value(c.base(), &lengths)?;
        let pr_val = pr.eval(&lengths)?;
        let thm_a = j_total
            == crate::poly::MultiPoly::pow2(exponent) * &pr_val * &j_base;
        report.push(format!("trial {trial}: thm A numeric"), thm_a, String::new());
        let comb_val = combinatorial.eval(&lengths)?;
        let hom_val = homology.eval(&lengths)?;
        report.push(
            format!("trial {trial}: combinatorial = homology"),
            comb_val == hom_val,
            String::new(),
        );
        if let Some(k) = &kernel {
            report.push(
                format!("trial {trial}: kernel route"),
                k.eval(&lengths)? == comb_val,
                String::new(),
            );
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::testutil::{
        dilated_circle_cover, disc_left_cover, fig1_cover, free_theta_cover, fully_dilated,
    };
    use crate::graph::testutil::{circle, fig1_base, graph, k4, rat, theta};
    use crate::volumes::{enumerate_ogods, jacobian_polynomial};

    fn unit_lengths(g: &MetricGraph) -> BTreeMap<String, BigRational> {
        g.edges().iter().map(|e| (e.id.clone(), rat(1))).collect()
    }

    #[test]
    fn matrix_tree_loop() {
        let g = circle();
        let lengths: BTreeMap<String, BigRational> = [("e".to_string(), rat(5))].into();
        assert_eq!(matrix_tree_value(&g, &lengths).unwrap(), rat(5));
    }

    #[test]
    fn matrix_tree_theta_and_k4() {
        assert_eq!(matrix_tree_value(&theta(), &unit_lengths(&theta())).unwrap(), rat(3));
        assert_eq!(matrix_tree_value(&k4(), &unit_lengths(&k4())).unwrap(), rat(16));
    }

    #[test]
    fn matrix_tree_matches_jacobian_eval() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for g in [circle(), theta(), k4(), fig1_base()] {
            let j = jacobian_polynomial(&g).unwrap();
            for _ in 0..5 {
                let lengths = random_lengths(&g, &mut rng);
                assert_eq!(j.eval(&lengths).unwrap(), matrix_tree_value(&g, &lengths).unwrap());
            }
        }
    }

    #[test]
    fn matrix_tree_rejects_disconnected() {
        let g = graph(&["a", "b"], &[("x", "a", "a", 1)]);
        assert!(matrix_tree_value(&g, &unit_lengths(&g)).is_err());
    }

    #[test]
    fn brute_matches_enumerate() {
        for c in [
            fig1_cover(),
            disc_left_cover(),
            dilated_circle_cover(),
            free_theta_cover(),
            fully_dilated(theta()),
        ] {
            assert_eq!(brute_ogods(&c).unwrap(), enumerate_ogods(&c).unwrap());
        }
    }

    #[test]
    fn numeric_check_passes_on_fixtures() {
        for c in [fig1_cover(), disc_left_cover(), free_theta_cover(), dilated_circle_cover()] {
            let report = numeric_gram_check(&c, 5, 42).unwrap();
            assert!(report.passed(), "{:?}", report.checks);
        }
    }

    #[test]
    fn numeric_check_deterministic() {
        let c = fig1_cover();
        let a = numeric_gram_check(&c, 3, 9).unwrap();
        let b = numeric_gram_check(&c, 3, 9).unwrap();
        let names: Vec<_> = a.checks.iter().map(|x| (&x.name, x.status)).collect();
        let names_b: Vec<_> = b.checks.iter().map(|x| (&x.name, x.status)).collect();
        assert_eq!(names, names_b);
    }
}
