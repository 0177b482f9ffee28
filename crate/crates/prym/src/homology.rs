//! Simplicial 1-chains and first homology of a metric graph, the edge
//! pairing (numeric and symbolic), and the chain-level maps attached to a
//! double cover: pushforward, pullback, and the deck involution.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::cover::{DoubleCover, Involution};
use crate::graph::{Dsu, MetricGraph};
use crate::matrix::{self, IntMatrix};
use crate::poly::{Monomial, MultiPoly};
use crate::Error;

/// Integer 1-chain on a fixed graph, indexed by edge position. Every edge
/// is oriented src -> dst; zero coefficients are not stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Chain {
    coeffs: BTreeMap<usize, BigInt>,
}

impl Chain {
    pub fn zero() -> Self {
        Chain::default()
    }

    pub fn edge(idx: usize) -> Self {
        let mut c = Chain::default();
        c.add_edge(idx, BigInt::one());
        c
    }

    pub fn from_edges(entries: &[(usize, i64)]) -> Self {
        let mut c = Chain::default();
        for &(e, k) in entries {
            c.add_edge(e, BigInt::from(k));
        }
        c
    }

    pub fn coeff(&self, edge: usize) -> BigInt {
        self.coeffs.get(&edge).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &BigInt)> {
        self.coeffs.iter().map(|(&e, c)| (e, c))
    }

    pub fn add_edge(&mut self, edge: usize, k: BigInt) {
        if k.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(edge).or_insert_with(BigInt::zero);
        *entry += k;
        if entry.is_zero() {
            self.coeffs.remove(&edge);
        }
    }

    pub fn add(&self, other: &Chain) -> Chain {
        let mut out = self.clone();
        for (e, c) in other.iter() {
            out.add_edge(e, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Chain) -> Chain {
        let mut out = self.clone();
        for (e, c) in other.iter() {
            out.add_edge(e, -c.clone());
        }
        out
    }

    pub fn scale(&self, k: &BigInt) -> Chain {
        let mut out = Chain::default();
        for (e, c) in self.iter() {
            out.add_edge(e, c * k);
        }
        out
    }

    /// Coefficient vector over all edges of `g`.
    pub fn to_vec(&self, g: &MetricGraph) -> Vec<BigInt> {
        (0..g.num_edges()).map(|e| self.coeff(e)).collect()
    }

    pub fn to_rational_vec(&self, g: &MetricGraph) -> Vec<BigRational> {
        self.to_vec(g).into_iter().map(BigRational::from).collect()
    }
}

/// Boundary of a chain as a vertex vector: each edge contributes +1 at its
/// destination and -1 at its source.
pub fn boundary(g: &MetricGraph, chain: &Chain) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); g.num_vertices()];
    for (e, c) in chain.iter() {
        let edge = g.edge(e);
        out[edge.dst] += c;
        out[edge.src] -= c;
    }
    out
}

pub fn is_cycle(g: &MetricGraph, chain: &Chain) -> bool {
    boundary(g, chain).iter().all(|x| x.is_zero())
}

/// Fundamental cycle basis of H_1(g, Z): one cycle per non-tree edge of
/// the lexicographically first spanning forest (edges greedily taken in id
/// order). Each cycle is the non-tree edge plus the tree path closing it,
/// and the basis has exactly `g.genus()` elements.
pub fn cycle_basis(g: &MetricGraph) -> Vec<Chain> {
    let mut dsu = Dsu::new(g.num_vertices());
    let mut in_tree = vec![false; g.num_edges()];
    for (i, e) in g.edges().iter().enumerate() {
        if dsu.union(e.src, e.dst) {
            in_tree[i] = true;
        }
    }
    // parent pointers within the forest by BFS from each root
    let mut parent: Vec<Option<(usize, i64)>> = vec![None; g.num_vertices()]; // (edge, sign toward root)
    let mut order = Vec::new();
    let mut seen = vec![false; g.num_vertices()];
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); g.num_vertices()];
    for (i, e) in g.edges().iter().enumerate() {
        if in_tree[i] {
            adj[e.src].push(i);
            adj[e.dst].push(i);
        }
    }
    for root in 0..g.num_vertices() {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        order.push(root);
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &i in &adj[v] {
                let e = g.edge(i);
                let w = if e.src == v { e.dst } else { e.src };
                if seen[w] {
                    continue;
                }
                seen[w] = true;
                // sign of edge i when traversed from w toward v
                let sign = if e.src == w { 1 } else { -1 };
                parent[w] = Some((i, sign));
                queue.push_back(w);
                order.push(w);
            }
        }
    }
    // depth for path computation
    let mut depth = vec![0usize; g.num_vertices()];
    for &v in &order {
        if let Some((i, _)) = parent[v] {
            let e = g.edge(i);
            let p = if e.src == v { e.dst } else { e.src };
            depth[v] = depth[p] + 1;
        }
    }
    let path_to_ancestor = |mut v: usize, target_depth: usize, chain: &mut Chain, sign: i64| -> usize {
        while depth[v] > target_depth {
            let (i, s) = parent[v].unwrap();
            chain.add_edge(i, BigInt::from(s * sign));
            let e = g.edge(i);
            v = if e.src == v { e.dst } else { e.src };
        }
        v
    };
    let mut basis = Vec::new();
    for (i, e) in g.edges().iter().enumerate() {
        if in_tree[i] {
            continue;
        }
        let mut c = Chain::edge(i);
        // close up: walk from dst and src to their common ancestor; the
        // dst-side path is traversed with the edge, the src-side against
        let d = depth[e.src].min(depth[e.dst]);
        let mut a = path_to_ancestor(e.dst, d, &mut c, 1);
        let mut b = path_to_ancestor(e.src, d, &mut c, -1);
        while a != b {
            let (ia, sa) = parent[a].unwrap();
            c.add_edge(ia, BigInt::from(sa));
            let ea = g.edge(ia);
            a = if ea.src == a { ea.dst } else { ea.src };
            let (ib, sb) = parent[b].unwrap();
            c.add_edge(ib, BigInt::from(-sb));
            let eb = g.edge(ib);
            b = if eb.src == b { eb.dst } else { eb.src };
        }
        basis.push(c);
    }
    basis
}

/// The edge pairing with numeric lengths: (a, b) = sum_e a_e b_e l(e).
pub fn pairing_numeric(g: &MetricGraph, a: &Chain, b: &Chain) -> BigRational {
    let mut out = BigRational::zero();
    for (e, ca) in a.iter() {
        let cb = b.coeff(e);
        if cb.is_zero() {
            continue;
        }
        out += BigRational::from(ca * cb) * &g.edge(e).length;
    }
    out
}

/// The edge pairing with symbolic lengths: each edge contributes its
/// symbolic length `mult * x_var`, so the result is a polynomial in the
/// length variables.
pub fn pairing_sym(g: &MetricGraph, a: &Chain, b: &Chain) -> MultiPoly {
    let mut out = MultiPoly::zero();
    for (e, ca) in a.iter() {
        let cb = b.coeff(e);
        if cb.is_zero() {
            continue;
        }
        let sym = &g.edge(e).sym;
        let coeff = BigRational::from(ca * cb) * &sym.mult;
        out = out.add(&MultiPoly::term(coeff, Monomial::var(&sym.var)));
    }
    out
}

pub fn gram_numeric(g: &MetricGraph, basis: &[Chain]) -> Vec<Vec<BigRational>> {
    basis
        .iter()
        .map(|a| basis.iter().map(|b| pairing_numeric(g, a, b)).collect())
        .collect()
}

pub fn gram_sym(g: &MetricGraph, basis: &[Chain]) -> Vec<Vec<MultiPoly>> {
    basis.iter().map(|a| basis.iter().map(|b| pairing_sym(g, a, b)).collect()).collect()
}

/// Determinant of the symbolic Gram matrix of a basis of cycles.
pub fn gram_det_sym(g: &MetricGraph, basis: &[Chain]) -> MultiPoly {
    crate::poly::det(gram_sym(g, basis))
}

/// Pushforward of a chain on the total graph: each total edge maps onto
/// its base edge with its pushforward sign.
pub fn pushforward(cover: &DoubleCover, chain: &Chain) -> Chain {
    let mut out = Chain::default();
    for (e, c) in chain.iter() {
        out.add_edge(cover.edge_image(e), c * BigInt::from(cover.push_sign(e)));
    }
    out
}

/// Pullback of a chain on the base graph: an undilated edge pulls back to
/// the signed sum of its two lifts, a dilated edge to twice its single
/// lift. Satisfies pushforward(pullback(c)) = 2c edgewise.
pub fn pullback(cover: &DoubleCover, chain: &Chain) -> Chain {
    let mut out = Chain::default();
    for (e, c) in chain.iter() {
        for t in cover.edge_fiber(e) {
            let mult = BigInt::from(cover.edge_degree(t) as i64 * cover.push_sign(t) as i64);
            out.add_edge(t, c * mult);
        }
    }
    out
}

/// Pushforward along the deck involution.
pub fn involution_push(inv: &Involution, chain: &Chain) -> Chain {
    let mut out = Chain::default();
    for (e, c) in chain.iter() {
        out.add_edge(inv.edge[e], c * BigInt::from(inv.edge_sign[e]));
    }
    out
}

/// Expresses each image chain in the given cycle basis of the codomain
/// graph and assembles the integer matrix whose columns are those
/// coordinate vectors. Fails if an image is not an integral combination of
/// the basis.
pub fn matrix_of(
    images: &[Chain],
    codomain: &MetricGraph,
    codomain_basis: &[Chain],
) -> Result<IntMatrix, Error> {
    let cols: Vec<Vec<BigRational>> =
        codomain_basis.iter().map(|c| c.to_rational_vec(codomain)).collect();
    let mut out = IntMatrix::zero(codomain_basis.len(), images.len());
    for (j, img) in images.iter().enumerate() {
        let b = img.to_rational_vec(codomain);
        let x = matrix::rational_solve(&cols, &b)
            .ok_or_else(|| Error::Internal("image chain not in cycle space".into()))?;
        let x = matrix::to_integers(&x)?;
        for (i, v) in x.into_iter().enumerate() {
            *out.at_mut(i, j) = v;
        }
    }
    Ok(out)
}

/// Integer matrix of the pushforward map H_1(total) -> H_1(base) with
/// respect to the fundamental cycle bases of both graphs.
pub fn pushforward_matrix(cover: &DoubleCover) -> Result<IntMatrix, Error> {
    let total_basis = cycle_basis(cover.total());
    let base_basis = cycle_basis(cover.base());
    let images: Vec<Chain> = total_basis.iter().map(|c| pushforward(cover, c)).collect();
    matrix_of(&images, cover.base(), &base_basis)
}

/// Z-basis of Ker(pushforward) inside H_1(total), as chains. The lattice
/// is saturated by construction (it is the full integer kernel).
pub fn kernel_pushforward_basis(cover: &DoubleCover) -> Result<Vec<Chain>, Error> {
    let total_basis = cycle_basis(cover.total());
    let m = pushforward_matrix(cover)?;
    let k = m.kernel_basis();
    let mut out = Vec::new();
    for j in 0..k.cols {
        let mut c = Chain::default();
        for (i, basis_chain) in total_basis.iter().enumerate() {
            let coef = k.at(i, j).clone();
            if coef.is_zero() {
                continue;
            }
            c = c.add(&basis_chain.scale(&coef));
        }
        out.push(c);
    }
    Ok(out)
}

/// Z-basis of Ker(involution_push -/+ identity) inside H_1(total).
pub fn kernel_involution_basis(cover: &DoubleCover, plus_one: bool) -> Result<Vec<Chain>, Error> {
    let total_basis = cycle_basis(cover.total());
    let inv = cover.involution();
    let images: Vec<Chain> = total_basis.iter().map(|c| involution_push(&inv, c)).collect();
    let m = matrix_of(&images, cover.total(), &total_basis)?;
    // involution_push -+ id: for the anti-invariant part we add the
    // identity, for the invariant part we subtract it
    let id = IntMatrix::identity(total_basis.len());
    let op = if plus_one { m.add(&id) } else { m.sub(&id) };
    let k = op.kernel_basis();
    let mut out = Vec::new();
    for j in 0..k.cols {
        let mut c = Chain::default();
        for (i, basis_chain) in total_basis.iter().enumerate() {
            let coef = k.at(i, j).clone();
            if coef.is_zero() {
                continue;
            }
            c = c.add(&basis_chain.scale(&coef));
        }
        out.push(c);
    }
    Ok(out)
}
