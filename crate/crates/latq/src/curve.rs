//! Sections of multidegree line bundles on rational nodal curves over F_p,
//! twist maps between them, and the induced special-fiber quiver data: one
//! section space per restricted-twist-graph vertex, homothetic vertices
//! merged, plus extraction of a diagonal lattice configuration equivalent to
//! the resulting representation.

use std::collections::BTreeMap;

use crate::lattice::{config_from_exponents, LatticeConfiguration, LatticeError};
use crate::linalg::{fp_inv, fp_mul, fp_neg, fp_pow, fp_sub, is_prime, FieldMatrix, Subspace};
use crate::rep::{linked_chain_equivalence, RepError};
use crate::tropical::{
    condition_eq1, normalize_point, twist, twist_closure_vertices, DualGraph,
    Multidegree, TropicalError, TwistCoeffs,
};

#[derive(Debug, thiserror::Error)]
pub enum CurveError {
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("no adapted basis: {0}")]
    NoAdaptedBasis(String),
    #[error("configuration does not match the section representation")]
    NotEquivalent,
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error(transparent)]
    Tropical(#[from] TropicalError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Node joining component `ca` at coordinate `xa` to component `cb` at `xb`.
/// Sections g must satisfy g_a(xa) = c * g_b(xb).
#[derive(Clone, Debug)]
pub struct Node {
    pub ca: usize,
    pub xa: u64,
    pub cb: usize,
    pub xb: u64,
    pub c: u64,
}

/// Connected curve whose components are projective lines over F_p, glued at
/// nodes with finite, pairwise distinct coordinates on each component.
#[derive(Clone, Debug)]
pub struct RationalNodalCurve {
    pub p: u64,
    pub components: usize,
    pub nodes: Vec<Node>,
}

impl RationalNodalCurve {
    pub fn new(p: u64, components: usize, nodes: Vec<Node>) -> Result<Self, CurveError> {
        if !is_prime(p) {
            return Err(CurveError::InvalidCurve(format!("{p} is not prime")));
        }
        if components == 0 {
            return Err(CurveError::InvalidCurve("need at least one component".into()));
        }
        let mut points: Vec<Vec<u64>> = vec![Vec::new(); components];
        for n in &nodes {
            if n.ca >= components || n.cb >= components || n.ca == n.cb {
                return Err(CurveError::InvalidCurve("bad node endpoints".into()));
            }
            if n.xa >= p || n.xb >= p {
                return Err(CurveError::InvalidCurve("node coordinate out of field".into()));
            }
            if n.c == 0 || n.c >= p {
                return Err(CurveError::InvalidCurve("gluing constant must be a unit".into()));
            }
            points[n.ca].push(n.xa);
            points[n.cb].push(n.xb);
        }
        for pts in &points {
            let mut sorted = pts.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != pts.len() {
                return Err(CurveError::InvalidCurve(
                    "node coordinates must be distinct on each component".into(),
                ));
            }
        }
        let curve = RationalNodalCurve { p, components, nodes };
        curve.dual_graph()?;
        Ok(curve)
    }

    pub fn dual_graph(&self) -> Result<DualGraph, CurveError> {
        let edges: Vec<(usize, usize, usize)> =
            self.nodes.iter().map(|n| (n.ca, n.cb, 1)).collect();
        Ok(DualGraph::new(self.components, &edges)?)
    }
}

fn poly_eval(p: u64, coeffs: &[u64], x: u64) -> u64 {
    coeffs
        .iter()
        .rev()
        .fold(0, |acc, &c| (fp_mul(p, acc, x) + c) % p)
}

fn poly_mul(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + fp_mul(p, ai, bj)) % p;
        }
    }
    out
}

/// Global sections of the line bundle with the given multidegree, as
/// coefficient vectors: component i contributes max(m_i + 1, 0) slots for a
/// polynomial of degree at most m_i, subject to the node equations.
#[derive(Clone, Debug)]
pub struct SectionSpace {
    pub p: u64,
    pub multidegree: Multidegree,
    pub offsets: Vec<usize>,
    pub total_slots: usize,
    pub basis: Vec<Vec<u64>>,
}

impl SectionSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn slots(&self, comp: usize) -> usize {
        let m = self.multidegree[comp];
        if m < 0 {
            0
        } else {
            m as usize + 1
        }
    }
}

pub fn h0(curve: &RationalNodalCurve, m: &[i64]) -> SectionSpace {
    let kappa: Vec<u64> = curve.nodes.iter().map(|n| n.c).collect();
    h0_with(curve, m, &kappa)
}

/// Sections with the node gluing constants overridden: twisting changes the
/// constants, so each twist-graph vertex carries its own.
pub fn h0_with(curve: &RationalNodalCurve, m: &[i64], kappa: &[u64]) -> SectionSpace {
    assert_eq!(m.len(), curve.components);
    assert_eq!(kappa.len(), curve.nodes.len());
    let p = curve.p;
    let mut offsets = Vec::with_capacity(curve.components);
    let mut total = 0usize;
    for &mi in m {
        offsets.push(total);
        total += if mi < 0 { 0 } else { mi as usize + 1 };
    }
    let slots = |comp: usize| -> usize {
        if m[comp] < 0 {
            0
        } else {
            m[comp] as usize + 1
        }
    };
    let mut rows = Vec::with_capacity(curve.nodes.len());
    for (ni, n) in curve.nodes.iter().enumerate() {
        let mut row = vec![0u64; total];
        let mut x = 1u64;
        for k in 0..slots(n.ca) {
            row[offsets[n.ca] + k] = x;
            x = fp_mul(p, x, n.xa);
        }
        let mut y = kappa[ni];
        for k in 0..slots(n.cb) {
            row[offsets[n.cb] + k] = fp_sub(p, row[offsets[n.cb] + k], y);
            y = fp_mul(p, y, n.xb);
        }
        rows.push(row);
    }
    let basis = if rows.is_empty() {
        FieldMatrix::identity(p, total).rows_vec()
    } else {
        FieldMatrix::from_rows(p, &rows).kernel().rows_vec()
    };
    SectionSpace {
        p,
        multidegree: m.to_vec(),
        offsets,
        total_slots: total,
        basis,
    }
}

/// First cohomology dimension, from the Euler characteristic of a connected
/// nodal curve with rational components.
pub fn h1(curve: &RationalNodalCurve, m: &[i64]) -> i64 {
    let chi: i64 = m.iter().map(|&mi| mi + 1).sum::<i64>() - curve.nodes.len() as i64;
    h0(curve, m).dim() as i64 - chi
}

/// Sections of the twisting bundles: for each component u, the section is
/// zero on Z_u and on every other component the monic polynomial vanishing at
/// the nodes shared with Z_u. Each bundle carries a gluing constant per node
/// relating the values on the two branches; at nodes away from Z_u it is the
/// value ratio of the section, at nodes on Z_u (where the section vanishes on
/// both branches) it is free and chosen so that over each node the constants
/// of all twisting bundles multiply to 1. The all-vertex composite is then
/// multiplication by the uniformizer on the nose.
pub struct EnrichedData {
    /// [twist vertex][component] -> coefficients of the section restriction
    pub polys: Vec<Vec<Vec<u64>>>,
    /// [twist vertex][node index] -> gluing constant
    pub sigma: Vec<Vec<u64>>,
}

pub fn enriched_data(curve: &RationalNodalCurve) -> EnrichedData {
    let p = curve.p;
    let nc = curve.components;
    let mut polys: Vec<Vec<Vec<u64>>> = vec![vec![vec![1]; nc]; nc];
    for u in 0..nc {
        polys[u][u] = Vec::new();
        for n in &curve.nodes {
            let (v, pt) = if n.ca == u {
                (n.cb, n.xb)
            } else if n.cb == u {
                (n.ca, n.xa)
            } else {
                continue;
            };
            polys[u][v] = poly_mul(p, &polys[u][v], &[fp_neg(p, pt), 1]);
        }
    }
    let mut sigma = vec![vec![1u64; curve.nodes.len()]; nc];
    for (ni, n) in curve.nodes.iter().enumerate() {
        let mut total = 1u64;
        for u in 0..nc {
            if u == n.ca || u == n.cb {
                continue;
            }
            // nonzero: the u-nodes on each branch are distinct from this node
            let va = poly_eval(p, &polys[u][n.ca], n.xa);
            let vb = poly_eval(p, &polys[u][n.cb], n.xb);
            sigma[u][ni] = fp_mul(p, va, fp_inv(p, vb));
            total = fp_mul(p, total, sigma[u][ni]);
        }
        sigma[n.ca][ni] = fp_inv(p, total);
    }
    EnrichedData { polys, sigma }
}

fn section_coords(space: &SectionSpace, vec: &[u64]) -> Option<Vec<u64>> {
    if space.basis.is_empty() {
        return if vec.iter().all(|&a| a == 0) {
            Some(Vec::new())
        } else {
            None
        };
    }
    FieldMatrix::from_rows(space.p, &space.basis)
        .transpose()
        .solve(vec)
}

/// Matrix of multiplication by the twisting section at u, from sections of
/// multidegree m (with the curve's own node constants) to sections of the
/// twist of m at u (with the constants multiplied by the bundle's), in the h0
/// bases.
pub fn twist_map(
    curve: &RationalNodalCurve,
    m: &[i64],
    u: usize,
) -> Result<FieldMatrix, CurveError> {
    let g = curve.dual_graph()?;
    let data = enriched_data(curve);
    let kappa: Vec<u64> = curve.nodes.iter().map(|n| n.c).collect();
    let kappa2: Vec<u64> = kappa
        .iter()
        .zip(&data.sigma[u])
        .map(|(&a, &s)| fp_mul(curve.p, a, s))
        .collect();
    let src = h0_with(curve, m, &kappa);
    let dst = h0_with(curve, &twist(&g, m, u), &kappa2);
    twist_map_with(curve, &src, &dst, &data.polys[u], u)
}

fn twist_map_with(
    curve: &RationalNodalCurve,
    src: &SectionSpace,
    dst: &SectionSpace,
    s: &[Vec<u64>],
    u: usize,
) -> Result<FieldMatrix, CurveError> {
    let p = curve.p;
    let mut out = FieldMatrix::zero(p, dst.dim(), src.dim());
    for (j, b) in src.basis.iter().enumerate() {
        let mut img = vec![0u64; dst.total_slots];
        for v in 0..curve.components {
            if v == u {
                continue;
            }
            let gv = &b[src.offsets[v]..src.offsets[v] + src.slots(v)];
            let prod = poly_mul(p, &s[v], gv);
            if prod.len() > dst.slots(v) {
                return Err(CurveError::Internal("twisted section degree overflow".into()));
            }
            for (k, &c) in prod.iter().enumerate() {
                img[dst.offsets[v] + k] = c;
            }
        }
        let coords = section_coords(dst, &img)
            .ok_or_else(|| CurveError::Internal("twisted section is not a section".into()))?;
        for (i, &c) in coords.iter().enumerate() {
            out.set(i, j, c);
        }
    }
    Ok(out)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, mut a: usize) -> usize {
        while self.0[a] != a {
            self.0[a] = self.0[self.0[a]];
            a = self.0[a];
        }
        a
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        self.0[ra.max(rb)] = ra.min(rb);
    }
}

/// Section spaces over the restricted twist graph, with twist-map composites
/// between every ordered pair of vertices and homothetic vertices merged: two
/// vertices collapse when a composite between them is invertible (the reverse
/// composite is then a positive uniformizer power, hence zero here).
pub struct SpecialFiberRep {
    pub p: u64,
    pub graph: DualGraph,
    pub coords: Vec<Vec<i64>>,
    pub multidegrees: Vec<Multidegree>,
    pub section_dims: Vec<usize>,
    pub w0_vertex: usize,
    pub concentrated_vertex: Vec<usize>,
    pub class_of: Vec<usize>,
    pub class_reps: Vec<usize>,
    maps: BTreeMap<(usize, usize), FieldMatrix>,
}

impl SpecialFiberRep {
    pub fn num_vertices(&self) -> usize {
        self.coords.len()
    }

    pub fn num_classes(&self) -> usize {
        self.class_reps.len()
    }

    pub fn vertex_map(&self, i: usize, j: usize) -> &FieldMatrix {
        &self.maps[&(i, j)]
    }

    pub fn class_dim(&self, c: usize) -> usize {
        self.section_dims[self.class_reps[c]]
    }

    pub fn class_map(&self, a: usize, b: usize) -> FieldMatrix {
        if a == b {
            FieldMatrix::identity(self.p, self.class_dim(a))
        } else {
            self.maps[&(self.class_reps[a], self.class_reps[b])].clone()
        }
    }

    pub fn rank_profile(&self, a: usize, b: usize) -> usize {
        self.class_map(a, b).rank()
    }
}

/// Build the special-fiber section representation over the restricted twist
/// graph of w0. `divisor` is added to every multidegree before taking
/// sections. Composites are checked to be path independent.
pub fn special_fiber_rep(
    curve: &RationalNodalCurve,
    w0: &[i64],
    coeffs: &TwistCoeffs,
    divisor: &[i64],
) -> Result<SpecialFiberRep, CurveError> {
    let g = curve.dual_graph()?;
    let nv = g.num_vertices();
    if w0.len() != nv || coeffs.len() != nv || divisor.len() != nv {
        return Err(CurveError::Precondition("dimension mismatch".into()));
    }
    if !condition_eq1(coeffs) {
        return Err(CurveError::Precondition(
            "twist coefficients violate the concentration condition".into(),
        ));
    }
    let verts = twist_closure_vertices(&g, w0, coeffs)?;
    let coords: Vec<Vec<i64>> = verts.iter().map(|(c, _)| c.clone()).collect();
    let multidegrees: Vec<Multidegree> = verts
        .iter()
        .map(|(_, w)| w.iter().zip(divisor).map(|(&a, &d)| a + d).collect())
        .collect();
    let find_vertex = |target: &[i64]| coords.iter().position(|c| c == target);
    let w0_vertex = find_vertex(&normalize_point(&vec![0; nv]))
        .ok_or_else(|| CurveError::Precondition("base multidegree not in closure".into()))?;
    let mut concentrated_vertex = Vec::with_capacity(nv);
    for row in coeffs {
        concentrated_vertex.push(
            find_vertex(&normalize_point(row)).ok_or_else(|| {
                CurveError::Precondition("concentrated multidegree not in closure".into())
            })?,
        );
    }
    let p = curve.p;
    let data = enriched_data(curve);
    // node constants induced at a twist coordinate; the constants of all
    // twisting bundles multiply to 1 over each node, so adding the all-ones
    // vector changes nothing and normalized coordinates give canonical spaces
    let kappa_at = |x: &[i64]| -> Vec<u64> {
        curve
            .nodes
            .iter()
            .enumerate()
            .map(|(ni, n)| {
                let mut c = n.c;
                for (u, &xu) in x.iter().enumerate() {
                    c = fp_mul(p, c, fp_pow(p, data.sigma[u][ni], xu as u64));
                }
                c
            })
            .collect()
    };
    let kappas: Vec<Vec<u64>> = coords.iter().map(|x| kappa_at(x)).collect();
    let spaces: Vec<SectionSpace> = multidegrees
        .iter()
        .zip(&kappas)
        .map(|(m, k)| h0_with(curve, m, k))
        .collect();

    let composite = |i: usize, j: usize, ascending: bool| -> Result<FieldMatrix, CurveError> {
        let diff: Vec<i64> = coords[j]
            .iter()
            .zip(&coords[i])
            .map(|(&a, &b)| a - b)
            .collect();
        let t = normalize_point(&diff);
        let mut m = multidegrees[i].clone();
        let mut kappa = kappas[i].clone();
        let mut acc = FieldMatrix::identity(p, spaces[i].dim());
        let mut cur = spaces[i].clone();
        let order: Vec<usize> = if ascending {
            (0..nv).collect()
        } else {
            (0..nv).rev().collect()
        };
        for v in order {
            for _ in 0..t[v] {
                let m2 = twist(&g, &m, v);
                let kappa2: Vec<u64> = kappa
                    .iter()
                    .zip(&data.sigma[v])
                    .map(|(&a, &s)| fp_mul(p, a, s))
                    .collect();
                let next = if m2 == multidegrees[j] && kappa2 == kappas[j] {
                    spaces[j].clone()
                } else {
                    h0_with(curve, &m2, &kappa2)
                };
                let step = twist_map_with(curve, &cur, &next, &data.polys[v], v)?;
                acc = step.mul(&acc);
                m = m2;
                kappa = kappa2;
                cur = next;
            }
        }
        if m != multidegrees[j] || kappa != kappas[j] {
            return Err(CurveError::Internal("composite ends at the wrong space".into()));
        }
        Ok(acc)
    };

    let n_verts = coords.len();
    let mut maps = BTreeMap::new();
    for i in 0..n_verts {
        for j in 0..n_verts {
            if i == j {
                continue;
            }
            let asc = composite(i, j, true)?;
            let desc = composite(i, j, false)?;
            if asc != desc {
                return Err(CurveError::Internal("twist composites are path dependent".into()));
            }
            maps.insert((i, j), asc);
        }
    }

    let mut uf = UnionFind::new(n_verts);
    for (&(i, j), f) in &maps {
        if f.rows == f.cols && f.rank() == f.rows {
            uf.union(i, j);
        }
    }
    let mut roots: Vec<usize> = (0..n_verts).map(|v| uf.find(v)).collect();
    let mut class_reps: Vec<usize> = roots.clone();
    class_reps.sort_unstable();
    class_reps.dedup();
    let class_of: Vec<usize> = roots
        .iter_mut()
        .map(|r| class_reps.binary_search(r).unwrap())
        .collect();

    Ok(SpecialFiberRep {
        p: curve.p,
        graph: g,
        coords,
        multidegrees,
        section_dims: spaces.iter().map(|s| s.dim()).collect(),
        w0_vertex,
        concentrated_vertex,
        class_of,
        class_reps,
        maps,
    })
}

fn verify_profile(
    sfr: &SpecialFiberRep,
    cfg: &LatticeConfiguration,
    class_to_cfg: &[usize],
) -> Result<(), CurveError> {
    let rep = crate::rep::build_m(cfg)?;
    for a in 0..sfr.num_classes() {
        for b in 0..sfr.num_classes() {
            let expected = rep.hom(class_to_cfg[a], class_to_cfg[b]).rank();
            if sfr.rank_profile(a, b) != expected {
                return Err(CurveError::NotEquivalent);
            }
        }
    }
    Ok(())
}

/// Diagonal exponent configuration equivalent to the merged special-fiber
/// representation, with the mapping from its classes to configuration classes.
/// Supported shapes: one class, a chain (two-component curves), or a star
/// around the base class cut out by the kernels of the maps to the
/// concentrated classes (three-component curves). The equivalence is verified
/// by comparing full rank profiles.
pub fn gamma_s_exponents(
    sfr: &SpecialFiberRep,
) -> Result<(LatticeConfiguration, Vec<usize>), CurveError> {
    let p = sfr.p;
    let nc = sfr.num_classes();
    if nc == 1 {
        let d = sfr.class_dim(0);
        let (cfg, merge) = config_from_exponents(p, &[vec![0i64; d]])?;
        return Ok((cfg, vec![merge[0]]));
    }
    let nv = sfr.graph.num_vertices();
    if nv == 2 {
        // chain ordered by twist count difference of the two vertices
        let mut order: Vec<usize> = (0..nc).collect();
        let key = |c: usize| {
            let r = sfr.class_reps[c];
            sfr.coords[r][0] - sfr.coords[r][1]
        };
        order.sort_by_key(|&c| key(c));
        let d = sfr.class_dim(order[0]);
        if order.iter().any(|&c| sfr.class_dim(c) != d) {
            return Err(CurveError::NoAdaptedBasis("unequal section dimensions".into()));
        }
        let g: Vec<FieldMatrix> = (0..nc - 1)
            .map(|k| sfr.class_map(order[k], order[k + 1]))
            .collect();
        let h: Vec<FieldMatrix> = (0..nc - 1)
            .map(|k| sfr.class_map(order[k + 1], order[k]))
            .collect();
        let (cfg, merge) = linked_chain_equivalence(&g, &h)?;
        let mut class_to_cfg = vec![0usize; nc];
        for (pos, &c) in order.iter().enumerate() {
            class_to_cfg[c] = merge[pos];
        }
        verify_profile(sfr, &cfg, &class_to_cfg)?;
        return Ok((cfg, class_to_cfg));
    }
    if nv == 3 {
        let center = sfr.class_of[sfr.w0_vertex];
        let leaves: Vec<usize> = sfr
            .concentrated_vertex
            .iter()
            .map(|&v| sfr.class_of[v])
            .collect();
        let d = sfr.class_dim(center);
        // kernel blocks: images of the maps from the concentrated classes
        let mut blocks: Vec<Subspace> = Vec::with_capacity(nv);
        for i in 0..nv {
            if leaves[i] == center {
                blocks.push(Subspace::zero(p, d));
                continue;
            }
            let back = sfr.class_map(leaves[i], center);
            let block = Subspace::column_space(&back);
            let forward = sfr.class_map(center, leaves[i]);
            if Subspace::kernel_of(&forward) != block {
                return Err(CurveError::NoAdaptedBasis(
                    "kernel does not match the reverse image".into(),
                ));
            }
            blocks.push(block);
        }
        let mut adapted: Vec<Vec<u64>> = Vec::new();
        let mut widths = Vec::with_capacity(nv);
        for b in &blocks {
            widths.push(b.dim());
            adapted.extend(b.basis_rows());
        }
        if adapted.len() != d || FieldMatrix::from_rows(p, &adapted).rank() != d {
            return Err(CurveError::NoAdaptedBasis(
                "kernel blocks are not independent and spanning".into(),
            ));
        }
        let mut rows = vec![vec![0i64; d]];
        for i in 0..nv {
            let mut row = Vec::with_capacity(d);
            for (k, &w) in widths.iter().enumerate() {
                row.extend(std::iter::repeat(if k == i { 0 } else { 1 }).take(w));
            }
            rows.push(row);
        }
        let (cfg, merge) = config_from_exponents(p, &rows)?;
        let mut class_to_cfg = vec![usize::MAX; nc];
        class_to_cfg[center] = merge[0];
        for i in 0..nv {
            let slot = &mut class_to_cfg[leaves[i]];
            if *slot != usize::MAX && *slot != merge[i + 1] {
                return Err(CurveError::NotEquivalent);
            }
            *slot = merge[i + 1];
        }
        if class_to_cfg.iter().any(|&c| c == usize::MAX) {
            return Err(CurveError::NoAdaptedBasis(
                "a class is neither the base nor concentrated".into(),
            ));
        }
        verify_profile(sfr, &cfg, &class_to_cfg)?;
        return Ok((cfg, class_to_cfg));
    }
    Err(CurveError::NoAdaptedBasis(format!(
        "unsupported dual graph with {nv} vertices"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::local_linear_independence;
    use std::collections::BTreeSet;

    const P: u64 = 5;

    /// three lines pairwise glued at one node each
    fn triangle_curve() -> RationalNodalCurve {
        RationalNodalCurve::new(
            P,
            3,
            vec![
                Node { ca: 0, xa: 0, cb: 1, xb: 0, c: 1 },
                Node { ca: 0, xa: 1, cb: 2, xb: 0, c: 1 },
                Node { ca: 1, xa: 1, cb: 2, xb: 1, c: 1 },
            ],
        )
        .unwrap()
    }

    fn star_coeffs(n: usize) -> TwistCoeffs {
        (0..n)
            .map(|i| (0..n).map(|j| i64::from(i != j)).collect())
            .collect()
    }

    #[test]
    fn single_line_sections() {
        let c = RationalNodalCurve::new(P, 1, vec![]).unwrap();
        assert_eq!(h0(&c, &[2]).dim(), 3);
        assert_eq!(h0(&c, &[-1]).dim(), 0);
        assert_eq!(h1(&c, &[2]), 0);
    }

    #[test]
    fn triangle_section_dims() {
        let c = triangle_curve();
        let g = c.dual_graph().unwrap();
        let verts = twist_closure_vertices(&g, &[1, 1, 1], &star_coeffs(3)).unwrap();
        assert_eq!(verts.len(), 7);
        for (_, w) in &verts {
            assert_eq!(h0(&c, w).dim(), 3);
            assert_eq!(h1(&c, w), 0);
        }
    }

    #[test]
    fn twist_map_shapes() {
        let c = triangle_curve();
        let g = c.dual_graph().unwrap();
        let w0 = [1i64, 1, 1];
        for u in 0..3 {
            // one twist: iso onto the concentrated-away multidegree
            let f = twist_map(&c, &w0, u).unwrap();
            assert_eq!((f.rows, f.cols), (3, 3));
            assert_eq!(f.rank(), 3);
        }
        // two twists from w0: corank one, kernel = sections vanishing on the
        // two twisted components
        let f1 = twist_map(&c, &w0, 1).unwrap();
        let f2 = twist_map(&c, &twist(&g, &w0, 1), 2).unwrap();
        assert_eq!(f2.mul(&f1).rank(), 2);
        // twisting at every vertex is multiplication by the uniformizer
        let f3 = twist_map(&c, &twist(&g, &twist(&g, &w0, 1), 2), 0).unwrap();
        assert!(f3.mul(&f2).mul(&f1).is_zero());
    }

    #[test]
    fn triangle_special_fiber_is_star() {
        let c = triangle_curve();
        let sfr = special_fiber_rep(&c, &[1, 1, 1], &star_coeffs(3), &[0, 0, 0]).unwrap();
        assert_eq!(sfr.num_vertices(), 7);
        assert_eq!(sfr.num_classes(), 4);
        let center = sfr.class_of[sfr.w0_vertex];
        let leaves: BTreeSet<usize> = sfr
            .concentrated_vertex
            .iter()
            .map(|&v| sfr.class_of[v])
            .collect();
        assert_eq!(leaves.len(), 3);
        assert!(!leaves.contains(&center));
        for &l in &leaves {
            assert_eq!(sfr.rank_profile(center, l), 2);
            assert_eq!(sfr.rank_profile(l, center), 1);
        }
        // images from the leaves are independent and jointly spanning
        let mut sum = Subspace::zero(P, 3);
        let mut total = 0;
        for &l in &leaves {
            let img = Subspace::column_space(&sfr.class_map(l, center));
            total += img.dim();
            sum = sum.sum(&img);
        }
        assert_eq!((total, sum.dim()), (3, 3));
    }

    #[test]
    fn triangle_gamma_s() {
        let c = triangle_curve();
        let sfr = special_fiber_rep(&c, &[1, 1, 1], &star_coeffs(3), &[0, 0, 0]).unwrap();
        let (cfg, class_to_cfg) = gamma_s_exponents(&sfr).unwrap();
        assert_eq!(cfg.len(), 4);
        assert!(cfg.is_convex().unwrap());
        let (flags, all) = local_linear_independence(&cfg).unwrap();
        assert!(all, "{flags:?}");
        let mut seen: Vec<usize> = class_to_cfg.clone();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), 4);
    }

    #[test]
    fn unbalanced_star_gamma_s() {
        // two nodes between the first pair of components, one elsewhere
        let c = RationalNodalCurve::new(
            7,
            3,
            vec![
                Node { ca: 0, xa: 0, cb: 1, xb: 0, c: 1 },
                Node { ca: 0, xa: 1, cb: 1, xb: 1, c: 1 },
                Node { ca: 0, xa: 2, cb: 2, xb: 0, c: 1 },
                Node { ca: 1, xa: 2, cb: 2, xb: 1, c: 1 },
            ],
        )
        .unwrap();
        let sfr = special_fiber_rep(&c, &[1, 1, 1], &star_coeffs(3), &[1, 1, 0]).unwrap();
        assert_eq!(sfr.num_classes(), 4);
        for v in 0..sfr.num_vertices() {
            assert_eq!(sfr.section_dims[v], 4);
        }
        let center = sfr.class_of[sfr.w0_vertex];
        let ranks: BTreeSet<usize> = (0..3)
            .map(|i| sfr.rank_profile(sfr.class_of[sfr.concentrated_vertex[i]], center))
            .collect();
        assert_eq!(ranks, BTreeSet::from([1, 2]));
        let (cfg, _) = gamma_s_exponents(&sfr).unwrap();
        assert_eq!(cfg.len(), 4);
        assert!(cfg.is_convex().unwrap());
    }

    #[test]
    fn degenerate_pair_becomes_chain() {
        // no nodes between the outer components: the middle concentrated
        // class collapses onto the base class and the shape is a chain
        let c = RationalNodalCurve::new(
            P,
            3,
            vec![
                Node { ca: 0, xa: 0, cb: 1, xb: 0, c: 1 },
                Node { ca: 0, xa: 1, cb: 1, xb: 1, c: 1 },
                Node { ca: 1, xa: 2, cb: 2, xb: 0, c: 1 },
                Node { ca: 1, xa: 3, cb: 2, xb: 1, c: 1 },
            ],
        )
        .unwrap();
        let sfr = special_fiber_rep(&c, &[-1, 3, -1], &star_coeffs(3), &[2, 0, 2]).unwrap();
        assert_eq!(sfr.num_classes(), 3);
        assert_eq!(
            sfr.class_of[sfr.concentrated_vertex[1]],
            sfr.class_of[sfr.w0_vertex]
        );
        let (cfg, class_to_cfg) = gamma_s_exponents(&sfr).unwrap();
        assert_eq!(cfg.len(), 3);
        assert!(cfg.is_convex().unwrap());
        // outer classes sit at distance two through the middle
        let a = class_to_cfg[sfr.class_of[sfr.concentrated_vertex[0]]];
        let b = class_to_cfg[sfr.class_of[sfr.concentrated_vertex[2]]];
        let profile = crate::lattice::smith_pair(
            cfg.classes()[a].representative(),
            cfg.classes()[b].representative(),
        )
        .unwrap();
        let spread = profile.exponents.iter().max().unwrap()
            - profile.exponents.iter().min().unwrap();
        assert_eq!(spread, 2);
    }

    #[test]
    fn two_component_chain() {
        let c = RationalNodalCurve::new(
            P,
            2,
            vec![
                Node { ca: 0, xa: 0, cb: 1, xb: 0, c: 1 },
                Node { ca: 0, xa: 1, cb: 1, xb: 1, c: 1 },
            ],
        )
        .unwrap();
        let coeffs = vec![vec![0, 1], vec![1, 0]];
        let sfr = special_fiber_rep(&c, &[2, 2], &coeffs, &[0, 0]).unwrap();
        assert_eq!(sfr.num_vertices(), 3);
        assert_eq!(sfr.num_classes(), 3);
        for v in 0..3 {
            assert_eq!(sfr.section_dims[v], 4);
        }
        let (cfg, class_to_cfg) = gamma_s_exponents(&sfr).unwrap();
        assert_eq!(cfg.len(), 3);
        assert!(cfg.is_convex().unwrap());
        assert_eq!(class_to_cfg.len(), 3);
    }

    #[test]
    fn merged_chain_collapses() {
        // small degrees: every restricted-twist-graph vertex is homothetic
        let c = RationalNodalCurve::new(
            P,
            2,
            vec![
                Node { ca: 0, xa: 0, cb: 1, xb: 0, c: 1 },
                Node { ca: 0, xa: 1, cb: 1, xb: 1, c: 1 },
            ],
        )
        .unwrap();
        let coeffs = vec![vec![0, 1], vec![1, 0]];
        let sfr = special_fiber_rep(&c, &[1, 1], &coeffs, &[0, 0]).unwrap();
        assert_eq!(sfr.num_classes(), 1);
        let (cfg, class_to_cfg) = gamma_s_exponents(&sfr).unwrap();
        assert_eq!(cfg.len(), 1);
        assert_eq!(class_to_cfg, vec![0]);
    }

    #[test]
    fn enriched_data_consistency() {
        let c = triangle_curve();
        let data = enriched_data(&c);
        for u in 0..3 {
            assert!(data.polys[u][u].is_empty());
            for n in &c.nodes {
                if n.ca == u {
                    assert_eq!(poly_eval(P, &data.polys[u][n.cb], n.xb), 0);
                }
                if n.cb == u {
                    assert_eq!(poly_eval(P, &data.polys[u][n.ca], n.xa), 0);
                }
            }
        }
        // constants over each node multiply to 1 across the twisting bundles
        for ni in 0..c.nodes.len() {
            let prod = (0..3).fold(1u64, |acc, u| fp_mul(P, acc, data.sigma[u][ni]));
            assert_eq!(prod, 1);
        }
    }

    #[test]
    fn rejects_bad_curves() {
        assert!(RationalNodalCurve::new(4, 1, vec![]).is_err());
        assert!(RationalNodalCurve::new(
            P,
            2,
            vec![
                Node { ca: 0, xa: 0, cb: 1, xb: 0, c: 1 },
                Node { ca: 0, xa: 0, cb: 1, xb: 1, c: 1 },
            ],
        )
        .is_err());
        // disconnected
        assert!(RationalNodalCurve::new(P, 2, vec![]).is_err());
    }
}
