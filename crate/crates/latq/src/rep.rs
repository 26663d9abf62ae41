//! Representations of the bound quiver over the residue field: the ambient
//! representation induced by a configuration, subrepresentations, local linear
//! independence, decomposition into the indecomposables P_v (dimension-1
//! projective at v) and R_e (dimension <= 1, supported on the half-tree A_e),
//! the lifting algorithm, and the equivalence with 0-linked chains.

use crate::lattice::{
    config_from_exponents, smith_pair, LatticeConfiguration, LatticeError,
};
use crate::linalg::{FieldMatrix, Subspace};
use crate::quiver::{build_quiver, QuiverError, Tree, WeightedQuiver};
use rand::Rng;
use std::collections::BTreeMap;

#[derive(Debug, thiserror::Error)]
pub enum RepError {
    #[error("quiver is not a double tree; decomposition formulas require local linear independence")]
    NotDoubleTree,
    #[error("candidate spaces are not a subrepresentation")]
    NotSubrep,
    #[error("relation check failed: {0}")]
    RelationViolation(String),
    #[error("lifting precondition failed at vertex {0}: space too small")]
    LiftPrecondition(usize),
    #[error("linked chain condition violated: {0}")]
    ChainCondition(String),
    #[error("constructed configuration is not equivalent to the chain data")]
    ChainNotEquivalent,
    #[error("invariant violated: {0}")]
    InvariantViolated(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Quiver(#[from] QuiverError),
}

/// A representation of a weighted quiver over F_p: a space dimension per
/// vertex and a matrix per arrow.
#[derive(Clone, Debug)]
pub struct QuiverRep {
    pub p: u64,
    quiver: WeightedQuiver,
    dims: Vec<usize>,
    maps: BTreeMap<(usize, usize), FieldMatrix>,
}

impl QuiverRep {
    pub fn from_parts(
        p: u64,
        quiver: WeightedQuiver,
        dims: Vec<usize>,
        maps: BTreeMap<(usize, usize), FieldMatrix>,
    ) -> Self {
        for (&(i, j), m) in &maps {
            assert!(quiver.has_arrow(i, j), "map on a non-arrow");
            assert_eq!((m.rows, m.cols), (dims[j], dims[i]), "map shape mismatch");
        }
        QuiverRep {
            p,
            quiver,
            dims,
            maps,
        }
    }

    pub fn quiver(&self) -> &WeightedQuiver {
        &self.quiver
    }

    pub fn num_vertices(&self) -> usize {
        self.dims.len()
    }

    pub fn dim(&self, v: usize) -> usize {
        self.dims[v]
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn arrow_map(&self, i: usize, j: usize) -> &FieldMatrix {
        self.maps
            .get(&(i, j))
            .expect("arrow map must exist for every arrow")
    }

    /// Composite along an explicit arrow path (first step applied first).
    pub fn composite(&self, path: &[usize]) -> FieldMatrix {
        assert!(!path.is_empty());
        let mut m = FieldMatrix::identity(self.p, self.dims[path[0]]);
        for s in path.windows(2) {
            m = self.arrow_map(s[0], s[1]).mul(&m);
        }
        m
    }

    /// The canonical map f_{i,j}: composite along a minimal-weight arrow path
    /// (identity for i = j). Any minimal path gives the same matrix once the
    /// relation check passes.
    pub fn hom(&self, i: usize, j: usize) -> FieldMatrix {
        if i == j {
            return FieldMatrix::identity(self.p, self.dims[i]);
        }
        let path = self
            .minimal_path(i, j)
            .expect("representation quiver must connect every ordered pair");
        self.composite(&path)
    }

    /// A minimal-weight arrow path from i to j (Bellman-Ford with predecessors).
    pub fn minimal_path(&self, i: usize, j: usize) -> Option<Vec<usize>> {
        let n = self.num_vertices();
        let q = &self.quiver;
        let mut dist: Vec<Option<i64>> = vec![None; n];
        let mut pred: Vec<usize> = vec![usize::MAX; n];
        dist[i] = Some(0);
        for _ in 0..n {
            let mut changed = false;
            for &(a, b) in q.arrows() {
                if let Some(da) = dist[a] {
                    let cand = da + q.weight(a, b);
                    if dist[b].map_or(true, |db| cand < db) {
                        dist[b] = Some(cand);
                        pred[b] = a;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        dist[j]?;
        let mut path = vec![j];
        let mut cur = j;
        while cur != i {
            cur = pred[cur];
            path.push(cur);
        }
        path.reverse();
        Some(path)
    }

    fn all_paths(&self, i: usize, j: usize, max_edges: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut stack = vec![vec![i]];
        while let Some(path) = stack.pop() {
            let last = *path.last().unwrap();
            if last == j && path.len() > 1 {
                out.push(path.clone());
            }
            if path.len() <= max_edges {
                for &(a, b) in self.quiver.arrows() {
                    if a == last {
                        let mut next = path.clone();
                        next.push(b);
                        stack.push(next);
                    }
                }
            }
        }
        out
    }
}

/// Pairs of equal-endpoint minimal-weight paths where one composite vanishes
/// and the other does not. The theory leaves the structure of such fibers
/// open, so they are reported rather than rejected.
#[derive(Clone, Debug, Default)]
pub struct RelationReport {
    pub mixed_minimal_pairs: Vec<(Vec<usize>, Vec<usize>)>,
}

/// Check the path relations: every non-minimal-weight composite must vanish,
/// and all nonzero minimal composites with equal endpoints must agree.
pub fn check_relations(rep: &QuiverRep) -> Result<RelationReport, RepError> {
    let n = rep.num_vertices();
    let q = rep.quiver();
    let mut report = RelationReport::default();
    for i in 0..n {
        for j in 0..n {
            let paths = rep.all_paths(i, j, n);
            let minimal_weight = q.weight(i, j);
            let mut nonzero_min: Option<(Vec<usize>, FieldMatrix)> = None;
            let mut zero_min: Option<Vec<usize>> = None;
            for path in paths {
                let w = q.path_weight(&path)?;
                let m = rep.composite(&path);
                if w > minimal_weight {
                    if !m.is_zero() {
                        return Err(RepError::RelationViolation(format!(
                            "path {path:?} exceeds weight {minimal_weight} but has nonzero composite"
                        )));
                    }
                } else if m.is_zero() {
                    zero_min = Some(path);
                } else if let Some((ref p0, ref m0)) = nonzero_min {
                    if *m0 != m {
                        return Err(RepError::RelationViolation(format!(
                            "minimal paths {p0:?} and {path:?} have different nonzero composites"
                        )));
                    }
                } else {
                    nonzero_min = Some((path, m));
                }
            }
            if let (Some((p0, _)), Some(pz)) = (&nonzero_min, &zero_min) {
                report.mixed_minimal_pairs.push((p0.clone(), pz.clone()));
            }
        }
    }
    Ok(report)
}

/// The ambient representation of a convex configuration: the residues of the
/// representatives at each vertex, with the induced maps on arrows.
pub fn build_m(cfg: &LatticeConfiguration) -> Result<QuiverRep, RepError> {
    let quiver = build_quiver(cfg);
    let mut maps = BTreeMap::new();
    for &(i, j) in quiver.arrows() {
        maps.insert((i, j), cfg.induced_map(i, j));
    }
    let rep = QuiverRep::from_parts(cfg.p, quiver, vec![cfg.d; cfg.len()], maps);
    check_relations(&rep)?;
    Ok(rep)
}

/// A candidate point of the quiver Grassmannian: one subspace per vertex.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SubRep {
    pub spaces: Vec<Subspace>,
}

impl SubRep {
    pub fn zero(rep: &QuiverRep) -> Self {
        SubRep {
            spaces: (0..rep.num_vertices())
                .map(|v| Subspace::zero(rep.p, rep.dim(v)))
                .collect(),
        }
    }

    pub fn full(rep: &QuiverRep) -> Self {
        SubRep {
            spaces: (0..rep.num_vertices())
                .map(|v| Subspace::full(rep.p, rep.dim(v)))
                .collect(),
        }
    }

    pub fn dim_vector(&self) -> Vec<usize> {
        self.spaces.iter().map(|s| s.dim()).collect()
    }
}

pub fn is_subrep(rep: &QuiverRep, u: &SubRep) -> bool {
    u.spaces.len() == rep.num_vertices()
        && rep.quiver().arrows().iter().all(|&(i, j)| {
            u.spaces[j].contains_subspace(&u.spaces[i].image_under(rep.arrow_map(i, j)))
        })
}

/// The subrepresentation generated by vectors placed at vertices:
/// U_v = sum over generators (w, x) of span f_{w,v}(x). Closed under the
/// arrow maps because a composite of f's is again an f or zero.
pub fn generated_subrep(rep: &QuiverRep, generators: &[(usize, Vec<u64>)]) -> SubRep {
    let mut spaces = Vec::new();
    for v in 0..rep.num_vertices() {
        let rows: Vec<Vec<u64>> = generators
            .iter()
            .map(|(w, x)| rep.hom(*w, v).apply(x))
            .collect();
        spaces.push(Subspace::from_rows(rep.p, rep.dim(v), &rows));
    }
    SubRep { spaces }
}

/// Local linear independence: at each class, the images from the adjacent
/// classes must be linearly independent inside the residue space. Returns the
/// per-vertex verdicts and the overall one.
pub fn local_linear_independence(cfg: &LatticeConfiguration) -> Result<(Vec<bool>, bool), LatticeError> {
    let m = cfg.len();
    let mut verdicts = Vec::with_capacity(m);
    for v in 0..m {
        let mut dim_sum = 0usize;
        let mut total = Subspace::zero(cfg.p, cfg.d);
        for i in 0..m {
            if i == v {
                continue;
            }
            let prof = smith_pair(cfg.representative(i), cfg.representative(v))?;
            if prof.spread() != 1 {
                continue; // not adjacent
            }
            let img = Subspace::column_space(&cfg.induced_map(i, v));
            dim_sum += img.dim();
            total = total.sum(&img);
        }
        verdicts.push(dim_sum == total.dim());
    }
    let all = verdicts.iter().all(|&b| b);
    Ok((verdicts, all))
}

/// Multiplicities of the indecomposable summands of a subrepresentation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Decomposition {
    pub r_v: Vec<usize>,
    pub r_e: BTreeMap<(usize, usize), usize>,
}

impl Decomposition {
    pub fn is_projective(&self) -> bool {
        self.r_e.values().all(|&r| r == 0)
    }

    pub fn total_half_edges(&self) -> usize {
        self.r_e.values().sum()
    }
}

/// Closed-form decomposition multiplicities:
/// r_v = dim U_v - sum over outgoing e of dim(ker f_e cap U_v),
/// r_e = dim(ker f_e cap U_source) - dim f_reverse(U_target),
/// verified against the per-vertex bookkeeping identity.
pub fn decompose(rep: &QuiverRep, u: &SubRep) -> Result<Decomposition, RepError> {
    let tree = rep.quiver().double_tree().ok_or(RepError::NotDoubleTree)?;
    if !is_subrep(rep, u) {
        return Err(RepError::NotSubrep);
    }
    let n = rep.num_vertices();
    let mut r_v = Vec::with_capacity(n);
    for v in 0..n {
        let mut kernel_dims = 0usize;
        for w in tree.neighbors(v) {
            kernel_dims += Subspace::kernel_of(rep.arrow_map(v, w))
                .intersect(&u.spaces[v])
                .dim();
        }
        let dim_v = u.spaces[v].dim();
        if kernel_dims > dim_v {
            return Err(RepError::InvariantViolated(format!(
                "negative projective multiplicity at vertex {v}"
            )));
        }
        r_v.push(dim_v - kernel_dims);
    }
    let mut r_e = BTreeMap::new();
    for (s, t) in tree.oriented_edges() {
        let ker = Subspace::kernel_of(rep.arrow_map(s, t))
            .intersect(&u.spaces[s])
            .dim();
        let back = u.spaces[t].image_under(rep.arrow_map(t, s)).dim();
        if back > ker {
            return Err(RepError::InvariantViolated(format!(
                "negative half-edge multiplicity on ({s},{t})"
            )));
        }
        r_e.insert((s, t), ker - back);
    }
    let dec = Decomposition { r_v, r_e };
    // bookkeeping: dim U_u = sum of all r_v plus the r_e with u on the A side
    let total_p: usize = dec.r_v.iter().sum();
    for u_v in 0..n {
        let mut expect = total_p;
        for (&(s, t), &m) in &dec.r_e {
            if tree.side_mask(s, t) & (1 << u_v) != 0 {
                expect += m;
            }
        }
        if expect != u.spaces[u_v].dim() {
            return Err(RepError::InvariantViolated(format!(
                "dimension bookkeeping fails at vertex {u_v}: expected {expect}, found {}",
                u.spaces[u_v].dim()
            )));
        }
    }
    Ok(dec)
}

pub fn is_projective(rep: &QuiverRep, u: &SubRep) -> Result<bool, RepError> {
    Ok(decompose(rep, u)?.is_projective())
}

/// One dimension-<=1 summand: a spanning vector per supported vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SummandKind {
    /// Full support, generated at the named vertex.
    Projective(usize),
    /// Supported exactly on the half-tree A of the named oriented edge.
    HalfEdge(usize, usize),
}

#[derive(Clone, Debug)]
pub struct Summand {
    pub vectors: Vec<Option<Vec<u64>>>,
    pub kind: SummandKind,
}

/// Vector-level decomposition of a subrepresentation into dimension-<=1
/// summands, by leaf peeling: at a leaf u with neighbor u', either a vector of
/// U_u survives into U_{u'} (peel a full-support summand generated at u), or
/// U_u sticks out of the incoming image (peel a summand supported at {u}), or
/// a kernel vector at u' spans a summand missing u, or f_{u',u} is an
/// isomorphism and the decomposition of the smaller tree transports over.
pub fn explicit_decompose(rep: &QuiverRep, u: &SubRep) -> Result<Vec<Summand>, RepError> {
    let tree = rep.quiver().double_tree().ok_or(RepError::NotDoubleTree)?;
    if !is_subrep(rep, u) {
        return Err(RepError::NotSubrep);
    }
    let mut active = vec![true; rep.num_vertices()];
    let raw = peel_rec(rep, &tree, &mut active, u.spaces.clone());
    let mut out = Vec::new();
    for vectors in raw {
        let kind = classify_summand(rep, &tree, &vectors);
        out.push(Summand { vectors, kind });
    }
    Ok(out)
}

fn active_leaf(tree: &Tree, active: &[bool]) -> Option<(usize, usize)> {
    // a vertex of the active subtree with exactly one active neighbor
    for v in 0..tree.n {
        if !active[v] {
            continue;
        }
        let nbrs: Vec<usize> = tree.neighbors(v).into_iter().filter(|&w| active[w]).collect();
        if nbrs.len() == 1 {
            return Some((v, nbrs[0]));
        }
    }
    None
}

fn peel_rec(
    rep: &QuiverRep,
    tree: &Tree,
    active: &mut Vec<bool>,
    mut spaces: Vec<Subspace>,
) -> Vec<Vec<Option<Vec<u64>>>> {
    let act: Vec<usize> = (0..tree.n).filter(|&v| active[v]).collect();
    if act.is_empty() {
        return vec![];
    }
    if act.len() == 1 {
        let v = act[0];
        return spaces[v]
            .basis_rows()
            .into_iter()
            .map(|row| {
                let mut vecs = vec![None; tree.n];
                vecs[v] = Some(row);
                vecs
            })
            .collect();
    }
    let (u, up) = active_leaf(tree, active).expect("active set is a nonempty subtree");
    if spaces[u].dim() == 0 {
        active[u] = false;
        let res = peel_rec(rep, tree, active, spaces);
        active[u] = true;
        return res;
    }
    let img_out = spaces[u].image_under(rep.arrow_map(u, up));
    if img_out.dim() > 0 {
        // a leaf vector survives outward: peel a full-support piece from u
        let a_u = spaces[u]
            .basis_rows()
            .into_iter()
            .find(|x| !rep.arrow_map(u, up).apply(x).iter().all(|&c| c == 0))
            .expect("nonzero image admits a basis witness");
        let (a, v_spaces) = peel_from(rep, tree, active, &spaces, u, a_u, None);
        let mut rest = peel_rec(rep, tree, active, v_spaces);
        rest.push(a);
        return rest;
    }
    let img_in = spaces[up].image_under(rep.arrow_map(up, u));
    if img_in.dim() < spaces[u].dim() {
        // part of U_u is invisible from the rest: peel a summand supported at u
        let a_u = spaces[u]
            .basis_rows()
            .into_iter()
            .find(|x| !img_in.contains(x))
            .expect("proper subspace misses a basis vector");
        let v_u = complement_containing(&spaces[u], &img_in, &a_u);
        let mut vecs = vec![None; tree.n];
        vecs[u] = Some(a_u);
        spaces[u] = v_u;
        let mut rest = peel_rec(rep, tree, active, spaces);
        rest.push(vecs);
        return rest;
    }
    if spaces[u].dim() < spaces[up].dim() {
        // a kernel vector at u' spans a summand supported away from u
        let ker = Subspace::kernel_of(rep.arrow_map(up, u)).intersect(&spaces[up]);
        let a_up = ker.basis_rows().into_iter().next().expect("kernel is nonzero");
        let (a, mut v_spaces) = peel_from(rep, tree, active, &spaces, up, a_up, Some(u));
        v_spaces[u] = spaces[u].clone();
        let mut rest = peel_rec(rep, tree, active, v_spaces);
        rest.push(a);
        return rest;
    }
    // f_{u',u} restricts to an isomorphism: decompose without u and transport
    active[u] = false;
    let smaller = peel_rec(rep, tree, active, spaces);
    active[u] = true;
    smaller
        .into_iter()
        .map(|mut vecs| {
            if let Some(b) = vecs[up].clone() {
                let img = rep.arrow_map(up, u).apply(&b);
                debug_assert!(img.iter().any(|&c| c != 0), "isomorphism preserves nonzero");
                vecs[u] = Some(img);
            }
            vecs
        })
        .collect()
}

/// Peel one dimension-<=1 summand generated by `a_start` at `start`, touching
/// every active vertex except the branch behind `skip`: returns the summand
/// vectors and the complementary spaces V with U_v = V_v + <a_v> at every
/// affected vertex (direct sum).
fn peel_from(
    rep: &QuiverRep,
    tree: &Tree,
    active: &[bool],
    spaces: &[Subspace],
    start: usize,
    a_start: Vec<u64>,
    skip: Option<usize>,
) -> (Vec<Option<Vec<u64>>>, Vec<Subspace>) {
    let n = tree.n;
    let mut a: Vec<Option<Vec<u64>>> = vec![None; n];
    let mut v_spaces = spaces.to_vec();
    a[start] = Some(a_start.clone());

    // BFS outward from start over the active subtree, never crossing into skip
    let mut order = vec![(start, usize::MAX)];
    let mut head = 0;
    while head < order.len() {
        let (v, parent) = order[head];
        head += 1;
        for w in tree.neighbors(v) {
            if !active[w] || w == parent {
                continue;
            }
            if v == start && Some(w) == skip {
                continue;
            }
            order.push((w, v));
        }
    }

    for &(v, parent) in &order {
        // summand vector at v via the canonical map from start
        if v != start {
            let av = rep.hom(start, v).apply(&a_start);
            a[v] = if av.iter().any(|&c| c != 0) {
                Some(av)
            } else {
                None
            };
        }
        // required content of the complement at v
        let mut required = Subspace::zero(rep.p, rep.dim(v));
        if v != start {
            required = required.sum(&v_spaces[parent].image_under(rep.arrow_map(parent, v)));
        }
        for w in tree.neighbors(v) {
            if w == parent || (v == start && Some(w) == skip) {
                continue;
            }
            if !active[w] {
                continue;
            }
            required = required.sum(
                &Subspace::kernel_of(rep.arrow_map(v, w)).intersect(&spaces[v]),
            );
        }
        match &a[v] {
            Some(av) => {
                debug_assert!(!required.contains(av), "summand vector must avoid the complement");
                v_spaces[v] = complement_containing(&spaces[v], &required, av);
            }
            None => {
                // the summand dies before v; nothing to split off
                debug_assert!(spaces[v].contains_subspace(&required));
                v_spaces[v] = spaces[v].clone();
            }
        }
    }
    (a, v_spaces)
}

/// A complement V of <avoid> in U with required <= V: extend `required` by
/// canonical basis vectors of U staying independent from `avoid`.
fn complement_containing(u: &Subspace, required: &Subspace, avoid: &[u64]) -> Subspace {
    let mut rows = required.basis_rows();
    let mut span = Subspace::from_rows(u.p, u.ambient, &{
        let mut r = rows.clone();
        r.push(avoid.to_vec());
        r
    });
    for b in u.basis_rows() {
        if !span.contains(&b) {
            span = span.sum(&Subspace::from_rows(u.p, u.ambient, &[b.clone()]));
            rows.push(b);
        }
    }
    let v = Subspace::from_rows(u.p, u.ambient, &rows);
    debug_assert_eq!(v.dim() + 1, u.dim());
    debug_assert!(!v.contains(avoid));
    v
}

fn classify_summand(rep: &QuiverRep, tree: &Tree, vectors: &[Option<Vec<u64>>]) -> SummandKind {
    let support: Vec<usize> = (0..tree.n).filter(|&v| vectors[v].is_some()).collect();
    assert!(!support.is_empty());
    if support.len() == tree.n {
        // the generating vertex: all incoming restricted maps vanish there
        for &w in &support {
            let killed = tree.neighbors(w).into_iter().all(|x| {
                let vx = vectors[x].as_ref().unwrap();
                rep.arrow_map(x, w).apply(vx).iter().all(|&c| c == 0)
            });
            if killed {
                return SummandKind::Projective(w);
            }
        }
        panic!("full-support summand without a generating vertex");
    }
    let in_support = |v: usize| vectors[v].is_some();
    let boundary: Vec<(usize, usize)> = tree
        .edges
        .iter()
        .filter_map(|&(x, y)| match (in_support(x), in_support(y)) {
            (true, false) => Some((x, y)),
            (false, true) => Some((y, x)),
            _ => None,
        })
        .collect();
    assert_eq!(
        boundary.len(),
        1,
        "partial support must be a half-tree A_e"
    );
    SummandKind::HalfEdge(boundary[0].0, boundary[0].1)
}

/// Lift fixed r-dimensional spaces on a vertex subset to a full dimension-r
/// subrepresentation: start from the largest compatible spaces W and, while a
/// tree edge joins dimensions (r, > r), shrink the larger space to an
/// r-dimensional one containing all incoming images (deterministic completion
/// by earliest canonical basis vectors).
pub fn lift_to_subrep(
    rep: &QuiverRep,
    fixed: &BTreeMap<usize, Subspace>,
    r: usize,
) -> Result<SubRep, RepError> {
    let tree = rep.quiver().double_tree().ok_or(RepError::NotDoubleTree)?;
    assert!(!fixed.is_empty(), "need at least one fixed vertex");
    let n = rep.num_vertices();
    let mut w: Vec<Subspace> = Vec::with_capacity(n);
    for u in 0..n {
        let mut space = Subspace::full(rep.p, rep.dim(u));
        for (&v, target) in fixed {
            space = space.intersect(&target.preimage_under(&rep.hom(u, v)));
        }
        if space.dim() < r {
            return Err(RepError::LiftPrecondition(u));
        }
        w.push(space);
    }
    loop {
        let Some((_u1, u2)) = tree
            .oriented_edges()
            .into_iter()
            .find(|&(a, b)| w[a].dim() == r && w[b].dim() > r)
        else {
            break;
        };
        // images from all neighbors stay inside any valid shrink
        let mut incoming = Subspace::zero(rep.p, rep.dim(u2));
        for x in tree.neighbors(u2) {
            incoming = incoming.sum(&w[x].image_under(rep.arrow_map(x, u2)));
        }
        debug_assert!(incoming.dim() <= r, "incoming images exceed r");
        let mut rows = incoming.basis_rows();
        let mut span = incoming.clone();
        for b in w[u2].basis_rows() {
            if span.dim() == r {
                break;
            }
            if !span.contains(&b) {
                span = span.sum(&Subspace::from_rows(rep.p, rep.dim(u2), &[b.clone()]));
                rows.push(b);
            }
        }
        w[u2] = Subspace::from_rows(rep.p, rep.dim(u2), &rows);
        debug_assert_eq!(w[u2].dim(), r);
    }
    let out = SubRep { spaces: w };
    if !is_subrep(rep, &out) || out.dim_vector().iter().any(|&d| d != r) {
        return Err(RepError::InvariantViolated(
            "lifted spaces are not an r-dimensional subrepresentation".into(),
        ));
    }
    Ok(out)
}

/// Sample a projective dimension-r subrepresentation by placing r random
/// generators at random vertices; retried until every vertex sees dimension r.
pub fn random_projective_subrep<R: Rng>(
    rep: &QuiverRep,
    r: usize,
    rng: &mut R,
    tries: usize,
) -> Option<SubRep> {
    for _ in 0..tries {
        let gens: Vec<(usize, Vec<u64>)> = (0..r)
            .map(|_| {
                let v = rng.gen_range(0..rep.num_vertices());
                let x: Vec<u64> = (0..rep.dim(v)).map(|_| rng.gen_range(0..rep.p)).collect();
                (v, x)
            })
            .collect();
        let u = generated_subrep(rep, &gens);
        if u.dim_vector().iter().all(|&d| d == r) {
            if let Ok(dec) = decompose(rep, &u) {
                if dec.is_projective() {
                    return Some(u);
                }
            }
        }
    }
    None
}

/// Rebuild a convex chain configuration from 0-linked chain data
/// (g_i: E_i -> E_{i+1}, h_i backwards) and verify the equivalence by rank
/// profiles. Conditions: g h = h g = 0, rank g_i + rank h_i = d, and no rank
/// drop along composites of two consecutive g's or h's.
pub fn linked_chain_equivalence(
    g: &[FieldMatrix],
    h: &[FieldMatrix],
) -> Result<(LatticeConfiguration, Vec<usize>), RepError> {
    if g.is_empty() || g.len() != h.len() {
        return Err(RepError::ChainCondition("need equal nonempty g and h lists".into()));
    }
    let p = g[0].p;
    let d = g[0].rows;
    let n = g.len() + 1;
    for i in 0..g.len() {
        if g[i].rows != d || g[i].cols != d || h[i].rows != d || h[i].cols != d {
            return Err(RepError::ChainCondition("all maps must be d x d".into()));
        }
        if !g[i].mul(&h[i]).is_zero() || !h[i].mul(&g[i]).is_zero() {
            return Err(RepError::ChainCondition(format!("g_{i} h_{i} and h_{i} g_{i} must vanish")));
        }
        if g[i].rank() + h[i].rank() != d {
            return Err(RepError::ChainCondition(format!(
                "rank g_{i} + rank h_{i} must equal {d}"
            )));
        }
    }
    for i in 0..g.len() - 1 {
        if g[i + 1].mul(&g[i]).rank() != g[i].rank() {
            return Err(RepError::ChainCondition(format!("rank drop along g at step {i}")));
        }
        if h[i].mul(&h[i + 1]).rank() != h[i + 1].rank() {
            return Err(RepError::ChainCondition(format!("rank drop along h at step {i}")));
        }
    }
    // block sizes from the rank increments of the forward maps
    let ranks: Vec<usize> = g.iter().map(|m| m.rank()).collect();
    let mut blocks = Vec::with_capacity(n);
    blocks.push(ranks[0]);
    for i in 1..n - 1 {
        blocks.push(ranks[i] - ranks[i - 1]);
    }
    blocks.push(d - ranks[n - 2]);
    // chain row i (1-based): exponent max(i - j, 0) on block j
    let rows: Vec<Vec<i64>> = (1..=n as i64)
        .map(|i| {
            let mut row = Vec::with_capacity(d);
            for (j, &k) in blocks.iter().enumerate() {
                let e = (i - (j as i64 + 1)).max(0);
                row.extend(std::iter::repeat(e).take(k));
            }
            row
        })
        .collect();
    let (cfg, merge) = config_from_exponents(p, &rows)?;
    // rank-profile verification against the chain composites
    let rep = build_m(&cfg)?;
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let chain_rank = if a < b {
                let mut m = FieldMatrix::identity(p, d);
                for k in a..b {
                    m = g[k].mul(&m);
                }
                m.rank()
            } else {
                let mut m = FieldMatrix::identity(p, d);
                for k in (b..a).rev() {
                    m = h[k].mul(&m);
                }
                m.rank()
            };
            let rep_rank = if merge[a] == merge[b] {
                d
            } else {
                rep.hom(merge[a], merge[b]).rank()
            };
            if chain_rank != rep_rank {
                return Err(RepError::ChainNotEquivalent);
            }
        }
    }
    Ok((cfg, merge))
}
