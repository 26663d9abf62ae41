//! The stratification of the quiver Grassmannian of the ambient representation
//! when the configuration is locally linearly independent: the rank-tuple map
//! phi, admissibility of tuples, enumeration of strata and irreducible
//! components, stratum dimensions, the closure order, explicit realization of
//! strata, degeneration moves, and a brute-force point oracle over F_q.

use crate::linalg::{enumerate_subspaces, fp_sub, FieldMatrix, Subspace};
use crate::quiver::Tree;
use crate::rep::{
    explicit_decompose, generated_subrep, is_subrep, Decomposition, QuiverRep, RepError, SubRep,
    SummandKind,
};
use rand::Rng;
use std::collections::BTreeMap;

#[derive(Debug, thiserror::Error)]
pub enum StrataError {
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error("ambient representation is not projective; stratification needs M = sum of P_v")]
    NotProjectiveAmbient,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("no valid choice found over this field; retry over a larger prime")]
    GeneralPosition,
    #[error("enumeration needs {needed} candidates, budget is {budget}")]
    Budget { needed: u128, budget: u128 },
}

/// Tree geometry shared by all stratification computations: for each oriented
/// edge e the half-tree A_e (the vertices on the source side), and adjacency.
#[derive(Clone, Debug)]
pub struct DoubleTreeGeom {
    pub tree: Tree,
    oriented: Vec<(usize, usize)>,
    masks: BTreeMap<(usize, usize), u64>,
}

impl DoubleTreeGeom {
    pub fn new(tree: Tree) -> Self {
        let oriented = tree.oriented_edges();
        let masks = oriented
            .iter()
            .map(|&(s, t)| ((s, t), tree.side_mask(s, t)))
            .collect();
        DoubleTreeGeom {
            tree,
            oriented,
            masks,
        }
    }

    pub fn from_rep(rep: &QuiverRep) -> Result<Self, StrataError> {
        let tree = rep.quiver().double_tree().ok_or(RepError::NotDoubleTree)?;
        Ok(Self::new(tree))
    }

    pub fn num_vertices(&self) -> usize {
        self.tree.n
    }

    pub fn oriented_edges(&self) -> &[(usize, usize)] {
        &self.oriented
    }

    pub fn a_mask(&self, e: (usize, usize)) -> u64 {
        self.masks[&e]
    }

    pub fn a_contains(&self, e: (usize, usize), v: usize) -> bool {
        self.masks[&e] & (1 << v) != 0
    }

    pub fn a_sum(&self, e: (usize, usize), values: &[usize]) -> usize {
        (0..self.tree.n)
            .filter(|&v| self.a_contains(e, v))
            .map(|v| values[v])
            .sum()
    }
}

/// One value per oriented edge: the rank of the restricted arrow map.
pub type StrataTuple = BTreeMap<(usize, usize), usize>;

/// One multiplicity per vertex: the isomorphism type of a projective
/// subrepresentation, labeling an irreducible component.
pub type ComponentLabel = Vec<usize>;

pub fn phi(rep: &QuiverRep, geom: &DoubleTreeGeom, u: &SubRep) -> Result<StrataTuple, StrataError> {
    if !is_subrep(rep, u) {
        return Err(RepError::NotSubrep.into());
    }
    Ok(geom
        .oriented_edges()
        .iter()
        .map(|&(s, t)| ((s, t), u.spaces[s].image_under(rep.arrow_map(s, t)).dim()))
        .collect())
}

/// The two families of inequalities cutting out the image of phi:
/// 0 <= d_e <= r - d_reverse <= sum of ambient multiplicities over A_e, and at
/// each vertex r - sum over outgoing e of (r - d_e) >= 0.
pub fn admissible(d: &StrataTuple, r: usize, geom: &DoubleTreeGeom, d_v: &[usize]) -> bool {
    for &(s, t) in geom.oriented_edges() {
        let de = d[&(s, t)];
        let dr = d[&(t, s)];
        if de + dr > r || r - dr > geom.a_sum((s, t), d_v) {
            return false;
        }
    }
    for v in 0..geom.num_vertices() {
        let deficit: usize = geom
            .tree
            .neighbors(v)
            .into_iter()
            .map(|w| r - d[&(v, w)].min(r))
            .sum();
        if deficit > r {
            return false;
        }
    }
    true
}

fn all_tuples(len: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..=max).map(move |x| {
                    let mut t2 = t.clone();
                    t2.push(x);
                    t2
                })
            })
            .collect();
    }
    out
}

/// All admissible tuples; sorted for stable output.
pub fn enumerate_strata(r: usize, geom: &DoubleTreeGeom, d_v: &[usize]) -> Vec<StrataTuple> {
    let edges = geom.oriented_edges().to_vec();
    all_tuples(edges.len(), r)
        .into_iter()
        .map(|vals| edges.iter().copied().zip(vals).collect::<StrataTuple>())
        .filter(|d| admissible(d, r, geom, d_v))
        .collect()
}

/// Labels of the irreducible components: projective types (r_v) with total r
/// whose phi stays below the ambient ranks on every half-tree.
pub fn components(r: usize, geom: &DoubleTreeGeom, d_v: &[usize]) -> Vec<ComponentLabel> {
    all_tuples(geom.num_vertices(), r)
        .into_iter()
        .filter(|rv| rv.iter().sum::<usize>() == r)
        .filter(|rv| {
            geom.oriented_edges()
                .iter()
                .all(|&e| geom.a_sum(e, rv) <= geom.a_sum(e, d_v))
        })
        .collect()
}

/// phi of the projective subrepresentation with the given type.
pub fn component_phi(label: &ComponentLabel, geom: &DoubleTreeGeom) -> StrataTuple {
    geom.oriented_edges()
        .iter()
        .map(|&e| (e, geom.a_sum(e, label)))
        .collect()
}

/// Summand multiplicities of the stratum with rank tuple D:
/// s_v = r - sum(r - d_e) over outgoing e, s_e = r - d_e - d_reverse.
/// None when some multiplicity would be negative (inadmissible tuple).
pub fn stratum_multiplicities(
    d: &StrataTuple,
    r: usize,
    geom: &DoubleTreeGeom,
) -> Option<Decomposition> {
    let mut r_v = Vec::with_capacity(geom.num_vertices());
    for v in 0..geom.num_vertices() {
        let deficit: usize = geom
            .tree
            .neighbors(v)
            .into_iter()
            .map(|w| r.checked_sub(d[&(v, w)]))
            .sum::<Option<usize>>()?;
        r_v.push(r.checked_sub(deficit)?);
    }
    let mut r_e = BTreeMap::new();
    for &(s, t) in geom.oriented_edges() {
        r_e.insert((s, t), r.checked_sub(d[&(s, t)] + d[&(t, s)])?);
    }
    Some(Decomposition { r_v, r_e })
}

/// Spanning data of an indecomposable as a thin representation: a 0/1
/// dimension per vertex and a 0/1 (zero or identity) scalar per oriented edge.
struct ThinRep {
    dims: u64,
    maps: BTreeMap<(usize, usize), bool>,
}

fn thin_of(kind: &SummandKind, geom: &DoubleTreeGeom) -> ThinRep {
    let (support, root) = match kind {
        // full support, generated at w: maps pointing away from w are identities
        SummandKind::Projective(w) => (u64::MAX >> (64 - geom.num_vertices().max(1)), *w),
        // supported on A_e, generated at the source of e
        SummandKind::HalfEdge(s, t) => (geom.a_mask((*s, *t)), *s),
    };
    let maps = geom
        .oriented_edges()
        .iter()
        .map(|&(a, b)| {
            let in_support = support & (1 << a) != 0 && support & (1 << b) != 0;
            // (a, b) points away from the root iff the root sits on a's side
            ((a, b), in_support && geom.a_contains((a, b), root))
        })
        .collect();
    ThinRep {
        dims: support,
        maps,
    }
}

/// dim Hom between two thin indecomposables, by solving the commutation
/// equations F_t f = g F_s directly. The closed-form table from the vertex
/// and half-tree cases falls out of this computation; solving keeps the edge
/// cases (equal or disjoint supports) honest.
pub fn indecomposable_hom_dim(
    geom: &DoubleTreeGeom,
    p: u64,
    from: &SummandKind,
    to: &SummandKind,
) -> usize {
    let a = thin_of(from, geom);
    let b = thin_of(to, geom);
    let vars: Vec<usize> = (0..geom.num_vertices())
        .filter(|&v| a.dims & b.dims & (1 << v) != 0)
        .collect();
    if vars.is_empty() {
        return 0;
    }
    let idx: BTreeMap<usize, usize> = vars.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut rows = Vec::new();
    for &(s, t) in geom.oriented_edges() {
        let mut row = vec![0u64; vars.len()];
        if a.maps[&(s, t)] {
            if let Some(&c) = idx.get(&t) {
                row[c] = 1;
            }
        }
        if b.maps[&(s, t)] {
            if let Some(&c) = idx.get(&s) {
                row[c] = fp_sub(p, row[c], 1);
            }
        }
        if row.iter().any(|&c| c != 0) {
            rows.push(row);
        }
    }
    if rows.is_empty() {
        return vars.len();
    }
    vars.len() - FieldMatrix::from_rows(p, &rows).rank()
}

/// Dimension of the stratum with the given summand multiplicities inside the
/// quiver Grassmannian of the ambient representation with type (d_v):
/// dim Hom(M, ambient) - dim End(M).
pub fn stratum_dim(
    dec: &Decomposition,
    d_v: &[usize],
    geom: &DoubleTreeGeom,
    p: u64,
) -> i64 {
    let mut kinds: Vec<(SummandKind, usize)> = Vec::new();
    for (v, &m) in dec.r_v.iter().enumerate() {
        if m > 0 {
            kinds.push((SummandKind::Projective(v), m));
        }
    }
    for (&(s, t), &m) in &dec.r_e {
        if m > 0 {
            kinds.push((SummandKind::HalfEdge(s, t), m));
        }
    }
    let mut hom_to_ambient = 0i64;
    let mut end = 0i64;
    for (k1, m1) in &kinds {
        for (v, &dv) in d_v.iter().enumerate() {
            if dv > 0 {
                let h = indecomposable_hom_dim(geom, p, k1, &SummandKind::Projective(v));
                hom_to_ambient += (*m1 * dv * h) as i64;
            }
        }
        for (k2, m2) in &kinds {
            end += (*m1 * *m2 * indecomposable_hom_dim(geom, p, k1, k2)) as i64;
        }
    }
    hom_to_ambient - end
}

/// Coordinatewise order on rank tuples; D1 <= D2 exactly when stratum(D1)
/// lies in the closure of stratum(D2).
pub fn closure_leq(d1: &StrataTuple, d2: &StrataTuple) -> bool {
    d1.iter().all(|(e, &x)| x <= d2[e])
}

/// Degenerate one step up the closure order: trade a pair of opposite
/// half-tree summands along `edge` for a projective generated at its source.
/// The new generator is a + c b where f_edge(b) recovers the opposite
/// generator; c is scanned until all required images are nonzero.
pub fn specialize(
    rep: &QuiverRep,
    geom: &DoubleTreeGeom,
    u: &SubRep,
    edge: (usize, usize),
) -> Result<SubRep, StrataError> {
    let (s, t) = edge;
    let summands = explicit_decompose(rep, u)?;
    let ia = summands
        .iter()
        .position(|x| x.kind == SummandKind::HalfEdge(s, t))
        .ok_or_else(|| StrataError::Precondition(format!("no summand on half-tree ({s},{t})")))?;
    let ib = summands
        .iter()
        .position(|x| x.kind == SummandKind::HalfEdge(t, s))
        .ok_or_else(|| StrataError::Precondition(format!("no summand on half-tree ({t},{s})")))?;
    let a = summands[ia].vectors[s].clone().expect("generator at the source");
    let a_op = summands[ib].vectors[t].clone().expect("generator at the target");
    // a_op lies in the image of the forward map on the full residue space
    let b = rep
        .arrow_map(s, t)
        .solve(&a_op)
        .ok_or_else(|| RepError::InvariantViolated("opposite generator not in the image".into()))?;
    let old_phi = phi(rep, geom, u)?;
    let mut target_phi = old_phi.clone();
    *target_phi.get_mut(&edge).unwrap() += 1;

    let kept: Vec<&crate::rep::Summand> = summands
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != ia && i != ib)
        .map(|(_, x)| x)
        .collect();
    for c in 1..rep.p {
        let gen: Vec<u64> = a
            .iter()
            .zip(&b)
            .map(|(&x, &y)| (x + c * y) % rep.p)
            .collect();
        let moving = generated_subrep(rep, &[(s, gen)]);
        let mut spaces = Vec::with_capacity(rep.num_vertices());
        for v in 0..rep.num_vertices() {
            let mut rows: Vec<Vec<u64>> = kept.iter().filter_map(|x| x.vectors[v].clone()).collect();
            rows.extend(moving.spaces[v].basis_rows());
            spaces.push(Subspace::from_rows(rep.p, rep.dim(v), &rows));
        }
        let cand = SubRep { spaces };
        if cand.dim_vector() == u.dim_vector() && is_subrep(rep, &cand) {
            if phi(rep, geom, &cand)? == target_phi {
                return Ok(cand);
            }
        }
    }
    Err(StrataError::GeneralPosition)
}

/// Build a subrepresentation realizing an admissible rank tuple. Generators
/// follow the generic-coefficient scheme: per vertex u, s_u combinations of
/// all global basis vectors, plus, for each edge pointing into u, s_e
/// combinations of the global basis vectors rooted on the far half-tree.
/// Random coefficients are retried; failure means the field is too small.
pub fn realize_stratum<R: Rng>(
    rep: &QuiverRep,
    geom: &DoubleTreeGeom,
    d: &StrataTuple,
    r: usize,
    rng: &mut R,
    tries: usize,
) -> Result<SubRep, StrataError> {
    let mult = stratum_multiplicities(d, r, geom)
        .ok_or_else(|| StrataError::Precondition("tuple is not admissible".into()))?;
    let ambient = explicit_decompose(rep, &SubRep::full(rep))?;
    // global basis: the vectors of the projective summands of the ambient rep
    let roots: Vec<usize> = ambient
        .iter()
        .map(|x| match x.kind {
            SummandKind::Projective(w) => Ok(w),
            SummandKind::HalfEdge(..) => Err(StrataError::NotProjectiveAmbient),
        })
        .collect::<Result<_, _>>()?;
    for _ in 0..tries {
        let mut gens: Vec<(usize, Vec<u64>)> = Vec::new();
        for u in 0..rep.num_vertices() {
            let combo = |rng: &mut R, allowed: &dyn Fn(usize) -> bool| -> Vec<u64> {
                let mut x = vec![0u64; rep.dim(u)];
                for (gb, &w) in ambient.iter().zip(&roots) {
                    if !allowed(w) {
                        continue;
                    }
                    let c = rng.gen_range(0..rep.p);
                    for (xi, &gi) in x.iter_mut().zip(gb.vectors[u].as_ref().unwrap()) {
                        *xi = (*xi + c * gi) % rep.p;
                    }
                }
                x
            };
            for _ in 0..mult.r_v[u] {
                gens.push((u, combo(rng, &|_| true)));
            }
            for x in geom.tree.neighbors(u) {
                // edge (x, u) points into u; draw from the half-tree behind x
                for _ in 0..mult.r_e[&(x, u)] {
                    gens.push((u, combo(rng, &|w| geom.a_contains((x, u), w))));
                }
            }
        }
        let cand = generated_subrep(rep, &gens);
        if cand.dim_vector().iter().all(|&x| x == r) && phi(rep, geom, &cand)? == *d {
            return Ok(cand);
        }
    }
    Err(StrataError::GeneralPosition)
}

const DEFAULT_BUDGET: u128 = 10_000_000;

fn effective_budget(budget: Option<u128>) -> u128 {
    budget
        .or_else(|| std::env::var("LQ_BUDGET").ok()?.parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

fn subrep_sort_key(u: &SubRep) -> Vec<Vec<u64>> {
    u.spaces.iter().map(|s| {
        s.basis_rows().into_iter().flatten().collect()
    }).collect()
}

fn extend_assignment(
    rep: &QuiverRep,
    cands: &[Vec<Subspace>],
    assigned: &mut Vec<Subspace>,
    out: &mut Vec<SubRep>,
) {
    let v = assigned.len();
    if v == rep.num_vertices() {
        out.push(SubRep {
            spaces: assigned.clone(),
        });
        return;
    }
    'next: for c in &cands[v] {
        for w in 0..v {
            if rep.quiver().has_arrow(v, w)
                && !assigned[w].contains_subspace(&c.image_under(rep.arrow_map(v, w)))
            {
                continue 'next;
            }
            if rep.quiver().has_arrow(w, v)
                && !c.contains_subspace(&assigned[w].image_under(rep.arrow_map(w, v)))
            {
                continue 'next;
            }
        }
        assigned.push(c.clone());
        extend_assignment(rep, cands, assigned, out);
        assigned.pop();
    }
}

/// Every dimension-r subrepresentation over F_p, by filtered enumeration of
/// per-vertex subspaces. The candidate product is capped by `budget`
/// (or the LQ_BUDGET environment variable).
pub fn brute_force_points(
    rep: &QuiverRep,
    r: usize,
    budget: Option<u128>,
) -> Result<Vec<SubRep>, StrataError> {
    let budget = effective_budget(budget);
    let cands: Vec<Vec<Subspace>> = (0..rep.num_vertices())
        .map(|v| enumerate_subspaces(rep.p, rep.dim(v), r))
        .collect();
    let needed: u128 = cands.iter().map(|c| c.len() as u128).product();
    if needed > budget {
        return Err(StrataError::Budget { needed, budget });
    }
    let mut points = search_points(rep, &cands);
    points.sort_by_key(subrep_sort_key);
    Ok(points)
}

#[cfg(feature = "parallel")]
fn search_points(rep: &QuiverRep, cands: &[Vec<Subspace>]) -> Vec<SubRep> {
    use rayon::prelude::*;
    if cands.is_empty() {
        return vec![];
    }
    cands[0]
        .par_iter()
        .map(|first| {
            let mut assigned = vec![first.clone()];
            let mut out = Vec::new();
            extend_assignment(rep, cands, &mut assigned, &mut out);
            out
        })
        .reduce(Vec::new, |mut a, mut b| {
            a.append(&mut b);
            a
        })
}

#[cfg(not(feature = "parallel"))]
fn search_points(rep: &QuiverRep, cands: &[Vec<Subspace>]) -> Vec<SubRep> {
    let mut assigned = Vec::new();
    let mut out = Vec::new();
    extend_assignment(rep, cands, &mut assigned, &mut out);
    out
}
