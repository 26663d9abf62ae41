//! Lattices in K^d (K = F_p(t)), homothety classes, pair profiles via t-adic
//! Smith normal form, convexity, and lattice configurations with their shift
//! matrix n_{i,j} and induced residue maps.

use crate::laurent::{LaurentMatrix, LaurentScalar};
use crate::linalg::FieldMatrix;

#[derive(Debug, thiserror::Error)]
pub enum LatticeError {
    #[error("basis matrix is not invertible over K")]
    NonInvertibleBasis,
    #[error("ambient dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("operation requires distinct homothety classes")]
    EqualClasses,
    #[error("empty input")]
    Empty,
    #[error("configuration is not convex")]
    NotConvex,
}

/// A free rank-d R-submodule of K^d, R = F_p[t] localized at (t), spanned by
/// the columns of an invertible basis matrix.
#[derive(Clone, Debug)]
pub struct Lattice {
    basis: LaurentMatrix,
    inv: LaurentMatrix,
}

impl Lattice {
    pub fn new(basis: LaurentMatrix) -> Result<Self, LatticeError> {
        if basis.rows != basis.cols {
            return Err(LatticeError::DimensionMismatch(basis.rows, basis.cols));
        }
        let inv = basis.inverse().ok_or(LatticeError::NonInvertibleBasis)?;
        Ok(Lattice { basis, inv })
    }

    /// The standard lattice R^d.
    pub fn standard(p: u64, d: usize) -> Self {
        Lattice {
            basis: LaurentMatrix::identity(p, d),
            inv: LaurentMatrix::identity(p, d),
        }
    }

    /// Diagonal lattice span{t^{e_j} b_j} in the standard basis.
    pub fn diagonal(p: u64, exps: &[i64]) -> Self {
        Lattice {
            basis: LaurentMatrix::t_diagonal(p, exps),
            inv: LaurentMatrix::t_diagonal(p, &exps.iter().map(|&e| -e).collect::<Vec<_>>()),
        }
    }

    pub fn p(&self) -> u64 {
        self.basis.p
    }

    pub fn dim(&self) -> usize {
        self.basis.rows
    }

    pub fn basis(&self) -> &LaurentMatrix {
        &self.basis
    }

    pub fn basis_inv(&self) -> &LaurentMatrix {
        &self.inv
    }

    /// t^k L.
    pub fn scale(&self, k: i64) -> Self {
        Lattice {
            basis: self.basis.scale_t(k),
            inv: self.inv.scale_t(-k),
        }
    }

    /// Membership oracle: v is in L iff basis^{-1} v has all valuations >= 0.
    pub fn contains(&self, v: &[LaurentScalar]) -> bool {
        self.inv
            .apply(v)
            .iter()
            .all(|x| x.valuation().map_or(true, |w| w >= 0))
    }

    /// Equality as R-submodules of K^d.
    pub fn same_module(&self, other: &Lattice) -> bool {
        let m = other.inv.mul(&self.basis);
        m.is_integral() && m.inverse().map_or(false, |mi| mi.is_integral())
    }
}

/// Output of `smith_pair(L1, L2)`: a basis e of L2 (columns of `adapted_basis`)
/// and weakly decreasing exponents a with L1 = span{t^{a_j} e_j}.
#[derive(Clone, Debug)]
pub struct PairProfile {
    pub exponents: Vec<i64>,
    pub adapted_basis: LaurentMatrix,
}

impl PairProfile {
    pub fn spread(&self) -> i64 {
        match (self.exponents.iter().max(), self.exponents.iter().min()) {
            (Some(max), Some(min)) => max - min,
            _ => 0,
        }
    }

    /// The lattice span{t^{max(a_j, k)} e_j}; k = 0 gives L1 cap L2 itself.
    pub fn truncate(&self, k: i64) -> Lattice {
        let exps: Vec<i64> = self.exponents.iter().map(|&a| a.max(k)).collect();
        let basis = self
            .adapted_basis
            .mul(&LaurentMatrix::t_diagonal(self.adapted_basis.p, &exps));
        Lattice::new(basis).expect("adapted basis is invertible")
    }
}

/// Simultaneous adapted basis for a pair of lattices, by t-adic Smith normal
/// form of M = basis(L2)^{-1} basis(L1). Row operations on M (R_i += c R_k,
/// multipliers c of valuation >= 0, so R-unimodular) correspond to column
/// operations on the tracked basis E of L2; column operations on M change only
/// the implicit basis of L1 and leave E alone. Pivot: minimal valuation, ties
/// row-major, for determinism.
pub fn smith_pair(l1: &Lattice, l2: &Lattice) -> Result<PairProfile, LatticeError> {
    if l1.dim() != l2.dim() {
        return Err(LatticeError::DimensionMismatch(l1.dim(), l2.dim()));
    }
    let d = l1.dim();
    let p = l1.p();
    let mut m = l2.basis_inv().mul(l1.basis());
    let mut e = l2.basis().clone();
    let mut exps = vec![0i64; d];

    for k in 0..d {
        // locate pivot: minimal valuation among rows >= k, cols >= k
        let mut best: Option<(i64, usize, usize)> = None;
        for i in k..d {
            for j in k..d {
                if let Some(v) = m.get(i, j).valuation() {
                    if best.map_or(true, |(bv, _, _)| v < bv) {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let (_, pi, pj) = best.expect("invertible matrix has a nonzero entry in every block");
        // move pivot to (k, k): row swap mirrors as column swap on E
        if pi != k {
            swap_rows(&mut m, pi, k);
            e.swap_cols(pi, k);
        }
        if pj != k {
            m.swap_cols(pj, k);
        }
        let pivot = m.get(k, k).clone();
        // clear pivot column with row ops; multipliers lie in R since the pivot
        // valuation is minimal, so E stays a basis of L2
        for i in (k + 1)..d {
            if m.get(i, k).is_zero() {
                continue;
            }
            let c = m.get(i, k).div(&pivot);
            debug_assert!(c.valuation().map_or(true, |v| v >= 0));
            for j in k..d {
                let v = m.get(i, j).sub(&c.mul(m.get(k, j)));
                m.set(i, j, v);
            }
            // row op R_i += (-c) R_k on M  <=>  col op C_k -= (-c) C_i on E
            for r in 0..d {
                let v = e.get(r, k).add(&c.mul(e.get(r, i)));
                e.set(r, k, v);
            }
        }
        // clear pivot row with column ops (no effect on E)
        for j in (k + 1)..d {
            if m.get(k, j).is_zero() {
                continue;
            }
            let c = m.get(k, j).div(&pivot);
            for i in k..d {
                let v = m.get(i, j).sub(&c.mul(m.get(i, k)));
                m.set(i, j, v);
            }
        }
        // absorb the unit part of the pivot into the adapted basis column
        let a = pivot.valuation().expect("pivot nonzero");
        let unit = pivot.mul(&LaurentScalar::t_pow(p, -a));
        for r in 0..d {
            let v = e.get(r, k).mul(&unit);
            e.set(r, k, v);
        }
        exps[k] = a;
    }

    // sort exponents weakly decreasing, permuting adapted-basis columns along
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by_key(|&j| std::cmp::Reverse(exps[j]));
    let mut sorted = LaurentMatrix::zero(p, d, d);
    for (new_j, &old_j) in order.iter().enumerate() {
        for r in 0..d {
            sorted.set(r, new_j, e.get(r, old_j).clone());
        }
    }
    let exponents = order.iter().map(|&j| exps[j]).collect();
    Ok(PairProfile {
        exponents,
        adapted_basis: sorted,
    })
}

fn swap_rows(m: &mut LaurentMatrix, a: usize, b: usize) {
    if a == b {
        return;
    }
    for j in 0..m.cols {
        let x = m.get(a, j).clone();
        let y = m.get(b, j).clone();
        m.set(a, j, y);
        m.set(b, j, x);
    }
}

/// Minimal n with t^n Li contained in Lj. Equals -min valuation over the
/// entries of basis(Lj)^{-1} basis(Li): shifting by t^n makes every coordinate
/// integral exactly when n + min_val >= 0.
pub fn n_min(li: &Lattice, lj: &Lattice) -> i64 {
    let m = lj.basis_inv().mul(li.basis());
    -m.min_valuation().expect("invertible matrix is nonzero")
}

/// k with L1 = t^k L2, if the lattices are homothetic.
pub fn homothety_shift(l1: &Lattice, l2: &Lattice) -> Option<i64> {
    let k = -n_min(l1, l2);
    if l1.same_module(&l2.scale(k)) {
        Some(k)
    } else {
        None
    }
}

/// Representative of a homothety class, normalized so that the minimal
/// smith exponent against the standard lattice is 0 (deterministic equality).
#[derive(Clone, Debug)]
pub struct LatticeClass {
    representative: Lattice,
}

impl LatticeClass {
    pub fn new(l: &Lattice) -> Self {
        let shift = l.basis().min_valuation().expect("invertible basis");
        LatticeClass {
            representative: l.scale(-shift),
        }
    }

    pub fn representative(&self) -> &Lattice {
        &self.representative
    }
}

impl PartialEq for LatticeClass {
    fn eq(&self, other: &Self) -> bool {
        // normalized representatives of homothetic lattices coincide as modules
        self.representative.same_module(&other.representative)
    }
}

/// Classes are adjacent when representatives can be chosen with
/// tL1 strictly inside L2 strictly inside L1, i.e. smith spread 1.
pub fn adjacent(c1: &LatticeClass, c2: &LatticeClass) -> Result<bool, LatticeError> {
    if c1 == c2 {
        return Err(LatticeError::EqualClasses);
    }
    let prof = smith_pair(c1.representative(), c2.representative())?;
    Ok(prof.spread() == 1)
}

/// The R-module L1 cap L2 as a lattice.
pub fn intersect(l1: &Lattice, l2: &Lattice) -> Result<Lattice, LatticeError> {
    let prof = smith_pair(l1, l2)?;
    Ok(prof.truncate(0))
}

/// The ordered chain of classes from c1 to c2, consecutive ones adjacent:
/// with exponents a normalized to min 0, the i-th class is span{t^{max(a_j - i, 0)} e_j}.
pub fn convex_hull_pair(
    c1: &LatticeClass,
    c2: &LatticeClass,
) -> Result<Vec<LatticeClass>, LatticeError> {
    let prof = smith_pair(c1.representative(), c2.representative())?;
    let min = *prof.exponents.iter().min().ok_or(LatticeError::Empty)?;
    let norm: Vec<i64> = prof.exponents.iter().map(|&a| a - min).collect();
    let spread = *norm.iter().max().unwrap();
    let p = prof.adapted_basis.p;
    let mut chain = Vec::new();
    for i in 0..=spread {
        let exps: Vec<i64> = norm.iter().map(|&a| (a - i).max(0)).collect();
        let basis = prof.adapted_basis.mul(&LaurentMatrix::t_diagonal(p, &exps));
        chain.push(LatticeClass::new(
            &Lattice::new(basis).expect("adapted basis invertible"),
        ));
    }
    Ok(chain)
}

/// Convexity of a class set: closed under [L_i cap t^k L_j] for every pair and
/// every integer k; only k between the exponent extremes of the pair can give
/// a class distinct from both inputs.
pub fn is_convex(classes: &[LatticeClass]) -> Result<bool, LatticeError> {
    for (i, ci) in classes.iter().enumerate() {
        for cj in classes.iter().skip(i + 1) {
            let prof = smith_pair(ci.representative(), cj.representative())?;
            let (lo, hi) = (
                *prof.exponents.iter().min().unwrap(),
                *prof.exponents.iter().max().unwrap(),
            );
            for k in lo..=hi {
                let cls = LatticeClass::new(&prof.truncate(k));
                if !classes.iter().any(|c| *c == cls) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// A convex configuration: pairwise non-homothetic normalized representatives
/// plus the cached shift matrix n_{i,j}.
#[derive(Clone, Debug)]
pub struct LatticeConfiguration {
    pub p: u64,
    pub d: usize,
    classes: Vec<LatticeClass>,
    n: Vec<Vec<i64>>,
}

impl LatticeConfiguration {
    /// Build from arbitrary lattices; homothetic duplicates are merged, and the
    /// merge map (input index -> class index) is returned alongside.
    pub fn new(lattices: &[Lattice]) -> Result<(Self, Vec<usize>), LatticeError> {
        let first = lattices.first().ok_or(LatticeError::Empty)?;
        let (p, d) = (first.p(), first.dim());
        let mut classes: Vec<LatticeClass> = Vec::new();
        let mut merge = Vec::with_capacity(lattices.len());
        for l in lattices {
            if l.dim() != d {
                return Err(LatticeError::DimensionMismatch(l.dim(), d));
            }
            let cls = LatticeClass::new(l);
            match classes.iter().position(|c| *c == cls) {
                Some(k) => merge.push(k),
                None => {
                    classes.push(cls);
                    merge.push(classes.len() - 1);
                }
            }
        }
        let m = classes.len();
        let mut n = vec![vec![0i64; m]; m];
        for i in 0..m {
            for j in 0..m {
                if i != j {
                    n[i][j] = n_min(classes[i].representative(), classes[j].representative());
                }
            }
        }
        Ok((LatticeConfiguration { p, d, classes, n }, merge))
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class(&self, i: usize) -> &LatticeClass {
        &self.classes[i]
    }

    pub fn classes(&self) -> &[LatticeClass] {
        &self.classes
    }

    pub fn representative(&self, i: usize) -> &Lattice {
        self.classes[i].representative()
    }

    pub fn shift(&self, i: usize, j: usize) -> i64 {
        self.n[i][j]
    }

    pub fn shift_matrix(&self) -> &Vec<Vec<i64>> {
        &self.n
    }

    pub fn is_convex(&self) -> Result<bool, LatticeError> {
        is_convex(&self.classes)
    }

    /// Matrix of the residue map f_{i,j}: L_i/tL_i -> L_j/tL_j induced by
    /// multiplication with t^{n_{i,j}}, in the representative bases.
    pub fn induced_map(&self, i: usize, j: usize) -> FieldMatrix {
        assert_ne!(i, j, "induced map needs distinct classes");
        let m = self.classes[j]
            .representative()
            .basis_inv()
            .mul(self.classes[i].representative().basis())
            .scale_t(self.n[i][j]);
        // n_{i,j} minimality makes every entry integral; negative valuation here
        // would be an internal bug, and residue() panics on it
        m.residue()
    }
}

/// Smallest convex superset of the given classes (worklist saturation; all
/// generated classes lie between the coordinate-wise exponent extremes, so
/// this terminates).
pub fn convex_closure(classes: &[LatticeClass]) -> Result<Vec<LatticeClass>, LatticeError> {
    if classes.is_empty() {
        return Err(LatticeError::Empty);
    }
    let mut all: Vec<LatticeClass> = Vec::new();
    for c in classes {
        if !all.iter().any(|x| x == c) {
            all.push(c.clone());
        }
    }
    let mut changed = true;
    while changed {
        changed = false;
        let snapshot = all.len();
        for i in 0..snapshot {
            for j in (i + 1)..snapshot {
                let prof = smith_pair(all[i].representative(), all[j].representative())?;
                let (lo, hi) = (
                    *prof.exponents.iter().min().unwrap(),
                    *prof.exponents.iter().max().unwrap(),
                );
                for k in lo..=hi {
                    let cls = LatticeClass::new(&prof.truncate(k));
                    if !all.iter().any(|c| *c == cls) {
                        all.push(cls);
                        changed = true;
                    }
                }
            }
        }
    }
    Ok(all)
}

/// Configuration of diagonal lattices from the rows of an exponent matrix.
/// Convexity is not assumed; pass through `convex_closure` if needed.
pub fn config_from_exponents(
    p: u64,
    exponents: &[Vec<i64>],
) -> Result<(LatticeConfiguration, Vec<usize>), LatticeError> {
    let lattices: Vec<Lattice> = exponents
        .iter()
        .map(|row| Lattice::diagonal(p, row))
        .collect();
    LatticeConfiguration::new(&lattices)
}

/// Configuration attached to a tree on vertices 0..n-1 (d = n): the exponent of
/// lattice u at coordinate v is the number of edges shared by the u-to-root and
/// u-to-v paths in the tree.
pub fn config_from_tree(
    p: u64,
    edges: &[(usize, usize)],
    root: usize,
) -> Result<(LatticeConfiguration, Vec<usize>), LatticeError> {
    let n = edges.len() + 1;
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        assert!(a < n && b < n && a != b, "invalid tree edge");
        adj[a].push(b);
        adj[b].push(a);
    }
    // path_edges[u][v]: edge set of the tree path u -> v, as sorted pairs
    let path = |from: usize, to: usize| -> Vec<(usize, usize)> {
        // BFS parents from `to`, then walk up from `from`
        let mut parent = vec![usize::MAX; n];
        let mut queue = std::collections::VecDeque::from([to]);
        parent[to] = to;
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if parent[y] == usize::MAX {
                    parent[y] = x;
                    queue.push_back(y);
                }
            }
        }
        let mut out = Vec::new();
        let mut cur = from;
        while cur != to {
            let nxt = parent[cur];
            out.push((cur.min(nxt), cur.max(nxt)));
            cur = nxt;
        }
        out
    };
    let mut exps = vec![vec![0i64; n]; n];
    for u in 0..n {
        let to_root = path(u, root);
        for v in 0..n {
            let to_v = path(u, v);
            exps[u][v] = to_root.iter().filter(|e| to_v.contains(e)).count() as i64;
        }
    }
    config_from_exponents(p, &exps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::parse_laurent;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const P: u64 = 5;

    /// The two-lattice fixture used throughout: L1 = R^4,
    /// L2 = t^{-1}Re_1 + Re_2 + Re_3 + Re_4.
    fn fixture() -> (Lattice, Lattice) {
        let l1 = Lattice::standard(P, 4);
        let l2 = Lattice::diagonal(P, &[-1, 0, 0, 0]);
        (l1, l2)
    }

    fn random_unimodular<R: Rng>(p: u64, d: usize, rng: &mut R) -> LaurentMatrix {
        // product of elementary operations: guaranteed R-unimodular
        let mut m = LaurentMatrix::identity(p, d);
        for _ in 0..3 * d {
            let i = rng.gen_range(0..d);
            let j = rng.gen_range(0..d);
            if i == j {
                continue;
            }
            let c = LaurentScalar::from_terms(
                p,
                &[(rng.gen_range(0..3), rng.gen_range(1..p)), (3, rng.gen_range(0..p))],
            );
            // C_j += c * C_i
            for r in 0..d {
                let v = m.get(r, j).add(&c.mul(m.get(r, i)));
                m.set(r, j, v);
            }
        }
        m
    }

    #[test]
    fn smith_pair_identity() {
        let l = Lattice::standard(P, 3);
        let prof = smith_pair(&l, &l).unwrap();
        assert_eq!(prof.exponents, vec![0, 0, 0]);
    }

    #[test]
    fn smith_pair_fixture() {
        let (l1, l2) = fixture();
        let prof = smith_pair(&l1, &l2).unwrap();
        assert_eq!(prof.exponents, vec![1, 0, 0, 0]);
        let back = smith_pair(&l2, &l1).unwrap();
        assert_eq!(back.exponents, vec![0, 0, 0, -1]);
    }

    /// smith_pair contract: adapted basis spans L2 and t^{a_j} e_j spans L1.
    fn check_profile(l1: &Lattice, l2: &Lattice, prof: &PairProfile) {
        let e = Lattice::new(prof.adapted_basis.clone()).unwrap();
        assert!(e.same_module(l2), "adapted basis must span L2");
        let scaled = Lattice::new(
            prof.adapted_basis
                .mul(&LaurentMatrix::t_diagonal(prof.adapted_basis.p, &prof.exponents)),
        )
        .unwrap();
        assert!(scaled.same_module(l1), "t^a e must span L1");
    }

    #[test]
    fn smith_pair_adapted_basis_contract() {
        let (l1, l2) = fixture();
        check_profile(&l1, &l2, &smith_pair(&l1, &l2).unwrap());

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..15 {
            let d = rng.gen_range(1..=4);
            let e1: Vec<i64> = (0..d).map(|_| rng.gen_range(-2..=2)).collect();
            let e2: Vec<i64> = (0..d).map(|_| rng.gen_range(-2..=2)).collect();
            let u1 = random_unimodular(P, d, &mut rng);
            let u2 = random_unimodular(P, d, &mut rng);
            let l1 = Lattice::new(LaurentMatrix::t_diagonal(P, &e1).mul(&u1)).unwrap();
            let l2 = Lattice::new(LaurentMatrix::t_diagonal(P, &e2).mul(&u2)).unwrap();
            check_profile(&l1, &l2, &smith_pair(&l1, &l2).unwrap());
        }
    }

    #[test]
    fn smith_exponents_unimodular_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let d = 3;
            let l1 = Lattice::new(
                LaurentMatrix::t_diagonal(P, &[2, 0, -1]).mul(&random_unimodular(P, d, &mut rng)),
            )
            .unwrap();
            let l2 = Lattice::standard(P, d);
            let base = smith_pair(&l1, &l2).unwrap().exponents;
            // change both bases by unimodular factors: same modules, same exponents
            let l1b = Lattice::new(l1.basis().mul(&random_unimodular(P, d, &mut rng))).unwrap();
            let l2b = Lattice::new(l2.basis().mul(&random_unimodular(P, d, &mut rng))).unwrap();
            assert_eq!(smith_pair(&l1b, &l2b).unwrap().exponents, base);
        }
    }

    #[test]
    fn n_min_fixture_and_membership() {
        let (l1, l2) = fixture();
        assert_eq!(n_min(&l1, &l1), 0);
        assert_eq!(n_min(&l1, &l2), 0);
        assert_eq!(n_min(&l2, &l1), 1);
        // membership oracle agreement: t^n columns land inside, t^(n-1) do not
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let d = rng.gen_range(1..=3);
            let la = Lattice::new(
                LaurentMatrix::t_diagonal(P, &(0..d).map(|_| rng.gen_range(-2..=2)).collect::<Vec<_>>())
                    .mul(&random_unimodular(P, d, &mut rng)),
            )
            .unwrap();
            let lb = Lattice::new(random_unimodular(P, d, &mut rng)).unwrap();
            let n = n_min(&la, &lb);
            for j in 0..d {
                let col: Vec<LaurentScalar> = (0..d)
                    .map(|i| la.basis().get(i, j).mul(&LaurentScalar::t_pow(P, n)))
                    .collect();
                assert!(lb.contains(&col), "t^n L_a must sit inside L_b");
            }
            let some_out = (0..d).any(|j| {
                let col: Vec<LaurentScalar> = (0..d)
                    .map(|i| la.basis().get(i, j).mul(&LaurentScalar::t_pow(P, n - 1)))
                    .collect();
                !lb.contains(&col)
            });
            assert!(some_out, "n_min must be minimal");
        }
    }

    #[test]
    fn n_min_scaling_rule() {
        let (l1, l2) = fixture();
        for k in -2..=2 {
            assert_eq!(n_min(&l1.scale(k), &l2), n_min(&l1, &l2) - k);
        }
    }

    #[test]
    fn homothety() {
        let (l1, l2) = fixture();
        let l = Lattice::standard(P, 3);
        assert_eq!(homothety_shift(&l.scale(3), &l), Some(3));
        assert_eq!(homothety_shift(&l, &l), Some(0));
        assert_eq!(homothety_shift(&l1, &l2), None);
    }

    #[test]
    fn adjacency() {
        let (l1, l2) = fixture();
        let c1 = LatticeClass::new(&l1);
        let c2 = LatticeClass::new(&l2);
        assert!(adjacent(&c1, &c2).unwrap());
        // spread 2 pair
        let far = LatticeClass::new(&Lattice::diagonal(P, &[-2, 0, 0, 0]));
        assert!(!adjacent(&c1, &far).unwrap());
        assert!(matches!(
            adjacent(&c1, &c1.clone()),
            Err(LatticeError::EqualClasses)
        ));
    }

    #[test]
    fn intersection() {
        let (l1, l2) = fixture();
        let both = intersect(&l1, &l2).unwrap();
        assert!(both.same_module(&l1), "L1 inside L2 so L1 cap L2 = L1");
        let l = Lattice::standard(P, 2);
        assert!(intersect(&l, &l).unwrap().same_module(&l));
        for k in -2..=2i64 {
            assert!(intersect(&l, &l.scale(k))
                .unwrap()
                .same_module(&l.scale(k.max(0))));
        }
    }

    #[test]
    fn hull_pair_chain() {
        // exponents (2,1,0): chain of 3 classes, consecutive adjacent
        let c1 = LatticeClass::new(&Lattice::diagonal(P, &[2, 1, 0]));
        let c2 = LatticeClass::new(&Lattice::standard(P, 3));
        let chain = convex_hull_pair(&c1, &c2).unwrap();
        assert_eq!(chain.len(), 3);
        assert_eq!(chain[0], c1);
        assert_eq!(chain[2], c2);
        for w in chain.windows(2) {
            assert!(adjacent(&w[0], &w[1]).unwrap());
        }
        let expect_mid = LatticeClass::new(&Lattice::diagonal(P, &[1, 0, 0]));
        assert_eq!(chain[1], expect_mid);

        // equal classes: singleton
        assert_eq!(convex_hull_pair(&c2, &c2.clone()).unwrap().len(), 1);

        // fixture pair: spread 1, the pair itself
        let (l1, l2) = fixture();
        let pair = convex_hull_pair(&LatticeClass::new(&l1), &LatticeClass::new(&l2)).unwrap();
        assert_eq!(pair.len(), 2);
    }

    #[test]
    fn convexity_and_closure() {
        let c1 = LatticeClass::new(&Lattice::diagonal(P, &[2, 1, 0]));
        let c2 = LatticeClass::new(&Lattice::standard(P, 3));
        assert!(is_convex(&[c2.clone()]).unwrap());
        assert!(!is_convex(&[c1.clone(), c2.clone()]).unwrap()); // midpoint missing
        let closed = convex_closure(&[c1, c2]).unwrap();
        assert_eq!(closed.len(), 3);
        assert!(is_convex(&closed).unwrap());
        // idempotent fixpoint
        assert_eq!(convex_closure(&closed).unwrap().len(), 3);
    }

    #[test]
    fn induced_maps_fixture() {
        let (l1, l2) = fixture();
        let (cfg, _) = LatticeConfiguration::new(&[l1, l2]).unwrap();
        assert_eq!(cfg.len(), 2);
        // representatives are normalized, so only the sum of opposite shifts is
        // pinned (1 = adjacency), not the individual values
        assert_eq!(cfg.shift(0, 1) + cfg.shift(1, 0), 1);
        let f12 = cfg.induced_map(0, 1);
        assert_eq!(f12, FieldMatrix::diagonal(P, &[0, 1, 1, 1]));
        let f21 = cfg.induced_map(1, 0);
        assert_eq!(f21, FieldMatrix::diagonal(P, &[1, 0, 0, 0]));
        // composite in both orders is zero for distinct classes
        assert!(f12.mul(&f21).is_zero());
        assert!(f21.mul(&f12).is_zero());
    }

    #[test]
    fn induced_map_representative_independent() {
        let (l1, l2) = fixture();
        let (cfg_a, _) = LatticeConfiguration::new(&[l1.clone(), l2.clone()]).unwrap();
        // rescale inputs: classes normalize to the same representatives
        let (cfg_b, _) = LatticeConfiguration::new(&[l1.scale(2), l2.scale(-1)]).unwrap();
        assert_eq!(cfg_a.induced_map(0, 1), cfg_b.induced_map(0, 1));
        assert_eq!(cfg_a.induced_map(1, 0), cfg_b.induced_map(1, 0));
        assert_eq!(cfg_a.shift_matrix(), cfg_b.shift_matrix());
    }

    #[test]
    fn duplicate_merging() {
        let l = Lattice::standard(P, 2);
        let (cfg, merge) = LatticeConfiguration::new(&[l.clone(), l.scale(4), l.scale(-1)]).unwrap();
        assert_eq!(cfg.len(), 1);
        assert_eq!(merge, vec![0, 0, 0]);
    }

    #[test]
    fn triangle_inequality() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let d = 3;
            let ls: Vec<Lattice> = (0..3)
                .map(|_| {
                    Lattice::new(
                        LaurentMatrix::t_diagonal(
                            P,
                            &(0..d).map(|_| rng.gen_range(-2..=2)).collect::<Vec<_>>(),
                        )
                        .mul(&random_unimodular(P, d, &mut rng)),
                    )
                    .unwrap()
                })
                .collect();
            let Ok((cfg, _)) = LatticeConfiguration::new(&ls) else {
                continue;
            };
            let m = cfg.len();
            for i in 0..m {
                for j in 0..m {
                    for k in 0..m {
                        assert!(cfg.shift(i, k) + cfg.shift(k, j) >= cfg.shift(i, j));
                    }
                    if i != j {
                        assert!(cfg.shift(i, j) + cfg.shift(j, i) > 0);
                    }
                }
            }
        }
    }

    #[test]
    fn tree_configurations() {
        // 2-vertex path: two-class chain with d = 2
        let (cfg, _) = config_from_tree(P, &[(0, 1)], 0).unwrap();
        assert_eq!(cfg.len(), 2);
        assert_eq!(cfg.d, 2);
        assert!(cfg.is_convex().unwrap());

        // 3-leaf star rooted at the center 0: exponent of leaf u is 1 at every
        // coordinate except u itself (the u-to-root edge is shared with every
        // path leaving u)
        let (cfg, _) = config_from_tree(P, &[(0, 1), (0, 2), (0, 3)], 0).unwrap();
        assert_eq!(cfg.len(), 4);
        assert!(cfg.is_convex().unwrap());
        let expect_leaf1 = LatticeClass::new(&Lattice::diagonal(P, &[1, 0, 1, 1]));
        assert_eq!(*cfg.class(1), expect_leaf1);
    }

    #[test]
    fn lattice_from_parsed_strings() {
        let mut m = LaurentMatrix::zero(P, 2, 2);
        m.set(0, 0, parse_laurent(P, "t^-1").unwrap());
        m.set(0, 1, parse_laurent(P, "1 + t").unwrap());
        m.set(1, 1, parse_laurent(P, "2*t^2").unwrap());
        let l = Lattice::new(m).unwrap();
        assert_eq!(n_min(&l, &Lattice::standard(P, 2)), 1);
    }

    #[test]
    fn d1_degenerate() {
        let a = Lattice::diagonal(P, &[0]);
        let b = Lattice::diagonal(P, &[7]);
        let (cfg, merge) = LatticeConfiguration::new(&[a, b]).unwrap();
        assert_eq!(cfg.len(), 1);
        assert_eq!(merge, vec![0, 0]);
    }
}
