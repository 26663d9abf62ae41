//! Exact linear algebra over the prime field F_p (p < 2^31, so products fit in u64).
//!
//! Vectors act as columns: a map given by an m x n matrix sends F_p^n to F_p^m.
//! `Subspace` stores its basis as reduced-row-echelon rows, which is a canonical
//! form, so subspace equality is plain struct equality.

use rand::Rng;

pub fn fp_add(p: u64, a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

pub fn fp_sub(p: u64, a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

pub fn fp_neg(p: u64, a: u64) -> u64 {
    if a == 0 {
        0
    } else {
        p - a
    }
}

pub fn fp_mul(p: u64, a: u64, b: u64) -> u64 {
    a * b % p
}

pub fn fp_pow(p: u64, mut base: u64, mut exp: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

pub fn fp_inv(p: u64, a: u64) -> u64 {
    assert!(a % p != 0, "division by zero in F_{p}");
    fp_pow(p, a, p - 2)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn next_prime(n: u64) -> u64 {
    let mut m = n + 1;
    while !is_prime(m) {
        m += 1;
    }
    m
}

/// Dense matrix over F_p, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldMatrix {
    pub p: u64,
    pub rows: usize,
    pub cols: usize,
    data: Vec<u64>,
}

impl std::fmt::Debug for FieldMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "FieldMatrix {}x{} mod {}", self.rows, self.cols, self.p)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[i * self.cols..(i + 1) * self.cols])?;
        }
        Ok(())
    }
}

impl FieldMatrix {
    pub fn zero(p: u64, rows: usize, cols: usize) -> Self {
        assert!(p >= 2 && p < (1 << 31), "p out of supported range");
        FieldMatrix {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(p: u64, n: usize) -> Self {
        let mut m = Self::zero(p, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(p: u64, rows: &[Vec<u64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zero(p, rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged rows");
            for (j, &x) in r.iter().enumerate() {
                m.set(i, j, x % p);
            }
        }
        m
    }

    /// Diagonal square matrix from the given entries.
    pub fn diagonal(p: u64, diag: &[u64]) -> Self {
        let mut m = Self::zero(p, diag.len(), diag.len());
        for (i, &x) in diag.iter().enumerate() {
            m.set(i, i, x % p);
        }
        m
    }

    pub fn random<R: Rng>(p: u64, rows: usize, cols: usize, rng: &mut R) -> Self {
        let mut m = Self::zero(p, rows, cols);
        for x in m.data.iter_mut() {
            *x = rng.gen_range(0..p);
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v % self.p;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows_vec(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.p, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        assert_eq!(self.p, other.p);
        let p = self.p;
        let mut out = Self::zero(p, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = fp_add(p, out.get(i, j), fp_mul(p, a, other.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Apply to a column vector.
    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.cols);
        let p = self.p;
        (0..self.rows)
            .map(|i| {
                let mut acc = 0;
                for j in 0..self.cols {
                    acc = fp_add(p, acc, fp_mul(p, self.get(i, j), v[j]));
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (x, y) in out.data.iter_mut().zip(other.data.iter()) {
            *x = fp_add(self.p, *x, *y);
        }
        out
    }

    pub fn scale(&self, c: u64) -> Self {
        let mut out = self.clone();
        for x in out.data.iter_mut() {
            *x = fp_mul(self.p, *x, c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    /// Stack vertically: self on top of other.
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        assert_eq!(self.p, other.p);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        FieldMatrix {
            p: self.p,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    /// In-place reduction to reduced row echelon form; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let p = self.p;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..self.cols {
                    let (a, b) = (self.get(r, j), self.get(pr, j));
                    self.set(r, j, b);
                    self.set(pr, j, a);
                }
            }
            let inv = fp_inv(p, self.get(r, c));
            for j in 0..self.cols {
                let v = fp_mul(p, self.get(r, j), inv);
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i != r && self.get(i, c) != 0 {
                    let f = self.get(i, c);
                    for j in 0..self.cols {
                        let v = fp_sub(p, self.get(i, j), fp_mul(p, f, self.get(r, j)));
                        self.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis of the right null space {x : Mx = 0}, returned as rows of a k x cols matrix.
    pub fn kernel(&self) -> FieldMatrix {
        let p = self.p;
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_set: Vec<bool> = {
            let mut s = vec![false; self.cols];
            for &c in &pivots {
                s[c] = true;
            }
            s
        };
        let free: Vec<usize> = (0..self.cols).filter(|&c| !pivot_set[c]).collect();
        let mut out = FieldMatrix::zero(p, free.len(), self.cols);
        for (k, &fc) in free.iter().enumerate() {
            out.set(k, fc, 1);
            for (r, &pc) in pivots.iter().enumerate() {
                out.set(k, pc, fp_neg(p, m.get(r, fc)));
            }
        }
        out
    }

    /// Particular solution of Mx = b, if any.
    pub fn solve(&self, b: &[u64]) -> Option<Vec<u64>> {
        assert_eq!(b.len(), self.rows);
        let p = self.p;
        let mut aug = FieldMatrix::zero(p, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, self.cols, b[i]);
        }
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // inconsistent
        }
        let mut x = vec![0; self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug.get(r, self.cols);
        }
        Some(x)
    }

    /// Inverse of a square matrix, if invertible.
    pub fn inverse(&self) -> Option<FieldMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let p = self.p;
        let mut aug = FieldMatrix::zero(p, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, 1);
        }
        let pivots = aug.rref();
        if pivots.len() != n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
            return None;
        }
        let mut inv = FieldMatrix::zero(p, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, aug.get(i, n + j));
            }
        }
        Some(inv)
    }
}

/// A linear subspace of F_p^n in canonical form: basis rows in RREF.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Subspace {
    pub p: u64,
    pub ambient: usize,
    basis: FieldMatrix, // dim x ambient, RREF with no zero rows
}

impl Subspace {
    pub fn zero(p: u64, ambient: usize) -> Self {
        Subspace {
            p,
            ambient,
            basis: FieldMatrix::zero(p, 0, ambient),
        }
    }

    pub fn full(p: u64, ambient: usize) -> Self {
        Subspace {
            p,
            ambient,
            basis: FieldMatrix::identity(p, ambient),
        }
    }

    /// Span of the given rows.
    pub fn from_rows(p: u64, ambient: usize, rows: &[Vec<u64>]) -> Self {
        if rows.is_empty() {
            return Self::zero(p, ambient);
        }
        let mut m = FieldMatrix::from_rows(p, rows);
        assert_eq!(m.cols, ambient);
        let pivots = m.rref();
        let dim = pivots.len();
        let mut basis = FieldMatrix::zero(p, dim, ambient);
        for i in 0..dim {
            for j in 0..ambient {
                basis.set(i, j, m.get(i, j));
            }
        }
        Subspace { p, ambient, basis }
    }

    /// Row span of a matrix.
    pub fn row_space(m: &FieldMatrix) -> Self {
        Self::from_rows(m.p, m.cols, &m.rows_vec())
    }

    /// Column span of a matrix (the image of the map it represents).
    pub fn column_space(m: &FieldMatrix) -> Self {
        Self::row_space(&m.transpose())
    }

    /// Kernel of the map represented by `m` (acting on column vectors).
    pub fn kernel_of(m: &FieldMatrix) -> Self {
        Self::row_space(&m.kernel())
    }

    pub fn dim(&self) -> usize {
        self.basis.rows
    }

    pub fn basis_rows(&self) -> Vec<Vec<u64>> {
        self.basis.rows_vec()
    }

    pub fn basis_matrix(&self) -> &FieldMatrix {
        &self.basis
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        assert_eq!(v.len(), self.ambient);
        // Reduce v against the RREF basis; membership iff the residue vanishes.
        let p = self.p;
        let mut v = v.to_vec();
        for i in 0..self.basis.rows {
            let pivot = (0..self.ambient)
                .find(|&j| self.basis.get(i, j) != 0)
                .expect("no zero rows in canonical basis");
            let c = v[pivot];
            if c != 0 {
                for j in 0..self.ambient {
                    v[j] = fp_sub(p, v[j], fp_mul(p, c, self.basis.get(i, j)));
                }
            }
        }
        v.iter().all(|&x| x == 0)
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis_rows().iter().all(|r| self.contains(r))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient);
        let mut rows = self.basis_rows();
        rows.extend(other.basis_rows());
        Subspace::from_rows(self.p, self.ambient, &rows)
    }

    /// Annihilator: matrix whose rows a satisfy a.v = 0 for all v in the subspace.
    pub fn annihilator(&self) -> FieldMatrix {
        self.basis.kernel()
    }

    /// Intersection via the double annihilator.
    pub fn intersect(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient);
        let ann = self.annihilator().vstack(&other.annihilator());
        Subspace::row_space(&ann.kernel())
    }

    /// Image of this subspace under the map `m` (column-vector convention).
    pub fn image_under(&self, m: &FieldMatrix) -> Subspace {
        assert_eq!(m.cols, self.ambient);
        if self.dim() == 0 {
            return Subspace::zero(self.p, m.rows);
        }
        Subspace::row_space(&self.basis.mul(&m.transpose()))
    }

    /// Preimage {x : m(x) in self} under the map `m`.
    pub fn preimage_under(&self, m: &FieldMatrix) -> Subspace {
        assert_eq!(m.rows, self.ambient);
        Subspace::kernel_of(&self.annihilator().mul(m))
    }

    pub fn random_vector<R: Rng>(&self, rng: &mut R) -> Vec<u64> {
        let p = self.p;
        let mut v = vec![0; self.ambient];
        for row in self.basis_rows() {
            let c = rng.gen_range(0..p);
            for j in 0..self.ambient {
                v[j] = fp_add(p, v[j], fp_mul(p, c, row[j]));
            }
        }
        v
    }
}

/// All r-dimensional subspaces of F_p^n, enumerated via their RREF normal forms:
/// choose pivot columns, then fill the free entries (those right of the pivot and
/// not in a pivot column) with arbitrary field elements.
pub fn enumerate_subspaces(p: u64, n: usize, r: usize) -> Vec<Subspace> {
    assert!(r <= n);
    if r == 0 {
        return vec![Subspace::zero(p, n)];
    }
    let mut out = Vec::new();
    let mut pivots = Vec::new();
    choose_pivots(p, n, r, 0, &mut pivots, &mut out);
    out
}

fn choose_pivots(p: u64, n: usize, r: usize, start: usize, pivots: &mut Vec<usize>, out: &mut Vec<Subspace>) {
    if pivots.len() == r {
        fill_free(p, n, pivots, out);
        return;
    }
    let remaining = r - pivots.len();
    for c in start..=(n - remaining) {
        pivots.push(c);
        choose_pivots(p, n, r, c + 1, pivots, out);
        pivots.pop();
    }
}

fn fill_free(p: u64, n: usize, pivots: &[usize], out: &mut Vec<Subspace>) {
    let r = pivots.len();
    let is_pivot: Vec<bool> = {
        let mut s = vec![false; n];
        for &c in pivots {
            s[c] = true;
        }
        s
    };
    // Free positions: (row i, col j) with j > pivots[i] and j not a pivot column.
    let free: Vec<(usize, usize)> = (0..r)
        .flat_map(|i| {
            let is_pivot = &is_pivot;
            ((pivots[i] + 1)..n).filter_map(move |j| (!is_pivot[j]).then_some((i, j)))
        })
        .collect();
    let total = (p as u128).pow(free.len() as u32);
    assert!(total <= u64::MAX as u128, "subspace enumeration too large");
    for code in 0..total as u64 {
        let mut m = FieldMatrix::zero(p, r, n);
        for (i, &c) in pivots.iter().enumerate() {
            m.set(i, c, 1);
        }
        let mut rem = code;
        for &(i, j) in &free {
            m.set(i, j, rem % p);
            rem /= p;
        }
        out.push(Subspace {
            p,
            ambient: n,
            basis: m,
        });
    }
}

/// Number of r-dimensional subspaces of F_q^n (Gaussian binomial coefficient).
pub fn gaussian_binomial(q: u64, n: u64, r: u64) -> u128 {
    if r > n {
        return 0;
    }
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..r {
        num *= (q as u128).pow((n - i) as u32) - 1;
        den *= (q as u128).pow((i + 1) as u32) - 1;
    }
    num / den
}
