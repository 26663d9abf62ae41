//! Scalars of the fraction field K = F_p(t), stored as t^val * num/den with
//! num and den coprime, both with nonzero constant term, den monic. The t-adic
//! valuation is then just `val`, and the residue mod t of a valuation-0 scalar
//! is num(0)/den(0).
//!
//! Rational functions (not plain Laurent polynomials) are needed because the
//! Smith-normal-form elimination below divides by pivots like 1 + t.

use crate::linalg::{fp_add, fp_inv, fp_mul, fp_neg, fp_sub, FieldMatrix};
use std::fmt;

/// Dense polynomial over F_p, coefficients lowest-degree first, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly {
    pub p: u64,
    pub c: Vec<u64>,
}

impl Poly {
    pub fn zero(p: u64) -> Self {
        Poly { p, c: vec![] }
    }

    pub fn constant(p: u64, a: u64) -> Self {
        let a = a % p;
        Poly {
            p,
            c: if a == 0 { vec![] } else { vec![a] },
        }
    }

    pub fn one(p: u64) -> Self {
        Self::constant(p, 1)
    }

    pub fn from_coeffs(p: u64, c: Vec<u64>) -> Self {
        let mut c: Vec<u64> = c.into_iter().map(|x| x % p).collect();
        while c.last() == Some(&0) {
            c.pop();
        }
        Poly { p, c }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.is_zero() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }

    pub fn constant_term(&self) -> u64 {
        self.c.first().copied().unwrap_or(0)
    }

    pub fn leading(&self) -> u64 {
        self.c.last().copied().unwrap_or(0)
    }

    /// Number of leading t-powers dividing the polynomial.
    pub fn t_order(&self) -> Option<usize> {
        self.c.iter().position(|&x| x != 0)
    }

    pub fn shift_down(&self, k: usize) -> Poly {
        // divide by t^k; caller guarantees divisibility
        assert!(self.c.iter().take(k).all(|&x| x == 0));
        Poly {
            p: self.p,
            c: self.c[k.min(self.c.len())..].to_vec(),
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let p = self.p;
        let n = self.c.len().max(other.c.len());
        let c = (0..n)
            .map(|i| {
                fp_add(
                    p,
                    self.c.get(i).copied().unwrap_or(0),
                    other.c.get(i).copied().unwrap_or(0),
                )
            })
            .collect();
        Poly::from_coeffs(p, c)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let p = self.p;
        let n = self.c.len().max(other.c.len());
        let c = (0..n)
            .map(|i| {
                fp_sub(
                    p,
                    self.c.get(i).copied().unwrap_or(0),
                    other.c.get(i).copied().unwrap_or(0),
                )
            })
            .collect();
        Poly::from_coeffs(p, c)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.p);
        }
        let p = self.p;
        let mut c = vec![0u64; self.c.len() + other.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.c.iter().enumerate() {
                c[i + j] = fp_add(p, c[i + j], fp_mul(p, a, b));
            }
        }
        Poly::from_coeffs(p, c)
    }

    pub fn scale(&self, a: u64) -> Poly {
        Poly::from_coeffs(self.p, self.c.iter().map(|&x| fp_mul(self.p, x, a)).collect())
    }

    /// Euclidean division: (quotient, remainder).
    pub fn divrem(&self, div: &Poly) -> (Poly, Poly) {
        assert!(!div.is_zero(), "polynomial division by zero");
        let p = self.p;
        if self.c.len() < div.c.len() {
            return (Poly::zero(p), self.clone());
        }
        let dd = div.c.len() - 1;
        let lead_inv = fp_inv(p, div.leading());
        let mut rem = self.c.clone();
        let mut quot = vec![0u64; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let coef = rem[i];
            if coef != 0 {
                let q = fp_mul(p, coef, lead_inv);
                quot[i - dd] = q;
                for (k, &dc) in div.c.iter().enumerate() {
                    rem[i - dd + k] = fp_sub(p, rem[i - dd + k], fp_mul(p, q, dc));
                }
            }
        }
        (Poly::from_coeffs(p, quot), Poly::from_coeffs(p, rem))
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(fp_inv(self.p, self.leading()))
    }
}

/// Element of K = F_p(t): t^val * num/den, num and den coprime with nonzero
/// constant terms, den monic. Zero is stored as num = 0, den = 1, val = 0.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LaurentScalar {
    pub p: u64,
    val: i64,
    num: Poly,
    den: Poly,
}

impl LaurentScalar {
    pub fn zero(p: u64) -> Self {
        LaurentScalar {
            p,
            val: 0,
            num: Poly::zero(p),
            den: Poly::one(p),
        }
    }

    pub fn one(p: u64) -> Self {
        Self::from_const(p, 1)
    }

    pub fn from_const(p: u64, a: u64) -> Self {
        Self::from_parts(0, Poly::constant(p, a), Poly::one(p))
    }

    /// t^k.
    pub fn t_pow(p: u64, k: i64) -> Self {
        Self::from_parts(k, Poly::one(p), Poly::one(p))
    }

    /// Build and normalize from raw parts (den nonzero).
    pub fn from_parts(val: i64, num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let p = num.p;
        if num.is_zero() {
            return Self::zero(p);
        }
        let mut val = val;
        let mut num = num;
        let mut den = den;
        if let Some(k) = num.t_order() {
            if k > 0 {
                num = num.shift_down(k);
                val += k as i64;
            }
        }
        if let Some(k) = den.t_order() {
            if k > 0 {
                den = den.shift_down(k);
                val -= k as i64;
            }
        }
        let g = num.gcd(&den);
        if g.degree() != Some(0) {
            num = num.divrem(&g).0;
            den = den.divrem(&g).0;
        }
        let lead = fp_inv(p, den.leading());
        den = den.scale(lead);
        num = num.scale(lead);
        LaurentScalar { p, val, num, den }
    }

    /// Laurent polynomial from exponent/coefficient pairs.
    pub fn from_terms(p: u64, terms: &[(i64, u64)]) -> Self {
        let mut acc = Self::zero(p);
        for &(e, c) in terms {
            let term = Self::from_parts(e, Poly::constant(p, c % p), Poly::one(p));
            acc = acc.add(&term);
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// t-adic valuation; None encodes +infinity (the zero scalar).
    pub fn valuation(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.val)
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let m = self.val.min(other.val);
        let shift = |e: i64, poly: &Poly| -> Poly {
            // multiply by t^(e-m); e >= m so this is a plain shift up
            let k = (e - m) as usize;
            let mut c = vec![0u64; k];
            c.extend_from_slice(&poly.c);
            Poly::from_coeffs(poly.p, c)
        };
        let n1 = shift(self.val, &self.num).mul(&other.den);
        let n2 = shift(other.val, &other.num).mul(&self.den);
        Self::from_parts(m, n1.add(&n2), self.den.mul(&other.den))
    }

    pub fn neg(&self) -> Self {
        LaurentScalar {
            p: self.p,
            val: self.val,
            num: self.num.scale(fp_neg(self.p, 1)),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.p);
        }
        Self::from_parts(
            self.val + other.val,
            self.num.mul(&other.num),
            self.den.mul(&other.den),
        )
    }

    pub fn inverse(&self) -> Self {
        assert!(!self.is_zero(), "inverting zero");
        Self::from_parts(-self.val, self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &Self) -> Self {
        self.mul(&other.inverse())
    }

    /// Residue mod t: 0 for positive valuation, num(0)/den(0) for valuation 0.
    /// Panics on negative valuation (the caller must not reduce a non-integral scalar).
    pub fn residue(&self) -> u64 {
        match self.valuation() {
            None => 0,
            Some(v) if v > 0 => 0,
            Some(0) => fp_mul(
                self.p,
                self.num.constant_term(),
                fp_inv(self.p, self.den.constant_term()),
            ),
            Some(_) => panic!("residue of scalar with negative valuation"),
        }
    }

    /// True when the scalar is c * t^k (unit times a t-power).
    pub fn is_monomial(&self) -> bool {
        self.num.degree() == Some(0) && self.den.degree() == Some(0)
    }
}

impl fmt::Display for LaurentScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let term = |e: i64| -> String {
            match e {
                0 => String::new(),
                1 => "t".into(),
                k => format!("t^{k}"),
            }
        };
        let poly_str = |poly: &Poly, base: i64| -> String {
            let mut parts = Vec::new();
            for (i, &c) in poly.c.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let e = base + i as i64;
                let t = term(e);
                if t.is_empty() {
                    parts.push(format!("{c}"));
                } else if c == 1 {
                    parts.push(t);
                } else {
                    parts.push(format!("{c}*{t}"));
                }
            }
            parts.join(" + ")
        };
        if self.den.degree() == Some(0) {
            write!(f, "{}", poly_str(&self.num, self.val))
        } else {
            write!(f, "({}) / ({})", poly_str(&self.num, self.val), poly_str(&self.den, 0))
        }
    }
}

/// Parse errors carry a byte offset into the input.
#[derive(Debug, thiserror::Error)]
#[error("parse error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

/// Parse a Laurent polynomial: `term (('+'|'-') term)*` where
/// `term := coeff ('*'? 't' ('^' int)?)? | coeff`. Coefficients reduce mod p.
pub fn parse_laurent(p: u64, input: &str) -> Result<LaurentScalar, ParseError> {
    let bytes = input.as_bytes();
    let mut pos = 0usize;
    let mut terms: Vec<(i64, u64)> = Vec::new();
    let err = |pos: usize, m: &str| ParseError {
        offset: pos,
        message: m.to_string(),
    };
    let skip_ws = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };
    let parse_int = |pos: &mut usize| -> Result<i64, ParseError> {
        let start = *pos;
        let mut sign = 1i64;
        if *pos < bytes.len() && (bytes[*pos] == b'-' || bytes[*pos] == b'+') {
            if bytes[*pos] == b'-' {
                sign = -1;
            }
            *pos += 1;
        }
        let digits_start = *pos;
        while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
            *pos += 1;
        }
        if *pos == digits_start {
            return Err(err(start, "expected integer"));
        }
        let v: i64 = input[digits_start..*pos]
            .parse()
            .map_err(|_| err(start, "integer out of range"))?;
        Ok(sign * v)
    };

    skip_ws(&mut pos);
    if pos == bytes.len() {
        return Err(err(pos, "empty input"));
    }
    let mut first = true;
    loop {
        skip_ws(&mut pos);
        let mut sign = 1i64;
        if pos < bytes.len() && (bytes[pos] == b'+' || bytes[pos] == b'-') {
            if first && bytes[pos] == b'+' {
                return Err(err(pos, "unexpected leading '+'"));
            }
            if bytes[pos] == b'-' {
                sign = -1;
            }
            pos += 1;
            skip_ws(&mut pos);
        } else if !first {
            break;
        }
        // term: optional coefficient, optional t-part; at least one present
        let mut coeff: Option<i64> = None;
        if pos < bytes.len() && bytes[pos].is_ascii_digit() {
            coeff = Some(parse_int(&mut pos)?);
            skip_ws(&mut pos);
            if pos < bytes.len() && bytes[pos] == b'*' {
                pos += 1;
                skip_ws(&mut pos);
                if pos == bytes.len() || bytes[pos] != b't' {
                    return Err(err(pos, "expected 't' after '*'"));
                }
            }
        }
        let mut exp = 0i64;
        let mut has_t = false;
        if pos < bytes.len() && bytes[pos] == b't' {
            has_t = true;
            pos += 1;
            if pos < bytes.len() && bytes[pos] == b'^' {
                pos += 1;
                exp = parse_int(&mut pos)?;
            } else {
                exp = 1;
            }
        }
        if coeff.is_none() && !has_t {
            return Err(err(pos, "expected term"));
        }
        let c = coeff.unwrap_or(1) * sign;
        let c_mod = c.rem_euclid(p as i64) as u64;
        terms.push((exp, c_mod));
        first = false;
        skip_ws(&mut pos);
        if pos == bytes.len() {
            break;
        }
        if bytes[pos] != b'+' && bytes[pos] != b'-' {
            return Err(err(pos, "expected '+' or '-'"));
        }
    }
    Ok(LaurentScalar::from_terms(p, &terms))
}

/// Dense matrix over K = F_p(t).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LaurentMatrix {
    pub p: u64,
    pub rows: usize,
    pub cols: usize,
    entries: Vec<LaurentScalar>,
}

impl LaurentMatrix {
    pub fn zero(p: u64, rows: usize, cols: usize) -> Self {
        LaurentMatrix {
            p,
            rows,
            cols,
            entries: vec![LaurentScalar::zero(p); rows * cols],
        }
    }

    pub fn identity(p: u64, n: usize) -> Self {
        let mut m = Self::zero(p, n, n);
        for i in 0..n {
            m.set(i, i, LaurentScalar::one(p));
        }
        m
    }

    /// Diagonal matrix of t-powers.
    pub fn t_diagonal(p: u64, exps: &[i64]) -> Self {
        let mut m = Self::zero(p, exps.len(), exps.len());
        for (i, &e) in exps.iter().enumerate() {
            m.set(i, i, LaurentScalar::t_pow(p, e));
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &LaurentScalar {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: LaurentScalar) {
        assert_eq!(v.p, self.p);
        self.entries[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.p, other.p);
        let mut out = Self::zero(self.p, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = LaurentScalar::zero(self.p);
                for k in 0..self.cols {
                    acc = acc.add(&self.get(i, k).mul(other.get(k, j)));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn apply(&self, v: &[LaurentScalar]) -> Vec<LaurentScalar> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = LaurentScalar::zero(self.p);
                for j in 0..self.cols {
                    acc = acc.add(&self.get(i, j).mul(&v[j]));
                }
                acc
            })
            .collect()
    }

    /// Multiply every entry by t^k.
    pub fn scale_t(&self, k: i64) -> Self {
        let t = LaurentScalar::t_pow(self.p, k);
        let mut out = self.clone();
        for e in out.entries.iter_mut() {
            *e = e.mul(&t);
        }
        out
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            let x = self.get(i, a).clone();
            let y = self.get(i, b).clone();
            self.set(i, a, y);
            self.set(i, b, x);
        }
    }

    /// Gauss-Jordan inverse over the field K.
    pub fn inverse(&self) -> Option<LaurentMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let p = self.p;
        let mut a = self.clone();
        let mut inv = LaurentMatrix::identity(p, n);
        for col in 0..n {
            let Some(pivot_row) = (col..n).find(|&i| !a.get(i, col).is_zero()) else {
                return None;
            };
            if pivot_row != col {
                for j in 0..n {
                    let x = a.get(col, j).clone();
                    let y = a.get(pivot_row, j).clone();
                    a.set(col, j, y);
                    a.set(pivot_row, j, x);
                    let x = inv.get(col, j).clone();
                    let y = inv.get(pivot_row, j).clone();
                    inv.set(col, j, y);
                    inv.set(pivot_row, j, x);
                }
            }
            let piv_inv = a.get(col, col).inverse();
            for j in 0..n {
                a.set(col, j, a.get(col, j).mul(&piv_inv));
                inv.set(col, j, inv.get(col, j).mul(&piv_inv));
            }
            for i in 0..n {
                if i == col || a.get(i, col).is_zero() {
                    continue;
                }
                let f = a.get(i, col).clone();
                for j in 0..n {
                    let av = a.get(i, j).sub(&f.mul(a.get(col, j)));
                    a.set(i, j, av);
                    let iv = inv.get(i, j).sub(&f.mul(inv.get(col, j)));
                    inv.set(i, j, iv);
                }
            }
        }
        Some(inv)
    }

    /// Minimal valuation over all entries; None for the zero matrix.
    pub fn min_valuation(&self) -> Option<i64> {
        self.entries.iter().filter_map(|e| e.valuation()).min()
    }

    /// Entry-wise residue mod t. Panics if any entry has negative valuation.
    pub fn residue(&self) -> FieldMatrix {
        let mut out = FieldMatrix::zero(self.p, self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).residue());
            }
        }
        out
    }

    /// All entries have valuation >= 0 (entries lie in the valuation ring R).
    pub fn is_integral(&self) -> bool {
        self.entries
            .iter()
            .all(|e| e.valuation().map_or(true, |v| v >= 0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_divrem_gcd() {
        let p = 5;
        let a = Poly::from_coeffs(p, vec![1, 0, 1]); // 1 + t^2
        let b = Poly::from_coeffs(p, vec![1, 1]); // 1 + t
        let (q, r) = a.divrem(&b);
        assert_eq!(b.mul(&q).add(&r), a);
        let g = a.mul(&b).gcd(&b.mul(&b));
        assert_eq!(g, b.monic());
    }

    #[test]
    fn valuation_examples() {
        let p = 7;
        // t^2 + t^5 -> 2
        let x = LaurentScalar::from_terms(p, &[(2, 1), (5, 1)]);
        assert_eq!(x.valuation(), Some(2));
        // 0 -> infinity
        assert_eq!(LaurentScalar::zero(p).valuation(), None);
        // t^-1 -> -1
        assert_eq!(LaurentScalar::t_pow(p, -1).valuation(), Some(-1));
    }

    #[test]
    fn valuation_multiplicative() {
        let p = 3;
        let x = LaurentScalar::from_terms(p, &[(-1, 2), (3, 1)]);
        let y = LaurentScalar::from_terms(p, &[(2, 1), (4, 2)]);
        assert_eq!(
            x.mul(&y).valuation(),
            Some(x.valuation().unwrap() + y.valuation().unwrap())
        );
    }

    #[test]
    fn field_axioms_spot() {
        let p = 5;
        let x = LaurentScalar::from_terms(p, &[(0, 1), (1, 1)]); // 1 + t
        let inv = x.inverse();
        assert_eq!(x.mul(&inv), LaurentScalar::one(p));
        let y = LaurentScalar::from_terms(p, &[(1, 1)]); // t
        let q = y.div(&x); // t/(1+t): the SNF multiplier shape, valuation 1
        assert_eq!(q.valuation(), Some(1));
        assert_eq!(q.mul(&x), y);
        // subtraction cancelling top terms shifts valuation up
        let a = LaurentScalar::from_terms(p, &[(0, 1), (2, 1)]);
        let b = LaurentScalar::from_terms(p, &[(0, 1)]);
        assert_eq!(a.sub(&b).valuation(), Some(2));
    }

    #[test]
    fn residue_values() {
        let p = 5;
        assert_eq!(LaurentScalar::t_pow(p, 3).residue(), 0);
        let x = LaurentScalar::from_terms(p, &[(0, 3), (1, 1)]);
        assert_eq!(x.residue(), 3);
        // (1+t)/(2+t): residue 1/2 = 3 mod 5
        let y = LaurentScalar::from_terms(p, &[(0, 1), (1, 1)])
            .div(&LaurentScalar::from_terms(p, &[(0, 2), (1, 1)]));
        assert_eq!(y.residue(), 3);
    }

    #[test]
    fn parser_grammar() {
        let p = 7;
        let cases = [
            ("t^2 + t^5", LaurentScalar::from_terms(p, &[(2, 1), (5, 1)])),
            ("0", LaurentScalar::zero(p)),
            ("3", LaurentScalar::from_const(p, 3)),
            ("t^-1", LaurentScalar::t_pow(p, -1)),
            ("2*t^3 - t", LaurentScalar::from_terms(p, &[(3, 2), (1, 6)])),
            ("-t + 1", LaurentScalar::from_terms(p, &[(1, 6), (0, 1)])),
            ("5t^2", LaurentScalar::from_terms(p, &[(2, 5)])),
            ("7", LaurentScalar::zero(p)), // coefficient reduces mod p
        ];
        for (s, want) in cases {
            assert_eq!(parse_laurent(p, s).unwrap(), want, "input {s:?}");
        }
        for bad in ["", "+", "t^", "2**t", "t 3", "1 + + 2"] {
            assert!(parse_laurent(p, bad).is_err(), "should reject {bad:?}");
        }
    }

    #[test]
    fn matrix_inverse_roundtrip() {
        let p = 3;
        let mut m = LaurentMatrix::identity(p, 3);
        m.set(0, 1, LaurentScalar::from_terms(p, &[(1, 1), (2, 2)]));
        m.set(1, 2, LaurentScalar::t_pow(p, -2));
        m.set(2, 0, LaurentScalar::from_terms(p, &[(0, 2)]));
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), LaurentMatrix::identity(p, 3));
    }

    #[test]
    fn residue_matrix() {
        let p = 5;
        let mut m = LaurentMatrix::zero(p, 2, 2);
        m.set(0, 0, LaurentScalar::t_pow(p, 1));
        m.set(0, 1, LaurentScalar::from_const(p, 4));
        m.set(1, 1, LaurentScalar::from_terms(p, &[(0, 2), (3, 1)]));
        let r = m.residue();
        assert_eq!(r.get(0, 0), 0);
        assert_eq!(r.get(0, 1), 4);
        assert_eq!(r.get(1, 0), 0);
        assert_eq!(r.get(1, 1), 2);
    }
}
