//! Exact integer linear algebra.
//!
//! Everything here works over arbitrary-precision integers: extended gcd,
//! fraction-free (Bareiss) determinants, Smith normal form with both
//! transformation matrices, and extension of partial bases of `Z^n`.
//!
//! The Smith normal form is stored as `u * a * v = d` with `u`, `v`
//! unimodular and `d` diagonal, with non-negative entries forming a divisor
//! chain `d_1 | d_2 | ...` followed by zeros.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Extended gcd: returns `(g, s, t)` with `g = gcd(|a|, |b|)` and `s*a + t*b = g`.
///
/// `gcd_ext(0, 0)` is `(0, 0, 0)`.
pub fn gcd_ext(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    if a.is_zero() && b.is_zero() {
        return (BigInt::zero(), BigInt::zero(), BigInt::zero());
    }
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_s, mut s) = (BigInt::one(), BigInt::zero());
    let (mut old_t, mut t) = (BigInt::zero(), BigInt::one());
    while !r.is_zero() {
        let q = &old_r / &r;
        let next_r = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, next_r);
        let next_s = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, next_s);
        let next_t = &old_t - &q * &t;
        old_t = std::mem::replace(&mut t, next_t);
    }
    if old_r.is_negative() {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// A lattice vector in `Z^n`, `n >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntVec(Vec<BigInt>);

impl IntVec {
    pub fn new(entries: Vec<BigInt>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Empty);
        }
        Ok(IntVec(entries))
    }

    /// Convenience constructor for small literals. Panics on an empty slice.
    pub fn from_i64s(entries: &[i64]) -> Self {
        assert!(!entries.is_empty(), "IntVec needs at least one entry");
        IntVec(entries.iter().map(|&x| BigInt::from(x)).collect())
    }

    /// The `i`-th standard basis vector of `Z^rank`.
    pub fn unit(rank: usize, i: usize) -> Self {
        assert!(i < rank);
        let mut v = vec![BigInt::zero(); rank];
        v[i] = BigInt::one();
        IntVec(v)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<BigInt> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// gcd of the entries (0 for the zero vector).
    pub fn content(&self) -> BigInt {
        self.0.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }

    /// Splits `self` as `content * primitive`. The zero vector is returned unchanged with content 0.
    pub fn primitive_part(&self) -> (IntVec, BigInt) {
        let c = self.content();
        if c.is_zero() || c.is_one() {
            return (self.clone(), c);
        }
        (IntVec(self.0.iter().map(|x| x / &c).collect()), c)
    }

    pub fn dot(&self, other: &IntVec) -> BigInt {
        assert_eq!(self.rank(), other.rank(), "dot product of vectors of different rank");
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn neg(&self) -> IntVec {
        IntVec(self.0.iter().map(|x| -x).collect())
    }

    pub fn add(&self, other: &IntVec) -> IntVec {
        assert_eq!(self.rank(), other.rank());
        IntVec(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, k: &BigInt) -> IntVec {
        IntVec(self.0.iter().map(|x| x * k).collect())
    }
}

impl Index<usize> for IntVec {
    type Output = BigInt;
    fn index(&self, i: usize) -> &BigInt {
        &self.0[i]
    }
}

impl fmt::Display for IntVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for IntVec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.0.iter().map(|x| x.to_string()))
    }
}

/// Serde helpers writing big integers as decimal strings.
pub mod bigint_str {
    use num_bigint::BigInt;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn seq<S: Serializer>(xs: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(xs.iter().map(|x| x.to_string()))
    }

    pub fn opt<S: Serializer>(x: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(x) => s.serialize_some(&x.to_string()),
            None => s.serialize_none(),
        }
    }
}

/// A dense row-major integer matrix with at least one row and one column.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMat {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty);
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        Ok(IntMat { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0);
        IntMat { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Convenience constructor for small literals. Panics on ragged or empty input.
    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        assert!(!rows.is_empty() && !rows[0].is_empty());
        let cols = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix literal");
        let data = rows.iter().flat_map(|r| r.iter().map(|&x| BigInt::from(x))).collect();
        IntMat { rows: rows.len(), cols, data }
    }

    pub fn from_rows(rows: &[IntVec]) -> Result<Self> {
        let first = rows.first().ok_or(Error::Empty)?;
        let cols = first.rank();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.rank() != cols {
                return Err(Error::DimensionMismatch { expected: cols, found: r.rank() });
            }
            data.extend(r.entries().iter().cloned());
        }
        IntMat::new(rows.len(), cols, data)
    }

    pub fn from_columns(columns: &[IntVec]) -> Result<Self> {
        Ok(IntMat::from_rows(columns)?.transpose())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> IntVec {
        IntVec(self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn column(&self, j: usize) -> IntVec {
        IntVec((0..self.rows).map(|i| self[(i, j)].clone()).collect())
    }

    pub fn transpose(&self) -> IntMat {
        let mut t = IntMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].clone()).collect()
    }

    pub fn mul_vec(&self, v: &IntVec) -> IntVec {
        assert_eq!(self.cols, v.rank(), "matrix-vector dimension mismatch");
        IntVec((0..self.rows).map(|i| self.row(i).dot(v)).collect())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let x = std::mem::take(&mut self[(i, j)]);
            self[(i, j)] = -x;
        }
    }

    /// `(row_a, row_b) <- (p*row_a + q*row_b, r*row_a + s*row_b)`.
    fn combine_rows(&mut self, a: usize, b: usize, [p, q, r, s]: &[BigInt; 4]) {
        for j in 0..self.cols {
            let x = self[(a, j)].clone();
            let y = self[(b, j)].clone();
            self[(a, j)] = p * &x + q * &y;
            self[(b, j)] = r * &x + s * &y;
        }
    }

    /// `(col_a, col_b) <- (p*col_a + q*col_b, r*col_a + s*col_b)`.
    fn combine_cols(&mut self, a: usize, b: usize, [p, q, r, s]: &[BigInt; 4]) {
        for i in 0..self.rows {
            let x = self[(i, a)].clone();
            let y = self[(i, b)].clone();
            self[(i, a)] = p * &x + q * &y;
            self[(i, b)] = r * &x + s * &y;
        }
    }
}

impl Index<(usize, usize)> for IntMat {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &IntMat {
    type Output = IntMat;

    fn mul(self, rhs: &IntMat) -> IntMat {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = IntMat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * &rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl fmt::Display for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl Serialize for IntMat {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq((0..self.rows).map(|i| self.row(i)))
    }
}

/// Determinant by Bareiss fraction-free elimination.
pub fn det(m: &IntMat) -> Result<BigInt> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows, cols: m.cols });
    }
    let n = m.rows;
    let mut a = m.clone();
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n.saturating_sub(1) {
        if a[(k, k)].is_zero() {
            match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                Some(i) => {
                    a.swap_rows(k, i);
                    negate = !negate;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)];
                a[(i, j)] = num / &prev;
            }
        }
        prev = a[(k, k)].clone();
    }
    let d = a[(n - 1, n - 1)].clone();
    Ok(if negate { -d } else { d })
}

pub fn is_unimodular(m: &IntMat) -> Result<bool> {
    Ok(det(m)?.abs().is_one())
}

/// Smith normal form `u * a * v = d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    pub d: IntMat,
    pub u: IntMat,
    pub v: IntMat,
}

impl SnfResult {
    /// Number of nonzero diagonal entries.
    pub fn rank(&self) -> usize {
        self.d.diagonal().iter().filter(|x| !x.is_zero()).count()
    }

    /// The nonzero diagonal entries `d_1 | d_2 | ... | d_r`.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.d.diagonal().into_iter().filter(|x| !x.is_zero()).collect()
    }

    /// Invariant factors greater than one: the torsion of the cokernel.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.invariant_factors().into_iter().filter(|x| !x.is_one()).collect()
    }

    /// Free rank of the cokernel `Z^rows / im(a)`.
    pub fn cokernel_free_rank(&self) -> usize {
        self.d.rows() - self.rank()
    }

    /// True when every diagonal entry is 1 (nonzero and no torsion).
    pub fn is_all_ones(&self) -> bool {
        self.d.diagonal().iter().all(One::is_one)
    }
}

/// Transform for a pair `(x, y)` with `x` in the pivot slot: the returned
/// determinant-one matrix sends `(x, y)` to `(gcd, 0)`.
fn gcd_transform(x: &BigInt, y: &BigInt) -> [BigInt; 4] {
    // plain elimination when possible, so the pivot never bounces between slots
    if !x.is_zero() && (y % x).is_zero() {
        return [BigInt::one(), BigInt::zero(), -(y / x), BigInt::one()];
    }
    let (g, s, t) = gcd_ext(x, y);
    [s, t, -(y / &g), x / &g]
}

pub fn smith_normal_form(m: &IntMat) -> SnfResult {
    let (rows, cols) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut u = IntMat::identity(rows);
    let mut v = IntMat::identity(cols);

    for t in 0..rows.min(cols) {
        // smallest nonzero entry of the trailing block becomes the pivot
        let pivot = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| !a[(i, j)].is_zero())
            .min_by(|&p, &q| a[p].abs().cmp(&a[q].abs()));
        let Some((pi, pj)) = pivot else { break };
        a.swap_rows(t, pi);
        u.swap_rows(t, pi);
        a.swap_cols(t, pj);
        v.swap_cols(t, pj);

        loop {
            for i in t + 1..rows {
                if !a[(i, t)].is_zero() {
                    let e = gcd_transform(&a[(t, t)], &a[(i, t)]);
                    a.combine_rows(t, i, &e);
                    u.combine_rows(t, i, &e);
                }
            }
            for j in t + 1..cols {
                if !a[(t, j)].is_zero() {
                    let e = gcd_transform(&a[(t, t)], &a[(t, j)]);
                    a.combine_cols(t, j, &e);
                    v.combine_cols(t, j, &e);
                }
            }
            if (t + 1..rows).any(|i| !a[(i, t)].is_zero()) {
                continue;
            }
            // pivot must divide the trailing block; otherwise pull an offending row up
            let p = a[(t, t)].clone();
            let bad_row = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[(i, j)].is_multiple_of(&p)));
            match bad_row {
                Some(i) => {
                    let one = [BigInt::one(), BigInt::one(), BigInt::zero(), BigInt::one()];
                    a.combine_rows(t, i, &one);
                    u.combine_rows(t, i, &one);
                }
                None => break,
            }
        }
        if a[(t, t)].is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }
    }
    SnfResult { d: a, u, v }
}

/// Inverse of a unimodular matrix, read off its Smith form: `u a v = 1` gives `a^-1 = v u`.
pub fn unimodular_inverse(m: &IntMat) -> Result<IntMat> {
    let d = det(m)?;
    if !d.abs().is_one() {
        return Err(Error::NotUnimodular { det: d });
    }
    let snf = smith_normal_form(m);
    Ok(&snf.v * &snf.u)
}

/// Rank of an integer matrix over `Q`.
pub fn rank(m: &IntMat) -> usize {
    smith_normal_form(m).rank()
}

/// Extends `vectors` to a basis of `Z^n`: the result is unimodular and its
/// first columns are exactly the inputs.
pub fn extend_to_basis(vectors: &[IntVec], n: usize) -> Result<IntMat> {
    if n == 0 {
        return Err(Error::Empty);
    }
    if vectors.is_empty() {
        return Ok(IntMat::identity(n));
    }
    if let Some(bad) = vectors.iter().find(|v| v.rank() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: bad.rank() });
    }
    let k = vectors.len();
    let m = IntMat::from_columns(vectors)?;
    let snf = smith_normal_form(&m);
    if k > n || !snf.is_all_ones() {
        return Err(Error::NotExtendable { diagonal: snf.d.diagonal() });
    }
    // m = u^-1 [v^-1; 0], so u^-1 * diag(v^-1, 1) starts with the columns of m
    let u_inv = unimodular_inverse(&snf.u)?;
    let v_inv = unimodular_inverse(&snf.v)?;
    let mut block = IntMat::identity(n);
    for i in 0..k {
        for j in 0..k {
            block[(i, j)] = v_inv[(i, j)].clone();
        }
    }
    Ok(&u_inv * &block)
}
