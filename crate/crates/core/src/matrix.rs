//! Small vectors and square matrices over a [`FiniteField`], with `m ≤ 3`.
//!
//! Storage is inline and `Copy`; unused slots stay zero so derived equality,
//! hashing and ordering only see the live entries. Ordering is lexicographic
//! on row-major entries within a dimension.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::field::FiniteField;
use crate::Error;

pub const MAX_DIM: usize = 3;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vector<F: FiniteField> {
    dim: u8,
    entries: [F; MAX_DIM],
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix<F: FiniteField> {
    dim: u8,
    entries: [F; MAX_DIM * MAX_DIM],
}

fn check_dim(m: usize) -> Result<(), Error> {
    if (1..=MAX_DIM).contains(&m) {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("dimension {m} outside 1..={MAX_DIM}")))
    }
}

impl<F: FiniteField> Vector<F> {
    pub fn zero(m: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&m), "dimension {m} out of range");
        Vector { dim: m as u8, entries: [F::zero(); MAX_DIM] }
    }

    pub fn from_slice(values: &[F]) -> Result<Self, Error> {
        check_dim(values.len())?;
        let mut v = Self::zero(values.len());
        v.entries[..values.len()].copy_from_slice(values);
        Ok(v)
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn get(&self, i: usize) -> F {
        assert!(i < self.dim());
        self.entries[i]
    }

    pub fn set(&mut self, i: usize, value: F) {
        assert!(i < self.dim());
        self.entries[i] = value;
    }

    pub fn as_slice(&self) -> &[F] {
        &self.entries[..self.dim()]
    }

    pub fn is_zero(&self) -> bool {
        self.as_slice().iter().all(|x| x.is_zero())
    }

    /// Base-q integer with the first entry most significant, so codes
    /// increase in lexicographic order.
    pub fn code(&self) -> usize {
        self.as_slice().iter().fold(0, |acc, x| acc * F::ORDER + x.index())
    }

    pub fn from_code(m: usize, mut code: usize) -> Self {
        let mut v = Self::zero(m);
        for i in (0..m).rev() {
            v.entries[i] = F::from_index(code % F::ORDER);
            code /= F::ORDER;
        }
        v
    }

    /// All of `F_q^m` in lexicographic order.
    pub fn all(m: usize) -> Vec<Self> {
        (0..F::ORDER.pow(m as u32)).map(|c| Self::from_code(m, c)).collect()
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self, Error> {
        same_dim(self.dim(), rhs.dim())?;
        let mut out = *self;
        for i in 0..self.dim() {
            out.entries[i] = self.entries[i] + rhs.entries[i];
        }
        Ok(out)
    }
}

fn same_dim(a: usize, b: usize) -> Result<(), Error> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { left: a, right: b })
    }
}

impl<F: FiniteField> Add for Vector<F> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.checked_add(&rhs).expect("vector dimension mismatch")
    }
}

impl<F: FiniteField> Neg for Vector<F> {
    type Output = Self;
    fn neg(mut self) -> Self {
        for x in self.entries.iter_mut() {
            *x = -*x;
        }
        self
    }
}

impl<F: FiniteField> Sub for Vector<F> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<F: FiniteField> Matrix<F> {
    pub fn zero(m: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&m), "dimension {m} out of range");
        Matrix { dim: m as u8, entries: [F::zero(); MAX_DIM * MAX_DIM] }
    }

    pub fn identity(m: usize) -> Self {
        Self::scalar(m, F::one())
    }

    pub fn scalar(m: usize, c: F) -> Self {
        Self::from_fn(m, |i, j| if i == j { c } else { F::zero() })
    }

    pub fn from_fn(m: usize, f: impl Fn(usize, usize) -> F) -> Self {
        let mut out = Self::zero(m);
        for i in 0..m {
            for j in 0..m {
                out.entries[i * MAX_DIM + j] = f(i, j);
            }
        }
        out
    }

    pub fn from_rows(rows: &[Vec<F>]) -> Result<Self, Error> {
        let m = rows.len();
        check_dim(m)?;
        for row in rows {
            same_dim(m, row.len())?;
        }
        Ok(Self::from_fn(m, |i, j| rows[i][j]))
    }

    /// `E_k`: diagonal with `k` leading ones.
    pub fn rank_diagonal(m: usize, k: usize) -> Self {
        Self::from_fn(m, |i, j| if i == j && i < k { F::one() } else { F::zero() })
    }

    /// `(v 0)`: the matrix whose first column is `v`, zero elsewhere.
    pub fn first_column(v: &Vector<F>) -> Self {
        Self::from_fn(v.dim(), |i, j| if j == 0 { v.get(i) } else { F::zero() })
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn get(&self, i: usize, j: usize) -> F {
        assert!(i < self.dim() && j < self.dim());
        self.entries[i * MAX_DIM + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: F) {
        assert!(i < self.dim() && j < self.dim());
        self.entries[i * MAX_DIM + j] = value;
    }

    pub fn column(&self, j: usize) -> Vector<F> {
        let mut v = Vector::zero(self.dim());
        for i in 0..self.dim() {
            v.set(i, self.get(i, j));
        }
        v
    }

    pub fn row_major(&self) -> Vec<F> {
        let m = self.dim();
        (0..m * m).map(|t| self.get(t / m, t % m)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|x| x.is_zero())
    }

    /// Row-major base-q code; increasing codes are lexicographic order.
    pub fn code(&self) -> usize {
        self.row_major().iter().fold(0, |acc, x| acc * F::ORDER + x.index())
    }

    pub fn from_code(m: usize, mut code: usize) -> Self {
        let mut out = Self::zero(m);
        for t in (0..m * m).rev() {
            out.entries[(t / m) * MAX_DIM + t % m] = F::from_index(code % F::ORDER);
            code /= F::ORDER;
        }
        out
    }

    pub fn count(m: usize) -> usize {
        F::ORDER.pow((m * m) as u32)
    }

    /// All of `Mat_m(F_q)` in lexicographic order.
    pub fn all(m: usize) -> Vec<Self> {
        (0..Self::count(m)).map(|c| Self::from_code(m, c)).collect()
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self, Error> {
        same_dim(self.dim(), rhs.dim())?;
        let mut out = *self;
        for (o, r) in out.entries.iter_mut().zip(rhs.entries.iter()) {
            *o = *o + *r;
        }
        Ok(out)
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self, Error> {
        same_dim(self.dim(), rhs.dim())?;
        let m = self.dim();
        Ok(Self::from_fn(m, |i, j| (0..m).fold(F::zero(), |acc, t| acc + self.get(i, t) * rhs.get(t, j))))
    }

    pub fn mul_vec(&self, v: &Vector<F>) -> Result<Vector<F>, Error> {
        same_dim(self.dim(), v.dim())?;
        let m = self.dim();
        let mut out = Vector::zero(m);
        for i in 0..m {
            out.set(i, (0..m).fold(F::zero(), |acc, t| acc + self.get(i, t) * v.get(t)));
        }
        Ok(out)
    }

    pub fn scale(&self, c: F) -> Self {
        let mut out = *self;
        for x in out.entries.iter_mut() {
            *x = *x * c;
        }
        out
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim(), |i, j| self.get(j, i))
    }

    pub fn det(&self) -> F {
        let g = |i, j| self.get(i, j);
        match self.dim() {
            1 => g(0, 0),
            2 => g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0),
            _ => {
                g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1)) - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
                    + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0))
            }
        }
    }

    pub fn is_invertible(&self) -> bool {
        !self.det().is_zero()
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self) -> Result<Self, Error> {
        let m = self.dim();
        let mut a = *self;
        let mut inv = Self::identity(m);
        for col in 0..m {
            let pivot = (col..m).find(|&r| !a.get(r, col).is_zero()).ok_or(Error::Singular)?;
            a.swap_rows(col, pivot);
            inv.swap_rows(col, pivot);
            let s = a.get(col, col).inv().expect("nonzero pivot");
            a.scale_row(col, s);
            inv.scale_row(col, s);
            for r in 0..m {
                if r != col {
                    let f = a.get(r, col);
                    if !f.is_zero() {
                        a.add_row_multiple(r, col, -f);
                        inv.add_row_multiple(r, col, -f);
                    }
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.dim() {
            let t = self.get(a, j);
            self.set(a, j, self.get(b, j));
            self.set(b, j, t);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.dim() {
            let t = self.get(i, a);
            self.set(i, a, self.get(i, b));
            self.set(i, b, t);
        }
    }

    fn scale_row(&mut self, r: usize, c: F) {
        for j in 0..self.dim() {
            self.set(r, j, self.get(r, j) * c);
        }
    }

    /// row[dst] += c * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, c: F) {
        for j in 0..self.dim() {
            self.set(dst, j, self.get(dst, j) + c * self.get(src, j));
        }
    }

    /// col[dst] += c * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, c: F) {
        for i in 0..self.dim() {
            self.set(i, dst, self.get(i, dst) + c * self.get(i, src));
        }
    }

    /// Parse `[a,b;c,d]`: row-major, `;` between rows, field symbols as entries.
    pub fn parse_literal(text: &str) -> Result<Self, Error> {
        let inner = text
            .trim()
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| Error::syntax(format!("matrix literal must be bracketed: {text:?}")))?;
        let rows = inner
            .split(';')
            .map(|row| {
                row.split(',')
                    .map(|tok| {
                        F::parse_symbol(tok.trim())
                            .ok_or_else(|| Error::syntax(format!("bad field element {:?}", tok.trim())))
                    })
                    .collect::<Result<Vec<F>, Error>>()
            })
            .collect::<Result<Vec<_>, Error>>()?;
        Self::from_rows(&rows)
    }
}

impl<F: FiniteField> fmt::Display for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.dim();
        f.write_str("[")?;
        for i in 0..m {
            if i > 0 {
                f.write_str(";")?;
            }
            for j in 0..m {
                if j > 0 {
                    f.write_str(",")?;
                }
                f.write_str(self.get(i, j).symbol())?;
            }
        }
        f.write_str("]")
    }
}

impl<F: FiniteField> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<F: FiniteField> fmt::Display for Vector<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self.as_slice().iter().map(|x| x.symbol()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl<F: FiniteField> fmt::Debug for Vector<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<F: FiniteField> Add for Matrix<F> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.checked_add(&rhs).expect("matrix dimension mismatch")
    }
}

impl<F: FiniteField> Neg for Matrix<F> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-F::one())
    }
}

impl<F: FiniteField> Sub for Matrix<F> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<F: FiniteField> Mul for Matrix<F> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(&rhs).expect("matrix dimension mismatch")
    }
}

impl<F: FiniteField> Serialize for Matrix<F> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de, F: FiniteField> Deserialize<'de> for Matrix<F> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        Matrix::parse_literal(&text).map_err(serde::de::Error::custom)
    }
}

impl<F: FiniteField> Serialize for Vector<F> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let parts: Vec<&str> = self.as_slice().iter().map(|x| x.symbol()).collect();
        s.collect_str(&format_args!("[{}]", parts.join(",")))
    }
}

/// `GL_m(F_q)` in lexicographic row-major order.
pub fn gl_enumerate<F: FiniteField>(m: usize) -> Result<Vec<Matrix<F>>, Error> {
    check_dim(m)?;
    Ok(Matrix::<F>::all(m).into_iter().filter(Matrix::is_invertible).collect())
}

/// `A = P · E_k · Q` with `P`, `Q` invertible and `k = rank(A)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RankNormalForm<F: FiniteField> {
    pub p: Matrix<F>,
    pub rank: usize,
    pub q: Matrix<F>,
}

impl<F: FiniteField> RankNormalForm<F> {
    pub fn reconstruct(&self) -> Matrix<F> {
        self.p * Matrix::rank_diagonal(self.p.dim(), self.rank) * self.q
    }
}

/// Reduces `A` to `E_k` by row operations `R` and column operations `C`
/// (`R·A·C = E_k`), then inverts them. Pivots are taken at the first nonzero
/// entry of the remaining block in column-major scan order.
pub fn rank_normal_form<F: FiniteField>(a: &Matrix<F>) -> RankNormalForm<F> {
    let m = a.dim();
    let mut work = *a;
    let mut rows = Matrix::identity(m);
    let mut cols = Matrix::identity(m);
    let mut k = 0;
    while k < m {
        let pivot = (k..m).flat_map(|j| (k..m).map(move |i| (i, j))).find(|&(i, j)| !work.get(i, j).is_zero());
        let Some((pi, pj)) = pivot else { break };
        work.swap_rows(k, pi);
        rows.swap_rows(k, pi);
        work.swap_cols(k, pj);
        cols.swap_cols(k, pj);
        let s = work.get(k, k).inv().expect("nonzero pivot");
        work.scale_row(k, s);
        rows.scale_row(k, s);
        for i in 0..m {
            if i != k {
                let f = work.get(i, k);
                if !f.is_zero() {
                    work.add_row_multiple(i, k, -f);
                    rows.add_row_multiple(i, k, -f);
                }
            }
        }
        for j in 0..m {
            if j != k {
                let f = work.get(k, j);
                if !f.is_zero() {
                    work.add_col_multiple(j, k, -f);
                    cols.add_col_multiple(j, k, -f);
                }
            }
        }
        k += 1;
    }
    debug_assert_eq!(work, Matrix::rank_diagonal(m, k));
    RankNormalForm {
        p: rows.inverse().expect("row operations are invertible"),
        rank: k,
        q: cols.inverse().expect("column operations are invertible"),
    }
}

fn f2_block<F: FiniteField>(rows: &[&[u8]]) -> Matrix<F> {
    Matrix::from_fn(rows.len(), |i, j| F::from_index(rows[i][j] as usize))
}

fn place<F: FiniteField>(target: &mut Matrix<F>, block: &Matrix<F>, at: usize) {
    for i in 0..block.dim() {
        for j in 0..block.dim() {
            target.set(at + i, at + j, block.get(i, j));
        }
    }
}

/// Writes `E_k` as a sum of two invertible matrices over F2 using diagonal
/// blocks: 2×2 identity blocks, one 3×3 identity block when `k` is odd, a
/// 2×2 `diag(1,0)` block when `k = 1`, and `I + I` on the zero block.
fn split_rank_diagonal_f2<F: FiniteField>(m: usize, k: usize) -> Result<(Matrix<F>, Matrix<F>), Error> {
    let i2 = (f2_block::<F>(&[&[0, 1], &[1, 1]]), f2_block::<F>(&[&[1, 1], &[1, 0]]));
    let e1 = (f2_block::<F>(&[&[0, 1], &[1, 0]]), f2_block::<F>(&[&[1, 1], &[1, 0]]));
    let i3 =
        (f2_block::<F>(&[&[1, 0, 1], &[0, 0, 1], &[1, 1, 1]]), f2_block::<F>(&[&[0, 0, 1], &[0, 1, 1], &[1, 1, 0]]));
    let mut blocks = Vec::new();
    match k {
        0 => {}
        1 if m == 1 => return Err(Error::DecompositionImpossible),
        1 => blocks.push(e1),
        k if k % 2 == 0 => blocks.extend(std::iter::repeat_n(i2, k / 2)),
        k => {
            blocks.push(i3);
            blocks.extend(std::iter::repeat_n(i2, (k - 3) / 2));
        }
    }
    // Blocks cover the leading rows; the rest is the zero block written as I + I.
    let mut b = Matrix::identity(m);
    let mut c = Matrix::identity(m);
    let mut at = 0;
    for (x, y) in &blocks {
        place(&mut b, x, at);
        place(&mut c, y, at);
        at += x.dim();
    }
    Ok((b, c))
}

/// Writes `A` as `B + C` with `B`, `C` invertible.
///
/// Over F2 the rank-diagonal form is split blockwise; otherwise
/// `E_k = aI + (E_k − aI)` with `a` the first element outside `{0, 1}`.
/// Fails only for the 1×1 matrix `(1)` over F2.
pub fn invertible_sum<F: FiniteField>(a: &Matrix<F>) -> Result<(Matrix<F>, Matrix<F>), Error> {
    let m = a.dim();
    let rnf = rank_normal_form(a);
    let (b, c) = if F::ORDER == 2 {
        split_rank_diagonal_f2::<F>(m, rnf.rank)?
    } else {
        let s = F::elements()[2];
        let b = Matrix::scalar(m, s);
        (b, Matrix::rank_diagonal(m, rnf.rank) - b)
    };
    Ok((rnf.p * b * rnf.q, rnf.p * c * rnf.q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{F2, F3, F4};
    use proptest::prelude::*;

    fn m2(text: &str) -> Matrix<F2> {
        Matrix::parse_literal(text).unwrap()
    }

    #[test]
    fn gl_counts() {
        assert_eq!(gl_enumerate::<F2>(2).unwrap().len(), 6);
        assert_eq!(gl_enumerate::<F2>(1).unwrap(), vec![m2("[1]")]);
        assert_eq!(gl_enumerate::<F2>(3).unwrap().len(), 168);
        assert_eq!(gl_enumerate::<F3>(2).unwrap().len(), 48);
        assert_eq!(gl_enumerate::<F4>(2).unwrap().len(), 180);
        assert!(gl_enumerate::<F2>(4).is_err());
    }

    #[test]
    fn gl_is_sorted() {
        let gl = gl_enumerate::<F3>(2).unwrap();
        assert!(gl.windows(2).all(|w| w[0] < w[1]));
        assert!(gl.windows(2).all(|w| w[0].code() < w[1].code()));
    }

    #[test]
    fn identity_is_neutral() {
        for a in Matrix::<F2>::all(2) {
            assert_eq!(Matrix::identity(2) * a, a);
            assert_eq!(a * Matrix::identity(2), a);
        }
    }

    #[test]
    fn sigma_and_alpha() {
        let sigma = m2("[0,1;1,0]");
        let alpha = m2("[0,1;1,1]");
        assert_eq!(sigma * sigma, Matrix::identity(2));
        assert_eq!(sigma * alpha * sigma, alpha * alpha);
    }

    #[test]
    fn inverse_matches_brute_force() {
        for a in Matrix::<F3>::all(2) {
            let brute = Matrix::<F3>::all(2).into_iter().find(|b| a * *b == Matrix::identity(2));
            match a.inverse() {
                Ok(inv) => assert_eq!(Some(inv), brute),
                Err(e) => {
                    assert_eq!(e, Error::Singular);
                    assert_eq!(brute, None);
                }
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = Matrix::<F2>::identity(2);
        let b = Matrix::<F2>::identity(3);
        assert!(matches!(a.checked_mul(&b), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(a.checked_add(&b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn literal_round_trip() {
        for a in Matrix::<F4>::all(2).into_iter().step_by(7) {
            assert_eq!(Matrix::parse_literal(&a.to_string()).unwrap(), a);
        }
        assert!(Matrix::<F2>::parse_literal("[1,0;0]").is_err());
        assert!(Matrix::<F2>::parse_literal("1,0;0,1").is_err());
        assert!(Matrix::<F2>::parse_literal("[2,0;0,1]").is_err());
    }

    #[test]
    fn displayed_f2_decompositions() {
        let (b, c) = invertible_sum(&m2("[1,0;0,0]")).unwrap();
        assert_eq!((b, c), (m2("[0,1;1,0]"), m2("[1,1;1,0]")));
        let (b, c) = invertible_sum(&m2("[0,0;0,0]")).unwrap();
        assert_eq!((b, c), (Matrix::identity(2), Matrix::identity(2)));
        let (b, c) = invertible_sum(&m2("[1,0;0,1]")).unwrap();
        assert_eq!((b, c), (m2("[0,1;1,1]"), m2("[1,1;1,0]")));
    }

    fn check_all_sums<F: FiniteField>(m: usize) {
        let gl = gl_enumerate::<F>(m).unwrap();
        for a in Matrix::<F>::all(m) {
            let (b, c) = invertible_sum(&a).unwrap();
            assert!(gl.binary_search(&b).is_ok() && gl.binary_search(&c).is_ok(), "{a}");
            assert_eq!(b + c, a);
        }
    }

    #[test]
    fn invertible_sum_exhaustive() {
        check_all_sums::<F2>(2);
        check_all_sums::<F2>(3);
        check_all_sums::<F3>(2);
        check_all_sums::<F3>(1);
        check_all_sums::<F4>(1);
        check_all_sums::<F4>(2);
    }

    #[test]
    fn excluded_case() {
        assert_eq!(invertible_sum(&m2("[1]")), Err(Error::DecompositionImpossible));
        assert!(invertible_sum(&m2("[0]")).is_ok());
    }

    #[test]
    fn rank_normal_form_round_trips() {
        for a in Matrix::<F2>::all(3) {
            let r = rank_normal_form(&a);
            assert!(r.p.is_invertible() && r.q.is_invertible());
            assert_eq!(r.reconstruct(), a);
        }
        let zero = rank_normal_form(&Matrix::<F3>::zero(2));
        assert_eq!(zero.rank, 0);
        assert_eq!(rank_normal_form(&Matrix::<F3>::identity(2)).rank, 2);
    }

    proptest! {
        #[test]
        fn rank_normal_form_f3(code in 0usize..81) {
            let a = Matrix::<F3>::from_code(2, code);
            let r = rank_normal_form(&a);
            prop_assert_eq!(r.reconstruct(), a);
            prop_assert_eq!(r.rank == 2, a.is_invertible());
        }

        #[test]
        fn codes_round_trip(code in 0usize..512) {
            prop_assert_eq!(Matrix::<F2>::from_code(3, code).code(), code);
        }
    }
}
