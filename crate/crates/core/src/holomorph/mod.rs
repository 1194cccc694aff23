//! The holomorph `Hol(q,m) = F_q^m ⋊ GL_m(F_q)`.
//!
//! An element `⟨v, A⟩` acts on `F_q^m` by `u ↦ A·u + v`, and the product is
//! composition with the right factor applied first:
//!
//! ```text
//! ⟨v, A⟩ · ⟨w, B⟩ = ⟨v + A·w, A·B⟩        ⟨v, A⟩⁻¹ = ⟨−A⁻¹·v, A⁻¹⟩
//! ```

mod group;
mod s4;
mod word;

use std::fmt;

use serde::Serialize;

use crate::field::FiniteField;
use crate::matrix::{Matrix, Vector};
use crate::Error;

pub use group::HolGroup;
pub use s4::{s4_iso, s4_iso_inv, PermS4};
pub use word::{
    poleqv_bruteforce, polsat_bruteforce, word_evaluate, word_inverse, Assignment, CompiledWord, GroupWord, Letter,
};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct HolElement<F: FiniteField> {
    v: Vector<F>,
    a: Matrix<F>,
}

impl<F: FiniteField> HolElement<F> {
    pub fn new(v: Vector<F>, a: Matrix<F>) -> Result<Self, Error> {
        if v.dim() != a.dim() {
            return Err(Error::DimensionMismatch { left: v.dim(), right: a.dim() });
        }
        if !a.is_invertible() {
            return Err(Error::Singular);
        }
        Ok(HolElement { v, a })
    }

    pub fn identity(m: usize) -> Self {
        HolElement { v: Vector::zero(m), a: Matrix::identity(m) }
    }

    /// `⟨v, I⟩`, an element of the translation subgroup `V`.
    pub fn translation(v: Vector<F>) -> Self {
        HolElement { v, a: Matrix::identity(v.dim()) }
    }

    /// `⟨0, A⟩`.
    pub fn linear(a: Matrix<F>) -> Result<Self, Error> {
        Self::new(Vector::zero(a.dim()), a)
    }

    pub fn vector(&self) -> Vector<F> {
        self.v
    }

    pub fn matrix(&self) -> Matrix<F> {
        self.a
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim())
    }

    pub fn is_translation(&self) -> bool {
        self.a == Matrix::identity(self.dim())
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self, Error> {
        let w = self.a.mul_vec(&rhs.v)?;
        Ok(HolElement { v: self.v + w, a: self.a * rhs.a })
    }

    pub fn inverse(&self) -> Self {
        let ai = self.a.inverse().expect("holomorph matrix part is invertible");
        HolElement { v: -ai.mul_vec(&self.v).expect("same dimension"), a: ai }
    }

    /// The affine action `u ↦ A·u + v`.
    pub fn act(&self, u: &Vector<F>) -> Vector<F> {
        self.a.mul_vec(u).expect("same dimension") + self.v
    }

    pub fn pow(&self, k: usize) -> Self {
        (0..k).fold(Self::identity(self.dim()), |acc, _| acc * *self)
    }

    /// Group order `q^m · |GL_m(F_q)|`.
    pub fn group_order(m: usize) -> usize {
        let mut gl = 1usize;
        let q = F::ORDER;
        for i in 0..m {
            gl *= q.pow(m as u32) - q.pow(i as u32);
        }
        q.pow(m as u32) * gl
    }

    /// All of `Hol(q,m)`, vector-major, each block in GL enumeration order.
    pub fn all(m: usize) -> Result<Vec<Self>, Error> {
        let gl = crate::matrix::gl_enumerate::<F>(m)?;
        Ok(Vector::all(m).into_iter().flat_map(|v| gl.iter().map(move |&a| HolElement { v, a })).collect())
    }
}

impl<F: FiniteField> std::ops::Mul for HolElement<F> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(&rhs).expect("holomorph parameter mismatch")
    }
}

impl<F: FiniteField> fmt::Display for HolElement<F> {
    /// `[v1,v2;a,b,c,d]`: vector entries, then the matrix in row-major order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<&str> = self.v.as_slice().iter().map(|x| x.symbol()).collect();
        let ms: Vec<&str> = self.a.row_major().iter().map(|x| x.symbol()).collect();
        write!(f, "[{};{}]", vs.join(","), ms.join(","))
    }
}

impl<F: FiniteField> fmt::Debug for HolElement<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{}, {}⟩", self.v, self.a)
    }
}

impl<F: FiniteField> HolElement<F> {
    /// Inverse of the `Display` form.
    pub fn parse_literal(text: &str) -> Result<Self, Error> {
        let inner = text
            .trim()
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| Error::syntax(format!("constant must be bracketed: {text:?}")))?;
        let (vs, ms) =
            inner.split_once(';').ok_or_else(|| Error::syntax(format!("constant needs `vector;matrix`: {text:?}")))?;
        let parse = |s: &str| -> Result<Vec<F>, Error> {
            s.split(',')
                .map(|t| {
                    F::parse_symbol(t.trim()).ok_or_else(|| Error::syntax(format!("bad field element {:?}", t.trim())))
                })
                .collect()
        };
        let v = parse(vs)?;
        let entries = parse(ms)?;
        let m = v.len();
        if entries.len() != m * m {
            return Err(Error::syntax(format!("constant {text:?}: expected {} matrix entries", m * m)));
        }
        let rows: Vec<Vec<F>> = entries.chunks(m).map(|c| c.to_vec()).collect();
        Self::new(Vector::from_slice(&v)?, Matrix::from_rows(&rows)?)
    }
}

/// Product of a nonempty list via the closed form
/// `⟨Σ_i (A_1⋯A_{i−1})·v_i, A_1⋯A_k⟩`.
pub fn hol_product<F: FiniteField>(gs: &[HolElement<F>]) -> Result<HolElement<F>, Error> {
    let first = gs.first().ok_or(Error::EmptyProduct)?;
    let m = first.dim();
    let mut prefix = Matrix::identity(m);
    let mut v = Vector::zero(m);
    for g in gs {
        if g.dim() != m {
            return Err(Error::DimensionMismatch { left: m, right: g.dim() });
        }
        v = v + prefix.mul_vec(&g.v)?;
        prefix = prefix * g.a;
    }
    Ok(HolElement { v, a: prefix })
}

/// Indices `i_1 < … < i_r` with `1 ≤ r ≤ |G|` whose subproduct equals
/// `target`, for a nonempty list.
///
/// While more than `|G|` factors remain, the prefix products
/// `b(1), …, b(r)` collide; for the first collision `b(u) = b(v)` the
/// factors `u+1..=v` multiply to 1 and are dropped. The first factor is
/// never dropped.
pub fn short_subproduct<F: FiniteField>(gs: &[HolElement<F>], target: &HolElement<F>) -> Result<Vec<usize>, Error> {
    if gs.is_empty() {
        return Err(Error::EmptyProduct);
    }
    let m = target.dim();
    let product = gs.iter().try_fold(HolElement::identity(m), |acc, g| acc.checked_mul(g))?;
    if product != *target {
        return Err(Error::Precondition("product of the list differs from the target".into()));
    }
    let order = HolElement::<F>::group_order(m);
    let mut kept: Vec<usize> = (0..gs.len()).collect();
    while kept.len() > order {
        let mut first_seen = std::collections::HashMap::new();
        let mut prefix = HolElement::identity(m);
        let mut segment = None;
        for (pos, &i) in kept.iter().enumerate() {
            prefix = prefix * gs[i];
            if let Some(&u) = first_seen.get(&prefix) {
                segment = Some((u + 1, pos + 1));
                break;
            }
            first_seen.insert(prefix, pos);
        }
        let (u, v) = segment.expect("more than |G| prefix products collide");
        kept.drain(u..v);
    }
    Ok(kept)
}
