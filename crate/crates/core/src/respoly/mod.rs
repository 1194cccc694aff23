//! Restricted polynomials over `Mat_m(F_q)`: formal sums of words in
//! variables and invertible constants.
//!
//! Expansion never merges or cancels terms, so the length of an expanded
//! object is exactly what the distributive law produces. Objects whose
//! expansion would be too large to materialize are kept as an [`RpExpr`]
//! tree that still knows its exact expanded length.

mod expr;
mod zero_indicator;

use std::fmt;

use crate::field::FiniteField;
use crate::matrix::{gl_enumerate, Matrix};
use crate::Error;

pub use expr::{conjunction_gadget, ExpansionAlgebra, RpExpr, Shape};
pub use zero_indicator::{zero_indicator, zero_indicator_with_cap, ZERO_INDICATOR_CAP};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Atom<F: FiniteField> {
    /// `x_{i+1}`.
    Var(usize),
    /// Always invertible.
    Const(Matrix<F>),
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial<F: FiniteField> {
    atoms: Vec<Atom<F>>,
}

impl<F: FiniteField> Monomial<F> {
    pub fn new(atoms: Vec<Atom<F>>) -> Result<Self, Error> {
        if atoms.is_empty() {
            return Err(Error::Precondition("a monomial has at least one letter".into()));
        }
        for a in &atoms {
            if let Atom::Const(c) = a {
                if !c.is_invertible() {
                    return Err(Error::Singular);
                }
            }
        }
        Ok(Monomial { atoms })
    }

    pub fn var(i: usize) -> Self {
        Monomial { atoms: vec![Atom::Var(i)] }
    }

    pub fn constant(c: Matrix<F>) -> Result<Self, Error> {
        Self::new(vec![Atom::Const(c)])
    }

    pub fn atoms(&self) -> &[Atom<F>] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of variable occurrences.
    pub fn degree(&self) -> usize {
        self.atoms.iter().filter(|a| matches!(a, Atom::Var(_))).count()
    }

    pub fn max_var(&self) -> Option<usize> {
        self.atoms
            .iter()
            .filter_map(|a| match a {
                Atom::Var(i) => Some(*i),
                Atom::Const(_) => None,
            })
            .max()
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut atoms = self.atoms.clone();
        atoms.extend_from_slice(&other.atoms);
        Monomial { atoms }
    }

    /// `c · μ` with `c ≠ 0`: folded into a leading constant when there is
    /// one, otherwise prepended as `c·I`.
    pub fn scaled(&self, c: F, m: usize) -> Self {
        assert!(!c.is_zero(), "scaling by zero");
        if c.is_one() {
            return self.clone();
        }
        let mut atoms = self.atoms.clone();
        match atoms.first_mut() {
            Some(Atom::Const(k)) => *k = k.scale(c),
            _ => atoms.insert(0, Atom::Const(Matrix::scalar(m, c))),
        }
        Monomial { atoms }
    }

    pub fn evaluate(&self, a: &[Matrix<F>], m: usize) -> Result<Matrix<F>, Error> {
        let mut acc = Matrix::identity(m);
        for atom in &self.atoms {
            let x = match atom {
                Atom::Var(i) => a.get(*i).ok_or(Error::UnboundVariable(*i))?,
                Atom::Const(c) => c,
            };
            acc = acc.checked_mul(x)?;
        }
        Ok(acc)
    }
}

/// A sum of restricted monomials over `Mat_m(F_q)` in variables
/// `x_1 … x_n`. The empty sum is the polynomial `0`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RestrictedPolynomial<F: FiniteField> {
    m: usize,
    n: usize,
    monomials: Vec<Monomial<F>>,
}

impl<F: FiniteField> RestrictedPolynomial<F> {
    pub fn new(m: usize, n: usize, monomials: Vec<Monomial<F>>) -> Result<Self, Error> {
        for mono in &monomials {
            if let Some(i) = mono.max_var() {
                if i >= n {
                    return Err(Error::Precondition(format!("variable x{} exceeds declared n = {n}", i + 1)));
                }
            }
            for a in &mono.atoms {
                if let Atom::Const(c) = a {
                    if c.dim() != m {
                        return Err(Error::DimensionMismatch { left: m, right: c.dim() });
                    }
                }
            }
        }
        Ok(RestrictedPolynomial { m, n, monomials })
    }

    pub fn zero(m: usize, n: usize) -> Self {
        RestrictedPolynomial { m, n, monomials: Vec::new() }
    }

    pub fn var(m: usize, n: usize, i: usize) -> Self {
        assert!(i < n);
        RestrictedPolynomial { m, n, monomials: vec![Monomial::var(i)] }
    }

    pub fn constant(n: usize, c: Matrix<F>) -> Result<Self, Error> {
        Ok(RestrictedPolynomial { m: c.dim(), n, monomials: vec![Monomial::constant(c)?] })
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn monomials(&self) -> &[Monomial<F>] {
        &self.monomials
    }

    pub fn num_monomials(&self) -> usize {
        self.monomials.len()
    }

    /// Total number of letters, `Σ |μ|`.
    pub fn len(&self) -> usize {
        self.monomials.iter().map(Monomial::len).sum()
    }

    /// True for the empty sum (not for polynomials that merely vanish).
    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn with_num_vars(mut self, n: usize) -> Result<Self, Error> {
        if let Some(i) = self.monomials.iter().filter_map(Monomial::max_var).max() {
            if i >= n {
                return Err(Error::Precondition(format!("polynomial uses x{}", i + 1)));
            }
        }
        self.n = n;
        Ok(self)
    }

    /// Distinct variable indices in order of first appearance.
    pub fn variables(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for mono in &self.monomials {
            for a in &mono.atoms {
                if let Atom::Var(i) = a {
                    if !out.contains(i) {
                        out.push(*i);
                    }
                }
            }
        }
        out
    }

    pub fn push(&mut self, mono: Monomial<F>) {
        if let Some(i) = mono.max_var() {
            self.n = self.n.max(i + 1);
        }
        self.monomials.push(mono);
    }

    /// Formal sum: monomial lists are concatenated.
    pub fn sum(&self, other: &Self) -> Self {
        assert_eq!(self.m, other.m, "matrix dimension mismatch");
        let mut monomials = self.monomials.clone();
        monomials.extend_from_slice(&other.monomials);
        RestrictedPolynomial { m: self.m, n: self.n.max(other.n), monomials }
    }

    /// `c · p`, applied monomialwise; `c = 0` gives the empty sum.
    pub fn scaled(&self, c: F) -> Self {
        if c.is_zero() {
            return Self::zero(self.m, self.n);
        }
        let monomials = self.monomials.iter().map(|mu| mu.scaled(c, self.m)).collect();
        RestrictedPolynomial { m: self.m, n: self.n, monomials }
    }

    pub fn neg(&self) -> Self {
        self.scaled(-F::one())
    }

    pub fn evaluate(&self, a: &[Matrix<F>]) -> Result<Matrix<F>, Error> {
        let mut acc = Matrix::zero(self.m);
        for mono in &self.monomials {
            acc = acc.checked_add(&mono.evaluate(a, self.m)?)?;
        }
        Ok(acc)
    }
}

impl<F: FiniteField> fmt::Display for RestrictedPolynomial<F> {
    /// Monomials joined by ` + `, letters by spaces; `0` for the empty sum.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.monomials.is_empty() {
            return f.write_str("0");
        }
        for (k, mono) in self.monomials.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            for (j, a) in mono.atoms.iter().enumerate() {
                if j > 0 {
                    f.write_str(" ")?;
                }
                match a {
                    Atom::Var(i) => write!(f, "x{}", i + 1)?,
                    Atom::Const(c) => write!(f, "{c}")?,
                }
            }
        }
        Ok(())
    }
}

/// Distributes `p_1 ⋯ p_k` into a sum of concatenated monomials. Terms
/// appear in odometer order with the first factor most significant.
pub fn rp_expand_product<F: FiniteField>(ps: &[RestrictedPolynomial<F>]) -> Result<RestrictedPolynomial<F>, Error> {
    let first = ps.first().ok_or(Error::EmptyProduct)?;
    let m = first.m;
    let mut n = 0;
    for p in ps {
        if p.m != m {
            return Err(Error::DimensionMismatch { left: m, right: p.m });
        }
        n = n.max(p.n);
    }
    let mut acc: Vec<Monomial<F>> = first.monomials.clone();
    for p in &ps[1..] {
        let mut next = Vec::with_capacity(acc.len() * p.monomials.len());
        for a in &acc {
            for b in &p.monomials {
                next.push(a.concat(b));
            }
        }
        acc = next;
    }
    let out = RestrictedPolynomial { m, n, monomials: acc };
    debug_assert!(crate::bounds::product_bound_holds(ps, &out));
    Ok(out)
}

/// `q ∘ p`: every occurrence of the single variable of `q` is replaced by
/// `p` and the result is expanded. A `q` without variables is returned as is
/// (with `p`'s variable count).
pub fn rp_substitute<F: FiniteField>(
    q: &RestrictedPolynomial<F>,
    p: &RestrictedPolynomial<F>,
) -> Result<RestrictedPolynomial<F>, Error> {
    if q.m != p.m {
        return Err(Error::DimensionMismatch { left: q.m, right: p.m });
    }
    let vars = q.variables();
    if vars.len() > 1 {
        return Err(Error::Precondition(format!("outer polynomial has {} variables", vars.len())));
    }
    let mut out = RestrictedPolynomial::zero(q.m, p.n);
    for mono in &q.monomials {
        let factors: Vec<RestrictedPolynomial<F>> = mono
            .atoms
            .iter()
            .map(|a| match a {
                Atom::Var(_) => p.clone(),
                Atom::Const(c) => {
                    RestrictedPolynomial { m: q.m, n: p.n, monomials: vec![Monomial { atoms: vec![Atom::Const(*c)] }] }
                }
            })
            .collect();
        out = out.sum(&rp_expand_product(&factors)?);
    }
    debug_assert!(crate::bounds::composition_bound_holds(q, p, &out));
    Ok(out)
}

/// Visits `GL_m(F_q)^n` lexicographically (`x_1` most significant) until
/// `visit` returns true; returns that point.
pub fn for_each_gl_point<F: FiniteField>(
    m: usize,
    n: usize,
    cap: u64,
    mut visit: impl FnMut(&[Matrix<F>]) -> Result<bool, Error>,
) -> Result<Option<Vec<Matrix<F>>>, Error> {
    let gl = gl_enumerate::<F>(m)?;
    match (gl.len() as u128).checked_pow(n as u32) {
        Some(t) if t <= cap as u128 => {}
        _ => return Err(Error::cap(format!("{}^{n}", gl.len()), cap)),
    }
    let mut idx = vec![0usize; n];
    let mut point: Vec<Matrix<F>> = vec![gl[0]; n];
    loop {
        if visit(&point)? {
            return Ok(Some(point));
        }
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(None);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < gl.len() {
                point[pos] = gl[idx[pos]];
                break;
            }
            idx[pos] = 0;
            point[pos] = gl[0];
        }
    }
}

/// First point of `GL_m(F_q)^n` (lexicographic, `x_1` most significant)
/// where `p` is nonzero; `None` means `p` vanishes on all invertible inputs.
pub fn restricted_equivalence_bruteforce<F: FiniteField>(
    p: &RestrictedPolynomial<F>,
    cap: u64,
) -> Result<Option<Vec<Matrix<F>>>, Error> {
    for_each_gl_point(p.m, p.n, cap, |x| Ok(!p.evaluate(x)?.is_zero()))
}

/// As [`restricted_equivalence_bruteforce`] for a deferred expression.
pub fn expr_equivalence_bruteforce<F: FiniteField>(e: &RpExpr<F>, cap: u64) -> Result<Option<Vec<Matrix<F>>>, Error> {
    for_each_gl_point(e.dim(), e.num_vars(), cap, |x| Ok(!e.evaluate(x)?.is_zero()))
}
