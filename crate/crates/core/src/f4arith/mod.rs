//! The F4 arithmetic problem: given expanded `p_1 … p_k ∈ Z3[x_1 … x_n]`,
//! is `α^{p_1(a)} ⊕ … ⊕ α^{p_k(a)} = 0` for every `a ∈ {−1,1}^n`?

mod pairs;
mod reductions;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::field::{F4, Z3};
use crate::Error;

pub use pairs::{constant_signs, f_encode, rho, sigma, star_mul, F4Pair};
pub use reductions::{
    alpha_sum, decode_point, encode_point, p1_to_respoly, pair_exponents, pair_value, respoly_to_p1, sgn, triple_index,
};

/// The one place where the three encodings of a sign meet:
/// `+1 ↔ Z3 1 ↔ bit 0` and `−1 ↔ Z3 2 ↔ bit 1`.
pub mod signs {
    use crate::field::Z3;

    pub fn from_bit(bit: bool) -> Z3 {
        if bit {
            Z3::new(2)
        } else {
            Z3::new(1)
        }
    }

    /// Panics on `0`, which is not a sign.
    pub fn to_bit(s: Z3) -> bool {
        match s.value() {
            1 => false,
            2 => true,
            _ => panic!("0 is not a sign"),
        }
    }

    pub fn from_i8(s: i8) -> Z3 {
        from_bit(s < 0)
    }

    pub fn to_i8(s: Z3) -> i8 {
        if to_bit(s) {
            -1
        } else {
            1
        }
    }

    /// Sign point for the bit pattern `code`, `x_1` in the most significant
    /// of the `n` low bits.
    pub fn point(n: usize, code: u64) -> Vec<Z3> {
        (0..n).map(|i| from_bit(code >> (n - 1 - i) & 1 == 1)).collect()
    }
}

/// Polynomial over Z3 in expanded form: exponent vectors with nonzero
/// coefficients. Exponents stay in `{0,1,2}` because products use
/// `x³ = x`, which holds for every value in Z3.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Z3Poly {
    n: usize,
    terms: BTreeMap<Vec<u8>, Z3>,
}

impl Z3Poly {
    pub fn zero(n: usize) -> Self {
        Z3Poly { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: Z3) -> Self {
        let mut p = Self::zero(n);
        p.add_term(vec![0; n], c);
        p
    }

    /// `x_{i+1}`.
    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        let mut p = Self::zero(n);
        p.add_term(e, Z3::one());
        p
    }

    /// Sums the given terms; exponents above 2 are folded with `x³ = x`.
    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Vec<u8>, Z3)>) -> Result<Self, Error> {
        let mut p = Self::zero(n);
        for (e, c) in terms {
            if e.len() != n {
                return Err(Error::ParameterMismatch(format!("exponent vector of length {} for n = {n}", e.len())));
            }
            p.add_term(e.into_iter().map(fold_exponent).collect(), c);
        }
        Ok(p)
    }

    fn add_term(&mut self, e: Vec<u8>, c: Z3) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert(Z3::zero());
        *slot = *slot + c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    /// Monomials in exponent-vector order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u8], Z3)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), *c))
    }

    pub fn num_monomials(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn with_num_vars(&self, n: usize) -> Result<Self, Error> {
        if n < self.n && self.terms.keys().any(|e| e[n..].iter().any(|&x| x > 0)) {
            return Err(Error::Precondition(format!("polynomial uses variables beyond x{n}")));
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut e = e.clone();
                e.resize(n, 0);
                (e, *c)
            })
            .collect();
        Ok(Z3Poly { n, terms })
    }

    fn check(&self, other: &Self) -> Result<(), Error> {
        if self.n != other.n {
            return Err(Error::ParameterMismatch(format!("{} vs {} variables", self.n, other.n)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, Error> {
        self.check(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), *c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: Z3) -> Self {
        let mut out = Self::zero(self.n);
        for (e, d) in &self.terms {
            out.add_term(e.clone(), *d * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self, Error> {
        self.check(other)?;
        let mut out = Self::zero(self.n);
        for (e, c) in &self.terms {
            for (f, d) in &other.terms {
                let g = e.iter().zip(f).map(|(a, b)| fold_exponent(a + b)).collect();
                out.add_term(g, *c * *d);
            }
        }
        Ok(out)
    }

    pub fn evaluate(&self, a: &[Z3]) -> Result<Z3, Error> {
        if a.len() != self.n {
            return Err(Error::ParameterMismatch(format!("{} values for {} variables", a.len(), self.n)));
        }
        let mut acc = Z3::zero();
        for (e, c) in &self.terms {
            let mut t = *c;
            for (x, &k) in a.iter().zip(e) {
                for _ in 0..k {
                    t = t * *x;
                }
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    /// Remainder modulo `x_i² − 1`: every exponent reduced mod 2. Agrees with
    /// `self` on `{−1,1}^n`.
    pub fn multilinear_reduce(&self) -> Self {
        let mut out = Self::zero(self.n);
        for (e, c) in &self.terms {
            out.add_term(e.iter().map(|x| x % 2).collect(), *c);
        }
        out
    }

    pub fn is_multilinear(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x <= 1))
    }
}

fn fold_exponent(e: u8) -> u8 {
    if e <= 2 {
        e
    } else {
        2 - e % 2
    }
}

impl fmt::Display for Z3Poly {
    /// `c*x1^e1*x2^e2 + …`, factors with exponent 0 omitted; `0` when empty.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{}", c.value())?;
            for (i, &x) in e.iter().enumerate() {
                if x > 0 {
                    write!(f, "*x{}^{}", i + 1, x)?;
                }
            }
        }
        Ok(())
    }
}

/// An instance of the F4 arithmetic problem.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct P1Instance {
    n: usize,
    polys: Vec<Z3Poly>,
}

impl P1Instance {
    pub fn new(n: usize, polys: Vec<Z3Poly>) -> Result<Self, Error> {
        if polys.is_empty() {
            return Err(Error::Precondition("an instance needs at least one polynomial".into()));
        }
        let polys = polys.into_iter().map(|p| p.with_num_vars(n)).collect::<Result<_, _>>()?;
        Ok(P1Instance { n, polys })
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn polys(&self) -> &[Z3Poly] {
        &self.polys
    }

    /// Total monomial count.
    pub fn size(&self) -> usize {
        self.polys.iter().map(Z3Poly::num_monomials).sum()
    }

    /// `⊕_i α^{p_i(a)}` at a sign point.
    pub fn evaluate(&self, a: &[Z3]) -> Result<F4, Error> {
        self.polys.iter().try_fold(F4::zero(), |acc, p| Ok(acc + F4::alpha_pow(p.evaluate(a)?)))
    }

    /// Every exponent polynomial multilinear-reduced.
    pub fn multilinear_reduce(&self) -> Self {
        P1Instance { n: self.n, polys: self.polys.iter().map(Z3Poly::multilinear_reduce).collect() }
    }
}

/// First sign point (bits `0 → +1`, `1 → −1`, `x_1` most significant)
/// where the sum is nonzero; `None` means the instance is valid.
pub fn p1_equivalence_bruteforce(inst: &P1Instance, cap: u64) -> Result<Option<Vec<Z3>>, Error> {
    let n = inst.num_vars();
    if n >= 64 || (1u64 << n) > cap {
        return Err(Error::cap(format!("2^{n}"), cap));
    }
    for code in 0..(1u64 << n) {
        let a = signs::point(n, code);
        if !inst.evaluate(&a)?.is_zero() {
            return Ok(Some(a));
        }
    }
    Ok(None)
}

/// `α^t` in F4.
pub fn f4_power(t: Z3) -> F4 {
    F4::alpha_pow(t)
}
