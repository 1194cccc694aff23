//! Restricted equivalence over `Mat2(F2)` ⇄ the F4 arithmetic problem.

use num_traits::{One, Zero};

use super::pairs::{constant_signs, f_encode, rho, F4Pair};
use super::{signs, P1Instance, Z3Poly};
use crate::field::{F2, F4, Z3};
use crate::matrix::Matrix;
use crate::respoly::{Atom, Monomial, RestrictedPolynomial};
use crate::Error;

/// Variable index of `x_{(k,l)}` (both 1-based) among the `3n + 1` outputs.
pub fn triple_index(k: usize, l: usize) -> usize {
    3 * (k - 1) + (l - 1)
}

/// `sgn(σ^i α^j) = (−1)^i` as a Z3 sign; `None` for singular matrices.
pub fn sgn(x: &Matrix<F2>) -> Option<Z3> {
    if !x.is_invertible() {
        return None;
    }
    Some(signs::from_bit(F4::from_matrix(x).is_none()))
}

/// Exponent polynomials of the `⊕`-sums `a = ⊕ α^{a_i}` and `b = ⊕ α^{b_i}`
/// with `ρ(a, b) = p(ρ∘f(x_{(1,1)}, x_{(1,2)} + x_{(1,3)}), …)` on all sign
/// points. Polynomials are over `3n + 1` variables; the last is unused here.
pub fn pair_exponents(p: &RestrictedPolynomial<F2>) -> Result<(Vec<Z3Poly>, Vec<Z3Poly>), Error> {
    if p.dim() != 2 {
        return Err(Error::Unsupported(format!("Mat_{}(F2); only 2x2 matrices are encoded over F4", p.dim())));
    }
    let n = p.num_vars();
    let total = 3 * n + 1;
    let table = constant_signs();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for mu in p.monomials() {
        let z: Vec<[Z3Poly; 3]> = mu
            .atoms()
            .iter()
            .map(|atom| match atom {
                Atom::Var(k) => Ok([1, 2, 3].map(|l| Z3Poly::var(total, triple_index(k + 1, l)))),
                Atom::Const(c) => {
                    let (_, s) = table.iter().find(|(d, _)| d == c).ok_or(Error::Singular)?;
                    Ok(s.map(|x| Z3Poly::constant(total, x)))
                }
            })
            .collect::<Result<_, Error>>()?;
        // u = Π z_{j,1};  v = Σ_i (z_{i,2} + z_{i,3}) Π_{j>i} z_{j,1}
        let mut u = Z3Poly::constant(total, Z3::one());
        let mut v = Z3Poly::zero(total);
        for zi in &z {
            u = u.mul(&zi[0])?;
            v = v.mul(&zi[0])?.add(&zi[1])?.add(&zi[2])?;
        }
        let uv = u.add(&v)?;
        a.push(uv.clone());
        a.push(v.add(&Z3Poly::constant(total, Z3::new(2)))?);
        b.push(uv);
        b.push(v.add(&Z3Poly::constant(total, Z3::new(1)))?);
    }
    Ok((a, b))
}

/// The encoded matrices `ρ(f(s_1, s_2 + s_3))` for each variable triple of a
/// sign point over `3n` or `3n + 1` variables.
pub fn decode_point(n: usize, point: &[Z3]) -> Vec<Matrix<F2>> {
    (1..=n)
        .map(|k| {
            let s = |l| point[triple_index(k, l)];
            rho(f_encode(s(1), s(2) + s(3)))
        })
        .collect()
}

/// A sign point over `3n + 1` variables encoding the given matrices, with
/// the selector `x_{(n+1,1)}` set to `selector`.
pub fn encode_point(matrices: &[Matrix<F2>], selector: Z3) -> Result<Vec<Z3>, Error> {
    let table = constant_signs();
    let mut out = Vec::with_capacity(3 * matrices.len() + 1);
    for c in matrices {
        let (_, s) = table.iter().find(|(d, _)| d == c).ok_or(Error::Singular)?;
        out.extend_from_slice(s);
    }
    out.push(selector);
    Ok(out)
}

/// Evaluates `⊕ α^{e_i}` at a sign point.
pub fn alpha_sum(exponents: &[Z3Poly], point: &[Z3]) -> Result<F4, Error> {
    exponents.iter().try_fold(F4::zero(), |acc, e| Ok(acc + F4::alpha_pow(e.evaluate(point)?)))
}

/// `r = (α^{x'} ⊕ α)·a ⊕ (α^{x'} ⊕ α²)·b` expanded into α-power terms,
/// `x' = x_{(n+1,1)}`. The instance is valid iff `p` vanishes on
/// `GL_2(F2)^n`. With no monomials the instance is `α⁰ ⊕ α⁰`.
pub fn respoly_to_p1(p: &RestrictedPolynomial<F2>) -> Result<P1Instance, Error> {
    let n = p.num_vars();
    let total = 3 * n + 1;
    let (a, b) = pair_exponents(p)?;
    let xp = Z3Poly::var(total, 3 * n);
    let mut polys = Vec::with_capacity(2 * (a.len() + b.len()));
    for (group, shift) in [(&a, Z3::one()), (&b, Z3::new(2))] {
        for e in group {
            polys.push(xp.add(e)?.multilinear_reduce());
            polys.push(e.add(&Z3Poly::constant(total, shift))?.multilinear_reduce());
        }
    }
    if polys.is_empty() {
        polys = vec![Z3Poly::zero(total), Z3Poly::zero(total)];
    }
    P1Instance::new(total, polys)
}

/// `s = Σ_i Π_j m_{ij} α m_{ij}⁵` after splitting coefficient-2 monomials
/// into two copies. For `Y ∈ GL_2(F2)^n`, `s(Y) = ⊕ α^{p_i(sgn Y)}`.
pub fn p1_to_respoly(inst: &P1Instance) -> Result<RestrictedPolynomial<F2>, Error> {
    let n = inst.num_vars();
    let alpha = F4::ALPHA.to_matrix();
    let mut s = RestrictedPolynomial::zero(2, n);
    for p in inst.polys() {
        let mut atoms: Vec<Atom<F2>> = Vec::new();
        for (e, c) in p.terms() {
            let m: Vec<Atom<F2>> =
                e.iter().enumerate().flat_map(|(j, &k)| std::iter::repeat_n(Atom::Var(j), k as usize)).collect();
            for _ in 0..c.value() {
                atoms.extend_from_slice(&m);
                atoms.push(Atom::Const(alpha));
                for _ in 0..5 {
                    atoms.extend_from_slice(&m);
                }
            }
        }
        if atoms.is_empty() {
            atoms.push(Atom::Const(Matrix::identity(2)));
        }
        s.push(Monomial::new(atoms)?);
    }
    Ok(s)
}

/// `ρ(a, b)` at a point, from [`pair_exponents`].
pub fn pair_value(a: &[Z3Poly], b: &[Z3Poly], point: &[Z3]) -> Result<F4Pair, Error> {
    Ok(F4Pair(alpha_sum(a, point)?, alpha_sum(b, point)?))
}
