//! Restricted equivalence to `PolEqv(Hol(q,m))`, and `coPolEqv` to `PolSat`.

use num_bigint::BigUint;

use crate::bounds::{self, BoundCheck};
use crate::field::FiniteField;
use crate::holomorph::{word_inverse, GroupWord, HolElement, Letter};
use crate::nearring::{collapse_word, default_collapse_target, idempotent_word, ProvenancedWord};
use crate::respoly::{Atom, Monomial, RestrictedPolynomial};
use crate::Error;

/// `φ(μ)`: each matrix constant `g` becomes `⟨0,g⟩`, variables stay.
pub fn phi<F: FiniteField>(m: usize, n: usize, mu: &Monomial<F>) -> Result<GroupWord<F>, Error> {
    let letters = mu
        .atoms()
        .iter()
        .map(|a| match a {
            Atom::Var(j) => Ok(Letter::Var(*j)),
            Atom::Const(c) => Ok(Letter::Const(HolElement::linear(*c)?)),
        })
        .collect::<Result<Vec<_>, Error>>()?;
    GroupWord::new(m, n, letters)
}

/// `w = Π_i φ(μ_i) · e(x_{n+1}) · φ(μ_i)⁻¹` over the monomials of `p`,
/// with `e` the given idempotent onto `V`. `p` vanishes on `GL^n` iff `w`
/// is an identity on `Hol^{n+1}`.
pub fn respoleqv_to_poleqv_with<F: FiniteField>(
    p: &RestrictedPolynomial<F>,
    e: &ProvenancedWord<F>,
) -> Result<GroupWord<F>, Error> {
    let m = p.dim();
    if m == 1 && F::ORDER == 2 {
        return Err(Error::Unsupported("Mat_1(F_2) is excluded".into()));
    }
    let n = p.num_vars();
    let e_last = e.word().substitute(&[GroupWord::new(m, n + 1, vec![Letter::Var(n)])?])?;
    let mut w = GroupWord::empty(m, n + 1);
    for mu in p.monomials() {
        let f = phi(m, n, mu)?;
        w = w.concat(&f).concat(&e_last).concat(&word_inverse(&f));
    }
    w.with_num_vars(n + 1)
}

/// [`respoleqv_to_poleqv_with`] using the cached idempotent word.
pub fn respoleqv_to_poleqv<F: FiniteField>(p: &RestrictedPolynomial<F>) -> Result<GroupWord<F>, Error> {
    let e = idempotent_word::<F>(p.dim())?;
    respoleqv_to_poleqv_with(p, &e)
}

/// `|w| ≤ (|e| + |Hol|)·|p|`.
pub fn poleqv_word_check<F: FiniteField>(p: &RestrictedPolynomial<F>, w: &GroupWord<F>) -> Result<BoundCheck, Error> {
    let e = idempotent_word::<F>(p.dim())?;
    let order = HolElement::<F>::group_order(p.dim());
    Ok(BoundCheck::new(
        "group word (|e|+|Hol|)*|p|",
        &BigUint::from(w.len()),
        Some(bounds::translation_bound(e.len(), order, p.len())),
    ))
}

/// Output of [`copoleqv_to_polsat`]: `w2 = a` is solvable iff the input
/// word is not an identity.
#[derive(Clone, Debug)]
pub struct SatInstance<F: FiniteField> {
    pub word: GroupWord<F>,
    pub target: HolElement<F>,
}

/// `x_{n+1} · f(w) · x_{n+1}^{|G|−1} = a`, with `f` the identity on `V` and
/// constantly `a` elsewhere.
pub fn copoleqv_to_polsat_with<F: FiniteField>(
    w: &GroupWord<F>,
    f: &ProvenancedWord<F>,
    a: HolElement<F>,
) -> Result<SatInstance<F>, Error> {
    let m = w.dim();
    let n = w.num_vars();
    let order = HolElement::<F>::group_order(m);
    let fw = f.word().substitute(std::slice::from_ref(w))?;
    let mut out = GroupWord::new(m, n + 1, vec![Letter::Var(n)])?;
    out = out.concat(&fw);
    for _ in 0..order - 1 {
        out.push(Letter::Var(n));
    }
    Ok(SatInstance { word: out.with_num_vars(n + 1)?, target: a })
}

/// [`copoleqv_to_polsat_with`] using the cached collapse word onto the
/// default target.
pub fn copoleqv_to_polsat<F: FiniteField>(w: &GroupWord<F>) -> Result<SatInstance<F>, Error> {
    if w.dim() == 1 && F::ORDER == 2 {
        return Err(Error::Unsupported("Hol(2,1) is excluded".into()));
    }
    let a = default_collapse_target::<F>(w.dim());
    let f = collapse_word(&a)?;
    copoleqv_to_polsat_with(w, &f, a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::F2;
    use crate::holomorph::{poleqv_bruteforce, polsat_bruteforce, word_evaluate, PermS4};
    use crate::matrix::Matrix;
    use crate::respoly::restricted_equivalence_bruteforce;

    fn x1_pow6_plus_i() -> RestrictedPolynomial<F2> {
        let mut p = RestrictedPolynomial::zero(2, 1);
        p.push(Monomial::new(vec![Atom::Var(0); 6]).unwrap());
        p.push(Monomial::constant(Matrix::identity(2)).unwrap());
        p
    }

    #[test]
    fn zero_polynomial_gives_empty_word() {
        let w = respoleqv_to_poleqv(&RestrictedPolynomial::<F2>::zero(2, 1)).unwrap();
        assert!(w.is_empty());
        assert_eq!(w.num_vars(), 2);
    }

    #[test]
    fn valid_and_invalid_polynomials() {
        let valid = x1_pow6_plus_i();
        let w = respoleqv_to_poleqv(&valid).unwrap();
        assert!(poleqv_bruteforce(&w, 1000).unwrap().is_none());
        assert!(!poleqv_word_check(&valid, &w).unwrap().violated());

        let invalid = RestrictedPolynomial::<F2>::var(2, 1, 0)
            .sum(&RestrictedPolynomial::constant(1, Matrix::identity(2)).unwrap());
        assert!(restricted_equivalence_bruteforce(&invalid, 100).unwrap().is_some());
        let w = respoleqv_to_poleqv(&invalid).unwrap();
        assert!(poleqv_bruteforce(&w, 1000).unwrap().is_some());
    }

    #[test]
    fn conjugation_formula() {
        // w(g, ⟨u,I⟩) = ⟨p(g)·u, I⟩
        let p = RestrictedPolynomial::<F2>::var(2, 1, 0)
            .sum(&RestrictedPolynomial::constant(1, Matrix::identity(2)).unwrap());
        let w = respoleqv_to_poleqv(&p).unwrap();
        for g in HolElement::<F2>::all(2).unwrap() {
            for u in crate::matrix::Vector::<F2>::all(2) {
                let value = word_evaluate(&w, &[g, HolElement::translation(u)]).unwrap();
                let expected = p.evaluate(&[g.matrix()]).unwrap().mul_vec(&u).unwrap();
                assert_eq!(value, HolElement::translation(expected));
            }
        }
    }

    #[test]
    fn constants_through_copoleqv() {
        let id = GroupWord::constant(HolElement::<F2>::identity(2));
        let inst = copoleqv_to_polsat(&id).unwrap();
        assert!(polsat_bruteforce(&inst.word, &inst.target, 1000).unwrap().is_none());
        let c = GroupWord::constant(PermS4::parse_cycles("(1 2)").unwrap().to_hol());
        let inst = copoleqv_to_polsat(&c).unwrap();
        assert!(polsat_bruteforce(&inst.word, &inst.target, 1000).unwrap().is_some());
    }
}
