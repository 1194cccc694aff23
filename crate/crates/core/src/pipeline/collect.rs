//! From a holomorph equation `w = 1` to restricted polynomial inequalities.
//!
//! Writing every variable as `⟨y_j, Z_j⟩` and multiplying out gives
//!
//! ```text
//! w = ⟨ Σ_j p_j(Z)·y_j + Σ_t p_{n+t}(Z)·c_t ,  p_0(Z) ⟩
//! ```
//!
//! where `c_1 … c_l` enumerate `F_q^m` and each `p_j` collects the prefix
//! products `V_1⋯V_{i−1}` in front of the letters carrying `y_j` (or `c_t`).
//! A solution can be assumed to have at most `l` nonzero `y_j`, so the
//! vector part is fixed to each `v ∈ T` in turn and the system becomes a
//! single inequality `e_v(Z) ≠ 0`.

use std::sync::Arc;

use num_bigint::BigUint;
use serde::Serialize;

use crate::bounds::{self, BoundCheck};
use crate::field::FiniteField;
use crate::holomorph::{Assignment, GroupWord, HolElement, Letter};
use crate::matrix::{invertible_sum, Matrix, Vector};
use crate::respoly::{conjunction_gadget, zero_indicator, Atom, Monomial, RestrictedPolynomial, RpExpr};
use crate::Error;

/// Coefficients of the collected form of a word.
#[derive(Clone, Debug)]
pub struct Collected<F: FiniteField> {
    /// `p_0 = V_1⋯V_k`.
    pub p0: RestrictedPolynomial<F>,
    /// `p_1 … p_n` (acting on the variable vectors) then `p_{n+1} … p_{n+l}`
    /// (acting on the constant vectors in [`Vector::all`] order).
    pub coefficients: Vec<RestrictedPolynomial<F>>,
}

fn letter_matrix<F: FiniteField>(l: &Letter<F>) -> Atom<F> {
    match l {
        Letter::Var(j) => Atom::Var(*j),
        Letter::Const(g) => Atom::Const(g.matrix()),
    }
}

/// The collecting step. An empty word is treated as the one-letter word
/// `⟨0,I⟩`, which has the same value.
pub fn collect<F: FiniteField>(w: &GroupWord<F>) -> Result<Collected<F>, Error> {
    let m = w.dim();
    let n = w.num_vars();
    let identity_word;
    let w = if w.is_empty() {
        identity_word = GroupWord::constant(HolElement::identity(m)).with_num_vars(n)?;
        &identity_word
    } else {
        w
    };
    let vectors = Vector::<F>::all(m);
    let mut coefficients = vec![RestrictedPolynomial::zero(m, n); n + vectors.len()];
    let letters = w.letters();
    for (i, l) in letters.iter().enumerate() {
        let prefix: Vec<Atom<F>> = if i == 0 {
            vec![Atom::Const(Matrix::identity(m))]
        } else {
            letters[..i].iter().map(letter_matrix).collect()
        };
        let slot = match l {
            Letter::Var(j) => *j,
            Letter::Const(g) => n + g.vector().code(),
        };
        coefficients[slot].push(Monomial::new(prefix)?);
    }
    let p0 = RestrictedPolynomial::new(m, n, vec![Monomial::new(letters.iter().map(letter_matrix).collect())?])?;
    Ok(Collected { p0, coefficients })
}

/// One member `e_v` of the inequality set.
#[derive(Clone, Debug)]
pub struct Inequality<F: FiniteField> {
    /// The fixed vector parts `v_1 … v_n`.
    pub v: Vec<Vector<F>>,
    /// Expansion of `Σ p_i(Z)·(M_i + N_i)`; vanishes iff the vector part of
    /// the collected word does at `y = v`.
    pub b: RestrictedPolynomial<F>,
    /// `p_0 + (−I)`.
    pub p0_minus_i: RestrictedPolynomial<F>,
    /// `e_v`, nonzero exactly where both `b` and `p_0 − I` vanish.
    pub e: RpExpr<F>,
}

#[derive(Clone, Debug)]
pub struct InequalitySet<F: FiniteField> {
    pub m: usize,
    pub n: usize,
    /// Length of the input word (at least 1).
    pub k: usize,
    /// `l = q^m`.
    pub l: usize,
    pub collected: Collected<F>,
    pub inequalities: Vec<Inequality<F>>,
}

/// `v ∈ (F_q^m)^n` with at most `l` nonzero entries, by support size and
/// then lexicographically.
pub fn support_set<F: FiniteField>(m: usize, n: usize, cap: u64) -> Result<Vec<Vec<Vector<F>>>, Error> {
    let vectors = Vector::<F>::all(m);
    let l = vectors.len();
    let mut size = BigUint::from(0u32);
    let mut binom = BigUint::from(1u32);
    for s in 0..=l.min(n) {
        size += &binom * BigUint::from(l - 1).pow(s as u32);
        binom = binom * BigUint::from(n - s) / BigUint::from(s + 1);
    }
    if size > BigUint::from(cap) {
        return Err(Error::cap(format!("{size} support vectors"), cap));
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n);
    fn rec<F: FiniteField>(
        vectors: &[Vector<F>],
        n: usize,
        budget: usize,
        current: &mut Vec<Vector<F>>,
        out: &mut Vec<Vec<Vector<F>>>,
    ) {
        if current.len() == n {
            out.push(current.clone());
            return;
        }
        for v in vectors {
            let nonzero = !v.is_zero();
            if nonzero && budget == 0 {
                continue;
            }
            current.push(*v);
            rec(vectors, n, budget - usize::from(nonzero), current, out);
            current.pop();
        }
    }
    rec(&vectors, n, l, &mut current, &mut out);
    out.sort_by_key(|v| v.iter().filter(|x| !x.is_zero()).count());
    Ok(out)
}

fn neg_identity<F: FiniteField>(m: usize) -> Matrix<F> {
    Matrix::scalar(m, -F::one())
}

/// Builds `E = {e_v : v ∈ T}`. `cap` bounds `|T|`.
pub fn collect_to_inequalities<F: FiniteField>(w: &GroupWord<F>, cap: u64) -> Result<InequalitySet<F>, Error> {
    let m = w.dim();
    if m == 1 && F::ORDER == 2 {
        return Err(Error::Unsupported("Hol(2,1) is excluded".into()));
    }
    let n = w.num_vars();
    let collected = collect(w)?;
    let vectors = Vector::<F>::all(m);
    let l = vectors.len();
    let splits: Vec<(Matrix<F>, Matrix<F>)> =
        vectors.iter().map(|c| invertible_sum(&Matrix::first_column(c))).collect::<Result<_, _>>()?;

    let mut p0_minus_i = collected.p0.clone();
    p0_minus_i.push(Monomial::constant(neg_identity(m))?);
    let p0_minus_i = Arc::new(p0_minus_i);

    let mut inequalities = Vec::new();
    for v in support_set::<F>(m, n, cap)? {
        let mut b = RestrictedPolynomial::zero(m, n);
        let used = v
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(j, x)| (j, x.code()))
            .chain((0..l).map(|t| (n + t, t)));
        for (slot, code) in used {
            let (mm, nn) = splits[code];
            for mu in collected.coefficients[slot].monomials() {
                for c in [mm, nn] {
                    b.push(mu.concat(&Monomial::constant(c)?));
                }
            }
        }
        if b.is_empty() {
            // Keeps both gadget inputs nonempty; I + (−I) is the zero function.
            b.push(Monomial::constant(Matrix::identity(m))?);
            b.push(Monomial::constant(neg_identity(m))?);
        }
        let e = conjunction_gadget(RpExpr::from(b.clone()), RpExpr::from((*p0_minus_i).clone()))?.with_num_vars(n)?;
        inequalities.push(Inequality { v, b, p0_minus_i: (*p0_minus_i).clone(), e });
    }
    Ok(InequalitySet { m, n, k: w.len().max(1), l, collected, inequalities })
}

impl<F: FiniteField> InequalitySet<F> {
    pub fn len(&self) -> usize {
        self.inequalities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inequalities.is_empty()
    }

    /// First `(index, Z)` with `e_index(Z) ≠ 0`, checking each member over
    /// `GL_m(F_q)^n` separately.
    pub fn find_nonzero(&self, cap: u64) -> Result<Option<(usize, Vec<Matrix<F>>)>, Error> {
        for (i, ineq) in self.inequalities.iter().enumerate() {
            let hit = crate::respoly::for_each_gl_point(self.m, self.n, cap, |z| Ok(!ineq.e.evaluate(z)?.is_zero()))?;
            if let Some(z) = hit {
                return Ok(Some((i, z)));
            }
        }
        Ok(None)
    }

    /// The assignment `x_j = ⟨v_j, Z_j⟩` that a nonzero `e_v(Z)` encodes.
    pub fn witness(&self, index: usize, z: &[Matrix<F>]) -> Result<Assignment<F>, Error> {
        let ineq = &self.inequalities[index];
        ineq.v.iter().zip(z).map(|(v, a)| HolElement::new(*v, *a)).collect()
    }

    /// Cardinality and per-member length bounds, plus the gadget bound for
    /// each member.
    pub fn bound_checks(&self) -> Result<Vec<BoundCheck>, Error> {
        let c = zero_indicator::<F>(self.m)?.len();
        let mut out = vec![BoundCheck::new(
            "collected inequality count (n*l)^l",
            &BigUint::from(self.len()),
            bounds::inequality_count_bound(self.n, self.l),
        )];
        let item2 = bounds::inequality_length_bound(c, self.k);
        for (i, ineq) in self.inequalities.iter().enumerate() {
            let len = ineq.e.len();
            out.push(BoundCheck::new(&format!("e[{i}] length 2C^3(2k^2(k+1))^(2C)"), &len, Some(item2.clone())));
            out.push(BoundCheck::new(
                &format!("e[{i}] conjunction 2C^3(|p1||p2|)^(2C)"),
                &len,
                bounds::conjunction_bound(c, ineq.b.len(), ineq.p0_minus_i.len()),
            ));
        }
        Ok(out)
    }
}

/// Disjunction combiner: the expansion of
/// `Σ_i (y_i⁽¹⁾ + y_i⁽²⁾)·p_i`, with `y_i⁽¹⁾ = x_{n+2i−1}` and
/// `y_i⁽²⁾ = x_{n+2i}` (1-based). Some `p_i` is nonzero somewhere on
/// `GL^n` iff the result is nonzero somewhere on `GL^{n+2k}`.
pub fn combine_inequalities<F: FiniteField>(m: usize, n: usize, ps: &[RpExpr<F>]) -> Result<RpExpr<F>, Error> {
    let total = n + 2 * ps.len();
    let mut terms = Vec::with_capacity(ps.len());
    for (i, p) in ps.iter().enumerate() {
        if p.dim() != m {
            return Err(Error::DimensionMismatch { left: m, right: p.dim() });
        }
        if p.num_vars() > n {
            return Err(Error::Precondition(format!(
                "inequality uses {} variables, expected at most {n}",
                p.num_vars()
            )));
        }
        let y = RestrictedPolynomial::var(m, total, n + 2 * i).sum(&RestrictedPolynomial::var(m, total, n + 2 * i + 1));
        terms.push(RpExpr::product(vec![RpExpr::from(y), p.clone()])?);
    }
    RpExpr::sum(m, terms)?.with_num_vars(total)
}

/// Size check for [`combine_inequalities`] against `2k + 2Σ|p_i|`.
pub fn combination_check<F: FiniteField>(ps: &[RpExpr<F>], u: &RpExpr<F>) -> BoundCheck {
    let sum: BigUint = ps.iter().map(RpExpr::len).sum();
    let bound = BigUint::from(2 * ps.len()) + BigUint::from(2u32) * sum;
    BoundCheck::new("combined size 2k+2*sum|p_i|", &u.len(), Some(bound))
}

/// `PolSat(Hol(q,m))` to the complement of restricted equivalence.
#[derive(Clone, Debug)]
pub struct RespolReduction<F: FiniteField> {
    pub inequalities: InequalitySet<F>,
    /// Over `n + 2r` variables with `r = |E|`.
    pub u: RpExpr<F>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReductionSummary {
    pub n: usize,
    pub k: usize,
    pub support_set: Vec<String>,
    pub output_variables: usize,
    pub output_length: String,
    pub bounds: Vec<BoundCheck>,
}

pub fn polsat_to_respoleqv<F: FiniteField>(w: &GroupWord<F>, cap: u64) -> Result<RespolReduction<F>, Error> {
    let inequalities = collect_to_inequalities(w, cap)?;
    let es: Vec<RpExpr<F>> = inequalities.inequalities.iter().map(|i| i.e.clone()).collect();
    let u = combine_inequalities(inequalities.m, inequalities.n, &es)?;
    Ok(RespolReduction { inequalities, u })
}

impl<F: FiniteField> RespolReduction<F> {
    pub fn bound_checks(&self) -> Result<Vec<BoundCheck>, Error> {
        let mut out = self.inequalities.bound_checks()?;
        let es: Vec<RpExpr<F>> = self.inequalities.inequalities.iter().map(|i| i.e.clone()).collect();
        out.push(combination_check(&es, &self.u));
        Ok(out)
    }

    pub fn summary(&self) -> Result<ReductionSummary, Error> {
        Ok(ReductionSummary {
            n: self.inequalities.n,
            k: self.inequalities.k,
            support_set: self
                .inequalities
                .inequalities
                .iter()
                .map(|i| i.v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "))
                .collect(),
            output_variables: self.u.num_vars(),
            output_length: self.u.len().to_string(),
            bounds: self.bound_checks()?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::F2;
    use crate::holomorph::{polsat_bruteforce, word_evaluate, PermS4};
    use crate::respoly::expr_equivalence_bruteforce;

    fn example_word() -> GroupWord<F2> {
        let c = PermS4::parse_cycles("(1 2)").unwrap().to_hol();
        let lhs = GroupWord::from_letters(2, vec![Letter::Var(0), Letter::Var(1), Letter::Const(c)]).unwrap();
        let rhs = GroupWord::from_letters(2, vec![Letter::Var(1), Letter::Var(0)]).unwrap();
        GroupWord::equation(&lhs, &rhs)
    }

    #[test]
    fn collected_form_evaluates_like_the_word() {
        let w = example_word();
        let col = collect(&w).unwrap();
        let g = crate::holomorph::HolGroup::<F2>::shared(2).unwrap();
        let vectors = Vector::<F2>::all(2);
        for &a in g.elements().iter().step_by(5) {
            for &b in g.elements().iter().step_by(7) {
                let z = [a.matrix(), b.matrix()];
                let mut vec_part = Vector::zero(2);
                for (j, y) in [a.vector(), b.vector()].iter().enumerate() {
                    vec_part = vec_part + col.coefficients[j].evaluate(&z).unwrap().mul_vec(y).unwrap();
                }
                for (t, c) in vectors.iter().enumerate() {
                    vec_part = vec_part + col.coefficients[2 + t].evaluate(&z).unwrap().mul_vec(c).unwrap();
                }
                let value = word_evaluate(&w, &[a, b]).unwrap();
                assert_eq!(value.vector(), vec_part);
                assert_eq!(value.matrix(), col.p0.evaluate(&z).unwrap());
            }
        }
    }

    #[test]
    fn support_set_order_and_size() {
        let t = support_set::<F2>(2, 2, 1000).unwrap();
        assert_eq!(t.len(), 16);
        assert!(t[0].iter().all(Vector::is_zero));
        let t5 = support_set::<F2>(2, 5, 1_000_000).unwrap();
        // All tuples with at most 4 nonzero entries out of 5.
        assert_eq!(t5.len(), 4usize.pow(5) - 3usize.pow(5));
        assert!(t5
            .windows(2)
            .all(|p| p[0].iter().filter(|x| !x.is_zero()).count() <= p[1].iter().filter(|x| !x.is_zero()).count()));
    }

    #[test]
    fn example_word_gives_vanishing_inequalities() {
        let set = collect_to_inequalities(&example_word(), 1 << 20).unwrap();
        assert_eq!(set.len(), 16);
        assert!(set.find_nonzero(1 << 20).unwrap().is_none());
        assert!(set.bound_checks().unwrap().iter().all(|c| !c.violated()));
    }

    #[test]
    fn identity_word_is_satisfiable() {
        for w in [GroupWord::<F2>::constant(HolElement::identity(2)), GroupWord::empty(2, 0)] {
            let set = collect_to_inequalities(&w, 100).unwrap();
            let (i, z) = set.find_nonzero(100).unwrap().unwrap();
            assert!(word_evaluate(&w, &set.witness(i, &z).unwrap()).unwrap().is_identity());
        }
    }

    #[test]
    fn witnesses_solve_the_word() {
        let x = Letter::Var(0);
        let c = Letter::Const(PermS4::parse_cycles("(1 2 3)").unwrap().to_hol());
        let w = GroupWord::from_letters(2, vec![x, x, c]).unwrap();
        let set = collect_to_inequalities(&w, 100).unwrap();
        let (i, z) = set.find_nonzero(100).unwrap().expect("x^2 = (1 3 2) is solvable");
        assert!(word_evaluate(&w, &set.witness(i, &z).unwrap()).unwrap().is_identity());
        assert!(polsat_bruteforce(&w, &HolElement::identity(2), 100).unwrap().is_some());
    }

    #[test]
    fn combination_is_a_disjunction() {
        let x1_plus_i = RestrictedPolynomial::<F2>::var(2, 1, 0)
            .sum(&RestrictedPolynomial::constant(1, Matrix::identity(2)).unwrap());
        let zero = RestrictedPolynomial::<F2>::zero(2, 1);
        let u = combine_inequalities(2, 1, &[x1_plus_i.into(), zero.clone().into()]).unwrap();
        assert_eq!(u.num_vars(), 5);
        assert!(expr_equivalence_bruteforce(&u, 10_000).unwrap().is_some());
        let u0 = combine_inequalities(2, 1, &[zero.into()]).unwrap();
        assert!(expr_equivalence_bruteforce(&u0, 10_000).unwrap().is_none());
    }
}
