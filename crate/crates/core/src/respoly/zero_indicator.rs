//! A unary restricted polynomial `f` with `f(0) = I` and `f(A) = 0` for
//! every other `A ∈ Mat_m(F_q)`.
//!
//! Monomials in one variable `y` induce functions `Mat_m(F_q) → Mat_m(F_q)`.
//! Words are enumerated breadth-first by length over the alphabet
//! `{y} ∪ GL_m(F_q) \ {I}` (no two adjacent constants; the lone word `I` is
//! included), keeping the shortest word per induced function, until the
//! target function lies in their F_q-span. The search then runs one more
//! length level and picks, over seeded random tie-breaks of a
//! length-ordered greedy basis, the cheapest combination.

use std::any::{Any, TypeId};
use std::collections::{HashMap, HashSet};
use std::sync::{Arc, Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Atom, Monomial, RestrictedPolynomial};
use crate::field::FiniteField;
use crate::matrix::{gl_enumerate, Matrix};
use crate::Error;

/// Default limit on distinct monomial functions examined.
pub const ZERO_INDICATOR_CAP: usize = 4096;

const TRIALS: usize = 200;
const SEED: u64 = 0x5eed_0f00;
const MAX_WORD_LEN: usize = 16;

type Cache = Mutex<HashMap<(TypeId, usize), Arc<dyn Any + Send + Sync>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Cached per `(q, m)`. Its length is the constant `C` of the conjunction
/// gadget.
pub fn zero_indicator<F: FiniteField>(m: usize) -> Result<Arc<RestrictedPolynomial<F>>, Error> {
    let key = (TypeId::of::<F>(), m);
    if let Some(f) = cache().lock().expect("cache poisoned").get(&key) {
        return Ok(f.clone().downcast().expect("cache keyed by field type"));
    }
    let f = Arc::new(zero_indicator_with_cap::<F>(m, ZERO_INDICATOR_CAP)?);
    cache().lock().expect("cache poisoned").insert(key, f.clone());
    Ok(f)
}

/// Incremental row echelon basis over F_q. Rows are normalized so their
/// leading entry is 1; each row carries its expression in terms of the
/// independent vectors inserted so far (at most `dim` of them).
struct Basis<F: FiniteField> {
    rows: Vec<(Vec<F>, Vec<F>)>,
    by_pivot: HashMap<usize, usize>,
    dim: usize,
}

impl<F: FiniteField> Basis<F> {
    fn new(dim: usize) -> Self {
        Basis { rows: Vec::new(), by_pivot: HashMap::new(), dim }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &mut [F], combo: &mut [F]) {
        for p in 0..v.len() {
            if v[p].is_zero() {
                continue;
            }
            if let Some(&r) = self.by_pivot.get(&p) {
                let (row, rc) = &self.rows[r];
                let c = v[p];
                for (x, y) in v[p..].iter_mut().zip(&row[p..]) {
                    *x = *x - c * *y;
                }
                for (x, y) in combo.iter_mut().zip(rc) {
                    *x = *x - c * *y;
                }
            }
        }
    }

    /// Inserts `v` if it is independent of the current span.
    fn insert(&mut self, v: &[F]) -> bool {
        let mut v = v.to_vec();
        let mut combo = vec![F::zero(); self.dim];
        combo[self.rank()] = F::one();
        self.reduce(&mut v, &mut combo);
        let Some(p) = v.iter().position(|x| !x.is_zero()) else { return false };
        let s = v[p].inv().expect("nonzero");
        for x in v.iter_mut().chain(combo.iter_mut()) {
            *x = *x * s;
        }
        self.by_pivot.insert(p, self.rows.len());
        self.rows.push((v, combo));
        true
    }

    /// Coefficients over the inserted vectors (in insertion order) summing
    /// to `target`, if it is in the span.
    fn solve(&self, target: &[F]) -> Option<Vec<F>> {
        let mut v = target.to_vec();
        let mut combo = vec![F::zero(); self.dim];
        self.reduce(&mut v, &mut combo);
        v.iter().all(|x| x.is_zero()).then(|| combo.into_iter().take(self.rank()).map(|c| -c).collect())
    }
}

struct Candidate<F: FiniteField> {
    word: Vec<Atom<F>>,
    flat: Vec<F>,
}

fn flatten<F: FiniteField>(values: &[Matrix<F>]) -> Vec<F> {
    values.iter().flat_map(|a| a.row_major()).collect()
}

pub fn zero_indicator_with_cap<F: FiniteField>(m: usize, cap: usize) -> Result<RestrictedPolynomial<F>, Error> {
    if m == 1 && F::ORDER == 2 {
        return Err(Error::Unsupported("no zero indicator is needed or available over Mat_1(F_2)".into()));
    }
    let domain = Matrix::<F>::all(m);
    let gl = gl_enumerate::<F>(m)?;
    let id = Matrix::<F>::identity(m);
    let target: Vec<F> =
        flatten(&domain.iter().map(|a| if a.is_zero() { id } else { Matrix::zero(m) }).collect::<Vec<_>>());

    let mut seen: HashSet<Vec<Matrix<F>>> = HashSet::new();
    let mut candidates: Vec<Candidate<F>> = Vec::new();

    let mut frontier: Vec<(Vec<Atom<F>>, Vec<Matrix<F>>)> = Vec::new();
    frontier.push((vec![Atom::Const(id)], vec![id; domain.len()]));
    frontier.push((vec![Atom::Var(0)], domain.clone()));
    for &g in gl.iter().filter(|&&g| g != id) {
        frontier.push((vec![Atom::Const(g)], vec![g; domain.len()]));
    }

    let mut found_at = None;
    for len in 1..=MAX_WORD_LEN {
        let mut kept = Vec::new();
        for (word, table) in frontier {
            if seen.contains(&table) {
                continue;
            }
            if seen.len() >= cap {
                if found_at.is_some() {
                    break;
                }
                return Err(Error::SearchFailed(format!(
                    "zero indicator over Mat_{m}(F_{}) needs more than {cap} monomial functions",
                    F::ORDER
                )));
            }
            seen.insert(table.clone());
            candidates.push(Candidate { word: word.clone(), flat: flatten(&table) });
            kept.push((word, table));
        }
        if found_at.is_none() {
            let mut basis = Basis::new(target.len());
            for c in &candidates {
                if basis.rank() < target.len() {
                    basis.insert(&c.flat);
                }
            }
            if basis.solve(&target).is_some() {
                found_at = Some(len);
            }
        } else {
            break;
        }
        if found_at.is_some() && seen.len() >= cap {
            break;
        }
        frontier = Vec::new();
        for (word, table) in &kept {
            if word.len() == 1 && word[0] == Atom::Const(id) {
                continue;
            }
            let ends_in_const = matches!(word.last(), Some(Atom::Const(_)));
            let mut extend = |atom: Atom<F>| {
                let mut w = word.clone();
                w.push(atom);
                let t: Vec<Matrix<F>> = match atom {
                    Atom::Var(_) => table.iter().zip(&domain).map(|(x, y)| *x * *y).collect(),
                    Atom::Const(g) => table.iter().map(|x| *x * g).collect(),
                };
                frontier.push((w, t));
            };
            extend(Atom::Var(0));
            if !ends_in_const {
                for &g in gl.iter().filter(|&&g| g != id) {
                    extend(Atom::Const(g));
                }
            }
        }
    }
    if found_at.is_none() {
        return Err(Error::SearchFailed(format!("zero indicator not found within words of length {MAX_WORD_LEN}")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut best: Option<(usize, usize, Vec<Monomial<F>>)> = None;
    for _ in 0..TRIALS {
        let mut order: Vec<(usize, u64, usize)> =
            candidates.iter().enumerate().map(|(k, c)| (c.word.len(), rng.gen(), k)).collect();
        order.sort_unstable();
        let mut basis = Basis::new(target.len());
        let mut used = Vec::new();
        let mut solution = None;
        for &(_, _, k) in &order {
            if basis.insert(&candidates[k].flat) {
                used.push(k);
                if let Some(s) = basis.solve(&target) {
                    solution = Some(s);
                    break;
                }
            }
        }
        let coeffs = solution.expect("target is in the span of all candidates");
        let monos: Vec<Monomial<F>> = used
            .iter()
            .zip(&coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(&k, &c)| Monomial::new(candidates[k].word.clone()).expect("words are nonempty").scaled(c, m))
            .collect();
        let cost = monos.iter().map(Monomial::len).sum::<usize>();
        if best.as_ref().is_none_or(|(c, n, _)| (cost, monos.len()) < (*c, *n)) {
            best = Some((cost, monos.len(), monos));
        }
    }
    let (_, _, monos) = best.expect("at least one trial");
    let f = RestrictedPolynomial::new(m, 1, monos)?;
    for a in &domain {
        let value = f.evaluate(&[*a])?;
        let expected = if a.is_zero() { id } else { Matrix::zero(m) };
        if value != expected {
            return Err(Error::SearchFailed(format!("constructed indicator is wrong at {a}")));
        }
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{F2, F3, F4};

    fn check_table<F: FiniteField>(m: usize) {
        let f = zero_indicator::<F>(m).unwrap();
        for a in Matrix::<F>::all(m) {
            let v = f.evaluate(&[a]).unwrap();
            if a.is_zero() {
                assert_eq!(v, Matrix::identity(m));
            } else {
                assert!(v.is_zero(), "f({a}) = {v}");
            }
        }
    }

    #[test]
    fn mat2_f2_table() {
        check_table::<F2>(2);
        let f = zero_indicator::<F2>(2).unwrap();
        assert_eq!(f.num_vars(), 1);
        // Frozen from the search; any change here changes every downstream size.
        assert_eq!(f.len(), FROZEN_C_MAT2_F2);
    }

    #[test]
    fn small_fields() {
        check_table::<F3>(1);
        check_table::<F4>(1);
    }

    #[test]
    fn excluded_case() {
        assert!(zero_indicator::<F2>(1).is_err());
    }

    #[test]
    fn cap_is_reported() {
        assert!(matches!(zero_indicator_with_cap::<F2>(2, 50), Err(Error::SearchFailed(_))));
    }

    const FROZEN_C_MAT2_F2: usize = 33;
}
