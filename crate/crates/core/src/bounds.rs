//! Size bounds for constructed objects, evaluated exactly with `BigUint`.
//!
//! Each bound comes with the side condition under which it is claimed; a
//! check outside its side condition is reported as not applicable rather
//! than as a pass.

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use crate::field::FiniteField;
use crate::respoly::RestrictedPolynomial;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundCheck {
    pub name: String,
    /// Decimal; may be astronomically large.
    pub actual: String,
    pub bound: String,
    /// `None` when the side condition of the bound does not hold.
    pub holds: Option<bool>,
}

impl BoundCheck {
    pub fn new(name: &str, actual: &BigUint, bound: Option<BigUint>) -> Self {
        BoundCheck {
            name: name.to_string(),
            actual: actual.to_string(),
            bound: bound.as_ref().map_or_else(|| "n/a".to_string(), ToString::to_string),
            holds: bound.map(|b| *actual <= b),
        }
    }

    pub fn violated(&self) -> bool {
        self.holds == Some(false)
    }
}

fn big(x: usize) -> BigUint {
    BigUint::from(x)
}

/// `(Σ|p_i|)·(Π|p_i|)` for a product of `k ≥ 1` factors.
pub fn product_bound(lengths: &[usize]) -> BigUint {
    let sum: BigUint = lengths.iter().map(|&l| big(l)).sum();
    let prod: BigUint = lengths.iter().fold(BigUint::one(), |acc, &l| acc * big(l));
    sum * prod
}

/// `|q|·|p|^{|q|}`, claimed for nonempty `p`.
pub fn composition_bound(q_len: usize, p_len: usize) -> Option<BigUint> {
    (p_len > 0).then(|| big(q_len) * big(p_len).pow(q_len as u32))
}

/// `2C³(|p_1|·|p_2|)^{2C}`, claimed when both inputs are nonempty.
pub fn conjunction_bound(c: usize, p1_len: usize, p2_len: usize) -> Option<BigUint> {
    (p1_len > 0 && p2_len > 0).then(|| big(2) * big(c).pow(3) * (big(p1_len) * big(p2_len)).pow(2 * c as u32))
}

/// `(n·l)^l`, the number of inequalities collected from a word in `n ≥ 1`
/// variables with `l = q^m`.
pub fn inequality_count_bound(n: usize, l: usize) -> Option<BigUint> {
    (n >= 1).then(|| big(n * l).pow(l as u32))
}

/// `2C³(2k²(k+1))^{2C}` for each collected inequality of a length-`k` word.
pub fn inequality_length_bound(c: usize, k: usize) -> BigUint {
    big(2) * big(c).pow(3) * big(2 * k * k * (k + 1)).pow(2 * c as u32)
}

/// `2k + 2Σ|p_i|` for the combined disjunction of `k` inequalities.
pub fn combination_bound(lengths: &[usize]) -> BigUint {
    big(2 * lengths.len()) + big(2) * lengths.iter().map(|&l| big(l)).sum::<BigUint>()
}

/// `(|e| + |G|)·|p|` for the word produced from a restricted polynomial.
pub fn translation_bound(e_len: usize, group_order: usize, p_len: usize) -> BigUint {
    big(e_len + group_order) * big(p_len)
}

pub fn product_bound_holds<F: FiniteField>(ps: &[RestrictedPolynomial<F>], out: &RestrictedPolynomial<F>) -> bool {
    let lengths: Vec<usize> = ps.iter().map(RestrictedPolynomial::len).collect();
    big(out.len()) <= product_bound(&lengths)
}

/// True when the composition bound holds or does not apply.
pub fn composition_bound_holds<F: FiniteField>(
    q: &RestrictedPolynomial<F>,
    p: &RestrictedPolynomial<F>,
    out: &RestrictedPolynomial<F>,
) -> bool {
    composition_bound(q.len(), p.len()).is_none_or(|b| big(out.len()) <= b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(product_bound(&[2, 2]), big(16));
        assert_eq!(composition_bound(3, 2), Some(big(24)));
        assert_eq!(composition_bound(3, 0), None);
        assert_eq!(conjunction_bound(1, 1, 2), Some(big(8)));
        assert_eq!(inequality_count_bound(2, 4), Some(big(4096)));
        assert_eq!(inequality_count_bound(0, 4), None);
        assert_eq!(combination_bound(&[3, 4]), big(18));
        assert_eq!(translation_bound(45, 24, 7), big(483));
    }

    #[test]
    fn check_records() {
        let c = BoundCheck::new("x", &big(5), Some(big(4)));
        assert!(c.violated());
        let c = BoundCheck::new("x", &big(5), None);
        assert!(!c.violated());
        assert_eq!(c.bound, "n/a");
    }
}
