//! `F4²` with the twisted product `⋆`, isomorphic to `Mat2(F2)` via
//! `ρ(a_1, a_2) = a_1 ⊕ σ·a_2`.

use std::sync::OnceLock;

use crate::field::{FiniteField, F2, F4, Z3};
use crate::matrix::{gl_enumerate, Matrix};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct F4Pair(pub F4, pub F4);

/// `σ = (0 1; 1 0)`.
pub fn sigma() -> Matrix<F2> {
    Matrix::parse_literal("[0,1;1,0]").expect("literal")
}

/// `(a_1 b_1 ⊕ a_2² b_2, a_1² b_2 ⊕ a_2 b_1)`.
pub fn star_mul(a: F4Pair, b: F4Pair) -> F4Pair {
    F4Pair(a.0 * b.0 + a.1.square() * b.1, a.0.square() * b.1 + a.1 * b.0)
}

pub fn rho(a: F4Pair) -> Matrix<F2> {
    a.0.to_matrix() + sigma() * a.1.to_matrix()
}

/// `f(s,t) = (α^{s+t} ⊕ α^{2+t}, α^{s+t} ⊕ α^{1+t})` with the sign `s`
/// given as its Z3 value.
pub fn f_encode(s: Z3, t: Z3) -> F4Pair {
    let st = F4::alpha_pow(s + t);
    F4Pair(st + F4::alpha_pow(Z3::new(2) + t), st + F4::alpha_pow(Z3::new(1) + t))
}

/// For each `c ∈ GL_2(F2)` (in GL enumeration order), the first sign triple
/// `(s_1, s_2, s_3)` (lexicographic, `+1` before `−1`) with
/// `ρ(f(s_1, s_2 + s_3)) = c`.
pub fn constant_signs() -> &'static [(Matrix<F2>, [Z3; 3])] {
    static TABLE: OnceLock<Vec<(Matrix<F2>, [Z3; 3])>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let triples: Vec<[Z3; 3]> = (0..8u64)
            .map(|code| {
                let p = super::signs::point(3, code);
                [p[0], p[1], p[2]]
            })
            .collect();
        gl_enumerate::<F2>(2)
            .expect("GL_2(F2)")
            .into_iter()
            .map(|c| {
                let s = *triples.iter().find(|s| rho(f_encode(s[0], s[1] + s[2])) == c).expect("ρ∘f is onto GL_2(F2)");
                (c, s)
            })
            .collect()
    })
}

impl F4Pair {
    pub fn all() -> Vec<F4Pair> {
        F4::elements().iter().flat_map(|&a| F4::elements().iter().map(move |&b| F4Pair(a, b))).collect()
    }

    pub fn add(self, other: F4Pair) -> F4Pair {
        F4Pair(self.0 + other.0, self.1 + other.1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f4arith::signs;
    use num_traits::Zero;
    use std::collections::HashSet;

    fn z(v: u8) -> Z3 {
        Z3::new(v)
    }

    #[test]
    fn rho_is_a_ring_isomorphism() {
        let all = F4Pair::all();
        let images: HashSet<_> = all.iter().map(|&a| rho(a)).collect();
        assert_eq!(images.len(), 16);
        for &a in &all {
            for &b in &all {
                assert_eq!(rho(star_mul(a, b)), rho(a) * rho(b));
                assert_eq!(rho(a.add(b)), rho(a) + rho(b));
            }
        }
        assert_eq!(rho(F4Pair(F4::ONE, F4::ZERO)), Matrix::identity(2));
        assert_eq!(rho(F4Pair(F4::ZERO, F4::ONE)), sigma());
    }

    #[test]
    fn sigma_laws() {
        let s = sigma();
        assert_eq!(s * s, Matrix::identity(2));
        for &a in F4::elements() {
            assert_eq!(s * a.to_matrix() * s, a.square().to_matrix());
            if !a.is_zero() {
                assert!(F4::from_matrix(&(s * a.to_matrix())).is_none());
            }
        }
    }

    #[test]
    fn f_image_and_product_rule() {
        let signs_ = [z(1), z(2)];
        let image: HashSet<_> = signs_.iter().flat_map(|&s| (0..3).map(move |t| rho(f_encode(s, z(t))))).collect();
        let gl: HashSet<_> = gl_enumerate::<F2>(2).unwrap().into_iter().collect();
        assert_eq!(image, gl);
        for t in 0..3 {
            assert_eq!(f_encode(z(1), z(t)), F4Pair(F4::alpha_pow(z(t)), F4::ZERO));
            assert_eq!(f_encode(z(2), z(t)), F4Pair(F4::ZERO, F4::alpha_pow(z(t))));
        }
        for &r in &signs_ {
            for &s in &signs_ {
                for u in 0..3 {
                    for v in 0..3 {
                        assert_eq!(star_mul(f_encode(r, z(u)), f_encode(s, z(v))), f_encode(r * s, s * z(u) + z(v)));
                    }
                }
            }
        }
    }

    #[test]
    fn constant_sign_table() {
        let table = constant_signs();
        assert_eq!(table.len(), 6);
        for (c, s) in table {
            assert_eq!(rho(f_encode(s[0], s[1] + s[2])), *c);
        }
        let id = table.iter().find(|(c, _)| *c == Matrix::identity(2)).unwrap();
        assert_eq!(id.1.map(signs::to_i8), [1, 1, -1]);
    }
}
