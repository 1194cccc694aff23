//! S4 as the affine group of F2².
//!
//! Points are labelled 1 = 00, 2 = 01, 3 = 10, 4 = 11 (first coordinate is
//! the high bit), and `⟨v, A⟩` is the permutation `u ↦ A·u + v`.

use std::fmt;

use super::HolElement;
use crate::field::F2;
use crate::matrix::{Matrix, Vector};
use crate::Error;

/// A permutation of `{1,2,3,4}`. Products compose right to left:
/// `(p * q)(i) = p(q(i))`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PermS4 {
    images: [u8; 4],
}

impl PermS4 {
    pub fn identity() -> Self {
        PermS4 { images: [1, 2, 3, 4] }
    }

    /// `images[i-1]` is the image of point `i`.
    pub fn from_images(images: [u8; 4]) -> Result<Self, Error> {
        let mut seen = [false; 4];
        for &x in &images {
            if !(1..=4).contains(&x) || seen[(x - 1) as usize] {
                return Err(Error::syntax(format!("not a permutation of 1..4: {images:?}")));
            }
            seen[(x - 1) as usize] = true;
        }
        Ok(PermS4 { images })
    }

    pub fn images(&self) -> [u8; 4] {
        self.images
    }

    pub fn apply(&self, point: u8) -> u8 {
        self.images[(point - 1) as usize]
    }

    pub fn all() -> Vec<Self> {
        let mut out = Vec::with_capacity(24);
        for a in 1..=4u8 {
            for b in 1..=4u8 {
                for c in 1..=4u8 {
                    for d in 1..=4u8 {
                        if let Ok(p) = Self::from_images([a, b, c, d]) {
                            out.push(p);
                        }
                    }
                }
            }
        }
        out
    }

    /// Parses cycle notation such as `(1 2)(3 4)` or `()`. Cycles compose
    /// right to left like the product.
    pub fn parse_cycles(text: &str) -> Result<Self, Error> {
        let mut perm = PermS4::identity();
        let mut rest = text.trim();
        if rest.is_empty() {
            return Err(Error::syntax("empty cycle notation"));
        }
        let mut cycles = Vec::new();
        while !rest.is_empty() {
            let body = rest.strip_prefix('(').ok_or_else(|| Error::syntax(format!("expected `(` in {text:?}")))?;
            let close = body.find(')').ok_or_else(|| Error::syntax(format!("unclosed cycle in {text:?}")))?;
            let points = body[..close]
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<u8>().ok().filter(|p| (1..=4).contains(p)))
                .collect::<Option<Vec<u8>>>()
                .ok_or_else(|| Error::syntax(format!("bad point in {text:?}")))?;
            let mut distinct = points.clone();
            distinct.sort_unstable();
            distinct.dedup();
            if distinct.len() != points.len() {
                return Err(Error::syntax(format!("repeated point in {text:?}")));
            }
            cycles.push(points);
            rest = body[close + 1..].trim_start();
        }
        for points in cycles {
            let mut images = [1, 2, 3, 4];
            for (i, &p) in points.iter().enumerate() {
                images[(p - 1) as usize] = points[(i + 1) % points.len()];
            }
            perm = perm * PermS4 { images };
        }
        Ok(perm)
    }

    /// Disjoint cycle notation, `()` for the identity.
    pub fn to_cycles(&self) -> String {
        let mut out = String::new();
        let mut done = [false; 4];
        for start in 1..=4u8 {
            if done[(start - 1) as usize] || self.apply(start) == start {
                continue;
            }
            let mut cycle = vec![start];
            done[(start - 1) as usize] = true;
            let mut p = self.apply(start);
            while p != start {
                cycle.push(p);
                done[(p - 1) as usize] = true;
                p = self.apply(p);
            }
            let parts: Vec<String> = cycle.iter().map(|p| p.to_string()).collect();
            out.push_str(&format!("({})", parts.join(" ")));
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }
}

impl std::ops::Mul for PermS4 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut images = [0; 4];
        for (i, slot) in images.iter_mut().enumerate() {
            *slot = self.apply(rhs.apply(i as u8 + 1));
        }
        PermS4 { images }
    }
}

impl fmt::Display for PermS4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_cycles())
    }
}

impl fmt::Debug for PermS4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_cycles())
    }
}

fn point_vector(point: u8) -> Vector<F2> {
    let bits = point - 1;
    Vector::from_slice(&[F2::new(bits >> 1), F2::new(bits & 1)]).expect("length 2")
}

fn vector_point(v: &Vector<F2>) -> u8 {
    1 + 2 * v.get(0).value() + v.get(1).value()
}

/// The affine map agreeing with `p` on the point labelling.
pub fn s4_iso(p: &PermS4) -> HolElement<F2> {
    let img = |point: u8| point_vector(p.apply(point));
    let v = img(1);
    // Columns of A are the images of the unit vectors 10 (point 3) and 01 (point 2), minus v.
    let c0 = img(3) - v;
    let c1 = img(2) - v;
    let a = Matrix::from_fn(2, |i, j| if j == 0 { c0.get(i) } else { c1.get(i) });
    let g = HolElement::new(v, a).expect("every permutation of F2^2 is affine");
    debug_assert!((1..=4).all(|x| g.act(&point_vector(x)) == point_vector(p.apply(x))));
    g
}

pub fn s4_iso_inv(g: &HolElement<F2>) -> PermS4 {
    let mut images = [0; 4];
    for (i, slot) in images.iter_mut().enumerate() {
        *slot = vector_point(&g.act(&point_vector(i as u8 + 1)));
    }
    PermS4::from_images(images).expect("affine maps are bijective")
}

impl PermS4 {
    pub fn to_hol(&self) -> HolElement<F2> {
        s4_iso(self)
    }
}
