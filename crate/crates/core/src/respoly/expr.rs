use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::{rp_expand_product, rp_substitute, Atom, RestrictedPolynomial};
use crate::field::FiniteField;
use crate::matrix::Matrix;
use crate::Error;

/// Exact size of the formal expansion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shape {
    pub monomials: BigUint,
    /// Total letter count.
    pub length: BigUint,
}

#[derive(Clone, Debug)]
enum Node<F: FiniteField> {
    Poly(Arc<RestrictedPolynomial<F>>),
    Sum(Vec<RpExpr<F>>),
    /// Nonempty.
    Product(Vec<RpExpr<F>>),
    /// `outer` has at most one variable; every occurrence is replaced by `inner`.
    Compose {
        outer: Arc<RestrictedPolynomial<F>>,
        inner: Box<RpExpr<F>>,
    },
}

/// A restricted polynomial kept as an unexpanded sum/product/composition
/// tree. Evaluation works pointwise; [`RpExpr::shape`] gives the exact size
/// of the expansion without building it.
#[derive(Clone, Debug)]
pub struct RpExpr<F: FiniteField> {
    m: usize,
    n: usize,
    node: Node<F>,
}

impl<F: FiniteField> From<RestrictedPolynomial<F>> for RpExpr<F> {
    fn from(p: RestrictedPolynomial<F>) -> Self {
        RpExpr { m: p.dim(), n: p.num_vars(), node: Node::Poly(Arc::new(p)) }
    }
}

impl<F: FiniteField> RpExpr<F> {
    pub fn sum(m: usize, terms: Vec<RpExpr<F>>) -> Result<Self, Error> {
        let n = check_dims(m, &terms)?;
        Ok(RpExpr { m, n, node: Node::Sum(terms) })
    }

    pub fn product(factors: Vec<RpExpr<F>>) -> Result<Self, Error> {
        let m = factors.first().ok_or(Error::EmptyProduct)?.m;
        let n = check_dims(m, &factors)?;
        Ok(RpExpr { m, n, node: Node::Product(factors) })
    }

    pub fn compose(outer: Arc<RestrictedPolynomial<F>>, inner: RpExpr<F>) -> Result<Self, Error> {
        if outer.dim() != inner.m {
            return Err(Error::DimensionMismatch { left: outer.dim(), right: inner.m });
        }
        if outer.variables().len() > 1 {
            return Err(Error::Precondition("outer polynomial must have at most one variable".into()));
        }
        Ok(RpExpr { m: inner.m, n: inner.n, node: Node::Compose { outer, inner: Box::new(inner) } })
    }

    /// Declares `n` variables; `n` may not be smaller than the current count.
    pub fn with_num_vars(mut self, n: usize) -> Result<Self, Error> {
        if n < self.n {
            return Err(Error::Precondition(format!("expression uses {} variables, cannot declare {n}", self.n)));
        }
        self.n = n;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    /// The polynomial itself when this is a leaf.
    pub fn as_poly(&self) -> Option<&RestrictedPolynomial<F>> {
        match &self.node {
            Node::Poly(p) => Some(p),
            _ => None,
        }
    }

    pub fn evaluate(&self, a: &[Matrix<F>]) -> Result<Matrix<F>, Error> {
        match &self.node {
            Node::Poly(p) => p.evaluate(a),
            Node::Sum(ts) => ts.iter().try_fold(Matrix::zero(self.m), |acc, t| acc.checked_add(&t.evaluate(a)?)),
            Node::Product(fs) => {
                fs.iter().try_fold(Matrix::identity(self.m), |acc, f| acc.checked_mul(&f.evaluate(a)?))
            }
            Node::Compose { outer, inner } => {
                let x = inner.evaluate(a)?;
                outer.evaluate(&vec![x; outer.num_vars()])
            }
        }
    }

    pub fn shape(&self) -> Shape {
        match &self.node {
            Node::Poly(p) => Shape { monomials: p.num_monomials().into(), length: p.len().into() },
            Node::Sum(ts) => ts.iter().map(RpExpr::shape).fold(
                Shape { monomials: BigUint::zero(), length: BigUint::zero() },
                |acc, s| Shape { monomials: acc.monomials + s.monomials, length: acc.length + s.length },
            ),
            Node::Product(fs) => {
                let shapes: Vec<Shape> = fs.iter().map(RpExpr::shape).collect();
                let monomials = shapes.iter().fold(BigUint::one(), |acc, s| acc * &s.monomials);
                let mut length = BigUint::zero();
                for (i, s) in shapes.iter().enumerate() {
                    let others = shapes
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .fold(BigUint::one(), |acc, (_, t)| acc * &t.monomials);
                    length += &s.length * others;
                }
                Shape { monomials, length }
            }
            Node::Compose { outer, inner } => {
                let s = inner.shape();
                let mut monomials = BigUint::zero();
                let mut length = BigUint::zero();
                for mono in outer.monomials() {
                    let r = mono.degree() as u32;
                    let c = mono.len() as u32 - r;
                    let nr = s.monomials.pow(r);
                    length += &nr * c;
                    if r > 0 {
                        length += &s.length * r * s.monomials.pow(r - 1);
                    }
                    monomials += nr;
                }
                Shape { monomials, length }
            }
        }
    }

    pub fn len(&self) -> BigUint {
        self.shape().length
    }

    /// Materializes the expansion, refusing when it has more than `cap` letters.
    pub fn expand(&self, cap: u64) -> Result<RestrictedPolynomial<F>, Error> {
        let len = self.len();
        if len > BigUint::from(cap) {
            return Err(Error::cap(format!("{len} letters"), cap));
        }
        self.expand_unchecked()
    }

    fn expand_unchecked(&self) -> Result<RestrictedPolynomial<F>, Error> {
        let out = match &self.node {
            Node::Poly(p) => (**p).clone(),
            Node::Sum(ts) => {
                let mut acc = RestrictedPolynomial::zero(self.m, self.n);
                for t in ts {
                    acc = acc.sum(&t.expand_unchecked()?);
                }
                acc
            }
            Node::Product(fs) => {
                let parts = fs.iter().map(RpExpr::expand_unchecked).collect::<Result<Vec<_>, _>>()?;
                rp_expand_product(&parts)?
            }
            Node::Compose { outer, inner } => rp_substitute(outer, &inner.expand_unchecked()?)?,
        };
        out.with_num_vars(self.n)
    }

    /// Monomials of the expansion as a lazy stream, in the same order as
    /// [`RpExpr::expand`]. Each item is the letter sequence of one monomial.
    pub fn for_each_monomial(&self, visit: &mut dyn FnMut(&[Atom<F>])) {
        let mut prefix = Vec::new();
        self.walk(&mut prefix, &mut |atoms: &[Atom<F>]| visit(atoms));
    }

    fn walk(&self, prefix: &mut Vec<Atom<F>>, visit: &mut dyn FnMut(&[Atom<F>])) {
        match &self.node {
            Node::Poly(p) => {
                for mono in p.monomials() {
                    let base = prefix.len();
                    prefix.extend_from_slice(mono.atoms());
                    visit(prefix);
                    prefix.truncate(base);
                }
            }
            Node::Sum(ts) => {
                for t in ts {
                    t.walk(prefix, visit);
                }
            }
            Node::Product(fs) => walk_product(fs, prefix, visit),
            Node::Compose { outer, inner } => {
                for mono in outer.monomials() {
                    walk_word(mono.atoms(), inner, prefix, visit);
                }
            }
        }
    }
}

/// A ring into which the formal expansion of an [`RpExpr`] is folded without
/// materializing it: letters map through `atom`, monomials multiply their
/// letters in order and the polynomial adds its monomials.
pub trait ExpansionAlgebra<F: FiniteField> {
    type Elem: Clone;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn atom(&self, atom: &Atom<F>) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
}

impl<F: FiniteField> RpExpr<F> {
    /// The image of the expansion in `alg`; the monomial count when `alg` is
    /// counting, the pointwise value when `alg` evaluates letters.
    pub fn fold<A: ExpansionAlgebra<F>>(&self, alg: &A) -> A::Elem {
        match &self.node {
            Node::Poly(p) => fold_poly(p, alg, None),
            Node::Sum(ts) => ts.iter().fold(alg.zero(), |acc, t| alg.add(&acc, &t.fold(alg))),
            Node::Product(fs) => fs.iter().fold(alg.one(), |acc, f| alg.mul(&acc, &f.fold(alg))),
            Node::Compose { outer, inner } => fold_poly(outer, alg, Some(inner.fold(alg))),
        }
    }

    /// Every polynomial stored in the tree, composition outers included.
    pub fn for_each_leaf(&self, visit: &mut dyn FnMut(&RestrictedPolynomial<F>)) {
        match &self.node {
            Node::Poly(p) => visit(p),
            Node::Sum(ts) | Node::Product(ts) => ts.iter().for_each(|t| t.for_each_leaf(visit)),
            Node::Compose { outer, inner } => {
                visit(outer);
                inner.for_each_leaf(visit);
            }
        }
    }
}

/// With `var = Some(x)` every variable letter maps to `x`.
fn fold_poly<F: FiniteField, A: ExpansionAlgebra<F>>(
    p: &RestrictedPolynomial<F>,
    alg: &A,
    var: Option<A::Elem>,
) -> A::Elem {
    let mut acc = alg.zero();
    for mono in p.monomials() {
        let mut t = alg.one();
        for a in mono.atoms() {
            let x = match (a, &var) {
                (Atom::Var(_), Some(x)) => x.clone(),
                _ => alg.atom(a),
            };
            t = alg.mul(&t, &x);
        }
        acc = alg.add(&acc, &t);
    }
    acc
}

fn walk_product<F: FiniteField>(fs: &[RpExpr<F>], prefix: &mut Vec<Atom<F>>, visit: &mut dyn FnMut(&[Atom<F>])) {
    match fs.split_first() {
        None => visit(prefix),
        Some((head, rest)) => head.walk(prefix, &mut |p: &[Atom<F>]| {
            let mut owned = p.to_vec();
            walk_product(rest, &mut owned, visit);
        }),
    }
}

fn walk_word<F: FiniteField>(
    atoms: &[Atom<F>],
    inner: &RpExpr<F>,
    prefix: &mut Vec<Atom<F>>,
    visit: &mut dyn FnMut(&[Atom<F>]),
) {
    match atoms.split_first() {
        None => visit(prefix),
        Some((Atom::Const(c), rest)) => {
            prefix.push(Atom::Const(*c));
            walk_word(rest, inner, prefix, visit);
            prefix.pop();
        }
        Some((Atom::Var(_), rest)) => inner.walk(prefix, &mut |p: &[Atom<F>]| {
            let mut owned = p.to_vec();
            walk_word(rest, inner, &mut owned, visit);
        }),
    }
}

fn check_dims<F: FiniteField>(m: usize, parts: &[RpExpr<F>]) -> Result<usize, Error> {
    let mut n = 0;
    for p in parts {
        if p.m != m {
            return Err(Error::DimensionMismatch { left: m, right: p.m });
        }
        n = n.max(p.n);
    }
    Ok(n)
}

/// `f(p_1) · f(p_2)` with `f` the zero indicator of `Mat_m(F_q)`: nonzero
/// exactly where both inputs vanish, and then equal to `I`.
pub fn conjunction_gadget<F: FiniteField>(p1: RpExpr<F>, p2: RpExpr<F>) -> Result<RpExpr<F>, Error> {
    if p1.m != p2.m {
        return Err(Error::DimensionMismatch { left: p1.m, right: p2.m });
    }
    let f = super::zero_indicator::<F>(p1.m)?;
    RpExpr::product(vec![RpExpr::compose(f.clone(), p1)?, RpExpr::compose(f, p2)?])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds;
    use crate::field::F2;
    use crate::respoly::Monomial;
    use proptest::prelude::*;

    fn x1_plus_i(n: usize) -> RestrictedPolynomial<F2> {
        RestrictedPolynomial::var(2, n, 0).sum(&RestrictedPolynomial::constant(n, Matrix::identity(2)).unwrap())
    }

    #[test]
    fn shape_matches_expansion() {
        let p = x1_plus_i(1);
        let q = RestrictedPolynomial::new(
            2,
            1,
            vec![
                Monomial::new(vec![
                    Atom::Var(0),
                    Atom::Const(Matrix::parse_literal("[0,1;1,0]").unwrap()),
                    Atom::Var(0),
                ])
                .unwrap(),
                Monomial::constant(Matrix::identity(2)).unwrap(),
            ],
        )
        .unwrap();
        let e = RpExpr::product(vec![
            RpExpr::compose(Arc::new(q.clone()), p.clone().into()).unwrap(),
            RpExpr::sum(2, vec![p.clone().into(), q.into()]).unwrap(),
        ])
        .unwrap();
        let expanded = e.expand(1 << 20).unwrap();
        let s = e.shape();
        assert_eq!(s.monomials, BigUint::from(expanded.num_monomials()));
        assert_eq!(s.length, BigUint::from(expanded.len()));
        let mut streamed = Vec::new();
        e.for_each_monomial(&mut |atoms| streamed.push(atoms.to_vec()));
        let direct: Vec<Vec<Atom<F2>>> = expanded.monomials().iter().map(|m| m.atoms().to_vec()).collect();
        assert_eq!(streamed, direct);
        for a in Matrix::<F2>::all(2) {
            assert_eq!(e.evaluate(&[a]).unwrap(), expanded.evaluate(&[a]).unwrap());
        }
    }

    #[test]
    fn expansion_cap() {
        let e: RpExpr<F2> = x1_plus_i(1).into();
        assert!(e.expand(1).is_err());
        assert!(e.expand(2).is_ok());
    }

    #[test]
    fn gadget_on_zero_inputs_is_identity() {
        let z: RpExpr<F2> = RestrictedPolynomial::zero(2, 1).into();
        let g = conjunction_gadget(z.clone(), z).unwrap();
        for a in Matrix::<F2>::all(2) {
            assert_eq!(g.evaluate(&[a]).unwrap(), Matrix::identity(2));
        }
    }

    #[test]
    fn gadget_detects_identity_input() {
        let g = conjunction_gadget(x1_plus_i(1).into(), RestrictedPolynomial::zero(2, 1).into()).unwrap();
        for a in Matrix::<F2>::all(2) {
            assert_eq!(!g.evaluate(&[a]).unwrap().is_zero(), a == Matrix::identity(2));
        }
    }

    #[test]
    fn gadget_expansion_is_within_bound() {
        let p1 = x1_plus_i(1);
        let p2 = RestrictedPolynomial::var(2, 1, 0);
        let g = conjunction_gadget(p1.clone().into(), p2.clone().into()).unwrap();
        let c = crate::respoly::zero_indicator::<F2>(2).unwrap().len();
        let bound = bounds::conjunction_bound(c, p1.len(), p2.len()).unwrap();
        assert!(g.len() <= bound);
        let expanded = g.expand(1 << 22).unwrap();
        assert_eq!(BigUint::from(expanded.len()), g.len());
        for a in Matrix::<F2>::all(2) {
            assert_eq!(expanded.evaluate(&[a]).unwrap(), g.evaluate(&[a]).unwrap());
        }
    }

    fn arb_poly2() -> impl Strategy<Value = RestrictedPolynomial<F2>> {
        let gl = crate::matrix::gl_enumerate::<F2>(2).unwrap();
        let atom = prop_oneof![(0..2usize).prop_map(Atom::Var), (0..gl.len()).prop_map(move |i| Atom::Const(gl[i])),];
        prop::collection::vec(prop::collection::vec(atom, 1..=2), 0..=2).prop_map(|monos| {
            let monos = monos.into_iter().map(|a| Monomial::new(a).unwrap()).collect();
            RestrictedPolynomial::new(2, 2, monos).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn gadget_biconditional(p1 in arb_poly2(), p2 in arb_poly2()) {
            let g = conjunction_gadget(p1.clone().into(), p2.clone().into()).unwrap();
            for a in Matrix::<F2>::all(2) {
                for b in Matrix::<F2>::all(2) {
                    let x = [a, b];
                    let both_zero = p1.evaluate(&x).unwrap().is_zero() && p2.evaluate(&x).unwrap().is_zero();
                    prop_assert_eq!(both_zero, !g.evaluate(&x).unwrap().is_zero());
                }
            }
            if let Some(b) = bounds::conjunction_bound(crate::respoly::zero_indicator::<F2>(2).unwrap().len(), p1.len(), p2.len()) {
                prop_assert!(g.len() <= b);
            }
        }
    }

    struct Count;

    impl ExpansionAlgebra<F2> for Count {
        type Elem = BigUint;
        fn zero(&self) -> BigUint {
            BigUint::zero()
        }
        fn one(&self) -> BigUint {
            BigUint::one()
        }
        fn atom(&self, _: &Atom<F2>) -> BigUint {
            BigUint::one()
        }
        fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
            a + b
        }
        fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
            a * b
        }
    }

    struct Eval(Vec<Matrix<F2>>);

    impl ExpansionAlgebra<F2> for Eval {
        type Elem = Matrix<F2>;
        fn zero(&self) -> Matrix<F2> {
            Matrix::zero(2)
        }
        fn one(&self) -> Matrix<F2> {
            Matrix::identity(2)
        }
        fn atom(&self, a: &Atom<F2>) -> Matrix<F2> {
            match a {
                Atom::Var(j) => self.0[*j],
                Atom::Const(c) => *c,
            }
        }
        fn add(&self, a: &Matrix<F2>, b: &Matrix<F2>) -> Matrix<F2> {
            *a + *b
        }
        fn mul(&self, a: &Matrix<F2>, b: &Matrix<F2>) -> Matrix<F2> {
            *a * *b
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn fold_matches_shape_and_evaluate(p1 in arb_poly2(), p2 in arb_poly2()) {
            let g = conjunction_gadget(p1.into(), p2.into()).unwrap();
            prop_assert_eq!(g.fold(&Count), g.shape().monomials);
            let mut leaves = 0;
            g.for_each_leaf(&mut |_| leaves += 1);
            prop_assert_eq!(leaves, 4);
            for a in Matrix::<F2>::all(2).into_iter().step_by(3) {
                let x = vec![a, Matrix::identity(2)];
                prop_assert_eq!(g.fold(&Eval(x.clone())), g.evaluate(&x).unwrap());
            }
        }
    }
}
