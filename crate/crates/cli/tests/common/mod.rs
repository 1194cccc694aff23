//! Seeded random instances shared by the integration targets.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use s4r_core::circuits::{CCCircuit, Node};
use s4r_core::f4arith::{P1Instance, Z3Poly};
use s4r_core::respoly::Atom;
use s4r_core::{gl_enumerate, FiniteField, GroupWord, HolElement, Letter, Monomial, RestrictedPolynomial, Z3};

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Letters drawn as a variable with probability one half.
pub fn word<F: FiniteField>(r: &mut ChaCha8Rng, m: usize, n: usize, len: usize) -> GroupWord<F> {
    let group = HolElement::<F>::all(m).unwrap();
    let letters = (0..len)
        .map(|_| {
            if n > 0 && r.gen_bool(0.5) {
                Letter::Var(r.gen_range(0..n))
            } else {
                Letter::Const(*group.choose(r).unwrap())
            }
        })
        .collect();
    GroupWord::new(m, n, letters).unwrap()
}

pub fn monomial<F: FiniteField>(r: &mut ChaCha8Rng, m: usize, n: usize, len: usize) -> Monomial<F> {
    let gl = gl_enumerate::<F>(m).unwrap();
    let atoms =
        (0..len)
            .map(|_| {
                if n > 0 && r.gen_bool(0.5) {
                    Atom::Var(r.gen_range(0..n))
                } else {
                    Atom::Const(*gl.choose(r).unwrap())
                }
            })
            .collect();
    Monomial::new(atoms).unwrap()
}

pub fn poly<F: FiniteField>(
    r: &mut ChaCha8Rng,
    m: usize,
    n: usize,
    terms: usize,
    max_len: usize,
) -> RestrictedPolynomial<F> {
    let monos = (0..terms).map(|_| {
        let len = r.gen_range(1..=max_len);
        monomial(r, m, n, len)
    });
    RestrictedPolynomial::new(m, n, monos.collect()).unwrap()
}

/// `p + (q−1)·p`, which vanishes everywhere; the monomials of `p` repeat.
pub fn vanishing<F: FiniteField>(p: &RestrictedPolynomial<F>) -> RestrictedPolynomial<F> {
    let mut out = p.clone();
    for _ in 1..F::ORDER {
        out = out.sum(p);
    }
    out
}

pub fn z3poly(r: &mut ChaCha8Rng, n: usize, terms: usize, max_exp: u8) -> Z3Poly {
    let ts: Vec<(Vec<u8>, Z3)> = (0..terms)
        .map(|_| {
            let e = (0..n).map(|_| r.gen_range(0..=max_exp)).collect();
            (e, Z3::new(r.gen_range(1..3)))
        })
        .collect();
    Z3Poly::from_terms(n, ts).unwrap()
}

pub fn p1(r: &mut ChaCha8Rng, n: usize, k: usize, terms: usize) -> P1Instance {
    let polys = (0..k).map(|_| z3poly(r, n, terms, 2)).collect();
    P1Instance::new(n, polys).unwrap()
}

/// `t, t`: `α^t + α^t = 0` in characteristic 2.
pub fn p1_pair(r: &mut ChaCha8Rng, n: usize, terms: usize) -> P1Instance {
    let t = z3poly(r, n, terms, 2);
    P1Instance::new(n, vec![t.clone(), t]).unwrap()
}

/// `t, t+1, t+2` in shuffled order: `α^t(1 + α + α²) = 0`.
pub fn p1_triple(r: &mut ChaCha8Rng, n: usize, terms: usize) -> P1Instance {
    let t = z3poly(r, n, terms, 2);
    let shift = |c: u8| t.add(&Z3Poly::constant(n, Z3::new(c))).unwrap();
    let mut polys = vec![t.clone(), shift(1), shift(2)];
    polys.shuffle(r);
    P1Instance::new(n, polys).unwrap()
}

fn gate_tree(r: &mut ChaCha8Rng, shape: &[u32], n: usize, fanin: usize) -> Node {
    let modulus = shape[0];
    let constant = r.gen_range(0..modulus);
    let k = r.gen_range(0..=fanin);
    let children = (0..k)
        .map(|_| {
            let coeff = r.gen_range(1..modulus);
            let child = if shape.len() == 1 || r.gen_bool(0.2) {
                Node::Input(r.gen_range(0..n))
            } else {
                gate_tree(r, &shape[1..], n, fanin)
            };
            (coeff, child)
        })
        .collect();
    Node::gate(modulus, constant, children).unwrap()
}

pub fn circuit(r: &mut ChaCha8Rng, shape: &[u32], n: usize, fanin: usize) -> CCCircuit {
    CCCircuit::new(shape.to_vec(), n, gate_tree(r, shape, n, fanin)).unwrap()
}

/// `Mod_2(t + t)` over a random `CC[3,2]` subtree `t`: always 1.
pub fn valid_circuit(r: &mut ChaCha8Rng, n: usize, fanin: usize) -> CCCircuit {
    let t = gate_tree(r, &[3, 2], n, fanin);
    let root = Node::gate(2, 0, vec![(1, t.clone()), (1, t)]).unwrap();
    CCCircuit::new(vec![2, 3, 2], n, root).unwrap()
}
