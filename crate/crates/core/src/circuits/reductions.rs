//! F4 arithmetic instances ⇄ `CC[2,3,2]` circuits.

use num_traits::One;

use super::{CCCircuit, Node, NormalForm};
use crate::f4arith::{P1Instance, Z3Poly};
use crate::field::Z3;
use crate::Error;

fn z(v: u8) -> Z3 {
    Z3::new(v)
}

/// `Mod_3(Σ c(e)·(−1 + 2·Mod_2(Σ e_i y_i)))` over the multilinear remainder
/// of `p`, with `−c(e)` folded into the gate constant. One bottom gate per
/// monomial; `C(y) = 1` iff `p` vanishes at the sign point of `y`.
pub fn poly_to_mod32(p: &Z3Poly) -> Result<CCCircuit, Error> {
    let r = p.multilinear_reduce();
    let mut constant = 0u32;
    let mut children = Vec::with_capacity(r.num_monomials());
    for (e, c) in r.terms() {
        let c = u32::from(c.value());
        let wires = e.iter().enumerate().filter(|(_, &k)| k == 1).map(|(i, _)| (1, Node::Input(i))).collect();
        children.push((2 * c, Node::gate(2, 0, wires)?));
        constant += 3 - c;
    }
    CCCircuit::new(vec![3, 2], p.num_vars(), Node::gate(3, constant, children)?)
}

/// `f(a,b) = (b + 1)a(a − 2) + (b − 1)(a − 1)(a − 2)`, expanded.
pub fn f_gadget(a: &Z3Poly, b: &Z3Poly) -> Result<Z3Poly, Error> {
    let n = a.num_vars();
    let k = |c: u8| Z3Poly::constant(n, z(c));
    let a_minus_2 = a.add(&k(1))?;
    let left = b.add(&k(1))?.mul(a)?.mul(&a_minus_2)?;
    let right = b.add(&k(2))?.mul(&a.add(&k(2))?)?.mul(&a_minus_2)?;
    left.add(&right)
}

/// `f(a,b)` at a point.
pub fn f_value(a: Z3, b: Z3) -> Z3 {
    (b + z(1)) * a * (a + z(1)) + (b + z(2)) * (a + z(2)) * (a + z(1))
}

/// `p` over `x_1 … x_n` moved to variables `1 … n` of `n + 1`.
fn shift(p: &Z3Poly) -> Result<Z3Poly, Error> {
    let n = p.num_vars() + 1;
    Z3Poly::from_terms(
        n,
        p.terms().map(|(e, c)| {
            let mut f = Vec::with_capacity(n);
            f.push(0);
            f.extend_from_slice(e);
            (f, c)
        }),
    )
}

/// `C_Q = Mod_2(Σ_i C(f(p_i, x_0)))` on wires `y_0, y_1 … y_n`, `y_0` the
/// extra wire. `Q` vanishes at the sign point of `y` iff
/// `C_Q(0,y) = C_Q(1,y) = 1`.
pub fn p1_to_circuit(inst: &P1Instance) -> Result<CCCircuit, Error> {
    let m = inst.num_vars() + 1;
    let x0 = Z3Poly::var(m, 0);
    let mut children = Vec::with_capacity(inst.polys().len());
    for p in inst.polys() {
        let c = poly_to_mod32(&f_gadget(&shift(p)?, &x0)?)?;
        children.push((1, c.root().clone()));
    }
    CCCircuit::new(vec![2, 3, 2], m, Node::gate(2, 0, children)?)
}

/// Exponents of `r(α^t) = (α^t ⊖ α)(α^t ⊖ α²)` expanded by distributivity:
/// `α^{2t} ⊕ α^{t+2} ⊕ α^{t+1} ⊕ α^0`.
pub fn r_exponents(t: &Z3Poly) -> Result<[Z3Poly; 4], Error> {
    let n = t.num_vars();
    Ok([t.scale(z(2)), t.add(&Z3Poly::constant(n, z(2)))?, t.add(&Z3Poly::constant(n, z(1)))?, Z3Poly::zero(n)])
}

/// `c_0 + Σ_i r(α ↑ (c_1(i) + Σ_j (−1 − (−1)^{c_2(i,j)} x^{e(i,j)})))` on the
/// circuit's normal form. `C(y) = 1` iff the instance vanishes at the sign
/// point of `y`. An empty sum is emitted as `α⁰ ⊕ α⁰`.
pub fn circuit_to_p1(c: &CCCircuit) -> Result<P1Instance, Error> {
    let nf = NormalForm::from_circuit(c)?;
    let n = nf.num_inputs;
    let mut polys = Vec::new();
    if nf.c0 {
        polys.push(Z3Poly::zero(n));
    }
    for block in &nf.blocks {
        let mut t = Z3Poly::constant(n, z(block.c1));
        for leaf in &block.leaves {
            let mut e = vec![0u8; n];
            for &w in &leaf.wires {
                e[w] = 1;
            }
            // −(−1)^{c_2}
            let coeff = if leaf.c2 { Z3::one() } else { z(2) };
            t = t.add(&Z3Poly::constant(n, z(2)))?.add(&Z3Poly::from_terms(n, [(e, coeff)])?)?;
        }
        polys.extend(r_exponents(&t)?.into_iter().map(|p| p.multilinear_reduce()));
    }
    if polys.is_empty() {
        polys = vec![Z3Poly::zero(n), Z3Poly::zero(n)];
    }
    P1Instance::new(n, polys)
}
