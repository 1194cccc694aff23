//! `CC[m_1,…,m_d]` circuits as nested Mod-gate expressions.
//!
//! Shapes list the gate moduli from the output gate downwards, so the
//! output gate of a `[2,3,2]` circuit is a `Mod_2` gate whose gate children
//! are `Mod_3` gates. Gate sums have nonnegative coefficients reduced below
//! the gate modulus; inputs are bits.

mod normal;
mod reductions;

use std::fmt;

use crate::Error;

pub use normal::{Block, Leaf, NormalForm};
pub use reductions::{circuit_to_p1, f_gadget, f_value, p1_to_circuit, poly_to_mod32, r_exponents};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Node {
    Gate(ModGate),
    Input(usize),
}

/// `Mod_n(c + Σ coeff·child)`: 1 iff the sum is divisible by `n`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ModGate {
    modulus: u32,
    constant: u32,
    children: Vec<(u32, Node)>,
}

impl ModGate {
    /// Reduces the constant and coefficients modulo `n` and drops terms
    /// whose coefficient becomes 0. Negative literals are passed as their
    /// complements by the callers.
    pub fn new(modulus: u32, constant: u32, children: Vec<(u32, Node)>) -> Result<Self, Error> {
        if modulus < 2 {
            return Err(Error::Precondition(format!("gate modulus {modulus} < 2")));
        }
        let children = children.into_iter().map(|(c, n)| (c % modulus, n)).filter(|(c, _)| *c != 0).collect();
        Ok(ModGate { modulus, constant: constant % modulus, children })
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn constant(&self) -> u32 {
        self.constant
    }

    pub fn children(&self) -> &[(u32, Node)] {
        &self.children
    }
}

impl Node {
    pub fn gate(modulus: u32, constant: u32, children: Vec<(u32, Node)>) -> Result<Node, Error> {
        Ok(Node::Gate(ModGate::new(modulus, constant, children)?))
    }

    fn evaluate(&self, y: &[bool]) -> Result<bool, Error> {
        match self {
            Node::Input(i) => y.get(*i).copied().ok_or(Error::UnboundVariable(*i)),
            Node::Gate(g) => {
                let mut sum = u64::from(g.constant);
                for (c, child) in &g.children {
                    if child.evaluate(y)? {
                        sum += u64::from(*c);
                    }
                }
                Ok(sum % u64::from(g.modulus) == 0)
            }
        }
    }

    fn gate_count(&self) -> usize {
        match self {
            Node::Input(_) => 0,
            Node::Gate(g) => 1 + g.children.iter().map(|(_, c)| c.gate_count()).sum::<usize>(),
        }
    }

    fn max_input(&self) -> Option<usize> {
        match self {
            Node::Input(i) => Some(*i),
            Node::Gate(g) => g.children.iter().filter_map(|(_, c)| c.max_input()).max(),
        }
    }

    fn check_shape(&self, shape: &[u32], depth: usize, path: &mut Vec<usize>, out: &mut Vec<String>) {
        let Node::Gate(g) = self else { return };
        match shape.get(depth) {
            None => out.push(format!("gate at {} is deeper than the shape allows", show_path(path))),
            Some(&m) if m != g.modulus => {
                out.push(format!("gate at {} is Mod{} but depth {depth} requires Mod{m}", show_path(path), g.modulus))
            }
            _ => {}
        }
        for (k, (_, child)) in g.children.iter().enumerate() {
            path.push(k);
            child.check_shape(shape, depth + 1, path, out);
            path.pop();
        }
    }
}

fn show_path(path: &[usize]) -> String {
    if path.is_empty() {
        "the root".to_string()
    } else {
        format!("child path {}", path.iter().map(|k| k.to_string()).collect::<Vec<_>>().join("."))
    }
}

/// A circuit with `num_inputs` wires `y_0 … y_{m−1}` and a declared shape.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CCCircuit {
    shape: Vec<u32>,
    num_inputs: usize,
    root: Node,
}

impl CCCircuit {
    /// Checks that every wire is below `num_inputs` and that the gates fit
    /// the shape; see [`CCCircuit::validate`].
    pub fn new(shape: Vec<u32>, num_inputs: usize, root: Node) -> Result<Self, Error> {
        if let Some(i) = root.max_input() {
            if i >= num_inputs {
                return Err(Error::UnboundVariable(i));
            }
        }
        let c = CCCircuit { shape, num_inputs, root };
        let violations = c.validate(&c.shape);
        if !violations.is_empty() {
            return Err(Error::Shape(violations.join("; ")));
        }
        Ok(c)
    }

    /// The circuit that always outputs `bit`.
    pub fn constant(shape: Vec<u32>, num_inputs: usize, bit: bool) -> Result<Self, Error> {
        let m = *shape.first().ok_or_else(|| Error::Shape("empty shape".into()))?;
        CCCircuit::new(shape, num_inputs, Node::gate(m, u32::from(!bit), vec![])?)
    }

    pub fn shape(&self) -> &[u32] {
        &self.shape
    }

    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    /// Number of Mod gates.
    pub fn size(&self) -> usize {
        self.root.gate_count()
    }

    pub fn evaluate(&self, y: &[bool]) -> Result<bool, Error> {
        if y.len() != self.num_inputs {
            return Err(Error::ParameterMismatch(format!("{} bits for {} wires", y.len(), self.num_inputs)));
        }
        self.root.evaluate(y)
    }

    /// Violations of `shape`: a gate whose modulus differs from the shape's
    /// entry at its depth, or a gate below the last layer. Wires may feed any
    /// layer.
    pub fn validate(&self, shape: &[u32]) -> Vec<String> {
        let mut out = Vec::new();
        if matches!(self.root, Node::Input(_)) {
            out.push("the root is an input wire, not a gate".into());
        }
        self.root.check_shape(shape, 0, &mut Vec::new(), &mut out);
        out
    }

    /// The negation `1 − C`. A `Mod_2` output gate gets its constant toggled,
    /// which keeps the shape. Any other output is wrapped as `Mod_2(C)`,
    /// adding a layer; note `Mod_2(1 + C) = C` since `Mod_n` fires on
    /// divisibility.
    pub fn flip(&self) -> CCCircuit {
        match &self.root {
            Node::Gate(g) if g.modulus == 2 => {
                let mut g = g.clone();
                g.constant ^= 1;
                CCCircuit { shape: self.shape.clone(), num_inputs: self.num_inputs, root: Node::Gate(g) }
            }
            root => {
                let mut shape = vec![2];
                shape.extend_from_slice(&self.shape);
                let root = Node::Gate(ModGate { modulus: 2, constant: 0, children: vec![(1, root.clone())] });
                CCCircuit { shape, num_inputs: self.num_inputs, root }
            }
        }
    }
}

/// [`CCCircuit::flip`].
pub fn circuit_flip(c: &CCCircuit) -> CCCircuit {
    c.flip()
}

/// Input `code` as bits, `y_0` in the most significant of the `m` low bits.
pub fn bits(m: usize, code: u64) -> Vec<bool> {
    (0..m).map(|i| code >> (m - 1 - i) & 1 == 1).collect()
}

/// First input in [`bits`] order where the output differs from `target`;
/// `None` means the circuit is constantly `target`.
pub fn circuit_equivalence_bruteforce(c: &CCCircuit, target: bool, cap: u64) -> Result<Option<Vec<bool>>, Error> {
    let m = c.num_inputs();
    if m >= 64 || (1u64 << m) > cap {
        return Err(Error::cap(format!("2^{m}"), cap));
    }
    for code in 0..(1u64 << m) {
        let y = bits(m, code);
        if c.evaluate(&y)? != target {
            return Ok(Some(y));
        }
    }
    Ok(None)
}

impl fmt::Display for Node {
    /// `(modN c (term coeff child) …)` with `(in k)` leaves.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Input(i) => write!(f, "(in {i})"),
            Node::Gate(g) => {
                write!(f, "(mod{} {}", g.modulus, g.constant)?;
                for (c, child) in &g.children {
                    write!(f, " (term {c} {child})")?;
                }
                f.write_str(")")
            }
        }
    }
}
