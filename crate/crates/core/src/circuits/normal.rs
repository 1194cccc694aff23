//! The three-layer normal form
//! `Mod_2(c_0 + Σ_i Mod_3(c_1(i) + Σ_j Mod_2(c_2(i,j) + Σ_m e(i,j,m) y_m)))`.

use super::{CCCircuit, ModGate, Node};
use crate::Error;

/// `Mod_2(c_2 + Σ_{m ∈ wires} y_m)`; `wires` is sorted and duplicate-free.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Leaf {
    pub c2: bool,
    pub wires: Vec<usize>,
}

/// `Mod_3(c_1 + Σ_j leaf_j)` with `c_1 < 3`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Block {
    pub c1: u8,
    pub leaves: Vec<Leaf>,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct NormalForm {
    pub num_inputs: usize,
    pub c0: bool,
    pub blocks: Vec<Block>,
}

impl Leaf {
    /// `y` as `Mod_2(1 + y)`.
    fn wire(i: usize) -> Leaf {
        Leaf { c2: true, wires: vec![i] }
    }

    fn from_gate(g: &ModGate) -> Result<Leaf, Error> {
        let mut wires = Vec::new();
        for (_, child) in g.children() {
            match child {
                // coefficients are 1 after reduction mod 2; a repeated wire cancels
                Node::Input(i) => match wires.iter().position(|w| w == i) {
                    Some(k) => {
                        wires.remove(k);
                    }
                    None => wires.push(*i),
                },
                Node::Gate(_) => return Err(Error::NotNormalForm("a bottom Mod2 gate has a gate input".into())),
            }
        }
        wires.sort_unstable();
        Ok(Leaf { c2: g.constant() == 1, wires })
    }

    fn node(&self) -> Node {
        let children = self.wires.iter().map(|&i| (1, Node::Input(i))).collect();
        Node::Gate(ModGate { modulus: 2, constant: u32::from(self.c2), children })
    }
}

impl Block {
    fn from_gate(g: &ModGate) -> Result<Block, Error> {
        let mut leaves = Vec::new();
        for (k, child) in g.children() {
            let leaf = match child {
                Node::Input(i) => Leaf::wire(*i),
                Node::Gate(h) if h.modulus() == 2 => Leaf::from_gate(h)?,
                Node::Gate(h) => {
                    return Err(Error::NotNormalForm(format!("a Mod3 gate has a Mod{} input", h.modulus())))
                }
            };
            for _ in 0..*k {
                leaves.push(leaf.clone());
            }
        }
        Ok(Block { c1: g.constant() as u8, leaves })
    }

    fn node(&self) -> Node {
        let children = self.leaves.iter().map(|l| (1, l.node())).collect();
        Node::Gate(ModGate { modulus: 3, constant: u32::from(self.c1), children })
    }
}

impl NormalForm {
    /// Coerces a circuit into the normal form. A wire `y` or bottom gate `g`
    /// feeding the output gate becomes `Mod_3(2 + g)`; a wire feeding a
    /// `Mod_3` gate becomes `Mod_2(1 + y)`; a coefficient 2 under `Mod_3`
    /// repeats the term. Anything else is rejected.
    pub fn from_circuit(c: &CCCircuit) -> Result<NormalForm, Error> {
        let Node::Gate(root) = c.root() else {
            return Err(Error::NotNormalForm("the output is an input wire".into()));
        };
        if root.modulus() != 2 {
            return Err(Error::NotNormalForm(format!("the output gate is Mod{}, not Mod2", root.modulus())));
        }
        let mut blocks = Vec::new();
        for (_, child) in root.children() {
            blocks.push(match child {
                Node::Input(i) => Block { c1: 2, leaves: vec![Leaf::wire(*i)] },
                Node::Gate(g) if g.modulus() == 3 => Block::from_gate(g)?,
                Node::Gate(g) if g.modulus() == 2 => Block { c1: 2, leaves: vec![Leaf::from_gate(g)?] },
                Node::Gate(g) => {
                    return Err(Error::NotNormalForm(format!("the output gate has a Mod{} input", g.modulus())))
                }
            });
        }
        Ok(NormalForm { num_inputs: c.num_inputs(), c0: root.constant() == 1, blocks })
    }

    pub fn to_circuit(&self) -> Result<CCCircuit, Error> {
        let children = self.blocks.iter().map(|b| (1, b.node())).collect();
        let root = Node::Gate(ModGate { modulus: 2, constant: u32::from(self.c0), children });
        CCCircuit::new(vec![2, 3, 2], self.num_inputs, root)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{bits, tests::example_circuit};

    #[test]
    fn example_is_coerced() {
        let c = example_circuit();
        let nf = NormalForm::from_circuit(&c).unwrap();
        assert_eq!(nf.blocks.len(), 2);
        assert_eq!(nf.blocks[0].leaves.len(), 2);
        let d = nf.to_circuit().unwrap();
        for code in 0..8 {
            let y = bits(3, code);
            assert_eq!(d.evaluate(&y).unwrap(), c.evaluate(&y).unwrap());
        }
        assert_eq!(NormalForm::from_circuit(&d).unwrap(), nf);
    }

    #[test]
    fn stray_wires_are_coerced() {
        let inner = Node::gate(3, 0, vec![(1, Node::Input(1)), (2, Node::Input(0))]).unwrap();
        let top = Node::gate(2, 0, vec![(1, Node::Input(0)), (1, inner)]).unwrap();
        let c = CCCircuit::new(vec![2, 3, 2], 2, top).unwrap();
        let d = NormalForm::from_circuit(&c).unwrap().to_circuit().unwrap();
        for code in 0..4 {
            let y = bits(2, code);
            assert_eq!(d.evaluate(&y).unwrap(), c.evaluate(&y).unwrap());
        }
    }

    #[test]
    fn rejects_other_shapes() {
        let c = CCCircuit::new(vec![3, 2], 1, Node::gate(3, 0, vec![(1, Node::Input(0))]).unwrap()).unwrap();
        assert!(matches!(NormalForm::from_circuit(&c), Err(Error::NotNormalForm(_))));
    }
}
