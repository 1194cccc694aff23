use std::fmt;

use super::{HolElement, HolGroup};
use crate::field::FiniteField;
use crate::Error;

/// Values for `x_1 … x_n`, 0-based.
pub type Assignment<F> = Vec<HolElement<F>>;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Letter<F: FiniteField> {
    /// `x_{i+1}`.
    Var(usize),
    Const(HolElement<F>),
}

/// A word over `Hol(q,m) ∪ {x_1, …, x_n}`. `n` may exceed the largest
/// variable that occurs, so passes can emit words with unused variables.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GroupWord<F: FiniteField> {
    m: usize,
    n: usize,
    letters: Vec<Letter<F>>,
}

impl<F: FiniteField> GroupWord<F> {
    pub fn new(m: usize, n: usize, letters: Vec<Letter<F>>) -> Result<Self, Error> {
        for l in &letters {
            match l {
                Letter::Var(i) if *i >= n => {
                    return Err(Error::Precondition(format!("variable x{} exceeds declared n = {n}", i + 1)))
                }
                Letter::Const(c) if c.dim() != m => return Err(Error::DimensionMismatch { left: m, right: c.dim() }),
                _ => {}
            }
        }
        Ok(GroupWord { m, n, letters })
    }

    /// `n` is taken as one past the largest variable index.
    pub fn from_letters(m: usize, letters: Vec<Letter<F>>) -> Result<Self, Error> {
        let n = letters
            .iter()
            .filter_map(|l| match l {
                Letter::Var(i) => Some(i + 1),
                Letter::Const(_) => None,
            })
            .max()
            .unwrap_or(0);
        Self::new(m, n, letters)
    }

    pub fn empty(m: usize, n: usize) -> Self {
        GroupWord { m, n, letters: Vec::new() }
    }

    pub fn constant(g: HolElement<F>) -> Self {
        GroupWord { m: g.dim(), n: 0, letters: vec![Letter::Const(g)] }
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Letter<F>] {
        &self.letters
    }

    pub fn with_num_vars(mut self, n: usize) -> Result<Self, Error> {
        let needed = Self::from_letters(self.m, self.letters.clone())?.n;
        if n < needed {
            return Err(Error::Precondition(format!("word uses {needed} variables, cannot declare {n}")));
        }
        self.n = n;
        Ok(self)
    }

    pub fn push(&mut self, letter: Letter<F>) {
        if let Letter::Var(i) = letter {
            self.n = self.n.max(i + 1);
        }
        self.letters.push(letter);
    }

    /// Concatenation; the result declares the larger variable count.
    pub fn concat(&self, other: &Self) -> Self {
        assert_eq!(self.m, other.m, "holomorph parameter mismatch");
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        GroupWord { m: self.m, n: self.n.max(other.n), letters }
    }

    /// The single word `p · q⁻¹`, whose value is 1 exactly when `p = q`.
    pub fn equation(p: &Self, q: &Self) -> Self {
        p.concat(&word_inverse(q))
    }

    /// Replaces `x_i` by the word `images[i]`.
    pub fn substitute(&self, images: &[GroupWord<F>]) -> Result<Self, Error> {
        let mut out = GroupWord::empty(self.m, 0);
        for l in &self.letters {
            match l {
                Letter::Var(i) => {
                    let img = images.get(*i).ok_or(Error::UnboundVariable(*i))?;
                    out = out.concat(img);
                }
                Letter::Const(_) => out.letters.push(*l),
            }
        }
        for img in images {
            out.n = out.n.max(img.n);
        }
        Ok(out)
    }

    pub fn compile(&self, group: &HolGroup<F>) -> CompiledWord {
        CompiledWord::new(self, group)
    }
}

impl<F: FiniteField> fmt::Display for GroupWord<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, l) in self.letters.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            match l {
                Letter::Var(i) => write!(f, "x{}", i + 1)?,
                Letter::Const(c) => write!(f, "{c}")?,
            }
        }
        Ok(())
    }
}

/// Product of the letter values; the empty word evaluates to the identity.
pub fn word_evaluate<F: FiniteField>(w: &GroupWord<F>, a: &[HolElement<F>]) -> Result<HolElement<F>, Error> {
    let mut acc = HolElement::identity(w.m);
    for l in &w.letters {
        let x = match l {
            Letter::Var(i) => *a.get(*i).ok_or(Error::UnboundVariable(*i))?,
            Letter::Const(c) => *c,
        };
        acc = acc.checked_mul(&x)?;
    }
    Ok(acc)
}

/// Reversed word with each constant inverted and each variable `x` replaced
/// by `x^{|G|−1}`, so the result never needs a formal inverse symbol.
pub fn word_inverse<F: FiniteField>(w: &GroupWord<F>) -> GroupWord<F> {
    let order = HolElement::<F>::group_order(w.m);
    let mut letters = Vec::with_capacity(w.len() * (order - 1));
    for l in w.letters.iter().rev() {
        match l {
            Letter::Var(_) => letters.extend(std::iter::repeat_n(*l, order - 1)),
            Letter::Const(c) => letters.push(Letter::Const(c.inverse())),
        }
    }
    GroupWord { m: w.m, n: w.n, letters }
}

#[derive(Clone, Copy, Debug)]
enum Item {
    Const(usize),
    /// `x_i^k`
    Power(usize, usize),
}

/// A word rewritten over group indices: runs of constants are multiplied
/// out and runs of one variable become a power.
#[derive(Clone, Debug)]
pub struct CompiledWord {
    items: Vec<Item>,
    n: usize,
}

impl CompiledWord {
    pub fn new<F: FiniteField>(w: &GroupWord<F>, group: &HolGroup<F>) -> Self {
        let mut items: Vec<Item> = Vec::new();
        for l in &w.letters {
            match (l, items.last_mut()) {
                (Letter::Const(c), Some(Item::Const(prev))) => {
                    *prev = group.mul(*prev, group.index_of(c).expect("constant in group"));
                }
                (Letter::Const(c), _) => items.push(Item::Const(group.index_of(c).expect("constant in group"))),
                (Letter::Var(i), Some(Item::Power(j, k))) if j == i => *k += 1,
                (Letter::Var(i), _) => items.push(Item::Power(*i, 1)),
            }
        }
        CompiledWord { items, n: w.n }
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    /// `a[i]` is the group index assigned to `x_{i+1}`.
    #[inline]
    pub fn evaluate<F: FiniteField>(&self, group: &HolGroup<F>, a: &[usize]) -> usize {
        let mut acc = group.identity();
        for item in &self.items {
            match *item {
                Item::Const(c) => acc = group.mul(acc, c),
                Item::Power(i, k) => {
                    for _ in 0..k {
                        acc = group.mul(acc, a[i]);
                    }
                }
            }
        }
        acc
    }
}

fn assignment_count(order: usize, n: usize, cap: u64) -> Result<u64, Error> {
    let total = (order as u128).checked_pow(n as u32);
    match total {
        Some(t) if t <= cap as u128 => Ok(t as u64),
        _ => Err(Error::cap(format!("{order}^{n}"), cap)),
    }
}

/// Visits assignments in lexicographic order (x_1 most significant) until
/// `stop` returns true; returns the stopping assignment.
fn search<F: FiniteField>(
    w: &GroupWord<F>,
    cap: u64,
    mut stop: impl FnMut(usize) -> bool,
) -> Result<Option<Assignment<F>>, Error> {
    let group = HolGroup::<F>::shared(w.m)?;
    let n = w.num_vars();
    assignment_count(group.order(), n, cap)?;
    let compiled = w.compile(&group);
    let mut idx = vec![0usize; n];
    loop {
        if stop(compiled.evaluate(&group, &idx)) {
            return Ok(Some(idx.iter().map(|&i| group.element(i)).collect()));
        }
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(None);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < group.order() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// First assignment (lexicographic) with `w = target`, or `None` if unsatisfiable.
pub fn polsat_bruteforce<F: FiniteField>(
    w: &GroupWord<F>,
    target: &HolElement<F>,
    cap: u64,
) -> Result<Option<Assignment<F>>, Error> {
    let group = HolGroup::<F>::shared(w.m)?;
    let t = group.index_of(target).ok_or_else(|| Error::ParameterMismatch("target outside the group".into()))?;
    search(w, cap, |v| v == t)
}

/// First assignment with `w ≠ 1`, or `None` if `w` is an identity.
pub fn poleqv_bruteforce<F: FiniteField>(w: &GroupWord<F>, cap: u64) -> Result<Option<Assignment<F>>, Error> {
    let id = HolGroup::<F>::shared(w.m)?.identity();
    search(w, cap, |v| v != id)
}
