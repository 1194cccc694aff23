use std::any::{Any, TypeId};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::HolElement;
use crate::field::FiniteField;
use crate::Error;

/// Largest group for which a full multiplication table is built.
const MAX_TABLE_ORDER: usize = 4096;

/// `Hol(q,m)` with elements numbered in [`HolElement::all`] order and a dense
/// multiplication table. Shared instances come from [`HolGroup::shared`].
pub struct HolGroup<F: FiniteField> {
    m: usize,
    elements: Vec<HolElement<F>>,
    index: HashMap<HolElement<F>, u16>,
    mul: Vec<u16>,
    inv: Vec<u16>,
    identity: usize,
}

type Cache = Mutex<HashMap<(TypeId, usize), Arc<dyn Any + Send + Sync>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

impl<F: FiniteField> HolGroup<F> {
    pub fn build(m: usize) -> Result<Self, Error> {
        let order = HolElement::<F>::group_order(m);
        if order > MAX_TABLE_ORDER {
            return Err(Error::Unsupported(format!("Hol({},{m}) has order {order}", F::ORDER)));
        }
        let elements = HolElement::<F>::all(m)?;
        let index: HashMap<_, _> = elements.iter().enumerate().map(|(i, &g)| (g, i as u16)).collect();
        let mut mul = Vec::with_capacity(order * order);
        for &g in &elements {
            for &h in &elements {
                mul.push(index[&(g * h)]);
            }
        }
        let inv = elements.iter().map(|g| index[&g.inverse()]).collect();
        let identity = index[&HolElement::identity(m)] as usize;
        Ok(HolGroup { m, elements, index, mul, inv, identity })
    }

    /// Process-wide cached table for `Hol(q,m)`.
    pub fn shared(m: usize) -> Result<Arc<Self>, Error> {
        let key = (TypeId::of::<F>(), m);
        let mut guard = cache().lock().expect("group cache poisoned");
        if let Some(g) = guard.get(&key) {
            return Ok(g.clone().downcast::<Self>().expect("cache keyed by field type"));
        }
        let g = Arc::new(Self::build(m)?);
        guard.insert(key, g.clone());
        Ok(g)
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[HolElement<F>] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> HolElement<F> {
        self.elements[i]
    }

    pub fn index_of(&self, g: &HolElement<F>) -> Option<usize> {
        self.index.get(g).map(|&i| i as usize)
    }

    #[inline]
    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.elements.len() + b] as usize
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::F2;

    #[test]
    fn table_agrees_with_elements() {
        let g = HolGroup::<F2>::shared(2).unwrap();
        assert_eq!(g.order(), 24);
        for a in 0..24 {
            assert_eq!(g.element(g.inv(a)), g.element(a).inverse());
            for b in 0..24 {
                assert_eq!(g.element(g.mul(a, b)), g.element(a) * g.element(b));
            }
        }
        assert!(g.element(g.identity()).is_identity());
        assert!(Arc::ptr_eq(&g, &HolGroup::<F2>::shared(2).unwrap()));
    }
}
