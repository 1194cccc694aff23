//! Unary words over `Hol(q,m) ∪ {x}` with prescribed induced functions.
//!
//! The functions `Hol(q,m) → Hol(q,m)` induced by one-variable words are
//! exactly the closure of the identity map and the constant maps under
//! pointwise multiplication. Two targets are needed downstream:
//!
//! * an idempotent `e` with image in the translation subgroup `V` and
//!   `e|_V = id`,
//! * for `a ∈ V \ {1}`, a word `f` with `f|_V = id` and `f ≡ a` off `V`.
//!
//! Existence is known but no construction is given, so both are found by
//! search and every returned table is recomputed by evaluating the word.
//! Nothing here claims the words are short.

use std::collections::{HashMap, HashSet};
use std::sync::{Arc, Mutex, OnceLock};

use crate::field::FiniteField;
use crate::holomorph::{word_evaluate, GroupWord, HolElement, HolGroup, Letter};
use crate::Error;

/// Default limit on distinct function tables held by a search.
pub const NEARRING_CAP: usize = 10_000_000;

/// States explored by the plain breadth-first stage before switching to the
/// staged search.
const PLAIN_BUDGET: usize = 200_000;

/// A unary word and the function it induces, stored as group indices in
/// [`HolGroup`] element order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProvenancedWord<F: FiniteField> {
    word: GroupWord<F>,
    table: Vec<usize>,
}

impl<F: FiniteField> ProvenancedWord<F> {
    /// Evaluates `word` on every group element.
    pub fn new(word: GroupWord<F>) -> Result<Self, Error> {
        if word.num_vars() > 1 {
            return Err(Error::Precondition(format!("unary word expected, found {} variables", word.num_vars())));
        }
        let group = HolGroup::<F>::shared(word.dim())?;
        let table = group
            .elements()
            .iter()
            .map(|g| Ok(group.index_of(&word_evaluate(&word, &[*g])?).expect("closed")))
            .collect::<Result<_, Error>>()?;
        Ok(ProvenancedWord { word, table })
    }

    pub fn word(&self) -> &GroupWord<F> {
        &self.word
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, g: &HolElement<F>) -> HolElement<F> {
        let group = HolGroup::<F>::shared(self.word.dim()).expect("built in new");
        group.element(self.table[group.index_of(g).expect("same group")])
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }
}

/// Flat storage of explored tables with parent links for word recovery.
struct Arena {
    order: usize,
    tables: Vec<u16>,
    /// `(parent state, appended letter)`; letter `None` is `x`.
    links: Vec<(Option<u32>, Option<u16>)>,
    seen: HashMap<Box<[u16]>, u32>,
}

impl Arena {
    fn new(order: usize) -> Self {
        Arena { order, tables: Vec::new(), links: Vec::new(), seen: HashMap::new() }
    }

    fn len(&self) -> usize {
        self.links.len()
    }

    fn table(&self, i: usize) -> &[u16] {
        &self.tables[i * self.order..(i + 1) * self.order]
    }

    fn insert(&mut self, t: Vec<u16>, link: (Option<u32>, Option<u16>)) -> Option<usize> {
        let boxed = t.into_boxed_slice();
        if self.seen.contains_key(&boxed) {
            return None;
        }
        let id = self.links.len();
        self.tables.extend_from_slice(&boxed);
        self.seen.insert(boxed, id as u32);
        self.links.push(link);
        Some(id)
    }

    fn letters(&self, mut i: usize) -> Vec<Option<u16>> {
        let mut out = Vec::new();
        loop {
            let (parent, letter) = self.links[i];
            out.push(letter);
            match parent {
                Some(p) => i = p as usize,
                None => break,
            }
        }
        out.reverse();
        out
    }
}

/// Result of the plain breadth-first closure.
pub struct Closure<F: FiniteField> {
    group: Arc<HolGroup<F>>,
    arena: Arena,
    /// True when the cap stopped the closure before it was complete.
    pub truncated: bool,
}

impl<F: FiniteField> Closure<F> {
    pub fn len(&self) -> usize {
        self.arena.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arena.len() == 0
    }

    pub fn table(&self, i: usize) -> Vec<usize> {
        self.arena.table(i).iter().map(|&x| x as usize).collect()
    }

    pub fn word(&self, i: usize) -> GroupWord<F> {
        letters_to_word(&self.group, &self.arena.letters(i))
    }

    pub fn position(&self, table: &[usize]) -> Option<usize> {
        let key: Box<[u16]> = table.iter().map(|&x| x as u16).collect();
        self.arena.seen.get(&key).map(|&i| i as usize)
    }

    pub fn provenanced(&self, i: usize) -> Result<ProvenancedWord<F>, Error> {
        ProvenancedWord::new(self.word(i))
    }
}

fn letters_to_word<F: FiniteField>(group: &HolGroup<F>, letters: &[Option<u16>]) -> GroupWord<F> {
    let mut w = GroupWord::empty(group.dim(), 1);
    let mut pending: Option<usize> = None;
    for l in letters {
        match l {
            Some(c) => pending = Some(pending.map_or(*c as usize, |p| group.mul(p, *c as usize))),
            None => {
                if let Some(p) = pending.take().filter(|&p| p != group.identity()) {
                    w.push(Letter::Const(group.element(p)));
                }
                w.push(Letter::Var(0));
            }
        }
    }
    if let Some(p) = pending.filter(|&p| p != group.identity()) {
        w.push(Letter::Const(group.element(p)));
    }
    if w.is_empty() && letters.iter().all(Option::is_some) && !letters.is_empty() {
        // A word of constants multiplying to 1 still denotes the constant map 1.
        w.push(Letter::Const(group.element(group.identity())));
    }
    w
}

fn generators(order: usize) -> impl Iterator<Item = Option<u16>> {
    std::iter::once(None).chain((0..order).map(|c| Some(c as u16)))
}

fn step<F: FiniteField>(group: &HolGroup<F>, t: &[u16], letter: Option<u16>) -> Vec<u16> {
    match letter {
        None => t.iter().enumerate().map(|(x, &v)| group.mul(v as usize, x) as u16).collect(),
        Some(c) => t.iter().map(|&v| group.mul(v as usize, c as usize) as u16).collect(),
    }
}

/// Breadth-first closure of `{x} ∪ {constants}` under right multiplication
/// by a generator, keeping the first (hence shortest) word per table.
/// Stops at `cap` distinct tables and sets [`Closure::truncated`].
pub fn unary_closure<F: FiniteField>(m: usize, cap: usize) -> Result<Closure<F>, Error> {
    if cap == 0 {
        return Err(Error::Precondition("closure cap must be at least 1".into()));
    }
    let group = HolGroup::<F>::shared(m)?;
    let (arena, truncated, _) = plain_bfs(&group, cap, |_| false);
    Ok(Closure { group, arena, truncated })
}

/// Returns `(arena, truncated, hit)`.
fn plain_bfs<F: FiniteField>(
    group: &HolGroup<F>,
    cap: usize,
    mut accept: impl FnMut(&[u16]) -> bool,
) -> (Arena, bool, Option<usize>) {
    let order = group.order();
    let mut arena = Arena::new(order);
    for g in generators(order) {
        let t = match g {
            None => (0..order as u16).collect(),
            Some(c) => vec![c; order],
        };
        if arena.len() >= cap {
            return (arena, true, None);
        }
        if let Some(id) = arena.insert(t, (None, g)) {
            if accept(arena.table(id)) {
                return (arena, false, Some(id));
            }
        }
    }
    let mut head = 0;
    while head < arena.len() {
        for g in generators(order) {
            let t = step(group, arena.table(head), g);
            if arena.seen.contains_key(t.as_slice()) {
                continue;
            }
            if arena.len() >= cap {
                return (arena, true, None);
            }
            let id = arena.insert(t, (Some(head as u32), g)).expect("checked unseen");
            if accept(arena.table(id)) {
                return (arena, false, Some(id));
            }
        }
        head += 1;
    }
    (arena, false, None)
}

/// Smallest `k ≥ 1` with `g^k = 1` for all `g`.
fn exponent<F: FiniteField>(group: &HolGroup<F>) -> usize {
    (1..=group.order())
        .find(|&k| {
            (0..group.order()).all(|g| (0..k).fold(group.identity(), |acc, _| group.mul(acc, g)) == group.identity())
        })
        .expect("group order is an exponent")
}

/// Word as a flat letter list; `None` is `x`.
type Letters = Vec<Option<u16>>;

fn pow_letters(w: &Letters, k: usize) -> Letters {
    w.iter().cycle().take(w.len() * k).copied().collect()
}

/// Staged search: conjugated powers `g·x^k·g⁻¹`, then products of those
/// (level by level in the number of factors), testing every product and
/// all of its powers against `accept`.
fn staged_search<F: FiniteField>(
    group: &HolGroup<F>,
    cap: usize,
    accept: &dyn Fn(&[u16]) -> bool,
) -> Result<Letters, Error> {
    let order = group.order();
    let exp = exponent(group);
    let id = group.identity();

    let mut atoms: Vec<(Vec<u16>, Letters)> = Vec::new();
    let mut seen_atoms: HashSet<Vec<u16>> = HashSet::new();
    let mut raw: Vec<(Vec<u16>, Letters)> = Vec::new();
    for k in 1..exp {
        for g in 0..order {
            let gi = group.inv(g);
            let t: Vec<u16> = (0..order)
                .map(|h| {
                    let p = (0..k).fold(id, |acc, _| group.mul(acc, h));
                    group.mul(group.mul(g, p), gi) as u16
                })
                .collect();
            let mut w: Letters = Vec::new();
            if g != id {
                w.push(Some(g as u16));
            }
            w.extend(std::iter::repeat_n(None, k));
            if g != id {
                w.push(Some(gi as u16));
            }
            raw.push((t, w));
        }
    }
    raw.sort_by_key(|(_, w)| w.len());
    for (t, w) in raw {
        if seen_atoms.insert(t.clone()) {
            atoms.push((t, w));
        }
    }

    let try_powers = |t: &[u16], w: &Letters| -> Option<Letters> {
        let mut p = t.to_vec();
        for k in 1..exp {
            if accept(&p) {
                return Some(pow_letters(w, k));
            }
            p = p.iter().zip(t).map(|(&a, &b)| group.mul(a as usize, b as usize) as u16).collect();
        }
        None
    };

    let mut seen: HashSet<Vec<u16>> = HashSet::new();
    let mut level: Vec<(Vec<u16>, Letters)> = Vec::new();
    for (t, w) in &atoms {
        if seen.insert(t.clone()) {
            if let Some(hit) = try_powers(t, w) {
                return Ok(hit);
            }
            level.push((t.clone(), w.clone()));
        }
    }
    while !level.is_empty() {
        let mut next = Vec::new();
        for (u, uw) in &level {
            for (a, aw) in &atoms {
                let t: Vec<u16> = u.iter().zip(a).map(|(&x, &y)| group.mul(x as usize, y as usize) as u16).collect();
                if seen.contains(&t) {
                    continue;
                }
                if seen.len() >= cap {
                    return Err(Error::SearchFailed(format!("staged word search exhausted the cap of {cap} tables")));
                }
                seen.insert(t.clone());
                let mut w = uw.clone();
                w.extend_from_slice(aw);
                if let Some(hit) = try_powers(&t, &w) {
                    return Ok(hit);
                }
                next.push((t, w));
            }
        }
        level = next;
    }
    Err(Error::SearchFailed("staged word search closed without reaching the target".into()))
}

/// Plain breadth-first search within a small budget, then the staged search.
fn search<F: FiniteField>(m: usize, cap: usize, accept: &dyn Fn(&[u16]) -> bool) -> Result<GroupWord<F>, Error> {
    let group = HolGroup::<F>::shared(m)?;
    let (arena, _, hit) = plain_bfs(&group, cap.min(PLAIN_BUDGET), accept);
    let letters = match hit {
        Some(i) => arena.letters(i),
        None => {
            drop(arena);
            staged_search(&group, cap, accept)?
        }
    };
    Ok(letters_to_word(&group, &letters))
}

fn translation_indices<F: FiniteField>(group: &HolGroup<F>) -> Vec<bool> {
    group.elements().iter().map(HolElement::is_translation).collect()
}

pub fn is_idempotent_onto_v<F: FiniteField>(w: &ProvenancedWord<F>) -> bool {
    let group = HolGroup::<F>::shared(w.word.dim()).expect("built");
    let in_v = translation_indices(&group);
    w.table.iter().all(|&t| in_v[t]) && (0..group.order()).filter(|&h| in_v[h]).all(|h| w.table[h] == h)
}

pub fn is_collapse_to<F: FiniteField>(w: &ProvenancedWord<F>, a: &HolElement<F>) -> bool {
    let group = HolGroup::<F>::shared(w.word.dim()).expect("built");
    let in_v = translation_indices(&group);
    let Some(ai) = group.index_of(a) else { return false };
    (0..group.order()).all(|g| w.table[g] == if in_v[g] { g } else { ai })
}

/// A word `e` with `e(g) ∈ V` for all `g` and `e(h) = h` for `h ∈ V`.
pub fn find_idempotent_onto_v<F: FiniteField>(m: usize, cap: usize) -> Result<ProvenancedWord<F>, Error> {
    let group = HolGroup::<F>::shared(m)?;
    let in_v = translation_indices(&group);
    let accept = |t: &[u16]| {
        t.iter().all(|&x| in_v[x as usize]) && (0..t.len()).filter(|&h| in_v[h]).all(|h| t[h] as usize == h)
    };
    let e = ProvenancedWord::new(search(m, cap, &accept)?)?;
    if !is_idempotent_onto_v(&e) {
        return Err(Error::SearchFailed("search bookkeeping disagrees with evaluation".into()));
    }
    Ok(e)
}

/// A word `f` with `f|_V = id` and `f(g) = a` for `g ∉ V`.
///
/// Searches for the projection `π` (identity on `V`, 1 elsewhere) and
/// returns `π(x·a)·a`: on `V` this is `h·a·a = h`, elsewhere `x·a ∉ V` so
/// the value is `a`.
pub fn find_collapse_to_a<F: FiniteField>(a: &HolElement<F>, cap: usize) -> Result<ProvenancedWord<F>, Error> {
    if !a.is_translation() || a.is_identity() {
        return Err(Error::Precondition(format!("{a} is not a nonidentity translation")));
    }
    let m = a.dim();
    let group = HolGroup::<F>::shared(m)?;
    let in_v = translation_indices(&group);
    let id = group.identity() as u16;
    let accept = |t: &[u16]| (0..t.len()).all(|g| t[g] == if in_v[g] { g as u16 } else { id });
    let pi = search::<F>(m, cap, &accept)?;
    let shifted = GroupWord::from_letters(m, vec![Letter::Var(0), Letter::Const(*a)])?;
    let mut f = pi.substitute(&[shifted])?;
    f.push(Letter::Const(*a));
    let letters: Letters = f
        .letters()
        .iter()
        .map(|l| match l {
            Letter::Var(_) => None,
            Letter::Const(c) => Some(group.index_of(c).expect("in group") as u16),
        })
        .collect();
    let f = ProvenancedWord::new(letters_to_word(&group, &letters))?;
    if !is_collapse_to(&f, a) {
        return Err(Error::SearchFailed("collapse word failed verification".into()));
    }
    Ok(f)
}

type WordCache = Mutex<HashMap<String, Arc<dyn std::any::Any + Send + Sync>>>;

fn word_cache() -> &'static WordCache {
    static CACHE: OnceLock<WordCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn cached<F: FiniteField>(
    key: String,
    build: impl FnOnce() -> Result<ProvenancedWord<F>, Error>,
) -> Result<Arc<ProvenancedWord<F>>, Error> {
    if let Some(w) = word_cache().lock().expect("cache poisoned").get(&key) {
        return Ok(w.clone().downcast().expect("keyed by field"));
    }
    let w = Arc::new(build()?);
    word_cache().lock().expect("cache poisoned").insert(key, w.clone());
    Ok(w)
}

/// Process-wide cached [`find_idempotent_onto_v`] with the default cap.
pub fn idempotent_word<F: FiniteField>(m: usize) -> Result<Arc<ProvenancedWord<F>>, Error> {
    cached(format!("e/{}/{m}", F::ORDER), || find_idempotent_onto_v(m, NEARRING_CAP))
}

/// Process-wide cached [`find_collapse_to_a`] with the default cap.
pub fn collapse_word<F: FiniteField>(a: &HolElement<F>) -> Result<Arc<ProvenancedWord<F>>, Error> {
    cached(format!("f/{}/{a}", F::ORDER), || find_collapse_to_a(a, NEARRING_CAP))
}

/// The canonical nonidentity translation `⟨e_m, I⟩` (last basis vector),
/// used as the target of the collapse word.
pub fn default_collapse_target<F: FiniteField>(m: usize) -> HolElement<F> {
    let mut v = crate::matrix::Vector::<F>::zero(m);
    v.set(m - 1, F::one());
    HolElement::translation(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::F2;

    fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
        a.iter().map(|&x| b[x]).collect()
    }

    #[test]
    fn closure_seeds_and_squares() {
        let c = unary_closure::<F2>(2, 1000).unwrap();
        assert!(c.truncated);
        assert_eq!(c.len(), 1000);
        let g = HolGroup::<F2>::shared(2).unwrap();
        let square: Vec<usize> = (0..24).map(|h| g.mul(h, h)).collect();
        let i = c.position(&square).unwrap();
        assert_eq!(c.word(i).to_string(), "x1 x1");
        for i in 0..c.len() {
            assert_eq!(c.provenanced(i).unwrap().table(), c.table(i).as_slice());
        }
        let seeds = unary_closure::<F2>(2, 25).unwrap();
        assert_eq!(seeds.len(), 25);
    }

    #[test]
    fn idempotent_word_properties() {
        let e = idempotent_word::<F2>(2).unwrap();
        assert!(is_idempotent_onto_v(&e));
        assert_eq!(compose(e.table(), e.table()), e.table());
        let g = HolGroup::<F2>::shared(2).unwrap();
        assert_eq!(e.table()[g.identity()], g.identity());
    }

    #[test]
    fn collapse_word_properties() {
        let a = default_collapse_target::<F2>(2);
        let f = collapse_word::<F2>(&a).unwrap();
        assert!(is_collapse_to(&f, &a));
        assert_eq!(f.apply(&a), a);
        assert_eq!(compose(f.table(), f.table()), f.table());
        assert!(find_collapse_to_a(&HolElement::<F2>::identity(2), NEARRING_CAP).is_err());
    }

    #[test]
    fn staged_stage_reaches_projection() {
        let g = HolGroup::<F2>::shared(2).unwrap();
        let in_v = translation_indices(&g);
        let id = g.identity() as u16;
        let accept = |t: &[u16]| (0..t.len()).all(|h| t[h] == if in_v[h] { h as u16 } else { id });
        let letters = staged_search(&g, NEARRING_CAP, &accept).unwrap();
        let w = ProvenancedWord::new(letters_to_word(&g, &letters)).unwrap();
        assert!(is_idempotent_onto_v(&w));
        assert!(w.table().iter().enumerate().all(|(h, &t)| t == if in_v[h] { h } else { g.identity() }));
    }

    #[test]
    fn tiny_cap_fails_loudly() {
        assert!(matches!(find_idempotent_onto_v::<F2>(2, 30), Err(Error::SearchFailed(_))));
    }
}
