//! The two `PolSat(S4)` procedures parameterized by a hypothesized lower
//! bound `γ(n)` on the size of `CC[2,3,2]` circuits computing `AND_n`.
//!
//! A word `w` is reduced to the inequalities `e_v` over `Mat2(F2)`; `w = 1`
//! is solvable iff some `e_v` is nonzero somewhere. Each `e_v` becomes the
//! circuit `flip(p1_to_circuit(respoly_to_p1(e_v)))`, which outputs 1 exactly
//! on inputs encoding a nonzero point. The expansions of `e_v` are far too
//! large to build for `S4`, so [`ComposedCircuit`] evaluates that circuit
//! input by input from the unexpanded expression; tests compare it with the
//! built circuit wherever the expansion fits under a cap.

use std::collections::HashMap;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circuits::{circuit_flip, f_value, p1_to_circuit, CCCircuit};
use crate::f4arith::{decode_point, f_encode, respoly_to_p1, rho, signs};
use crate::field::{F2, Z3};
use crate::holomorph::{polsat_bruteforce, word_evaluate, Assignment, GroupWord, HolElement};
use crate::matrix::{gl_enumerate, Matrix};
use crate::pipeline::collect_to_inequalities;
use crate::respoly::{Atom, ExpansionAlgebra, RpExpr};
use crate::Error;

/// Expansions up to this many letters are built to get the exact size.
pub const MATERIALIZE_CAP: u64 = 20_000;

/// `γ⁻¹`, the weight bound as a function of circuit size.
#[derive(Clone, Debug, PartialEq)]
pub enum GammaHypothesis {
    /// `γ⁻¹(s)` = number of input wires; always valid, full search.
    Exhaustive,
    /// `γ(n) = exp(c·n^{1/(h−1)})`, so `γ⁻¹(s) = ⌊(ln s / c)^{h−1}⌋`; valid
    /// only under the strong exponential size hypothesis.
    Sesh { c: f64, h: u32 },
}

impl GammaHypothesis {
    /// `exhaustive` or `sesh:c,h` with `c > 0` and `h ≥ 2`.
    pub fn parse(text: &str) -> Result<Self, Error> {
        let text = text.trim();
        if text == "exhaustive" {
            return Ok(GammaHypothesis::Exhaustive);
        }
        let bad = || Error::syntax(format!("expected `exhaustive` or `sesh:c,h`, found `{text}`"));
        let rest = text.strip_prefix("sesh:").ok_or_else(bad)?;
        let (c, h) = rest.split_once(',').ok_or_else(bad)?;
        let c: f64 = c.trim().parse().map_err(|_| bad())?;
        let h: u32 = h.trim().parse().map_err(|_| bad())?;
        if !(c > 0.0 && c.is_finite()) || h < 2 {
            return Err(Error::Precondition(format!("sesh needs c > 0 and h >= 2, got c = {c}, h = {h}")));
        }
        Ok(GammaHypothesis::Sesh { c, h })
    }

    pub fn label(&self) -> String {
        match self {
            GammaHypothesis::Exhaustive => "exhaustive".into(),
            GammaHypothesis::Sesh { c, h } => format!("sesh:{c},{h} (conditional)"),
        }
    }

    /// `min(γ⁻¹(size), wires)`.
    pub fn weight_bound(&self, size: &BigUint, wires: usize) -> usize {
        match self {
            GammaHypothesis::Exhaustive => wires,
            GammaHypothesis::Sesh { c, h } => {
                let k = (ln(size).max(0.0) / c).powi(*h as i32 - 1).floor();
                if k >= wires as f64 {
                    wires
                } else {
                    k as usize
                }
            }
        }
    }
}

fn ln(x: &BigUint) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let bits = x.bits();
    if bits <= 64 {
        return x.to_f64().unwrap_or(f64::MAX).ln();
    }
    let top = (x >> (bits - 64)).to_f64().unwrap_or(f64::MAX);
    top.ln() + (bits - 64) as f64 * std::f64::consts::LN_2
}

/// A circuit seen only through its inputs.
pub trait CircuitOracle {
    fn num_inputs(&self) -> usize;
    fn evaluate(&self, y: &[bool]) -> Result<bool, Error>;
}

impl CircuitOracle for CCCircuit {
    fn num_inputs(&self) -> usize {
        CCCircuit::num_inputs(self)
    }

    fn evaluate(&self, y: &[bool]) -> Result<bool, Error> {
        CCCircuit::evaluate(self, y)
    }
}

/// `GL_2(F2)` with its multiplication table.
struct Gl2 {
    index: HashMap<Matrix<F2>, u8>,
    /// `mask_mul[a][b]` for subsets `a, b` of the six elements, i.e. the
    /// product in the group algebra `F2[GL_2(F2)]`.
    mask_mul: Vec<[u8; 64]>,
    /// `(sign, t)` with `ρ(f(sign, t)) = g`.
    f_inverse: [(Z3, Z3); 6],
}

fn gl2() -> &'static Gl2 {
    static TABLE: OnceLock<Gl2> = OnceLock::new();
    TABLE.get_or_init(|| {
        let elems = gl_enumerate::<F2>(2).expect("GL_2(F2)");
        let index: HashMap<_, _> = elems.iter().enumerate().map(|(i, g)| (*g, i as u8)).collect();
        let mut mul = [[0u8; 6]; 6];
        for (i, a) in elems.iter().enumerate() {
            for (j, b) in elems.iter().enumerate() {
                mul[i][j] = index[&(*a * *b)];
            }
        }
        let mask_mul = (0..64usize)
            .map(|a| {
                let mut row = [0u8; 64];
                for (b, out) in row.iter_mut().enumerate() {
                    for i in (0..6).filter(|i| a >> i & 1 == 1) {
                        for j in (0..6).filter(|j| b >> j & 1 == 1) {
                            *out ^= 1 << mul[i][j];
                        }
                    }
                }
                row
            })
            .collect();
        let mut f_inverse = [(Z3::zero(), Z3::zero()); 6];
        for s in [Z3::new(1), Z3::new(2)] {
            for t in 0..3 {
                let t = Z3::new(t);
                f_inverse[index[&rho(f_encode(s, t))] as usize] = (s, t);
            }
        }
        Gl2 { index, mask_mul, f_inverse }
    })
}

/// Parities of the monomial values at a point: bit `i` is set iff an odd
/// number of monomials evaluate to the `i`-th element of `GL_2(F2)`.
struct Parity<'a> {
    table: &'a Gl2,
    point: &'a [u8],
}

impl ExpansionAlgebra<F2> for Parity<'_> {
    type Elem = u8;

    fn zero(&self) -> u8 {
        0
    }

    fn one(&self) -> u8 {
        1 << self.table.index[&Matrix::identity(2)]
    }

    fn atom(&self, atom: &Atom<F2>) -> u8 {
        match atom {
            Atom::Var(j) => 1 << self.point[*j],
            // constants were checked to be invertible
            Atom::Const(c) => 1 << self.table.index[c],
        }
    }

    fn add(&self, a: &u8, b: &u8) -> u8 {
        a ^ b
    }

    fn mul(&self, a: &u8, b: &u8) -> u8 {
        self.table.mask_mul[*a as usize][*b as usize]
    }
}

/// `flip(p1_to_circuit(respoly_to_p1(p)))` for the expansion `p` of an
/// expression over `Mat2(F2)`, evaluated without expanding. Wires: `y_0` is
/// the selector of the circuit reduction, then the `3n` sign wires of the
/// matrix variables, then the selector `x'` of the F4 reduction.
pub struct ComposedCircuit<'a> {
    expr: &'a RpExpr<F2>,
    n: usize,
    size: BigUint,
    size_exact: bool,
    cache: std::cell::RefCell<HashMap<Vec<u8>, u8>>,
}

impl<'a> ComposedCircuit<'a> {
    pub fn new(expr: &'a RpExpr<F2>) -> Result<Self, Error> {
        if expr.dim() != 2 {
            return Err(Error::Unsupported(format!("Mat_{}(F2); circuits are built for 2x2 matrices", expr.dim())));
        }
        let mut singular = false;
        expr.for_each_leaf(&mut |p| {
            singular |=
                p.monomials().iter().flat_map(|m| m.atoms()).any(|a| matches!(a, Atom::Const(c) if !c.is_invertible()))
        });
        if singular {
            return Err(Error::Singular);
        }
        let n = expr.num_vars();
        let (size, size_exact) = match expr.expand(MATERIALIZE_CAP) {
            Ok(p) => (BigUint::from(circuit_flip(&p1_to_circuit(&respoly_to_p1(&p)?)?).size()), true),
            Err(Error::CapExceeded { .. }) => {
                // 8 exponent polynomials per monomial, each giving one Mod3
                // gate with at most 2^{3n+2} Mod2 gates below it
                let polys = (expr.shape().monomials * 8u32).max(BigUint::from(2u32));
                (BigUint::one() + polys * (BigUint::one() + (BigUint::one() << (3 * n + 2))), false)
            }
            Err(e) => return Err(e),
        };
        Ok(ComposedCircuit { expr, n, size, size_exact, cache: Default::default() })
    }

    /// Exact gate count when the expansion fits [`MATERIALIZE_CAP`],
    /// otherwise an upper bound.
    pub fn size(&self) -> (&BigUint, bool) {
        (&self.size, self.size_exact)
    }

    /// The built circuit, refusing expansions beyond `cap` letters.
    pub fn materialize(&self, cap: u64) -> Result<CCCircuit, Error> {
        Ok(circuit_flip(&p1_to_circuit(&respoly_to_p1(&self.expr.expand(cap)?)?)?))
    }

    /// The matrices encoded by the sign wires.
    pub fn decode(&self, y: &[bool]) -> Vec<Matrix<F2>> {
        let point: Vec<Z3> = y[1..].iter().map(|&b| signs::from_bit(b)).collect();
        decode_point(self.n, &point)
    }

    fn parity(&self, mats: &[Matrix<F2>]) -> u8 {
        let table = gl2();
        let point: Vec<u8> = mats.iter().map(|m| table.index[m]).collect();
        if let Some(&p) = self.cache.borrow().get(&point) {
            return p;
        }
        let p = self.expr.fold(&Parity { table, point: &point });
        self.cache.borrow_mut().insert(point, p);
        p
    }
}

impl CircuitOracle for ComposedCircuit<'_> {
    fn num_inputs(&self) -> usize {
        3 * self.n + 2
    }

    fn evaluate(&self, y: &[bool]) -> Result<bool, Error> {
        if y.len() != self.num_inputs() {
            return Err(Error::ParameterMismatch(format!("{} bits for {} wires", y.len(), self.num_inputs())));
        }
        let table = gl2();
        let x0 = signs::from_bit(y[0]);
        let xp = signs::from_bit(y[3 * self.n + 1]);
        let parity = self.parity(&self.decode(y));
        let (one, two) = (Z3::new(1), Z3::new(2));
        let mut zeros = 0u32;
        for g in (0..6).filter(|g| parity >> g & 1 == 1) {
            let (u, v) = table.f_inverse[g];
            let uv = u + v;
            // exponents emitted per monomial, in emission order
            let values = [xp + uv, uv + one, xp + v + two, v, xp + uv, uv + two, xp + v + one, v];
            zeros += values.iter().filter(|&&a| f_value(a, x0).is_zero()).count() as u32;
        }
        // the output gate Mod2(Σ …) fires on an even count; the flip negates it
        Ok(zeros % 2 == 1)
    }
}

/// First input of Hamming weight at most `bound` with output 1, in order of
/// increasing weight and lexicographically (`y_0` first) within a weight.
/// Also returns the number of inputs evaluated.
pub fn weighted_search(c: &dyn CircuitOracle, bound: usize, cap: u64) -> Result<(Option<Vec<bool>>, u64), Error> {
    let m = c.num_inputs();
    let needed: BigUint = (0..=bound.min(m)).map(|k| binomial(m, k)).sum();
    if needed > BigUint::from(cap) {
        return Err(Error::cap(needed, cap));
    }
    let mut checked = 0;
    for k in 0..=bound.min(m) {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            let mut y = vec![false; m];
            for &i in &idx {
                y[i] = true;
            }
            checked += 1;
            if c.evaluate(&y)? {
                return Ok((Some(y), checked));
            }
            if !next_combination(&mut idx, m) {
                break;
            }
        }
    }
    Ok((None, checked))
}

fn binomial(m: usize, k: usize) -> BigUint {
    (0..k).fold(BigUint::one(), |acc, i| acc * (m - i) / (i + 1))
}

/// Advances to the next `k`-subset of `0..m` in lexicographic order.
fn next_combination(idx: &mut [usize], m: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < m - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Up to `samples` uniform inputs; the first with output 1.
pub fn sample_search(
    c: &dyn CircuitOracle,
    samples: u64,
    rng: &mut ChaCha8Rng,
) -> Result<(Option<Vec<bool>>, u64), Error> {
    for drawn in 1..=samples {
        let y: Vec<bool> = (0..c.num_inputs()).map(|_| rng.gen_bool(0.5)).collect();
        if c.evaluate(&y)? {
            return Ok((Some(y), drawn));
        }
    }
    Ok((None, samples))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Answer {
    Sat,
    Unsat,
    ProbablyUnsat,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub method: String,
    pub answer: Answer,
    /// `[v1,v2;a,b,c,d]` literals, one per variable.
    pub witness: Option<Vec<String>>,
    #[serde(skip)]
    pub assignment: Option<Assignment<F2>>,
    pub hypothesis: String,
    pub circuits: usize,
    pub circuit_inputs: usize,
    /// Largest circuit size over all circuits.
    pub circuit_size: String,
    pub circuit_size_exact: bool,
    /// Largest weight bound (deterministic) or sample exponent (probabilistic).
    pub weight_bound: usize,
    pub points_checked: u64,
    pub samples: u64,
    pub samples_capped: bool,
    pub seed: Option<u64>,
    pub repeats: u32,
    pub crosscheck_performed: bool,
    pub crosscheck_agrees: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Bounds the support set and the weight-bounded enumeration.
    pub cap: u64,
    /// Samples per circuit and run are `min(2^bound, sample_cap)`.
    pub sample_cap: u64,
    /// Also run the brute-force oracle and record agreement.
    pub crosscheck: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { cap: crate::cap_from_env(crate::DEFAULT_CAP), sample_cap: 1 << 20, crosscheck: false }
    }
}

fn check_s4(w: &GroupWord<F2>) -> Result<(), Error> {
    if w.dim() != 2 {
        return Err(Error::Unsupported(format!(
            "Hol(2,{}); the solvers decide PolSat(S4) = PolSat(Hol(2,2))",
            w.dim()
        )));
    }
    Ok(())
}

/// Verified witness for a satisfying input of the `index`-th circuit.
fn back_map(
    w: &GroupWord<F2>,
    set: &crate::pipeline::InequalitySet<F2>,
    index: usize,
    circuit: &ComposedCircuit,
    y: &[bool],
) -> Result<Option<Assignment<F2>>, Error> {
    let z = circuit.decode(y);
    if set.inequalities[index].e.evaluate(&z)?.is_zero() {
        return Ok(None);
    }
    let a = set.witness(index, &z)?;
    Ok(word_evaluate(w, &a)?.is_identity().then_some(a))
}

fn finish(mut report: SolveReport, w: &GroupWord<F2>, opts: &SolveOptions) -> Result<SolveReport, Error> {
    if opts.crosscheck {
        let brute = polsat_bruteforce(w, &HolElement::identity(2), opts.cap)?.is_some();
        report.crosscheck_performed = true;
        report.crosscheck_agrees = Some(brute == (report.answer == Answer::Sat));
    }
    report.witness = report.assignment.as_ref().map(|a| a.iter().map(|g| g.to_string()).collect());
    Ok(report)
}

struct Prepared<'a> {
    circuits: Vec<ComposedCircuit<'a>>,
    max_size: BigUint,
    exact: bool,
    wires: usize,
}

fn prepare(set: &crate::pipeline::InequalitySet<F2>) -> Result<Prepared<'_>, Error> {
    let circuits = set.inequalities.iter().map(|i| ComposedCircuit::new(&i.e)).collect::<Result<Vec<_>, Error>>()?;
    let max_size = circuits.iter().map(|c| c.size.clone()).max().unwrap_or_default();
    let exact = circuits.iter().all(|c| c.size_exact);
    Ok(Prepared { circuits, max_size, exact, wires: 3 * set.n + 2 })
}

fn empty_report(method: &str, h: &GammaHypothesis, p: &Prepared) -> SolveReport {
    SolveReport {
        method: method.into(),
        answer: Answer::Unsat,
        witness: None,
        assignment: None,
        hypothesis: h.label(),
        circuits: p.circuits.len(),
        circuit_inputs: p.wires,
        circuit_size: p.max_size.to_string(),
        circuit_size_exact: p.exact,
        weight_bound: 0,
        points_checked: 0,
        samples: 0,
        samples_capped: false,
        seed: None,
        repeats: 0,
        crosscheck_performed: false,
        crosscheck_agrees: None,
    }
}

/// Checks every circuit input of weight at most `γ⁻¹(|C|)`. Exact when the
/// hypothesis is a valid lower bound.
pub fn polsat_deterministic(w: &GroupWord<F2>, h: &GammaHypothesis, opts: &SolveOptions) -> Result<SolveReport, Error> {
    check_s4(w)?;
    let set = collect_to_inequalities(w, opts.cap)?;
    let prepared = prepare(&set)?;
    let mut report = empty_report("deterministic", h, &prepared);
    for (index, c) in prepared.circuits.iter().enumerate() {
        let bound = h.weight_bound(&c.size, c.num_inputs());
        report.weight_bound = report.weight_bound.max(bound);
        let (hit, checked) = weighted_search(c, bound, opts.cap.saturating_sub(report.points_checked))?;
        report.points_checked += checked;
        if let Some(y) = hit {
            if let Some(a) = back_map(w, &set, index, c, &y)? {
                report.answer = Answer::Sat;
                report.assignment = Some(a);
                break;
            }
        }
    }
    finish(report, w, opts)
}

/// `repeats` independent runs, each drawing `2^{γ⁻¹(|C|)}` uniform inputs
/// per circuit. SAT answers carry verified witnesses; otherwise the answer is
/// probably-UNSAT. The stream of circuit `i` in run `r` is
/// `ChaCha8(seed)` with stream id `r·2^32 + i`.
pub fn polsat_probabilistic(
    w: &GroupWord<F2>,
    h: &GammaHypothesis,
    seed: u64,
    repeats: u32,
    opts: &SolveOptions,
) -> Result<SolveReport, Error> {
    check_s4(w)?;
    let set = collect_to_inequalities(w, opts.cap)?;
    let prepared = prepare(&set)?;
    let mut report = empty_report("probabilistic", h, &prepared);
    report.answer = Answer::ProbablyUnsat;
    report.seed = Some(seed);
    report.repeats = repeats;
    'runs: for run in 0..repeats {
        for (index, c) in prepared.circuits.iter().enumerate() {
            let bound = h.weight_bound(&c.size, c.num_inputs());
            report.weight_bound = report.weight_bound.max(bound);
            let wanted = if bound >= 64 { u64::MAX } else { 1u64 << bound };
            let samples = wanted.min(opts.sample_cap);
            report.samples_capped |= samples < wanted;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream((u64::from(run) << 32) | index as u64);
            let (hit, drawn) = sample_search(c, samples, &mut rng)?;
            report.samples += drawn;
            report.points_checked += drawn;
            if let Some(y) = hit {
                if let Some(a) = back_map(w, &set, index, c, &y)? {
                    report.answer = Answer::Sat;
                    report.assignment = Some(a);
                    break 'runs;
                }
            }
        }
    }
    finish(report, w, opts)
}

/// Direct enumeration of all `24^n` assignments.
pub fn polsat_brute(w: &GroupWord<F2>, opts: &SolveOptions) -> Result<SolveReport, Error> {
    check_s4(w)?;
    let a = polsat_bruteforce(w, &HolElement::identity(2), opts.cap)?;
    let report = SolveReport {
        method: "brute".into(),
        answer: if a.is_some() { Answer::Sat } else { Answer::Unsat },
        witness: None,
        assignment: a,
        hypothesis: "none".into(),
        circuits: 0,
        circuit_inputs: 0,
        circuit_size: "0".into(),
        circuit_size_exact: true,
        weight_bound: 0,
        points_checked: 24u64.saturating_pow(w.num_vars() as u32),
        samples: 0,
        samples_capped: false,
        seed: None,
        repeats: 0,
        crosscheck_performed: false,
        crosscheck_agrees: None,
    };
    finish(report, w, &SolveOptions { crosscheck: false, ..opts.clone() })
}
