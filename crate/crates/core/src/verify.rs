//! Runs one reduction pass with a brute-force oracle on each side.
//!
//! Every pass is phrased so that the left oracle finds a witness iff the
//! right oracle does: a satisfying assignment, a point where a polynomial is
//! nonzero, or an input where a circuit outputs 0. A report is `pass` only
//! when both searches ran to completion, agree, any reconstructed witness
//! checks out and no claimed size bound is violated. A side that hits the
//! enumeration cap makes the report `partial`.

use serde::Serialize;

use crate::bounds::BoundCheck;
use crate::circuits::{self, bits, circuit_equivalence_bruteforce, CCCircuit};
use crate::f4arith::{self, p1_equivalence_bruteforce, signs, P1Instance};
use crate::field::{FiniteField, F2, Z3};
use crate::formats::{Instance, Kind};
use crate::holomorph::{poleqv_bruteforce, polsat_bruteforce, word_evaluate, GroupWord, HolElement};
use crate::matrix::Matrix;
use crate::pipeline::{self, collect_to_inequalities, combination_check, combine_inequalities};
use crate::respoly::{expr_equivalence_bruteforce, restricted_equivalence_bruteforce, RestrictedPolynomial, RpExpr};
use crate::Error;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Pass {
    /// Word to the inequality set `E`, one `e_v` at a time.
    PolsatRespoleqv,
    /// `E` to the single disjunction `u`.
    Combine,
    RespoleqvPoleqv,
    CopoleqvPolsat,
    Restop1,
    Back2,
    /// One `CC[3,2]` circuit per polynomial, compared pointwise.
    Mod32,
    Qc,
    Back1,
}

impl Pass {
    pub const ALL: [Pass; 9] = [
        Pass::PolsatRespoleqv,
        Pass::Combine,
        Pass::RespoleqvPoleqv,
        Pass::CopoleqvPolsat,
        Pass::Restop1,
        Pass::Back2,
        Pass::Mod32,
        Pass::Qc,
        Pass::Back1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Pass::PolsatRespoleqv => "polsat-respoleqv",
            Pass::Combine => "combine",
            Pass::RespoleqvPoleqv => "respoleqv-poleqv",
            Pass::CopoleqvPolsat => "copoleqv-polsat",
            Pass::Restop1 => "restop1",
            Pass::Back2 => "back2",
            Pass::Mod32 => "mod32",
            Pass::Qc => "qc",
            Pass::Back1 => "back1",
        }
    }

    /// Accepts `polsat-respoleqv`, `polsat->respoleqv` and `polsat→respoleqv`.
    pub fn parse(text: &str) -> Result<Pass, Error> {
        let t = text.trim().to_ascii_lowercase().replace("->", "-").replace(['→', '_'], "-");
        Pass::ALL
            .into_iter()
            .find(|p| p.name() == t)
            .ok_or_else(|| Error::Syntax(format!("unknown pass {text:?}; one of {}", Pass::names().join(", "))))
    }

    pub fn names() -> Vec<&'static str> {
        Pass::ALL.iter().map(|p| p.name()).collect()
    }

    /// Kind of the input instance.
    pub fn input_kind(self) -> Kind {
        match self {
            Pass::PolsatRespoleqv | Pass::Combine | Pass::CopoleqvPolsat => Kind::GroupWord,
            Pass::RespoleqvPoleqv | Pass::Restop1 => Kind::RestrictedPoly,
            Pass::Back2 | Pass::Mod32 | Pass::Qc => Kind::P1,
            Pass::Back1 => Kind::Circuit,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Partial,
}

#[derive(Clone, Debug, Serialize)]
pub struct SideReport {
    pub problem: String,
    pub instance: String,
    /// `None` when the search did not finish.
    pub decision: Option<String>,
    pub witness: Option<Vec<String>>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub pass: String,
    pub status: Status,
    pub left: SideReport,
    pub right: SideReport,
    pub agree: Option<bool>,
    /// The left-side witness rebuilt from the right-side one, when the pass
    /// has such a map.
    pub witness_checked: Option<bool>,
    /// Points where a pointwise contract fails, for passes that have one.
    pub pointwise_mismatches: Option<u64>,
    pub bounds: Vec<BoundCheck>,
}

/// One side of a pass: `Some(found)` after a complete search, `None` after
/// hitting the cap.
struct Side {
    report: SideReport,
    found: Option<bool>,
}

/// Records a search outcome. Cap overruns become an unfinished side; other
/// errors propagate.
fn side<W>(
    problem: &str,
    instance: String,
    [yes, no]: [&str; 2],
    r: Result<Option<W>, Error>,
    show: impl Fn(&W) -> Vec<String>,
) -> Result<(Side, Option<W>), Error> {
    let mut report = SideReport { problem: problem.into(), instance, decision: None, witness: None, error: None };
    match r {
        Ok(found) => {
            report.decision = Some(if found.is_some() { yes } else { no }.to_string());
            report.witness = found.as_ref().map(&show);
            Ok((Side { report, found: Some(found.is_some()) }, found))
        }
        Err(e @ Error::CapExceeded { .. }) => {
            report.error = Some(e.to_string());
            Ok((Side { report, found: None }, None))
        }
        Err(e) => Err(e),
    }
}

const SAT: [&str; 2] = ["sat", "unsat"];
const VALID: [&str; 2] = ["not-valid", "valid"];

fn finish(
    pass: Pass,
    left: Side,
    right: Side,
    witness_checked: Option<bool>,
    pointwise_mismatches: Option<u64>,
    bounds: Vec<BoundCheck>,
) -> VerifyReport {
    let agree = match (left.found, right.found) {
        (Some(a), Some(b)) => Some(a == b),
        _ => None,
    };
    let status = if agree == Some(false)
        || witness_checked == Some(false)
        || pointwise_mismatches.is_some_and(|k| k > 0)
        || bounds.iter().any(BoundCheck::violated)
    {
        Status::Fail
    } else if agree.is_none() {
        Status::Partial
    } else {
        Status::Pass
    };
    VerifyReport {
        pass: pass.name().into(),
        status,
        left: left.report,
        right: right.report,
        agree,
        witness_checked,
        pointwise_mismatches,
        bounds,
    }
}

/// A side that never ran because constructing it hit the cap.
fn skipped(problem: &str, e: &Error) -> Side {
    Side {
        report: SideReport {
            problem: problem.into(),
            instance: "not constructed".into(),
            decision: None,
            witness: None,
            error: Some(e.to_string()),
        },
        found: None,
    }
}

fn show_all<T: std::fmt::Display>(xs: &[T]) -> Vec<String> {
    xs.iter().map(ToString::to_string).collect()
}

fn show_signs(a: &[Z3]) -> Vec<String> {
    a.iter().map(|&s| format!("{:+}", signs::to_i8(s))).collect()
}

fn show_bits(y: &[bool]) -> Vec<String> {
    y.iter().map(|&b| u8::from(b).to_string()).collect()
}

fn word_desc<F: FiniteField>(w: &GroupWord<F>) -> String {
    format!("word over Hol({},{}) with n = {}, length {}", F::ORDER, w.dim(), w.num_vars(), w.len())
}

fn poly_desc<F: FiniteField>(p: &RestrictedPolynomial<F>) -> String {
    format!("restricted polynomial over Mat_{}(F_{}) with n = {}, length {}", p.dim(), F::ORDER, p.num_vars(), p.len())
}

fn p1_desc(p: &P1Instance) -> String {
    format!("F4 instance with n = {}, {} exponent polynomials, size {}", p.num_vars(), p.polys().len(), p.size())
}

fn circuit_desc(c: &CCCircuit) -> String {
    let shape: Vec<String> = c.shape().iter().map(|m| m.to_string()).collect();
    format!("CC[{}] circuit with {} inputs, {} gates", shape.join(","), c.num_inputs(), c.size())
}

fn gl_problem<F: FiniteField>(m: usize, what: &str) -> String {
    format!("{what} over Mat_{m}(F_{})", F::ORDER)
}

fn cap_only<T>(r: Result<T, Error>) -> Result<Result<T, Error>, Error> {
    match r {
        Ok(x) => Ok(Ok(x)),
        Err(e @ Error::CapExceeded { .. }) => Ok(Err(e)),
        Err(e) => Err(e),
    }
}

fn polsat_respoleqv<F: FiniteField>(w: &GroupWord<F>, cap: u64) -> Result<VerifyReport, Error> {
    let m = w.dim();
    let identity = HolElement::identity(m);
    let (left, _) = side(
        &format!("PolSat(Hol({},{m}))", F::ORDER),
        word_desc(w),
        SAT,
        polsat_bruteforce(w, &identity, cap),
        |a| show_all(a),
    )?;
    let problem = gl_problem::<F>(m, "some e_v of E nonzero");
    let set = match cap_only(collect_to_inequalities(w, cap))? {
        Ok(s) => s,
        Err(e) => return Ok(finish(Pass::PolsatRespoleqv, left, skipped(&problem, &e), None, None, vec![])),
    };
    let desc = format!("|E| = {} expressions in n = {} variables", set.len(), set.n);
    let (right, hit) = side(&problem, desc, VALID, set.find_nonzero(cap), |(i, z)| {
        let mut out = vec![format!("e[{i}]")];
        out.extend(show_all(z));
        out
    })?;
    let witness_checked = match &hit {
        Some((i, z)) => {
            let a = set.witness(*i, z)?;
            Some(word_evaluate(w, &a)? == identity)
        }
        None => None,
    };
    Ok(finish(Pass::PolsatRespoleqv, left, right, witness_checked, None, set.bound_checks()?))
}

fn combine<F: FiniteField>(w: &GroupWord<F>, cap: u64) -> Result<VerifyReport, Error> {
    let m = w.dim();
    let left_problem = gl_problem::<F>(m, "some e_v of E nonzero");
    let set = match cap_only(collect_to_inequalities(w, cap))? {
        Ok(s) => s,
        Err(e) => {
            let right = skipped(&gl_problem::<F>(m, "u nonzero"), &e);
            return Ok(finish(Pass::Combine, skipped(&left_problem, &e), right, None, None, vec![]));
        }
    };
    let es: Vec<RpExpr<F>> = set.inequalities.iter().map(|i| i.e.clone()).collect();
    let u = combine_inequalities(m, set.n, &es)?;
    let desc = format!("|E| = {} expressions in n = {} variables", set.len(), set.n);
    let (left, _) = side(&left_problem, desc, VALID, set.find_nonzero(cap), |(i, z)| {
        let mut out = vec![format!("e[{i}]")];
        out.extend(show_all(z));
        out
    })?;
    let desc = format!("u in {} variables, length {}", u.num_vars(), u.len());
    let (right, _) =
        side(&gl_problem::<F>(m, "u nonzero"), desc, VALID, expr_equivalence_bruteforce(&u, cap), |z| show_all(z))?;
    Ok(finish(Pass::Combine, left, right, None, None, vec![combination_check(&es, &u)]))
}

fn respoleqv_poleqv<F: FiniteField>(p: &RestrictedPolynomial<F>, cap: u64) -> Result<VerifyReport, Error> {
    let m = p.dim();
    let (left, _) =
        side(&gl_problem::<F>(m, "RespolEqv"), poly_desc(p), VALID, restricted_equivalence_bruteforce(p, cap), |z| {
            show_all(z)
        })?;
    let w = pipeline::respoleqv_to_poleqv(p)?;
    let problem = format!("PolEqv(Hol({},{m}))", F::ORDER);
    let (right, _) = side(&problem, word_desc(&w), VALID, poleqv_bruteforce(&w, cap), |a| show_all(a))?;
    Ok(finish(Pass::RespoleqvPoleqv, left, right, None, None, vec![pipeline::poleqv_word_check(p, &w)?]))
}

fn copoleqv_polsat<F: FiniteField>(w: &GroupWord<F>, cap: u64) -> Result<VerifyReport, Error> {
    let m = w.dim();
    let (left, _) =
        side(&format!("PolEqv(Hol({},{m}))", F::ORDER), word_desc(w), VALID, poleqv_bruteforce(w, cap), |a| {
            show_all(a)
        })?;
    let sat = pipeline::copoleqv_to_polsat(w)?;
    let problem = format!("PolSat(Hol({},{m})) with target {}", F::ORDER, sat.target);
    let (right, hit) =
        side(&problem, word_desc(&sat.word), SAT, polsat_bruteforce(&sat.word, &sat.target, cap), |a| show_all(a))?;
    // the first n values of a solution are a non-identity point of w
    let witness_checked = match &hit {
        Some(a) => Some(word_evaluate(w, &a[..w.num_vars()])? != HolElement::identity(m)),
        None => None,
    };
    Ok(finish(Pass::CopoleqvPolsat, left, right, witness_checked, None, vec![]))
}

fn restop1(p: &RestrictedPolynomial<F2>, cap: u64) -> Result<VerifyReport, Error> {
    if p.dim() != 2 {
        return Err(Error::ParameterMismatch(format!("restop1 needs Mat_2(F_2), got m = {}", p.dim())));
    }
    let (left, _) =
        side("RespolEqv over Mat_2(F_2)", poly_desc(p), VALID, restricted_equivalence_bruteforce(p, cap), |z| {
            show_all(z)
        })?;
    let inst = f4arith::respoly_to_p1(p)?;
    let (right, _) =
        side("F4 equivalence", p1_desc(&inst), VALID, p1_equivalence_bruteforce(&inst, cap), |a| show_signs(a))?;
    Ok(finish(Pass::Restop1, left, right, None, None, vec![]))
}

fn back2(inst: &P1Instance, cap: u64) -> Result<VerifyReport, Error> {
    let (left, _) =
        side("F4 equivalence", p1_desc(inst), VALID, p1_equivalence_bruteforce(inst, cap), |a| show_signs(a))?;
    let s = f4arith::p1_to_respoly(inst)?;
    let (right, _) = side(
        "RespolEqv over Mat_2(F_2)",
        poly_desc(&s),
        VALID,
        restricted_equivalence_bruteforce(&s, cap),
        |z: &Vec<Matrix<F2>>| show_all(z),
    )?;
    Ok(finish(Pass::Back2, left, right, None, None, vec![]))
}

/// Points of `{0,1}^n` where `c(y)` disagrees with `expect(y)`.
fn pointwise(n: usize, cap: u64, mut check: impl FnMut(&[bool]) -> Result<bool, Error>) -> Result<Option<u64>, Error> {
    if n >= 64 || (1u64 << n) > cap {
        return Ok(None);
    }
    let mut bad = 0;
    for code in 0..1u64 << n {
        if !check(&bits(n, code))? {
            bad += 1;
        }
    }
    Ok(Some(bad))
}

fn sign_point(y: &[bool]) -> Vec<Z3> {
    y.iter().map(|&b| signs::from_bit(b)).collect()
}

fn mod32(inst: &P1Instance, cap: u64) -> Result<VerifyReport, Error> {
    let n = inst.num_vars();
    let cs = inst.polys().iter().map(circuits::poly_to_mod32).collect::<Result<Vec<_>, _>>()?;
    // the left side searches for a point where some p_i is nonzero
    let search = |ps: &dyn Fn(&[bool]) -> Result<bool, Error>| -> Result<Option<Vec<bool>>, Error> {
        if n >= 64 || (1u64 << n) > cap {
            return Err(Error::CapExceeded { needed: format!("2^{n}"), cap });
        }
        for code in 0..1u64 << n {
            let y = bits(n, code);
            if ps(&y)? {
                return Ok(Some(y));
            }
        }
        Ok(None)
    };
    let polys_nonzero = |y: &[bool]| -> Result<bool, Error> {
        let a = sign_point(y);
        for p in inst.polys() {
            if !num_traits::Zero::is_zero(&p.evaluate(&a)?) {
                return Ok(true);
            }
        }
        Ok(false)
    };
    let circuits_zero = |y: &[bool]| -> Result<bool, Error> {
        for c in &cs {
            if !c.evaluate(y)? {
                return Ok(true);
            }
        }
        Ok(false)
    };
    let (left, _) =
        side("some p_i nonzero at a sign point", p1_desc(inst), VALID, search(&polys_nonzero), |y| show_bits(y))?;
    let gates: usize = cs.iter().map(CCCircuit::size).sum();
    let desc = format!("{} CC[3,2] circuits with {n} inputs, {gates} gates", cs.len());
    let (right, _) = side("some C_i outputs 0", desc, VALID, search(&circuits_zero), |y| show_bits(y))?;
    let mismatches = pointwise(n, cap, |y| {
        let a = sign_point(y);
        for (p, c) in inst.polys().iter().zip(&cs) {
            if c.evaluate(y)? != num_traits::Zero::is_zero(&p.evaluate(&a)?) {
                return Ok(false);
            }
        }
        Ok(true)
    })?;
    Ok(finish(Pass::Mod32, left, right, None, mismatches, vec![]))
}

fn qc(inst: &P1Instance, cap: u64) -> Result<VerifyReport, Error> {
    let (left, _) =
        side("F4 equivalence", p1_desc(inst), VALID, p1_equivalence_bruteforce(inst, cap), |a| show_signs(a))?;
    let c = circuits::p1_to_circuit(inst)?;
    let (right, _) = side(
        "circuit equivalence to 1",
        circuit_desc(&c),
        VALID,
        circuit_equivalence_bruteforce(&c, true, cap),
        |y| show_bits(y),
    )?;
    let n = inst.num_vars();
    let mismatches = pointwise(n, cap, |y| {
        let zero = num_traits::Zero::is_zero(&inst.evaluate(&sign_point(y))?);
        let mut both = true;
        for b in [false, true] {
            let mut by = vec![b];
            by.extend_from_slice(y);
            both &= c.evaluate(&by)?;
        }
        Ok(zero == both)
    })?;
    Ok(finish(Pass::Qc, left, right, None, mismatches, vec![]))
}

fn back1(c: &CCCircuit, cap: u64) -> Result<VerifyReport, Error> {
    let (left, _) =
        side("circuit equivalence to 1", circuit_desc(c), VALID, circuit_equivalence_bruteforce(c, true, cap), |y| {
            show_bits(y)
        })?;
    let inst = circuits::circuit_to_p1(c)?;
    let (right, _) =
        side("F4 equivalence", p1_desc(&inst), VALID, p1_equivalence_bruteforce(&inst, cap), |a| show_signs(a))?;
    let mismatches = pointwise(c.num_inputs(), cap, |y| {
        Ok(c.evaluate(y)? == num_traits::Zero::is_zero(&inst.evaluate(&sign_point(y))?))
    })?;
    Ok(finish(Pass::Back1, left, right, None, mismatches, vec![]))
}

/// Runs `pass` on `inst`. `cap` bounds every enumeration.
pub fn verify(inst: &Instance, pass: Pass, cap: u64) -> Result<VerifyReport, Error> {
    match (pass, inst) {
        (Pass::PolsatRespoleqv, Instance::WordF2(w)) => polsat_respoleqv(w, cap),
        (Pass::PolsatRespoleqv, Instance::WordF3(w)) => polsat_respoleqv(w, cap),
        (Pass::Combine, Instance::WordF2(w)) => combine(w, cap),
        (Pass::Combine, Instance::WordF3(w)) => combine(w, cap),
        (Pass::CopoleqvPolsat, Instance::WordF2(w)) => copoleqv_polsat(w, cap),
        (Pass::CopoleqvPolsat, Instance::WordF3(w)) => copoleqv_polsat(w, cap),
        (Pass::RespoleqvPoleqv, Instance::PolyF2(p)) => respoleqv_poleqv(p, cap),
        (Pass::RespoleqvPoleqv, Instance::PolyF3(p)) => respoleqv_poleqv(p, cap),
        (Pass::Restop1, Instance::PolyF2(p)) => restop1(p, cap),
        (Pass::Back2, Instance::P1(p)) => back2(p, cap),
        (Pass::Mod32, Instance::P1(p)) => mod32(p, cap),
        (Pass::Qc, Instance::P1(p)) => qc(p, cap),
        (Pass::Back1, Instance::Circuit(c)) => back1(c, cap),
        (pass, inst) => Err(Error::ParameterMismatch(format!(
            "pass {} takes a {} instance{}, got {}",
            pass.name(),
            pass.input_kind(),
            if pass == Pass::Restop1 { " over F_2" } else { "" },
            inst.kind()
        ))),
    }
}

/// Bound checks that failed.
pub fn violations(report: &VerifyReport) -> Vec<&BoundCheck> {
    report.bounds.iter().filter(|b| b.violated()).collect()
}
