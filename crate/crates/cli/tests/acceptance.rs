//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit when any
//! criterion fails. Every criterion runs even after an earlier failure.

mod common;

use std::collections::{BTreeMap, HashSet};
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use s4r_core::bounds::{self, BoundCheck};
use s4r_core::f4arith::{f_encode, rho, sigma, star_mul, F4Pair, P1Instance};
use s4r_core::formats::{self, Instance};
use s4r_core::holomorph::{hol_product, polsat_bruteforce, short_subproduct, word_evaluate, word_inverse};
use s4r_core::nearring::{find_collapse_to_a, find_idempotent_onto_v, NEARRING_CAP};
use s4r_core::pipeline::{combination_check, combine_inequalities};
use s4r_core::respoly::{
    conjunction_gadget, expr_equivalence_bruteforce, restricted_equivalence_bruteforce, rp_expand_product,
    rp_substitute, zero_indicator, RpExpr,
};
use s4r_core::solvers::{polsat_deterministic, polsat_probabilistic, Answer, GammaHypothesis, SolveOptions};
use s4r_core::verify::{verify, Pass, VerifyReport};
use s4r_core::{
    gl_enumerate, invertible_sum, FiniteField, GroupWord, HolElement, Letter, Matrix, RestrictedPolynomial, F2, F3, F4,
    Z3,
};

const CAP: u64 = 100_000_000;

/// Independent runs per seeded call; each run fails with probability below 1/2.
const REPEATS: u32 = 20;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn m2(text: &str) -> Matrix<F2> {
    Matrix::parse_literal(text).unwrap()
}

// ---------------------------------------------------------------- 1

fn algebra_identities() -> Outcome {
    let s = sigma();
    let i = Matrix::<F2>::identity(2);
    let a = F4::ALPHA.to_matrix();
    ensure(s * s == i, || "σ² ≠ I".into())?;
    ensure(s * a * s == a * a, || "σασ ≠ α²".into())?;
    ensure(F4::ONE + F4::ALPHA + F4::ALPHA2 == F4::ZERO, || "1 ⊕ α ⊕ α² ≠ 0 in F4".into())?;
    ensure((i + a + a * a).is_zero(), || "I + α + α² ≠ 0 as matrices".into())?;
    let decompositions = [
        ("[1,0;0,0]", "[0,1;1,0]", "[1,1;1,0]"),
        ("[1,0;0,1]", "[0,1;1,1]", "[1,1;1,0]"),
        ("[1,0,0;0,1,0;0,0,1]", "[1,0,1;0,0,1;1,1,1]", "[0,0,1;0,1,1;1,1,0]"),
        ("[0,0;0,0]", "[1,0;0,1]", "[1,0;0,1]"),
        ("[0,0,0;0,0,0;0,0,0]", "[1,0,0;0,1,0;0,0,1]", "[1,0,0;0,1,0;0,0,1]"),
    ];
    for (target, b, c) in decompositions {
        let (t, b, c) = (m2(target), m2(b), m2(c));
        ensure(b.is_invertible() && c.is_invertible(), || format!("{target}: a summand is singular"))?;
        ensure(b + c == t, || format!("{b} + {c} ≠ {target}"))?;
    }
    Ok(format!("σ, α laws and {} displayed decompositions exact", decompositions.len()))
}

// ---------------------------------------------------------------- 2

fn check_sums<F: FiniteField>(m: usize) -> Result<usize, String> {
    let all = Matrix::<F>::all(m);
    for a in &all {
        let (b, c) = invertible_sum(a).map_err(|e| format!("{a}: {e}"))?;
        ensure(b.is_invertible() && c.is_invertible() && b + c == *a, || format!("bad decomposition of {a}"))?;
    }
    Ok(all.len())
}

fn invertible_sums() -> Outcome {
    let counts = [check_sums::<F2>(2)?, check_sums::<F3>(2)?, check_sums::<F2>(3)?];
    ensure(counts == [16, 81, 512], || format!("matrix counts {counts:?}"))?;
    let one = Matrix::<F2>::identity(1);
    ensure(invertible_sum(&one).is_err(), || "(1) over F2 must not decompose".into())?;
    ensure(invertible_sum(&Matrix::<F3>::identity(1)).is_ok(), || "(1) over F3 decomposes".into())?;
    Ok("16 + 81 + 512 matrices decomposed; (1) over F2 rejected".into())
}

// ---------------------------------------------------------------- 3

fn rho_and_f() -> Outcome {
    let all = F4Pair::all();
    let mut pairs = 0;
    for &a in &all {
        for &b in &all {
            ensure(rho(a.add(b)) == rho(a) + rho(b), || format!("ρ not additive at {a:?}, {b:?}"))?;
            ensure(rho(star_mul(a, b)) == rho(a) * rho(b), || format!("ρ not multiplicative at {a:?}, {b:?}"))?;
            pairs += 1;
        }
    }
    let signs = [Z3::new(1), Z3::new(2)];
    let domain: Vec<(Z3, Z3)> = signs.iter().flat_map(|&s| (0..3).map(move |t| (s, Z3::new(t)))).collect();
    let image: HashSet<Matrix<F2>> = domain.iter().map(|&(s, t)| rho(f_encode(s, t))).collect();
    let gl: HashSet<Matrix<F2>> = gl_enumerate::<F2>(2).unwrap().into_iter().collect();
    ensure(image.len() == 6 && image == gl, || format!("im(ρ∘f) has {} elements", image.len()))?;
    let mut products = 0;
    for &(r, u) in &domain {
        for &(s, v) in &domain {
            ensure(star_mul(f_encode(r, u), f_encode(s, v)) == f_encode(r * s, s * u + v), || {
                format!("f({r},{u}) ⋆ f({s},{v}) ≠ f(rs, su + v)")
            })?;
            products += 1;
        }
    }
    Ok(format!("{pairs} pairs, |im(ρ∘f)| = 6 = |GL2(F2)|, {products} products"))
}

// ---------------------------------------------------------------- 4

fn word_machinery() -> Outcome {
    let text = "kind: group-word\nq: 2\nm: 2\nn: 2\nx1 x2 (1 2) x1' x2'\n";
    let Instance::WordF2(w) = formats::parse(text).map_err(|e| e.to_string())? else {
        return Err("intro word did not parse as a word over S4".into());
    };
    ensure(polsat_bruteforce(&w, &HolElement::identity(2), 24 * 24).map_err(|e| e.to_string())?.is_none(), || {
        "x1 x2 (1 2) = x2 x1 reported satisfiable".into()
    })?;
    let group = HolElement::<F2>::all(2).unwrap();
    let mut r = common::rng(40);
    let mut longest = 0;
    for _ in 0..100 {
        let gs: Vec<HolElement<F2>> = (0..60).map(|_| *group.choose(&mut r).unwrap()).collect();
        let target = hol_product(&gs).unwrap();
        let idx = short_subproduct(&gs, &target).map_err(|e| e.to_string())?;
        ensure(idx.windows(2).all(|p| p[0] < p[1]), || "indices not increasing".into())?;
        ensure(!idx.is_empty() && idx.len() <= 24, || format!("subproduct of length {}", idx.len()))?;
        let sub: Vec<HolElement<F2>> = idx.iter().map(|&i| gs[i]).collect();
        ensure(hol_product(&sub).unwrap() == target, || "subproduct differs from the product".into())?;
        longest = longest.max(idx.len());
    }
    Ok(format!("intro word UNSAT over 24^2; 100 subproducts, longest {longest}"))
}

// ---------------------------------------------------------------- 5

fn witness_words() -> Outcome {
    let all = HolElement::<F2>::all(2).unwrap();
    let e = find_idempotent_onto_v::<F2>(2, NEARRING_CAP).map_err(|e| e.to_string())?;
    for g in &all {
        let eg = e.apply(g);
        ensure(eg.is_translation(), || format!("e({g}) = {eg} is outside V"))?;
        ensure(e.apply(&eg) == eg, || format!("e∘e ≠ e at {g}"))?;
        if g.is_translation() {
            ensure(eg == *g, || format!("e moves {g} ∈ V"))?;
        }
    }
    let a = HolElement::<F2>::parse_literal("[0,1;1,0,0,1]").unwrap();
    let f = find_collapse_to_a(&a, NEARRING_CAP).map_err(|e| e.to_string())?;
    for g in &all {
        let expected = if g.is_translation() { *g } else { a };
        ensure(f.apply(g) == expected, || format!("f({g}) = {}, expected {expected}", f.apply(g)))?;
    }
    Ok(format!("|e| = {}, |f| = {}, checked on all 24 inputs", e.len(), f.len()))
}

// ---------------------------------------------------------------- 6 and 7

/// Bound checks gathered across every constructed object, keyed by family.
#[derive(Default)]
struct Bounds {
    families: BTreeMap<&'static str, (usize, Vec<String>)>,
}

impl Bounds {
    fn record(&mut self, family: &'static str, check: &BoundCheck) {
        let entry = self.families.entry(family).or_default();
        entry.0 += 1;
        if check.violated() && entry.1.len() < 3 {
            entry.1.push(format!("{}: {} > {}", check.name, check.actual, check.bound));
        } else if check.violated() {
            entry.1.push(String::new());
        }
    }

    fn record_all(&mut self, family: &'static str, checks: &[BoundCheck]) {
        for c in checks {
            self.record(family, c);
        }
    }
}

/// Tally of one biconditional: instances, yes/no split, disagreements.
#[derive(Default)]
struct Tally {
    runs: usize,
    yes: usize,
    failures: Vec<String>,
}

impl Tally {
    fn add(&mut self, yes: Result<bool, String>) {
        self.runs += 1;
        match yes {
            Ok(true) => self.yes += 1,
            Ok(false) => {}
            Err(e) => self.failures.push(e),
        }
    }

    fn summary(&self, name: &str) -> String {
        format!(
            "{name}: {}/{} agree ({} yes, {} no)",
            self.runs - self.failures.len(),
            self.runs,
            self.yes,
            self.runs - self.yes
        )
    }
}

/// Agreement, witness and pointwise checks of a report; bounds are left to
/// criterion 7. Returns the left side's yes/no decision.
fn agreement(report: &VerifyReport, what: &str) -> Result<bool, String> {
    if report.agree != Some(true)
        || report.witness_checked == Some(false)
        || report.pointwise_mismatches.unwrap_or(0) > 0
    {
        return Err(format!(
            "{what}: agree {:?}, witness {:?}, mismatches {:?}, left {:?}, right {:?}",
            report.agree, report.witness_checked, report.pointwise_mismatches, report.left.error, report.right.error
        ));
    }
    let d = report.left.decision.as_deref().unwrap_or("");
    Ok(d == "sat" || d == "valid")
}

fn run_pass(inst: Instance, pass: Pass) -> Result<VerifyReport, String> {
    let text = formats::serialize(&inst);
    verify(&inst, pass, CAP).map_err(|e| format!("{}: {e}\n{text}", pass.name()))
}

fn directed_words() -> Vec<GroupWord<F2>> {
    ["x1", "x1 x1", "x1 x1 (1 2)", "x1 x1 (1 2 3 4)", "x1 (1 2) x1 (1 2)", "x1 (1 2 3)", "x1 x2 x1 x2 (1 3)"]
        .iter()
        .map(|body| {
            let n = if body.contains("x2") { 2 } else { 1 };
            match formats::parse(&format!("kind: group-word\nn: {n}\n{body}\n")).unwrap() {
                Instance::WordF2(w) => w,
                _ => unreachable!(),
            }
        })
        .collect()
}

/// `w = 1` with the constant `w(a)⁻¹` appended, so `a` is a solution.
fn planted<F: FiniteField>(w: &GroupWord<F>, a: &[HolElement<F>]) -> GroupWord<F> {
    let mut out = w.clone();
    out.push(Letter::Const(word_evaluate(w, a).unwrap().inverse()));
    out
}

/// `w · w⁻¹`, which is 1 under every assignment.
fn trivial<F: FiniteField>(w: &GroupWord<F>) -> GroupWord<F> {
    w.concat(&word_inverse(w))
}

fn random_point<F: FiniteField>(r: &mut ChaCha8Rng, n: usize) -> Vec<HolElement<F>> {
    let all = HolElement::<F>::all(2).unwrap();
    (0..n).map(|_| *all.choose(r).unwrap()).collect()
}

fn collected_inequalities(bounds: &mut Bounds) -> Result<String, String> {
    let mut r = common::rng(61);
    let mut t = Tally::default();
    let mut words = directed_words();
    for i in 0..100 {
        let n = 1 + i % 2;
        let len = r.gen_range(1..=8);
        words.push(common::word::<F2>(&mut r, 2, n, len));
    }
    for w in words {
        let report = run_pass(Instance::WordF2(w), Pass::PolsatRespoleqv)?;
        bounds.record_all("inequality count and length", &report.bounds);
        t.add(agreement(&report, "polsat-respoleqv"));
    }
    finish_tally(t, "PolSat iff some e_v ≠ 0")
}

fn finish_tally(t: Tally, name: &str) -> Result<String, String> {
    match t.failures.first() {
        None if t.runs >= 100 => Ok(t.summary(name)),
        None => Err(format!("{} (fewer than 100 instances)", t.summary(name))),
        Some(first) => Err(format!("{}; first: {first}", t.summary(name))),
    }
}

fn combination(bounds: &mut Bounds) -> Result<String, String> {
    let mut r = common::rng(62);
    let mut t = Tally::default();
    for i in 0..120 {
        let k = 1 + i % 2;
        let n = r.gen_range(0..=1);
        let ps: Vec<RestrictedPolynomial<F2>> = (0..k)
            .map(|_| {
                let terms = r.gen_range(1..=3);
                let p = common::poly::<F2>(&mut r, 2, n, terms, 3);
                if r.gen_bool(0.5) {
                    common::vanishing(&p)
                } else {
                    p
                }
            })
            .collect();
        let exprs: Vec<RpExpr<F2>> = ps.iter().cloned().map(RpExpr::from).collect();
        let u = combine_inequalities(2, n, &exprs).map_err(|e| e.to_string())?;
        bounds.record("combination size 2k+2Σ|p_i|", &combination_check(&exprs, &u));
        let mut left = false;
        for p in &ps {
            left |= restricted_equivalence_bruteforce(p, CAP).map_err(|e| e.to_string())?.is_some();
        }
        let right = expr_equivalence_bruteforce(&u, CAP).map_err(|e| e.to_string())?;
        let right_ok = match &right {
            Some(z) => !u.evaluate(z).map_err(|e| e.to_string())?.is_zero(),
            None => true,
        };
        t.add(if left == right.is_some() && right_ok {
            Ok(left)
        } else {
            Err(format!("k = {k}, n = {n}: some p_i ≠ 0 is {left}, u ≠ 0 is {}", right.is_some()))
        });
    }
    finish_tally(t, "some p_i ≠ 0 iff u ≠ 0 over 6^(n+2k)")
}

fn random_poly_mixed(r: &mut ChaCha8Rng, n: usize) -> RestrictedPolynomial<F2> {
    let terms = r.gen_range(1..=3);
    let p = common::poly::<F2>(r, 2, n, terms, 3);
    if r.gen_bool(0.5) {
        common::vanishing(&p)
    } else {
        p
    }
}

fn poly_edge_cases() -> Vec<RestrictedPolynomial<F2>> {
    ["0", "[1,0;0,1]", "x1 + x1", "x1 + [1,0;0,1]", "x1 x2 + x2 x1", "x1 [0,1;1,0] + [0,1;1,0] x1"]
        .iter()
        .map(|body| {
            let n = if body.contains("x2") { 2 } else { 1 };
            match formats::parse(&format!("kind: restricted-poly\nn: {n}\n{body}\n")).unwrap() {
                Instance::PolyF2(p) => p,
                _ => unreachable!(),
            }
        })
        .collect()
}

fn to_poleqv(bounds: &mut Bounds) -> Result<String, String> {
    let mut r = common::rng(63);
    let mut t = Tally::default();
    let mut polys = poly_edge_cases();
    for i in 0..100 {
        polys.push(random_poly_mixed(&mut r, 1 + i % 2));
    }
    for p in polys {
        let report = run_pass(Instance::PolyF2(p), Pass::RespoleqvPoleqv)?;
        bounds.record_all("PolEqv word length", &report.bounds);
        t.add(agreement(&report, "respoleqv-poleqv"));
    }
    finish_tally(t, "RespolEqv iff PolEqv over 24^(n+1)")
}

fn copoleqv_to_polsat() -> Result<String, String> {
    let mut r = common::rng(64);
    let mut t = Tally::default();
    let mut words: Vec<GroupWord<F2>> = directed_words();
    for i in 0..100 {
        let n = 1 + i % 2;
        let len = r.gen_range(1..=5);
        let w = common::word::<F2>(&mut r, 2, n, len);
        words.push(if i % 3 == 0 { trivial(&w) } else { w });
    }
    for w in words {
        let report = run_pass(Instance::WordF2(w), Pass::CopoleqvPolsat)?;
        t.add(agreement(&report, "copoleqv-polsat"));
    }
    finish_tally(t, "not PolEqv iff PolSat")
}

fn respoleqv_to_p1() -> Result<String, String> {
    let mut r = common::rng(65);
    let mut t = Tally::default();
    let mut polys = poly_edge_cases();
    for i in 0..100 {
        polys.push(random_poly_mixed(&mut r, 1 + i % 2));
    }
    for p in polys {
        let report = run_pass(Instance::PolyF2(p), Pass::Restop1)?;
        t.add(agreement(&report, "restop1"));
    }
    finish_tally(t, "RespolEqv iff P1, 2^(3n+1) vs 6^n")
}

fn p1_mixed(r: &mut ChaCha8Rng, n: usize, max_k: usize) -> P1Instance {
    let terms = r.gen_range(1..=3);
    if r.gen_bool(0.5) {
        let k = r.gen_range(1..=max_k);
        common::p1(r, n, k, terms)
    } else if max_k >= 3 && r.gen_bool(0.5) {
        common::p1_triple(r, n, terms)
    } else {
        common::p1_pair(r, n, terms)
    }
}

fn p1_to_respoleqv() -> Result<String, String> {
    let mut r = common::rng(66);
    let mut t = Tally::default();
    for i in 0..110 {
        let n = 1 + i % 2;
        let report = run_pass(Instance::P1(p1_mixed(&mut r, n, 3)), Pass::Back2)?;
        t.add(agreement(&report, "back2"));
    }
    finish_tally(t, "P1 iff RespolEqv (k ≤ 3)")
}

fn p1_pass(seed: u64, pass: Pass, max_n: usize, name: &str) -> Result<String, String> {
    let mut r = common::rng(seed);
    let mut t = Tally::default();
    for i in 0..110 {
        let n = 1 + i % max_n;
        let report = run_pass(Instance::P1(p1_mixed(&mut r, n, 3)), pass)?;
        t.add(agreement(&report, pass.name()));
    }
    finish_tally(t, name)
}

fn circuit_to_p1() -> Result<String, String> {
    let mut r = common::rng(69);
    let mut t = Tally::default();
    for i in 0..110 {
        let n = 1 + i % 4;
        let c =
            if i % 2 == 0 { common::circuit(&mut r, &[2, 3, 2], n, 3) } else { common::valid_circuit(&mut r, n, 3) };
        let report = run_pass(Instance::Circuit(c), Pass::Back1)?;
        t.add(agreement(&report, "back1"));
    }
    finish_tally(t, "circuit ≡ 1 iff P1 (n ≤ 4)")
}

fn biconditionals(bounds: &mut Bounds) -> Outcome {
    let parts: Vec<Result<String, String>> = vec![
        collected_inequalities(bounds),
        combination(bounds),
        to_poleqv(bounds),
        copoleqv_to_polsat(),
        respoleqv_to_p1(),
        p1_to_respoleqv(),
        p1_pass(67, Pass::Mod32, 10, "Mod3∘Mod2 pointwise (n ≤ 10)"),
        p1_pass(68, Pass::Qc, 8, "P1 iff CC[2,3,2] ≡ 1 (n ≤ 8)"),
        circuit_to_p1(),
    ];
    let mut lines = Vec::new();
    let mut failed = false;
    for r in parts {
        match r {
            Ok(s) => lines.push(s),
            Err(s) => {
                failed = true;
                lines.push(format!("FAILED {s}"));
            }
        }
    }
    let text = lines.join("\n      ");
    if failed {
        Err(text)
    } else {
        Ok(text)
    }
}

fn product_and_composition(bounds: &mut Bounds) {
    let mut r = common::rng(71);
    for _ in 0..100 {
        let k = r.gen_range(1..=3);
        let ps: Vec<RestrictedPolynomial<F2>> = (0..k)
            .map(|_| {
                let terms = r.gen_range(1..=3);
                common::poly::<F2>(&mut r, 2, 2, terms, 3)
            })
            .collect();
        let out = rp_expand_product(&ps).unwrap();
        let lengths: Vec<usize> = ps.iter().map(RestrictedPolynomial::len).collect();
        bounds.record(
            "product length",
            &BoundCheck::new("product", &BigUint::from(out.len()), Some(bounds::product_bound(&lengths))),
        );

        let (qt, pt) = (r.gen_range(1..=2), r.gen_range(1..=2));
        let q = common::poly::<F2>(&mut r, 2, 1, qt, 3);
        let p = common::poly::<F2>(&mut r, 2, 2, pt, 2);
        let out = rp_substitute(&q, &p).unwrap();
        bounds.record(
            "composition length",
            &BoundCheck::new("composition", &BigUint::from(out.len()), bounds::composition_bound(q.len(), p.len())),
        );

        let c = zero_indicator::<F2>(2).unwrap().len();
        let (p1, p2) = (common::poly::<F2>(&mut r, 2, 2, 2, 3), common::poly::<F2>(&mut r, 2, 2, 2, 3));
        let g = conjunction_gadget(RpExpr::from(p1.clone()), RpExpr::from(p2.clone())).unwrap();
        bounds.record(
            "conjunction gadget length",
            &BoundCheck::new("conjunction", &g.len(), bounds::conjunction_bound(c, p1.len(), p2.len())),
        );
    }
}

fn bound_report(bounds: &Bounds) -> Outcome {
    let mut lines = Vec::new();
    let mut violated = false;
    for (family, (checked, violations)) in &bounds.families {
        if violations.is_empty() {
            lines.push(format!("{family}: {checked} checked, 0 violations"));
        } else {
            violated = true;
            let examples: Vec<&String> = violations.iter().filter(|v| !v.is_empty()).collect();
            lines.push(format!(
                "{family}: {checked} checked, {} VIOLATIONS, e.g. {}",
                violations.len(),
                examples.iter().map(|s| s.as_str()).collect::<Vec<_>>().join("; ")
            ));
        }
    }
    let text = lines.join("\n      ");
    if violated {
        Err(text)
    } else {
        Ok(text)
    }
}

// ---------------------------------------------------------------- 8

fn solvers() -> Outcome {
    let mut r = common::rng(80);
    let opts = SolveOptions { cap: CAP, sample_cap: 1 << 20, crosscheck: false };
    let (mut sat, mut unsat) = (0, 0);
    for i in 0..50 {
        let n = 1 + i % 2;
        let len = r.gen_range(1..=6);
        let w = common::word::<F2>(&mut r, 2, n, len);
        let brute = polsat_bruteforce(&w, &HolElement::identity(2), CAP).map_err(|e| e.to_string())?.is_some();
        let rep = polsat_deterministic(&w, &GammaHypothesis::Exhaustive, &opts).map_err(|e| e.to_string())?;
        let det = rep.answer == Answer::Sat;
        ensure(det == brute, || format!("deterministic {:?} vs brute force {brute} on {w}", rep.answer))?;
        if let Some(a) = &rep.assignment {
            ensure(word_evaluate(&w, a).unwrap().is_identity(), || format!("bad witness for {w}"))?;
        }
        if det {
            sat += 1
        } else {
            unsat += 1
        }
    }

    // one-sided error: no SAT answer on unsatisfiable words, and planted
    // solutions are found in at least 19 of 20 seeds
    let mut candidates = directed_words();
    for i in 0..200 {
        let len = r.gen_range(2..=6);
        candidates.push(common::word::<F2>(&mut r, 2, 1 + i % 2, len));
    }
    let unsat_words: Vec<GroupWord<F2>> = candidates
        .into_iter()
        .filter(|w| polsat_bruteforce(w, &HolElement::identity(2), CAP).unwrap().is_none())
        .take(20)
        .collect();
    let mut false_sat = 0;
    for w in &unsat_words {
        for seed in 0..20 {
            let rep = polsat_probabilistic(w, &GammaHypothesis::Exhaustive, seed, REPEATS, &opts)
                .map_err(|e| e.to_string())?;
            false_sat += usize::from(rep.answer == Answer::Sat);
        }
    }
    ensure(false_sat == 0, || format!("{false_sat} false SAT answers"))?;
    let mut worst = 20;
    for i in 0..10 {
        let n = 1 + i % 2;
        let len = r.gen_range(1..=5);
        let w = planted(&common::word::<F2>(&mut r, 2, n, len), &random_point::<F2>(&mut r, n));
        let mut found = 0;
        for seed in 0..20 {
            let rep = polsat_probabilistic(&w, &GammaHypothesis::Exhaustive, seed, REPEATS, &opts)
                .map_err(|e| e.to_string())?;
            if rep.answer == Answer::Sat {
                let a = rep.assignment.as_ref().ok_or("SAT without a witness")?;
                ensure(word_evaluate(&w, a).unwrap().is_identity(), || format!("false witness for {w}"))?;
                found += 1;
            }
        }
        worst = worst.min(found);
    }
    ensure(worst >= 19, || format!("a planted instance was found in only {worst}/20 seeds"))?;
    Ok(format!(
        "deterministic = brute force on 50 words ({sat} sat, {unsat} unsat); 0 false SAT on {} unsat words x 20 seeds; planted found in >= {worst}/20",
        unsat_words.len()
    ))
}

// ---------------------------------------------------------------- 9

fn s4r(args: &[&str], env_cap: Option<&str>) -> i32 {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_s4r"));
    cmd.args(args).env_remove("S4R_CAP");
    if let Some(c) = env_cap {
        cmd.env("S4R_CAP", c);
    }
    cmd.output().expect("run s4r").status.code().unwrap_or(-1)
}

fn round_trips() -> Result<usize, String> {
    let mut r = common::rng(90);
    let mut total = 0;
    for format in 0..4 {
        for i in 0..1000 {
            let (a, b, c) = (r.gen_range(0..4), r.gen_range(0..12), r.gen_range(1..6));
            let m = if i % 3 == 2 { 3 } else { 2 };
            let inst = match format {
                0 if i % 2 == 0 => Instance::WordF2(common::word::<F2>(&mut r, 2, a, b)),
                0 => Instance::WordF3(common::word::<F3>(&mut r, 2, a, b)),
                1 if i % 2 == 0 => Instance::PolyF2(common::poly::<F2>(&mut r, m, a, b % 5, 4)),
                1 => Instance::PolyF3(common::poly::<F3>(&mut r, 2, a, b % 5, 4)),
                2 => Instance::P1(common::p1(&mut r, a + 1, 1 + b % 3, c % 4)),
                _ => Instance::Circuit(common::circuit(&mut r, if i % 2 == 0 { &[2, 3, 2] } else { &[3, 2] }, c, 3)),
            };
            let text = formats::serialize(&inst);
            let back = formats::parse(&text).map_err(|e| format!("{e}\n{text}"))?;
            ensure(formats::serialize(&back) == text, || format!("not a fixed point:\n{text}"))?;
            ensure(formats::normalize(&text).map_err(|e| e.to_string())? == text, || {
                format!("normalize moved:\n{text}")
            })?;
            total += 1;
        }
    }
    Ok(total)
}

fn cli_contract() -> Outcome {
    let total = round_trips()?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let file = |name: &str, text: &str| -> String {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_owned()
    };
    let sat = file("sat.txt", "kind: group-word\nn: 1\nx1 x1\n");
    let unsat = file("unsat.txt", "kind: group-word\nn: 1\nx1 x1 (1 2)\n");
    let bad = file("bad.txt", "kind: group-word\nn: 1\nx1 [0,0;1,1,1,1]\n");
    let p1 = file("p1.txt", "kind: p1\nn: 1\nx1\nx1\n");
    let out = dir.path().join("out.txt");
    let cases: Vec<(Vec<&str>, Option<&str>, i32)> = vec![
        (vec!["--help"], None, 0),
        (vec![], None, 3),
        (vec!["bogus"], None, 3),
        (vec!["normalize", &bad], None, 3),
        (vec!["normalize", &sat], None, 0),
        (vec!["oracle", "--problem", "polsat", &sat], None, 0),
        (vec!["oracle", "--problem", "polsat", &unsat], None, 1),
        (vec!["oracle", "--problem", "p1", &sat], None, 3),
        (vec!["solve", &unsat, "--crosscheck"], None, 0),
        (vec!["solve", &sat, "--method", "probabilistic", "--seed", "3", "--repeats", "4"], None, 0),
        (vec!["verify", "--pass", "qc", &p1], None, 0),
        (vec!["verify", "--pass", "qc", &sat], None, 3),
        (vec!["verify", "--pass", "polsat-respoleqv", &sat], Some("10"), 2),
        (vec!["--cap", "10", "verify", "--pass", "polsat-respoleqv", &sat], None, 2),
        (vec!["reduce", "--from", "p1", "--to", "circuit", &p1, "-o", out.to_str().unwrap()], None, 0),
        (vec!["reduce", "--from", "polsat-s4", "--to", "respoleqv", &sat], Some("10"), 2),
    ];
    for (args, env, expected) in &cases {
        let got = s4r(args, *env);
        ensure(got == *expected, || format!("s4r {} exited {got}, expected {expected}", args.join(" ")))?;
    }
    ensure(Path::new(&format!("{}.provenance.json", out.display())).exists(), || "no provenance sidecar".into())?;
    Ok(format!("{total} instances round-trip byte-identically; {} exit-code cases", cases.len()))
}

// ---------------------------------------------------------------- driver

fn run(id: usize, name: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let result = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
        Err(format!("panicked: {}", msg.unwrap_or_default()))
    });
    let elapsed = start.elapsed();
    let (ok, detail) = match result {
        Ok(d) if elapsed <= budget => (true, d),
        Ok(d) => (false, format!("{d} [over the {budget:?} budget]")),
        Err(d) => (false, d),
    };
    println!("{} [{id}] {name} ({:.2}s)\n      {detail}", if ok { "PASS" } else { "FAIL" }, elapsed.as_secs_f64());
    ok
}

fn main() -> ExitCode {
    panic::set_hook(Box::new(|_| {}));
    let mut bounds = Bounds::default();
    let results = [
        run(1, "algebra identities", Duration::from_secs(1), algebra_identities),
        run(2, "invertible sums", Duration::from_secs(5), invertible_sums),
        run(3, "ρ and f on F4²", Duration::from_secs(1), rho_and_f),
        run(4, "word machinery", Duration::from_secs(30), word_machinery),
        run(5, "witness words e and f", Duration::from_secs(60), witness_words),
        run(6, "reduction biconditionals", Duration::from_secs(600), || biconditionals(&mut bounds)),
        run(7, "length and size bounds", Duration::from_secs(60), || {
            product_and_composition(&mut bounds);
            bound_report(&bounds)
        }),
        run(8, "solvers", Duration::from_secs(300), solvers),
        run(9, "CLI round-trip and exit codes", Duration::from_secs(120), cli_contract),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
