//! `reduce`: chains the reduction passes between problem encodings.

use serde::Serialize;

use s4r_core::bounds::BoundCheck;
use s4r_core::circuits::{circuit_to_p1, p1_to_circuit};
use s4r_core::f4arith::{p1_to_respoly, respoly_to_p1};
use s4r_core::formats::{Instance, Kind};
use s4r_core::holomorph::{GroupWord, Letter};
use s4r_core::pipeline::{copoleqv_to_polsat, poleqv_word_check, polsat_to_respoleqv, respoleqv_to_poleqv};
use s4r_core::{Error, FiniteField};

#[derive(Clone, Copy, PartialEq, Eq, Debug, clap::ValueEnum)]
pub enum Problem {
    /// `w = 1` solvable; a group word.
    PolsatS4,
    /// `w = 1` an identity; a group word.
    PoleqvS4,
    /// Restricted polynomial identically zero.
    Respoleqv,
    /// F4 power sum identically zero.
    P1,
    /// Circuit identically 1.
    Circuit,
}

impl Problem {
    pub fn name(self) -> &'static str {
        match self {
            Problem::PolsatS4 => "polsat-s4",
            Problem::PoleqvS4 => "poleqv-s4",
            Problem::Respoleqv => "respoleqv",
            Problem::P1 => "p1",
            Problem::Circuit => "circuit",
        }
    }

    pub fn kind(self) -> Kind {
        match self {
            Problem::PolsatS4 | Problem::PoleqvS4 => Kind::GroupWord,
            Problem::Respoleqv => Kind::RestrictedPoly,
            Problem::P1 => Kind::P1,
            Problem::Circuit => Kind::Circuit,
        }
    }
}

/// One pass: source, target, name, and whether yes-instances map to
/// no-instances.
const EDGES: [(Problem, Problem, &str, bool); 7] = [
    (Problem::PolsatS4, Problem::Respoleqv, "polsat-respoleqv", true),
    (Problem::Respoleqv, Problem::PoleqvS4, "respoleqv-poleqv", false),
    (Problem::PoleqvS4, Problem::PolsatS4, "copoleqv-polsat", true),
    (Problem::Respoleqv, Problem::P1, "restop1", false),
    (Problem::P1, Problem::Respoleqv, "back2", false),
    (Problem::P1, Problem::Circuit, "qc", false),
    (Problem::Circuit, Problem::P1, "back1", false),
];

/// Shortest chain of passes, ties broken by edge order.
fn route(from: Problem, to: Problem) -> Option<Vec<usize>> {
    let mut paths = vec![(from, Vec::new())];
    let mut seen = vec![from];
    while !paths.is_empty() {
        if let Some((_, p)) = paths.iter().find(|(at, _)| *at == to) {
            return Some(p.clone());
        }
        let mut next = Vec::new();
        for (at, path) in &paths {
            for (k, e) in EDGES.iter().enumerate() {
                if e.0 == *at && !seen.contains(&e.1) {
                    seen.push(e.1);
                    let mut p = path.clone();
                    p.push(k);
                    next.push((e.1, p));
                }
            }
        }
        paths = next;
    }
    None
}

#[derive(Clone, Debug, Serialize)]
pub struct StepRecord {
    pub pass: String,
    pub from: String,
    pub to: String,
    pub negates: bool,
    pub input_size: String,
    pub output_size: Option<String>,
    /// Members of the indexing set `T` of `E`, one `v_1 … v_n` per line.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub support_set: Option<Vec<String>>,
    pub bounds: Vec<BoundCheck>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub from: String,
    pub to: String,
    /// True when the output is a yes-instance iff the input is a no-instance.
    pub negated: bool,
    pub steps: Vec<StepRecord>,
    pub complete: bool,
    pub bounds_hold: bool,
}

fn size(inst: &Instance) -> String {
    match inst {
        Instance::WordF2(w) => format!("word length {}", w.len()),
        Instance::WordF3(w) => format!("word length {}", w.len()),
        Instance::PolyF2(p) => format!("polynomial length {}", p.len()),
        Instance::PolyF3(p) => format!("polynomial length {}", p.len()),
        Instance::P1(p) => format!("{} exponent polynomials, size {}", p.polys().len(), p.size()),
        Instance::Circuit(c) => format!("{} gates", c.size()),
    }
}

fn to_respoleqv<F: FiniteField>(
    w: &GroupWord<F>,
    cap: u64,
    rec: &mut StepRecord,
) -> Result<s4r_core::respoly::RestrictedPolynomial<F>, Error> {
    let r = polsat_to_respoleqv(w, cap)?;
    let summary = r.summary()?;
    rec.support_set = Some(summary.support_set);
    rec.bounds = summary.bounds;
    rec.output_size =
        Some(format!("polynomial length {} in {} variables", summary.output_length, summary.output_variables));
    r.u.expand(cap)
}

/// `w' · a⁻¹ = 1` for the produced equation `w' = a`.
fn to_polsat<F: FiniteField>(w: &GroupWord<F>) -> Result<GroupWord<F>, Error> {
    let sat = copoleqv_to_polsat(w)?;
    let mut out = sat.word;
    out.push(Letter::Const(sat.target.inverse()));
    Ok(out)
}

fn apply(pass: &str, inst: &Instance, cap: u64, rec: &mut StepRecord) -> Result<Instance, Error> {
    use Instance::*;
    let mismatch = || {
        Error::ParameterMismatch(format!("pass {pass} cannot take a {} instance with these parameters", inst.kind()))
    };
    Ok(match (pass, inst) {
        ("polsat-respoleqv", WordF2(w)) => PolyF2(to_respoleqv(w, cap, rec)?),
        ("polsat-respoleqv", WordF3(w)) => PolyF3(to_respoleqv(w, cap, rec)?),
        ("respoleqv-poleqv", PolyF2(p)) => {
            let w = respoleqv_to_poleqv(p)?;
            rec.bounds.push(poleqv_word_check(p, &w)?);
            WordF2(w)
        }
        ("respoleqv-poleqv", PolyF3(p)) => {
            let w = respoleqv_to_poleqv(p)?;
            rec.bounds.push(poleqv_word_check(p, &w)?);
            WordF3(w)
        }
        ("copoleqv-polsat", WordF2(w)) => WordF2(to_polsat(w)?),
        ("copoleqv-polsat", WordF3(w)) => WordF3(to_polsat(w)?),
        ("restop1", PolyF2(p)) if p.dim() == 2 => P1(respoly_to_p1(p)?),
        ("back2", P1(p)) => PolyF2(p1_to_respoly(p)?),
        ("qc", P1(p)) => Circuit(p1_to_circuit(p)?),
        ("back1", Circuit(c)) => P1(circuit_to_p1(c)?),
        _ => return Err(mismatch()),
    })
}

/// Runs the chain. On error the provenance so far is returned alongside.
pub fn reduce(from: Problem, to: Problem, input: Instance, cap: u64) -> (Provenance, Result<Instance, Error>) {
    let mut prov = Provenance {
        from: from.name().into(),
        to: to.name().into(),
        negated: false,
        steps: Vec::new(),
        complete: false,
        bounds_hold: true,
    };
    if input.kind() != from.kind() {
        let e =
            Error::ParameterMismatch(format!("{} expects a {} file, got {}", from.name(), from.kind(), input.kind()));
        return (prov, Err(e));
    }
    let Some(path) = route(from, to) else {
        let e = Error::Unsupported(format!("no chain of passes from {} to {}", from.name(), to.name()));
        return (prov, Err(e));
    };
    let mut current = input;
    for k in path {
        let (a, b, pass, negates) = EDGES[k];
        let mut rec = StepRecord {
            pass: pass.into(),
            from: a.name().into(),
            to: b.name().into(),
            negates,
            input_size: size(&current),
            output_size: None,
            support_set: None,
            bounds: Vec::new(),
            error: None,
        };
        let out = apply(pass, &current, cap, &mut rec);
        prov.bounds_hold &= !rec.bounds.iter().any(BoundCheck::violated);
        match out {
            Ok(next) => {
                rec.output_size = Some(size(&next));
                prov.negated ^= negates;
                prov.steps.push(rec);
                current = next;
            }
            Err(e) => {
                rec.error = Some(e.to_string());
                prov.steps.push(rec);
                return (prov, Err(e));
            }
        }
    }
    prov.complete = true;
    (prov, Ok(current))
}
