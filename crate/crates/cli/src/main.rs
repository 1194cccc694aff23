//! `s4r`: instance conversion, solving and pass verification.
//!
//! Exit codes: 0 pass or decided, 1 fail or counterexample, 2 partial
//! (an enumeration cap was hit), 3 usage error.

mod reduce;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use s4r_core::circuits::circuit_equivalence_bruteforce;
use s4r_core::f4arith::{p1_equivalence_bruteforce, signs};
use s4r_core::formats::{self, Instance, Kind};
use s4r_core::holomorph::{poleqv_bruteforce, polsat_bruteforce, GroupWord, HolElement};
use s4r_core::nearring::{
    default_collapse_target, find_collapse_to_a, find_idempotent_onto_v, ProvenancedWord, NEARRING_CAP,
};
use s4r_core::respoly::restricted_equivalence_bruteforce;
use s4r_core::solvers::{
    polsat_brute, polsat_deterministic, polsat_probabilistic, Answer, GammaHypothesis, SolveOptions,
};
use s4r_core::verify::{verify, Pass, Status};
use s4r_core::{cap_from_env, Error, FiniteField, DEFAULT_CAP, F2, F3};

use reduce::Problem;

const PASS: u8 = 0;
const FAIL: u8 = 1;
const PARTIAL: u8 = 2;
const USAGE: u8 = 3;

/// Default cap on the size of a materialized `reduce` output. Expanded
/// restricted polynomials cost a few hundred bytes per monomial, so the
/// general enumeration default would exhaust memory first.
const REDUCE_OUTPUT_CAP: u64 = 2_000_000;

#[derive(Parser)]
#[command(name = "s4r", version, about = "Reductions around equation solvability over S4")]
struct Cli {
    /// Enumeration cap; overrides S4R_CAP.
    #[arg(long, global = true)]
    cap: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Convert an instance along a chain of reduction passes.
    Reduce {
        #[arg(long, value_enum)]
        from: Problem,
        #[arg(long, value_enum)]
        to: Problem,
        input: PathBuf,
        /// Output instance file; stdout when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Provenance JSON; defaults to `<output>.provenance.json`, or stderr.
        #[arg(long)]
        sidecar: Option<PathBuf>,
    },
    /// Decide PolSat(S4) for a group word (`w = 1`).
    Solve {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "deterministic")]
        method: Method,
        /// `exhaustive` or `sesh:c,h`.
        #[arg(long, default_value = "exhaustive")]
        hypothesis: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        repeats: u32,
        #[arg(long, default_value_t = 1 << 20)]
        sample_cap: u64,
        /// Also run brute force and record agreement.
        #[arg(long)]
        crosscheck: bool,
    },
    /// Run one pass with brute-force oracles on both sides.
    Verify {
        #[arg(long = "pass")]
        pass: String,
        input: PathBuf,
    },
    /// Search for the unary witness words used by the passes.
    SearchWords {
        #[arg(long, value_enum)]
        target: Target,
        #[arg(short, long, default_value_t = 2)]
        q: usize,
        #[arg(short, long, default_value_t = 2)]
        m: usize,
        /// Collapse target as `[v1,v2;a,b,c,d]`; a nonidentity translation.
        #[arg(long)]
        a: Option<String>,
        /// Word file; stdout when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Verification report JSON; stderr when absent.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Decide an instance by exhaustive enumeration.
    Oracle {
        #[arg(long, value_enum)]
        problem: OracleProblem,
        input: PathBuf,
    },
    /// Parse and print an instance in canonical form.
    Normalize { input: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Deterministic,
    Probabilistic,
    Brute,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    #[value(name = "idempotent-V")]
    IdempotentV,
    CollapseA,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleProblem {
    Polsat,
    Poleqv,
    Respoleqv,
    P1,
    Circuit,
}

/// Error with the exit code it maps to.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::CapExceeded { .. } => PARTIAL,
            Error::SearchFailed(_) | Error::DecompositionImpossible | Error::EmptyProduct => FAIL,
            _ => USAGE,
        };
        Failure(code, e.to_string())
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure(USAGE, message.into())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn parse_file(path: &Path) -> Result<Instance, Failure> {
    formats::parse(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize") + "\n"
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let cap = cli.cap.unwrap_or_else(|| cap_from_env(DEFAULT_CAP));
    match cli.cmd {
        Cmd::Reduce { from, to, input, output, sidecar } => {
            let inst = parse_file(&input)?;
            let cap = cli.cap.unwrap_or_else(|| cap_from_env(REDUCE_OUTPUT_CAP));
            let (prov, result) = reduce::reduce(from, to, inst, cap);
            let sidecar =
                sidecar.or_else(|| output.as_ref().map(|o| PathBuf::from(format!("{}.provenance.json", o.display()))));
            match &sidecar {
                Some(p) => fs::write(p, json(&prov)).map_err(|e| usage(format!("{}: {e}", p.display())))?,
                None => eprint!("{}", json(&prov)),
            }
            let out = result?;
            write_out(output.as_deref(), &formats::serialize(&out))?;
            Ok(if prov.bounds_hold { PASS } else { FAIL })
        }
        Cmd::Solve { input, method, hypothesis, seed, repeats, sample_cap, crosscheck } => {
            let w = match parse_file(&input)? {
                Instance::WordF2(w) => w,
                other => return Err(usage(format!("solve takes a group word over S4, got a {}", other.kind()))),
            };
            let h = GammaHypothesis::parse(&hypothesis)?;
            let opts = SolveOptions { cap, sample_cap, crosscheck };
            let report = match method {
                Method::Deterministic => polsat_deterministic(&w, &h, &opts)?,
                Method::Probabilistic => polsat_probabilistic(&w, &h, seed, repeats, &opts)?,
                Method::Brute => polsat_brute(&w, &opts)?,
            };
            print!("{}", json(&report));
            Ok(match (report.crosscheck_agrees, report.answer) {
                (Some(false), _) => FAIL,
                (_, Answer::ProbablyUnsat) => PARTIAL,
                _ => PASS,
            })
        }
        Cmd::Verify { pass, input } => {
            let pass = Pass::parse(&pass)?;
            let inst = parse_file(&input)?;
            let report = verify(&inst, pass, cap)?;
            print!("{}", json(&report));
            Ok(match report.status {
                Status::Pass => PASS,
                Status::Fail => FAIL,
                Status::Partial => PARTIAL,
            })
        }
        Cmd::SearchWords { target, q, m, a, output, report } => {
            let search_cap = usize::try_from(cli.cap.unwrap_or(NEARRING_CAP as u64)).unwrap_or(usize::MAX);
            let (text, rep) = match q {
                2 => search_words::<F2>(target, m, a.as_deref(), search_cap)?,
                3 => search_words::<F3>(target, m, a.as_deref(), search_cap)?,
                _ => return Err(usage(format!("q = {q} is not supported; use 2 or 3"))),
            };
            write_out(output.as_deref(), &text)?;
            match report {
                Some(p) => fs::write(&p, json(&rep)).map_err(|e| usage(format!("{}: {e}", p.display())))?,
                None => eprint!("{}", json(&rep)),
            }
            Ok(if rep.verified { PASS } else { FAIL })
        }
        Cmd::Oracle { problem, input } => {
            let inst = parse_file(&input)?;
            let rep = oracle(problem, &inst, cap)?;
            print!("{}", json(&rep));
            Ok(if rep.yes { PASS } else { FAIL })
        }
        Cmd::Normalize { input } => {
            print!("{}", formats::serialize(&parse_file(&input)?));
            Ok(PASS)
        }
    }
}

#[derive(Serialize)]
struct WordReport {
    target: String,
    q: usize,
    m: usize,
    length: usize,
    collapse_to: Option<String>,
    range_in_v: Option<bool>,
    identity_on_v: bool,
    idempotent: Option<bool>,
    constant_off_v: Option<bool>,
    verified: bool,
}

fn search_words<F: FiniteField>(
    target: Target,
    m: usize,
    a: Option<&str>,
    cap: usize,
) -> Result<(String, WordReport), Failure> {
    let all = HolElement::<F>::all(m)?;
    let on_v = |w: &ProvenancedWord<F>| all.iter().filter(|g| g.is_translation()).all(|g| w.apply(g) == *g);
    let (word, rep) = match target {
        Target::IdempotentV => {
            let e = find_idempotent_onto_v::<F>(m, cap)?;
            let range = all.iter().all(|g| e.apply(g).is_translation());
            let idem = all.iter().all(|g| e.apply(&e.apply(g)) == e.apply(g));
            let fixes = on_v(&e);
            let rep = WordReport {
                target: "idempotent-V".into(),
                q: F::ORDER,
                m,
                length: e.len(),
                collapse_to: None,
                range_in_v: Some(range),
                identity_on_v: fixes,
                idempotent: Some(idem),
                constant_off_v: None,
                verified: range && idem && fixes,
            };
            (e.word().clone(), rep)
        }
        Target::CollapseA => {
            let a = match a {
                Some(text) => HolElement::<F>::parse_literal(text)?,
                None => default_collapse_target::<F>(m),
            };
            if a.dim() != m {
                return Err(usage(format!("collapse target {a} is not in Hol({},{m})", F::ORDER)));
            }
            let f = find_collapse_to_a(&a, cap)?;
            let fixes = on_v(&f);
            let constant = all.iter().filter(|g| !g.is_translation()).all(|g| f.apply(g) == a);
            let rep = WordReport {
                target: "collapse-a".into(),
                q: F::ORDER,
                m,
                length: f.len(),
                collapse_to: Some(a.to_string()),
                range_in_v: None,
                identity_on_v: fixes,
                idempotent: None,
                constant_off_v: Some(constant),
                verified: fixes && constant,
            };
            (f.word().clone(), rep)
        }
    };
    let word: GroupWord<F> = word.with_num_vars(1)?;
    Ok((formats::serialize_group_word(&word), rep))
}

#[derive(Serialize)]
struct OracleReport {
    problem: String,
    decision: String,
    /// Sat for PolSat; valid for the equivalence problems.
    yes: bool,
    witness: Option<Vec<String>>,
}

fn strings<T: ToString>(xs: &[T]) -> Vec<String> {
    xs.iter().map(ToString::to_string).collect()
}

fn oracle(problem: OracleProblem, inst: &Instance, cap: u64) -> Result<OracleReport, Failure> {
    let (name, expected) = match problem {
        OracleProblem::Polsat => ("polsat", Kind::GroupWord),
        OracleProblem::Poleqv => ("poleqv", Kind::GroupWord),
        OracleProblem::Respoleqv => ("respoleqv", Kind::RestrictedPoly),
        OracleProblem::P1 => ("p1", Kind::P1),
        OracleProblem::Circuit => ("circuit", Kind::Circuit),
    };
    if inst.kind() != expected {
        return Err(usage(format!("oracle {name} takes a {expected} file, got a {}", inst.kind())));
    }
    // witness: a solution for PolSat, a counterexample otherwise
    let witness: Option<Vec<String>> =
        match (problem, inst) {
            (OracleProblem::Polsat, Instance::WordF2(w)) => {
                polsat_bruteforce(w, &HolElement::identity(w.dim()), cap)?.map(|a| strings(&a))
            }
            (OracleProblem::Polsat, Instance::WordF3(w)) => {
                polsat_bruteforce(w, &HolElement::identity(w.dim()), cap)?.map(|a| strings(&a))
            }
            (OracleProblem::Poleqv, Instance::WordF2(w)) => poleqv_bruteforce(w, cap)?.map(|a| strings(&a)),
            (OracleProblem::Poleqv, Instance::WordF3(w)) => poleqv_bruteforce(w, cap)?.map(|a| strings(&a)),
            (OracleProblem::Respoleqv, Instance::PolyF2(p)) => {
                restricted_equivalence_bruteforce(p, cap)?.map(|z| strings(&z))
            }
            (OracleProblem::Respoleqv, Instance::PolyF3(p)) => {
                restricted_equivalence_bruteforce(p, cap)?.map(|z| strings(&z))
            }
            (OracleProblem::P1, Instance::P1(p)) => p1_equivalence_bruteforce(p, cap)?
                .map(|a| a.iter().map(|&s| format!("{:+}", signs::to_i8(s))).collect()),
            (OracleProblem::Circuit, Instance::Circuit(c)) => circuit_equivalence_bruteforce(c, true, cap)?
                .map(|y| y.iter().map(|&b| u8::from(b).to_string()).collect()),
            _ => unreachable!("kinds checked above"),
        };
    let polsat = matches!(problem, OracleProblem::Polsat);
    let yes = witness.is_some() == polsat;
    let decision = match (polsat, yes) {
        (true, true) => "sat",
        (true, false) => "unsat",
        (false, true) => "valid",
        (false, false) => "not-valid",
    };
    Ok(OracleReport { problem: name.into(), decision: decision.into(), yes, witness })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { PASS });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, message)) => {
            let _ = std::io::stdout().flush();
            eprintln!("s4r: {message}");
            ExitCode::from(code)
        }
    }
}
