//! Plain-text instance files.
//!
//! A file is a block of `key: value` header lines (`kind`, `q`, `m`, `n`,
//! `shape`, `inputs`) followed by a body; `q` and `m` default to 2. Lines starting with `#` and blank
//! lines are skipped everywhere. Serialization is canonical, so
//! `serialize(parse(t))` is the normal form of `t` and parsing it back gives
//! the same instance.
//!
//! Bodies:
//!
//! * `group-word`: whitespace-separated letters `x3`, `[v1,v2;a,b,c,d]`, or
//!   cycles `(1 2)(3 4)` when `(q,m) = (2,2)`. A trailing `'` inverts the
//!   letter; `x3'` is stored as `x3` repeated `|G| − 1` times. `1` is the
//!   empty word.
//! * `restricted-poly`: monomials joined by `+`, letters `x1` or matrix
//!   literals `[a,b;c,d]`; `0` is the empty sum.
//! * `p1`: one polynomial per line, `c*x1^e1*x2^e2 + …`; a missing
//!   coefficient is 1, a missing exponent is 1, `x1^` has exponent 0.
//! * `circuit`: `(modN c (term coeff child) …)` with `(in k)` leaves.

use std::fmt;
use std::str::FromStr;

use crate::circuits::{CCCircuit, Node};
use crate::f4arith::{P1Instance, Z3Poly};
use crate::field::{FiniteField, F2, F3, Z3};
use crate::holomorph::{GroupWord, HolElement, Letter, PermS4};
use crate::matrix::Matrix;
use crate::respoly::{Atom, Monomial, RestrictedPolynomial};
use crate::Error;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Kind {
    GroupWord,
    RestrictedPoly,
    P1,
    Circuit,
}

impl Kind {
    pub const ALL: [Kind; 4] = [Kind::GroupWord, Kind::RestrictedPoly, Kind::P1, Kind::Circuit];

    pub fn name(self) -> &'static str {
        match self {
            Kind::GroupWord => "group-word",
            Kind::RestrictedPoly => "restricted-poly",
            Kind::P1 => "p1",
            Kind::Circuit => "circuit",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::syntax(format!("unknown instance kind {s:?}")))
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Header {
    pub kind: Kind,
    pub q: Option<usize>,
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub shape: Option<Vec<u32>>,
    pub inputs: Option<usize>,
}

/// A body line: 1-based line number and text.
type Line<'a> = (usize, &'a str);

fn perr(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

/// Re-anchors an error from a literal parser at the token position.
fn at(line: usize, column: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Syntax(m) => perr(line, column, m),
        e @ Error::Parse { .. } => e,
        e => perr(line, column, e.to_string()),
    }
}

fn is_skipped(line: &str) -> bool {
    let t = line.trim();
    t.is_empty() || t.starts_with('#')
}

/// Splits `text` into its header and the remaining non-comment lines.
pub fn split_header(text: &str) -> Result<(Header, Vec<Line<'_>>), Error> {
    let mut kind = None;
    let mut h = Header { kind: Kind::GroupWord, q: None, m: None, n: None, shape: None, inputs: None };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| !is_skipped(l)).peekable();
    while let Some(&(no, line)) = lines.peek() {
        let Some((key, value)) = line.split_once(':') else { break };
        let key = key.trim();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_lowercase()) {
            break;
        }
        lines.next();
        let vcol = line.find(':').unwrap_or(0) + 2 + (value.len() - value.trim_start().len());
        let value = value.trim();
        let number =
            || value.parse::<usize>().map_err(|_| perr(no, vcol, format!("`{key}` expects a number, got {value:?}")));
        let dup = |set: bool| if set { Err(perr(no, 1, format!("duplicate header key `{key}`"))) } else { Ok(()) };
        match key {
            "kind" => {
                dup(kind.is_some())?;
                kind = Some(value.parse::<Kind>().map_err(at(no, vcol))?);
            }
            "q" => {
                dup(h.q.is_some())?;
                h.q = Some(number()?);
            }
            "m" => {
                dup(h.m.is_some())?;
                h.m = Some(number()?);
            }
            "n" => {
                dup(h.n.is_some())?;
                h.n = Some(number()?);
            }
            "inputs" => {
                dup(h.inputs.is_some())?;
                h.inputs = Some(number()?);
            }
            "shape" => {
                dup(h.shape.is_some())?;
                let shape = value
                    .split(',')
                    .map(|s| s.trim().parse::<u32>().ok().filter(|&m| m >= 2))
                    .collect::<Option<Vec<u32>>>()
                    .filter(|s| !s.is_empty())
                    .ok_or_else(|| perr(no, vcol, format!("bad shape {value:?}; expected moduli like 2,3,2")))?;
                h.shape = Some(shape);
            }
            _ => return Err(perr(no, 1, format!("unknown header key `{key}`"))),
        }
    }
    h.kind = kind.ok_or_else(|| perr(lines.peek().map_or(1, |l| l.0), 1, "missing `kind:` header line"))?;
    Ok((h, lines.collect()))
}

fn require(value: Option<usize>, key: &str, kind: Kind) -> Result<usize, Error> {
    value.ok_or_else(|| Error::ParameterMismatch(format!("a {kind} file needs a `{key}:` header line")))
}

fn check_q<F: FiniteField>(h: &Header) -> Result<(), Error> {
    match h.q {
        Some(q) if q != F::ORDER => {
            Err(Error::ParameterMismatch(format!("header q = {q}, parser field has order {}", F::ORDER)))
        }
        _ => Ok(()),
    }
}

fn expect_kind(h: &Header, kind: Kind) -> Result<(), Error> {
    if h.kind == kind {
        Ok(())
    } else {
        Err(Error::ParameterMismatch(format!("expected a {kind} file, found {}", h.kind)))
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
struct Token {
    line: usize,
    col: usize,
    text: String,
    /// Odd number of trailing `'`.
    inverse: bool,
}

/// Tokens of a word or restricted-polynomial body. `[…]` and runs of
/// adjacent `(…)` groups are single tokens; `+` stands alone.
fn word_tokens(lines: &[Line<'_>]) -> Result<Vec<Token>, Error> {
    let mut out = Vec::new();
    for &(no, line) in lines {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            let start = i;
            match c {
                '[' => {
                    let close =
                        chars[i..].iter().position(|&d| d == ']').ok_or_else(|| perr(no, start + 1, "unclosed `[`"))?;
                    i += close + 1;
                }
                '(' => {
                    while i < chars.len() && chars[i] == '(' {
                        let close =
                            chars[i..].iter().position(|&d| d == ')').ok_or_else(|| perr(no, i + 1, "unclosed `(`"))?;
                        i += close + 1;
                    }
                }
                '+' => i += 1,
                '\'' | ']' | ')' => return Err(perr(no, start + 1, format!("unexpected `{c}`"))),
                _ => {
                    while i < chars.len() && !chars[i].is_whitespace() && !"[(+')]".contains(chars[i]) {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let mut primes = 0;
            while i < chars.len() && chars[i] == '\'' {
                primes += 1;
                i += 1;
            }
            if primes > 0 && text == "+" {
                return Err(perr(no, start + 2, "`'` after `+`"));
            }
            out.push(Token { line: no, col: start + 1, text, inverse: primes % 2 == 1 });
        }
    }
    Ok(out)
}

fn parse_var(tok: &Token) -> Result<Option<usize>, Error> {
    let Some(digits) = tok.text.strip_prefix('x') else { return Ok(None) };
    match digits.parse::<usize>() {
        Ok(k) if k >= 1 && !digits.starts_with('+') => Ok(Some(k - 1)),
        _ => Err(perr(tok.line, tok.col, format!("bad variable {:?}; variables are x1, x2, …", tok.text))),
    }
}

fn perm_to_hol<F: FiniteField>(p: &PermS4) -> Result<HolElement<F>, Error> {
    let g = p.to_hol();
    let lift = |xs: Vec<F2>| xs.into_iter().map(|x| F::from_index(x.index())).collect::<Vec<F>>();
    let v = crate::matrix::Vector::from_slice(&lift(g.vector().as_slice().to_vec()))?;
    let entries = lift(g.matrix().row_major());
    let rows: Vec<Vec<F>> = entries.chunks(2).map(|c| c.to_vec()).collect();
    HolElement::new(v, Matrix::from_rows(&rows)?)
}

pub fn parse_group_word<F: FiniteField>(text: &str) -> Result<GroupWord<F>, Error> {
    let (h, body) = split_header(text)?;
    expect_kind(&h, Kind::GroupWord)?;
    check_q::<F>(&h)?;
    let m = h.m.unwrap_or(2);
    let inverse_len = HolElement::<F>::group_order(m) - 1;
    let mut letters = Vec::new();
    for tok in word_tokens(&body)? {
        let (line, col) = (tok.line, tok.col);
        if tok.text == "1" {
            continue;
        }
        if let Some(i) = parse_var(&tok)? {
            let reps = if tok.inverse { inverse_len } else { 1 };
            letters.extend(std::iter::repeat_n(Letter::Var(i), reps));
            continue;
        }
        let g = if tok.text.starts_with('[') {
            HolElement::<F>::parse_literal(&tok.text).map_err(at(line, col))?
        } else if tok.text.starts_with('(') {
            if F::ORDER != 2 || m != 2 {
                return Err(perr(line, col, "cycle notation needs q = 2, m = 2"));
            }
            perm_to_hol(&PermS4::parse_cycles(&tok.text).map_err(at(line, col))?)?
        } else {
            return Err(perr(line, col, format!("unexpected token {:?}", tok.text)));
        };
        if g.dim() != m {
            return Err(perr(line, col, format!("constant of dimension {}, header m = {m}", g.dim())));
        }
        letters.push(Letter::Const(if tok.inverse { g.inverse() } else { g }));
    }
    match h.n {
        Some(n) => GroupWord::new(m, n, letters),
        None => GroupWord::from_letters(m, letters),
    }
}

pub fn serialize_group_word<F: FiniteField>(w: &GroupWord<F>) -> String {
    let body = if w.is_empty() { "1".to_string() } else { w.to_string() };
    format!("kind: group-word\nq: {}\nm: {}\nn: {}\n{body}\n", F::ORDER, w.dim(), w.num_vars())
}

pub fn parse_restricted_poly<F: FiniteField>(text: &str) -> Result<RestrictedPolynomial<F>, Error> {
    let (h, body) = split_header(text)?;
    expect_kind(&h, Kind::RestrictedPoly)?;
    check_q::<F>(&h)?;
    let m = h.m.unwrap_or(2);
    let tokens = word_tokens(&body)?;
    if tokens.len() == 1 && tokens[0].text == "0" {
        return RestrictedPolynomial::new(m, h.n.unwrap_or(0), vec![]);
    }
    let mut monomials = Vec::new();
    let mut atoms: Vec<Atom<F>> = Vec::new();
    let mut last = (body.first().map_or(1, |l| l.0), 1);
    for tok in tokens.iter().map(Some).chain([None]) {
        let plus = tok.is_none_or(|t| t.text == "+");
        if plus {
            if atoms.is_empty() {
                let (line, col) = tok.map_or(last, |t| (t.line, t.col));
                return Err(perr(line, col, "empty monomial"));
            }
            let pos = last;
            monomials.push(Monomial::new(std::mem::take(&mut atoms)).map_err(at(pos.0, pos.1))?);
            if let Some(t) = tok {
                last = (t.line, t.col + 1);
            }
            continue;
        }
        let tok = tok.expect("non-sentinel");
        last = (tok.line, tok.col);
        if tok.inverse {
            return Err(perr(tok.line, tok.col, "restricted polynomials have no inverse letters"));
        }
        if let Some(i) = parse_var(tok)? {
            atoms.push(Atom::Var(i));
        } else if tok.text.starts_with('[') {
            let c = Matrix::<F>::parse_literal(&tok.text).map_err(at(tok.line, tok.col))?;
            if c.dim() != m {
                return Err(perr(tok.line, tok.col, format!("matrix of dimension {}, header m = {m}", c.dim())));
            }
            if !c.is_invertible() {
                return Err(perr(tok.line, tok.col, "matrix constants must be invertible"));
            }
            atoms.push(Atom::Const(c));
        } else {
            return Err(perr(tok.line, tok.col, format!("unexpected token {:?}", tok.text)));
        }
    }
    let n = monomials.iter().filter_map(Monomial::max_var).max().map_or(0, |i| i + 1);
    RestrictedPolynomial::new(m, h.n.unwrap_or(n), monomials)
}

pub fn serialize_restricted_poly<F: FiniteField>(p: &RestrictedPolynomial<F>) -> String {
    format!("kind: restricted-poly\nq: {}\nm: {}\nn: {}\n{p}\n", F::ORDER, p.dim(), p.num_vars())
}

fn parse_z3_poly(n: usize, (no, line): Line<'_>) -> Result<Z3Poly, Error> {
    if line.trim() == "0" {
        return Ok(Z3Poly::zero(n));
    }
    let mut terms = Vec::new();
    let mut offset = 0;
    for mono in line.split('+') {
        let mcol = offset + 1;
        offset += mono.len() + 1;
        if mono.trim().is_empty() {
            return Err(perr(no, mcol, "empty monomial"));
        }
        let mut coeff = 1u8;
        let mut e = vec![0u8; n];
        let mut foff = mcol - 1;
        for (k, factor) in mono.split('*').enumerate() {
            let fcol = foff + 1 + (factor.len() - factor.trim_start().len());
            foff += factor.len() + 1;
            let factor = factor.trim();
            if let Some(rest) = factor.strip_prefix('x') {
                let (var, exp) = match rest.split_once('^') {
                    Some((v, "")) => (v, 0),
                    Some((v, x)) => match x.parse::<u8>() {
                        Ok(x) if x <= 2 => (v, x),
                        _ => return Err(perr(no, fcol, format!("exponent {x:?} not in 0, 1, 2"))),
                    },
                    None => (rest, 1),
                };
                let i = var
                    .parse::<usize>()
                    .ok()
                    .filter(|&i| (1..=n).contains(&i) && !var.starts_with('+'))
                    .ok_or_else(|| perr(no, fcol, format!("bad variable {factor:?} for n = {n}")))?;
                e[i - 1] += exp;
            } else if k == 0 && (factor == "1" || factor == "2") {
                coeff = factor.parse().expect("digit");
            } else {
                return Err(perr(no, fcol, format!("unexpected factor {factor:?}")));
            }
        }
        terms.push((e, Z3::new(coeff)));
    }
    Z3Poly::from_terms(n, terms)
}

pub fn parse_p1(text: &str) -> Result<P1Instance, Error> {
    let (h, body) = split_header(text)?;
    expect_kind(&h, Kind::P1)?;
    let n = require(h.n, "n", h.kind)?;
    let polys = body.iter().map(|&l| parse_z3_poly(n, l)).collect::<Result<Vec<_>, _>>()?;
    if polys.is_empty() {
        return Err(perr(text.lines().count().max(1), 1, "a p1 file needs at least one polynomial line"));
    }
    P1Instance::new(n, polys)
}

pub fn serialize_p1(inst: &P1Instance) -> String {
    let mut out = format!("kind: p1\nn: {}\n", inst.num_vars());
    for p in inst.polys() {
        out.push_str(&format!("{p}\n"));
    }
    out
}

#[derive(Debug)]
enum STok {
    Open,
    Close,
    Atom(String),
}

fn sexpr_tokens(lines: &[Line<'_>]) -> Vec<(usize, usize, STok)> {
    let mut out = Vec::new();
    for &(no, line) in lines {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let start = i;
            match chars[i] {
                c if c.is_whitespace() => {
                    i += 1;
                    continue;
                }
                '(' => {
                    i += 1;
                    out.push((no, start + 1, STok::Open));
                }
                ')' => {
                    i += 1;
                    out.push((no, start + 1, STok::Close));
                }
                _ => {
                    while i < chars.len() && !chars[i].is_whitespace() && chars[i] != '(' && chars[i] != ')' {
                        i += 1;
                    }
                    out.push((no, start + 1, STok::Atom(chars[start..i].iter().collect())));
                }
            }
        }
    }
    out
}

struct SParser {
    toks: Vec<(usize, usize, STok)>,
    pos: usize,
    end: (usize, usize),
}

impl SParser {
    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map_or(self.end, |t| (t.0, t.1))
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, Error> {
        let (l, c) = self.here();
        Err(perr(l, c, message))
    }

    fn open(&mut self) -> Result<(), Error> {
        match self.toks.get(self.pos) {
            Some((_, _, STok::Open)) => {
                self.pos += 1;
                Ok(())
            }
            _ => self.fail("expected `(`"),
        }
    }

    fn atom(&mut self, what: &str) -> Result<String, Error> {
        match self.toks.get(self.pos) {
            Some((_, _, STok::Atom(a))) => {
                self.pos += 1;
                Ok(a.clone())
            }
            _ => self.fail(format!("expected {what}")),
        }
    }

    fn number<T: FromStr>(&mut self, what: &str) -> Result<T, Error> {
        let here = self.here();
        let a = self.atom(what)?;
        a.parse().map_err(|_| perr(here.0, here.1, format!("expected {what}, got {a:?}")))
    }

    fn at_close(&self) -> bool {
        matches!(self.toks.get(self.pos), Some((_, _, STok::Close)))
    }

    fn close(&mut self) -> Result<(), Error> {
        if self.at_close() {
            self.pos += 1;
            Ok(())
        } else {
            self.fail("expected `)`")
        }
    }

    fn node(&mut self) -> Result<Node, Error> {
        self.open()?;
        let here = self.here();
        let head = self.atom("`in` or `modN`")?;
        let node = if head == "in" {
            Node::Input(self.number("a wire index")?)
        } else if let Some(Ok(modulus)) = head.strip_prefix("mod").map(str::parse::<u32>) {
            let constant = self.number("a gate constant")?;
            let mut children = Vec::new();
            while !self.at_close() {
                self.open()?;
                let here = self.here();
                if self.atom("`term`")? != "term" {
                    return Err(perr(here.0, here.1, "expected `term`"));
                }
                let coeff = self.number("a coefficient")?;
                children.push((coeff, self.node()?));
                self.close()?;
            }
            Node::gate(modulus, constant, children).map_err(at(here.0, here.1))?
        } else {
            return Err(perr(here.0, here.1, format!("expected `in` or `modN`, got {head:?}")));
        };
        self.close()?;
        Ok(node)
    }
}

pub fn parse_circuit(text: &str) -> Result<CCCircuit, Error> {
    let (h, body) = split_header(text)?;
    expect_kind(&h, Kind::Circuit)?;
    let shape = h
        .shape
        .clone()
        .ok_or_else(|| Error::ParameterMismatch("a circuit file needs a `shape:` header line".into()))?;
    let inputs = require(h.inputs, "inputs", h.kind)?;
    let end = body.last().map_or((1, 1), |&(l, s)| (l, s.chars().count() + 1));
    let mut p = SParser { toks: sexpr_tokens(&body), pos: 0, end };
    let root = p.node()?;
    if p.pos < p.toks.len() {
        return p.fail("trailing input after the circuit");
    }
    CCCircuit::new(shape, inputs, root)
}

pub fn serialize_circuit(c: &CCCircuit) -> String {
    let shape: Vec<String> = c.shape().iter().map(|m| m.to_string()).collect();
    format!("kind: circuit\nshape: {}\ninputs: {}\n{}\n", shape.join(","), c.num_inputs(), c.root())
}

/// Any instance, dispatched on `kind` and `q`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Instance {
    WordF2(GroupWord<F2>),
    WordF3(GroupWord<F3>),
    PolyF2(RestrictedPolynomial<F2>),
    PolyF3(RestrictedPolynomial<F3>),
    P1(P1Instance),
    Circuit(CCCircuit),
}

impl Instance {
    pub fn kind(&self) -> Kind {
        match self {
            Instance::WordF2(_) | Instance::WordF3(_) => Kind::GroupWord,
            Instance::PolyF2(_) | Instance::PolyF3(_) => Kind::RestrictedPoly,
            Instance::P1(_) => Kind::P1,
            Instance::Circuit(_) => Kind::Circuit,
        }
    }
}

pub fn parse(text: &str) -> Result<Instance, Error> {
    let (h, _) = split_header(text)?;
    let q = h.q.unwrap_or(2);
    Ok(match (h.kind, q) {
        (Kind::GroupWord, 2) => Instance::WordF2(parse_group_word(text)?),
        (Kind::GroupWord, 3) => Instance::WordF3(parse_group_word(text)?),
        (Kind::RestrictedPoly, 2) => Instance::PolyF2(parse_restricted_poly(text)?),
        (Kind::RestrictedPoly, 3) => Instance::PolyF3(parse_restricted_poly(text)?),
        (Kind::P1, _) => Instance::P1(parse_p1(text)?),
        (Kind::Circuit, _) => Instance::Circuit(parse_circuit(text)?),
        (kind, q) => return Err(Error::Unsupported(format!("{kind} files over q = {q}"))),
    })
}

/// Like [`parse`], but the header must declare `kind`.
pub fn parse_kind(kind: Kind, text: &str) -> Result<Instance, Error> {
    let inst = parse(text)?;
    if inst.kind() != kind {
        return Err(Error::ParameterMismatch(format!("expected a {kind} file, found {}", inst.kind())));
    }
    Ok(inst)
}

pub fn serialize(inst: &Instance) -> String {
    match inst {
        Instance::WordF2(w) => serialize_group_word(w),
        Instance::WordF3(w) => serialize_group_word(w),
        Instance::PolyF2(p) => serialize_restricted_poly(p),
        Instance::PolyF3(p) => serialize_restricted_poly(p),
        Instance::P1(p) => serialize_p1(p),
        Instance::Circuit(c) => serialize_circuit(c),
    }
}

/// `serialize(parse(text))`.
pub fn normalize(text: &str) -> Result<String, Error> {
    Ok(serialize(&parse(text)?))
}
