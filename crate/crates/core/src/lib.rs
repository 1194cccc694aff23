//! Reductions between equation solvability over S4 and its neighbours.
//!
//! The chain runs through five instance representations:
//!
//! * group words over the holomorph `Hol(q,m) = F_q^m ⋊ GL_m(F_q)`, with
//!   `S4 ≅ Hol(2,2)` ([`holomorph`]),
//! * restricted polynomials over `Mat_m(F_q)` ([`respoly`]),
//! * sums of powers of a primitive element of F4 with Z3 exponents
//!   ([`f4arith`]),
//! * CC[2,3,2] modular counting circuits ([`circuits`]).
//!
//! Every pass in [`pipeline`], [`f4arith`] and [`circuits`] has a
//! brute-force oracle on both sides so the decision bit can be checked at
//! small sizes. [`solvers`] composes the chain into the two weight-bounded
//! satisfiability procedures.

pub mod bounds;
pub mod circuits;
pub mod f4arith;
pub mod field;
pub mod formats;
pub mod holomorph;
pub mod matrix;
pub mod nearring;
pub mod pipeline;
pub mod respoly;
pub mod solvers;
pub mod verify;

pub use field::{FiniteField, F2, F3, F4, Z3};
pub use holomorph::{GroupWord, HolElement, Letter, PermS4};
pub use matrix::{gl_enumerate, invertible_sum, rank_normal_form, Matrix, RankNormalForm, Vector};
pub use respoly::{Monomial, RestrictedPolynomial};

pub type Mat2F2 = Matrix<F2>;
pub type S4 = HolElement<F2>;
pub type S4Word = GroupWord<F2>;
pub type RespolyF2 = RestrictedPolynomial<F2>;

/// Default budget for exhaustive enumerations (number of evaluated points).
pub const DEFAULT_CAP: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("parameter mismatch: {0}")]
    ParameterMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("unsupported parameters: {0}")]
    Unsupported(String),
    #[error("decomposition impossible: (1) over F2 is not a sum of two invertible 1x1 matrices")]
    DecompositionImpossible,
    #[error("empty product")]
    EmptyProduct,
    #[error("unbound variable x{}", .0 + 1)]
    UnboundVariable(usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("enumeration cap exceeded: {needed} points > cap {cap}")]
    CapExceeded { needed: String, cap: u64 },
    #[error("search failed: {0}")]
    SearchFailed(String),
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("circuit not in normal form: {0}")]
    NotNormalForm(String),
    #[error("shape violation: {0}")]
    Shape(String),
}

impl Error {
    pub(crate) fn syntax(message: impl Into<String>) -> Self {
        Error::Syntax(message.into())
    }

    pub(crate) fn cap(needed: impl std::fmt::Display, cap: u64) -> Self {
        Error::CapExceeded { needed: needed.to_string(), cap }
    }
}

/// Reads the `S4R_CAP` override, falling back to `default`.
pub fn cap_from_env(default: u64) -> u64 {
    std::env::var("S4R_CAP").ok().and_then(|v| v.trim().parse().ok()).unwrap_or(default)
}
