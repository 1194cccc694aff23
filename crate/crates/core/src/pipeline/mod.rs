//! Reduction passes between group-word problems and restricted-polynomial
//! problems over `Hol(q,m)` and `Mat_m(F_q)`.

mod collect;
mod words;

pub use collect::{
    collect, collect_to_inequalities, combination_check, combine_inequalities, polsat_to_respoleqv, support_set,
    Collected, Inequality, InequalitySet, ReductionSummary, RespolReduction,
};
pub use words::{
    copoleqv_to_polsat, copoleqv_to_polsat_with, phi, poleqv_word_check, respoleqv_to_poleqv, respoleqv_to_poleqv_with,
    SatInstance,
};
