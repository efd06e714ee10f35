//! The ground consistency oracle, conservative strengthenings, finitely
//! conservative families and the Boolean compactness pipeline.

mod conservative;
mod oracle;
mod pipeline;

use thiserror::Error;

use crate::bvmodel::BvError;
use crate::consprop::ConspropError;
use crate::syntax::{Formula, Signature, SyntaxError};

pub use conservative::{
    conjunct_key, conjunction_closure, is_conservative_strengthening, is_finitely_conservative, maximal_types, Conservativity, ConservativityReport,
    FinConsFailure, FinConsReport, Route,
};
pub use pipeline::{
    compactness_run, first_order_compactness_demo, ground_atoms, star_equivalence, star_theory, CompactnessRun, FoCompactness, StarEquivalence,
};
pub use oracle::{consistency_oracle, decide, ground, naming_axioms, replay_refutation, OracleVerdict, Refutation, Status};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CompactError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Model(#[from] BvError),
    #[error("input is not a ground sentence: {0}")]
    NotGround(String),
    #[error("oracle budget exhausted while {0}")]
    Unknown(String),
    #[error("internal check failed: {0}")]
    Internal(String),
    #[error("family is not finitely conservative: {0}")]
    NotFinitelyConservative(String),
    #[error("{member} has a consistent finite part {subset:?} that is inconsistent with the whole family")]
    ConservativityGap { member: String, subset: Vec<String> },
    #[error(transparent)]
    Construction(Box<ConspropError>),
    #[error("generator is false in the model: {0}")]
    GeneratorFalse(String),
    #[error("inconsistent finite subset: {0:?}")]
    InconsistentSubset(Vec<String>),
}

impl From<ConspropError> for CompactError {
    fn from(e: ConspropError) -> Self {
        match e {
            ConspropError::Oracle(inner) => inner,
            other => CompactError::Construction(Box::new(other)),
        }
    }
}

/// `{c_i ≠ c_n : i < n} ∪ {⋁_{i<n} c_n = c_i}` over fresh constants `c0..cn`.
pub fn faicom_family(n: usize) -> (Vec<Formula>, Signature) {
    assert!(n >= 1, "faicom_family needs n >= 1");
    let sig = Signature::with_fresh(&[], n + 1);
    let cn = format!("c{n}");
    let mut t: Vec<Formula> = (0..n).map(|i| Formula::neq_c(format!("c{i}"), cn.clone())).collect();
    t.push(Formula::Or((0..n).map(|i| Formula::eq_c(cn.clone(), format!("c{i}"))).collect()));
    (t, sig)
}
