//! Relational signatures, formulas of the finitely indexed fragment, the
//! S-expression syntax, and syntactic transforms.

mod formula;
mod parse;
mod signature;
mod transform;

use thiserror::Error;

pub use formula::{Formula, Term};
pub use parse::{parse, parse_term, parse_theory, render};
pub use signature::Signature;
pub use transform::{nnf, nnf_step, qe_axiom, qe_transform, subsentences, tuples};

/// Position-carrying errors use byte offsets into the parsed text.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("invalid signature: {0}")]
    InvalidSignature(String),
    #[error("syntax error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("relation `{rel}` expects {expected} arguments, found {found}{}", at(*pos))]
    Arity { rel: String, expected: usize, found: usize, pos: Option<usize> },
    #[error("undeclared symbol `{symbol}`{}", at(*pos))]
    Undeclared { symbol: String, pos: Option<usize> },
    #[error("repeated variable in quantifier block{}", at(*pos))]
    DuplicateVariable { pos: Option<usize> },
    #[error("the fresh constant set is empty")]
    EmptyFresh,
    #[error("substitution would capture variable `{var}`")]
    Capture { var: String },
    #[error("expected a sentence, found free variables {0:?}")]
    NotSentence(Vec<String>),
}

fn at(pos: Option<usize>) -> String {
    pos.map(|p| format!(" at byte {p}")).unwrap_or_default()
}

/// A finite set of sentences.
pub type Theory = Vec<Formula>;
