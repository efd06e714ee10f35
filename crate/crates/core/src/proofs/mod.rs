//! Sequents, proof trees, rule-by-rule checking and randomized soundness probes.

mod check;
pub mod corpus;
mod json;
mod probe;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bvmodel::BvError;
use crate::syntax::{Formula, SyntaxError, Term};

pub use check::{check_proof, CheckFailure, CheckVerdict};
pub use probe::{mutations, soundness_probe, ProbeCounterexample, ProbeReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProofError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Model(#[from] BvError),
    #[error("malformed proof file: {0}")]
    Malformed(String),
    #[error("proof does not check at node {path:?}: {reason}")]
    Unchecked { path: Vec<usize>, reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Sequent {
    pub left: BTreeSet<Formula>,
    pub right: BTreeSet<Formula>,
}

impl Sequent {
    pub fn new(left: impl IntoIterator<Item = Formula>, right: impl IntoIterator<Item = Formula>) -> Self {
        Sequent { left: left.into_iter().collect(), right: right.into_iter().collect() }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        self.left.iter().chain(&self.right).flat_map(Formula::free_vars).collect()
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |s: &BTreeSet<Formula>| s.iter().map(Formula::to_string).collect::<Vec<_>>().join(", ");
        write!(f, "{} |- {}", side(&self.left), side(&self.right))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    Eq1,
    Eq2,
    Eq3,
    Eq4,
    Axiom,
    Cut,
    Substitution,
    Weakening,
    AndLeft,
    AndRight,
    OrLeft,
    OrRight,
    ForallLeft,
    ForallRight,
    ExistsLeft,
    ExistsRight,
    NotLeft,
    NotRight,
}

impl Rule {
    pub const ALL: [Rule; 18] = [
        Rule::Eq1,
        Rule::Eq2,
        Rule::Eq3,
        Rule::Eq4,
        Rule::Axiom,
        Rule::Cut,
        Rule::Substitution,
        Rule::Weakening,
        Rule::AndLeft,
        Rule::AndRight,
        Rule::OrLeft,
        Rule::OrRight,
        Rule::ForallLeft,
        Rule::ForallRight,
        Rule::ExistsLeft,
        Rule::ExistsRight,
        Rule::NotLeft,
        Rule::NotRight,
    ];

    pub fn name(self) -> String {
        serde_json::to_value(self).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
    }
}

/// Rule-specific data carried by a node.
///
/// * `principal`: the formula the rule introduces (axiom, logical rules).
/// * `terms`: equality-axiom terms `c, d, e`, or the instantiating terms of
///   forall-left and exists-right.
/// * `template`, `vars`, `from`, `to`: Equality Axiom 4, concluding
///   `{to_i = from_i}, template(from) |- template(to)`.
/// * `cut`: the cut formula.
/// * `binding`: the substitution applied by the substitution rule.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RuleData {
    pub principal: Option<Formula>,
    pub terms: Vec<Term>,
    pub template: Option<Formula>,
    pub vars: Vec<String>,
    pub from: Vec<Term>,
    pub to: Vec<Term>,
    pub cut: Option<Formula>,
    pub binding: BTreeMap<String, Term>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofTree {
    pub conclusion: Sequent,
    pub rule: Rule,
    pub data: RuleData,
    pub premises: Vec<ProofTree>,
}

impl ProofTree {
    pub fn new(rule: Rule, conclusion: Sequent, data: RuleData, premises: Vec<ProofTree>) -> Self {
        ProofTree { conclusion, rule, data, premises }
    }

    /// Node with only a principal formula as data.
    pub fn with_principal(rule: Rule, conclusion: Sequent, principal: Formula, premises: Vec<ProofTree>) -> Self {
        ProofTree::new(rule, conclusion, RuleData { principal: Some(principal), ..RuleData::default() }, premises)
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(ProofTree::size).sum::<usize>()
    }

    /// The node at `path` (child indices from the root).
    pub fn node(&self, path: &[usize]) -> Option<&ProofTree> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => self.premises.get(i)?.node(rest),
        }
    }

    pub fn node_mut(&mut self, path: &[usize]) -> Option<&mut ProofTree> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => self.premises.get_mut(i)?.node_mut(rest),
        }
    }

    /// Paths of all nodes in preorder.
    pub fn paths(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for (i, p) in self.premises.iter().enumerate() {
            out.extend(p.paths().into_iter().map(|mut rest| {
                rest.insert(0, i);
                rest
            }));
        }
        out
    }
}
