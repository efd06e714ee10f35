//! Consistency properties: clause verification, saturation of ground
//! theories, and the model-existence construction.

mod construct;
mod universe;
mod verify;

use std::collections::{BTreeSet, HashMap, HashSet};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::balg::Elem;
use crate::bvmodel::{BvError, Violation};
use crate::compact::CompactError;
use crate::syntax::{parse, Formula, Signature, SyntaxError};

pub use construct::{member_poset, model_from_consprop, CompletionCheck, ConstructionOptions, ModelReport};
pub use universe::{closure_universe, saturate_theory, str2_variants, SaturateConfig, Saturation, SaturationSummary};
pub use verify::{verify_consistency_property, Clause, ClauseViolation, VerifyReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConspropError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Model(#[from] BvError),
    #[error(transparent)]
    Oracle(#[from] CompactError),
    #[error("malformed consistency property: {0}")]
    Malformed(String),
    #[error("closure universe exceeds {limit} sentences")]
    UniverseTooLarge { limit: usize },
    #[error("fragment not decidable at this bound: {0}")]
    Undecided(String),
    #[error("the consistency property is empty")]
    Empty,
    #[error("not a consistency property: {0}")]
    NotAConsistencyProperty(ClauseViolation),
    #[error("construction failed: {0}")]
    ConstructionFailure(ConstructionFailure),
}

/// How a clause's requirement `s ∪ {φ} ∈ S` is read.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reading {
    /// `s ∪ {φ}` must itself be a member.
    #[default]
    Exact,
    /// Some member must include `s ∪ {φ}`.
    Extension,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstructionFailure {
    InvalidModel { violation: Violation },
    Unrealized { member: Vec<String>, sentence: String, cone: Elem, value: Elem },
    LostInCompletion { member: Vec<String> },
}

impl std::fmt::Display for ConstructionFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConstructionFailure::InvalidModel { violation } => write!(f, "{violation}"),
            ConstructionFailure::Unrealized { member, sentence, cone, value } => {
                write!(f, "member {{{}}}: cone {cone} is not below [[{sentence}]] = {value}", member.join(", "))
            }
            ConstructionFailure::LostInCompletion { member } => write!(f, "member {{{}}} has value 0 after completion", member.join(", ")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConsistencyProperty {
    pub sig: Signature,
    pub members: Vec<BTreeSet<Formula>>,
    pub reading: Reading,
}

#[derive(Serialize, Deserialize)]
struct PropertyFile {
    members: Vec<Vec<String>>,
    #[serde(default)]
    reading: Reading,
}

impl ConsistencyProperty {
    pub fn new(sig: Signature, members: Vec<BTreeSet<Formula>>, reading: Reading) -> Self {
        ConsistencyProperty { sig, members, reading }
    }

    /// Accepts `{"members": [[...]], "reading": ...}` or a bare array of arrays.
    pub fn from_json(text: &str, sig: &Signature) -> Result<Self, ConspropError> {
        let file: PropertyFile = match serde_json::from_str::<Vec<Vec<String>>>(text) {
            Ok(members) => PropertyFile { members, reading: Reading::Exact },
            Err(_) => serde_json::from_str(text).map_err(|e| ConspropError::Malformed(e.to_string()))?,
        };
        let members = file
            .members
            .iter()
            .map(|m| m.iter().map(|s| parse(s, sig)).collect::<Result<BTreeSet<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(open) = members.iter().flatten().find(|f| !f.is_sentence()) {
            return Err(ConspropError::Malformed(format!("{open} is not a sentence")));
        }
        Ok(ConsistencyProperty::new(sig.clone(), members, file.reading))
    }

    pub fn to_json(&self) -> String {
        let file = PropertyFile { members: self.members.iter().map(|m| m.iter().map(Formula::to_string).collect()).collect(), reading: self.reading };
        serde_json::to_string_pretty(&file).expect("property serializes")
    }
}

/// Members as bitsets over an interned sentence universe.
pub(crate) struct Indexed {
    pub formulas: Vec<Formula>,
    pub index: HashMap<Formula, usize>,
    pub members: Vec<FixedBitSet>,
    pub set: HashSet<FixedBitSet>,
    /// Members not strictly included in another member.
    pub maximal: Vec<usize>,
    pub reading: Reading,
}

impl Indexed {
    pub fn new(s: &ConsistencyProperty) -> Self {
        let mut formulas = Vec::new();
        let mut index = HashMap::new();
        for f in s.members.iter().flatten() {
            if !index.contains_key(f) {
                index.insert(f.clone(), formulas.len());
                formulas.push(f.clone());
            }
        }
        let n = formulas.len();
        let members: Vec<FixedBitSet> = s
            .members
            .iter()
            .map(|m| {
                let mut b = FixedBitSet::with_capacity(n);
                b.extend(m.iter().map(|f| index[f]));
                b
            })
            .collect();
        let set: HashSet<FixedBitSet> = members.iter().cloned().collect();
        let mut maximal = Vec::new();
        let mut seen = HashSet::new();
        for (i, m) in members.iter().enumerate() {
            if !seen.insert(m.clone()) {
                continue;
            }
            let strictly_below = members.iter().any(|o| o != m && m.is_subset(o));
            if !strictly_below {
                maximal.push(i);
            }
        }
        Indexed { formulas, index, members, set, maximal, reading: s.reading }
    }

    /// Whether `base ∪ extra` is accepted under the reading.
    pub fn accepts(&self, base: &FixedBitSet, extra: &[&Formula]) -> bool {
        let mut b = base.clone();
        for f in extra {
            match self.index.get(*f) {
                Some(&i) => b.insert(i),
                None => return false,
            }
        }
        match self.reading {
            Reading::Exact => self.set.contains(&b),
            Reading::Extension => self.maximal.iter().any(|&m| b.is_subset(&self.members[m])),
        }
    }

    pub fn render(&self, b: &FixedBitSet) -> Vec<String> {
        b.ones().map(|i| self.formulas[i].to_string()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_forms() {
        let sig = Signature::with_fresh(&[], 2);
        let a = ConsistencyProperty::from_json(r#"[[], ["(= c0 c1)"]]"#, &sig).unwrap();
        assert_eq!(a.reading, Reading::Exact);
        assert_eq!(a.members.len(), 2);
        let b = ConsistencyProperty::from_json(&a.to_json(), &sig).unwrap();
        assert_eq!(a, b);
        let c = ConsistencyProperty::from_json(r#"{"members":[["(= c0 c0)"]],"reading":"extension"}"#, &sig).unwrap();
        assert_eq!(c.reading, Reading::Extension);
        assert!(ConsistencyProperty::from_json(r#"[["(= ?x c0)"]]"#, &sig).is_err());
    }
}
