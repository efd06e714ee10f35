use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::SyntaxError;

/// Relational signature with a base constant set and a disjoint set of fresh
/// constants (the witnesses used by consistency properties and the
/// quantifier-elimination transform).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    #[serde(default)]
    relations: BTreeMap<String, usize>,
    #[serde(default)]
    base_constants: Vec<String>,
    #[serde(default)]
    fresh_constants: Vec<String>,
}

const KEYWORDS: [&str; 6] = ["and", "or", "not", "forall", "exists", "="];

fn check_name(name: &str) -> Result<(), SyntaxError> {
    let bad = name.is_empty()
        || name.starts_with('?')
        || name.chars().any(|c| c.is_whitespace() || c == '(' || c == ')')
        || KEYWORDS.contains(&name);
    if bad {
        return Err(SyntaxError::InvalidSignature(format!("illegal symbol name `{name}`")));
    }
    Ok(())
}

impl Signature {
    pub fn new<R, S>(relations: R, base_constants: Vec<S>, fresh_constants: Vec<S>) -> Result<Self, SyntaxError>
    where
        R: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let sig = Signature {
            relations: relations.into_iter().map(|(n, a)| (n.into(), a)).collect(),
            base_constants: base_constants.into_iter().map(Into::into).collect(),
            fresh_constants: fresh_constants.into_iter().map(Into::into).collect(),
        };
        sig.validate()?;
        Ok(sig)
    }

    /// Signature with only fresh constants `c0..c{n-1}` and the given relations.
    pub fn with_fresh(relations: &[(&str, usize)], n: usize) -> Self {
        let consts: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
        Signature::new(relations.iter().map(|&(r, a)| (r.to_string(), a)), Vec::new(), consts)
            .expect("generated names are legal")
    }

    pub fn from_json(text: &str) -> Result<Self, SyntaxError> {
        let sig: Signature = serde_json::from_str(text).map_err(|e| SyntaxError::InvalidSignature(e.to_string()))?;
        sig.validate()?;
        Ok(sig)
    }

    pub fn validate(&self) -> Result<(), SyntaxError> {
        let mut seen = BTreeSet::new();
        for name in self.relations.keys().chain(&self.base_constants).chain(&self.fresh_constants) {
            check_name(name)?;
            if !seen.insert(name.as_str()) {
                return Err(SyntaxError::InvalidSignature(format!("symbol `{name}` declared twice")));
            }
        }
        Ok(())
    }

    pub fn relations(&self) -> &BTreeMap<String, usize> {
        &self.relations
    }

    pub fn arity(&self, rel: &str) -> Option<usize> {
        self.relations.get(rel).copied()
    }

    pub fn base_constants(&self) -> &[String] {
        &self.base_constants
    }

    pub fn fresh_constants(&self) -> &[String] {
        &self.fresh_constants
    }

    /// All constants, base first, then fresh.
    pub fn constants(&self) -> Vec<String> {
        self.base_constants.iter().chain(&self.fresh_constants).cloned().collect()
    }

    pub fn is_constant(&self, name: &str) -> bool {
        self.base_constants.iter().any(|c| c == name) || self.is_fresh(name)
    }

    pub fn is_fresh(&self, name: &str) -> bool {
        self.fresh_constants.iter().any(|c| c == name)
    }

    /// Copy of this signature in which the given constants are appended to the fresh set.
    pub fn extend_fresh<S: Into<String>>(&self, extra: impl IntoIterator<Item = S>) -> Result<Self, SyntaxError> {
        let mut sig = self.clone();
        sig.fresh_constants.extend(extra.into_iter().map(Into::into));
        sig.validate()?;
        Ok(sig)
    }

    /// Copy of this signature with every base constant moved into the fresh set.
    pub fn all_fresh(&self) -> Self {
        let mut sig = self.clone();
        let mut fresh = std::mem::take(&mut sig.base_constants);
        fresh.append(&mut sig.fresh_constants);
        sig.fresh_constants = fresh;
        sig
    }
}
