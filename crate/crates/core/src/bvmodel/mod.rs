//! Boolean-valued structures: validation, evaluation, quotients, mixing and
//! fullness.

mod eval;
mod mixing;
mod quotient;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::balg::{BalgError, BoolAlg, Elem};

pub use eval::{eval, Assignment, Evaluator};
pub use mixing::{
    check_fullness, check_mixing, constant_map_index, mixing_catalog, mixing_completion, FullnessFailure, FullnessReport, MixingCounterexample,
    MixingReport,
};
pub use quotient::quotient_model;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BvError {
    #[error(transparent)]
    Algebra(#[from] BalgError),
    #[error("malformed model: {0}")]
    Malformed(String),
    #[error("model violates the equality axioms: {0}")]
    Invalid(Violation),
    #[error("unbound variable `?{0}`")]
    UnboundVariable(String),
    #[error("constant `{0}` is not interpreted")]
    UninterpretedConstant(String),
    #[error("relation `{0}` is not interpreted")]
    UnknownRelation(String),
    #[error("evaluation exceeded the cap of {cap} steps")]
    Resource { cap: u64 },
    #[error("catalog entry is not existential: {0}")]
    MalformedCatalog(String),
    #[error("construction would produce {size} elements, above the cap of {cap}")]
    TooLarge { size: u128, cap: usize },
}

/// Values of one relation symbol, row-major over `domain^arity`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelTable {
    pub arity: usize,
    pub table: Vec<Elem>,
}

/// A failed instance of the equality or congruence axioms, by domain label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum Violation {
    Reflexivity { element: String },
    Symmetry { left: String, right: String },
    Transitivity { first: String, second: String, third: String },
    Congruence { relation: String, from: Vec<String>, to: Vec<String> },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::Reflexivity { element } => write!(f, "[[{element} = {element}]] is not 1"),
            Violation::Symmetry { left, right } => write!(f, "[[{left} = {right}]] differs from its converse"),
            Violation::Transitivity { first, second, third } => {
                write!(f, "[[{first} = {second}]] and [[{second} = {third}]] exceed [[{first} = {third}]]")
            }
            Violation::Congruence { relation, from, to } => {
                write!(f, "{relation}({}) does not transfer to {relation}({})", from.join(", "), to.join(", "))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<Violation>,
}

/// A structure whose equality and relations take values in a finite Boolean algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BValuedModel {
    algebra: BoolAlg,
    domain: Vec<String>,
    eq: Vec<Vec<Elem>>,
    relations: BTreeMap<String, RelTable>,
    consts: BTreeMap<String, usize>,
}

/// Interchange format: element values are bitstrings, constants name domain labels.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelFile {
    pub atoms: usize,
    pub domain: Vec<String>,
    pub eq: Vec<Vec<Elem>>,
    #[serde(default)]
    pub relations: BTreeMap<String, RelTable>,
    #[serde(default)]
    pub consts: BTreeMap<String, String>,
}

impl BValuedModel {
    /// Builds a model and checks shapes and the equality axioms.
    pub fn new(
        algebra: BoolAlg,
        domain: Vec<String>,
        eq: Vec<Vec<Elem>>,
        relations: BTreeMap<String, RelTable>,
        consts: BTreeMap<String, usize>,
    ) -> Result<Self, BvError> {
        let m = BValuedModel::from_parts(algebra, domain, eq, relations, consts)?;
        if let Some(v) = m.validate().violation {
            return Err(BvError::Invalid(v));
        }
        Ok(m)
    }

    /// Builds a model checking only shapes, not the equality axioms.
    pub fn from_parts(
        algebra: BoolAlg,
        domain: Vec<String>,
        eq: Vec<Vec<Elem>>,
        relations: BTreeMap<String, RelTable>,
        consts: BTreeMap<String, usize>,
    ) -> Result<Self, BvError> {
        let n = domain.len();
        if n == 0 {
            return Err(BvError::Malformed("empty domain".into()));
        }
        if eq.len() != n || eq.iter().any(|row| row.len() != n) {
            return Err(BvError::Malformed(format!("equality table must be {n}x{n}")));
        }
        for e in eq.iter().flatten() {
            algebra.check(e)?;
        }
        for (name, r) in &relations {
            let want = n.checked_pow(r.arity as u32).ok_or_else(|| BvError::Malformed(format!("relation `{name}` too large")))?;
            if r.table.len() != want {
                return Err(BvError::Malformed(format!("relation `{name}` needs {want} entries, has {}", r.table.len())));
            }
            for e in &r.table {
                algebra.check(e)?;
            }
        }
        if let Some((c, _)) = consts.iter().find(|(_, &i)| i >= n) {
            return Err(BvError::Malformed(format!("constant `{c}` points outside the domain")));
        }
        Ok(BValuedModel { algebra, domain, eq, relations, consts })
    }

    /// Two-valued model with true equality.
    pub fn tarski(
        domain: Vec<String>,
        relations: BTreeMap<String, (usize, Vec<bool>)>,
        consts: BTreeMap<String, usize>,
    ) -> Result<Self, BvError> {
        let b = BoolAlg::two();
        let v = |t: bool| if t { b.one() } else { b.zero() };
        let n = domain.len();
        let eq = (0..n).map(|i| (0..n).map(|j| v(i == j)).collect()).collect();
        let relations = relations.into_iter().map(|(r, (arity, vals))| (r, RelTable { arity, table: vals.into_iter().map(v).collect() })).collect();
        BValuedModel::new(b.clone(), domain, eq, relations, consts)
    }

    pub fn from_file(file: ModelFile) -> Result<Self, BvError> {
        let m = BValuedModel::from_file_unchecked(file)?;
        if let Some(v) = m.validate().violation {
            return Err(BvError::Invalid(v));
        }
        Ok(m)
    }

    /// Like [`BValuedModel::from_file`] but checks only shapes.
    pub fn from_file_unchecked(file: ModelFile) -> Result<Self, BvError> {
        let algebra = BoolAlg::new(file.atoms)?;
        let consts = file
            .consts
            .iter()
            .map(|(c, label)| {
                file.domain.iter().position(|d| d == label).map(|i| (c.clone(), i)).ok_or_else(|| BvError::Malformed(format!("unknown domain label `{label}`")))
            })
            .collect::<Result<_, _>>()?;
        BValuedModel::from_parts(algebra, file.domain, file.eq, file.relations, consts)
    }

    pub fn from_json(text: &str) -> Result<Self, BvError> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| BvError::Malformed(e.to_string()))?;
        BValuedModel::from_file(file)
    }

    pub fn to_file(&self) -> ModelFile {
        ModelFile {
            atoms: self.algebra.atom_count(),
            domain: self.domain.clone(),
            eq: self.eq.clone(),
            relations: self.relations.clone(),
            consts: self.consts.iter().map(|(c, &i)| (c.clone(), self.domain[i].clone())).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("model serializes")
    }

    pub fn algebra(&self) -> &BoolAlg {
        &self.algebra
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn size(&self) -> usize {
        self.domain.len()
    }

    pub fn eq_value(&self, i: usize, j: usize) -> &Elem {
        &self.eq[i][j]
    }

    pub fn relations(&self) -> &BTreeMap<String, RelTable> {
        &self.relations
    }

    pub fn consts(&self) -> &BTreeMap<String, usize> {
        &self.consts
    }

    pub fn const_index(&self, c: &str) -> Option<usize> {
        self.consts.get(c).copied()
    }

    pub fn is_two_valued(&self) -> bool {
        self.algebra.atom_count() == 1
    }

    pub fn tuple_index(&self, tuple: &[usize]) -> usize {
        tuple.iter().fold(0, |acc, &t| acc * self.domain.len() + t)
    }

    pub fn index_tuple(&self, mut idx: usize, arity: usize) -> Vec<usize> {
        let n = self.domain.len();
        let mut t = vec![0; arity];
        for slot in t.iter_mut().rev() {
            *slot = idx % n;
            idx /= n;
        }
        t
    }

    pub fn rel_value(&self, rel: &str, tuple: &[usize]) -> Option<&Elem> {
        let r = self.relations.get(rel)?;
        (r.arity == tuple.len()).then(|| &r.table[self.tuple_index(tuple)])
    }

    /// Copy whose constants point at the given domain indices.
    pub fn with_consts(&self, consts: BTreeMap<String, usize>) -> Result<Self, BvError> {
        BValuedModel::from_parts(self.algebra.clone(), self.domain.clone(), self.eq.clone(), self.relations.clone(), consts)
    }

    /// Checks reflexivity, symmetry and transitivity of equality and the
    /// congruence clause for every relation, one coordinate at a time.
    pub fn validate(&self) -> ValidationReport {
        let bad = |v| ValidationReport { valid: false, violation: Some(v) };
        let n = self.size();
        let l = |i: usize| self.domain[i].clone();
        for i in 0..n {
            if !self.eq[i][i].is_one() {
                return bad(Violation::Reflexivity { element: l(i) });
            }
            for j in 0..n {
                if self.eq[i][j] != self.eq[j][i] {
                    return bad(Violation::Symmetry { left: l(i), right: l(j) });
                }
                for k in 0..n {
                    if !self.eq[i][j].meet(&self.eq[j][k]).leq(&self.eq[i][k]) {
                        return bad(Violation::Transitivity { first: l(i), second: l(j), third: l(k) });
                    }
                }
            }
        }
        for (name, r) in &self.relations {
            for idx in 0..r.table.len() {
                let from = self.index_tuple(idx, r.arity);
                for pos in 0..r.arity {
                    for s in 0..n {
                        let mut to = from.clone();
                        to[pos] = s;
                        let lhs = self.eq[from[pos]][s].meet(&r.table[idx]);
                        if !lhs.leq(&r.table[self.tuple_index(&to)]) {
                            return bad(Violation::Congruence {
                                relation: name.clone(),
                                from: from.iter().map(|&i| l(i)).collect(),
                                to: to.iter().map(|&i| l(i)).collect(),
                            });
                        }
                    }
                }
            }
        }
        ValidationReport { valid: true, violation: None }
    }
}

pub fn validate_model(m: &BValuedModel) -> ValidationReport {
    m.validate()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn elem(s: &str) -> Elem {
        Elem::from_bits(s).unwrap()
    }

    #[test]
    fn tarski_models_validate() {
        let m = BValuedModel::tarski(
            vec!["a".into(), "b".into()],
            BTreeMap::from([("R".into(), (2, vec![true, false, false, true]))]),
            BTreeMap::from([("c".into(), 0)]),
        )
        .unwrap();
        assert!(m.validate().valid);
        assert_eq!(m.rel_value("R", &[1, 1]), Some(&elem("1")));
    }

    #[test]
    fn transitivity_violation_is_reported() {
        let one = elem("1");
        let zero = elem("0");
        let eq = vec![
            vec![one.clone(), one.clone(), zero.clone()],
            vec![one.clone(), one.clone(), one.clone()],
            vec![zero.clone(), one.clone(), one.clone()],
        ];
        let m = BValuedModel::from_parts(BoolAlg::two(), vec!["t".into(), "s".into(), "p".into()], eq, BTreeMap::new(), BTreeMap::new()).unwrap();
        let r = validate_model(&m);
        assert!(!r.valid);
        assert!(matches!(r.violation, Some(Violation::Transitivity { .. })));
    }

    #[test]
    fn congruence_violation_is_reported() {
        let b = BoolAlg::new(2).unwrap();
        let eq = vec![vec![elem("11"), elem("10")], vec![elem("10"), elem("11")]];
        let rel = RelTable { arity: 1, table: vec![elem("11"), elem("01")] };
        let err = BValuedModel::new(b, vec!["x".into(), "y".into()], eq, BTreeMap::from([("P".into(), rel)]), BTreeMap::new()).unwrap_err();
        match err {
            BvError::Invalid(Violation::Congruence { from, to, .. }) => assert_eq!((from, to), (vec!["x".to_string()], vec!["y".to_string()])),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"atoms":2,"domain":["x","y"],"eq":[["11","00"],["00","11"]],
            "relations":{"P":{"arity":1,"table":["10","01"]}},"consts":{"c":"y"}}"#;
        let m = BValuedModel::from_json(text).unwrap();
        assert_eq!(m.const_index("c"), Some(1));
        assert_eq!(BValuedModel::from_json(&m.to_json()).unwrap(), m);
        assert!(BValuedModel::from_json(r#"{"atoms":1,"domain":["x"],"eq":[["1","1"]]}"#).is_err());
    }
}
