use std::path::Path;

use serde_json::Value;

use boolkit::bvmodel::ModelFile;
use boolkit::compact::CompactError;
use boolkit::consprop::{ConsistencyProperty, ConspropError};
use boolkit::forcing::{ForcingError, SPhiPoset};
use boolkit::proofs::{ProofError, ProofTree};
use boolkit::syntax::{parse, parse_theory};
use boolkit::{BValuedModel, BvError, Budget, Formula, Signature};

use crate::Failure;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// The payload under `key`, looking through a boolkit report's `result` if
/// the file is one. Plain payload files pass through unchanged.
fn payload(path: &Path, key: &str) -> Result<String, Failure> {
    let text = read(path)?;
    let Ok(mut v) = serde_json::from_str::<Value>(&text) else {
        return Ok(text);
    };
    if v.get("tool").and_then(Value::as_str) == Some("boolkit") {
        v = v["result"].take();
    }
    if let Some(inner) = v.get_mut(key) {
        v = inner.take();
    }
    Ok(v.to_string())
}

fn usage(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Usage(format!("{}: {e}", path.display()))
}

pub fn signature(path: &Path) -> Result<Signature, Failure> {
    Signature::from_json(&read(path)?).map_err(|e| usage(path, e))
}

pub fn formula(text: &str, sig: &Signature) -> Result<Formula, Failure> {
    parse(text, sig).map_err(|e| Failure::Usage(format!("formula: {e}")))
}

pub fn sentence(text: &str, sig: &Signature) -> Result<Formula, Failure> {
    let f = formula(text, sig)?;
    if !f.is_sentence() {
        return Err(Failure::Usage(format!("{f} has free variables")));
    }
    Ok(f)
}

pub fn theory(path: &Path, sig: &Signature) -> Result<Vec<Formula>, Failure> {
    parse_theory(&payload(path, "family")?, sig).map_err(|e| usage(path, e))
}

pub fn model(path: &Path) -> Result<BValuedModel, Failure> {
    BValuedModel::from_json(&payload(path, "model")?).map_err(|e| usage(path, e))
}

pub fn model_unchecked(path: &Path) -> Result<BValuedModel, Failure> {
    let file: ModelFile = serde_json::from_str(&payload(path, "model")?).map_err(|e| usage(path, e))?;
    BValuedModel::from_file_unchecked(file).map_err(|e| usage(path, e))
}

/// Relations and constants of a model, all constants fresh.
pub fn model_signature(m: &BValuedModel) -> Result<Signature, Failure> {
    let rels = m.relations().iter().map(|(r, t)| (r.clone(), t.arity));
    Signature::new(rels, Vec::new(), m.consts().keys().cloned().collect()).map_err(|e| Failure::Usage(e.to_string()))
}

pub fn open_formulas(path: &Path, sig: &Signature) -> Result<Vec<Formula>, Failure> {
    let items: Vec<String> = serde_json::from_str(&read(path)?).map_err(|e| usage(path, e))?;
    items.iter().map(|s| formula(s, sig)).collect()
}

pub fn proof(path: &Path, sig: &Signature) -> Result<ProofTree, Failure> {
    ProofTree::from_json(&read(path)?, sig).map_err(|e| usage(path, e))
}

pub fn property(path: &Path, sig: &Signature) -> Result<ConsistencyProperty, Failure> {
    ConsistencyProperty::from_json(&read(path)?, sig).map_err(|e| usage(path, e))
}

pub fn poset(path: &Path, sig: &Signature, budget: &Budget) -> Result<SPhiPoset, Failure> {
    SPhiPoset::from_json(&payload(path, "poset")?, sig, budget).map_err(|e| match e {
        ForcingError::Oracle(CompactError::Unknown(m)) => Failure::Unknown(m),
        other => usage(path, other),
    })
}

pub fn index_sets(path: &Path) -> Result<Vec<Vec<usize>>, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| usage(path, e))
}

impl From<BvError> for Failure {
    fn from(e: BvError) -> Self {
        match e {
            BvError::Resource { .. } | BvError::TooLarge { .. } => Failure::Unknown(e.to_string()),
            other => Failure::Refuted(other.to_string()),
        }
    }
}

impl From<CompactError> for Failure {
    fn from(e: CompactError) -> Self {
        match e {
            CompactError::Unknown(_) => Failure::Unknown(e.to_string()),
            CompactError::Model(m) => m.into(),
            CompactError::Construction(c) => (*c).into(),
            CompactError::NotGround(_) | CompactError::Syntax(_) => Failure::Usage(e.to_string()),
            other => Failure::Refuted(other.to_string()),
        }
    }
}

impl From<ConspropError> for Failure {
    fn from(e: ConspropError) -> Self {
        match e {
            ConspropError::Undecided(_) | ConspropError::UniverseTooLarge { .. } => Failure::Unknown(e.to_string()),
            ConspropError::Oracle(c) => c.into(),
            ConspropError::Model(m) => m.into(),
            ConspropError::Malformed(_) | ConspropError::Syntax(_) => Failure::Usage(e.to_string()),
            other => Failure::Refuted(other.to_string()),
        }
    }
}

impl From<ForcingError> for Failure {
    fn from(e: ForcingError) -> Self {
        match e {
            ForcingError::Oracle(c) => c.into(),
            ForcingError::Model(m) => m.into(),
            ForcingError::Syntax(_) | ForcingError::Malformed(_) | ForcingError::UnknownCondition { .. } => Failure::Usage(e.to_string()),
            other => Failure::Refuted(other.to_string()),
        }
    }
}

impl From<ProofError> for Failure {
    fn from(e: ProofError) -> Self {
        match e {
            ProofError::Model(m) => m.into(),
            ProofError::Syntax(_) | ProofError::Malformed(_) => Failure::Usage(e.to_string()),
            other => Failure::Refuted(other.to_string()),
        }
    }
}
