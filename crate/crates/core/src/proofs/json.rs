use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ProofError, ProofTree, Rule, RuleData, Sequent};
use crate::syntax::{parse, parse_term, Formula, Signature, Term};

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
struct SequentFile {
    #[serde(default)]
    left: Vec<String>,
    #[serde(default)]
    right: Vec<String>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
struct DataFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    principal: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    terms: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    template: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    vars: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    from: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    to: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cut: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    binding: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct ProofFile {
    rule: Rule,
    conclusion: SequentFile,
    #[serde(default)]
    data: DataFile,
    #[serde(default)]
    premises: Vec<ProofFile>,
}

fn var_name(v: &str) -> String {
    v.strip_prefix('?').unwrap_or(v).to_string()
}

impl ProofFile {
    fn from_tree(p: &ProofTree) -> Self {
        let fs = |s: &std::collections::BTreeSet<Formula>| s.iter().map(Formula::to_string).collect();
        let ts = |t: &[Term]| t.iter().map(Term::to_string).collect();
        let d = &p.data;
        ProofFile {
            rule: p.rule,
            conclusion: SequentFile { left: fs(&p.conclusion.left), right: fs(&p.conclusion.right) },
            data: DataFile {
                principal: d.principal.as_ref().map(Formula::to_string),
                terms: ts(&d.terms),
                template: d.template.as_ref().map(Formula::to_string),
                vars: d.vars.iter().map(|v| format!("?{v}")).collect(),
                from: ts(&d.from),
                to: ts(&d.to),
                cut: d.cut.as_ref().map(Formula::to_string),
                binding: d.binding.iter().map(|(v, t)| (format!("?{v}"), t.to_string())).collect(),
            },
            premises: p.premises.iter().map(ProofFile::from_tree).collect(),
        }
    }

    fn to_tree(&self, sig: &Signature) -> Result<ProofTree, ProofError> {
        let f = |s: &String| parse(s, sig).map_err(ProofError::from);
        let fo = |s: &Option<String>| s.as_ref().map(f).transpose();
        let ts = |v: &[String]| v.iter().map(|t| parse_term(t, sig).map_err(ProofError::from)).collect::<Result<Vec<_>, _>>();
        let d = &self.data;
        let data = RuleData {
            principal: fo(&d.principal)?,
            terms: ts(&d.terms)?,
            template: fo(&d.template)?,
            vars: d.vars.iter().map(|v| var_name(v)).collect(),
            from: ts(&d.from)?,
            to: ts(&d.to)?,
            cut: fo(&d.cut)?,
            binding: d.binding.iter().map(|(v, t)| Ok((var_name(v), parse_term(t, sig)?))).collect::<Result<_, ProofError>>()?,
        };
        let conclusion = Sequent {
            left: self.conclusion.left.iter().map(f).collect::<Result<_, _>>()?,
            right: self.conclusion.right.iter().map(f).collect::<Result<_, _>>()?,
        };
        let premises = self.premises.iter().map(|p| p.to_tree(sig)).collect::<Result<_, _>>()?;
        Ok(ProofTree { conclusion, rule: self.rule, data, premises })
    }
}

impl ProofTree {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ProofFile::from_tree(self)).expect("proof serializes")
    }

    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(ProofFile::from_tree(self)).expect("proof serializes")
    }

    pub fn from_json(text: &str, sig: &Signature) -> Result<Self, ProofError> {
        let file: ProofFile = serde_json::from_str(text).map_err(|e| ProofError::Malformed(e.to_string()))?;
        file.to_tree(sig)
    }
}
