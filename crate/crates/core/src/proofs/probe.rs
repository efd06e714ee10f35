use std::collections::BTreeMap;

use rand::RngExt;
use serde::Serialize;

use super::{check_proof, ProofError, ProofTree, Rule};
use crate::balg::Elem;
use crate::budget::Budget;
use crate::bvmodel::{Assignment, Evaluator};
use crate::gen::{prng, random_model};
use crate::syntax::{tuples, Formula, Term};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProbeCounterexample {
    pub trial: usize,
    pub path: Vec<usize>,
    pub assignment: BTreeMap<String, String>,
    pub left_value: Elem,
    pub right_value: Elem,
    pub model: serde_json::Value,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProbeReport {
    pub holds: bool,
    pub trials: usize,
    pub seed: u64,
    /// Sequent-under-assignment comparisons performed.
    pub checks: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<ProbeCounterexample>,
}

fn collect(f: &Formula, rels: &mut BTreeMap<String, usize>, consts: &mut std::collections::BTreeSet<String>) {
    match f {
        Formula::Atom { rel, args } => {
            rels.insert(rel.clone(), args.len());
        }
        Formula::Eq(..) => {}
        Formula::Not(g) | Formula::Forall(_, g) | Formula::Exists(_, g) => collect(g, rels, consts),
        Formula::And(cs) | Formula::Or(cs) => cs.iter().for_each(|c| collect(c, rels, consts)),
    }
    consts.extend(f.constants());
}

fn symbols(p: &ProofTree, rels: &mut BTreeMap<String, usize>, consts: &mut std::collections::BTreeSet<String>) {
    let d = &p.data;
    let fs = p.conclusion.left.iter().chain(&p.conclusion.right).chain(&d.principal).chain(&d.template).chain(&d.cut);
    for f in fs {
        collect(f, rels, consts);
    }
    for t in d.terms.iter().chain(&d.from).chain(&d.to).chain(d.binding.values()) {
        if let Term::Const(c) = t {
            consts.insert(c.clone());
        }
    }
    for q in &p.premises {
        symbols(q, rels, consts);
    }
}

/// Samples random models and checks `⟦⋀Γ⟧ ≤ ⟦⋁Δ⟧` at every node under every
/// assignment of its free variables. Unchecked trees are rejected first.
pub fn soundness_probe(p: &ProofTree, trials: usize, seed: u64, budget: &Budget) -> Result<ProbeReport, ProofError> {
    let verdict = check_proof(p);
    if let Some(f) = verdict.failure {
        return Err(ProofError::Unchecked { path: f.path, reason: f.reason });
    }
    let mut rels = BTreeMap::new();
    let mut consts = std::collections::BTreeSet::new();
    symbols(p, &mut rels, &mut consts);
    let consts: Vec<String> = consts.into_iter().collect();
    let mut rng = prng(seed);
    let mut checks = 0;
    let paths = p.paths();
    for trial in 0..trials {
        let domain = rng.random_range(1..=3);
        let atoms = rng.random_range(1..=3);
        let m = random_model(&mut rng, &rels, &consts, domain, atoms);
        let dom: Vec<usize> = (0..domain).collect();
        for path in &paths {
            let node = p.node(path).expect("path from paths()");
            let vars: Vec<String> = node.conclusion.free_vars().into_iter().collect();
            for tuple in tuples(&dom, vars.len()) {
                checks += 1;
                let a: Assignment = vars.iter().cloned().zip(tuple.iter().copied()).collect();
                let mut ev = Evaluator::new(&m, budget.eval_cap);
                let mut lhs = m.algebra().one();
                for f in &node.conclusion.left {
                    lhs = lhs.meet(&ev.eval(f, &a)?);
                }
                let mut rhs = m.algebra().zero();
                for f in &node.conclusion.right {
                    rhs = rhs.join(&ev.eval(f, &a)?);
                }
                if !lhs.leq(&rhs) {
                    return Ok(ProbeReport {
                        holds: false,
                        trials,
                        seed,
                        checks,
                        counterexample: Some(ProbeCounterexample {
                            trial,
                            path: path.clone(),
                            assignment: a.iter().map(|(v, &i)| (v.clone(), m.domain()[i].clone())).collect(),
                            left_value: lhs,
                            right_value: rhs,
                            model: serde_json::to_value(m.to_file()).expect("model serializes"),
                        }),
                    });
                }
            }
        }
    }
    Ok(ProbeReport { holds: true, trials, seed, checks, counterexample: None })
}

/// Single-node corruptions of a proof: each node gets its rule renamed, and
/// where applicable its principal or cut formula negated and its last premise
/// dropped.
pub fn mutations(p: &ProofTree) -> Vec<(String, ProofTree)> {
    let mut out = Vec::new();
    for path in p.paths() {
        let node = p.node(&path).expect("valid path");
        let at = format!("{path:?}");
        let mut push = |what: String, edit: &dyn Fn(&mut ProofTree)| {
            let mut q = p.clone();
            edit(q.node_mut(&path).expect("valid path"));
            out.push((format!("{what} at {at}"), q));
        };
        let idx = Rule::ALL.iter().position(|&r| r == node.rule).expect("known rule");
        let renamed = Rule::ALL[(idx + 1) % Rule::ALL.len()];
        push(format!("rename {} to {}", node.rule.name(), renamed.name()), &|n| n.rule = renamed);
        if node.data.principal.is_some() {
            push("negate principal".into(), &|n| n.data.principal = n.data.principal.take().map(Formula::negate));
        }
        if node.data.cut.is_some() {
            push("negate cut formula".into(), &|n| n.data.cut = n.data.cut.take().map(Formula::negate));
        }
        if !node.premises.is_empty() {
            push("drop premise".into(), &|n| {
                n.premises.pop();
            });
        }
    }
    out
}
