use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::CompactError;
use crate::budget::Budget;
use crate::bvmodel::BValuedModel;
use crate::syntax::{nnf, qe_transform, Formula, Signature, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Consistent,
    Inconsistent,
    Unknown,
}

/// Closed search tree: every branch ends in a literal clash or an empty disjunction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Refutation {
    Closed { literals: Vec<String>, conflict: String },
    Split { disjunction: String, branches: Vec<Refutation> },
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleVerdict {
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_model")]
    pub witness: Option<BValuedModel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Refutation>,
    pub budget_used: u64,
}

fn ser_model<S: serde::Serializer>(m: &Option<BValuedModel>, s: S) -> Result<S::Ok, S::Error> {
    m.as_ref().map(BValuedModel::to_file).serialize(s)
}

impl OracleVerdict {
    pub fn is_consistent(&self) -> bool {
        self.status == Status::Consistent
    }

    pub fn is_inconsistent(&self) -> bool {
        self.status == Status::Inconsistent
    }
}

/// Instances of `∀x ⋁_{c∈C} x = c` at the base constants.
pub fn naming_axioms(sig: &Signature) -> Vec<Formula> {
    if sig.fresh_constants().is_empty() {
        return Vec::new();
    }
    sig.base_constants()
        .iter()
        .map(|d| Formula::Or(sig.fresh_constants().iter().map(|c| Formula::eq_c(d.clone(), c.clone())).collect()))
        .collect()
}

/// Ground form of a theory: quantified sentences go through the
/// quantifier-elimination transform over the fresh constants, together with
/// the naming axioms. Quantifier-free input passes unchanged.
pub fn ground(sentences: &[Formula], sig: &Signature) -> Result<Vec<Formula>, CompactError> {
    if !sentences.iter().any(Formula::has_quantifier) {
        return Ok(sentences.to_vec());
    }
    let mut out = sentences.iter().map(|s| qe_transform(s, sig)).collect::<Result<Vec<_>, _>>()?;
    out.extend(naming_axioms(sig));
    Ok(out)
}

/// Union-find over constants plus the literal store of one branch.
#[derive(Clone, Debug, Default)]
struct Store {
    parent: Vec<usize>,
    pos: Vec<(String, Vec<usize>)>,
    neg: Vec<(String, Vec<usize>)>,
    diseq: Vec<(usize, usize)>,
    literals: Vec<Formula>,
}

impl Store {
    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    fn canon(&self, t: &[usize]) -> Vec<usize> {
        t.iter().map(|&x| self.find(x)).collect()
    }

    fn add(&mut self, lit: &Formula, ids: &BTreeMap<String, usize>) {
        let id = |t: &Term| ids[t.as_const().expect("ground")];
        self.literals.push(lit.clone());
        match lit {
            Formula::Eq(a, b) => {
                let (ra, rb) = (self.find(id(a)), self.find(id(b)));
                if ra != rb {
                    let (lo, hi) = (ra.min(rb), ra.max(rb));
                    self.parent[hi] = lo;
                }
            }
            Formula::Atom { rel, args } => self.pos.push((rel.clone(), args.iter().map(id).collect())),
            Formula::Not(g) => match &**g {
                Formula::Eq(a, b) => self.diseq.push((id(a), id(b))),
                Formula::Atom { rel, args } => self.neg.push((rel.clone(), args.iter().map(id).collect())),
                _ => unreachable!("negation normal form"),
            },
            _ => unreachable!("literal expected"),
        }
    }

    fn pos_set(&self) -> BTreeSet<(String, Vec<usize>)> {
        self.pos.iter().map(|(r, t)| (r.clone(), self.canon(t))).collect()
    }

    fn conflict(&self) -> Option<String> {
        if let Some((a, b)) = self.diseq.iter().find(|(a, b)| self.find(*a) == self.find(*b)) {
            return Some(format!("disequality between {a} and {b} contradicts the equalities"));
        }
        let pos = self.pos_set();
        self.neg
            .iter()
            .find(|(r, t)| pos.contains(&(r.clone(), self.canon(t))))
            .map(|(r, _)| format!("relation {r} holds and fails on congruent tuples"))
    }

    fn entails(&self, lit: &Formula, ids: &BTreeMap<String, usize>) -> bool {
        let id = |t: &Term| ids[t.as_const().expect("ground")];
        match lit {
            Formula::And(cs) if cs.is_empty() => true,
            Formula::Eq(a, b) => self.find(id(a)) == self.find(id(b)),
            Formula::Atom { rel, args } => {
                let t: Vec<usize> = self.canon(&args.iter().map(id).collect::<Vec<_>>());
                self.pos.iter().any(|(r, u)| r == rel && self.canon(u) == t)
            }
            Formula::Not(g) => match &**g {
                Formula::Eq(a, b) => {
                    let (x, y) = (self.find(id(a)), self.find(id(b)));
                    self.diseq.iter().any(|&(p, q)| {
                        let (p, q) = (self.find(p), self.find(q));
                        (p, q) == (x, y) || (q, p) == (x, y)
                    })
                }
                Formula::Atom { rel, args } => {
                    let t: Vec<usize> = self.canon(&args.iter().map(id).collect::<Vec<_>>());
                    self.neg.iter().any(|(r, u)| r == rel && self.canon(u) == t)
                }
                _ => false,
            },
            _ => false,
        }
    }
}

enum Outcome {
    Sat(Store),
    Unsat(Refutation),
}

struct Search<'a> {
    ids: &'a BTreeMap<String, usize>,
    nodes: u64,
    cap: u64,
}

struct Exhausted;

impl Search<'_> {
    fn run(&mut self, mut pending: Vec<Formula>, mut ors: Vec<Formula>, mut store: Store) -> Result<Outcome, Exhausted> {
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(Exhausted);
        }
        while let Some(f) = pending.pop() {
            match f {
                Formula::And(cs) => pending.extend(cs),
                Formula::Or(ref cs) if cs.is_empty() => {
                    return Ok(Outcome::Unsat(Refutation::Closed {
                        literals: store.literals.iter().map(Formula::to_string).collect(),
                        conflict: "empty disjunction".into(),
                    }));
                }
                Formula::Or(_) => ors.push(f),
                lit => {
                    store.add(&lit, self.ids);
                    if let Some(conflict) = store.conflict() {
                        return Ok(Outcome::Unsat(Refutation::Closed {
                            literals: store.literals.iter().map(Formula::to_string).collect(),
                            conflict,
                        }));
                    }
                }
            }
        }
        ors.retain(|o| match o {
            Formula::Or(cs) => !cs.iter().any(|c| store.entails(c, self.ids)),
            _ => true,
        });
        let Some(pick) = (0..ors.len()).min_by_key(|&i| match &ors[i] {
            Formula::Or(cs) => cs.len(),
            _ => usize::MAX,
        }) else {
            return Ok(Outcome::Sat(store));
        };
        let chosen = ors.swap_remove(pick);
        let Formula::Or(children) = &chosen else { unreachable!() };
        let mut branches = Vec::new();
        let mut seen = BTreeSet::new();
        for child in children.iter().filter(|c| seen.insert(*c)) {
            match self.run(vec![child.clone()], ors.clone(), store.clone())? {
                Outcome::Sat(s) => return Ok(Outcome::Sat(s)),
                Outcome::Unsat(r) => branches.push(r),
            }
        }
        Ok(Outcome::Unsat(Refutation::Split { disjunction: chosen.to_string(), branches }))
    }
}

fn intern(sentences: &[Formula], sig: &Signature) -> (Vec<String>, BTreeMap<String, usize>) {
    let mut names: Vec<String> = sig.constants();
    for s in sentences {
        for c in s.constants() {
            if !names.contains(&c) {
                names.push(c);
            }
        }
    }
    let ids = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
    (names, ids)
}

/// Decides satisfiability of quantifier-free sentences by a tableau over
/// negation normal form with congruence closure on the constants.
pub fn consistency_oracle(sentences: &[Formula], sig: &Signature, budget: &Budget) -> Result<OracleVerdict, CompactError> {
    if let Some(bad) = sentences.iter().find(|s| s.has_quantifier() || !s.is_sentence()) {
        return Err(CompactError::NotGround(bad.to_string()));
    }
    let (names, ids) = intern(sentences, sig);
    let store = Store { parent: (0..names.len()).collect(), ..Store::default() };
    let mut search = Search { ids: &ids, nodes: 0, cap: budget.oracle_nodes };
    let pending: Vec<Formula> = sentences.iter().map(nnf).rev().collect();
    match search.run(pending, Vec::new(), store) {
        Err(Exhausted) => Ok(OracleVerdict { status: Status::Unknown, witness: None, certificate: None, budget_used: search.nodes }),
        Ok(Outcome::Unsat(r)) => Ok(OracleVerdict { status: Status::Inconsistent, witness: None, certificate: Some(r), budget_used: search.nodes }),
        Ok(Outcome::Sat(store)) => {
            let witness = build_witness(&store, &names, sig, sentences)?;
            for s in sentences {
                if !witness.satisfies(s)? {
                    return Err(CompactError::Internal(format!("oracle witness fails {s}")));
                }
            }
            Ok(OracleVerdict { status: Status::Consistent, witness: Some(witness), certificate: None, budget_used: search.nodes })
        }
    }
}

fn build_witness(store: &Store, names: &[String], sig: &Signature, sentences: &[Formula]) -> Result<BValuedModel, CompactError> {
    let mut class_of = vec![0; names.len()];
    let mut reps: Vec<usize> = Vec::new();
    for x in 0..names.len() {
        let r = store.find(x);
        match reps.iter().position(|&y| y == r) {
            Some(i) => class_of[x] = i,
            None => {
                class_of[x] = reps.len();
                reps.push(r);
            }
        }
    }
    if reps.is_empty() {
        reps.push(usize::MAX);
    }
    let mut arities: BTreeMap<String, usize> = sig.relations().clone();
    for s in sentences {
        collect_relations(s, &mut arities);
    }
    let pos = store.pos_set();
    let k = reps.len();
    let dom: Vec<usize> = (0..k).collect();
    let relations = arities
        .iter()
        .map(|(r, &a)| {
            let vals = crate::syntax::tuples(&dom, a).iter().map(|t| pos.contains(&(r.clone(), t.iter().map(|&i| reps[i]).collect()))).collect();
            (r.clone(), (a, vals))
        })
        .collect::<BTreeMap<_, _>>();
    let labels = reps.iter().map(|&r| names.get(r).cloned().unwrap_or_else(|| "e0".into())).collect();
    let consts = names.iter().enumerate().map(|(i, n)| (n.clone(), class_of[i])).collect();
    Ok(BValuedModel::tarski(labels, relations, consts)?)
}

fn collect_relations(f: &Formula, out: &mut BTreeMap<String, usize>) {
    match f {
        Formula::Atom { rel, args } => {
            out.insert(rel.clone(), args.len());
        }
        Formula::Eq(..) => {}
        Formula::Not(g) | Formula::Forall(_, g) | Formula::Exists(_, g) => collect_relations(g, out),
        Formula::And(cs) | Formula::Or(cs) => cs.iter().for_each(|c| collect_relations(c, out)),
    }
}

/// Convenience wrapper: grounds the theory first, then runs the oracle.
pub fn decide(sentences: &[Formula], sig: &Signature, budget: &Budget) -> Result<OracleVerdict, CompactError> {
    consistency_oracle(&ground(sentences, sig)?, sig, budget)
}

/// Re-checks a refutation against the input: each split must be on a
/// disjunction derivable on its branch, with one branch per distinct
/// disjunct, and each leaf's clash must be reproducible from literals
/// derivable on that branch.
pub fn replay_refutation(sentences: &[Formula], sig: &Signature, r: &Refutation) -> bool {
    let (names, ids) = intern(sentences, sig);
    let mut derived = BTreeSet::new();
    for s in sentences {
        decompose(&nnf(s), &mut derived);
    }
    replay(r, &derived, &names, &ids)
}

fn decompose(f: &Formula, out: &mut BTreeSet<Formula>) {
    if let Formula::And(cs) = f {
        cs.iter().for_each(|c| decompose(c, out));
    } else {
        out.insert(f.clone());
    }
}

fn replay(r: &Refutation, derived: &BTreeSet<Formula>, names: &[String], ids: &BTreeMap<String, usize>) -> bool {
    match r {
        Refutation::Split { disjunction, branches } => {
            let Some(Formula::Or(cs)) = derived.iter().find(|f| f.to_string() == *disjunction) else {
                return false;
            };
            let mut seen = BTreeSet::new();
            let kids: Vec<&Formula> = cs.iter().filter(|c| seen.insert(*c)).collect();
            kids.len() == branches.len()
                && kids.iter().zip(branches).all(|(k, b)| {
                    let mut d = derived.clone();
                    decompose(k, &mut d);
                    replay(b, &d, names, ids)
                })
        }
        Refutation::Closed { literals, conflict } => {
            if conflict == "empty disjunction" {
                return derived.contains(&Formula::bottom());
            }
            let mut store = Store { parent: (0..names.len()).collect(), ..Store::default() };
            for l in literals {
                let Some(f) = derived.iter().find(|f| f.is_literal() && f.to_string() == *l) else {
                    return false;
                };
                store.add(f, ids);
            }
            store.conflict().is_some()
        }
    }
}
