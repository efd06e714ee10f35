use std::collections::BTreeSet;

use serde::{Serialize, Serializer};

use super::{decide, CompactError, OracleVerdict, Status};
use crate::budget::Budget;
use crate::bvmodel::BValuedModel;
use crate::syntax::{subsentences, Formula, Signature};

pub(crate) fn ser_formulas<S: Serializer>(fs: &Option<Vec<Formula>>, s: S) -> Result<S::Ok, S::Error> {
    fs.as_ref().map(|v| v.iter().map(Formula::to_string).collect::<Vec<_>>()).serialize(s)
}

/// Conjuncts of `f` after flattening nested conjunctions, as a set.
pub fn conjunct_key(f: &Formula) -> BTreeSet<Formula> {
    let mut out = BTreeSet::new();
    fn walk(f: &Formula, out: &mut BTreeSet<Formula>) {
        match f {
            Formula::And(cs) => cs.iter().for_each(|c| walk(c, out)),
            _ => {
                out.insert(f.clone());
            }
        }
    }
    walk(f, &mut out);
    out
}

/// Conjunctions of all nonempty subsets of `gens`, smaller subsets first.
/// Singletons are the generators themselves.
pub fn conjunction_closure(gens: &[Formula]) -> Vec<Formula> {
    let n = gens.len();
    let mut masks: Vec<u32> = (1..(1u32 << n)).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    let mut out: Vec<Formula> = Vec::new();
    let mut keys: Vec<BTreeSet<Formula>> = Vec::new();
    for m in masks {
        let chosen: Vec<Formula> = (0..n).filter(|i| m & (1 << i) != 0).map(|i| gens[i].clone()).collect();
        let f = if chosen.len() == 1 { chosen[0].clone() } else { Formula::And(chosen) };
        let key = conjunct_key(&f);
        if !keys.contains(&key) {
            keys.push(key);
            out.push(f);
        }
    }
    out
}

enum Answer {
    Yes(Option<BValuedModel>),
    No,
}

struct Oracle<'a> {
    sig: &'a Signature,
    budget: &'a Budget,
    used: u64,
}

impl Oracle<'_> {
    fn ask(&mut self, sentences: &[Formula]) -> Result<Answer, CompactError> {
        let v: OracleVerdict = decide(sentences, self.sig, self.budget)?;
        self.used += v.budget_used;
        match v.status {
            Status::Consistent => Ok(Answer::Yes(v.witness)),
            Status::Inconsistent => Ok(Answer::No),
            Status::Unknown => Err(CompactError::Unknown(format!("deciding a set of {} sentences", sentences.len()))),
        }
    }

    fn consistent(&mut self, sentences: &[Formula]) -> Result<bool, CompactError> {
        Ok(matches!(self.ask(sentences)?, Answer::Yes(_)))
    }
}

fn with(base: &[Formula], extra: impl IntoIterator<Item = Formula>) -> Vec<Formula> {
    let mut v = base.to_vec();
    v.extend(extra);
    v
}

/// The maximal subsets of `universe` consistent with `base`, as sorted index
/// lists. Each is the set of universe sentences true in some model of `base`,
/// grown one sentence at a time until nothing more can be added.
pub fn maximal_types(base: &[Formula], universe: &[Formula], sig: &Signature, budget: &Budget) -> Result<Vec<Vec<usize>>, CompactError> {
    let mut oracle = Oracle { sig, budget, used: 0 };
    maximal_types_with(&mut oracle, base, universe)
}

fn true_in(m: &BValuedModel, universe: &[Formula]) -> Result<BTreeSet<usize>, CompactError> {
    let mut out = BTreeSet::new();
    for (i, f) in universe.iter().enumerate() {
        if m.satisfies(f)? {
            out.insert(i);
        }
    }
    Ok(out)
}

fn maximal_types_with(oracle: &mut Oracle, base: &[Formula], universe: &[Formula]) -> Result<Vec<Vec<usize>>, CompactError> {
    let mut types = Vec::new();
    let mut blocks: Vec<Formula> = Vec::new();
    loop {
        let w = match oracle.ask(&with(base, blocks.iter().cloned()))? {
            Answer::No => break,
            Answer::Yes(w) => w.expect("consistent verdicts carry a witness"),
        };
        let mut t = true_in(&w, universe)?;
        for i in 0..universe.len() {
            if t.contains(&i) {
                continue;
            }
            let trial = with(base, t.iter().map(|&j| universe[j].clone()).chain([universe[i].clone()]));
            if let Answer::Yes(Some(w)) = oracle.ask(&trial)? {
                t = true_in(&w, universe)?;
            }
        }
        let rest: Vec<Formula> = (0..universe.len()).filter(|i| !t.contains(i)).map(|i| universe[i].clone()).collect();
        types.push(t.into_iter().collect());
        if rest.is_empty() {
            break;
        }
        blocks.push(Formula::Or(rest));
    }
    Ok(types)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Conservativity {
    Conservative,
    /// Every subset up to the size cap passed; larger subsets were not examined.
    BoundedConservative,
    NotConservative,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// Maximal consistent subsets of the subsentences; `checked_subsets` counts them.
    Types,
    /// Explicit enumeration of subsets up to the size cap.
    Subsets,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConservativityReport {
    pub verdict: Conservativity,
    pub entailment_ok: bool,
    pub checked_subsets: u64,
    #[serde(serialize_with = "ser_formulas", skip_serializing_if = "Option::is_none")]
    pub violating_subset: Option<Vec<Formula>>,
    pub route: Route,
    pub budget_used: u64,
}

impl ConservativityReport {
    pub fn holds(&self) -> bool {
        matches!(self.verdict, Conservativity::Conservative | Conservativity::BoundedConservative)
    }
}

/// Whether `psi1` is a conservative strengthening of `psi0`: it entails
/// `psi0`, and every set of subsentences of `psi0` consistent with `psi0` is
/// consistent with `psi1`. With `budget.max_subset` unset every subset is
/// covered, via the maximal ones; with a cap only the small subsets are tried.
pub fn is_conservative_strengthening(psi1: &Formula, psi0: &Formula, sig: &Signature, budget: &Budget) -> Result<ConservativityReport, CompactError> {
    let route = if budget.max_subset.is_some() { Route::Subsets } else { Route::Types };
    let mut oracle = Oracle { sig, budget, used: 0 };
    let mut report = ConservativityReport {
        verdict: Conservativity::Unknown,
        entailment_ok: false,
        checked_subsets: 0,
        violating_subset: None,
        route,
        budget_used: 0,
    };
    let result = conservativity(&mut oracle, psi1, psi0, budget.max_subset, &mut report);
    report.budget_used = oracle.used;
    match result {
        Ok(()) => Ok(report),
        Err(CompactError::Unknown(_)) => {
            report.verdict = Conservativity::Unknown;
            Ok(report)
        }
        Err(e) => Err(e),
    }
}

fn conservativity(oracle: &mut Oracle, psi1: &Formula, psi0: &Formula, cap: Option<usize>, report: &mut ConservativityReport) -> Result<(), CompactError> {
    report.entailment_ok = !oracle.consistent(&[psi1.clone(), psi0.clone().negate()])?;
    if !report.entailment_ok {
        report.verdict = Conservativity::NotConservative;
        return Ok(());
    }
    let subs: Vec<Formula> = subsentences(psi0, oracle.sig).into_iter().collect();
    let bad = match cap {
        None => {
            let types = maximal_types_with(oracle, std::slice::from_ref(psi0), &subs)?;
            let mut bad = None;
            for t in types {
                report.checked_subsets += 1;
                let s: Vec<Formula> = t.iter().map(|&i| subs[i].clone()).collect();
                if !oracle.consistent(&with(std::slice::from_ref(psi1), s.iter().cloned()))? {
                    bad = Some(s);
                    break;
                }
            }
            bad
        }
        Some(k) => {
            let mut current = Vec::new();
            subset_search(oracle, psi0, psi1, &subs, k, 0, &mut current, &mut report.checked_subsets)?
        }
    };
    match bad {
        Some(s) => {
            report.violating_subset = Some(minimize(oracle, psi1, s)?);
            report.verdict = Conservativity::NotConservative;
        }
        None => report.verdict = if cap.is_some() { Conservativity::BoundedConservative } else { Conservativity::Conservative },
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn subset_search(
    oracle: &mut Oracle,
    psi0: &Formula,
    psi1: &Formula,
    subs: &[Formula],
    k: usize,
    from: usize,
    current: &mut Vec<Formula>,
    checked: &mut u64,
) -> Result<Option<Vec<Formula>>, CompactError> {
    *checked += 1;
    if !oracle.consistent(&with(std::slice::from_ref(psi1), current.iter().cloned()))? {
        return Ok(Some(current.clone()));
    }
    if current.len() == k {
        return Ok(None);
    }
    for j in from..subs.len() {
        current.push(subs[j].clone());
        if oracle.consistent(&with(std::slice::from_ref(psi0), current.iter().cloned()))? {
            if let Some(bad) = subset_search(oracle, psi0, psi1, subs, k, j + 1, current, checked)? {
                return Ok(Some(bad));
            }
        }
        current.pop();
    }
    Ok(None)
}

/// Drops sentences one at a time while the set stays inconsistent with `psi1`.
fn minimize(oracle: &mut Oracle, psi1: &Formula, mut s: Vec<Formula>) -> Result<Vec<Formula>, CompactError> {
    let mut i = 0;
    while i < s.len() {
        let mut trial = s.clone();
        trial.remove(i);
        if oracle.consistent(&with(std::slice::from_ref(psi1), trial.iter().cloned()))? {
            i += 1;
        } else {
            s = trial;
        }
    }
    Ok(s)
}

#[derive(Clone, Debug, Serialize)]
pub struct FinConsFailure {
    pub conjunction: String,
    pub member: String,
    pub report: ConservativityReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct FinConsReport {
    pub holds: bool,
    /// Some pairwise check ran under a subset cap.
    pub bounded: bool,
    pub consistent_member: Option<usize>,
    /// Two members whose conjunction is missing from the family.
    pub closure_gap: Option<(usize, usize)>,
    pub failure: Option<FinConsFailure>,
    pub checked_pairs: usize,
}

/// Checks that some member is consistent, that the family is closed under
/// conjunction (compared by conjunct sets), and that each member is a
/// conservative strengthening of every member whose conjuncts it contains.
pub fn is_finitely_conservative(family: &[Formula], sig: &Signature, budget: &Budget) -> Result<FinConsReport, CompactError> {
    let mut report = FinConsReport { holds: false, bounded: budget.max_subset.is_some(), consistent_member: None, closure_gap: None, failure: None, checked_pairs: 0 };
    let mut oracle = Oracle { sig, budget, used: 0 };
    for (i, f) in family.iter().enumerate() {
        if oracle.consistent(std::slice::from_ref(f))? {
            report.consistent_member = Some(i);
            break;
        }
    }
    if report.consistent_member.is_none() {
        return Ok(report);
    }
    let keys: Vec<BTreeSet<Formula>> = family.iter().map(conjunct_key).collect();
    for i in 0..family.len() {
        for j in i + 1..family.len() {
            let union: BTreeSet<Formula> = keys[i].union(&keys[j]).cloned().collect();
            if !keys.contains(&union) {
                report.closure_gap = Some((i, j));
                return Ok(report);
            }
        }
    }
    let mut order: Vec<usize> = (0..family.len()).collect();
    order.sort_by_key(|&k| (keys[k].len(), k));
    for &k in &order {
        for i in 0..family.len() {
            if i == k || !keys[i].is_subset(&keys[k]) || keys[i] == keys[k] {
                continue;
            }
            report.checked_pairs += 1;
            let r = is_conservative_strengthening(&family[k], &family[i], sig, budget)?;
            if r.verdict == Conservativity::Unknown {
                return Err(CompactError::Unknown(format!("checking {} over {}", family[k], family[i])));
            }
            if !r.holds() {
                report.failure = Some(FinConsFailure { conjunction: family[k].to_string(), member: family[i].to_string(), report: r });
                return Ok(report);
            }
        }
    }
    report.holds = true;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compact::faicom_family;
    use crate::syntax::parse;

    fn sig() -> Signature {
        Signature::with_fresh(&[("P", 1)], 3)
    }

    #[test]
    fn identity_is_conservative() {
        let s = sig();
        let f = parse("(or (P c0) (= c1 c2))", &s).unwrap();
        let r = is_conservative_strengthening(&f, &f, &s, &Budget::default()).unwrap();
        assert_eq!(r.verdict, Conservativity::Conservative);
    }

    #[test]
    fn excluding_a_disjunct_is_not_conservative() {
        let s = sig();
        let psi0 = parse("(or (= c2 c0) (= c2 c1))", &s).unwrap();
        let psi1 = Formula::And(vec![psi0.clone(), Formula::neq_c("c2", "c0")]);
        for budget in [Budget::default(), Budget { max_subset: Some(2), ..Budget::default() }] {
            let r = is_conservative_strengthening(&psi1, &psi0, &s, &budget).unwrap();
            assert_eq!(r.verdict, Conservativity::NotConservative);
            assert!(r.entailment_ok);
            assert_eq!(r.violating_subset.unwrap(), vec![Formula::eq_c("c2", "c0")]);
        }
    }

    #[test]
    fn trivial_conjunct_is_conservative_and_bounded_label() {
        let s = sig();
        let psi0 = parse("(or (P c0) (not (P c1)))", &s).unwrap();
        let psi1 = Formula::And(vec![psi0.clone(), Formula::eq_c("c2", "c2")]);
        let r = is_conservative_strengthening(&psi1, &psi0, &s, &Budget::default()).unwrap();
        assert_eq!(r.verdict, Conservativity::Conservative);
        let b = Budget { max_subset: Some(1), ..Budget::default() };
        assert_eq!(is_conservative_strengthening(&psi1, &psi0, &s, &b).unwrap().verdict, Conservativity::BoundedConservative);
    }

    #[test]
    fn non_entailment_fails() {
        let s = sig();
        let psi0 = parse("(P c0)", &s).unwrap();
        let psi1 = parse("(P c1)", &s).unwrap();
        let r = is_conservative_strengthening(&psi1, &psi0, &s, &Budget::default()).unwrap();
        assert!(!r.entailment_ok);
        assert!(!r.holds());
    }

    #[test]
    fn types_are_maximal_and_distinct() {
        let s = sig();
        let u = vec![parse("(P c0)", &s).unwrap(), parse("(P c1)", &s).unwrap()];
        let base = vec![parse("(or (not (P c0)) (not (P c1)))", &s).unwrap()];
        let mut t = maximal_types(&base, &u, &s, &Budget::default()).unwrap();
        t.sort();
        assert_eq!(t, vec![vec![0], vec![1]]);
    }

    #[test]
    fn closure_and_keys() {
        let s = sig();
        let a = parse("(P c0)", &s).unwrap();
        let b = parse("(P c1)", &s).unwrap();
        let c = parse("(and (P c0) (P c1))", &s).unwrap();
        let cl = conjunction_closure(&[a.clone(), b.clone(), c.clone()]);
        assert_eq!(cl.len(), 3);
        assert_eq!(conjunct_key(&Formula::And(vec![a.clone(), Formula::And(vec![b.clone()])])), conjunct_key(&c));
    }

    #[test]
    fn singleton_of_consistent_theory() {
        let s = sig();
        let t = parse("(and (P c0) (not (= c0 c1)))", &s).unwrap();
        assert!(is_finitely_conservative(&[t], &s, &Budget::default()).unwrap().holds);
    }

    #[test]
    fn missing_conjunction_is_reported() {
        let s = sig();
        let a = parse("(P c0)", &s).unwrap();
        let b = parse("(P c1)", &s).unwrap();
        let r = is_finitely_conservative(&[a.clone(), Formula::And(vec![a.clone(), a.clone()]), b], &s, &Budget::default()).unwrap();
        assert!(!r.holds);
        assert_eq!(r.closure_gap, Some((0, 2)));
    }

    #[test]
    fn faicom_closure_fails_on_one_equation() {
        let (family, sig) = faicom_family(2);
        let r = is_finitely_conservative(&conjunction_closure(&family), &sig, &Budget::default()).unwrap();
        assert!(!r.holds);
        let f = r.failure.unwrap();
        assert_eq!(f.member, family[2].to_string());
        assert_eq!(f.report.violating_subset.unwrap(), vec![Formula::eq_c("c2", "c0")]);
        assert!(f.conjunction.contains("(not (= c0 c2))"));
    }
}
