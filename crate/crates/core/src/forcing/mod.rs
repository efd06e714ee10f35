//! The poset of finite condition sets for a sentence, dense sets, generic
//! filters built along a descending chain, and their term models.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::budget::Budget;
use crate::bvmodel::{BValuedModel, BvError};
use crate::compact::{decide, ground_atoms, CompactError, Status};
use crate::syntax::{parse, subsentences, tuples, Formula, Signature, SyntaxError, Term};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ForcingError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Oracle(#[from] CompactError),
    #[error(transparent)]
    Model(#[from] BvError),
    #[error("{0} is inconsistent, the poset is empty")]
    Inconsistent(String),
    #[error("dense set #{index} is not dense")]
    NotDense { index: usize },
    #[error("dense set #{index} refers to condition {condition}, which does not exist")]
    UnknownCondition { index: usize, condition: usize },
    #[error("the filter is not maximal")]
    NotMaximal,
    #[error("term model is ill defined: {0}")]
    IllDefined(String),
    #[error("malformed poset file: {0}")]
    Malformed(String),
}

/// Finite sets `s` of proper subsentences of `phi` and ground literals with
/// `s ∪ {phi}` consistent, ordered by reverse inclusion.
#[derive(Clone, Debug, PartialEq)]
pub struct SPhiPoset {
    pub phi: Formula,
    pub sig: Signature,
    pub pool: Vec<Formula>,
    pub conditions: Vec<BTreeSet<Formula>>,
    /// Candidates the oracle could not decide; excluded from `conditions`.
    pub flagged: Vec<BTreeSet<Formula>>,
    pub size_bound: Option<usize>,
}

#[derive(Serialize, Deserialize)]
pub struct PosetFile {
    pub phi: String,
    pub size_bound: Option<usize>,
    pub conditions: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flagged: Vec<Vec<String>>,
}

impl SPhiPoset {
    pub fn len(&self) -> usize {
        self.conditions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.conditions.is_empty()
    }

    /// `s ≤ t` iff `t ⊆ s`.
    pub fn leq(&self, s: usize, t: usize) -> bool {
        self.conditions[t].is_subset(&self.conditions[s])
    }

    pub fn index_of(&self, s: &BTreeSet<Formula>) -> Option<usize> {
        self.conditions.iter().position(|c| c == s)
    }

    /// Whether condition `i` has no proper extension in the poset.
    pub fn is_maximal_condition(&self, i: usize) -> bool {
        let c = &self.conditions[i];
        !self.conditions.iter().any(|d| d.len() > c.len() && c.is_subset(d))
    }

    pub fn dump(&self) -> PosetFile {
        let render = |s: &BTreeSet<Formula>| s.iter().map(Formula::to_string).collect();
        PosetFile {
            phi: self.phi.to_string(),
            size_bound: self.size_bound,
            conditions: self.conditions.iter().map(render).collect(),
            flagged: self.flagged.iter().map(render).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.dump()).expect("poset serializes")
    }

    /// Loads a dump and re-checks every condition against the oracle.
    pub fn from_json(text: &str, sig: &Signature, budget: &Budget) -> Result<Self, ForcingError> {
        let file: PosetFile = serde_json::from_str(text).map_err(|e| ForcingError::Malformed(e.to_string()))?;
        let phi = parse(&file.phi, sig)?;
        let parse_set = |c: &Vec<String>| c.iter().map(|s| parse(s, sig)).collect::<Result<BTreeSet<_>, _>>();
        let conditions = file.conditions.iter().map(parse_set).collect::<Result<Vec<_>, _>>()?;
        let flagged = file.flagged.iter().map(parse_set).collect::<Result<Vec<_>, _>>()?;
        let pool = condition_pool(&phi, sig);
        for c in &conditions {
            if let Some(bad) = c.iter().find(|f| !pool.contains(f)) {
                return Err(ForcingError::Malformed(format!("{bad} is neither a proper subsentence nor a ground literal")));
            }
            if let Some(b) = file.size_bound {
                if c.len() > b {
                    return Err(ForcingError::Malformed("condition exceeds the size bound".into()));
                }
            }
            if consistent_with(&phi, c, sig, budget)? != Some(true) {
                return Err(ForcingError::Malformed(format!("condition {{{}}} is not consistent with the sentence", render_set(c).join(", "))));
            }
        }
        Ok(SPhiPoset { phi, sig: sig.clone(), pool, conditions, flagged, size_bound: file.size_bound })
    }
}

fn render_set(s: &BTreeSet<Formula>) -> Vec<String> {
    s.iter().map(Formula::to_string).collect()
}

/// Proper subsentences of `phi` together with every ground atomic sentence
/// over the constants of `sig` and its negation.
pub fn condition_pool(phi: &Formula, sig: &Signature) -> Vec<Formula> {
    let mut pool: BTreeSet<Formula> = subsentences(phi, sig).into_iter().filter(|f| f != phi).collect();
    for a in ground_atoms(sig) {
        pool.insert(a.clone().negate());
        pool.insert(a);
    }
    pool.into_iter().collect()
}

fn consistent_with(phi: &Formula, s: &BTreeSet<Formula>, sig: &Signature, budget: &Budget) -> Result<Option<bool>, ForcingError> {
    let mut t = vec![phi.clone()];
    t.extend(s.iter().cloned());
    Ok(match decide(&t, sig, budget)?.status {
        Status::Consistent => Some(true),
        Status::Inconsistent => Some(false),
        Status::Unknown => None,
    })
}

/// Enumerates every condition with at most `size_bound` elements (all of
/// them when `None`).
pub fn build_sphi(phi: &Formula, sig: &Signature, size_bound: Option<usize>, budget: &Budget) -> Result<SPhiPoset, ForcingError> {
    let pool = condition_pool(phi, sig);
    let mut p = SPhiPoset { phi: phi.clone(), sig: sig.clone(), pool, conditions: Vec::new(), flagged: Vec::new(), size_bound };
    match consistent_with(phi, &BTreeSet::new(), sig, budget)? {
        Some(true) => {}
        Some(false) => return Err(ForcingError::Inconsistent(phi.to_string())),
        None => return Err(CompactError::Unknown(format!("deciding {phi}")).into()),
    }
    p.conditions.push(BTreeSet::new());
    let bound = size_bound.unwrap_or(p.pool.len());
    let mut current = BTreeSet::new();
    extend(&mut p, budget, bound, 0, &mut current)?;
    Ok(p)
}

fn extend(p: &mut SPhiPoset, budget: &Budget, bound: usize, from: usize, current: &mut BTreeSet<Formula>) -> Result<(), ForcingError> {
    if current.len() == bound {
        return Ok(());
    }
    for j in from..p.pool.len() {
        let f = p.pool[j].clone();
        current.insert(f.clone());
        match consistent_with(&p.phi, current, &p.sig, budget)? {
            Some(true) => {
                p.conditions.push(current.clone());
                extend(p, budget, bound, j + 1, current)?;
            }
            Some(false) => {}
            None => p.flagged.push(current.clone()),
        }
        current.remove(&f);
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Density {
    /// Every condition is included in some member of the set.
    #[default]
    Subset,
    /// Every condition is strictly included in some member of the set.
    StrictExtension,
}

#[derive(Clone, Debug, Serialize)]
pub struct DenseVerdict {
    pub dense: bool,
    /// A condition with no extension in the set.
    pub uncovered: Option<Vec<String>>,
}

pub fn is_dense(d: &[usize], p: &SPhiPoset, mode: Density) -> DenseVerdict {
    for (i, s) in p.conditions.iter().enumerate() {
        let covered = d.iter().filter(|&&t| t < p.len()).any(|&t| {
            let t = &p.conditions[t];
            s.is_subset(t) && (mode == Density::Subset || t.len() > s.len())
        });
        if !covered {
            return DenseVerdict { dense: false, uncovered: Some(render_set(&p.conditions[i])) };
        }
    }
    DenseVerdict { dense: true, uncovered: None }
}

#[derive(Clone, Debug, Serialize)]
pub struct DenseSet {
    pub label: String,
    pub members: Vec<usize>,
}

/// Dense sets in a fixed order: for each ground atom the conditions deciding
/// it, then for each disjunction among the proper subsentences the
/// conditions that contain a disjunct or are incompatible with every
/// disjunct. Sets that are not dense in `p` (possible under a size bound)
/// are skipped.
pub fn canonical_dense_sets(p: &SPhiPoset, budget: &Budget) -> Result<Vec<DenseSet>, ForcingError> {
    let mut out = Vec::new();
    for a in ground_atoms(&p.sig) {
        let neg = a.clone().negate();
        let members: Vec<usize> = (0..p.len()).filter(|&i| p.conditions[i].contains(&a) || p.conditions[i].contains(&neg)).collect();
        out.push(DenseSet { label: format!("decide {a}"), members });
    }
    for f in &p.pool {
        let Formula::Or(ds) = f else { continue };
        let mut members = Vec::new();
        for (i, s) in p.conditions.iter().enumerate() {
            if ds.iter().any(|d| s.contains(d)) {
                members.push(i);
                continue;
            }
            let mut incompatible = true;
            for d in ds {
                let mut t = s.clone();
                t.insert(d.clone());
                if consistent_with(&p.phi, &t, &p.sig, budget)? != Some(false) {
                    incompatible = false;
                    break;
                }
            }
            if incompatible {
                members.push(i);
            }
        }
        out.push(DenseSet { label: format!("commit {f}"), members });
    }
    Ok(out.into_iter().filter(|d| is_dense(&d.members, p, Density::Subset).dense).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct GenericFilter {
    /// Conditions visited after the empty one, each extending the previous.
    pub chain: Vec<usize>,
    /// The least condition; the filter is everything it includes.
    pub top: usize,
    pub members: Vec<usize>,
    pub met_dense_sets: Vec<bool>,
    pub maximal: bool,
}

fn check_dense(p: &SPhiPoset, dense: &[Vec<usize>], mode: Density) -> Result<(), ForcingError> {
    for (index, d) in dense.iter().enumerate() {
        if let Some(&condition) = d.iter().find(|&&c| c >= p.len()) {
            return Err(ForcingError::UnknownCondition { index, condition });
        }
        if !is_dense(d, p, mode).dense {
            return Err(ForcingError::NotDense { index });
        }
    }
    Ok(())
}

/// Walks from the empty condition into each dense set in turn, then, with
/// `saturate`, keeps extending until no proper extension exists.
pub fn generic_filter(p: &SPhiPoset, dense: &[Vec<usize>], saturate: bool) -> Result<GenericFilter, ForcingError> {
    check_dense(p, dense, Density::Subset)?;
    let root = p.index_of(&BTreeSet::new()).ok_or_else(|| ForcingError::Malformed("no empty condition".into()))?;
    let mut top = root;
    let mut chain = Vec::new();
    for d in dense {
        if d.contains(&top) {
            continue;
        }
        let next = *d.iter().find(|&&t| p.conditions[top].is_subset(&p.conditions[t])).expect("density gives an extension");
        chain.push(next);
        top = next;
    }
    if saturate {
        while let Some(next) = (0..p.len()).find(|&j| p.conditions[j].len() > p.conditions[top].len() && p.conditions[top].is_subset(&p.conditions[j])) {
            top = next;
        }
    }
    let members: Vec<usize> = (0..p.len()).filter(|&i| p.conditions[i].is_subset(&p.conditions[top])).collect();
    let met_dense_sets = dense.iter().map(|d| d.iter().any(|i| members.contains(i))).collect();
    Ok(GenericFilter { chain, top, members, met_dense_sets, maximal: p.is_maximal_condition(top) })
}

/// The union of the filter's conditions.
pub fn filter_theory(g: &GenericFilter, p: &SPhiPoset) -> BTreeSet<Formula> {
    p.conditions[g.top].clone()
}

/// Tarski structure on the equality classes of the constants under the
/// filter's equalities, with a relation holding exactly where the filter
/// asserts it. Fails if some sentence of the filter is false there.
pub fn term_model(g: &GenericFilter, p: &SPhiPoset) -> Result<BValuedModel, ForcingError> {
    if !g.maximal {
        return Err(ForcingError::NotMaximal);
    }
    let sigma = filter_theory(g, p);
    let consts = p.sig.constants();
    let pos = |c: &str| consts.iter().position(|x| x == c);
    let mut parent: Vec<usize> = (0..consts.len()).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        parent[x] = r;
        r
    }
    for f in &sigma {
        if let Formula::Eq(Term::Const(a), Term::Const(b)) = f {
            let (Some(i), Some(j)) = (pos(a), pos(b)) else { continue };
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            parent[ri.max(rj)] = ri.min(rj);
        }
    }
    let mut reps: Vec<usize> = Vec::new();
    let mut class = vec![0; consts.len()];
    for i in 0..consts.len() {
        let r = find(&mut parent, i);
        class[i] = match reps.iter().position(|&x| x == r) {
            Some(k) => k,
            None => {
                reps.push(r);
                reps.len() - 1
            }
        };
    }
    let dom: Vec<usize> = (0..reps.len()).collect();
    let mut relations = BTreeMap::new();
    for (rel, &arity) in p.sig.relations() {
        let vals = tuples(&dom, arity)
            .iter()
            .map(|t| {
                sigma.iter().any(|f| match f {
                    Formula::Atom { rel: r, args } if r == rel => {
                        args.iter().zip(t).all(|(a, &k)| a.as_const().and_then(pos).map(|i| class[i]) == Some(k))
                    }
                    _ => false,
                })
            })
            .collect();
        relations.insert(rel.clone(), (arity, vals));
    }
    let labels = reps.iter().map(|&r| consts[r].clone()).collect();
    let cmap = consts.iter().enumerate().map(|(i, c)| (c.clone(), class[i])).collect();
    let m = BValuedModel::tarski(labels, relations, cmap)?;
    for f in &sigma {
        if !m.satisfies(f)? {
            return Err(ForcingError::IllDefined(format!("{f} fails in the term model")));
        }
    }
    Ok(m)
}

/// `φ ∧ ⋀_j ⋁_{s∈D_j} ⋀s`, or `φ` itself when no dense sets are given.
pub fn genericity_sentence(p: &SPhiPoset, dense: &[Vec<usize>], mode: Density) -> Result<Formula, ForcingError> {
    check_dense(p, dense, mode)?;
    if dense.is_empty() {
        return Ok(p.phi.clone());
    }
    let mut conj = vec![p.phi.clone()];
    for d in dense {
        conj.push(Formula::Or(d.iter().map(|&i| Formula::And(p.conditions[i].iter().cloned().collect())).collect()));
    }
    Ok(Formula::And(conj))
}

/// `⋁_{s∈D} ⋀s`.
pub fn dense_disjunction(p: &SPhiPoset, d: &[usize]) -> Formula {
    Formula::Or(d.iter().map(|&i| Formula::And(p.conditions[i].iter().cloned().collect())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn or_example() -> (Formula, Signature) {
        let sig = Signature::with_fresh(&[], 3);
        (parse("(or (= c2 c0) (= c2 c1))", &sig).unwrap(), sig)
    }

    #[test]
    fn trivial_poset() {
        let sig = Signature::with_fresh(&[], 1);
        let p = build_sphi(&Formula::eq_c("c0", "c0"), &sig, Some(0), &Budget::default()).unwrap();
        assert_eq!(p.conditions, vec![BTreeSet::new()]);
    }

    #[test]
    fn oracle_filters_conditions() {
        let (phi, sig) = or_example();
        let p = build_sphi(&phi, &sig, Some(1), &Budget::default()).unwrap();
        assert!(p.index_of(&[Formula::eq_c("c2", "c0")].into()).is_some());
        assert!(p.index_of(&[Formula::eq_c("c2", "c1")].into()).is_some());
        let p2 = build_sphi(&phi, &sig, Some(2), &Budget::default()).unwrap();
        let bad: BTreeSet<Formula> = [Formula::neq_c("c0", "c2"), Formula::neq_c("c1", "c2")].into();
        assert!(p2.index_of(&bad).is_none());
        let again = SPhiPoset::from_json(&p2.to_json(), &sig, &Budget::default()).unwrap();
        assert_eq!(again, p2);
    }

    #[test]
    fn density_examples() {
        let (phi, sig) = or_example();
        let p = build_sphi(&phi, &sig, None, &Budget::default()).unwrap();
        let all: Vec<usize> = (0..p.len()).collect();
        assert!(is_dense(&all, &p, Density::Subset).dense);
        assert!(!is_dense(&all, &p, Density::StrictExtension).dense);
        let maximal: Vec<usize> = (0..p.len()).filter(|&i| p.is_maximal_condition(i)).collect();
        assert!(is_dense(&maximal, &p, Density::Subset).dense);
        assert!(!is_dense(&[], &p, Density::Subset).dense);
    }

    #[test]
    fn filters_and_term_models() {
        let (phi, sig) = or_example();
        let p = build_sphi(&phi, &sig, None, &Budget::default()).unwrap();
        let g = generic_filter(&p, &[], false).unwrap();
        assert_eq!(g.members, vec![0]);
        assert!(matches!(term_model(&g, &p), Err(ForcingError::NotMaximal)));

        let dense = canonical_dense_sets(&p, &Budget::default()).unwrap();
        assert!(dense.len() >= 2);
        let sets: Vec<Vec<usize>> = dense.iter().take(2).map(|d| d.members.clone()).collect();
        let g = generic_filter(&p, &sets, true).unwrap();
        assert!(g.chain.len() <= 2);
        assert!(g.met_dense_sets.iter().all(|&b| b));
        let m = term_model(&g, &p).unwrap();
        assert!(m.satisfies(&phi).unwrap());
        for d in &sets {
            let met = d.iter().any(|i| g.members.contains(i));
            assert_eq!(m.satisfies(&dense_disjunction(&p, d)).unwrap(), met);
        }
    }

    #[test]
    fn term_model_classes() {
        let sig = Signature::with_fresh(&[("P", 1)], 2);
        let phi = parse("(P c0)", &sig).unwrap();
        let p = build_sphi(&phi, &sig, None, &Budget::default()).unwrap();
        let neq: BTreeSet<Formula> = p.conditions.iter().filter(|c| c.contains(&Formula::neq_c("c0", "c1"))).max_by_key(|c| c.len()).unwrap().clone();
        let eq: BTreeSet<Formula> = p.conditions.iter().filter(|c| c.contains(&Formula::eq_c("c0", "c1"))).max_by_key(|c| c.len()).unwrap().clone();
        let top = p.index_of(&eq).unwrap();
        let g = GenericFilter { chain: vec![top], top, members: Vec::new(), met_dense_sets: Vec::new(), maximal: p.is_maximal_condition(top) };
        assert_eq!(term_model(&g, &p).unwrap().size(), 1);
        let top = p.index_of(&neq).unwrap();
        let g = GenericFilter { chain: vec![top], top, members: Vec::new(), met_dense_sets: Vec::new(), maximal: p.is_maximal_condition(top) };
        assert_eq!(term_model(&g, &p).unwrap().size(), 2);
    }

    #[test]
    fn genericity_sentence_shapes() {
        let (phi, sig) = or_example();
        let p = build_sphi(&phi, &sig, None, &Budget::default()).unwrap();
        assert_eq!(genericity_sentence(&p, &[], Density::Subset).unwrap(), phi);
        let trivial = genericity_sentence(&p, &[(0..p.len()).collect()], Density::Subset).unwrap();
        assert!(matches!(trivial, Formula::And(ref cs) if cs.len() == 2));
        assert!(matches!(genericity_sentence(&p, &[vec![0]], Density::Subset), Err(ForcingError::NotDense { index: 0 })));
    }
}
