use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::{ConsistencyProperty, ConspropError, ConstructionFailure, Indexed};
use crate::balg::{BoolAlg, Elem, Poset};
use crate::budget::Budget;
use crate::bvmodel::{mixing_completion, BValuedModel, BvError, Evaluator, RelTable};
use crate::syntax::{tuples, Formula, Term};

#[derive(Clone, Debug, Default)]
pub struct ConstructionOptions {
    /// Also build the mixing completion and check that no member drops to 0.
    pub completion: bool,
    pub budget: Budget,
}

#[derive(Clone, Debug, Serialize)]
pub struct ModelReport {
    pub atoms: usize,
    pub domain: usize,
    pub members: usize,
    pub checked: usize,
    pub completion: Option<CompletionCheck>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompletionCheck {
    pub size: usize,
    pub preserved: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

/// Members ordered by reverse inclusion: `s ≤ t` iff `t ⊆ s`.
pub fn member_poset(s: &ConsistencyProperty) -> Result<Poset, ConspropError> {
    let ix = Indexed::new(s);
    let distinct = distinct_members(&ix);
    Poset::new(distinct.len(), |a, b| ix.members[distinct[b]].is_subset(&ix.members[distinct[a]]))
        .map_err(|e| ConspropError::Malformed(e.to_string()))
}

fn distinct_members(ix: &Indexed) -> Vec<usize> {
    let mut seen = std::collections::HashSet::new();
    (0..ix.members.len()).filter(|&i| seen.insert(ix.members[i].clone())).collect()
}

/// Boolean-valued model over the regular-open algebra of the members ordered
/// by reverse inclusion. The atoms of that algebra are the maximal members; an
/// atomic sentence gets the atoms it can be added to. The domain is the set of
/// all constants, each naming itself. The result is checked: the equality
/// axioms hold and every member's image lies below each of its sentences.
pub fn model_from_consprop(s: &ConsistencyProperty, opts: &ConstructionOptions) -> Result<(BValuedModel, ModelReport), ConspropError> {
    let ix = Indexed::new(s);
    if ix.members.is_empty() {
        return Err(ConspropError::Empty);
    }
    let atoms = ix.maximal.clone();
    let b = BoolAlg::new(atoms.len()).map_err(BvError::from)?;
    let value = |phi: &Formula| Elem::from_atoms(atoms.len(), (0..atoms.len()).filter(|&a| ix.accepts(&ix.members[atoms[a]], &[phi])));
    let embed = |m: usize| Elem::from_atoms(atoms.len(), (0..atoms.len()).filter(|&a| ix.members[m].is_subset(&ix.members[atoms[a]])));

    let domain = s.sig.constants();
    let n = domain.len();
    if n == 0 {
        return Err(ConspropError::Malformed("signature has no constants".into()));
    }
    let eq: Vec<Vec<Elem>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { b.one() } else { value(&Formula::eq_c(domain[i].clone(), domain[j].clone())) }).collect())
        .collect();
    let mut relations = BTreeMap::new();
    for (rel, &arity) in s.sig.relations() {
        let table = tuples(&domain, arity).into_iter().map(|args| value(&Formula::atom(rel.clone(), args.into_iter().map(Term::cons).collect()))).collect();
        relations.insert(rel.clone(), RelTable { arity, table });
    }
    let consts = domain.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
    let model = BValuedModel::from_parts(b, domain, eq, relations, consts)?;
    if let Some(violation) = model.validate().violation {
        return Err(ConspropError::ConstructionFailure(ConstructionFailure::InvalidModel { violation }));
    }

    let mut memo: HashMap<usize, Elem> = HashMap::new();
    let mut ev = Evaluator::new(&model, opts.budget.eval_cap);
    let distinct = distinct_members(&ix);
    let mut checked = 0;
    for &m in &distinct {
        let cone = embed(m);
        for i in ix.members[m].ones() {
            let v = match memo.get(&i) {
                Some(v) => v.clone(),
                None => {
                    let v = ev.eval_sentence(&ix.formulas[i])?;
                    memo.insert(i, v.clone());
                    v
                }
            };
            checked += 1;
            if !cone.leq(&v) {
                return Err(ConspropError::ConstructionFailure(ConstructionFailure::Unrealized {
                    member: ix.render(&ix.members[m]),
                    sentence: ix.formulas[i].to_string(),
                    cone,
                    value: v,
                }));
            }
        }
    }

    let completion = if opts.completion { Some(check_completion(&model, &ix, &distinct, &opts.budget)?) } else { None };
    let report = ModelReport { atoms: atoms.len(), domain: n, members: distinct.len(), checked, completion };
    Ok((model, report))
}

fn check_completion(model: &BValuedModel, ix: &Indexed, distinct: &[usize], budget: &Budget) -> Result<CompletionCheck, ConspropError> {
    let full = match mixing_completion(model, budget.completion_cap) {
        Ok(m) => m,
        Err(BvError::TooLarge { size, cap }) => {
            return Ok(CompletionCheck { size: 0, preserved: false, skipped: Some(format!("completion would have {size} elements, cap {cap}")) })
        }
        Err(e) => return Err(e.into()),
    };
    let mut ev = Evaluator::new(&full, budget.eval_cap);
    for &m in distinct {
        let conj = Formula::And(ix.members[m].ones().map(|i| ix.formulas[i].clone()).collect());
        if ev.eval_sentence(&conj)?.is_zero() {
            return Err(ConspropError::ConstructionFailure(ConstructionFailure::LostInCompletion { member: ix.render(&ix.members[m]) }));
        }
    }
    Ok(CompletionCheck { size: full.size(), preserved: true, skipped: None })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::balg::{regularize, ro_completion};
    use crate::consprop::{saturate_theory, Reading, SaturateConfig};
    use crate::syntax::{parse, Signature};
    use fixedbitset::FixedBitSet;

    #[test]
    fn one_point_model() {
        let sig = Signature::with_fresh(&[], 1);
        let s = ConsistencyProperty::new(sig, vec![BTreeSet::new(), [Formula::eq_c("c0", "c0")].into()], Reading::Exact);
        let (m, r) = model_from_consprop(&s, &ConstructionOptions::default()).unwrap();
        assert_eq!(m.size(), 1);
        assert_eq!(m.algebra().atom_count(), 1);
        assert_eq!(r.atoms, 1);
    }

    #[test]
    fn empty_property_is_rejected() {
        let sig = Signature::with_fresh(&[], 1);
        let s = ConsistencyProperty::new(sig, Vec::new(), Reading::Exact);
        assert_eq!(model_from_consprop(&s, &ConstructionOptions::default()).unwrap_err(), ConspropError::Empty);
    }

    #[test]
    fn saturated_theory_is_realized() {
        let sig = Signature::with_fresh(&[("P", 1)], 2);
        let t = vec![parse("(or (P c0) (= c0 c1))", &sig).unwrap()];
        let s = saturate_theory(&t, &sig, &SaturateConfig::default()).unwrap();
        let opts = ConstructionOptions { completion: true, ..Default::default() };
        let (m, r) = model_from_consprop(&s.property, &opts).unwrap();
        assert!(r.atoms >= 2);
        assert!(r.completion.unwrap().preserved);
        let top = s.property.members.iter().map(|x| x.len()).max().unwrap();
        assert!(top > 0);
        assert!(!m.eval_sentence(&t[0]).unwrap().is_zero());
    }

    #[test]
    fn direct_algebra_matches_regular_open_completion() {
        let sig = Signature::with_fresh(&[("P", 0)], 2);
        let t = vec![parse("(or (P) (= c0 c1))", &sig).unwrap()];
        let s = saturate_theory(&t, &sig, &SaturateConfig::default()).unwrap();
        let p = member_poset(&s.property).unwrap();
        let ro = ro_completion(&p).unwrap();
        let (m, _) = model_from_consprop(&s.property, &ConstructionOptions::default()).unwrap();
        assert_eq!(ro.algebra.atom_count(), m.algebra().atom_count());
        let ix = Indexed::new(&s.property);
        let distinct = distinct_members(&ix);
        let phi = Formula::atom("P", vec![]);
        let j = ix.index[&phi];
        let mut u = FixedBitSet::with_capacity(distinct.len());
        u.extend((0..distinct.len()).filter(|&q| ix.accepts(&ix.members[distinct[q]], &[&phi]) || ix.members[distinct[q]].contains(j)));
        let via_ro = ro.from_set(&regularize(&p, &u));
        let direct = m.eval_sentence(&phi).unwrap();
        assert_eq!(via_ro.count(), direct.count());
        let atoms_direct: BTreeSet<Vec<String>> = ix.maximal.iter().map(|&a| ix.render(&ix.members[a])).collect();
        let atoms_ro: BTreeSet<Vec<String>> = ro.atoms.iter().map(|&q| ix.render(&ix.members[distinct[q]])).collect();
        assert_eq!(atoms_direct, atoms_ro);
    }
}
