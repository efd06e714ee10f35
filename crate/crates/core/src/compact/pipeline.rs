use std::collections::BTreeSet;

use serde::{Serialize, Serializer};

use super::{conjunction_closure, decide, is_conservative_strengthening, is_finitely_conservative, maximal_types, naming_axioms};
use super::{CompactError, ConservativityReport, Status};
use crate::balg::Filter;
use crate::budget::Budget;
use crate::bvmodel::{mixing_completion, quotient_model, BValuedModel, BvError};
use crate::consprop::{closure_universe, model_from_consprop, verify_consistency_property, ConspropError, ConsistencyProperty, ConstructionOptions, Reading};
use crate::syntax::{subsentences, tuples, Formula, Signature, Term};

fn ser_model<S: Serializer>(m: &BValuedModel, s: S) -> Result<S::Ok, S::Error> {
    m.to_file().serialize(s)
}

#[derive(Clone, Debug, Serialize)]
pub struct CompactnessRun {
    #[serde(serialize_with = "ser_model")]
    pub model: BValuedModel,
    pub reports: Vec<ConservativityReport>,
    pub universe: usize,
    pub types: usize,
    pub members: usize,
    /// Direct oracle verdict on the union of the family.
    pub union_status: Status,
}

fn consistent(sentences: &[Formula], sig: &Signature, budget: &Budget) -> Result<bool, CompactError> {
    match decide(sentences, sig, budget)?.status {
        Status::Consistent => Ok(true),
        Status::Inconsistent => Ok(false),
        Status::Unknown => Err(CompactError::Unknown(format!("deciding a set of {} sentences", sentences.len()))),
    }
}

/// Builds a model of the conjunction of a finitely conservative family from
/// the consistency property of sets `{Ψ} ∪ t`, `Ψ` the conjunction and `t` a
/// consistent set holding a member together with some of its subsentences.
/// The maximal sets of that property are `{Ψ}` plus the maximal subsets of
/// the closure universe of `Ψ` consistent with it; other sets are read as
/// members through them. Each member also gets a conservativity report.
pub fn compactness_run(family: &[Formula], sig: &Signature, budget: &Budget) -> Result<CompactnessRun, CompactError> {
    if family.is_empty() {
        return Err(CompactError::NotFinitelyConservative("empty family".into()));
    }
    let fc = is_finitely_conservative(family, sig, budget)?;
    if !fc.holds {
        return Err(CompactError::NotFinitelyConservative(serde_json::to_string(&fc).expect("report serializes")));
    }
    let work = if sig.fresh_constants().is_empty() { sig.all_fresh() } else { sig.clone() };
    let psi = if family.len() == 1 { family[0].clone() } else { Formula::And(family.to_vec()) };
    let universe = closure_universe(std::slice::from_ref(&psi), &work, budget.closure_limit, false)?;
    let mut base = vec![psi.clone()];
    base.extend(naming_axioms(&work));
    let types = maximal_types(&base, &universe, &work, budget)?;

    let mut members: Vec<BTreeSet<Formula>> = Vec::new();
    for member in family {
        let subs: Vec<Formula> = subsentences(member, &work).into_iter().filter(|f| f != member).collect();
        let mut cores = vec![vec![member.clone()]];
        cores.extend(subs.iter().map(|s| vec![member.clone(), s.clone()]));
        for t in cores {
            if !consistent(&t, &work, budget)? {
                continue;
            }
            let mut with_base = base.clone();
            with_base.extend(t.iter().cloned());
            if !consistent(&with_base, &work, budget)? {
                return Err(CompactError::ConservativityGap { member: member.to_string(), subset: t.iter().map(Formula::to_string).collect() });
            }
            members.push(t.into_iter().chain([psi.clone()]).collect());
        }
    }
    for t in &types {
        members.push(t.iter().map(|&i| universe[i].clone()).chain([psi.clone()]).collect());
    }
    let property = ConsistencyProperty::new(work.clone(), members, Reading::Extension);
    let verdict = verify_consistency_property(&property);
    if let Some(v) = verdict.violation {
        return Err(ConspropError::NotAConsistencyProperty(v).into());
    }
    let (model, _) = model_from_consprop(&property, &ConstructionOptions { completion: false, budget: *budget })?;
    let whole = Formula::And(family.to_vec());
    if !model.eval_sentence(&whole)?.is_one() {
        return Err(CompactError::Internal("constructed model does not give the family value 1".into()));
    }
    let reports = family.iter().map(|m| is_conservative_strengthening(&psi, m, &work, budget)).collect::<Result<Vec<_>, _>>()?;
    let union_status = decide(family, &work, budget)?.status;
    if union_status == Status::Inconsistent {
        return Err(CompactError::Internal("oracle refutes a family that has a model".into()));
    }
    Ok(CompactnessRun { model, reports, universe: universe.len(), types: types.len(), members: property.members.len(), union_status })
}

/// `φ* = φ ∧ ⋀{¬θ} ∧ ⋀{θ}` for each generator `φ`, `θ` ranging over the
/// subsentences of `φ` other than `φ`, sorted by their truth value in `m`.
pub fn star_theory(m: &BValuedModel, generators: &[Formula], sig: &Signature) -> Result<Vec<Formula>, CompactError> {
    if !m.is_two_valued() {
        return Err(CompactError::Model(BvError::Malformed("star_theory needs a two-valued model".into())));
    }
    let mut out = Vec::new();
    for phi in generators {
        if !m.satisfies(phi)? {
            return Err(CompactError::GeneratorFalse(phi.to_string()));
        }
        let mut neg = Vec::new();
        let mut pos = Vec::new();
        for theta in subsentences(phi, sig) {
            if &theta == phi {
                continue;
            }
            if m.satisfies(&theta)? {
                pos.push(theta);
            } else {
                neg.push(theta.negate());
            }
        }
        let mut conj = vec![phi.clone()];
        conj.extend(neg);
        conj.extend(pos);
        out.push(Formula::And(conj));
    }
    Ok(out)
}

/// Ground atomic sentences over the constants of `sig`, equalities `c_i = c_j`
/// with `i < j` first.
pub fn ground_atoms(sig: &Signature) -> Vec<Formula> {
    let cs = sig.constants();
    let mut out = Vec::new();
    for i in 0..cs.len() {
        for j in i + 1..cs.len() {
            out.push(Formula::eq_c(cs[i].clone(), cs[j].clone()));
        }
    }
    for (rel, &a) in sig.relations() {
        for args in tuples(&cs, a) {
            out.push(Formula::atom(rel.clone(), args.into_iter().map(Term::cons).collect()));
        }
    }
    out
}

fn diagram(m: &BValuedModel, sig: &Signature) -> Result<Vec<Formula>, CompactError> {
    ground_atoms(sig).into_iter().map(|a| Ok(if m.satisfies(&a)? { a } else { a.negate() })).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct StarEquivalence {
    /// `⋀T*` entails every generator.
    pub forward: bool,
    /// Every conjunct of every `φ*` follows from the generators plus the atomic diagram of the model.
    pub backward: bool,
}

pub fn star_equivalence(t: &[Formula], stars: &[Formula], m: &BValuedModel, sig: &Signature, budget: &Budget) -> Result<StarEquivalence, CompactError> {
    let all = Formula::And(stars.to_vec());
    let mut forward = true;
    for phi in t {
        forward &= !consistent(&[all.clone(), phi.clone().negate()], sig, budget)?;
    }
    let mut base = t.to_vec();
    base.extend(diagram(m, sig)?);
    let mut backward = true;
    for star in stars {
        let conjuncts = match star {
            Formula::And(cs) => cs.clone(),
            other => vec![other.clone()],
        };
        for c in conjuncts {
            let mut trial = base.clone();
            trial.push(c.negate());
            backward &= !consistent(&trial, sig, budget)?;
        }
    }
    Ok(StarEquivalence { forward, backward })
}

#[derive(Clone, Debug, Serialize)]
pub struct FoCompactness {
    #[serde(serialize_with = "ser_model")]
    pub model: BValuedModel,
    pub diagram: usize,
    pub generators: usize,
    pub family: usize,
    pub boolean_atoms: usize,
    /// The ultrafilter quotient was taken of the mixing completion rather than the model itself.
    pub completed: bool,
}

fn chunk_generators(t: &[Formula], max: usize) -> Vec<Formula> {
    if t.len() <= max {
        return t.to_vec();
    }
    let per = t.len().div_ceil(max);
    t.chunks(per).map(|c| Formula::And(c.to_vec())).collect()
}

/// Tarski model of a ground theory whose finite subsets are all consistent,
/// obtained by completing it over the ground atoms, passing the completion's
/// model through `star_theory` and `compactness_run`, and taking an
/// ultrafilter quotient.
pub fn first_order_compactness_demo(t: &[Formula], sig: &Signature, budget: &Budget) -> Result<FoCompactness, CompactError> {
    if let Some(bad) = t.iter().find(|f| f.has_quantifier() || !f.is_sentence()) {
        return Err(CompactError::NotGround(bad.to_string()));
    }
    let n = t.len();
    if n > 20 {
        return Err(CompactError::Internal("theories above 20 sentences are out of range for subset checking".into()));
    }
    let mut masks: Vec<u32> = (1..(1u32 << n)).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    for mask in masks {
        let subset: Vec<Formula> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| t[i].clone()).collect();
        if !consistent(&subset, sig, budget)? {
            return Err(CompactError::InconsistentSubset(subset.iter().map(Formula::to_string).collect()));
        }
    }

    let mut lits: Vec<Formula> = t.to_vec();
    for a in ground_atoms(sig) {
        let mut yes = lits.clone();
        yes.push(a.clone());
        if consistent(&yes, sig, budget)? {
            lits = yes;
            continue;
        }
        let mut no = lits.clone();
        no.push(a.negate());
        if !consistent(&no, sig, budget)? {
            return Err(CompactError::Internal("completion reached a dead end".into()));
        }
        lits = no;
    }
    let v = decide(&lits, sig, budget)?;
    let m = v.witness.ok_or_else(|| CompactError::Internal("completed theory has no witness".into()))?;

    let gens = chunk_generators(t, 4);
    let stars = star_theory(&m, &gens, sig)?;
    let family = conjunction_closure(&stars);
    let run = compactness_run(&family, sig, budget)?;

    let (source, completed) = match mixing_completion(&run.model, budget.completion_cap) {
        Ok(full) => (full, true),
        Err(BvError::TooLarge { .. }) => (run.model.clone(), false),
        Err(e) => return Err(e.into()),
    };
    let u = Filter::principal(source.algebra().atom(0)).map_err(BvError::from)?;
    let tarski = quotient_model(&source, &u)?;
    for f in t {
        if !tarski.satisfies(f)? {
            return Err(CompactError::Internal(format!("quotient fails {f}")));
        }
    }
    Ok(FoCompactness {
        model: tarski,
        diagram: lits.len() - n,
        generators: gens.len(),
        family: family.len(),
        boolean_atoms: run.model.algebra().atom_count(),
        completed,
    })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::compact::is_finitely_conservative;
    use crate::syntax::parse;

    #[test]
    fn singleton_family() {
        let sig = Signature::with_fresh(&[("P", 1)], 2);
        let phi = parse("(or (P c0) (= c0 c1))", &sig).unwrap();
        let run = compactness_run(std::slice::from_ref(&phi), &sig, &Budget::default()).unwrap();
        assert!(run.model.eval_sentence(&phi).unwrap().is_one());
        assert!(run.reports[0].holds());
        assert_eq!(run.union_status, Status::Consistent);
    }

    #[test]
    fn closed_three_member_family() {
        let sig = Signature::with_fresh(&[("P", 1)], 2);
        let a = parse("(or (P c0) (P c1))", &sig).unwrap();
        let b = parse("(and (or (P c0) (P c1)) (not (= c0 c1)))", &sig).unwrap();
        let family = vec![a.clone(), b.clone(), Formula::And(vec![a, b])];
        let run = compactness_run(&family, &sig, &Budget::default()).unwrap();
        assert!(run.model.eval_sentence(&Formula::And(family.clone())).unwrap().is_one());
        assert!(run.reports.iter().all(ConservativityReport::holds));
    }

    #[test]
    fn non_conservative_family_rejected() {
        let (family, sig) = crate::compact::faicom_family(2);
        let err = compactness_run(&conjunction_closure(&family), &sig, &Budget::default()).unwrap_err();
        assert!(matches!(err, CompactError::NotFinitelyConservative(_)));
    }

    fn two_point(sig: &Signature) -> BValuedModel {
        let consts: BTreeMap<String, usize> = [("c0".into(), 0), ("c1".into(), 1), ("c2".into(), 0)].into();
        let _ = sig;
        BValuedModel::tarski(vec!["a".into(), "b".into()], BTreeMap::new(), consts).unwrap()
    }

    #[test]
    fn star_adds_literals() {
        let sig = Signature::with_fresh(&[], 3);
        let m = two_point(&sig);
        let phi = parse("(or (= c2 c0) (= c2 c1))", &sig).unwrap();
        let stars = star_theory(&m, std::slice::from_ref(&phi), &sig).unwrap();
        let key = crate::compact::conjunct_key(&stars[0]);
        assert!(key.contains(&Formula::eq_c("c2", "c0")));
        assert!(key.contains(&Formula::neq_c("c2", "c1")));
        let bad = parse("(= c0 c1)", &sig).unwrap();
        assert!(matches!(star_theory(&m, &[bad], &sig), Err(CompactError::GeneratorFalse(_))));
        let psi = parse("(not (= c1 c2))", &sig).unwrap();
        let stars = star_theory(&m, &[phi.clone(), psi.clone()], &sig).unwrap();
        assert!(is_finitely_conservative(&conjunction_closure(&stars), &sig, &Budget::default()).unwrap().holds);
        let eq = star_equivalence(&[phi, psi], &stars, &m, &sig, &Budget::default()).unwrap();
        assert!(eq.forward && eq.backward);
    }

    #[test]
    fn first_order_compactness_examples() {
        let sig = Signature::with_fresh(&[], 3);
        let r = first_order_compactness_demo(&[Formula::neq_c("c0", "c1")], &sig, &Budget::default()).unwrap();
        assert!(r.model.is_two_valued());
        assert_ne!(r.model.const_index("c0"), r.model.const_index("c1"));

        let sig4 = Signature::with_fresh(&[], 4);
        let t: Vec<Formula> = (0..4).flat_map(|i| (i + 1..4).map(move |j| Formula::neq_c(format!("c{i}"), format!("c{j}")))).collect();
        let r = first_order_compactness_demo(&t, &sig4, &Budget::default()).unwrap();
        assert_eq!(r.model.size(), 4);

        let bad = vec![Formula::eq_c("c0", "c1"), Formula::eq_c("c1", "c2"), Formula::neq_c("c0", "c1")];
        match first_order_compactness_demo(&bad, &sig, &Budget::default()) {
            Err(CompactError::InconsistentSubset(s)) => assert_eq!(s.len(), 2),
            other => panic!("expected rejection, got {other:?}"),
        }
    }
}
