use std::collections::BTreeMap;

use proptest::prelude::*;

use boolkit::balg::{ro_completion, ultrafilters};
use boolkit::bvmodel::quotient_model;
use boolkit::compact::{conjunct_key, conjunction_closure, decide, replay_refutation, Status};
use boolkit::consprop::{closure_universe, verify_consistency_property, ConsistencyProperty, Reading};
use boolkit::gen::{prng, random_ground, random_model, random_sentence};
use boolkit::proofs::corpus::{corpus_signature, curated};
use boolkit::proofs::{check_proof, mutations, ProofTree};
use boolkit::syntax::{parse, tuples};
use boolkit::{BValuedModel, BoolAlg, Budget, Elem, Formula, Poset, Signature};

fn elem(atoms: usize) -> impl Strategy<Value = Elem> {
    proptest::collection::vec(any::<bool>(), atoms).prop_map(move |bits| Elem::from_atoms(atoms, (0..atoms).filter(|&i| bits[i])))
}

/// Every Tarski model whose elements are named by the constants.
fn named_tarski_models(sig: &Signature) -> Vec<BValuedModel> {
    let consts = sig.constants();
    let n = consts.len();
    let dom: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    for image in tuples(&dom, n) {
        let size = image.iter().max().map_or(1, |m| m + 1);
        if (0..size).any(|x| !image.contains(&x)) {
            continue;
        }
        let elems: Vec<usize> = (0..size).collect();
        let rels: Vec<(String, usize, usize)> = sig.relations().iter().map(|(r, &a)| (r.clone(), a, size.pow(a as u32))).collect();
        let total: usize = rels.iter().map(|r| r.2).sum();
        for bits in 0u32..(1 << total) {
            let mut offset = 0;
            let mut relations = BTreeMap::new();
            for (r, a, len) in &rels {
                relations.insert(r.clone(), (*a, (0..*len).map(|k| bits & (1 << (offset + k)) != 0).collect()));
                offset += len;
            }
            let cmap = consts.iter().cloned().zip(image.iter().copied()).collect();
            let labels = elems.iter().map(|i| format!("e{i}")).collect();
            out.push(BValuedModel::tarski(labels, relations, cmap).expect("valid"));
        }
    }
    out
}

proptest! {
    #[test]
    fn lattice_laws(a in elem(5), b in elem(5), c in elem(5)) {
        prop_assert_eq!(a.meet(&b.join(&c)), a.meet(&b).join(&a.meet(&c)));
        prop_assert_eq!(a.join(&b).complement(), a.complement().meet(&b.complement()));
        prop_assert!(a.meet(&a.complement()).is_zero());
        prop_assert_eq!(a.leq(&b), a.meet(&b) == a);
    }

    #[test]
    fn ultrafilters_are_atoms(atoms in 1usize..6) {
        let b = BoolAlg::new(atoms).unwrap();
        let us = ultrafilters(&b);
        prop_assert_eq!(us.len(), atoms);
        for u in &us {
            prop_assert!(u.is_ultra());
            for x in b.elements() {
                prop_assert!(u.contains(&x) != u.contains(&x.complement()));
            }
        }
    }

    #[test]
    fn antichain_completion_is_powerset(n in 1usize..6) {
        let ro = ro_completion(&Poset::antichain(n)).unwrap();
        prop_assert_eq!(ro.algebra.atom_count(), n);
        let chain = ro_completion(&Poset::chain(n)).unwrap();
        prop_assert_eq!(chain.algebra.atom_count(), 1);
    }

    #[test]
    fn render_parse_round_trip(seed in any::<u64>()) {
        let sig = Signature::with_fresh(&[("P", 1), ("R", 2)], 2);
        let f = random_sentence(&mut prng(seed), &sig, 4);
        prop_assert_eq!(parse(&f.to_string(), &sig).unwrap(), f);
    }

    #[test]
    fn model_json_round_trip(seed in any::<u64>()) {
        let sig = Signature::with_fresh(&[("P", 1), ("R", 2)], 2);
        let mut rng = prng(seed);
        let m = random_model(&mut rng, sig.relations(), &sig.constants(), 3, 2);
        prop_assert_eq!(BValuedModel::from_json(&m.to_json()).unwrap(), m);
    }

    /// Atom `i` lies in the value of a sentence exactly when the sentence is
    /// classically true in the quotient at the `i`-th ultrafilter.
    #[test]
    fn values_split_along_atoms(seed in any::<u64>()) {
        let sig = Signature::with_fresh(&[("P", 1), ("R", 2)], 2);
        let mut rng = prng(seed);
        let m = random_model(&mut rng, sig.relations(), &sig.constants(), 3, 3);
        let f = random_sentence(&mut rng, &sig, 3);
        let v = m.eval_sentence(&f).unwrap();
        for (i, u) in ultrafilters(m.algebra()).iter().enumerate() {
            let q = quotient_model(&m, u).unwrap();
            prop_assert_eq!(q.satisfies(&f).unwrap(), v.contains_atom(i));
        }
    }

    /// The oracle agrees with a search through all small named Tarski models.
    #[test]
    fn oracle_matches_model_search(seed in any::<u64>(), k in 1usize..4) {
        let sig = Signature::with_fresh(&[("P", 1)], 3);
        let mut rng = prng(seed);
        let t: Vec<Formula> = (0..k).map(|_| random_ground(&mut rng, &sig, 3)).collect();
        let v = decide(&t, &sig, &Budget::default()).unwrap();
        let has_model = named_tarski_models(&sig).iter().any(|m| t.iter().all(|f| m.satisfies(f).unwrap()));
        match v.status {
            Status::Consistent => {
                prop_assert!(has_model);
                let w = v.witness.unwrap();
                prop_assert!(t.iter().all(|f| w.satisfies(f).unwrap()));
            }
            Status::Inconsistent => {
                prop_assert!(!has_model);
                prop_assert!(replay_refutation(&t, &sig, &v.certificate.unwrap()));
            }
            Status::Unknown => prop_assert!(false, "oracle gave up"),
        }
    }

    #[test]
    fn closure_keys_are_unions(seed in any::<u64>(), n in 1usize..5) {
        let sig = Signature::with_fresh(&[("P", 1)], 2);
        let mut rng = prng(seed);
        let gens: Vec<Formula> = (0..n).map(|_| random_ground(&mut rng, &sig, 2)).collect();
        let closure = conjunction_closure(&gens);
        let keys: Vec<_> = closure.iter().map(conjunct_key).collect();
        prop_assert!(closure.len() < 1 << n);
        for a in &keys {
            for b in &keys {
                let u: std::collections::BTreeSet<Formula> = a.union(b).cloned().collect();
                prop_assert!(keys.contains(&u));
            }
        }
    }

    #[test]
    fn closed_universe_is_its_own_closure(seed in any::<u64>()) {
        let sig = Signature::with_fresh(&[("P", 1)], 2);
        let f = random_ground(&mut prng(seed), &sig, 2);
        let u = closure_universe(std::slice::from_ref(&f), &sig, 256, false).unwrap();
        prop_assert!(u.contains(&f));
        let again = closure_universe(&u, &sig, 256, false).unwrap();
        prop_assert_eq!(again.len(), u.len());
    }
}

#[test]
fn corpus_round_trips_and_mutations_fail() {
    let sig = corpus_signature();
    for (name, p) in curated() {
        assert_eq!(ProofTree::from_json(&p.to_json(), &sig).unwrap(), p, "{name}");
        for (what, q) in mutations(&p) {
            assert!(!check_proof(&q).valid, "{name}: {what}");
        }
    }
}

#[test]
fn property_json_round_trip() {
    let sig = Signature::with_fresh(&[], 2);
    let members = vec![
        Default::default(),
        [Formula::eq_c("c0", "c1"), Formula::eq_c("c1", "c0")].into_iter().collect(),
        [Formula::neq_c("c0", "c1")].into_iter().collect(),
    ];
    let s = ConsistencyProperty::new(sig.clone(), members, Reading::Extension);
    let back = ConsistencyProperty::from_json(&s.to_json(), &sig).unwrap();
    assert_eq!(back.members, s.members);
    assert_eq!(back.reading, Reading::Extension);
    assert_eq!(verify_consistency_property(&back).holds, verify_consistency_property(&s).holds);
}
