//! A fixed set of small valid derivations over `P/1`, `R/2` and constants
//! `c0..c2`, used by the test suite, the benches and `boolkit proof-check --corpus`.

use super::{ProofTree, Rule, RuleData, Sequent};
use crate::syntax::{parse, Formula, Signature, Term};

pub fn corpus_signature() -> Signature {
    Signature::with_fresh(&[("P", 1), ("R", 2)], 3)
}

fn f(s: &str) -> Formula {
    parse(s, &corpus_signature()).expect("corpus formulas parse")
}

fn seq(left: &[&str], right: &[&str]) -> Sequent {
    Sequent::new(left.iter().map(|s| f(s)), right.iter().map(|s| f(s)))
}

fn ax(left: &[&str], right: &[&str], p: &str) -> ProofTree {
    ProofTree::with_principal(Rule::Axiom, seq(left, right), f(p), vec![])
}

fn by(rule: Rule, left: &[&str], right: &[&str], p: &str, premises: Vec<ProofTree>) -> ProofTree {
    ProofTree::with_principal(rule, seq(left, right), f(p), premises)
}

fn with_terms(rule: Rule, left: &[&str], right: &[&str], p: Option<&str>, terms: Vec<Term>, premises: Vec<ProofTree>) -> ProofTree {
    ProofTree::new(rule, seq(left, right), RuleData { principal: p.map(f), terms, ..Default::default() }, premises)
}

fn c(name: &str) -> Term {
    Term::cons(name)
}

fn v(name: &str) -> Term {
    Term::var(name)
}

const A: &str = "(P c0)";
const B: &str = "(P c1)";
const NA: &str = "(not (P c0))";
const NB: &str = "(not (P c1))";
const AB: &str = "(and (P c0) (P c1))";
const AOB: &str = "(or (P c0) (P c1))";
const NAONB: &str = "(or (not (P c0)) (not (P c1)))";
const NANB: &str = "(and (not (P c0)) (not (P c1)))";
const NAB: &str = "(not (and (P c0) (P c1)))";
const NAOB: &str = "(not (or (P c0) (P c1)))";

fn de_morgan_and_left() -> ProofTree {
    let left = by(
        Rule::OrRight,
        &[],
        &[NAONB, A],
        NAONB,
        vec![by(Rule::NotRight, &[], &[NA, NB, A], NA, vec![ax(&[A], &[NB, A], A)])],
    );
    let right = by(
        Rule::OrRight,
        &[],
        &[NAONB, B],
        NAONB,
        vec![by(Rule::NotRight, &[], &[NA, NB, B], NB, vec![ax(&[B], &[NA, B], B)])],
    );
    by(Rule::NotLeft, &[NAB], &[NAONB], NAB, vec![by(Rule::AndRight, &[], &[NAONB, AB], AB, vec![left, right])])
}

fn de_morgan_and_right() -> ProofTree {
    let branch = |pos: &str, neg: &str| {
        by(
            Rule::NotRight,
            &[neg],
            &[NAB],
            NAB,
            vec![by(Rule::AndLeft, &[neg, AB], &[], AB, vec![by(Rule::NotLeft, &[neg, A, B], &[], neg, vec![ax(&[A, B], &[pos], pos)])])],
        )
    };
    by(Rule::OrLeft, &[NAONB], &[NAB], NAONB, vec![branch(A, NA), branch(B, NB)])
}

fn de_morgan_or_left() -> ProofTree {
    let branch = |pos: &str, neg: &str| {
        by(
            Rule::NotRight,
            &[NAOB],
            &[neg],
            neg,
            vec![by(Rule::NotLeft, &[pos, NAOB], &[], NAOB, vec![by(Rule::OrRight, &[pos], &[AOB], AOB, vec![ax(&[pos], &[A, B], pos)])])],
        )
    };
    by(Rule::AndRight, &[NAOB], &[NANB], NANB, vec![branch(A, NA), branch(B, NB)])
}

fn de_morgan_or_right() -> ProofTree {
    let branch = |pos: &str, neg: &str| {
        by(
            Rule::AndLeft,
            &[NANB, pos],
            &[],
            NANB,
            vec![by(Rule::NotLeft, &[NA, NB, pos], &[], neg, vec![ax(&[NA, NB, pos], &[pos], pos)])],
        )
    };
    by(Rule::NotRight, &[NANB], &[NAOB], NAOB, vec![by(Rule::OrLeft, &[NANB, AOB], &[], AOB, vec![branch(A, NA), branch(B, NB)])])
}

/// Named derivations, each accepted by `check_proof`.
pub fn curated() -> Vec<(&'static str, ProofTree)> {
    let mut out = Vec::new();
    out.push(("reflexivity", with_terms(Rule::Eq1, &[], &["(= c0 c0)"], None, vec![c("c0")], vec![])));
    out.push(("symmetry", with_terms(Rule::Eq2, &["(= c0 c1)"], &["(= c1 c0)"], None, vec![c("c0"), c("c1")], vec![])));
    out.push((
        "transitivity",
        with_terms(Rule::Eq3, &["(= c0 c1)", "(= c1 c2)"], &["(= c0 c2)"], None, vec![c("c0"), c("c1"), c("c2")], vec![]),
    ));
    let congruence = ProofTree::new(
        Rule::Eq4,
        seq(&["(= c1 c0)", A], &[B]),
        RuleData { template: Some(f("(P ?v)")), vars: vec!["v".into()], from: vec![c("c0")], to: vec![c("c1")], ..Default::default() },
        vec![],
    );
    out.push(("congruence", congruence.clone()));
    let flip = with_terms(Rule::Eq2, &["(= c0 c1)"], &["(= c1 c0)"], None, vec![c("c0"), c("c1")], vec![]);
    out.push((
        "congruence-by-cut",
        ProofTree::new(Rule::Cut, seq(&["(= c0 c1)", A], &[B]), RuleData { cut: Some(f("(= c1 c0)")), ..Default::default() }, vec![congruence, flip]),
    ));
    out.push(("de-morgan-and-left", de_morgan_and_left()));
    out.push(("de-morgan-and-right", de_morgan_and_right()));
    out.push(("de-morgan-or-left", de_morgan_or_left()));
    out.push(("de-morgan-or-right", de_morgan_or_right()));
    out.push(("excluded-middle", by(Rule::OrRight, &[], &["(or (P c0) (not (P c0)))"], "(or (P c0) (not (P c0)))", vec![by(Rule::NotRight, &[], &[A, NA], NA, vec![ax(&[A], &[A], A)])])));
    out.push(("double-negation", by(Rule::NotLeft, &["(not (not (P c0)))"], &[A], "(not (not (P c0)))", vec![by(Rule::NotRight, &[], &[A, NA], NA, vec![ax(&[A], &[A], A)])])));
    out.push(("forall-instance", with_terms(Rule::ForallLeft, &["(forall (?x) (P ?x))"], &[A], Some("(forall (?x) (P ?x))"), vec![c("c0")], vec![ax(&[A], &[A], A)])));
    out.push(("exists-intro", with_terms(Rule::ExistsRight, &[A], &["(exists (?x) (P ?x))"], Some("(exists (?x) (P ?x))"), vec![c("c0")], vec![ax(&[A], &[A], A)])));
    let px = "(P ?x)";
    out.push((
        "forall-identity",
        by(
            Rule::ForallRight,
            &["(forall (?x) (P ?x))"],
            &["(forall (?x) (P ?x))"],
            "(forall (?x) (P ?x))",
            vec![with_terms(Rule::ForallLeft, &["(forall (?x) (P ?x))"], &[px], Some("(forall (?x) (P ?x))"), vec![v("x")], vec![ax(&[px], &[px], px)])],
        ),
    ));
    out.push((
        "exists-identity",
        by(
            Rule::ExistsLeft,
            &["(exists (?x) (P ?x))"],
            &["(exists (?x) (P ?x))"],
            "(exists (?x) (P ?x))",
            vec![with_terms(Rule::ExistsRight, &[px], &["(exists (?x) (P ?x))"], Some("(exists (?x) (P ?x))"), vec![v("x")], vec![ax(&[px], &[px], px)])],
        ),
    ));
    let rxy = "(R ?x ?y)";
    out.push((
        "block-swap",
        by(
            Rule::ForallRight,
            &["(forall (?x ?y) (R ?x ?y))"],
            &["(forall (?y ?x) (R ?x ?y))"],
            "(forall (?y ?x) (R ?x ?y))",
            vec![with_terms(
                Rule::ForallLeft,
                &["(forall (?x ?y) (R ?x ?y))"],
                &[rxy],
                Some("(forall (?x ?y) (R ?x ?y))"),
                vec![v("x"), v("y")],
                vec![ax(&[rxy], &[rxy], rxy)],
            )],
        ),
    ));
    let exists_forall = "(exists (?x) (forall (?y) (R ?x ?y)))";
    let forall_exists = "(forall (?y) (exists (?x) (R ?x ?y)))";
    let inner = with_terms(
        Rule::ExistsRight,
        &["(forall (?y) (R ?x ?y))"],
        &["(exists (?x) (R ?x ?y))"],
        Some("(exists (?x) (R ?x ?y))"),
        vec![v("x")],
        vec![with_terms(Rule::ForallLeft, &["(forall (?y) (R ?x ?y))"], &[rxy], Some("(forall (?y) (R ?x ?y))"), vec![v("y")], vec![ax(&[rxy], &[rxy], rxy)])],
    );
    out.push((
        "quantifier-swap",
        by(
            Rule::ForallRight,
            &[exists_forall],
            &[forall_exists],
            forall_exists,
            vec![by(Rule::ExistsLeft, &[exists_forall], &["(exists (?x) (R ?x ?y))"], exists_forall, vec![inner])],
        ),
    ));
    out.push((
        "forall-reflexivity",
        by(Rule::ForallRight, &[], &["(forall (?x) (= ?x ?x))"], "(forall (?x) (= ?x ?x))", vec![with_terms(Rule::Eq1, &[], &["(= ?x ?x)"], None, vec![v("x")], vec![])]),
    ));
    out.push(("weakening", ProofTree::new(Rule::Weakening, seq(&[A, "(R c0 c1)"], &[A, B]), RuleData::default(), vec![ax(&[A], &[A], A)])));
    out.push((
        "substitution",
        ProofTree::new(
            Rule::Substitution,
            seq(&[A], &[A]),
            RuleData { binding: [("x".to_string(), c("c0"))].into(), ..Default::default() },
            vec![ax(&[px], &[px], px)],
        ),
    ));
    out.push(("empty-conjunction", by(Rule::AndRight, &[], &["(and)"], "(and)", vec![])));
    out.push(("empty-disjunction", by(Rule::OrLeft, &["(or)"], &[], "(or)", vec![])));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proofs::check_proof;

    #[test]
    fn every_entry_checks() {
        let all = curated();
        assert!(all.len() >= 15);
        for (name, p) in &all {
            let v = check_proof(p);
            assert!(v.valid, "{name}: {:?}", v.failure);
        }
    }
}
