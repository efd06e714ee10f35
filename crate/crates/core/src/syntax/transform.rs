use std::collections::BTreeSet;

use super::{Formula, Signature, SyntaxError, Term};

/// All `k`-tuples over `items`, in lexicographic order of indices.
pub fn tuples<T: Clone>(items: &[T], k: usize) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                items.iter().map(move |x| {
                    let mut t = prefix.clone();
                    t.push(x.clone());
                    t
                })
            })
            .collect();
    }
    out
}

/// One step of moving a negation inside: the formula `f¬` standing for `¬f`.
pub fn nnf_step(f: &Formula) -> Formula {
    match f {
        Formula::Atom { .. } | Formula::Eq(..) => f.clone().negate(),
        Formula::Not(g) => (**g).clone(),
        Formula::And(cs) => Formula::Or(cs.iter().cloned().map(Formula::negate).collect()),
        Formula::Or(cs) => Formula::And(cs.iter().cloned().map(Formula::negate).collect()),
        Formula::Forall(vs, g) => Formula::Exists(vs.clone(), Box::new((**g).clone().negate())),
        Formula::Exists(vs, g) => Formula::Forall(vs.clone(), Box::new((**g).clone().negate())),
    }
}

/// Negation normal form: negations only in front of atomic formulas.
pub fn nnf(f: &Formula) -> Formula {
    match f {
        Formula::Atom { .. } | Formula::Eq(..) => f.clone(),
        Formula::Not(g) => nnf_neg(g),
        Formula::And(cs) => Formula::And(cs.iter().map(nnf).collect()),
        Formula::Or(cs) => Formula::Or(cs.iter().map(nnf).collect()),
        Formula::Forall(vs, g) => Formula::Forall(vs.clone(), Box::new(nnf(g))),
        Formula::Exists(vs, g) => Formula::Exists(vs.clone(), Box::new(nnf(g))),
    }
}

fn nnf_neg(f: &Formula) -> Formula {
    match f {
        Formula::Atom { .. } | Formula::Eq(..) => f.clone().negate(),
        Formula::Not(g) => nnf(g),
        Formula::And(cs) => Formula::Or(cs.iter().map(nnf_neg).collect()),
        Formula::Or(cs) => Formula::And(cs.iter().map(nnf_neg).collect()),
        Formula::Forall(vs, g) => Formula::Exists(vs.clone(), Box::new(nnf_neg(g))),
        Formula::Exists(vs, g) => Formula::Forall(vs.clone(), Box::new(nnf_neg(g))),
    }
}

fn subformulas<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
    out.push(f);
    match f {
        Formula::Atom { .. } | Formula::Eq(..) => {}
        Formula::Not(g) | Formula::Forall(_, g) | Formula::Exists(_, g) => subformulas(g, out),
        Formula::And(cs) | Formula::Or(cs) => cs.iter().for_each(|c| subformulas(c, out)),
    }
}

/// Every instance of a subformula of `psi` with constants of `sig`
/// (base and fresh) substituted for its free variables.
pub fn subsentences(psi: &Formula, sig: &Signature) -> BTreeSet<Formula> {
    let consts = sig.constants();
    let mut subs = Vec::new();
    subformulas(psi, &mut subs);
    let mut out = BTreeSet::new();
    for phi in subs {
        let vars: Vec<String> = phi.free_vars().into_iter().collect();
        if vars.is_empty() {
            out.insert(phi.clone());
            continue;
        }
        for tuple in tuples(&consts, vars.len()) {
            out.insert(phi.instantiate(&vars, &tuple));
        }
    }
    out
}

/// `∀x ⋁_{c∈C} x = c` over the fresh constants.
pub fn qe_axiom(sig: &Signature) -> Result<Formula, SyntaxError> {
    if sig.fresh_constants().is_empty() {
        return Err(SyntaxError::EmptyFresh);
    }
    let x = || Term::var("x");
    let body = Formula::Or(sig.fresh_constants().iter().map(|c| Formula::Eq(x(), Term::cons(c.clone()))).collect());
    Ok(Formula::forall(["x"], body))
}

/// Replaces every quantifier block by the conjunction or disjunction of its
/// instances over the fresh constants, recursively.
pub fn qe_transform(psi: &Formula, sig: &Signature) -> Result<Formula, SyntaxError> {
    if sig.fresh_constants().is_empty() {
        return Err(SyntaxError::EmptyFresh);
    }
    Ok(qe_rec(psi, sig.fresh_constants()))
}

fn qe_rec(f: &Formula, consts: &[String]) -> Formula {
    match f {
        Formula::Atom { .. } | Formula::Eq(..) => f.clone(),
        Formula::Not(g) => Formula::Not(Box::new(qe_rec(g, consts))),
        Formula::And(cs) => Formula::And(cs.iter().map(|c| qe_rec(c, consts)).collect()),
        Formula::Or(cs) => Formula::Or(cs.iter().map(|c| qe_rec(c, consts)).collect()),
        Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
            let inst = tuples(consts, vs.len()).into_iter().map(|t| qe_rec(&g.instantiate(vs, &t), consts)).collect();
            if matches!(f, Formula::Forall(..)) {
                Formula::And(inst)
            } else {
                Formula::Or(inst)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn sig(n: usize) -> Signature {
        Signature::with_fresh(&[("R", 2), ("P", 1)], n)
    }

    #[test]
    fn nnf_step_clauses() {
        let s = sig(2);
        let p = |t| parse(t, &s).unwrap();
        assert_eq!(nnf_step(&p("(not (= c0 c1))")), p("(= c0 c1)"));
        assert_eq!(nnf_step(&p("(= c0 c1)")), p("(not (= c0 c1))"));
        assert_eq!(nnf_step(&p("(and (P c0) (P c1))")), p("(or (not (P c0)) (not (P c1)))"));
        assert_eq!(nnf_step(&p("(or (P c0))")), p("(and (not (P c0)))"));
        assert_eq!(nnf_step(&p("(forall (?x) (P ?x))")), p("(exists (?x) (not (P ?x)))"));
        assert_eq!(nnf_step(&p("(exists (?x) (P ?x))")), p("(forall (?x) (not (P ?x)))"));
    }

    #[test]
    fn nnf_examples() {
        let s = sig(4);
        let p = |t| parse(t, &s).unwrap();
        assert_eq!(nnf(&p("(not (and (= c0 c1) (not (= c2 c3))))")), p("(or (not (= c0 c1)) (= c2 c3))"));
        assert_eq!(nnf(&p("(= c0 c1)")), p("(= c0 c1)"));
        assert_eq!(nnf(&p("(not (exists (?x) (P ?x)))")), p("(forall (?x) (not (P ?x)))"));
    }

    #[test]
    fn subsentence_counts() {
        let s = sig(3);
        let f = parse("(exists (?x) (P ?x))", &s).unwrap();
        assert_eq!(subsentences(&f, &s).len(), 4);
        let g = parse("(= c0 c0)", &s).unwrap();
        assert_eq!(subsentences(&g, &Signature::with_fresh(&[], 1)).len(), 1);
        let h = parse("(or (= c2 c0) (= c2 c1))", &s).unwrap();
        let subs = subsentences(&h, &s);
        assert!(subs.contains(&h) && subs.contains(&Formula::eq_c("c2", "c0")) && subs.contains(&Formula::eq_c("c2", "c1")));
    }

    #[test]
    fn qe_axiom_and_transform() {
        assert_eq!(qe_axiom(&sig(1)).unwrap(), parse("(forall (?x) (or (= ?x c0)))", &sig(1)).unwrap());
        assert_eq!(qe_axiom(&sig(2)).unwrap(), parse("(forall (?x) (or (= ?x c0) (= ?x c1)))", &sig(2)).unwrap());
        assert_eq!(qe_axiom(&sig(0)), Err(SyntaxError::EmptyFresh));
        let s = sig(2);
        let e = parse("(exists (?x) (= ?x c0))", &s).unwrap();
        assert_eq!(qe_transform(&e, &s).unwrap(), parse("(or (= c0 c0) (= c1 c0))", &s).unwrap());
        let q = parse("(forall (?x ?y) (R ?x ?y))", &s).unwrap();
        match qe_transform(&q, &s).unwrap() {
            Formula::And(cs) => assert_eq!(cs.len(), 4),
            other => panic!("unexpected {other}"),
        }
        let free = parse("(or (P c0) (not (= c1 c0)))", &s).unwrap();
        assert_eq!(qe_transform(&free, &s).unwrap(), free);
    }

    #[test]
    fn tuples_count() {
        assert_eq!(tuples(&[1, 2, 3], 2).len(), 9);
        assert_eq!(tuples(&[1, 2], 0), vec![Vec::<i32>::new()]);
    }
}
