use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{ProofTree, Rule, RuleData, Sequent};
use crate::syntax::{Formula, Term};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckFailure {
    /// Child indices from the root to the failing node.
    pub path: Vec<usize>,
    pub rule: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckVerdict {
    pub valid: bool,
    pub nodes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<CheckFailure>,
}

/// Checks every node against its rule; reports the first failing node in preorder.
pub fn check_proof(p: &ProofTree) -> CheckVerdict {
    let mut path = Vec::new();
    match walk(p, &mut path) {
        Ok(()) => CheckVerdict { valid: true, nodes: p.size(), failure: None },
        Err((path, reason)) => CheckVerdict { valid: false, nodes: p.size(), failure: Some(CheckFailure { rule: p.node(&path).map(|n| n.rule.name()).unwrap_or_default(), path, reason }) },
    }
}

fn walk(p: &ProofTree, path: &mut Vec<usize>) -> Result<(), (Vec<usize>, String)> {
    check_node(p).map_err(|r| (path.clone(), r))?;
    for (i, q) in p.premises.iter().enumerate() {
        path.push(i);
        walk(q, path)?;
        path.pop();
    }
    Ok(())
}

type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn set(items: impl IntoIterator<Item = Formula>) -> BTreeSet<Formula> {
    items.into_iter().collect()
}

fn premises(p: &ProofTree, n: usize) -> Check {
    ensure(p.premises.len() == n, || format!("expects {n} premises, found {}", p.premises.len()))
}

fn principal(d: &RuleData) -> Result<&Formula, String> {
    d.principal.as_ref().ok_or_else(|| "missing principal formula".to_string())
}

/// `premise == (ctx \ {p}) ∪ active` or `premise == ctx ∪ active`, with `p ∈ ctx`.
fn context_matches(ctx: &BTreeSet<Formula>, p: &Formula, active: &BTreeSet<Formula>, premise: &BTreeSet<Formula>) -> bool {
    if !ctx.contains(p) {
        return false;
    }
    let mut without = ctx.clone();
    without.remove(p);
    let with_p: BTreeSet<Formula> = ctx.union(active).cloned().collect();
    let without_p: BTreeSet<Formula> = without.union(active).cloned().collect();
    *premise == with_p || *premise == without_p
}

fn eq(a: &Term, b: &Term) -> Formula {
    Formula::Eq(a.clone(), b.clone())
}

fn terms(d: &RuleData, n: usize) -> Result<&[Term], String> {
    ensure(d.terms.len() == n, || format!("expects {n} terms, found {}", d.terms.len()))?;
    Ok(&d.terms)
}

fn instantiate(body: &Formula, vars: &[String], ts: &[Term]) -> Result<Formula, String> {
    ensure(vars.len() == ts.len(), || format!("{} variables but {} terms", vars.len(), ts.len()))?;
    let binding: BTreeMap<String, Term> = vars.iter().cloned().zip(ts.iter().cloned()).collect();
    body.substitute_terms(&binding).map_err(|e| e.to_string())
}

fn eigen(vars: &[String], side: &[&BTreeSet<Formula>], p: &Formula) -> Check {
    for f in side.iter().flat_map(|s| s.iter()).filter(|f| *f != p) {
        let free = f.free_vars();
        if let Some(v) = vars.iter().find(|v| free.contains(*v)) {
            return Err(format!("eigenvariable condition violated: ?{v} is free in {f}"));
        }
    }
    Ok(())
}

fn distinct(cs: &[Formula]) -> Vec<&Formula> {
    let mut seen = BTreeSet::new();
    cs.iter().filter(|c| seen.insert(*c)).collect()
}

fn check_node(p: &ProofTree) -> Check {
    let c = &p.conclusion;
    let d = &p.data;
    let prem = |i: usize| -> &Sequent { &p.premises[i].conclusion };
    match p.rule {
        Rule::Eq1 => {
            premises(p, 0)?;
            let t = terms(d, 1)?;
            ensure(*c == Sequent::new([], [eq(&t[0], &t[0])]), || "conclusion is not |- c = c".into())
        }
        Rule::Eq2 => {
            premises(p, 0)?;
            let t = terms(d, 2)?;
            ensure(*c == Sequent::new([eq(&t[0], &t[1])], [eq(&t[1], &t[0])]), || "conclusion is not c = d |- d = c".into())
        }
        Rule::Eq3 => {
            premises(p, 0)?;
            let t = terms(d, 3)?;
            ensure(*c == Sequent::new([eq(&t[0], &t[1]), eq(&t[1], &t[2])], [eq(&t[0], &t[2])]), || {
                "conclusion is not c = d, d = e |- c = e".into()
            })
        }
        Rule::Eq4 => {
            premises(p, 0)?;
            let phi = d.template.as_ref().ok_or("missing template")?;
            ensure(d.from.len() == d.vars.len() && d.to.len() == d.vars.len(), || "vars, from and to differ in length".into())?;
            let before = instantiate(phi, &d.vars, &d.from)?;
            let after = instantiate(phi, &d.vars, &d.to)?;
            let mut left: BTreeSet<Formula> = d.to.iter().zip(&d.from).map(|(u, t)| eq(u, t)).collect();
            left.insert(before);
            ensure(*c == Sequent { left, right: set([after]) }, || "conclusion does not match the substitution instance".into())
        }
        Rule::Axiom => {
            premises(p, 0)?;
            let f = principal(d)?;
            ensure(c.left.contains(f) && c.right.contains(f), || format!("{f} is not on both sides"))
        }
        Rule::Weakening => {
            premises(p, 1)?;
            ensure(prem(0).left.is_subset(&c.left) && prem(0).right.is_subset(&c.right), || "premise is not contained in conclusion".into())
        }
        Rule::Substitution => {
            premises(p, 1)?;
            let apply = |s: &BTreeSet<Formula>| -> Result<BTreeSet<Formula>, String> {
                s.iter().map(|f| f.substitute_terms(&d.binding).map_err(|e| e.to_string())).collect()
            };
            let expected = Sequent { left: apply(&prem(0).left)?, right: apply(&prem(0).right)? };
            ensure(*c == expected, || "conclusion is not the substituted premise".into())
        }
        Rule::Cut => {
            premises(p, 2)?;
            let phi = d.cut.as_ref().ok_or("missing cut formula")?;
            let (a, b) = (prem(0), prem(1));
            ensure(a.left.contains(phi) && b.right.contains(phi), || format!("cut formula {phi} not active in premises"))?;
            let mut gamma_opts = vec![a.left.clone()];
            let mut g2 = a.left.clone();
            g2.remove(phi);
            gamma_opts.push(g2);
            let mut delta_opts = vec![b.right.clone()];
            let mut d2 = b.right.clone();
            d2.remove(phi);
            delta_opts.push(d2);
            let ok = gamma_opts.iter().any(|g| {
                let left: BTreeSet<Formula> = g.union(&b.left).cloned().collect();
                left == c.left && delta_opts.iter().any(|dd| a.right.union(dd).cloned().collect::<BTreeSet<_>>() == c.right)
            });
            ensure(ok, || "conclusion is not the union of the cut contexts".into())
        }
        Rule::AndLeft => {
            premises(p, 1)?;
            let f = principal(d)?;
            let Formula::And(cs) = f else { return Err(format!("{f} is not a conjunction")) };
            ensure(context_matches(&c.left, f, &set(cs.iter().cloned()), &prem(0).left), || "left side does not match".into())?;
            ensure(prem(0).right == c.right, || "right side changed".into())
        }
        Rule::AndRight => {
            let f = principal(d)?;
            let Formula::And(cs) = f else { return Err(format!("{f} is not a conjunction")) };
            let kids = distinct(cs);
            premises(p, kids.len())?;
            for (i, k) in kids.iter().enumerate() {
                ensure(prem(i).left == c.left, || format!("premise {i}: left side changed"))?;
                ensure(context_matches(&c.right, f, &set([(*k).clone()]), &prem(i).right), || format!("premise {i}: right side does not match"))?;
            }
            Ok(())
        }
        Rule::OrRight => {
            premises(p, 1)?;
            let f = principal(d)?;
            let Formula::Or(cs) = f else { return Err(format!("{f} is not a disjunction")) };
            ensure(context_matches(&c.right, f, &set(cs.iter().cloned()), &prem(0).right), || "right side does not match".into())?;
            ensure(prem(0).left == c.left, || "left side changed".into())
        }
        Rule::OrLeft => {
            let f = principal(d)?;
            let Formula::Or(cs) = f else { return Err(format!("{f} is not a disjunction")) };
            let kids = distinct(cs);
            premises(p, kids.len())?;
            for (i, k) in kids.iter().enumerate() {
                ensure(prem(i).right == c.right, || format!("premise {i}: right side changed"))?;
                ensure(context_matches(&c.left, f, &set([(*k).clone()]), &prem(i).left), || format!("premise {i}: left side does not match"))?;
            }
            Ok(())
        }
        Rule::ForallLeft | Rule::ExistsLeft => {
            premises(p, 1)?;
            let f = principal(d)?;
            let (vs, body) = match (p.rule, f) {
                (Rule::ForallLeft, Formula::Forall(vs, b)) | (Rule::ExistsLeft, Formula::Exists(vs, b)) => (vs, b),
                _ => return Err(format!("{f} has the wrong quantifier")),
            };
            let active = if p.rule == Rule::ForallLeft {
                instantiate(body, vs, terms(d, vs.len())?)?
            } else {
                eigen(vs, &[&c.left, &c.right], f)?;
                (**body).clone()
            };
            ensure(context_matches(&c.left, f, &set([active]), &prem(0).left), || "left side does not match".into())?;
            ensure(prem(0).right == c.right, || "right side changed".into())
        }
        Rule::ForallRight | Rule::ExistsRight => {
            premises(p, 1)?;
            let f = principal(d)?;
            let (vs, body) = match (p.rule, f) {
                (Rule::ForallRight, Formula::Forall(vs, b)) | (Rule::ExistsRight, Formula::Exists(vs, b)) => (vs, b),
                _ => return Err(format!("{f} has the wrong quantifier")),
            };
            let active = if p.rule == Rule::ExistsRight {
                instantiate(body, vs, terms(d, vs.len())?)?
            } else {
                eigen(vs, &[&c.left, &c.right], f)?;
                (**body).clone()
            };
            ensure(context_matches(&c.right, f, &set([active]), &prem(0).right), || "right side does not match".into())?;
            ensure(prem(0).left == c.left, || "left side changed".into())
        }
        Rule::NotLeft => {
            premises(p, 1)?;
            let f = principal(d)?;
            let Formula::Not(g) = f else { return Err(format!("{f} is not a negation")) };
            let mut left = c.left.clone();
            ensure(left.remove(f), || format!("{f} is not on the left"))?;
            let ok_left = prem(0).left == left || prem(0).left == c.left;
            let ok_right = prem(0).right == c.right.union(&set([(**g).clone()])).cloned().collect();
            ensure(ok_left && ok_right, || "premise does not move the negated formula right".into())
        }
        Rule::NotRight => {
            premises(p, 1)?;
            let f = principal(d)?;
            let Formula::Not(g) = f else { return Err(format!("{f} is not a negation")) };
            let mut right = c.right.clone();
            ensure(right.remove(f), || format!("{f} is not on the right"))?;
            let ok_right = prem(0).right == right || prem(0).right == c.right;
            let ok_left = prem(0).left == c.left.union(&set([(**g).clone()])).cloned().collect();
            ensure(ok_left && ok_right, || "premise does not move the negated formula left".into())
        }
    }
}
