use std::fmt;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use super::{ConsistencyProperty, Indexed};
use crate::syntax::{nnf_step, tuples, Formula, Term};

use super::universe::str2_variants;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Clause {
    Con,
    #[serde(rename = "Ind.1")]
    Ind1,
    #[serde(rename = "Ind.2")]
    Ind2,
    #[serde(rename = "Ind.3")]
    Ind3,
    #[serde(rename = "Ind.4")]
    Ind4,
    #[serde(rename = "Ind.5")]
    Ind5,
    #[serde(rename = "Str.1")]
    Str1,
    #[serde(rename = "Str.2")]
    Str2,
    #[serde(rename = "Str.3")]
    Str3,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Clause::Con => "Con",
            Clause::Ind1 => "Ind.1",
            Clause::Ind2 => "Ind.2",
            Clause::Ind3 => "Ind.3",
            Clause::Ind4 => "Ind.4",
            Clause::Ind5 => "Ind.5",
            Clause::Str1 => "Str.1",
            Clause::Str2 => "Str.2",
            Clause::Str3 => "Str.3",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClauseViolation {
    pub clause: Clause,
    pub member: Vec<String>,
    /// The member sentence that triggered the clause, if any.
    pub trigger: Option<String>,
    /// What should have been addable (one candidate for the existential clauses).
    pub missing: Vec<String>,
}

impl fmt::Display for ClauseViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} fails at {{{}}}", self.clause, self.member.join(", "))?;
        if let Some(t) = &self.trigger {
            write!(f, " on {t}")?;
        }
        if !self.missing.is_empty() {
            write!(f, " (needs {})", self.missing.join(" or "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub holds: bool,
    pub members: usize,
    pub checks: u64,
    pub violation: Option<ClauseViolation>,
}

struct Ctx<'a> {
    ix: &'a Indexed,
    all: Vec<String>,
    fresh: Vec<String>,
    checks: u64,
}

impl Ctx<'_> {
    fn accepts(&mut self, s: &FixedBitSet, extra: &[&Formula]) -> bool {
        self.checks += 1;
        self.ix.accepts(s, extra)
    }
}

fn violation(ix: &Indexed, clause: Clause, s: &FixedBitSet, trigger: Option<&Formula>, missing: Vec<Formula>) -> ClauseViolation {
    ClauseViolation {
        clause,
        member: ix.render(s),
        trigger: trigger.map(Formula::to_string),
        missing: missing.iter().map(Formula::to_string).collect(),
    }
}

/// Checks every clause for every member; reports the first failure found.
pub fn verify_consistency_property(s: &ConsistencyProperty) -> VerifyReport {
    let ix = Indexed::new(s);
    let mut ctx = Ctx { ix: &ix, all: s.sig.constants(), fresh: s.sig.fresh_constants().to_vec(), checks: 0 };
    let violation = check_all(&mut ctx);
    VerifyReport { holds: violation.is_none(), members: s.members.len(), checks: ctx.checks, violation }
}

fn check_all(ctx: &mut Ctx) -> Option<ClauseViolation> {
    let ix = ctx.ix;
    for m in &ix.members {
        for i in m.ones() {
            ctx.checks += 1;
            let neg = ix.formulas[i].clone().negate();
            if let Some(&j) = ix.index.get(&neg) {
                if m.contains(j) {
                    return Some(violation(ix, Clause::Con, m, Some(&ix.formulas[i]), Vec::new()));
                }
            }
        }
    }
    for m in &ix.members {
        for i in m.ones() {
            if let Some(v) = check_sentence(ctx, m, &ix.formulas[i]) {
                return Some(v);
            }
        }
        let all = ctx.all.clone();
        for d in &all {
            let options: Vec<Formula> = ctx.fresh.iter().map(|c| Formula::eq_c(c.clone(), d.clone())).collect();
            if !options.iter().any(|o| ctx.accepts(m, &[o])) {
                return Some(violation(ix, Clause::Str3, m, None, options));
            }
        }
    }
    None
}

fn check_sentence(ctx: &mut Ctx, m: &FixedBitSet, f: &Formula) -> Option<ClauseViolation> {
    let ix = ctx.ix;
    match f {
        Formula::Not(inner) => {
            let step = nnf_step(inner);
            if !ctx.accepts(m, &[&step]) {
                return Some(violation(ix, Clause::Ind1, m, Some(f), vec![step]));
            }
        }
        Formula::And(cs) => {
            for c in cs {
                if !ctx.accepts(m, &[c]) {
                    return Some(violation(ix, Clause::Ind2, m, Some(f), vec![c.clone()]));
                }
            }
        }
        Formula::Or(cs) => {
            if !cs.iter().any(|c| ctx.accepts(m, &[c])) {
                return Some(violation(ix, Clause::Ind4, m, Some(f), cs.clone()));
            }
        }
        Formula::Forall(vs, body) => {
            for inst in tuples(&ctx.all, vs.len()) {
                let g = body.instantiate(vs, &inst);
                if !ctx.accepts(m, &[&g]) {
                    return Some(violation(ix, Clause::Ind3, m, Some(f), vec![g]));
                }
            }
        }
        Formula::Exists(vs, body) => {
            let options: Vec<Formula> = tuples(&ctx.fresh, vs.len()).iter().map(|inst| body.instantiate(vs, inst)).collect();
            if !options.iter().any(|g| ctx.accepts(m, &[g])) {
                return Some(violation(ix, Clause::Ind5, m, Some(f), options));
            }
        }
        Formula::Eq(Term::Const(c), Term::Const(d)) => {
            let sym = Formula::eq_c(d.clone(), c.clone());
            if !ctx.accepts(m, &[&sym]) {
                return Some(violation(ix, Clause::Str1, m, Some(f), vec![sym]));
            }
            for j in m.ones() {
                let phi = &ix.formulas[j];
                if !phi.is_atomic() {
                    continue;
                }
                for g in str2_variants(phi, d, c) {
                    if !ctx.accepts(m, &[&g]) {
                        return Some(violation(ix, Clause::Str2, m, Some(f), vec![g]));
                    }
                }
            }
        }
        _ => {}
    }
    None
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::consprop::Reading;
    use crate::syntax::{parse, Signature};

    fn prop(sig: &Signature, members: &[&[&str]], reading: Reading) -> ConsistencyProperty {
        let members = members.iter().map(|m| m.iter().map(|s| parse(s, sig).unwrap()).collect::<BTreeSet<_>>()).collect();
        ConsistencyProperty::new(sig.clone(), members, reading)
    }

    fn clause(s: &ConsistencyProperty) -> Option<Clause> {
        verify_consistency_property(s).violation.map(|v| v.clause)
    }

    #[test]
    fn raw_equality_family_fails_str3_at_empty_member() {
        let sig = Signature::new(Vec::<(&str, usize)>::new(), vec!["d"], vec!["c"]).unwrap();
        let s = prop(&sig, &[&[], &["(= c d)"], &["(= c d)", "(= d c)"]], Reading::Exact);
        let v = verify_consistency_property(&s).violation.unwrap();
        assert_eq!(v.clause, Clause::Str3);
        assert!(v.member.is_empty());
    }

    #[test]
    fn contradictory_member_fails_con() {
        let sig = Signature::with_fresh(&[("P", 0)], 1);
        let s = prop(&sig, &[&["(P)", "(not (P))"]], Reading::Exact);
        assert_eq!(clause(&s), Some(Clause::Con));
    }

    #[test]
    fn empty_disjunction_fails_ind4() {
        let sig = Signature::with_fresh(&[], 1);
        let s = prop(&sig, &[&["(or)", "(= c0 c0)"], &["(= c0 c0)"]], Reading::Exact);
        assert_eq!(clause(&s), Some(Clause::Ind4));
    }

    #[test]
    fn singleton_property_over_one_constant() {
        let sig = Signature::with_fresh(&[], 1);
        let s = prop(&sig, &[&[], &["(= c0 c0)"]], Reading::Exact);
        assert!(verify_consistency_property(&s).holds);
        let t = prop(&sig, &[&[]], Reading::Exact);
        assert_eq!(clause(&t), Some(Clause::Str3));
        let e = prop(&sig, &[&[], &["(= c0 c0)"]], Reading::Extension);
        assert!(verify_consistency_property(&e).holds);
    }

    #[test]
    fn extension_reading_accepts_supersets() {
        let sig = Signature::with_fresh(&[("P", 0), ("Q", 0)], 1);
        let exact = prop(&sig, &[&["(and (P) (Q))", "(P)", "(Q)", "(= c0 c0)"], &["(and (P) (Q))"]], Reading::Exact);
        assert_eq!(clause(&exact), Some(Clause::Ind2));
        let ext = ConsistencyProperty { reading: Reading::Extension, ..exact };
        assert!(verify_consistency_property(&ext).holds);
    }

    #[test]
    fn str2_needs_partial_replacements() {
        let sig = Signature::with_fresh(&[("R", 2)], 2);
        let base = ["(= c0 c1)", "(= c1 c0)", "(R c1 c1)", "(= c0 c0)", "(= c1 c1)"];
        let mut full: Vec<&str> = base.to_vec();
        full.extend(["(R c0 c1)", "(R c1 c0)"]);
        let s = prop(&sig, &[&full], Reading::Extension);
        assert_eq!(clause(&s), Some(Clause::Str2));
        full.push("(R c0 c0)");
        let s = prop(&sig, &[&full], Reading::Extension);
        assert!(verify_consistency_property(&s).holds);
    }
}
