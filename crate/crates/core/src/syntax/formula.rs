use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::SyntaxError;

/// A variable or a constant; the signature is relational, so there are no
/// compound terms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn cons(name: impl Into<String>) -> Self {
        Term::Const(name.into())
    }

    pub fn as_const(&self) -> Option<&str> {
        match self {
            Term::Const(c) => Some(c),
            Term::Var(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "?{v}"),
            Term::Const(c) => f.write_str(c),
        }
    }
}

/// Formula of the finitely indexed fragment: conjunctions and disjunctions of
/// any finite arity (including zero) and quantifier blocks over finite
/// variable strings.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom { rel: String, args: Vec<Term> },
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Forall(Vec<String>, Box<Formula>),
    Exists(Vec<String>, Box<Formula>),
}

impl Formula {
    pub fn atom(rel: impl Into<String>, args: Vec<Term>) -> Self {
        Formula::Atom { rel: rel.into(), args }
    }

    /// `c = d` between two constants.
    pub fn eq_c(c: impl Into<String>, d: impl Into<String>) -> Self {
        Formula::Eq(Term::cons(c), Term::cons(d))
    }

    /// `¬(c = d)` between two constants.
    pub fn neq_c(c: impl Into<String>, d: impl Into<String>) -> Self {
        Formula::eq_c(c, d).negate()
    }

    pub fn negate(self) -> Self {
        Formula::Not(Box::new(self))
    }

    pub fn forall<S: Into<String>>(vars: impl IntoIterator<Item = S>, body: Formula) -> Self {
        Formula::Forall(vars.into_iter().map(Into::into).collect(), Box::new(body))
    }

    pub fn exists<S: Into<String>>(vars: impl IntoIterator<Item = S>, body: Formula) -> Self {
        Formula::Exists(vars.into_iter().map(Into::into).collect(), Box::new(body))
    }

    pub fn top() -> Self {
        Formula::And(Vec::new())
    }

    pub fn bottom() -> Self {
        Formula::Or(Vec::new())
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Atom { .. } | Formula::Eq(..))
    }

    /// Atomic or negated atomic.
    pub fn is_literal(&self) -> bool {
        match self {
            Formula::Not(inner) => inner.is_atomic(),
            f => f.is_atomic(),
        }
    }

    pub fn has_quantifier(&self) -> bool {
        match self {
            Formula::Atom { .. } | Formula::Eq(..) => false,
            Formula::Not(g) => g.has_quantifier(),
            Formula::And(cs) | Formula::Or(cs) => cs.iter().any(Formula::has_quantifier),
            Formula::Forall(..) | Formula::Exists(..) => true,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut term = |t: &Term, bound: &Vec<String>| {
            if let Term::Var(v) = t {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
        };
        match self {
            Formula::Atom { args, .. } => args.iter().for_each(|t| term(t, bound)),
            Formula::Eq(a, b) => {
                term(a, bound);
                term(b, bound);
            }
            Formula::Not(g) => g.collect_free(bound, out),
            Formula::And(cs) | Formula::Or(cs) => cs.iter().for_each(|c| c.collect_free(bound, out)),
            Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
                let depth = bound.len();
                bound.extend(vs.iter().cloned());
                g.collect_free(bound, out);
                bound.truncate(depth);
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Constant symbols occurring anywhere in the formula.
    pub fn constants(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_terms(&mut |t| {
            if let Term::Const(c) = t {
                out.insert(c.clone());
            }
        });
        out
    }

    fn visit_terms(&self, f: &mut impl FnMut(&Term)) {
        match self {
            Formula::Atom { args, .. } => args.iter().for_each(&mut *f),
            Formula::Eq(a, b) => {
                f(a);
                f(b);
            }
            Formula::Not(g) | Formula::Forall(_, g) | Formula::Exists(_, g) => g.visit_terms(f),
            Formula::And(cs) | Formula::Or(cs) => cs.iter().for_each(|c| c.visit_terms(f)),
        }
    }

    /// Number of nodes in the syntax tree.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom { .. } | Formula::Eq(..) => 1,
            Formula::Not(g) | Formula::Forall(_, g) | Formula::Exists(_, g) => 1 + g.size(),
            Formula::And(cs) | Formula::Or(cs) => 1 + cs.iter().map(Formula::size).sum::<usize>(),
        }
    }

    /// Replaces free occurrences of the bound variables by constants.
    /// Occurrences under a quantifier re-binding the variable are left alone.
    pub fn substitute(&self, binding: &BTreeMap<String, String>) -> Formula {
        let terms: BTreeMap<String, Term> = binding.iter().map(|(v, c)| (v.clone(), Term::cons(c.clone()))).collect();
        self.substitute_terms(&terms).expect("constants cannot be captured")
    }

    /// Simultaneous substitution of terms for free variables, failing if a
    /// substituted variable would be captured by an inner quantifier.
    pub fn substitute_terms(&self, binding: &BTreeMap<String, Term>) -> Result<Formula, SyntaxError> {
        if binding.is_empty() {
            return Ok(self.clone());
        }
        let map = |t: &Term| match t {
            Term::Var(v) => binding.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::Const(_) => t.clone(),
        };
        Ok(match self {
            Formula::Atom { rel, args } => Formula::Atom { rel: rel.clone(), args: args.iter().map(map).collect() },
            Formula::Eq(a, b) => Formula::Eq(map(a), map(b)),
            Formula::Not(g) => Formula::Not(Box::new(g.substitute_terms(binding)?)),
            Formula::And(cs) => Formula::And(cs.iter().map(|c| c.substitute_terms(binding)).collect::<Result<_, _>>()?),
            Formula::Or(cs) => Formula::Or(cs.iter().map(|c| c.substitute_terms(binding)).collect::<Result<_, _>>()?),
            Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
                let inner: BTreeMap<String, Term> =
                    binding.iter().filter(|(v, _)| !vs.contains(v)).map(|(v, t)| (v.clone(), t.clone())).collect();
                let body_free = g.free_vars();
                for (v, t) in &inner {
                    if let Term::Var(w) = t {
                        if vs.contains(w) && body_free.contains(v) {
                            return Err(SyntaxError::Capture { var: w.clone() });
                        }
                    }
                }
                let body = Box::new(g.substitute_terms(&inner)?);
                match self {
                    Formula::Forall(..) => Formula::Forall(vs.clone(), body),
                    _ => Formula::Exists(vs.clone(), body),
                }
            }
        })
    }

    /// Instantiates a variable string with a tuple of constants.
    pub fn instantiate(&self, vars: &[String], consts: &[String]) -> Formula {
        let binding = vars.iter().cloned().zip(consts.iter().cloned()).collect();
        self.substitute(&binding)
    }

    /// Copy with conjunction and disjunction children sorted recursively, so
    /// that formulas differing only in child order compare equal.
    pub fn canonical(&self) -> Formula {
        match self {
            Formula::Atom { .. } | Formula::Eq(..) => self.clone(),
            Formula::Not(g) => Formula::Not(Box::new(g.canonical())),
            Formula::And(cs) => {
                let mut cs: Vec<_> = cs.iter().map(Formula::canonical).collect();
                cs.sort();
                Formula::And(cs)
            }
            Formula::Or(cs) => {
                let mut cs: Vec<_> = cs.iter().map(Formula::canonical).collect();
                cs.sort();
                Formula::Or(cs)
            }
            Formula::Forall(vs, g) => Formula::Forall(vs.clone(), Box::new(g.canonical())),
            Formula::Exists(vs, g) => Formula::Exists(vs.clone(), Box::new(g.canonical())),
        }
    }

    /// Checks arities, declared symbols and duplicate-free quantifier strings.
    pub fn check(&self, sig: &super::Signature) -> Result<(), SyntaxError> {
        let term = |t: &Term| match t {
            Term::Const(c) if !sig.is_constant(c) => Err(SyntaxError::Undeclared { symbol: c.clone(), pos: None }),
            _ => Ok(()),
        };
        match self {
            Formula::Atom { rel, args } => {
                let arity = sig.arity(rel).ok_or_else(|| SyntaxError::Undeclared { symbol: rel.clone(), pos: None })?;
                if arity != args.len() {
                    return Err(SyntaxError::Arity { rel: rel.clone(), expected: arity, found: args.len(), pos: None });
                }
                args.iter().try_for_each(term)
            }
            Formula::Eq(a, b) => {
                term(a)?;
                term(b)
            }
            Formula::Not(g) => g.check(sig),
            Formula::And(cs) | Formula::Or(cs) => cs.iter().try_for_each(|c| c.check(sig)),
            Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
                let distinct: BTreeSet<_> = vs.iter().collect();
                if distinct.len() != vs.len() {
                    return Err(SyntaxError::DuplicateVariable { pos: None });
                }
                g.check(sig)
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, head: &str, cs: &[Formula]| {
            f.write_str("(")?;
            f.write_str(head)?;
            for c in cs {
                write!(f, " {c}")?;
            }
            f.write_str(")")
        };
        let quant = |f: &mut fmt::Formatter<'_>, head: &str, vs: &[String], body: &Formula| {
            let vars: Vec<String> = vs.iter().map(|v| format!("?{v}")).collect();
            write!(f, "({head} ({}) {body})", vars.join(" "))
        };
        match self {
            Formula::Atom { rel, args } => {
                write!(f, "({rel}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
            Formula::Eq(a, b) => write!(f, "(= {a} {b})"),
            Formula::Not(g) => write!(f, "(not {g})"),
            Formula::And(cs) => list(f, "and", cs),
            Formula::Or(cs) => list(f, "or", cs),
            Formula::Forall(vs, g) => quant(f, "forall", vs, g),
            Formula::Exists(vs, g) => quant(f, "exists", vs, g),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Term {
        Term::var("x")
    }

    #[test]
    fn substitute_replaces_free_occurrence() {
        let f = Formula::Eq(x(), Term::cons("c0"));
        let b = BTreeMap::from([("x".to_string(), "c1".to_string())]);
        assert_eq!(f.substitute(&b), Formula::eq_c("c1", "c0"));
    }

    #[test]
    fn substitute_leaves_bound_variable() {
        let f = Formula::forall(["x"], Formula::Eq(x(), Term::cons("c0")));
        let b = BTreeMap::from([("x".to_string(), "c1".to_string())]);
        assert_eq!(f.substitute(&b), f);
    }

    #[test]
    fn substitute_partial_binding() {
        let f = Formula::atom("R", vec![x(), Term::var("y")]);
        let b = BTreeMap::from([("x".to_string(), "c0".to_string())]);
        assert_eq!(f.substitute(&b), Formula::atom("R", vec![Term::cons("c0"), Term::var("y")]));
    }

    #[test]
    fn capture_is_reported() {
        // (forall (?y) (R ?x ?y)) with x := ?y would capture.
        let f = Formula::forall(["y"], Formula::atom("R", vec![x(), Term::var("y")]));
        let b = BTreeMap::from([("x".to_string(), Term::var("y"))]);
        assert!(matches!(f.substitute_terms(&b), Err(SyntaxError::Capture { .. })));
    }

    #[test]
    fn free_vars_respect_binding() {
        let f = Formula::And(vec![
            Formula::forall(["x"], Formula::atom("R", vec![x(), Term::var("y")])),
            Formula::Eq(x(), Term::cons("c")),
        ]);
        assert_eq!(f.free_vars(), BTreeSet::from(["x".to_string(), "y".to_string()]));
    }

    #[test]
    fn canonical_ignores_child_order() {
        let a = Formula::eq_c("a", "b");
        let b = Formula::eq_c("c", "d");
        let f = Formula::Or(vec![a.clone(), b.clone()]);
        let g = Formula::Or(vec![b, a]);
        assert_ne!(f, g);
        assert_eq!(f.canonical(), g.canonical());
    }
}
