use std::collections::BTreeMap;

use super::{BValuedModel, BvError};
use crate::balg::Elem;
use crate::syntax::{Formula, Term};

/// Variable name to domain index.
pub type Assignment = BTreeMap<String, usize>;

/// Boolean evaluation with a cap on the number of formula nodes visited.
pub struct Evaluator<'m> {
    model: &'m BValuedModel,
    cap: u64,
    steps: u64,
}

impl<'m> Evaluator<'m> {
    pub fn new(model: &'m BValuedModel, cap: u64) -> Self {
        Evaluator { model, cap, steps: 0 }
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn eval(&mut self, f: &Formula, a: &Assignment) -> Result<Elem, BvError> {
        let mut a = a.clone();
        self.go(f, &mut a)
    }

    pub fn eval_sentence(&mut self, f: &Formula) -> Result<Elem, BvError> {
        self.go(f, &mut Assignment::new())
    }

    fn term(&self, t: &Term, a: &Assignment) -> Result<usize, BvError> {
        match t {
            Term::Var(v) => a.get(v).copied().ok_or_else(|| BvError::UnboundVariable(v.clone())),
            Term::Const(c) => self.model.const_index(c).ok_or_else(|| BvError::UninterpretedConstant(c.clone())),
        }
    }

    fn go(&mut self, f: &Formula, a: &mut Assignment) -> Result<Elem, BvError> {
        self.steps += 1;
        if self.steps > self.cap {
            return Err(BvError::Resource { cap: self.cap });
        }
        let m = self.model;
        let b = m.algebra();
        match f {
            Formula::Atom { rel, args } => {
                let tuple = args.iter().map(|t| self.term(t, a)).collect::<Result<Vec<_>, _>>()?;
                m.rel_value(rel, &tuple).cloned().ok_or_else(|| BvError::UnknownRelation(rel.clone()))
            }
            Formula::Eq(s, t) => Ok(m.eq_value(self.term(s, a)?, self.term(t, a)?).clone()),
            Formula::Not(g) => Ok(self.go(g, a)?.complement()),
            Formula::And(cs) => {
                let mut acc = b.one();
                for c in cs {
                    acc = acc.meet(&self.go(c, a)?);
                    if acc.is_zero() {
                        break;
                    }
                }
                Ok(acc)
            }
            Formula::Or(cs) => {
                let mut acc = b.zero();
                for c in cs {
                    acc = acc.join(&self.go(c, a)?);
                    if acc.is_one() {
                        break;
                    }
                }
                Ok(acc)
            }
            Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
                let universal = matches!(f, Formula::Forall(..));
                let saved: Vec<Option<usize>> = vs.iter().map(|v| a.get(v).copied()).collect();
                let n = m.size();
                let k = vs.len();
                let mut acc = if universal { b.one() } else { b.zero() };
                let mut digits = vec![0usize; k];
                let result = loop {
                    for (v, &d) in vs.iter().zip(&digits) {
                        a.insert(v.clone(), d);
                    }
                    let val = match self.go(g, a) {
                        Ok(v) => v,
                        Err(e) => break Err(e),
                    };
                    acc = if universal { acc.meet(&val) } else { acc.join(&val) };
                    if (universal && acc.is_zero()) || (!universal && acc.is_one()) {
                        break Ok(acc);
                    }
                    // odometer increment over domain^k
                    let mut done = true;
                    for d in digits.iter_mut().rev() {
                        *d += 1;
                        if *d < n {
                            done = false;
                            break;
                        }
                        *d = 0;
                    }
                    if done {
                        break Ok(acc);
                    }
                };
                for (v, old) in vs.iter().zip(saved) {
                    match old {
                        Some(o) => a.insert(v.clone(), o),
                        None => a.remove(v),
                    };
                }
                result
            }
        }
    }
}

/// Boolean value of `f` under `a` with the default step cap.
pub fn eval(m: &BValuedModel, f: &Formula, a: &Assignment) -> Result<Elem, BvError> {
    Evaluator::new(m, crate::budget::Budget::default().eval_cap).eval(f, a)
}

impl BValuedModel {
    pub fn eval_sentence(&self, f: &Formula) -> Result<Elem, BvError> {
        eval(self, f, &Assignment::new())
    }

    /// Whether the sentence has value 1.
    pub fn satisfies(&self, f: &Formula) -> Result<bool, BvError> {
        Ok(self.eval_sentence(f)?.is_one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::balg::BoolAlg;
    use crate::bvmodel::RelTable;
    use crate::syntax::{parse, Signature};

    fn sample() -> (BValuedModel, Signature) {
        let e = |s| Elem::from_bits(s).unwrap();
        let eq = vec![vec![e("11"), e("00")], vec![e("00"), e("11")]];
        let rel = RelTable { arity: 1, table: vec![e("10"), e("01")] };
        let m = BValuedModel::new(
            BoolAlg::new(2).unwrap(),
            vec!["x".into(), "y".into()],
            eq,
            BTreeMap::from([("P".into(), rel)]),
            BTreeMap::from([("c0".into(), 0), ("c1".into(), 1)]),
        )
        .unwrap();
        (m, Signature::with_fresh(&[("P", 1)], 2))
    }

    #[test]
    fn connectives_and_quantifiers() {
        let (m, s) = sample();
        let v = |t| m.eval_sentence(&parse(t, &s).unwrap()).unwrap().to_string();
        assert_eq!(v("(and)"), "11");
        assert_eq!(v("(or)"), "00");
        assert_eq!(v("(P c0)"), "10");
        assert_eq!(v("(not (P c0))"), "01");
        assert_eq!(v("(exists (?v) (P ?v))"), "11");
        assert_eq!(v("(forall (?v) (P ?v))"), "00");
        assert_eq!(v("(forall (?v) (or (= ?v c0) (= ?v c1)))"), "11");
        assert_eq!(v("(exists (?u ?v) (and (P ?u) (P ?v) (not (= ?u ?v))))"), "00");
    }

    #[test]
    fn errors() {
        let (m, s) = sample();
        let open = parse("(P ?z)", &s).unwrap();
        assert_eq!(m.eval_sentence(&open), Err(BvError::UnboundVariable("z".into())));
        let s3 = Signature::with_fresh(&[("P", 1)], 3);
        assert_eq!(m.eval_sentence(&parse("(P c2)", &s3).unwrap()), Err(BvError::UninterpretedConstant("c2".into())));
        let deep = parse("(forall (?a ?b ?c) (exists (?d) (P ?d)))", &s).unwrap();
        let mut ev = Evaluator::new(&m, 5);
        assert_eq!(ev.eval_sentence(&deep), Err(BvError::Resource { cap: 5 }));
    }

    #[test]
    fn assignment_restored_after_quantifier() {
        let (m, s) = sample();
        let f = parse("(and (exists (?v) (P ?v)) (P ?v))", &s).unwrap();
        let a = Assignment::from([("v".into(), 1)]);
        assert_eq!(eval(&m, &f, &a).unwrap().to_string(), "01");
    }
}
