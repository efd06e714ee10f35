//! Seeded generators for formulas, models and catalogs.

use std::collections::BTreeMap;

use rand::seq::IndexedRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::balg::{BoolAlg, Elem};
use crate::bvmodel::{BValuedModel, RelTable};
use crate::syntax::{tuples, Formula, Signature, Term};

pub type Prng = ChaCha8Rng;

pub fn prng(seed: u64) -> Prng {
    ChaCha8Rng::seed_from_u64(seed)
}

struct FormulaGen<'a> {
    rels: Vec<(&'a String, usize)>,
    consts: &'a [String],
    counter: usize,
}

impl FormulaGen<'_> {
    fn term(&self, rng: &mut Prng, scope: &[String]) -> Option<Term> {
        let total = self.consts.len() + scope.len();
        if total == 0 {
            return None;
        }
        let i = rng.random_range(0..total);
        Some(if i < scope.len() { Term::Var(scope[i].clone()) } else { Term::Const(self.consts[i - scope.len()].clone()) })
    }

    fn atomic(&self, rng: &mut Prng, scope: &[String]) -> Formula {
        let use_eq = self.rels.is_empty() || rng.random_bool(0.4);
        if use_eq {
            match (self.term(rng, scope), self.term(rng, scope)) {
                (Some(a), Some(b)) => Formula::Eq(a, b),
                _ => Formula::top(),
            }
        } else {
            let &(rel, arity) = self.rels.choose(rng).expect("nonempty");
            let args: Option<Vec<Term>> = (0..arity).map(|_| self.term(rng, scope)).collect();
            match args {
                Some(args) => Formula::atom(rel.clone(), args),
                None => Formula::bottom(),
            }
        }
    }

    fn formula(&mut self, rng: &mut Prng, depth: usize, scope: &mut Vec<String>) -> Formula {
        if depth == 0 || rng.random_bool(0.2) {
            return self.atomic(rng, scope);
        }
        match rng.random_range(0..5) {
            0 => self.formula(rng, depth - 1, scope).negate(),
            1 | 2 => {
                let k = rng.random_range(0..=3);
                let cs = (0..k).map(|_| self.formula(rng, depth - 1, scope)).collect();
                if rng.random_bool(0.5) {
                    Formula::And(cs)
                } else {
                    Formula::Or(cs)
                }
            }
            _ => {
                let k = rng.random_range(1..=2);
                let mut vars = Vec::new();
                for _ in 0..k {
                    // occasionally shadow a variable already in scope
                    let v = match scope.choose(rng) {
                        Some(v) if rng.random_bool(0.15) && !vars.contains(v) => v.clone(),
                        _ => {
                            self.counter += 1;
                            format!("v{}", self.counter)
                        }
                    };
                    vars.push(v);
                }
                let depth_before = scope.len();
                scope.extend(vars.iter().cloned());
                let body = self.formula(rng, depth - 1, scope);
                scope.truncate(depth_before);
                if rng.random_bool(0.5) {
                    Formula::Forall(vars, Box::new(body))
                } else {
                    Formula::Exists(vars, Box::new(body))
                }
            }
        }
    }
}

/// A random sentence of depth at most `depth` over `sig`.
pub fn random_sentence(rng: &mut Prng, sig: &Signature, depth: usize) -> Formula {
    random_formula(rng, sig, depth, &[])
}

/// A random formula whose free variables are among `free`.
pub fn random_formula(rng: &mut Prng, sig: &Signature, depth: usize, free: &[String]) -> Formula {
    let consts = sig.constants();
    let mut g = FormulaGen { rels: sig.relations().iter().map(|(r, &a)| (r, a)).collect(), consts: &consts, counter: 0 };
    g.formula(rng, depth, &mut free.to_vec())
}

/// A random quantifier-free sentence of depth at most `depth`.
pub fn random_ground(rng: &mut Prng, sig: &Signature, depth: usize) -> Formula {
    let consts = sig.constants();
    let g = FormulaGen { rels: sig.relations().iter().map(|(r, &a)| (r, a)).collect(), consts: &consts, counter: 0 };
    fn go(g: &FormulaGen<'_>, rng: &mut Prng, depth: usize) -> Formula {
        if depth == 0 || rng.random_bool(0.25) {
            return g.atomic(rng, &[]);
        }
        match rng.random_range(0..3) {
            0 => go(g, rng, depth - 1).negate(),
            1 => Formula::And((0..rng.random_range(1..=3)).map(|_| go(g, rng, depth - 1)).collect()),
            _ => Formula::Or((0..rng.random_range(1..=3)).map(|_| go(g, rng, depth - 1)).collect()),
        }
    }
    go(&g, rng, depth)
}

/// A random valid model. Each atom carries its own equivalence relation and
/// congruent relations; the Boolean values collect the atoms where a fact holds.
pub fn random_model(
    rng: &mut Prng,
    relations: &BTreeMap<String, usize>,
    consts: &[String],
    domain: usize,
    atoms: usize,
) -> BValuedModel {
    let algebra = BoolAlg::new(atoms).expect("positive atom count");
    let classes: Vec<Vec<usize>> = (0..atoms).map(|_| (0..domain).map(|_| rng.random_range(0..domain)).collect()).collect();
    let eq = (0..domain)
        .map(|x| (0..domain).map(|y| Elem::from_atoms(atoms, (0..atoms).filter(|&i| classes[i][x] == classes[i][y]))).collect())
        .collect();
    let dom: Vec<usize> = (0..domain).collect();
    let mut rels = BTreeMap::new();
    for (name, &arity) in relations {
        let per_atom: Vec<Vec<bool>> = (0..atoms).map(|_| (0..domain.pow(arity as u32)).map(|_| rng.random_bool(0.5)).collect()).collect();
        let table = tuples(&dom, arity)
            .iter()
            .map(|t| {
                Elem::from_atoms(
                    atoms,
                    (0..atoms).filter(|&i| per_atom[i][t.iter().fold(0, |acc, &x| acc * domain + classes[i][x])]),
                )
            })
            .collect();
        rels.insert(name.clone(), RelTable { arity, table });
    }
    let consts = consts.iter().map(|c| (c.clone(), rng.random_range(0..domain))).collect();
    let labels = (0..domain).map(|i| format!("e{i}")).collect();
    BValuedModel::new(algebra, labels, eq, rels, consts).expect("generator respects the equality axioms")
}

/// Constant interpretation that hits every element, when there are enough constants.
pub fn surjective_consts(rng: &mut Prng, consts: &[String], domain: usize) -> BTreeMap<String, usize> {
    let mut order: Vec<usize> = (0..consts.len()).collect();
    rand::seq::SliceRandom::shuffle(order.as_mut_slice(), rng);
    order.iter().enumerate().map(|(k, &ci)| (consts[ci].clone(), if k < domain { k } else { rng.random_range(0..domain) })).collect()
}

/// A random Tarski model with true equality.
pub fn random_tarski(rng: &mut Prng, relations: &BTreeMap<String, usize>, consts: &[String], domain: usize) -> BValuedModel {
    let dom: Vec<usize> = (0..domain).collect();
    let rels = relations.iter().map(|(r, &a)| (r.clone(), (a, tuples(&dom, a).iter().map(|_| rng.random_bool(0.5)).collect()))).collect();
    let consts = consts.iter().map(|c| (c.clone(), rng.random_range(0..domain))).collect();
    BValuedModel::tarski((0..domain).map(|i| format!("e{i}")).collect(), rels, consts).expect("identity equality is valid")
}

/// Every atomic sentence over the constants of `sig`, including equalities.
pub fn atomic_sentences(sig: &Signature) -> Vec<Formula> {
    let consts: Vec<Term> = sig.constants().into_iter().map(Term::Const).collect();
    let mut out = Vec::new();
    for (a, b) in tuples(&consts, 2).into_iter().map(|t| (t[0].clone(), t[1].clone())) {
        out.push(Formula::Eq(a, b));
    }
    for (r, &arity) in sig.relations() {
        for args in tuples(&consts, arity) {
            out.push(Formula::atom(r.clone(), args));
        }
    }
    out
}

/// The depth-3 test catalog: all atomic sentences and their negations, then
/// `extra` seeded random sentences of depth at most 3.
pub fn depth3_catalog(sig: &Signature, extra: usize, seed: u64) -> Vec<Formula> {
    let mut out: Vec<Formula> = atomic_sentences(sig).into_iter().flat_map(|a| [a.clone(), a.negate()]).collect();
    let mut rng = prng(seed);
    out.extend((0..extra).map(|_| random_sentence(&mut rng, sig, 3)));
    out
}
