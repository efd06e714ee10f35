use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{Assignment, BValuedModel, BvError, Evaluator, RelTable};
use crate::balg::Elem;
use crate::budget::Budget;
use crate::syntax::{tuples, Formula, Term};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MixingCounterexample {
    /// Pairwise disjoint elements covering 1.
    pub antichain: Vec<Elem>,
    /// The element chosen on each antichain member, by label.
    pub family: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MixingReport {
    pub holds: bool,
    pub lambda: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<MixingCounterexample>,
}

/// Set partitions of `0..n` into at most `max_blocks` blocks.
fn partitions(n: usize, max_blocks: usize) -> Vec<Vec<Vec<usize>>> {
    fn go(i: usize, n: usize, max: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == n {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(i);
            go(i + 1, n, max, blocks, out);
            blocks[b].pop();
        }
        if blocks.len() < max {
            blocks.push(vec![i]);
            go(i + 1, n, max, blocks, out);
            blocks.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, max_blocks, &mut Vec::new(), &mut out);
    out
}

/// Checks the `lam`-mixing property. An antichain of at most `lam` nonzero
/// elements can be padded to a partition of the atoms with the same number
/// of blocks, and mixing along a block partition means every choice of
/// per-block equivalence classes is realized by a single element. With
/// `lam` at least the number of atoms the finest partition suffices.
pub fn check_mixing(m: &BValuedModel, lam: usize) -> MixingReport {
    let atoms = m.algebra().atom_count();
    let candidates = if lam >= atoms { vec![(0..atoms).map(|i| vec![i]).collect()] } else { partitions(atoms, lam.max(1)) };
    for blocks in candidates {
        if let Some(cx) = mixing_failure(m, &blocks) {
            return MixingReport { holds: false, lambda: lam, counterexample: Some(cx) };
        }
    }
    MixingReport { holds: true, lambda: lam, counterexample: None }
}

fn mixing_failure(m: &BValuedModel, blocks: &[Vec<usize>]) -> Option<MixingCounterexample> {
    let atoms = m.algebra().atom_count();
    let n = m.size();
    let block_elems: Vec<Elem> = blocks.iter().map(|b| Elem::from_atoms(atoms, b.iter().copied())).collect();
    // class_id[j][x] and a representative per class
    let mut class_id = Vec::new();
    let mut reps: Vec<Vec<usize>> = Vec::new();
    for be in &block_elems {
        let mut ids = vec![usize::MAX; n];
        let mut r = Vec::new();
        for x in 0..n {
            if ids[x] != usize::MAX {
                continue;
            }
            for y in x..n {
                if be.leq(m.eq_value(x, y)) {
                    ids[y] = r.len();
                }
            }
            r.push(x);
        }
        class_id.push(ids);
        reps.push(r);
    }
    let image: BTreeSet<Vec<usize>> = (0..n).map(|x| class_id.iter().map(|ids| ids[x]).collect()).collect();
    let product: u128 = reps.iter().map(|r| r.len() as u128).product();
    if image.len() as u128 == product {
        return None;
    }
    let mut digits = vec![0usize; blocks.len()];
    while image.contains(&digits) {
        for (d, r) in digits.iter_mut().zip(&reps).rev() {
            *d += 1;
            if *d < r.len() {
                break;
            }
            *d = 0;
        }
    }
    Some(MixingCounterexample {
        antichain: block_elems,
        family: digits.iter().zip(&reps).map(|(&d, r)| m.domain()[r[d]].clone()).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FullnessFailure {
    pub formula: String,
    pub parameters: BTreeMap<String, String>,
    pub value: Elem,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FullnessReport {
    pub holds: bool,
    pub checked: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<FullnessFailure>,
}

/// For every catalog entry `∃v̄ φ(v̄, w̄)` and every parameter tuple, looks
/// for a witness tuple attaining the value of the existential.
pub fn check_fullness(m: &BValuedModel, catalog: &[Formula], budget: &Budget) -> Result<FullnessReport, BvError> {
    let dom: Vec<usize> = (0..m.size()).collect();
    let mut checked = 0;
    for entry in catalog {
        let Formula::Exists(vs, body) = entry else {
            return Err(BvError::MalformedCatalog(entry.to_string()));
        };
        let params: Vec<String> = entry.free_vars().into_iter().collect();
        let witnesses = tuples(&dom, vs.len());
        for ptuple in tuples(&dom, params.len()) {
            checked += 1;
            let mut a: Assignment = params.iter().cloned().zip(ptuple.iter().copied()).collect();
            let target = Evaluator::new(m, budget.eval_cap).eval(entry, &a)?;
            let mut found = false;
            for w in &witnesses {
                for (v, &x) in vs.iter().zip(w) {
                    a.insert(v.clone(), x);
                }
                if Evaluator::new(m, budget.eval_cap).eval(body, &a)? == target {
                    found = true;
                    break;
                }
            }
            if !found {
                return Ok(FullnessReport {
                    holds: false,
                    checked,
                    failure: Some(FullnessFailure {
                        formula: entry.to_string(),
                        parameters: params.iter().cloned().zip(ptuple.iter().map(|&i| m.domain()[i].clone())).collect(),
                        value: target,
                    }),
                });
            }
        }
    }
    Ok(FullnessReport { holds: true, checked, failure: None })
}

/// `∃x ⋁_{i<k} (x = y_i ∧ z_i = t)` for `k = 1..=max_k`, with `y_i`, `z_i`, `t` free.
pub fn mixing_catalog(max_k: usize) -> Vec<Formula> {
    (1..=max_k)
        .map(|k| {
            let disjuncts = (0..k)
                .map(|i| {
                    Formula::And(vec![
                        Formula::Eq(Term::var("x"), Term::var(format!("y{i}"))),
                        Formula::Eq(Term::var(format!("z{i}")), Term::var("t")),
                    ])
                })
                .collect();
            Formula::exists(["x"], Formula::Or(disjuncts))
        })
        .collect()
}

/// Model whose elements are all maps from atoms to the domain of `m`, with
/// values patched together atom by atom. Constants become constant maps.
pub fn mixing_completion(m: &BValuedModel, cap: usize) -> Result<BValuedModel, BvError> {
    let atoms = m.algebra().atom_count();
    let n = m.size();
    let size = (n as u128).checked_pow(atoms as u32).unwrap_or(u128::MAX);
    if size > cap as u128 {
        return Err(BvError::TooLarge { size, cap });
    }
    let dom: Vec<usize> = (0..n).collect();
    let maps = tuples(&dom, atoms);
    let domain = maps.iter().map(|s| s.iter().map(|&x| m.domain()[x].as_str()).collect::<Vec<_>>().join("|")).collect();
    let patch = |f: &dyn Fn(usize) -> bool| Elem::from_atoms(atoms, (0..atoms).filter(|&i| f(i)));
    let eq = maps.iter().map(|s| maps.iter().map(|t| patch(&|i| m.eq_value(s[i], t[i]).contains_atom(i))).collect()).collect();
    let mut relations = BTreeMap::new();
    for (name, r) in m.relations() {
        let table = tuples(&(0..maps.len()).collect::<Vec<_>>(), r.arity)
            .iter()
            .map(|args| {
                patch(&|i| {
                    let point: Vec<usize> = args.iter().map(|&a| maps[a][i]).collect();
                    r.table[m.tuple_index(&point)].contains_atom(i)
                })
            })
            .collect();
        relations.insert(name.clone(), RelTable { arity: r.arity, table });
    }
    let consts = m.consts().iter().map(|(c, &x)| (c.clone(), constant_map_index(n, atoms, x))).collect();
    BValuedModel::new(m.algebra().clone(), domain, eq, relations, consts)
}

/// Index of the constant map with value `x` in a completion's domain.
pub fn constant_map_index(n: usize, atoms: usize, x: usize) -> usize {
    (0..atoms).fold(0, |acc, _| acc * n + x)
}

impl BValuedModel {
    /// Submodel on the listed elements, in the given order.
    pub fn restrict(&self, keep: &[usize]) -> Result<BValuedModel, BvError> {
        let pos: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let domain = keep.iter().map(|&x| self.domain()[x].clone()).collect();
        let eq = keep.iter().map(|&a| keep.iter().map(|&b| self.eq_value(a, b).clone()).collect()).collect();
        let mut relations = BTreeMap::new();
        for (name, r) in self.relations() {
            let table = tuples(keep, r.arity).iter().map(|t| r.table[self.tuple_index(t)].clone()).collect();
            relations.insert(name.clone(), RelTable { arity: r.arity, table });
        }
        let consts = self
            .consts()
            .iter()
            .map(|(c, x)| pos.get(x).map(|&i| (c.clone(), i)).ok_or_else(|| BvError::Malformed(format!("constant `{c}` leaves the submodel"))))
            .collect::<Result<_, _>>()?;
        BValuedModel::new(self.algebra().clone(), domain, eq, relations, consts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::balg::BoolAlg;
    use crate::syntax::{parse, Signature};

    fn e(s: &str) -> Elem {
        Elem::from_bits(s).unwrap()
    }

    /// Two elements, identity equality over 2 atoms, P(x) = atom 0, P(y) = atom 1.
    fn split() -> BValuedModel {
        BValuedModel::new(
            BoolAlg::new(2).unwrap(),
            vec!["x".into(), "y".into()],
            vec![vec![e("11"), e("00")], vec![e("00"), e("11")]],
            BTreeMap::from([("P".into(), RelTable { arity: 1, table: vec![e("10"), e("01")] })]),
            BTreeMap::new(),
        )
        .unwrap()
    }

    #[test]
    fn partition_counts_are_bell_numbers() {
        assert_eq!(partitions(3, 3).len(), 5);
        assert_eq!(partitions(4, 4).len(), 15);
        assert_eq!(partitions(4, 2).len(), 8);
    }

    #[test]
    fn two_valued_models_mix() {
        let m = BValuedModel::tarski(vec!["a".into(), "b".into()], BTreeMap::new(), BTreeMap::new()).unwrap();
        assert!(check_mixing(&m, 1).holds);
        assert!(check_mixing(&m, 5).holds);
    }

    #[test]
    fn identity_equality_fails_at_two_atoms() {
        let r = check_mixing(&split(), 2);
        assert!(!r.holds);
        let cx = r.counterexample.unwrap();
        assert_eq!(cx.antichain.len(), 2);
        assert_ne!(cx.family[0], cx.family[1]);
    }

    #[test]
    fn fullness_fails_without_mixing() {
        let m = split();
        let s = Signature::with_fresh(&[("P", 1)], 0);
        let cat = vec![parse("(exists (?v) (P ?v))", &s).unwrap()];
        let r = check_fullness(&m, &cat, &Budget::default()).unwrap();
        assert!(!r.holds);
        assert_eq!(r.failure.unwrap().value, e("11"));
        assert!(check_fullness(&m, &[parse("(P ?v)", &s).unwrap()], &Budget::default()).is_err());
    }

    #[test]
    fn completion_repairs_mixing_and_fullness() {
        let m = split();
        let c = mixing_completion(&m, 100).unwrap();
        assert_eq!(c.size(), 4);
        assert!(check_mixing(&c, 2).holds);
        let s = Signature::with_fresh(&[("P", 1)], 0);
        let mut cat = vec![parse("(exists (?v) (P ?v))", &s).unwrap()];
        cat.extend(mixing_catalog(2));
        assert!(check_fullness(&c, &cat, &Budget::default()).unwrap().holds);
        assert!(matches!(mixing_completion(&c, 10), Err(BvError::TooLarge { size: 16, cap: 10 })));
    }

    #[test]
    fn completion_of_two_valued_model_is_a_copy() {
        let m = BValuedModel::tarski(
            vec!["a".into(), "b".into()],
            BTreeMap::from([("P".into(), (1, vec![true, false]))]),
            BTreeMap::from([("c".into(), 1)]),
        )
        .unwrap();
        assert_eq!(mixing_completion(&m, 10).unwrap(), m);
    }

    #[test]
    fn restrict_keeps_values() {
        let c = mixing_completion(&split(), 100).unwrap();
        let r = c.restrict(&[0, 3]).unwrap();
        assert_eq!(r.size(), 2);
        assert_eq!(r.rel_value("P", &[1]), c.rel_value("P", &[3]));
    }
}
