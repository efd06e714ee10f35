use std::collections::BTreeSet;

use serde::Serialize;

use super::{ConsistencyProperty, ConspropError, Reading};
use crate::budget::Budget;
use crate::compact::{consistency_oracle, naming_axioms, Status};
use crate::syntax::{nnf_step, qe_transform, subsentences, tuples, Formula, Signature, Term};

/// Atomic formulas obtained from `phi` by replacing a nonempty set of the
/// occurrences of constant `d` with `c`.
pub fn str2_variants(phi: &Formula, d: &str, c: &str) -> Vec<Formula> {
    let args: Vec<Term> = match phi {
        Formula::Atom { args, .. } => args.clone(),
        Formula::Eq(a, b) => vec![a.clone(), b.clone()],
        _ => return Vec::new(),
    };
    if c == d {
        return Vec::new();
    }
    let slots: Vec<usize> = (0..args.len()).filter(|&i| args[i].as_const() == Some(d)).collect();
    let mut out = Vec::new();
    for mask in 1u32..(1 << slots.len()) {
        let mut new = args.clone();
        for (k, &i) in slots.iter().enumerate() {
            if mask & (1 << k) != 0 {
                new[i] = Term::cons(c);
            }
        }
        out.push(match phi {
            Formula::Atom { rel, .. } => Formula::atom(rel.clone(), new),
            _ => Formula::Eq(new[0].clone(), new[1].clone()),
        });
    }
    out
}

fn is_reflexive(f: &Formula) -> bool {
    matches!(f, Formula::Eq(a, b) if a == b)
}

/// Smallest set containing the subsentences of `seeds` and closed under the
/// clause requirements: negation steps, conjuncts, disjuncts, instances,
/// symmetry and replacement of equals, and the `c = d` naming equalities.
/// With `literals`, negations of atomic sentences are added as well.
pub fn closure_universe(seeds: &[Formula], sig: &Signature, limit: usize, literals: bool) -> Result<Vec<Formula>, ConspropError> {
    let all = sig.constants();
    let fresh = sig.fresh_constants();
    let mut set: BTreeSet<Formula> = BTreeSet::new();
    let mut work: Vec<Formula> = Vec::new();
    for s in seeds {
        work.extend(subsentences(s, sig));
    }
    for d in &all {
        if sig.is_fresh(d) {
            work.push(Formula::eq_c(d.clone(), d.clone()));
        } else {
            work.extend(fresh.iter().map(|c| Formula::eq_c(c.clone(), d.clone())));
        }
    }
    loop {
        while let Some(f) = work.pop() {
            if set.contains(&f) {
                continue;
            }
            match &f {
                Formula::Not(g) => work.push(nnf_step(g)),
                Formula::And(cs) | Formula::Or(cs) => work.extend(cs.iter().cloned()),
                Formula::Forall(vs, g) => work.extend(tuples(&all, vs.len()).iter().map(|t| g.instantiate(vs, t))),
                Formula::Exists(vs, g) => work.extend(tuples(fresh, vs.len()).iter().map(|t| g.instantiate(vs, t))),
                Formula::Eq(a, b) => {
                    work.push(Formula::Eq(b.clone(), a.clone()));
                    if literals && a != b {
                        work.push(f.clone().negate());
                    }
                }
                Formula::Atom { .. } => {
                    if literals {
                        work.push(f.clone().negate());
                    }
                }
            }
            set.insert(f);
            if set.len() > limit {
                return Err(ConspropError::UniverseTooLarge { limit });
            }
        }
        let eqs: Vec<(String, String)> = set
            .iter()
            .filter_map(|f| match f {
                Formula::Eq(Term::Const(c), Term::Const(d)) if c != d => Some((c.clone(), d.clone())),
                _ => None,
            })
            .collect();
        for phi in set.iter().filter(|f| f.is_atomic() && !is_reflexive(f)) {
            for (c, d) in &eqs {
                work.extend(str2_variants(phi, d, c).into_iter().filter(|g| !set.contains(g)));
            }
        }
        if work.is_empty() {
            break;
        }
    }
    Ok(set.into_iter().collect())
}

#[derive(Clone, Debug)]
pub struct SaturateConfig {
    /// Sentences whose closure forms the universe, in addition to the theory.
    pub seeds: Vec<Formula>,
    pub literals: bool,
    pub budget: Budget,
}

impl Default for SaturateConfig {
    fn default() -> Self {
        SaturateConfig { seeds: Vec::new(), literals: true, budget: Budget::default() }
    }
}

#[derive(Clone, Debug)]
pub struct Saturation {
    pub property: ConsistencyProperty,
    pub universe: Vec<Formula>,
    /// The theory itself was refuted, so the property is empty.
    pub inconsistent: bool,
    pub oracle_calls: u64,
}

#[derive(Serialize)]
pub struct SaturationSummary {
    pub members: usize,
    pub universe: usize,
    pub inconsistent: bool,
    pub oracle_calls: u64,
}

impl Saturation {
    pub fn summary(&self) -> SaturationSummary {
        SaturationSummary {
            members: self.property.members.len(),
            universe: self.universe.len(),
            inconsistent: self.inconsistent,
            oracle_calls: self.oracle_calls,
        }
    }
}

/// The consistency property of all subsets `s` of the closure universe such
/// that `s ∪ t`, read over models named by the fresh constants, is consistent.
pub fn saturate_theory(t: &[Formula], sig: &Signature, cfg: &SaturateConfig) -> Result<Saturation, ConspropError> {
    if sig.fresh_constants().is_empty() {
        return Err(ConspropError::Malformed("saturation needs at least one fresh constant".into()));
    }
    if let Some(open) = t.iter().chain(&cfg.seeds).find(|f| !f.is_sentence()) {
        return Err(ConspropError::Malformed(format!("{open} is not a sentence")));
    }
    let mut seeds = t.to_vec();
    seeds.extend(cfg.seeds.iter().cloned());
    let universe = closure_universe(&seeds, sig, cfg.budget.universe_limit, cfg.literals)?;
    let grounded: Vec<Formula> = universe.iter().map(|f| qe_transform(f, sig)).collect::<Result<_, _>>()?;
    let mut base: Vec<Formula> = t.iter().map(|f| qe_transform(f, sig)).collect::<Result<_, _>>()?;
    base.extend(naming_axioms(sig));

    let mut sat = Saturator { sig, budget: &cfg.budget, base, grounded: &grounded, calls: 0, members: Vec::new() };
    let inconsistent = !sat.consistent(&[])?;
    if !inconsistent {
        sat.members.push(Vec::new());
        sat.extend(&mut Vec::new(), 0)?;
    }
    let members = sat.members.iter().map(|m| m.iter().map(|&i| universe[i].clone()).collect()).collect();
    Ok(Saturation {
        property: ConsistencyProperty::new(sig.clone(), members, Reading::Exact),
        universe,
        inconsistent,
        oracle_calls: sat.calls,
    })
}

struct Saturator<'a> {
    sig: &'a Signature,
    budget: &'a Budget,
    base: Vec<Formula>,
    grounded: &'a [Formula],
    calls: u64,
    members: Vec<Vec<usize>>,
}

impl Saturator<'_> {
    fn consistent(&mut self, s: &[usize]) -> Result<bool, ConspropError> {
        self.calls += 1;
        let mut sentences = self.base.clone();
        sentences.extend(s.iter().map(|&i| self.grounded[i].clone()));
        let v = consistency_oracle(&sentences, self.sig, self.budget)?;
        match v.status {
            Status::Consistent => Ok(true),
            Status::Inconsistent => Ok(false),
            Status::Unknown => Err(ConspropError::Undecided(format!("oracle budget exhausted on a set of {} sentences", s.len()))),
        }
    }

    // Consistency is inherited by subsets, so inconsistent branches are pruned.
    fn extend(&mut self, current: &mut Vec<usize>, from: usize) -> Result<(), ConspropError> {
        for j in from..self.grounded.len() {
            current.push(j);
            if self.consistent(current)? {
                self.members.push(current.clone());
                self.extend(current, j + 1)?;
            }
            current.pop();
        }
        Ok(())
    }
}
