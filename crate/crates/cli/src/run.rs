use serde::Serialize;
use serde_json::{json, Value};

use boolkit::balg::Filter;
use boolkit::bvmodel::{check_fullness, check_mixing, mixing_catalog, quotient_model};
use boolkit::compact::{
    compactness_run, conjunction_closure, decide, faicom_family, first_order_compactness_demo, is_conservative_strengthening,
    is_finitely_conservative, star_equivalence, star_theory, Conservativity, Status,
};
use boolkit::consprop::{model_from_consprop, verify_consistency_property, ConstructionOptions};
use boolkit::forcing::{
    build_sphi, canonical_dense_sets, dense_disjunction, filter_theory, generic_filter, genericity_sentence, is_dense, term_model, Density,
    SPhiPoset,
};
use boolkit::proofs::{check_proof, soundness_probe};
use boolkit::syntax::{nnf, nnf_step, qe_axiom, qe_transform};
use boolkit::{Budget, Formula};

use crate::{input, Command, Failure, ForcingCommand, GenericArgs, Global, Verdict};

type Outcome = Result<(Verdict, Value), Failure>;

type GenericInputs = (SPhiPoset, Vec<String>, Vec<Vec<usize>>);

fn to_value(x: impl Serialize) -> Value {
    serde_json::to_value(x).expect("report serializes")
}

fn strings(fs: &[Formula]) -> Vec<String> {
    fs.iter().map(Formula::to_string).collect()
}

fn holds(b: bool) -> Verdict {
    if b {
        Verdict::Holds
    } else {
        Verdict::Refuted
    }
}

fn from_status(s: Status) -> Verdict {
    match s {
        Status::Consistent => Verdict::Holds,
        Status::Inconsistent => Verdict::Refuted,
        Status::Unknown => Verdict::Unknown,
    }
}

fn from_conservativity(c: Conservativity) -> Verdict {
    match c {
        Conservativity::Conservative | Conservativity::BoundedConservative => Verdict::Holds,
        Conservativity::NotConservative => Verdict::Refuted,
        Conservativity::Unknown => Verdict::Unknown,
    }
}

pub fn dispatch(cmd: &Command, global: &Global, budget: &Budget) -> Outcome {
    match cmd {
        Command::Parse(a) => {
            let sig = input::signature(&a.sig)?;
            let f = input::formula(&a.formula, &sig)?;
            Ok((
                Verdict::Holds,
                json!({
                    "formula": f.to_string(),
                    "sentence": f.is_sentence(),
                    "free_vars": f.free_vars(),
                    "constants": f.constants(),
                    "size": f.size(),
                    "quantified": f.has_quantifier(),
                }),
            ))
        }
        Command::Eval(a) => {
            let m = input::model(&a.model)?;
            let sig = match &a.sig {
                Some(p) => input::signature(p)?,
                None => input::model_signature(&m)?,
            };
            let f = input::sentence(&a.formula, &sig)?;
            let v = m.eval_sentence(&f)?;
            Ok((Verdict::Holds, json!({ "formula": f.to_string(), "value": v, "one": v.is_one(), "zero": v.is_zero() })))
        }
        Command::ValidateModel(a) => {
            let r = input::model_unchecked(&a.model)?.validate();
            Ok((holds(r.valid), to_value(r)))
        }
        Command::Quotient(a) => {
            let m = input::model(&a.model)?;
            if a.atom >= m.algebra().atom_count() {
                return Err(Failure::Usage(format!("atom {} out of range, the algebra has {}", a.atom, m.algebra().atom_count())));
            }
            let f = Filter::principal(m.algebra().atom(a.atom)).map_err(|e| Failure::Usage(e.to_string()))?;
            let q = quotient_model(&m, &f)?;
            Ok((Verdict::Holds, json!({ "filter": f.generator(), "model": q.to_file() })))
        }
        Command::Mixing(a) => {
            let m = input::model(&a.model)?;
            let r = check_mixing(&m, a.lambda.unwrap_or(m.algebra().atom_count()));
            Ok((holds(r.holds), to_value(r)))
        }
        Command::Fullness(a) => {
            let m = input::model(&a.model)?;
            let mut catalog = mixing_catalog(a.width);
            if let Some(p) = &a.catalog {
                catalog.extend(input::open_formulas(p, &input::model_signature(&m)?)?);
            }
            let r = check_fullness(&m, &catalog, budget)?;
            Ok((holds(r.holds), to_value(r)))
        }
        Command::Nnf(a) => {
            let sig = input::signature(&a.sig)?;
            let f = input::formula(&a.formula, &sig)?;
            Ok((Verdict::Holds, json!({ "formula": f.to_string(), "nnf": nnf(&f).to_string(), "negation_pushed": nnf_step(&f).to_string() })))
        }
        Command::Qe(a) => {
            let sig = input::signature(&a.sig)?;
            let f = input::formula(&a.formula, &sig)?;
            let axiom = qe_axiom(&sig).map_err(|e| Failure::Usage(e.to_string()))?;
            let g = qe_transform(&f, &sig).map_err(|e| Failure::Usage(e.to_string()))?;
            Ok((Verdict::Holds, json!({ "axiom": axiom.to_string(), "formula": f.to_string(), "transformed": g.to_string() })))
        }
        Command::ProofCheck(a) => {
            let sig = input::signature(&a.sig)?;
            let p = input::proof(&a.proof, &sig)?;
            let check = check_proof(&p);
            if !check.valid || a.probe == 0 {
                return Ok((holds(check.valid), json!({ "check": check, "size": p.size() })));
            }
            let probe = soundness_probe(&p, a.probe, global.seed, budget)?;
            Ok((holds(probe.holds), json!({ "check": check, "size": p.size(), "probe": probe })))
        }
        Command::ConspropVerify(a) => {
            let sig = input::signature(&a.sig)?;
            let r = verify_consistency_property(&input::property(&a.property, &sig)?);
            Ok((holds(r.holds), to_value(r)))
        }
        Command::ConspropModel(a) => {
            let sig = input::signature(&a.sig)?;
            let s = input::property(&a.property, &sig)?;
            let (m, report) = model_from_consprop(&s, &ConstructionOptions { completion: a.completion, budget: *budget })?;
            Ok((Verdict::Holds, json!({ "report": report, "model": m.to_file() })))
        }
        Command::Oracle(a) => {
            let sig = input::signature(&a.sig)?;
            let v = decide(&input::theory(&a.theory, &sig)?, &sig, budget)?;
            Ok((from_status(v.status), to_value(v)))
        }
        Command::Conservative(a) => {
            let sig = input::signature(&a.sig)?;
            let psi1 = input::sentence(&a.formula, &sig)?;
            let psi0 = input::sentence(&a.base, &sig)?;
            let r = is_conservative_strengthening(&psi1, &psi0, &sig, budget)?;
            Ok((from_conservativity(r.verdict), to_value(r)))
        }
        Command::Fincons(a) => {
            let sig = input::signature(&a.sig)?;
            let r = is_finitely_conservative(&input::theory(&a.family, &sig)?, &sig, budget)?;
            Ok((holds(r.holds), to_value(r)))
        }
        Command::Compact(a) => {
            let sig = input::signature(&a.sig)?;
            let run = compactness_run(&input::theory(&a.family, &sig)?, &sig, budget)?;
            Ok((Verdict::Holds, to_value(run)))
        }
        Command::Star(a) => {
            let sig = input::signature(&a.sig)?;
            let m = input::model(&a.model)?;
            let t = input::theory(&a.theory, &sig)?;
            let stars = star_theory(&m, &t, &sig)?;
            let family = conjunction_closure(&stars);
            let fc = is_finitely_conservative(&family, &sig, budget)?;
            let eqv = star_equivalence(&t, &stars, &m, &sig, budget)?;
            let ok = fc.holds && eqv.forward && eqv.backward;
            Ok((holds(ok), json!({ "stars": strings(&stars), "family": strings(&family), "fincons": fc, "equivalence": eqv })))
        }
        Command::Focompact(a) => {
            let sig = input::signature(&a.sig)?;
            let r = first_order_compactness_demo(&input::theory(&a.theory, &sig)?, &sig, budget)?;
            Ok((Verdict::Holds, to_value(r)))
        }
        Command::Forcing(f) => forcing(f, budget),
        Command::Faicom(a) => {
            let (family, sig) = faicom_family(a.n as usize);
            let whole = decide(&family, &sig, budget)?.status;
            let mut deletions = Vec::new();
            for skip in 0..family.len() {
                let rest: Vec<Formula> = family.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, f)| f.clone()).collect();
                deletions.push(decide(&rest, &sig, budget)?.status);
            }
            Ok((Verdict::Holds, json!({ "signature": sig, "family": strings(&family), "status": whole, "single_deletions": deletions })))
        }
    }
}

fn dense_for(p: &SPhiPoset, count: usize, budget: &Budget) -> Result<(Vec<String>, Vec<Vec<usize>>), Failure> {
    let sets = canonical_dense_sets(p, budget)?;
    Ok(sets.into_iter().take(count).map(|d| (d.label, d.members)).unzip())
}

fn forcing(cmd: &ForcingCommand, budget: &Budget) -> Outcome {
    match cmd {
        ForcingCommand::Build(a) => {
            let sig = input::signature(&a.sig)?;
            let phi = input::sentence(&a.formula, &sig)?;
            let p = build_sphi(&phi, &sig, a.size_bound, budget)?;
            Ok((Verdict::Holds, json!({ "conditions": p.len(), "poset": p.dump() })))
        }
        ForcingCommand::Dense(a) => {
            let sig = input::signature(&a.sig)?;
            let p = input::poset(&a.poset, &sig, budget)?;
            match &a.sets {
                Some(path) => {
                    let mode = if a.strict { Density::StrictExtension } else { Density::Subset };
                    let sets = input::index_sets(path)?;
                    if let Some(bad) = sets.iter().flatten().find(|&&i| i >= p.len()) {
                        return Err(Failure::Usage(format!("condition {bad} does not exist")));
                    }
                    let verdicts: Vec<_> = sets.iter().map(|d| is_dense(d, &p, mode)).collect();
                    Ok((holds(verdicts.iter().all(|v| v.dense)), json!({ "mode": mode, "sets": verdicts })))
                }
                None => Ok((Verdict::Holds, json!({ "dense_sets": canonical_dense_sets(&p, budget)? }))),
            }
        }
        ForcingCommand::Generic(a) => {
            let (p, labels, dense) = generic_inputs(a, budget)?;
            let g = generic_filter(&p, &dense, a.saturate)?;
            let sentence = genericity_sentence(&p, &dense, Density::Subset)?;
            let r = is_conservative_strengthening(&sentence, &p.phi, &p.sig, budget)?;
            let met = g.met_dense_sets.iter().all(|&b| b);
            let verdict = if met { from_conservativity(r.verdict) } else { Verdict::Refuted };
            let theory: Vec<String> = filter_theory(&g, &p).iter().map(Formula::to_string).collect();
            Ok((
                verdict,
                json!({ "dense_sets": labels, "filter": g, "theory": theory, "genericity_sentence": sentence.to_string(), "conservativity": r }),
            ))
        }
        ForcingCommand::Model(a) => {
            let (p, labels, dense) = generic_inputs(a, budget)?;
            let g = generic_filter(&p, &dense, true)?;
            let m = term_model(&g, &p)?;
            let mut agree = Vec::new();
            for d in &dense {
                let met = d.iter().any(|i| g.members.contains(i));
                agree.push(met == m.satisfies(&dense_disjunction(&p, d))?);
            }
            let ok = agree.iter().all(|&b| b) && m.satisfies(&p.phi)?;
            Ok((holds(ok), json!({ "dense_sets": labels, "agreement": agree, "filter": g, "model": m.to_file() })))
        }
    }
}

fn generic_inputs(a: &GenericArgs, budget: &Budget) -> Result<GenericInputs, Failure> {
    let sig = input::signature(&a.sig)?;
    let p = input::poset(&a.poset, &sig, budget)?;
    let (labels, dense) = dense_for(&p, a.count, budget)?;
    Ok((p, labels, dense))
}
