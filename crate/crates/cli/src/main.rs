mod input;
mod run;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use boolkit::Budget;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

/// Boolean-valued models, consistency properties and Boolean compactness.
#[derive(Parser, Serialize)]
#[command(name = "boolkit", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Serialize, Clone)]
struct Global {
    /// Seed for every random choice a command makes.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Node evaluations allowed per Boolean evaluation.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    budget_eval: Option<u64>,
    /// Search nodes allowed per oracle call.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    budget_oracle: Option<u64>,
    /// Largest subset size in conservativity checks (default: exhaustive).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    budget_subset: Option<u64>,
    /// Largest closure universe for saturated consistency properties.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    budget_universe: Option<u64>,
    /// Largest domain of a mixing completion.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    budget_completion: Option<u64>,
    /// Largest closure universe for type enumeration.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    budget_closure: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

impl Global {
    fn budget(&self) -> Budget {
        let d = Budget::default();
        Budget {
            eval_cap: self.budget_eval.unwrap_or(d.eval_cap),
            oracle_nodes: self.budget_oracle.unwrap_or(d.oracle_nodes),
            max_subset: self.budget_subset.map(|k| k as usize).or(d.max_subset),
            universe_limit: self.budget_universe.map_or(d.universe_limit, |k| k as usize),
            completion_cap: self.budget_completion.map_or(d.completion_cap, |k| k as usize),
            closure_limit: self.budget_closure.map_or(d.closure_limit, |k| k as usize),
        }
    }
}

#[derive(Subcommand, Serialize, Clone)]
#[serde(rename_all = "kebab-case", tag = "name")]
enum Command {
    /// Parse a formula and report its shape.
    Parse(SigFormula),
    /// Boolean value of a sentence in a model.
    Eval(EvalArgs),
    /// Check the equality axioms of a model.
    ValidateModel(ModelArg),
    /// Quotient of a model by the ultrafilter at one atom.
    Quotient(QuotientArgs),
    /// Check the mixing property.
    Mixing(MixingArgs),
    /// Check fullness over the mixing catalog and optional extra formulas.
    Fullness(FullnessArgs),
    /// Negation normal form and one negation step.
    Nnf(SigFormula),
    /// The naming axiom and the instance form of a sentence.
    Qe(SigFormula),
    /// Check a proof tree and optionally probe its soundness.
    ProofCheck(ProofArgs),
    /// Check the consistency property clauses.
    ConspropVerify(PropertyArgs),
    /// Build the Boolean-valued model of a consistency property.
    ConspropModel(PropertyModelArgs),
    /// Decide Boolean consistency of a theory.
    Oracle(TheoryArgs),
    /// Whether one sentence is a conservative strengthening of another.
    Conservative(ConservativeArgs),
    /// Check that a family is finitely conservative.
    Fincons(FamilyArgs),
    /// Build a model of a finitely conservative family.
    Compact(FamilyArgs),
    /// Star theory of a two-valued model and its checks.
    Star(StarArgs),
    /// Tarski model of a ground theory with consistent finite subsets.
    Focompact(TheoryArgs),
    /// Posets of conditions, dense sets, generic filters.
    #[command(subcommand)]
    Forcing(ForcingCommand),
    /// The family {c_i != c_n} plus the disjunction of c_n = c_i.
    Faicom(FaicomArgs),
}

#[derive(Subcommand, Serialize, Clone)]
#[serde(rename_all = "kebab-case", tag = "name")]
enum ForcingCommand {
    /// Enumerate the conditions for a sentence.
    Build(BuildArgs),
    /// Canonical dense sets, or a density check of given sets.
    Dense(DenseArgs),
    /// Generic filter through dense sets, with the genericity sentence.
    Generic(GenericArgs),
    /// Term model of a maximal generic filter.
    Model(GenericArgs),
}

#[derive(Args, Serialize, Clone)]
struct SigFormula {
    #[arg(long)]
    sig: PathBuf,
    #[arg(long)]
    formula: String,
}

#[derive(Args, Serialize, Clone)]
struct ModelArg {
    #[arg(long)]
    model: PathBuf,
}

#[derive(Args, Serialize, Clone)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    /// Signature to parse against; derived from the model when absent.
    #[arg(long)]
    sig: Option<PathBuf>,
    #[arg(long)]
    formula: String,
}

#[derive(Args, Serialize, Clone)]
struct QuotientArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value_t = 0)]
    atom: usize,
}

#[derive(Args, Serialize, Clone)]
struct MixingArgs {
    #[arg(long)]
    model: PathBuf,
    /// Largest antichain size; defaults to the number of atoms.
    #[arg(long)]
    lambda: Option<usize>,
}

#[derive(Args, Serialize, Clone)]
struct FullnessArgs {
    #[arg(long)]
    model: PathBuf,
    /// Widest mixing-catalog entry.
    #[arg(long, default_value_t = 2)]
    width: usize,
    /// JSON array of existential formulas, free variables as parameters.
    #[arg(long)]
    catalog: Option<PathBuf>,
}

#[derive(Args, Serialize, Clone)]
struct ProofArgs {
    #[arg(long)]
    sig: PathBuf,
    #[arg(long)]
    proof: PathBuf,
    /// Random models to probe soundness on.
    #[arg(long, default_value_t = 0)]
    probe: usize,
}

#[derive(Args, Serialize, Clone)]
struct PropertyArgs {
    #[arg(long)]
    sig: PathBuf,
    #[arg(long)]
    property: PathBuf,
}

#[derive(Args, Serialize, Clone)]
struct PropertyModelArgs {
    #[arg(long)]
    sig: PathBuf,
    #[arg(long)]
    property: PathBuf,
    /// Also check that members survive in the mixing completion.
    #[arg(long)]
    completion: bool,
}

#[derive(Args, Serialize, Clone)]
struct TheoryArgs {
    #[arg(long)]
    sig: PathBuf,
    #[arg(long)]
    theory: PathBuf,
}

#[derive(Args, Serialize, Clone)]
struct ConservativeArgs {
    #[arg(long)]
    sig: PathBuf,
    /// The stronger sentence.
    #[arg(long)]
    formula: String,
    /// The sentence it should conservatively strengthen.
    #[arg(long)]
    base: String,
}

#[derive(Args, Serialize, Clone)]
struct FamilyArgs {
    #[arg(long)]
    sig: PathBuf,
    #[arg(long)]
    family: PathBuf,
}

#[derive(Args, Serialize, Clone)]
struct StarArgs {
    #[arg(long)]
    sig: PathBuf,
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    theory: PathBuf,
}

#[derive(Args, Serialize, Clone)]
struct BuildArgs {
    #[arg(long)]
    sig: PathBuf,
    #[arg(long)]
    formula: String,
    #[arg(long)]
    size_bound: Option<usize>,
}

#[derive(Args, Serialize, Clone)]
struct DenseArgs {
    #[arg(long)]
    sig: PathBuf,
    #[arg(long)]
    poset: PathBuf,
    /// JSON array of arrays of condition indices to check.
    #[arg(long)]
    sets: Option<PathBuf>,
    /// Require strict extensions.
    #[arg(long)]
    strict: bool,
}

#[derive(Args, Serialize, Clone)]
struct GenericArgs {
    #[arg(long)]
    sig: PathBuf,
    #[arg(long)]
    poset: PathBuf,
    /// How many canonical dense sets to meet.
    #[arg(long, default_value_t = 5)]
    count: usize,
    /// Extend the filter to a maximal condition.
    #[arg(long)]
    saturate: bool,
}

#[derive(Args, Serialize, Clone)]
struct FaicomArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Verdict {
    Holds,
    Refuted,
    Unknown,
}

impl Verdict {
    fn code(self) -> u8 {
        match self {
            Verdict::Holds => 0,
            Verdict::Refuted => 1,
            Verdict::Unknown => 2,
        }
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Refuted(String),
    Unknown(String),
}

const USAGE: u8 = 64;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(USAGE);
        }
    };
    let budget = cli.global.budget();
    let (verdict, body) = match run::dispatch(&cli.command, &cli.global, &budget) {
        Ok((v, result)) => (v, json!({ "verdict": v, "result": result })),
        Err(Failure::Usage(msg)) => {
            eprintln!("boolkit: {msg}");
            return ExitCode::from(USAGE);
        }
        Err(Failure::Refuted(msg)) => (Verdict::Refuted, json!({ "verdict": Verdict::Refuted, "error": msg })),
        Err(Failure::Unknown(msg)) => (Verdict::Unknown, json!({ "verdict": Verdict::Unknown, "error": msg })),
    };
    let mut report = json!({
        "tool": "boolkit",
        "version": env!("CARGO_PKG_VERSION"),
        "config": { "seed": cli.global.seed, "budget": budget, "command": cli.command },
    });
    if let (Value::Object(r), Value::Object(b)) = (&mut report, body) {
        r.extend(b);
    }
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    let written = match &cli.global.out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("boolkit: {e}");
        return ExitCode::from(USAGE);
    }
    ExitCode::from(verdict.code())
}
