//! Fixed-seed inputs shared by the benchmarks.

use boolkit::gen::{prng, random_model, random_sentence};
use boolkit::{BValuedModel, Formula, Signature};

pub fn signature() -> Signature {
    Signature::with_fresh(&[("P", 1), ("R", 2)], 3)
}

/// A model with `domain` elements over `atoms` atoms and `n` sentences of depth 4.
pub fn model_and_sentences(domain: usize, atoms: usize, n: usize, seed: u64) -> (BValuedModel, Vec<Formula>) {
    let sig = signature();
    let mut rng = prng(seed);
    let m = random_model(&mut rng, sig.relations(), &sig.constants(), domain, atoms);
    let fs = (0..n).map(|_| random_sentence(&mut rng, &sig, 4)).collect();
    (m, fs)
}
