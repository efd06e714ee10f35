//! Finite Boolean algebras as atom sets, filters and quotients, and the
//! regular-open completion of a finite poset.

mod filter;
mod poset;

use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use filter::{quotient_algebra, ultrafilters, Filter, Quotient};
pub use poset::{regularize, ro_completion, Poset, RoCompletion};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BalgError {
    #[error("a Boolean algebra needs at least one atom")]
    NoAtoms,
    #[error("invalid bitstring `{0}`")]
    BadBits(String),
    #[error("element has {found} atoms, algebra has {expected}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("invalid poset: {0}")]
    InvalidPoset(String),
    #[error("not a filter: {0}")]
    NotAFilter(String),
}

/// An element of a finite Boolean algebra: the set of atoms below it.
/// Rendered as a bitstring whose i-th character is atom i.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem(FixedBitSet);

impl Elem {
    pub fn zero(atoms: usize) -> Self {
        Elem(FixedBitSet::with_capacity(atoms))
    }

    pub fn one(atoms: usize) -> Self {
        let mut b = FixedBitSet::with_capacity(atoms);
        b.insert_range(..);
        Elem(b)
    }

    pub fn atom(atoms: usize, i: usize) -> Self {
        let mut b = FixedBitSet::with_capacity(atoms);
        b.insert(i);
        Elem(b)
    }

    pub fn from_atoms(atoms: usize, set: impl IntoIterator<Item = usize>) -> Self {
        let mut b = FixedBitSet::with_capacity(atoms);
        b.extend(set);
        Elem(b)
    }

    pub fn from_bits(s: &str) -> Result<Self, BalgError> {
        let mut b = FixedBitSet::with_capacity(s.len());
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '1' => b.insert(i),
                '0' => {}
                _ => return Err(BalgError::BadBits(s.to_string())),
            }
        }
        if s.is_empty() {
            return Err(BalgError::BadBits(s.to_string()));
        }
        Ok(Elem(b))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.len() == 0
    }

    pub fn meet(&self, other: &Elem) -> Elem {
        Elem(&self.0 & &other.0)
    }

    pub fn join(&self, other: &Elem) -> Elem {
        Elem(&self.0 | &other.0)
    }

    pub fn complement(&self) -> Elem {
        let mut b = self.0.clone();
        b.toggle_range(..);
        Elem(b)
    }

    pub fn leq(&self, other: &Elem) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_clear()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_full()
    }

    pub fn contains_atom(&self, i: usize) -> bool {
        self.0.contains(i)
    }

    pub fn atoms(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    pub fn count(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.0
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.0.len() {
            f.write_str(if self.0.contains(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for Elem {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Elem {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Elem::from_bits(&s).map_err(serde::de::Error::custom)
    }
}

/// Finite Boolean algebra with `atoms` atoms; elements are [`Elem`]s of that length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoolAlg {
    atoms: usize,
}

impl BoolAlg {
    pub fn new(atoms: usize) -> Result<Self, BalgError> {
        if atoms == 0 {
            return Err(BalgError::NoAtoms);
        }
        Ok(BoolAlg { atoms })
    }

    pub fn two() -> Self {
        BoolAlg { atoms: 1 }
    }

    pub fn atom_count(&self) -> usize {
        self.atoms
    }

    pub fn zero(&self) -> Elem {
        Elem::zero(self.atoms)
    }

    pub fn one(&self) -> Elem {
        Elem::one(self.atoms)
    }

    pub fn atom(&self, i: usize) -> Elem {
        Elem::atom(self.atoms, i)
    }

    pub fn atoms(&self) -> Vec<Elem> {
        (0..self.atoms).map(|i| self.atom(i)).collect()
    }

    pub fn meet(&self, a: &Elem, b: &Elem) -> Elem {
        a.meet(b)
    }

    pub fn join(&self, a: &Elem, b: &Elem) -> Elem {
        a.join(b)
    }

    pub fn complement(&self, a: &Elem) -> Elem {
        a.complement()
    }

    pub fn leq(&self, a: &Elem, b: &Elem) -> bool {
        a.leq(b)
    }

    pub fn meet_all<'a>(&self, xs: impl IntoIterator<Item = &'a Elem>) -> Elem {
        xs.into_iter().fold(self.one(), |acc, x| acc.meet(x))
    }

    pub fn join_all<'a>(&self, xs: impl IntoIterator<Item = &'a Elem>) -> Elem {
        xs.into_iter().fold(self.zero(), |acc, x| acc.join(x))
    }

    pub fn check(&self, e: &Elem) -> Result<(), BalgError> {
        if e.len() != self.atoms {
            return Err(BalgError::SizeMismatch { expected: self.atoms, found: e.len() });
        }
        Ok(())
    }

    pub fn parse(&self, bits: &str) -> Result<Elem, BalgError> {
        let e = Elem::from_bits(bits)?;
        self.check(&e)?;
        Ok(e)
    }

    /// Every element, in order of the integer whose bit i is atom i.
    /// Only sensible for small algebras.
    pub fn elements(&self) -> Vec<Elem> {
        (0u64..1 << self.atoms).map(|m| Elem::from_atoms(self.atoms, (0..self.atoms).filter(|i| m >> i & 1 == 1))).collect()
    }

    /// JSON-ready description; element list only up to 6 atoms.
    pub fn dump(&self) -> AlgebraDump {
        AlgebraDump {
            atom_count: self.atoms,
            atoms: self.atoms().iter().map(Elem::to_string).collect(),
            elements: (self.atoms <= 6).then(|| self.elements().iter().map(Elem::to_string).collect()),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct AlgebraDump {
    pub atom_count: usize,
    pub atoms: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<String>>,
}
