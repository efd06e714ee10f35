use fixedbitset::FixedBitSet;
use serde::Serialize;

use super::{BalgError, BoolAlg, Elem};

/// Finite partial order on `0..n`. `leq(s, t)` reads "s is stronger than t".
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset {
    below: Vec<FixedBitSet>,
}

impl Poset {
    /// Builds the poset from an order predicate and checks the order axioms.
    pub fn new(n: usize, leq: impl Fn(usize, usize) -> bool) -> Result<Self, BalgError> {
        let mut below = vec![FixedBitSet::with_capacity(n); n];
        for (t, row) in below.iter_mut().enumerate() {
            for s in 0..n {
                if leq(s, t) {
                    row.insert(s);
                }
            }
        }
        let p = Poset { below };
        p.validate()?;
        Ok(p)
    }

    pub fn antichain(n: usize) -> Self {
        Poset::new(n, |s, t| s == t).expect("discrete order")
    }

    /// `0 < 1 < ... < n-1`, so 0 is the strongest element.
    pub fn chain(n: usize) -> Self {
        Poset::new(n, |s, t| s <= t).expect("linear order")
    }

    fn validate(&self) -> Result<(), BalgError> {
        let n = self.len();
        for a in 0..n {
            if !self.leq(a, a) {
                return Err(BalgError::InvalidPoset(format!("not reflexive at {a}")));
            }
            for b in 0..n {
                if a != b && self.leq(a, b) && self.leq(b, a) {
                    return Err(BalgError::InvalidPoset(format!("not antisymmetric at ({a}, {b})")));
                }
                if self.leq(a, b) && !self.below[a].is_subset(&self.below[b]) {
                    return Err(BalgError::InvalidPoset(format!("not transitive through ({a}, {b})")));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.below.len()
    }

    pub fn is_empty(&self) -> bool {
        self.below.is_empty()
    }

    pub fn leq(&self, s: usize, t: usize) -> bool {
        self.below[t].contains(s)
    }

    /// `↓q`, the cone of conditions stronger than `q`.
    pub fn down(&self, q: usize) -> &FixedBitSet {
        &self.below[q]
    }

    pub fn is_minimal(&self, q: usize) -> bool {
        self.below[q].count_ones(..) == 1
    }

    pub fn minimal(&self) -> Vec<usize> {
        (0..self.len()).filter(|&q| self.is_minimal(q)).collect()
    }

    pub fn is_down_closed(&self, u: &FixedBitSet) -> bool {
        u.ones().all(|q| self.below[q].is_subset(u))
    }

    pub fn dump(&self) -> PosetDump {
        let n = self.len();
        let leq = (0..n).flat_map(|t| (0..n).filter(move |&s| s != t).map(move |s| (s, t))).filter(|&(s, t)| self.leq(s, t)).collect();
        PosetDump { elements: n, leq }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PosetDump {
    pub elements: usize,
    pub leq: Vec<(usize, usize)>,
}

/// `{q : every r ≤ q has some r' ≤ r in u}`.
pub fn regularize(p: &Poset, u: &FixedBitSet) -> FixedBitSet {
    let n = p.len();
    // r is "dense-hit" when some r' ≤ r lies in u.
    let hit: Vec<bool> = (0..n).map(|r| p.down(r).ones().any(|r2| u.contains(r2))).collect();
    let mut out = FixedBitSet::with_capacity(n);
    for q in 0..n {
        if p.down(q).ones().all(|r| hit[r]) {
            out.insert(q);
        }
    }
    out
}

/// The regular-open algebra of a finite poset. Its atoms are the minimal
/// elements of the poset; a regular open set corresponds to the minimal
/// elements it contains.
#[derive(Clone, Debug)]
pub struct RoCompletion {
    pub algebra: BoolAlg,
    /// `atoms[i]` is the minimal element that atom `i` stands for.
    pub atoms: Vec<usize>,
    /// Image of each poset element, the regularization of its cone.
    pub embed: Vec<Elem>,
    poset: Poset,
}

impl RoCompletion {
    /// The regular open set an algebra element stands for.
    pub fn to_set(&self, e: &Elem) -> FixedBitSet {
        let n = self.poset.len();
        let mut out = FixedBitSet::with_capacity(n);
        for q in 0..n {
            if self.embed[q].leq(e) {
                out.insert(q);
            }
        }
        out
    }

    /// The algebra element for a regular open set (its minimal elements).
    pub fn from_set(&self, u: &FixedBitSet) -> Elem {
        Elem::from_atoms(self.atoms.len(), self.atoms.iter().enumerate().filter(|(_, &m)| u.contains(m)).map(|(i, _)| i))
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }
}

pub fn ro_completion(p: &Poset) -> Result<RoCompletion, BalgError> {
    if p.is_empty() {
        return Err(BalgError::InvalidPoset("empty poset".into()));
    }
    let atoms = p.minimal();
    let algebra = BoolAlg::new(atoms.len())?;
    let embed = (0..p.len())
        .map(|q| Elem::from_atoms(atoms.len(), atoms.iter().enumerate().filter(|(_, &m)| p.leq(m, q)).map(|(i, _)| i)))
        .collect();
    Ok(RoCompletion { algebra, atoms, embed, poset: p.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize, xs: &[usize]) -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(n);
        b.extend(xs.iter().copied());
        b
    }

    /// All regularize fixed points, found by brute force over subsets.
    fn regular_opens(p: &Poset) -> Vec<FixedBitSet> {
        let n = p.len();
        (0u32..1 << n)
            .map(|m| set(n, &(0..n).filter(|i| m >> i & 1 == 1).collect::<Vec<_>>()))
            .filter(|u| p.is_down_closed(u) && regularize(p, u) == *u)
            .collect()
    }

    fn diamond() -> Poset {
        // 0,1 minimal; 2 above both; 3 above 2 (top).
        Poset::new(4, |s, t| s == t || t == 3 || (t == 2 && s < 2)).unwrap()
    }

    #[test]
    fn rejects_non_orders() {
        assert!(Poset::new(2, |s, t| s != t || s == 0).is_err());
        assert!(Poset::new(2, |_, _| true).is_err());
        assert!(Poset::new(3, |s, t| s == t || (s, t) == (0, 1) || (s, t) == (1, 2)).is_err());
    }

    #[test]
    fn regularize_basics() {
        let p = Poset::antichain(2);
        assert_eq!(regularize(&p, &set(2, &[0, 1])), set(2, &[0, 1]));
        assert_eq!(regularize(&p, &set(2, &[])), set(2, &[]));
        assert_eq!(regularize(&p, &set(2, &[0])), set(2, &[0]));
        let d = diamond();
        assert_eq!(regularize(&d, &set(4, &[0, 1])), set(4, &[0, 1, 2, 3]));
        assert_eq!(regularize(&d, &set(4, &[0])), set(4, &[0]));
    }

    #[test]
    fn regularize_idempotent_monotone() {
        let d = diamond();
        let all: Vec<FixedBitSet> = (0u32..16).map(|m| set(4, &(0..4).filter(|i| m >> i & 1 == 1).collect::<Vec<_>>())).collect();
        for u in &all {
            let r = regularize(&d, u);
            assert_eq!(regularize(&d, &r), r);
            if d.is_down_closed(u) {
                assert!(u.is_subset(&r));
            }
            for v in &all {
                if u.is_subset(v) {
                    assert!(r.is_subset(&regularize(&d, v)));
                }
            }
        }
    }

    #[test]
    fn completion_sizes_match_enumeration() {
        assert_eq!(ro_completion(&Poset::antichain(1)).unwrap().algebra.atom_count(), 1);
        for k in 1..=3 {
            let c = ro_completion(&Poset::antichain(k)).unwrap();
            assert_eq!(1usize << c.algebra.atom_count(), regular_opens(&Poset::antichain(k)).len());
            assert_eq!(regular_opens(&Poset::antichain(k)).len(), 1 << k);
        }
        let chain = Poset::chain(3);
        assert_eq!(regular_opens(&chain).len(), 2);
        assert_eq!(ro_completion(&chain).unwrap().algebra.atom_count(), 1);
    }

    #[test]
    fn completion_is_faithful_to_regular_opens() {
        let d = diamond();
        let c = ro_completion(&d).unwrap();
        let ros = regular_opens(&d);
        assert_eq!(ros.len(), c.algebra.elements().len());
        for e in c.algebra.elements() {
            let u = c.to_set(&e);
            assert!(ros.contains(&u));
            assert_eq!(c.from_set(&u), e);
        }
        for q in 0..d.len() {
            let mut cone = FixedBitSet::with_capacity(d.len());
            cone.union_with(d.down(q));
            assert_eq!(c.to_set(&c.embed[q]), regularize(&d, &cone));
        }
        // images of a maximal antichain join to 1
        assert!(c.embed[0].join(&c.embed[1]).is_one());
        assert!(c.embed[3].is_one());
    }
}
