use std::collections::BTreeSet;

use super::{BalgError, BoolAlg, Elem};

/// A filter on a finite Boolean algebra; always principal, `↑generator`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Filter {
    generator: Elem,
}

impl Filter {
    pub fn principal(generator: Elem) -> Result<Self, BalgError> {
        if generator.is_zero() {
            return Err(BalgError::NotAFilter("contains 0".into()));
        }
        Ok(Filter { generator })
    }

    /// The trivial filter `{1}`.
    pub fn top(b: &BoolAlg) -> Self {
        Filter { generator: b.one() }
    }

    /// Checks that `members` is nonempty, upward closed, closed under meets
    /// and excludes 0.
    pub fn from_members(b: &BoolAlg, members: &[Elem]) -> Result<Self, BalgError> {
        for m in members {
            b.check(m)?;
        }
        if members.is_empty() {
            return Err(BalgError::NotAFilter("empty".into()));
        }
        let set: BTreeSet<&Elem> = members.iter().collect();
        if set.iter().any(|m| m.is_zero()) {
            return Err(BalgError::NotAFilter("contains 0".into()));
        }
        for x in &set {
            for y in &set {
                if !set.contains(&x.meet(y)) {
                    return Err(BalgError::NotAFilter(format!("{x} and {y} are members but their meet is not")));
                }
            }
        }
        let g = b.meet_all(members.iter());
        // Upward closure: exactly the 2^(n-|g|) elements above g must be present.
        let expected = 1u128 << (b.atom_count() - g.count());
        if set.len() as u128 != expected {
            return Err(BalgError::NotAFilter("not upward closed".into()));
        }
        Filter::principal(g)
    }

    pub fn generator(&self) -> &Elem {
        &self.generator
    }

    pub fn contains(&self, x: &Elem) -> bool {
        self.generator.leq(x)
    }

    pub fn is_ultra(&self) -> bool {
        self.generator.count() == 1
    }

    pub fn members(&self, b: &BoolAlg) -> Vec<Elem> {
        b.elements().into_iter().filter(|x| self.contains(x)).collect()
    }
}

/// One principal ultrafilter per atom.
pub fn ultrafilters(b: &BoolAlg) -> Vec<Filter> {
    b.atoms().into_iter().map(|a| Filter { generator: a }).collect()
}

/// `B/F` for `F = ↑g`, realized as the relative algebra below `g`.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub algebra: BoolAlg,
    /// Atoms of the original algebra that survive, in order.
    pub kept: Vec<usize>,
}

impl Quotient {
    pub fn project(&self, x: &Elem) -> Elem {
        Elem::from_atoms(self.kept.len(), self.kept.iter().enumerate().filter(|(_, &a)| x.contains_atom(a)).map(|(i, _)| i))
    }
}

pub fn quotient_algebra(b: &BoolAlg, f: &Filter) -> Result<Quotient, BalgError> {
    b.check(f.generator())?;
    let kept: Vec<usize> = f.generator().atoms().collect();
    Ok(Quotient { algebra: BoolAlg::new(kept.len())?, kept })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Every subset of elements that is a proper filter, by brute force.
    fn brute_filters(b: &BoolAlg) -> Vec<Vec<Elem>> {
        let els = b.elements();
        let n = els.len();
        (1u64..1 << n)
            .map(|m| (0..n).filter(|i| m >> i & 1 == 1).map(|i| els[i].clone()).collect::<Vec<_>>())
            .filter(|s| Filter::from_members(b, s).is_ok())
            .collect()
    }

    #[test]
    fn ultrafilter_counts() {
        for (n, expected) in [(1, 1), (2, 2), (3, 3)] {
            let b = BoolAlg::new(n).unwrap();
            let us = ultrafilters(&b);
            assert_eq!(us.len(), expected);
            let maximal: Vec<_> = brute_filters(&b).into_iter().filter(|f| f.len() == 1 << (n - 1)).collect();
            assert_eq!(maximal.len(), expected);
            for u in &us {
                assert!(u.is_ultra());
                for x in b.elements() {
                    assert!(u.contains(&x) ^ u.contains(&x.complement()));
                }
            }
        }
    }

    #[test]
    fn from_members_validation() {
        let b = BoolAlg::new(2).unwrap();
        let e = |s| b.parse(s).unwrap();
        assert!(Filter::from_members(&b, &[e("11")]).is_ok());
        assert!(Filter::from_members(&b, &[e("10"), e("11")]).unwrap().is_ultra());
        assert!(Filter::from_members(&b, &[e("10")]).is_err());
        assert!(Filter::from_members(&b, &[e("10"), e("01"), e("11")]).is_err());
        assert!(Filter::from_members(&b, &[]).is_err());
        assert_eq!(brute_filters(&b).len(), 3);
    }

    #[test]
    fn quotients() {
        let b = BoolAlg::new(3).unwrap();
        let q = quotient_algebra(&b, &Filter::top(&b)).unwrap();
        assert_eq!(q.algebra.atom_count(), 3);
        let imgs: BTreeSet<_> = b.elements().iter().map(|x| q.project(x)).collect();
        assert_eq!(imgs.len(), 8);

        let coatom = b.parse("110").unwrap();
        let q = quotient_algebra(&b, &Filter::principal(coatom.clone()).unwrap()).unwrap();
        assert_eq!(1 << q.algebra.atom_count(), 4);
        for x in b.elements() {
            for y in b.elements() {
                let iff = x.complement().join(&y).meet(&y.complement().join(&x));
                assert_eq!(q.project(&x) == q.project(&y), coatom.leq(&iff));
            }
            assert_eq!(q.project(&x.meet(&coatom)), q.project(&x));
            assert_eq!(q.project(&x.complement()), q.project(&x).complement());
        }

        for u in ultrafilters(&b) {
            let q = quotient_algebra(&b, &u).unwrap();
            assert_eq!(q.algebra.atom_count(), 1);
            for x in b.elements() {
                assert_eq!(q.project(&x).is_one(), u.contains(&x));
            }
        }
    }
}
