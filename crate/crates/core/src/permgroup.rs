//! Permutation groups backed by a stabilizer chain.
//!
//! The chain uses the fixed base `0, 1, .., m-1`; level `j` stores the orbit
//! of `j` under the pointwise stabilizer of `0..j` together with coset
//! representatives. Strong generators are added with Knuth's incremental
//! Schreier-Sims, which is deterministic for a fixed generator list.

use alloc::vec::Vec;

use num_bigint::BigUint;
use rand::Rng;

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Exhaustive enumeration is refused above this many elements.
pub const ENUMERATION_CAP: usize = 1_000_000;

#[derive(Clone, Debug)]
struct Level {
    base: usize,
    gens: Vec<Permutation>,
    transversal: Vec<Option<Permutation>>,
    orbit: Vec<usize>,
}

impl Level {
    fn new(base: usize, degree: usize) -> Self {
        let mut transversal = alloc::vec![None; degree];
        transversal[base] = Some(Permutation::identity(degree));
        Self {
            base,
            gens: Vec::new(),
            transversal,
            orbit: alloc::vec![base],
        }
    }
}

#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    levels: Vec<Level>,
}

impl PermGroup {
    /// Builds the group generated by `generators` acting on `degree` points.
    pub fn new(degree: usize, generators: Vec<Permutation>) -> Result<Self> {
        if degree > crate::perm::MAX_DEGREE {
            return Err(Error::Scale {
                what: "domain size",
                value: degree as u128,
                cap: crate::perm::MAX_DEGREE as u128,
            });
        }
        for g in &generators {
            if g.degree() != degree {
                return Err(Error::DomainMismatch {
                    expected: degree,
                    found: g.degree(),
                });
            }
        }
        let mut group = Self {
            degree,
            generators: Vec::new(),
            levels: (0..degree).map(|b| Level::new(b, degree)).collect(),
        };
        for g in generators {
            if !g.is_identity() {
                group.insert(0, g.clone());
                group.generators.push(g);
            }
        }
        Ok(group)
    }

    pub fn trivial(degree: usize) -> Self {
        Self::new(degree, Vec::new()).expect("trivial group")
    }

    /// The full symmetric group, generated by adjacent transpositions.
    pub fn symmetric(degree: usize) -> Self {
        let gens = (1..degree)
            .map(|i| Permutation::transposition(degree, i - 1, i))
            .collect();
        Self::new(degree, gens).expect("symmetric group")
    }

    /// Direct product acting on consecutive disjoint blocks.
    pub fn direct_product(factors: &[&PermGroup]) -> Result<Self> {
        let degree: usize = factors.iter().map(|g| g.degree).sum();
        let mut gens = Vec::new();
        let mut offset = 0;
        for f in factors {
            gens.extend(f.generators.iter().map(|g| g.shifted(offset, degree)));
            offset += f.degree;
        }
        Self::new(degree, gens)
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn order(&self) -> BigUint {
        self.levels
            .iter()
            .fold(BigUint::from(1u32), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    /// The order if it fits in a `usize`.
    pub fn order_usize(&self) -> Option<usize> {
        self.levels
            .iter()
            .try_fold(1usize, |acc, l| acc.checked_mul(l.orbit.len()))
    }

    /// Orbit of the `j`-th base point under the `j`-th stabilizer.
    pub fn basic_orbit(&self, level: usize) -> &[usize] {
        &self.levels[level].orbit
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        g.degree() == self.degree && self.contains_from(0, g.clone())
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.degree == other.degree && self.generators.iter().all(|g| other.contains(g))
    }

    /// Same elements, compared through generators and orders.
    pub fn same_group(&self, other: &PermGroup) -> bool {
        self.is_subgroup_of(other) && other.is_subgroup_of(self) && self.order() == other.order()
    }

    /// Every element, in the order of the transversal odometer.
    pub fn elements(&self) -> Result<Vec<Permutation>> {
        let order = self.order_usize().filter(|&n| n <= ENUMERATION_CAP).ok_or(Error::Scale {
            what: "group order for enumeration",
            value: u128::try_from(self.order()).unwrap_or(u128::MAX),
            cap: ENUMERATION_CAP as u128,
        })?;
        let mut out = Vec::with_capacity(order);
        out.push(Permutation::identity(self.degree));
        for level in self.levels.iter().rev() {
            if level.orbit.len() == 1 {
                continue;
            }
            let mut next = Vec::with_capacity(out.len() * level.orbit.len());
            for &p in &level.orbit {
                let t = level.transversal[p].as_ref().expect("orbit point has transversal");
                next.extend(out.iter().map(|g| t.compose(g)));
            }
            out = next;
        }
        Ok(out)
    }

    /// Uniformly random element.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Permutation {
        let mut g = Permutation::identity(self.degree);
        for level in &self.levels {
            let p = level.orbit[rng.gen_range(0..level.orbit.len())];
            g = g.compose(level.transversal[p].as_ref().expect("orbit point"));
        }
        g
    }

    /// Lexicographically least element of the left coset `x * self`.
    pub fn min_in_left_coset(&self, x: &Permutation) -> Permutation {
        let mut cur = x.clone();
        for level in &self.levels {
            if level.orbit.len() == 1 {
                continue;
            }
            let best = level
                .orbit
                .iter()
                .copied()
                .min_by_key(|&q| cur.apply(q))
                .expect("nonempty orbit");
            if best != level.base {
                cur = cur.compose(level.transversal[best].as_ref().expect("orbit point"));
            }
        }
        cur
    }

    /// Lexicographically least element of `left * x * self`.
    pub fn min_in_double_coset(&self, left: &PermGroup, x: &Permutation) -> Result<Permutation> {
        let mut best: Option<Permutation> = None;
        for h in left.elements()? {
            let cand = self.min_in_left_coset(&h.compose(x));
            if best.as_ref().map_or(true, |b| cand < *b) {
                best = Some(cand);
            }
        }
        Ok(best.expect("groups are nonempty"))
    }

    fn contains_from(&self, start: usize, mut g: Permutation) -> bool {
        for level in &self.levels[start..] {
            let p = g.apply(level.base);
            match &level.transversal[p] {
                Some(t) => {
                    if p != level.base {
                        g = t.inverse().compose(&g);
                    }
                }
                None => return false,
            }
        }
        g.is_identity()
    }

    fn insert(&mut self, k: usize, g: Permutation) {
        if k == self.levels.len() {
            debug_assert!(g.is_identity());
            return;
        }
        if self.contains_from(k, g.clone()) {
            return;
        }
        self.levels[k].gens.push(g.clone());
        let reps: Vec<Permutation> = self.levels[k]
            .orbit
            .iter()
            .map(|&p| self.levels[k].transversal[p].clone().expect("orbit point"))
            .collect();
        for t in reps {
            self.extend(k, g.compose(&t));
        }
    }

    fn extend(&mut self, k: usize, tau: Permutation) {
        let p = tau.apply(self.levels[k].base);
        if let Some(t) = &self.levels[k].transversal[p] {
            let schreier = t.inverse().compose(&tau);
            self.insert(k + 1, schreier);
        } else {
            self.levels[k].transversal[p] = Some(tau.clone());
            self.levels[k].orbit.push(p);
            let gens = self.levels[k].gens.clone();
            for s in gens {
                self.extend(k, s.compose(&tau));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn perm(cycles: &[&[usize]], m: usize) -> Permutation {
        Permutation::from_cycles(m, cycles).unwrap()
    }

    /// Closure of the generators by breadth-first multiplication.
    fn brute_closure(m: usize, gens: &[Permutation]) -> BTreeSet<Permutation> {
        let mut seen = BTreeSet::new();
        let mut frontier = alloc::vec![Permutation::identity(m)];
        seen.insert(Permutation::identity(m));
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y = g.compose(&x);
                if seen.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        seen
    }

    #[test]
    fn s4_from_transposition_and_four_cycle() {
        let g = PermGroup::new(4, alloc::vec![perm(&[&[0, 1]], 4), perm(&[&[0, 1, 2, 3]], 4)])
            .unwrap();
        assert_eq!(g.order_usize(), Some(24));
    }

    #[test]
    fn empty_generators_give_trivial_group() {
        let g = PermGroup::new(5, Vec::new()).unwrap();
        assert_eq!(g.order_usize(), Some(1));
        assert_eq!(g.elements().unwrap().len(), 1);
    }

    #[test]
    fn rejects_degree_mismatch() {
        let err = PermGroup::new(4, alloc::vec![Permutation::identity(3)]).unwrap_err();
        assert_eq!(err, Error::DomainMismatch { expected: 4, found: 3 });
    }

    #[test]
    fn order_matches_closure_on_assorted_groups() {
        let cases: Vec<(usize, Vec<Permutation>)> = alloc::vec![
            (4, alloc::vec![perm(&[&[0, 1, 2, 3]], 4), perm(&[&[0, 2]], 4)]),
            (6, alloc::vec![perm(&[&[0, 1, 2]], 6), perm(&[&[3, 4, 5]], 6), perm(&[&[0, 3], &[1, 4], &[2, 5]], 6)]),
            (7, alloc::vec![perm(&[&[0, 1, 2, 3, 4, 5, 6]], 7), perm(&[&[1, 2, 4], &[3, 6, 5]], 7)]),
            (8, alloc::vec![perm(&[&[0, 1]], 8), perm(&[&[2, 3]], 8), perm(&[&[0, 2], &[1, 3]], 8), perm(&[&[0, 4], &[1, 5], &[2, 6], &[3, 7]], 8)]),
        ];
        for (m, gens) in cases {
            let g = PermGroup::new(m, gens.clone()).unwrap();
            let closure = brute_closure(m, &gens);
            assert_eq!(g.order_usize(), Some(closure.len()));
            let listed: BTreeSet<_> = g.elements().unwrap().into_iter().collect();
            assert_eq!(listed, closure);
        }
    }

    #[test]
    fn membership_agrees_with_closure() {
        let gens = alloc::vec![perm(&[&[0, 1, 2, 3, 4]], 5), perm(&[&[1, 4], &[2, 3]], 5)];
        let g = PermGroup::new(5, gens.clone()).unwrap();
        let closure = brute_closure(5, &gens);
        for x in PermGroup::symmetric(5).elements().unwrap() {
            assert_eq!(g.contains(&x), closure.contains(&x), "{x:?}");
        }
    }

    #[test]
    fn left_coset_minimum_is_brute_force_minimum() {
        let h = PermGroup::new(5, alloc::vec![perm(&[&[0, 1]], 5), perm(&[&[2, 3, 4]], 5)]).unwrap();
        let hs = h.elements().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s5 = PermGroup::symmetric(5);
        for _ in 0..50 {
            let x = s5.random_element(&mut rng);
            let brute = hs.iter().map(|k| x.compose(k)).min().unwrap();
            assert_eq!(h.min_in_left_coset(&x), brute);
        }
    }

    #[test]
    fn random_elements_are_members() {
        let g = PermGroup::new(6, alloc::vec![perm(&[&[0, 1, 2]], 6), perm(&[&[0, 3], &[1, 4]], 6)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert!(g.contains(&g.random_element(&mut rng)));
        }
    }
}
