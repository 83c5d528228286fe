//! Exact group algebra `C[G]` of a small permutation group.
//!
//! This is the brute-force ground truth for the Hecke module: it forms the
//! averaging projections `p_H = |H|⁻¹ Σ_{h∈H} h`, the corners `p_H C[G] p_H`,
//! and invariant parts under conjugation, all with rational coefficients.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::cosets::DoubleCosetTable;
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::permgroup::PermGroup;
use crate::scalar::{Exact, Scalar};

/// Largest group handled by the oracle.
pub const ORACLE_CAP: usize = 10_000;
const CAYLEY_CAP: usize = 2_048;

/// An enumerated permutation group with element indices.
///
/// Elements are sorted lexicographically, so index 0 is the identity.
#[derive(Debug)]
pub struct FiniteGroup {
    group: PermGroup,
    elements: Vec<Permutation>,
    index: BTreeMap<Permutation, u32>,
    inverse: Vec<u32>,
    cayley: Option<Vec<u32>>,
}

impl FiniteGroup {
    pub fn new(group: &PermGroup) -> Result<Arc<Self>> {
        let order = group.order_usize().unwrap_or(usize::MAX);
        if order > ORACLE_CAP {
            return Err(Error::Scale {
                what: "group order for the exact oracle",
                value: order as u128,
                cap: ORACLE_CAP as u128,
            });
        }
        let mut elements = group.elements()?;
        elements.sort();
        let index: BTreeMap<_, _> = elements.iter().cloned().zip(0u32..).collect();
        let inverse = elements.iter().map(|g| index[&g.inverse()]).collect();
        let mut fg = Self {
            group: group.clone(),
            elements,
            index,
            inverse,
            cayley: None,
        };
        if order <= CAYLEY_CAP {
            let mut table = Vec::with_capacity(order * order);
            for a in &fg.elements {
                for b in &fg.elements {
                    table.push(fg.index[&a.compose(b)]);
                }
            }
            fg.cayley = Some(table);
        }
        Ok(Arc::new(fg))
    }

    pub fn perm_group(&self) -> &PermGroup {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn element(&self, i: usize) -> &Permutation {
        &self.elements[i]
    }

    pub fn index_of(&self, g: &Permutation) -> Option<usize> {
        self.index.get(g).map(|&i| i as usize)
    }

    #[inline]
    pub fn inverse(&self, i: usize) -> usize {
        self.inverse[i] as usize
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        match &self.cayley {
            Some(t) => t[a * self.elements.len() + b] as usize,
            None => self.index[&self.elements[a].compose(&self.elements[b])] as usize,
        }
    }
}

/// Finitely supported function `G → Q(i)`, multiplied by convolution.
#[derive(Clone, Debug)]
pub struct GroupAlgebraElement {
    group: Arc<FiniteGroup>,
    coeffs: BTreeMap<usize, Exact>,
}

impl PartialEq for GroupAlgebraElement {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.group, &other.group) && self.coeffs == other.coeffs
    }
}

fn lcm_of_denominators<'a>(values: impl Iterator<Item = &'a Exact>) -> BigInt {
    values.fold(BigInt::one(), |acc, x| acc.lcm(x.re.denom()).lcm(x.im.denom()))
}

/// Coefficients scaled by a common denominator, if they fit in `i64`.
fn scaled_ints(coeffs: &BTreeMap<usize, Exact>) -> Option<(BigInt, Vec<(usize, i64, i64)>)> {
    let den = lcm_of_denominators(coeffs.values());
    let mut out = Vec::with_capacity(coeffs.len());
    for (&i, x) in coeffs {
        let re = (x.re.numer() * (&den / x.re.denom())).to_i64()?;
        let im = (x.im.numer() * (&den / x.im.denom())).to_i64()?;
        out.push((i, re, im));
    }
    Some((den, out))
}

impl GroupAlgebraElement {
    pub fn zero(group: &Arc<FiniteGroup>) -> Self {
        Self {
            group: group.clone(),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn delta(group: &Arc<FiniteGroup>, g: &Permutation) -> Result<Self> {
        let i = group.index_of(g).ok_or(Error::NotSubgroup)?;
        Ok(Self::from_coeffs(group, [(i, Exact::one())]))
    }

    pub fn identity(group: &Arc<FiniteGroup>) -> Self {
        Self::from_coeffs(group, [(0, Exact::one())])
    }

    pub fn from_coeffs(group: &Arc<FiniteGroup>, coeffs: impl IntoIterator<Item = (usize, Exact)>) -> Self {
        let mut map = BTreeMap::new();
        for (i, c) in coeffs {
            let slot: &mut Exact = map.entry(i).or_insert_with(Exact::zero);
            *slot = &*slot + c;
        }
        map.retain(|_, c: &mut Exact| !c.is_zero());
        Self {
            group: group.clone(),
            coeffs: map,
        }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn coeff(&self, i: usize) -> Exact {
        self.coeffs.get(&i).cloned().unwrap_or_else(Exact::zero)
    }

    pub fn coeff_at(&self, g: &Permutation) -> Exact {
        self.group.index_of(g).map_or_else(Exact::zero, |i| self.coeff(i))
    }

    pub fn support(&self) -> impl Iterator<Item = (usize, &Exact)> {
        self.coeffs.iter().map(|(&i, c)| (i, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.group, &other.group) {
            Ok(())
        } else {
            Err(Error::PairMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self::from_coeffs(
            &self.group,
            self.coeffs.iter().chain(other.coeffs.iter()).map(|(&i, c)| (i, c.clone())),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-Exact::one()))
    }

    pub fn scale(&self, s: &Exact) -> Self {
        Self::from_coeffs(&self.group, self.coeffs.iter().map(|(&i, c)| (i, c * s)))
    }

    /// `(f·g)(x) = Σ_y f(xy⁻¹) g(y)`.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        if let Some(fast) = self.convolve_scaled(other) {
            return Ok(fast);
        }
        let mut acc: BTreeMap<usize, Exact> = BTreeMap::new();
        for (&a, fa) in &self.coeffs {
            for (&b, gb) in &other.coeffs {
                let slot = acc.entry(self.group.mul(a, b)).or_insert_with(Exact::zero);
                *slot = &*slot + fa * gb;
            }
        }
        Ok(Self::from_coeffs(&self.group, acc))
    }

    /// Integer convolution over a common denominator; `None` on overflow.
    fn convolve_scaled(&self, other: &Self) -> Option<Self> {
        let (den_f, f) = scaled_ints(&self.coeffs)?;
        let (den_g, g) = scaled_ints(&other.coeffs)?;
        let mut acc = alloc::vec![(0i128, 0i128); self.group.order()];
        for &(a, fr, fi) in &f {
            for &(b, gr, gi) in &g {
                let slot = &mut acc[self.group.mul(a, b)];
                let (fr, fi, gr, gi) = (fr as i128, fi as i128, gr as i128, gi as i128);
                slot.0 = slot.0.checked_add((fr * gr).checked_sub(fi * gi)?)?;
                slot.1 = slot.1.checked_add((fr * gi).checked_add(fi * gr)?)?;
            }
        }
        let den = den_f * den_g;
        let coeffs = acc.into_iter().enumerate().filter(|(_, (r, i))| *r != 0 || *i != 0).map(|(x, (r, i))| {
            (
                x,
                Complex::new(
                    BigRational::new(BigInt::from(r), den.clone()),
                    BigRational::new(BigInt::from(i), den.clone()),
                ),
            )
        });
        Some(Self::from_coeffs(&self.group, coeffs))
    }

    /// `f*(x) = conj(f(x⁻¹))`.
    pub fn star(&self) -> Self {
        Self::from_coeffs(
            &self.group,
            self.coeffs.iter().map(|(&i, c)| (self.group.inverse(i), c.conj())),
        )
    }

    /// The canonical trace of `C[G]`, `f ↦ f(e)`.
    pub fn trace(&self) -> Exact {
        self.coeff(0)
    }

    /// `x ↦ γxγ⁻¹` applied to the support; `None` if `γ` does not normalize `G`.
    pub fn conjugate_by(&self, gamma: &Permutation) -> Option<Self> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for (&i, c) in &self.coeffs {
            let j = self.group.index_of(&gamma.conjugate(self.group.element(i)))?;
            out.push((j, c.clone()));
        }
        Some(Self::from_coeffs(&self.group, out))
    }
}

/// `p_H = |H|⁻¹ Σ_{h∈H} δ_h` inside `C[G]`.
pub fn projector(group: &Arc<FiniteGroup>, subgroup: &PermGroup) -> Result<GroupAlgebraElement> {
    if !subgroup.is_subgroup_of(group.perm_group()) {
        return Err(Error::NotSubgroup);
    }
    let elements = subgroup.elements()?;
    let weight = Exact::from_ratio(1, elements.len() as i64);
    Ok(GroupAlgebraElement::from_coeffs(
        group,
        elements
            .iter()
            .map(|h| (group.index_of(h).expect("subgroup element"), weight.clone())),
    ))
}

/// `{p_H δ_x p_H}` over the canonical double-coset representatives, in table order.
pub fn corner_basis(group: &Arc<FiniteGroup>, subgroup: &PermGroup) -> Result<Vec<GroupAlgebraElement>> {
    let table = DoubleCosetTable::new(group.perm_group(), subgroup)?;
    corner_basis_for(group, &table)
}

pub fn corner_basis_for(group: &Arc<FiniteGroup>, table: &DoubleCosetTable) -> Result<Vec<GroupAlgebraElement>> {
    let p = projector(group, table.subgroup())?;
    table
        .entries()
        .iter()
        .map(|e| p.convolve(&GroupAlgebraElement::delta(group, &e.rep)?)?.convolve(&p))
        .collect()
}

/// Orbit sums of `basis` under the group generated by conjugation with
/// `action`; these span exactly the invariant part of `span(basis)` when the
/// action permutes the basis.
pub fn invariant_subalgebra(
    basis: &[GroupAlgebraElement],
    action: &[Permutation],
) -> Result<Vec<GroupAlgebraElement>> {
    let Some(first) = basis.first() else {
        return Ok(Vec::new());
    };
    let mut image_of: Vec<Vec<usize>> = Vec::with_capacity(action.len());
    for gamma in action {
        let mut images = Vec::with_capacity(basis.len());
        for (i, b) in basis.iter().enumerate() {
            let moved = b.conjugate_by(gamma).ok_or_else(|| {
                Error::NotInvariant(alloc::format!("conjugation by {gamma} leaves the group"))
            })?;
            let j = basis.iter().position(|c| *c == moved).ok_or_else(|| {
                Error::NotInvariant(alloc::format!("basis element {i} is not sent to a basis element"))
            })?;
            images.push(j);
        }
        image_of.push(images);
    }
    let mut orbit_id = alloc::vec![usize::MAX; basis.len()];
    let mut sums = Vec::new();
    for start in 0..basis.len() {
        if orbit_id[start] != usize::MAX {
            continue;
        }
        let id = sums.len();
        orbit_id[start] = id;
        let mut members = alloc::vec![start];
        let mut cursor = 0;
        while cursor < members.len() {
            let i = members[cursor];
            cursor += 1;
            for images in &image_of {
                if orbit_id[images[i]] == usize::MAX {
                    orbit_id[images[i]] = id;
                    members.push(images[i]);
                }
            }
        }
        let mut sum = GroupAlgebraElement::zero(first.group());
        for &i in &members {
            sum = sum.add(&basis[i])?;
        }
        sums.push(sum);
    }
    Ok(sums)
}

pub fn is_invariant(x: &GroupAlgebraElement, action: &[Permutation]) -> bool {
    action.iter().all(|g| x.conjugate_by(g).as_ref() == Some(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::exact_ratio;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn d4() -> PermGroup {
        crate::treefam::q_group(2, 2).unwrap()
    }

    fn random_element(g: &Arc<FiniteGroup>, rng: &mut ChaCha8Rng, terms: usize) -> GroupAlgebraElement {
        GroupAlgebraElement::from_coeffs(
            g,
            (0..terms).map(|_| {
                let i = rng.gen_range(0..g.order());
                let c = Complex::new(
                    exact_ratio(rng.gen_range(-5..6), rng.gen_range(1..4)).re,
                    exact_ratio(rng.gen_range(-5..6), rng.gen_range(1..4)).re,
                );
                (i, c)
            }),
        )
    }

    #[test]
    fn delta_products() {
        let g = FiniteGroup::new(&PermGroup::symmetric(4)).unwrap();
        let a = Permutation::from_cycles(4, &[&[0, 1, 2]]).unwrap();
        let b = Permutation::from_cycles(4, &[&[1, 3]]).unwrap();
        let da = GroupAlgebraElement::delta(&g, &a).unwrap();
        let db = GroupAlgebraElement::delta(&g, &b).unwrap();
        assert_eq!(da.convolve(&db).unwrap(), GroupAlgebraElement::delta(&g, &a.compose(&b)).unwrap());
        let e = GroupAlgebraElement::identity(&g);
        assert_eq!(e.convolve(&da).unwrap(), da);
    }

    #[test]
    fn projector_is_self_adjoint_idempotent() {
        let g = FiniteGroup::new(&PermGroup::symmetric(4)).unwrap();
        let p = projector(&g, &d4()).unwrap();
        assert_eq!(p.convolve(&p).unwrap(), p);
        assert_eq!(p.star(), p);
        assert_eq!(p.support().count(), 8);
        assert!(p.support().all(|(_, c)| *c == exact_ratio(1, 8)));
        for h in d4().elements().unwrap() {
            let dh = GroupAlgebraElement::delta(&g, &h).unwrap();
            assert_eq!(p.convolve(&dh).unwrap().convolve(&p).unwrap(), p);
        }
        let trivial = projector(&g, &PermGroup::trivial(4)).unwrap();
        assert_eq!(trivial, GroupAlgebraElement::identity(&g));
    }

    #[test]
    fn projector_rejects_non_subgroup() {
        let g = FiniteGroup::new(&d4()).unwrap();
        let s3 = PermGroup::new(4, alloc::vec![Permutation::from_cycles(4, &[&[0, 1, 2]]).unwrap()]).unwrap();
        assert_eq!(projector(&g, &s3).unwrap_err(), Error::NotSubgroup);
    }

    #[test]
    fn convolution_is_associative_and_trace_is_tracial() {
        let g = FiniteGroup::new(&PermGroup::symmetric(4)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let (a, b, c) = (random_element(&g, &mut rng, 6), random_element(&g, &mut rng, 6), random_element(&g, &mut rng, 6));
            let left = a.convolve(&b).unwrap().convolve(&c).unwrap();
            let right = a.convolve(&b.convolve(&c).unwrap()).unwrap();
            assert_eq!(left, right);
            assert_eq!(a.convolve(&b).unwrap().trace(), b.convolve(&a).unwrap().trace());
            assert_eq!(a.convolve(&b).unwrap().star(), b.star().convolve(&a.star()).unwrap());
            assert_eq!(a.star().star(), a);
        }
    }

    #[test]
    fn big_rational_path_agrees_with_scaled_path() {
        let g = FiniteGroup::new(&PermGroup::symmetric(3)).unwrap();
        let huge = Complex::new(
            BigRational::new(BigInt::from(u64::MAX) * BigInt::from(3u8), BigInt::from(7)),
            BigRational::zero(),
        );
        let a = GroupAlgebraElement::from_coeffs(&g, [(1, huge.clone()), (2, exact_ratio(1, 2))]);
        let b = GroupAlgebraElement::from_coeffs(&g, [(3, huge.clone()), (0, exact_ratio(-1, 3))]);
        assert!(a.convolve_scaled(&b).is_none());
        let prod = a.convolve(&b).unwrap();
        let expected = GroupAlgebraElement::from_coeffs(
            &g,
            [
                (g.mul(1, 3), &huge * &huge),
                (g.mul(1, 0), &huge * exact_ratio(-1, 3)),
                (g.mul(2, 3), &huge * exact_ratio(1, 2)),
                (g.mul(2, 0), exact_ratio(-1, 6)),
            ],
        );
        assert_eq!(prod, expected);
    }

    #[test]
    fn corner_bases() {
        let s4 = FiniteGroup::new(&PermGroup::symmetric(4)).unwrap();
        assert_eq!(corner_basis(&s4, &d4()).unwrap().len(), 2);
        let trivial = corner_basis(&s4, &PermGroup::trivial(4)).unwrap();
        assert_eq!(trivial.len(), 24);
        assert!(trivial.iter().all(|b| b.support().count() == 1));
        let whole = corner_basis(&s4, &PermGroup::symmetric(4)).unwrap();
        assert_eq!(whole, alloc::vec![projector(&s4, &PermGroup::symmetric(4)).unwrap()]);
    }

    #[test]
    fn commuting_projectors_when_normalized() {
        // Γ = block swap normalizes V_0 = S_2 x S_2 inside S_2 wr S_2
        let v0 = PermGroup::new(
            4,
            alloc::vec![Permutation::from_cycles(4, &[&[0, 1]]).unwrap(), Permutation::from_cycles(4, &[&[2, 3]]).unwrap()],
        )
        .unwrap();
        let gamma = PermGroup::new(4, alloc::vec![Permutation::from_cycles(4, &[&[0, 2], &[1, 3]]).unwrap()]).unwrap();
        let g = FiniteGroup::new(&d4()).unwrap();
        let pv = projector(&g, &v0).unwrap();
        let pg = projector(&g, &gamma).unwrap();
        assert_eq!(pv.convolve(&pg).unwrap(), pg.convolve(&pv).unwrap());
        assert_eq!(pv.convolve(&pg).unwrap(), projector(&g, &d4()).unwrap());
    }

    #[test]
    fn invariant_parts() {
        // W x W with W = S_2 x S_2 and the coordinate swap: 16 elements, 10 orbits
        let w = PermGroup::new(
            4,
            alloc::vec![Permutation::from_cycles(4, &[&[0, 1]]).unwrap(), Permutation::from_cycles(4, &[&[2, 3]]).unwrap()],
        )
        .unwrap();
        let v = PermGroup::direct_product(&[&w, &w]).unwrap();
        let g = FiniteGroup::new(&v).unwrap();
        let basis: Vec<_> = (0..g.order())
            .map(|i| GroupAlgebraElement::from_coeffs(&g, [(i, Exact::one())]))
            .collect();
        let swap = Permutation::from_cycles(8, &[&[0, 4], &[1, 5], &[2, 6], &[3, 7]]).unwrap();
        let inv = invariant_subalgebra(&basis, &[swap.clone()]).unwrap();
        assert_eq!(inv.len(), 10);
        assert!(inv.iter().all(|x| is_invariant(x, &[swap.clone()])));
        assert_eq!(invariant_subalgebra(&basis, &[]).unwrap().len(), 16);

        // class functions of S_3
        let s3 = FiniteGroup::new(&PermGroup::symmetric(3)).unwrap();
        let basis: Vec<_> = (0..6).map(|i| GroupAlgebraElement::from_coeffs(&s3, [(i, Exact::one())])).collect();
        let gens = PermGroup::symmetric(3).generators().to_vec();
        assert_eq!(invariant_subalgebra(&basis, &gens).unwrap().len(), 3);
    }
}
