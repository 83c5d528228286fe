//! Trace-preserving embeddings of Hecke corners into a wreath product.
//!
//! A scenario consists of a base pair `(B, B_0)` copied onto `m` blocks,
//! giving `V = B^m ≥ V_0 = B_0^m`, together with a group `G ≤ S_m` permuting
//! the blocks rigidly and a subgroup `Γ ≤ G`. Everything is realized inside
//! `C[V ⋊ G]` on the disjoint union of the blocks:
//!
//! * `x ↦ x · p_Γ` sends `Γ`-invariant elements of `p_{V_0} C[V] p_{V_0}`
//!   into `p_{V_0⋊Γ} C[V⋊G] p_{V_0⋊Γ}`,
//! * `y ↦ p_{V_0} · y` does the same for `p_Γ C[G] p_Γ`,
//!
//! and the two images commute when `x` is invariant under all of `G`.
//! Corner traces are normalized to be 1 on the unit, i.e. `a ↦ |H| · a(e)`.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::cosets::DoubleCosetTable;
use crate::error::{Error, Result};
use crate::groupalg::{corner_basis_for, invariant_subalgebra, is_invariant, projector, FiniteGroup, GroupAlgebraElement};
use crate::perm::Permutation;
use crate::permgroup::PermGroup;
use crate::scalar::{Exact, Scalar};
use crate::treefam::q_group;

#[derive(Clone, Debug)]
pub struct WreathScenario {
    pub name: String,
    block_size: usize,
    blocks: usize,
    v: PermGroup,
    v0: PermGroup,
    top: PermGroup,
    gamma: PermGroup,
    ambient: Arc<FiniteGroup>,
    small: PermGroup,
}

/// Pass/fail per axiom for one of the two embeddings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    pub basis_size: usize,
    pub multiplicative: bool,
    pub star: bool,
    pub trace: bool,
    pub injective: bool,
    pub unital: bool,
}

impl AxiomReport {
    pub fn holds(&self) -> bool {
        self.multiplicative && self.star && self.trace && self.injective && self.unital
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbedReport {
    pub scenario: String,
    pub ambient_order: usize,
    pub invariant: AxiomReport,
    pub top: AxiomReport,
    /// Dimension of the `G`-invariant part used for the commutation check.
    pub commutant_dim: usize,
    pub commutation: bool,
}

impl EmbedReport {
    pub fn holds(&self) -> bool {
        self.invariant.holds() && self.top.holds() && self.commutation
    }
}

fn rigid_lift(sigma: &Permutation, block_size: usize) -> Permutation {
    let m = sigma.degree();
    let mut images = alloc::vec![0usize; m * block_size];
    for b in 0..m {
        for t in 0..block_size {
            images[b * block_size + t] = sigma.apply(b) * block_size + t;
        }
    }
    Permutation::from_images(&images).expect("rigid block map is a bijection")
}

fn lift_group(g: &PermGroup, block_size: usize) -> Result<PermGroup> {
    PermGroup::new(
        g.degree() * block_size,
        g.generators().iter().map(|s| rigid_lift(s, block_size)).collect(),
    )
}

fn normalizes(by: &PermGroup, target: &PermGroup) -> bool {
    by.generators()
        .iter()
        .all(|g| target.generators().iter().all(|t| target.contains(&g.conjugate(t))))
}

impl WreathScenario {
    /// `base` and `base_sub` act on one block; `top` and `gamma` act on the
    /// block indices.
    pub fn new(
        name: impl Into<String>,
        base: &PermGroup,
        base_sub: &PermGroup,
        top: &PermGroup,
        gamma: &PermGroup,
    ) -> Result<Self> {
        if !base_sub.is_subgroup_of(base) || !gamma.is_subgroup_of(top) {
            return Err(Error::NotSubgroup);
        }
        let block_size = base.degree();
        let blocks = top.degree();
        let v = PermGroup::direct_product(&alloc::vec![base; blocks])?;
        let v0 = PermGroup::direct_product(&alloc::vec![base_sub; blocks])?;
        let top = lift_group(top, block_size)?;
        let gamma = lift_group(gamma, block_size)?;
        if !normalizes(&top, &v0) {
            return Err(Error::NotInvariant("the block action does not preserve V_0".into()));
        }
        let mut gens = v.generators().to_vec();
        gens.extend(top.generators().iter().cloned());
        let ambient = FiniteGroup::new(&PermGroup::new(v.degree(), gens)?)?;
        let mut small_gens = v0.generators().to_vec();
        small_gens.extend(gamma.generators().iter().cloned());
        let small = PermGroup::new(v.degree(), small_gens)?;
        Ok(Self {
            name: name.into(),
            block_size,
            blocks,
            v,
            v0,
            top,
            gamma,
            ambient,
            small,
        })
    }

    pub fn ambient(&self) -> &Arc<FiniteGroup> {
        &self.ambient
    }

    pub fn v(&self) -> &PermGroup {
        &self.v
    }

    pub fn v0(&self) -> &PermGroup {
        &self.v0
    }

    /// Lifted top group `G`.
    pub fn top(&self) -> &PermGroup {
        &self.top
    }

    /// Lifted `Γ`.
    pub fn gamma(&self) -> &PermGroup {
        &self.gamma
    }

    /// `V_0 ⋊ Γ`.
    pub fn small(&self) -> &PermGroup {
        &self.small
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    fn order(g: &PermGroup) -> i64 {
        g.order_usize().expect("oracle scale") as i64
    }

    fn corner_trace(x: &GroupAlgebraElement, sub: &PermGroup) -> Exact {
        x.trace() * Exact::from_int(Self::order(sub))
    }

    /// Basis of `p_{V_0} C[V] p_{V_0}` inside `C[V ⋊ G]`.
    pub fn base_corner(&self) -> Result<Vec<GroupAlgebraElement>> {
        corner_basis_for(&self.ambient, &DoubleCosetTable::new(&self.v, &self.v0)?)
    }

    /// Orbit sums spanning the part of the base corner fixed by `action`.
    pub fn invariant_basis(&self, action: &PermGroup) -> Result<Vec<GroupAlgebraElement>> {
        invariant_subalgebra(&self.base_corner()?, action.generators())
    }

    /// Basis of `p_Γ C[G] p_Γ` inside `C[V ⋊ G]`.
    pub fn top_corner(&self) -> Result<Vec<GroupAlgebraElement>> {
        corner_basis_for(&self.ambient, &DoubleCosetTable::new(&self.top, &self.gamma)?)
    }

    pub fn embed_invariant(&self, x: &GroupAlgebraElement) -> Result<GroupAlgebraElement> {
        if !is_invariant(x, self.gamma.generators()) {
            return Err(Error::NotInvariant("element is not fixed by Γ".into()));
        }
        x.convolve(&projector(&self.ambient, &self.gamma)?)
    }

    pub fn embed_top(&self, y: &GroupAlgebraElement) -> Result<GroupAlgebraElement> {
        projector(&self.ambient, &self.v0)?.convolve(y)
    }

    fn check_axioms(
        &self,
        basis: &[GroupAlgebraElement],
        source_sub: &PermGroup,
        embed: impl Fn(&GroupAlgebraElement) -> Result<GroupAlgebraElement>,
    ) -> Result<AxiomReport> {
        let images: Vec<_> = basis.iter().map(&embed).collect::<Result<_>>()?;
        let mut report = AxiomReport {
            basis_size: basis.len(),
            multiplicative: true,
            star: true,
            trace: true,
            injective: true,
            unital: embed(&projector(&self.ambient, source_sub)?)? == projector(&self.ambient, &self.small)?,
        };
        let mut gram = Vec::with_capacity(basis.len());
        for (a, ia) in basis.iter().zip(&images) {
            report.star &= embed(&a.star())? == ia.star();
            report.trace &= Self::corner_trace(ia, &self.small) == Self::corner_trace(a, source_sub);
            let mut row = Vec::with_capacity(basis.len());
            for (b, ib) in basis.iter().zip(&images) {
                let ab = a.convolve(b)?;
                report.multiplicative &= embed(&ab)? == ia.convolve(ib)?;
                let before = Self::corner_trace(&a.star().convolve(b)?, source_sub);
                let after = Self::corner_trace(&ia.star().convolve(ib)?, &self.small);
                report.injective &= before == after;
                row.push(after);
            }
            gram.push(row);
        }
        report.injective &= exact_rank(gram) == basis.len();
        Ok(report)
    }

    /// Checks both embeddings on spanning sets and the commutation of the
    /// `G`-invariant image with the top image.
    pub fn check(&self) -> Result<EmbedReport> {
        let inv = self.invariant_basis(&self.gamma)?;
        let invariant = self.check_axioms(&inv, &self.v0, |x| self.embed_invariant(x))?;
        let top_basis = self.top_corner()?;
        let top = self.check_axioms(&top_basis, &self.gamma, |y| self.embed_top(y))?;
        let (commutant_dim, commutation) = self.check_commutation()?;
        Ok(EmbedReport {
            scenario: self.name.clone(),
            ambient_order: self.ambient.order(),
            invariant,
            top,
            commutant_dim,
            commutation,
        })
    }

    /// Returns the dimension of the `G`-invariant corner and whether its
    /// image commutes with the image of `p_Γ C[G] p_Γ`.
    pub fn check_commutation(&self) -> Result<(usize, bool)> {
        let fixed = self.invariant_basis(&self.top)?;
        let xs: Vec<_> = fixed.iter().map(|x| self.embed_invariant(x)).collect::<Result<_>>()?;
        let ys: Vec<_> = self.top_corner()?.iter().map(|y| self.embed_top(y)).collect::<Result<_>>()?;
        for x in &xs {
            for y in &ys {
                if x.convolve(y)? != y.convolve(x)? {
                    return Ok((fixed.len(), false));
                }
            }
        }
        Ok((fixed.len(), true))
    }
}

/// Rank over `Q(i)` by Gaussian elimination.
pub fn exact_rank(mut rows: Vec<Vec<Exact>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = Exact::one() / rows[rank][c].clone();
        let pivot: Vec<Exact> = rows[rank].iter().map(|x| x * &inv).collect();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot) {
                *x = &*x - &f * p;
            }
        }
        rows[rank] = pivot;
        rank += 1;
    }
    rank
}

/// The scenarios exercised by the test suite and the `embed-check` command.
pub fn catalog() -> Result<Vec<WreathScenario>> {
    let s2 = PermGroup::symmetric(2);
    let s3 = PermGroup::symmetric(3);
    let s4 = PermGroup::symmetric(4);
    let d4 = q_group(2, 2)?;
    Ok(alloc::vec![
        WreathScenario::new("s2^2-e^2-s2-s2", &s2, &PermGroup::trivial(2), &s2, &s2)?,
        WreathScenario::new("s4^2-d4^2-s2-s2", &s4, &d4, &s2, &s2)?,
        WreathScenario::new("s2^3-e^3-s3-s3", &s2, &PermGroup::trivial(2), &s3, &s3)?,
        WreathScenario::new("s4^2-d4^2-s2-e", &s4, &d4, &s2, &PermGroup::trivial(2))?,
        WreathScenario::new("s2^2-e^2-e-e", &s2, &PermGroup::trivial(2), &PermGroup::trivial(2), &PermGroup::trivial(2))?,
    ])
}

pub fn scenario(name: &str) -> Result<WreathScenario> {
    catalog()?
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::InvalidTable(alloc::format!("unknown scenario {name}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treefam::{ball_aut_group, TreeShape};

    #[test]
    fn invariant_dimensions() {
        let cat = catalog().unwrap();
        // C[S_2 × S_2] under the swap: orbits {ee}, {ea, ae}, {aa}
        assert_eq!(cat[0].base_corner().unwrap().len(), 4);
        assert_eq!(cat[0].invariant_basis(cat[0].gamma()).unwrap().len(), 3);
        assert_eq!(cat[1].base_corner().unwrap().len(), 4);
        assert_eq!(cat[1].invariant_basis(cat[1].gamma()).unwrap().len(), 3);
        assert_eq!(cat[1].ambient().order(), 1152);
        assert_eq!(cat[0].ambient().order(), 8);
    }

    #[test]
    fn unit_maps_to_unit() {
        let s = &catalog().unwrap()[1];
        let p = projector(s.ambient(), s.v0()).unwrap();
        assert_eq!(s.embed_invariant(&p).unwrap(), projector(s.ambient(), s.small()).unwrap());
        let q = projector(s.ambient(), s.gamma()).unwrap();
        assert_eq!(s.embed_top(&q).unwrap(), projector(s.ambient(), s.small()).unwrap());
    }

    #[test]
    fn every_catalog_scenario_passes() {
        for s in catalog().unwrap() {
            let r = s.check().unwrap();
            assert!(r.holds(), "{r:?}");
        }
    }

    #[test]
    fn trivial_gamma_top_corner_is_group_algebra() {
        let s = scenario("s4^2-d4^2-s2-e").unwrap();
        assert_eq!(s.top_corner().unwrap().len(), 2);
    }

    #[test]
    fn non_invariant_input_is_rejected() {
        let s = &catalog().unwrap()[0];
        let basis = s.base_corner().unwrap();
        let lopsided = basis.iter().find(|x| !is_invariant(x, s.gamma().generators())).unwrap();
        assert!(matches!(s.embed_invariant(lopsided), Err(Error::NotInvariant(_))));
    }

    #[test]
    fn gram_rank() {
        let one = Exact::one();
        let two = Exact::from_int(2);
        assert_eq!(exact_rank(alloc::vec![alloc::vec![one.clone(), two.clone()], alloc::vec![two.clone(), Exact::from_int(4)]]), 1);
        assert_eq!(exact_rank(alloc::vec![alloc::vec![one.clone(), two.clone()], alloc::vec![two, one]]), 2);
    }

    /// With base pair `(S_{2^l}, Q_l)` on `|V_n|` blocks and `Γ = P_n`, the
    /// small group is `P_{n+l}` and the image corner consists of
    /// `P_{n+l}`-bi-invariant functions.
    #[test]
    fn tensor_power_scenario_lands_in_level_hecke_algebra() {
        let shape = TreeShape::regular(2).unwrap();
        for l in 1..=2 {
            let n = 1;
            let base = PermGroup::symmetric(1 << l);
            let top = PermGroup::symmetric(2);
            let s = WreathScenario::new("t", &base, &q_group(2, l).unwrap(), &top, &ball_aut_group(shape, n).unwrap()).unwrap();
            let target = ball_aut_group(shape, n + l).unwrap();
            assert!(s.small().same_group(&target));
            for x in s.invariant_basis(s.gamma()).unwrap() {
                let im = s.embed_invariant(&x).unwrap();
                for h in target.generators() {
                    let dh = GroupAlgebraElement::delta(s.ambient(), h).unwrap();
                    assert_eq!(dh.convolve(&im).unwrap(), im);
                    assert_eq!(im.convolve(&dh).unwrap(), im);
                }
            }
        }
    }
}
