//! The Hecke algebra `H(G,H)` of a finite pair.
//!
//! Basis element `e_D` is the indicator function of the double coset `D`.
//! It acts on `ℓ²(H\G)` by
//!
//! ```text
//! [λ(f)ξ](Hx) = Σ_{Hy} f(Hxy⁻¹) ξ(Hy)
//! ```
//!
//! so `λ(e_D)` is the zero-one matrix whose `(Hx, Hy)` entry records whether
//! `xy⁻¹ ∈ D`. All of these matrices are read off a single label matrix
//! holding the double coset of `x_i x_j⁻¹` for every pair of coset
//! representatives. Structure constants come from the first column of
//! `λ(e_A)λ(e_B)`, i.e. from `λ(e_A)λ(e_B)δ_H`.
//!
//! The modular factor is trivial only when `R(x) = R(x⁻¹)` for every `x`;
//! construction fails otherwise, so the involution is always `conj(f(x⁻¹))`
//! and the vector state at `δ_H` is a faithful trace.

use alloc::sync::Arc;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::cosets::DoubleCosetTable;
use crate::error::{Error, Result};
use crate::groupalg::{corner_basis_for, FiniteGroup, GroupAlgebraElement};
use crate::permgroup::PermGroup;
use crate::scalar::{Exact, Scalar};
use crate::treefam::{ball_aut_group, q_group, TreeShape};

#[derive(Debug)]
pub struct HeckeAlgebra {
    table: DoubleCosetTable,
    labels: Vec<u32>,
    structure: Vec<u32>,
}

/// Zero-one matrix `λ(e_D)` on `ℓ²(H\G)`, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaMatrix {
    pub dim: usize,
    pub entries: Vec<u8>,
}

impl LambdaMatrix {
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.entries[i * self.dim + j]
    }

    pub fn row_sums(&self) -> Vec<usize> {
        self.entries.chunks(self.dim).map(|r| r.iter().map(|&x| x as usize).sum()).collect()
    }

    pub fn column_sums(&self) -> Vec<usize> {
        (0..self.dim).map(|j| (0..self.dim).map(|i| self.get(i, j) as usize).sum()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut entries = alloc::vec![0u8; self.entries.len()];
        for i in 0..self.dim {
            for j in 0..self.dim {
                entries[j * self.dim + i] = self.get(i, j);
            }
        }
        Self { dim: self.dim, entries }
    }

    pub fn is_identity(&self) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| self.get(i, j) == u8::from(i == j)))
    }

    /// Integer product.
    pub fn product(&self, other: &Self) -> Vec<u32> {
        let n = self.dim;
        let mut out = alloc::vec![0u32; n * n];
        for i in 0..n {
            for t in 0..n {
                if self.get(i, t) == 0 {
                    continue;
                }
                let row = &other.entries[t * n..(t + 1) * n];
                for (o, &x) in out[i * n..(i + 1) * n].iter_mut().zip(row) {
                    *o += x as u32;
                }
            }
        }
        out
    }
}

/// A basis pair whose λ-matrices fail to commute.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutatorWitness {
    pub a: usize,
    pub b: usize,
    /// Entry `(row, col)` of `λ(e_a)λ(e_b) − λ(e_b)λ(e_a)`.
    pub row: usize,
    pub col: usize,
    pub value: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GelfandVerdict {
    pub commutative: bool,
    pub witness: Option<CommutatorWitness>,
}

/// Outcome of comparing `H(G,H)` with `p_H C[G] p_H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CornerCheck {
    pub products: bool,
    pub traces: bool,
    pub stars: bool,
    pub unit: bool,
    /// First basis triple `(a, b, c)` whose product coefficient disagrees.
    pub counterexample: Option<(usize, usize, usize)>,
}

impl CornerCheck {
    pub fn holds(&self) -> bool {
        self.products && self.traces && self.stars && self.unit
    }
}

/// Sizes and verdict of a pair, as listed by the census.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairSummary {
    pub group_order: u128,
    pub subgroup_order: u128,
    pub index: usize,
    pub double_cosets: usize,
    pub verdict: GelfandVerdict,
}

impl HeckeAlgebra {
    pub fn new(group: &PermGroup, subgroup: &PermGroup) -> Result<Arc<Self>> {
        Self::from_table(DoubleCosetTable::new(group, subgroup)?)
    }

    pub fn from_table(table: DoubleCosetTable) -> Result<Arc<Self>> {
        if let Some(d) = table.entries().iter().position(|e| e.r_index != e.r_index_inv) {
            return Err(Error::NotUnimodular(d));
        }
        let n = table.index();
        let reps = table.cosets().reps();
        let inv: Vec<_> = reps.iter().map(|r| r.inverse()).collect();
        let mut labels = Vec::with_capacity(n * n);
        for x in reps {
            for y_inv in &inv {
                let e = table.entry_of(&x.compose(y_inv)).expect("product stays in G");
                labels.push(e as u32);
            }
        }
        let r = table.len();
        let mut structure = alloc::vec![0u32; r * r * r];
        for c in 0..r {
            let row = table.coset_of(&table.entries()[c].rep).expect("rep lies in G");
            for j in 0..n {
                let a = labels[row * n + j] as usize;
                let b = table.entry_of_coset(j);
                structure[(a * r + b) * r + c] += 1;
            }
        }
        Ok(Arc::new(Self {
            table,
            labels,
            structure,
        }))
    }

    pub fn table(&self) -> &DoubleCosetTable {
        &self.table
    }

    /// Number of basis elements (double cosets).
    pub fn dim(&self) -> usize {
        self.table.len()
    }

    /// Dimension of `ℓ²(H\G)`.
    pub fn index(&self) -> usize {
        self.table.index()
    }

    /// Double coset of `x_i x_j⁻¹`.
    #[inline]
    pub fn label(&self, i: usize, j: usize) -> usize {
        self.labels[i * self.index() + j] as usize
    }

    /// Coefficient of `e_c` in `e_a * e_b`.
    #[inline]
    pub fn structure_constant(&self, a: usize, b: usize, c: usize) -> u32 {
        let r = self.dim();
        self.structure[(a * r + b) * r + c]
    }

    pub fn r_index(&self, d: usize) -> usize {
        self.table.entries()[d].r_index
    }

    pub fn inverse_basis(&self, d: usize) -> usize {
        self.table.inverse_entry(d)
    }

    pub fn lambda_basis(&self, d: usize) -> LambdaMatrix {
        LambdaMatrix {
            dim: self.index(),
            entries: self.labels.iter().map(|&l| u8::from(l as usize == d)).collect(),
        }
    }

    /// Commutativity test on basis pairs in basis order, stopping at the
    /// first pair that fails.
    pub fn is_commutative(&self) -> GelfandVerdict {
        let r = self.dim();
        for a in 0..r {
            for b in a + 1..r {
                for c in 0..r {
                    let ab = self.structure_constant(a, b, c) as i64;
                    let ba = self.structure_constant(b, a, c) as i64;
                    if ab != ba {
                        let row = self.table.coset_of(&self.table.entries()[c].rep).expect("rep lies in G");
                        return GelfandVerdict {
                            commutative: false,
                            witness: Some(CommutatorWitness {
                                a,
                                b,
                                row,
                                col: 0,
                                value: ab - ba,
                            }),
                        };
                    }
                }
            }
        }
        GelfandVerdict {
            commutative: true,
            witness: None,
        }
    }

    pub fn summary(&self) -> PairSummary {
        PairSummary {
            group_order: u128::try_from(self.table.group().order()).unwrap_or(u128::MAX),
            subgroup_order: u128::try_from(self.table.subgroup().order()).unwrap_or(u128::MAX),
            index: self.index(),
            double_cosets: self.dim(),
            verdict: self.is_commutative(),
        }
    }

    /// Checks that `e_D ↦ R(D) · p_H δ_{rep_D} p_H` (which equals `1_D / |H|`)
    /// intertwines products, stars, units and traces with the corner of `C[G]`,
    /// where the corner trace is `a ↦ |H| · a(e)`.
    pub fn corner_isomorphism_check(self: &Arc<Self>) -> Result<CornerCheck> {
        let group = FiniteGroup::new(self.table.group())?;
        let corner = corner_basis_for(&group, &self.table)?;
        let images: Vec<GroupAlgebraElement> = corner
            .iter()
            .enumerate()
            .map(|(d, x)| x.scale(&Exact::from_int(self.r_index(d) as i64)))
            .collect();
        let r = self.dim();
        let h_order = self.table.subgroup().order_usize().expect("oracle scale") as i64;
        let mut check = CornerCheck {
            products: true,
            traces: true,
            stars: true,
            unit: images[0] == crate::groupalg::projector(&group, self.table.subgroup())?,
            counterexample: None,
        };
        for a in 0..r {
            for b in 0..r {
                let lhs = images[a].convolve(&images[b])?;
                for c in 0..r {
                    let expected = Exact::from_int(self.structure_constant(a, b, c) as i64);
                    let got = lhs.coeff_at(&self.table.entries()[c].rep) * Exact::from_int(h_order);
                    if got != expected && check.counterexample.is_none() {
                        check.products = false;
                        check.counterexample = Some((a, b, c));
                    }
                }
            }
            let trace = images[a].trace() * Exact::from_int(h_order);
            check.traces &= trace == if a == 0 { Exact::one() } else { Exact::zero() };
            check.stars &= images[a].star() == images[self.inverse_basis(a)];
        }
        Ok(check)
    }
}

/// `(S_{d^l}, Q_l)`.
pub fn depth_pair(d: usize, depth: usize) -> Result<Arc<HeckeAlgebra>> {
    let q = q_group(d, depth)?;
    HeckeAlgebra::new(&PermGroup::symmetric(q.degree()), &q)
}

/// `(S_{|V_n|}, P_n)`, which carries `H(O^{(n)}, K)`.
pub fn ball_pair(shape: TreeShape, n: usize) -> Result<Arc<HeckeAlgebra>> {
    let p = ball_aut_group(shape, n)?;
    HeckeAlgebra::new(&PermGroup::symmetric(p.degree()), &p)
}

/// Element of `H(G,H)` in the double-coset basis.
#[derive(Clone, Debug)]
pub struct HeckeElement<S> {
    algebra: Arc<HeckeAlgebra>,
    coeffs: Vec<S>,
}

impl<S: Scalar> PartialEq for HeckeElement<S> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.algebra, &other.algebra) && self.coeffs == other.coeffs
    }
}

impl<S: Scalar> HeckeElement<S> {
    pub fn new(algebra: &Arc<HeckeAlgebra>, coeffs: Vec<S>) -> Result<Self> {
        if coeffs.len() != algebra.dim() {
            return Err(Error::DomainMismatch {
                expected: algebra.dim(),
                found: coeffs.len(),
            });
        }
        Ok(Self {
            algebra: algebra.clone(),
            coeffs,
        })
    }

    pub fn zero(algebra: &Arc<HeckeAlgebra>) -> Self {
        Self {
            algebra: algebra.clone(),
            coeffs: alloc::vec![S::zero(); algebra.dim()],
        }
    }

    pub fn basis(algebra: &Arc<HeckeAlgebra>, d: usize) -> Self {
        let mut x = Self::zero(algebra);
        x.coeffs[d] = S::one();
        x
    }

    /// `e_H`, the unit.
    pub fn unit(algebra: &Arc<HeckeAlgebra>) -> Self {
        Self::basis(algebra, 0)
    }

    pub fn algebra(&self) -> &Arc<HeckeAlgebra> {
        &self.algebra
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.algebra, &other.algebra) {
            Ok(())
        } else {
            Err(Error::PairMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            algebra: self.algebra.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() + b.clone()).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            algebra: self.algebra.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() - b.clone()).collect(),
        })
    }

    pub fn scale(&self, s: &S) -> Self {
        Self {
            algebra: self.algebra.clone(),
            coeffs: self.coeffs.iter().map(|a| a.clone() * s.clone()).collect(),
        }
    }

    /// Product through the structure constants read off `λ(e_A)λ(e_B)δ_H`.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let alg = &self.algebra;
        let r = alg.dim();
        let mut out = alloc::vec![S::zero(); r];
        for (a, fa) in self.coeffs.iter().enumerate() {
            if fa.is_zero() {
                continue;
            }
            for (b, gb) in other.coeffs.iter().enumerate() {
                if gb.is_zero() {
                    continue;
                }
                let ab = fa.clone() * gb.clone();
                for (c, o) in out.iter_mut().enumerate() {
                    let k = alg.structure_constant(a, b, c);
                    if k != 0 {
                        *o = o.clone() + ab.clone() * S::from_int(k as i64);
                    }
                }
            }
        }
        Ok(Self {
            algebra: self.algebra.clone(),
            coeffs: out,
        })
    }

    /// `f*(x) = conj(f(x⁻¹))`.
    pub fn star(&self) -> Self {
        let coeffs = (0..self.coeffs.len())
            .map(|d| self.coeffs[self.algebra.inverse_basis(d)].conj())
            .collect();
        Self {
            algebra: self.algebra.clone(),
            coeffs,
        }
    }

    /// `⟨λ(f)δ_H, δ_H⟩`, the coefficient of `e_H`.
    pub fn trace(&self) -> S {
        self.coeffs[0].clone()
    }

    /// Dense `λ(f)` on `ℓ²(H\G)`, row-major.
    pub fn lambda(&self) -> Vec<S> {
        self.algebra.labels.iter().map(|&l| self.coeffs[l as usize].clone()).collect()
    }

    /// Matrix of left multiplication by `self` in the basis `{e_D}`:
    /// column `b` holds the coefficients of `self * e_b`.
    pub fn left_regular(&self) -> Vec<S> {
        let r = self.algebra.dim();
        let mut m = alloc::vec![S::zero(); r * r];
        for (a, fa) in self.coeffs.iter().enumerate() {
            if fa.is_zero() {
                continue;
            }
            for b in 0..r {
                for c in 0..r {
                    let k = self.algebra.structure_constant(a, b, c);
                    if k != 0 {
                        m[c * r + b] = m[c * r + b].clone() + fa.clone() * S::from_int(k as i64);
                    }
                }
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Permutation;
    use crate::scalar::{exact_ratio, norm_sqr};
    use num_complex::Complex;
    use num_rational::BigRational;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn s3_s2() -> Arc<HeckeAlgebra> {
        let h = PermGroup::new(3, alloc::vec![Permutation::transposition(3, 0, 1)]).unwrap();
        HeckeAlgebra::new(&PermGroup::symmetric(3), &h).unwrap()
    }

    fn random_exact(alg: &Arc<HeckeAlgebra>, rng: &mut ChaCha8Rng) -> HeckeElement<Exact> {
        let coeffs = (0..alg.dim())
            .map(|_| Complex::new(exact_ratio(rng.gen_range(-4..5), rng.gen_range(1..4)).re, exact_ratio(rng.gen_range(-4..5), rng.gen_range(1..4)).re))
            .collect();
        HeckeElement::new(alg, coeffs).unwrap()
    }

    fn exact_mat_mul(a: &[Exact], b: &[Exact], n: usize) -> Vec<Exact> {
        let mut out = alloc::vec![Exact::zero(); n * n];
        for i in 0..n {
            for t in 0..n {
                if a[i * n + t].is_zero() {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] = &out[i * n + j] + &a[i * n + t] * &b[t * n + j];
                }
            }
        }
        out
    }

    #[test]
    fn unit_acts_as_identity() {
        let alg = depth_pair(2, 2).unwrap();
        assert!(alg.lambda_basis(0).is_identity());
        let f = HeckeElement::<Exact>::basis(&alg, 1);
        assert_eq!(HeckeElement::unit(&alg).convolve(&f).unwrap(), f);
    }

    #[test]
    fn s4_d4_lambda_matrices() {
        let alg = depth_pair(2, 2).unwrap();
        assert_eq!(alg.dim(), 2);
        let big = (0..2).find(|&d| alg.r_index(d) == 2).unwrap();
        let m = alg.lambda_basis(big);
        assert_eq!(m.dim, 3);
        assert!(m.row_sums().iter().all(|&s| s == 2));
        let inv = alg.inverse_basis(big);
        assert!(m.column_sums().iter().all(|&s| s == alg.r_index(inv)));
        assert!(alg.is_commutative().commutative);
    }

    /// Brute-force `λ(e_D)` straight from the action formula on group elements.
    #[test]
    fn lambda_matches_action_formula() {
        let alg = s3_s2();
        let t = alg.table();
        let n = t.index();
        for d in 0..alg.dim() {
            let m = alg.lambda_basis(d);
            for i in 0..n {
                for j in 0..n {
                    let xy = t.cosets().rep(i).compose(&t.cosets().rep(j).inverse());
                    let in_d = t.group().elements().unwrap().iter().any(|g| *g == xy) && t.entry_of(&xy) == Some(d);
                    assert_eq!(m.get(i, j) == 1, in_d);
                }
            }
        }
    }

    #[test]
    fn convolution_matches_lambda_products() {
        for alg in [s3_s2(), depth_pair(2, 2).unwrap(), ball_pair(TreeShape::new(2, 3).unwrap(), 2).unwrap()] {
            let n = alg.index();
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            for _ in 0..5 {
                let f = random_exact(&alg, &mut rng);
                let g = random_exact(&alg, &mut rng);
                let fg = f.convolve(&g).unwrap();
                assert_eq!(fg.lambda(), exact_mat_mul(&f.lambda(), &g.lambda(), n));
                // λ(f*) is the conjugate transpose
                let fs = f.star().lambda();
                let lf = f.lambda();
                for i in 0..n {
                    for j in 0..n {
                        assert_eq!(fs[i * n + j], lf[j * n + i].conj());
                    }
                }
            }
        }
    }

    #[test]
    fn basis_lambda_products_expand_in_basis() {
        let alg = ball_pair(TreeShape::new(2, 3).unwrap(), 2).unwrap();
        let n = alg.index();
        for a in 0..alg.dim() {
            for b in 0..alg.dim() {
                let prod = alg.lambda_basis(a).product(&alg.lambda_basis(b));
                for i in 0..n {
                    for j in 0..n {
                        assert_eq!(prod[i * n + j], alg.structure_constant(a, b, alg.label(i, j)));
                    }
                }
            }
        }
    }

    #[test]
    fn star_and_trace_identities() {
        let alg = depth_pair(2, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        assert_eq!(HeckeElement::<Exact>::unit(&alg).star(), HeckeElement::unit(&alg));
        for d in 0..alg.dim() {
            let e = HeckeElement::<Exact>::basis(&alg, d);
            assert_eq!(e.trace(), if d == 0 { Exact::one() } else { Exact::zero() });
            let n = e.star().convolve(&e).unwrap().trace();
            assert_eq!(n, Exact::from_int(alg.r_index(d) as i64));
        }
        for _ in 0..10 {
            let f = random_exact(&alg, &mut rng);
            assert_eq!(f.star().star(), f);
            let expected: BigRational = f
                .coeffs()
                .iter()
                .enumerate()
                .map(|(d, c)| norm_sqr(c) * BigRational::from_integer((alg.r_index(d) as i64).into()))
                .sum();
            assert_eq!(f.star().convolve(&f).unwrap().trace(), Complex::new(expected, BigRational::zero()));
        }
    }

    #[test]
    fn corner_isomorphism_on_small_pairs() {
        assert!(s3_s2().corner_isomorphism_check().unwrap().holds());
        assert!(depth_pair(2, 2).unwrap().corner_isomorphism_check().unwrap().holds());
        let s4_trivial = HeckeAlgebra::new(&PermGroup::symmetric(4), &PermGroup::trivial(4)).unwrap();
        assert_eq!(s4_trivial.dim(), 24);
        assert!(s4_trivial.corner_isomorphism_check().unwrap().holds());
    }

    #[test]
    fn whole_group_pair_is_one_dimensional() {
        let alg = HeckeAlgebra::new(&PermGroup::symmetric(4), &PermGroup::symmetric(4)).unwrap();
        assert_eq!(alg.dim(), 1);
        assert!(alg.is_commutative().commutative);
    }

    #[test]
    fn ball_pair_with_k_equal_d_is_the_depth_pair() {
        let a = ball_pair(TreeShape::regular(2).unwrap(), 3).unwrap();
        let b = depth_pair(2, 3).unwrap();
        assert_eq!(a.dim(), b.dim());
        assert_eq!(a.table().entries(), b.table().entries());
    }

    #[test]
    fn pair_mismatch_is_reported() {
        let a = depth_pair(2, 2).unwrap();
        let b = depth_pair(2, 2).unwrap();
        let x = HeckeElement::<Exact>::unit(&a);
        let y = HeckeElement::<Exact>::unit(&b);
        assert_eq!(x.convolve(&y).unwrap_err(), Error::PairMismatch);
    }
}
