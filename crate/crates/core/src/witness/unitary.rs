use alloc::sync::Arc;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, Schur};

use crate::error::{Error, Result};
use crate::hecke::{HeckeAlgebra, HeckeElement};
use crate::scalar::C64;

const SELF_ADJOINT_TOL: f64 = 1e-12;
const FIT_TOL: f64 = 1e-8;

/// A unitary of the algebra together with its GNS matrix.
#[derive(Clone, Debug)]
pub struct UnitaryElement {
    pub element: HeckeElement<C64>,
    pub gns: DMatrix<C64>,
    /// `‖U U* − I‖_F` for the GNS matrix `U` rebuilt from the coefficients.
    pub defect: f64,
    /// `‖gns(u) − exp(iA)‖_F`.
    pub fit_residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentTable {
    /// `τ(w^k)` for `k = 1..=K`.
    pub values: Vec<C64>,
    /// `max_k |τ(w^{-k}) − conj τ(w^k)|`.
    pub conjugation_defect: f64,
}

impl MomentTable {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Eigenvalue angles of a unitary with the trace weights of their
/// eigenprojections.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralData {
    pub angles: Vec<f64>,
    pub weights: Vec<f64>,
    /// `max_j ||λ_j| − 1|`.
    pub modulus_defect: f64,
}

impl SpectralData {
    /// `Σ_j μ_j e^{ikθ_j}`.
    pub fn moment(&self, k: i64) -> C64 {
        self.angles
            .iter()
            .zip(&self.weights)
            .map(|(&t, &m)| C64::from_polar(m, t * k as f64))
            .sum()
    }
}

fn sqrt_r(alg: &HeckeAlgebra) -> Vec<f64> {
    (0..alg.dim()).map(|d| libm::sqrt(alg.r_index(d) as f64)).collect()
}

/// Left multiplication by `f` in the orthonormal basis `e_D / √R(D)`.
pub fn gns_matrix(f: &HeckeElement<C64>) -> DMatrix<C64> {
    let alg = f.algebra();
    let r = alg.dim();
    let s = sqrt_r(alg);
    let l = f.left_regular();
    DMatrix::from_fn(r, r, |c, b| l[c * r + b] * (s[c] / s[b]))
}

/// Least-squares coefficients of `m` in the span of the basis GNS matrices.
fn fit_in_algebra(alg: &Arc<HeckeAlgebra>, m: &DMatrix<C64>) -> Result<HeckeElement<C64>> {
    let r = alg.dim();
    let basis: Vec<DMatrix<C64>> = (0..r).map(|d| gns_matrix(&HeckeElement::basis(alg, d))).collect();
    let gram = DMatrix::from_fn(r, r, |a, b| basis[a].dotc(&basis[b]));
    let rhs = DVector::from_fn(r, |a, _| basis[a].dotc(m));
    let coeffs = gram
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Spectral("singular Gram matrix of the basis".into()))?;
    HeckeElement::new(alg, coeffs.iter().copied().collect())
}

fn identity_defect(m: &DMatrix<C64>) -> f64 {
    (m * m.adjoint() - DMatrix::identity(m.nrows(), m.ncols())).norm()
}

/// Eigenvalues and eigenvectors of a Hermitian matrix by cyclic Jacobi
/// rotations, accurate to rounding even on degenerate spectra.
pub fn hermitian_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let r = m.nrows();
    let mut a = (m + m.adjoint()).map(|z| z * 0.5);
    let mut v = DMatrix::<C64>::identity(r, r);
    let scale = a.norm().max(f64::MIN_POSITIVE);
    for _ in 0..JACOBI_SWEEPS {
        let off: f64 = (0..r)
            .flat_map(|i| (0..r).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum();
        if libm::sqrt(off) <= 1e-17 * scale {
            break;
        }
        for p in 0..r {
            for q in p + 1..r {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g <= 1e-300 {
                    continue;
                }
                let e = apq / g;
                let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * g);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                let ec = e.conj();
                for k in 0..r {
                    let (kp, kq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = kp * c - kq * ec * s;
                    a[(k, q)] = kp * s + kq * ec * c;
                    let (kp, kq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = kp * c - kq * ec * s;
                    v[(k, q)] = kp * s + kq * ec * c;
                }
                for k in 0..r {
                    let (pk, qk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = pk * c - qk * e * s;
                    a[(q, k)] = pk * s + qk * e * c;
                }
            }
        }
    }
    ((0..r).map(|i| a[(i, i)].re).collect(), v)
}

const JACOBI_SWEEPS: usize = 100;

/// `exp(iM)` for Hermitian `M`.
fn exp_i_hermitian(m: &DMatrix<C64>) -> DMatrix<C64> {
    let (values, v) = hermitian_eigen(m);
    let phases = DMatrix::from_diagonal(&DVector::from_iterator(values.len(), values.iter().map(|&t| C64::from_polar(1.0, t))));
    &v * phases * v.adjoint()
}

/// Self-adjoint element from `dim` real parameters: one per self-inverse
/// double coset, two per pair `{D, D⁻¹}`. The coefficient on `e_D` is the
/// parameter divided by `R(D)`, the operator norm of `e_D`.
pub fn self_adjoint_from_params(alg: &Arc<HeckeAlgebra>, params: &[f64]) -> Result<HeckeElement<C64>> {
    if params.len() != alg.dim() {
        return Err(Error::DomainMismatch {
            expected: alg.dim(),
            found: params.len(),
        });
    }
    let mut coeffs = alloc::vec![C64::new(0.0, 0.0); alg.dim()];
    let mut p = params.iter();
    for d in 0..alg.dim() {
        let inv = alg.inverse_basis(d);
        let scale = alg.r_index(d) as f64;
        if inv == d {
            coeffs[d] = C64::new(*p.next().expect("counted") / scale, 0.0);
        } else if d < inv {
            let z = C64::new(*p.next().expect("counted"), *p.next().expect("counted")) / scale;
            coeffs[d] = z;
            coeffs[inv] = z.conj();
        }
    }
    HeckeElement::new(alg, coeffs)
}

/// `u = exp(i a)`, computed inside the algebra.
pub fn unitary_from_selfadjoint(a: &HeckeElement<C64>) -> Result<UnitaryElement> {
    let skew = a
        .coeffs()
        .iter()
        .zip(a.star().coeffs())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    if skew > SELF_ADJOINT_TOL {
        return Err(Error::NotSelfAdjoint(skew));
    }
    let alg = a.algebra();
    let exp = exp_i_hermitian(&gns_matrix(a));
    let element = fit_in_algebra(alg, &exp)?;
    let gns = gns_matrix(&element);
    let fit_residual = (&gns - &exp).norm();
    if fit_residual > FIT_TOL {
        return Err(Error::AlgebraMembership(fit_residual));
    }
    Ok(UnitaryElement {
        defect: identity_defect(&gns),
        element,
        gns,
        fit_residual,
    })
}

/// `u v u* v*` with its GNS matrix.
pub fn commutator(u: &UnitaryElement, v: &UnitaryElement) -> Result<UnitaryElement> {
    let w = u
        .element
        .convolve(&v.element)?
        .convolve(&u.element.star())?
        .convolve(&v.element.star())?;
    let gns = gns_matrix(&w);
    let direct = &u.gns * &v.gns * u.gns.adjoint() * v.gns.adjoint();
    Ok(UnitaryElement {
        defect: identity_defect(&gns),
        fit_residual: (&gns - direct).norm(),
        element: w,
        gns,
    })
}

/// `τ(w^k)` for `k = 1..=k_max`, read off `⟨W^k b_H, b_H⟩`.
pub fn moments(w: &UnitaryElement, k_max: usize) -> MomentTable {
    let r = w.gns.nrows();
    let adj = w.gns.adjoint();
    let mut fwd = DVector::from_fn(r, |i, _| C64::new(if i == 0 { 1.0 } else { 0.0 }, 0.0));
    let mut back = fwd.clone();
    let mut values = Vec::with_capacity(k_max);
    let mut conjugation_defect: f64 = 0.0;
    for _ in 0..k_max {
        fwd = &w.gns * fwd;
        back = &adj * back;
        values.push(fwd[0]);
        conjugation_defect = conjugation_defect.max((back[0] - fwd[0].conj()).norm());
    }
    MomentTable {
        values,
        conjugation_defect,
    }
}

/// Eigen-decomposition of the unitary `w` through a complex Schur form.
///
/// `w` is normal, so the Schur factor is diagonal and the columns of the
/// unitary factor are eigenvectors; the weight of `λ_j` is `|⟨q_j, b_H⟩|²`.
pub fn spectral_data(w: &UnitaryElement) -> Result<SpectralData> {
    let (q, t) = Schur::try_new(w.gns.clone(), 1e-15, 10_000)
        .ok_or_else(|| Error::Spectral("Schur iteration did not converge".into()))?
        .unpack();
    let r = t.nrows();
    let mut angles = Vec::with_capacity(r);
    let mut weights = Vec::with_capacity(r);
    let mut modulus_defect: f64 = 0.0;
    for j in 0..r {
        let lam = t[(j, j)];
        modulus_defect = modulus_defect.max((lam.norm() - 1.0).abs());
        angles.push(lam.arg());
        weights.push(q[(0, j)].norm_sqr());
    }
    Ok(SpectralData {
        angles,
        weights,
        modulus_defect,
    })
}

/// `|⟨(λ(x) ⊗ λ(x)) δ_H⊗δ_H, δ_H⊗δ_H⟩ − τ(x)²|` with an explicit Kronecker
/// product of `λ`-matrices.
pub fn kronecker_trace_defect(x: &HeckeElement<C64>) -> f64 {
    let n = x.algebra().index();
    let l = DMatrix::from_row_slice(n, n, &x.lambda());
    let k = l.kronecker(&l);
    (k[(0, 0)] - x.trace() * x.trace()).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hecke::depth_pair;
    use core::f64::consts::PI;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn jacobi_on_degenerate_spectrum() {
        let alg = depth_pair(2, 3).unwrap();
        let a = self_adjoint_from_params(&alg, &(0..alg.dim()).map(|i| ((i * 3) as f64).cos()).collect::<Vec<_>>()).unwrap();
        let m = gns_matrix(&a);
        let (values, v) = hermitian_eigen(&m);
        let r = m.nrows();
        assert!((&v * v.adjoint() - DMatrix::<C64>::identity(r, r)).norm() < 1e-13);
        let d = DMatrix::from_diagonal(&DVector::from_iterator(r, values.iter().map(|&x| c(x))));
        assert!((&v * d * v.adjoint() - &m).norm() < 1e-12);
    }

    #[test]
    fn zero_exponentiates_to_unit() {
        let alg = depth_pair(2, 2).unwrap();
        let u = unitary_from_selfadjoint(&HeckeElement::zero(&alg)).unwrap();
        assert!((u.element.coeffs()[0] - c(1.0)).norm() < 1e-14);
        assert!(u.element.coeffs()[1].norm() < 1e-14);
    }

    #[test]
    fn scalar_exponent() {
        let alg = depth_pair(2, 2).unwrap();
        let t = 0.7;
        let a = HeckeElement::<C64>::unit(&alg).scale(&c(t));
        let u = unitary_from_selfadjoint(&a).unwrap();
        assert!((u.element.coeffs()[0] - C64::from_polar(1.0, t)).norm() < 1e-14);
        let m = moments(&u, 5);
        for (k, z) in m.values.iter().enumerate() {
            assert!((z - C64::from_polar(1.0, t * (k + 1) as f64)).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_self_adjoint() {
        let alg = depth_pair(2, 2).unwrap();
        let a = HeckeElement::<C64>::unit(&alg).scale(&C64::new(0.0, 1.0));
        assert!(matches!(unitary_from_selfadjoint(&a), Err(Error::NotSelfAdjoint(_))));
    }

    #[test]
    fn gns_is_a_representation() {
        let alg = depth_pair(2, 3).unwrap();
        let a = self_adjoint_from_params(&alg, &(0..alg.dim()).map(|i| (i as f64).sin()).collect::<Vec<_>>()).unwrap();
        let b = self_adjoint_from_params(&alg, &(0..alg.dim()).map(|i| (i as f64 * 1.3).cos()).collect::<Vec<_>>()).unwrap();
        let ab = gns_matrix(&a.convolve(&b).unwrap());
        assert!((ab - gns_matrix(&a) * gns_matrix(&b)).norm() < 1e-12);
        let m = gns_matrix(&a);
        assert!((&m - m.adjoint()).norm() < 1e-12);
    }

    #[test]
    fn spectral_data_reconstructs_moments() {
        let alg = depth_pair(2, 3).unwrap();
        let params: Vec<f64> = (0..alg.dim()).map(|i| ((i * 7 + 3) as f64).sin()).collect();
        let u = unitary_from_selfadjoint(&self_adjoint_from_params(&alg, &params).unwrap()).unwrap();
        let params: Vec<f64> = (0..alg.dim()).map(|i| ((i * 5 + 1) as f64).cos()).collect();
        let v = unitary_from_selfadjoint(&self_adjoint_from_params(&alg, &params).unwrap()).unwrap();
        let w = commutator(&u, &v).unwrap();
        assert!(w.defect < 1e-10 && w.fit_residual < 1e-10);
        let m = moments(&w, 200);
        let s = spectral_data(&w).unwrap();
        assert!((s.weights.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert!(s.modulus_defect < 1e-10);
        for (k, z) in m.values.iter().enumerate() {
            assert!((s.moment(k as i64 + 1) - z).norm() < 1e-9);
        }
        assert!(m.conjugation_defect < 1e-10);
        assert!(s.angles.iter().all(|t| t.abs() <= PI));
    }

    #[test]
    fn kronecker_square_on_d4_pair() {
        let alg = depth_pair(2, 2).unwrap();
        let x = HeckeElement::new(&alg, alloc::vec![C64::new(0.3, -0.2), C64::new(1.1, 0.4)]).unwrap();
        assert!(kronecker_trace_defect(&x) < 1e-12);
    }
}
