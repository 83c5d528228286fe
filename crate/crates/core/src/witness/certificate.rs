use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::hecke::{depth_pair, HeckeAlgebra, HeckeElement};
use crate::scalar::C64;

use super::unitary::SpectralData;

#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances {
    pub unitarity: f64,
    pub moment_margin: f64,
    pub root_scan_order: u32,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            unitarity: 1e-10,
            moment_margin: 1e-6,
            root_scan_order: 360,
        }
    }
}

/// Unitaries `u, v` of `H(S_{d^l}, Q_l)` with the moment and spectral data of
/// `w = u v u* v*`.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessCertificate {
    pub d: usize,
    pub l: usize,
    /// Canonical double-coset representatives as image arrays, in basis order.
    pub basis: Vec<Vec<usize>>,
    pub u: Vec<C64>,
    pub v: Vec<C64>,
    pub spectral: SpectralData,
    /// `τ(w^k)` for `k = 1..=K`.
    pub moments: Vec<C64>,
    pub max_abs_moment: f64,
    pub unitarity_defect_u: f64,
    pub unitarity_defect_v: f64,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub budget: u64,
}

impl WitnessCertificate {
    pub fn k_max(&self) -> usize {
        self.moments.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// The measured quantity the check compares with its tolerance.
    pub value: f64,
    pub detail: String,
}

/// Smallest `|(λ_j/λ_j')^m − 1|` over distinct heavy eigenvalue clusters and
/// `1 ≤ m ≤ M`.
#[derive(Clone, Debug, PartialEq)]
pub struct RootScan {
    pub clusters: usize,
    pub min_distance: f64,
    /// `(j, j', m)` attaining the minimum, indices into the cluster list.
    pub argmin: Option<(usize, usize, u32)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    pub root_scan: Option<RootScan>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }
}

const HEAVY_WEIGHT: f64 = 1e-4;
const CLUSTER_GAP: f64 = 1e-8;
const AGREEMENT: f64 = 1e-8;

fn angle_distance(a: f64, b: f64) -> f64 {
    let t = libm::fmod((a - b).abs(), 2.0 * core::f64::consts::PI);
    t.min(2.0 * core::f64::consts::PI - t)
}

/// Groups numerically equal eigenvalues, then scans ratios of heavy clusters
/// for near roots of unity.
pub fn root_of_unity_scan(spectral: &SpectralData, order: u32) -> RootScan {
    let mut clusters: Vec<(f64, f64)> = Vec::new();
    let mut idx: Vec<usize> = (0..spectral.angles.len()).collect();
    idx.sort_by(|&a, &b| spectral.angles[a].total_cmp(&spectral.angles[b]));
    for j in idx {
        let (t, m) = (spectral.angles[j], spectral.weights[j]);
        match clusters.iter_mut().find(|c| angle_distance(c.0, t) < CLUSTER_GAP) {
            Some(c) => c.1 += m,
            None => clusters.push((t, m)),
        }
    }
    let heavy: Vec<f64> = clusters.iter().filter(|c| c.1 > HEAVY_WEIGHT).map(|c| c.0).collect();
    let mut scan = RootScan {
        clusters: heavy.len(),
        min_distance: f64::INFINITY,
        argmin: None,
    };
    for (j, &a) in heavy.iter().enumerate() {
        for (jj, &b) in heavy.iter().enumerate().skip(j + 1) {
            let ratio = C64::from_polar(1.0, a - b);
            let mut z = C64::new(1.0, 0.0);
            for m in 1..=order {
                z *= ratio;
                let dist = (z - 1.0).norm();
                if dist < scan.min_distance {
                    scan.min_distance = dist;
                    scan.argmin = Some((j, jj, m));
                }
            }
        }
    }
    scan
}

/// Rebuilds the pair from `(d, l)` and verifies `cert` against it.
pub fn verify_certificate(cert: &WitnessCertificate) -> Result<VerifyReport> {
    let alg = depth_pair(cert.d, cert.l)?;
    Ok(verify_certificate_with(cert, &alg))
}

fn check(name: &'static str, passed: bool, value: f64, detail: impl Into<String>) -> Check {
    Check {
        name,
        passed,
        value,
        detail: detail.into(),
    }
}

/// Recomputes everything from the coefficients through `λ` on `ℓ²(H\G)`.
///
/// `alg` must be the pair named by the certificate; the basis-order check
/// guards against a mismatch.
pub fn verify_certificate_with(cert: &WitnessCertificate, alg: &Arc<HeckeAlgebra>) -> VerifyReport {
    let mut checks = Vec::new();
    let basis: Vec<Vec<usize>> = alg.table().entries().iter().map(|e| e.rep.to_vec()).collect();
    let basis_ok = basis == cert.basis;
    checks.push(check("basis-order", basis_ok, 0.0, if basis_ok { "" } else { "representatives differ from the rebuilt table" }));
    if !basis_ok || cert.u.len() != alg.dim() || cert.v.len() != alg.dim() {
        return VerifyReport { checks, root_scan: None };
    }
    let n = alg.index();
    let lam = |c: &[C64]| DMatrix::from_row_slice(n, n, &HeckeElement::new(alg, c.to_vec()).expect("length checked").lambda());
    let lu = lam(&cert.u);
    let lv = lam(&cert.v);
    let eye = DMatrix::<C64>::identity(n, n);
    let tol = cert.tolerances.unitarity;
    for (name, m) in [("unitarity-u", &lu), ("unitarity-v", &lv)] {
        let defect = (m * m.adjoint() - &eye).norm();
        checks.push(check(name, defect <= tol, defect, "‖λ(x)λ(x)* − I‖_F"));
    }

    let lw = &lu * &lv * lu.adjoint() * lv.adjoint();
    let mut y = DVector::from_fn(n, |i, _| C64::new(if i == 0 { 1.0 } else { 0.0 }, 0.0));
    let mut recomputed = Vec::with_capacity(cert.k_max());
    for _ in 0..cert.k_max() {
        y = &lw * y;
        recomputed.push(y[0]);
    }
    let table_diff = recomputed
        .iter()
        .zip(&cert.moments)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    checks.push(check("moment-table", table_diff <= AGREEMENT, table_diff, "max_k |τ(w^k) − table_k|"));
    let max_abs = recomputed.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let bound = 1.0 - cert.tolerances.moment_margin;
    checks.push(check("max-moment-bound", max_abs <= bound && cert.max_abs_moment <= bound, max_abs, "max_k |τ(w^k)| ≤ 1 − δ"));
    let reported = (max_abs - cert.max_abs_moment).abs();
    checks.push(check("max-moment-reported", reported <= AGREEMENT, reported, "recomputed vs reported maximum"));

    let s = &cert.spectral;
    let mass = (s.weights.iter().sum::<f64>() - 1.0).abs();
    checks.push(check("spectral-mass", mass <= AGREEMENT, mass, "|Σ μ_j − 1|"));
    let neg = s.weights.iter().copied().fold(0.0, f64::min);
    checks.push(check("spectral-weights-nonnegative", neg >= -1e-10, neg, "min μ_j"));
    checks.push(check("spectral-modulus", s.modulus_defect <= AGREEMENT, s.modulus_defect, "max ||λ_j| − 1|"));
    let recon = recomputed
        .iter()
        .enumerate()
        .map(|(k, z)| (s.moment(k as i64 + 1) - z).norm())
        .fold(0.0, f64::max);
    checks.push(check("spectral-reconstruction", recon <= AGREEMENT, recon, "max_k |Σ μ_j e^{ikθ_j} − τ(w^k)|"));
    VerifyReport {
        checks,
        root_scan: Some(root_of_unity_scan(s, cert.tolerances.root_scan_order)),
    }
}
