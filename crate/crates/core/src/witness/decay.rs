use alloc::vec::Vec;

use num_traits::Pow;

use crate::scalar::C64;
use crate::treefam::TreeShape;

use super::certificate::WitnessCertificate;

#[derive(Clone, Debug, PartialEq)]
pub struct DecayRow {
    pub n: usize,
    /// `|V_n|`.
    pub exponent: u64,
    /// `τ(w^k)^{|V_n|}` for `k = 1..=K`.
    pub entries: Vec<C64>,
    pub max_abs: f64,
    /// `max_k |τ(w^k)|^n`, the same limit with the exponent `n`.
    pub max_abs_linear: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayTable {
    pub shape: TreeShape,
    pub rows: Vec<DecayRow>,
}

impl DecayTable {
    /// First level whose maximum falls below `threshold`.
    pub fn first_below(&self, threshold: f64) -> Option<usize> {
        self.rows.iter().find(|r| r.max_abs < threshold).map(|r| r.n)
    }

    pub fn is_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| {
            w[0].entries
                .iter()
                .zip(&w[1].entries)
                .all(|(a, b)| a.norm() > 1.0 || b.norm() <= a.norm())
        })
    }
}

/// `τ(w^k)^{|V_n|}` for `0 ≤ n ≤ n_max` and `1 ≤ k ≤ k_max`.
///
/// Tensor powers are never formed: the trace of an `N`-fold tensor power is
/// the `N`-th power of the trace.
pub fn decay_table(cert: &WitnessCertificate, shape: TreeShape, n_max: usize, k_max: usize) -> DecayTable {
    let base: Vec<C64> = cert.moments.iter().take(k_max).copied().collect();
    let rows = (0..=n_max)
        .map(|n| {
            let exponent = shape.level_size(n);
            let entries: Vec<C64> = base.iter().map(|z| Pow::pow(z, exponent)).collect();
            let max_abs = entries.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let max_abs_linear = base.iter().map(|z| libm::pow(z.norm(), n as f64)).fold(0.0, f64::max);
            DecayRow {
                n,
                exponent,
                entries,
                max_abs,
                max_abs_linear,
            }
        })
        .collect();
    DecayTable { shape, rows }
}

/// `c_k = 0.1 (1 − |k|/9)` for `|k| ≤ 8`, listed from `c_{−8}` to `c_8`.
///
/// A scaled Fejér kernel, hence a nonnegative function on the circle with
/// mean `c_0 = 0.1`.
pub fn fejer_test_polynomial() -> Vec<C64> {
    (-8i32..=8).map(|k| C64::new(0.1 * (1.0 - k.abs() as f64 / 9.0), 0.0)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct HaarRow {
    pub n: usize,
    pub value: C64,
    /// `|φ(f(w_n)) − c_0|`.
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HaarReport {
    pub degree: usize,
    pub rows: Vec<HaarRow>,
    /// First `n` with `max_{k ≤ m} |τ(w^k)|^{|V_n|} < 10⁻³ / (2m · max|c_k|)`.
    pub bound_level: Option<usize>,
    pub first_below: Option<usize>,
}

impl HaarReport {
    pub fn is_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].deviation <= w[0].deviation + 1e-15)
    }
}

/// `φ(f(w_n)) = Σ_{|k| ≤ m} c_k τ(w^k)^{|V_n|}` against the Haar value `c_0`.
///
/// `coeffs` lists `c_{−m}, …, c_m`; negative moments are conjugates.
pub fn haar_convergence_check(
    cert: &WitnessCertificate,
    shape: TreeShape,
    coeffs: &[C64],
    n_max: usize,
    threshold: f64,
) -> HaarReport {
    let m = coeffs.len() / 2;
    let c0 = coeffs[m];
    let c_max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut rows = Vec::with_capacity(n_max + 1);
    let mut bound_level = None;
    for n in 0..=n_max {
        let e = shape.level_size(n);
        let mut value = c0;
        let mut heaviest: f64 = 0.0;
        for k in 1..=m {
            let t: C64 = Pow::pow(&cert.moments[k - 1], e);
            heaviest = heaviest.max(t.norm());
            value += coeffs[m + k] * t + coeffs[m - k] * t.conj();
        }
        if bound_level.is_none() && heaviest < threshold / (2.0 * m as f64 * c_max) {
            bound_level = Some(n);
        }
        rows.push(HaarRow {
            n,
            value,
            deviation: (value - c0).norm(),
        });
    }
    let first_below = rows.iter().find(|r| r.deviation < threshold).map(|r| r.n);
    HaarReport {
        degree: m,
        rows,
        bound_level,
        first_below,
    }
}
