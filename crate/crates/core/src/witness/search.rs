use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hecke::HeckeAlgebra;
use crate::permgroup::PermGroup;
use crate::treefam::q_group;

use super::certificate::{Tolerances, WitnessCertificate};
use super::unitary::{commutator, moments, self_adjoint_from_params, spectral_data, unitary_from_selfadjoint};

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub seed: u64,
    /// Number of candidate evaluations allowed.
    pub budget: u64,
    /// Moments scored during the search.
    pub horizon: usize,
    /// Moments recorded in the certificate.
    pub k_max: usize,
    pub tolerances: Tolerances,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            budget: 2_000,
            horizon: 64,
            k_max: 1024,
            tolerances: Tolerances::default(),
        }
    }
}

const SWEEPS: usize = 6;
const INITIAL_STEP: f64 = 0.25;
const SPREAD: f64 = 1.5;

struct Evaluator<'a> {
    alg: &'a Arc<HeckeAlgebra>,
    horizon: usize,
    used: u64,
    budget: u64,
}

impl Evaluator<'_> {
    fn exhausted(&self) -> bool {
        self.used >= self.budget
    }

    fn score(&mut self, a: &[f64], b: &[f64]) -> f64 {
        self.used += 1;
        let run = || -> Result<f64> {
            let u = unitary_from_selfadjoint(&self_adjoint_from_params(self.alg, a)?)?;
            let v = unitary_from_selfadjoint(&self_adjoint_from_params(self.alg, b)?)?;
            Ok(moments(&commutator(&u, &v)?, self.horizon).max_abs())
        };
        run().unwrap_or(f64::INFINITY)
    }
}

fn build(alg: &Arc<HeckeAlgebra>, a: &[f64], b: &[f64], config: &SearchConfig) -> Result<WitnessCertificate> {
    let u = unitary_from_selfadjoint(&self_adjoint_from_params(alg, a)?)?;
    let v = unitary_from_selfadjoint(&self_adjoint_from_params(alg, b)?)?;
    let w = commutator(&u, &v)?;
    let table = moments(&w, config.k_max);
    let (tree_d, depth) = depth_parameters(alg)?;
    Ok(WitnessCertificate {
        d: tree_d,
        l: depth,
        basis: alg.table().entries().iter().map(|e| e.rep.to_vec()).collect(),
        u: u.element.coeffs().to_vec(),
        v: v.element.coeffs().to_vec(),
        spectral: spectral_data(&w)?,
        max_abs_moment: table.max_abs(),
        moments: table.values,
        unitarity_defect_u: u.defect,
        unitarity_defect_v: v.defect,
        tolerances: config.tolerances.clone(),
        seed: config.seed,
        budget: config.budget,
    })
}

/// The `(d, l)` with `(G, H) = (S_{d^l}, Q_l)`.
fn depth_parameters(alg: &HeckeAlgebra) -> Result<(usize, usize)> {
    let m = alg.table().group().degree();
    for d in 2..=m {
        let mut power = d;
        let mut l = 1;
        while power < m {
            power *= d;
            l += 1;
        }
        if power == m && q_group(d, l)?.same_group(alg.table().subgroup()) && alg.table().group().same_group(&PermGroup::symmetric(m)) {
            return Ok((d, l));
        }
    }
    Err(Error::InvalidTable("witness search needs a pair (S_{d^l}, Q_l)".into()))
}

/// Seeded random search for unitaries with `max_{k ≤ K} |τ((uvu*v*)^k)| ≤ 1 − δ`.
///
/// Each candidate draws two self-adjoint elements, exponentiates them, and
/// runs a coordinate descent on the largest of the first `horizon` moments.
/// The first candidate that certifies on all `k_max` moments is returned.
pub fn search_witness(alg: &Arc<HeckeAlgebra>, config: &SearchConfig) -> Result<WitnessCertificate> {
    if alg.is_commutative().commutative {
        return Err(Error::CommutativePair);
    }
    depth_parameters(alg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut eval = Evaluator {
        alg,
        horizon: config.horizon,
        used: 0,
        budget: config.budget,
    };
    let r = alg.dim();
    let bound = 1.0 - config.tolerances.moment_margin;
    let mut best = f64::INFINITY;
    while !eval.exhausted() {
        let mut p: Vec<f64> = (0..2 * r).map(|_| rng.gen_range(-SPREAD..SPREAD)).collect();
        let mut score = eval.score(&p[..r], &p[r..]);
        let mut step = INITIAL_STEP;
        'sweeps: for _ in 0..SWEEPS {
            let mut improved = false;
            for i in 0..p.len() {
                for sign in [1.0, -1.0] {
                    if eval.exhausted() {
                        break 'sweeps;
                    }
                    p[i] += sign * step;
                    let s = eval.score(&p[..r], &p[r..]);
                    if s < score {
                        score = s;
                        improved = true;
                        break;
                    }
                    p[i] -= sign * step;
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        best = best.min(score);
        if score > bound {
            continue;
        }
        let cert = build(alg, &p[..r], &p[r..], config)?;
        let tol = config.tolerances.unitarity;
        if cert.max_abs_moment <= bound && cert.unitarity_defect_u <= tol && cert.unitarity_defect_v <= tol {
            return Ok(cert);
        }
        best = best.min(cert.max_abs_moment);
    }
    Err(Error::SearchFailed { best })
}
