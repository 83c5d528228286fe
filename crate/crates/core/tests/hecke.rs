use std::sync::{Arc, OnceLock};

use hecke_core::hecke::{depth_pair, HeckeAlgebra, HeckeElement};
use hecke_core::scalar::{exact_int, exact_ratio, norm_sqr, Exact};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn s8_q3() -> &'static Arc<HeckeAlgebra> {
    static PAIR: OnceLock<Arc<HeckeAlgebra>> = OnceLock::new();
    PAIR.get_or_init(|| depth_pair(2, 3).unwrap())
}

fn random_exact(alg: &Arc<HeckeAlgebra>, rng: &mut ChaCha8Rng) -> HeckeElement<Exact> {
    let coeffs = (0..alg.dim())
        .map(|_| {
            if rng.gen_bool(0.4) {
                exact_int(0)
            } else {
                let re = exact_ratio(rng.gen_range(-9..=9), rng.gen_range(1..=5));
                let im = exact_ratio(rng.gen_range(-9..=9), rng.gen_range(1..=5));
                re + im * Exact::i()
            }
        })
        .collect();
    HeckeElement::new(alg, coeffs).unwrap()
}

#[test]
fn s8_q3_table_sizes() {
    let alg = s8_q3();
    let t = alg.table();
    assert_eq!(t.subgroup().order_usize(), Some(128));
    assert_eq!(alg.index(), 315);
    assert_eq!(t.entries().iter().map(|e| e.size).sum::<u128>(), 40320);
    for e in t.entries() {
        assert_eq!(e.size, 128 * e.r_index as u128);
        assert_eq!(e.right_cosets.len(), e.r_index);
    }
}

#[test]
fn s8_q3_is_unimodular() {
    for e in s8_q3().table().entries() {
        assert_eq!(e.r_index, e.r_index_inv, "{:?}", e.rep);
    }
}

/// The star involution sends each double coset to the one containing the
/// inverses of its elements, checked on every right-coset representative.
#[test]
fn s8_q3_star_is_the_inverse_double_coset() {
    let alg = s8_q3();
    let t = alg.table();
    for (d, e) in t.entries().iter().enumerate() {
        let star = alg.inverse_basis(d);
        for &c in &e.right_cosets {
            assert_eq!(t.entry_of(&t.cosets().rep(c).inverse()), Some(star));
        }
        assert_eq!(alg.inverse_basis(star), d);
        assert_eq!(t.entries()[star].r_index, e.r_index);
    }
}

#[test]
fn s8_q3_trace_axioms_on_random_exact_elements() {
    let alg = s8_q3();
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for _ in 0..100 {
        let f = random_exact(alg, &mut rng);
        let g = random_exact(alg, &mut rng);
        assert_eq!(f.convolve(&g).unwrap().trace(), g.convolve(&f).unwrap().trace());
        let ff = f.star().convolve(&f).unwrap().trace();
        let expected: BigRational = f
            .coeffs()
            .iter()
            .enumerate()
            .map(|(d, c)| norm_sqr(c) * BigRational::from_integer((alg.r_index(d) as i64).into()))
            .sum();
        assert!(ff.im.is_zero());
        assert_eq!(ff.re, expected);
        if !f.is_zero() {
            assert!(ff.re.is_positive());
        }
    }
}

#[test]
fn s8_q3_is_not_gelfand() {
    let alg = s8_q3();
    let verdict = alg.is_commutative();
    assert!(!verdict.commutative);
    let w = verdict.witness.unwrap();
    let ab = alg.lambda_basis(w.a).product(&alg.lambda_basis(w.b));
    let ba = alg.lambda_basis(w.b).product(&alg.lambda_basis(w.a));
    let n = alg.index();
    assert_eq!(ab[w.row * n + w.col] as i64 - ba[w.row * n + w.col] as i64, w.value);
    assert_ne!(w.value, 0);
    let (ea, eb) = (HeckeElement::<Exact>::basis(alg, w.a), HeckeElement::<Exact>::basis(alg, w.b));
    assert_ne!(ea.convolve(&eb).unwrap(), eb.convolve(&ea).unwrap());
}

#[test]
fn s4_d4_is_gelfand() {
    let alg = depth_pair(2, 2).unwrap();
    assert_eq!(alg.dim(), 2);
    assert!(alg.is_commutative().commutative);
    assert!(alg.is_commutative().witness.is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn star_is_an_antimultiplicative_involution(seed in any::<u64>()) {
        let alg = s8_q3();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_exact(alg, &mut rng);
        let g = random_exact(alg, &mut rng);
        prop_assert_eq!(f.star().star(), f.clone());
        prop_assert_eq!(f.convolve(&g).unwrap().star(), g.star().convolve(&f.star()).unwrap());
    }
}
