use std::collections::BTreeMap;

use hecke_core::spheromorph::{AlmostAutomorphism, FinitaryAutomorphism};
use hecke_core::treefam::{ball_aut_group, TreeShape};
use hecke_core::{DoubleCosetTable, PermGroup, Permutation};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn binary() -> TreeShape {
    TreeShape::new(2, 2).unwrap()
}

fn random(shape: TreeShape, rng: &mut ChaCha8Rng) -> AlmostAutomorphism {
    use rand::Rng;
    let expansions = rng.gen_range(0..5);
    AlmostAutomorphism::random(shape, expansions, 2, rng)
}

fn canon(g: &AlmostAutomorphism) -> AlmostAutomorphism {
    g.canonical_form()
}

#[test]
fn group_axioms_on_random_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for shape in [binary(), TreeShape::new(2, 3).unwrap(), TreeShape::new(3, 2).unwrap()] {
        let e = AlmostAutomorphism::identity(shape);
        for _ in 0..1000 / 3 + 1 {
            let (f, g, h) = (random(shape, &mut rng), random(shape, &mut rng), random(shape, &mut rng));
            let left = f.compose(&g).unwrap().compose(&h).unwrap();
            let right = f.compose(&g.compose(&h).unwrap()).unwrap();
            assert_eq!(canon(&left), canon(&right));
            assert_eq!(canon(&f.compose(&e).unwrap()), canon(&f));
            assert_eq!(canon(&e.compose(&f).unwrap()), canon(&f));
            assert!(f.compose(&f.inverse()).unwrap().is_identity());
            assert!(f.inverse().compose(&f).unwrap().is_identity());
        }
    }
}

/// Composition agrees with composing the maps on vertices deep enough to
/// lie below both domain trees.
#[test]
fn composition_acts_on_vertices() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let shape = binary();
    for _ in 0..300 {
        let (g, h) = (random(shape, &mut rng), random(shape, &mut rng));
        let gh = g.compose(&h).unwrap();
        for i in 0..shape.level_size(9) as usize {
            let x = shape.address_at(9, i);
            let via = h.apply(&x).and_then(|y| g.apply(&y));
            if let (Some(a), Some(b)) = (gh.apply(&x), via) {
                assert_eq!(a, b);
            }
        }
    }
}

#[test]
fn canonical_forms_of_equal_elements_coincide() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..300 {
        let g = random(binary(), &mut rng);
        let mut r = g.clone();
        for _ in 0..3 {
            let leaf = r.domain_leaves().nth(1).unwrap().clone();
            let mut deeper = leaf;
            deeper.push(0);
            r.refine(&deeper);
        }
        assert_eq!(r.canonical_form(), g.canonical_form());
        assert!(g.canonical_form().is_canonical());
    }
}

#[test]
fn keys_are_k_bi_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let shape = binary();
    let mut cases = 0;
    for n in 1..=3 {
        let p_n = ball_aut_group(shape, n).unwrap();
        let s_n = PermGroup::symmetric(shape.level_size(n) as usize);
        let table = DoubleCosetTable::new(&s_n, &p_n).unwrap();
        while cases < 500 * n / 3 + 1 {
            let sigma = s_n.random_element(&mut rng);
            let twists = (0..sigma.degree()).map(|_| FinitaryAutomorphism::random(2, 2, &mut rng)).collect();
            let g = AlmostAutomorphism::from_level_data(shape, n, &sigma, twists).unwrap();
            let a = AlmostAutomorphism::random_in_k(shape, n + 2, &mut rng);
            let b = AlmostAutomorphism::random_in_k(shape, n + 2, &mut rng);
            assert!(a.is_in_level_subgroup(0));
            let moved = a.compose(&g).unwrap().compose(&b).unwrap();
            let key = g.double_coset_key_in(n, &table).unwrap();
            assert_eq!(moved.double_coset_key_in(n, &table).unwrap(), key);
            assert_eq!(g.double_coset_key(n).unwrap(), key);
            cases += 1;
        }
    }
    assert!(cases >= 500);
}

#[test]
fn elements_of_k_have_the_identity_key() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..50 {
        let a = AlmostAutomorphism::random_in_k(binary(), 4, &mut rng);
        assert_eq!(a.minimal_level(3).unwrap(), 0);
        for n in 1..=3 {
            assert!(a.double_coset_key(n).unwrap().is_identity());
        }
    }
}

/// At `n = 2` every permutation of `V_2` is realized, and two of them have
/// equal keys exactly when they share a `P_2` double coset.
#[test]
fn keys_are_complete_at_level_two() {
    let shape = binary();
    let p2 = ball_aut_group(shape, 2).unwrap();
    let s4 = PermGroup::symmetric(4);
    let table = DoubleCosetTable::new(&s4, &p2).unwrap();
    let all = s4.elements().unwrap();
    let keys: Vec<Permutation> = all
        .iter()
        .map(|s| AlmostAutomorphism::level_permutation_element(shape, 2, s).unwrap().double_coset_key(2).unwrap())
        .collect();
    for (i, s) in all.iter().enumerate() {
        for (j, t) in all.iter().enumerate() {
            assert_eq!(keys[i] == keys[j], table.entry_of(s) == table.entry_of(t));
        }
        assert_eq!(&keys[i], table.canonical_rep(s).unwrap());
    }
    let distinct: std::collections::BTreeSet<_> = keys.iter().collect();
    assert_eq!(distinct.len(), table.len());
}

#[test]
fn keys_biject_onto_double_cosets_at_level_three() {
    let shape = binary();
    let p3 = ball_aut_group(shape, 3).unwrap();
    let table = DoubleCosetTable::new(&PermGroup::symmetric(8), &p3).unwrap();
    let mut seen = BTreeMap::new();
    for (i, entry) in table.entries().iter().enumerate() {
        let g = AlmostAutomorphism::level_permutation_element(shape, 3, &entry.rep).unwrap();
        let key = g.double_coset_key_in(3, &table).unwrap();
        assert_eq!(key, entry.rep);
        assert!(seen.insert(key, i).is_none());
    }
    assert_eq!(seen.len(), table.len());
}

#[test]
fn level_one_is_trivial_for_the_binary_tree() {
    let s2 = PermGroup::symmetric(2);
    let table = DoubleCosetTable::new(&s2, &ball_aut_group(binary(), 1).unwrap()).unwrap();
    assert_eq!(table.len(), 1);
    for s in s2.elements().unwrap() {
        let g = AlmostAutomorphism::level_permutation_element(binary(), 1, &s).unwrap();
        assert!(g.double_coset_key(1).unwrap().is_identity());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverse_and_canonical_form_commute(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random(binary(), &mut rng);
        prop_assert_eq!(canon(&g.inverse()), canon(&canon(&g).inverse()));
        prop_assert_eq!(canon(&canon(&g)), canon(&g));
    }

    #[test]
    fn minimal_level_is_minimal(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random(binary(), &mut rng);
        if let Ok(n) = g.minimal_level(6) {
            for m in n..=6 {
                prop_assert!(g.is_in_level_subgroup(m));
            }
            if n > 1 {
                prop_assert!(!g.is_in_level_subgroup(n - 1));
            }
        }
    }
}
