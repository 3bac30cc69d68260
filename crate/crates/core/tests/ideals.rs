use std::collections::BTreeSet;

use kgw_core::dynsys::builders::{identity_system, random_product_system};
use kgw_core::groupoid::build_semidirect;
use kgw_core::groupoid::skeleton::invariant_y_sets;
use kgw_core::ideals::{build_sequence, from_mgds, verify_exactness, IdealTuple};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn subset(mask: u32, n: u32) -> BTreeSet<u32> {
    (0..n).filter(|i| mask >> i & 1 == 1).collect()
}

proptest! {
    #[test]
    fn random_tuples_give_exact_sequences(n in 0u32..=7, masks in prop::collection::vec(any::<u32>(), 1..=4)) {
        let base = subset(u32::MAX, n);
        let ideals = masks.iter().map(|&m| subset(m, n)).collect();
        let t = IdealTuple::new(base, ideals).unwrap();
        let stages = build_sequence(&t);
        prop_assert_eq!(stages.len(), t.len() + 2);
        prop_assert!(verify_exactness(t.base(), &stages).is_ok());
    }
}

#[test]
fn sequence_supports_agree_with_groupoid_y_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let sys = random_product_system(&mut rng, 3);
        let semi = build_semidirect(&sys, &sys.default_bound(3), false).unwrap();
        let from_groupoid =
            invariant_y_sets(semi.groupoid(), &sys.finite_coordinate_sets()).unwrap();
        let supports: Vec<_> = build_sequence(&from_mgds(&sys))
            .into_iter()
            .map(|s| s.support)
            .collect();
        assert_eq!(supports, from_groupoid, "{sys:?}");
    }
}

#[test]
fn every_pair_of_subsets_of_an_isotropy_unit_space() {
    // Every subset is invariant when all arrows are loops, so each pair of
    // subsets is a legitimate input to both constructions.
    let semi = build_semidirect(
        &identity_system(4, 1),
        &kgw_core::shape::Shape::new(vec![1]),
        false,
    )
    .unwrap();
    let mut checked = 0;
    for a in 0..16 {
        for b in 0..16 {
            let sets = vec![subset(a, 4), subset(b, 4)];
            let t = IdealTuple::new(subset(15, 4), sets.clone()).unwrap();
            let supports: Vec<_> = build_sequence(&t).into_iter().map(|s| s.support).collect();
            assert_eq!(supports, invariant_y_sets(semi.groupoid(), &sets).unwrap());
            checked += 1;
        }
    }
    assert_eq!(checked, 256);
}
