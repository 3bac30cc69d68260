use kgw_core::dynsys::builders::{grid_system, identity_system};
use kgw_core::dynsys::Point;
use kgw_core::groupoid::convolution::{convolve, i_norm, involute, pushforward, random_element};
use kgw_core::groupoid::{build_semidirect, FiniteGroupoid};
use kgw_core::shape::Shape;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn grid() -> FiniteGroupoid<Shape> {
    let sys = grid_system(2, 3);
    build_semidirect(&sys, &sys.default_bound(0), false)
        .unwrap()
        .groupoid()
        .clone()
}

fn isotropy() -> FiniteGroupoid<u32> {
    build_semidirect(&identity_system(3, 1), &Shape::new(vec![3]), false)
        .unwrap()
        .groupoid()
        .clone()
}

fn laws<P: Point>(g: &FiniteGroupoid<P>, seed: u64) -> Result<(), TestCaseError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = random_element(&mut rng, g, 6);
    let h = random_element(&mut rng, g, 6);
    let fh = convolve(&f, &h);
    prop_assert!(i_norm(&fh) <= i_norm(&f) * i_norm(&h));
    prop_assert_eq!(involute(&fh), convolve(&involute(&h), &involute(&f)));
    prop_assert_eq!(involute(&involute(&f)), f.clone());
    prop_assert_eq!(i_norm(&involute(&f)), i_norm(&f));
    prop_assert_eq!(
        pushforward(&fh),
        convolve(&pushforward(&f), &pushforward(&h))
    );
    prop_assert!(i_norm(&pushforward(&f)) <= i_norm(&f));
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn grid_algebra_laws(seed in any::<u64>()) {
        laws(&grid(), seed)?;
    }

    #[test]
    fn isotropy_algebra_laws(seed in any::<u64>()) {
        laws(&isotropy(), seed)?;
    }
}
