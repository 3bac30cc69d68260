use kgw_core::duality::{TwoSided, ZSpace};
use kgw_core::kgraph::catalog;
use kgw_core::rational::random_rational;
use kgw_core::shape::Shape;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn s(v: &[u32]) -> Shape {
    Shape::new(v.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shifts_commute_and_phi_is_equivariant(seed in any::<u64>(), m in (0u32..=2, 0u32..=2), k in (0u32..=2, 0u32..=2)) {
        let sp = ZSpace::new(catalog::flip());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = sp.random_point(&mut rng, &s(&[3, 3])).unwrap();
        let (m, k) = (s(&[m.0, m.1]), s(&[k.0, k.1]));
        let tv = sp.t_shift(&m, &sp.v_shift(&k, &z).unwrap()).ok();
        let vt = sp.t_shift(&m, &z).ok().map(|t| sp.v_shift(&k, &t).unwrap());
        prop_assert_eq!(tv, vt);
        prop_assert!(sp.check_equivariance(&z, &s(&[2, 2])).is_ok());
        prop_assert_eq!(sp.unphi(&sp.phi(&z).unwrap()).unwrap(), z);
    }

    #[test]
    fn two_sided_shift_is_a_bijection(seed in any::<u64>(), k in 0usize..2) {
        let ts = TwoSided::new(catalog::flip());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = s(&[2, 2]);
        let x = random_rational(ts.graph(), &mut rng, &b, &b, 64).unwrap();
        let y = random_rational(ts.opposite(), &mut rng, &b, &b, 64).unwrap();
        // One vertex, so every pair is a point.
        let p = ts.point(x, y).unwrap();
        prop_assert_eq!(ts.unshift(k, &ts.shift(k, &p).unwrap()).unwrap(), p.clone());
        prop_assert!(ts.check_bisection(k, &p).unwrap());
    }
}
