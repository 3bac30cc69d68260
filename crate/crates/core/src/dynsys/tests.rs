use std::sync::Arc;

use super::builders::*;
use super::*;
use crate::kgraph::catalog;
use crate::rational::RationalPath;

fn s(v: &[u32]) -> Shape {
    Shape::new(v.to_vec())
}

fn ext(text: &str) -> ExtShape {
    text.parse().unwrap()
}

#[test]
fn partial_map_composition_domain() {
    let halve = PartialMap::rule(|x: &u32| x.is_multiple_of(2).then_some(x / 2));
    let dec = PartialMap::rule(|x: &u32| x.checked_sub(1));
    let both = halve.after(&dec);
    for x in 0..20u32 {
        let expected = if x >= 1 && (x - 1) % 2 == 0 {
            Some((x - 1) / 2)
        } else {
            None
        };
        assert_eq!(both.get(&x), expected);
    }
    assert!(matches!(
        halve.apply(&3),
        Err(DynError::OutsideDomain { .. })
    ));
    assert_eq!(halve.apply(&4), Ok(2));
}

#[test]
fn grid_powers() {
    let sys = grid_system(2, 4);
    assert_eq!(sys.carrier().len(), 16);
    assert_eq!(sys.power_apply(&s(&[2, 1]), &s(&[3, 2])), Some(s(&[1, 1])));
    assert_eq!(sys.power_apply(&s(&[0, 3]), &s(&[3, 2])), None);
    for x in sys.carrier() {
        assert_eq!(sys.power_apply(&s(&[0, 0]), x).as_ref(), Some(x));
    }
    // T^{n+m} = T^n ∘ T^m as partial maps.
    for n in s(&[2, 2]).below() {
        for m in s(&[2, 2]).below() {
            let composed = sys.power(&n).after(&sys.power(&m));
            let direct = sys.power(&(&n + &m));
            for x in sys.carrier() {
                assert_eq!(composed.get(x), direct.get(x));
            }
        }
    }
}

#[test]
fn free_monoid_translations() {
    let sys = free_monoid_system(&['a', 'b', 'c'], 3);
    assert_eq!(
        sys.power_apply(&s(&[1, 1]), &Word("abc".into())),
        Some(Word("b".into()))
    );
    assert_eq!(free_monoid_system(&['a', 'b'], 3).carrier().len(), 15);
}

#[test]
fn free_monoid_violates_dc_at_a() {
    let sys = free_monoid_system(&['a', 'b'], 3);
    sys.check_commuting().unwrap();
    let bound = sys.default_bound(0);
    assert_eq!(bound, s(&[3, 3]));
    let w = sys.check_dc(&bound).unwrap_err();
    assert_eq!(w.n, s(&[1, 0]));
    assert_eq!(w.m, s(&[0, 1]));
    assert_eq!(w.x, Word("a".into()));
}

#[test]
fn grid_satisfies_dc_and_the_power_domain_law() {
    for side in 1..=4 {
        let sys = grid_system(2, side);
        sys.check_commuting().unwrap();
        sys.check_dc(&s(&[side, side])).unwrap();
        sys.check_power_domains(&s(&[side, side])).unwrap();
    }
}

#[test]
fn grid_exit_times() {
    let sys = grid_system(2, 4);
    assert_eq!(sys.exit_time(&s(&[2, 3])).unwrap(), ext("2,3"));
    let shifted = sys.power_apply(&s(&[1, 0]), &s(&[2, 3])).unwrap();
    assert_eq!(sys.exit_time(&shifted).unwrap(), ext("1,3"));
    assert!(matches!(
        sys.exit_time(&s(&[9, 9])),
        Err(DynError::NotInCarrier { .. })
    ));
    // σ(T^n x) = σ(x) − n wherever T^n x is defined.
    for x in sys.carrier() {
        for n in s(&[3, 3]).below() {
            if let Some(y) = sys.power_apply(&n, x) {
                let lhs = sys.exit_time(&y).unwrap();
                let rhs = sys.exit_time(x).unwrap().checked_sub(&n).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }
}

#[test]
fn grid_partition_is_trivial() {
    let sys = grid_system(2, 3);
    let parts = sys.xj_partition();
    assert_eq!(parts.len(), 4);
    assert_eq!(parts[&vec![]].len(), 9);
    assert!(parts
        .iter()
        .filter(|(j, _)| !j.is_empty())
        .all(|(_, p)| p.is_empty()));
}

#[test]
fn identity_system_has_infinite_exit_times() {
    let sys = identity_system(2, 1);
    assert_eq!(sys.exit_time(&0).unwrap(), ext("inf"));
    assert_eq!(sys.xj_partition()[&vec![0]].len(), 2);
    assert_eq!(sys.default_bound(3), s(&[3]));
}

#[test]
fn path_space_matches_factorization() {
    let g = Arc::new(catalog::grid(&s(&[1, 1])));
    let sys = path_space_system(Arc::clone(&g), &s(&[1, 1]), &[]).unwrap();
    assert_eq!(sys.carrier().len(), 9);
    sys.check_commuting().unwrap();
    sys.check_dc(&s(&[1, 1])).unwrap();
    for x in sys.carrier() {
        let PathPoint::Finite(p) = x else {
            unreachable!()
        };
        assert_eq!(sys.exit_time(x).unwrap(), p.shape().to_extended());
        for j in 0..2 {
            let e = Shape::unit(2, j);
            let expected = g.factorize(p, &e).ok().map(|(_, t)| PathPoint::Finite(t));
            assert_eq!(sys.generator(j).get(x), expected);
        }
    }
}

#[test]
fn path_space_with_rational_stand_ins() {
    let g = Arc::new(catalog::single_vertex(2));
    let cycle = g.parse_path("f1.f2").unwrap();
    let x = RationalPath::periodic(&g, cycle).unwrap();
    let sys = path_space_system(Arc::clone(&g), &s(&[2, 2]), &[x]).unwrap();
    sys.check_commuting().unwrap();
    sys.check_dc(&s(&[2, 2])).unwrap();
    let parts = sys.xj_partition();
    let infinite: Vec<_> = sys
        .carrier()
        .iter()
        .filter(|p| matches!(p, PathPoint::Infinite(_)))
        .cloned()
        .collect();
    assert!(!infinite.is_empty());
    assert_eq!(parts[&vec![0, 1]], infinite);
    assert_eq!(parts[&vec![]].len(), 9);
}

#[test]
fn boundary_of_a_source_free_graph_is_infinite_only() {
    let g = Arc::new(catalog::cycle_rank1());
    let loop_g = g.parse_path("g").unwrap();
    let x = RationalPath::periodic(&g, loop_g).unwrap();
    let ef = g.parse_path("e.f").unwrap();
    let y = RationalPath::periodic(&g, ef).unwrap();
    let sys = boundary_subsystem(Arc::clone(&g), &s(&[3]), &[x, y]).unwrap();
    assert!(!sys.carrier().is_empty());
    assert!(sys
        .carrier()
        .iter()
        .all(|p| matches!(p, PathPoint::Infinite(_))));
    // With sources, finite boundary paths appear.
    let grid = Arc::new(catalog::grid(&s(&[1, 1])));
    let b = boundary_subsystem(grid, &s(&[1, 1]), &[]).unwrap();
    assert!(b.carrier().iter().all(|p| match p {
        PathPoint::Finite(p) => p.shape() == &s(&[1, 1]) || p.source() == 3,
        PathPoint::Infinite(_) => false,
    }));
}

#[test]
fn product_systems_commute_and_satisfy_dc() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let sys = random_product_system(&mut rng, 3);
        sys.check_commuting().unwrap();
        let bound = sys.default_bound(4);
        sys.check_dc(&bound).unwrap();
        sys.check_power_domains(&bound.meet(&s(&[3, 3, 3])))
            .unwrap();
        let parts = sys.xj_partition();
        assert_eq!(
            parts.values().map(Vec::len).sum::<usize>(),
            sys.carrier().len()
        );
    }
}

#[test]
fn closure_respects_depth() {
    let sys = grid_system(1, 5);
    let seeds = [s(&[4])];
    let gens = [sys.generator(0).clone()];
    assert_eq!(closure_under(&gens, &seeds, 2).len(), 3);
    assert_eq!(sys.closure(&seeds).len(), 5);
}
