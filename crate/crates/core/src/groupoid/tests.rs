use std::collections::BTreeSet;
use std::sync::Arc;

use rand::SeedableRng;

use super::convolution::*;
use super::skeleton::*;
use super::*;
use crate::dynsys::builders::*;
use crate::kgraph::catalog;
use crate::rational::RationalPath;

fn s(v: &[u32]) -> Shape {
    Shape::new(v.to_vec())
}

fn z(v: &[i64]) -> ZVec {
    ZVec::new(v.to_vec())
}

fn grid_groupoid() -> Semidirect<Shape> {
    let sys = grid_system(2, 4);
    let bound = sys.default_bound(0);
    build_semidirect(&sys, &bound, false).unwrap()
}

#[test]
fn grid_groupoid_is_the_pair_groupoid() {
    let semi = grid_groupoid();
    let g = semi.groupoid();
    assert_eq!(g.len(), 256);
    for a in g.arrows() {
        assert_eq!(a.z, &a.range.to_zvec() - &a.source.to_zvec());
        let w = g.witness(g.index_of(a).unwrap()).unwrap();
        assert!(semi.is_valid_witness(a, w));
    }
    let stats = semi.check_axioms().unwrap();
    assert_eq!(stats.elements, 256);
    assert_eq!(stats.composable_pairs, 16 * 16 * 16);
}

#[test]
fn grid_composition_follows_the_pair_law() {
    let semi = grid_groupoid();
    let g = semi.groupoid();
    let arrow = |x: &Shape, y: &Shape| Arrow {
        range: x.clone(),
        z: &x.to_zvec() - &y.to_zvec(),
        source: y.clone(),
    };
    let (x, y, w) = (s(&[3, 0]), s(&[1, 2]), s(&[0, 3]));
    let i = g.index_of(&arrow(&x, &y)).unwrap();
    let j = g.index_of(&arrow(&y, &w)).unwrap();
    let c = semi.compose_elements(i, j).unwrap();
    assert_eq!(c.arrow, arrow(&x, &w));
    let k = g.index_of(&arrow(&w, &x)).unwrap();
    assert!(matches!(
        semi.compose_elements(i, k),
        Err(AxiomFailure::NotComposable { .. })
    ));
    // γγ⁻¹ is the unit at the range.
    let inv = g.inverse(i).unwrap();
    assert_eq!(g.compose(i, inv).unwrap(), g.unit_index(&x).unwrap());
}

#[test]
fn identity_system_groupoid_is_not_principal() {
    let sys = identity_system(2, 1);
    let semi = build_semidirect(&sys, &s(&[3]), false).unwrap();
    let g = semi.groupoid();
    assert_eq!(g.len(), 2 * 7);
    assert!(g.arrows().iter().all(|a| a.range == a.source));
    for x in 0..2u32 {
        let u = g.unit_index(&x).unwrap();
        assert_eq!(
            g.witness(u),
            Some(&Witness {
                m: s(&[0]),
                n: s(&[0])
            })
        );
    }
}

#[test]
fn forced_free_monoid_build_is_not_closed() {
    let sys = free_monoid_system(&['a', 'b'], 3);
    let bound = sys.default_bound(0);
    assert!(matches!(
        build_semidirect(&sys, &bound, false),
        Err(BuildError::DomainCondition(_))
    ));
    let semi = build_semidirect(&sys, &bound, true).unwrap();
    let g = semi.groupoid();
    let word = |w: &str| Word(w.to_string());
    let gamma = Arrow {
        range: word("a"),
        z: z(&[1, -1]),
        source: word("b"),
    };
    let eta = Arrow {
        range: word("b"),
        z: z(&[1, 0]),
        source: word(""),
    };
    let composite = Arrow {
        range: word("a"),
        z: z(&[2, -1]),
        source: word(""),
    };
    let (i, j) = (g.index_of(&gamma).unwrap(), g.index_of(&eta).unwrap());
    let failures = g.closure_failures();
    assert!(failures.contains(&(i, j, composite.clone())));
    assert!(semi.find_witness(&composite, &s(&[6, 6])).is_none());
    match semi.compose_elements(i, j) {
        Err(AxiomFailure::InvalidWitness {
            composite: c, m, ..
        }) => {
            assert_eq!(c, composite);
            assert_eq!(m, s(&[2, 0]));
        }
        other => panic!("expected an invalid witness, got {other:?}"),
    }
    assert!(semi.check_axioms().is_err());
}

#[test]
fn essential_freeness_examples() {
    check_essentially_free(&grid_system(2, 4), &s(&[3, 3])).unwrap();
    let w = check_essentially_free(&identity_system(2, 1), &s(&[3])).unwrap_err();
    assert_eq!((w.n, w.m, w.x), (s(&[1]), s(&[0]), 0));
    let g = Arc::new(catalog::grid(&s(&[1, 1])));
    let sys = path_space_system(g, &s(&[1, 1]), &[]).unwrap();
    assert_eq!(sys.carrier().len(), 9);
    check_essentially_free(&sys, &s(&[1, 1])).unwrap();
}

#[test]
fn germ_quotient_examples() {
    let semi = grid_groupoid();
    let q = germ_quotient(semi.groupoid());
    assert!(q.is_injective() && q.is_surjective());
    q.check_homomorphism(semi.groupoid()).unwrap();
    q.check_lifting(semi.groupoid()).unwrap();

    let sys = identity_system(2, 1);
    let semi = build_semidirect(&sys, &s(&[3]), false).unwrap();
    let q = germ_quotient(semi.groupoid());
    assert_eq!(q.germs.len(), 2);
    assert!(q.germs.arrows().iter().all(Arrow::is_unit));
    assert!(!q.is_injective() && q.is_surjective());
    q.check_lifting(semi.groupoid()).unwrap();
}

/// Systems used for the injectivity/freeness comparison, with bounds.
fn freeness_fixtures() -> Vec<(String, bool, bool)> {
    fn run<P: Point>(name: &str, sys: &Mgds<P>, bound: &Shape) -> (String, bool, bool) {
        let semi = build_semidirect(sys, bound, false).unwrap();
        let injective = germ_quotient(semi.groupoid()).is_injective();
        let free = check_essentially_free(sys, bound).is_ok();
        // Freeness at twice the bound also controls injectivity.
        assert_eq!(
            free,
            check_essentially_free(sys, &bound.scale(2)).is_ok(),
            "{name}"
        );
        (name.to_string(), injective, free)
    }
    let single = Arc::new(catalog::single_vertex(2));
    let periodic = RationalPath::periodic(&single, single.parse_path("f1.f2").unwrap()).unwrap();
    let cycle = Arc::new(catalog::cycle_rank1());
    let aperiodic_prefix = RationalPath::new(
        &cycle,
        cycle.parse_path("e").unwrap(),
        cycle.parse_path("f.e").unwrap(),
    )
    .unwrap();
    let mut out = vec![
        run("grid", &grid_system(2, 4), &s(&[3, 3])),
        run("identity", &identity_system(2, 1), &s(&[3])),
        run(
            "square",
            &path_space_system(Arc::new(catalog::grid(&s(&[1, 1]))), &s(&[1, 1]), &[]).unwrap(),
            &s(&[1, 1]),
        ),
        run(
            "single vertex",
            &path_space_system(Arc::clone(&single), &s(&[1, 1]), &[periodic]).unwrap(),
            &s(&[2, 2]),
        ),
        run(
            "cycle",
            &path_space_system(Arc::clone(&cycle), &s(&[2]), &[aperiodic_prefix]).unwrap(),
            &s(&[3]),
        ),
    ];
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for k in 0..6 {
        let sys = random_product_system(&mut rng, 2);
        let bound = sys.default_bound(3);
        out.push(run(&format!("product {k}"), &sys, &bound));
    }
    out
}

#[test]
fn germ_map_is_injective_exactly_on_free_systems() {
    let results = freeness_fixtures();
    for (name, injective, free) in &results {
        assert_eq!(injective, free, "{name}");
    }
    assert!(results.iter().any(|r| r.2));
    assert!(results.iter().any(|r| !r.2));
}

fn check_pushforward<P: Point>(rng: &mut impl rand::Rng, g: &FiniteGroupoid<P>) {
    germ_quotient(g).check_lifting(g).unwrap();
    for _ in 0..30 {
        let f = random_element(rng, g, 5);
        let h = random_element(rng, g, 5);
        assert_eq!(
            pushforward(&convolve(&f, &h)),
            convolve(&pushforward(&f), &pushforward(&h))
        );
        assert_eq!(pushforward(&involute(&f)), involute(&pushforward(&f)));
        assert!(i_norm(&pushforward(&f)) <= i_norm(&f));
    }
}

#[test]
fn pushforward_is_a_star_homomorphism() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let identity = build_semidirect(&identity_system(2, 1), &s(&[3]), false).unwrap();
    check_pushforward(&mut rng, identity.groupoid());
    let grid = grid_groupoid();
    check_pushforward(&mut rng, grid.groupoid());
    // On a free system π̃ is a relabelling, so norms agree.
    let f = random_element(&mut rng, grid.groupoid(), 8);
    assert_eq!(i_norm(&pushforward(&f)), i_norm(&f));
}

#[test]
fn grid_skeleton_for_the_empty_set_is_the_whole_groupoid() {
    let semi = grid_groupoid();
    let sk = amenability_skeleton(&semi, &[]).unwrap();
    assert_eq!(sk.points.len(), 16);
    assert_eq!(sk.relation.len(), 256);
    assert_eq!(sk.levels.len(), 1);
    // The only level is N = (), and it already holds every pair.
    assert_eq!(sk.levels[&Shape::zero(0)].len(), 256);
    for j in [vec![0], vec![1], vec![0, 1]] {
        let sk = amenability_skeleton(&semi, &j).unwrap();
        assert!(sk.points.is_empty() && sk.relation.is_empty());
    }
}

#[test]
fn skeleton_on_systems_with_infinite_coordinates() {
    let single = Arc::new(catalog::single_vertex(2));
    let x = RationalPath::periodic(&single, single.parse_path("f1.f2").unwrap()).unwrap();
    let y = RationalPath::new(
        &single,
        single.parse_path("f2").unwrap(),
        single.parse_path("f1.f2.f2").unwrap(),
    )
    .unwrap();
    let sys = path_space_system(Arc::clone(&single), &s(&[1, 1]), &[x, y]).unwrap();
    let semi = build_semidirect(&sys, &s(&[2, 2]), false).unwrap();
    for j in crate::dynsys::subsets(2) {
        let sk = amenability_skeleton(&semi, &j).unwrap();
        assert_eq!(sk.points.len(), sys.xj_partition()[&j].len());
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let mut mixed = 0;
    for _ in 0..8 {
        let sys = random_product_system(&mut rng, 2);
        let semi = build_semidirect(&sys, &sys.default_bound(3), false).unwrap();
        for j in crate::dynsys::subsets(2) {
            let sk = amenability_skeleton(&semi, &j).unwrap();
            if j.len() == 1 && !sk.points.is_empty() {
                mixed += 1;
            }
        }
    }
    assert!(mixed > 0, "no product system had a mixed X_J");
}

#[test]
fn y_sets_for_one_set() {
    let g = FiniteGroupoid::from_arrows(
        vec![0u8, 1, 2],
        0,
        [0u8, 1, 2].map(|x| (Arrow::unit(x, 0), None)).to_vec(),
    );
    let x1: BTreeSet<u8> = [0, 2].into();
    let ys = invariant_y_sets(&g, std::slice::from_ref(&x1)).unwrap();
    assert_eq!(ys, vec![x1, [0, 1, 2].into(), [1].into()]);
    // A non-invariant set is reported with an arrow leaving it.
    let pair = FiniteGroupoid::pair(vec![0u8, 1]);
    let bad = invariant_y_sets(&pair, &[[0u8].into()]).unwrap_err();
    assert_ne!(bad.range, bad.source);
}

#[test]
fn y_sets_match_the_exit_time_description() {
    let single = Arc::new(catalog::single_vertex(2));
    let x = RationalPath::periodic(&single, single.parse_path("f1.f2").unwrap()).unwrap();
    let sys = path_space_system(Arc::clone(&single), &s(&[1, 1]), &[x]).unwrap();
    let semi = build_semidirect(&sys, &s(&[2, 2]), false).unwrap();
    let ys = exit_time_y_sets(&semi).unwrap();
    let times = sys.exit_times();
    let r = 2;
    for (k, y) in ys.iter().enumerate() {
        let expected: BTreeSet<PathPoint> = sys
            .carrier()
            .iter()
            .filter(|p| {
                let t = &times[*p];
                (k + 1..=r).all(|j| t.coord(j - 1).is_finite())
                    && (1..k).all(|j| !t.coord(j - 1).is_finite())
            })
            .cloned()
            .collect();
        assert_eq!(y, &expected, "Y_{k}");
    }
    // Y_0 is the set of finite paths.
    assert!(ys[0].iter().all(|p| matches!(p, PathPoint::Finite(_))));
    assert_eq!(ys[0].len(), 4);
}

#[test]
fn truncated_isotropy_is_outside_not_a_failure() {
    // (x, 3, x)(x, 3, x) = (x, 6, x) needs a witness beyond the bound.
    let semi = build_semidirect(&identity_system(2, 1), &s(&[3]), false).unwrap();
    assert!(semi.groupoid().check_axioms().is_err());
    let stats = semi.check_axioms().unwrap();
    assert_eq!(stats.elements, 14);
    assert!(stats.outside > 0);
    assert_eq!(grid_groupoid().check_axioms().unwrap().outside, 0);
}
