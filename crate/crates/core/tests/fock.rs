use kgw_core::fock::{Atom, BasisVector, Fock, Op};
use kgw_core::kgraph::{catalog, KGraph, Path};
use kgw_core::shape::Shape;
use proptest::prelude::*;

fn graph() -> KGraph {
    catalog::flip()
}

fn atom_strategy(paths: Vec<Path>, rank: usize) -> impl Strategy<Value = Atom> {
    let p = paths.clone();
    prop_oneof![
        4 => prop::sample::select(p.clone()).prop_map(Atom::Left),
        4 => prop::sample::select(p.clone()).prop_map(Atom::LeftAdjoint),
        4 => prop::sample::select(p.clone()).prop_map(Atom::Right),
        4 => prop::sample::select(p).prop_map(Atom::RightAdjoint),
        1 => Just(Atom::RangeAt(0)),
        1 => Just(Atom::SourceAt(0)),
        1 => (0..rank).prop_map(Atom::Flat),
        1 => (0..rank).prop_map(|j| Atom::RangeAtFlat(0, j)),
        1 => (0..rank).prop_map(move |j| Atom::ShapeAtLeast(Shape::unit(rank, j))),
        1 => Just(Atom::Identity),
    ]
}

fn op_strategy() -> impl Strategy<Value = Op> {
    let g = graph();
    let paths: Vec<Path> = g
        .paths_up_to(&Shape::new(vec![1, 1]))
        .into_iter()
        .filter(|p| !p.is_vertex())
        .collect();
    let leaf = atom_strategy(paths, g.rank()).prop_map(Op::Atom);
    leaf.prop_recursive(3, 12, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 1..=3).prop_map(Op::Product),
            prop::collection::vec((-2i64..=2, inner), 1..=3).prop_map(Op::Sum),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn adjoint_is_an_involution(op in op_strategy()) {
        prop_assert_eq!(op.adjoint().adjoint(), op);
    }

    #[test]
    fn adjoint_matches_matrix_transpose(op in op_strategy()) {
        let g = graph();
        let fock = Fock::new(&g);
        let basis: Vec<BasisVector> = fock.basis(&Shape::new(vec![1, 2]));
        let adj = op.adjoint();
        for v in &basis {
            let image = fock.apply_basis(&op, v);
            for w in &basis {
                let back = fock.apply_basis(&adj, w);
                prop_assert_eq!(image.coefficient(w), back.coefficient(v));
            }
        }
    }

    #[test]
    fn range_projections_are_idempotent(op in op_strategy().prop_filter("atom", |o| matches!(o, Op::Atom(_)))) {
        let g = graph();
        let fock = Fock::new(&g);
        let p = op.range_projection();
        let pp = Op::Product(vec![p.clone(), p.clone()]);
        for v in fock.basis(&Shape::new(vec![2, 2])) {
            prop_assert_eq!(fock.apply_basis(&pp, &v), fock.apply_basis(&p, &v));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn atoms_are_partial_injections(op in op_strategy().prop_filter("atom", |o| matches!(o, Op::Atom(_)))) {
        let Op::Atom(atom) = op else { unreachable!() };
        let g = graph();
        let fock = Fock::new(&g);
        let mut seen = std::collections::BTreeMap::new();
        for v in fock.basis(&Shape::new(vec![2, 2])) {
            if let Some(w) = fock.apply_atom(&atom, &v) {
                if let Some(prev) = seen.insert(w.clone(), v.clone()) {
                    prop_assert!(false, "{:?} and {:?} both map to {:?}", prev, v, w);
                }
                if atom.is_projection() {
                    prop_assert_eq!(w, v);
                }
            }
        }
    }

    #[test]
    fn double_adjoint_evaluates_identically(op in op_strategy()) {
        let g = graph();
        let fock = Fock::new(&g);
        let twice = op.adjoint().adjoint();
        for v in fock.basis(&Shape::new(vec![1, 2])) {
            prop_assert_eq!(fock.apply_basis(&twice, &v), fock.apply_basis(&op, &v));
        }
    }
}

#[test]
fn left_and_right_colour_sums_fix_the_same_vectors() {
    for g in [
        catalog::flip(),
        catalog::single_vertex(2),
        catalog::grid(&Shape::new(vec![1, 1])),
    ] {
        let fock = Fock::new(&g);
        let basis = fock.basis(&Shape::splat(2, 2));
        for j in 0..g.rank() {
            let edges = g.enumerate(&Shape::unit(g.rank(), j), None, None);
            let left = Op::sum(edges.iter().map(|e| Op::left(e).range_projection()));
            let right = Op::sum(edges.iter().map(|e| Op::right(e).range_projection()));
            for v in &basis {
                let l = fock.apply_basis(&left, v);
                assert_eq!(l, fock.apply_basis(&right, v));
                assert!(l.is_zero() || l.coefficient(v) == 1);
            }
        }
    }
}
