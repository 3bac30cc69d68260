//! Fixed-set algebras of diagonal words in the creation operators, on a
//! truncated Fock basis.
//!
//! A word in `L_e, L_e*, R_e, R_e*` (edges `e`) sends each basis vector to a
//! basis vector or to zero. When it fixes or kills every truncated basis
//! vector it acts as a diagonal projection, and its fixed set is recorded.
//! The Boolean algebra these sets generate is compared with the one
//! generated by the range projections `L_λL_λ*` and `R_λR_λ*` alone.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::fock::{Atom, BasisVector, Fock, Op};
use crate::kgraph::{KGraph, Path};
use crate::shape::Shape;

/// A subset of the truncated basis, by index.
pub type BasisSet = BTreeSet<usize>;

/// A Boolean algebra of subsets of a finite set, stored through its atoms.
#[derive(Clone, Debug)]
pub struct BooleanAlgebra {
    atoms: Vec<BasisSet>,
    atom_of: Vec<usize>,
}

impl BooleanAlgebra {
    /// The algebra generated by `sets` on `{0, …, size−1}`.
    pub fn generated_by<'a>(size: usize, sets: impl IntoIterator<Item = &'a BasisSet>) -> Self {
        let sets: Vec<&BasisSet> = sets.into_iter().collect();
        let mut by_signature: HashMap<Vec<bool>, usize> = HashMap::new();
        let mut atoms: Vec<BasisSet> = Vec::new();
        let mut atom_of = Vec::with_capacity(size);
        for i in 0..size {
            let signature: Vec<bool> = sets.iter().map(|s| s.contains(&i)).collect();
            let next = atoms.len();
            let k = *by_signature.entry(signature).or_insert(next);
            if k == next {
                atoms.push(BasisSet::new());
            }
            atoms[k].insert(i);
            atom_of.push(k);
        }
        BooleanAlgebra { atoms, atom_of }
    }

    pub fn atoms(&self) -> &[BasisSet] {
        &self.atoms
    }

    /// Whether `set` is a union of atoms.
    pub fn contains(&self, set: &BasisSet) -> bool {
        set.iter()
            .all(|&i| self.atoms[self.atom_of[i]].is_subset(set))
    }

    /// Two elements in the same atom that `set` separates, if any.
    pub fn separation_witness(&self, set: &BasisSet) -> Option<(usize, usize)> {
        set.iter().find_map(|&i| {
            self.atoms[self.atom_of[i]]
                .iter()
                .find(|j| !set.contains(j))
                .map(|&j| (i, j))
        })
    }

    /// Whether every element of `other` belongs to this algebra.
    pub fn includes(&self, other: &BooleanAlgebra) -> bool {
        other.atoms.iter().all(|a| self.contains(a))
    }
}

/// Everything computed for one graph, word length and shape bound.
#[derive(Clone, Debug)]
pub struct DiagonalAlgebra {
    pub basis: Vec<BasisVector>,
    pub word_len: usize,
    /// Distinct actions on the truncated basis reached by words of length
    /// `≤ word_len` (the zero action excluded).
    pub distinct_words: usize,
    /// Distinct fixed sets of the diagonal words, each with a shortest word
    /// producing it (generators listed right to left, as applied).
    pub fixed_sets: BTreeMap<BasisSet, Vec<Atom>>,
    pub full: BooleanAlgebra,
    pub range_len: u32,
    /// The algebra generated by `L_λL_λ*` and `R_λR_λ*` for `|λ| ≤ range_len`.
    pub left_right: BooleanAlgebra,
}

type State = Vec<Option<u32>>;

struct Interner {
    ids: HashMap<BasisVector, u32>,
    values: Vec<BasisVector>,
}

impl Interner {
    fn id(&mut self, v: BasisVector) -> u32 {
        if let Some(&k) = self.ids.get(&v) {
            return k;
        }
        let k = self.values.len() as u32;
        self.ids.insert(v.clone(), k);
        self.values.push(v);
        k
    }
}

impl DiagonalAlgebra {
    pub fn compute(g: &KGraph, word_len: usize, range_len: u32, bound: &Shape) -> Self {
        let fock = Fock::new(g);
        let basis = fock.basis(bound);
        let mut interner = Interner {
            ids: HashMap::new(),
            values: Vec::new(),
        };
        for v in &basis {
            interner.id(v.clone());
        }
        let generators: Vec<Atom> = (0..g.edges().len())
            .flat_map(|e| {
                let p = g.edge_path(e);
                [
                    Atom::Left(p.clone()),
                    Atom::LeftAdjoint(p.clone()),
                    Atom::Right(p.clone()),
                    Atom::RightAdjoint(p),
                ]
            })
            .collect();
        let mut step_cache: HashMap<(usize, u32), Option<u32>> = HashMap::new();
        let mut step = |gen: usize, v: u32, interner: &mut Interner| -> Option<u32> {
            if let Some(&r) = step_cache.get(&(gen, v)) {
                return r;
            }
            let image = fock.apply_atom(&generators[gen], &interner.values[v as usize].clone());
            let r = image.map(|w| interner.id(w));
            step_cache.insert((gen, v), r);
            r
        };

        let identity: State = (0..basis.len() as u32).map(Some).collect();
        let mut seen: HashMap<State, Vec<usize>> = HashMap::from([(identity.clone(), Vec::new())]);
        let mut frontier = vec![identity];
        for _ in 0..word_len {
            let mut next = Vec::new();
            for state in &frontier {
                for gen in 0..generators.len() {
                    let image: State = state
                        .iter()
                        .map(|v| v.and_then(|v| step(gen, v, &mut interner)))
                        .collect();
                    if image.iter().all(Option::is_none) {
                        continue;
                    }
                    if !seen.contains_key(&image) {
                        let mut word = seen[state].clone();
                        word.push(gen);
                        seen.insert(image.clone(), word);
                        next.push(image);
                    }
                }
            }
            frontier = next;
        }

        let mut fixed_sets: BTreeMap<BasisSet, Vec<Atom>> = BTreeMap::new();
        for (state, word) in &seen {
            if !state
                .iter()
                .enumerate()
                .all(|(i, v)| v.is_none_or(|v| v as usize == i))
            {
                continue;
            }
            let set: BasisSet = state
                .iter()
                .enumerate()
                .filter(|(_, v)| v.is_some())
                .map(|(i, _)| i)
                .collect();
            let word: Vec<Atom> = word.iter().map(|&k| generators[k].clone()).collect();
            match fixed_sets.get(&set) {
                Some(w) if w.len() <= word.len() => {}
                _ => {
                    fixed_sets.insert(set, word);
                }
            }
        }
        let full = BooleanAlgebra::generated_by(basis.len(), fixed_sets.keys());

        let left_right = range_algebra(&fock, &basis, range_len);

        DiagonalAlgebra {
            basis,
            word_len,
            distinct_words: seen.len(),
            fixed_sets,
            full,
            range_len,
            left_right,
        }
    }

    pub fn fixed_set(&self, g: &KGraph, op: &Op) -> BasisSet {
        fixed_set(&Fock::new(g), &self.basis, op)
    }
}

/// The algebra generated by the range projections of paths of total length
/// at most `max_len`, vertices included.
pub fn range_algebra(fock: &Fock<'_>, basis: &[BasisVector], max_len: u32) -> BooleanAlgebra {
    let g = fock.graph();
    let ranges: Vec<BasisSet> = g
        .paths_up_to(&Shape::splat(g.rank(), max_len))
        .into_iter()
        .filter(|p| p.shape().total() <= max_len)
        .flat_map(|p| {
            [
                Op::left(&p).range_projection(),
                Op::right(&p).range_projection(),
            ]
        })
        .map(|op| fixed_set(fock, basis, &op))
        .collect();
    BooleanAlgebra::generated_by(basis.len(), &ranges)
}

/// The least `m ≤ max_len` such that `set` lies in [`range_algebra`] at `m`.
pub fn min_range_len(
    fock: &Fock<'_>,
    basis: &[BasisVector],
    set: &BasisSet,
    max_len: u32,
) -> Option<u32> {
    (0..=max_len).find(|&m| range_algebra(fock, basis, m).contains(set))
}

/// A family of projections indexed by pairs of single edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProjectionFamily {
    /// [`twisted_projection`] for edges of colour `j`.
    Twisted(usize),
    /// [`swapped_projection`] with `λ` of the first colour and `μ` of the
    /// second.
    Swapped(usize, usize),
}

impl ProjectionFamily {
    fn colours(self) -> (usize, usize) {
        match self {
            ProjectionFamily::Twisted(j) => (j, j),
            ProjectionFamily::Swapped(a, b) => (a, b),
        }
    }

    fn op(self, lambda: &Path, mu: &Path) -> Op {
        match self {
            ProjectionFamily::Twisted(j) => twisted_projection(j, lambda, mu),
            ProjectionFamily::Swapped(..) => swapped_projection(lambda, mu),
        }
    }
}

/// For each cube bound `(b, …, b)` with `b ≤ max_bound`, the least range
/// length capturing every projection of the family. A length that keeps
/// growing with the bound means the projections are not generated by range
/// projections of any fixed length.
pub fn range_len_growth(
    g: &KGraph,
    family: ProjectionFamily,
    max_bound: u32,
) -> Vec<(u32, Option<u32>)> {
    let fock = Fock::new(g);
    let (a, b) = family.colours();
    let lambdas = g.enumerate(&Shape::unit(g.rank(), a), None, None);
    let mus = g.enumerate(&Shape::unit(g.rank(), b), None, None);
    (1..=max_bound)
        .map(|bound| {
            let basis = fock.basis(&Shape::splat(g.rank(), bound));
            let cap = g.rank() as u32 * bound;
            let need = lambdas
                .iter()
                .flat_map(|l| mus.iter().map(move |m| (l, m)))
                .map(|(l, m)| {
                    let set = fixed_set(&fock, &basis, &family.op(l, m));
                    min_range_len(&fock, &basis, &set, cap)
                })
                .try_fold(0, |acc, m| m.map(|m| acc.max(m)));
            (bound, need)
        })
        .collect()
}

/// For each `N ≤ max_n`, the least range length whose algebra includes the
/// full diagonal algebra at word length `word_len` on the truncation at
/// `(N, …, N)`.
pub fn full_algebra_growth(g: &KGraph, word_len: usize, max_n: u32) -> Vec<(u32, Option<u32>)> {
    let fock = Fock::new(g);
    (1..=max_n)
        .map(|n| {
            let alg = DiagonalAlgebra::compute(g, word_len, 0, &Shape::splat(g.rank(), n));
            let cap = g.rank() as u32 * n;
            let need = (0..=cap).find(|&m| range_algebra(&fock, &alg.basis, m).includes(&alg.full));
            (n, need)
        })
        .collect()
}

/// The basis vectors an operator fixes.
pub fn fixed_set(fock: &Fock<'_>, basis: &[BasisVector], op: &Op) -> BasisSet {
    basis
        .iter()
        .enumerate()
        .filter(|(_, v)| fock.apply_basis(op, v).coefficient(v) == 1)
        .map(|(i, _)| i)
        .collect()
}

/// `P^j L_λ* R_μ R_μ* L_λ P^j` for `σ(λ) = σ(μ) = e_j`.
pub fn twisted_projection(j: usize, lambda: &Path, mu: &Path) -> Op {
    let flat = Op::Atom(Atom::Flat(j));
    Op::Product(vec![
        flat.clone(),
        Op::left(lambda).adjoint(),
        Op::right(mu).range_projection(),
        Op::left(lambda),
        flat,
    ])
}

/// `(R_μ* L_λ)(R_μ* L_λ)* = R_μ* L_λ L_λ* R_μ`.
pub fn swapped_projection(lambda: &Path, mu: &Path) -> Op {
    Op::Product(vec![
        Op::right(mu).adjoint(),
        Op::left(lambda).range_projection(),
        Op::right(mu),
    ])
}

/// Membership of one twisted projection in both algebras.
#[derive(Clone, Debug)]
pub struct ProjectionQuery {
    pub colour: usize,
    pub lambda: Path,
    pub mu: Path,
    pub size: usize,
    pub in_full: bool,
    pub in_left_right: bool,
    /// The least range length whose algebra contains the projection.
    pub min_range_len: Option<u32>,
    /// Two basis vectors no range projection separates but the twisted
    /// projection does.
    pub witness: Option<(BasisVector, BasisVector)>,
}

/// Query every twisted projection with `λ, μ` single edges of colour `j`,
/// for every colour.
pub fn twisted_queries(g: &KGraph, algebra: &DiagonalAlgebra) -> Vec<ProjectionQuery> {
    let fock = Fock::new(g);
    let mut out = Vec::new();
    for j in 0..g.rank() {
        let edges: Vec<Path> = g.enumerate(&Shape::unit(g.rank(), j), None, None);
        for l in &edges {
            for m in &edges {
                let set = fixed_set(&fock, &algebra.basis, &twisted_projection(j, l, m));
                let witness = algebra
                    .left_right
                    .separation_witness(&set)
                    .map(|(a, b)| (algebra.basis[a].clone(), algebra.basis[b].clone()));
                out.push(ProjectionQuery {
                    colour: j,
                    lambda: l.clone(),
                    mu: m.clone(),
                    size: set.len(),
                    in_full: algebra.full.contains(&set),
                    in_left_right: witness.is_none(),
                    min_range_len: min_range_len(&fock, &algebra.basis, &set, algebra.range_len),
                    witness,
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kgraph::catalog;

    fn s(v: &[u32]) -> Shape {
        Shape::new(v.to_vec())
    }

    #[test]
    fn boolean_algebra_atoms() {
        let a: BasisSet = [0, 1].into();
        let b: BasisSet = [1, 2].into();
        let alg = BooleanAlgebra::generated_by(4, [&a, &b]);
        assert_eq!(alg.atoms().len(), 4);
        assert!(alg.contains(&[0, 2].into()));
        let coarse = BooleanAlgebra::generated_by(4, [&a]);
        assert!(!coarse.contains(&b));
        assert_eq!(coarse.separation_witness(&b), Some((1, 0)));
        assert!(alg.includes(&coarse) && !coarse.includes(&alg));
    }

    #[test]
    fn rank_one_vacuum_collapse_needs_longer_ranges() {
        let g = catalog::cycle_rank1();
        let alg = DiagonalAlgebra::compute(&g, 4, 2, &s(&[4]));
        assert!(alg.full.includes(&alg.left_right));
        // R_f L_e L_f* L_e* passes through Ω and fixes δ_{ef} alone; cutting
        // it out with range projections takes a path of length three.
        let ef = alg
            .basis
            .iter()
            .position(|v| v.display(&g) == "e.f")
            .unwrap();
        let single: BasisSet = [ef].into();
        assert!(alg.full.contains(&single));
        assert!(!alg.left_right.contains(&single));
        let fock = Fock::new(&g);
        assert_eq!(min_range_len(&fock, &alg.basis, &single, 6), Some(3));
        assert!(range_algebra(&fock, &alg.basis, 3).includes(&alg.full));
    }

    #[test]
    fn plane_algebras_coincide() {
        let g = catalog::single_vertex(2);
        let alg = DiagonalAlgebra::compute(&g, 4, 2, &s(&[3, 3]));
        assert!(alg.left_right.includes(&alg.full));
        assert!(alg.full.includes(&alg.left_right));
    }

    #[test]
    fn fixed_sets_come_with_words() {
        let g = catalog::single_vertex(2);
        let alg = DiagonalAlgebra::compute(&g, 2, 1, &s(&[2, 2]));
        let fock = Fock::new(&g);
        for (set, word) in &alg.fixed_sets {
            let op = Op::Product(word.iter().rev().cloned().map(Op::Atom).collect());
            assert_eq!(&fixed_set(&fock, &alg.basis, &op), set);
        }
    }

    #[test]
    fn twisted_range_length_grows_only_for_the_flipped_colour() {
        let g = catalog::flip();
        assert_eq!(
            range_len_growth(&g, ProjectionFamily::Twisted(1), 4),
            vec![(1, Some(1)), (2, Some(2)), (3, Some(3)), (4, Some(4))]
        );
        assert!(range_len_growth(&g, ProjectionFamily::Twisted(0), 4)
            .iter()
            .all(|&(_, m)| m == Some(1)));
        let plane = catalog::single_vertex(2);
        for j in 0..2 {
            assert!(range_len_growth(&plane, ProjectionFamily::Twisted(j), 4)
                .iter()
                .all(|&(_, m)| m == Some(1)));
        }
    }

    #[test]
    fn flip_graph_twisted_projections() {
        let g = catalog::flip();
        let alg = DiagonalAlgebra::compute(&g, 4, 2, &s(&[3, 3]));
        let queries = twisted_queries(&g, &alg);
        assert_eq!(queries.len(), 8);
        assert!(queries.iter().all(|q| q.in_full));
        // Blue: λ passes the red edges unchanged, so the projection is P^1
        // or zero.
        assert!(queries
            .iter()
            .filter(|q| q.colour == 0)
            .all(|q| q.in_left_right));
        // Red: whether the red edge survives depends on the parity of the
        // number of blue edges it crosses.
        let red: Vec<&ProjectionQuery> = queries.iter().filter(|q| q.colour == 1).collect();
        assert!(red.iter().all(|q| !q.in_left_right));
        let (a, b) = red[0].witness.clone().unwrap();
        assert_ne!(a.shape().map(Shape::total), b.shape().map(Shape::total));
    }

    #[test]
    fn swapped_projections_grow_only_for_red_pairs() {
        let g = catalog::flip();
        assert_eq!(
            range_len_growth(&g, ProjectionFamily::Swapped(1, 1), 4),
            vec![(1, Some(1)), (2, Some(2)), (3, Some(3)), (4, Some(4))]
        );
        for fam in [(0, 0), (0, 1), (1, 0)] {
            let growth = range_len_growth(&g, ProjectionFamily::Swapped(fam.0, fam.1), 4);
            assert!(
                growth.iter().all(|&(_, m)| m == Some(1)),
                "{fam:?}: {growth:?}"
            );
        }
    }

    #[test]
    fn swapped_projection_is_a_projection() {
        let g = catalog::flip();
        let fock = Fock::new(&g);
        let basis = fock.basis(&s(&[2, 2]));
        let edges = g.paths_up_to(&s(&[1, 1]));
        for l in edges.iter().filter(|p| p.shape().total() == 1) {
            for m in edges.iter().filter(|p| p.shape().total() == 1) {
                let op = swapped_projection(l, m);
                for v in &basis {
                    let w = fock.apply_basis(&op, v);
                    assert!(w.is_zero() || w == fock.apply_basis(&Op::identity(), v));
                }
            }
        }
    }

    #[test]
    fn rank_one_full_algebra_needs_bounded_ranges() {
        let g = catalog::cycle_rank1();
        let growth = full_algebra_growth(&g, 4, 7);
        assert!(growth[3..].iter().all(|&(_, m)| m == Some(3)), "{growth:?}");
    }
}
