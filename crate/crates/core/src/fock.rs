//! Left and right creation operators on the Fock space of a k-graph,
//! evaluated exactly on basis vectors, and the catalog of relations they
//! satisfy.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::kgraph::{KGraph, Path, VertexId};
use crate::shape::Shape;

/// `Ω` or `δ_λ` for a path `λ` of nonzero shape.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum BasisVector {
    Vacuum,
    Path(Path),
}

impl BasisVector {
    /// `Ω` for a vertex, `δ_λ` otherwise.
    pub fn from_path(p: Path) -> Self {
        if p.is_vertex() {
            BasisVector::Vacuum
        } else {
            BasisVector::Path(p)
        }
    }

    pub fn shape(&self) -> Option<&Shape> {
        match self {
            BasisVector::Vacuum => None,
            BasisVector::Path(p) => Some(p.shape()),
        }
    }

    pub fn display(&self, g: &KGraph) -> String {
        match self {
            BasisVector::Vacuum => "Ω".to_string(),
            BasisVector::Path(p) => g.fmt_path(p),
        }
    }
}

/// A finitely supported integer combination of basis vectors.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct FockVector(BTreeMap<BasisVector, i64>);

impl FockVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(v: BasisVector) -> Self {
        FockVector(BTreeMap::from([(v, 1)]))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisVector, i64)> {
        self.0.iter().map(|(v, &c)| (v, c))
    }

    pub fn coefficient(&self, v: &BasisVector) -> i64 {
        self.0.get(v).copied().unwrap_or(0)
    }

    fn add_term(&mut self, v: BasisVector, c: i64) {
        let entry = self.0.entry(v.clone()).or_insert(0);
        *entry += c;
        if *entry == 0 {
            self.0.remove(&v);
        }
    }

    fn add_scaled(&mut self, other: &FockVector, c: i64) {
        for (v, d) in other.terms() {
            self.add_term(v.clone(), c * d);
        }
    }

    pub fn display(&self, g: &KGraph) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.terms()
            .map(|(v, c)| match c {
                1 => v.display(g),
                _ => format!("{c}*{}", v.display(g)),
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Operators that send each basis vector to a basis vector or to zero.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Atom {
    /// `L_λ`, `λ` of nonzero shape.
    Left(Path),
    LeftAdjoint(Path),
    /// `R_λ`, `λ` of nonzero shape.
    Right(Path),
    RightAdjoint(Path),
    /// `P_a`: `Ω` and `δ_λ` with `t(λ) = a`.
    RangeAt(VertexId),
    /// `P_a^j`: as `P_a`, with `σ(λ)_j = 0`.
    RangeAtFlat(VertexId, usize),
    /// `Q_a`: `Ω` and `δ_λ` with `s(λ) = a`.
    SourceAt(VertexId),
    /// `Q_a^j`: as `Q_a`, with `σ(λ)_j = 0`.
    SourceAtFlat(VertexId, usize),
    /// `P^j`: `Ω` and `δ_λ` with `σ(λ)_j = 0`.
    Flat(usize),
    /// The projection onto `δ_μ` with `σ(μ) ≥ k` (no vacuum).
    ShapeAtLeast(Shape),
    Identity,
}

impl Atom {
    pub fn adjoint(&self) -> Atom {
        match self {
            Atom::Left(p) => Atom::LeftAdjoint(p.clone()),
            Atom::LeftAdjoint(p) => Atom::Left(p.clone()),
            Atom::Right(p) => Atom::RightAdjoint(p.clone()),
            Atom::RightAdjoint(p) => Atom::Right(p.clone()),
            other => other.clone(),
        }
    }

    pub fn is_projection(&self) -> bool {
        !matches!(
            self,
            Atom::Left(_) | Atom::LeftAdjoint(_) | Atom::Right(_) | Atom::RightAdjoint(_)
        )
    }

    pub fn display(&self, g: &KGraph) -> String {
        let v = |a: &VertexId| g.vertex_name(*a).to_string();
        match self {
            Atom::Left(p) => format!("L[{}]", g.fmt_path(p)),
            Atom::LeftAdjoint(p) => format!("L*[{}]", g.fmt_path(p)),
            Atom::Right(p) => format!("R[{}]", g.fmt_path(p)),
            Atom::RightAdjoint(p) => format!("R*[{}]", g.fmt_path(p)),
            Atom::RangeAt(a) => format!("P[{}]", v(a)),
            Atom::RangeAtFlat(a, j) => format!("P[{}]^{}", v(a), j + 1),
            Atom::SourceAt(a) => format!("Q[{}]", v(a)),
            Atom::SourceAtFlat(a, j) => format!("Q[{}]^{}", v(a), j + 1),
            Atom::Flat(j) => format!("P^{}", j + 1),
            Atom::ShapeAtLeast(k) => format!("P[shape>={k}]"),
            Atom::Identity => "1".to_string(),
        }
    }
}

/// Expressions over atoms. `Product([A, B])` is `AB`, applied right to left.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Op {
    Atom(Atom),
    Product(Vec<Op>),
    Sum(Vec<(i64, Op)>),
}

impl Op {
    /// `L_λ`, or `P_a` when `λ` is the vertex `a`.
    pub fn left(p: &Path) -> Op {
        if p.is_vertex() {
            Op::Atom(Atom::RangeAt(p.target()))
        } else {
            Op::Atom(Atom::Left(p.clone()))
        }
    }

    /// `R_λ`, or `Q_a` when `λ` is the vertex `a`.
    pub fn right(p: &Path) -> Op {
        if p.is_vertex() {
            Op::Atom(Atom::SourceAt(p.target()))
        } else {
            Op::Atom(Atom::Right(p.clone()))
        }
    }

    pub fn identity() -> Op {
        Op::Atom(Atom::Identity)
    }

    pub fn adjoint(&self) -> Op {
        match self {
            Op::Atom(a) => Op::Atom(a.adjoint()),
            Op::Product(factors) => Op::Product(factors.iter().rev().map(Op::adjoint).collect()),
            Op::Sum(terms) => Op::Sum(terms.iter().map(|(c, t)| (*c, t.adjoint())).collect()),
        }
    }

    pub fn then(self, outer: Op) -> Op {
        Op::Product(vec![outer, self])
    }

    /// `A A*`.
    pub fn range_projection(&self) -> Op {
        Op::Product(vec![self.clone(), self.adjoint()])
    }

    pub fn sum(terms: impl IntoIterator<Item = Op>) -> Op {
        Op::Sum(terms.into_iter().map(|t| (1, t)).collect())
    }

    pub fn minus(self, other: Op) -> Op {
        Op::Sum(vec![(1, self), (-1, other)])
    }

    pub fn display(&self, g: &KGraph) -> String {
        match self {
            Op::Atom(a) => a.display(g),
            Op::Product(f) if f.is_empty() => "1".to_string(),
            Op::Product(f) => f.iter().map(|x| x.display(g)).collect::<Vec<_>>().join(" "),
            Op::Sum(t) if t.is_empty() => "0".to_string(),
            Op::Sum(t) => {
                let parts: Vec<String> = t
                    .iter()
                    .map(|(c, x)| match c {
                        1 => format!("({})", x.display(g)),
                        -1 => format!("-({})", x.display(g)),
                        _ => format!("{c}({})", x.display(g)),
                    })
                    .collect();
                parts.join(" + ")
            }
        }
    }
}

/// Evaluation of operators on the Fock space of one graph.
#[derive(Clone, Copy)]
pub struct Fock<'g> {
    g: &'g KGraph,
}

impl<'g> Fock<'g> {
    pub fn new(g: &'g KGraph) -> Self {
        Fock { g }
    }

    pub fn graph(&self) -> &'g KGraph {
        self.g
    }

    /// `Ω` followed by every path of nonzero shape `≤ bound`.
    pub fn basis(&self, bound: &Shape) -> Vec<BasisVector> {
        std::iter::once(BasisVector::Vacuum)
            .chain(
                self.g
                    .paths_up_to(bound)
                    .into_iter()
                    .filter(|p| !p.is_vertex())
                    .map(BasisVector::Path),
            )
            .collect()
    }

    /// The image of a basis vector under an atom, or `None` for zero.
    pub fn apply_atom(&self, atom: &Atom, v: &BasisVector) -> Option<BasisVector> {
        let g = self.g;
        let keep = |ok: bool| ok.then(|| v.clone());
        match (atom, v) {
            (Atom::Identity, _) => Some(v.clone()),
            (Atom::Left(l), BasisVector::Vacuum) | (Atom::Right(l), BasisVector::Vacuum) => {
                Some(BasisVector::from_path(l.clone()))
            }
            (Atom::Left(l), BasisVector::Path(m)) => g.compose(l, m).ok().map(BasisVector::Path),
            (Atom::Right(l), BasisVector::Path(m)) => g.compose(m, l).ok().map(BasisVector::Path),
            (Atom::LeftAdjoint(_) | Atom::RightAdjoint(_), BasisVector::Vacuum) => None,
            (Atom::LeftAdjoint(l), BasisVector::Path(n)) => {
                let (head, tail) = g.factorize(n, l.shape()).ok()?;
                (&head == l).then(|| BasisVector::from_path(tail))
            }
            (Atom::RightAdjoint(l), BasisVector::Path(n)) => {
                let k = n.shape().checked_sub(l.shape())?;
                let (head, tail) = g.factorize(n, &k).ok()?;
                (&tail == l).then(|| BasisVector::from_path(head))
            }
            (Atom::RangeAt(_) | Atom::RangeAtFlat(..), BasisVector::Vacuum)
            | (Atom::SourceAt(_) | Atom::SourceAtFlat(..), BasisVector::Vacuum)
            | (Atom::Flat(_), BasisVector::Vacuum) => Some(v.clone()),
            (Atom::RangeAt(a), BasisVector::Path(p)) => keep(p.target() == *a),
            (Atom::RangeAtFlat(a, j), BasisVector::Path(p)) => {
                keep(p.target() == *a && p.shape()[*j] == 0)
            }
            (Atom::SourceAt(a), BasisVector::Path(p)) => keep(p.source() == *a),
            (Atom::SourceAtFlat(a, j), BasisVector::Path(p)) => {
                keep(p.source() == *a && p.shape()[*j] == 0)
            }
            (Atom::Flat(j), BasisVector::Path(p)) => keep(p.shape()[*j] == 0),
            (Atom::ShapeAtLeast(_), BasisVector::Vacuum) => None,
            (Atom::ShapeAtLeast(k), BasisVector::Path(p)) => keep(k.le(p.shape())),
        }
    }

    pub fn apply(&self, op: &Op, v: &FockVector) -> FockVector {
        match op {
            Op::Atom(a) => {
                let mut out = FockVector::zero();
                for (b, c) in v.terms() {
                    if let Some(w) = self.apply_atom(a, b) {
                        out.add_term(w, c);
                    }
                }
                out
            }
            Op::Product(factors) => factors
                .iter()
                .rev()
                .fold(v.clone(), |acc, f| self.apply(f, &acc)),
            Op::Sum(terms) => {
                let mut out = FockVector::zero();
                for (c, t) in terms {
                    out.add_scaled(&self.apply(t, v), *c);
                }
                out
            }
        }
    }

    pub fn apply_basis(&self, op: &Op, v: &BasisVector) -> FockVector {
        self.apply(op, &FockVector::basis(v.clone()))
    }
}

/// Which side of the relation a family member speaks about.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Side {
    Left,
    Right,
}

/// One instance of a catalogued identity `lhs = rhs`.
#[derive(Clone, Debug)]
pub struct Relation {
    pub family: String,
    pub label: String,
    pub lhs: Op,
    pub rhs: Op,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FockError {
    #[error("unknown relation family {0:?}; expected one of R1, R2, R3, R4, commutation")]
    UnknownFamily(String),
    #[error("shape bound has rank {got}, graph has rank {expected}")]
    RankMismatch { expected: usize, got: usize },
}

/// A basis vector on which the two sides of a relation differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub relation: String,
    pub vector: BasisVector,
    pub lhs: FockVector,
    pub rhs: FockVector,
}

impl Counterexample {
    pub fn display(&self, g: &KGraph) -> String {
        format!(
            "{} at {}: {} vs {}",
            self.relation,
            self.vector.display(g),
            self.lhs.display(g),
            self.rhs.display(g)
        )
    }
}

pub const FAMILIES: [&str; 5] = ["R1", "R2", "R3", "R4", "commutation"];

fn shape_sum<F: Fn(&Path) -> Op>(
    g: &KGraph,
    k: &Shape,
    target: Option<VertexId>,
    source: Option<VertexId>,
    f: F,
) -> Op {
    Op::sum(
        g.enumerate(k, source, target)
            .iter()
            .map(|l| f(l).range_projection()),
    )
}

/// The instances of a relation family for paths up to `bound`:
///
/// * `R1`: `L_μ*L_μ = P_{s(μ)}` and `R_μ*R_μ = Q_{t(μ)}`;
/// * `R2`: `P_a = Σ_{t(λ)=a, σ(λ)=e_j} L_λL_λ* + P_a^j` and the mirror
///   with `Q_a`, summed over `s(λ) = a`;
/// * `R3`: `1 − Σ_{σ(λ)=e_j} L_λL_λ* = P^j` and the same with `R`;
/// * `R4`: `Σ_{σ(λ)=k} L_λL_λ*` and `Σ_{σ(λ)=k} R_λR_λ*` both equal the
///   projection onto `σ(μ) ≥ k`, for `0 ≠ k ≤ bound`;
/// * `commutation`: `L_λR_μ = R_μL_λ` for `λ, μ` of nonzero shape `≤ (1,…,1)`.
pub fn relations(g: &KGraph, family: &str, bound: &Shape) -> Result<Vec<Relation>, FockError> {
    if bound.rank() != g.rank() {
        return Err(FockError::RankMismatch {
            expected: g.rank(),
            got: bound.rank(),
        });
    }
    let r = g.rank();
    let name = |p: &Path| g.fmt_path(p);
    let nonzero: Vec<Path> = g
        .paths_up_to(bound)
        .into_iter()
        .filter(|p| !p.is_vertex())
        .collect();
    let rel = |label: String, lhs: Op, rhs: Op| Relation {
        family: family.to_string(),
        label,
        lhs,
        rhs,
    };
    let mut out = Vec::new();
    match family {
        "R1" => {
            for m in &nonzero {
                out.push(rel(
                    format!("L*L[{}] = P[{}]", name(m), g.vertex_name(m.source())),
                    Op::left(m).then(Op::left(m).adjoint()),
                    Op::Atom(Atom::RangeAt(m.source())),
                ));
                out.push(rel(
                    format!("R*R[{}] = Q[{}]", name(m), g.vertex_name(m.target())),
                    Op::right(m).then(Op::right(m).adjoint()),
                    Op::Atom(Atom::SourceAt(m.target())),
                ));
            }
        }
        "R2" => {
            for a in 0..g.vertex_count() {
                for j in 0..r {
                    let e = Shape::unit(r, j);
                    let v = g.vertex_name(a);
                    out.push(rel(
                        format!("P[{v}] = sum L L* + P[{v}]^{}", j + 1),
                        Op::Atom(Atom::RangeAt(a)),
                        Op::Sum(vec![
                            (1, shape_sum(g, &e, Some(a), None, Op::left)),
                            (1, Op::Atom(Atom::RangeAtFlat(a, j))),
                        ]),
                    ));
                    out.push(rel(
                        format!("Q[{v}] = sum R R* + Q[{v}]^{}", j + 1),
                        Op::Atom(Atom::SourceAt(a)),
                        Op::Sum(vec![
                            (1, shape_sum(g, &e, None, Some(a), Op::right)),
                            (1, Op::Atom(Atom::SourceAtFlat(a, j))),
                        ]),
                    ));
                }
            }
        }
        "R3" => {
            for j in 0..r {
                let e = Shape::unit(r, j);
                for (side, f) in [
                    (Side::Left, Op::left as fn(&Path) -> Op),
                    (Side::Right, Op::right),
                ] {
                    out.push(rel(
                        format!("1 - sum {side:?} = P^{}", j + 1),
                        Op::identity().minus(shape_sum(g, &e, None, None, f)),
                        Op::Atom(Atom::Flat(j)),
                    ));
                }
            }
        }
        "R4" => {
            for k in bound.below().filter(|k| !k.is_zero()) {
                for (side, f) in [
                    (Side::Left, Op::left as fn(&Path) -> Op),
                    (Side::Right, Op::right),
                ] {
                    out.push(rel(
                        format!("sum {side:?} shape {k} = P[shape>={k}]"),
                        shape_sum(g, &k, None, None, f),
                        Op::Atom(Atom::ShapeAtLeast(k.clone())),
                    ));
                }
            }
        }
        "commutation" => {
            let small: Vec<&Path> = nonzero
                .iter()
                .filter(|p| p.shape().le(&Shape::splat(r, 1)))
                .collect();
            for l in &small {
                for m in &small {
                    out.push(rel(
                        format!(
                            "L[{}] R[{}] = R[{}] L[{}]",
                            name(l),
                            name(m),
                            name(m),
                            name(l)
                        ),
                        Op::Product(vec![Op::left(l), Op::right(m)]),
                        Op::Product(vec![Op::right(m), Op::left(l)]),
                    ));
                }
            }
        }
        other => return Err(FockError::UnknownFamily(other.to_string())),
    }
    Ok(out)
}

/// Outcome of checking a whole family.
#[derive(Clone, Debug, Default)]
pub struct FamilyReport {
    pub instances: usize,
    pub evaluations: usize,
    pub counterexamples: Vec<Counterexample>,
}

/// Evaluate both sides of every instance on every basis vector of shape
/// `≤ bound` and collect the vectors where they differ (at most one per
/// instance).
pub fn verify_family(g: &KGraph, family: &str, bound: &Shape) -> Result<FamilyReport, FockError> {
    let fock = Fock::new(g);
    let basis = fock.basis(bound);
    let mut report = FamilyReport::default();
    for rel in relations(g, family, bound)? {
        report.instances += 1;
        if let Some(c) = find_counterexample(&fock, &rel, &basis) {
            report.counterexamples.push(c);
        }
        report.evaluations += basis.len();
    }
    Ok(report)
}

/// The first basis vector on which the two sides of `rel` differ.
pub fn find_counterexample(
    fock: &Fock<'_>,
    rel: &Relation,
    basis: &[BasisVector],
) -> Option<Counterexample> {
    basis.iter().find_map(|v| {
        let lhs = fock.apply_basis(&rel.lhs, v);
        let rhs = fock.apply_basis(&rel.rhs, v);
        (lhs != rhs).then(|| Counterexample {
            relation: rel.label.clone(),
            vector: v.clone(),
            lhs,
            rhs,
        })
    })
}

/// How `L_λR_μ` and `R_μL_λ` act on the vacuum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VacuumBehaviour {
    pub lambda: Path,
    pub mu: Path,
    pub left_then_right: FockVector,
    pub right_then_left: FockVector,
}

/// `L_λR_μΩ` and `R_μL_λΩ` for the given pair.
pub fn vacuum_commutation(g: &KGraph, lambda: &Path, mu: &Path) -> VacuumBehaviour {
    let fock = Fock::new(g);
    let lr = Op::Product(vec![Op::left(lambda), Op::right(mu)]);
    let rl = Op::Product(vec![Op::right(mu), Op::left(lambda)]);
    VacuumBehaviour {
        lambda: lambda.clone(),
        mu: mu.clone(),
        left_then_right: fock.apply_basis(&lr, &BasisVector::Vacuum),
        right_then_left: fock.apply_basis(&rl, &BasisVector::Vacuum),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kgraph::catalog;

    fn s(v: &[u32]) -> Shape {
        Shape::new(v.to_vec())
    }

    fn vec_of(g: &KGraph, text: &str) -> BasisVector {
        BasisVector::from_path(g.parse_path(text).unwrap())
    }

    #[test]
    fn creation_on_the_vacuum() {
        let g = catalog::grid(&s(&[1, 1]));
        let fock = Fock::new(&g);
        for p in g
            .paths_up_to(&s(&[1, 1]))
            .into_iter()
            .filter(|p| !p.is_vertex())
        {
            let expected = FockVector::basis(BasisVector::Path(p.clone()));
            assert_eq!(
                fock.apply_basis(&Op::left(&p), &BasisVector::Vacuum),
                expected
            );
            assert_eq!(
                fock.apply_basis(&Op::right(&p), &BasisVector::Vacuum),
                expected
            );
            assert_eq!(
                fock.apply_basis(&Op::left(&p).adjoint(), &BasisVector::Path(p.clone())),
                FockVector::basis(BasisVector::Vacuum)
            );
        }
    }

    #[test]
    fn adjoint_without_a_left_factor_is_zero() {
        let g = catalog::single_vertex(2);
        let fock = Fock::new(&g);
        let f1 = g.parse_path("f1").unwrap();
        let v = vec_of(&g, "f2.f2");
        assert!(fock.apply_basis(&Op::left(&f1).adjoint(), &v).is_zero());
        assert!(fock.apply_basis(&Op::right(&f1).adjoint(), &v).is_zero());
    }

    #[test]
    fn two_sided_creation_on_the_plane() {
        let g = catalog::single_vertex(2);
        let fock = Fock::new(&g);
        let (f1, f2) = (g.parse_path("f1").unwrap(), g.parse_path("f2").unwrap());
        let op = Op::Product(vec![Op::right(&f2), Op::left(&f1)]);
        for (p, q) in [(0u32, 1u32), (1, 0), (2, 3), (3, 3)] {
            let word = |p: u32, q: u32| {
                let mut w = vec!["f1"; p as usize];
                w.extend(vec!["f2"; q as usize]);
                w.join(".")
            };
            let got = fock.apply_basis(&op, &vec_of(&g, &word(p, q)));
            assert_eq!(got, FockVector::basis(vec_of(&g, &word(p + 1, q + 1))));
        }
    }

    #[test]
    fn r3_on_the_plane_fixes_the_colour_two_axis() {
        let g = catalog::single_vertex(2);
        let fock = Fock::new(&g);
        let rels = relations(&g, "R3", &s(&[3, 3])).unwrap();
        let lhs = &rels[0].lhs;
        let fixed: Vec<BasisVector> = fock
            .basis(&s(&[3, 3]))
            .into_iter()
            .filter(|v| fock.apply_basis(lhs, v) == FockVector::basis(v.clone()))
            .collect();
        let expected: Vec<BasisVector> = std::iter::once(BasisVector::Vacuum)
            .chain((1..=3).map(|q| vec_of(&g, &vec!["f2"; q].join("."))))
            .collect();
        assert_eq!(fixed, expected);
    }

    #[test]
    fn catalog_holds_on_the_fixtures() {
        for g in [
            catalog::grid(&s(&[1, 1])),
            catalog::single_vertex(2),
            catalog::flip(),
        ] {
            for family in FAMILIES {
                let report = verify_family(&g, family, &s(&[2, 2])).unwrap();
                assert!(report.instances > 0);
                assert!(
                    report.counterexamples.is_empty(),
                    "{family}: {}",
                    report.counterexamples[0].display(&g)
                );
            }
        }
    }

    #[test]
    fn a_wrong_identity_is_caught() {
        // R_μ*R_μ is not P_{s(μ)} on the square.
        let g = catalog::grid(&s(&[1, 1]));
        let fock = Fock::new(&g);
        let m = g
            .edges()
            .iter()
            .position(|e| e.color == 0)
            .map(|e| g.edge_path(e))
            .unwrap();
        let rel = Relation {
            family: "custom".into(),
            label: "R*R = P[s]".into(),
            lhs: Op::right(&m).then(Op::right(&m).adjoint()),
            rhs: Op::Atom(Atom::RangeAt(m.source())),
        };
        let err = find_counterexample(&fock, &rel, &fock.basis(&s(&[1, 1]))).unwrap();
        assert!(err.lhs != err.rhs);
        assert!(matches!(
            relations(&g, "R9", &s(&[1, 1])),
            Err(FockError::UnknownFamily(_))
        ));
    }

    #[test]
    fn right_projections_use_sources() {
        // Reading Q_a as "t(λ) = a" breaks R_μ*R_μ = Q_{t(μ)} on the square.
        let g = catalog::grid(&s(&[1, 1]));
        let fock = Fock::new(&g);
        let basis = fock.basis(&s(&[1, 1]));
        let literal_fails = (0..g.edges().len()).map(|e| g.edge_path(e)).any(|m| {
            let rel = Relation {
                family: "literal".into(),
                label: "R*R = P[t]".into(),
                lhs: Op::right(&m).then(Op::right(&m).adjoint()),
                rhs: Op::Atom(Atom::RangeAt(m.target())),
            };
            find_counterexample(&fock, &rel, &basis).is_some()
        });
        assert!(literal_fails);
    }

    #[test]
    fn vacuum_commutation_on_the_square() {
        let g = catalog::grid(&s(&[1, 1]));
        let edges: Vec<Path> = (0..g.edges().len()).map(|e| g.edge_path(e)).collect();
        for l in &edges {
            for m in &edges {
                let v = vacuum_commutation(&g, l, m);
                assert_eq!(v.left_then_right, v.right_then_left);
                let expected = g
                    .compose(l, m)
                    .map(|p| FockVector::basis(BasisVector::Path(p)))
                    .unwrap_or_default();
                assert_eq!(v.left_then_right, expected);
            }
        }
    }
}
