//! Finite groupoids of triples `(x, z, y)`: the semidirect-product groupoid
//! of a system, its germ quotient, convolution and the amenability skeleton.

pub mod convolution;
pub mod skeleton;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::dynsys::{CommutationWitness, DcWitness, Mgds, Point};
use crate::shape::{Shape, ZVec};

/// A groupoid element `(range, z, source)`. Identity is by the triple.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Arrow<P> {
    pub range: P,
    pub z: ZVec,
    pub source: P,
}

impl<P: Point> Arrow<P> {
    pub fn unit(x: P, rank: usize) -> Self {
        Arrow {
            range: x.clone(),
            z: ZVec::zero(rank),
            source: x,
        }
    }

    pub fn inverse(&self) -> Self {
        Arrow {
            range: self.source.clone(),
            z: -&self.z,
            source: self.range.clone(),
        }
    }

    /// `self · other` when `d(self) = r(other)`.
    pub fn product(&self, other: &Arrow<P>) -> Option<Arrow<P>> {
        (self.source == other.range).then(|| Arrow {
            range: self.range.clone(),
            z: &self.z + &other.z,
            source: other.source.clone(),
        })
    }

    pub fn is_unit(&self) -> bool {
        self.range == self.source && self.z.is_zero()
    }
}

impl<P: fmt::Debug> fmt::Display for Arrow<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, ({}), {:?})", self.range, self.z, self.source)
    }
}

/// Evidence `T^m x = T^n y` for an element `(x, m − n, y)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Witness {
    pub m: Shape,
    pub n: Shape,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupoidError<P: fmt::Debug> {
    #[error("{left} and {right} are not composable")]
    NotComposable { left: Arrow<P>, right: Arrow<P> },
    #[error("composite {composite} of {left} and {right} is not an element")]
    NotClosed {
        left: Arrow<P>,
        right: Arrow<P>,
        composite: Arrow<P>,
    },
}

/// A failed groupoid axiom.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AxiomFailure<P: fmt::Debug> {
    #[error("{left} and {right} are not composable")]
    NotComposable { left: Arrow<P>, right: Arrow<P> },
    #[error("no unit at {0:?}")]
    MissingUnit(P),
    #[error("inverse of {0} is not an element")]
    MissingInverse(Arrow<P>),
    #[error("composite {composite} of {left} and {right} is not an element")]
    NotClosed {
        left: Arrow<P>,
        right: Arrow<P>,
        composite: Arrow<P>,
    },
    #[error("({a} {b}) {c} differs from {a} ({b} {c})")]
    NotAssociative {
        a: Arrow<P>,
        b: Arrow<P>,
        c: Arrow<P>,
    },
    #[error("{0} times its inverse is not the unit at its range")]
    InverseLaw(Arrow<P>),
    #[error("witness ({m}, {n}) computed for the composite {composite} of {left} and {right} is invalid")]
    InvalidWitness {
        left: Arrow<P>,
        right: Arrow<P>,
        composite: Arrow<P>,
        m: Shape,
        n: Shape,
    },
}

/// Counts gathered by an exhaustive axiom check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AxiomStats {
    pub elements: usize,
    pub composable_pairs: usize,
    pub composable_triples: usize,
    /// Composable pairs whose product has no witness within the bound and so
    /// lies outside the truncation.
    pub outside: usize,
}

/// A finite groupoid of triples, indexed for fibre lookups.
#[derive(Clone, Debug)]
pub struct FiniteGroupoid<P> {
    arrows: Vec<Arrow<P>>,
    witnesses: Vec<Option<Witness>>,
    index: HashMap<Arrow<P>, usize>,
    units: Vec<P>,
    by_range: BTreeMap<P, Vec<usize>>,
    by_source: BTreeMap<P, Vec<usize>>,
    rank: usize,
}

impl<P: Point> FiniteGroupoid<P> {
    /// Build from candidate arrows; duplicates (same triple) keep the first
    /// witness. Arrows are stored sorted.
    pub fn from_arrows(
        units: Vec<P>,
        rank: usize,
        candidates: Vec<(Arrow<P>, Option<Witness>)>,
    ) -> Self {
        let mut unique: BTreeMap<Arrow<P>, Option<Witness>> = BTreeMap::new();
        for (a, w) in candidates {
            unique.entry(a).or_insert(w);
        }
        let (arrows, witnesses): (Vec<_>, Vec<_>) = unique.into_iter().unzip();
        let index = arrows
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, a)| (a, i))
            .collect();
        let mut by_range: BTreeMap<P, Vec<usize>> =
            units.iter().map(|u| (u.clone(), Vec::new())).collect();
        let mut by_source = by_range.clone();
        for (i, a) in arrows.iter().enumerate() {
            by_range.entry(a.range.clone()).or_default().push(i);
            by_source.entry(a.source.clone()).or_default().push(i);
        }
        FiniteGroupoid {
            arrows,
            witnesses,
            index,
            units,
            by_range,
            by_source,
            rank,
        }
    }

    /// The pair groupoid `X × X` (with empty translation part).
    pub fn pair(points: Vec<P>) -> Self {
        let arrows = points
            .iter()
            .flat_map(|x| {
                points.iter().map(move |y| {
                    (
                        Arrow {
                            range: x.clone(),
                            z: ZVec::zero(0),
                            source: y.clone(),
                        },
                        None,
                    )
                })
            })
            .collect();
        Self::from_arrows(points, 0, arrows)
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    /// Length of the translation vectors.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn arrows(&self) -> &[Arrow<P>] {
        &self.arrows
    }

    pub fn arrow(&self, i: usize) -> &Arrow<P> {
        &self.arrows[i]
    }

    pub fn witness(&self, i: usize) -> Option<&Witness> {
        self.witnesses[i].as_ref()
    }

    pub fn index_of(&self, a: &Arrow<P>) -> Option<usize> {
        self.index.get(a).copied()
    }

    pub fn units(&self) -> &[P] {
        &self.units
    }

    pub fn unit_index(&self, x: &P) -> Option<usize> {
        self.index_of(&Arrow::unit(x.clone(), self.rank))
    }

    /// Indices of arrows with range `u`.
    pub fn range_fiber(&self, u: &P) -> &[usize] {
        self.by_range.get(u).map_or(&[], Vec::as_slice)
    }

    /// Indices of arrows with source `u`.
    pub fn source_fiber(&self, u: &P) -> &[usize] {
        self.by_source.get(u).map_or(&[], Vec::as_slice)
    }

    pub fn inverse(&self, i: usize) -> Option<usize> {
        self.index_of(&self.arrows[i].inverse())
    }

    /// Index of `arrow(i) · arrow(j)`.
    pub fn compose(&self, i: usize, j: usize) -> Result<usize, GroupoidError<P>> {
        let (a, b) = (&self.arrows[i], &self.arrows[j]);
        let c = a.product(b).ok_or_else(|| GroupoidError::NotComposable {
            left: a.clone(),
            right: b.clone(),
        })?;
        self.index_of(&c).ok_or_else(|| GroupoidError::NotClosed {
            left: a.clone(),
            right: b.clone(),
            composite: c,
        })
    }

    /// All composable pairs `(i, j)` with `d(i) = r(j)`.
    pub fn composable_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.arrows.len()).flat_map(move |i| {
            self.range_fiber(&self.arrows[i].source)
                .iter()
                .map(move |&j| (i, j))
        })
    }

    /// Composable pairs whose composite is missing, in pair order.
    pub fn closure_failures(&self) -> Vec<(usize, usize, Arrow<P>)> {
        self.composable_pairs()
            .filter_map(|(i, j)| {
                let c = self.arrows[i].product(&self.arrows[j]).expect("composable");
                (!self.index.contains_key(&c)).then_some((i, j, c))
            })
            .collect()
    }

    /// Exhaustive check of units, inverses, closure and associativity.
    pub fn check_axioms(&self) -> Result<AxiomStats, AxiomFailure<P>> {
        self.check_structure(true)
    }

    /// As [`FiniteGroupoid::check_axioms`]; with `strict` off, pairs whose
    /// product is missing are counted in `outside` instead of failing, and
    /// triples through them are skipped.
    fn check_structure(&self, strict: bool) -> Result<AxiomStats, AxiomFailure<P>> {
        let mut stats = AxiomStats {
            elements: self.arrows.len(),
            ..AxiomStats::default()
        };
        for u in &self.units {
            if self.unit_index(u).is_none() {
                return Err(AxiomFailure::MissingUnit(u.clone()));
            }
        }
        for (i, a) in self.arrows.iter().enumerate() {
            let Some(inv) = self.inverse(i) else {
                return Err(AxiomFailure::MissingInverse(a.clone()));
            };
            let back = self.compose(i, inv).ok();
            if back != self.unit_index(&a.range) {
                return Err(AxiomFailure::InverseLaw(a.clone()));
            }
            let left_unit = self
                .unit_index(&a.range)
                .and_then(|u| self.compose(u, i).ok());
            let right_unit = self
                .unit_index(&a.source)
                .and_then(|u| self.compose(i, u).ok());
            if left_unit != Some(i) || right_unit != Some(i) {
                return Err(AxiomFailure::InverseLaw(a.clone()));
            }
        }
        for (i, j) in self.composable_pairs() {
            stats.composable_pairs += 1;
            let ij = match self.compose(i, j) {
                Ok(k) => k,
                Err(GroupoidError::NotClosed { .. }) if !strict => {
                    stats.outside += 1;
                    continue;
                }
                Err(GroupoidError::NotClosed {
                    left,
                    right,
                    composite,
                }) => {
                    return Err(AxiomFailure::NotClosed {
                        left,
                        right,
                        composite,
                    })
                }
                Err(GroupoidError::NotComposable { .. }) => unreachable!("pair is composable"),
            };
            for &k in self.range_fiber(&self.arrows[j].source) {
                stats.composable_triples += 1;
                let jk = self.compose(j, k);
                let left = self.compose(ij, k);
                let right = jk.as_ref().ok().map(|&jk| self.compose(i, jk));
                let same = match (left, right) {
                    (Ok(l), Some(Ok(r))) => l == r,
                    (Err(GroupoidError::NotClosed { .. }), _)
                    | (_, None | Some(Err(GroupoidError::NotClosed { .. })))
                        if !strict =>
                    {
                        continue
                    }
                    _ => false,
                };
                if !same {
                    return Err(AxiomFailure::NotAssociative {
                        a: self.arrows[i].clone(),
                        b: self.arrows[j].clone(),
                        c: self.arrows[k].clone(),
                    });
                }
            }
        }
        Ok(stats)
    }

    /// Whether every arrow lies inside `set` at both ends or neither, with a
    /// violating arrow otherwise.
    pub fn check_invariant(&self, contains: impl Fn(&P) -> bool) -> Result<(), Arrow<P>> {
        match self
            .arrows
            .iter()
            .find(|a| contains(&a.range) != contains(&a.source))
        {
            None => Ok(()),
            Some(a) => Err(a.clone()),
        }
    }

    /// The reduction to the units satisfying `keep`.
    pub fn restrict(&self, keep: impl Fn(&P) -> bool) -> FiniteGroupoid<P> {
        let units = self.units.iter().filter(|u| keep(u)).cloned().collect();
        let arrows = self
            .arrows
            .iter()
            .zip(&self.witnesses)
            .filter(|(a, _)| keep(&a.range) && keep(&a.source))
            .map(|(a, w)| (a.clone(), w.clone()))
            .collect();
        FiniteGroupoid::from_arrows(units, self.rank, arrows)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError<P: fmt::Debug> {
    #[error("generators {} and {} do not commute at {:?}", .0.i + 1, .0.j + 1, .0.x)]
    Commutation(CommutationWitness<P>),
    #[error("domain condition fails: {:?} lies in dom(T^{}) and dom(T^{}) but not in dom(T^(n∨m))", .0.x, .0.n, .0.m)]
    DomainCondition(DcWitness<P>),
}

/// The semidirect-product groupoid `G(X, T)` of a system, cut off at a
/// witness bound.
#[derive(Clone, Debug)]
pub struct Semidirect<P> {
    sys: Mgds<P>,
    bound: Shape,
    groupoid: FiniteGroupoid<P>,
}

/// Build `{(x, m − n, y) : m, n ≤ bound, T^m x = T^n y}`. Systems failing
/// the domain condition are refused unless `force` is set.
pub fn build_semidirect<P: Point>(
    sys: &Mgds<P>,
    bound: &Shape,
    force: bool,
) -> Result<Semidirect<P>, BuildError<P>> {
    if let Err(w) = sys.check_commuting() {
        return Err(BuildError::Commutation(w));
    }
    if !force {
        sys.check_dc(bound).map_err(BuildError::DomainCondition)?;
    }
    // Group the images T^m x by value.
    let shapes: Vec<Shape> = bound.below().collect();
    let mut by_image: BTreeMap<P, Vec<(P, &Shape)>> = BTreeMap::new();
    for x in sys.carrier() {
        for m in &shapes {
            if let Some(y) = sys.power_apply(m, x) {
                by_image.entry(y).or_default().push((x.clone(), m));
            }
        }
    }
    let mut candidates = Vec::new();
    for preimages in by_image.values() {
        for (x, m) in preimages {
            for (y, n) in preimages {
                candidates.push((
                    Arrow {
                        range: x.clone(),
                        z: ZVec::difference(m, n),
                        source: y.clone(),
                    },
                    Some(Witness {
                        m: (*m).clone(),
                        n: (*n).clone(),
                    }),
                ));
            }
        }
    }
    let groupoid = FiniteGroupoid::from_arrows(sys.carrier().to_vec(), sys.rank(), candidates);
    Ok(Semidirect {
        sys: sys.clone(),
        bound: bound.clone(),
        groupoid,
    })
}

/// Outcome of composing two semidirect elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Composite<P> {
    pub arrow: Arrow<P>,
    pub witness: Witness,
}

impl<P: Point> Semidirect<P> {
    pub fn groupoid(&self) -> &FiniteGroupoid<P> {
        &self.groupoid
    }

    pub fn system(&self) -> &Mgds<P> {
        &self.sys
    }

    pub fn bound(&self) -> &Shape {
        &self.bound
    }

    pub fn is_valid_witness(&self, a: &Arrow<P>, w: &Witness) -> bool {
        ZVec::difference(&w.m, &w.n) == a.z
            && matches!(
                (self.sys.power_apply(&w.m, &a.range), self.sys.power_apply(&w.n, &a.source)),
                (Some(p), Some(q)) if p == q
            )
    }

    /// Search all witnesses with `m, n ≤ bound` for an arrow.
    pub fn find_witness(&self, a: &Arrow<P>, bound: &Shape) -> Option<Witness> {
        bound.below().find_map(|m| {
            let mz = m.to_zvec();
            let nz = &mz - &a.z;
            let n = Shape::new(
                nz.coords()
                    .iter()
                    .map(|&c| u32::try_from(c).ok())
                    .collect::<Option<Vec<_>>>()?,
            );
            let w = Witness { m, n };
            (w.n.le(bound) && self.is_valid_witness(a, &w)).then_some(w)
        })
    }

    /// Compose with the witness `(m + n∨m' − n, n' + n∨m' − m')` and verify it.
    pub fn compose_elements(&self, i: usize, j: usize) -> Result<Composite<P>, AxiomFailure<P>> {
        let g = &self.groupoid;
        let (a, b) = (g.arrow(i), g.arrow(j));
        let Some(arrow) = a.product(b) else {
            return Err(AxiomFailure::NotComposable {
                left: a.clone(),
                right: b.clone(),
            });
        };
        let (wa, wb) = (
            g.witness(i).expect("semidirect arrows carry witnesses"),
            g.witness(j).expect("semidirect arrows carry witnesses"),
        );
        let join = wa.n.join(&wb.m);
        let m = &wa.m + &join.checked_sub(&wa.n).expect("n ≤ n∨m'");
        let n = &wb.n + &join.checked_sub(&wb.m).expect("m' ≤ n∨m'");
        let witness = Witness { m, n };
        if !self.is_valid_witness(&arrow, &witness) {
            return Err(AxiomFailure::InvalidWitness {
                left: a.clone(),
                right: b.clone(),
                composite: arrow,
                m: witness.m,
                n: witness.n,
            });
        }
        Ok(Composite { arrow, witness })
    }

    /// Groupoid axioms within the witness bound. Every composite witness is
    /// re-verified; a composite missing from the enumeration fails only if
    /// some witness `≤ bound` exists for it, and otherwise is counted as
    /// outside the truncation.
    pub fn check_axioms(&self) -> Result<AxiomStats, AxiomFailure<P>> {
        let g = &self.groupoid;
        for (i, j) in g.composable_pairs() {
            let c = self.compose_elements(i, j)?;
            if g.index_of(&c.arrow).is_none() && self.find_witness(&c.arrow, &self.bound).is_some()
            {
                return Err(AxiomFailure::NotClosed {
                    left: g.arrow(i).clone(),
                    right: g.arrow(j).clone(),
                    composite: c.arrow,
                });
            }
        }
        g.check_structure(false)
    }
}

/// No `x` and `n ≠ m ≤ bound` with `T^n x = T^m x`; otherwise the first
/// such triple (`n` above `m` lexicographically).
pub fn check_essentially_free<P: Point>(sys: &Mgds<P>, bound: &Shape) -> Result<(), DcWitness<P>> {
    let shapes: Vec<Shape> = bound.below().collect();
    for (k, n) in shapes.iter().enumerate() {
        for m in &shapes[..k] {
            for x in sys.carrier() {
                if let (Some(a), Some(b)) = (sys.power_apply(n, x), sys.power_apply(m, x)) {
                    if a == b {
                        return Err(DcWitness {
                            n: n.clone(),
                            m: m.clone(),
                            x: x.clone(),
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

/// The germ groupoid of a discrete system together with the quotient map.
/// On a discrete carrier the germ of `(x, z, y)` is determined by `(x, y)`.
#[derive(Clone, Debug)]
pub struct GermQuotient<P> {
    pub germs: FiniteGroupoid<P>,
    /// `pi[i]` is the germ index of arrow `i` of the source groupoid.
    pub pi: Vec<usize>,
}

/// The germ of `(x, z, y)` on a discrete carrier: `(x, [], y)`.
pub fn germ_of<P: Point>(a: &Arrow<P>) -> Arrow<P> {
    Arrow {
        range: a.range.clone(),
        z: ZVec::zero(0),
        source: a.source.clone(),
    }
}

pub fn germ_quotient<P: Point>(g: &FiniteGroupoid<P>) -> GermQuotient<P> {
    let germs = FiniteGroupoid::from_arrows(
        g.units().to_vec(),
        0,
        g.arrows().iter().map(|a| (germ_of(a), None)).collect(),
    );
    let pi = g
        .arrows()
        .iter()
        .map(|a| germs.index_of(&germ_of(a)).expect("germ exists"))
        .collect();
    GermQuotient { germs, pi }
}

impl<P: Point> GermQuotient<P> {
    /// Two distinct arrows with the same germ, if any.
    pub fn injectivity_failure(&self) -> Option<(usize, usize)> {
        let mut seen: HashMap<usize, usize> = HashMap::new();
        for (i, &p) in self.pi.iter().enumerate() {
            if let Some(&j) = seen.get(&p) {
                return Some((j, i));
            }
            seen.insert(p, i);
        }
        None
    }

    pub fn is_injective(&self) -> bool {
        self.injectivity_failure().is_none()
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.germs.len()];
        for &p in &self.pi {
            hit[p] = true;
        }
        hit.into_iter().all(|h| h)
    }

    /// `π(γη) = π(γ)π(η)` on every composable pair whose product lies in
    /// `g`; products outside a truncation are left to the axiom check.
    pub fn check_homomorphism(&self, g: &FiniteGroupoid<P>) -> Result<(), (usize, usize)> {
        for (i, j) in g.composable_pairs() {
            let Ok(k) = g.compose(i, j) else { continue };
            if self.germs.compose(self.pi[i], self.pi[j]).ok() != Some(self.pi[k]) {
                return Err((i, j));
            }
        }
        Ok(())
    }

    /// Pairs whose images are composable must themselves be composable.
    pub fn check_lifting(&self, g: &FiniteGroupoid<P>) -> Result<(), (usize, usize)> {
        for i in 0..g.len() {
            let image_source = &self.germs.arrow(self.pi[i]).source;
            for j in 0..g.len() {
                if &self.germs.arrow(self.pi[j]).range == image_source
                    && g.arrow(i).source != g.arrow(j).range
                {
                    return Err((i, j));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests;
