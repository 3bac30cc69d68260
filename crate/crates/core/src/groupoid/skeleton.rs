//! The combinatorial part of the amenability argument: the cocycle `c_J`,
//! the relation `R_J = ker c_J` on `X_J`, its exhaustion by `R_J^N`, and the
//! `Y_k` sets built from invariant subsets of the unit space.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use super::{Arrow, FiniteGroupoid, Semidirect};
use crate::dynsys::Point;
use crate::shape::{Coord, ExtShape, Shape};

/// A failed step of the skeleton verification.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SkeletonFailure<P: fmt::Debug> {
    #[error("X_J is not invariant: {0}")]
    NotInvariant(Arrow<P>),
    #[error("c_J is not additive on {left} and {right}")]
    NotAdditive { left: Arrow<P>, right: Arrow<P> },
    #[error("translation part of {0} off J differs from the exit-time difference")]
    ExitTimeMismatch(Arrow<P>),
    #[error("{left} and {right} in R_J have the same endpoints")]
    NotInjective { left: Arrow<P>, right: Arrow<P> },
    #[error("R_J^N at N = {level} is not an equivalence relation: {reason}")]
    NotEquivalence { level: Shape, reason: String },
    #[error("R_J^N is not monotone: ({x:?}, {y:?}) at N = {level} is lost at N + e_{coord}")]
    NotMonotone {
        level: Shape,
        coord: usize,
        x: P,
        y: P,
    },
    #[error("the union of all R_J^N differs from R_J")]
    UnionMismatch,
    #[error("the two descriptions of R_J^N differ at N = {level} on ({x:?}, {y:?})")]
    DefinitionsDisagree { level: Shape, x: P, y: P },
}

/// Everything computed for one `J`.
#[derive(Debug, Clone)]
pub struct Skeleton<P> {
    /// 0-based indices of the coordinates in `J`.
    pub j: Vec<usize>,
    pub points: Vec<P>,
    /// Number of arrows of `G|X_J`.
    pub restricted_len: usize,
    /// `R_J` as pairs `(x, y)`.
    pub relation: BTreeSet<(P, P)>,
    /// `R_J^N` for every `N ≤ bound_J`, keyed by `N ∈ ℕ^J`.
    pub levels: BTreeMap<Shape, BTreeSet<(P, P)>>,
}

fn finite_part(t: &ExtShape, coords: &[usize], rank: usize) -> Shape {
    let mut out = Shape::zero(rank);
    for &k in coords {
        match t.coord(k) {
            Coord::Finite(v) => out = out.with(k, v),
            Coord::Infinite => unreachable!("coordinate outside J is finite on X_J"),
        }
    }
    out
}

fn embed(n: &Shape, j: &[usize], rank: usize) -> Shape {
    j.iter()
        .enumerate()
        .fold(Shape::zero(rank), |acc, (i, &k)| acc.with(k, n[i]))
}

/// Build and verify the skeleton on `X_J` for `J ⊆ {0, …, r−1}`:
/// invariance of `X_J`, additivity of `c_J(x, z, y) = z_J`, the exit-time
/// formula for `z` off `J`, injectivity of `R_J → X_J × X_J`, the
/// equivalence-relation and monotonicity properties of every `R_J^N`,
/// agreement of its two descriptions, and `⋃_N R_J^N = R_J`.
pub fn amenability_skeleton<P: Point>(
    semi: &Semidirect<P>,
    j: &[usize],
) -> Result<Skeleton<P>, SkeletonFailure<P>> {
    let sys = semi.system();
    let g = semi.groupoid();
    let rank = g.rank();
    let complement: Vec<usize> = (0..rank).filter(|k| !j.contains(k)).collect();
    let times = sys.exit_times();
    let key: Vec<usize> = j.to_vec();
    let points: Vec<P> = sys.xj_partition().remove(&key).unwrap_or_default();
    let in_xj: BTreeSet<&P> = points.iter().collect();

    g.check_invariant(|p| in_xj.contains(p))
        .map_err(SkeletonFailure::NotInvariant)?;
    let restricted = g.restrict(|p| in_xj.contains(p));

    let c_j = |a: &Arrow<P>| a.z.project(j);
    for (a, b) in restricted.composable_pairs() {
        // Composites are formed as triples, so truncation of the enumeration
        // does not matter here.
        let composite = restricted
            .arrow(a)
            .product(restricted.arrow(b))
            .expect("composable");
        if c_j(&composite) != &c_j(restricted.arrow(a)) + &c_j(restricted.arrow(b)) {
            return Err(SkeletonFailure::NotAdditive {
                left: restricted.arrow(a).clone(),
                right: restricted.arrow(b).clone(),
            });
        }
    }

    for a in restricted.arrows() {
        let sx = finite_part(&times[&a.range], &complement, rank)
            .to_zvec()
            .project(&complement);
        let sy = finite_part(&times[&a.source], &complement, rank)
            .to_zvec()
            .project(&complement);
        if a.z.project(&complement) != &sx - &sy {
            return Err(SkeletonFailure::ExitTimeMismatch(a.clone()));
        }
    }

    let mut relation = BTreeSet::new();
    let mut seen: BTreeMap<(P, P), &Arrow<P>> = BTreeMap::new();
    for a in restricted.arrows().iter().filter(|a| c_j(a).is_zero()) {
        let pair = (a.range.clone(), a.source.clone());
        if let Some(prev) = seen.insert(pair.clone(), a) {
            return Err(SkeletonFailure::NotInjective {
                left: prev.clone(),
                right: a.clone(),
            });
        }
        relation.insert(pair);
    }

    let bound = semi.bound();
    let bound_j = Shape::new(j.iter().map(|&k| bound[k]).collect());
    let mut levels = BTreeMap::new();
    for level in bound_j.below() {
        let pairs: BTreeSet<(P, P)> = relation
            .iter()
            .filter(|(x, y)| {
                level.below().any(|n| {
                    let n = embed(&n, j, rank);
                    let px = &n + &finite_part(&times[x], &complement, rank);
                    let py = &n + &finite_part(&times[y], &complement, rank);
                    matches!(
                        (sys.power_apply(&px, x), sys.power_apply(&py, y)),
                        (Some(a), Some(b)) if a == b
                    )
                })
            })
            .cloned()
            .collect();
        check_equivalence(&points, &pairs).map_err(|reason| SkeletonFailure::NotEquivalence {
            level: level.clone(),
            reason,
        })?;
        // The first description: n_J = m_J ≤ N and T^n x = T^m y.
        for x in &points {
            for y in &points {
                let first = relation.contains(&(x.clone(), y.clone()))
                    && bound.below().any(|n| {
                        (0..j.len()).all(|i| n[j[i]] <= level[i])
                            && bound.below().any(|m| {
                                j.iter().all(|&k| n[k] == m[k])
                                    && matches!(
                                        (sys.power_apply(&n, x), sys.power_apply(&m, y)),
                                        (Some(a), Some(b)) if a == b
                                    )
                            })
                    });
                if first != pairs.contains(&(x.clone(), y.clone())) {
                    return Err(SkeletonFailure::DefinitionsDisagree {
                        level,
                        x: x.clone(),
                        y: y.clone(),
                    });
                }
            }
        }
        levels.insert(level, pairs);
    }

    for (level, pairs) in &levels {
        for coord in 0..j.len() {
            let up = level.with(coord, level[coord] + 1);
            let Some(bigger) = levels.get(&up) else {
                continue;
            };
            if let Some((x, y)) = pairs.iter().find(|p| !bigger.contains(p)) {
                return Err(SkeletonFailure::NotMonotone {
                    level: level.clone(),
                    coord,
                    x: x.clone(),
                    y: y.clone(),
                });
            }
        }
    }
    let union: BTreeSet<(P, P)> = levels.values().flatten().cloned().collect();
    if union != relation {
        return Err(SkeletonFailure::UnionMismatch);
    }

    Ok(Skeleton {
        j: j.to_vec(),
        points,
        restricted_len: restricted.len(),
        relation,
        levels,
    })
}

fn check_equivalence<P: Point>(points: &[P], pairs: &BTreeSet<(P, P)>) -> Result<(), String> {
    if let Some(x) = points
        .iter()
        .find(|x| !pairs.contains(&((*x).clone(), (*x).clone())))
    {
        return Err(format!("not reflexive at {x:?}"));
    }
    if let Some((x, y)) = pairs
        .iter()
        .find(|(x, y)| !pairs.contains(&(y.clone(), x.clone())))
    {
        return Err(format!("not symmetric at ({x:?}, {y:?})"));
    }
    let mut successors: BTreeMap<&P, Vec<&P>> = BTreeMap::new();
    for (x, y) in pairs {
        successors.entry(x).or_default().push(y);
    }
    for (x, y) in pairs {
        for z in successors.get(y).into_iter().flatten() {
            if !pairs.contains(&(x.clone(), (*z).clone())) {
                return Err(format!("not transitive at ({x:?}, {y:?}, {z:?})"));
            }
        }
    }
    Ok(())
}

/// `Y_k = (X_{k+1} ∩ … ∩ X_r) ∖ (X_1 ∪ … ∪ X_{k−1})` for `k = 0, …, r+1`
/// (sets indexed from 1, empty intersections are the whole unit space).
/// Every `X_i` must be invariant; otherwise an arrow leaving it is returned.
pub fn invariant_y_sets<P: Point>(
    g: &FiniteGroupoid<P>,
    sets: &[BTreeSet<P>],
) -> Result<Vec<BTreeSet<P>>, Arrow<P>> {
    for set in sets {
        g.check_invariant(|p| set.contains(p))?;
    }
    let r = sets.len();
    let x_at = |i: usize| &sets[i - 1];
    Ok((0..=r + 1)
        .map(|k| {
            g.units()
                .iter()
                .filter(|p| {
                    (k + 1..=r).all(|i| x_at(i).contains(p)) && !(1..k).any(|i| x_at(i).contains(p))
                })
                .cloned()
                .collect()
        })
        .collect())
}

/// [`invariant_y_sets`] for `X_k = {x : σ(x)_k < ∞}`.
pub fn exit_time_y_sets<P: Point>(semi: &Semidirect<P>) -> Result<Vec<BTreeSet<P>>, Arrow<P>> {
    invariant_y_sets(semi.groupoid(), &semi.system().finite_coordinate_sets())
}
