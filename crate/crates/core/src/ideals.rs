//! The r-fold exact sequence attached to a tuple of ideals, modelled on
//! supports: ideals are subsets of a finite base, sums are unions,
//! intersections are intersections and quotients are differences.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::dynsys::{Mgds, Point};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdealError {
    #[error("the index selection is empty")]
    EmptySelection,
    #[error("ideal index {index} is out of range for a tuple of {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("J_{index} is not contained in the base set")]
    NotSubset { index: usize },
    #[error("a tuple needs at least one ideal")]
    Empty,
}

/// Subsets `J_1, …, J_r` of a finite base `P`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdealTuple<P> {
    base: BTreeSet<P>,
    ideals: Vec<BTreeSet<P>>,
}

impl<P: Point> IdealTuple<P> {
    pub fn new(base: BTreeSet<P>, ideals: Vec<BTreeSet<P>>) -> Result<Self, IdealError> {
        if ideals.is_empty() {
            return Err(IdealError::Empty);
        }
        if let Some(index) = ideals.iter().position(|j| !j.is_subset(&base)) {
            return Err(IdealError::NotSubset { index: index + 1 });
        }
        Ok(IdealTuple { base, ideals })
    }

    pub fn base(&self) -> &BTreeSet<P> {
        &self.base
    }

    pub fn ideals(&self) -> &[BTreeSet<P>] {
        &self.ideals
    }

    /// Number of ideals `r`.
    pub fn len(&self) -> usize {
        self.ideals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ideals.is_empty()
    }

    fn selected(&self, s: &[usize]) -> Result<Vec<&BTreeSet<P>>, IdealError> {
        if s.is_empty() {
            return Err(IdealError::EmptySelection);
        }
        s.iter()
            .map(|&i| {
                i.checked_sub(1).and_then(|k| self.ideals.get(k)).ok_or(
                    IdealError::IndexOutOfRange {
                        index: i,
                        len: self.ideals.len(),
                    },
                )
            })
            .collect()
    }

    /// `J^S = ⋂_{j ∈ S} J_j` for a nonempty set of 1-based indices.
    pub fn j_meet(&self, s: &[usize]) -> Result<BTreeSet<P>, IdealError> {
        let sets = self.selected(s)?;
        Ok(sets[0]
            .iter()
            .filter(|p| sets[1..].iter().all(|j| j.contains(p)))
            .cloned()
            .collect())
    }

    /// `J_S = Σ_{j ∈ S} J_j`, a union of supports.
    pub fn j_join(&self, s: &[usize]) -> Result<BTreeSet<P>, IdealError> {
        Ok(self.selected(s)?.into_iter().flatten().cloned().collect())
    }
}

/// Where a stage sits in the sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StageRole {
    KernelEnd,
    Middle,
    QuotientEnd,
}

impl fmt::Display for StageRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StageRole::KernelEnd => "kernel",
            StageRole::Middle => "middle",
            StageRole::QuotientEnd => "quotient",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceStage<P> {
    pub support: BTreeSet<P>,
    pub role: StageRole,
}

/// The supports `Y_0, …, Y_{r+1}` of the stages of the sequence.
pub fn build_sequence<P: Point>(t: &IdealTuple<P>) -> Vec<SequenceStage<P>> {
    let r = t.len();
    let all: Vec<usize> = (1..=r).collect();
    let minus = |keep: BTreeSet<P>, drop: &[usize]| -> BTreeSet<P> {
        match t.j_join(drop) {
            Ok(union) => keep.difference(&union).cloned().collect(),
            Err(_) => keep,
        }
    };
    let meet_from = |k: usize| -> BTreeSet<P> {
        // J_k ∩ … ∩ J_r, the whole base when the range is empty.
        t.j_meet(&all[k - 1..]).unwrap_or_else(|_| t.base.clone())
    };
    let mut supports = Vec::with_capacity(r + 2);
    supports.push(t.j_meet(&all).expect("r ≥ 1"));
    supports.push(meet_from(2));
    for k in 2..r {
        supports.push(minus(meet_from(k + 1), &all[..k - 1]));
    }
    if r >= 2 {
        supports.push(minus(t.base.clone(), &all[..r - 1]));
    }
    supports.push(minus(t.base.clone(), &all));
    supports
        .into_iter()
        .enumerate()
        .map(|(k, support)| SequenceStage {
            support,
            role: match k {
                0 => StageRole::KernelEnd,
                k if k == r + 1 => StageRole::QuotientEnd,
                _ => StageRole::Middle,
            },
        })
        .collect()
}

/// Which exactness condition failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExactnessCheck {
    /// `Y_0 ⊆ Y_1`.
    Injective,
    /// `Y_{k−1} ∩ Y_k = Y_k ∖ Y_{k+1}`.
    ImageIsKernel(usize),
    /// `Y_{r+1} ⊆ Y_r`.
    Surjective,
    /// `Σ_k (−1)^k 1_{Y_k} = 0`.
    AlternatingSum,
}

impl fmt::Display for ExactnessCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactnessCheck::Injective => f.write_str("injective"),
            ExactnessCheck::ImageIsKernel(k) => write!(f, "exact_at_{k}"),
            ExactnessCheck::Surjective => f.write_str("surjective"),
            ExactnessCheck::AlternatingSum => f.write_str("alternating_sum"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{check} fails at {point:?}")]
pub struct ExactnessFailure<P: fmt::Debug> {
    pub check: ExactnessCheck,
    pub point: P,
}

/// Check injectivity, exactness at every middle stage, surjectivity and
/// the vanishing of the alternating indicator sum on `base`.
pub fn verify_exactness<P: Point>(
    base: &BTreeSet<P>,
    stages: &[SequenceStage<P>],
) -> Result<(), ExactnessFailure<P>> {
    let y: Vec<&BTreeSet<P>> = stages.iter().map(|s| &s.support).collect();
    let r = y.len() - 2;
    let fail = |check, point: &P| ExactnessFailure {
        check,
        point: point.clone(),
    };
    if let Some(p) = y[0].difference(y[1]).next() {
        return Err(fail(ExactnessCheck::Injective, p));
    }
    for k in 1..=r {
        let image: BTreeSet<&P> = y[k - 1].intersection(y[k]).collect();
        let kernel: BTreeSet<&P> = y[k].difference(y[k + 1]).collect();
        if let Some(p) = image.symmetric_difference(&kernel).next() {
            return Err(fail(ExactnessCheck::ImageIsKernel(k), p));
        }
    }
    if let Some(p) = y[r + 1].difference(y[r]).next() {
        return Err(fail(ExactnessCheck::Surjective, p));
    }
    for p in base {
        let sum: i64 = y
            .iter()
            .enumerate()
            .filter(|(_, s)| s.contains(p))
            .map(|(k, _)| if k % 2 == 0 { 1 } else { -1 })
            .sum();
        if sum != 0 {
            return Err(fail(ExactnessCheck::AlternatingSum, p));
        }
    }
    Ok(())
}

/// The tuple `X_k = {x : σ(x)_k < ∞}` on the carrier of a system.
pub fn from_mgds<P: Point>(sys: &Mgds<P>) -> IdealTuple<P> {
    IdealTuple::new(
        sys.carrier().iter().cloned().collect(),
        sys.finite_coordinate_sets(),
    )
    .expect("finite-coordinate sets lie in the carrier")
}

/// Every tuple of `r` subsets of `{0, …, n−1}`.
pub fn all_tuples(n: u32, r: usize) -> impl Iterator<Item = IdealTuple<u32>> {
    let subsets = 1u64 << n;
    let count = subsets.pow(r as u32);
    let base: BTreeSet<u32> = (0..n).collect();
    (0..count).map(move |mut code| {
        let ideals = (0..r)
            .map(|_| {
                let mask = code % subsets;
                code /= subsets;
                (0..n).filter(|i| mask >> i & 1 == 1).collect()
            })
            .collect();
        IdealTuple::new(base.clone(), ideals).expect("subsets of the base")
    })
}

/// Run [`verify_exactness`] on every tuple with `|P| ≤ max_points` and
/// `1 ≤ r ≤ max_rank`; returns the number of tuples checked or the first
/// failure.
pub fn exhaustive_exactness(
    max_points: u32,
    max_rank: usize,
) -> Result<usize, (IdealTuple<u32>, ExactnessFailure<u32>)> {
    let mut checked = 0;
    for n in 0..=max_points {
        for r in 1..=max_rank {
            for t in all_tuples(n, r) {
                verify_exactness(t.base(), &build_sequence(&t)).map_err(|e| (t.clone(), e))?;
                checked += 1;
            }
        }
    }
    Ok(checked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynsys::builders::grid_system;

    fn set(v: &[u32]) -> BTreeSet<u32> {
        v.iter().copied().collect()
    }

    fn example() -> IdealTuple<u32> {
        IdealTuple::new(set(&[1, 2, 3, 4]), vec![set(&[1, 2]), set(&[2, 3])]).unwrap()
    }

    fn supports<P: Point>(t: &IdealTuple<P>) -> Vec<BTreeSet<P>> {
        build_sequence(t).into_iter().map(|s| s.support).collect()
    }

    #[test]
    fn meets_and_joins() {
        let t = example();
        assert_eq!(t.j_meet(&[1, 2]).unwrap(), set(&[2]));
        assert_eq!(t.j_join(&[1, 2]).unwrap(), set(&[1, 2, 3]));
        assert_eq!(t.j_meet(&[]), Err(IdealError::EmptySelection));
        assert_eq!(
            t.j_join(&[3]),
            Err(IdealError::IndexOutOfRange { index: 3, len: 2 })
        );
        assert_eq!(
            t.j_meet(&[0]),
            Err(IdealError::IndexOutOfRange { index: 0, len: 2 })
        );
        assert_eq!(
            IdealTuple::new(set(&[1]), vec![set(&[2])]),
            Err(IdealError::NotSubset { index: 1 })
        );
    }

    #[test]
    fn two_ideal_example() {
        let t = example();
        let y = supports(&t);
        assert_eq!(y, vec![set(&[2]), set(&[2, 3]), set(&[3, 4]), set(&[4])]);
        assert_eq!(y[0], t.j_meet(&[1, 2]).unwrap());
        verify_exactness(t.base(), &build_sequence(&t)).unwrap();
        let roles: Vec<StageRole> = build_sequence(&t).iter().map(|s| s.role).collect();
        assert_eq!(
            roles,
            vec![
                StageRole::KernelEnd,
                StageRole::Middle,
                StageRole::Middle,
                StageRole::QuotientEnd
            ]
        );
    }

    #[test]
    fn degenerate_tuples() {
        let p = set(&[1, 2, 3, 4]);
        let t = IdealTuple::new(p.clone(), vec![set(&[1, 3])]).unwrap();
        assert_eq!(supports(&t), vec![set(&[1, 3]), p.clone(), set(&[2, 4])]);
        let t = IdealTuple::new(p.clone(), vec![p.clone(), p.clone()]).unwrap();
        assert_eq!(supports(&t), vec![p.clone(), p, set(&[]), set(&[])]);
    }

    #[test]
    fn broken_sequences_are_reported() {
        let base = set(&[1, 2]);
        let stage = |v: &[u32]| SequenceStage {
            support: set(v),
            role: StageRole::Middle,
        };
        let err = verify_exactness(&base, &[stage(&[1]), stage(&[2]), stage(&[])]).unwrap_err();
        assert_eq!(err.check, ExactnessCheck::Injective);
        assert_eq!(err.point, 1);
        let err = verify_exactness(&base, &[stage(&[]), stage(&[1]), stage(&[2])]).unwrap_err();
        assert_eq!(err.check, ExactnessCheck::ImageIsKernel(1));
    }

    #[test]
    fn all_small_tuples_are_exact() {
        let count = exhaustive_exactness(4, 3).unwrap();
        let expected: u64 = (0..=4u32)
            .flat_map(|n| (1..=3u32).map(move |r| (1u64 << n).pow(r)))
            .sum();
        assert_eq!(count as u64, expected);
    }

    #[test]
    fn grid_tuple_has_everything_finite() {
        let sys = grid_system(2, 3);
        let t = from_mgds(&sys);
        assert!(t.ideals().iter().all(|j| j == t.base()));
        let y = supports(&t);
        assert_eq!(y[0].len(), 9);
        assert_eq!(y[1].len(), 9);
        assert!(y[2].is_empty() && y[3].is_empty());
    }
}
