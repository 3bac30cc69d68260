//! Shapes (degrees) in `N^r`, extended shapes in `(N ∪ {∞})^r`, and
//! translation vectors in `Z^r`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Index, Neg, Sub};
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShapeError {
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },
    #[error("cannot parse shape {0:?}")]
    Parse(String),
}

/// An element of `N^r`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Shape(Vec<u32>);

impl Shape {
    pub fn new(coords: Vec<u32>) -> Self {
        Shape(coords)
    }

    pub fn zero(rank: usize) -> Self {
        Shape(vec![0; rank])
    }

    /// The generator `e_j` (0-based `j`).
    pub fn unit(rank: usize, j: usize) -> Self {
        let mut v = vec![0; rank];
        v[j] = 1;
        Shape(v)
    }

    pub fn splat(rank: usize, value: u32) -> Self {
        Shape(vec![value; rank])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Sum of coordinates.
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &Shape) -> bool {
        debug_assert_eq!(self.rank(), other.rank());
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Componentwise maximum `self ∨ other`.
    pub fn join(&self, other: &Shape) -> Shape {
        Shape(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    /// Componentwise minimum.
    pub fn meet(&self, other: &Shape) -> Shape {
        Shape(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.min(b))
                .collect(),
        )
    }

    /// `self − other`, defined when `other ≤ self`.
    pub fn checked_sub(&self, other: &Shape) -> Option<Shape> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Shape)
    }

    pub fn scale(&self, factor: u32) -> Shape {
        Shape(self.0.iter().map(|c| c * factor).collect())
    }

    /// Replace coordinate `j`.
    pub fn with(&self, j: usize, value: u32) -> Shape {
        let mut v = self.0.clone();
        v[j] = value;
        Shape(v)
    }

    pub fn to_zvec(&self) -> ZVec {
        ZVec(self.0.iter().map(|&c| c as i64).collect())
    }

    pub fn to_extended(&self) -> ExtShape {
        ExtShape(self.0.iter().map(|&c| Coord::Finite(c)).collect())
    }

    /// All shapes `n` with `0 ≤ n ≤ self`, in lexicographic order.
    pub fn below(&self) -> ShapesBelow {
        ShapesBelow {
            bound: self.clone(),
            next: Some(Shape::zero(self.rank())),
        }
    }

    /// All shapes of the given rank with coordinate sum at most `max_total`,
    /// in graded order.
    pub fn graded_up_to(rank: usize, max_total: u32) -> Vec<Shape> {
        let mut out = Vec::new();
        for total in 0..=max_total {
            let mut current = vec![0; rank];
            compositions(total, 0, &mut current, &mut out);
        }
        out
    }

    /// Graded order: compare totals first, then lexicographically.
    pub fn graded_cmp(&self, other: &Shape) -> Ordering {
        self.total()
            .cmp(&other.total())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl Index<usize> for Shape {
    type Output = u32;
    fn index(&self, j: usize) -> &u32 {
        &self.0[j]
    }
}

impl Add for &Shape {
    type Output = Shape;
    fn add(self, rhs: &Shape) -> Shape {
        debug_assert_eq!(self.rank(), rhs.rank());
        Shape(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Add for Shape {
    type Output = Shape;
    fn add(self, rhs: Shape) -> Shape {
        &self + &rhs
    }
}

impl fmt::Debug for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", join_coords(&self.0))
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&join_coords(&self.0))
    }
}

impl FromStr for Shape {
    type Err = ShapeError;

    /// Parses a comma list such as `3,3`; surrounding parentheses are allowed.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let body = s.trim().trim_start_matches('(').trim_end_matches(')');
        if body.trim().is_empty() {
            return Ok(Shape(Vec::new()));
        }
        body.split(',')
            .map(|c| c.trim().parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map(Shape)
            .map_err(|_| ShapeError::Parse(s.to_string()))
    }
}

fn join_coords<T: fmt::Display>(v: &[T]) -> String {
    v.iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn compositions(remaining: u32, at: usize, current: &mut Vec<u32>, out: &mut Vec<Shape>) {
    if at + 1 >= current.len() {
        if let Some(last) = current.last_mut() {
            *last = remaining;
            out.push(Shape(current.clone()));
        } else if remaining == 0 {
            out.push(Shape(Vec::new()));
        }
        return;
    }
    for c in 0..=remaining {
        current[at] = c;
        compositions(remaining - c, at + 1, current, out);
    }
}

/// Iterator over the box `{n : 0 ≤ n ≤ bound}`.
pub struct ShapesBelow {
    bound: Shape,
    next: Option<Shape>,
}

impl Iterator for ShapesBelow {
    type Item = Shape;

    fn next(&mut self) -> Option<Shape> {
        let current = self.next.take()?;
        let mut succ = current.0.clone();
        let mut j = succ.len();
        loop {
            if j == 0 {
                self.next = None;
                break;
            }
            j -= 1;
            if succ[j] < self.bound.0[j] {
                succ[j] += 1;
                self.next = Some(Shape(succ));
                break;
            }
            succ[j] = 0;
        }
        Some(current)
    }
}

/// A coordinate of an extended shape.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Coord {
    Finite(u32),
    Infinite,
}

impl Coord {
    pub fn is_finite(self) -> bool {
        matches!(self, Coord::Finite(_))
    }

    pub fn finite(self) -> Option<u32> {
        match self {
            Coord::Finite(v) => Some(v),
            Coord::Infinite => None,
        }
    }
}

impl PartialOrd for Coord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Coord {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Coord::Finite(a), Coord::Finite(b)) => a.cmp(b),
            (Coord::Finite(_), Coord::Infinite) => Ordering::Less,
            (Coord::Infinite, Coord::Finite(_)) => Ordering::Greater,
            (Coord::Infinite, Coord::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coord::Finite(v) => write!(f, "{v}"),
            Coord::Infinite => f.write_str("inf"),
        }
    }
}

/// An element of `(N ∪ {∞})^r`. `∞` absorbs addition and dominates every
/// natural number.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtShape(Vec<Coord>);

impl ExtShape {
    pub fn new(coords: Vec<Coord>) -> Self {
        ExtShape(coords)
    }

    pub fn infinite(rank: usize) -> Self {
        ExtShape(vec![Coord::Infinite; rank])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Coord] {
        &self.0
    }

    pub fn coord(&self, j: usize) -> Coord {
        self.0[j]
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn to_finite(&self) -> Option<Shape> {
        self.0
            .iter()
            .map(|c| c.finite())
            .collect::<Option<Vec<_>>>()
            .map(Shape)
    }

    /// Indices of the infinite coordinates.
    pub fn infinite_set(&self) -> Vec<usize> {
        (0..self.rank())
            .filter(|&j| !self.0[j].is_finite())
            .collect()
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &ExtShape) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Whether the finite shape `n` lies below `self`.
    pub fn dominates(&self, n: &Shape) -> bool {
        self.0
            .iter()
            .zip(n.coords())
            .all(|(a, &b)| *a >= Coord::Finite(b))
    }

    pub fn join(&self, other: &ExtShape) -> ExtShape {
        ExtShape(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    pub fn add(&self, n: &Shape) -> ExtShape {
        ExtShape(
            self.0
                .iter()
                .zip(n.coords())
                .map(|(a, &b)| match a {
                    Coord::Finite(v) => Coord::Finite(v + b),
                    Coord::Infinite => Coord::Infinite,
                })
                .collect(),
        )
    }

    /// `self − n` for `n ≤ self`; `∞ − n = ∞`.
    pub fn checked_sub(&self, n: &Shape) -> Option<ExtShape> {
        self.0
            .iter()
            .zip(n.coords())
            .map(|(a, &b)| match a {
                Coord::Finite(v) => v.checked_sub(b).map(Coord::Finite),
                Coord::Infinite => Some(Coord::Infinite),
            })
            .collect::<Option<Vec<_>>>()
            .map(ExtShape)
    }
}

impl fmt::Debug for ExtShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", join_coords(&self.0))
    }
}

impl fmt::Display for ExtShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&join_coords(&self.0))
    }
}

impl FromStr for ExtShape {
    type Err = ShapeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let body = s.trim().trim_start_matches('(').trim_end_matches(')');
        if body.trim().is_empty() {
            return Ok(ExtShape(Vec::new()));
        }
        body.split(',')
            .map(|c| match c.trim() {
                "inf" | "∞" => Ok(Coord::Infinite),
                other => other.parse::<u32>().map(Coord::Finite),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(ExtShape)
            .map_err(|_| ShapeError::Parse(s.to_string()))
    }
}

/// A translation vector in `Z^r`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ZVec(Vec<i64>);

impl ZVec {
    pub fn new(coords: Vec<i64>) -> Self {
        ZVec(coords)
    }

    pub fn zero(rank: usize) -> Self {
        ZVec(vec![0; rank])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// `m − n` for shapes.
    pub fn difference(m: &Shape, n: &Shape) -> ZVec {
        ZVec(
            m.coords()
                .iter()
                .zip(n.coords())
                .map(|(&a, &b)| a as i64 - b as i64)
                .collect(),
        )
    }

    /// Keep only the coordinates in `set`, zeroing the rest (`z_J`).
    pub fn project(&self, set: &[usize]) -> ZVec {
        ZVec(
            (0..self.rank())
                .map(|j| if set.contains(&j) { self.0[j] } else { 0 })
                .collect(),
        )
    }

    /// Concatenate two vectors (used for product groupoids).
    pub fn concat(&self, other: &ZVec) -> ZVec {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        ZVec(v)
    }

    pub fn split_at(&self, mid: usize) -> (ZVec, ZVec) {
        (ZVec(self.0[..mid].to_vec()), ZVec(self.0[mid..].to_vec()))
    }

    /// The nonnegative and nonpositive parts, as shapes `(z⁺, z⁻)` with
    /// `z = z⁺ − z⁻`.
    pub fn split_signs(&self) -> (Shape, Shape) {
        let pos = self.0.iter().map(|&c| c.max(0) as u32).collect();
        let neg = self.0.iter().map(|&c| (-c).max(0) as u32).collect();
        (Shape(pos), Shape(neg))
    }
}

impl Index<usize> for ZVec {
    type Output = i64;
    fn index(&self, j: usize) -> &i64 {
        &self.0[j]
    }
}

impl Add for &ZVec {
    type Output = ZVec;
    fn add(self, rhs: &ZVec) -> ZVec {
        debug_assert_eq!(self.rank(), rhs.rank());
        ZVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &ZVec {
    type Output = ZVec;
    fn sub(self, rhs: &ZVec) -> ZVec {
        ZVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &ZVec {
    type Output = ZVec;
    fn neg(self) -> ZVec {
        ZVec(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Debug for ZVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", join_coords(&self.0))
    }
}

impl fmt::Display for ZVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&join_coords(&self.0))
    }
}

impl FromStr for ZVec {
    type Err = ShapeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let body = s.trim().trim_start_matches('(').trim_end_matches(')');
        if body.trim().is_empty() {
            return Ok(ZVec(Vec::new()));
        }
        body.split(',')
            .map(|c| c.trim().parse::<i64>())
            .collect::<Result<Vec<_>, _>>()
            .map(ZVec)
            .map_err(|_| ShapeError::Parse(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[u32]) -> Shape {
        Shape::new(v.to_vec())
    }

    #[test]
    fn join_is_componentwise_max() {
        assert_eq!(s(&[1, 0]).join(&s(&[0, 1])), s(&[1, 1]));
        assert_eq!(s(&[3, 1]).join(&s(&[2, 2])), s(&[3, 2]));
    }

    #[test]
    fn partial_subtraction() {
        assert_eq!(s(&[3, 2]).checked_sub(&s(&[1, 2])), Some(s(&[2, 0])));
        assert_eq!(s(&[3, 2]).checked_sub(&s(&[4, 0])), None);
    }

    #[test]
    fn box_enumeration_is_lexicographic_and_complete() {
        let all: Vec<_> = s(&[1, 2]).below().collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], s(&[0, 0]));
        assert_eq!(all[1], s(&[0, 1]));
        assert_eq!(all[5], s(&[1, 2]));
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn infinity_absorbs_and_dominates() {
        let x: ExtShape = "inf,2".parse().unwrap();
        assert_eq!(x.add(&s(&[5, 1])), "inf,3".parse().unwrap());
        assert_eq!(x.checked_sub(&s(&[7, 2])), Some("inf,0".parse().unwrap()));
        assert!(x.dominates(&s(&[1000, 2])));
        assert!(!x.dominates(&s(&[0, 3])));
        assert!(s(&[9, 2]).to_extended().le(&x));
        assert_eq!(x.join(&"3,5".parse().unwrap()), "inf,5".parse().unwrap());
    }

    #[test]
    fn graded_enumeration() {
        let all = Shape::graded_up_to(2, 2);
        let expected: Vec<Shape> = [[0, 0], [0, 1], [1, 0], [0, 2], [1, 1], [2, 0]]
            .iter()
            .map(|c| s(c))
            .collect();
        assert_eq!(all, expected);
        assert!(all.windows(2).all(|w| w[0].graded_cmp(&w[1]).is_lt()));
    }

    #[test]
    fn parse_and_print() {
        let z: ZVec = "(2,-1)".parse().unwrap();
        assert_eq!(z.to_string(), "2,-1");
        assert_eq!(z.split_signs(), (s(&[2, 0]), s(&[0, 1])));
        assert!("1,x".parse::<Shape>().is_err());
    }
}
