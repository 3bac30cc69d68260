//! Eventually periodic infinite paths `x = prefix · cycle · cycle · …`.
//!
//! Values are kept in a canonical form: the cycle has the graded-minimal
//! period of the tail and the prefix is the graded-minimal head after which
//! the path is periodic. Two values represent the same infinite path exactly
//! when they are equal as structs.

use std::fmt;

use rand::{Rng, RngCore};
use thiserror::Error;

use crate::kgraph::{GraphError, KGraph, Path};
use crate::shape::Shape;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RationalError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("cycle is not a loop at the source of the prefix")]
    Endpoints,
    #[error("cycle shape {0} is not positive in every coordinate")]
    CycleNotPositive(Shape),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct RationalPath {
    prefix: Path,
    cycle: Path,
}

impl RationalPath {
    /// Build and canonicalise `prefix · cycle^∞`.
    pub fn new(g: &KGraph, prefix: Path, cycle: Path) -> Result<RationalPath, RationalError> {
        Self::raw(prefix, cycle)?.canonical(g)
    }

    /// `cycle^∞`.
    pub fn periodic(g: &KGraph, cycle: Path) -> Result<RationalPath, RationalError> {
        let prefix = g.vertex_path(cycle.target());
        Self::new(g, prefix, cycle)
    }

    fn raw(prefix: Path, cycle: Path) -> Result<RationalPath, RationalError> {
        if cycle.source() != cycle.target() || prefix.source() != cycle.target() {
            return Err(RationalError::Endpoints);
        }
        if cycle.shape().coords().contains(&0) {
            return Err(RationalError::CycleNotPositive(cycle.shape().clone()));
        }
        Ok(RationalPath { prefix, cycle })
    }

    pub fn prefix(&self) -> &Path {
        &self.prefix
    }

    pub fn cycle(&self) -> &Path {
        &self.cycle
    }

    /// `t(x)`, the vertex at shape 0.
    pub fn target(&self) -> usize {
        self.prefix.target()
    }

    pub fn rank(&self) -> usize {
        self.cycle.shape().rank()
    }

    /// `prefix · cycle^copies`.
    pub fn unroll(&self, g: &KGraph, copies: u32) -> Result<Path, GraphError> {
        let mut p = self.prefix.clone();
        for _ in 0..copies {
            p = g.compose(&p, &self.cycle)?;
        }
        Ok(p)
    }

    /// Least number of cycle copies after which the unrolled path covers `n`.
    fn copies_for(&self, n: &Shape) -> u32 {
        let p = self.prefix.shape();
        let c = self.cycle.shape();
        (0..n.rank())
            .map(|j| n[j].saturating_sub(p[j]).div_ceil(c[j]))
            .max()
            .unwrap_or(0)
    }

    /// The head `x(0, n)`.
    pub fn head(&self, g: &KGraph, n: &Shape) -> Result<Path, GraphError> {
        let u = self.unroll(g, self.copies_for(n))?;
        Ok(g.factorize(&u, n)?.0)
    }

    /// The segment `x(n, n')` for `n ≤ n'`.
    pub fn segment(&self, g: &KGraph, from: &Shape, to: &Shape) -> Result<Path, GraphError> {
        let u = self.unroll(g, self.copies_for(to))?;
        g.segment(&u, from, to)
    }

    fn shift_raw(&self, g: &KGraph, k: &Shape) -> Result<RationalPath, GraphError> {
        let u = self.unroll(g, self.copies_for(k))?;
        let (_, tail) = g.factorize(&u, k)?;
        Ok(RationalPath {
            prefix: tail,
            cycle: self.cycle.clone(),
        })
    }

    /// The tail `x(k, ∞)`.
    pub fn shift(&self, g: &KGraph, k: &Shape) -> Result<RationalPath, GraphError> {
        self.shift_raw(g, k)?.canonical(g).map_err(|e| match e {
            RationalError::Graph(e) => e,
            other => unreachable!("shift keeps a valid cycle: {other}"),
        })
    }

    /// `λx`, defined when `s(λ) = t(x)`.
    pub fn prepend(&self, g: &KGraph, lambda: &Path) -> Result<RationalPath, GraphError> {
        let prefix = g.compose(lambda, &self.prefix)?;
        RationalPath {
            prefix,
            cycle: self.cycle.clone(),
        }
        .canonical(g)
        .map_err(|e| match e {
            RationalError::Graph(e) => e,
            other => unreachable!("prepend keeps a valid cycle: {other}"),
        })
    }

    /// Window length sufficient to decide equality of two representations:
    /// `σ(p_a) ∨ σ(p_b) + σ(c_a) + σ(c_b)`.
    pub fn comparison_window(a: &RationalPath, b: &RationalPath) -> Shape {
        let m = a.prefix.shape().join(b.prefix.shape());
        &(&m + a.cycle.shape()) + b.cycle.shape()
    }

    /// Whether two (not necessarily canonical) representations describe the
    /// same infinite path, decided on [`RationalPath::comparison_window`].
    pub fn same_path(g: &KGraph, a: &RationalPath, b: &RationalPath) -> Result<bool, GraphError> {
        if a.target() != b.target() {
            return Ok(false);
        }
        let w = Self::comparison_window(a, b);
        Ok(a.head(g, &w)? == b.head(g, &w)?)
    }

    fn canonical(self, g: &KGraph) -> Result<RationalPath, RationalError> {
        let rank = self.rank();
        let big = self.cycle.shape().clone();
        let tail = RationalPath {
            prefix: g.vertex_path(self.cycle.target()),
            cycle: self.cycle.clone(),
        };
        // Graded-minimal positive period of the periodic tail.
        let mut period = big.clone();
        for k in Shape::graded_up_to(rank, big.total()) {
            if k.coords().contains(&0) {
                continue;
            }
            if k == big {
                break;
            }
            let shifted = tail.segment(g, &k, &(&k + &big))?;
            if shifted == self.cycle {
                period = k;
                break;
            }
        }
        // Graded-minimal q with x(q, ∞) periodic with that period.
        let mut start = self.prefix.shape().clone();
        for q in Shape::graded_up_to(rank, start.total()) {
            if q == start {
                break;
            }
            let a = self.shift_raw(g, &q)?;
            let b = self.shift_raw(g, &(&q + &period))?;
            if Self::same_path(g, &a, &b)? {
                start = q;
                break;
            }
        }
        let end = &start + &period;
        let u = self.unroll(g, self.copies_for(&end))?;
        let (prefix, rest) = g.factorize(&u, &start)?;
        let (cycle, _) = g.factorize(&rest, &period)?;
        Self::raw(prefix, cycle)
    }

    pub fn display(&self, g: &KGraph) -> String {
        if self.prefix.is_vertex() {
            format!("({})^inf", g.fmt_path(&self.cycle))
        } else {
            format!(
                "{}.({})^inf",
                g.fmt_path(&self.prefix),
                g.fmt_path(&self.cycle)
            )
        }
    }
}

/// A random `prefix · cycle^∞` with shapes drawn below the two bounds
/// (cycle coordinates at least 1). Gives up after `attempts` draws, which
/// only happens when cycles of those shapes are rare or absent.
pub fn random_rational(
    g: &KGraph,
    rng: &mut impl Rng,
    max_prefix: &Shape,
    max_cycle: &Shape,
    attempts: usize,
) -> Option<RationalPath> {
    let pick = |rng: &mut dyn RngCore, all: Vec<Path>| {
        (!all.is_empty()).then(|| all[rng.random_range(0..all.len())].clone())
    };
    for _ in 0..attempts {
        let cs = Shape::new(
            max_cycle
                .coords()
                .iter()
                .map(|&c| rng.random_range(1..=c.max(1)))
                .collect(),
        );
        let ps = Shape::new(
            max_prefix
                .coords()
                .iter()
                .map(|&c| rng.random_range(0..=c))
                .collect(),
        );
        let loops: Vec<Path> = g
            .enumerate(&cs, None, None)
            .into_iter()
            .filter(|c| c.source() == c.target())
            .collect();
        let Some(cycle) = pick(rng, loops) else {
            continue;
        };
        let Some(prefix) = pick(rng, g.enumerate(&ps, Some(cycle.target()), None)) else {
            continue;
        };
        if let Ok(x) = RationalPath::new(g, prefix, cycle) {
            return Some(x);
        }
    }
    None
}

impl fmt::Display for RationalPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:?}.({:?})^inf",
            self.prefix.edges(),
            self.cycle.edges()
        )
    }
}
