//! The space `Z` of pairs `(x, y)` with `x` a finite path and `y` an
//! infinite path starting where `x` ends, its commuting shifts `(T, V)`, the
//! map `φ(x, y) = (σ(x), xy)` onto shape-and-path pairs, fibre lifts, the
//! two-sided shifts on `Λ^∞ × (Λ^op)^∞`, and the twist `Θ` on `ℤ^r × G`.
//!
//! Infinite paths are always eventually periodic ([`RationalPath`]), so
//! every equality below is exact.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::dynsys::{closure_under, Mgds, PartialMap, Point};
use crate::groupoid::{Arrow, FiniteGroupoid};
use crate::kgraph::{GraphError, KGraph, Path};
use crate::rational::{random_rational, RationalPath};
use crate::shape::{Shape, ZVec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DualityError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("s(x) = {start} but t(y) = {target}")]
    Endpoints { start: usize, target: usize },
    #[error("T_{shift} is undefined on a point with σ(x) = {have}")]
    OutsideDomain { shift: Shape, have: Shape },
    #[error("no lift of ({cocycle}, {target}) at {at}")]
    NoLift {
        at: String,
        cocycle: ZVec,
        target: String,
    },
    #[error("fibre over {at}: {reason}")]
    FiberMismatch { at: String, reason: String },
}

/// A point `(x, y)` of `Z` with `s(x) = t(y)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ZPoint {
    pub x: Path,
    pub y: RationalPath,
}

/// A point `(n, w)` of `ℕ^r × Λ^∞`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct BasePoint {
    pub n: Shape,
    pub w: RationalPath,
}

/// An element of a fibre: the cocycle value (first the `T`/`S` block, then
/// the `V`/`W` block) and the far endpoint.
pub type FiberElement<Q> = (ZVec, Q);

/// Witness `T^{m1}V^{k1} z = T^{m2}V^{k2} z'` for a lifted arrow.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Lift {
    pub point: ZPoint,
    pub m1: Shape,
    pub k1: Shape,
    pub m2: Shape,
    pub k2: Shape,
}

/// Sizes of one verified fibre.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct FiberReport {
    pub z_elements: usize,
    pub base_elements: usize,
}

/// Operations on `Z` and on `ℕ^r × Λ^∞` over one graph.
#[derive(Clone)]
pub struct ZSpace {
    g: Arc<KGraph>,
}

impl fmt::Debug for ZSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ZSpace")
            .field("rank", &self.g.rank())
            .finish()
    }
}

fn split(c: &ZVec) -> (Shape, Shape) {
    c.split_signs()
}

impl ZSpace {
    pub fn new(g: KGraph) -> Self {
        ZSpace { g: Arc::new(g) }
    }

    pub fn graph(&self) -> &KGraph {
        &self.g
    }

    pub fn rank(&self) -> usize {
        self.g.rank()
    }

    pub fn point(&self, x: Path, y: RationalPath) -> Result<ZPoint, DualityError> {
        if x.source() != y.target() {
            return Err(DualityError::Endpoints {
                start: x.source(),
                target: y.target(),
            });
        }
        Ok(ZPoint { x, y })
    }

    pub fn display(&self, z: &ZPoint) -> String {
        format!("({} | {})", self.g.fmt_path(&z.x), z.y.display(&self.g))
    }

    pub fn display_base(&self, p: &BasePoint) -> String {
        format!("({} | {})", p.n, p.w.display(&self.g))
    }

    /// `T_m(x'x'', y) = (x', x''y)` with `σ(x'') = m`.
    pub fn t_shift(&self, m: &Shape, z: &ZPoint) -> Result<ZPoint, DualityError> {
        let head =
            z.x.shape()
                .checked_sub(m)
                .ok_or_else(|| DualityError::OutsideDomain {
                    shift: m.clone(),
                    have: z.x.shape().clone(),
                })?;
        let (x, moved) = self.g.factorize(&z.x, &head)?;
        let y = z.y.prepend(&self.g, &moved)?;
        Ok(ZPoint { x, y })
    }

    /// `V_k(x, y) = (L_k(x · y(0, k)), y(k, ∞))`.
    pub fn v_shift(&self, k: &Shape, z: &ZPoint) -> Result<ZPoint, DualityError> {
        let grown = self.g.compose(&z.x, &z.y.head(&self.g, k)?)?;
        let (_, x) = self.g.factorize(&grown, k)?;
        let y = z.y.shift(&self.g, k)?;
        Ok(ZPoint { x, y })
    }

    /// `T^m V^k z`, or `None` off the domain.
    pub fn tv(&self, m: &Shape, k: &Shape, z: &ZPoint) -> Option<ZPoint> {
        let v = self.v_shift(k, z).ok()?;
        self.t_shift(m, &v).ok()
    }

    /// `(T_{e_1}, …, T_{e_r}, V_{e_1}, …, V_{e_r})` on the closure of
    /// `seeds` under `depth` generator steps.
    pub fn system(&self, seeds: &[ZPoint], depth: usize) -> Mgds<ZPoint> {
        let r = self.rank();
        let mut generators = Vec::with_capacity(2 * r);
        for j in 0..r {
            let sp = self.clone();
            generators.push(PartialMap::rule(move |z| {
                sp.t_shift(&Shape::unit(r, j), z).ok()
            }));
        }
        for j in 0..r {
            let sp = self.clone();
            generators.push(PartialMap::rule(move |z| {
                sp.v_shift(&Shape::unit(r, j), z).ok()
            }));
        }
        let carrier = closure_under(&generators, seeds, depth);
        let sp = self.clone();
        let flags = (0..2 * r).map(|j| j >= r).collect();
        Mgds::new("Z", carrier, generators)
            .with_shift_complete(flags)
            .with_labels(move |z| sp.display(z))
    }

    /// Seeds `(x, c^∞)` for every cycle `c` of shape `(1, …, 1)` and every
    /// `x` of shape at most `max_x` ending where `c` starts.
    pub fn seeds(&self, max_x: &Shape) -> Vec<ZPoint> {
        let r = self.rank();
        let unit = Shape::splat(r, 1);
        let cycles: Vec<RationalPath> = (0..self.g.vertex_count())
            .flat_map(|v| self.g.enumerate(&unit, Some(v), Some(v)))
            .filter_map(|c| RationalPath::periodic(&self.g, c).ok())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut out = Vec::new();
        for y in &cycles {
            for n in max_x.below() {
                for x in self.g.enumerate(&n, Some(y.target()), None) {
                    out.push(ZPoint { x, y: y.clone() });
                }
            }
        }
        out
    }

    /// A random point with `σ(x) ≤ max_x` and a random eventually periodic
    /// tail (prefix and cycle shapes at most 2 in each coordinate).
    pub fn random_point(&self, rng: &mut impl Rng, max_x: &Shape) -> Option<ZPoint> {
        let r = self.rank();
        let y = random_rational(&self.g, rng, &Shape::splat(r, 2), &Shape::splat(r, 2), 64)?;
        let n = Shape::new(
            max_x
                .coords()
                .iter()
                .map(|&c| rng.random_range(0..=c))
                .collect(),
        );
        let xs = self.g.enumerate(&n, Some(y.target()), None);
        let x = xs.get(rng.random_range(0..xs.len().max(1)))?.clone();
        Some(ZPoint { x, y })
    }

    /// `φ(x, y) = (σ(x), xy)`.
    pub fn phi(&self, z: &ZPoint) -> Result<BasePoint, DualityError> {
        Ok(BasePoint {
            n: z.x.shape().clone(),
            w: z.y.prepend(&self.g, &z.x)?,
        })
    }

    /// The inverse of `φ`: `(n, w) ↦ (w(0, n), w(n, ∞))`.
    pub fn unphi(&self, p: &BasePoint) -> Result<ZPoint, DualityError> {
        Ok(ZPoint {
            x: p.w.head(&self.g, &p.n)?,
            y: p.w.shift(&self.g, &p.n)?,
        })
    }

    /// `S_m(n, w) = (n − m, w)` on `n ≥ m`.
    pub fn base_s(&self, m: &Shape, p: &BasePoint) -> Option<BasePoint> {
        Some(BasePoint {
            n: p.n.checked_sub(m)?,
            w: p.w.clone(),
        })
    }

    /// `W_k(n, w) = (n, w(k, ∞))`.
    pub fn base_w(&self, k: &Shape, p: &BasePoint) -> Result<BasePoint, DualityError> {
        Ok(BasePoint {
            n: p.n.clone(),
            w: p.w.shift(&self.g, k)?,
        })
    }

    /// `φ∘T_m = S_m∘φ` and `φ∘V_k = W_k∘φ` at `z`, for `m, k ≤ bound`.
    /// Returns the first failing `(generator, shape)`.
    pub fn check_equivariance(
        &self,
        z: &ZPoint,
        bound: &Shape,
    ) -> Result<(), (&'static str, Shape)> {
        let base = self.phi(z).map_err(|_| ("phi", Shape::zero(self.rank())))?;
        for m in bound.below() {
            let left = self.t_shift(&m, z).ok().and_then(|t| self.phi(&t).ok());
            if left != self.base_s(&m, &base) {
                return Err(("T", m));
            }
            let left = self.v_shift(&m, z).ok().and_then(|v| self.phi(&v).ok());
            if left != self.base_w(&m, &base).ok() {
                return Err(("V", m));
            }
        }
        Ok(())
    }

    fn t_preimages(&self, m: &Shape, q: &ZPoint) -> Vec<ZPoint> {
        let Ok(y) = q.y.shift(&self.g, m) else {
            return Vec::new();
        };
        self.g
            .enumerate(m, None, Some(q.x.source()))
            .into_iter()
            .filter_map(|alpha| {
                let cand = ZPoint {
                    x: self.g.compose(&q.x, &alpha).ok()?,
                    y: y.clone(),
                };
                (self.t_shift(m, &cand).ok()? == *q).then_some(cand)
            })
            .collect()
    }

    fn v_preimages(&self, k: &Shape, q: &ZPoint) -> Vec<ZPoint> {
        let mut out = Vec::new();
        for mu in self.g.enumerate(k, Some(q.y.target()), None) {
            let Ok(y) = q.y.prepend(&self.g, &mu) else {
                continue;
            };
            for x in self.g.enumerate(q.x.shape(), Some(mu.target()), None) {
                let cand = ZPoint { x, y: y.clone() };
                if self.v_shift(k, &cand).ok().as_ref() == Some(q) {
                    out.push(cand);
                }
            }
        }
        out
    }

    /// `G(Z)^z` cut down to witnesses `m1, k1, m2, k2 ≤ bound`, found by
    /// inverting `T^{m2}V^{k2}` through exhaustive search.
    pub fn z_fiber(&self, z: &ZPoint, bound: &Shape) -> BTreeSet<FiberElement<ZPoint>> {
        let shapes: Vec<Shape> = bound.below().collect();
        let mut out = BTreeSet::new();
        for m1 in &shapes {
            for k1 in &shapes {
                let Some(q) = self.tv(m1, k1, z) else {
                    continue;
                };
                for m2 in &shapes {
                    let middles = self.t_preimages(m2, &q);
                    for k2 in &shapes {
                        let cocycle = ZVec::difference(m1, m2).concat(&ZVec::difference(k1, k2));
                        for mid in &middles {
                            for c in self.v_preimages(k2, mid) {
                                out.insert((cocycle.clone(), c));
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// The fibre of the `(S, W)` groupoid at `p` under the same witness bound.
    pub fn base_fiber(&self, p: &BasePoint, bound: &Shape) -> BTreeSet<FiberElement<BasePoint>> {
        let shapes: Vec<Shape> = bound.below().collect();
        let mut out = BTreeSet::new();
        for m1 in &shapes {
            let Some(after_s) = self.base_s(m1, p) else {
                continue;
            };
            for k1 in &shapes {
                let Ok(q) = self.base_w(k1, &after_s) else {
                    continue;
                };
                for m2 in &shapes {
                    let n = &q.n + m2;
                    for k2 in &shapes {
                        let cocycle = ZVec::difference(m1, m2).concat(&ZVec::difference(k1, k2));
                        for mu in self.g.enumerate(k2, Some(q.w.target()), None) {
                            if let Ok(w) = q.w.prepend(&self.g, &mu) {
                                out.insert((cocycle.clone(), BasePoint { n: n.clone(), w }));
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Lift `(φ(z), cocycle, target)` to `(z, cocycle, z')`: the endpoint is
    /// `z' = (w(0, n), w(n, ∞))` and the witness is searched with shifts
    /// `≤ bound` on top of the positive and negative parts of the cocycle.
    pub fn lift(
        &self,
        z: &ZPoint,
        cocycle: &ZVec,
        target: &BasePoint,
        bound: &Shape,
    ) -> Result<Lift, DualityError> {
        let r = self.rank();
        let (a, b) = cocycle.split_at(r);
        let ((a1, a2), (b1, b2)) = (split(&a), split(&b));
        let point = self.unphi(target)?;
        for i in bound.below() {
            let (m1, m2) = (&a1 + &i, &a2 + &i);
            for j in bound.below() {
                let (k1, k2) = (&b1 + &j, &b2 + &j);
                let left = self.tv(&m1, &k1, z);
                if left.is_some() && left == self.tv(&m2, &k2, &point) {
                    return Ok(Lift {
                        point,
                        m1,
                        k1,
                        m2,
                        k2,
                    });
                }
            }
        }
        Err(DualityError::NoLift {
            at: self.display(z),
            cocycle: cocycle.clone(),
            target: self.display_base(target),
        })
    }

    /// Check that `φ` maps the bounded fibre `G(Z)^z` bijectively onto the
    /// bounded fibre over `φ(z)`, and that every element of the latter lifts
    /// to the one element above it.
    pub fn verify_fiber(&self, z: &ZPoint, bound: &Shape) -> Result<FiberReport, DualityError> {
        let at = self.display(z);
        let mismatch = |reason: String| DualityError::FiberMismatch {
            at: at.clone(),
            reason,
        };
        let upstairs = self.z_fiber(z, bound);
        let base = self.base_fiber(&self.phi(z)?, bound);
        let mut image = BTreeSet::new();
        for (c, p) in &upstairs {
            if !image.insert((c.clone(), self.phi(p)?)) {
                return Err(mismatch(format!(
                    "two elements over ({c}, {})",
                    self.display(p)
                )));
            }
        }
        if image != base {
            let extra = image
                .symmetric_difference(&base)
                .next()
                .expect("sets differ");
            return Err(mismatch(format!(
                "({}, {}) is in only one of the two fibres",
                extra.0,
                self.display_base(&extra.1)
            )));
        }
        for (c, p) in &base {
            let lift = self.lift(z, c, p, bound)?;
            if !upstairs.contains(&(c.clone(), lift.point.clone())) {
                return Err(mismatch(format!(
                    "lift {} was not found by search",
                    self.display(&lift.point)
                )));
            }
        }
        Ok(FiberReport {
            z_elements: upstairs.len(),
            base_elements: base.len(),
        })
    }
}

/// A point of `Λ^∞ × (Λ^op)^∞` whose two halves start at the same vertex.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct TwoSidedPoint {
    pub x: RationalPath,
    /// A path of the opposite graph.
    pub y: RationalPath,
}

/// The two-sided shifts `w_k(λx, y) = (x, λy)`, `σ(λ) = e_k`.
#[derive(Clone, Debug)]
pub struct TwoSided {
    g: KGraph,
    op: KGraph,
}

impl TwoSided {
    pub fn new(g: KGraph) -> Self {
        let op = g.opposite();
        TwoSided { g, op }
    }

    pub fn graph(&self) -> &KGraph {
        &self.g
    }

    pub fn opposite(&self) -> &KGraph {
        &self.op
    }

    pub fn point(&self, x: RationalPath, y: RationalPath) -> Result<TwoSidedPoint, DualityError> {
        if x.target() != y.target() {
            return Err(DualityError::Endpoints {
                start: x.target(),
                target: y.target(),
            });
        }
        Ok(TwoSidedPoint { x, y })
    }

    pub fn display(&self, p: &TwoSidedPoint) -> String {
        format!("({} | {})", p.x.display(&self.g), p.y.display(&self.op))
    }

    pub fn shift(&self, k: usize, p: &TwoSidedPoint) -> Result<TwoSidedPoint, DualityError> {
        let e = Shape::unit(self.g.rank(), k);
        let lambda = p.x.head(&self.g, &e)?;
        Ok(TwoSidedPoint {
            x: p.x.shift(&self.g, &e)?,
            y: p.y.prepend(&self.op, &self.g.opposite_path(&lambda)?)?,
        })
    }

    pub fn unshift(&self, k: usize, p: &TwoSidedPoint) -> Result<TwoSidedPoint, DualityError> {
        let e = Shape::unit(self.g.rank(), k);
        let mu = p.y.head(&self.op, &e)?;
        Ok(TwoSidedPoint {
            x: p.x.prepend(&self.g, &self.op.opposite_path(&mu)?)?,
            y: p.y.shift(&self.op, &e)?,
        })
    }

    /// `(e_k, −e_k)`: the cocycle carried by the bisection of `w_k`.
    pub fn cocycle(&self, k: usize) -> ZVec {
        let r = self.g.rank();
        let e = Shape::unit(r, k).to_zvec();
        e.concat(&-&e)
    }

    /// `W_{e_k}` on the first factor of `p` equals `W^op_{e_k}` on the second
    /// factor of `w_k(p)`, which is the witness for [`TwoSided::cocycle`].
    pub fn check_bisection(&self, k: usize, p: &TwoSidedPoint) -> Result<bool, DualityError> {
        let e = Shape::unit(self.g.rank(), k);
        let q = self.shift(k, p)?;
        Ok(p.x.shift(&self.g, &e)? == q.x && q.y.shift(&self.op, &e)? == p.y)
    }

    /// The letter of the doubly infinite word at position `pos ∈ ℤ^r` in
    /// colour `j`: read from `x` when `pos ≥ 0`, from `y` when
    /// `pos + e_j ≤ 0`, and `None` in between.
    pub fn letter(
        &self,
        p: &TwoSidedPoint,
        pos: &[i64],
        j: usize,
    ) -> Result<Option<usize>, DualityError> {
        let r = self.g.rank();
        let e = Shape::unit(r, j);
        if pos.iter().all(|&c| c >= 0) {
            let from = Shape::new(pos.iter().map(|&c| c as u32).collect());
            let seg = p.x.segment(&self.g, &from, &(&from + &e))?;
            return Ok(Some(seg.edges()[0]));
        }
        let end: Vec<i64> = (0..r).map(|i| pos[i] + i64::from(e[i])).collect();
        if end.iter().all(|&c| c <= 0) {
            let from = Shape::new(end.iter().map(|&c| (-c) as u32).collect());
            let seg = p.y.segment(&self.op, &from, &(&from + &e))?;
            return Ok(Some(seg.edges()[0]));
        }
        Ok(None)
    }
}

/// An element `(t, γ)` of `ℤ^r × G`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct TwistedArrow<P> {
    pub t: ZVec,
    pub arrow: Arrow<P>,
}

impl<P: Point> TwistedArrow<P> {
    pub fn product(&self, other: &TwistedArrow<P>) -> Option<TwistedArrow<P>> {
        Some(TwistedArrow {
            t: &self.t + &other.t,
            arrow: self.arrow.product(&other.arrow)?,
        })
    }
}

/// `Θ(t, γ) = (t + b(γ), γ)` with `b(x, z, y) = z`.
pub fn theta<P: Point>(e: &TwistedArrow<P>) -> TwistedArrow<P> {
    TwistedArrow {
        t: &e.t + &e.arrow.z,
        arrow: e.arrow.clone(),
    }
}

pub fn theta_inverse<P: Point>(e: &TwistedArrow<P>) -> TwistedArrow<P> {
    TwistedArrow {
        t: &e.t - &e.arrow.z,
        arrow: e.arrow.clone(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ThetaFailure<P: fmt::Debug> {
    #[error("Θ is not multiplicative on {left:?} and {right:?}")]
    NotMultiplicative {
        left: TwistedArrow<P>,
        right: TwistedArrow<P>,
    },
    #[error("Θ does not fix the unit {0:?}")]
    MovesUnit(TwistedArrow<P>),
    #[error("Θ⁻¹Θ is not the identity at {0:?}")]
    NotInvertible(TwistedArrow<P>),
}

/// Check that `Θ` is an automorphism of `ℤ^r × G` on every composable pair
/// of `g` and every pair of translations `0 ≤ t, t' ≤ t_bound`. Returns the
/// number of pairs checked.
pub fn check_theta<P: Point>(
    g: &FiniteGroupoid<P>,
    t_bound: &Shape,
) -> Result<usize, ThetaFailure<P>> {
    let ts: Vec<ZVec> = t_bound.below().map(|t| t.to_zvec()).collect();
    let twisted = |t: &ZVec, a: &Arrow<P>| TwistedArrow {
        t: t.clone(),
        arrow: a.clone(),
    };
    for a in g.arrows() {
        for t in &ts {
            let e = twisted(t, a);
            if theta_inverse(&theta(&e)) != e {
                return Err(ThetaFailure::NotInvertible(e));
            }
            if a.is_unit() && theta(&e) != e {
                return Err(ThetaFailure::MovesUnit(e));
            }
        }
    }
    let mut count = 0;
    for (i, j) in g.composable_pairs() {
        for t in &ts {
            for u in &ts {
                let (left, right) = (twisted(t, g.arrow(i)), twisted(u, g.arrow(j)));
                let direct = left.product(&right).map(|p| theta(&p));
                if direct != theta(&left).product(&theta(&right)) {
                    return Err(ThetaFailure::NotMultiplicative { left, right });
                }
                count += 1;
            }
        }
    }
    Ok(count)
}
