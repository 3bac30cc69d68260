//! Partial maps and multiply generated dynamical systems: `r` commuting
//! partial maps `T_1, …, T_r` on a finite carrier.

pub mod builders;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use thiserror::Error;

use crate::shape::{Coord, ExtShape, Shape};

/// Requirements on carrier points.
pub trait Point: Clone + Eq + Hash + Ord + fmt::Debug + Send + Sync + 'static {}
impl<T: Clone + Eq + Hash + Ord + fmt::Debug + Send + Sync + 'static> Point for T {}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynError {
    #[error("{point} is outside the domain")]
    OutsideDomain { point: String },
    #[error("{point} is not in the carrier")]
    NotInCarrier { point: String },
    #[error("expected {expected} generators, got {got}")]
    RankMismatch { expected: usize, got: usize },
}

type Rule<P> = Arc<dyn Fn(&P) -> Option<P> + Send + Sync>;

/// A partially defined map, either tabulated or given by a rule whose
/// `None` result marks points outside the domain.
#[derive(Clone)]
pub enum PartialMap<P> {
    Table(Arc<BTreeMap<P, P>>),
    Rule(Rule<P>),
}

impl<P: Point> PartialMap<P> {
    pub fn table(map: BTreeMap<P, P>) -> Self {
        PartialMap::Table(Arc::new(map))
    }

    pub fn rule(f: impl Fn(&P) -> Option<P> + Send + Sync + 'static) -> Self {
        PartialMap::Rule(Arc::new(f))
    }

    pub fn identity() -> Self {
        Self::rule(|x: &P| Some(x.clone()))
    }

    /// The value at `x`, or `None` outside the domain.
    pub fn get(&self, x: &P) -> Option<P> {
        match self {
            PartialMap::Table(t) => t.get(x).cloned(),
            PartialMap::Rule(f) => f(x),
        }
    }

    pub fn in_domain(&self, x: &P) -> bool {
        self.get(x).is_some()
    }

    /// The value at `x`; applying outside the domain is an error.
    pub fn apply(&self, x: &P) -> Result<P, DynError> {
        self.get(x).ok_or_else(|| DynError::OutsideDomain {
            point: format!("{x:?}"),
        })
    }

    /// `self ∘ inner`, with domain `{x ∈ dom(inner) : inner(x) ∈ dom(self)}`.
    pub fn after(&self, inner: &PartialMap<P>) -> PartialMap<P> {
        let (outer, inner) = (self.clone(), inner.clone());
        Self::rule(move |x| inner.get(x).and_then(|y| outer.get(&y)))
    }
}

impl<P> fmt::Debug for PartialMap<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartialMap::Table(t) => write!(f, "PartialMap::Table({} entries)", t.len()),
            PartialMap::Rule(_) => f.write_str("PartialMap::Rule"),
        }
    }
}

/// Generators `i < j` that fail to commute at `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutationWitness<P> {
    pub i: usize,
    pub j: usize,
    pub x: P,
}

/// `x ∈ dom(T^n) ∩ dom(T^m)` but `x ∉ dom(T^{n∨m})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DcWitness<P> {
    pub n: Shape,
    pub m: Shape,
    pub x: P,
}

type Labeler<P> = Arc<dyn Fn(&P) -> String + Send + Sync>;

/// A multiply generated dynamical system on a finite carrier.
#[derive(Clone)]
pub struct Mgds<P> {
    name: String,
    carrier: Vec<P>,
    members: HashSet<P>,
    generators: Vec<PartialMap<P>>,
    shift_complete: Vec<bool>,
    reach: usize,
    labeler: Labeler<P>,
}

impl<P: Point> Mgds<P> {
    /// Carrier order is kept as given and used for every enumeration.
    pub fn new(name: impl Into<String>, carrier: Vec<P>, generators: Vec<PartialMap<P>>) -> Self {
        let members = carrier.iter().cloned().collect();
        let r = generators.len();
        let reach = carrier.len().max(1);
        Mgds {
            name: name.into(),
            carrier,
            members,
            generators,
            shift_complete: vec![false; r],
            reach,
            labeler: Arc::new(|x: &P| format!("{x:?}")),
        }
    }

    /// Declare which coordinates report `∞` when an orbit outlives the
    /// reach limit.
    pub fn with_shift_complete(mut self, flags: Vec<bool>) -> Self {
        assert_eq!(flags.len(), self.rank());
        self.shift_complete = flags;
        self
    }

    /// Number of generator steps explored per coordinate by `exit_time`.
    pub fn with_reach(mut self, reach: usize) -> Self {
        self.reach = reach;
        self
    }

    pub fn with_labels(mut self, f: impl Fn(&P) -> String + Send + Sync + 'static) -> Self {
        self.labeler = Arc::new(f);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn carrier(&self) -> &[P] {
        &self.carrier
    }

    pub fn contains(&self, x: &P) -> bool {
        self.members.contains(x)
    }

    pub fn label(&self, x: &P) -> String {
        (self.labeler)(x)
    }

    pub fn generator(&self, j: usize) -> &PartialMap<P> {
        &self.generators[j]
    }

    pub fn shift_complete(&self) -> &[bool] {
        &self.shift_complete
    }

    /// `T^n x = T_1^{n_1} ⋯ T_r^{n_r} x`, or `None` outside `dom(T^n)`.
    pub fn power_apply(&self, n: &Shape, x: &P) -> Option<P> {
        let mut y = x.clone();
        for (j, &k) in n.coords().iter().enumerate() {
            for _ in 0..k {
                y = self.generators[j].get(&y)?;
            }
        }
        Some(y)
    }

    /// `T^n` as a partial map.
    pub fn power(&self, n: &Shape) -> PartialMap<P> {
        let sys = self.clone();
        let n = n.clone();
        PartialMap::rule(move |x| sys.power_apply(&n, x))
    }

    /// Pointwise commutation: for every `i < j` and carrier point, `T_iT_j`
    /// and `T_jT_i` are defined together and agree.
    pub fn check_commuting(&self) -> Result<(), CommutationWitness<P>> {
        for i in 0..self.rank() {
            for j in i + 1..self.rank() {
                for x in &self.carrier {
                    let ij = self.generators[j]
                        .get(x)
                        .and_then(|y| self.generators[i].get(&y));
                    let ji = self.generators[i]
                        .get(x)
                        .and_then(|y| self.generators[j].get(&y));
                    if ij != ji {
                        return Err(CommutationWitness { i, j, x: x.clone() });
                    }
                }
            }
        }
        Ok(())
    }

    /// The domain condition `dom(T^n) ∩ dom(T^m) ⊆ dom(T^{n∨m})` for all
    /// `n, m ≤ bound`. Comparable pairs hold trivially and are skipped; the
    /// remaining pairs are scanned with `n` above `m` lexicographically.
    pub fn check_dc(&self, bound: &Shape) -> Result<(), DcWitness<P>> {
        let shapes: Vec<Shape> = bound.below().collect();
        for n in &shapes {
            for m in shapes.iter().take_while(|m| *m < n) {
                if n.le(m) || m.le(n) {
                    continue;
                }
                let join = n.join(m);
                for x in &self.carrier {
                    if self.power_apply(n, x).is_some()
                        && self.power_apply(m, x).is_some()
                        && self.power_apply(&join, x).is_none()
                    {
                        return Err(DcWitness {
                            n: n.clone(),
                            m: m.clone(),
                            x: x.clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// The exit time `σ(x) = sup{n : x ∈ dom(T^n)}`, computed coordinatewise.
    /// An orbit that revisits a point is infinite; one that survives `reach`
    /// steps is infinite only in shift-complete coordinates.
    pub fn exit_time(&self, x: &P) -> Result<ExtShape, DynError> {
        if !self.contains(x) {
            return Err(DynError::NotInCarrier {
                point: self.label(x),
            });
        }
        Ok(self.exit_time_unchecked(x))
    }

    /// [`Mgds::exit_time`] without the carrier membership test.
    pub fn exit_time_unchecked(&self, x: &P) -> ExtShape {
        let coords = (0..self.rank())
            .map(|j| {
                let mut seen = HashSet::new();
                seen.insert(x.clone());
                let mut y = x.clone();
                let mut steps = 0u32;
                loop {
                    if steps as usize >= self.reach {
                        break if self.shift_complete[j] {
                            Coord::Infinite
                        } else {
                            Coord::Finite(steps)
                        };
                    }
                    match self.generators[j].get(&y) {
                        None => break Coord::Finite(steps),
                        Some(z) => {
                            steps += 1;
                            if !seen.insert(z.clone()) {
                                break Coord::Infinite;
                            }
                            y = z;
                        }
                    }
                }
            })
            .collect();
        ExtShape::new(coords)
    }

    /// Exit times of all carrier points.
    pub fn exit_times(&self) -> BTreeMap<P, ExtShape> {
        self.carrier
            .iter()
            .map(|x| (x.clone(), self.exit_time_unchecked(x)))
            .collect()
    }

    /// Componentwise maximum of the finite exit-time coordinates, with
    /// `fallback` for coordinates that are infinite somewhere.
    pub fn default_bound(&self, fallback: u32) -> Shape {
        let mut bound = vec![0u32; self.rank()];
        for t in self.exit_times().values() {
            for (j, c) in t.coords().iter().enumerate() {
                bound[j] = match c {
                    Coord::Finite(v) if bound[j] != u32::MAX => bound[j].max(*v),
                    _ => u32::MAX,
                };
            }
        }
        Shape::new(
            bound
                .into_iter()
                .map(|b| if b == u32::MAX { fallback } else { b })
                .collect(),
        )
    }

    /// For every `n ≤ bound`: `dom(T^n) = {x : n ≤ σ(x)}`.
    pub fn check_power_domains(&self, bound: &Shape) -> Result<(), (Shape, P)> {
        let times = self.exit_times();
        for n in bound.below() {
            for x in &self.carrier {
                if self.power_apply(&n, x).is_some() != times[x].dominates(&n) {
                    return Err((n, x.clone()));
                }
            }
        }
        Ok(())
    }

    /// `X_J = {x : σ(x)_j = ∞ ⇔ j ∈ J}` for every `J ⊆ {0, …, r−1}`
    /// (0-based), including empty classes.
    pub fn xj_partition(&self) -> BTreeMap<Vec<usize>, Vec<P>> {
        let mut classes: BTreeMap<Vec<usize>, Vec<P>> = subsets(self.rank())
            .into_iter()
            .map(|j| (j, Vec::new()))
            .collect();
        for x in &self.carrier {
            let key = self.exit_time_unchecked(x).infinite_set();
            classes
                .get_mut(&key)
                .expect("every subset present")
                .push(x.clone());
        }
        classes
    }

    /// The points `x` with `σ(x)_k < ∞`, for each 0-based `k`.
    pub fn finite_coordinate_sets(&self) -> Vec<BTreeSet<P>> {
        let times = self.exit_times();
        (0..self.rank())
            .map(|k| {
                times
                    .iter()
                    .filter(|(_, t)| t.coord(k).is_finite())
                    .map(|(x, _)| x.clone())
                    .collect()
            })
            .collect()
    }

    /// The orbit closure of `seeds` under the generators, in discovery order.
    pub fn closure(&self, seeds: &[P]) -> Vec<P> {
        closure_under(&self.generators, seeds, usize::MAX)
    }
}

impl<P> fmt::Debug for Mgds<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Mgds")
            .field("name", &self.name)
            .field("points", &self.carrier.len())
            .field("rank", &self.generators.len())
            .finish()
    }
}

/// All subsets of `{0, …, r−1}` as sorted index lists, ordered by bitmask.
pub fn subsets(r: usize) -> Vec<Vec<usize>> {
    (0..1usize << r)
        .map(|mask| (0..r).filter(|j| mask >> j & 1 == 1).collect())
        .collect()
}

/// Points reachable from `seeds` by at most `depth` generator steps, in
/// breadth-first discovery order.
pub fn closure_under<P: Point>(maps: &[PartialMap<P>], seeds: &[P], depth: usize) -> Vec<P> {
    let mut seen: HashSet<P> = HashSet::new();
    let mut order = Vec::new();
    let mut frontier = Vec::new();
    for s in seeds {
        if seen.insert(s.clone()) {
            order.push(s.clone());
            frontier.push(s.clone());
        }
    }
    let mut level = 0;
    while !frontier.is_empty() && level < depth {
        let mut next = Vec::new();
        for x in &frontier {
            for t in maps {
                if let Some(y) = t.get(x) {
                    if seen.insert(y.clone()) {
                        order.push(y.clone());
                        next.push(y);
                    }
                }
            }
        }
        frontier = next;
        level += 1;
    }
    order
}

#[cfg(test)]
mod tests;
