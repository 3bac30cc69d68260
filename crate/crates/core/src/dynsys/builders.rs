//! Standard systems: grids, identity maps, translations on a free monoid,
//! path spaces of k-graphs and their boundary parts, and product systems.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;

use super::{Mgds, PartialMap};
use crate::kgraph::{GraphError, KGraph, Path};
use crate::rational::RationalPath;
use crate::shape::Shape;

/// `{0, …, side−1}^r` with `T_j x = x − e_j` on `{x_j ≥ 1}`.
pub fn grid_system(rank: usize, side: u32) -> Mgds<Shape> {
    let carrier: Vec<Shape> = Shape::splat(rank, side.saturating_sub(1)).below().collect();
    let generators = (0..rank)
        .map(|j| PartialMap::rule(move |x: &Shape| (x[j] >= 1).then(|| x.with(j, x[j] - 1))))
        .collect();
    Mgds::new(format!("grid(r={rank},side={side})"), carrier, generators)
        .with_labels(|x: &Shape| format!("({x})"))
}

/// `{0, …, points−1}` with every generator the identity map.
pub fn identity_system(points: u32, rank: usize) -> Mgds<u32> {
    let generators = (0..rank).map(|_| PartialMap::identity()).collect();
    Mgds::new(
        format!("identity(points={points},r={rank})"),
        (0..points).collect(),
        generators,
    )
    .with_shift_complete(vec![true; rank])
}

/// A word over a finite alphabet; the empty word prints as `Ω`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub String);

impl Word {
    pub fn len(&self) -> usize {
        self.0.chars().count()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            f.write_str("Ω")
        } else {
            f.write_str(&self.0)
        }
    }
}

/// Words of length at most `maxlen`, in shortlex order, with `T_1` dropping
/// the first letter and `T_2` dropping the last.
pub fn free_monoid_system(alphabet: &[char], maxlen: usize) -> Mgds<Word> {
    let mut carrier = vec![Word(String::new())];
    let mut layer = vec![String::new()];
    for _ in 0..maxlen {
        layer = layer
            .iter()
            .flat_map(|w| alphabet.iter().map(move |c| format!("{w}{c}")))
            .collect();
        carrier.extend(layer.iter().cloned().map(Word));
    }
    let left = PartialMap::rule(|w: &Word| {
        let mut chars = w.0.chars();
        chars.next().map(|_| Word(chars.collect()))
    });
    let right = PartialMap::rule(|w: &Word| {
        let mut chars = w.0.chars();
        chars.next_back().map(|_| Word(chars.collect()))
    });
    let name: String = alphabet.iter().collect();
    Mgds::new(
        format!("free_monoid({name},maxlen={maxlen})"),
        carrier,
        vec![left, right],
    )
    .with_labels(|w: &Word| w.to_string())
}

/// A point of a path space: a finite path or a rational infinite path.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum PathPoint {
    Finite(Path),
    Infinite(RationalPath),
}

impl PathPoint {
    pub fn display(&self, g: &KGraph) -> String {
        match self {
            PathPoint::Finite(p) => g.fmt_path(p),
            PathPoint::Infinite(x) => x.display(g),
        }
    }
}

fn path_shift(g: &KGraph, j: usize, x: &PathPoint) -> Option<PathPoint> {
    let e = Shape::unit(g.rank(), j);
    match x {
        PathPoint::Finite(p) => {
            if p.shape()[j] == 0 {
                return None;
            }
            g.factorize(p, &e)
                .ok()
                .map(|(_, tail)| PathPoint::Finite(tail))
        }
        PathPoint::Infinite(y) => y.shift(g, &e).ok().map(PathPoint::Infinite),
    }
}

/// The path space of `g` truncated at `cap`: all finite paths of shape
/// `≤ cap`, plus the shift-orbit closure of the given rational infinite
/// paths. `T_j` removes the first colour-`j` edge (the tail of
/// `factorize(·, e_j)`). Every coordinate is declared shift-complete.
pub fn path_space_system(
    g: Arc<KGraph>,
    cap: &Shape,
    infinite: &[RationalPath],
) -> Result<Mgds<PathPoint>, GraphError> {
    g.validate().require_valid()?;
    let mut carrier: Vec<PathPoint> = g
        .paths_up_to(cap)
        .into_iter()
        .map(PathPoint::Finite)
        .collect();
    let generators: Vec<PartialMap<PathPoint>> = (0..g.rank())
        .map(|j| {
            let g = Arc::clone(&g);
            PartialMap::rule(move |x: &PathPoint| path_shift(&g, j, x))
        })
        .collect();
    let seeds: Vec<PathPoint> = infinite.iter().cloned().map(PathPoint::Infinite).collect();
    carrier.extend(super::closure_under(&generators, &seeds, usize::MAX));
    let labels = Arc::clone(&g);
    Ok(
        Mgds::new(format!("path_space(cap={cap})"), carrier, generators)
            .with_shift_complete(vec![true; g.rank()])
            .with_labels(move |x: &PathPoint| x.display(&labels)),
    )
}

/// Whether a finite path is a boundary path: at every `n ≤ σ(λ)` and every
/// colour `j` with `n_j = σ(λ)_j`, no colour-`j` edge has target `λ(n)`.
pub fn is_boundary(g: &KGraph, lambda: &Path) -> bool {
    let m = lambda.shape();
    m.below().all(|n| {
        let vertex = match g.factorize(lambda, &n) {
            Ok((_, tail)) => tail.target(),
            Err(_) => return false,
        };
        (0..g.rank()).all(|j| n[j] != m[j] || g.edges_into(vertex, j).is_empty())
    })
}

/// The restriction of [`path_space_system`] to boundary paths. Rational
/// infinite paths are always boundary paths.
pub fn boundary_subsystem(
    g: Arc<KGraph>,
    cap: &Shape,
    infinite: &[RationalPath],
) -> Result<Mgds<PathPoint>, GraphError> {
    let full = path_space_system(Arc::clone(&g), cap, infinite)?;
    let carrier: Vec<PathPoint> = full
        .carrier()
        .iter()
        .filter(|x| match x {
            PathPoint::Finite(p) => is_boundary(&g, p),
            PathPoint::Infinite(_) => true,
        })
        .cloned()
        .collect();
    let generators = (0..g.rank()).map(|j| full.generator(j).clone()).collect();
    let labels = Arc::clone(&g);
    Ok(
        Mgds::new(format!("boundary(cap={cap})"), carrier, generators)
            .with_shift_complete(vec![true; g.rank()])
            .with_labels(move |x: &PathPoint| x.display(&labels)),
    )
}

/// A product system: coordinate `j` of the point moves under the partial
/// function `factors[j]` (given as a table on `{0, …, len−1}`), the other
/// coordinates stay fixed.
pub fn product_system(factors: Vec<Vec<Option<u32>>>) -> Mgds<Shape> {
    let sizes: Vec<u32> = factors.iter().map(|f| f.len() as u32).collect();
    let top = Shape::new(sizes.iter().map(|s| s.saturating_sub(1)).collect());
    let carrier: Vec<Shape> = if sizes.contains(&0) {
        Vec::new()
    } else {
        top.below().collect()
    };
    let factors = Arc::new(factors);
    let generators = (0..factors.len())
        .map(|j| {
            let factors = Arc::clone(&factors);
            let mut table = BTreeMap::new();
            for x in &carrier {
                if let Some(v) = factors[j][x[j] as usize] {
                    table.insert(x.clone(), x.with(j, v));
                }
            }
            PartialMap::table(table)
        })
        .collect();
    let rank = sizes.len();
    Mgds::new(format!("product({sizes:?})"), carrier, generators)
        .with_shift_complete(vec![true; rank])
        .with_labels(|x: &Shape| format!("({x})"))
}

/// A random partial function on `{0, …, size−1}` for [`product_system`].
pub fn random_factor(rng: &mut impl Rng, size: u32) -> Vec<Option<u32>> {
    (0..size)
        .map(|_| rng.random_bool(0.7).then(|| rng.random_range(0..size)))
        .collect()
}

/// A seeded random product system of the given rank with factors of size
/// 2 to 4.
pub fn random_product_system(rng: &mut impl Rng, rank: usize) -> Mgds<Shape> {
    let factors = (0..rank)
        .map(|_| {
            let size = rng.random_range(2..=4);
            random_factor(rng, size)
        })
        .collect();
    product_system(factors)
}
