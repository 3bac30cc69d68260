//! Finitely supported rational functions on a groupoid of triples:
//! convolution, involution, the I-norm and the pushforward to germs.
//!
//! Functions are keyed by the triple itself, so products are computed in
//! the ambient groupoid of all triples and never depend on where a finite
//! enumeration was cut off.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use super::{germ_of, Arrow, FiniteGroupoid};
use crate::dynsys::Point;

/// A function with finite support; zero values are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvolutionElement<P> {
    values: BTreeMap<Arrow<P>, BigRational>,
}

impl<P> Default for ConvolutionElement<P> {
    fn default() -> Self {
        ConvolutionElement {
            values: BTreeMap::new(),
        }
    }
}

impl<P: Point> ConvolutionElement<P> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn indicator(a: Arrow<P>) -> Self {
        Self::from_pairs([(a, BigRational::one())])
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Arrow<P>, BigRational)>) -> Self {
        let mut f = Self::zero();
        for (a, v) in pairs {
            f.add_at(a, v);
        }
        f
    }

    pub fn get(&self, a: &Arrow<P>) -> BigRational {
        self.values
            .get(a)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = (&Arrow<P>, &BigRational)> {
        self.values.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn add_at(&mut self, a: Arrow<P>, v: BigRational) {
        match self.values.entry(a) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += v;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                if !v.is_zero() {
                    e.insert(v);
                }
            }
        }
    }
}

/// `(f ⋆ g)(γ) = Σ_{αβ = γ} f(α) g(β)`.
pub fn convolve<P: Point>(
    f: &ConvolutionElement<P>,
    g: &ConvolutionElement<P>,
) -> ConvolutionElement<P> {
    let mut by_range: BTreeMap<&P, Vec<(&Arrow<P>, &BigRational)>> = BTreeMap::new();
    for (b, v) in g.support() {
        by_range.entry(&b.range).or_default().push((b, v));
    }
    let mut out = ConvolutionElement::zero();
    for (a, u) in f.support() {
        for (b, v) in by_range.get(&a.source).into_iter().flatten() {
            let c = a.product(b).expect("source matches range");
            out.add_at(c, u * *v);
        }
    }
    out
}

/// `f*(γ) = f(γ⁻¹)`; values are rational so conjugation is trivial.
pub fn involute<P: Point>(f: &ConvolutionElement<P>) -> ConvolutionElement<P> {
    ConvolutionElement::from_pairs(f.support().map(|(a, v)| (a.inverse(), v.clone())))
}

/// The larger of the maximal range-fibre and source-fibre `ℓ¹` sums.
pub fn i_norm<P: Point>(f: &ConvolutionElement<P>) -> BigRational {
    let mut by_range: BTreeMap<&P, BigRational> = BTreeMap::new();
    let mut by_source: BTreeMap<&P, BigRational> = BTreeMap::new();
    for (a, v) in f.support() {
        *by_range.entry(&a.range).or_insert_with(BigRational::zero) += v.abs();
        *by_source.entry(&a.source).or_insert_with(BigRational::zero) += v.abs();
    }
    by_range
        .into_values()
        .chain(by_source.into_values())
        .max()
        .unwrap_or_else(BigRational::zero)
}

/// `π̃(f)(γ) = Σ_{π(γ') = γ} f(γ')` along the germ map.
pub fn pushforward<P: Point>(f: &ConvolutionElement<P>) -> ConvolutionElement<P> {
    ConvolutionElement::from_pairs(f.support().map(|(a, v)| (germ_of(a), v.clone())))
}

/// A random element supported on up to `max_support` arrows of `g`, with
/// values `p/q`, `|p| ≤ 9`, `1 ≤ q ≤ 5`.
pub fn random_element<P: Point>(
    rng: &mut impl Rng,
    g: &FiniteGroupoid<P>,
    max_support: usize,
) -> ConvolutionElement<P> {
    if g.is_empty() {
        return ConvolutionElement::zero();
    }
    let size = rng.random_range(1..=max_support.max(1));
    ConvolutionElement::from_pairs((0..size).map(|_| {
        let a = g.arrow(rng.random_range(0..g.len())).clone();
        let p: i64 = rng.random_range(-9..=9);
        let q: i64 = rng.random_range(1..=5);
        (a, BigRational::new(BigInt::from(p), BigInt::from(q)))
    }))
}
