//! Finitely supported permutations of ℤ and nested exhaustions of ℤ^d.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::summation::FreqSet;
use crate::trig::TrigPoly;

/// A bijection of ℤ that moves finitely many points.
///
/// Only moved points are stored, in both directions, so `apply` and
/// `apply_inverse` are logarithmic lookups and equality is structural.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Permutation {
    forward: BTreeMap<i64, i64>,
    inverse: BTreeMap<i64, i64>,
}

impl Permutation {
    pub fn identity() -> Self {
        Permutation::default()
    }

    /// Builds a permutation from `from → to` pairs.
    ///
    /// The pairs must be injective and their key set must equal their value
    /// set, otherwise the identity tail would collide with the table.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (i64, i64)>) -> Result<Self> {
        let mut forward = BTreeMap::new();
        let mut inverse = BTreeMap::new();
        for (a, b) in pairs {
            if forward.insert(a, b).is_some() {
                return Err(Error::InvalidPermutation(format!("{a} is mapped twice")));
            }
            if inverse.insert(b, a).is_some() {
                return Err(Error::InvalidPermutation(format!("{b} has two preimages")));
            }
        }
        if !forward.keys().eq(inverse.keys()) {
            return Err(Error::InvalidPermutation(
                "domain and image of the table differ".into(),
            ));
        }
        forward.retain(|a, b| a != b);
        inverse.retain(|a, b| a != b);
        Ok(Permutation { forward, inverse })
    }

    /// Transposition of `a` and `b`.
    pub fn swap(a: i64, b: i64) -> Self {
        Permutation::from_pairs([(a, b), (b, a)]).expect("a transposition is a bijection")
    }

    /// Product of disjoint cycles, each written `[a, σ(a), σ²(a), …]`.
    pub fn from_cycles(cycles: &[Vec<i64>]) -> Result<Self> {
        let mut pairs = Vec::new();
        for cyc in cycles {
            for (i, &a) in cyc.iter().enumerate() {
                pairs.push((a, cyc[(i + 1) % cyc.len()]));
            }
        }
        Permutation::from_pairs(pairs)
    }

    /// Uniformly random permutation of `{-r, …, r}`, identity elsewhere.
    pub fn shuffle_window<R: Rng + ?Sized>(r: i64, rng: &mut R) -> Self {
        let domain: Vec<i64> = (-r..=r).collect();
        let mut image = domain.clone();
        image.shuffle(rng);
        Permutation::from_pairs(domain.into_iter().zip(image)).expect("shuffle is a bijection")
    }

    pub fn apply(&self, n: i64) -> i64 {
        self.forward.get(&n).copied().unwrap_or(n)
    }

    pub fn apply_inverse(&self, n: i64) -> i64 {
        self.inverse.get(&n).copied().unwrap_or(n)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        let points: BTreeSet<i64> = self
            .forward
            .keys()
            .chain(other.forward.keys())
            .copied()
            .collect();
        Permutation::from_pairs(points.into_iter().map(|n| (n, self.apply(other.apply(n)))))
            .expect("composition of bijections")
    }

    pub fn invert(&self) -> Permutation {
        Permutation {
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.forward.is_empty()
    }

    /// Points moved by the permutation.
    pub fn moved(&self) -> impl Iterator<Item = i64> + '_ {
        self.forward.keys().copied()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.forward.iter().map(|(&a, &b)| (a, b))
    }

    /// Exhaustive check that the table is a bijection of its support.
    pub fn verify_bijective(&self) -> bool {
        let keys: BTreeSet<i64> = self.forward.keys().copied().collect();
        let vals: BTreeSet<i64> = self.forward.values().copied().collect();
        keys == vals
            && vals.len() == self.forward.len()
            && self
                .forward
                .iter()
                .all(|(a, b)| self.apply_inverse(*b) == *a && a != b)
    }

    /// `σ({-N, …, N})`.
    pub fn image_of_window(&self, n: u64) -> FreqSet {
        let n = n as i64;
        FreqSet::from_iter(1, (-n..=n).map(|k| self.apply(k))).expect("dim 1")
    }

    /// Smallest `N` with `σ({-N, …, N}) ⊇ support`.
    pub fn exhaustion_index(&self, support: impl IntoIterator<Item = i64>) -> u64 {
        support
            .into_iter()
            .map(|n| self.apply_inverse(n).unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    /// Same, for the support of a one-dimensional polynomial.
    pub fn exhaustion_index_of(&self, f: &TrigPoly) -> u64 {
        self.exhaustion_index(f.support().map(|n| n.components()[0]))
    }

    /// The permutation `kn ↦ kσ(n)` on `kℤ`, identity off `kℤ`.
    ///
    /// Rearranged partial sums of `T(k·)` under the dilated permutation are
    /// dilates of rearranged partial sums of `T`.
    pub fn dilate(&self, k: i64) -> Result<Permutation> {
        if k <= 0 {
            return Err(Error::InvalidInput("dilation factor must be positive".into()));
        }
        Permutation::from_pairs(self.pairs().map(|(a, b)| (k * a, k * b)))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WirePerm {
    map: Vec<(i64, i64)>,
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WirePerm {
            map: self.pairs().collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = WirePerm::deserialize(d)?;
        Permutation::from_pairs(w.map).map_err(D::Error::custom)
    }
}

/// First `m` frequencies of `f` by decreasing `|f̂(n)|`.
///
/// Ties are broken by `|n|` ascending, then `n` ascending. Asking for more
/// than the support size returns the whole support.
pub fn greedy_order(f: &TrigPoly, m: usize) -> Result<Vec<i64>> {
    if f.dim() != 1 {
        return Err(Error::InvalidInput("greedy ordering is one-dimensional".into()));
    }
    let mut terms: Vec<(i64, f64)> = f
        .iter()
        .map(|(n, c)| (n.components()[0], c.norm()))
        .collect();
    terms.sort_by(|a, b| {
        b.1.total_cmp(&a.1)
            .then(a.0.unsigned_abs().cmp(&b.0.unsigned_abs()))
            .then(a.0.cmp(&b.0))
    });
    Ok(terms.into_iter().take(m).map(|(n, _)| n).collect())
}

/// Permutation listing `order` first, in the natural symmetric slots
/// `0, -1, 1, -2, 2, …`, so that `S_{σ,N}` picks up the first `2N+1` entries.
pub fn permutation_from_order(order: &[i64]) -> Result<Permutation> {
    let slot = |i: usize| -> i64 {
        let i = i as i64;
        if i % 2 == 0 {
            i / 2
        } else {
            -(i + 1) / 2
        }
    };
    // fill slots with the listed frequencies, then route the displaced slot
    // values into the listed frequencies' vacated positions
    let listed: BTreeSet<i64> = order.iter().copied().collect();
    if listed.len() != order.len() {
        return Err(Error::InvalidPermutation("order lists a frequency twice".into()));
    }
    let slots: Vec<i64> = (0..order.len()).map(slot).collect();
    let slot_set: BTreeSet<i64> = slots.iter().copied().collect();
    let mut pairs: Vec<(i64, i64)> = slots.iter().copied().zip(order.iter().copied()).collect();
    let displaced: Vec<i64> = slot_set.difference(&listed).copied().collect();
    let vacated: Vec<i64> = listed.difference(&slot_set).copied().collect();
    pairs.extend(vacated.into_iter().zip(displaced));
    Permutation::from_pairs(pairs)
}

/// Block composition `σ̄(j) = σ_k(outer(j))` for `j ∈ (N_k, N_{k+1}]`.
///
/// Each inner permutation must map `outer((N_k, N_{k+1}])` onto itself; only
/// its action on that set is used. Outside the blocks `σ̄` agrees with `outer`,
/// so the result is always a bijection.
pub fn block_permutation(
    outer: &Permutation,
    breakpoints: &[i64],
    inner: &[Permutation],
) -> Result<Permutation> {
    if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("breakpoints must be strictly increasing".into()));
    }
    if inner.len() + 1 != breakpoints.len() {
        return Err(Error::InvalidInput(format!(
            "{} breakpoints define {} blocks but {} inner permutations were given",
            breakpoints.len(),
            breakpoints.len().saturating_sub(1),
            inner.len()
        )));
    }
    let mut pairs: BTreeMap<i64, i64> = outer.pairs().collect();
    for (k, sigma_k) in inner.iter().enumerate() {
        let block = breakpoints[k] + 1..=breakpoints[k + 1];
        let image: BTreeSet<i64> = block.clone().map(|j| outer.apply(j)).collect();
        if let Some(bad) = image.iter().find(|&&x| !image.contains(&sigma_k.apply(x))) {
            return Err(Error::InvalidPermutation(format!(
                "inner permutation {k} sends {bad} outside the image of block ({}, {}]",
                breakpoints[k],
                breakpoints[k + 1]
            )));
        }
        for j in block {
            pairs.insert(j, sigma_k.apply(outer.apply(j)));
        }
    }
    Permutation::from_pairs(pairs)
}

/// Nested finite sets `J_1 ⊊ J_2 ⊊ …` of a fixed dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Exhaustion {
    dim: usize,
    blocks: Vec<FreqSet>,
}

/// Families produced by [`standard_exhaustions`].
#[derive(Debug, Clone, PartialEq)]
pub enum ExhaustionKind {
    /// `{max_i |n_i| ≤ k}`.
    Boxes,
    /// `{Σ n_i² ≤ k²}`.
    Balls,
    Custom(Vec<FreqSet>),
}

impl Exhaustion {
    pub fn new(dim: usize, blocks: Vec<FreqSet>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        for b in &blocks {
            if b.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: b.dim(),
                });
            }
        }
        for (i, w) in blocks.windows(2).enumerate() {
            if !(w[1].is_superset(&w[0]) && w[1].len() > w[0].len()) {
                return Err(Error::NotNested { index: i + 1 });
            }
        }
        Ok(Exhaustion { dim, blocks })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn blocks(&self) -> &[FreqSet] {
        &self.blocks
    }

    /// Index of the first block containing the support of `f`, if any.
    pub fn first_covering(&self, f: &TrigPoly) -> Option<usize> {
        self.blocks.iter().position(|b| b.covers(f))
    }
}

impl Serialize for Exhaustion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.blocks.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Exhaustion {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let blocks = Vec::<FreqSet>::deserialize(d)?;
        let dim = blocks
            .first()
            .map(FreqSet::dim)
            .ok_or_else(|| D::Error::custom("an exhaustion needs at least one block"))?;
        Exhaustion::new(dim, blocks).map_err(D::Error::custom)
    }
}

/// The first `count` sets of a standard family (`k = 0, …, count-1`).
pub fn standard_exhaustions(dim: usize, kind: ExhaustionKind, count: usize) -> Result<Exhaustion> {
    let blocks = match kind {
        ExhaustionKind::Boxes => (0..count as u64)
            .map(|k| FreqSet::cube(dim, k))
            .collect::<Result<Vec<_>>>()?,
        ExhaustionKind::Balls => (0..count as u64)
            .map(|k| {
                let cube = FreqSet::cube(dim, k)?;
                let r2 = (k * k) as i64;
                FreqSet::from_iter(
                    dim,
                    cube.iter()
                        .filter(|n| n.components().iter().map(|c| c * c).sum::<i64>() <= r2)
                        .cloned(),
                )
            })
            .collect::<Result<Vec<_>>>()?,
        ExhaustionKind::Custom(blocks) => blocks,
    };
    Exhaustion::new(dim, blocks)
}
