//! Partial-sum operators.
//!
//! Set-indexed truncation `S_J` is the single primitive; symmetric,
//! rearranged and sign-flipped sums are expressed through it.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rearrange::Permutation;
use crate::trig::{Frequency, TrigPoly};

/// Finite set of frequencies of a fixed dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreqSet {
    dim: usize,
    elements: BTreeSet<Frequency>,
}

impl FreqSet {
    pub fn empty(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(FreqSet {
            dim,
            elements: BTreeSet::new(),
        })
    }

    pub fn from_iter<I, F>(dim: usize, it: I) -> Result<Self>
    where
        I: IntoIterator<Item = F>,
        F: Into<Frequency>,
    {
        let mut s = FreqSet::empty(dim)?;
        for n in it {
            s.insert(n.into())?;
        }
        Ok(s)
    }

    /// `{a, …, b} ⊂ ℤ`.
    pub fn range(a: i64, b: i64) -> Self {
        FreqSet {
            dim: 1,
            elements: (a..=b).map(Frequency::scalar).collect(),
        }
    }

    /// The cube `{n : max_i |n_i| ≤ k}`.
    pub fn cube(dim: usize, k: u64) -> Result<Self> {
        let mut s = FreqSet::empty(dim)?;
        let k = k as i64;
        let width = (2 * k + 1) as usize;
        let total = width
            .checked_pow(dim as u32)
            .ok_or_else(|| Error::InvalidInput("cube too large".into()))?;
        let mut n = vec![0i64; dim];
        for idx in 0..total {
            let mut r = idx;
            for axis in (0..dim).rev() {
                n[axis] = (r % width) as i64 - k;
                r /= width;
            }
            s.elements.insert(Frequency::new(n.iter().copied()));
        }
        Ok(s)
    }

    pub fn insert(&mut self, n: Frequency) -> Result<bool> {
        if n.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: n.dim(),
            });
        }
        Ok(self.elements.insert(n))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, n: &Frequency) -> bool {
        self.elements.contains(n)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Frequency> + '_ {
        self.elements.iter()
    }

    pub fn is_superset(&self, other: &FreqSet) -> bool {
        self.elements.is_superset(&other.elements)
    }

    /// Whether every frequency of `p`'s support lies in the set.
    pub fn covers(&self, p: &TrigPoly) -> bool {
        p.support().all(|n| self.elements.contains(n))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireSet {
    dim: usize,
    elements: Vec<Frequency>,
}

impl Serialize for FreqSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WireSet {
            dim: self.dim,
            elements: self.elements.iter().cloned().collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FreqSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = WireSet::deserialize(d)?;
        FreqSet::from_iter(w.dim, w.elements).map_err(D::Error::custom)
    }
}

/// A sign `±1`. Orders `Minus < Plus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn from_i8(v: i8) -> Result<Sign> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(Error::InvalidInput(format!("sign must be ±1, got {other}"))),
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.as_i8().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        Sign::from_i8(i8::deserialize(d)?).map_err(D::Error::custom)
    }
}

/// Renders signs as a `+`/`-` string.
pub fn signs_to_string(signs: &[Sign]) -> String {
    signs
        .iter()
        .map(|s| if *s == Sign::Plus { '+' } else { '-' })
        .collect()
}

/// Map from frequencies to `±1`; frequencies not listed carry `+1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignSequence {
    dim: usize,
    signs: BTreeMap<Frequency, Sign>,
}

impl SignSequence {
    pub fn all_plus(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(SignSequence {
            dim,
            signs: BTreeMap::new(),
        })
    }

    /// One-dimensional sequence on `{0, …, len-1}`.
    pub fn from_slice(signs: &[Sign]) -> Self {
        SignSequence {
            dim: 1,
            signs: signs
                .iter()
                .enumerate()
                .map(|(n, &s)| (Frequency::scalar(n as i64), s))
                .collect(),
        }
    }

    pub fn from_pairs<I, F>(dim: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (F, Sign)>,
        F: Into<Frequency>,
    {
        let mut s = SignSequence::all_plus(dim)?;
        for (n, v) in pairs {
            s.set(n.into(), v)?;
        }
        Ok(s)
    }

    pub fn set(&mut self, n: Frequency, s: Sign) -> Result<()> {
        if n.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: n.dim(),
            });
        }
        self.signs.insert(n, s);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, n: &Frequency) -> Sign {
        self.signs.get(n).copied().unwrap_or(Sign::Plus)
    }

    /// Signs at `0, …, len-1` of a one-dimensional sequence.
    pub fn prefix(&self, len: usize) -> Vec<Sign> {
        (0..len as i64).map(|n| self.get(&Frequency::scalar(n))).collect()
    }

    /// Number of explicitly listed entries.
    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Frequency, &Sign)> + '_ {
        self.signs.iter()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireSign {
    n: Frequency,
    s: Sign,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireSigns {
    dim: usize,
    signs: Vec<WireSign>,
}

impl Serialize for SignSequence {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WireSigns {
            dim: self.dim,
            signs: self
                .signs
                .iter()
                .map(|(n, &v)| WireSign { n: n.clone(), s: v })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SignSequence {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = WireSigns::deserialize(d)?;
        SignSequence::from_pairs(w.dim, w.signs.into_iter().map(|t| (t.n, t.s)))
            .map_err(D::Error::custom)
    }
}

fn check_dims(f: &TrigPoly, dim: usize) -> Result<()> {
    if f.dim() != dim {
        Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: dim,
        })
    } else {
        Ok(())
    }
}

/// `S_J[f]`: coefficients of `f` restricted to `J`.
pub fn partial_sum(f: &TrigPoly, set: &FreqSet) -> Result<TrigPoly> {
    check_dims(f, set.dim())?;
    let coeffs = f
        .iter()
        .filter(|(n, _)| set.contains(n))
        .map(|(n, c)| (n.clone(), *c))
        .collect();
    Ok(TrigPoly::from_map_unchecked(f.dim(), coeffs))
}

/// `S_N[f]`, the restriction to `|n| ≤ N` of a one-dimensional polynomial.
pub fn symmetric_partial_sum(f: &TrigPoly, n: u64) -> Result<TrigPoly> {
    if f.dim() != 1 {
        return Err(Error::InvalidInput(
            "symmetric partial sums are one-dimensional; use partial_sum with a cube".into(),
        ));
    }
    Ok(f.map_coeffs(|k, c| if k.max_abs() <= n { c } else { Complex64::default() }))
}

/// `S_{σ,N}[f]`: restriction to `σ({-N, …, N})`.
pub fn rearranged_partial_sum(f: &TrigPoly, sigma: &Permutation, n: u64) -> Result<TrigPoly> {
    if f.dim() != 1 {
        return Err(Error::InvalidInput("rearranged partial sums are one-dimensional".into()));
    }
    partial_sum(f, &sigma.image_of_window(n))
}

/// `T_{Ε,J}[f]`: coefficient `ε_n c_n` for `n ∈ J`, zero elsewhere.
pub fn sign_flip_sum(f: &TrigPoly, signs: &SignSequence, set: &FreqSet) -> Result<TrigPoly> {
    check_dims(f, set.dim())?;
    check_dims(f, signs.dim())?;
    let coeffs = f
        .iter()
        .filter(|(n, _)| set.contains(n))
        .map(|(n, c)| (n.clone(), c * signs.get(n).value()))
        .collect();
    Ok(TrigPoly::from_map_unchecked(f.dim(), coeffs))
}

/// `Σ_{n=0}^{N} e_n`, with modulus `|sin(π(N+1)t) / sin(πt)|`.
pub fn dirichlet_one_sided(n: u64) -> TrigPoly {
    TrigPoly::from_terms(1, (0..=n as i64).map(|k| (k, Complex64::new(1.0, 0.0)))).expect("dim 1")
}

/// Fejér kernel `Σ_{|n|≤N} (1 - |n|/(N+1)) e_n`.
pub fn fejer(n: u64) -> TrigPoly {
    let n = n as i64;
    TrigPoly::from_terms(
        1,
        (-n..=n).map(|k| (k, Complex64::new(fejer_weight(k, n), 0.0))),
    )
    .expect("dim 1")
}

fn fejer_weight(k: i64, n: i64) -> f64 {
    let num = (n + 1 - k.abs()).max(0);
    num as f64 / (n + 1) as f64
}

fn one_dim(f: &TrigPoly, what: &str) -> Result<()> {
    if f.dim() != 1 {
        Err(Error::InvalidInput(format!("{what} is defined for one-dimensional polynomials")))
    } else {
        Ok(())
    }
}

/// Fejér mean `σ_N[f]`: coefficients `(1 - |n|/(N+1)) f̂(n)`.
pub fn fejer_mean(f: &TrigPoly, n: u64) -> Result<TrigPoly> {
    one_dim(f, "the Fejér mean")?;
    let n = n as i64;
    Ok(f.map_coeffs(|k, c| c * fejer_weight(k.components()[0], n)))
}

/// De la Vallée Poussin mean `V_N[f] = 2σ_{2N+1}[f] - σ_N[f]`.
///
/// The multiplier is `1` for `|n| ≤ N+1` and `(2N+2-|n|)/(N+1)` up to
/// `2N+1`; it is formed from integers so reproduction is exact.
pub fn vallee_poussin_mean(f: &TrigPoly, n: u64) -> Result<TrigPoly> {
    one_dim(f, "the de la Vallée Poussin mean")?;
    let n = n as i64;
    Ok(f.map_coeffs(|k, c| {
        let a = k.components()[0].abs();
        // 2σ_{2N+1} weight is (2N+2-|k|)/(N+1); σ_N weight is (N+1-|k|)/(N+1)
        let num = (2 * n + 2 - a).max(0) - (n + 1 - a).max(0);
        if num == n + 1 {
            c
        } else {
            c * (num as f64 / (n + 1) as f64)
        }
    }))
}
