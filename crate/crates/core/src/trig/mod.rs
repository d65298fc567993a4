//! Sparse multivariate trigonometric polynomials on the torus `[0,1)^d`.
//!
//! A [`TrigPoly`] stores only nonzero coefficients, keyed by integer
//! frequency vectors in lexicographic order. Exact zeros are pruned; nothing
//! else is, so sparse arithmetic never silently drops mass.

mod fft;
mod grid;
mod norms;

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub use grid::{TorusGrid, MAX_GRID_SAMPLES};
pub use norms::{lp_grid_floor, NormCertificate};

/// Integer frequency vector `n ∈ ℤ^d`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Frequency(SmallVec<[i64; 4]>);

impl Frequency {
    pub fn new(components: impl IntoIterator<Item = i64>) -> Self {
        Frequency(components.into_iter().collect())
    }

    /// One-dimensional frequency.
    pub fn scalar(n: i64) -> Self {
        Frequency(smallvec::smallvec![n])
    }

    pub fn zero(dim: usize) -> Self {
        Frequency(smallvec::smallvec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[i64] {
        &self.0
    }

    /// `max_i |n_i|`.
    pub fn max_abs(&self) -> u64 {
        self.0.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
    }

    /// Concatenation `(m, n) ∈ ℤ^{d1+d2}`.
    pub fn concat(&self, other: &Frequency) -> Frequency {
        Frequency(self.0.iter().chain(other.0.iter()).copied().collect())
    }

    pub fn scaled(&self, k: i64) -> Frequency {
        Frequency(self.0.iter().map(|c| c * k).collect())
    }

    fn phase(&self, t: &[f64]) -> f64 {
        let s: f64 = self.0.iter().zip(t).map(|(&n, &x)| n as f64 * x).sum();
        s.rem_euclid(1.0)
    }
}

impl fmt::Debug for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            write!(f, "{}", self.0[0])
        } else {
            write!(f, "{:?}", self.0.as_slice())
        }
    }
}

impl From<i64> for Frequency {
    fn from(n: i64) -> Self {
        Frequency::scalar(n)
    }
}

impl From<Vec<i64>> for Frequency {
    fn from(v: Vec<i64>) -> Self {
        Frequency(v.into())
    }
}

impl<const D: usize> From<[i64; D]> for Frequency {
    fn from(v: [i64; D]) -> Self {
        Frequency::new(v)
    }
}

impl Serialize for Frequency {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.as_slice().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Frequency {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<i64>::deserialize(d)?;
        if v.is_empty() {
            return Err(serde::de::Error::custom("frequency must have at least one component"));
        }
        Ok(Frequency(v.into()))
    }
}

/// `e^{2πi x}` with the argument reduced modulo 1 first.
pub(crate) fn unit(x: f64) -> Complex64 {
    let (s, c) = (TAU * x.rem_euclid(1.0)).sin_cos();
    Complex64::new(c, s)
}

/// `e^{2πi num/den}` computed from the exact residue of `num` modulo `den`.
pub(crate) fn root_of_unity(num: i128, den: usize) -> Complex64 {
    let r = num.rem_euclid(den as i128) as f64 / den as f64;
    unit(r)
}

/// Sparse trigonometric polynomial `Σ c_n e^{2πi⟨n,t⟩}` on `𝕋^d`.
#[derive(Clone, PartialEq)]
pub struct TrigPoly {
    dim: usize,
    coeffs: BTreeMap<Frequency, Complex64>,
}

impl fmt::Debug for TrigPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TrigPoly")
            .field("dim", &self.dim)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl TrigPoly {
    /// The zero polynomial in `dim` variables.
    pub fn zero(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(TrigPoly {
            dim,
            coeffs: BTreeMap::new(),
        })
    }

    pub fn constant(dim: usize, c: Complex64) -> Result<Self> {
        TrigPoly::from_terms(dim, [(Frequency::zero(dim), c)])
    }

    /// Builds a polynomial from `(frequency, coefficient)` pairs. Repeated
    /// frequencies are summed; exact zeros are dropped.
    pub fn from_terms<I, F>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (F, Complex64)>,
        F: Into<Frequency>,
    {
        let mut p = TrigPoly::zero(dim)?;
        for (n, c) in terms {
            let n = n.into();
            if n.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: n.dim(),
                });
            }
            p.accumulate(n, c);
        }
        Ok(p)
    }

    /// One-dimensional polynomial with real coefficients.
    pub fn from_real(terms: &[(i64, f64)]) -> Self {
        TrigPoly::from_terms(1, terms.iter().map(|&(n, c)| (n, Complex64::new(c, 0.0))))
            .expect("dimension 1")
    }

    /// One-dimensional polynomial `Σ_k seq[k] e_{start+k}`.
    pub fn from_sequence(start: i64, seq: &[Complex64]) -> Self {
        TrigPoly::from_terms(
            1,
            seq.iter().enumerate().map(|(k, &c)| (start + k as i64, c)),
        )
        .expect("dimension 1")
    }

    pub(crate) fn from_map_unchecked(dim: usize, coeffs: BTreeMap<Frequency, Complex64>) -> Self {
        debug_assert!(coeffs.keys().all(|n| n.dim() == dim));
        debug_assert!(coeffs.values().all(|c| *c != Complex64::new(0.0, 0.0)));
        TrigPoly { dim, coeffs }
    }

    fn accumulate(&mut self, n: Frequency, c: Complex64) {
        let entry = self.coeffs.entry(n);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let v = *o.get() + c;
                if v == Complex64::new(0.0, 0.0) {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                if c != Complex64::new(0.0, 0.0) {
                    v.insert(c);
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored (nonzero) coefficients.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Same as [`TrigPoly::is_zero`].
    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, n: &Frequency) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    /// Coefficient of a one-dimensional polynomial.
    pub fn coeff_1d(&self, n: i64) -> Complex64 {
        self.coeff(&Frequency::scalar(n))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Frequency, &Complex64)> + '_ {
        self.coeffs.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &Frequency> + '_ {
        self.coeffs.keys()
    }

    /// `max_n max_i |n_i|` over the support, `0` for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.keys().map(|n| n.max_abs()).max().unwrap_or(0) as usize
    }

    /// Smallest and largest frequency along `axis`, if the support is nonempty.
    pub fn axis_range(&self, axis: usize) -> Option<(i64, i64)> {
        let mut it = self.coeffs.keys().map(|n| n.components()[axis]);
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v))))
    }

    /// Half the spectral width along `axis`: `(max n_i - min n_i) / 2`.
    ///
    /// Multiplying by a unimodular character centres the spectrum without
    /// changing `|p|`, so this (not [`degree`](Self::degree)) controls how
    /// fast `|p|` can vary between grid points.
    pub fn half_bandwidth(&self, axis: usize) -> f64 {
        self.axis_range(axis)
            .map(|(lo, hi)| (hi - lo) as f64 / 2.0)
            .unwrap_or(0.0)
    }

    fn check_dim(&self, other_dim: usize) -> Result<()> {
        if self.dim != other_dim {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other_dim,
            })
        } else {
            Ok(())
        }
    }

    /// Direct summation `Σ c_n e^{2πi⟨n,t⟩}`.
    pub fn eval(&self, t: &[f64]) -> Result<Complex64> {
        self.check_dim(t.len())?;
        Ok(self
            .coeffs
            .iter()
            .map(|(n, c)| c * unit(n.phase(t)))
            .sum())
    }

    pub fn eval_1d(&self, t: f64) -> Complex64 {
        self.eval(&[t]).expect("one-dimensional polynomial")
    }

    pub fn add(&self, other: &TrigPoly) -> Result<TrigPoly> {
        self.check_dim(other.dim)?;
        let mut out = self.clone();
        for (n, c) in &other.coeffs {
            out.accumulate(n.clone(), *c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &TrigPoly) -> Result<TrigPoly> {
        self.check_dim(other.dim)?;
        let mut out = self.clone();
        for (n, c) in &other.coeffs {
            out.accumulate(n.clone(), -*c);
        }
        Ok(out)
    }

    pub fn scale(&self, s: Complex64) -> TrigPoly {
        self.map_coeffs(|_, c| c * s)
    }

    pub fn scale_real(&self, s: f64) -> TrigPoly {
        self.map_coeffs(|_, c| c * s)
    }

    /// Applies `f` to every stored coefficient, pruning exact zeros.
    pub fn map_coeffs(&self, mut f: impl FnMut(&Frequency, Complex64) -> Complex64) -> TrigPoly {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(n, &c)| (n.clone(), f(n, c)))
            .filter(|(_, c)| *c != Complex64::new(0.0, 0.0))
            .collect();
        TrigPoly {
            dim: self.dim,
            coeffs,
        }
    }

    /// Pointwise product, i.e. convolution of coefficient sequences.
    pub fn mul(&self, other: &TrigPoly) -> Result<TrigPoly> {
        self.check_dim(other.dim)?;
        let mut out = TrigPoly::zero(self.dim)?;
        for (m, a) in &self.coeffs {
            for (n, b) in &other.coeffs {
                let k = Frequency(
                    m.0.iter()
                        .zip(n.0.iter())
                        .map(|(x, y)| x + y)
                        .collect(),
                );
                out.accumulate(k, a * b);
            }
        }
        Ok(out)
    }

    /// Complex conjugate function: `c_n ↦ conj(c_{-n})`.
    pub fn conj(&self) -> TrigPoly {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(n, c)| (n.scaled(-1), c.conj()))
            .collect();
        TrigPoly {
            dim: self.dim,
            coeffs,
        }
    }

    /// `T(t) ↦ T(kt)`: moves every coefficient from `n` to `kn`.
    pub fn dilate(&self, k: i64) -> Result<TrigPoly> {
        if k == 0 {
            return Err(Error::InvalidInput("dilation factor must be nonzero".into()));
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|(n, c)| (n.scaled(k), *c))
            .collect();
        Ok(TrigPoly {
            dim: self.dim,
            coeffs,
        })
    }

    /// Tensor product `(p ⊗ q)(s, t) = p(s) q(t)`.
    pub fn tensor(&self, other: &TrigPoly) -> TrigPoly {
        let mut coeffs = BTreeMap::new();
        for (m, a) in &self.coeffs {
            for (n, b) in &other.coeffs {
                let c = a * b;
                if c != Complex64::new(0.0, 0.0) {
                    coeffs.insert(m.concat(n), c);
                }
            }
        }
        TrigPoly {
            dim: self.dim + other.dim,
            coeffs,
        }
    }

    /// `p^{⊗d}`.
    pub fn tensor_power(&self, d: usize) -> Result<TrigPoly> {
        if d == 0 {
            return Err(Error::ZeroDimension);
        }
        let mut out = self.clone();
        for _ in 1..d {
            out = out.tensor(self);
        }
        Ok(out)
    }

    /// Largest coefficient-wise distance to `other`, over the union of supports.
    pub fn max_coeff_diff(&self, other: &TrigPoly) -> f64 {
        let mut worst: f64 = 0.0;
        for (n, c) in &self.coeffs {
            worst = worst.max((c - other.coeff(n)).norm());
        }
        for (n, c) in &other.coeffs {
            if !self.coeffs.contains_key(n) {
                worst = worst.max(c.norm());
            }
        }
        worst
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireTerm {
    n: Frequency,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WirePoly {
    dim: usize,
    coeffs: Vec<WireTerm>,
}

impl Serialize for TrigPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WirePoly {
            dim: self.dim,
            coeffs: self
                .coeffs
                .iter()
                .map(|(n, c)| WireTerm {
                    n: n.clone(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TrigPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = WirePoly::deserialize(d)?;
        let mut p = TrigPoly::zero(wire.dim).map_err(D::Error::custom)?;
        for t in wire.coeffs {
            if t.n.dim() != wire.dim {
                return Err(D::Error::custom(format!(
                    "frequency {:?} has dimension {}, expected {}",
                    t.n,
                    t.n.dim(),
                    wire.dim
                )));
            }
            if !(t.re.is_finite() && t.im.is_finite()) {
                return Err(D::Error::custom("coefficients must be finite"));
            }
            if p.coeffs.contains_key(&t.n) {
                return Err(D::Error::custom(format!("duplicate frequency {:?}", t.n)));
            }
            p.accumulate(t.n, Complex64::new(t.re, t.im));
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eval_constant_and_character() {
        let one = TrigPoly::from_real(&[(0, 1.0)]);
        assert_eq!(one.eval_1d(0.37), c(1.0, 0.0));
        let e1 = TrigPoly::from_real(&[(1, 1.0)]);
        assert!((e1.eval_1d(0.25) - c(0.0, 1.0)).norm() < 1e-15);
        let d2 = TrigPoly::from_real(&[(-2, 1.0), (-1, 1.0), (0, 1.0), (1, 1.0), (2, 1.0)]);
        assert_eq!(d2.eval_1d(0.0), c(5.0, 0.0));
    }

    #[test]
    fn eval_rejects_wrong_dimension() {
        let p = TrigPoly::from_real(&[(1, 1.0)]);
        assert!(matches!(
            p.eval(&[0.1, 0.2]),
            Err(Error::DimensionMismatch { expected: 1, got: 2 })
        ));
    }

    #[test]
    fn eval_is_periodic() {
        let p = TrigPoly::from_terms(2, [([3, -1], c(0.5, 1.0)), ([0, 2], c(-1.0, 0.25))]).unwrap();
        let a = p.eval(&[0.13, 0.71]).unwrap();
        let b = p.eval(&[1.13, -0.29]).unwrap();
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn zero_coefficients_are_pruned() {
        let p = TrigPoly::from_real(&[(0, 1.0), (1, 0.0)]);
        assert_eq!(p.len(), 1);
        let q = p.sub(&p).unwrap();
        assert!(q.is_zero());
        let tiny = TrigPoly::from_real(&[(3, 1e-300)]);
        assert_eq!(tiny.len(), 1, "no epsilon pruning");
    }

    #[test]
    fn arithmetic_examples() {
        let one = TrigPoly::from_real(&[(0, 1.0)]);
        assert_eq!(one.add(&one).unwrap(), TrigPoly::from_real(&[(0, 2.0)]));
        let a = TrigPoly::from_real(&[(1, 1.0)]);
        let b = TrigPoly::from_real(&[(-1, 1.0)]);
        assert_eq!(a.mul(&b).unwrap(), one);
        let two_d = TrigPoly::constant(2, c(1.0, 0.0)).unwrap();
        assert!(a.add(&two_d).is_err());
        assert!(a.mul(&two_d).is_err());
    }

    #[test]
    fn multiply_degree_adds() {
        let p = TrigPoly::from_real(&[(-3, 1.0), (2, 2.0)]);
        let q = TrigPoly::from_real(&[(-4, 1.0), (1, 0.5)]);
        assert_eq!(p.mul(&q).unwrap().degree(), 7);
        assert_eq!(p.degree(), 3);
    }

    #[test]
    fn tensor_of_constants() {
        let one = TrigPoly::from_real(&[(0, 1.0)]);
        let t = one.tensor(&one);
        assert_eq!(t.dim(), 2);
        assert_eq!(t.coeff(&Frequency::from([0, 0])), c(1.0, 0.0));
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn dilation_moves_coefficients() {
        let p = TrigPoly::from_real(&[(-1, 2.0), (3, 1.0)]);
        let d = p.dilate(4).unwrap();
        assert_eq!(d.coeff_1d(-4), c(2.0, 0.0));
        assert_eq!(d.coeff_1d(12), c(1.0, 0.0));
        assert!((d.eval_1d(0.1) - p.eval_1d(0.4)).norm() < 1e-12);
        assert!(p.dilate(0).is_err());
    }

    #[test]
    fn conj_is_pointwise_conjugate() {
        let p = TrigPoly::from_terms(1, [(2, c(1.0, 2.0)), (-1, c(0.5, -0.3))]).unwrap();
        let t = 0.3141;
        assert!((p.conj().eval_1d(t) - p.eval_1d(t).conj()).norm() < 1e-14);
    }

    #[test]
    fn json_is_sorted_and_round_trips() {
        let p = TrigPoly::from_terms(2, [([1, 0], c(1.0, 0.0)), ([-1, 5], c(0.0, -2.0))]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(
            s,
            r#"{"dim":2,"coeffs":[{"n":[-1,5],"re":0.0,"im":-2.0},{"n":[1,0],"re":1.0,"im":0.0}]}"#
        );
        let back: TrigPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn json_rejects_bad_input() {
        assert!(serde_json::from_str::<TrigPoly>(r#"{"dim":1,"coeffs":[{"n":[1,2],"re":1,"im":0}]}"#).is_err());
        assert!(serde_json::from_str::<TrigPoly>(
            r#"{"dim":1,"coeffs":[{"n":[1],"re":1,"im":0},{"n":[1],"re":1,"im":0}]}"#
        )
        .is_err());
        assert!(serde_json::from_str::<TrigPoly>(r#"{"dim":0,"coeffs":[]}"#).is_err());
        assert!(serde_json::from_str::<TrigPoly>(r#"{"dim":1,"coeffs":[],"extra":1}"#).is_err());
    }
}
