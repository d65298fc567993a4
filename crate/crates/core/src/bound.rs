//! Lower-bound constructions for sign-flipped Fourier series restricted to a
//! set `E`, and the Wiener-gate checks for nonnegative coefficients.
//!
//! The sets `E` are finite unions of axis-aligned boxes containing the origin
//! in their interior, which keeps every measure computation exact.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flat::{default_points, fine_points, sign_polynomial};
use crate::summation::{sign_flip_sum, symmetric_partial_sum, FreqSet, Sign, SignSequence};
use crate::trig::{unit, TrigPoly};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Default density slack `γ0`.
pub const DEFAULT_GAMMA0: f64 = 1e-6;

/// Default flatness constant, attained by Rudin–Shapiro sequences.
pub const DEFAULT_C0: f64 = std::f64::consts::SQRT_2;

/// Margin below which a report fails.
pub const MARGIN_TOLERANCE: f64 = -1e-9;

/// Slack allowed on certified flatness of a sign prefix.
const FLAT_SLACK: f64 = 1e-6;

/// Quadrature nodes per oscillation of the integrand.
const NODES_PER_OSCILLATION: f64 = 64.0;

/// Gauss–Legendre nodes per panel.
const PANEL: usize = 16;

/// `2/(3√(3π))·(1/C0)`: the lower bound for `C1` obtained with `δ = 1/3`.
pub fn c1_lower_bound(c0: f64) -> f64 {
    2.0 * 2f64.sqrt() / (3.0 * (3.0 * PI).sqrt()) / c0
}

/// The constant `2√2/(15√(3π))` valid for every set of positive measure.
pub fn corollary_constant() -> f64 {
    2.0 * 2f64.sqrt() / (15.0 * (3.0 * PI).sqrt())
}

/// `(2/3)^{3d/2} π^{-d/2} C0^{-d}`.
pub fn tensor_constant(d: u32, c0: f64) -> f64 {
    let d = d as f64;
    (2.0f64 / 3.0).powf(1.5 * d) * PI.powf(-d / 2.0) * c0.powf(-d)
}

/// `((1-δ)/C0)^d (2δ/π)^{d/2} (1-γ0)`.
pub fn theoretical_bound(d: u32, delta: f64, c0: f64, gamma0: f64) -> f64 {
    let d = d as i32;
    ((1.0 - delta) / c0).powi(d) * (2.0 * delta / PI).powf(d as f64 / 2.0) * (1.0 - gamma0)
}

/// Maximiser of `(1-x)√x` over `points+1` equispaced nodes of `[0, 1]`.
pub fn optimal_delta(points: usize) -> f64 {
    (0..=points)
        .map(|i| i as f64 / points as f64)
        .map(|x| (x, (1.0 - x) * x.sqrt()))
        .fold((0.0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best })
        .0
}

/// Closed axis-aligned box in centred torus coordinates `[-1/2, 1/2]^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl AxisBox {
    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).product()
    }

    fn widths(&self) -> impl Iterator<Item = f64> + '_ {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l)
    }

    /// Measure of the intersection with `[-γ, γ]^d`.
    fn cube_overlap(&self, gamma: f64) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(&l, &h)| (h.min(gamma) - l.max(-gamma)).max(0.0))
            .product()
    }

    fn has_interior_origin(&self) -> bool {
        self.lo.iter().zip(&self.hi).all(|(&l, &h)| l < 0.0 && 0.0 < h)
    }

    fn interiors_meet(&self, other: &AxisBox) -> bool {
        (0..self.dim()).all(|a| self.lo[a].max(other.lo[a]) < self.hi[a].min(other.hi[a]))
    }

    fn contains(&self, t: &[f64]) -> bool {
        t.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(&x, (&l, &h))| l <= x && x <= h)
    }
}

/// Finite union of pairwise almost-disjoint boxes of positive total measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<AxisBox>", into = "Vec<AxisBox>")]
pub struct BoxUnion {
    boxes: Vec<AxisBox>,
}

impl From<BoxUnion> for Vec<AxisBox> {
    fn from(b: BoxUnion) -> Self {
        b.boxes
    }
}

impl TryFrom<Vec<AxisBox>> for BoxUnion {
    type Error = Error;

    fn try_from(boxes: Vec<AxisBox>) -> Result<Self> {
        BoxUnion::new(boxes)
    }
}

impl BoxUnion {
    pub fn new(boxes: Vec<AxisBox>) -> Result<Self> {
        let first = boxes
            .first()
            .ok_or_else(|| Error::InvalidInput("a box union needs at least one box".into()))?;
        let dim = first.dim();
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        for (i, b) in boxes.iter().enumerate() {
            if b.lo.len() != dim || b.hi.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: b.lo.len().max(b.hi.len()),
                });
            }
            for (&l, &h) in b.lo.iter().zip(&b.hi) {
                if !(l.is_finite() && h.is_finite() && -0.5 <= l && l < h && h <= 0.5) {
                    return Err(Error::InvalidInput(format!(
                        "box {i} needs -1/2 <= lo < hi <= 1/2 on every axis, got [{l}, {h}]"
                    )));
                }
            }
            for (j, other) in boxes[..i].iter().enumerate() {
                if b.interiors_meet(other) {
                    return Err(Error::InvalidInput(format!("boxes {j} and {i} overlap")));
                }
            }
        }
        Ok(BoxUnion { boxes })
    }

    /// `[lo, hi]` in one dimension.
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        BoxUnion::new(vec![AxisBox {
            lo: vec![lo],
            hi: vec![hi],
        }])
    }

    /// `[-a, a]^d`.
    pub fn centered_cube(dim: usize, a: f64) -> Result<Self> {
        BoxUnion::new(vec![AxisBox {
            lo: vec![-a; dim],
            hi: vec![a; dim],
        }])
    }

    pub fn dim(&self) -> usize {
        self.boxes[0].dim()
    }

    pub fn boxes(&self) -> &[AxisBox] {
        &self.boxes
    }

    pub fn measure(&self) -> f64 {
        self.boxes.iter().map(AxisBox::volume).sum()
    }

    /// `|E ∩ [-γ, γ]^d|`.
    pub fn cube_measure(&self, gamma: f64) -> f64 {
        self.boxes.iter().map(|b| b.cube_overlap(gamma)).sum()
    }

    pub fn contains(&self, t: &[f64]) -> bool {
        self.boxes.iter().any(|b| b.contains(t))
    }

    fn min_width(&self) -> f64 {
        self.boxes
            .iter()
            .flat_map(|b| b.widths())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Largest `γ1` such that `[-γ, γ]^d ⊂ E` (up to measure zero) for all
/// `γ ≤ γ1`. On that window `|E ∩ [-γ,γ]^d| = (2γ)^d`, so the density
/// inequality with slack `(1-γ0)^2` holds for every admissible `γ0`.
///
/// Candidates are the box coordinates; the answer is exact.
pub fn density_window(set: &BoxUnion, gamma0: f64) -> Result<f64> {
    if !(gamma0 > 0.0 && gamma0 < 1.0) {
        return Err(Error::InvalidInput(format!("γ0 must lie in (0, 1), got {gamma0}")));
    }
    if !set.boxes.iter().any(AxisBox::has_interior_origin) {
        return Err(Error::InvalidInput(
            "the origin must be an interior point of one of the boxes (translate E first)".into(),
        ));
    }
    let mut candidates: Vec<f64> = set
        .boxes
        .iter()
        .flat_map(|b| b.lo.iter().chain(&b.hi))
        .map(|x| x.abs())
        .filter(|&x| x > 0.0)
        .collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let d = set.dim() as i32;
    let mut window = 0.0;
    for c in candidates {
        if set.cube_measure(c) >= (2.0 * c).powi(d) * (1.0 - 1e-12) {
            window = c;
        } else {
            break;
        }
    }
    Ok(window)
}

/// Smallest `N` with `δ/(π(N+1)) < γ1`.
pub fn minimal_degree(delta: f64, window: f64) -> usize {
    let mut n = ((delta / (PI * window)).floor() as usize).saturating_sub(1);
    while delta / (PI * (n + 1) as f64) >= window {
        n += 1;
    }
    n
}

/// Output of [`thm59_construct`].
#[derive(Debug, Clone, PartialEq)]
pub struct Construction {
    /// `(C0√(N+1))^{-1} Σ ε_n e_n`.
    pub f: TrigPoly,
    /// Flip sequence turning `f` into `(C0√(N+1))^{-1} Σ e_n`.
    pub flips: SignSequence,
    pub n: usize,
    /// Smallest degree allowed by the density window.
    pub n_min: usize,
    pub window: f64,
}

impl Construction {
    /// `T_Ε[f]` restricted to `{0, …, N}`.
    pub fn flipped(&self) -> TrigPoly {
        sign_flip_sum(&self.f, &self.flips, &FreqSet::range(0, self.n as i64))
            .expect("one-dimensional data")
    }
}

fn is_certified_flat(prefix: &[Sign], c0: f64) -> Result<bool> {
    let n = prefix.len() - 1;
    let p = sign_polynomial(prefix);
    let scale = ((n + 1) as f64).sqrt();
    // cheap rejection: any grid value already above the ceiling
    if p.sup_norm(default_points(n))?.lower / scale > c0 + FLAT_SLACK {
        return Ok(false);
    }
    Ok(p.sup_norm(fine_points(n + 1))?.upper / scale <= c0 + FLAT_SLACK)
}

/// Builds the normalised sign polynomial for the set `E`.
///
/// `N` is the smallest degree that meets the density window and whose sign
/// prefix `ε_0, …, ε_N` is certified flat at `C0`, so that `‖f‖_∞ ≤ 1`.
pub fn thm59_construct(
    set: &BoxUnion,
    delta: f64,
    signs: &[Sign],
    gamma0: f64,
    c0: f64,
) -> Result<Construction> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidInput(format!("δ must lie in (0, 1), got {delta}")));
    }
    if !(c0.is_finite() && c0 >= 1.0) {
        return Err(Error::InvalidInput(format!("C0 must be a finite value >= 1, got {c0}")));
    }
    let window = density_window(set, gamma0)?;
    let n_min = minimal_degree(delta, window);
    if signs.len() < n_min + 1 {
        return Err(Error::SignsTooShort {
            required: n_min + 1,
            available: signs.len(),
        });
    }
    for n in n_min..signs.len() {
        let prefix = &signs[..=n];
        if !is_certified_flat(prefix, c0)? {
            continue;
        }
        let scale = 1.0 / (c0 * ((n + 1) as f64).sqrt());
        return Ok(Construction {
            f: sign_polynomial(prefix).scale_real(scale),
            flips: SignSequence::from_slice(prefix),
            n,
            n_min,
            window,
        });
    }
    Err(Error::InvalidInput(format!(
        "no prefix of the {} supplied signs with N >= {n_min} is certified flat at C0 = {c0}",
        signs.len()
    )))
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let k = k as f64;
                    let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let step = p1 / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Composite rule on `[lo, hi]` with `nodes` points (a multiple of the panel).
fn composite_rule(lo: f64, hi: f64, nodes: usize, base: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let panels = nodes / PANEL;
    let h = (hi - lo) / panels as f64;
    (0..panels)
        .flat_map(|p| {
            let a = lo + p as f64 * h;
            base.iter().map(move |&(x, w)| (a + (x + 1.0) * h / 2.0, w * h / 2.0))
        })
        .collect()
}

/// `(∫_E |p|^2)^{1/2}` by per-box tensor Gauss–Legendre quadrature.
///
/// Each axis of each box carries at least 64 nodes per oscillation of the
/// degree-`2·deg(p)` integrand. `m` is the resolution of the companion
/// sampling grid, which must not be coarser than the narrowest box.
pub fn restricted_l2_quadrature(p: &TrigPoly, set: &BoxUnion, m: usize) -> Result<f64> {
    if p.dim() != set.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            got: p.dim(),
        });
    }
    let min_width = set.min_width();
    if (m as f64) * min_width < 1.0 {
        return Err(Error::QuadratureTooCoarse {
            points: m,
            width: min_width,
        });
    }
    let base = gauss_legendre(PANEL);
    let degree = p.degree().max(1) as f64;
    let mut total = 0.0;
    for b in &set.boxes {
        let rules: Vec<Vec<(f64, f64)>> = b
            .lo
            .iter()
            .zip(&b.hi)
            .map(|(&lo, &hi)| {
                let want = (NODES_PER_OSCILLATION * 2.0 * degree * (hi - lo)).ceil() as usize;
                let nodes = want.max(PANEL).div_ceil(PANEL) * PANEL;
                composite_rule(lo, hi, nodes, &base)
            })
            .collect();
        let count: usize = rules.iter().map(Vec::len).product();
        // collected before summing so the result does not depend on the thread count
        let terms: Vec<f64> = (0..count)
            .into_par_iter()
            .map(|mut idx| {
                let mut t = vec![0.0; rules.len()];
                let mut w = 1.0;
                for a in (0..rules.len()).rev() {
                    let (x, wa) = rules[a][idx % rules[a].len()];
                    idx /= rules[a].len();
                    t[a] = x;
                    w *= wa;
                }
                w * p.eval(&t).expect("dimension checked").norm_sqr()
            })
            .collect();
        total += terms.iter().sum::<f64>();
    }
    Ok(total.max(0.0).sqrt())
}

/// `∫_lo^hi e^{2πikt} dt`.
fn character_integral(k: i64, lo: f64, hi: f64) -> Complex64 {
    if k == 0 {
        return Complex64::new(hi - lo, 0.0);
    }
    let kf = k as f64;
    (unit(kf * hi) - unit(kf * lo)) / Complex64::new(0.0, 2.0 * PI * kf)
}

/// `(∫_E |p|^2)^{1/2}` in closed form from the coefficients of `|p|^2`.
pub fn restricted_l2_exact(p: &TrigPoly, set: &BoxUnion) -> Result<f64> {
    if p.dim() != set.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            got: p.dim(),
        });
    }
    let square = p.mul(&p.conj())?;
    let total: f64 = set
        .boxes
        .iter()
        .map(|b| {
            square
                .iter()
                .map(|(n, c)| {
                    let integral = n
                        .components()
                        .iter()
                        .zip(b.lo.iter().zip(&b.hi))
                        .map(|(&k, (&lo, &hi))| character_integral(k, lo, hi))
                        .fold(Complex64::new(1.0, 0.0), |acc, v| acc * v);
                    (c * integral).re
                })
                .sum::<f64>()
        })
        .sum();
    Ok(total.max(0.0).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundReport {
    pub schema_version: u32,
    #[serde(rename = "E")]
    pub set: BoxUnion,
    pub dim: usize,
    pub delta: f64,
    pub gamma0: f64,
    pub n: usize,
    pub c0_used: f64,
    /// Quadrature value of `‖T_Ε[f]·1_E‖_2`.
    pub computed_norm: f64,
    pub theoretical_bound: f64,
    pub margin: f64,
    pub pass: bool,
    /// Certified upper bound on `‖f‖_∞` (of the tensor power when `d > 1`).
    pub f_sup_upper: f64,
    pub window: f64,
}

/// Parameters shared by the single-variable and tensor constructions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundParams {
    pub delta: f64,
    pub gamma0: f64,
    pub c0: f64,
    /// Resolution of the certification grid.
    pub points: usize,
}

impl Default for BoundParams {
    fn default() -> Self {
        BoundParams {
            delta: 1.0 / 3.0,
            gamma0: DEFAULT_GAMMA0,
            c0: DEFAULT_C0,
            points: 4096,
        }
    }
}

/// Single-variable construction on `E ⊂ 𝕋`, re-checked numerically.
pub fn thm59_verify(set: &BoxUnion, signs: &[Sign], params: &BoundParams) -> Result<BoundReport> {
    if set.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: set.dim(),
        });
    }
    tensor_verify(1, set, signs, params)
}

/// The construction `F = f^{⊗d}` with product signs on `{0..N}^d`.
pub fn tensor_verify(d: u32, set: &BoxUnion, signs: &[Sign], params: &BoundParams) -> Result<BoundReport> {
    if !(1..=3).contains(&d) {
        return Err(Error::InvalidInput(format!("tensor dimension must be 1, 2 or 3, got {d}")));
    }
    if set.dim() != d as usize {
        return Err(Error::DimensionMismatch {
            expected: d as usize,
            got: set.dim(),
        });
    }
    let c = thm59_construct(set, params.delta, signs, params.gamma0, params.c0)?;
    let flipped = c.flipped().tensor_power(d as usize)?;
    let computed_norm = restricted_l2_quadrature(&flipped, set, params.points)?;
    // ‖f^{⊗d}‖_∞ = ‖f‖_∞^d
    let f_sup_upper = c.f.sup_norm(params.points)?.upper.powi(d as i32);
    let bound = theoretical_bound(d, params.delta, params.c0, params.gamma0);
    let margin = computed_norm - bound;
    let report = BoundReport {
        schema_version: REPORT_SCHEMA_VERSION,
        set: set.clone(),
        dim: d as usize,
        delta: params.delta,
        gamma0: params.gamma0,
        n: c.n,
        c0_used: params.c0,
        computed_norm,
        theoretical_bound: bound,
        margin,
        pass: margin >= MARGIN_TOLERANCE,
        f_sup_upper,
        window: c.window,
    };
    check_finite(&report)?;
    Ok(report)
}

fn check_finite(r: &BoundReport) -> Result<()> {
    let values = [r.computed_norm, r.theoretical_bound, r.margin, r.f_sup_upper, r.window];
    if values.iter().all(|v| v.is_finite()) && r.theoretical_bound > 0.0 {
        Ok(())
    } else {
        Err(Error::Invariant(format!("non-finite or non-positive entry in bound report: {r:?}")))
    }
}

/// Runs the single-variable construction with `δ = 1/3`, `C0 = √2` over a
/// family of sets and compares against the universal constant instead.
pub fn corollary512_sweep(sets: &[BoxUnion], signs: &[Sign], points: usize) -> Result<Vec<BoundReport>> {
    let params = BoundParams {
        points,
        ..BoundParams::default()
    };
    let c = corollary_constant();
    sets.par_iter()
        .map(|set| {
            let mut r = thm59_verify(set, signs, &params)?;
            r.theoretical_bound = c;
            r.margin = r.computed_norm - c;
            r.pass = r.margin >= MARGIN_TOLERANCE;
            Ok(r)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WienerGateRow {
    pub n: u64,
    /// `S_N[f](0)`.
    pub partial_at_zero: f64,
    /// `Σ_{|k|≤N} f̂(k)`.
    pub coefficient_sum: f64,
    pub partial_sup_lower: f64,
    pub partial_sup_upper: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WienerGateReport {
    pub degree: usize,
    pub f_at_zero: f64,
    pub wiener_norm: f64,
    pub f_sup_upper: f64,
    pub rows: Vec<WienerGateRow>,
    pub pass: bool,
}

/// Checks, for a one-dimensional `f` with nonnegative coefficients and every
/// `N ≤ deg f`, that `S_N[f](0)` equals the coefficient sum, that it is
/// bounded by the certified sup norms of `S_N[f]` and `f`, and that
/// `‖f‖_A = f(0)`.
pub fn wiener_gate(f: &TrigPoly, m: usize) -> Result<WienerGateReport> {
    if f.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: f.dim(),
        });
    }
    if let Some((n, c)) = f.iter().find(|(_, c)| c.im != 0.0 || c.re.is_nan() || c.re < 0.0) {
        return Err(Error::InvalidInput(format!(
            "coefficient at {n:?} is {c}, expected a nonnegative real"
        )));
    }
    let f_sup = f.sup_norm(m)?;
    let slack = 1e-9 * f_sup.upper.max(1.0);
    let f_at_zero = f.eval_1d(0.0).re;
    let wiener_norm = f.wiener_norm();
    let rows = (0..=f.degree() as u64)
        .into_par_iter()
        .map(|n| {
            let s = symmetric_partial_sum(f, n)?;
            let partial_at_zero = s.eval_1d(0.0).re;
            let coefficient_sum = f
                .iter()
                .filter(|(k, _)| k.max_abs() <= n)
                .map(|(_, c)| c.re)
                .fold(0.0, |a, b| a + b);
            let cert = s.sup_norm(m)?;
            let ok = partial_at_zero == coefficient_sum
                && partial_at_zero <= cert.upper + slack
                && partial_at_zero <= f_sup.upper + slack
                && cert.lower <= f_sup.upper + slack;
            Ok(WienerGateRow {
                n,
                partial_at_zero,
                coefficient_sum,
                partial_sup_lower: cert.lower,
                partial_sup_upper: cert.upper,
                ok,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let pass = rows.iter().all(|r| r.ok) && wiener_norm == f_at_zero;
    Ok(WienerGateReport {
        degree: f.degree(),
        f_at_zero,
        wiener_norm,
        f_sup_upper: f_sup.upper,
        rows,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flat::rudin_shapiro;
    use crate::summation::fejer;

    fn rs() -> Vec<Sign> {
        rudin_shapiro(12).unwrap()
    }

    #[test]
    fn explicit_constants() {
        assert!((c1_lower_bound(1.0) - 0.307106).abs() < 5e-7);
        assert!((c1_lower_bound(2f64.sqrt()) - 0.217157).abs() < 5e-7);
        assert!((corollary_constant() - 0.0614213).abs() < 1e-6);
        assert!((optimal_delta(10_000_000) - 1.0 / 3.0).abs() < 1e-6);
        // bound at δ = 1/3 agrees with the closed form
        let b = theoretical_bound(1, 1.0 / 3.0, 2f64.sqrt(), 0.0);
        assert!((b - c1_lower_bound(2f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn tensor_constant_two_routes() {
        let c0 = 2f64.sqrt();
        let g = 1e-6;
        let direct = (2.0f64 / 3.0).powi(3) / PI / (c0 * c0) * (1.0 - g);
        assert!((theoretical_bound(2, 1.0 / 3.0, c0, g) - direct).abs() < 1e-12);
        assert!((tensor_constant(2, c0) * (1.0 - g) - direct).abs() < 1e-12);
        for d in 1..=3 {
            let a = theoretical_bound(d, 1.0 / 3.0, c0, 0.0);
            assert!((a - tensor_constant(d, c0)).abs() < 1e-14);
        }
    }

    #[test]
    fn box_union_validation() {
        assert!(BoxUnion::interval(-0.1, 0.1).is_ok());
        assert!(BoxUnion::interval(0.1, -0.1).is_err());
        assert!(BoxUnion::interval(-0.6, 0.1).is_err());
        assert!(BoxUnion::new(vec![]).is_err());
        let overlap = vec![
            AxisBox { lo: vec![-0.1], hi: vec![0.1] },
            AxisBox { lo: vec![0.05], hi: vec![0.2] },
        ];
        assert!(BoxUnion::new(overlap).is_err());
        let touching = vec![
            AxisBox { lo: vec![-0.1], hi: vec![0.1] },
            AxisBox { lo: vec![0.1], hi: vec![0.2] },
        ];
        assert!((BoxUnion::new(touching).unwrap().measure() - 0.3).abs() < 1e-15);
        let mixed = vec![
            AxisBox { lo: vec![-0.1], hi: vec![0.1] },
            AxisBox { lo: vec![0.2, 0.2], hi: vec![0.3, 0.3] },
        ];
        assert!(matches!(BoxUnion::new(mixed), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn box_union_json() {
        let e = BoxUnion::centered_cube(2, 0.05).unwrap();
        let s = serde_json::to_string(&e).unwrap();
        assert_eq!(s, r#"[{"lo":[-0.05,-0.05],"hi":[0.05,0.05]}]"#);
        assert_eq!(serde_json::from_str::<BoxUnion>(&s).unwrap(), e);
        assert!(serde_json::from_str::<BoxUnion>(r#"[{"lo":[0.2],"hi":[0.1]}]"#).is_err());
        assert!(serde_json::from_str::<BoxUnion>(r#"[{"lo":[0.0],"hi":[0.1],"x":1}]"#).is_err());
    }

    #[test]
    fn density_window_examples() {
        let e = BoxUnion::interval(-0.1, 0.1).unwrap();
        assert_eq!(density_window(&e, 0.5).unwrap(), 0.1);
        let two = BoxUnion::new(vec![
            AxisBox { lo: vec![-0.1], hi: vec![0.1] },
            AxisBox { lo: vec![0.3], hi: vec![0.4] },
        ])
        .unwrap();
        assert_eq!(density_window(&two, 0.5).unwrap(), 0.1);
        let sq = BoxUnion::centered_cube(2, 0.1).unwrap();
        assert_eq!(density_window(&sq, 0.5).unwrap(), 0.1);
        // asymmetric box: limited by the nearer face
        let asym = BoxUnion::interval(-0.03, 0.2).unwrap();
        assert_eq!(density_window(&asym, 0.1).unwrap(), 0.03);
        // adjacent boxes extend the window
        let adj = BoxUnion::new(vec![
            AxisBox { lo: vec![-0.02], hi: vec![0.02] },
            AxisBox { lo: vec![0.02], hi: vec![0.1] },
            AxisBox { lo: vec![-0.1], hi: vec![-0.02] },
        ])
        .unwrap();
        assert_eq!(density_window(&adj, 0.1).unwrap(), 0.1);
    }

    #[test]
    fn density_window_rejections() {
        let off = BoxUnion::interval(0.1, 0.2).unwrap();
        assert!(density_window(&off, 0.5).is_err());
        let edge = BoxUnion::interval(0.0, 0.2).unwrap();
        assert!(density_window(&edge, 0.5).is_err());
        let e = BoxUnion::interval(-0.1, 0.1).unwrap();
        assert!(density_window(&e, 0.0).is_err());
        assert!(density_window(&e, 1.0).is_err());
    }

    #[test]
    fn minimal_degree_arithmetic() {
        // 1/(3π·3) ≈ 0.0354 < 0.05 but 1/(3π·2) ≈ 0.0531 is not
        assert_eq!(minimal_degree(1.0 / 3.0, 0.05), 2);
        for (delta, w) in [(0.2, 0.01), (0.5, 0.3), (1.0 / 3.0, 0.001)] {
            let n = minimal_degree(delta, w);
            assert!(delta / (PI * (n + 1) as f64) < w);
            if n > 0 {
                assert!(delta / (PI * n as f64) >= w);
            }
        }
    }

    #[test]
    fn construction_uses_flat_prefix() {
        let e = BoxUnion::interval(-0.05, 0.05).unwrap();
        let c = thm59_construct(&e, 1.0 / 3.0, &rs(), 1e-6, DEFAULT_C0).unwrap();
        assert_eq!(c.n_min, 2);
        assert_eq!(c.n, 3);
        assert!(c.f.sup_norm(8192).unwrap().upper <= 1.0 + 1e-6);
        let target = 1.0 / (DEFAULT_C0 * 2.0);
        let flipped = c.flipped();
        assert_eq!(flipped.len(), 4);
        for (_, v) in flipped.iter() {
            assert!((v.re - target).abs() < 1e-15 && v.im == 0.0);
        }
    }

    #[test]
    fn construction_signs_too_short() {
        let e = BoxUnion::interval(-0.001, 0.001).unwrap();
        let short = rudin_shapiro(3).unwrap();
        assert!(matches!(
            thm59_construct(&e, 1.0 / 3.0, &short, 1e-6, DEFAULT_C0),
            Err(Error::SignsTooShort { required: 107, available: 8 })
        ));
    }

    #[test]
    fn construction_without_flat_prefix() {
        let e = BoxUnion::interval(-0.05, 0.05).unwrap();
        let ones = vec![Sign::Plus; 40];
        assert!(thm59_construct(&e, 1.0 / 3.0, &ones, 1e-6, DEFAULT_C0).is_err());
    }

    #[test]
    fn thm59_reference_case() {
        let e = BoxUnion::interval(-0.05, 0.05).unwrap();
        let r = thm59_verify(&e, &rs(), &BoundParams::default()).unwrap();
        assert!(r.pass && r.margin >= -1e-9);
        assert!((r.theoretical_bound - 0.217157 * (1.0 - 1e-6)).abs() < 5e-7);
        assert!(r.computed_norm >= 0.21);
        assert!(r.f_sup_upper <= 1.0 + 1e-6);
    }

    #[test]
    fn tensor_d1_matches_thm59() {
        let e = BoxUnion::interval(-0.03, 0.04).unwrap();
        let p = BoundParams::default();
        assert_eq!(tensor_verify(1, &e, &rs(), &p).unwrap(), thm59_verify(&e, &rs(), &p).unwrap());
    }

    #[test]
    fn tensor_d2_and_d3() {
        let p = BoundParams::default();
        for d in 2..=3u32 {
            let e = BoxUnion::centered_cube(d as usize, 0.05).unwrap();
            let r = tensor_verify(d, &e, &rs(), &p).unwrap();
            assert!(r.pass, "d = {d}: {r:?}");
            assert!(r.f_sup_upper <= 1.0 + 1e-6);
        }
        let e = BoxUnion::interval(-0.05, 0.05).unwrap();
        assert!(tensor_verify(2, &e, &rs(), &p).is_err());
        assert!(tensor_verify(4, &e, &rs(), &p).is_err());
    }

    #[test]
    fn quadrature_guard() {
        let e = BoxUnion::interval(-0.001, 0.001).unwrap();
        let p = BoundParams {
            points: 256,
            ..BoundParams::default()
        };
        assert!(matches!(
            thm59_verify(&e, &rs(), &p),
            Err(Error::QuadratureTooCoarse { .. })
        ));
    }

    #[test]
    fn quadrature_routes_agree() {
        let e = BoxUnion::new(vec![
            AxisBox { lo: vec![-0.05], hi: vec![0.07] },
            AxisBox { lo: vec![0.2], hi: vec![0.33] },
        ])
        .unwrap();
        let p = sign_polynomial(&rudin_shapiro(5).unwrap());
        let a = restricted_l2_quadrature(&p, &e, 1024).unwrap();
        let b = restricted_l2_exact(&p, &e).unwrap();
        assert!((a - b).abs() <= 1e-8 * b, "{a} vs {b}");
        let sq = BoxUnion::centered_cube(2, 0.1).unwrap();
        let p2 = p.tensor(&sign_polynomial(&rudin_shapiro(3).unwrap()));
        let a = restricted_l2_quadrature(&p2, &sq, 1024).unwrap();
        let b = restricted_l2_exact(&p2, &sq).unwrap();
        assert!((a - b).abs() <= 1e-8 * b, "{a} vs {b}");
    }

    #[test]
    fn whole_torus_recovers_parseval() {
        let e = BoxUnion::interval(-0.5, 0.5).unwrap();
        let p = sign_polynomial(&rudin_shapiro(4).unwrap());
        assert!((restricted_l2_exact(&p, &e).unwrap() - 4.0).abs() < 1e-12);
        assert!((restricted_l2_quadrature(&p, &e, 64).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn pointwise_kernel_bound_in_window() {
        let e = BoxUnion::interval(-0.01, 0.01).unwrap();
        let delta = 1.0 / 3.0;
        let c = thm59_construct(&e, delta, &rs(), 1e-6, DEFAULT_C0).unwrap();
        let t_flip = c.flipped();
        let w = delta / (PI * (c.n + 1) as f64);
        let floor = ((c.n + 1) as f64).sqrt() / DEFAULT_C0 * (1.0 - delta) - 1e-9;
        for i in 0..=200 {
            let t = -w + 2.0 * w * i as f64 / 200.0;
            assert!(t_flip.eval_1d(t).norm() >= floor);
        }
    }

    #[test]
    fn corollary_sweep_passes() {
        let sets = vec![
            BoxUnion::interval(-0.01, 0.01).unwrap(),
            BoxUnion::new(vec![
                AxisBox { lo: vec![-0.002], hi: vec![0.001] },
                AxisBox { lo: vec![0.001], hi: vec![0.004] },
            ])
            .unwrap(),
        ];
        let reports = corollary512_sweep(&sets, &rs(), 4096).unwrap();
        assert_eq!(reports.len(), 2);
        for r in reports {
            assert!(r.pass && r.theoretical_bound == corollary_constant());
        }
    }

    #[test]
    fn wiener_gate_examples() {
        let f = TrigPoly::from_real(&[(-1, 0.5), (0, 1.0), (1, 0.5)]);
        let r = wiener_gate(&f, 64).unwrap();
        assert!(r.pass);
        assert_eq!(r.wiener_norm, 2.0);
        assert_eq!(r.f_at_zero, 2.0);
        let k = fejer(9);
        let r = wiener_gate(&k, 256).unwrap();
        assert!(r.pass);
        for row in &r.rows {
            assert!((row.partial_sup_lower - row.partial_at_zero).abs() < 1e-12);
        }
        assert!(wiener_gate(&TrigPoly::from_real(&[(0, 1.0), (2, -0.1)]), 64).is_err());
        let complex = TrigPoly::from_terms(1, [(1, Complex64::new(1.0, 0.5))]).unwrap();
        assert!(wiener_gate(&complex, 64).is_err());
    }
}
