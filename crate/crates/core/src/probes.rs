//! Finite diagnostics for operator-topology statements: strong-operator
//! error trajectories, sup norms of rearranged partial sums, bounded
//! rearrangement ratios, and weak-operator summability with `L_4` witnesses.
//!
//! Everything here is a finite-sample diagnostic. Verdicts summarise a
//! trajectory; the raw values are always part of the report.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bound::BoxUnion;
use crate::error::{Error, Result};
use crate::rearrange::Permutation;
use crate::summation::rearranged_partial_sum;
use crate::trig::{TorusGrid, TrigPoly};

/// Relative last-decade change below which a trajectory is a plateau.
pub const PLATEAU_TOLERANCE: f64 = 1e-3;

/// Log-log slope above which a trajectory is growing.
pub const GROWTH_EXPONENT: f64 = 0.05;

/// A function on `𝕋`, realised on equispaced grids on demand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WitnessFunction {
    TrigPoly { poly: TrigPoly },
    /// `dist(t, 0)^{-α}`.
    PowerSingularity { alpha: f64 },
    /// `Σ_k k·1_{E_k}` over the listed sets, `k` starting at 1.
    StepSum { levels: Vec<BoxUnion> },
    /// `t ↦ g((t + j)/k)` for `t ∈ [0, 1)`.
    Dilated { base: Box<WitnessFunction>, k: u32, j: u32 },
}

impl WitnessFunction {
    pub fn power_singularity(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 0.5) {
            return Err(Error::InvalidInput(format!("α must lie in (0, 1/2), got {alpha}")));
        }
        Ok(WitnessFunction::PowerSingularity { alpha })
    }

    pub fn dilated(base: WitnessFunction, k: u32, j: u32) -> Result<Self> {
        if k == 0 || j >= k {
            return Err(Error::InvalidInput(format!("dilation needs k >= 1 and 0 <= j < k, got k = {k}, j = {j}")));
        }
        Ok(WitnessFunction::Dilated {
            base: Box::new(base),
            k,
            j,
        })
    }

    fn validate(&self) -> Result<()> {
        match self {
            WitnessFunction::TrigPoly { poly } if poly.dim() != 1 => Err(Error::DimensionMismatch {
                expected: 1,
                got: poly.dim(),
            }),
            WitnessFunction::PowerSingularity { alpha } => Self::power_singularity(*alpha).map(|_| ()),
            WitnessFunction::StepSum { levels } => {
                for (i, e) in levels.iter().enumerate() {
                    if e.dim() != 1 {
                        return Err(Error::DimensionMismatch { expected: 1, got: e.dim() });
                    }
                    for (j, other) in levels[..i].iter().enumerate() {
                        let meet = e.boxes().iter().any(|a| {
                            other
                                .boxes()
                                .iter()
                                .any(|b| a.lo[0].max(b.lo[0]) < a.hi[0].min(b.hi[0]))
                        });
                        if meet {
                            return Err(Error::InvalidInput(format!("levels {j} and {i} overlap")));
                        }
                    }
                }
                Ok(())
            }
            WitnessFunction::Dilated { base, k, j } => {
                if *k == 0 || j >= k {
                    return Err(Error::InvalidInput("dilation needs k >= 1 and 0 <= j < k".into()));
                }
                base.validate()
            }
            _ => Ok(()),
        }
    }

    /// Value at `t`, or `None` at a singular point.
    pub fn value_at(&self, t: f64) -> Option<Complex64> {
        let t = t.rem_euclid(1.0);
        match self {
            WitnessFunction::TrigPoly { poly } => Some(poly.eval_1d(t)),
            WitnessFunction::PowerSingularity { alpha } => {
                let d = t.min(1.0 - t);
                (d > 0.0).then(|| Complex64::new(d.powf(-alpha), 0.0))
            }
            WitnessFunction::StepSum { levels } => {
                let centred = if t >= 0.5 { t - 1.0 } else { t };
                let level = levels
                    .iter()
                    .position(|e| e.contains(&[centred]))
                    .map_or(0, |k| k + 1);
                Some(Complex64::new(level as f64, 0.0))
            }
            WitnessFunction::Dilated { base, k, j } => base.value_at((t + *j as f64) / *k as f64),
        }
    }

    /// Samples on `{0, 1/M, …, (M-1)/M}`. A singular node takes the value of
    /// the next node.
    pub fn realize(&self, m: usize) -> Result<TorusGrid> {
        self.validate()?;
        if m < 2 {
            return Err(Error::InvalidInput("a witness grid needs at least two points".into()));
        }
        if let WitnessFunction::TrigPoly { poly } = self {
            return poly.sample_grid(m);
        }
        let raw: Vec<Option<Complex64>> = (0..m)
            .into_par_iter()
            .map(|i| self.value_at(i as f64 / m as f64))
            .collect();
        let mut samples = vec![Complex64::default(); m];
        for i in 0..m {
            samples[i] = match raw[i] {
                Some(v) => v,
                None => raw[(i + 1) % m].ok_or_else(|| {
                    Error::InvalidInput("witness is singular at two adjacent grid nodes".into())
                })?,
            };
        }
        TorusGrid::new(1, m, samples)
    }

    /// Degree when the witness is a polynomial.
    fn degree(&self) -> Option<usize> {
        match self {
            WitnessFunction::TrigPoly { poly } => Some(poly.degree()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Plateau,
    Growing,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryReport {
    pub abscissa: Vec<u64>,
    pub values: Vec<f64>,
    pub verdict: Verdict,
    /// Least-squares slope of `ln V` against `ln N` over the last decade.
    pub slope: f64,
}

impl TrajectoryReport {
    pub fn new(abscissa: Vec<u64>, values: Vec<f64>) -> Result<Self> {
        if abscissa.len() != values.len() {
            return Err(Error::Invariant(format!(
                "trajectory has {} abscissae and {} values",
                abscissa.len(),
                values.len()
            )));
        }
        let (verdict, slope) = classify(&abscissa, &values);
        Ok(TrajectoryReport {
            abscissa,
            values,
            verdict,
            slope,
        })
    }

    pub fn last(&self) -> Option<f64> {
        self.values.last().copied()
    }
}

/// Plateau if the change over the last decade `[N_max/10, N_max]` is below
/// `1e-3·max|V|`; growing if the log-log slope there exceeds `0.05`.
pub fn classify(abscissa: &[u64], values: &[f64]) -> (Verdict, f64) {
    let Some(&n_max) = abscissa.last() else {
        return (Verdict::Inconclusive, 0.0);
    };
    let start = n_max / 10;
    let tail: Vec<(f64, f64)> = abscissa
        .iter()
        .zip(values)
        .filter(|(&n, _)| n >= start)
        .map(|(&n, &v)| (n as f64, v))
        .collect();
    let logs: Vec<(f64, f64)> = tail
        .iter()
        .filter(|(n, v)| *n > 0.0 && *v > 0.0)
        .map(|(n, v)| (n.ln(), v.ln()))
        .collect();
    let slope = if logs.len() >= 2 {
        let k = logs.len() as f64;
        let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
        let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
        let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        if sxx > 0.0 { sxy / sxx } else { 0.0 }
    } else {
        0.0
    };
    let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let first = tail.first().map_or(0.0, |p| p.1);
    let last = tail.last().map_or(0.0, |p| p.1);
    let verdict = if (last - first).abs() <= PLATEAU_TOLERANCE * scale {
        Verdict::Plateau
    } else if slope > GROWTH_EXPONENT {
        Verdict::Growing
    } else {
        Verdict::Inconclusive
    };
    (verdict, slope)
}

fn require_1d(f: &TrigPoly) -> Result<()> {
    if f.dim() == 1 {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: 1,
            got: f.dim(),
        })
    }
}

/// Smallest grid on which products of `f`-tails with the witness are
/// integrated exactly (for polynomial witnesses) or at least unaliased.
fn required_points(f_degree: usize, g: &WitnessFunction) -> usize {
    2 * (f_degree + g.degree().unwrap_or(0)) + 1
}

fn check_points(m: usize, required: usize) -> Result<()> {
    if m < required {
        Err(Error::GridTooSmall {
            points: m,
            required,
            reason: "probe grid does not resolve the product",
        })
    } else {
        Ok(())
    }
}

/// Mean of `|p·g|^2` on the grid, square-rooted.
fn weighted_l2(p: &TrigPoly, g: &TorusGrid) -> Result<f64> {
    if p.is_zero() {
        return Ok(0.0);
    }
    let grid = p.sample_grid(g.points_per_axis())?;
    let s: f64 = grid
        .samples()
        .iter()
        .zip(g.samples())
        .map(|(a, b)| (a * b).norm_sqr())
        .sum();
    Ok((s / g.samples().len() as f64).sqrt())
}

/// `‖S_{σ,N}[f]·g − f·g‖_2` for `N = 0..=N_max`, by quadrature on `M` points.
///
/// Once `σ({-N..N})` covers the support of `f` the value is exactly zero.
pub fn sot_trajectory(
    f: &TrigPoly,
    g: &WitnessFunction,
    sigma: &Permutation,
    n_max: u64,
    m: usize,
) -> Result<TrajectoryReport> {
    require_1d(f)?;
    check_points(m, required_points(f.degree(), g))?;
    let g_grid = g.realize(m)?;
    let values = (0..=n_max)
        .into_par_iter()
        .map(|n| {
            let tail = f.sub(&rearranged_partial_sum(f, sigma, n)?)?;
            weighted_l2(&tail, &g_grid)
        })
        .collect::<Result<Vec<_>>>()?;
    TrajectoryReport::new((0..=n_max).collect(), values)
}

/// `max_{N ≤ N_max} upper(‖S_{σ,N}[f]‖_∞)`.
pub fn condition_iv_probe(f: &TrigPoly, sigma: &Permutation, n_max: u64, m: usize) -> Result<f64> {
    Ok(condition_iv_trajectory(f, sigma, n_max, m)?
        .into_iter()
        .fold(0.0, f64::max))
}

/// `upper(‖S_{σ,N}[f]‖_∞)` for each `N = 0..=N_max`.
pub fn condition_iv_trajectory(f: &TrigPoly, sigma: &Permutation, n_max: u64, m: usize) -> Result<Vec<f64>> {
    require_1d(f)?;
    check_points(m, 2 * f.degree() + 1)?;
    (0..=n_max)
        .into_par_iter()
        .map(|n| {
            let s = rearranged_partial_sum(f, sigma, n)?;
            if s.is_zero() {
                Ok(0.0)
            } else {
                Ok(s.sup_norm(m)?.upper)
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrpEstimate {
    /// `sup_N ‖S_{σ,N}[T]·g‖_2 / upper(‖T‖_∞)`.
    pub ratio: f64,
    /// Per-`N` numerators for `N = 0..=exhaustion index`.
    pub numerators: Vec<f64>,
    pub t_sup_upper: f64,
}

/// Empirical bounded-rearrangement ratio of `g` for the polynomial `T`
/// summed in the order `σ`, over `N` up to the exhaustion index of `T`.
pub fn brp_estimate(g: &WitnessFunction, t: &TrigPoly, sigma: &Permutation, m: usize) -> Result<BrpEstimate> {
    require_1d(t)?;
    if t.is_zero() {
        return Err(Error::InvalidInput("the polynomial T must be nonzero".into()));
    }
    check_points(m, required_points(t.degree(), g))?;
    let g_grid = g.realize(m)?;
    let n_end = sigma.exhaustion_index_of(t);
    let numerators = (0..=n_end)
        .into_par_iter()
        .map(|n| weighted_l2(&rearranged_partial_sum(t, sigma, n)?, &g_grid))
        .collect::<Result<Vec<_>>>()?;
    let t_sup_upper = t.sup_norm(m)?.upper;
    let ratio = numerators.iter().copied().fold(0.0, f64::max) / t_sup_upper;
    Ok(BrpEstimate {
        ratio,
        numerators,
        t_sup_upper,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WotReport {
    /// `A_N = Σ_{|n|≤N} |f̂(n)|·|ψ̂(n)|` with `ψ = conj(g)·h`.
    pub trajectory: TrajectoryReport,
    pub g_l4: f64,
    pub h_l4: f64,
    /// `‖f‖_A · ‖g‖_4 · ‖h‖_4`, an upper bound for every `A_N`.
    pub bound: f64,
    pub bound_ok: bool,
}

/// Absolute-summability diagnostic for `Σ f̂(n)⟨e_n g, h⟩`.
pub fn wot_summability(
    f: &TrigPoly,
    g: &WitnessFunction,
    h: &WitnessFunction,
    n_max: u64,
    m: usize,
) -> Result<WotReport> {
    require_1d(f)?;
    check_points(m, 2 * n_max as usize + 1)?;
    let gg = g.realize(m)?;
    let hh = h.realize(m)?;
    let psi = TorusGrid::new(
        1,
        m,
        gg.samples().iter().zip(hh.samples()).map(|(a, b)| a.conj() * b).collect(),
    )?;
    let psi_hat = psi.coeffs(n_max as usize)?;
    // ⟨e_n g, h⟩ = conj(ψ̂(n))
    let weight = |n: i64| f.coeff_1d(n).norm() * psi_hat.coeff_1d(n).norm();
    let mut acc = weight(0);
    let mut values = Vec::with_capacity(n_max as usize + 1);
    values.push(acc);
    for n in 1..=n_max as i64 {
        acc += weight(n) + weight(-n);
        values.push(acc);
    }
    let g_l4 = gg.quadrature_norm(4.0);
    let h_l4 = hh.quadrature_norm(4.0);
    let bound = f.wiener_norm() * g_l4 * h_l4;
    let bound_ok = values.iter().all(|&v| v <= bound * (1.0 + 1e-12));
    Ok(WotReport {
        trajectory: TrajectoryReport::new((0..=n_max).collect(), values)?,
        g_l4,
        h_l4,
        bound,
        bound_ok,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct L4Witness {
    pub witness: WitnessFunction,
    pub points: usize,
    pub l2: f64,
    pub l4: f64,
    /// `α ≥ 1/4`: the `L_4` quadrature diverges as `M` grows.
    pub l4_divergent: bool,
}

/// `dist(t, 0)^{-α}` realised on `M` points, with its quadrature norms.
pub fn l4_witness(alpha: f64, m: usize) -> Result<L4Witness> {
    let witness = WitnessFunction::power_singularity(alpha)?;
    let grid = witness.realize(m)?;
    Ok(L4Witness {
        points: m,
        l2: grid.l2_norm(),
        l4: grid.quadrature_norm(4.0),
        l4_divergent: alpha >= 0.25,
        witness,
    })
}

/// `l4_witness` along the ladder `M = 2^lo, …, 2^hi`.
pub fn quadrature_ladder(alpha: f64, lo: u32, hi: u32) -> Result<Vec<L4Witness>> {
    (lo..=hi).map(|e| l4_witness(alpha, 1usize << e)).collect()
}
