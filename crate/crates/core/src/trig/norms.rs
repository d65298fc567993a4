use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::TrigPoly;
use crate::error::{Error, Result};

/// Two-sided enclosure of `‖p‖_∞`.
///
/// `lower` is the largest sampled modulus; `upper` inflates it by the
/// equispaced-grid factor `1/cos(π·B/M)`, where `B` is the sum over axes of
/// the half spectral widths. The true sup norm lies in `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormCertificate {
    pub lower: f64,
    pub upper: f64,
    /// `M / degree` (or `M` for constants).
    pub oversampling: f64,
    pub points: usize,
}

impl NormCertificate {
    pub fn contains(&self, value: f64, slack: f64) -> bool {
        value >= self.lower - slack && value <= self.upper + slack
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    /// Both bounds multiplied by a nonnegative scalar.
    pub fn scaled(&self, s: f64) -> NormCertificate {
        NormCertificate {
            lower: self.lower * s,
            upper: self.upper * s,
            ..*self
        }
    }
}

/// Oversampling floor used by the `L_1`/`L_4` quadratures.
pub fn lp_grid_floor(degree: usize) -> usize {
    8 * degree + 8
}

impl TrigPoly {
    /// Exact `L_2` norm by Parseval.
    pub fn norm_l2(&self) -> f64 {
        self.iter().map(|(_, c)| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Wiener-algebra norm `Σ |c_n|`.
    pub fn wiener_norm(&self) -> f64 {
        self.iter().map(|(_, c)| c.norm()).sum()
    }

    /// Quadrature value of `‖p‖_q` for `q ∈ {1, 2, 4}` on the `M^d` grid.
    pub fn norm_lp(&self, q: u32, m: usize) -> Result<f64> {
        if !matches!(q, 1 | 2 | 4) {
            return Err(Error::UnsupportedExponent(q));
        }
        let required = lp_grid_floor(self.degree());
        if m < required {
            return Err(Error::GridTooSmall {
                points: m,
                required,
                reason: "L_p quadrature below the oversampling floor",
            });
        }
        Ok(self.sample_grid(m)?.quadrature_norm(q as f64))
    }

    /// Certified enclosure of `‖p‖_∞` from the `M^d` grid.
    pub fn sup_norm(&self, m: usize) -> Result<NormCertificate> {
        let degree = self.degree();
        if m <= 2 * degree {
            return Err(Error::GridTooSmall {
                points: m,
                required: 2 * degree + 1,
                reason: "sup-norm certification needs M > 2·degree",
            });
        }
        let lower = self.grid_abs_max(m)?;
        let bandwidth: f64 = (0..self.dim()).map(|a| self.half_bandwidth(a)).sum();
        let angle = PI * bandwidth / m as f64;
        if angle >= PI / 2.0 {
            return Err(Error::GridTooSmall {
                points: m,
                required: (2.0 * bandwidth).floor() as usize + 1,
                reason: "sup-norm certification needs M > 2·(sum of half bandwidths)",
            });
        }
        Ok(NormCertificate {
            lower,
            upper: lower / angle.cos(),
            oversampling: m as f64 / degree.max(1) as f64,
            points: m,
        })
    }
}
