use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{FftDirection, FftPlanner};

use super::fft::transform_axes;
use super::{root_of_unity, Frequency, TrigPoly};
use crate::error::{Error, Result};

/// Largest number of samples a materialised grid may hold.
pub const MAX_GRID_SAMPLES: usize = 1 << 26;

/// Direct summation is used below this many `support × samples` operations.
const FFT_CROSSOVER: usize = 1 << 16;

/// Largest FFT length used when scanning very fine one-dimensional grids.
const MAX_CHUNK: usize = 1 << 20;

/// Equispaced samples on `{0, 1/M, …, (M-1)/M}^d`, row-major (last axis fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct TorusGrid {
    dim: usize,
    points: usize,
    samples: Vec<Complex64>,
}

fn grid_len(dim: usize, points: usize) -> Result<usize> {
    if dim == 0 {
        return Err(Error::ZeroDimension);
    }
    if points == 0 {
        return Err(Error::InvalidInput("grid needs at least one point per axis".into()));
    }
    let mut len: usize = 1;
    for _ in 0..dim {
        len = len
            .checked_mul(points)
            .filter(|&l| l <= MAX_GRID_SAMPLES)
            .ok_or(Error::GridTooLarge { points, dim })?;
    }
    Ok(len)
}

impl TorusGrid {
    pub fn new(dim: usize, points: usize, samples: Vec<Complex64>) -> Result<Self> {
        let len = grid_len(dim, points)?;
        if samples.len() != len {
            return Err(Error::InvalidInput(format!(
                "expected {len} samples for a {points}^{dim} grid, got {}",
                samples.len()
            )));
        }
        Ok(TorusGrid {
            dim,
            points,
            samples,
        })
    }

    /// Samples `f` at every grid point.
    pub fn from_fn(dim: usize, points: usize, mut f: impl FnMut(&[f64]) -> Complex64) -> Result<Self> {
        let len = grid_len(dim, points)?;
        let mut t = vec![0.0; dim];
        let samples = (0..len)
            .map(|i| {
                Self::fill_point(dim, points, i, &mut t);
                f(&t)
            })
            .collect();
        Ok(TorusGrid {
            dim,
            points,
            samples,
        })
    }

    fn fill_point(dim: usize, points: usize, mut index: usize, t: &mut [f64]) {
        for axis in (0..dim).rev() {
            t[axis] = (index % points) as f64 / points as f64;
            index /= points;
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.points
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    /// Coordinates of the sample at `index`.
    pub fn point(&self, index: usize) -> Vec<f64> {
        let mut t = vec![0.0; self.dim];
        Self::fill_point(self.dim, self.points, index, &mut t);
        t
    }

    fn check_same_shape(&self, other: &TorusGrid) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        if self.points != other.points {
            return Err(Error::InvalidInput(format!(
                "grid resolution mismatch: {} vs {} points per axis",
                self.points, other.points
            )));
        }
        Ok(())
    }

    /// Pointwise product of two grids of the same shape.
    pub fn pointwise_mul(&self, other: &TorusGrid) -> Result<TorusGrid> {
        self.check_same_shape(other)?;
        Ok(TorusGrid {
            dim: self.dim,
            points: self.points,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> TorusGrid {
        TorusGrid {
            dim: self.dim,
            points: self.points,
            samples: self.samples.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Trapezoid-rule value of `(∫|g|^q)^{1/q}` for any `q > 0`.
    pub fn quadrature_norm(&self, q: f64) -> f64 {
        let n = self.samples.len() as f64;
        let s: f64 = self.samples.iter().map(|v| v.norm().powf(q)).sum();
        (s / n).powf(1.0 / q)
    }

    /// Trapezoid-rule value of `(∫|g|^2)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        let n = self.samples.len() as f64;
        (self.samples.iter().map(|v| v.norm_sqr()).sum::<f64>() / n).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Discrete Fourier coefficients for `max_i |n_i| ≤ band`.
    ///
    /// Exact for grids sampled from a polynomial of degree at most `band`.
    pub fn coeffs(&self, band: usize) -> Result<TrigPoly> {
        if self.points < 2 * band + 1 {
            return Err(Error::GridTooSmall {
                points: self.points,
                required: 2 * band + 1,
                reason: "band aliases on this grid",
            });
        }
        let m = self.points;
        let mut buf = self.samples.clone();
        transform_axes(&mut buf, self.dim, m, FftDirection::Forward);
        let norm = 1.0 / self.samples.len() as f64;
        let band = band as i64;
        let width = (2 * band + 1) as usize;
        let total = width.pow(self.dim as u32);
        let mut terms = Vec::with_capacity(total);
        let mut n = vec![0i64; self.dim];
        for idx in 0..total {
            let mut r = idx;
            let mut flat = 0usize;
            for axis in (0..self.dim).rev() {
                n[axis] = (r % width) as i64 - band;
                r /= width;
            }
            for &c in n.iter() {
                flat = flat * m + c.rem_euclid(m as i64) as usize;
            }
            terms.push((Frequency::new(n.iter().copied()), buf[flat] * norm));
        }
        TrigPoly::from_terms(self.dim, terms)
    }
}

impl TrigPoly {
    /// Samples on the `M^d` grid. Rejects grids that would alias the spectrum.
    pub fn to_grid(&self, m: usize) -> Result<TorusGrid> {
        let required = 2 * self.degree() + 1;
        if m < required {
            return Err(Error::GridTooSmall {
                points: m,
                required,
                reason: "grid aliases the spectrum",
            });
        }
        self.sample_grid(m)
    }

    /// Samples on the `M^d` grid without an aliasing check.
    ///
    /// Point values are exact whatever `M` is; only the inverse map back to
    /// coefficients needs `M ≥ 2·degree + 1`.
    pub(crate) fn sample_grid(&self, m: usize) -> Result<TorusGrid> {
        let len = grid_len(self.dim, m)?;
        if self.len().saturating_mul(len) < FFT_CROSSOVER {
            // phase of e_n at grid index i is (Σ n_a i_a) mod M, looked up exactly
            let roots: Vec<Complex64> = (0..m).map(|j| root_of_unity(j as i128, m)).collect();
            let terms: Vec<(Vec<usize>, Complex64)> = self
                .iter()
                .map(|(n, c)| (n.components().iter().map(|k| k.rem_euclid(m as i64) as usize).collect(), *c))
                .collect();
            let mut index = vec![0usize; self.dim];
            let mut samples = Vec::with_capacity(len);
            for _ in 0..len {
                let mut v = Complex64::default();
                for (n, c) in &terms {
                    let phase = n.iter().zip(&index).fold(0usize, |acc, (k, i)| (acc + k * i) % m);
                    v += c * roots[phase];
                }
                samples.push(v);
                for a in (0..self.dim).rev() {
                    index[a] += 1;
                    if index[a] < m {
                        break;
                    }
                    index[a] = 0;
                }
            }
            return TorusGrid::new(self.dim, m, samples);
        }
        let mut buf = vec![Complex64::default(); len];
        for (n, c) in self.iter() {
            let mut flat = 0usize;
            for &k in n.components() {
                flat = flat * m + k.rem_euclid(m as i64) as usize;
            }
            buf[flat] += c;
        }
        transform_axes(&mut buf, self.dim, m, FftDirection::Inverse);
        TorusGrid::new(self.dim, m, buf)
    }

    /// Largest `|p|` over the `M^d` grid.
    ///
    /// One-dimensional grids too large to materialise are scanned as `R`
    /// interleaved subgrids of length `L = M/R`, each one FFT of the
    /// modulated, folded coefficient sequence.
    pub(crate) fn grid_abs_max(&self, m: usize) -> Result<f64> {
        if self.is_zero() {
            return Ok(0.0);
        }
        if self.dim > 1 || m <= MAX_CHUNK {
            return Ok(self.sample_grid(m)?.max_abs());
        }
        let r = (m.div_ceil(MAX_CHUNK)..=m)
            .find(|r| m.is_multiple_of(*r))
            .expect("m divides itself");
        let l = m / r;
        let terms: Vec<(i64, Complex64)> = self
            .iter()
            .map(|(n, c)| (n.components()[0], *c))
            .collect();
        let fft = FftPlanner::<f64>::new().plan_fft(l, FftDirection::Inverse);
        let max = (0..r)
            .into_par_iter()
            .map_init(
                || {
                    (
                        vec![Complex64::default(); l],
                        vec![Complex64::default(); fft.get_inplace_scratch_len()],
                    )
                },
                |(buf, scratch), offset| {
                    buf.iter_mut().for_each(|v| *v = Complex64::default());
                    for &(n, c) in &terms {
                        let tw = root_of_unity(n as i128 * offset as i128, m);
                        buf[n.rem_euclid(l as i64) as usize] += c * tw;
                    }
                    fft.process_with_scratch(buf, scratch);
                    buf.iter().map(|v| v.norm()).fold(0.0, f64::max)
                },
            )
            .reduce(|| 0.0, f64::max);
        Ok(max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_poly(rng: &mut ChaCha8Rng, degree: i64) -> TrigPoly {
        TrigPoly::from_terms(
            1,
            (-degree..=degree).map(|n| (n, c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))),
        )
        .unwrap()
    }

    #[test]
    fn constant_on_four_points() {
        let g = TrigPoly::from_real(&[(0, 1.0)]).to_grid(4).unwrap();
        assert_eq!(g.samples(), &[c(1.0, 0.0); 4]);
    }

    #[test]
    fn character_gives_roots_of_unity() {
        let g = TrigPoly::from_real(&[(1, 1.0)]).to_grid(4).unwrap();
        let want = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
        for (a, b) in g.samples().iter().zip(want) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn to_grid_rejects_aliasing() {
        let p = TrigPoly::from_real(&[(3, 1.0)]);
        assert!(matches!(p.to_grid(6), Err(Error::GridTooSmall { required: 7, .. })));
        assert!(p.to_grid(7).is_ok());
    }

    #[test]
    fn fft_path_matches_pointwise_eval() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = random_poly(&mut rng, 64);
        let g = p.to_grid(256).unwrap();
        for (j, v) in g.samples().iter().enumerate() {
            let direct = p.eval_1d(j as f64 / 256.0);
            assert!((v - direct).norm() <= 1e-10, "point {j}");
        }
    }

    #[test]
    fn two_dimensional_fft_path_matches_eval() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let p = TrigPoly::from_terms(
            2,
            (0..40).map(|_| {
                (
                    [rng.random_range(-6..=6i64), rng.random_range(-6..=6i64)],
                    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                )
            }),
        )
        .unwrap();
        let g = p.to_grid(40).unwrap();
        for idx in [0usize, 17, 399, 1234, 1599] {
            let t = g.point(idx);
            assert!((g.samples()[idx] - p.eval(&t).unwrap()).norm() < 1e-11);
        }
    }

    #[test]
    fn coeffs_of_constant_grid() {
        let g = TorusGrid::new(1, 5, vec![c(1.0, 0.0); 5]).unwrap();
        let p = g.coeffs(2).unwrap();
        assert!(p.max_coeff_diff(&TrigPoly::from_real(&[(0, 1.0)])) < 1e-15);
    }

    #[test]
    fn coeffs_of_sampled_character() {
        let g = TorusGrid::from_fn(1, 8, |t| crate::trig::unit(t[0])).unwrap();
        let p = g.coeffs(3).unwrap();
        assert!(p.max_coeff_diff(&TrigPoly::from_real(&[(1, 1.0)])) < 1e-15);
    }

    #[test]
    fn coeffs_rejects_band_too_large() {
        let g = TorusGrid::new(1, 8, vec![c(1.0, 0.0); 8]).unwrap();
        assert!(matches!(g.coeffs(4), Err(Error::GridTooSmall { .. })));
    }

    #[test]
    fn round_trip_degree_ten() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = random_poly(&mut rng, 10);
        let back = p.to_grid(64).unwrap().coeffs(10).unwrap();
        assert!(back.max_coeff_diff(&p) <= 1e-12);
    }

    #[test]
    fn chunked_scan_matches_full_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = random_poly(&mut rng, 300);
        let m = 3 * (1 << 20) / 2; // not a power of two, forces R = 2
        let chunked = p.grid_abs_max(m).unwrap();
        let full = p.sample_grid(m).unwrap().max_abs();
        assert!((chunked - full).abs() < 1e-10 * full);
    }

    #[test]
    fn shape_checks() {
        assert!(TorusGrid::new(1, 4, vec![c(0.0, 0.0); 3]).is_err());
        assert!(TorusGrid::new(0, 4, vec![]).is_err());
        assert!(matches!(
            TrigPoly::from_real(&[(0, 1.0)]).sample_grid(usize::MAX),
            Err(Error::GridTooLarge { .. })
        ));
        let a = TorusGrid::new(1, 4, vec![c(1.0, 0.0); 4]).unwrap();
        let b = TorusGrid::new(1, 5, vec![c(1.0, 0.0); 5]).unwrap();
        assert!(a.pointwise_mul(&b).is_err());
    }
}
