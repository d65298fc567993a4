//! Flat ±1 polynomials: Rudin–Shapiro sequences, certified flatness ratios,
//! and exhaustive or annealed searches for the smallest ratio at fixed `N`.
//!
//! The flatness ratio of signs `ε_0, …, ε_N` is `‖Σ ε_n e_n‖_∞ / √(N+1)`,
//! reported as a certified interval. Parseval makes `1` a hard floor.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::summation::{signs_to_string, Sign, SignSequence};
use crate::trig::TrigPoly;

/// Version tag written into serialised reports.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Largest `N` accepted by [`c0_exhaustive`].
pub const EXHAUSTIVE_LIMIT: usize = 24;

/// Relative temperature below which a stuck restart is reheated.
const REHEAT_BELOW: f64 = 1e-2;

/// Default oversampling `M = 32·(N+1)`.
pub const DEFAULT_OVERSAMPLING: usize = 32;

/// Certified enclosure `[lower, upper]` of a real quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMethod {
    Exhaustive,
    Anneal,
    RudinShapiro,
}

impl SearchMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SearchMethod::Exhaustive => "exhaustive",
            SearchMethod::Anneal => "anneal",
            SearchMethod::RudinShapiro => "rudin_shapiro",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatnessReport {
    pub schema_version: u32,
    pub n: usize,
    pub signs: Vec<Sign>,
    pub ratio: Interval,
    pub method: SearchMethod,
    pub seed: Option<u64>,
    /// Grid size used for the certificate.
    pub points: usize,
}

impl FlatnessReport {
    pub fn sign_sequence(&self) -> SignSequence {
        SignSequence::from_slice(&self.signs)
    }

    pub fn signs_string(&self) -> String {
        signs_to_string(&self.signs)
    }
}

/// Rudin–Shapiro signs `P_k` of length `2^k`.
///
/// `P_0 = Q_0 = [1]`, `P_{j+1} = P_j ∥ Q_j`, `Q_{j+1} = P_j ∥ (−Q_j)`.
pub fn rudin_shapiro(k: u32) -> Result<Vec<Sign>> {
    if k > 20 {
        return Err(Error::InvalidInput(format!("Rudin–Shapiro order {k} exceeds 20")));
    }
    let mut p = vec![Sign::Plus];
    let mut q = vec![Sign::Plus];
    for _ in 0..k {
        let next_p: Vec<Sign> = p.iter().chain(q.iter()).copied().collect();
        let next_q: Vec<Sign> = p.iter().copied().chain(q.iter().map(|s| s.flip())).collect();
        p = next_p;
        q = next_q;
    }
    Ok(p)
}

/// `Σ_{n=0}^{N} ε_n e_n`.
pub fn sign_polynomial(signs: &[Sign]) -> TrigPoly {
    TrigPoly::from_terms(
        1,
        signs
            .iter()
            .enumerate()
            .map(|(n, s)| (n as i64, Complex64::new(s.value(), 0.0))),
    )
    .expect("dimension 1")
}

/// Default certification grid `M = 32·(N+1)`.
pub fn default_points(n: usize) -> usize {
    DEFAULT_OVERSAMPLING * (n + 1)
}

/// Certified sup norm of `Σ ε_n e_n` divided by `√(N+1)`.
pub fn flatness_ratio(signs: &[Sign], m: usize) -> Result<Interval> {
    if signs.is_empty() {
        return Err(Error::InvalidInput("empty sign sequence".into()));
    }
    let n = signs.len() - 1;
    if m <= 2 * n {
        return Err(Error::GridTooSmall {
            points: m,
            required: 2 * n + 1,
            reason: "flatness certification needs M > 2N",
        });
    }
    let cert = sign_polynomial(signs).sup_norm(m)?;
    let s = ((n + 1) as f64).sqrt();
    Ok(Interval {
        lower: cert.lower / s,
        upper: cert.upper / s,
    })
}

/// Certification factor `1/cos(π·(N/2)/M)` shared by every sign pattern of
/// length `N+1` (all of them span frequencies `0..=N`).
fn certification_factor(n: usize, m: usize) -> f64 {
    1.0 / (PI * (n as f64 / 2.0) / m as f64).cos()
}

/// Reusable FFT evaluator for `max_j |Σ ε_n ω^{nj}|` on a fixed grid.
struct GridMax {
    fft: Arc<dyn Fft<f64>>,
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl GridMax {
    fn new(m: usize) -> Self {
        let fft = FftPlanner::<f64>::new().plan_fft_inverse(m);
        let scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        GridMax {
            fft,
            buf: vec![Complex64::default(); m],
            scratch,
        }
    }

    fn eval(&mut self, signs: impl Iterator<Item = f64>) -> f64 {
        self.buf.iter_mut().for_each(|v| *v = Complex64::default());
        for (slot, s) in self.buf.iter_mut().zip(signs) {
            *slot = Complex64::new(s, 0.0);
        }
        self.fft.process_with_scratch(&mut self.buf, &mut self.scratch);
        self.buf.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max).sqrt()
    }
}

fn bits_to_signs(bits: u32, n: usize) -> Vec<Sign> {
    (0..=n)
        .map(|i| if bits >> i & 1 == 1 { Sign::Minus } else { Sign::Plus })
        .collect()
}

/// Canonical representative under `ε → −ε` and `ε_n → ε_{N−n}`: the pattern
/// with `ε_0 = +1` whose bit string is not larger than its normalised reverse.
fn is_canonical(bits: u32, n: usize) -> bool {
    if bits & 1 == 1 {
        return false;
    }
    let mut rev = 0u32;
    for i in 0..=n {
        rev |= (bits >> i & 1) << (n - i);
    }
    if rev & 1 == 1 {
        rev ^= (1u32 << (n + 1)) - 1;
    }
    bits <= rev
}

/// Orders candidates by ratio, then lexicographically by signs.
fn better(a: &(f64, Vec<Sign>), b: &(f64, Vec<Sign>)) -> bool {
    a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)).is_lt()
}

/// Minimal certified flatness ratio over all `2^{N+1}` sign patterns.
///
/// Only canonical representatives of the symmetry classes generated by a
/// global sign flip and index reversal are evaluated; both maps preserve the
/// set of grid moduli.
pub fn c0_exhaustive(n: usize, m: usize) -> Result<FlatnessReport> {
    if n > EXHAUSTIVE_LIMIT {
        return Err(Error::SearchTooLarge {
            n,
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    if m <= 2 * n {
        return Err(Error::GridTooSmall {
            points: m,
            required: 2 * n + 1,
            reason: "flatness certification needs M > 2N",
        });
    }
    let total: u32 = 1 << (n + 1);
    let chunk = 1u32 << 10.min(n + 1);
    let best = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut eval = GridMax::new(m);
            let mut best: Option<(f64, u32)> = None;
            for bits in c * chunk..((c + 1) * chunk).min(total) {
                if !is_canonical(bits, n) {
                    continue;
                }
                let v = eval.eval((0..=n).map(|i| if bits >> i & 1 == 1 { -1.0 } else { 1.0 }));
                let wins = match best {
                    None => true,
                    Some((b, bb)) => v < b || (v == b && bits_to_signs(bits, n) < bits_to_signs(bb, n)),
                };
                if wins {
                    best = Some((v, bits));
                }
            }
            best
        })
        .flatten()
        .map(|(_, bits)| {
            let signs = bits_to_signs(bits, n);
            let r = flatness_ratio(&signs, m).expect("grid validated above");
            (r.upper, signs)
        })
        .reduce_with(|a, b| if better(&b, &a) { b } else { a })
        .expect("at least one canonical pattern");
    let ratio = flatness_ratio(&best.1, m)?;
    Ok(FlatnessReport {
        schema_version: REPORT_SCHEMA_VERSION,
        n,
        signs: best.1,
        ratio,
        method: SearchMethod::Exhaustive,
        seed: None,
        points: m,
    })
}

/// Starting point for each annealing restart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WarmStart {
    Random,
    RudinShapiro,
    Given(Vec<Sign>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnnealConfig {
    pub steps: usize,
    pub initial_temperature: f64,
    /// Geometric cooling factor applied after every step.
    pub cooling: f64,
    pub restarts: usize,
    /// Grid size is `oversampling·(N+1)`.
    pub oversampling: usize,
    pub warm_start: WarmStart,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        AnnealConfig {
            steps: 200_000,
            initial_temperature: 0.1,
            cooling: 0.9995,
            restarts: 4,
            oversampling: DEFAULT_OVERSAMPLING,
            warm_start: WarmStart::Random,
        }
    }
}

/// Grid values of a sign polynomial, updated in `O(M)` per flip.
struct Landscape {
    m: usize,
    twiddle: Vec<Complex64>,
    values: Vec<Complex64>,
    trial: Vec<Complex64>,
}

impl Landscape {
    fn new(m: usize) -> Self {
        Landscape {
            m,
            twiddle: (0..m).map(|j| crate::trig::root_of_unity(j as i128, m)).collect(),
            values: vec![Complex64::default(); m],
            trial: vec![Complex64::default(); m],
        }
    }

    fn reset(&mut self, eval: &mut GridMax, signs: &[Sign]) -> f64 {
        eval.eval(signs.iter().map(|s| s.value()));
        self.values.copy_from_slice(&eval.buf);
        self.max_abs(false)
    }

    fn max_abs(&self, trial: bool) -> f64 {
        let v = if trial { &self.trial } else { &self.values };
        v.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max).sqrt()
    }

    /// Grid maximum after flipping `ε_k` (currently `s`), staged in `trial`.
    fn propose(&mut self, k: usize, s: Sign) -> f64 {
        let delta = -2.0 * s.value();
        let mut idx = 0usize;
        let mut best = 0.0f64;
        for (t, v) in self.trial.iter_mut().zip(&self.values) {
            *t = v + self.twiddle[idx] * delta;
            best = best.max(t.norm_sqr());
            idx += k;
            if idx >= self.m {
                idx -= self.m;
            }
        }
        best.sqrt()
    }

    fn accept(&mut self) {
        std::mem::swap(&mut self.values, &mut self.trial);
    }
}

fn anneal_restart(n: usize, m: usize, cfg: &AnnealConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Sign>> {
    let mut signs: Vec<Sign> = match &cfg.warm_start {
        WarmStart::Random => (0..=n)
            .map(|_| if rng.random_bool(0.5) { Sign::Plus } else { Sign::Minus })
            .collect(),
        WarmStart::RudinShapiro => {
            let k = usize::BITS - n.leading_zeros();
            rudin_shapiro(k)?[..=n].to_vec()
        }
        WarmStart::Given(s) => {
            if s.len() != n + 1 {
                return Err(Error::InvalidInput(format!(
                    "warm start has {} signs, expected {}",
                    s.len(),
                    n + 1
                )));
            }
            s.clone()
        }
    };
    let scale = certification_factor(n, m) / ((n + 1) as f64).sqrt();
    let mut eval = GridMax::new(m);
    let mut land = Landscape::new(m);
    let mut current = land.reset(&mut eval, &signs);
    let mut best = (current, signs.clone());
    let mut temperature = cfg.initial_temperature;
    let mut since_reset = 0usize;
    let mut rejected = 0usize;
    for _ in 0..cfg.steps {
        let k = rng.random_range(0..=n);
        let proposed = land.propose(k, signs[k]);
        let delta = (proposed - current) * scale;
        let accept = delta <= 0.0
            || (temperature > 0.0 && rng.random::<f64>() < (-delta / temperature).exp());
        if !accept {
            rejected += 1;
            // frozen in a local minimum: reheat
            if rejected >= 4 * (n + 1) && temperature < REHEAT_BELOW * cfg.initial_temperature {
                temperature = cfg.initial_temperature;
                rejected = 0;
            }
        } else {
            rejected = 0;
            land.accept();
            signs[k] = signs[k].flip();
            current = proposed;
            since_reset += 1;
            if since_reset == 4096 {
                current = land.reset(&mut eval, &signs);
                since_reset = 0;
            }
            if current < best.0 {
                best = (current, signs.clone());
            }
        }
        temperature *= cfg.cooling;
    }
    Ok(best.1)
}

/// Simulated annealing over single sign flips, minimising the certified
/// upper flatness ratio. A restart that stays frozen for `4(N+1)` proposals
/// is reheated to the initial temperature. Deterministic for a given seed; restarts run in
/// parallel and are merged by `(ratio, signs)`.
pub fn c0_anneal(n: usize, cfg: &AnnealConfig, seed: u64) -> Result<FlatnessReport> {
    if cfg.restarts == 0 {
        return Err(Error::InvalidInput("annealing needs at least one restart".into()));
    }
    if !(cfg.cooling > 0.0 && cfg.cooling <= 1.0) || cfg.initial_temperature < 0.0 {
        return Err(Error::InvalidInput(
            "cooling must lie in (0, 1] and the temperature must be nonnegative".into(),
        ));
    }
    let m = cfg.oversampling * (n + 1);
    if m <= 2 * n {
        return Err(Error::GridTooSmall {
            points: m,
            required: 2 * n + 1,
            reason: "flatness certification needs M > 2N",
        });
    }
    let candidates = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            let signs = anneal_restart(n, m, cfg, &mut rng)?;
            let ratio = flatness_ratio(&signs, m)?;
            Ok((ratio.upper, signs))
        })
        .collect::<Result<Vec<_>>>()?;
    let best = candidates
        .into_iter()
        .reduce(|a, b| if better(&b, &a) { b } else { a })
        .expect("restarts > 0");
    Ok(FlatnessReport {
        schema_version: REPORT_SCHEMA_VERSION,
        n,
        ratio: flatness_ratio(&best.1, m)?,
        signs: best.1,
        method: SearchMethod::Anneal,
        seed: Some(seed),
        points: m,
    })
}

/// Report for the Rudin–Shapiro signs of length `2^k` on an `M`-point grid.
pub fn rudin_shapiro_report(k: u32, m: usize) -> Result<FlatnessReport> {
    let signs = rudin_shapiro(k)?;
    Ok(FlatnessReport {
        schema_version: REPORT_SCHEMA_VERSION,
        n: signs.len() - 1,
        ratio: flatness_ratio(&signs, m)?,
        signs,
        method: SearchMethod::RudinShapiro,
        seed: None,
        points: m,
    })
}

/// Grid size at which the certified upper ratio of a length-`2^k` sequence
/// exceeds its grid maximum by less than about `4·10^{-7}` relative.
pub fn fine_points(len: usize) -> usize {
    (2048 * len).next_power_of_two()
}

#[cfg(test)]
mod tests {
    use super::*;
    use Sign::{Minus as M, Plus as P};

    #[test]
    fn rudin_shapiro_small_orders() {
        assert_eq!(rudin_shapiro(0).unwrap(), vec![P]);
        assert_eq!(rudin_shapiro(1).unwrap(), vec![P, P]);
        assert_eq!(rudin_shapiro(2).unwrap(), vec![P, P, P, M]);
        assert_eq!(rudin_shapiro(3).unwrap(), vec![P, P, P, M, P, P, M, P]);
        assert!(rudin_shapiro(21).is_err());
    }

    #[test]
    fn rudin_shapiro_pair_identity() {
        // |P_k|^2 + |Q_k|^2 = 2^{k+1} on the whole circle
        let k = 6;
        let p = rudin_shapiro(k).unwrap();
        let q: Vec<Sign> = rudin_shapiro(k + 1).unwrap()[p.len()..].to_vec();
        let pp = sign_polynomial(&p);
        let qq = sign_polynomial(&q);
        for j in 0..50 {
            let t = j as f64 / 50.0 + 0.003;
            let s = pp.eval_1d(t).norm_sqr() + qq.eval_1d(t).norm_sqr();
            assert!((s - 2f64.powi(k as i32 + 1)).abs() < 1e-9);
        }
    }

    #[test]
    fn ratio_examples() {
        let r = flatness_ratio(&[P], 4).unwrap();
        assert_eq!((r.lower, r.upper), (1.0, 1.0));
        let r = flatness_ratio(&[P, P], 1 << 12).unwrap();
        assert!((r.lower - 2f64.sqrt()).abs() < 1e-15);
        assert!(flatness_ratio(&[P, P, P], 4).is_err());
    }

    #[test]
    fn ratio_symmetries() {
        let s = vec![P, M, M, P, P, P, M, P, M, M];
        let m = 320;
        let base = flatness_ratio(&s, m).unwrap();
        let neg: Vec<Sign> = s.iter().map(|x| x.flip()).collect();
        let rev: Vec<Sign> = s.iter().rev().copied().collect();
        for other in [neg, rev] {
            let r = flatness_ratio(&other, m).unwrap();
            assert!((r.lower - base.lower).abs() < 1e-12);
            assert!((r.upper - base.upper).abs() < 1e-12);
        }
    }

    /// Brute force over every pattern, no symmetry reduction.
    fn brute_force(n: usize, m: usize) -> f64 {
        (0..1u32 << (n + 1))
            .map(|bits| flatness_ratio(&bits_to_signs(bits, n), m).unwrap().upper)
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn exhaustive_matches_brute_force() {
        assert_eq!(c0_exhaustive(0, 32).unwrap().ratio, Interval { lower: 1.0, upper: 1.0 });
        let one = c0_exhaustive(1, 64).unwrap();
        assert!((one.ratio.lower - 2f64.sqrt()).abs() < 1e-15);
        for n in 2..=7 {
            let m = default_points(n);
            let rep = c0_exhaustive(n, m).unwrap();
            assert!((rep.ratio.upper - brute_force(n, m)).abs() < 1e-12, "N = {n}");
            assert!(rep.ratio.lower >= 1.0 - 1e-9);
        }
    }

    #[test]
    fn exhaustive_n3_optimum() {
        // Oracle: enumerate all 16 patterns directly on a dense grid.
        let m = 128;
        let rep = c0_exhaustive(3, m).unwrap();
        let oracle = brute_force(3, m);
        assert!((rep.ratio.upper - oracle).abs() < 1e-12);
        // the optimum is a Barker-type pattern ++ +- up to symmetry
        let poly = sign_polynomial(&rep.signs);
        assert!((poly.eval_1d(0.0).norm() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn exhaustive_limit() {
        assert!(matches!(
            c0_exhaustive(25, 10_000),
            Err(Error::SearchTooLarge { n: 25, limit: 24 })
        ));
        assert!(c0_exhaustive(5, 10).is_err());
    }

    #[test]
    fn canonical_classes_cover_everything() {
        let n = 6;
        for bits in 0..1u32 << (n + 1) {
            let flip = bits ^ ((1 << (n + 1)) - 1);
            let mut rev = 0;
            for i in 0..=n {
                rev |= (bits >> i & 1) << (n - i);
            }
            let rev_flip = rev ^ ((1 << (n + 1)) - 1);
            assert!(
                [bits, flip, rev, rev_flip].iter().any(|&b| is_canonical(b, n)),
                "class of {bits:b} has no representative"
            );
        }
    }

    #[test]
    fn anneal_is_deterministic_and_floored() {
        let cfg = AnnealConfig {
            steps: 2_000,
            restarts: 3,
            ..AnnealConfig::default()
        };
        let a = c0_anneal(12, &cfg, 42).unwrap();
        let b = c0_anneal(12, &cfg, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.ratio.lower >= 1.0 - 1e-9);
        assert_eq!(a.seed, Some(42));
    }

    #[test]
    fn anneal_warm_start_never_worse_than_start() {
        let n = 63;
        let cfg = AnnealConfig {
            steps: 500,
            restarts: 1,
            warm_start: WarmStart::RudinShapiro,
            ..AnnealConfig::default()
        };
        let rep = c0_anneal(n, &cfg, 1).unwrap();
        let start = flatness_ratio(&rudin_shapiro(6).unwrap(), cfg.oversampling * (n + 1)).unwrap();
        assert!(rep.ratio.upper <= start.upper + 1e-12);
    }

    #[test]
    fn anneal_rejects_bad_config() {
        let bad = AnnealConfig {
            restarts: 0,
            ..AnnealConfig::default()
        };
        assert!(c0_anneal(4, &bad, 0).is_err());
        let bad = AnnealConfig {
            warm_start: WarmStart::Given(vec![P, P]),
            ..AnnealConfig::default()
        };
        assert!(c0_anneal(4, &bad, 0).is_err());
    }

    #[test]
    fn landscape_updates_track_full_evaluation() {
        let n = 20;
        let m = default_points(n);
        let mut signs = rudin_shapiro(5).unwrap()[..=n].to_vec();
        let mut eval = GridMax::new(m);
        let mut land = Landscape::new(m);
        land.reset(&mut eval, &signs);
        for k in [3usize, 0, 20, 7, 3, 11] {
            let proposed = land.propose(k, signs[k]);
            land.accept();
            signs[k] = signs[k].flip();
            let fresh = GridMax::new(m).eval(signs.iter().map(|s| s.value()));
            assert!((proposed - fresh).abs() < 1e-10);
        }
    }
}
