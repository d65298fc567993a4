//! Parameter sets and drivers for each experiment.
//!
//! Every driver is a pure function of its parameters and the seed. Parallel
//! work inside the library collects results in index order, so outputs do
//! not depend on the worker count.

use std::f64::consts::SQRT_2;

use fourier_lab::bound::{self, AxisBox, BoundParams, BoundReport, BoxUnion};
use fourier_lab::flat::{self, AnnealConfig, FlatnessReport};
use fourier_lab::probes::{self, WitnessFunction};
use fourier_lab::summation::{fejer, vallee_poussin_mean};
use fourier_lab::{Permutation, Sign, TrigPoly};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::Experiment;
use crate::error::CliError;
use crate::output::{num, Table};

/// Everything an experiment hands back to the runner.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub table: Table,
    pub json: Value,
    pub plot_x: &'static str,
    pub plot_y: &'static str,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl ExperimentOutput {
    fn new(table: Table, json: Value, plot: (&'static str, &'static str)) -> Self {
        ExperimentOutput {
            table,
            json,
            plot_x: plot.0,
            plot_y: plot.1,
            checks: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

pub fn run_experiment(e: &Experiment, seed: u64) -> Result<ExperimentOutput, CliError> {
    match e {
        Experiment::FlatRs(p) => flat_rs(p),
        Experiment::FlatExhaustive(p) => flat_exhaustive(p),
        Experiment::FlatAnneal(p) => flat_anneal(p, seed),
        Experiment::BoundThm59(p) => bound_thm59(p),
        Experiment::BoundTensor(p) => bound_tensor(p),
        Experiment::BoundCor512(p) => bound_cor512(p),
        Experiment::WienerGate(p) => wiener_gate(p, seed),
        Experiment::ProbeSot(p) => probe_sot(p, seed),
        Experiment::ProbeIv(p) => probe_iv(p, seed),
        Experiment::ProbeBrp(p) => probe_brp(p, seed),
        Experiment::ProbeWot(p) => probe_wot(p),
        Experiment::KernelDump(p) => kernel_dump(p),
    }
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serialises")
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

// ---- flat polynomials ------------------------------------------------------

const FLATNESS_HEADER: [&str; 6] = ["N", "method", "seed", "ratio_lower", "ratio_upper", "signs"];

fn flatness_row(r: &FlatnessReport) -> Vec<String> {
    vec![
        r.n.to_string(),
        r.method.as_str().to_string(),
        r.seed.map(|s| s.to_string()).unwrap_or_default(),
        num(r.ratio.lower),
        num(r.ratio.upper),
        r.signs_string(),
    ]
}

fn flatness_output(reports: &[FlatnessReport]) -> ExperimentOutput {
    let mut table = Table::new(&FLATNESS_HEADER);
    for r in reports {
        table.push(flatness_row(r));
    }
    let mut out = ExperimentOutput::new(table, to_json(&reports), ("N", "ratio_upper"));
    for r in reports {
        out.check(r.ratio.lower >= 1.0 - 1e-9, || {
            format!("N = {}: ratio lower bound {} is below the Parseval floor", r.n, r.ratio.lower)
        });
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FlatRs {
    /// Orders `k = 0..=k_max`, sequences of length `2^k`.
    pub k_max: u32,
    /// Grid size `next_pow2(oversampling·2^k)`.
    pub oversampling: usize,
}

impl Default for FlatRs {
    fn default() -> Self {
        FlatRs {
            k_max: 10,
            oversampling: 2048,
        }
    }
}

fn flat_rs(p: &FlatRs) -> Result<ExperimentOutput, CliError> {
    let reports = (0..=p.k_max)
        .into_par_iter()
        .map(|k| flat::rudin_shapiro_report(k, (p.oversampling << k).next_power_of_two()))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = flatness_output(&reports);
    for r in &reports {
        out.check(r.ratio.upper <= SQRT_2 + 1e-6, || {
            format!("N = {}: Rudin–Shapiro ratio {} exceeds √2", r.n, r.ratio.upper)
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FlatExhaustive {
    pub n_min: usize,
    pub n_max: usize,
    /// Grid size `oversampling·(N+1)`.
    pub oversampling: usize,
}

impl Default for FlatExhaustive {
    fn default() -> Self {
        FlatExhaustive {
            n_min: 0,
            n_max: 12,
            oversampling: flat::DEFAULT_OVERSAMPLING,
        }
    }
}

fn flat_exhaustive(p: &FlatExhaustive) -> Result<ExperimentOutput, CliError> {
    if p.n_min > p.n_max {
        return Err(config_err("n_min must not exceed n_max"));
    }
    let reports = (p.n_min..=p.n_max)
        .map(|n| flat::c0_exhaustive(n, p.oversampling * (n + 1)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(flatness_output(&reports))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FlatAnneal {
    pub n_min: usize,
    pub n_max: usize,
    pub schedule: AnnealConfig,
}

impl Default for FlatAnneal {
    fn default() -> Self {
        FlatAnneal {
            n_min: 8,
            n_max: 16,
            schedule: AnnealConfig::default(),
        }
    }
}

fn flat_anneal(p: &FlatAnneal, seed: u64) -> Result<ExperimentOutput, CliError> {
    if p.n_min > p.n_max {
        return Err(config_err("n_min must not exceed n_max"));
    }
    let reports = (p.n_min..=p.n_max)
        .map(|n| flat::c0_anneal(n, &p.schedule, seed))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(flatness_output(&reports))
}

// ---- lower-bound constructions --------------------------------------------

const BOUND_HEADER: [&str; 8] = ["d", "delta", "N", "C0", "computed", "bound", "margin", "pass"];

fn bound_output(reports: &[BoundReport]) -> ExperimentOutput {
    let mut table = Table::new(&BOUND_HEADER);
    for r in reports {
        table.push(vec![
            r.dim.to_string(),
            num(r.delta),
            r.n.to_string(),
            num(r.c0_used),
            num(r.computed_norm),
            num(r.theoretical_bound),
            num(r.margin),
            r.pass.to_string(),
        ]);
    }
    let mut out = ExperimentOutput::new(table, to_json(&reports), ("N", "computed"));
    for r in reports {
        out.check(r.pass, || format!("margin {} below tolerance for E = {:?}", r.margin, r.set));
    }
    out
}

fn default_signs_order() -> u32 {
    12
}

fn signs_for(order: u32, explicit: &Option<Vec<Sign>>) -> Result<Vec<Sign>, CliError> {
    match explicit {
        Some(s) => Ok(s.clone()),
        None => Ok(flat::rudin_shapiro(order)?),
    }
}

fn interval(lo: f64, hi: f64) -> BoxUnion {
    BoxUnion::interval(lo, hi).expect("valid default interval")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundThm59 {
    pub set: BoxUnion,
    pub delta: f64,
    pub gamma0: f64,
    pub c0: f64,
    pub points: usize,
    /// Rudin–Shapiro order used when `signs` is absent.
    pub rs_order: u32,
    pub signs: Option<Vec<Sign>>,
}

impl Default for BoundThm59 {
    fn default() -> Self {
        let b = BoundParams::default();
        BoundThm59 {
            set: interval(-0.05, 0.05),
            delta: b.delta,
            gamma0: b.gamma0,
            c0: b.c0,
            points: b.points,
            rs_order: default_signs_order(),
            signs: None,
        }
    }
}

fn bound_thm59(p: &BoundThm59) -> Result<ExperimentOutput, CliError> {
    let params = BoundParams {
        delta: p.delta,
        gamma0: p.gamma0,
        c0: p.c0,
        points: p.points,
    };
    let r = bound::thm59_verify(&p.set, &signs_for(p.rs_order, &p.signs)?, &params)?;
    Ok(bound_output(&[r]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundTensor {
    pub d: u32,
    /// `E = [-half_width, half_width]^d` unless `set` is given.
    pub half_width: f64,
    pub set: Option<BoxUnion>,
    pub delta: f64,
    pub gamma0: f64,
    pub c0: f64,
    pub points: usize,
    pub rs_order: u32,
    pub signs: Option<Vec<Sign>>,
}

impl Default for BoundTensor {
    fn default() -> Self {
        let b = BoundParams::default();
        BoundTensor {
            d: 2,
            half_width: 0.05,
            set: None,
            delta: b.delta,
            gamma0: b.gamma0,
            c0: b.c0,
            points: b.points,
            rs_order: default_signs_order(),
            signs: None,
        }
    }
}

fn bound_tensor(p: &BoundTensor) -> Result<ExperimentOutput, CliError> {
    let set = match &p.set {
        Some(s) => s.clone(),
        None => BoxUnion::centered_cube(p.d as usize, p.half_width)?,
    };
    let params = BoundParams {
        delta: p.delta,
        gamma0: p.gamma0,
        c0: p.c0,
        points: p.points,
    };
    let r = bound::tensor_verify(p.d, &set, &signs_for(p.rs_order, &p.signs)?, &params)?;
    Ok(bound_output(&[r]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundCor512 {
    pub sets: Vec<BoxUnion>,
    pub points: usize,
    pub rs_order: u32,
}

impl Default for BoundCor512 {
    fn default() -> Self {
        let two_boxes = BoxUnion::new(vec![
            AxisBox {
                lo: vec![-0.002],
                hi: vec![0.001],
            },
            AxisBox {
                lo: vec![0.001],
                hi: vec![0.004],
            },
        ])
        .expect("valid default set");
        BoundCor512 {
            sets: vec![interval(-0.05, 0.05), interval(-0.01, 0.01), two_boxes],
            points: 4096,
            rs_order: default_signs_order(),
        }
    }
}

fn bound_cor512(p: &BoundCor512) -> Result<ExperimentOutput, CliError> {
    let signs = flat::rudin_shapiro(p.rs_order)?;
    let reports = bound::corollary512_sweep(&p.sets, &signs, p.points)?;
    Ok(bound_output(&reports))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WienerGate {
    /// Number of random polynomials with nonnegative coefficients.
    pub count: usize,
    pub max_degree: usize,
    /// Certification grid `oversampling·(degree+1)`.
    pub oversampling: usize,
}

impl Default for WienerGate {
    fn default() -> Self {
        WienerGate {
            count: 20,
            max_degree: 128,
            oversampling: 8,
        }
    }
}

/// Real coefficients uniform in `[0, 1)` on `-degree..=degree`.
pub fn random_nonnegative(rng: &mut ChaCha8Rng, degree: usize) -> TrigPoly {
    let d = degree as i64;
    let terms: Vec<(i64, f64)> = (-d..=d).map(|n| (n, rng.random::<f64>())).collect();
    TrigPoly::from_real(&terms)
}

/// Complex coefficients with real and imaginary parts uniform in `[-1, 1)`.
pub fn random_complex(rng: &mut ChaCha8Rng, degree: usize) -> TrigPoly {
    let d = degree as i64;
    TrigPoly::from_terms(
        1,
        (-d..=d).map(|n| (n, Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))),
    )
    .expect("one-dimensional")
}

fn wiener_gate(p: &WienerGate, seed: u64) -> Result<ExperimentOutput, CliError> {
    if p.max_degree == 0 {
        return Err(config_err("max_degree must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let polys: Vec<TrigPoly> = (0..p.count)
        .map(|_| {
            let deg = rng.random_range(1..=p.max_degree);
            random_nonnegative(&mut rng, deg)
        })
        .collect();
    let reports = polys
        .par_iter()
        .map(|f| bound::wiener_gate(f, p.oversampling * (f.degree() + 1)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&["index", "degree", "f_at_zero", "wiener_norm", "f_sup_upper", "pass"]);
    for (i, r) in reports.iter().enumerate() {
        table.push(vec![
            i.to_string(),
            r.degree.to_string(),
            num(r.f_at_zero),
            num(r.wiener_norm),
            num(r.f_sup_upper),
            r.pass.to_string(),
        ]);
    }
    let summary: Vec<Value> = reports
        .iter()
        .map(|r| {
            json!({
                "degree": r.degree,
                "f_at_zero": r.f_at_zero,
                "wiener_norm": r.wiener_norm,
                "f_sup_upper": r.f_sup_upper,
                "failed_rows": r.rows.iter().filter(|row| !row.ok).map(|row| row.n).collect::<Vec<_>>(),
                "pass": r.pass,
            })
        })
        .collect();
    let mut out = ExperimentOutput::new(table, Value::Array(summary), ("degree", "f_sup_upper"));
    for (i, r) in reports.iter().enumerate() {
        out.check(r.pass, || format!("polynomial {i} fails the Wiener gate"));
    }
    Ok(out)
}

// ---- probes ----------------------------------------------------------------

fn trajectory_table(header: [&str; 2], abscissa: &[u64], values: &[f64]) -> Table {
    let mut table = Table::new(&header);
    for (n, v) in abscissa.iter().zip(values) {
        table.push(vec![n.to_string(), num(*v)]);
    }
    table
}

fn default_witness() -> WitnessFunction {
    WitnessFunction::PowerSingularity { alpha: 0.25 }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbeSot {
    /// Degree of the random polynomial `f`.
    pub degree: usize,
    /// `σ` shuffles `{-window, …, window}`.
    pub window: i64,
    pub witness: WitnessFunction,
    pub n_max: u64,
    pub points: usize,
}

impl Default for ProbeSot {
    fn default() -> Self {
        ProbeSot {
            degree: 8,
            window: 12,
            witness: default_witness(),
            n_max: 16,
            points: 512,
        }
    }
}

fn probe_sot(p: &ProbeSot, seed: u64) -> Result<ExperimentOutput, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = random_complex(&mut rng, p.degree);
    let sigma = Permutation::shuffle_window(p.window, &mut rng);
    let r = probes::sot_trajectory(&f, &p.witness, &sigma, p.n_max, p.points)?;
    let covered = sigma.exhaustion_index_of(&f);
    let table = trajectory_table(["N", "value"], &r.abscissa, &r.values);
    let json = json!({ "exhaustion_index": covered, "sigma": to_json(&sigma), "trajectory": to_json(&r) });
    let mut out = ExperimentOutput::new(table, json, ("N", "value"));
    for (n, v) in r.abscissa.iter().zip(&r.values) {
        if *n >= covered {
            out.check(*v <= 1e-9, || format!("N = {n}: support covered but error is {v}"));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbeIv {
    /// `f̂(n) = 1/(1+n²)` for `|n| ≤ degree`.
    pub degree: usize,
    pub window: i64,
    pub n_max: u64,
    pub points: usize,
}

impl Default for ProbeIv {
    fn default() -> Self {
        ProbeIv {
            degree: 16,
            window: 20,
            n_max: 24,
            points: 1024,
        }
    }
}

fn probe_iv(p: &ProbeIv, seed: u64) -> Result<ExperimentOutput, CliError> {
    let d = p.degree as i64;
    let terms: Vec<(i64, f64)> = (-d..=d).map(|n| (n, 1.0 / (1.0 + (n * n) as f64))).collect();
    let f = TrigPoly::from_real(&terms);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma = Permutation::shuffle_window(p.window, &mut rng);
    let sups = probes::condition_iv_trajectory(&f, &sigma, p.n_max, p.points)?;
    let abscissa: Vec<u64> = (0..=p.n_max).collect();
    let max = sups.iter().copied().fold(0.0, f64::max);
    let table = trajectory_table(["N", "sup_upper"], &abscissa, &sups);
    let json = json!({ "sigma": to_json(&sigma), "max_sup_upper": max, "sup_upper": sups });
    let mut out = ExperimentOutput::new(table, json, ("N", "sup_upper"));
    out.check(max.is_finite(), || "non-finite sup norm".into());
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbeBrp {
    /// Degree of the random polynomial `T`.
    pub degree: usize,
    pub window: i64,
    pub witness: WitnessFunction,
    /// Dilation `g((·+j)/k)` checked against `√k` times the transferred ratio.
    pub k: u32,
    pub j: u32,
    pub points: usize,
}

impl Default for ProbeBrp {
    fn default() -> Self {
        ProbeBrp {
            degree: 8,
            window: 10,
            witness: default_witness(),
            k: 3,
            j: 1,
            points: 1024,
        }
    }
}

fn probe_brp(p: &ProbeBrp, seed: u64) -> Result<ExperimentOutput, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = random_complex(&mut rng, p.degree);
    let sigma = Permutation::shuffle_window(p.window, &mut rng);
    let base = probes::brp_estimate(&p.witness, &t, &sigma, p.points)?;
    let dilated_g = WitnessFunction::dilated(p.witness.clone(), p.k, p.j)?;
    let dilated = probes::brp_estimate(&dilated_g, &t, &sigma, p.points)?;
    let k = p.k as i64;
    let transferred = probes::brp_estimate(&p.witness, &t.dilate(k)?, &sigma.dilate(k)?, p.points)?;
    let rhs = (p.k as f64).sqrt() * transferred.ratio;
    let abscissa: Vec<u64> = (0..base.numerators.len() as u64).collect();
    let table = trajectory_table(["N", "numerator"], &abscissa, &base.numerators);
    let json = json!({
        "ratio": base.ratio,
        "t_sup_upper": base.t_sup_upper,
        "dilated_ratio": dilated.ratio,
        "transferred_ratio": transferred.ratio,
        "sqrt_k_bound": rhs,
    });
    let mut out = ExperimentOutput::new(table, json, ("N", "numerator"));
    out.check(dilated.ratio <= rhs + 1e-8, || {
        format!("dilated ratio {} exceeds √k·{} = {rhs}", dilated.ratio, transferred.ratio)
    });
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbeWot {
    /// `f̂(n) = 1/(1+|n|)²` for `|n| ≤ degree`.
    pub degree: usize,
    /// `g = h = dist(t,0)^{-alpha}`.
    pub alpha: f64,
    pub n_max: u64,
    pub points: usize,
}

impl Default for ProbeWot {
    fn default() -> Self {
        ProbeWot {
            degree: 2048,
            alpha: 0.2,
            n_max: 2048,
            points: 1 << 15,
        }
    }
}

/// `Σ_{|n|≤degree} (1+|n|)^{-2} e_n`.
pub fn wot_test_function(degree: usize) -> TrigPoly {
    let d = degree as i64;
    let terms: Vec<(i64, f64)> = (-d..=d).map(|n| (n, (1.0 + n.abs() as f64).powi(-2))).collect();
    TrigPoly::from_real(&terms)
}

fn probe_wot(p: &ProbeWot) -> Result<ExperimentOutput, CliError> {
    let f = wot_test_function(p.degree);
    let g = WitnessFunction::power_singularity(p.alpha)?;
    let r = probes::wot_summability(&f, &g, &g, p.n_max, p.points)?;
    let table = trajectory_table(["N", "value"], &r.trajectory.abscissa, &r.trajectory.values);
    let json = json!({
        "verdict": r.trajectory.verdict,
        "slope": r.trajectory.slope,
        "g_l4": r.g_l4,
        "h_l4": r.h_l4,
        "bound": r.bound,
        "bound_ok": r.bound_ok,
        "final": r.trajectory.last(),
    });
    let mut out = ExperimentOutput::new(table, json, ("N", "value"));
    out.check(r.bound_ok, || format!("partial sums exceed the bound {}", r.bound));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    Dirichlet,
    Fejer,
    ValleePoussin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelDump {
    pub kernel: Kernel,
    pub n: u64,
    pub points: usize,
}

impl Default for KernelDump {
    fn default() -> Self {
        KernelDump {
            kernel: Kernel::Fejer,
            n: 8,
            points: 256,
        }
    }
}

fn symmetric_dirichlet(n: u64) -> TrigPoly {
    let n = n as i64;
    let terms: Vec<(i64, f64)> = (-n..=n).map(|k| (k, 1.0)).collect();
    TrigPoly::from_real(&terms)
}

fn kernel_dump(p: &KernelDump) -> Result<ExperimentOutput, CliError> {
    let k = match p.kernel {
        Kernel::Dirichlet => symmetric_dirichlet(p.n),
        Kernel::Fejer => fejer(p.n),
        Kernel::ValleePoussin => vallee_poussin_mean(&symmetric_dirichlet(2 * p.n + 1), p.n)?,
    };
    let grid = k.to_grid(p.points)?;
    let mut table = Table::new(&["t", "re", "im", "abs"]);
    for (i, v) in grid.samples().iter().enumerate() {
        table.push(vec![
            num(i as f64 / p.points as f64),
            num(v.re),
            num(v.im),
            num(v.norm()),
        ]);
    }
    let json = json!({
        "kernel": p.kernel,
        "n": p.n,
        "coefficients": k.iter().map(|(n, c)| json!([n.components()[0], c.re])).collect::<Vec<_>>(),
        "l1": k.norm_lp(1, p.points.max(fourier_lab::trig::lp_grid_floor(k.degree())))?,
    });
    let mut out = ExperimentOutput::new(table, json, ("t", "re"));
    out.check(grid.samples().iter().all(|v| v.re.is_finite()), || "non-finite kernel sample".into());
    Ok(out)
}
