use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;
use crate::experiments::*;

/// Environment variable supplying the default worker count.
pub const WORKERS_ENV: &str = "FOURIER_LAB_WORKERS";

/// One named experiment with its validated parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Experiment {
    FlatRs(FlatRs),
    FlatExhaustive(FlatExhaustive),
    FlatAnneal(FlatAnneal),
    BoundThm59(BoundThm59),
    BoundTensor(BoundTensor),
    BoundCor512(BoundCor512),
    WienerGate(WienerGate),
    ProbeSot(ProbeSot),
    ProbeIv(ProbeIv),
    ProbeBrp(ProbeBrp),
    ProbeWot(ProbeWot),
    KernelDump(KernelDump),
}

pub const EXPERIMENT_NAMES: [&str; 12] = [
    "flat-rs",
    "flat-exhaustive",
    "flat-anneal",
    "bound-thm59",
    "bound-tensor",
    "bound-cor512",
    "wiener-gate",
    "probe-sot",
    "probe-iv",
    "probe-brp",
    "probe-wot",
    "kernel-dump",
];

fn params<T: for<'de> Deserialize<'de>>(name: &str, v: Value) -> Result<T, CliError> {
    serde_json::from_value(v).map_err(|e| CliError::Config(format!("parameters for `{name}`: {e}")))
}

impl Experiment {
    pub fn from_parts(name: &str, parameters: Value) -> Result<Self, CliError> {
        let p = if parameters.is_null() {
            Value::Object(Default::default())
        } else {
            parameters
        };
        Ok(match name {
            "flat-rs" => Experiment::FlatRs(params(name, p)?),
            "flat-exhaustive" => Experiment::FlatExhaustive(params(name, p)?),
            "flat-anneal" => Experiment::FlatAnneal(params(name, p)?),
            "bound-thm59" => Experiment::BoundThm59(params(name, p)?),
            "bound-tensor" => Experiment::BoundTensor(params(name, p)?),
            "bound-cor512" => Experiment::BoundCor512(params(name, p)?),
            "wiener-gate" => Experiment::WienerGate(params(name, p)?),
            "probe-sot" => Experiment::ProbeSot(params(name, p)?),
            "probe-iv" => Experiment::ProbeIv(params(name, p)?),
            "probe-brp" => Experiment::ProbeBrp(params(name, p)?),
            "probe-wot" => Experiment::ProbeWot(params(name, p)?),
            "kernel-dump" => Experiment::KernelDump(params(name, p)?),
            other => {
                return Err(CliError::Config(format!(
                    "unknown experiment `{other}`; expected one of {}",
                    EXPERIMENT_NAMES.join(", ")
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::FlatRs(_) => "flat-rs",
            Experiment::FlatExhaustive(_) => "flat-exhaustive",
            Experiment::FlatAnneal(_) => "flat-anneal",
            Experiment::BoundThm59(_) => "bound-thm59",
            Experiment::BoundTensor(_) => "bound-tensor",
            Experiment::BoundCor512(_) => "bound-cor512",
            Experiment::WienerGate(_) => "wiener-gate",
            Experiment::ProbeSot(_) => "probe-sot",
            Experiment::ProbeIv(_) => "probe-iv",
            Experiment::ProbeBrp(_) => "probe-brp",
            Experiment::ProbeWot(_) => "probe-wot",
            Experiment::KernelDump(_) => "kernel-dump",
        }
    }

    /// Fully resolved parameters, defaults included.
    pub fn parameters(&self) -> Value {
        let v = match self {
            Experiment::FlatRs(p) => serde_json::to_value(p),
            Experiment::FlatExhaustive(p) => serde_json::to_value(p),
            Experiment::FlatAnneal(p) => serde_json::to_value(p),
            Experiment::BoundThm59(p) => serde_json::to_value(p),
            Experiment::BoundTensor(p) => serde_json::to_value(p),
            Experiment::BoundCor512(p) => serde_json::to_value(p),
            Experiment::WienerGate(p) => serde_json::to_value(p),
            Experiment::ProbeSot(p) => serde_json::to_value(p),
            Experiment::ProbeIv(p) => serde_json::to_value(p),
            Experiment::ProbeBrp(p) => serde_json::to_value(p),
            Experiment::ProbeWot(p) => serde_json::to_value(p),
            Experiment::KernelDump(p) => serde_json::to_value(p),
        };
        v.expect("parameters serialise")
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: String,
    #[serde(default)]
    parameters: Value,
    seed: Option<u64>,
    workers: Option<usize>,
    output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub workers: usize,
    pub output_dir: PathBuf,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub output_dir: Option<PathBuf>,
}

fn env_workers() -> Result<Option<usize>, CliError> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Config(format!("{WORKERS_ENV}={v:?} is not a positive integer"))),
        Err(_) => Ok(None),
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str, overrides: &Overrides) -> Result<Self, CliError> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        let experiment = Experiment::from_parts(&raw.experiment, raw.parameters)?;
        let workers = match overrides.workers.or(raw.workers) {
            Some(w) => w,
            None => env_workers()?.unwrap_or(1),
        };
        if workers == 0 {
            return Err(CliError::Config("workers must be at least 1".into()));
        }
        Ok(ExperimentConfig {
            experiment,
            seed: overrides.seed.or(raw.seed).unwrap_or(0),
            workers,
            output_dir: overrides
                .output_dir
                .clone()
                .or(raw.output_dir)
                .unwrap_or_else(|| PathBuf::from("results")),
        })
    }

    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Input {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text, overrides)
    }

    /// Canonical form hashed into the manifest. Worker count and output
    /// location do not affect results and are left out.
    pub fn canonical(&self) -> Value {
        #[derive(Serialize)]
        struct Canon<'a> {
            experiment: &'a str,
            parameters: Value,
            seed: u64,
        }
        serde_json::to_value(Canon {
            experiment: self.experiment.name(),
            parameters: self.experiment.parameters(),
            seed: self.seed,
        })
        .expect("serialisable")
    }
}
