//! Experiment runner behind the `fourier-lab` binary.
//!
//! A run reads a JSON [`config::ExperimentConfig`], executes one experiment
//! on a dedicated thread pool, writes CSV, JSON and SVG outputs and finishes
//! with an atomically written manifest.

pub mod config;
pub mod error;
pub mod experiments;
pub mod manifest;
pub mod output;
pub mod plot;

pub use config::{Experiment, ExperimentConfig};
pub use error::CliError;
pub use manifest::{run, RunManifest};
