use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cannot read {path}: {source}")]
    Input { path: PathBuf, source: io::Error },

    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: io::Error },

    #[error(transparent)]
    Lab(#[from] fourier_lab::Error),

    #[error("checks failed: {0}")]
    CheckFailed(String),
}

impl CliError {
    /// 2 for bad input, 3 for numerical guards, 4 for invariant breaches,
    /// 1 for failures writing results.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Input { .. } => 2,
            CliError::Output { .. } => 1,
            CliError::Lab(e) if e.is_numeric_guard() => 3,
            CliError::Lab(e) if e.is_invariant_breach() => 4,
            CliError::Lab(_) => 2,
            CliError::CheckFailed(_) => 4,
        }
    }

    pub fn hint(&self) -> Option<&'static str> {
        use fourier_lab::Error as E;
        match self {
            CliError::Lab(E::GridTooSmall { .. }) => Some("increase `points` (or the oversampling factor) in the parameters"),
            CliError::Lab(E::GridTooLarge { .. }) => Some("reduce `points` or the dimension"),
            CliError::Lab(E::SearchTooLarge { .. }) => Some("use the flat-anneal experiment for this N"),
            CliError::Lab(E::SignsTooShort { .. }) => Some("raise `rs_order` or supply a longer `signs` list"),
            CliError::Lab(E::QuadratureTooCoarse { .. }) => Some("increase `points` so the grid resolves the narrowest box"),
            _ => None,
        }
    }
}
