//! Numerical laboratory for rearranged and sign-flipped Fourier partial sums.
//!
//! The crate is organised bottom-up:
//!
//! * [`trig`]: sparse multivariate trigonometric polynomials, torus grids,
//!   quadrature norms and certified sup-norm bounds.
//! * [`summation`]: set-indexed, symmetric, rearranged and sign-flipped
//!   partial sums together with the Dirichlet, Fejér and de la Vallée
//!   Poussin kernels.
//! * [`rearrange`]: finitely supported permutations of the integers,
//!   exhaustions, greedy orderings and block permutations.
//! * [`flat`]: Rudin–Shapiro sequences and searches for flat ±1 polynomials.
//! * [`bound`]: explicit lower-bound constructions for sign-flip operators
//!   restricted to sets of positive measure, and Wiener-algebra checks.
//! * [`probes`]: finite diagnostics for strong/weak operator convergence of
//!   rearranged partial sums as multiplication operators.

pub mod bound;
pub mod error;
pub mod flat;
pub mod probes;
pub mod rearrange;
pub mod summation;
pub mod trig;

pub use bound::{AxisBox, BoundParams, BoundReport, BoxUnion, WienerGateReport};
pub use error::{Error, Result};
pub use flat::{AnnealConfig, FlatnessReport, Interval, SearchMethod, WarmStart};
pub use probes::{TrajectoryReport, Verdict, WitnessFunction};
pub use rearrange::{Exhaustion, Permutation};
pub use summation::{FreqSet, Sign, SignSequence};
pub use trig::{Frequency, NormCertificate, TorusGrid, TrigPoly};

/// Version string recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
