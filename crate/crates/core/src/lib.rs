//! L-statistics `Lₙ = n⁻¹ Σ c_{ni} h(X_{n:i})` over dependent samples.
//!
//! The crate evaluates `Lₙ` and its centering `μₙ = ∫ cₙ(t) H(t) dt` for
//! general weights and kernels, measures the discrepancies that control
//! `|Lₙ − μₙ|` (Kolmogorov–Smirnov, uniform and `Lₚ` distances between
//! `H ∘ Gₙ⁻¹` and `H`, Hölder bounds), and runs seeded Monte Carlo sweeps that
//! check `Lₙ − μₙ → 0` for stationary ergodic and φ-mixing generators.
//!
//! Modules, bottom up:
//!
//! * [`rng`] and [`quadrature`]: counter-based streams and adaptive Simpson.
//! * [`distributions`]: marginal laws `F`, kernels `h`, `H = h ∘ F⁻¹`.
//! * [`weights`]: weight schemes, `Cₙ(q)`, conditions (i)/(ii).
//! * [`processes`]: dependent generators, Markov φ bounds, the dyadic mixing condition.
//! * [`lstat`]: order statistics, `Lₙ`, `μₙ`, discrepancies.
//! * [`harness`]: experiment configs, replication sweeps, verdicts, reports.

pub mod distributions;
pub mod error;
pub mod harness;
pub mod lstat;
pub mod processes;
pub mod quadrature;
pub mod rng;
pub mod weights;

pub use distributions::{
    compose_h, p_moment, DistributionModel, Kernel, Moment, RealFn, TransformedQuantile,
};
pub use error::{Error, Result};
pub use harness::{run_experiment, ConvergenceReport, ExperimentConfig};
pub use lstat::{EmpiricalQuantile, OrderedSample};
pub use processes::{MixingProfile, PhiBound, Process, ProcessGenerator, TransitionMatrix};
pub use weights::{materialize, Exponent, WeightScheme, WeightVector};
