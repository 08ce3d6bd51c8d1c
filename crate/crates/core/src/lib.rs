//! Simulation and stability analysis for delayed tumor-angiogenesis models.
//!
//! Three models couple a tumor mass `x(t)` to its vascular carrying capacity
//! `K(t)`, with the vasculature responding to the tumor mass at a lagged time
//! `h(t) <= t`. The crate provides
//!
//! - [`model`]: right-hand sides, log-deviation coordinates and the
//!   second-order reduction of Model 2;
//! - [`schedule`]: constant, converging and pharmacokinetic therapy rates;
//! - [`engine`]: a method-of-steps RK4 integrator with Hermite dense output;
//! - [`analysis`]: equilibria, linearizations, the M-matrix test and the
//!   stability verdicts built on them.

pub mod analysis;
pub mod delay;
pub mod engine;
pub mod error;
pub mod model;
pub mod schedule;

pub use analysis::{EquilibriumPoint, StabilityReport, Theorem, Verdict};
pub use delay::DelaySpec;
pub use engine::{
    convergence_metric, integrate, Fault, History, HistoryFunction, IntegrateError,
    IntegratorOptions, ModelProblem, PositivityMode, Trajectory,
};
pub use error::{Error, Result};
pub use model::{ModelKind, ModelParams, State};
pub use schedule::{pk_concentration, DoseRate, Rate, TreatmentSchedule};
