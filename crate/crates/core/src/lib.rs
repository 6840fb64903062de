//! Verification of two-qubit pure states with local projective measurements.
//!
//! The crate builds the optimal verification strategies for the state family
//! `cosθ|01⟩ − sinθ|10⟩`, simulates the accept/reject protocol against noisy
//! sources, and turns accept counts into `(ε, δ)` statements: "the source
//! emits states within infidelity ε of the target, with confidence 1−δ".
//!
//! The core is `no_std` (with `alloc`); IO, the CLI, and file formats live in
//! the companion `qsv-cli` crate.

#![no_std]

extern crate alloc;

pub mod jones;
pub mod linalg;
pub mod simulator;
pub mod states;
pub mod statistics;
pub mod strategy;

pub use linalg::{Ket, LinalgError, Matrix, C64};
pub use simulator::{
    accept_probability, run_scaling, run_trial, Mode, ScalingPoint, ScalingSummary, StepBound,
    StepRecord, TrialConfig, TrialRecord,
};
pub use states::{fidelity, SourceModel, StateError, TargetState};
pub use statistics::{
    delta_from_counts, epsilon_from_confidence, kl_divergence, n_global, n_global_real, n_local,
    n_local_real, StatsError, Verdict,
};
pub use strategy::{MeasurementSetting, SelfCheck, Strategy, StrategyError, StrategyKind};
