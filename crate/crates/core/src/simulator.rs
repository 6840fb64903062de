//! The verification protocol loop: randomized setting selection, Bernoulli
//! outcome sampling from tr(Pσ), and running (ε, δ) bound evaluation.
//!
//! Randomness contract: one root seed; trial t draws from a ChaCha20 stream
//! seeded with `seed ^ splitmix64(t)`. Within a step the setting draw comes
//! first, then the outcome draw, both from the same stream. Identical
//! `(seed, trial_index)` therefore reproduce a trial bit for bit, and trials
//! may run concurrently.

use alloc::vec::Vec;
use core::fmt;

// Required for f64 math under no_std; the import looks unused in test
// builds, where std in the crate graph provides the inherent methods.
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::linalg::Matrix;
use crate::states::SourceModel;
use crate::statistics::{delta_from_counts, epsilon_from_confidence, StatsError, Verdict};
use crate::strategy::Strategy;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SimError {
    InvalidConfig(&'static str),
    Stats(StatsError),
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::InvalidConfig(what) => write!(f, "invalid config: {what}"),
            SimError::Stats(e) => write!(f, "{e}"),
        }
    }
}

impl From<StatsError> for SimError {
    fn from(e: StatsError) -> Self {
        SimError::Stats(e)
    }
}

/// Which bound the trial evaluates at every step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    /// Fix ε; the running bound is δ.
    FixedEpsilon(f64),
    /// Fix δ; the running bound is ε.
    FixedDelta(f64),
}

impl Mode {
    fn parameter(self) -> f64 {
        match self {
            Mode::FixedEpsilon(v) | Mode::FixedDelta(v) => v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialConfig<'a> {
    pub strategy: &'a Strategy,
    pub source: &'a SourceModel,
    pub n_max: u64,
    pub mode: Mode,
    pub seed: u64,
    pub trial_index: u64,
}

/// Running bound recorded after a step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepBound {
    Delta(f64),
    Epsilon(f64),
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    /// 1-based step index.
    pub step: u64,
    /// Index into the strategy's settings.
    pub setting: usize,
    pub accepted: bool,
    /// Running accept count.
    pub accepts: u64,
    pub bound: StepBound,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub steps: Vec<StepRecord>,
}

impl TrialRecord {
    pub fn accepts(&self) -> u64 {
        self.steps.last().map_or(0, |s| s.accepts)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingPoint {
    pub n: u64,
    /// Mean ε over conclusive trials at this n; `None` when every trial was
    /// inconclusive (the flagged case).
    pub epsilon_mean: Option<f64>,
    pub epsilon_stddev: f64,
    pub inconclusive: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingSummary {
    pub points: Vec<ScalingPoint>,
    pub trials: u64,
    /// Least-squares fit of ln ε̄ against ln n over the conclusive points.
    pub slope: f64,
    pub intercept: f64,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn trial_rng(seed: u64, trial_index: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed ^ splitmix64(trial_index))
}

/// Σ wᵢ tr(Pᵢσ) = tr(Ωσ), clamped against 1e−14-scale rounding.
pub fn accept_probability(strategy: &Strategy, state: &Matrix) -> f64 {
    let t = strategy
        .omega()
        .trace_product(state)
        .expect("4x4 operands")
        .re;
    t.clamp(0.0, 1.0)
}

/// Per-setting accept probabilities for a fixed emitted state.
fn setting_probabilities(strategy: &Strategy, state: &Matrix) -> Vec<f64> {
    strategy
        .settings()
        .iter()
        .map(|s| {
            s.projector()
                .trace_product(state)
                .expect("4x4 operands")
                .re
                .clamp(0.0, 1.0)
        })
        .collect()
}

fn draw_setting<R: Rng>(rng: &mut R, weights: &[f64]) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.len() - 1
}

fn validate(n_max: u64, mode_param: f64) -> Result<(), SimError> {
    if n_max == 0 {
        return Err(SimError::InvalidConfig("n_max must be >= 1"));
    }
    if !(mode_param > 0.0 && mode_param < 1.0) {
        return Err(SimError::InvalidConfig("mode parameter must be in (0, 1)"));
    }
    Ok(())
}

/// Runs one trial of the protocol, evaluating the running bound after every
/// step. Deterministic given `(seed, trial_index)`.
pub fn run_trial(config: &TrialConfig<'_>) -> Result<TrialRecord, SimError> {
    validate(config.n_max, config.mode.parameter())?;
    let state = config.source.emit();
    let probs = setting_probabilities(config.strategy, &state);
    let weights: Vec<f64> = config.strategy.settings().iter().map(|s| s.weight()).collect();
    let f = config.strategy.f();
    let mut rng = trial_rng(config.seed, config.trial_index);

    let mut steps = Vec::with_capacity(config.n_max as usize);
    let mut accepts = 0u64;
    for step in 1..=config.n_max {
        let setting = draw_setting(&mut rng, &weights);
        let accepted = rng.gen::<f64>() < probs[setting];
        if accepted {
            accepts += 1;
        }
        let bound = match config.mode {
            Mode::FixedEpsilon(eps) => match delta_from_counts(step, accepts, eps, f)? {
                Verdict::Bound(d) => StepBound::Delta(d),
                Verdict::Inconclusive => StepBound::Inconclusive,
            },
            Mode::FixedDelta(delta) => match epsilon_from_confidence(step, accepts, delta, f)? {
                Verdict::Bound(e) => StepBound::Epsilon(e),
                Verdict::Inconclusive => StepBound::Inconclusive,
            },
        };
        steps.push(StepRecord { step, setting, accepted, accepts, bound });
    }
    Ok(TrialRecord { steps })
}

/// Protocol draws only: the running accept counts after each step, without
/// bound evaluation. Same stream and draw order as [`run_trial`].
pub fn run_accept_counts(
    strategy: &Strategy,
    source: &SourceModel,
    n: u64,
    seed: u64,
    trial_index: u64,
) -> Vec<u64> {
    let state = source.emit();
    let probs = setting_probabilities(strategy, &state);
    let weights: Vec<f64> = strategy.settings().iter().map(|s| s.weight()).collect();
    let mut rng = trial_rng(seed, trial_index);
    let mut counts = Vec::with_capacity(n as usize);
    let mut accepts = 0u64;
    for _ in 0..n {
        let setting = draw_setting(&mut rng, &weights);
        if rng.gen::<f64>() < probs[setting] {
            accepts += 1;
        }
        counts.push(accepts);
    }
    counts
}

/// Multi-trial ε-scaling sweep at fixed δ: for every n in `[n_lo, n_hi]`,
/// averages the step-n ε over trials, excluding inconclusive values and
/// counting them separately, then fits ln ε̄ against ln n.
pub fn run_scaling(
    strategy: &Strategy,
    source: &SourceModel,
    trials: u64,
    n_lo: u64,
    n_hi: u64,
    delta: f64,
    base_seed: u64,
) -> Result<ScalingSummary, SimError> {
    if trials == 0 {
        return Err(SimError::InvalidConfig("trials must be >= 1"));
    }
    if n_lo == 0 || n_lo >= n_hi {
        return Err(SimError::InvalidConfig("require 1 <= n_lo < n_hi"));
    }
    validate(n_hi, delta)?;
    let f = strategy.f();

    let span = (n_hi - n_lo + 1) as usize;
    let mut per_n: Vec<Vec<f64>> = (0..span).map(|_| Vec::new()).collect();
    let mut inconclusive = alloc::vec![0u64; span];

    for t in 0..trials {
        let counts = run_accept_counts(strategy, source, n_hi, base_seed, t);
        for (i, n) in (n_lo..=n_hi).enumerate() {
            let m = counts[(n - 1) as usize];
            match epsilon_from_confidence(n, m, delta, f)? {
                Verdict::Bound(e) => per_n[i].push(e),
                Verdict::Inconclusive => inconclusive[i] += 1,
            }
        }
    }

    let points: Vec<ScalingPoint> = (n_lo..=n_hi)
        .enumerate()
        .map(|(i, n)| {
            let vals = &per_n[i];
            if vals.is_empty() {
                return ScalingPoint { n, epsilon_mean: None, epsilon_stddev: 0.0, inconclusive: inconclusive[i] };
            }
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let stddev = if vals.len() > 1 {
                let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                    / (vals.len() - 1) as f64;
                var.sqrt()
            } else {
                0.0
            };
            ScalingPoint { n, epsilon_mean: Some(mean), epsilon_stddev: stddev, inconclusive: inconclusive[i] }
        })
        .collect();

    let (slope, intercept) = fit_loglog(&points);
    Ok(ScalingSummary { points, trials, slope, intercept })
}

fn fit_loglog(points: &[ScalingPoint]) -> (f64, f64) {
    let data: Vec<(f64, f64)> = points
        .iter()
        .filter_map(|p| p.epsilon_mean.map(|m| ((p.n as f64).ln(), m.ln())))
        .collect();
    if data.len() < 2 {
        return (f64::NAN, f64::NAN);
    }
    let n = data.len() as f64;
    let sx: f64 = data.iter().map(|d| d.0).sum();
    let sy: f64 = data.iter().map(|d| d.1).sum();
    let sxx: f64 = data.iter().map(|d| d.0 * d.0).sum();
    let sxy: f64 = data.iter().map(|d| d.0 * d.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    (slope, intercept)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{fidelity, TargetState};
    use core::f64::consts::FRAC_PI_4;

    fn singlet_target() -> TargetState {
        TargetState::new(FRAC_PI_4).unwrap()
    }

    #[test]
    fn pure_singlet_source_always_accepts() {
        let strategy = Strategy::singlet().unwrap();
        let source = SourceModel::pure(singlet_target());
        let config = TrialConfig {
            strategy: &strategy,
            source: &source,
            n_max: 500,
            mode: Mode::FixedDelta(0.05),
            seed: 42,
            trial_index: 0,
        };
        let record = run_trial(&config).unwrap();
        assert_eq!(record.accepts(), 500);
        assert!(record.steps.iter().all(|s| s.accepted));
    }

    #[test]
    fn fixed_delta_pure_source_matches_closed_form_and_decreases() {
        let strategy = Strategy::singlet().unwrap();
        let source = SourceModel::pure(singlet_target());
        let config = TrialConfig {
            strategy: &strategy,
            source: &source,
            n_max: 200,
            mode: Mode::FixedDelta(0.05),
            seed: 1,
            trial_index: 3,
        };
        let record = run_trial(&config).unwrap();
        let mut prev = f64::INFINITY;
        for s in &record.steps {
            let StepBound::Epsilon(e) = s.bound else {
                // early steps can be inconclusive only if eps >= 1; skip them
                assert!(s.step < 10);
                continue;
            };
            let closed = (1.0 - 0.05f64.powf(1.0 / s.step as f64)) / strategy.f();
            assert!((e - closed).abs() < 1e-14, "step {}", s.step);
            assert!(e < prev, "eps not strictly decreasing at step {}", s.step);
            prev = e;
        }
    }

    #[test]
    fn determinism_bit_identical() {
        let strategy = Strategy::singlet().unwrap();
        let source = SourceModel::werner(singlet_target(), 0.1).unwrap();
        let config = TrialConfig {
            strategy: &strategy,
            source: &source,
            n_max: 300,
            mode: Mode::FixedEpsilon(0.05),
            seed: 0xDEAD,
            trial_index: 7,
        };
        let a = run_trial(&config).unwrap();
        let b = run_trial(&config).unwrap();
        assert_eq!(a, b);
        let c = run_trial(&TrialConfig { trial_index: 8, ..config }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn accept_probability_examples() {
        let strategy = Strategy::singlet().unwrap();
        let singlet = singlet_target().density();
        assert!((accept_probability(&strategy, &singlet) - 1.0).abs() < 1e-12);

        let mixed = Matrix::identity(4).scale(0.25);
        assert!((accept_probability(&strategy, &mixed) - 0.5).abs() < 1e-12);

        let global = Strategy::global(singlet_target()).unwrap();
        let werner = SourceModel::werner(singlet_target(), 0.1).unwrap().emit();
        assert!((accept_probability(&global, &werner) - 0.925).abs() < 1e-12);
    }

    #[test]
    fn werner_accept_frequency_converges() {
        let strategy = Strategy::singlet().unwrap();
        for p in [0.02, 0.1] {
            let source = SourceModel::werner(singlet_target(), p).unwrap();
            let q = 1.0 - p / 2.0;
            let n = 100_000u64;
            let counts = run_accept_counts(&strategy, &source, n, 777, 0);
            let freq = *counts.last().unwrap() as f64 / n as f64;
            let sigma = (q * (1.0 - q) / n as f64).sqrt();
            assert!((freq - q).abs() < 4.0 * sigma, "p={p} freq={freq} q={q}");
        }
    }

    #[test]
    fn werner_saturates_worst_case_bound() {
        // 1 − tr(Ωρ) = f · (1 − F) with equality for the Werner family
        let strategy = Strategy::singlet().unwrap();
        for p in [0.0, 0.02, 0.3, 1.0] {
            let source = SourceModel::werner(singlet_target(), p).unwrap();
            let rho = source.emit();
            let lhs = 1.0 - accept_probability(&strategy, &rho);
            let rhs = strategy.f() * (1.0 - fidelity(&rho, source.target()).unwrap());
            assert!((lhs - rhs).abs() < 1e-12, "p={p}");
        }
    }

    #[test]
    fn scaling_pure_sources_closed_form() {
        let delta = 0.05;
        // product target, f = 1: mean equals the global closed form exactly
        let product = Strategy::product(0.0).unwrap();
        let src = SourceModel::pure(TargetState::new(0.0).unwrap());
        let summary = run_scaling(&product, &src, 10, 20, 80, delta, 5).unwrap();
        for p in &summary.points {
            let expected = 1.0 - delta.powf(1.0 / p.n as f64);
            assert!((p.epsilon_mean.unwrap() - expected).abs() < 1e-15 + p.epsilon_stddev);
            assert!(p.epsilon_stddev < 1e-15);
            assert_eq!(p.inconclusive, 0);
        }
        assert!((summary.slope + 1.0).abs() < 0.05, "slope {}", summary.slope);

        // singlet: offset from the global curve is ln 1.5 in log space
        let singlet = Strategy::singlet().unwrap();
        let src = SourceModel::pure(singlet_target());
        let s2 = run_scaling(&singlet, &src, 10, 20, 80, delta, 5).unwrap();
        for (a, b) in s2.points.iter().zip(&summary.points) {
            let offset = a.epsilon_mean.unwrap().ln() - b.epsilon_mean.unwrap().ln();
            assert!((offset - 1.5f64.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn scaling_rejects_bad_ranges() {
        let strategy = Strategy::singlet().unwrap();
        let source = SourceModel::pure(singlet_target());
        assert!(run_scaling(&strategy, &source, 0, 20, 80, 0.05, 0).is_err());
        assert!(run_scaling(&strategy, &source, 5, 80, 20, 0.05, 0).is_err());
        assert!(run_scaling(&strategy, &source, 5, 20, 80, 1.5, 0).is_err());
    }
}
