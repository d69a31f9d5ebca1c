//! Canonical experiments: the reference initial states, the single π-pulse
//! CCN run, and the sweep over the second-neighbor coupling.

use num_complex::Complex64;
use thiserror::Error;

use crate::dynamics::{evolve, pi_pulse_duration, to_lab, DynamicsError, IntegratorConfig, PulseSpec, Trajectory};
use crate::observables::{apply_ideal_ccn, fidelity, probabilities, GateFidelity, ObservableError, SpinExpectations};
use crate::spin_model::{ccn_resonance, BasisIndex, ChainParams, DIM};
use crate::state::{RotatingState, ZERO_AMPS};

/// Norm drift tolerated anywhere in a finished experiment.
pub const NORM_TOLERANCE: f64 = 1e-6;

/// Second-neighbor couplings of the default sweep.
pub const DEFAULT_J_PRIMES: [f64; 6] = [0.0, 0.02, 0.04, 0.06, 0.08, 0.1];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Observable(#[from] ObservableError),
    #[error("norm drift {drift:.3e} exceeds {NORM_TOLERANCE:e}")]
    NormDrift { drift: f64 },
    #[error("sweep needs at least one j_prime value")]
    EmptySweep,
    #[error("sweep j_prime values must be finite and non-negative (got {0})")]
    InvalidJPrime(f64),
}

/// Unit amplitude on `|i₂i₁i₀⟩` at `t = 0`.
pub fn initial_digital(i2: bool, i1: bool, i0: bool) -> RotatingState {
    RotatingState::basis(BasisIndex::from_bits(i2, i1, i0).value())
}

/// The real superposition used to exercise all eight amplitudes at once:
/// probabilities `4/72, 14/72, 1/72, 17/72, 9/128, 23/128, 1/32, 7/32`.
pub fn initial_superposition() -> RotatingState {
    let r8 = 8f64.sqrt();
    let amps = [
        2.0 / (3.0 * r8),
        14f64.sqrt() / (3.0 * r8),
        1.0 / (3.0 * r8),
        17f64.sqrt() / (3.0 * r8),
        3.0 / (4.0 * r8),
        23f64.sqrt() / (4.0 * r8),
        1.0 / (2.0 * r8),
        7f64.sqrt() / (2.0 * r8),
    ];
    let mut d = ZERO_AMPS;
    for (slot, a) in d.iter_mut().zip(amps) {
        *slot = Complex64::new(a, 0.0);
    }
    RotatingState { d, t: 0.0 }
}

/// Resonant CCN π-pulse for `p`, zero phase.
pub fn ccn_pulse(p: &ChainParams) -> Result<PulseSpec, DynamicsError> {
    PulseSpec::new(ccn_resonance(p), 0.0, pi_pulse_duration(p)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleObservables {
    pub t: f64,
    pub probabilities: [f64; DIM],
    /// Longitudinal and (lab-frame) transverse spin components.
    pub spins: SpinExpectations,
    /// `|Σ|D_m|² − 1|`.
    pub norm_error: f64,
}

impl SampleObservables {
    fn of(s: &RotatingState, p: &ChainParams) -> Self {
        let probabilities = probabilities(s);
        let norm_error = (probabilities.iter().sum::<f64>() - 1.0).abs();
        Self { t: s.t, probabilities, spins: SpinExpectations::of(&to_lab(s, p)), norm_error }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub trajectory: Trajectory,
    /// One entry per trajectory sample.
    pub observables: Vec<SampleObservables>,
    /// Ideal CCN applied to the initial state.
    pub expected: RotatingState,
    /// `⟨expected|D(τ)⟩`.
    pub fidelity: GateFidelity,
    pub max_norm_drift: f64,
}

impl ExperimentResult {
    pub fn params(&self) -> &ChainParams {
        &self.trajectory.params
    }

    pub fn pulse(&self) -> &PulseSpec {
        &self.trajectory.pulse
    }

    pub fn final_state(&self) -> &RotatingState {
        self.trajectory.final_state()
    }

    pub fn final_observables(&self) -> &SampleObservables {
        self.observables.last().expect("at least one sample")
    }
}

/// Runs an arbitrary pulse and scores it against the ideal CCN.
pub fn run_experiment(
    p: &ChainParams,
    pulse: &PulseSpec,
    initial: &RotatingState,
    cfg: &IntegratorConfig,
) -> Result<ExperimentResult, ScenarioError> {
    let trajectory = evolve(initial, pulse, p, cfg)?;
    let max_norm_drift = trajectory.max_norm_drift();
    if max_norm_drift > NORM_TOLERANCE {
        return Err(ScenarioError::NormDrift { drift: max_norm_drift });
    }
    let observables = trajectory.samples.iter().map(|s| SampleObservables::of(s, p)).collect();
    let expected = apply_ideal_ccn(initial);
    let fidelity = fidelity(&expected, trajectory.final_state())?;
    Ok(ExperimentResult { trajectory, observables, expected, fidelity, max_norm_drift })
}

/// Single resonant π-pulse at `ω₀ − J − J′`.
pub fn run_ccn_experiment(
    p: &ChainParams,
    initial: &RotatingState,
    cfg: &IntegratorConfig,
) -> Result<ExperimentResult, ScenarioError> {
    run_experiment(p, &ccn_pulse(p)?, initial, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRecord {
    pub j_prime: f64,
    /// `J′/J`.
    pub j_ratio: f64,
    /// Final populations of all eight states.
    pub probabilities: [f64; DIM],
    pub fidelity: GateFidelity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Ascending in `j_prime`.
    pub records: Vec<SweepRecord>,
}

fn sweep_point(
    base: &ChainParams,
    j_prime: f64,
    initial: &RotatingState,
    cfg: &IntegratorConfig,
) -> Result<SweepRecord, ScenarioError> {
    let p = base.with_j_prime(j_prime);
    let result = run_ccn_experiment(&p, initial, cfg)?;
    Ok(SweepRecord {
        j_prime,
        j_ratio: j_prime / p.j,
        probabilities: result.final_observables().probabilities,
        fidelity: result.fidelity,
    })
}

fn check_sweep(values: &[f64]) -> Result<(), ScenarioError> {
    if values.is_empty() {
        return Err(ScenarioError::EmptySweep);
    }
    if let Some(&bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(ScenarioError::InvalidJPrime(bad));
    }
    Ok(())
}

fn assemble(mut records: Vec<SweepRecord>) -> SweepResult {
    records.sort_by(|a, b| a.j_prime.total_cmp(&b.j_prime));
    SweepResult { records }
}

/// Runs the CCN experiment for every `J′`, one point at a time.
pub fn sweep_jprime_sequential(
    base: &ChainParams,
    j_prime_values: &[f64],
    initial: &RotatingState,
    cfg: &IntegratorConfig,
) -> Result<SweepResult, ScenarioError> {
    check_sweep(j_prime_values)?;
    let records = j_prime_values
        .iter()
        .map(|&jp| sweep_point(base, jp, initial, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(assemble(records))
}

/// Runs the CCN experiment for every `J′`. The pulse frequency and duration
/// are rebuilt for each point. Points run concurrently when the `parallel`
/// feature is enabled; records come back sorted by `J′` either way.
#[cfg(feature = "parallel")]
pub fn sweep_jprime(
    base: &ChainParams,
    j_prime_values: &[f64],
    initial: &RotatingState,
    cfg: &IntegratorConfig,
) -> Result<SweepResult, ScenarioError> {
    use rayon::prelude::*;

    check_sweep(j_prime_values)?;
    let records = j_prime_values
        .par_iter()
        .map(|&jp| sweep_point(base, jp, initial, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(assemble(records))
}

#[cfg(not(feature = "parallel"))]
pub fn sweep_jprime(
    base: &ChainParams,
    j_prime_values: &[f64],
    initial: &RotatingState,
    cfg: &IntegratorConfig,
) -> Result<SweepResult, ScenarioError> {
    sweep_jprime_sequential(base, j_prime_values, initial, cfg)
}
