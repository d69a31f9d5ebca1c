//! Time evolution of the register under a single rf pulse.
//!
//! The production path integrates the rotating-frame amplitudes `D_m`, whose
//! only time dependence is the slow detuning phases `e^{i(ω_mk − ω)t}`. The
//! lab-frame path integrates `C_m` with the fast diagonal term retained and is
//! kept only as an independent cross-check. Both use the same fixed-step
//! classical RK4 scheme and never renormalize.

use std::f64::consts::TAU;

use num_complex::Complex64;
use thiserror::Error;

use crate::spin_model::{coupling_element_phased, energy, transition_frequency, BasisIndex, ChainParams, DIM, QUBITS};
use crate::state::{norm_sqr, Amplitudes, Amps, LabState, RotatingState, ZERO_AMPS};

/// Allowed deviation of the initial squared norm from one.
pub const INITIAL_NORM_TOLERANCE: f64 = 1e-9;
/// Norm drift at a recorded sample beyond which integration is aborted.
pub const NORM_DRIFT_ABORT: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("rabi frequency must be positive to define a pi pulse (got {0})")]
    NonPositiveRabi(f64),
    #[error("pulse duration must be positive and finite (got {0})")]
    InvalidDuration(f64),
    #[error("pulse frequency must be positive and finite (got {0})")]
    InvalidFrequency(f64),
    #[error("integrator step must be positive and finite (got {0})")]
    InvalidStep(f64),
    #[error("sample stride must be at least 1")]
    InvalidStride,
    #[error("initial state must start at t = 0 (got t = {0})")]
    NonZeroStart(f64),
    #[error("initial state is not normalized: |psi|^2 = {0}")]
    NotNormalized(f64),
    #[error("norm drift {drift:.3e} at t = {t} exceeds {NORM_DRIFT_ABORT:e}; reduce dt")]
    NormDrift { t: f64, drift: f64 },
}

/// A single rf pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec {
    /// Drive frequency (MHz, angular `2π×` convention).
    pub frequency: f64,
    /// Phase in radians.
    pub phase: f64,
    /// Duration in µs.
    pub duration: f64,
}

impl PulseSpec {
    pub fn new(frequency: f64, phase: f64, duration: f64) -> Result<Self, DynamicsError> {
        let pulse = Self { frequency, phase, duration };
        pulse.validate()?;
        Ok(pulse)
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        if !(self.frequency.is_finite() && self.frequency > 0.0) {
            return Err(DynamicsError::InvalidFrequency(self.frequency));
        }
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(DynamicsError::InvalidDuration(self.duration));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Classical fourth-order Runge-Kutta with a fixed step.
    #[default]
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    /// Step size in µs.
    pub dt: f64,
    /// A sample is recorded every `sample_stride` steps (plus the final state).
    pub sample_stride: usize,
    pub method: Method,
}

impl IntegratorConfig {
    pub const DEFAULT_DT: f64 = 1e-6;
    pub const DEFAULT_STRIDE: usize = 1000;

    pub fn new(dt: f64, sample_stride: usize) -> Result<Self, DynamicsError> {
        let cfg = Self { dt, sample_stride, method: Method::Rk4 };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(DynamicsError::InvalidStep(self.dt));
        }
        if self.sample_stride == 0 {
            return Err(DynamicsError::InvalidStride);
        }
        Ok(())
    }
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { dt: Self::DEFAULT_DT, sample_stride: Self::DEFAULT_STRIDE, method: Method::Rk4 }
    }
}

/// Recorded rotating-frame samples of one evolution, oldest first.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<RotatingState>,
    pub params: ChainParams,
    pub pulse: PulseSpec,
}

impl Trajectory {
    pub fn final_state(&self) -> &RotatingState {
        self.samples.last().expect("trajectory always holds the initial sample")
    }

    pub fn initial_state(&self) -> &RotatingState {
        &self.samples[0]
    }

    /// Largest `|Σ|D_m|² − 1|` over all samples.
    pub fn max_norm_drift(&self) -> f64 {
        self.samples.iter().map(|s| (s.norm_sqr() - 1.0).abs()).fold(0.0, f64::max)
    }
}

/// Duration `π/Ω` of a π-pulse, in µs.
pub fn pi_pulse_duration(p: &ChainParams) -> Result<f64, DynamicsError> {
    if !(p.rabi.is_finite() && p.rabi > 0.0) {
        return Err(DynamicsError::NonPositiveRabi(p.rabi));
    }
    // π / (2π·Ω)
    Ok(0.5 / p.rabi)
}

/// Right-hand side `dD/dt` of the rotating-frame equations, evaluated term by
/// term from the coupling matrix and the transition frequencies.
pub fn rotating_rhs(t: f64, d: &Amps, p: &ChainParams, pulse: &PulseSpec) -> Amps {
    let mut out = ZERO_AMPS;
    for m in BasisIndex::all() {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in BasisIndex::all() {
            let w = coupling_element_phased(m, k, t, pulse.frequency, pulse.phase, p);
            if w.norm_sqr() == 0.0 {
                continue;
            }
            let phase = Complex64::from_polar(1.0, TAU * transition_frequency(m, k, p) * t);
            acc += w * d[k.value()] * phase;
        }
        out[m.value()] = Complex64::new(0.0, -TAU) * acc;
    }
    out
}

/// Right-hand side `dC/dt` of the lab-frame equations, evaluated term by term.
pub fn lab_rhs(t: f64, c: &Amps, p: &ChainParams, pulse: &PulseSpec) -> Amps {
    let mut out = ZERO_AMPS;
    for m in BasisIndex::all() {
        let mut acc = energy(m, p) * c[m.value()];
        for k in BasisIndex::all() {
            acc += coupling_element_phased(m, k, t, pulse.frequency, pulse.phase, p) * c[k.value()];
        }
        out[m.value()] = Complex64::new(0.0, -TAU) * acc;
    }
    out
}

/// `C_m = D_m e^{−iE_m t/ħ}`.
pub fn to_lab(s: &RotatingState, p: &ChainParams) -> LabState {
    let mut c = s.d;
    for k in BasisIndex::all() {
        c[k.value()] *= Complex64::from_polar(1.0, -TAU * energy(k, p) * s.t);
    }
    LabState { c, t: s.t }
}

/// Inverse of [`to_lab`].
pub fn to_rotating(s: &LabState, p: &ChainParams) -> RotatingState {
    let mut d = s.c;
    for k in BasisIndex::all() {
        d[k.value()] *= Complex64::from_polar(1.0, TAU * energy(k, p) * s.t);
    }
    RotatingState { d, t: s.t }
}

/// A linear, time-dependent generator `dy/dt = A(t) y` whose time dependence
/// is captured by a small set of precomputable phase factors.
trait Generator {
    type Phases: Copy;
    fn phases(&self, t: f64) -> Self::Phases;
    fn derivative(&self, phases: &Self::Phases, y: &Amps) -> Amps;
}

/// Single-flip pair `(upper, lower)` with qubit set in `upper`.
#[derive(Debug, Clone, Copy)]
struct Pair {
    upper: usize,
    lower: usize,
}

const PAIRS: usize = QUBITS * DIM / 2;

fn single_flip_pairs() -> [Pair; PAIRS] {
    let mut pairs = [Pair { upper: 0, lower: 0 }; PAIRS];
    let mut n = 0;
    for qubit in 0..QUBITS {
        for lower in BasisIndex::all().filter(|s| s.bit(qubit) == 0) {
            pairs[n] = Pair { upper: lower.flip(qubit).value(), lower: lower.value() };
            n += 1;
        }
    }
    pairs
}

/// Absorption amplitude `−i·2π·W_{upper,lower}` at zero drive phase; the
/// emission amplitude is the same constant times the conjugate phase.
fn absorption_amplitude(pair: Pair, pulse: &PulseSpec, p: &ChainParams) -> Complex64 {
    let upper = BasisIndex::new(pair.upper).unwrap();
    let lower = BasisIndex::new(pair.lower).unwrap();
    Complex64::new(0.0, -TAU) * coupling_element_phased(upper, lower, 0.0, pulse.frequency, 0.0, p)
}

/// Rotating-frame generator. For each pair the only time dependence is
/// `g = e^{i(2π(ω_mk − ω)t − φ)}`:
/// `Ḋ_upper += a·g·D_lower`, `Ḋ_lower += a·g*·D_upper`.
struct RotatingGenerator {
    pairs: [Pair; PAIRS],
    rates: [f64; PAIRS],
    amplitude: [Complex64; PAIRS],
    phase: f64,
}

impl RotatingGenerator {
    fn new(p: &ChainParams, pulse: &PulseSpec) -> Self {
        let pairs = single_flip_pairs();
        let mut rates = [0.0; PAIRS];
        let mut amplitude = [Complex64::new(0.0, 0.0); PAIRS];
        for (i, &pair) in pairs.iter().enumerate() {
            let upper = BasisIndex::new(pair.upper).unwrap();
            let lower = BasisIndex::new(pair.lower).unwrap();
            rates[i] = TAU * (transition_frequency(upper, lower, p) - pulse.frequency);
            amplitude[i] = absorption_amplitude(pair, pulse, p);
        }
        Self { pairs, rates, amplitude, phase: pulse.phase }
    }
}

impl Generator for RotatingGenerator {
    type Phases = [Complex64; PAIRS];

    fn phases(&self, t: f64) -> Self::Phases {
        let mut g = [Complex64::new(0.0, 0.0); PAIRS];
        for (gi, &rate) in g.iter_mut().zip(&self.rates) {
            *gi = Complex64::from_polar(1.0, rate * t - self.phase);
        }
        g
    }

    fn derivative(&self, g: &Self::Phases, y: &Amps) -> Amps {
        let mut out = ZERO_AMPS;
        for ((&Pair { upper, lower }, &a), &gi) in self.pairs.iter().zip(&self.amplitude).zip(g) {
            out[upper] += a * gi * y[lower];
            out[lower] += a * gi.conj() * y[upper];
        }
        out
    }
}

/// Lab-frame generator: diagonal `−2πi·E_m` plus the drive, whose only time
/// dependence is `z* = e^{−i(2πωt + φ)}`.
struct LabGenerator {
    pairs: [Pair; PAIRS],
    diagonal: [Complex64; DIM],
    amplitude: [Complex64; PAIRS],
    angular_freq: f64,
    phase: f64,
}

impl LabGenerator {
    fn new(p: &ChainParams, pulse: &PulseSpec) -> Self {
        let pairs = single_flip_pairs();
        let mut diagonal = [Complex64::new(0.0, 0.0); DIM];
        for k in BasisIndex::all() {
            diagonal[k.value()] = Complex64::new(0.0, -TAU * energy(k, p));
        }
        let mut amplitude = [Complex64::new(0.0, 0.0); PAIRS];
        for (i, &pair) in pairs.iter().enumerate() {
            amplitude[i] = absorption_amplitude(pair, pulse, p);
        }
        Self { pairs, diagonal, amplitude, angular_freq: TAU * pulse.frequency, phase: pulse.phase }
    }
}

impl Generator for LabGenerator {
    type Phases = Complex64;

    fn phases(&self, t: f64) -> Complex64 {
        Complex64::from_polar(1.0, -(self.angular_freq * t + self.phase))
    }

    fn derivative(&self, zc: &Complex64, y: &Amps) -> Amps {
        let mut out = ZERO_AMPS;
        for m in 0..DIM {
            out[m] = self.diagonal[m] * y[m];
        }
        for i in 0..PAIRS {
            let Pair { upper, lower } = self.pairs[i];
            let a = self.amplitude[i];
            out[upper] += a * zc * y[lower];
            out[lower] += a * zc.conj() * y[upper];
        }
        out
    }
}

/// Fixed-step grid from 0 to `duration`; the last step is shortened (or, by
/// at most rounding, stretched) so that it lands exactly on `duration`.
#[derive(Debug, Clone, Copy)]
struct TimeGrid {
    dt: f64,
    duration: f64,
    steps: usize,
}

impl TimeGrid {
    fn new(dt: f64, duration: f64) -> Self {
        let ratio = duration / dt;
        let nearest = ratio.round();
        let steps = if nearest >= 1.0 && (ratio - nearest).abs() <= 1e-9 * nearest {
            nearest as usize
        } else {
            (ratio.ceil() as usize).max(1)
        };
        Self { dt, duration, steps }
    }

    fn time(&self, n: usize) -> f64 {
        if n >= self.steps {
            self.duration
        } else {
            n as f64 * self.dt
        }
    }
}

#[inline]
fn axpy(y: &Amps, h: f64, k: &Amps) -> Amps {
    let mut out = *y;
    for (o, ki) in out.iter_mut().zip(k) {
        *o += ki * h;
    }
    out
}

fn check_drift(t: f64, y: &Amps) -> Result<(), DynamicsError> {
    let drift = (norm_sqr(y) - 1.0).abs();
    if drift > NORM_DRIFT_ABORT || !drift.is_finite() {
        return Err(DynamicsError::NormDrift { t, drift });
    }
    Ok(())
}

/// Runs RK4 over `grid`, calling `record` at `t = 0`, every `stride` steps
/// and at the final time.
fn integrate<G: Generator>(
    g: &G,
    y0: Amps,
    grid: &TimeGrid,
    stride: usize,
    mut record: impl FnMut(f64, &Amps),
) -> Result<Amps, DynamicsError> {
    let mut y = y0;
    let mut t0 = 0.0;
    let mut ph0 = g.phases(t0);
    record(t0, &y);

    for n in 0..grid.steps {
        let t1 = grid.time(n + 1);
        let h = t1 - t0;
        let phm = g.phases(t0 + 0.5 * h);
        let ph1 = g.phases(t1);

        let k1 = g.derivative(&ph0, &y);
        let k2 = g.derivative(&phm, &axpy(&y, 0.5 * h, &k1));
        let k3 = g.derivative(&phm, &axpy(&y, 0.5 * h, &k2));
        let k4 = g.derivative(&ph1, &axpy(&y, h, &k3));
        let w = h / 6.0;
        for i in 0..DIM {
            y[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * w;
        }

        t0 = t1;
        ph0 = ph1;
        let done = n + 1;
        if done % stride == 0 || done == grid.steps {
            check_drift(t0, &y)?;
            record(t0, &y);
        }
    }
    Ok(y)
}

fn check_inputs<S: Amplitudes>(initial: &S, pulse: &PulseSpec, cfg: &IntegratorConfig) -> Result<(), DynamicsError> {
    pulse.validate()?;
    cfg.validate()?;
    if initial.time() != 0.0 {
        return Err(DynamicsError::NonZeroStart(initial.time()));
    }
    let n = initial.norm_sqr();
    if n.is_nan() || (n - 1.0).abs() > INITIAL_NORM_TOLERANCE {
        return Err(DynamicsError::NotNormalized(n));
    }
    Ok(())
}

/// Integrates the rotating-frame equations from `t = 0` to `pulse.duration`.
pub fn evolve(
    initial: &RotatingState,
    pulse: &PulseSpec,
    p: &ChainParams,
    cfg: &IntegratorConfig,
) -> Result<Trajectory, DynamicsError> {
    check_inputs(initial, pulse, cfg)?;
    let g = RotatingGenerator::new(p, pulse);
    let grid = TimeGrid::new(cfg.dt, pulse.duration);
    let mut samples = Vec::with_capacity(grid.steps / cfg.sample_stride + 2);
    integrate(&g, initial.d, &grid, cfg.sample_stride, |t, y| {
        samples.push(RotatingState { d: *y, t });
    })?;
    Ok(Trajectory { samples, params: *p, pulse: *pulse })
}

/// Integrates the untransformed lab-frame equations and returns the final
/// state. Independent of [`evolve`]; used to cross-check it.
pub fn evolve_lab_oracle(
    initial: &LabState,
    pulse: &PulseSpec,
    p: &ChainParams,
    cfg: &IntegratorConfig,
) -> Result<LabState, DynamicsError> {
    check_inputs(initial, pulse, cfg)?;
    let g = LabGenerator::new(p, pulse);
    let grid = TimeGrid::new(cfg.dt, pulse.duration);
    let c = integrate(&g, initial.c, &grid, cfg.sample_stride, |_, _| {})?;
    Ok(LabState { c, t: pulse.duration })
}
