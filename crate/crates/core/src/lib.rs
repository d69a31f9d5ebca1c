//! Simulation of a single-pulse Controlled-Controlled-Not (Toffoli) gate in a
//! chain of three Ising-coupled spin-1/2 nuclei.
//!
//! * [`spin_model`]: energies, transition frequencies and drive matrix elements.
//! * [`dynamics`]: RK4 integration in the rotating frame, plus a lab-frame
//!   cross-check.
//! * [`observables`]: populations, spin expectations, fidelity, reference gates.
//! * [`scenarios`]: the reference initial states, the CCN run and the `J′` sweep.
//! * [`config`] and [`output`]: config files, CSV tables and CLI workflows.

pub mod config;
pub mod dynamics;
pub mod observables;
pub mod output;
pub mod scenarios;
pub mod spin_model;
pub mod state;

pub use dynamics::{evolve, evolve_lab_oracle, to_lab, to_rotating, IntegratorConfig, PulseSpec, Trajectory};
pub use observables::{apply_ideal_ccn, fidelity, GateFidelity, SpinExpectations};
pub use scenarios::{run_ccn_experiment, sweep_jprime, ExperimentResult, SweepResult};
pub use spin_model::{BasisIndex, ChainParams};
pub use state::{Amplitudes, LabState, RotatingState};
