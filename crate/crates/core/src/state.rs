//! Amplitude vectors of the three-spin register in the two frames.

use num_complex::Complex64;

use crate::spin_model::DIM;

pub type Amps = [Complex64; DIM];

pub const ZERO_AMPS: Amps = [Complex64::new(0.0, 0.0); DIM];

/// Which picture a set of amplitudes lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    /// Rotating frame, coefficients `D_m`.
    Rotating,
    /// Lab frame, coefficients `C_m = D_m e^{−iE_m t/ħ}`.
    Lab,
}

/// Common access to the eight amplitudes of a state.
pub trait Amplitudes {
    const FRAME: Frame;

    fn amplitudes(&self) -> &Amps;
    fn amplitudes_mut(&mut self) -> &mut Amps;
    /// Time in µs.
    fn time(&self) -> f64;

    fn norm_sqr(&self) -> f64 {
        norm_sqr(self.amplitudes())
    }
}

pub(crate) fn norm_sqr(a: &Amps) -> f64 {
    a.iter().map(|c| c.norm_sqr()).sum()
}

/// State in the rotating frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotatingState {
    pub d: Amps,
    pub t: f64,
}

/// State in the lab frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabState {
    pub c: Amps,
    pub t: f64,
}

impl RotatingState {
    pub fn new(d: Amps, t: f64) -> Self {
        Self { d, t }
    }

    /// Unit amplitude on basis state `index` at `t = 0`.
    pub fn basis(index: usize) -> Self {
        let mut d = ZERO_AMPS;
        d[index] = Complex64::new(1.0, 0.0);
        Self { d, t: 0.0 }
    }
}

impl LabState {
    pub fn new(c: Amps, t: f64) -> Self {
        Self { c, t }
    }
}

impl Amplitudes for RotatingState {
    const FRAME: Frame = Frame::Rotating;

    fn amplitudes(&self) -> &Amps {
        &self.d
    }
    fn amplitudes_mut(&mut self) -> &mut Amps {
        &mut self.d
    }
    fn time(&self) -> f64 {
        self.t
    }
}

impl Amplitudes for LabState {
    const FRAME: Frame = Frame::Lab;

    fn amplitudes(&self) -> &Amps {
        &self.c
    }
    fn amplitudes_mut(&mut self) -> &mut Amps {
        &mut self.c
    }
    fn time(&self) -> f64 {
        self.t
    }
}
