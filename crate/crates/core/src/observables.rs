//! Quantities derived from register amplitudes: populations, spin
//! expectation values, gate fidelity and the reference gates.

use num_complex::Complex64;
use thiserror::Error;

use crate::spin_model::{BasisIndex, DIM, QUBITS};
use crate::state::{Amplitudes, LabState};

/// Maximum deviation of `|ψ|²` from one accepted by [`fidelity`].
pub const FIDELITY_NORM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ObservableError {
    #[error("{which} state is not normalized: |psi|^2 = {norm_sqr}")]
    NotNormalized { which: &'static str, norm_sqr: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinExpectations {
    /// `⟨I_j^z⟩` for qubits 0, 1, 2.
    pub iz: [f64; QUBITS],
    /// `⟨I_j^x⟩`.
    pub ix: [f64; QUBITS],
    /// `⟨I_j^y⟩`.
    pub iy: [f64; QUBITS],
}

impl SpinExpectations {
    pub fn of(s: &LabState) -> Self {
        let (ix, iy) = transverse_expectations(s);
        Self { iz: longitudinal_expectations(s), ix, iy }
    }
}

/// Complex overlap `⟨ψ_expected|ψ⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateFidelity {
    pub value: Complex64,
}

impl GateFidelity {
    pub fn modulus(&self) -> f64 {
        self.value.norm()
    }
}

/// `|a_k|²` for every basis state. Identical in both frames.
pub fn probabilities<S: Amplitudes>(s: &S) -> [f64; DIM] {
    s.amplitudes().map(|a| a.norm_sqr())
}

/// `⟨I_j^z⟩ = ½ Σ_k (−1)^{i_j(k)} |a_k|²`: `+½` when qubit `j` is in `|0⟩`.
pub fn longitudinal_expectations<S: Amplitudes>(s: &S) -> [f64; QUBITS] {
    let probs = probabilities(s);
    let mut iz = [0.0; QUBITS];
    for (j, out) in iz.iter_mut().enumerate() {
        *out = 0.5 * BasisIndex::all().map(|k| k.sign(j) * probs[k.value()]).sum::<f64>();
    }
    iz
}

/// Transverse spin components `(⟨I^x⟩, ⟨I^y⟩)` per qubit: the real and
/// imaginary parts of `Σ C*_{k+2^j} C_k` over states `k` with qubit `j` clear.
///
/// Only meaningful in the lab frame, where the coherences carry the fast
/// precession phases.
pub fn transverse_expectations(s: &LabState) -> ([f64; QUBITS], [f64; QUBITS]) {
    let c = &s.c;
    let mut ix = [0.0; QUBITS];
    let mut iy = [0.0; QUBITS];
    for j in 0..QUBITS {
        let sum: Complex64 = BasisIndex::all()
            .filter(|k| k.bit(j) == 0)
            .map(|k| c[k.flip(j).value()].conj() * c[k.value()])
            .sum();
        ix[j] = sum.re;
        iy[j] = sum.im;
    }
    (ix, iy)
}

/// `F = ⟨expected|actual⟩`. Both states must be in the same frame, which the
/// shared type parameter enforces.
pub fn fidelity<S: Amplitudes>(expected: &S, actual: &S) -> Result<GateFidelity, ObservableError> {
    for (which, s) in [("expected", expected), ("actual", actual)] {
        let norm_sqr = s.norm_sqr();
        if norm_sqr.is_nan() || (norm_sqr - 1.0).abs() > FIDELITY_NORM_TOLERANCE {
            return Err(ObservableError::NotNormalized { which, norm_sqr });
        }
    }
    let value = expected
        .amplitudes()
        .iter()
        .zip(actual.amplitudes())
        .map(|(e, a)| e.conj() * a)
        .sum();
    Ok(GateFidelity { value })
}

/// Ideal single-pulse CCN: identity on `|000⟩..|101⟩`, and
/// `|110⟩ → i|111⟩`, `|111⟩ → i|110⟩`.
pub fn apply_ideal_ccn<S: Amplitudes + Clone>(s: &S) -> S {
    let mut out = s.clone();
    let a = out.amplitudes_mut();
    let i = Complex64::i();
    let (a6, a7) = (a[6], a[7]);
    a[6] = i * a7;
    a[7] = i * a6;
    out
}

/// Classical Toffoli: `(a, b, c) → (a, b, c ⊕ (a·b))`.
pub fn classical_ccn(a: bool, b: bool, c: bool) -> (bool, bool, bool) {
    (a, b, c ^ (a & b))
}

/// Classical controlled-not: `(a, b) → (a, b ⊕ a)`.
pub fn classical_cn(a: bool, b: bool) -> (bool, bool) {
    (a, b ^ a)
}
