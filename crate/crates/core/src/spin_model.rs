//! Static spectral structure of the three-spin chain.
//!
//! Frequencies are stored as linear frequencies (MHz); a stored value `f`
//! stands for the angular frequency `2πf` rad/µs. Energies are always `E/ħ`
//! in the same units, so ħ never appears.
//!
//! Basis states are labeled `|i₂i₁i₀⟩` with decimal index
//! `4·i₂ + 2·i₁ + i₀`. "Qubit j" always means bit `j` of that index, so qubit 0
//! is the least significant bit and is the CCN target.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

/// Number of basis states of the three-spin register.
pub const DIM: usize = 8;
/// Number of spins in the chain.
pub const QUBITS: usize = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("omega{index} must be positive (got {value})")]
    NonPositiveLarmor { index: usize, value: f64 },
    #[error("omega{a} and omega{b} must differ for the spins to be addressable (both {value})")]
    DegenerateLarmor { a: usize, b: usize, value: f64 },
    #[error("j must be positive (got {0})")]
    NonPositiveCoupling(f64),
    #[error("j_prime must be non-negative (got {0})")]
    NegativeSecondNeighbor(f64),
    #[error("rabi must be positive (got {0})")]
    NonPositiveRabi(f64),
    #[error("{name} must be finite (got {value})")]
    NotFinite { name: &'static str, value: f64 },
}

/// Physical parameters of the chain: Larmor frequencies, Ising couplings and
/// the Rabi frequency of the drive.
///
/// Fields are public so that limiting cases (zero drive, negative `j_prime`)
/// can be fed to the dynamics directly; [`ChainParams::validate`] checks the
/// physical invariants and is enforced by [`ChainParams::new`] and the config
/// parser.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainParams {
    /// Larmor frequencies `[ω₀, ω₁, ω₂]`.
    pub omega: [f64; QUBITS],
    /// First-neighbor coupling `J` (pairs 0-1 and 1-2).
    pub j: f64,
    /// Second-neighbor coupling `J′` (pair 0-2).
    pub j_prime: f64,
    /// Rabi frequency `Ω`.
    pub rabi: f64,
}

impl ChainParams {
    pub const DEFAULT_OMEGA: [f64; QUBITS] = [100.0, 200.0, 400.0];
    pub const DEFAULT_J: f64 = 5.0;
    pub const DEFAULT_RABI: f64 = 0.1;

    pub fn new(omega: [f64; QUBITS], j: f64, j_prime: f64, rabi: f64) -> Result<Self, ParamError> {
        let p = Self { omega, j, j_prime, rabi };
        p.validate()?;
        Ok(p)
    }

    /// The reference parameter set (`ω = 100, 200, 400`, `J = 5`, `Ω = 0.1`)
    /// with the given second-neighbor coupling.
    pub fn reference(j_prime: f64) -> Self {
        Self {
            omega: Self::DEFAULT_OMEGA,
            j: Self::DEFAULT_J,
            j_prime,
            rabi: Self::DEFAULT_RABI,
        }
    }

    pub fn with_j_prime(mut self, j_prime: f64) -> Self {
        self.j_prime = j_prime;
        self
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        let named = [
            ("omega0", self.omega[0]),
            ("omega1", self.omega[1]),
            ("omega2", self.omega[2]),
            ("j", self.j),
            ("j_prime", self.j_prime),
            ("rabi", self.rabi),
        ];
        for (name, value) in named {
            if !value.is_finite() {
                return Err(ParamError::NotFinite { name, value });
            }
        }
        for (index, &value) in self.omega.iter().enumerate() {
            if value <= 0.0 {
                return Err(ParamError::NonPositiveLarmor { index, value });
            }
        }
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            if self.omega[a] == self.omega[b] {
                return Err(ParamError::DegenerateLarmor { a, b, value: self.omega[a] });
            }
        }
        if self.j <= 0.0 {
            return Err(ParamError::NonPositiveCoupling(self.j));
        }
        if self.j_prime < 0.0 {
            return Err(ParamError::NegativeSecondNeighbor(self.j_prime));
        }
        if self.rabi <= 0.0 {
            return Err(ParamError::NonPositiveRabi(self.rabi));
        }
        Ok(())
    }
}

/// Decimal label of a basis state `|i₂i₁i₀⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisIndex(u8);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("basis index {0} is outside 0..=7")]
pub struct BasisIndexError(pub usize);

impl BasisIndex {
    pub fn new(value: usize) -> Result<Self, BasisIndexError> {
        if value < DIM {
            Ok(Self(value as u8))
        } else {
            Err(BasisIndexError(value))
        }
    }

    /// Index of the state with the given bits, most significant (`i₂`) first.
    pub fn from_bits(i2: bool, i1: bool, i0: bool) -> Self {
        Self((u8::from(i2) << 2) | (u8::from(i1) << 1) | u8::from(i0))
    }

    pub fn value(self) -> usize {
        self.0 as usize
    }

    /// `i_j`, the occupation of qubit `j`.
    pub fn bit(self, j: usize) -> u8 {
        debug_assert!(j < QUBITS);
        (self.0 >> j) & 1
    }

    /// `(−1)^{i_j}`.
    pub fn sign(self, j: usize) -> f64 {
        if self.bit(j) == 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn flip(self, j: usize) -> Self {
        debug_assert!(j < QUBITS);
        Self(self.0 ^ (1 << j))
    }

    pub fn hamming_distance(self, other: Self) -> u32 {
        (self.0 ^ other.0).count_ones()
    }

    /// The qubit in which `self` and `other` differ, if they differ in exactly one.
    pub fn flipped_qubit(self, other: Self) -> Option<usize> {
        let diff = self.0 ^ other.0;
        (diff.count_ones() == 1).then(|| diff.trailing_zeros() as usize)
    }

    pub fn all() -> impl Iterator<Item = Self> {
        (0..DIM as u8).map(Self)
    }
}

impl fmt::Display for BasisIndex {
    /// Formats as the bit string `i₂i₁i₀`, e.g. `110`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.bit(2), self.bit(1), self.bit(0))
    }
}

/// Eigenvalue `E_k/ħ` of the diagonal Hamiltonian.
pub fn energy(k: BasisIndex, p: &ChainParams) -> f64 {
    let s = |j| k.sign(j);
    -0.5 * (s(2) * p.omega[2]
        + s(1) * p.omega[1]
        + s(0) * p.omega[0]
        + p.j * (s(0) * s(1) + s(1) * s(2))
        + p.j_prime * s(0) * s(2))
}

/// Couplings of qubit `j` to its two partners, in a fixed order: the first
/// neighbor toward qubit 1 first, then the remaining one.
fn partners(j: usize, p: &ChainParams) -> [(usize, f64); 2] {
    match j {
        0 => [(1, p.j), (2, p.j_prime)],
        1 => [(0, p.j), (2, p.j)],
        _ => [(1, p.j), (0, p.j_prime)],
    }
}

/// `ω_mk = (E_m − E_k)/ħ`.
///
/// Single-flip pairs are evaluated in closed form,
/// `ω_j + Σ J_jn (−1)^{i_n}` with the sign of the lower state, so that
/// e.g. `ω(7,6) = ω₀ − J − J′` holds bit for bit and the `J′ = 0` degeneracy
/// of `(7,6)` and `(3,2)` is exact. Other pairs use the energy difference.
pub fn transition_frequency(m: BasisIndex, k: BasisIndex, p: &ChainParams) -> f64 {
    if m == k {
        return 0.0;
    }
    match m.flipped_qubit(k) {
        Some(j) => {
            let (upper, lower, sign) = if m.bit(j) == 1 { (m, k, 1.0) } else { (k, m, -1.0) };
            debug_assert_eq!(upper.bit(j), 1);
            let [(a, ja), (b, jb)] = partners(j, p);
            let f = p.omega[j] + ja * lower.sign(a) + jb * lower.sign(b);
            sign * f
        }
        None => energy(m, p) - energy(k, p),
    }
}

/// Drive frequency that makes `|110⟩ ↔ |111⟩` resonant: `ω₀ − J − J′`.
pub fn ccn_resonance(p: &ChainParams) -> f64 {
    p.omega[0] - p.j - p.j_prime
}

/// Detuning `Δ = (E_p − E_m)/ħ − ω` of the `|p⟩ ↔ |m⟩` transition from the drive.
pub fn detuning(p_state: BasisIndex, m_state: BasisIndex, pulse_freq: f64, p: &ChainParams) -> f64 {
    transition_frequency(p_state, m_state, p) - pulse_freq
}

/// Matrix element `W_mk/ħ` of the rf drive with zero phase. See
/// [`coupling_element_phased`].
pub fn coupling_element(m: BasisIndex, k: BasisIndex, t: f64, pulse_freq: f64, p: &ChainParams) -> Complex64 {
    coupling_element_phased(m, k, t, pulse_freq, 0.0, p)
}

/// Matrix element `W_mk/ħ` of a circularly polarized rf drive of frequency
/// `pulse_freq` and phase `phase` at time `t` (µs).
///
/// Nonzero only between states one spin flip apart. Absorption (`m` has the
/// flipped bit set) carries `−(Ω/2)·e^{−i(2πωt+φ)}`, emission the complex
/// conjugate, so a drive at `ω ≈ ω_mk` is resonant in the rotating frame.
pub fn coupling_element_phased(
    m: BasisIndex,
    k: BasisIndex,
    t: f64,
    pulse_freq: f64,
    phase: f64,
    p: &ChainParams,
) -> Complex64 {
    if m.hamming_distance(k) != 1 {
        return Complex64::new(0.0, 0.0);
    }
    let angle = TAU * pulse_freq * t + phase;
    let z = Complex64::from_polar(1.0, angle);
    let z = if m > k { z.conj() } else { z };
    -0.5 * p.rabi * z
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level {
    pub state: BasisIndex,
    pub energy: f64,
}

/// A single-flip transition `upper ↔ lower`, where `upper` has qubit `qubit` set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub upper: BasisIndex,
    pub lower: BasisIndex,
    pub qubit: usize,
    pub frequency: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    /// All eight levels, ascending in energy.
    pub levels: Vec<Level>,
    /// All twelve single-flip transitions, grouped by qubit and ascending in
    /// frequency within each group.
    pub transitions: Vec<Transition>,
}

pub fn spectrum_report(p: &ChainParams) -> SpectrumReport {
    let mut levels: Vec<Level> = BasisIndex::all()
        .map(|state| Level { state, energy: energy(state, p) })
        .collect();
    levels.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.state.cmp(&b.state)));

    let mut transitions: Vec<Transition> = (0..QUBITS)
        .flat_map(|qubit| {
            BasisIndex::all().filter(move |s| s.bit(qubit) == 0).map(move |lower| {
                let upper = lower.flip(qubit);
                Transition { upper, lower, qubit, frequency: transition_frequency(upper, lower, p) }
            })
        })
        .collect();
    transitions.sort_by(|a, b| {
        a.qubit
            .cmp(&b.qubit)
            .then(a.frequency.total_cmp(&b.frequency))
            .then(a.lower.cmp(&b.lower))
    });

    SpectrumReport { levels, transitions }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn idx(v: usize) -> BasisIndex {
        BasisIndex::new(v).unwrap()
    }

    #[test]
    fn reference_energies() {
        let p = ChainParams::reference(0.1);
        assert_relative_eq!(energy(idx(0), &p), -355.05, max_relative = 1e-12);
        assert_relative_eq!(energy(idx(6), &p), 250.05, max_relative = 1e-12);
        assert_relative_eq!(energy(idx(7), &p), 344.95, max_relative = 1e-12);
    }

    #[test]
    fn reference_transitions() {
        let p = ChainParams::reference(0.1);
        assert_relative_eq!(transition_frequency(idx(7), idx(6), &p), 94.9, max_relative = 1e-12);
        assert_relative_eq!(transition_frequency(idx(3), idx(2), &p), 95.1, max_relative = 1e-12);
        assert_eq!(transition_frequency(idx(5), idx(5), &p), 0.0);
    }

    #[test]
    fn resonance_and_degeneracy() {
        let p = ChainParams::reference(0.1);
        assert_relative_eq!(ccn_resonance(&p), 94.9, max_relative = 1e-12);

        let p0 = ChainParams::reference(0.0);
        assert_eq!(ccn_resonance(&p0), 95.0);
        assert_eq!(ccn_resonance(&p0), transition_frequency(idx(3), idx(2), &p0));

        let free = ChainParams { j: 0.0, j_prime: 0.0, ..p };
        assert_eq!(ccn_resonance(&free), free.omega[0]);
    }

    #[test]
    fn detuning_examples() {
        let p = ChainParams::reference(0.1);
        let w = ccn_resonance(&p);
        assert_eq!(detuning(idx(7), idx(6), w, &p), 0.0);
        assert_relative_eq!(detuning(idx(3), idx(2), w, &p), 0.2, max_relative = 1e-9);

        let p0 = ChainParams::reference(0.0);
        assert_eq!(detuning(idx(3), idx(2), ccn_resonance(&p0), &p0), 0.0);
    }

    #[test]
    fn coupling_examples() {
        let p = ChainParams::reference(0.1);
        let w = ccn_resonance(&p);
        let c10 = coupling_element(idx(1), idx(0), 0.0, w, &p);
        assert_eq!(c10, Complex64::new(-0.05, 0.0));
        assert_eq!(coupling_element(idx(0), idx(3), 1.234, w, &p), Complex64::new(0.0, 0.0));
        assert_eq!(coupling_element(idx(0), idx(1), 0.0, w, &p), c10.conj());
    }

    #[test]
    fn coupling_zero_pattern_has_24_entries() {
        let p = ChainParams::reference(0.1);
        let nonzero = BasisIndex::all()
            .flat_map(|m| BasisIndex::all().map(move |k| (m, k)))
            .filter(|&(m, k)| coupling_element(m, k, 0.37, 94.9, &p).norm() > 0.0)
            .count();
        assert_eq!(nonzero, 24);
    }

    #[test]
    fn spectrum_report_reference() {
        let p = ChainParams::reference(0.1);
        let r = spectrum_report(&p);
        assert_eq!(r.levels.len(), 8);
        assert_eq!(r.transitions.len(), 12);
        assert_relative_eq!(r.levels[0].energy, -355.05, max_relative = 1e-12);
        assert_relative_eq!(r.levels[7].energy, 344.95, max_relative = 1e-12);

        let q0: Vec<f64> = r.transitions.iter().filter(|t| t.qubit == 0).map(|t| t.frequency).collect();
        let expected = [94.9, 95.1, 104.9, 105.1];
        assert_eq!(q0.len(), 4);
        for (got, want) in q0.iter().zip(expected) {
            assert_relative_eq!(*got, want, max_relative = 1e-12);
        }
    }

    #[test]
    fn spectrum_uncoupled_limit() {
        let p = ChainParams { j: 0.0, j_prime: 0.0, ..ChainParams::reference(0.0) };
        for t in spectrum_report(&p).transitions {
            assert_eq!(t.frequency, p.omega[t.qubit]);
        }
    }

    #[test]
    fn bit_zero_is_parity() {
        for k in BasisIndex::all() {
            assert_eq!(k.bit(0) as usize, k.value() % 2);
        }
        assert_eq!(BasisIndex::from_bits(true, true, false), idx(6));
        assert_eq!(idx(6).to_string(), "110");
        assert!(BasisIndex::new(8).is_err());
    }

    #[test]
    fn validation() {
        assert!(ChainParams::reference(0.1).validate().is_ok());
        assert!(matches!(
            ChainParams::reference(-1.0).validate(),
            Err(ParamError::NegativeSecondNeighbor(_))
        ));
        let mut p = ChainParams::reference(0.1);
        p.omega[2] = 100.0;
        assert!(matches!(p.validate(), Err(ParamError::DegenerateLarmor { a: 0, b: 2, .. })));
        p = ChainParams::reference(0.1);
        p.rabi = 0.0;
        assert!(matches!(p.validate(), Err(ParamError::NonPositiveRabi(_))));
    }

    fn params() -> impl Strategy<Value = ChainParams> {
        (1.0..500.0f64, 1.0..500.0f64, 1.0..500.0f64, 0.01..20.0f64, 0.0..2.0f64, 0.001..1.0f64)
            .prop_map(|(w0, w1, w2, j, jp, rabi)| ChainParams { omega: [w0, w1, w2], j, j_prime: jp, rabi })
    }

    proptest! {
        #[test]
        fn energies_sum_to_zero(p in params()) {
            let sum: f64 = BasisIndex::all().map(|k| energy(k, &p)).sum();
            let scale: f64 = BasisIndex::all().map(|k| energy(k, &p).abs()).sum();
            prop_assert!(sum.abs() <= 1e-13 * scale);
        }

        #[test]
        fn transition_antisymmetric_and_matches_energies(p in params(), m in 0usize..8, k in 0usize..8) {
            let (m, k) = (idx(m), idx(k));
            let f = transition_frequency(m, k, &p);
            prop_assert_eq!(f, -transition_frequency(k, m, &p));
            let diff = energy(m, &p) - energy(k, &p);
            prop_assert!((f - diff).abs() <= 1e-12 * (1.0 + energy(m, &p).abs() + energy(k, &p).abs()));
        }

        #[test]
        fn resonance_is_the_ccn_transition(p in params()) {
            prop_assert_eq!(ccn_resonance(&p), transition_frequency(idx(7), idx(6), &p));
        }

        #[test]
        fn degenerate_without_second_neighbor(p in params()) {
            let p = p.with_j_prime(0.0);
            prop_assert_eq!(transition_frequency(idx(7), idx(6), &p), transition_frequency(idx(3), idx(2), &p));
        }

        #[test]
        fn coupling_is_hermitian(p in params(), m in 0usize..8, k in 0usize..8, t in 0.0..10.0f64, w in 1.0..200.0f64) {
            let (m, k) = (idx(m), idx(k));
            let a = coupling_element(m, k, t, w, &p);
            let b = coupling_element(k, m, t, w, &p);
            prop_assert_eq!(a, b.conj());
            prop_assert_eq!(a.norm() > 0.0, m.hamming_distance(k) == 1);
        }
    }
}
