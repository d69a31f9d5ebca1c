//! Run configuration: a line-oriented `key = value` file with `#` comments.
//!
//! ```text
//! # reference chain, second-neighbor coupling 0.1
//! j_prime = 0.1
//! initial = superposition
//! ```
//!
//! Missing keys take the reference values (`omega0 = 100`, `omega1 = 200`,
//! `omega2 = 400`, `j = 5`, `rabi = 0.1`, `initial = 110`, `dt = 1e-6`,
//! `stride = 1000`, `out_prefix = ccn`); `j_prime` is required.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

use crate::dynamics::IntegratorConfig;
use crate::scenarios::initial_superposition;
use crate::spin_model::{BasisIndex, ChainParams, ParamError, DIM};
use crate::state::{norm_sqr, Amps, RotatingState, ZERO_AMPS};

/// Accepted deviation of explicit amplitudes' `|ψ|²` from one.
pub const AMPLITUDE_NORM_TOLERANCE: f64 = 1e-6;

pub const KEYS: [&str; 12] = [
    "omega0",
    "omega1",
    "omega2",
    "j",
    "j_prime",
    "rabi",
    "initial",
    "pulse_frequency",
    "duration",
    "dt",
    "stride",
    "out_prefix",
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: cannot parse `{value}` as {expected} for `{key}`")]
    Malformed { line: usize, key: String, value: String, expected: &'static str },
    #[error("missing required key `j_prime`")]
    MissingJPrime,
    #[error("line {line}: `{key}` violates invariant: {reason}")]
    Invariant { line: usize, key: String, reason: String },
}

/// How the register is prepared at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Digital(BasisIndex),
    Superposition,
    Amplitudes(Amps),
}

impl InitialState {
    pub fn state(&self) -> RotatingState {
        match self {
            Self::Digital(k) => RotatingState::basis(k.value()),
            Self::Superposition => initial_superposition(),
            Self::Amplitudes(a) => RotatingState::new(*a, 0.0),
        }
    }

    fn render(&self) -> String {
        match self {
            Self::Digital(k) => k.to_string(),
            Self::Superposition => "superposition".to_owned(),
            Self::Amplitudes(a) => a.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" "),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ChainParams,
    pub initial: InitialState,
    /// Overrides the CCN resonance for `run`.
    pub pulse_frequency: Option<f64>,
    /// Overrides the π-pulse duration for `run`.
    pub duration: Option<f64>,
    pub dt: f64,
    pub stride: usize,
    pub out_prefix: String,
}

impl RunConfig {
    /// Reference configuration with the given `j_prime`.
    pub fn reference(j_prime: f64) -> Self {
        Self {
            params: ChainParams::reference(j_prime),
            initial: InitialState::Digital(BasisIndex::from_bits(true, true, false)),
            pulse_frequency: None,
            duration: None,
            dt: IntegratorConfig::DEFAULT_DT,
            stride: IntegratorConfig::DEFAULT_STRIDE,
            out_prefix: "ccn".to_owned(),
        }
    }

    pub fn integrator(&self) -> IntegratorConfig {
        IntegratorConfig { dt: self.dt, sample_stride: self.stride, ..IntegratorConfig::default() }
    }

    /// Non-fatal remarks about physically unusual but valid settings.
    pub fn warnings(&self) -> Vec<String> {
        let p = &self.params;
        let mut out = Vec::new();
        if p.j_prime < 0.0 {
            out.push(format!("j_prime = {} is negative", p.j_prime));
        }
        if p.j_prime > p.j / 10.0 {
            out.push(format!(
                "j_prime = {} exceeds j/10 = {}; second-neighbor coupling is expected to be at least an order of magnitude weaker",
                p.j_prime,
                p.j / 10.0
            ));
        }
        out
    }

    /// Renders every key so that [`parse_config`] reproduces `self`.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let p = &self.params;
        for (key, v) in [
            ("omega0", p.omega[0]),
            ("omega1", p.omega[1]),
            ("omega2", p.omega[2]),
            ("j", p.j),
            ("j_prime", p.j_prime),
            ("rabi", p.rabi),
        ] {
            writeln!(s, "{key} = {v}").unwrap();
        }
        writeln!(s, "initial = {}", self.initial.render()).unwrap();
        if let Some(f) = self.pulse_frequency {
            writeln!(s, "pulse_frequency = {f}").unwrap();
        }
        if let Some(d) = self.duration {
            writeln!(s, "duration = {d}").unwrap();
        }
        writeln!(s, "dt = {}", self.dt).unwrap();
        writeln!(s, "stride = {}", self.stride).unwrap();
        writeln!(s, "out_prefix = {}", self.out_prefix).unwrap();
        s
    }
}

fn malformed(line: usize, key: &str, value: &str, expected: &'static str) -> ConfigError {
    ConfigError::Malformed { line, key: key.to_owned(), value: value.to_owned(), expected }
}

fn parse_f64(line: usize, key: &str, value: &str) -> Result<f64, ConfigError> {
    value.parse::<f64>().map_err(|_| malformed(line, key, value, "a number"))
}

fn parse_initial(line: usize, value: &str) -> Result<InitialState, ConfigError> {
    if value == "superposition" {
        return Ok(InitialState::Superposition);
    }
    if value.len() == 3 && value.bytes().all(|b| b == b'0' || b == b'1') {
        let bit = |i: usize| value.as_bytes()[i] == b'1';
        return Ok(InitialState::Digital(BasisIndex::from_bits(bit(0), bit(1), bit(2))));
    }
    let parts: Vec<&str> = value.split_whitespace().collect();
    if parts.len() != DIM {
        return Err(malformed(line, "initial", value, "a 3-bit string, `superposition`, or 8 complex amplitudes"));
    }
    let mut amps = ZERO_AMPS;
    for (slot, part) in amps.iter_mut().zip(parts) {
        *slot = Complex64::from_str(part).map_err(|_| malformed(line, "initial", part, "a complex number"))?;
    }
    Ok(InitialState::Amplitudes(amps))
}

fn invariant(line: usize, key: impl Into<String>, reason: impl ToString) -> ConfigError {
    ConfigError::Invariant { line, key: key.into(), reason: reason.to_string() }
}

/// Parses a configuration file.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::reference(0.0);
    let mut seen: HashMap<&'static str, usize> = HashMap::new();
    let mut have_j_prime = false;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or(ConfigError::Syntax { line })?;
        let (key, value) = (key.trim(), value.trim());
        let key: &'static str = KEYS
            .iter()
            .find(|k| **k == key)
            .ok_or_else(|| ConfigError::UnknownKey { line, key: key.to_owned() })?;
        if seen.insert(key, line).is_some() {
            return Err(ConfigError::DuplicateKey { line, key: key.to_owned() });
        }
        match key {
            "omega0" => cfg.params.omega[0] = parse_f64(line, key, value)?,
            "omega1" => cfg.params.omega[1] = parse_f64(line, key, value)?,
            "omega2" => cfg.params.omega[2] = parse_f64(line, key, value)?,
            "j" => cfg.params.j = parse_f64(line, key, value)?,
            "j_prime" => {
                cfg.params.j_prime = parse_f64(line, key, value)?;
                have_j_prime = true;
            }
            "rabi" => cfg.params.rabi = parse_f64(line, key, value)?,
            "initial" => cfg.initial = parse_initial(line, value)?,
            "pulse_frequency" => cfg.pulse_frequency = Some(parse_f64(line, key, value)?),
            "duration" => cfg.duration = Some(parse_f64(line, key, value)?),
            "dt" => cfg.dt = parse_f64(line, key, value)?,
            "stride" => {
                cfg.stride = value.parse().map_err(|_| malformed(line, key, value, "a non-negative integer"))?
            }
            "out_prefix" => {
                if value.is_empty() {
                    return Err(invariant(line, key, "must not be empty"));
                }
                cfg.out_prefix = value.to_owned();
            }
            _ => unreachable!("key list and match arms out of sync"),
        }
    }

    if !have_j_prime {
        return Err(ConfigError::MissingJPrime);
    }
    validate(&cfg, &seen)?;
    Ok(cfg)
}

fn validate(cfg: &RunConfig, seen: &HashMap<&'static str, usize>) -> Result<(), ConfigError> {
    let line_of = |key: &str| seen.get(key).copied().unwrap_or(0);

    if let Err(e) = cfg.params.validate() {
        let key = match &e {
            ParamError::NonPositiveLarmor { index, .. } => format!("omega{index}"),
            ParamError::DegenerateLarmor { a, b, .. } => {
                let (ka, kb) = (format!("omega{a}"), format!("omega{b}"));
                if line_of(&ka) >= line_of(&kb) {
                    ka
                } else {
                    kb
                }
            }
            ParamError::NonPositiveCoupling(_) => "j".to_owned(),
            ParamError::NegativeSecondNeighbor(_) => "j_prime".to_owned(),
            ParamError::NonPositiveRabi(_) => "rabi".to_owned(),
            ParamError::NotFinite { name, .. } => (*name).to_owned(),
        };
        return Err(invariant(line_of(&key), key, e));
    }
    if let Some(f) = cfg.pulse_frequency {
        if !(f.is_finite() && f > 0.0) {
            return Err(invariant(line_of("pulse_frequency"), "pulse_frequency", "must be positive"));
        }
    }
    if let Some(d) = cfg.duration {
        if !(d.is_finite() && d > 0.0) {
            return Err(invariant(line_of("duration"), "duration", "must be positive"));
        }
    }
    if !(cfg.dt.is_finite() && cfg.dt > 0.0) {
        return Err(invariant(line_of("dt"), "dt", "must be positive"));
    }
    if cfg.stride == 0 {
        return Err(invariant(line_of("stride"), "stride", "must be at least 1"));
    }
    if let InitialState::Amplitudes(a) = &cfg.initial {
        let n = norm_sqr(a);
        if n.is_nan() || (n - 1.0).abs() > AMPLITUDE_NORM_TOLERANCE {
            return Err(invariant(line_of("initial"), "initial", format!("amplitudes are not normalized (|psi|^2 = {n})")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn defaults_with_j_prime() {
        let cfg = parse_config("j_prime = 0.1\n").unwrap();
        assert_eq!(cfg.params, ChainParams::reference(0.1));
        assert_eq!(cfg, RunConfig::reference(0.1));
    }

    #[test]
    fn initial_selectors() {
        let cfg = parse_config("j_prime = 0.1\ninitial = 110").unwrap();
        assert_eq!(cfg.initial.state(), RotatingState::basis(6));
        let cfg = parse_config("j_prime = 0.1\ninitial = 001").unwrap();
        assert_eq!(cfg.initial.state(), RotatingState::basis(1));
        let cfg = parse_config("j_prime = 0.1\ninitial = superposition").unwrap();
        assert_eq!(cfg.initial, InitialState::Superposition);
        let cfg = parse_config("j_prime = 0.1\ninitial = 0 0 0 0 0 0 0.6 0.8i").unwrap();
        assert_eq!(cfg.initial.state().d[7], Complex64::new(0.0, 0.8));
    }

    #[test]
    fn comments_and_whitespace() {
        let text = "# header\n\n  j_prime=0.02   # trailing\nrabi = 0.2\n";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.params.j_prime, 0.02);
        assert_eq!(cfg.params.rabi, 0.2);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_config("j_prime = -1").unwrap_err();
        assert!(matches!(&err, ConfigError::Invariant { line: 1, key, .. } if key == "j_prime"));
        assert!(err.to_string().contains("non-negative"));

        assert_eq!(
            parse_config("j_prime = 0.1\nomgea0 = 3").unwrap_err(),
            ConfigError::UnknownKey { line: 2, key: "omgea0".into() }
        );
        assert!(matches!(parse_config("\nj_prime = abc"), Err(ConfigError::Malformed { line: 2, .. })));
        assert_eq!(parse_config("j_prime 0.1"), Err(ConfigError::Syntax { line: 1 }));
        assert_eq!(parse_config("rabi = 0.1"), Err(ConfigError::MissingJPrime));
        assert!(matches!(parse_config("j_prime = 0.1\nj_prime = 0.2"), Err(ConfigError::DuplicateKey { line: 2, .. })));
        assert!(matches!(
            parse_config("j_prime = 0.1\n\nomega2 = 200"),
            Err(ConfigError::Invariant { line: 3, ref key, .. }) if key == "omega2"
        ));
        assert!(matches!(parse_config("j_prime = 0.1\nstride = 0"), Err(ConfigError::Invariant { line: 2, .. })));
        assert!(matches!(parse_config("j_prime = 0.1\ndt = 0"), Err(ConfigError::Invariant { line: 2, .. })));
        assert!(matches!(
            parse_config("j_prime = 0.1\ninitial = 1 0 0 0 0 0 0 1"),
            Err(ConfigError::Invariant { line: 2, .. })
        ));
        assert!(matches!(parse_config("j_prime = 0.1\ninitial = 12"), Err(ConfigError::Malformed { line: 2, .. })));
        assert!(matches!(parse_config("j_prime = inf"), Err(ConfigError::Invariant { line: 1, .. })));
    }

    #[test]
    fn warns_on_strong_second_neighbor() {
        assert!(RunConfig::reference(0.1).warnings().is_empty());
        assert_eq!(RunConfig::reference(0.6).warnings().len(), 1);
    }

    fn arb_config() -> impl Strategy<Value = RunConfig> {
        let amps = proptest::array::uniform8((-1.0..1.0f64, -1.0..1.0f64)).prop_filter_map("zero", |a| {
            let v = a.map(|(re, im)| Complex64::new(re, im));
            let n = norm_sqr(&v).sqrt();
            (n > 1e-3).then(|| v.map(|c| c / n))
        });
        let initial = prop_oneof![
            (0usize..8).prop_map(|k| InitialState::Digital(BasisIndex::new(k).unwrap())),
            Just(InitialState::Superposition),
            amps.prop_map(InitialState::Amplitudes),
        ];
        (
            (50.0..150.0f64, 150.0..300.0f64, 300.0..500.0f64, 0.1..10.0f64, 0.0..1.0f64, 0.001..1.0f64),
            initial,
            proptest::option::of(1.0..200.0f64),
            proptest::option::of(0.1..10.0f64),
            1e-8..1e-3f64,
            1usize..10_000,
            "[a-z][a-z0-9_/]{0,12}",
        )
            .prop_map(|((w0, w1, w2, j, jp, rabi), initial, pulse_frequency, duration, dt, stride, out_prefix)| RunConfig {
                params: ChainParams { omega: [w0, w1, w2], j, j_prime: jp, rabi },
                initial,
                pulse_frequency,
                duration,
                dt,
                stride,
                out_prefix,
            })
    }

    proptest! {
        #[test]
        fn render_round_trips(cfg in arb_config()) {
            prop_assert_eq!(parse_config(&cfg.render()).unwrap(), cfg);
        }
    }
}
