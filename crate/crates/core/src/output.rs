//! CSV tables and the three command workflows.
//!
//! Every file starts with `#` comment lines holding the tool version, the
//! command and the full rendered configuration; the rest is plain CSV. All
//! floating-point values are written as `{:.16e}` (17 significant digits), so
//! identical inputs produce byte-identical files.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::config::RunConfig;
use crate::dynamics::PulseSpec;
use crate::scenarios::{ccn_pulse, run_experiment, sweep_jprime, ExperimentResult, ScenarioError, SweepResult};
use crate::spin_model::{spectrum_report, SpectrumReport};

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

pub const LEVELS_HEADER: &str = "state_bits,energy";
pub const TRANSITIONS_HEADER: &str = "m_bits,k_bits,qubit,frequency";
pub const SWEEP_HEADER: &str = "j_prime,j_ratio,p2,p3,p6,p7,re_f,im_f,abs_f";
pub const SUMMARY_HEADER: &str = "re_f,im_f,abs_f";

pub fn timeseries_header() -> String {
    let mut cols = vec!["t".to_owned()];
    cols.extend((0..8).map(|k| format!("re_d{k}")));
    cols.extend((0..8).map(|k| format!("im_d{k}")));
    cols.extend((0..8).map(|k| format!("p{k}")));
    cols.extend(["iz0", "iz1", "iz2", "ix0", "iy0", "ix1", "iy1", "ix2", "iy2", "norm_err"].map(String::from));
    cols.join(",")
}

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("cannot write {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn provenance<W: Write>(w: &mut W, command: &str, cfg: &RunConfig) -> io::Result<()> {
    writeln!(w, "# {TOOL_VERSION}")?;
    writeln!(w, "# command: {command}")?;
    for line in cfg.render().lines() {
        writeln!(w, "# {line}")?;
    }
    Ok(())
}

pub fn write_spectrum<W: Write>(w: &mut W, report: &SpectrumReport) -> io::Result<()> {
    writeln!(w, "{LEVELS_HEADER}")?;
    for level in &report.levels {
        writeln!(w, "{},{}", level.state, num(level.energy))?;
    }
    writeln!(w)?;
    writeln!(w, "{TRANSITIONS_HEADER}")?;
    for t in &report.transitions {
        writeln!(w, "{},{},{},{}", t.upper, t.lower, t.qubit, num(t.frequency))?;
    }
    Ok(())
}

pub fn write_timeseries<W: Write>(w: &mut W, result: &ExperimentResult) -> io::Result<()> {
    writeln!(w, "{}", timeseries_header())?;
    for (state, obs) in result.trajectory.samples.iter().zip(&result.observables) {
        let mut row = vec![num(state.t)];
        row.extend(state.d.iter().map(|a| num(a.re)));
        row.extend(state.d.iter().map(|a| num(a.im)));
        row.extend(obs.probabilities.iter().map(|&p| num(p)));
        row.extend(obs.spins.iz.iter().map(|&v| num(v)));
        for j in 0..3 {
            row.push(num(obs.spins.ix[j]));
            row.push(num(obs.spins.iy[j]));
        }
        row.push(num(obs.norm_error));
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn write_summary<W: Write>(w: &mut W, result: &ExperimentResult) -> io::Result<()> {
    let f = result.fidelity;
    writeln!(w, "{SUMMARY_HEADER}")?;
    writeln!(w, "{},{},{}", num(f.value.re), num(f.value.im), num(f.modulus()))
}

pub fn write_sweep<W: Write>(w: &mut W, sweep: &SweepResult) -> io::Result<()> {
    writeln!(w, "{SWEEP_HEADER}")?;
    for r in &sweep.records {
        let p = &r.probabilities;
        let cols = [
            r.j_prime,
            r.j_ratio,
            p[2],
            p[3],
            p[6],
            p[7],
            r.fidelity.value.re,
            r.fidelity.value.im,
            r.fidelity.modulus(),
        ];
        writeln!(w, "{}", cols.map(num).join(","))?;
    }
    Ok(())
}

/// `<prefix><suffix>`, e.g. `out/ccn_sweep.csv`.
pub fn output_path(cfg: &RunConfig, suffix: &str) -> PathBuf {
    PathBuf::from(format!("{}{suffix}", cfg.out_prefix))
}

fn write_file(
    path: &Path,
    command: &str,
    cfg: &RunConfig,
    body: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>,
) -> Result<(), OutputError> {
    let io_err = |source| OutputError::Io { path: path.to_owned(), source };
    let file = File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    provenance(&mut w, command, cfg).map_err(io_err)?;
    body(&mut w).map_err(io_err)?;
    w.flush().map_err(io_err)
}

/// Writes `<prefix>_spectrum.csv` and returns its path.
pub fn cmd_spectrum(cfg: &RunConfig) -> Result<PathBuf, OutputError> {
    let report = spectrum_report(&cfg.params);
    let path = output_path(cfg, "_spectrum.csv");
    write_file(&path, "spectrum", cfg, |w| write_spectrum(w, &report))?;
    Ok(path)
}

/// Pulse used by `run`: the CCN π-pulse, with the config's overrides applied.
pub fn run_pulse(cfg: &RunConfig) -> Result<PulseSpec, ScenarioError> {
    let mut pulse = ccn_pulse(&cfg.params)?;
    if let Some(f) = cfg.pulse_frequency {
        pulse.frequency = f;
    }
    if let Some(d) = cfg.duration {
        pulse.duration = d;
    }
    pulse.validate()?;
    Ok(pulse)
}

#[derive(Debug)]
pub struct RunOutput {
    pub result: ExperimentResult,
    pub timeseries: PathBuf,
    pub summary: PathBuf,
}

/// Runs one experiment and writes `<prefix>_timeseries.csv` and
/// `<prefix>_summary.csv`.
pub fn cmd_run(cfg: &RunConfig) -> Result<RunOutput, OutputError> {
    let pulse = run_pulse(cfg)?;
    let result = run_experiment(&cfg.params, &pulse, &cfg.initial.state(), &cfg.integrator())?;
    let timeseries = output_path(cfg, "_timeseries.csv");
    let summary = output_path(cfg, "_summary.csv");
    write_file(&timeseries, "run", cfg, |w| write_timeseries(w, &result))?;
    write_file(&summary, "run", cfg, |w| write_summary(w, &result))?;
    Ok(RunOutput { result, timeseries, summary })
}

#[derive(Debug)]
pub struct SweepOutput {
    pub sweep: SweepResult,
    pub path: PathBuf,
}

/// Runs the `J′` sweep and writes `<prefix>_sweep.csv`. The config's
/// `j_prime` is replaced by each value in turn; pulse overrides are ignored.
pub fn cmd_sweep(cfg: &RunConfig, j_primes: &[f64]) -> Result<SweepOutput, OutputError> {
    let sweep = sweep_jprime(&cfg.params, j_primes, &cfg.initial.state(), &cfg.integrator())?;
    let path = output_path(cfg, "_sweep.csv");
    let list = j_primes.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
    write_file(&path, &format!("sweep --jprimes {list}"), cfg, |w| write_sweep(w, &sweep))?;
    Ok(SweepOutput { sweep, path })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin_model::ChainParams;

    #[test]
    fn timeseries_header_has_fixed_columns() {
        let h = timeseries_header();
        assert_eq!(h.split(',').count(), 1 + 8 + 8 + 8 + 3 + 6 + 1);
        assert!(h.starts_with("t,re_d0,re_d1"));
        assert!(h.ends_with("ix2,iy2,norm_err"));
    }

    #[test]
    fn spectrum_table() {
        let mut buf = Vec::new();
        write_spectrum(&mut buf, &spectrum_report(&ChainParams::reference(0.1))).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], LEVELS_HEADER);
        assert_eq!(lines.len(), 1 + 8 + 1 + 1 + 12);
        let value = |line: &str| line.rsplit(',').next().unwrap().parse::<f64>().unwrap();
        assert!(lines[1].starts_with("000,"));
        assert!((value(lines[1]) + 355.05).abs() < 1e-12);
        assert!(lines[8].starts_with("111,"));
        assert!((value(lines[8]) - 344.95).abs() < 1e-12);
        assert_eq!(lines[10], TRANSITIONS_HEADER);
        assert!(lines[11].starts_with("111,110,0,"));
        assert!((value(lines[11]) - 94.9).abs() < 1e-12);
    }

    #[test]
    fn numbers_keep_seventeen_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(-355.05).parse::<f64>().unwrap(), -355.05);
    }

    #[test]
    fn run_overrides() {
        let mut cfg = RunConfig::reference(0.1);
        assert_eq!(run_pulse(&cfg).unwrap().duration, 5.0);
        cfg.pulse_frequency = Some(95.1);
        cfg.duration = Some(1.5);
        let pulse = run_pulse(&cfg).unwrap();
        assert_eq!((pulse.frequency, pulse.duration), (95.1, 1.5));
    }
}
