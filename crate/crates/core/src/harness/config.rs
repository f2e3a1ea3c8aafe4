use std::path::{Path, PathBuf};

use toml::{Table, Value};

use crate::qgated::DecoderConfig;
use crate::{Error, Result};

/// Sweep parameters. Config files are flat TOML tables keyed by the CLI flag
/// names (`snr-db`, `noise-p`, `max-fbs-blocks`, ...); list values may be TOML
/// arrays or comma-separated strings.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub n: usize,
    pub k: usize,
    pub snr_db: Vec<f64>,
    pub noise_p: Vec<f64>,
    pub problems: u64,
    /// Noise in `decoder.noise` is ignored; each grid point sets its own.
    pub decoder: DecoderConfig,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub log_problems: Option<PathBuf>,
    pub workers: usize,
    /// Write measured wall time into the CSV instead of 0.
    pub timing: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            n: 8,
            k: 4,
            snr_db: vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0],
            noise_p: vec![0.0],
            problems: 1000,
            decoder: DecoderConfig::default(),
            seed: 0,
            out: None,
            log_problems: None,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            timing: false,
        }
    }
}

fn bad(key: &str, v: &Value) -> Error {
    Error::Config(format!("bad value for `{key}`: {v}"))
}

fn as_f64(key: &str, v: &Value) -> Result<f64> {
    match v {
        Value::Float(f) => Ok(*f),
        Value::Integer(i) => Ok(*i as f64),
        Value::String(s) => s.trim().parse().map_err(|_| bad(key, v)),
        _ => Err(bad(key, v)),
    }
}

fn as_u64(key: &str, v: &Value) -> Result<u64> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as u64),
        Value::String(s) => s.trim().parse().map_err(|_| bad(key, v)),
        _ => Err(bad(key, v)),
    }
}

fn as_bool(key: &str, v: &Value) -> Result<bool> {
    match v {
        Value::Boolean(b) => Ok(*b),
        _ => Err(bad(key, v)),
    }
}

fn as_list(key: &str, v: &Value) -> Result<Vec<f64>> {
    match v {
        Value::Array(items) => items.iter().map(|x| as_f64(key, x)).collect(),
        Value::String(s) => parse_list(s).map_err(|_| bad(key, v)),
        other => Ok(vec![as_f64(key, other)?]),
    }
}

pub(crate) fn parse_list(s: &str) -> std::result::Result<Vec<f64>, std::num::ParseFloatError> {
    s.split(',').map(|t| t.trim().parse::<f64>()).collect()
}

impl SweepConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: Table = text.parse().map_err(|e| Error::Config(format!("{e}")))?;
        let mut cfg = SweepConfig::default();
        for (key, v) in &table {
            match key.as_str() {
                "n" => cfg.n = as_u64(key, v)? as usize,
                "k" => cfg.k = as_u64(key, v)? as usize,
                "snr-db" => cfg.snr_db = as_list(key, v)?,
                "noise-p" => cfg.noise_p = as_list(key, v)?,
                "shots" => cfg.decoder.shots = as_u64(key, v)?,
                "problems" => cfg.problems = as_u64(key, v)?,
                "seed" => cfg.seed = as_u64(key, v)?,
                "max-fbs-blocks" => cfg.decoder.max_fbs_blocks = as_u64(key, v)? as usize,
                "angle-quantum" => cfg.decoder.angle_quantum = as_f64(key, v)?,
                "ideal" => cfg.decoder.ideal_mode = as_bool(key, v)?,
                "optimize" => cfg.decoder.optimize_circuit = as_bool(key, v)?,
                "workers" => cfg.workers = as_u64(key, v)? as usize,
                "out" => cfg.out = Some(v.as_str().ok_or_else(|| bad(key, v))?.into()),
                "log-problems" => cfg.log_problems = Some(v.as_str().ok_or_else(|| bad(key, v))?.into()),
                "timing" => cfg.timing = as_bool(key, v)?,
                other => return Err(Error::Config(format!("unknown key `{other}`"))),
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.problems == 0 {
            return Err(Error::Config("problems must be at least 1".into()));
        }
        if self.snr_db.is_empty() || self.noise_p.is_empty() {
            return Err(Error::Config("snr-db and noise-p lists must be non-empty".into()));
        }
        if let Some(s) = self.snr_db.iter().find(|s| !s.is_finite()) {
            return Err(Error::Config(format!("non-finite SNR {s}")));
        }
        if let Some(&p) = self.noise_p.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidProbability(p));
        }
        if self.decoder.ideal_mode && self.noise_p.iter().any(|&p| p > 0.0) {
            return Err(Error::Config("ideal mode is noiseless; drop non-zero noise-p".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        if !self.n.is_power_of_two() || self.n < 2 || self.k == 0 || self.k > self.n {
            return Err(Error::InvalidCode { n: self.n, k: self.k });
        }
        if self.k > 20 {
            return Err(Error::EnumerationTooLarge(self.k));
        }
        if self.n > crate::qsim::MAX_QUBITS {
            return Err(Error::QubitCountOutOfRange(self.n));
        }
        self.decoder.validate()
    }
}
