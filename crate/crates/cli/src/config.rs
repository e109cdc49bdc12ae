//! Flat key-value experiment configs with sections. Every key is validated
//! against the command's schema before any computation starts; unknown keys
//! are rejected.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

pub type ConfigResult<T> = Result<T, ConfigError>;

fn err<T>(msg: impl Into<String>) -> ConfigResult<T> {
    Err(ConfigError(msg.into()))
}

/// Parsed config: `section.key -> value` plus the raw bytes for hashing.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub values: BTreeMap<String, String>,
    pub raw: String,
}

pub const COMMANDS: [&str; 8] = [
    "linear-decay",
    "heat-decay",
    "semilinear",
    "sweep",
    "besov-norm",
    "bounds-scan",
    "inequalities",
    "weak-functional",
];

// keys accepted by every command
const COMMON_KEYS: [&str; 6] = [
    "experiment.command",
    "experiment.seed",
    "output.dir",
    "grid.dims",
    "grid.points",
    "grid.half_length",
];

fn command_keys(command: &str) -> Option<&'static [&'static str]> {
    match command {
        "linear-decay" => Some(&[
            "physics.beta",
            "physics.alpha",
            "physics.t_lo",
            "physics.t_hi",
            "physics.samples",
            "data.profile",
            "data.amplitude",
            "data.velocity",
            "tolerances.slope_slack",
            "tolerances.dt_slope_slack",
        ]),
        "heat-decay" => Some(&[
            "physics.alpha",
            "physics.delta",
            "physics.t_lo",
            "physics.t_hi",
            "physics.samples",
            "data.profile",
            "data.amplitude",
            "tolerances.slope_window",
        ]),
        "semilinear" => Some(&[
            "physics.beta",
            "physics.gamma",
            "physics.alpha",
            "physics.p1",
            "physics.p2",
            "physics.t_end",
            "physics.dt",
            "data.profile",
            "data.amplitude",
            "data.velocity",
            "solver.blowup_threshold",
            "solver.record_every",
            "solver.snapshot_every",
        ]),
        "sweep" => Some(&[
            "physics.beta",
            "physics.gamma",
            "physics.alpha",
            "physics.t_end",
            "physics.dt",
            "sweep.p1_list",
            "sweep.p2_list",
            "data.amplitude",
            "solver.record_every",
        ]),
        "besov-norm" => Some(&[
            "physics.s",
            "physics.p",
            "physics.q",
            "physics.delta",
            "data.profile",
            "data.amplitude",
            "data.beta",
        ]),
        "bounds-scan" => Some(&[
            "scan.zone",
            "scan.t_lo",
            "scan.t_hi",
            "scan.t_samples",
            "scan.xi_lo",
            "scan.xi_hi",
            "scan.xi_samples",
        ]),
        "inequalities" => Some(&[
            "hls.gamma",
            "hls.m2",
            "gn.theta",
            "gn.a",
            "gn.p",
            "gn.p0",
            "gn.p1",
            "data.samples",
            "data.band_lo",
            "data.band_hi",
            "data.modes",
        ]),
        "weak-functional" => Some(&[
            "physics.beta",
            "physics.gamma",
            "physics.p1",
            "physics.p2",
            "physics.dt",
            "physics.r_list",
            "data.amplitude",
            "solver.snapshot_every",
        ]),
        _ => None,
    }
}

impl ExperimentConfig {
    pub fn parse(raw: &str) -> ConfigResult<Self> {
        let mut values = BTreeMap::new();
        let mut section = String::new();
        for (lineno, line) in raw.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let Some(name) = name.strip_suffix(']') else {
                    return err(format!("line {}: malformed section header", lineno + 1));
                };
                section = name.trim().to_string();
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return err(format!("line {}: expected key = value", lineno + 1));
            };
            if section.is_empty() {
                return err(format!("line {}: key before any [section]", lineno + 1));
            }
            let full = format!("{}.{}", section, key.trim());
            if values.insert(full.clone(), value.trim().to_string()).is_some() {
                return err(format!("duplicate key {full}"));
            }
        }
        Ok(Self { values, raw: raw.to_string() })
    }

    pub fn load(path: &Path) -> ConfigResult<Self> {
        let raw = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&raw)
    }

    /// Check the command is known and every key belongs to its schema.
    pub fn validate_schema(&self, command: &str) -> ConfigResult<()> {
        let Some(extra) = command_keys(command) else {
            return err(format!(
                "unknown command {command}; expected one of {}",
                COMMANDS.join(", ")
            ));
        };
        for key in self.values.keys() {
            if !COMMON_KEYS.contains(&key.as_str()) && !extra.contains(&key.as_str()) {
                return err(format!("unknown key {key} for command {command}"));
            }
        }
        Ok(())
    }

    pub fn command(&self) -> ConfigResult<String> {
        match self.values.get("experiment.command") {
            Some(c) => Ok(c.clone()),
            None => err("missing experiment.command"),
        }
    }

    pub fn get_str(&self, key: &str) -> ConfigResult<&str> {
        self.values
            .get(key)
            .map(|s| s.as_str())
            .ok_or_else(|| ConfigError(format!("missing required key {key}")))
    }

    pub fn opt_str(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    pub fn get_f64(&self, key: &str) -> ConfigResult<f64> {
        let s = self.get_str(key)?;
        s.parse::<f64>().map_err(|_| ConfigError(format!("key {key}: not a number: {s}")))
    }

    pub fn opt_f64(&self, key: &str, default: f64) -> ConfigResult<f64> {
        match self.values.get(key) {
            None => Ok(default),
            Some(s) => {
                s.parse::<f64>().map_err(|_| ConfigError(format!("key {key}: not a number: {s}")))
            }
        }
    }

    pub fn get_usize(&self, key: &str) -> ConfigResult<usize> {
        let s = self.get_str(key)?;
        s.parse::<usize>()
            .map_err(|_| ConfigError(format!("key {key}: not a nonnegative integer: {s}")))
    }

    pub fn opt_usize(&self, key: &str, default: usize) -> ConfigResult<usize> {
        match self.values.get(key) {
            None => Ok(default),
            Some(s) => s
                .parse::<usize>()
                .map_err(|_| ConfigError(format!("key {key}: not a nonnegative integer: {s}"))),
        }
    }

    pub fn get_f64_list(&self, key: &str) -> ConfigResult<Vec<f64>> {
        let s = self.get_str(key)?;
        s.split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|_| ConfigError(format!("key {key}: bad list entry {tok}")))
            })
            .collect()
    }

    /// FNV-1a hash of the raw config bytes, for the provenance manifest.
    pub fn hash(&self) -> u64 {
        let mut h: u64 = 0xcbf29ce484222325;
        for b in self.raw.as_bytes() {
            h ^= *b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        h
    }
}
