//! JSON sweep configuration.
//!
//! ```json
//! {
//!   "eta": 0.2, "n_b": 1.0, "d": 5,
//!   "m_grid": [10, 100, "inf"],
//!   "rules": ["first_click", "r_clicks", {"truncated_first_click": [5, 10, 20]}],
//!   "r_grid": [1, 2, 3],
//!   "energy_axis": "photons",
//!   "trials": 100000, "seed": 7
//! }
//! ```
//!
//! A bare `"r_clicks"` expands over `r_grid`. The other rules take a count
//! or a list of counts: `{"fixed_shots": 10}`, `{"r_clicks": [1, 2]}`.
//! Unknown keys are rejected.

use std::collections::BTreeMap;
use std::num::NonZeroUsize;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::analytic::DEFAULT_TOL;
use crate::engine::DEFAULT_Z;
use crate::error::{Error, Result};
use crate::model::{ChannelParams, DecisionRule, Modes};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnergyAxis {
    #[default]
    Transmissions,
    Photons,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// Scenario; its `m` is the first entry of `m_grid`.
    pub base: ChannelParams,
    pub rule_grid: Vec<DecisionRule>,
    pub m_grid: Vec<Modes>,
    pub r_grid: Vec<u64>,
    pub energy_axis: EnergyAxis,
    pub trials: u64,
    pub seed: u64,
    pub tol: f64,
    pub z: f64,
    /// Replaces the `1/m` false-positive rate at every finite `m`.
    pub p_fp: Option<f64>,
    pub workers: usize,
    pub output_path: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    eta: f64,
    n_b: f64,
    d: u64,
    #[serde(default = "default_m_grid")]
    m_grid: Vec<RawModes>,
    rules: Vec<RawRule>,
    #[serde(default = "default_r_grid")]
    r_grid: Vec<u64>,
    #[serde(default)]
    energy_axis: EnergyAxis,
    #[serde(default = "default_trials")]
    trials: u64,
    #[serde(default)]
    seed: u64,
    #[serde(default = "default_tol")]
    tol: f64,
    #[serde(default = "default_z")]
    z: f64,
    #[serde(default)]
    p_fp: Option<f64>,
    #[serde(default)]
    workers: Option<usize>,
    #[serde(default)]
    output_path: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawModes {
    Count(u64),
    Symbol(String),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawRule {
    Name(String),
    Counted(BTreeMap<String, Counts>),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Counts {
    One(u64),
    Many(Vec<u64>),
}

impl Counts {
    fn into_vec(self) -> Vec<u64> {
        match self {
            Counts::One(n) => vec![n],
            Counts::Many(v) => v,
        }
    }
}

fn default_m_grid() -> Vec<RawModes> {
    vec![RawModes::Symbol("inf".into())]
}

fn default_r_grid() -> Vec<u64> {
    vec![1]
}

fn default_trials() -> u64 {
    100_000
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

fn default_z() -> f64 {
    DEFAULT_Z
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism()
        .map(NonZeroUsize::get)
        .unwrap_or(1)
}

fn invalid(path: impl std::fmt::Display, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("{path}: {msg}"))
}

fn parse_modes(raw: RawModes, i: usize) -> Result<Modes> {
    match raw {
        RawModes::Count(0) => Err(invalid(format!("m_grid[{i}]"), "must be >= 1")),
        RawModes::Count(m) => Ok(Modes::Finite(m)),
        RawModes::Symbol(s) if matches!(s.as_str(), "inf" | "infinite" | "Infinite") => {
            Ok(Modes::Infinite)
        }
        RawModes::Symbol(s) => Err(invalid(
            format!("m_grid[{i}]"),
            format!("expected a positive integer or \"inf\", got {s:?}"),
        )),
    }
}

fn expand_rule(raw: RawRule, i: usize, r_grid: &[u64], out: &mut Vec<DecisionRule>) -> Result<()> {
    let path = format!("rules[{i}]");
    match raw {
        RawRule::Name(name) => match name.as_str() {
            "first_click" => out.push(DecisionRule::FirstClick),
            "r_clicks" => out.extend(r_grid.iter().map(|&r| DecisionRule::RClicks(r))),
            "fixed_shots" | "truncated_first_click" => {
                return Err(invalid(
                    path,
                    format!("{name} needs a count, e.g. {{\"{name}\": 10}}"),
                ))
            }
            other => return Err(invalid(path, format!("unknown rule {other:?}"))),
        },
        RawRule::Counted(map) => {
            if map.len() != 1 {
                return Err(invalid(path, "expected exactly one rule name per entry"));
            }
            let (name, counts) = map.into_iter().next().expect("len checked");
            let make: fn(u64) -> DecisionRule = match name.as_str() {
                "fixed_shots" => DecisionRule::FixedShots,
                "r_clicks" => DecisionRule::RClicks,
                "truncated_first_click" => DecisionRule::TruncatedFirstClick,
                other => return Err(invalid(path, format!("unknown rule {other:?}"))),
            };
            let counts = counts.into_vec();
            if counts.is_empty() {
                return Err(invalid(format!("{path}.{name}"), "must not be empty"));
            }
            for (j, &n) in counts.iter().enumerate() {
                if n == 0 {
                    return Err(invalid(format!("{path}.{name}[{j}]"), "must be >= 1"));
                }
                out.push(make(n));
            }
        }
    }
    Ok(())
}

/// Parses and validates a sweep configuration document.
pub fn parse_config(text: &str) -> Result<SweepConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            Error::Config(e.inner().to_string())
        } else {
            invalid(path, e.inner())
        }
    })?;

    let m_grid = raw
        .m_grid
        .into_iter()
        .enumerate()
        .map(|(i, m)| parse_modes(m, i))
        .collect::<Result<Vec<_>>>()?;
    if m_grid.is_empty() {
        return Err(invalid("m_grid", "must not be empty"));
    }
    if raw.r_grid.is_empty() {
        return Err(invalid("r_grid", "must not be empty"));
    }
    if let Some(j) = raw.r_grid.iter().position(|&r| r == 0) {
        return Err(invalid(format!("r_grid[{j}]"), "must be >= 1"));
    }
    if raw.rules.is_empty() {
        return Err(invalid("rules", "must not be empty"));
    }
    let mut rule_grid = Vec::new();
    for (i, rule) in raw.rules.into_iter().enumerate() {
        expand_rule(rule, i, &raw.r_grid, &mut rule_grid)?;
    }

    let base = ChannelParams::new(raw.eta, raw.n_b, raw.d, m_grid[0]).map_err(|e| match e {
        Error::InvalidParameter { name, reason } => invalid(name, reason),
        other => other,
    })?;
    if raw.trials == 0 {
        return Err(invalid("trials", "must be >= 1"));
    }
    if raw.tol.is_nan() || raw.tol <= 0.0 {
        return Err(invalid("tol", format!("must be > 0, got {}", raw.tol)));
    }
    if !(raw.z > 0.0 && raw.z.is_finite()) {
        return Err(invalid("z", format!("must be > 0, got {}", raw.z)));
    }
    if let Some(p) = raw.p_fp {
        if !(0.0..1.0).contains(&p) {
            return Err(invalid("p_fp", format!("must lie in [0, 1), got {p}")));
        }
    }
    if raw.workers == Some(0) {
        return Err(invalid("workers", "must be >= 1"));
    }

    Ok(SweepConfig {
        base,
        rule_grid,
        m_grid,
        r_grid: raw.r_grid,
        energy_axis: raw.energy_axis,
        trials: raw.trials,
        seed: raw.seed,
        tol: raw.tol,
        z: raw.z,
        p_fp: raw.p_fp,
        workers: raw.workers.unwrap_or_else(default_workers),
        output_path: raw.output_path,
    })
}
