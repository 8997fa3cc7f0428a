//! Scenario parameters, per-transmission click rates and the stopping rules
//! shared by the analytic evaluators and the simulator.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dimension of the entangled probe.
///
/// `Infinite` is kept symbolic so the false-positive rate is exactly zero in
/// that limit rather than a small number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Modes {
    Finite(u64),
    Infinite,
}

impl Modes {
    pub fn finite(self) -> Option<u64> {
        match self {
            Modes::Finite(m) => Some(m),
            Modes::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Modes::Infinite)
    }
}

impl fmt::Display for Modes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Modes::Finite(m) => write!(f, "{m}"),
            Modes::Infinite => f.write_str("inf"),
        }
    }
}

/// Physical scenario: target reflectivity, thermal background, number of
/// candidate positions and probe dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    eta: f64,
    n_b: f64,
    d: u64,
    m: Modes,
}

impl ChannelParams {
    /// Validates `0 < eta <= 1`, `n_b >= 0`, `d >= 2` and `m >= 1`.
    ///
    /// `eta = 0` is rejected: the target would never produce a click and
    /// every sequential rule would run forever.
    pub fn new(eta: f64, n_b: f64, d: u64, m: Modes) -> Result<Self> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::invalid(
                "eta",
                format!("must lie in (0, 1], got {eta}"),
            ));
        }
        if !(n_b >= 0.0 && n_b.is_finite()) {
            return Err(Error::invalid(
                "n_b",
                format!("must be finite and >= 0, got {n_b}"),
            ));
        }
        if d < 2 {
            return Err(Error::invalid(
                "d",
                format!("need at least 2 positions, got {d}"),
            ));
        }
        if m == Modes::Finite(0) {
            return Err(Error::invalid("m", "must be >= 1 or infinite"));
        }
        Ok(ChannelParams { eta, n_b, d, m })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn n_b(&self) -> f64 {
        self.n_b
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn m(&self) -> Modes {
        self.m
    }

    pub fn with_modes(self, m: Modes) -> Result<Self> {
        Self::new(self.eta, self.n_b, self.d, m)
    }
}

/// Per-transmission Bernoulli click rates at the true position (`p_tp`) and
/// at each empty position (`p_fp`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClickModel {
    p_tp: f64,
    p_fp: f64,
}

impl ClickModel {
    pub fn new(p_tp: f64, p_fp: f64) -> Result<Self> {
        if !(p_tp > 0.0 && p_tp <= 1.0) {
            return Err(Error::invalid(
                "p_tp",
                format!("must lie in (0, 1], got {p_tp}"),
            ));
        }
        if !(0.0..1.0).contains(&p_fp) {
            return Err(Error::invalid(
                "p_fp",
                format!("must lie in [0, 1), got {p_fp}"),
            ));
        }
        Ok(ClickModel { p_tp, p_fp })
    }

    pub fn p_tp(&self) -> f64 {
        self.p_tp
    }

    pub fn p_fp(&self) -> f64 {
        self.p_fp
    }

    /// Replaces the false-positive rate, e.g. for sensitivity studies where
    /// the worst-case `1/m` is too pessimistic.
    pub fn with_false_positive(self, p_fp: f64) -> Result<Self> {
        Self::new(self.p_tp, p_fp)
    }
}

/// `p_tp = eta / (1 + n_b)`; `p_fp = 1/m`, or exactly zero for infinite `m`.
pub fn derive_click_model(params: &ChannelParams) -> Result<ClickModel> {
    let p_tp = params.eta / (1.0 + params.n_b);
    let p_fp = match params.m {
        Modes::Finite(m) => 1.0 / m as f64,
        Modes::Infinite => 0.0,
    };
    if params.m == Modes::Finite(1) {
        // 1/m = 1 would make every empty position click on every shot.
        return Err(Error::invalid("m", "m = 1 gives p_fp = 1; need m >= 2"));
    }
    ClickModel::new(p_tp, p_fp)
}

/// Stopping rule applied to the per-position click counters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionRule {
    /// Transmit exactly `n_s` times and pick the position that clicked.
    FixedShots(u64),
    /// Stop at the first click anywhere.
    FirstClick,
    /// Stop when some position has accumulated `r` clicks.
    RClicks(u64),
    /// First click, but give up after `n_max` transmissions.
    TruncatedFirstClick(u64),
}

impl DecisionRule {
    pub fn name(&self) -> &'static str {
        match self {
            DecisionRule::FixedShots(_) => "fixed_shots",
            DecisionRule::FirstClick => "first_click",
            DecisionRule::RClicks(_) => "r_clicks",
            DecisionRule::TruncatedFirstClick(_) => "truncated_first_click",
        }
    }

    /// The rule's integer parameter; `FirstClick` reports its threshold of 1.
    pub fn count(&self) -> u64 {
        match *self {
            DecisionRule::FixedShots(n)
            | DecisionRule::RClicks(n)
            | DecisionRule::TruncatedFirstClick(n) => n,
            DecisionRule::FirstClick => 1,
        }
    }

    /// Clicks a single position needs before the race stops.
    pub fn threshold(&self) -> u64 {
        match *self {
            DecisionRule::RClicks(r) => r,
            _ => 1,
        }
    }

    /// Transmission cap, if the rule has one.
    pub fn max_transmissions(&self) -> Option<u64> {
        match *self {
            DecisionRule::FixedShots(n) | DecisionRule::TruncatedFirstClick(n) => Some(n),
            _ => None,
        }
    }
}

impl fmt::Display for DecisionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecisionRule::FirstClick => f.write_str("first_click"),
            other => write!(f, "{}({})", other.name(), other.count()),
        }
    }
}

/// Checks that the rule's counts are positive and that the rule is defined
/// for this click model. The fixed-shot rule is only analyzed without false
/// positives, so it is refused when `p_fp > 0`.
pub fn validate_rule(rule: DecisionRule, model: &ClickModel) -> Result<()> {
    if rule.count() == 0 {
        return Err(Error::invalid(
            "rule",
            format!("{} needs a count >= 1", rule.name()),
        ));
    }
    if matches!(rule, DecisionRule::FixedShots(_)) && model.p_fp > 0.0 {
        return Err(Error::UnsupportedCombination {
            rule,
            p_fp: model.p_fp,
        });
    }
    Ok(())
}
