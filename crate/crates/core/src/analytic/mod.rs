//! Closed-form error and energy expressions for classical, TMSV and
//! Bell-state target finding, plus the exact race series used to check them.
//!
//! Bounds are returned unclamped; a bound above one is still the bound. Use
//! [`clamp_probability`] for presentation.

mod binomial;
mod series;

pub use binomial::{binomial_cdf, binomial_pmf};
pub use series::{
    per_position_error_series, per_position_error_series_with_budget, SeriesResult,
    DEFAULT_MAX_TERMS, DEFAULT_TOL,
};

use crate::error::{Error, Result};
use crate::model::{ChannelParams, ClickModel};

pub fn clamp_probability(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// Lower bound on the error of the optimal coherent-state (classical)
/// strategy with `n_s` photons per position.
pub fn classical_lower_bound(params: &ChannelParams, n_s: f64) -> f64 {
    let d = params.d() as f64;
    (d - 1.0) / (2.0 * d) * (-2.0 * params.eta() * n_s / (2.0 * params.n_b() + 1.0)).exp()
}

/// Upper bound on the error of a TMSV transmitter with `n_s` photons per
/// position. Exceeds one at low energy.
pub fn tmsv_upper_bound(params: &ChannelParams, n_s: f64) -> f64 {
    (params.d() - 1) as f64 * (-params.eta() * n_s / (1.0 + params.n_b())).exp()
}

/// `(1 - p)^n`, exact rather than the exponential approximation.
fn all_miss(p: f64, n: u64) -> f64 {
    match i32::try_from(n) {
        Ok(n) => (1.0 - p).powi(n),
        Err(_) => (n as f64 * (-p).ln_1p()).exp(),
    }
}

fn require_noise_free(model: &ClickModel, what: &'static str) -> Result<()> {
    if model.p_fp() > 0.0 {
        return Err(Error::invalid(
            "p_fp",
            format!(
                "{what} is only defined without false positives, got p_fp = {}",
                model.p_fp()
            ),
        ));
    }
    Ok(())
}

/// Error of the fixed-shot rule with no false positives: every one of the
/// `n_s` transmissions misses.
pub fn dv_fixed_shot_error(model: &ClickModel, n_s: u64) -> Result<f64> {
    require_noise_free(model, "fixed-shot error")?;
    if n_s == 0 {
        return Err(Error::invalid("n_s", "need at least one transmission"));
    }
    Ok(all_miss(model.p_tp(), n_s))
}

/// Mean photons spent by the first-click rule capped at `n_max`
/// transmissions, `d` photons per transmission.
pub fn truncated_energy(params: &ChannelParams, model: &ClickModel, n_max: u64) -> Result<f64> {
    if n_max == 0 {
        return Err(Error::invalid("n_max", "need at least one transmission"));
    }
    let p = model.p_tp();
    // 1 - (1-p)^n without cancellation for small p.
    let reached = -(n_max as f64 * (-p).ln_1p()).exp_m1();
    Ok(params.d() as f64 / p * reached)
}

/// Limit of [`truncated_energy`] as `n_max` grows without bound.
pub fn truncated_energy_limit(params: &ChannelParams, model: &ClickModel) -> f64 {
    params.d() as f64 / model.p_tp()
}

/// Probability that all `n_max` transmissions of the capped first-click
/// rule miss.
pub fn truncated_error(model: &ClickModel, n_max: u64) -> Result<f64> {
    require_noise_free(model, "truncated error")?;
    if n_max == 0 {
        return Err(Error::invalid("n_max", "need at least one transmission"));
    }
    Ok(all_miss(model.p_tp(), n_max))
}

/// Mean number of transmissions until the true position has `r` clicks.
pub fn expected_transmissions(model: &ClickModel, r: u64) -> f64 {
    r as f64 / model.p_tp()
}

/// Union bound on the first-click race error: `p_fp (d - 1) / p_tp`.
///
/// With the default click model `p_fp = 1/m`; zero for infinite `m`.
pub fn first_click_error_bound(params: &ChannelParams, model: &ClickModel) -> f64 {
    model.p_fp() * (params.d() - 1) as f64 / model.p_tp()
}

/// Natural log of [`chernoff_constant`].
pub fn ln_chernoff_constant(model: &ClickModel, r: u64) -> f64 {
    let r = r as f64;
    let two_r_minus_1 = 2.0 * r - 1.0;
    1.0 - 1.5 * r.ln() - 0.5 * two_r_minus_1.ln()
        + r * (2.0 * two_r_minus_1.ln() - 2.0 * r.ln() - model.p_tp().ln())
}

/// `C(r) = e / (r sqrt(r) sqrt(2r - 1)) * ((2r - 1)^2 / (r^2 p_tp))^r`.
///
/// Evaluated in log space; `(2r - 1)^(2r)` alone overflows near `r = 70`.
pub fn chernoff_constant(model: &ClickModel, r: u64) -> f64 {
    assert!(r >= 1, "r must be >= 1");
    ln_chernoff_constant(model, r).exp()
}

/// `(d - 1) C(r) p_fp^r`, i.e. `(d - 1) C(r) / m^r` for the default click
/// model. Zero when there are no false positives.
pub fn r_click_error_bound(params: &ChannelParams, model: &ClickModel, r: u64) -> f64 {
    assert!(r >= 1, "r must be >= 1");
    if model.p_fp() == 0.0 {
        return 0.0;
    }
    let ln = ((params.d() - 1) as f64).ln()
        + ln_chernoff_constant(model, r)
        + r as f64 * model.p_fp().ln();
    ln.exp()
}
