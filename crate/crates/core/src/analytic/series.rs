//! Exact per-position error of the `r`-click race as a truncated series.
//!
//! A given empty position reaches its `r`-th false click on transmission `n`
//! with negative-binomial probability; the error is counted when the true
//! position has at most `r` clicks by then:
//!
//! ```text
//!   sum_{n >= r} C(n-1, r-1) (1 - f)^(n-r) f^r Pr[Bin(n, p_tp) <= r]
//! ```
//!
//! The CDF factor is at most one, so the negative-binomial mass not yet
//! visited bounds the omitted tail.

use serde::Serialize;

use super::binomial::{binomial_cdf, binomial_pmf};
use crate::error::{Error, Result};
use crate::model::ClickModel;

/// Default absolute tolerance on the omitted tail.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Default cap on the number of summed terms.
pub const DEFAULT_MAX_TERMS: u64 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesResult {
    pub value: f64,
    /// Upper bound on the mass of the terms left out.
    pub truncation_bound: f64,
    pub terms_used: u64,
}

impl SeriesResult {
    /// `value + truncation_bound`, a certified upper bound on the full sum.
    pub fn upper(&self) -> f64 {
        self.value + self.truncation_bound
    }
}

pub fn per_position_error_series(model: &ClickModel, r: u64, tol: f64) -> Result<SeriesResult> {
    per_position_error_series_with_budget(model, r, tol, DEFAULT_MAX_TERMS)
}

pub fn per_position_error_series_with_budget(
    model: &ClickModel,
    r: u64,
    tol: f64,
    max_terms: u64,
) -> Result<SeriesResult> {
    if r == 0 {
        return Err(Error::invalid("r", "click threshold must be >= 1"));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::invalid("tol", format!("must be > 0, got {tol}")));
    }
    let f = model.p_fp();
    if f == 0.0 {
        // An empty position never clicks.
        return Ok(SeriesResult {
            value: 0.0,
            truncation_bound: 0.0,
            terms_used: 0,
        });
    }
    let p = model.p_tp();
    let threshold = r as i64;

    let mut value = 0.0;
    let mut terms = 0u64;
    let mut n = r;
    loop {
        // r-th success of Bernoulli(f) exactly on trial n.
        let first_passage = f * binomial_pmf(n - 1, f, r - 1);
        value += first_passage * binomial_cdf(n, p, threshold);
        terms += 1;

        // Pr[first passage after n] = Pr[Bin(n, f) <= r - 1].
        let tail = binomial_cdf(n, f, threshold - 1);
        if tail < tol {
            return Ok(SeriesResult {
                value,
                truncation_bound: tail,
                terms_used: terms,
            });
        }
        if terms >= max_terms {
            return Err(Error::FailedToConverge { terms, tail, tol });
        }
        n += 1;
    }
}
