//! Sequential target finding with high-dimensional Bell-state probes.
//!
//! - [`model`]: scenario parameters, click rates and stopping rules.
//! - [`analytic`]: closed-form error/energy expressions and the exact race
//!   series.
//! - [`engine`]: deterministic Monte Carlo of the click race.
//! - [`sweep`]: JSON configuration, parameter sweeps and CSV output.

pub mod analytic;
pub mod engine;
pub mod error;
pub mod model;
pub mod sweep;

pub use error::{Error, Result};
pub use model::{
    derive_click_model, validate_rule, ChannelParams, ClickModel, DecisionRule, Modes,
};
