use serde::Serialize;

use super::config::{EnergyAxis, SweepConfig};
use crate::analytic::{self, clamp_probability};
use crate::engine::Campaign;
use crate::error::Result;
use crate::model::{derive_click_model, ChannelParams, ClickModel, DecisionRule, Modes};

/// One grid point: inputs, every applicable analytic quantity and the Monte
/// Carlo summary. Inapplicable quantities are `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub eta: f64,
    pub n_b: f64,
    pub d: u64,
    pub m: String,
    pub rule: &'static str,
    pub r_or_n: u64,
    pub p_tp: Option<f64>,
    pub p_fp: Option<f64>,
    pub analytic_classical_lb: Option<f64>,
    pub analytic_tmsv_ub: Option<f64>,
    pub analytic_tmsv_ub_clamped: Option<f64>,
    pub analytic_fixed_shot_error: Option<f64>,
    pub analytic_truncated_energy: Option<f64>,
    pub analytic_truncated_error: Option<f64>,
    /// Mean transmissions (per-position photons) spent by the rule.
    pub analytic_expected_transmissions: Option<f64>,
    /// `analytic_expected_transmissions`, times `d` on the photon axis.
    pub analytic_energy: Option<f64>,
    pub analytic_first_click_bound: Option<f64>,
    pub analytic_first_click_bound_clamped: Option<f64>,
    pub analytic_chernoff_constant: Option<f64>,
    pub analytic_r_click_bound: Option<f64>,
    pub analytic_r_click_bound_clamped: Option<f64>,
    pub analytic_series: Option<f64>,
    pub analytic_series_tail: Option<f64>,
    pub mc_error: Option<f64>,
    pub mc_ci_low: Option<f64>,
    pub mc_ci_high: Option<f64>,
    pub mc_mean_transmissions: Option<f64>,
    pub mc_mean_photons: Option<f64>,
    pub seed: u64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ResultTable {
    pub rows: Vec<Row>,
}

impl Row {
    fn blank(params: &ChannelParams, rule: DecisionRule, seed: u64) -> Self {
        Row {
            eta: params.eta(),
            n_b: params.n_b(),
            d: params.d(),
            m: params.m().to_string(),
            rule: rule.name(),
            r_or_n: rule.count(),
            p_tp: None,
            p_fp: None,
            analytic_classical_lb: None,
            analytic_tmsv_ub: None,
            analytic_tmsv_ub_clamped: None,
            analytic_fixed_shot_error: None,
            analytic_truncated_energy: None,
            analytic_truncated_error: None,
            analytic_expected_transmissions: None,
            analytic_energy: None,
            analytic_first_click_bound: None,
            analytic_first_click_bound_clamped: None,
            analytic_chernoff_constant: None,
            analytic_r_click_bound: None,
            analytic_r_click_bound_clamped: None,
            analytic_series: None,
            analytic_series_tail: None,
            mc_error: None,
            mc_ci_low: None,
            mc_ci_high: None,
            mc_mean_transmissions: None,
            mc_mean_photons: None,
            seed,
            error: None,
        }
    }

    fn note_error(&mut self, msg: String) {
        match &mut self.error {
            Some(existing) => {
                existing.push_str("; ");
                existing.push_str(&msg);
            }
            None => self.error = Some(msg),
        }
    }

    fn fill_analytic(
        &mut self,
        params: &ChannelParams,
        model: &ClickModel,
        rule: DecisionRule,
        config: &SweepConfig,
    ) {
        let d = params.d() as f64;
        let noise_free = model.p_fp() == 0.0;

        // Transmissions per position the rule spends on average.
        let transmissions = match rule {
            DecisionRule::FixedShots(n) => Some(n as f64),
            DecisionRule::FirstClick => Some(analytic::expected_transmissions(model, 1)),
            DecisionRule::RClicks(r) => Some(analytic::expected_transmissions(model, r)),
            DecisionRule::TruncatedFirstClick(n) => {
                let energy = analytic::truncated_energy(params, model, n).ok();
                self.analytic_truncated_energy = energy;
                energy.map(|e| e / d)
            }
        };
        self.analytic_expected_transmissions = transmissions;
        self.analytic_energy = transmissions.map(|t| match config.energy_axis {
            EnergyAxis::Transmissions => t,
            EnergyAxis::Photons => t * d,
        });
        if let Some(n_s) = transmissions {
            self.analytic_classical_lb = Some(analytic::classical_lower_bound(params, n_s));
            let tmsv = analytic::tmsv_upper_bound(params, n_s);
            self.analytic_tmsv_ub = Some(tmsv);
            self.analytic_tmsv_ub_clamped = Some(clamp_probability(tmsv));
        }

        match rule {
            DecisionRule::FixedShots(n) if noise_free => {
                self.analytic_fixed_shot_error = analytic::dv_fixed_shot_error(model, n).ok();
            }
            DecisionRule::TruncatedFirstClick(n) if noise_free => {
                self.analytic_truncated_error = analytic::truncated_error(model, n).ok();
            }
            _ => {}
        }

        if rule == DecisionRule::FirstClick {
            let b = analytic::first_click_error_bound(params, model);
            self.analytic_first_click_bound = Some(b);
            self.analytic_first_click_bound_clamped = Some(clamp_probability(b));
        }

        let race_threshold = match rule {
            DecisionRule::FirstClick => Some(1),
            DecisionRule::RClicks(r) => Some(r),
            _ => None,
        };
        if let Some(r) = race_threshold {
            self.analytic_chernoff_constant = Some(analytic::chernoff_constant(model, r));
            let b = analytic::r_click_error_bound(params, model, r);
            self.analytic_r_click_bound = Some(b);
            self.analytic_r_click_bound_clamped = Some(clamp_probability(b));
            match analytic::per_position_error_series(model, r, config.tol) {
                Ok(s) => {
                    self.analytic_series = Some(s.value);
                    self.analytic_series_tail = Some(s.truncation_bound);
                }
                Err(e) => self.note_error(format!("series: {e}")),
            }
        }
    }
}

fn click_model(params: &ChannelParams, config: &SweepConfig) -> Result<ClickModel> {
    let model = derive_click_model(params)?;
    match (config.p_fp, params.m()) {
        (Some(p), Modes::Finite(_)) => model.with_false_positive(p),
        _ => Ok(model),
    }
}

fn build(config: &SweepConfig, simulate: bool, workers: usize) -> ResultTable {
    let mut rows = Vec::with_capacity(config.m_grid.len() * config.rule_grid.len());
    for &m in &config.m_grid {
        for &rule in &config.rule_grid {
            let params = match config.base.with_modes(m) {
                Ok(p) => p,
                Err(e) => {
                    let mut row = Row::blank(&config.base, rule, config.seed);
                    row.m = m.to_string();
                    row.note_error(e.to_string());
                    rows.push(row);
                    continue;
                }
            };
            let mut row = Row::blank(&params, rule, config.seed);
            let model = match click_model(&params, config) {
                Ok(model) => model,
                Err(e) => {
                    row.note_error(e.to_string());
                    rows.push(row);
                    continue;
                }
            };
            row.p_tp = Some(model.p_tp());
            row.p_fp = Some(model.p_fp());
            row.fill_analytic(&params, &model, rule, config);

            if simulate {
                let summary = Campaign::new(model, params.d(), rule)
                    .and_then(|c| c.with_z(config.z))
                    .and_then(|c| c.run(config.trials, config.seed, workers));
                match summary {
                    Ok(s) => {
                        row.mc_error = Some(s.error_rate);
                        row.mc_ci_low = Some(s.ci_low);
                        row.mc_ci_high = Some(s.ci_high);
                        row.mc_mean_transmissions = Some(s.mean_transmissions);
                        row.mc_mean_photons = Some(s.mean_photons);
                    }
                    Err(e) => row.note_error(format!("simulation: {e}")),
                }
            }
            rows.push(row);
        }
    }
    ResultTable { rows }
}

/// Evaluates every grid point, analytic and Monte Carlo. Rows are ordered by
/// `m_grid`, then `rule_grid`. Per-row failures land in the `error` column.
pub fn run_sweep(config: &SweepConfig) -> ResultTable {
    build(config, true, config.workers)
}

/// As [`run_sweep`] with an explicit worker count.
pub fn run_sweep_with_workers(config: &SweepConfig, workers: usize) -> ResultTable {
    build(config, true, workers)
}

/// Analytic columns only; Monte Carlo columns stay empty.
pub fn run_bounds(config: &SweepConfig) -> ResultTable {
    build(config, false, 1)
}
