//! Monte Carlo simulation of the sequential click race.
//!
//! Each transmission draws one Bernoulli(`p_tp`) for the true position
//! (index 0) followed by `d - 1` Bernoulli(`p_fp`) draws for the empty
//! positions, always in that order. Trial `i` of a campaign uses ChaCha8
//! stream `i` under the campaign seed, so every draw is a pure function of
//! (seed, trial, transmission, position) and results do not depend on how
//! trials are spread over workers.

mod stats;

pub use stats::wilson_interval;

use rand::distr::{Bernoulli, Distribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{validate_rule, ClickModel, DecisionRule};

/// Default normal quantile for two-sided 95% intervals.
pub const DEFAULT_Z: f64 = 1.96;

/// Trials per work item. Fixed so chunk boundaries never depend on the
/// worker count (tallies are integer sums either way).
const CHUNK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Correct,
    WrongPosition,
    /// Two or more positions reached the threshold on the same transmission.
    Tie,
    /// A capped rule ran out of transmissions without a decision.
    Exhausted,
}

impl Verdict {
    pub fn is_error(self) -> bool {
        self != Verdict::Correct
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialRecord {
    pub verdict: Verdict,
    pub transmissions: u64,
    /// `transmissions * d`.
    pub photons: u64,
}

/// Deterministic random stream for trial `trial` of a campaign seeded with
/// `seed`.
pub fn trial_stream(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Precomputed samplers for one (model, d, rule) configuration.
#[derive(Debug, Clone)]
struct Race {
    hit: Bernoulli,
    false_hit: Bernoulli,
    d: usize,
    rule: DecisionRule,
}

impl Race {
    fn new(model: &ClickModel, d: u64, rule: DecisionRule) -> Self {
        Race {
            hit: Bernoulli::new(model.p_tp()).expect("p_tp validated by ClickModel"),
            false_hit: Bernoulli::new(model.p_fp()).expect("p_fp validated by ClickModel"),
            d: d as usize,
            rule,
        }
    }

    fn run<R: Rng + ?Sized>(&self, rng: &mut R, counts: &mut Vec<u64>) -> TrialRecord {
        counts.clear();
        counts.resize(self.d, 0);
        let threshold = self.rule.threshold();
        let cap = self.rule.max_transmissions();
        let fixed = matches!(self.rule, DecisionRule::FixedShots(_));

        let mut transmissions = 0u64;
        let verdict = loop {
            transmissions += 1;
            if self.hit.sample(rng) {
                counts[0] += 1;
            }
            for c in counts[1..].iter_mut() {
                if self.false_hit.sample(rng) {
                    *c += 1;
                }
            }

            if fixed {
                if Some(transmissions) == cap {
                    break if counts[0] > 0 {
                        Verdict::Correct
                    } else {
                        Verdict::Exhausted
                    };
                }
                continue;
            }

            // Counters grow by at most one per transmission, so `== threshold`
            // picks out exactly the positions that crossed on this shot.
            let mut crossed = 0;
            let mut first = 0;
            for (i, &c) in counts.iter().enumerate() {
                if c == threshold {
                    if crossed == 0 {
                        first = i;
                    }
                    crossed += 1;
                }
            }
            match crossed {
                0 => {}
                1 if first == 0 => break Verdict::Correct,
                1 => break Verdict::WrongPosition,
                _ => break Verdict::Tie,
            }
            if Some(transmissions) == cap {
                break Verdict::Exhausted;
            }
        };

        TrialRecord {
            verdict,
            transmissions,
            photons: transmissions * self.d as u64,
        }
    }
}

/// Simulates one sequential run with the true target at position 0.
///
/// Inputs are assumed validated; see [`validate_rule`].
pub fn run_trial<R: Rng + ?Sized>(
    model: &ClickModel,
    d: u64,
    rule: DecisionRule,
    stream: &mut R,
) -> TrialRecord {
    let mut counts = Vec::with_capacity(d as usize);
    Race::new(model, d, rule).run(stream, &mut counts)
}

/// Integer outcome counts; merging is plain addition.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub trials: u64,
    pub correct: u64,
    pub wrong_position: u64,
    pub ties: u64,
    pub exhausted: u64,
    pub sum_transmissions: u128,
    pub sum_sq_transmissions: u128,
}

impl Tally {
    fn record(&mut self, rec: &TrialRecord) {
        self.trials += 1;
        match rec.verdict {
            Verdict::Correct => self.correct += 1,
            Verdict::WrongPosition => self.wrong_position += 1,
            Verdict::Tie => self.ties += 1,
            Verdict::Exhausted => self.exhausted += 1,
        }
        let t = rec.transmissions as u128;
        self.sum_transmissions += t;
        self.sum_sq_transmissions += t * t;
    }

    pub fn merge(self, other: Tally) -> Tally {
        Tally {
            trials: self.trials + other.trials,
            correct: self.correct + other.correct,
            wrong_position: self.wrong_position + other.wrong_position,
            ties: self.ties + other.ties,
            exhausted: self.exhausted + other.exhausted,
            sum_transmissions: self.sum_transmissions + other.sum_transmissions,
            sum_sq_transmissions: self.sum_sq_transmissions + other.sum_sq_transmissions,
        }
    }

    pub fn errors(&self) -> u64 {
        self.wrong_position + self.ties + self.exhausted
    }
}

/// Aggregated campaign statistics. All derived fields are recomputed from
/// the integer [`Tally`], so equal tallies give bit-identical summaries.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignSummary {
    pub trials: u64,
    pub errors: u64,
    pub error_rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub mean_transmissions: f64,
    pub mean_transmissions_ci: (f64, f64),
    pub mean_photons: f64,
    pub seed: u64,
    pub rule: DecisionRule,
    pub model: ClickModel,
    pub d: u64,
    pub z: f64,
    pub tally: Tally,
}

impl CampaignSummary {
    fn from_tally(campaign: &Campaign, seed: u64, tally: Tally) -> Self {
        let errors = tally.errors();
        let (ci_low, ci_high) = wilson_interval(errors, tally.trials, campaign.z);
        let (error_rate, mean_transmissions) = if tally.trials == 0 {
            (0.0, 0.0)
        } else {
            let n = tally.trials as f64;
            (errors as f64 / n, tally.sum_transmissions as f64 / n)
        };
        CampaignSummary {
            trials: tally.trials,
            errors,
            error_rate,
            ci_low,
            ci_high,
            mean_transmissions,
            mean_transmissions_ci: stats::mean_interval(
                tally.sum_transmissions,
                tally.sum_sq_transmissions,
                tally.trials,
                campaign.z,
            ),
            mean_photons: mean_transmissions * campaign.d as f64,
            seed,
            rule: campaign.rule,
            model: campaign.model,
            d: campaign.d,
            z: campaign.z,
            tally,
        }
    }

    /// Identity element for [`merge_summaries`]: zero trials.
    pub fn empty(campaign: &Campaign, seed: u64) -> Self {
        Self::from_tally(campaign, seed, Tally::default())
    }

    /// Interval on the mean photon count, `d` times the transmission interval.
    pub fn mean_photons_ci(&self) -> (f64, f64) {
        let d = self.d as f64;
        (
            self.mean_transmissions_ci.0 * d,
            self.mean_transmissions_ci.1 * d,
        )
    }

    fn campaign(&self) -> Campaign {
        Campaign {
            model: self.model,
            d: self.d,
            rule: self.rule,
            z: self.z,
        }
    }
}

/// A validated simulation configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Campaign {
    model: ClickModel,
    d: u64,
    rule: DecisionRule,
    z: f64,
}

impl Campaign {
    pub fn new(model: ClickModel, d: u64, rule: DecisionRule) -> Result<Self> {
        if d < 2 {
            return Err(Error::invalid(
                "d",
                format!("need at least 2 positions, got {d}"),
            ));
        }
        validate_rule(rule, &model)?;
        Ok(Campaign {
            model,
            d,
            rule,
            z: DEFAULT_Z,
        })
    }

    pub fn with_z(mut self, z: f64) -> Result<Self> {
        if !(z > 0.0 && z.is_finite()) {
            return Err(Error::invalid("z", format!("must be positive, got {z}")));
        }
        self.z = z;
        Ok(self)
    }

    pub fn rule(&self) -> DecisionRule {
        self.rule
    }

    pub fn model(&self) -> ClickModel {
        self.model
    }

    /// Runs trials `0..trials`.
    pub fn run(&self, trials: u64, seed: u64, workers: usize) -> Result<CampaignSummary> {
        if trials == 0 {
            return Err(Error::invalid("trials", "need at least one trial"));
        }
        self.run_range(0, trials, seed, workers)
    }

    /// Runs trials `first..first + count`. Disjoint ranges of the same seed
    /// merge into exactly the summary of their union.
    pub fn run_range(
        &self,
        first: u64,
        count: u64,
        seed: u64,
        workers: usize,
    ) -> Result<CampaignSummary> {
        if workers == 0 {
            return Err(Error::invalid("workers", "need at least one worker"));
        }
        let race = Race::new(&self.model, self.d, self.rule);
        let base = ChaCha8Rng::seed_from_u64(seed);
        let chunks = count.div_ceil(CHUNK);

        let run_chunk = |chunk: u64| -> Tally {
            let start = first + chunk * CHUNK;
            let end = (start + CHUNK).min(first + count);
            let mut tally = Tally::default();
            let mut counts = Vec::with_capacity(self.d as usize);
            for trial in start..end {
                let mut rng = base.clone();
                rng.set_stream(trial);
                tally.record(&race.run(&mut rng, &mut counts));
            }
            tally
        };

        let tally = if workers == 1 {
            (0..chunks)
                .map(run_chunk)
                .fold(Tally::default(), Tally::merge)
        } else {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| Error::invalid("workers", e.to_string()))?;
            pool.install(|| {
                (0..chunks)
                    .into_par_iter()
                    .map(run_chunk)
                    .reduce(Tally::default, Tally::merge)
            })
        };
        Ok(CampaignSummary::from_tally(self, seed, tally))
    }
}

/// Convenience wrapper: validate, then run `trials` trials with the default z.
pub fn run_campaign(
    model: &ClickModel,
    d: u64,
    rule: DecisionRule,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<CampaignSummary> {
    Campaign::new(*model, d, rule)?.run(trials, seed, workers)
}

/// Pools two summaries of the same configuration and seed.
pub fn merge_summaries(a: &CampaignSummary, b: &CampaignSummary) -> Result<CampaignSummary> {
    let (ca, cb) = (a.campaign(), b.campaign());
    if ca != cb {
        return Err(Error::IncompatibleCampaigns(format!(
            "configuration differs: {ca:?} vs {cb:?}"
        )));
    }
    if a.seed != b.seed {
        return Err(Error::IncompatibleCampaigns(format!(
            "seed {} vs {}",
            a.seed, b.seed
        )));
    }
    Ok(CampaignSummary::from_tally(
        &ca,
        a.seed,
        a.tally.merge(b.tally),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(p_tp: f64, p_fp: f64) -> ClickModel {
        ClickModel::new(p_tp, p_fp).unwrap()
    }

    #[test]
    fn certain_detection_takes_r_shots() {
        let mut rng = trial_stream(7, 0);
        let rec = run_trial(&model(1.0, 0.0), 4, DecisionRule::RClicks(3), &mut rng);
        assert_eq!(
            rec,
            TrialRecord {
                verdict: Verdict::Correct,
                transmissions: 3,
                photons: 12
            }
        );
    }

    #[test]
    fn always_clicking_false_positions_tie() {
        // p_fp just below one: with d = 3 both empty positions almost always
        // click together on the first shot.
        let mut ties = 0;
        for t in 0..200 {
            let mut rng = trial_stream(1, t);
            let rec = run_trial(
                &model(1e-9, 1.0 - 1e-12),
                3,
                DecisionRule::FirstClick,
                &mut rng,
            );
            assert_eq!(rec.transmissions, 1);
            ties += (rec.verdict == Verdict::Tie) as u32;
        }
        assert_eq!(ties, 200);
    }

    #[test]
    fn truncated_rule_exhausts() {
        let mut rng = trial_stream(3, 0);
        let rec = run_trial(
            &model(1e-12, 0.0),
            2,
            DecisionRule::TruncatedFirstClick(5),
            &mut rng,
        );
        assert_eq!(rec.verdict, Verdict::Exhausted);
        assert_eq!(rec.transmissions, 5);
        assert_eq!(rec.photons, 10);
    }

    #[test]
    fn fixed_shots_runs_full_budget() {
        for t in 0..50 {
            let mut rng = trial_stream(9, t);
            let rec = run_trial(&model(0.5, 0.0), 3, DecisionRule::FixedShots(6), &mut rng);
            assert_eq!(rec.transmissions, 6);
            assert_ne!(rec.verdict, Verdict::WrongPosition);
            assert_ne!(rec.verdict, Verdict::Tie);
        }
    }

    #[test]
    fn no_ties_or_wrong_verdicts_without_false_positives() {
        let s = run_campaign(&model(0.2, 0.0), 5, DecisionRule::RClicks(2), 20_000, 11, 1).unwrap();
        assert_eq!(s.tally.ties, 0);
        assert_eq!(s.tally.wrong_position, 0);
        assert_eq!(s.errors, 0);
    }

    #[test]
    fn fixed_shots_rejected_with_false_positives() {
        assert!(matches!(
            Campaign::new(model(0.5, 0.1), 2, DecisionRule::FixedShots(3)),
            Err(Error::UnsupportedCombination { .. })
        ));
    }

    #[test]
    fn stream_is_pure_function_of_seed_and_trial() {
        let a: Vec<u64> = (0..8).map(|_| trial_stream(5, 42).random()).collect();
        let mut r1 = trial_stream(5, 42);
        let mut r2 = trial_stream(5, 42);
        let mut r3 = trial_stream(5, 43);
        let x: u64 = r1.random();
        assert_eq!(x, r2.random::<u64>());
        assert_ne!(x, r3.random::<u64>());
        assert!(a.iter().all(|&v| v == a[0]));
    }

    #[test]
    fn summary_invariants() {
        let s = run_campaign(&model(0.4, 0.05), 4, DecisionRule::RClicks(2), 10_000, 3, 2).unwrap();
        assert!(s.errors <= s.trials);
        assert!(s.ci_low <= s.error_rate && s.error_rate <= s.ci_high);
        assert_eq!(s.mean_photons, s.mean_transmissions * 4.0);
        assert_eq!(s.tally.trials, 10_000);
    }

    #[test]
    fn worker_count_does_not_change_result() {
        let c = Campaign::new(model(0.3, 0.02), 5, DecisionRule::RClicks(2)).unwrap();
        let one = c.run(30_000, 99, 1).unwrap();
        let many = c.run(30_000, 99, 8).unwrap();
        assert_eq!(one, many);
    }

    #[test]
    fn merge_identity_and_associativity() {
        let c = Campaign::new(model(0.3, 0.05), 3, DecisionRule::FirstClick).unwrap();
        let a = c.run_range(0, 5_000, 1, 1).unwrap();
        let b = c.run_range(5_000, 7_000, 1, 1).unwrap();
        let d = c.run_range(12_000, 3_000, 1, 1).unwrap();
        let empty = CampaignSummary::empty(&c, 1);

        assert_eq!(merge_summaries(&a, &empty).unwrap(), a);
        let left = merge_summaries(&merge_summaries(&a, &b).unwrap(), &d).unwrap();
        let right = merge_summaries(&a, &merge_summaries(&b, &d).unwrap()).unwrap();
        assert_eq!(left, right);
        assert_eq!(
            merge_summaries(&b, &a).unwrap(),
            merge_summaries(&a, &b).unwrap()
        );
        assert_eq!(left, c.run(15_000, 1, 1).unwrap());
    }

    #[test]
    fn merge_rejects_mismatch() {
        let c1 = Campaign::new(model(0.3, 0.05), 3, DecisionRule::FirstClick).unwrap();
        let c2 = Campaign::new(model(0.3, 0.05), 3, DecisionRule::RClicks(2)).unwrap();
        let a = c1.run(100, 1, 1).unwrap();
        let b = c2.run(100, 1, 1).unwrap();
        let c = c1.run(100, 2, 1).unwrap();
        assert!(matches!(
            merge_summaries(&a, &b),
            Err(Error::IncompatibleCampaigns(_))
        ));
        assert!(matches!(
            merge_summaries(&a, &c),
            Err(Error::IncompatibleCampaigns(_))
        ));
    }

    #[test]
    fn rejects_degenerate_campaigns() {
        let c = Campaign::new(model(0.3, 0.0), 3, DecisionRule::FirstClick).unwrap();
        assert!(c.run(0, 1, 1).is_err());
        assert!(c.run(10, 1, 0).is_err());
        assert!(c.with_z(0.0).is_err());
        assert!(Campaign::new(model(0.3, 0.0), 1, DecisionRule::FirstClick).is_err());
    }
}
