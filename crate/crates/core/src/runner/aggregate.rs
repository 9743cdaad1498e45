//! Pooling of per-UE trial records into coverage, decoupling and rate
//! statistics.

use crate::association::Tier;
use crate::error::{Error, Result};

use super::trial::TrialMetrics;

/// Two-sided 95% normal quantile.
const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateMetrics {
    /// Trials requested.
    pub n_trials: usize,
    /// Trials that contributed at least one UE.
    pub n_trials_used: usize,
    pub n_ue_total: usize,
    /// Coverage with decoupled association.
    pub c1: f64,
    pub c1_ci: f64,
    /// Coverage with coupled association.
    pub c2: f64,
    pub c2_ci: f64,
    /// `c1 / c2`; `None` when `c2 == 0`.
    pub coverage_gain: Option<f64>,
    pub frac_decoupled: f64,
    pub frac_decoupled_ci: f64,
    /// Association shares per tier, indexed by [`Tier::index`].
    pub share_dl: [f64; 3],
    pub share_ul: [f64; 3],
    pub mean_rate_dl_bps: f64,
    pub mean_rate_ul_dude_bps: f64,
    pub mean_rate_ul_coupled_bps: f64,
    pub median_rate_ul_dude_bps: f64,
    pub median_rate_ul_coupled_bps: f64,
}

/// Sum and per-trial means of one per-UE quantity.
struct Pooled {
    sum: f64,
    trial_means: Vec<f64>,
}

impl Pooled {
    fn new(capacity: usize) -> Self {
        Self { sum: 0.0, trial_means: Vec::with_capacity(capacity) }
    }

    fn push_trial(&mut self, values: impl Iterator<Item = f64>) {
        let (mut s, mut n) = (0.0, 0usize);
        for v in values {
            s += v;
            n += 1;
        }
        self.sum += s;
        self.trial_means.push(s / n as f64);
    }

    fn mean(&self, n: usize) -> f64 {
        self.sum / n as f64
    }

    /// Normal-approximation 95% half-width over per-trial means; NaN with
    /// fewer than two trials.
    fn half_width(&self) -> f64 {
        let k = self.trial_means.len();
        if k < 2 {
            return f64::NAN;
        }
        let m = self.trial_means.iter().sum::<f64>() / k as f64;
        let var = self.trial_means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (k - 1) as f64;
        Z_95 * (var / k as f64).sqrt()
    }
}

fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 { values[n / 2] } else { 0.5 * (values[n / 2 - 1] + values[n / 2]) }
}

fn indicator(b: bool) -> f64 {
    if b { 1.0 } else { 0.0 }
}

/// Pools every UE record across trials. Empty trials are skipped.
pub fn aggregate(trials: &[TrialMetrics], n_trials: usize) -> Result<AggregateMetrics> {
    let used: Vec<&TrialMetrics> = trials.iter().filter(|t| !t.is_empty()).collect();
    if used.is_empty() {
        return Err(Error::invalid("no trial produced any UE; nothing to aggregate"));
    }
    let k = used.len();
    let n_ue_total: usize = used.iter().map(|t| t.records.len()).sum();

    let mut c1 = Pooled::new(k);
    let mut c2 = Pooled::new(k);
    let mut dec = Pooled::new(k);
    let mut rate_dl = 0.0;
    let mut rate_ul_dude = 0.0;
    let mut rate_ul_coupled = 0.0;
    let mut dl_counts = [0usize; 3];
    let mut ul_counts = [0usize; 3];
    let mut ul_dude_all = Vec::with_capacity(n_ue_total);
    let mut ul_coupled_all = Vec::with_capacity(n_ue_total);

    for t in &used {
        c1.push_trial(t.records.iter().map(|r| indicator(r.covered_dude)));
        c2.push_trial(t.records.iter().map(|r| indicator(r.covered_coupled)));
        dec.push_trial(t.records.iter().map(|r| indicator(r.decoupled)));
        for r in &t.records {
            rate_dl += r.rate_dl_bps;
            rate_ul_dude += r.rate_ul_dude_bps;
            rate_ul_coupled += r.rate_ul_coupled_bps;
            dl_counts[r.dl_tier.index()] += 1;
            ul_counts[r.ul_tier.index()] += 1;
            ul_dude_all.push(r.rate_ul_dude_bps);
            ul_coupled_all.push(r.rate_ul_coupled_bps);
        }
    }

    let n = n_ue_total as f64;
    let c1_mean = c1.mean(n_ue_total);
    let c2_mean = c2.mean(n_ue_total);
    Ok(AggregateMetrics {
        n_trials,
        n_trials_used: k,
        n_ue_total,
        c1: c1_mean,
        c1_ci: c1.half_width(),
        c2: c2_mean,
        c2_ci: c2.half_width(),
        coverage_gain: (c2_mean > 0.0).then(|| c1_mean / c2_mean),
        frac_decoupled: dec.mean(n_ue_total),
        frac_decoupled_ci: dec.half_width(),
        share_dl: Tier::ALL.map(|t| dl_counts[t.index()] as f64 / n),
        share_ul: Tier::ALL.map(|t| ul_counts[t.index()] as f64 / n),
        mean_rate_dl_bps: rate_dl / n,
        mean_rate_ul_dude_bps: rate_ul_dude / n,
        mean_rate_ul_coupled_bps: rate_ul_coupled / n,
        median_rate_ul_dude_bps: median(ul_dude_all),
        median_rate_ul_coupled_bps: median(ul_coupled_all),
    })
}
