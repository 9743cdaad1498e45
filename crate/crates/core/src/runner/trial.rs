//! One Monte Carlo trial: sample a deployment, draw every link's channel,
//! associate each UE in both directions, and evaluate the decoupled (DUDe)
//! and coupled link budgets over the same draws.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::association::{
    associate_dl, associate_ul, classify_decoupling, ul_metric, Band, BaseStation, BsId, Coupling, Tier,
};
use crate::blockage::sample_los;
use crate::channel::{dbm_to_mw, noise_power, sample_fading_power, sample_shadowing, LinkState, LinkTable, PathLossTable};
use crate::error::{Error, Result};
use crate::geometry::{sample_ppp, wrapped_distance, Point, Window};
use crate::linklayer::{dl_interference, is_covered, link_power, shannon_rate, sinr, UlInterference};

use super::config::SimConfig;

/// Counts 32-bit words drawn from the wrapped generator.
#[derive(Debug, Clone)]
pub struct CountingRng<R> {
    inner: R,
    words: u64,
}

impl<R> CountingRng<R> {
    pub fn new(inner: R) -> Self {
        Self { inner, words: 0 }
    }

    pub fn words(&self) -> u64 {
        self.words
    }
}

impl<R: RngCore> RngCore for CountingRng<R> {
    fn next_u32(&mut self) -> u32 {
        self.words += 1;
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.words += 2;
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.words += dst.len().div_ceil(4) as u64;
        self.inner.fill_bytes(dst)
    }
}

/// Private stream of trial `trial_index`: ChaCha8 keyed by the master seed,
/// with the trial index selecting the stream.
pub fn trial_rng(master_seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial_index);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    pub window: Window,
    /// Ordered macro, mmWave small cells, UHF small cells.
    pub base_stations: Vec<BaseStation>,
    pub ues: Vec<Point>,
}

impl Deployment {
    pub fn count(&self, tier: Tier) -> usize {
        self.base_stations.iter().filter(|b| b.tier == tier).count()
    }
}

pub fn sample_deployment<R: RngCore + ?Sized>(config: &SimConfig, rng: &mut R) -> Result<Deployment> {
    let window = config.window()?;
    let mut base_stations = Vec::new();
    for tier in Tier::ALL {
        base_stations.extend(
            sample_ppp(config.intensity(tier), window, rng)?
                .into_iter()
                .map(|position| BaseStation { tier, position }),
        );
    }
    let ues = sample_ppp(config.lambda_u, window, rng)?;
    Ok(Deployment { window, base_stations, ues })
}

/// Draws one LinkState per (UE, BS), UE-major. mmWave links draw LoS then
/// shadowing (then fading if enabled); UHF links draw shadowing then fading.
pub fn draw_links<R: RngCore + ?Sized>(config: &SimConfig, deployment: &Deployment, rng: &mut R) -> Result<LinkTable> {
    let ch = &config.channel;
    let pl = PathLossTable::new(ch)?;
    let beta = config.environment.beta;
    let side = deployment.window.side();
    let mut links = Vec::with_capacity(deployment.ues.len() * deployment.base_stations.len());
    for ue in &deployment.ues {
        for bs in &deployment.base_stations {
            let distance = wrapped_distance(*ue, bs.position, side);
            let link = match config.tiers.get(bs.tier).band {
                Band::MmWave => {
                    let los = sample_los(distance, beta, rng)?;
                    let sigma = if los { ch.sigma_los_db } else { ch.sigma_nlos_db };
                    let shadow_db = sample_shadowing(sigma, rng);
                    let fading_power = if config.mmwave_fading { sample_fading_power(ch.ricean_k, rng) } else { 1.0 };
                    LinkState { distance, los, shadow_db, fading_power, path_loss_db: pl.mmwave(distance, los, shadow_db) }
                }
                Band::Uhf => {
                    let shadow_db = sample_shadowing(ch.sigma_uhf_db, rng);
                    let fading_power = sample_fading_power(ch.ricean_k, rng);
                    LinkState { distance, los: false, shadow_db, fading_power, path_loss_db: pl.uhf(distance, shadow_db) }
                }
            };
            links.push(link);
        }
    }
    LinkTable::new(deployment.ues.len(), deployment.base_stations.len(), links)
}

/// Outcome for one UE. DL quantities are shared by both modes; UL quantities
/// are reported under DUDe and under forced coupling (`ul_bs := dl_bs`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UeRecord {
    pub ue: usize,
    pub dl_bs: BsId,
    pub ul_bs: BsId,
    pub dl_tier: Tier,
    pub ul_tier: Tier,
    pub decoupled: bool,
    pub sinr_dl: f64,
    pub sinr_ul_dude: f64,
    pub sinr_ul_coupled: f64,
    pub rate_dl_bps: f64,
    pub rate_ul_dude_bps: f64,
    pub rate_ul_coupled_bps: f64,
    pub covered_dude: bool,
    pub covered_coupled: bool,
    /// Biased UL metric toward the DUDe UL BS and toward the DL BS, dBm.
    pub ul_metric_dude_dbm: f64,
    pub ul_metric_coupled_dbm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialMetrics {
    pub trial_index: u64,
    pub records: Vec<UeRecord>,
    pub bs_per_tier: [usize; 3],
    /// Random words consumed while sampling the deployment and channel.
    pub draws_sampling: u64,
    /// Random words consumed by the whole trial; equal to `draws_sampling`
    /// because both evaluation modes only read the sampled state.
    pub draws_total: u64,
}

impl TrialMetrics {
    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

pub fn run_trial(config: &SimConfig, trial_index: u64) -> Result<TrialMetrics> {
    let mut rng = CountingRng::new(trial_rng(config.master_seed, trial_index));
    let deployment = sample_deployment(config, &mut rng)?;
    run_with(config, &deployment, trial_index, &mut rng)
}

/// Runs a trial over a caller-supplied deployment; only the channel draws
/// come from the trial stream.
pub fn run_trial_on(config: &SimConfig, deployment: &Deployment, trial_index: u64) -> Result<TrialMetrics> {
    let mut rng = CountingRng::new(trial_rng(config.master_seed, trial_index));
    run_with(config, deployment, trial_index, &mut rng)
}

fn run_with(
    config: &SimConfig,
    deployment: &Deployment,
    trial_index: u64,
    rng: &mut CountingRng<ChaCha8Rng>,
) -> Result<TrialMetrics> {
    if deployment.base_stations.is_empty() {
        return Err(Error::DegenerateTrial(trial_index));
    }
    let bs_per_tier = Tier::ALL.map(|t| deployment.count(t));
    if deployment.ues.is_empty() {
        let draws = rng.words();
        return Ok(TrialMetrics { trial_index, records: Vec::new(), bs_per_tier, draws_sampling: draws, draws_total: draws });
    }
    let links = draw_links(config, deployment, rng)?;
    let draws_sampling = rng.words();
    let records = evaluate(config, deployment, &links)?;
    Ok(TrialMetrics { trial_index, records, bs_per_tier, draws_sampling, draws_total: rng.words() })
}

/// Associates every UE and evaluates both modes over fixed channel draws.
pub fn evaluate(config: &SimConfig, deployment: &Deployment, links: &LinkTable) -> Result<Vec<UeRecord>> {
    let tiers = &config.tiers;
    let bss = &deployment.base_stations;
    let n_ue = deployment.ues.len();
    let candidates: Vec<BsId> = (0..bss.len()).map(BsId).collect();

    let mut dl_assoc = Vec::with_capacity(n_ue);
    let mut ul_assoc = Vec::with_capacity(n_ue);
    for ue in 0..n_ue {
        let row = links.row(ue);
        dl_assoc.push(associate_dl(&candidates, row, bss, tiers)?);
        ul_assoc.push(associate_ul(&candidates, row, bss, tiers, config.ue_tx_power_dbm)?);
    }
    // coupled mode: UL follows DL
    let coupled_assoc = &dl_assoc;

    let mut noise_dl = [0.0; 3];
    let mut noise_ul = [0.0; 3];
    for t in Tier::ALL {
        let cfg = tiers.get(t);
        noise_dl[t.index()] = dbm_to_mw(noise_power(cfg.bandwidth_dl, config.channel.nf_ue_db)?);
        noise_ul[t.index()] = dbm_to_mw(noise_power(cfg.bandwidth_ul, config.channel.nf_bs_db)?);
    }

    let load = |assoc: &[BsId]| {
        let mut counts = vec![0usize; bss.len()];
        for bs in assoc {
            counts[bs.0] += 1;
        }
        counts
    };
    let (load_dl, load_ul, load_coupled) = if config.load_sharing {
        (load(&dl_assoc), load(&ul_assoc), load(coupled_assoc))
    } else {
        (Vec::new(), Vec::new(), Vec::new())
    };
    let share = |bw: f64, counts: &[usize], bs: BsId| {
        if config.load_sharing { bw / counts[bs.0] as f64 } else { bw }
    };

    let mut ul_dude = UlInterference::new(&ul_assoc, links, bss, tiers, config.ue_tx_power_dbm);
    let mut ul_coupled = UlInterference::new(coupled_assoc, links, bss, tiers, config.ue_tx_power_dbm);

    let ul_budget = |ue: usize, serving: BsId, cache: &mut UlInterference<'_>| -> Result<(f64, f64)> {
        let tier = bss[serving.0].tier;
        let cfg = tiers.get(tier);
        let rx = link_power(config.ue_tx_power_dbm, cfg.antenna_gain_db, links.get(ue, serving.0));
        let interference = match cfg.band {
            Band::Uhf => cache.at(serving, ue),
            Band::MmWave => 0.0,
        };
        let s = sinr(rx, interference, noise_ul[tier.index()], cfg.band)?;
        let metric = ul_metric(links.get(ue, serving.0), cfg, config.ue_tx_power_dbm);
        Ok((s, metric))
    };

    let mut records = Vec::with_capacity(n_ue);
    for ue in 0..n_ue {
        let row = links.row(ue);
        let dl_bs = dl_assoc[ue];
        let ul_bs = ul_assoc[ue];
        let class = classify_decoupling(dl_bs, ul_bs, bss)?;

        let dl_cfg = tiers.get(class.dl_tier);
        let rx_dl = link_power(dl_cfg.tx_power_dl_dbm, dl_cfg.antenna_gain_db, &row[dl_bs.0]);
        let i_dl = match dl_cfg.band {
            Band::Uhf => dl_interference(row, dl_bs, bss, tiers),
            Band::MmWave => 0.0,
        };
        let sinr_dl = sinr(rx_dl, i_dl, noise_dl[class.dl_tier.index()], dl_cfg.band)?;
        let rate_dl = shannon_rate(sinr_dl, share(dl_cfg.bandwidth_dl, &load_dl, dl_bs));

        let (sinr_ul_dude, metric_dude) = ul_budget(ue, ul_bs, &mut ul_dude)?;
        let (sinr_ul_coupled, metric_coupled) = ul_budget(ue, dl_bs, &mut ul_coupled)?;
        let rate_ul_dude = shannon_rate(sinr_ul_dude, share(tiers.get(class.ul_tier).bandwidth_ul, &load_ul, ul_bs));
        let rate_ul_coupled = shannon_rate(sinr_ul_coupled, share(dl_cfg.bandwidth_ul, &load_coupled, dl_bs));

        records.push(UeRecord {
            ue,
            dl_bs,
            ul_bs,
            dl_tier: class.dl_tier,
            ul_tier: class.ul_tier,
            decoupled: class.coupling == Coupling::Decoupled,
            sinr_dl,
            sinr_ul_dude,
            sinr_ul_coupled,
            rate_dl_bps: rate_dl,
            rate_ul_dude_bps: rate_ul_dude,
            rate_ul_coupled_bps: rate_ul_coupled,
            covered_dude: is_covered(rate_dl, rate_ul_dude, config.r_min_bps),
            covered_coupled: is_covered(rate_dl, rate_ul_coupled, config.r_min_bps),
            ul_metric_dude_dbm: metric_dude,
            ul_metric_coupled_dbm: metric_coupled,
        });
    }
    Ok(records)
}
