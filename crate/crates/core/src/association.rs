//! Maximum biased received power association, evaluated independently for
//! the downlink and the uplink, and the resulting decoupling classification.

use std::fmt;

use crate::channel::LinkState;
use crate::error::{Error, Result};
use crate::geometry::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tier {
    Macro,
    SmallMmWave,
    SmallUhf,
}

impl Tier {
    pub const ALL: [Tier; 3] = [Tier::Macro, Tier::SmallMmWave, Tier::SmallUhf];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Tier::Macro => "macro",
            Tier::SmallMmWave => "scell_mmwave",
            Tier::SmallUhf => "scell_uhf",
        }
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Band {
    Uhf,
    MmWave,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TierConfig {
    pub tier: Tier,
    pub band: Band,
    pub tx_power_dl_dbm: f64,
    pub freq: f64,
    pub bandwidth_dl: f64,
    pub bandwidth_ul: f64,
    pub bias_dl_db: f64,
    pub bias_ul_db: f64,
    /// Maximum BS antenna gain, applied to both directions.
    pub antenna_gain_db: f64,
}

impl TierConfig {
    pub fn default_macro() -> Self {
        Self {
            tier: Tier::Macro,
            band: Band::Uhf,
            tx_power_dl_dbm: 46.0,
            freq: 2.4e9,
            bandwidth_dl: 20e6,
            bandwidth_ul: 20e6,
            bias_dl_db: 0.0,
            bias_ul_db: 0.0,
            antenna_gain_db: 0.0,
        }
    }

    pub fn default_small_mmwave() -> Self {
        Self {
            tier: Tier::SmallMmWave,
            band: Band::MmWave,
            tx_power_dl_dbm: 30.0,
            freq: 73e9,
            bandwidth_dl: 1e9,
            bandwidth_ul: 1e9,
            bias_dl_db: 5.0,
            bias_ul_db: 0.0,
            antenna_gain_db: 18.0,
        }
    }

    pub fn default_small_uhf() -> Self {
        Self {
            tier: Tier::SmallUhf,
            band: Band::Uhf,
            tx_power_dl_dbm: 30.0,
            freq: 2.4e9,
            bandwidth_dl: 20e6,
            bandwidth_ul: 20e6,
            bias_dl_db: 0.0,
            bias_ul_db: 0.0,
            antenna_gain_db: 0.0,
        }
    }
}

/// Radio configuration of all three tiers, indexed by [`Tier`].
#[derive(Debug, Clone, PartialEq)]
pub struct Tiers([TierConfig; 3]);

impl Default for Tiers {
    fn default() -> Self {
        Self([
            TierConfig::default_macro(),
            TierConfig::default_small_mmwave(),
            TierConfig::default_small_uhf(),
        ])
    }
}

impl Tiers {
    pub fn new(macro_: TierConfig, small_mmwave: TierConfig, small_uhf: TierConfig) -> Result<Self> {
        let tiers = Self([macro_, small_mmwave, small_uhf]);
        tiers.validate()?;
        Ok(tiers)
    }

    pub fn get(&self, tier: Tier) -> &TierConfig {
        &self.0[tier.index()]
    }

    pub fn get_mut(&mut self, tier: Tier) -> &mut TierConfig {
        &mut self.0[tier.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = &TierConfig> {
        self.0.iter()
    }

    pub fn validate(&self) -> Result<()> {
        for (tier, cfg) in Tier::ALL.iter().zip(&self.0) {
            if cfg.tier != *tier {
                return Err(Error::invalid(format!("tier slot {tier} holds config for {}", cfg.tier)));
            }
            let expected = if *tier == Tier::SmallMmWave { Band::MmWave } else { Band::Uhf };
            if cfg.band != expected {
                return Err(Error::invalid(format!("tier {tier} must operate on the {expected:?} band")));
            }
            for (name, bw) in [("bandwidth_dl", cfg.bandwidth_dl), ("bandwidth_ul", cfg.bandwidth_ul)] {
                if !(bw.is_finite() && bw > 0.0) {
                    return Err(Error::invalid(format!("{tier} {name} must be > 0, got {bw}")));
                }
            }
            for (name, v) in [
                ("tx_power_dl_dbm", cfg.tx_power_dl_dbm),
                ("bias_dl_db", cfg.bias_dl_db),
                ("bias_ul_db", cfg.bias_ul_db),
                ("antenna_gain_db", cfg.antenna_gain_db),
            ] {
                if !v.is_finite() {
                    return Err(Error::invalid(format!("{tier} {name} must be finite")));
                }
            }
            if !(cfg.freq.is_finite() && cfg.freq > 0.0) {
                return Err(Error::invalid(format!("{tier} carrier frequency must be > 0")));
            }
        }
        if self.get(Tier::Macro).freq != self.get(Tier::SmallUhf).freq {
            return Err(Error::invalid("macro and UHF small cells must share one carrier frequency"));
        }
        Ok(())
    }
}

/// Index of a base station within a deployment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BsId(pub usize);

impl fmt::Display for BsId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bs#{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseStation {
    pub tier: Tier,
    pub position: Point,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssociationResult {
    pub ue: usize,
    pub dl_bs: BsId,
    pub ul_bs: BsId,
    pub dl_tier: Tier,
    pub ul_tier: Tier,
    pub decoupled: bool,
}

/// DL association metric in dBm: `P_tx + G + bias - L`.
#[inline]
pub fn biased_rx_power_dl(tx_power_dl_dbm: f64, gain_db: f64, bias_dl_db: f64, path_loss_db: f64) -> f64 {
    tx_power_dl_dbm + gain_db + bias_dl_db - path_loss_db
}

/// UL association metric in dBm, with the UE's own transmit power.
#[inline]
pub fn biased_rx_power_ul(ue_tx_power_dbm: f64, gain_db: f64, bias_ul_db: f64, path_loss_db: f64) -> f64 {
    ue_tx_power_dbm + gain_db + bias_ul_db - path_loss_db
}

/// Realised loss of a link with its fading gain folded in, dB.
#[inline]
pub fn effective_loss_db(link: &LinkState) -> f64 {
    link.path_loss_db - 10.0 * link.fading_power.log10()
}

/// DL metric of a UE toward `bs`, using that link's realised draws.
#[inline]
pub fn dl_metric(link: &LinkState, cfg: &TierConfig) -> f64 {
    biased_rx_power_dl(cfg.tx_power_dl_dbm, cfg.antenna_gain_db, cfg.bias_dl_db, effective_loss_db(link))
}

#[inline]
pub fn ul_metric(link: &LinkState, cfg: &TierConfig, ue_tx_power_dbm: f64) -> f64 {
    biased_rx_power_ul(ue_tx_power_dbm, cfg.antenna_gain_db, cfg.bias_ul_db, effective_loss_db(link))
}

fn argmax(candidates: &[BsId], mut metric: impl FnMut(BsId) -> f64) -> Result<BsId> {
    let mut best: Option<(BsId, f64)> = None;
    for &id in candidates {
        let m = metric(id);
        best = match best {
            Some((b, bm)) if !(m > bm || (m == bm && id < b)) => Some((b, bm)),
            _ => Some((id, m)),
        };
    }
    best.map(|(id, _)| id).ok_or(Error::NoCandidate)
}

/// DL serving BS: argmax of the biased DL metric, ties to the lowest index.
/// `links[id.0]` must hold the UE's link toward base station `id`.
pub fn associate_dl(candidates: &[BsId], links: &[LinkState], bss: &[BaseStation], tiers: &Tiers) -> Result<BsId> {
    argmax(candidates, |id| dl_metric(&links[id.0], tiers.get(bss[id.0].tier)))
}

/// UL serving BS: argmax of the biased UL metric, ties to the lowest index.
pub fn associate_ul(
    candidates: &[BsId],
    links: &[LinkState],
    bss: &[BaseStation],
    tiers: &Tiers,
    ue_tx_power_dbm: f64,
) -> Result<BsId> {
    argmax(candidates, |id| ul_metric(&links[id.0], tiers.get(bss[id.0].tier), ue_tx_power_dbm))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coupling {
    Coupled,
    Decoupled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decoupling {
    pub coupling: Coupling,
    pub dl_tier: Tier,
    pub ul_tier: Tier,
}

pub fn classify_decoupling(dl_bs: BsId, ul_bs: BsId, bss: &[BaseStation]) -> Result<Decoupling> {
    let tier_of = |id: BsId| {
        bss.get(id.0)
            .map(|b| b.tier)
            .ok_or_else(|| Error::invalid(format!("{id} is not part of the deployment")))
    };
    Ok(Decoupling {
        coupling: if dl_bs == ul_bs { Coupling::Coupled } else { Coupling::Decoupled },
        dl_tier: tier_of(dl_bs)?,
        ul_tier: tier_of(ul_bs)?,
    })
}
