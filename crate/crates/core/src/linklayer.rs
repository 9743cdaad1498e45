//! Link budgets: received power, co-channel interference sums, SINR,
//! Shannon rate and the two-sided (DL and UL) coverage test.
//!
//! Only the macro and UHF small-cell tiers share a carrier and interfere with
//! each other. mmWave links are treated as noise-limited. DL and UL occupy
//! disjoint bands, so interference is never summed across directions.

use crate::association::{Band, BaseStation, BsId, Tiers};
use crate::channel::{dbm_to_mw, LinkState, LinkTable};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub rx_power_mw: f64,
    pub interference_mw: f64,
    pub noise_mw: f64,
    pub sinr: f64,
    pub rate_bps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageVerdict {
    pub rate_dl_bps: f64,
    pub rate_ul_bps: f64,
    pub covered: bool,
}

impl CoverageVerdict {
    pub fn new(rate_dl_bps: f64, rate_ul_bps: f64, r_min_bps: f64) -> Self {
        Self { rate_dl_bps, rate_ul_bps, covered: is_covered(rate_dl_bps, rate_ul_bps, r_min_bps) }
    }
}

/// `10^((P_tx + G - L)/10) * h`, in mW.
#[inline]
pub fn received_power(tx_power_dbm: f64, fading_power: f64, gain_db: f64, path_loss_db: f64) -> f64 {
    dbm_to_mw(tx_power_dbm + gain_db - path_loss_db) * fading_power
}

/// Received power over one realised link.
#[inline]
pub(crate) fn link_power(tx_power_dbm: f64, gain_db: f64, link: &LinkState) -> f64 {
    received_power(tx_power_dbm, link.fading_power, gain_db, link.path_loss_db)
}

/// DL interference at a UE served by the UHF base station `serving`: every
/// other macro or UHF small cell contributes. `links` is the UE's row.
pub fn dl_interference(links: &[LinkState], serving: BsId, bss: &[BaseStation], tiers: &Tiers) -> f64 {
    bss.iter()
        .enumerate()
        .filter(|&(q, bs)| q != serving.0 && tiers.get(bs.tier).band == Band::Uhf)
        .map(|(q, bs)| {
            let cfg = tiers.get(bs.tier);
            link_power(cfg.tx_power_dl_dbm, cfg.antenna_gain_db, &links[q])
        })
        .sum()
}

/// UL interference at `serving` against `tagged_ue`: every other UE whose
/// UL association (`ul_assoc[ue]`) is a macro or UHF small cell contributes its
/// power as received at `serving`.
pub fn ul_interference(
    serving: BsId,
    tagged_ue: usize,
    ul_assoc: &[BsId],
    links: &LinkTable,
    bss: &[BaseStation],
    tiers: &Tiers,
    ue_tx_power_dbm: f64,
) -> f64 {
    let gain = tiers.get(bss[serving.0].tier).antenna_gain_db;
    ul_assoc
        .iter()
        .enumerate()
        .filter(|&(y, bs)| y != tagged_ue && tiers.get(bss[bs.0].tier).band == Band::Uhf)
        .map(|(y, _)| link_power(ue_tx_power_dbm, gain, links.get(y, serving.0)))
        .sum()
}

/// Per-BS cache of UL interferer contributions. Summation order matches
/// [`ul_interference`] so both routes return identical values.
pub(crate) struct UlInterference<'a> {
    ul_assoc: &'a [BsId],
    links: &'a LinkTable,
    bss: &'a [BaseStation],
    tiers: &'a Tiers,
    ue_tx_power_dbm: f64,
    /// Indices of UEs UL-associated to a UHF tier, ascending.
    interferers: Vec<usize>,
    per_bs: Vec<Option<Vec<f64>>>,
}

impl<'a> UlInterference<'a> {
    pub(crate) fn new(
        ul_assoc: &'a [BsId],
        links: &'a LinkTable,
        bss: &'a [BaseStation],
        tiers: &'a Tiers,
        ue_tx_power_dbm: f64,
    ) -> Self {
        let interferers = ul_assoc
            .iter()
            .enumerate()
            .filter(|(_, bs)| tiers.get(bss[bs.0].tier).band == Band::Uhf)
            .map(|(y, _)| y)
            .collect();
        Self { ul_assoc, links, bss, tiers, ue_tx_power_dbm, interferers, per_bs: vec![None; bss.len()] }
    }

    pub(crate) fn at(&mut self, serving: BsId, tagged_ue: usize) -> f64 {
        debug_assert!(self.ul_assoc.len() == self.links.n_ue());
        let contributions = self.per_bs[serving.0].get_or_insert_with(|| {
            let gain = self.tiers.get(self.bss[serving.0].tier).antenna_gain_db;
            self.interferers
                .iter()
                .map(|&y| link_power(self.ue_tx_power_dbm, gain, self.links.get(y, serving.0)))
                .collect()
        });
        self.interferers
            .iter()
            .zip(contributions.iter())
            .filter(|(&y, _)| y != tagged_ue)
            .map(|(_, &p)| p)
            .sum()
    }
}

/// `rx / (I + N)` on UHF, `rx / N` on mmWave regardless of `interference_mw`.
pub fn sinr(rx_mw: f64, interference_mw: f64, noise_mw: f64, band: Band) -> Result<f64> {
    if !(noise_mw > 0.0) {
        return Err(Error::invalid(format!("noise power must be > 0, got {noise_mw} mW")));
    }
    Ok(match band {
        Band::Uhf => rx_mw / (interference_mw + noise_mw),
        Band::MmWave => rx_mw / noise_mw,
    })
}

pub fn shannon_rate(sinr: f64, bandwidth: f64) -> f64 {
    bandwidth * sinr.ln_1p() / std::f64::consts::LN_2
}

/// Covered iff both directions reach `r_min` (inclusive).
pub fn is_covered(rate_dl: f64, rate_ul: f64, r_min: f64) -> bool {
    rate_dl >= r_min && rate_ul >= r_min
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::association::Tier;
    use crate::geometry::Point;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn link(path_loss_db: f64, fading_power: f64) -> LinkState {
        LinkState { distance: 10.0, los: false, shadow_db: 0.0, fading_power, path_loss_db }
    }

    fn bs(tier: Tier) -> BaseStation {
        BaseStation { tier, position: Point::new(0.0, 0.0) }
    }

    #[test]
    fn received_power_examples() {
        assert_relative_eq!(received_power(30.0, 1.0, 0.0, 100.0), 1e-7, max_relative = 1e-12);
        assert_eq!(received_power(30.0, 0.0, 0.0, 100.0), 0.0);
        assert_relative_eq!(
            received_power(30.0, 1.0, 18.0, 100.0) / received_power(30.0, 1.0, 0.0, 100.0),
            63.0957,
            max_relative = 1e-5
        );
    }

    #[test]
    fn dl_interference_cases() {
        let tiers = Tiers::default();
        let alone = [bs(Tier::Macro), bs(Tier::SmallMmWave)];
        let links = [link(90.0, 1.0), link(80.0, 1.0)];
        assert_eq!(dl_interference(&links, BsId(0), &alone, &tiers), 0.0);

        let bss = [bs(Tier::Macro), bs(Tier::SmallUhf), bs(Tier::SmallMmWave), bs(Tier::SmallUhf)];
        let links = [link(100.0, 0.7), link(95.0, 1.3), link(60.0, 1.0), link(110.0, 2.0)];
        let p1 = received_power(30.0, 1.3, 0.0, 95.0);
        let p3 = received_power(30.0, 2.0, 0.0, 110.0);
        assert_eq!(dl_interference(&links, BsId(0), &bss, &tiers), p1 + p3);
    }

    fn table(n_ue: usize, n_bs: usize, rng: &mut ChaCha8Rng) -> LinkTable {
        let links = (0..n_ue * n_bs)
            .map(|_| link(rng.random_range(60.0..140.0), rng.random_range(0.01..3.0)))
            .collect();
        LinkTable::new(n_ue, n_bs, links).unwrap()
    }

    #[test]
    fn ul_interference_cases() {
        let tiers = Tiers::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let bss = [bs(Tier::Macro), bs(Tier::SmallMmWave), bs(Tier::SmallUhf)];

        let single = table(1, 3, &mut rng);
        assert_eq!(ul_interference(BsId(0), 0, &[BsId(0)], &single, &bss, &tiers, 23.0), 0.0);

        let t = table(4, 3, &mut rng);
        let all_mm = [BsId(0), BsId(1), BsId(1), BsId(1)];
        assert_eq!(ul_interference(BsId(0), 0, &all_mm, &t, &bss, &tiers, 23.0), 0.0);

        let mixed = [BsId(0), BsId(2), BsId(0), BsId(2)];
        let expected: f64 = [1, 2, 3]
            .iter()
            .map(|&y| received_power(23.0, t.get(y, 0).fading_power, 0.0, t.get(y, 0).path_loss_db))
            .sum();
        let got = ul_interference(BsId(0), 0, &mixed, &t, &bss, &tiers, 23.0);
        assert_relative_eq!(got, expected, max_relative = 1e-12);
    }

    #[test]
    fn interference_sums_match_per_link_oracle() {
        let tiers = Tiers::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let n_bs = rng.random_range(1..15);
            let n_ue = rng.random_range(1..30);
            let bss: Vec<BaseStation> =
                (0..n_bs).map(|_| bs(Tier::ALL[rng.random_range(0..3)])).collect();
            let t = table(n_ue, n_bs, &mut rng);
            let assoc: Vec<BsId> = (0..n_ue).map(|_| BsId(rng.random_range(0..n_bs))).collect();
            let mut cache = UlInterference::new(&assoc, &t, &bss, &tiers, 23.0);
            for ue in 0..n_ue {
                let serving = assoc[ue];
                let mut dl_oracle = 0.0;
                for q in 0..n_bs {
                    if q != serving.0 && bss[q].tier != Tier::SmallMmWave {
                        let cfg = tiers.get(bss[q].tier);
                        let l = t.get(ue, q);
                        dl_oracle += 10f64.powf((cfg.tx_power_dl_dbm - l.path_loss_db) / 10.0) * l.fading_power;
                    }
                }
                let dl = dl_interference(t.row(ue), serving, &bss, &tiers);
                assert!((dl - dl_oracle).abs() <= 1e-12 * dl_oracle.max(f64::MIN_POSITIVE));

                let gain = tiers.get(bss[serving.0].tier).antenna_gain_db;
                let mut ul_oracle = 0.0;
                for y in 0..n_ue {
                    if y != ue && bss[assoc[y].0].tier != Tier::SmallMmWave {
                        let l = t.get(y, serving.0);
                        ul_oracle += 10f64.powf((23.0 + gain - l.path_loss_db) / 10.0) * l.fading_power;
                    }
                }
                let ul = ul_interference(serving, ue, &assoc, &t, &bss, &tiers, 23.0);
                assert!((ul - ul_oracle).abs() <= 1e-12 * ul_oracle.max(f64::MIN_POSITIVE));
                assert_eq!(cache.at(serving, ue), ul);
            }
        }
    }

    #[test]
    fn sinr_examples() {
        assert_eq!(sinr(2.0, 0.0, 0.5, Band::Uhf).unwrap(), 4.0);
        assert_abs_diff_eq!(sinr(1.0, 1.0, 0.5, Band::Uhf).unwrap(), 2.0 / 3.0, epsilon = 1e-15);
        assert_eq!(sinr(1.0, 123.0, 0.5, Band::MmWave).unwrap(), sinr(1.0, 0.0, 0.5, Band::MmWave).unwrap());
        assert!(sinr(1.0, 0.0, 0.0, Band::Uhf).is_err());
    }

    #[test]
    fn rate_examples() {
        assert_eq!(shannon_rate(0.0, 20e6), 0.0);
        assert_relative_eq!(shannon_rate(1.0, 1e6), 1e6, max_relative = 1e-12);
        assert_relative_eq!(shannon_rate(3.0, 20e6), 40e6, max_relative = 1e-12);
    }

    #[test]
    fn coverage_examples() {
        assert!(is_covered(2e6, 2e6, 1e6));
        assert!(!is_covered(2e6, 0.5e6, 1e6));
        assert!(!is_covered(0.5e6, 2e6, 1e6));
        assert!(is_covered(1e6, 1e6, 1e6));
        assert!(CoverageVerdict::new(1e6, 1e6, 1e6).covered);
    }

    proptest! {
        #[test]
        fn sinr_monotone_in_interference(rx in 1e-12..1.0f64, n in 1e-12..1e-3f64, i1 in 0.0..1.0f64, di in 1e-6..1.0f64) {
            let a = sinr(rx, i1, n, Band::Uhf).unwrap();
            let b = sinr(rx, i1 + di, n, Band::Uhf).unwrap();
            prop_assert!(b < a);
            prop_assert_eq!(sinr(rx, i1, n, Band::MmWave).unwrap(), sinr(rx, i1 + di, n, Band::MmWave).unwrap());
        }

        #[test]
        fn rate_monotone_and_linear(s in 0.0..1e4f64, ds in 1e-3..10.0f64, bw in 1e3..1e9f64) {
            prop_assert!(shannon_rate(s + ds, bw) > shannon_rate(s, bw));
            let r = shannon_rate(s, bw);
            prop_assert!((shannon_rate(s, 3.0 * bw) - 3.0 * r).abs() <= 1e-9 * r.max(1.0));
        }
    }
}
