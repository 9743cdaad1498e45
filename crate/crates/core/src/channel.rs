//! Per-link channel: log-distance path loss for the mmWave and UHF bands,
//! lognormal shadowing, unit-mean Ricean power fading and thermal noise.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Speed of light used by the free-space reference term, m/s.
pub const SPEED_OF_LIGHT: f64 = 2.998e8;

/// Thermal noise density at room temperature, dBm/Hz.
pub const THERMAL_NOISE_DBM_PER_HZ: f64 = -174.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelParams {
    /// mmWave LoS path-loss exponent.
    pub alpha_los: f64,
    /// mmWave NLoS path-loss exponent.
    pub alpha_nlos: f64,
    pub alpha_uhf: f64,
    /// Shadowing standard deviations, dB.
    pub sigma_los_db: f64,
    pub sigma_nlos_db: f64,
    pub sigma_uhf_db: f64,
    pub f_mmwave_hz: f64,
    pub f_uhf_hz: f64,
    /// Linear Ricean K-factor; `inf` disables fading.
    pub ricean_k: f64,
    pub nf_ue_db: f64,
    pub nf_bs_db: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            alpha_los: 2.0,
            alpha_nlos: 3.3,
            alpha_uhf: 2.0,
            sigma_los_db: 5.2,
            sigma_nlos_db: 7.38,
            sigma_uhf_db: 5.0,
            f_mmwave_hz: 73e9,
            f_uhf_hz: 2.4e9,
            ricean_k: 10.0,
            nf_ue_db: 7.0,
            nf_bs_db: 5.0,
        }
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        for (name, a) in [("alpha_los", self.alpha_los), ("alpha_nlos", self.alpha_nlos), ("alpha_uhf", self.alpha_uhf)] {
            if !(a.is_finite() && a >= 1.0) {
                return Err(Error::invalid(format!("{name} must be >= 1, got {a}")));
            }
        }
        for (name, s) in [
            ("sigma_los_db", self.sigma_los_db),
            ("sigma_nlos_db", self.sigma_nlos_db),
            ("sigma_uhf_db", self.sigma_uhf_db),
        ] {
            if !(s.is_finite() && s >= 0.0) {
                return Err(Error::invalid(format!("{name} must be >= 0, got {s}")));
            }
        }
        for (name, f) in [("f_mmwave_hz", self.f_mmwave_hz), ("f_uhf_hz", self.f_uhf_hz)] {
            if !(f.is_finite() && f > 0.0) {
                return Err(Error::invalid(format!("{name} must be > 0, got {f}")));
            }
        }
        if !(self.ricean_k >= 0.0) {
            return Err(Error::invalid(format!("ricean_k must be >= 0, got {}", self.ricean_k)));
        }
        for (name, nf) in [("nf_ue_db", self.nf_ue_db), ("nf_bs_db", self.nf_bs_db)] {
            if !nf.is_finite() {
                return Err(Error::invalid(format!("{name} must be finite")));
            }
        }
        Ok(())
    }
}

/// Per (UE, BS) channel realisation, fixed for the duration of a trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkState {
    pub distance: f64,
    /// LoS flag; always `false` on UHF links, where it carries no meaning.
    pub los: bool,
    pub shadow_db: f64,
    pub fading_power: f64,
    /// Path loss including shadowing, dB.
    pub path_loss_db: f64,
}

/// Row-major matrix of link states, one row per UE and one column per BS.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkTable {
    n_bs: usize,
    links: Vec<LinkState>,
}

impl LinkTable {
    pub fn new(n_ue: usize, n_bs: usize, links: Vec<LinkState>) -> Result<Self> {
        if links.len() != n_ue * n_bs {
            return Err(Error::invalid(format!(
                "link table needs {} entries for {n_ue} UEs x {n_bs} BSs, got {}",
                n_ue * n_bs,
                links.len()
            )));
        }
        Ok(Self { n_bs, links })
    }

    pub fn n_bs(&self) -> usize {
        self.n_bs
    }

    pub fn n_ue(&self) -> usize {
        self.links.len().checked_div(self.n_bs).unwrap_or(0)
    }

    /// All links of one UE, indexed by BS.
    pub fn row(&self, ue: usize) -> &[LinkState] {
        &self.links[ue * self.n_bs..(ue + 1) * self.n_bs]
    }

    pub fn get(&self, ue: usize, bs: usize) -> &LinkState {
        &self.links[ue * self.n_bs + bs]
    }
}

/// Free-space reference loss at 1 m, `20 log10(4 pi f / c)`.
pub fn fixed_path_loss(freq: f64) -> Result<f64> {
    if !(freq.is_finite() && freq > 0.0) {
        return Err(Error::invalid(format!("carrier frequency must be > 0, got {freq}")));
    }
    Ok(20.0 * (4.0 * std::f64::consts::PI * freq / SPEED_OF_LIGHT).log10())
}

/// Distances below the 1 m reference are clamped to it.
#[inline]
fn distance_term(alpha: f64, r: f64) -> f64 {
    10.0 * alpha * r.max(1.0).log10()
}

pub fn path_loss_mmwave(r: f64, los: bool, shadow_db: f64, params: &ChannelParams) -> f64 {
    let fixed = fixed_path_loss(params.f_mmwave_hz).expect("validated frequency");
    let alpha = if los { params.alpha_los } else { params.alpha_nlos };
    fixed + distance_term(alpha, r) + shadow_db
}

pub fn path_loss_uhf(r: f64, shadow_db: f64, params: &ChannelParams) -> f64 {
    let fixed = fixed_path_loss(params.f_uhf_hz).expect("validated frequency");
    fixed + distance_term(params.alpha_uhf, r) + shadow_db
}

/// Path-loss evaluator with the reference terms precomputed, for the inner
/// trial loop.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PathLossTable {
    fixed_mm: f64,
    fixed_uhf: f64,
    alpha_los: f64,
    alpha_nlos: f64,
    alpha_uhf: f64,
}

impl PathLossTable {
    pub(crate) fn new(params: &ChannelParams) -> Result<Self> {
        Ok(Self {
            fixed_mm: fixed_path_loss(params.f_mmwave_hz)?,
            fixed_uhf: fixed_path_loss(params.f_uhf_hz)?,
            alpha_los: params.alpha_los,
            alpha_nlos: params.alpha_nlos,
            alpha_uhf: params.alpha_uhf,
        })
    }

    #[inline]
    pub(crate) fn mmwave(&self, r: f64, los: bool, shadow_db: f64) -> f64 {
        let alpha = if los { self.alpha_los } else { self.alpha_nlos };
        self.fixed_mm + distance_term(alpha, r) + shadow_db
    }

    #[inline]
    pub(crate) fn uhf(&self, r: f64, shadow_db: f64) -> f64 {
        self.fixed_uhf + distance_term(self.alpha_uhf, r) + shadow_db
    }
}

/// Zero-mean Gaussian in dB (lognormal in the linear domain).
pub fn sample_shadowing<R: Rng + ?Sized>(sigma_db: f64, rng: &mut R) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    sigma_db * z
}

/// Unit-mean Ricean power gain `|g|²` with K-factor `k`. Always consumes two
/// standard normal draws; `k = inf` returns exactly 1.
pub fn sample_fading_power<R: Rng + ?Sized>(k: f64, rng: &mut R) -> f64 {
    let x: f64 = rng.sample(StandardNormal);
    let y: f64 = rng.sample(StandardNormal);
    if k.is_infinite() {
        return 1.0;
    }
    let los = (k / (k + 1.0)).sqrt();
    let scatter = (0.5 / (k + 1.0)).sqrt();
    let re = los + scatter * x;
    let im = scatter * y;
    re * re + im * im
}

/// Thermal noise power in dBm over `bandwidth` Hz.
pub fn noise_power(bandwidth: f64, noise_figure_db: f64) -> Result<f64> {
    if !(bandwidth.is_finite() && bandwidth > 0.0) {
        return Err(Error::invalid(format!("bandwidth must be > 0, got {bandwidth}")));
    }
    Ok(THERMAL_NOISE_DBM_PER_HZ + 10.0 * bandwidth.log10() + noise_figure_db)
}

#[inline]
pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fixed_loss_examples() {
        let unity = SPEED_OF_LIGHT / (4.0 * std::f64::consts::PI);
        assert_abs_diff_eq!(fixed_path_loss(unity).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fixed_path_loss(2.4e9).unwrap(), 40.05, epsilon = 0.01);
        assert_abs_diff_eq!(fixed_path_loss(73e9).unwrap(), 69.71, epsilon = 0.01);
        assert!(fixed_path_loss(0.0).is_err());
        assert!(fixed_path_loss(-1.0).is_err());
    }

    #[test]
    fn path_loss_examples() {
        let p = ChannelParams::default();
        assert_abs_diff_eq!(path_loss_mmwave(1.0, true, 0.0, &p), 69.71, epsilon = 0.01);
        assert_abs_diff_eq!(path_loss_mmwave(100.0, true, 0.0, &p), 109.71, epsilon = 0.01);
        assert_abs_diff_eq!(path_loss_mmwave(100.0, false, 0.0, &p), 135.71, epsilon = 0.01);
        assert_abs_diff_eq!(path_loss_uhf(1.0, 0.0, &p), 40.05, epsilon = 0.01);
        assert_abs_diff_eq!(path_loss_uhf(100.0, 0.0, &p), 80.05, epsilon = 0.01);
        assert_abs_diff_eq!(path_loss_uhf(1000.0, 0.0, &p), 100.05, epsilon = 0.01);
    }

    #[test]
    fn sub_metre_distances_clamp() {
        let p = ChannelParams::default();
        assert_eq!(path_loss_uhf(0.0, 0.0, &p), path_loss_uhf(1.0, 0.0, &p));
        assert_eq!(path_loss_mmwave(0.3, false, 0.0, &p), path_loss_mmwave(1.0, false, 0.0, &p));
    }

    #[test]
    fn table_matches_free_functions() {
        let p = ChannelParams::default();
        let t = PathLossTable::new(&p).unwrap();
        for r in [0.5, 1.0, 37.0, 812.0] {
            assert_eq!(t.uhf(r, 1.5), path_loss_uhf(r, 1.5, &p));
            assert_eq!(t.mmwave(r, true, -2.0), path_loss_mmwave(r, true, -2.0, &p));
            assert_eq!(t.mmwave(r, false, 3.0), path_loss_mmwave(r, false, 3.0, &p));
        }
    }

    #[test]
    fn path_loss_ordering_and_monotonicity() {
        let p = ChannelParams::default();
        let mut prev = (f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for i in 0..200 {
            let r = 1.0 + i as f64 * 7.3;
            let (l, n, u) = (
                path_loss_mmwave(r, true, 0.0, &p),
                path_loss_mmwave(r, false, 0.0, &p),
                path_loss_uhf(r, 0.0, &p),
            );
            assert!(n >= l);
            if i > 0 {
                assert!(l > prev.0 && n > prev.1 && u > prev.2);
            }
            prev = (l, n, u);
            for s in [-7.0, 0.5, 12.0] {
                assert_abs_diff_eq!(path_loss_uhf(r, s, &p) - u, s, epsilon = 1e-9);
                assert_abs_diff_eq!(path_loss_mmwave(r, false, s, &p) - n, s, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn shadowing_statistics() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        assert!((0..1000).all(|_| sample_shadowing(0.0, &mut rng) == 0.0));
        let n = 100_000;
        let draws: Vec<f64> = (0..n).map(|_| sample_shadowing(5.2, &mut rng)).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let sd = (draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0)).sqrt();
        assert!((sd - 5.2).abs() / 5.2 < 0.02, "sd {sd}");
        assert!(mean.abs() < 3.0 * 5.2 / (n as f64).sqrt(), "mean {mean}");
    }

    #[test]
    fn fading_limits() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..1000 {
            assert!((sample_fading_power(1e9, &mut rng) - 1.0).abs() < 1e-3);
            assert_eq!(sample_fading_power(f64::INFINITY, &mut rng), 1.0);
            assert!(sample_fading_power(0.0, &mut rng) >= 0.0);
        }
    }

    #[test]
    fn fading_unit_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for k in [0.0, 1.0, 10.0] {
            let n = 1_000_000;
            let mean = (0..n).map(|_| sample_fading_power(k, &mut rng)).sum::<f64>() / n as f64;
            assert!((mean - 1.0).abs() < 0.01, "K={k}: mean {mean}");
        }
    }

    #[test]
    fn rayleigh_case_is_exponential() {
        // Exp(1): P(X > 1) = e^-1
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let n = 200_000;
        let tail = (0..n).filter(|_| sample_fading_power(0.0, &mut rng) > 1.0).count() as f64 / n as f64;
        let p = (-1f64).exp();
        assert!((tail - p).abs() < 3.0 * (p * (1.0 - p) / n as f64).sqrt());
    }

    #[test]
    fn noise_examples() {
        assert_abs_diff_eq!(noise_power(1.0, 0.0).unwrap(), -174.0, epsilon = 1e-12);
        assert_abs_diff_eq!(noise_power(20e6, 7.0).unwrap(), -93.99, epsilon = 0.01);
        assert_abs_diff_eq!(noise_power(1e9, 7.0).unwrap(), -77.0, epsilon = 1e-9);
        assert!(noise_power(0.0, 7.0).is_err());
    }

    #[test]
    fn param_validation() {
        assert!(ChannelParams::default().validate().is_ok());
        let bad = ChannelParams { alpha_nlos: 0.5, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = ChannelParams { sigma_uhf_db: -1.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let ok = ChannelParams { ricean_k: f64::INFINITY, ..Default::default() };
        assert!(ok.validate().is_ok());
    }
}
