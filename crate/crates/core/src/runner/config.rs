//! Simulation configuration and its flat `key = value` text format.
//!
//! Every key is optional. Values are TOML scalars: quoted strings, numbers
//! (`inf` allowed for `ricean_k`), and `true`/`false`. `#` starts a comment.

use crate::association::{Tier, Tiers};
use crate::blockage::EnvironmentPreset;
use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::geometry::Window;

/// Macro BS intensity, m⁻².
pub const DEFAULT_LAMBDA_M: f64 = 9.5492e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub environment: EnvironmentPreset,
    pub window_side_m: f64,
    pub master_seed: u64,
    pub n_trials: usize,
    pub lambda_m: f64,
    /// Total small-cell intensity; split as `(1 - gamma)` mmWave and `gamma` UHF.
    pub lambda_s: f64,
    pub lambda_u: f64,
    pub gamma: f64,
    pub tiers: Tiers,
    pub channel: ChannelParams,
    pub ue_tx_power_dbm: f64,
    pub r_min_bps: f64,
    pub load_sharing: bool,
    pub mmwave_fading: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            environment: EnvironmentPreset::nc(),
            window_side_m: 3000.0,
            master_seed: 1,
            n_trials: 200,
            lambda_m: DEFAULT_LAMBDA_M,
            lambda_s: 20.0 * DEFAULT_LAMBDA_M,
            lambda_u: 1e-4,
            gamma: 0.3,
            tiers: Tiers::default(),
            channel: ChannelParams::default(),
            ue_tx_power_dbm: 23.0,
            r_min_bps: 1e6,
            load_sharing: false,
            mmwave_fading: false,
        }
    }
}

impl SimConfig {
    pub fn window(&self) -> Result<Window> {
        Window::new(self.window_side_m)
    }

    pub fn lambda_small_mmwave(&self) -> f64 {
        (1.0 - self.gamma) * self.lambda_s
    }

    pub fn lambda_small_uhf(&self) -> f64 {
        self.gamma * self.lambda_s
    }

    pub fn intensity(&self, tier: Tier) -> f64 {
        match tier {
            Tier::Macro => self.lambda_m,
            Tier::SmallMmWave => self.lambda_small_mmwave(),
            Tier::SmallUhf => self.lambda_small_uhf(),
        }
    }

    /// Keeps tier carrier frequencies in step with the channel parameters.
    pub fn sync_frequencies(&mut self) {
        self.tiers.get_mut(Tier::Macro).freq = self.channel.f_uhf_hz;
        self.tiers.get_mut(Tier::SmallUhf).freq = self.channel.f_uhf_hz;
        self.tiers.get_mut(Tier::SmallMmWave).freq = self.channel.f_mmwave_hz;
    }

    pub fn validate(&self) -> Result<()> {
        self.window()?;
        if self.n_trials < 1 {
            return Err(Error::invalid("n_trials must be >= 1"));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::invalid(format!("gamma must lie in [0, 1], got {}", self.gamma)));
        }
        for (name, l) in [("lambda_m", self.lambda_m), ("lambda_s", self.lambda_s), ("lambda_u", self.lambda_u)] {
            if !(l.is_finite() && l >= 0.0) {
                return Err(Error::invalid(format!("{name} must be >= 0, got {l}")));
            }
        }
        if !(self.environment.beta.is_finite() && self.environment.beta >= 0.0) {
            return Err(Error::invalid(format!("beta must be >= 0, got {}", self.environment.beta)));
        }
        if !self.ue_tx_power_dbm.is_finite() {
            return Err(Error::invalid("ue_tx_power_dbm must be finite"));
        }
        if !(self.r_min_bps.is_finite() && self.r_min_bps >= 0.0) {
            return Err(Error::invalid(format!("r_min_bps must be >= 0, got {}", self.r_min_bps)));
        }
        self.channel.validate()?;
        self.tiers.validate()
    }
}

const TIER_PREFIXES: [(&str, Tier); 3] = [("macro", Tier::Macro), ("smm", Tier::SmallMmWave), ("suhf", Tier::SmallUhf)];

struct Entry<'a> {
    line: usize,
    key: &'a str,
    value: toml::Value,
}

impl Entry<'_> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse { line: self.line, key: self.key.to_string(), message: message.into() }
    }

    fn float(&self) -> Result<f64> {
        match self.value {
            toml::Value::Float(f) => Ok(f),
            toml::Value::Integer(i) => Ok(i as f64),
            _ => Err(self.err(format!("expected a number, got {}", self.value.type_str()))),
        }
    }

    fn finite(&self) -> Result<f64> {
        let v = self.float()?;
        if v.is_finite() { Ok(v) } else { Err(self.err("value must be finite")) }
    }

    fn positive(&self) -> Result<f64> {
        let v = self.finite()?;
        if v > 0.0 { Ok(v) } else { Err(self.err(format!("value must be > 0, got {v}"))) }
    }

    fn non_negative(&self) -> Result<f64> {
        let v = self.finite()?;
        if v >= 0.0 { Ok(v) } else { Err(self.err(format!("value must be >= 0, got {v}"))) }
    }

    fn integer(&self) -> Result<i64> {
        match self.value {
            toml::Value::Integer(i) => Ok(i),
            _ => Err(self.err(format!("expected an integer, got {}", self.value.type_str()))),
        }
    }

    fn boolean(&self) -> Result<bool> {
        self.value.as_bool().ok_or_else(|| self.err(format!("expected true or false, got {}", self.value.type_str())))
    }

    fn string(&self) -> Result<&str> {
        self.value.as_str().ok_or_else(|| self.err(format!("expected a quoted string, got {}", self.value.type_str())))
    }
}

/// Parses the flat configuration format, filling omitted keys with defaults.
pub fn parse_config(text: &str) -> Result<SimConfig> {
    let mut cfg = SimConfig::default();
    let mut env_name: Option<(usize, String)> = None;
    let mut beta: Option<f64> = None;
    let mut seen = std::collections::HashMap::<String, usize>::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let key = trimmed.split('=').next().unwrap_or("").trim();
        let table: toml::Table = toml::from_str(trimmed).map_err(|e| Error::Parse {
            line,
            key: key.to_string(),
            message: format!("malformed entry: {}", e.message()),
        })?;
        let Some((_, value)) = table.into_iter().next() else {
            continue;
        };
        if value.is_table() || value.is_array() {
            return Err(Error::Parse { line, key: key.to_string(), message: "expected a scalar value".into() });
        }
        if let Some(prev) = seen.insert(key.to_string(), line) {
            return Err(Error::Parse { line, key: key.to_string(), message: format!("duplicate key (first set on line {prev})") });
        }
        let e = Entry { line, key, value };
        apply(&mut cfg, &e, &mut env_name, &mut beta)?;
    }

    match (env_name, beta) {
        (Some((line, name)), None) => {
            cfg.environment = EnvironmentPreset::builtin(&name).ok_or_else(|| Error::Parse {
                line,
                key: "environment".into(),
                message: format!("unknown environment `{name}`; use \"nc\", \"cc\" or set `beta`"),
            })?;
        }
        (Some((_, name)), Some(b)) => cfg.environment = EnvironmentPreset::new(name.to_ascii_lowercase(), b)?,
        (None, Some(b)) => cfg.environment = EnvironmentPreset::new("custom", b)?,
        (None, None) => {}
    }

    cfg.sync_frequencies();
    cfg.validate()?;
    Ok(cfg)
}

fn apply(cfg: &mut SimConfig, e: &Entry<'_>, env_name: &mut Option<(usize, String)>, beta: &mut Option<f64>) -> Result<()> {
    let ch = &mut cfg.channel;
    match e.key {
        "environment" => *env_name = Some((e.line, e.string()?.to_string())),
        "beta" => *beta = Some(e.non_negative()?),
        "window_side_m" => cfg.window_side_m = e.positive()?,
        "master_seed" => {
            cfg.master_seed = u64::try_from(e.integer()?).map_err(|_| e.err("seed must be >= 0"))?;
        }
        "n_trials" => {
            let n = e.integer()?;
            if n < 1 {
                return Err(e.err(format!("n_trials must be >= 1, got {n}")));
            }
            cfg.n_trials = n as usize;
        }
        "lambda_m" => cfg.lambda_m = e.non_negative()?,
        "lambda_s" => cfg.lambda_s = e.non_negative()?,
        "lambda_u" => cfg.lambda_u = e.non_negative()?,
        "gamma" => {
            let g = e.finite()?;
            if !(0.0..=1.0).contains(&g) {
                return Err(e.err(format!("gamma must lie in [0, 1], got {g}")));
            }
            cfg.gamma = g;
        }
        "ue_tx_power_dbm" => cfg.ue_tx_power_dbm = e.finite()?,
        "r_min_bps" => cfg.r_min_bps = e.non_negative()?,
        "load_sharing" => cfg.load_sharing = e.boolean()?,
        "mmwave_fading" => cfg.mmwave_fading = e.boolean()?,

        "alpha_los" | "alpha_nlos" | "alpha_uhf" => {
            let a = e.finite()?;
            if a < 1.0 {
                return Err(e.err(format!("path-loss exponent must be >= 1, got {a}")));
            }
            *match e.key {
                "alpha_los" => &mut ch.alpha_los,
                "alpha_nlos" => &mut ch.alpha_nlos,
                _ => &mut ch.alpha_uhf,
            } = a;
        }
        "sigma_los_db" => ch.sigma_los_db = e.non_negative()?,
        "sigma_nlos_db" => ch.sigma_nlos_db = e.non_negative()?,
        "sigma_uhf_db" => ch.sigma_uhf_db = e.non_negative()?,
        "f_mmwave_hz" => ch.f_mmwave_hz = e.positive()?,
        "f_uhf_hz" => ch.f_uhf_hz = e.positive()?,
        "ricean_k" => {
            let k = e.float()?;
            if !(k >= 0.0) {
                return Err(e.err(format!("ricean_k must be >= 0, got {k}")));
            }
            ch.ricean_k = k;
        }
        "nf_ue_db" => ch.nf_ue_db = e.finite()?,
        "nf_bs_db" => ch.nf_bs_db = e.finite()?,

        key => {
            let (tier, field) = TIER_PREFIXES
                .iter()
                .find_map(|(p, t)| key.strip_prefix(p).and_then(|r| r.strip_prefix('_')).map(|f| (*t, f)))
                .ok_or_else(|| e.err("unknown key"))?;
            let t = cfg.tiers.get_mut(tier);
            match field {
                "tx_power_dbm" => t.tx_power_dl_dbm = e.finite()?,
                "bias_dl_db" => t.bias_dl_db = e.finite()?,
                "bias_ul_db" => t.bias_ul_db = e.finite()?,
                "gain_db" => t.antenna_gain_db = e.finite()?,
                "bandwidth_dl_hz" => t.bandwidth_dl = e.positive()?,
                "bandwidth_ul_hz" => t.bandwidth_ul = e.positive()?,
                _ => return Err(e.err("unknown key")),
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockage::CC_BETA;

    fn parse_err(text: &str) -> (usize, String, String) {
        match parse_config(text) {
            Err(Error::Parse { line, key, message }) => (line, key, message),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn empty_document_is_all_defaults() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg, SimConfig::default());
        assert_eq!(cfg.environment.name, "nc");
        assert_eq!(cfg.environment.beta, 0.0014);
        assert_eq!(cfg.lambda_m, 9.5492e-7);
        assert_eq!(cfg.tiers.get(Tier::Macro).tx_power_dl_dbm, 46.0);
        assert_eq!(cfg.tiers.get(Tier::SmallMmWave).tx_power_dl_dbm, 30.0);
        assert_eq!(cfg.tiers.get(Tier::SmallUhf).tx_power_dl_dbm, 30.0);
        assert_eq!(cfg.r_min_bps, 1e6);
        assert_eq!(parse_config("# only a comment\n\n").unwrap(), cfg);
    }

    #[test]
    fn environment_presets() {
        let cfg = parse_config("environment = \"cc\"").unwrap();
        assert_eq!(cfg.environment.beta, CC_BETA);
        let cfg = parse_config("environment = \"campus\"\nbeta = 0.005").unwrap();
        assert_eq!(cfg.environment.name, "campus");
        assert_eq!(cfg.environment.beta, 0.005);
        let cfg = parse_config("beta = 0.01").unwrap();
        assert_eq!(cfg.environment.name, "custom");
        let (line, key, _) = parse_err("\nenvironment = \"mars\"");
        assert_eq!((line, key.as_str()), (2, "environment"));
    }

    #[test]
    fn gamma_out_of_range() {
        let (line, key, msg) = parse_err("n_trials = 3\ngamma = 1.5");
        assert_eq!((line, key.as_str()), (2, "gamma"));
        assert!(msg.contains("[0, 1]"), "{msg}");
    }

    #[test]
    fn unknown_and_mistyped_keys() {
        let (line, key, _) = parse_err("lambda_x = 3");
        assert_eq!((line, key.as_str()), (1, "lambda_x"));
        let (_, key, _) = parse_err("macro_colour = 3");
        assert_eq!(key, "macro_colour");
        let (line, key, msg) = parse_err("# c\nn_trials = \"ten\"");
        assert_eq!((line, key.as_str()), (2, "n_trials"));
        assert!(msg.contains("integer"));
        let (_, key, _) = parse_err("load_sharing = 1");
        assert_eq!(key, "load_sharing");
        let (_, key, _) = parse_err("n_trials = 0");
        assert_eq!(key, "n_trials");
        let (_, key, _) = parse_err("gamma = 0.2\ngamma = 0.3");
        assert_eq!(key, "gamma");
        let (_, key, _) = parse_err("window_side_m = ");
        assert_eq!(key, "window_side_m");
    }

    #[test]
    fn overrides_and_inline_comments() {
        let text = r#"
            # scenario
            environment = "cc"   # dense downtown
            n_trials = 50
            master_seed = 99
            gamma = 0
            lambda_s = 2e-5
            smm_bias_dl_db = 3.5
            suhf_gain_db = 2
            macro_bandwidth_ul_hz = 10e6
            ricean_k = inf
            load_sharing = true
            f_uhf_hz = 3.5e9
        "#;
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.n_trials, 50);
        assert_eq!(cfg.master_seed, 99);
        assert_eq!(cfg.gamma, 0.0);
        assert_eq!(cfg.tiers.get(Tier::SmallMmWave).bias_dl_db, 3.5);
        assert_eq!(cfg.tiers.get(Tier::SmallUhf).antenna_gain_db, 2.0);
        assert_eq!(cfg.tiers.get(Tier::Macro).bandwidth_ul, 10e6);
        assert!(cfg.channel.ricean_k.is_infinite());
        assert!(cfg.load_sharing);
        assert_eq!(cfg.tiers.get(Tier::Macro).freq, 3.5e9);
        assert_eq!(cfg.tiers.get(Tier::SmallUhf).freq, 3.5e9);
    }

    #[test]
    fn intensity_split() {
        let cfg = parse_config("gamma = 0.25\nlambda_s = 4e-5").unwrap();
        assert!((cfg.intensity(Tier::SmallMmWave) - 3e-5).abs() < 1e-18);
        assert!((cfg.intensity(Tier::SmallUhf) - 1e-5).abs() < 1e-18);
    }
}
