//! Building-driven blockage: the exponential LoS model `p(r) = exp(-beta r)`
//! and the blockage rate `beta` derived from footprint statistics.

use rand::Rng;

use crate::error::{Error, Result};

/// Aggregate statistics of a set of building footprints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildingStats {
    mean_area: f64,
    coverage_fraction: f64,
    mean_perimeter: f64,
}

impl BuildingStats {
    pub fn new(mean_area: f64, coverage_fraction: f64, mean_perimeter: f64) -> Result<Self> {
        if !(mean_area.is_finite() && mean_area > 0.0) {
            return Err(Error::invalid(format!("mean building area must be > 0, got {mean_area}")));
        }
        if !(0.0..1.0).contains(&coverage_fraction) {
            return Err(Error::invalid(format!(
                "building coverage fraction must lie in [0, 1), got {coverage_fraction}"
            )));
        }
        if !(mean_perimeter.is_finite() && mean_perimeter > 0.0) {
            return Err(Error::invalid(format!(
                "mean building perimeter must be > 0, got {mean_perimeter}"
            )));
        }
        Ok(Self { mean_area, coverage_fraction, mean_perimeter })
    }

    /// Mean footprint area in m².
    pub fn mean_area(&self) -> f64 {
        self.mean_area
    }

    /// Fraction of the region covered by buildings.
    pub fn coverage_fraction(&self) -> f64 {
        self.coverage_fraction
    }

    /// Mean footprint perimeter in m.
    pub fn mean_perimeter(&self) -> f64 {
        self.mean_perimeter
    }
}

/// A named blockage environment.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentPreset {
    pub name: String,
    pub beta: f64,
}

/// Low-blockage suburban campus.
pub const NC_BETA: f64 = 0.0014;
/// Dense downtown.
pub const CC_BETA: f64 = 0.0224;

impl EnvironmentPreset {
    pub fn new(name: impl Into<String>, beta: f64) -> Result<Self> {
        check_beta(beta)?;
        Ok(Self { name: name.into(), beta })
    }

    pub fn nc() -> Self {
        Self { name: "nc".into(), beta: NC_BETA }
    }

    pub fn cc() -> Self {
        Self { name: "cc".into(), beta: CC_BETA }
    }

    /// Looks up a built-in preset by (case-insensitive) name.
    pub fn builtin(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "nc" => Some(Self::nc()),
            "cc" => Some(Self::cc()),
            _ => None,
        }
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::invalid(format!("blockage rate beta must be >= 0, got {beta}")));
    }
    Ok(())
}

/// `beta = -perimeter * ln(1 - kappa) / (pi * area)`, in m⁻¹.
pub fn beta_from_stats(stats: &BuildingStats) -> Result<f64> {
    let kappa = stats.coverage_fraction();
    if kappa >= 1.0 {
        return Err(Error::invalid("coverage fraction >= 1 makes the blockage rate diverge"));
    }
    Ok(-stats.mean_perimeter() * (-kappa).ln_1p() / (std::f64::consts::PI * stats.mean_area()))
}

pub fn los_probability(r: f64, beta: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::invalid(format!("link distance must be >= 0, got {r}")));
    }
    check_beta(beta)?;
    Ok((-beta * r).exp())
}

/// Bernoulli LoS draw; consumes exactly one uniform variate.
pub fn sample_los<R: Rng + ?Sized>(r: f64, beta: f64, rng: &mut R) -> Result<bool> {
    let p = los_probability(r, beta)?;
    let u: f64 = rng.random();
    Ok(u < p)
}
