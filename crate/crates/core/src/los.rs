//! ITU-R product-form line-of-sight probability for air-to-ground links.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Built-up statistics of a propagation environment.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    pub name: String,
    /// Fraction of land covered by buildings, in [0, 1].
    pub alpha: f64,
    /// Mean number of buildings per km².
    pub kappa: f64,
    /// Building-height distribution parameter, meters.
    pub gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnvironmentPreset {
    Suburban,
    Urban,
    DenseUrban,
    HighriseUrban,
}

impl EnvironmentPreset {
    pub const ALL: [EnvironmentPreset; 4] = [
        EnvironmentPreset::Suburban,
        EnvironmentPreset::Urban,
        EnvironmentPreset::DenseUrban,
        EnvironmentPreset::HighriseUrban,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EnvironmentPreset::Suburban => "suburban",
            EnvironmentPreset::Urban => "urban",
            EnvironmentPreset::DenseUrban => "dense-urban",
            EnvironmentPreset::HighriseUrban => "highrise-urban",
        }
    }

    /// `(alpha, kappa, gamma)`.
    pub fn parameters(self) -> (f64, f64, f64) {
        match self {
            EnvironmentPreset::Suburban => (0.1, 750.0, 8.0),
            EnvironmentPreset::Urban => (0.3, 500.0, 15.0),
            EnvironmentPreset::DenseUrban => (0.5, 300.0, 20.0),
            EnvironmentPreset::HighriseUrban => (0.5, 300.0, 50.0),
        }
    }

    pub fn environment(self) -> Environment {
        let (alpha, kappa, gamma) = self.parameters();
        Environment {
            name: self.name().to_string(),
            alpha,
            kappa,
            gamma,
        }
    }
}

impl fmt::Display for EnvironmentPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EnvironmentPreset {
    type Err = Error;

    /// Accepts `dense-urban`, `dense_urban` and `dense urban` alike.
    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .trim()
            .to_ascii_lowercase()
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect();
        match key.as_str() {
            "suburban" => Ok(EnvironmentPreset::Suburban),
            "urban" => Ok(EnvironmentPreset::Urban),
            "denseurban" => Ok(EnvironmentPreset::DenseUrban),
            "highriseurban" | "highrise" => Ok(EnvironmentPreset::HighriseUrban),
            _ => Err(Error::invalid(format!("unknown environment `{s}`"))),
        }
    }
}

impl Environment {
    pub fn new(name: impl Into<String>, alpha: f64, kappa: f64, gamma: f64) -> Result<Self> {
        let env = Self {
            name: name.into(),
            alpha,
            kappa,
            gamma,
        };
        env.validate()?;
        Ok(env)
    }

    pub fn preset(p: EnvironmentPreset) -> Self {
        p.environment()
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::invalid(format!(
                "alpha must lie in [0, 1], got {}",
                self.alpha
            )));
        }
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(Error::invalid(format!(
                "kappa must be positive, got {}",
                self.kappa
            )));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::invalid(format!(
                "gamma must be positive, got {}",
                self.gamma
            )));
        }
        Ok(())
    }
}

/// Number of buildings `M = ⌊r √(ακ)⌋ − 1` between two nodes `r` km apart.
/// `-1` means none.
pub fn building_count(ground_distance_km: f64, env: &Environment) -> i64 {
    (ground_distance_km * (env.alpha * env.kappa).sqrt()).floor() as i64 - 1
}

/// Probability that none of the `M + 1` buildings sampled along the ground
/// path blocks the straight line between heights `h_tx` and `h_rx`.
pub fn los_probability(h_tx: f64, h_rx: f64, ground_distance_km: f64, env: &Environment) -> f64 {
    let m = building_count(ground_distance_km, env);
    if m < 0 {
        return 1.0;
    }
    let count = (m + 1) as f64;
    let two_gamma_sq = 2.0 * env.gamma * env.gamma;
    let p: f64 = (0..=m)
        .map(|i| {
            let h = h_tx - (i as f64 + 0.5) * (h_tx - h_rx) / count;
            // 1 - exp(-x) without cancellation for small x
            (-(-h * h / two_gamma_sq).exp_m1()).clamp(0.0, 1.0)
        })
        .product();
    p.clamp(0.0, 1.0)
}
