//! Run configuration, read from a TOML file.
//!
//! Every key is optional; omitted keys take the reference-deployment
//! defaults. Unknown keys and out-of-range values are rejected with the key
//! path and line number.
//!
//! ```toml
//! experiment = "cdf"        # cdf | heatmap | single
//! seed = 1
//! ris = "on"                # on | off | both
//! output_dir = "out"
//!
//! [scenario]
//! carrier_hz = 28e9
//! bandwidth_hz = 20e6
//! environment = "urban"     # suburban | urban | dense-urban | highrise-urban | custom
//! # alpha, kappa, gamma override the preset (all three required for "custom")
//! tx_power_dbm = 30
//! noise_figure_db = 9
//! bs_position = [0, 0, 10]
//! ris_position = [0.5, 0.5, 9.5]
//! bs_array = "ula"          # ula | upa
//! bs_elements = 64          # ULA element count
//! bs_upa_size = [8, 8]      # used when bs_array = "upa"
//! bs_tilt_deg = 60
//! ris_size = [20, 20]
//! uav_size = [8, 8]
//! element_spacing = 0.5     # in wavelengths
//!
//! [cdf]
//! samples = 10000
//! x_range = [100, 1000]     # default [100, 2000] below 10 GHz
//! y_range = [100, 1000]
//! z = 100
//!
//! [heatmap]
//! x_range = [100, 1000]
//! y_range = [100, 1000]
//! step = 25
//! z = 100
//!
//! [single]
//! uav_position = [500, 500, 100]
//! ```

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::arrays::{ArrayConfig, UlaConfig, UpaConfig};
use crate::beamforming::PowerBudget;
use crate::channel::wavelength;
use crate::error::{Error, Result};
use crate::experiments::{
    default_range, CdfExperimentSpec, GridAxis, HeatmapExperimentSpec, DEFAULT_CDF_SAMPLES,
    DEFAULT_HEATMAP_STEP, DEFAULT_UAV_ALTITUDE,
};
use crate::geometry::Position3D;
use crate::linkrate::{
    Scenario, DEFAULT_BANDWIDTH_HZ, DEFAULT_BS_ELEMENTS, DEFAULT_BS_POSITION, DEFAULT_BS_TILT,
    DEFAULT_CARRIER_HZ, DEFAULT_NOISE_FIGURE_DB, DEFAULT_RIS_POSITION, DEFAULT_RIS_SIZE,
    DEFAULT_TX_POWER_DBM, DEFAULT_UAV_SIZE,
};
use crate::los::{Environment, EnvironmentPreset};

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_SINGLE_POSITION: [f64; 3] = [500.0, 500.0, 100.0];
const CUSTOM_ENVIRONMENT: &str = "custom";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Cdf,
    Heatmap,
    Single,
}

impl FromStr for ExperimentKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cdf" => Ok(Self::Cdf),
            "heatmap" => Ok(Self::Heatmap),
            "single" | "single-link" => Ok(Self::Single),
            _ => Err(Error::invalid(format!(
                "unknown experiment `{s}` (expected cdf, heatmap or single)"
            ))),
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Cdf => "cdf",
            Self::Heatmap => "heatmap",
            Self::Single => "single",
        })
    }
}

/// Which variants of the CDF experiment to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RisMode {
    On,
    Off,
    Both,
}

impl FromStr for RisMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "on" => Ok(Self::On),
            "off" => Ok(Self::Off),
            "both" => Ok(Self::Both),
            _ => Err(Error::invalid(format!(
                "unknown RIS mode `{s}` (expected on, off or both)"
            ))),
        }
    }
}

impl fmt::Display for RisMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::On => "on",
            Self::Off => "off",
            Self::Both => "both",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BsArrayKind {
    Ula,
    Upa,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub carrier_hz: f64,
    pub bandwidth_hz: f64,
    pub environment: String,
    pub alpha: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub tx_power_dbm: f64,
    pub noise_figure_db: f64,
    pub bs_position: [f64; 3],
    pub ris_position: [f64; 3],
    pub bs_array: BsArrayKind,
    pub bs_elements: usize,
    pub bs_upa_size: [usize; 2],
    pub bs_tilt_deg: f64,
    pub ris_size: [usize; 2],
    pub uav_size: [usize; 2],
    pub element_spacing: f64,
}

impl ScenarioConfig {
    pub fn environment(&self) -> Environment {
        Environment {
            name: self.environment.clone(),
            alpha: self.alpha,
            kappa: self.kappa,
            gamma: self.gamma,
        }
    }

    pub fn to_scenario(&self, ris_enabled: bool) -> Result<Scenario> {
        let lambda = wavelength(self.carrier_hz)?;
        let spacing = self.element_spacing * lambda;
        let bs_array: ArrayConfig = match self.bs_array {
            BsArrayKind::Ula => {
                UlaConfig::new(self.bs_elements, spacing, self.bs_tilt_deg.to_radians())?.into()
            }
            BsArrayKind::Upa => {
                UpaConfig::new(self.bs_upa_size[0], self.bs_upa_size[1], spacing, spacing)?.into()
            }
        };
        let scenario = Scenario {
            bs_position: self.bs_position.into(),
            ris_position: self.ris_position.into(),
            bs_array,
            ris_array: UpaConfig::new(self.ris_size[0], self.ris_size[1], spacing, spacing)?,
            uav_array: UpaConfig::new(self.uav_size[0], self.uav_size[1], spacing, spacing)?,
            carrier_hz: self.carrier_hz,
            bandwidth_hz: self.bandwidth_hz,
            environment: self.environment(),
            power: PowerBudget::from_dbm(
                self.tx_power_dbm,
                self.bandwidth_hz,
                self.noise_figure_db,
            )?,
            ris_enabled,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CdfConfig {
    pub samples: usize,
    pub x_range: [f64; 2],
    pub y_range: [f64; 2],
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatmapConfig {
    pub x_range: [f64; 2],
    pub y_range: [f64; 2],
    pub step: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingleConfig {
    pub uav_position: [f64; 3],
}

/// Fully resolved and validated run configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub experiment: ExperimentKind,
    pub seed: u64,
    pub ris: RisMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
    pub scenario: ScenarioConfig,
    pub cdf: CdfConfig,
    pub heatmap: HeatmapConfig,
    pub single: SingleConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        parse_config("").expect("defaults are valid")
    }
}

impl RunConfig {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn cdf_spec(&self, ris_enabled: bool) -> Result<CdfExperimentSpec> {
        let spec = CdfExperimentSpec {
            scenario: self.scenario.to_scenario(ris_enabled)?,
            num_samples: self.cdf.samples,
            x_range: (self.cdf.x_range[0], self.cdf.x_range[1]),
            y_range: (self.cdf.y_range[0], self.cdf.y_range[1]),
            z_fixed: self.cdf.z,
            seed: self.seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn heatmap_spec(&self) -> Result<HeatmapExperimentSpec> {
        let h = &self.heatmap;
        let spec = HeatmapExperimentSpec {
            scenario: self.scenario.to_scenario(true)?,
            x: GridAxis::new(h.x_range[0], h.x_range[1], h.step)?,
            y: GridAxis::new(h.y_range[0], h.y_range[1], h.step)?,
            z_fixed: h.z,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn single_position(&self) -> Position3D {
        self.single.uav_position.into()
    }

    /// Re-checks everything [`parse_config`] checks, without line numbers.
    /// Used after command-line overrides.
    pub fn validate(&self) -> Result<()> {
        parse_config(&self.to_toml()).map(|_| ())
    }
}

/// A TOML number; integers are accepted where floats are expected.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Num(f64);

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct NumVisitor;
        impl Visitor<'_> for NumVisitor {
            type Value = Num;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Num, E> {
                Ok(Num(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Num, E> {
                Ok(Num(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Num, E> {
                Ok(Num(v as f64))
            }
        }
        d.deserialize_any(NumVisitor)
    }
}

type Field<T> = Option<Spanned<T>>;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: Field<String>,
    seed: Field<i64>,
    ris: Field<String>,
    output_dir: Field<String>,
    #[serde(default)]
    scenario: RawScenario,
    #[serde(default)]
    cdf: RawCdf,
    #[serde(default)]
    heatmap: RawHeatmap,
    #[serde(default)]
    single: RawSingle,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    carrier_hz: Field<Num>,
    bandwidth_hz: Field<Num>,
    environment: Field<String>,
    alpha: Field<Num>,
    kappa: Field<Num>,
    gamma: Field<Num>,
    tx_power_dbm: Field<Num>,
    noise_figure_db: Field<Num>,
    bs_position: Field<[Num; 3]>,
    ris_position: Field<[Num; 3]>,
    bs_array: Field<BsArrayKind>,
    bs_elements: Field<i64>,
    bs_upa_size: Field<[i64; 2]>,
    bs_tilt_deg: Field<Num>,
    ris_size: Field<[i64; 2]>,
    uav_size: Field<[i64; 2]>,
    element_spacing: Field<Num>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCdf {
    samples: Field<i64>,
    x_range: Field<[Num; 2]>,
    y_range: Field<[Num; 2]>,
    z: Field<Num>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHeatmap {
    x_range: Field<[Num; 2]>,
    y_range: Field<[Num; 2]>,
    step: Field<Num>,
    z: Field<Num>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSingle {
    uav_position: Field<[Num; 3]>,
}

/// Resolves raw fields against defaults and reports failures with the key
/// path and line number.
struct Resolver<'a> {
    text: &'a str,
}

impl Resolver<'_> {
    fn line(&self, span: Range<usize>) -> usize {
        let end = span.start.min(self.text.len());
        self.text[..end].bytes().filter(|&b| b == b'\n').count() + 1
    }

    fn fail(&self, key: &str, span: Option<Range<usize>>, message: impl Into<String>) -> Error {
        Error::Config {
            key: key.to_string(),
            line: span.map(|s| self.line(s)),
            message: message.into(),
        }
    }

    /// Takes a field or its default, then applies `check`.
    fn get<R, T>(
        &self,
        key: &str,
        field: &Field<R>,
        default: T,
        convert: impl Fn(&R) -> std::result::Result<T, String>,
        check: impl Fn(&T) -> std::result::Result<(), String>,
    ) -> Result<T> {
        match field {
            None => Ok(default),
            Some(s) => {
                let v = convert(s.get_ref()).map_err(|m| self.fail(key, Some(s.span()), m))?;
                check(&v).map_err(|m| self.fail(key, Some(s.span()), m))?;
                Ok(v)
            }
        }
    }

    fn num(
        &self,
        key: &str,
        f: &Field<Num>,
        default: f64,
        check: fn(f64) -> std::result::Result<(), String>,
    ) -> Result<f64> {
        self.get(key, f, default, |n| Ok(n.0), |v| check(*v))
    }

    fn count(&self, key: &str, f: &Field<i64>, default: usize) -> Result<usize> {
        self.get(
            key,
            f,
            default,
            |&n| usize::try_from(n).map_err(|_| format!("must be a positive integer, got {n}")),
            |&n| {
                if n >= 1 {
                    Ok(())
                } else {
                    Err("must be at least 1".into())
                }
            },
        )
    }

    fn size(&self, key: &str, f: &Field<[i64; 2]>, default: (usize, usize)) -> Result<[usize; 2]> {
        self.get(
            key,
            f,
            [default.0, default.1],
            |a| {
                let mut out = [0usize; 2];
                for (o, &n) in out.iter_mut().zip(a) {
                    *o = usize::try_from(n)
                        .ok()
                        .filter(|&n| n >= 1)
                        .ok_or_else(|| format!("array dimensions must be at least 1, got {n}"))?;
                }
                Ok(out)
            },
            |_| Ok(()),
        )
    }

    fn point(
        &self,
        key: &str,
        f: &Field<[Num; 3]>,
        default: [f64; 3],
        min_z: fn(f64) -> bool,
    ) -> Result<[f64; 3]> {
        self.get(
            key,
            f,
            default,
            |a| Ok([a[0].0, a[1].0, a[2].0]),
            |p| {
                if p.iter().any(|c| !c.is_finite()) {
                    Err("coordinates must be finite".into())
                } else if !min_z(p[2]) {
                    Err(format!("altitude {} is out of range", p[2]))
                } else {
                    Ok(())
                }
            },
        )
    }

    fn range(
        &self,
        key: &str,
        f: &Field<[Num; 2]>,
        default: (f64, f64),
        allow_point: bool,
    ) -> Result<[f64; 2]> {
        self.get(
            key,
            f,
            [default.0, default.1],
            |a| Ok([a[0].0, a[1].0]),
            |r| {
                let ok = r[0].is_finite()
                    && r[1].is_finite()
                    && (r[0] < r[1] || (allow_point && r[0] == r[1]));
                if ok {
                    Ok(())
                } else {
                    Err(format!("range [{}, {}] is empty", r[0], r[1]))
                }
            },
        )
    }
}

fn positive(v: f64) -> std::result::Result<(), String> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(format!("must be positive, got {v}"))
    }
}

fn finite(v: f64) -> std::result::Result<(), String> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(format!("must be finite, got {v}"))
    }
}

fn unit_interval(v: f64) -> std::result::Result<(), String> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(format!("must lie in [0, 1], got {v}"))
    }
}

fn non_negative_z(z: f64) -> bool {
    z >= 0.0
}

fn positive_z(z: f64) -> bool {
    z > 0.0
}

fn toml_error(text: &str, e: toml::de::Error) -> Error {
    let resolver = Resolver { text };
    let message = e.message().trim().to_string();
    let key = message
        .split_once("unknown field `")
        .and_then(|(_, rest)| rest.split_once('`'))
        .map(|(k, _)| k.to_string())
        .unwrap_or_else(|| "<document>".to_string());
    resolver.fail(&key, e.span(), message)
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| toml_error(text, e))?;
    let r = Resolver { text };

    let experiment = r.get(
        "experiment",
        &raw.experiment,
        ExperimentKind::Cdf,
        |s| s.parse().map_err(|e: Error| e.to_string()),
        |_| Ok(()),
    )?;
    let seed = r.get(
        "seed",
        &raw.seed,
        DEFAULT_SEED,
        |&n| u64::try_from(n).map_err(|_| format!("must be non-negative, got {n}")),
        |_| Ok(()),
    )?;
    let ris = r.get(
        "ris",
        &raw.ris,
        RisMode::On,
        |s| s.parse().map_err(|e: Error| e.to_string()),
        |_| Ok(()),
    )?;
    let output_dir = raw.output_dir.as_ref().map(|s| s.get_ref().clone());

    let sc = &raw.scenario;
    let carrier_hz = r.num(
        "scenario.carrier_hz",
        &sc.carrier_hz,
        DEFAULT_CARRIER_HZ,
        positive,
    )?;
    let bandwidth_hz = r.num(
        "scenario.bandwidth_hz",
        &sc.bandwidth_hz,
        DEFAULT_BANDWIDTH_HZ,
        positive,
    )?;

    let env_name = r.get(
        "scenario.environment",
        &sc.environment,
        EnvironmentPreset::Urban.name().to_string(),
        |s| {
            if s == CUSTOM_ENVIRONMENT {
                Ok(s.clone())
            } else {
                s.parse::<EnvironmentPreset>()
                    .map(|p| p.name().to_string())
                    .map_err(|e| e.to_string())
            }
        },
        |_| Ok(()),
    )?;
    let preset = if env_name == CUSTOM_ENVIRONMENT {
        for (key, f) in [
            ("alpha", &sc.alpha),
            ("kappa", &sc.kappa),
            ("gamma", &sc.gamma),
        ] {
            if f.is_none() {
                let span = sc.environment.as_ref().map(|s| s.span());
                return Err(r.fail(
                    &format!("scenario.{key}"),
                    span,
                    "required for a custom environment",
                ));
            }
        }
        (f64::NAN, f64::NAN, f64::NAN)
    } else {
        env_name.parse::<EnvironmentPreset>()?.parameters()
    };
    let alpha = r.num("scenario.alpha", &sc.alpha, preset.0, unit_interval)?;
    let kappa = r.num("scenario.kappa", &sc.kappa, preset.1, positive)?;
    let gamma = r.num("scenario.gamma", &sc.gamma, preset.2, positive)?;

    let tx_power_dbm = r.num(
        "scenario.tx_power_dbm",
        &sc.tx_power_dbm,
        DEFAULT_TX_POWER_DBM,
        finite,
    )?;
    let noise_figure_db = r.num(
        "scenario.noise_figure_db",
        &sc.noise_figure_db,
        DEFAULT_NOISE_FIGURE_DB,
        finite,
    )?;
    let bs_position = r.point(
        "scenario.bs_position",
        &sc.bs_position,
        DEFAULT_BS_POSITION.to_array(),
        non_negative_z,
    )?;
    let ris_position = r.point(
        "scenario.ris_position",
        &sc.ris_position,
        DEFAULT_RIS_POSITION.to_array(),
        non_negative_z,
    )?;
    if bs_position == ris_position {
        let span = sc
            .ris_position
            .as_ref()
            .or(sc.bs_position.as_ref())
            .map(|s| s.span());
        return Err(r.fail(
            "scenario.ris_position",
            span,
            "RIS and BS positions coincide",
        ));
    }
    let bs_array = r.get(
        "scenario.bs_array",
        &sc.bs_array,
        BsArrayKind::Ula,
        |k| Ok(*k),
        |_| Ok(()),
    )?;
    let bs_elements = r.count("scenario.bs_elements", &sc.bs_elements, DEFAULT_BS_ELEMENTS)?;
    let bs_upa_size = r.size("scenario.bs_upa_size", &sc.bs_upa_size, (8, 8))?;
    let bs_tilt_deg = r.num(
        "scenario.bs_tilt_deg",
        &sc.bs_tilt_deg,
        DEFAULT_BS_TILT.to_degrees(),
        finite,
    )?;
    let ris_size = r.size("scenario.ris_size", &sc.ris_size, DEFAULT_RIS_SIZE)?;
    let uav_size = r.size("scenario.uav_size", &sc.uav_size, DEFAULT_UAV_SIZE)?;
    let element_spacing = r.num(
        "scenario.element_spacing",
        &sc.element_spacing,
        0.5,
        positive,
    )?;

    let default_xy = default_range(carrier_hz);
    let cdf = CdfConfig {
        samples: r.count("cdf.samples", &raw.cdf.samples, DEFAULT_CDF_SAMPLES)?,
        x_range: r.range("cdf.x_range", &raw.cdf.x_range, default_xy, false)?,
        y_range: r.range("cdf.y_range", &raw.cdf.y_range, default_xy, false)?,
        z: r.num("cdf.z", &raw.cdf.z, DEFAULT_UAV_ALTITUDE, positive)?,
    };
    let heatmap = HeatmapConfig {
        x_range: r.range("heatmap.x_range", &raw.heatmap.x_range, default_xy, true)?,
        y_range: r.range("heatmap.y_range", &raw.heatmap.y_range, default_xy, true)?,
        step: r.num(
            "heatmap.step",
            &raw.heatmap.step,
            DEFAULT_HEATMAP_STEP,
            positive,
        )?,
        z: r.num("heatmap.z", &raw.heatmap.z, DEFAULT_UAV_ALTITUDE, positive)?,
    };
    let single = SingleConfig {
        uav_position: r.point(
            "single.uav_position",
            &raw.single.uav_position,
            DEFAULT_SINGLE_POSITION,
            positive_z,
        )?,
    };

    let config = RunConfig {
        experiment,
        seed,
        ris,
        output_dir,
        scenario: ScenarioConfig {
            carrier_hz,
            bandwidth_hz,
            environment: env_name,
            alpha,
            kappa,
            gamma,
            tx_power_dbm,
            noise_figure_db,
            bs_position,
            ris_position,
            bs_array,
            bs_elements,
            bs_upa_size,
            bs_tilt_deg,
            ris_size,
            uav_size,
            element_spacing,
        },
        cdf,
        heatmap,
        single,
    };
    // cross-field checks that have no single key
    config
        .scenario
        .to_scenario(true)
        .map_err(|e| r.fail("scenario", None, e.to_string()))?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_config_is_reference_deployment() {
        let c = parse_config("").unwrap();
        assert_eq!(c.experiment, ExperimentKind::Cdf);
        assert_eq!(c.scenario.carrier_hz, 28e9);
        assert_eq!(c.scenario.bandwidth_hz, 20e6);
        assert_eq!(c.scenario.environment, "urban");
        assert_eq!(c.scenario.bs_array, BsArrayKind::Ula);
        assert_eq!(c.scenario.bs_elements, 64);
        assert_eq!(c.scenario.ris_size, [20, 20]);
        assert_eq!(c.scenario.uav_size, [8, 8]);
        assert_eq!(c.scenario.bs_position, [0.0, 0.0, 10.0]);
        assert_eq!(c.scenario.ris_position, [0.5, 0.5, 9.5]);
        assert!((c.scenario.bs_tilt_deg - 60.0).abs() < 1e-12);
        assert_eq!(c.cdf.x_range, [100.0, 1000.0]);
        let s = c.scenario.to_scenario(true).unwrap();
        let reference = Scenario::reference(28e9, EnvironmentPreset::Urban).unwrap();
        assert_eq!(s.environment, reference.environment);
        assert_eq!(s.bs_array.num_elements(), 64);
        match (s.bs_array, reference.bs_array) {
            (ArrayConfig::Ula(a), ArrayConfig::Ula(b)) => {
                assert_eq!(a.num_elements, b.num_elements);
                assert!((a.tilt - b.tilt).abs() < 1e-15);
                assert!((a.spacing - b.spacing).abs() < 1e-15);
            }
            _ => panic!("BS should be a ULA"),
        }
        assert!((s.power.noise_power - reference.power.noise_power).abs() < 1e-25);
    }

    #[test]
    fn low_carrier_widens_default_ranges() {
        let c = parse_config("[scenario]\ncarrier_hz = 3.5e9\n").unwrap();
        assert_eq!(c.cdf.x_range, [100.0, 2000.0]);
        assert_eq!(c.heatmap.y_range, [100.0, 2000.0]);
    }

    #[test]
    fn alpha_out_of_range_names_key_and_line() {
        let err = parse_config("seed = 3\n[scenario]\nalpha = 1.5\n").unwrap_err();
        match err {
            Error::Config { key, line, .. } => {
                assert_eq!(key, "scenario.alpha");
                assert_eq!(line, Some(3));
            }
            e => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn unknown_key_rejected() {
        let err = parse_config("[scenario]\ncarrier = 28e9\n").unwrap_err();
        match err {
            Error::Config { key, line, .. } => {
                assert_eq!(key, "carrier");
                assert_eq!(line, Some(2));
            }
            e => panic!("unexpected error {e}"),
        }
        assert!(parse_config("[plots]\nx = 1\n").is_err());
    }

    #[test]
    fn unknown_environment_rejected() {
        let err = parse_config("\n[scenario]\nenvironment = \"rural\"\n").unwrap_err();
        assert!(
            matches!(err, Error::Config { ref key, line: Some(3), .. } if key == "scenario.environment")
        );
    }

    #[test]
    fn custom_environment_needs_all_parameters() {
        assert!(parse_config("[scenario]\nenvironment = \"custom\"\nalpha = 0.2\n").is_err());
        let c = parse_config(
            "[scenario]\nenvironment = \"custom\"\nalpha = 0.2\nkappa = 100\ngamma = 12\n",
        )
        .unwrap();
        assert_eq!(c.scenario.environment().gamma, 12.0);
    }

    #[test]
    fn syntax_error_reports_line() {
        let err = parse_config("seed = 1\nexperiment = \n").unwrap_err();
        assert!(matches!(err, Error::Config { line: Some(2), .. }), "{err}");
    }

    #[test]
    fn other_range_violations() {
        for text in [
            "[scenario]\ncarrier_hz = -1\n",
            "[scenario]\nris_size = [0, 4]\n",
            "[scenario]\nbs_position = [0, 0, -5]\n",
            "[scenario]\nris_position = [0, 0, 10]\n",
            "[cdf]\nsamples = 0\n",
            "[cdf]\nx_range = [500, 100]\n",
            "[heatmap]\nstep = 0\n",
            "[single]\nuav_position = [1, 1, 0]\n",
            "seed = -4\n",
            "experiment = \"movie\"\n",
            "ris = \"maybe\"\n",
            "[scenario]\nbs_array = \"dish\"\n",
        ] {
            assert!(
                matches!(parse_config(text), Err(Error::Config { .. })),
                "{text}"
            );
        }
    }

    #[test]
    fn bs_as_upa_switch() {
        let c = parse_config("[scenario]\nbs_array = \"upa\"\n").unwrap();
        let s = c.scenario.to_scenario(true).unwrap();
        assert!(matches!(s.bs_array, ArrayConfig::Upa(u) if u.num_elements() == 64));
    }

    #[test]
    fn integers_accepted_for_floats() {
        let c = parse_config("[single]\nuav_position = [300, 200.5, 80]\n").unwrap();
        assert_eq!(c.single.uav_position, [300.0, 200.5, 80.0]);
    }

    fn config_text() -> impl Strategy<Value = String> {
        (
            prop::sample::select(vec!["cdf", "heatmap", "single"]),
            0i64..1_000_000,
            prop::sample::select(vec!["suburban", "urban", "dense urban", "highrise-urban"]),
            1e9f64..60e9,
            0.0f64..1.0,
            1usize..40,
            1usize..10,
            (10.0f64..500.0, 1.0f64..100.0),
            1usize..50_000,
        )
            .prop_map(|(exp, seed, env, f, alpha, nb, nu, (lo, step), samples)| {
                format!(
                    "experiment = \"{exp}\"\nseed = {seed}\n[scenario]\ncarrier_hz = {f:e}\n\
                     environment = \"{env}\"\nalpha = {alpha}\nbs_elements = {nb}\n\
                     uav_size = [{nu}, 3]\n[cdf]\nsamples = {samples}\nx_range = [{lo}, {}]\n\
                     [heatmap]\nstep = {step}\n",
                    lo + 100.0
                )
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn serialized_config_reparses_equal(text in config_text()) {
            let c = parse_config(&text).unwrap();
            let again = parse_config(&c.to_toml()).unwrap();
            prop_assert_eq!(&again, &c);
            prop_assert_eq!(again.to_toml(), c.to_toml());
        }
    }
}
