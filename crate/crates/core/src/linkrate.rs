//! Per-position evaluation: channels, LoS probabilities, the three case
//! rates and the LoS-weighted average rate.

use std::f64::consts::FRAC_PI_3;

use nalgebra::DMatrix;

use crate::arrays::{ArrayConfig, UlaConfig, UpaConfig};
use crate::beamforming::{
    rate_case1, rate_case2, rate_case3, route_overlap, LinkBudget, PowerBudget, RisPhaseProfile,
    ORTHOGONALITY_TOLERANCE,
};
use crate::channel::{build_channel, materialize, wavelength, ChannelSet, LinkChannel};
use crate::error::{Error, Result};
use crate::geometry::Position3D;
use crate::los::{los_probability, Environment, EnvironmentPreset};

pub const DEFAULT_BS_POSITION: Position3D = Position3D::new(0.0, 0.0, 10.0);
pub const DEFAULT_RIS_POSITION: Position3D = Position3D::new(0.5, 0.5, 9.5);
pub const DEFAULT_CARRIER_HZ: f64 = 28e9;
pub const DEFAULT_BANDWIDTH_HZ: f64 = 20e6;
pub const DEFAULT_TX_POWER_DBM: f64 = 30.0;
pub const DEFAULT_NOISE_FIGURE_DB: f64 = 9.0;
pub const DEFAULT_BS_ELEMENTS: usize = 64;
pub const DEFAULT_BS_TILT: f64 = FRAC_PI_3;
pub const DEFAULT_RIS_SIZE: (usize, usize) = (20, 20);
pub const DEFAULT_UAV_SIZE: (usize, usize) = (8, 8);

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub bs_position: Position3D,
    pub ris_position: Position3D,
    pub bs_array: ArrayConfig,
    pub ris_array: UpaConfig,
    pub uav_array: UpaConfig,
    pub carrier_hz: f64,
    pub bandwidth_hz: f64,
    pub environment: Environment,
    pub power: PowerBudget,
    pub ris_enabled: bool,
}

impl Scenario {
    /// Reference deployment: 64-element vertical ULA at the BS tilted by
    /// π/3, a 20×20 RIS next to it, an 8×8 UAV array, half-wavelength
    /// spacing everywhere, 30 dBm transmit power and 20 MHz with a 9 dB
    /// noise figure.
    pub fn reference(carrier_hz: f64, preset: EnvironmentPreset) -> Result<Self> {
        let lambda = wavelength(carrier_hz)?;
        let s = Self {
            bs_position: DEFAULT_BS_POSITION,
            ris_position: DEFAULT_RIS_POSITION,
            bs_array: UlaConfig::half_wavelength(DEFAULT_BS_ELEMENTS, DEFAULT_BS_TILT, lambda)?
                .into(),
            ris_array: UpaConfig::half_wavelength(DEFAULT_RIS_SIZE.0, DEFAULT_RIS_SIZE.1, lambda)?,
            uav_array: UpaConfig::half_wavelength(DEFAULT_UAV_SIZE.0, DEFAULT_UAV_SIZE.1, lambda)?,
            carrier_hz,
            bandwidth_hz: DEFAULT_BANDWIDTH_HZ,
            environment: preset.environment(),
            power: PowerBudget::from_dbm(
                DEFAULT_TX_POWER_DBM,
                DEFAULT_BANDWIDTH_HZ,
                DEFAULT_NOISE_FIGURE_DB,
            )?,
            ris_enabled: true,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_ris(&self, enabled: bool) -> Self {
        Self {
            ris_enabled: enabled,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("BS", self.bs_position), ("RIS", self.ris_position)] {
            if !p.is_finite() || p.z < 0.0 {
                return Err(Error::invalid(format!(
                    "{name} position must be finite with z >= 0"
                )));
            }
        }
        if self.bs_position == self.ris_position {
            return Err(Error::DegenerateGeometry("BS and RIS coincide".into()));
        }
        match &self.bs_array {
            ArrayConfig::Ula(c) => c.validate()?,
            ArrayConfig::Upa(c) => c.validate()?,
        }
        self.ris_array.validate()?;
        self.uav_array.validate()?;
        wavelength(self.carrier_hz)?;
        if !(self.bandwidth_hz > 0.0 && self.bandwidth_hz.is_finite()) {
            return Err(Error::invalid(format!(
                "bandwidth must be positive, got {}",
                self.bandwidth_hz
            )));
        }
        self.environment.validate()?;
        self.power.validate()
    }

    /// Builds the BS-UAV, RIS-UAV and BS-RIS links for a UAV position.
    pub fn links(&self, uav: Position3D) -> Result<ScenarioLinks> {
        let ris: ArrayConfig = self.ris_array.into();
        let uav_arr: ArrayConfig = self.uav_array.into();
        Ok(ScenarioLinks {
            bs_uav: build_channel(
                &self.bs_array,
                &uav_arr,
                self.bs_position,
                uav,
                self.carrier_hz,
            )?,
            ris_uav: build_channel(&ris, &uav_arr, self.ris_position, uav, self.carrier_hz)?,
            bs_ris: build_channel(
                &self.bs_array,
                &ris,
                self.bs_position,
                self.ris_position,
                self.carrier_hz,
            )?,
        })
    }

    pub fn channels(&self, uav: Position3D) -> Result<ChannelSet> {
        self.links(uav).map(ScenarioLinks::into_channel_set)
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioLinks {
    pub bs_uav: LinkChannel,
    pub ris_uav: LinkChannel,
    pub bs_ris: LinkChannel,
}

impl ScenarioLinks {
    pub fn into_channel_set(self) -> ChannelSet {
        ChannelSet {
            bs_uav: self.bs_uav.channel,
            ris_uav: self.ris_uav.channel,
            bs_ris: self.bs_ris.channel,
        }
    }
}

/// Evaluation of one UAV position.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkReport {
    pub uav_position: Position3D,
    pub p_los_bu: f64,
    pub p_los_ru: f64,
    /// Bits/s/Hz. Zero when the RIS is disabled.
    pub r1: f64,
    pub r2: f64,
    /// Bits/s/Hz. Zero when the RIS is disabled.
    pub r3: f64,
    pub r_avg: f64,
    /// Bits/s.
    pub throughput: f64,
    /// The two routes' steering vectors overlap by more than
    /// [`ORTHOGONALITY_TOLERANCE`] at the BS or the UAV, so `r1` is not
    /// backed by the two-stream design.
    pub degenerate: bool,
    /// Enabling the RIS lowered the average rate (`r1 < r2` outweighed the
    /// RIS-only case).
    pub ris_penalty: bool,
}

/// Weights of the four LoS cases: both links, direct only, RIS only, none.
pub fn case_weights(p_bu: f64, p_ru: f64) -> [f64; 4] {
    [
        p_bu * p_ru,
        p_bu * (1.0 - p_ru),
        (1.0 - p_bu) * p_ru,
        (1.0 - p_bu) * (1.0 - p_ru),
    ]
}

/// LoS-weighted average of the case rates; the no-LoS case contributes 0.
pub fn average_rate(r1: f64, r2: f64, r3: f64, p_bu: f64, p_ru: f64) -> f64 {
    let w = case_weights(p_bu, p_ru);
    r1 * w[0] + r2 * w[1] + r3 * w[2]
}

/// Dense end-to-end channel
/// `𝕀_BU · H_BU + 𝕀_RU · H_RU Ω H_BR` for given indicator values.
pub fn end_to_end_channel(
    ch: &ChannelSet,
    indicators: (bool, bool),
    profile: &RisPhaseProfile,
) -> Result<DMatrix<nalgebra::Complex<f64>>> {
    ch.check_dimensions()?;
    if profile.len() != ch.num_ris() {
        return Err(Error::invalid(format!(
            "profile has {} phases for {} RIS elements",
            profile.len(),
            ch.num_ris()
        )));
    }
    let mut h = DMatrix::zeros(ch.num_uav(), ch.num_bs());
    if indicators.0 {
        h += materialize(&ch.bs_uav);
    }
    if indicators.1 {
        let mut bs_ris = materialize(&ch.bs_ris);
        for (mut row, d) in bs_ris.row_iter_mut().zip(profile.diagonal()) {
            row *= d;
        }
        h += materialize(&ch.ris_uav) * bs_ris;
    }
    Ok(h)
}

pub fn evaluate_link(scenario: &Scenario, uav: Position3D) -> Result<LinkReport> {
    if !uav.is_finite() || uav.z <= 0.0 {
        return Err(Error::invalid(format!(
            "UAV must fly above ground, got z = {}",
            uav.z
        )));
    }
    let links = scenario.links(uav)?;
    let env = &scenario.environment;
    let p_los_bu = los_probability(
        scenario.bs_position.z,
        uav.z,
        links.bs_uav.geometry.ground_distance_km(),
        env,
    );
    let p_los_ru = los_probability(
        scenario.ris_position.z,
        uav.z,
        links.ris_uav.geometry.ground_distance_km(),
        env,
    );
    let channels = links.into_channel_set();
    let budget = LinkBudget::from_channels(scenario.power, &channels)?;
    let r2 = rate_case2(&budget);

    let (r1, r3, r_avg, degenerate, ris_penalty) = if scenario.ris_enabled {
        let r1 = rate_case1(&budget);
        let r3 = rate_case3(&budget);
        let r_avg = average_rate(r1, r2, r3, p_los_bu, p_los_ru);
        let (uav_overlap, bs_overlap) = route_overlap(&channels);
        let degenerate = uav_overlap.max(bs_overlap) > ORTHOGONALITY_TOLERANCE;
        (r1, r3, r_avg, degenerate, r_avg < r2 * p_los_bu)
    } else {
        (0.0, 0.0, r2 * p_los_bu, false, false)
    };

    Ok(LinkReport {
        uav_position: uav,
        p_los_bu,
        p_los_ru,
        r1,
        r2,
        r3,
        r_avg,
        throughput: scenario.bandwidth_hz * r_avg,
        degenerate,
        ris_penalty,
    })
}
