//! RIS phase design, precoder/combiner design and achievable rates.
//!
//! The design is two-stage. The RIS phases are chosen first so that every
//! element of the cascaded BS→RIS→UAV path adds coherently, which makes the
//! cascade a rank-one channel with gain
//! `|η| = √(N_R N_U/ρ_RU) · √(N_B N_R/ρ_BR)`. The end-to-end channel is then
//! the sum of two rank-one terms, and when the BS-side and UAV-side steering
//! vectors of the two routes are close to orthogonal its SVD is approximated
//! by stacking those steering vectors. The combiner and precoder split the
//! unit power evenly over the two streams.
//!
//! [`exact_mimo_rate`] evaluates the log-det rate on materialized matrices
//! and is the validation path for the closed forms.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::arrays::SteeringVector;
use crate::channel::{ChannelSet, RankOneChannel};
use crate::error::{Error, Result};

/// Overlap above which the two-route SVD approximation is not trusted.
pub const ORTHOGONALITY_TOLERANCE: f64 = 0.15;

/// Per-element RIS phase shifts (the diagonal of Ω as angles), in the
/// element order of the RIS steering vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct RisPhaseProfile {
    phases: Vec<f64>,
}

impl RisPhaseProfile {
    pub fn new(phases: Vec<f64>) -> Result<Self> {
        if phases.iter().any(|p| !p.is_finite()) {
            return Err(Error::invalid("RIS phases must be finite"));
        }
        Ok(Self { phases })
    }

    /// All-zero phases, i.e. Ω = I.
    pub fn identity(len: usize) -> Self {
        Self {
            phases: vec![0.0; len],
        }
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// Diagonal entries `e^{jψ_k}`; unit modulus by construction.
    pub fn diagonal(&self) -> Vec<Complex64> {
        self.phases
            .iter()
            .map(|&p| Complex64::from_polar(1.0, p))
            .collect()
    }

    pub fn matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.diagonal()))
    }
}

/// Combiner `W` (N_U × s) and precoder `F` (N_B × s).
#[derive(Debug, Clone, PartialEq)]
pub struct BeamformerPair {
    pub combiner: DMatrix<Complex64>,
    pub precoder: DMatrix<Complex64>,
}

impl BeamformerPair {
    pub fn streams(&self) -> usize {
        self.combiner.ncols()
    }

    fn from_columns(
        combiner: &[&SteeringVector],
        precoder: &[&SteeringVector],
        scale: f64,
    ) -> Self {
        let build = |cols: &[&SteeringVector]| {
            DMatrix::from_fn(cols[0].len(), cols.len(), |i, j| cols[j][i] * scale)
        };
        Self {
            combiner: build(combiner),
            precoder: build(precoder),
        }
    }
}

/// Transmit power and noise variance, both in watts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerBudget {
    pub tx_power: f64,
    pub noise_power: f64,
}

/// Thermal noise density, dBm/Hz.
pub const THERMAL_NOISE_DBM_PER_HZ: f64 = -174.0;

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

impl PowerBudget {
    pub fn new(tx_power: f64, noise_power: f64) -> Result<Self> {
        let b = Self {
            tx_power,
            noise_power,
        };
        b.validate()?;
        Ok(b)
    }

    /// `σ² = −174 dBm/Hz + 10 log₁₀(B) + NF`.
    pub fn from_dbm(tx_power_dbm: f64, bandwidth_hz: f64, noise_figure_db: f64) -> Result<Self> {
        if !(bandwidth_hz > 0.0 && bandwidth_hz.is_finite()) {
            return Err(Error::invalid(format!(
                "bandwidth must be positive, got {bandwidth_hz}"
            )));
        }
        let noise_dbm = THERMAL_NOISE_DBM_PER_HZ + 10.0 * bandwidth_hz.log10() + noise_figure_db;
        Self::new(dbm_to_watts(tx_power_dbm), dbm_to_watts(noise_dbm))
    }

    pub fn snr(&self) -> f64 {
        self.tx_power / self.noise_power
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("transmit power", self.tx_power),
            ("noise power", self.noise_power),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Power budget plus the three per-link array/path-loss gains
/// `N_B N_U/ρ_BU`, `N_R N_U/ρ_RU` and `N_B N_R/ρ_BR`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub power: PowerBudget,
    pub gain_bs_uav: f64,
    pub gain_ris_uav: f64,
    pub gain_bs_ris: f64,
}

impl LinkBudget {
    pub fn new(
        power: PowerBudget,
        gain_bs_uav: f64,
        gain_ris_uav: f64,
        gain_bs_ris: f64,
    ) -> Result<Self> {
        power.validate()?;
        for (name, g) in [
            ("BS-UAV gain", gain_bs_uav),
            ("RIS-UAV gain", gain_ris_uav),
            ("BS-RIS gain", gain_bs_ris),
        ] {
            if !(g > 0.0 && g.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive, got {g}")));
            }
        }
        Ok(Self {
            power,
            gain_bs_uav,
            gain_ris_uav,
            gain_bs_ris,
        })
    }

    pub fn from_channels(power: PowerBudget, ch: &ChannelSet) -> Result<Self> {
        Self::new(
            power,
            ch.bs_uav.power_gain(),
            ch.ris_uav.power_gain(),
            ch.bs_ris.power_gain(),
        )
    }

    pub fn cascade_gain(&self) -> f64 {
        self.gain_ris_uav * self.gain_bs_ris
    }
}

/// `ψ_k = ∠out_k − ∠in_k + delay_phase_sum`, where `out` is the RIS steering
/// toward the UAV and `in` the RIS steering of the BS-RIS link.
pub fn optimal_ris_phases(
    ris_out_steering: &SteeringVector,
    ris_in_steering: &SteeringVector,
    delay_phase_sum: f64,
) -> Result<RisPhaseProfile> {
    if ris_out_steering.len() != ris_in_steering.len() {
        return Err(Error::invalid(format!(
            "RIS steering lengths differ: {} vs {}",
            ris_out_steering.len(),
            ris_in_steering.len()
        )));
    }
    let phases = ris_out_steering
        .iter()
        .zip(ris_in_steering.iter())
        .map(|(o, i)| o.arg() - i.arg() + delay_phase_sum)
        .collect();
    RisPhaseProfile::new(phases)
}

/// Optimal profile for a given cascade; cancels both channels' delay phases.
pub fn optimal_profile(
    ris_uav: &RankOneChannel,
    bs_ris: &RankOneChannel,
) -> Result<RisPhaseProfile> {
    optimal_ris_phases(
        &ris_uav.tx_steering,
        &bs_ris.rx_steering,
        -(ris_uav.phase + bs_ris.phase),
    )
}

/// Complex gain η of the cascaded path for a given profile:
/// `g_RU g_BR · a_R,outᴴ Ω a_R,in`.
pub fn cascaded_gain(
    ris_uav: &RankOneChannel,
    bs_ris: &RankOneChannel,
    profile: &RisPhaseProfile,
) -> Result<Complex64> {
    let n = ris_uav.tx_steering.len();
    if bs_ris.rx_steering.len() != n || profile.len() != n {
        return Err(Error::invalid(format!(
            "cascade dimensions differ: RIS-UAV {n}, BS-RIS {}, profile {}",
            bs_ris.rx_steering.len(),
            profile.len()
        )));
    }
    let sum: Complex64 = ris_uav
        .tx_steering
        .iter()
        .zip(bs_ris.rx_steering.iter())
        .zip(profile.phases())
        .map(|((o, i), &p)| o.conj() * Complex64::from_polar(1.0, p) * i)
        .sum();
    Ok(ris_uav.gain() * bs_ris.gain() * sum)
}

/// Two-stream design: `W = (√2/2)[e^{jφ_BU} a_U,BU, a_U,RU]`,
/// `F = (√2/2)[a_B,BU, a_B,BR]`.
pub fn design_case1(ch: &ChannelSet) -> Result<BeamformerPair> {
    ch.check_dimensions()?;
    let rotated = SteeringVector::from_entries(
        ch.bs_uav
            .rx_steering
            .iter()
            .map(|c| c * Complex64::from_polar(1.0, ch.bs_uav.phase))
            .collect(),
    );
    Ok(BeamformerPair::from_columns(
        &[&rotated, &ch.ris_uav.rx_steering],
        &[&ch.bs_uav.tx_steering, &ch.bs_ris.tx_steering],
        FRAC_1_SQRT_2,
    ))
}

/// Matched single-stream beamformers for the direct link.
pub fn design_case2(ch: &ChannelSet) -> Result<BeamformerPair> {
    ch.check_dimensions()?;
    Ok(BeamformerPair::from_columns(
        &[&ch.bs_uav.rx_steering],
        &[&ch.bs_uav.tx_steering],
        1.0,
    ))
}

/// Matched single-stream beamformers for the aligned cascade.
pub fn design_case3(ch: &ChannelSet) -> Result<BeamformerPair> {
    ch.check_dimensions()?;
    Ok(BeamformerPair::from_columns(
        &[&ch.ris_uav.rx_steering],
        &[&ch.bs_ris.tx_steering],
        1.0,
    ))
}

/// Overlap of the two routes' steering vectors at the UAV and at the BS,
/// `(|a_U,BUᴴ a_U,RU|, |a_B,BUᴴ a_B,BR|)`. The two-stream design assumes both
/// are small.
pub fn route_overlap(ch: &ChannelSet) -> (f64, f64) {
    (
        ch.bs_uav.rx_steering.inner(&ch.ris_uav.rx_steering).norm(),
        ch.bs_uav.tx_steering.inner(&ch.bs_ris.tx_steering).norm(),
    )
}

/// Both links available.
pub fn rate_case1(budget: &LinkBudget) -> f64 {
    let quarter = budget.power.snr() / 4.0;
    (quarter * budget.gain_bs_uav).ln_1p() / std::f64::consts::LN_2
        + (quarter * budget.cascade_gain()).ln_1p() / std::f64::consts::LN_2
}

/// Only the direct BS-UAV link available.
pub fn rate_case2(budget: &LinkBudget) -> f64 {
    (budget.power.snr() * budget.gain_bs_uav).ln_1p() / std::f64::consts::LN_2
}

/// Only the RIS-UAV link available.
pub fn rate_case3(budget: &LinkBudget) -> f64 {
    (budget.power.snr() * budget.cascade_gain()).ln_1p() / std::f64::consts::LN_2
}

/// `log₂ det(I + (P/σ²) Wᴴ H F Fᴴ Hᴴ W)` on dense matrices.
pub fn exact_mimo_rate(
    h: &DMatrix<Complex64>,
    w: &DMatrix<Complex64>,
    f: &DMatrix<Complex64>,
    tx_power: f64,
    noise_power: f64,
) -> Result<f64> {
    PowerBudget::new(tx_power, noise_power)?;
    if w.nrows() != h.nrows() || f.nrows() != h.ncols() || w.ncols() != f.ncols() {
        return Err(Error::invalid(format!(
            "dimension mismatch: H {}x{}, W {}x{}, F {}x{}",
            h.nrows(),
            h.ncols(),
            w.nrows(),
            w.ncols(),
            f.nrows(),
            f.ncols()
        )));
    }
    let m = w.adjoint() * h * f;
    let s = m.nrows();
    let snr = Complex64::new(tx_power / noise_power, 0.0);
    let a = DMatrix::<Complex64>::identity(s, s) + (&m * m.adjoint()) * snr;
    let chol = a
        .cholesky()
        .ok_or_else(|| Error::invalid("rate matrix is not positive definite"))?;
    let log_det: f64 = chol.l().diagonal().iter().map(|d| 2.0 * d.re.ln()).sum();
    Ok(log_det / std::f64::consts::LN_2)
}
