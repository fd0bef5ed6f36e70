//! Rank-one line-of-sight channels with free-space path loss.
//!
//! Every link is `amplitude · e^{jφ} · a_rx · a_txᴴ` where both steering
//! vectors come from the same tx→rx direction and
//! `amplitude = √(N_tx N_rx / ρ)`. The delay phase is the carrier phase
//! accumulated over the path, `φ = −2π d / λ (mod 2π)`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::arrays::{ArrayConfig, SteeringVector};
use crate::error::{Error, Result};
use crate::geometry::{link_geometry, LinkGeometry, Position3D};

/// Speed of light used throughout the simulator, m/s.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

/// Exponent of the free-space denominator `10^8.755` (f in kHz, d in m).
const FSPL_EXPONENT: f64 = 8.755;

pub fn wavelength(carrier_hz: f64) -> Result<f64> {
    if carrier_hz > 0.0 && carrier_hz.is_finite() {
        Ok(SPEED_OF_LIGHT / carrier_hz)
    } else {
        Err(Error::invalid(format!(
            "carrier frequency must be positive, got {carrier_hz}"
        )))
    }
}

/// Linear power attenuation of a link.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PathLoss(f64);

impl PathLoss {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value.is_finite() {
            Ok(Self(value))
        } else {
            Err(Error::invalid(format!(
                "path loss must be positive, got {value}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn db(self) -> f64 {
        10.0 * self.0.log10()
    }
}

/// `ρ = d² f² / 10^8.755` with `d` in meters and `f` in kHz.
pub fn free_space_path_loss(distance: f64, carrier_hz: f64) -> Result<PathLoss> {
    if !(distance > 0.0 && distance.is_finite()) {
        return Err(Error::invalid(format!(
            "distance must be positive, got {distance}"
        )));
    }
    if !(carrier_hz > 0.0 && carrier_hz.is_finite()) {
        return Err(Error::invalid(format!(
            "carrier frequency must be positive, got {carrier_hz}"
        )));
    }
    let f_khz = carrier_hz / 1e3;
    PathLoss::new(distance * distance * f_khz * f_khz / 10f64.powf(FSPL_EXPONENT))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankOneChannel {
    pub amplitude: f64,
    /// Radians in [0, 2π).
    pub phase: f64,
    pub rx_steering: SteeringVector,
    pub tx_steering: SteeringVector,
}

impl RankOneChannel {
    pub fn num_rx(&self) -> usize {
        self.rx_steering.len()
    }

    pub fn num_tx(&self) -> usize {
        self.tx_steering.len()
    }

    /// `amplitude · e^{jφ}`.
    pub fn gain(&self) -> Complex64 {
        Complex64::from_polar(self.amplitude, self.phase)
    }

    /// Power gain `N_tx N_rx / ρ`.
    pub fn power_gain(&self) -> f64 {
        self.amplitude * self.amplitude
    }
}

/// A built channel together with the geometry it came from.
#[derive(Debug, Clone)]
pub struct LinkChannel {
    pub geometry: LinkGeometry,
    pub path_loss: PathLoss,
    pub channel: RankOneChannel,
}

pub fn delay_phase(distance: f64, wavelength: f64) -> f64 {
    (-2.0 * PI * distance / wavelength).rem_euclid(2.0 * PI)
}

pub fn build_channel(
    tx_array: &ArrayConfig,
    rx_array: &ArrayConfig,
    tx_pos: Position3D,
    rx_pos: Position3D,
    carrier_hz: f64,
) -> Result<LinkChannel> {
    let lambda = wavelength(carrier_hz)?;
    let geometry = link_geometry(tx_pos, rx_pos)?;
    let path_loss = free_space_path_loss(geometry.distance, carrier_hz)?;
    let tx_steering = tx_array.response(geometry.azimuth, geometry.elevation, lambda)?;
    let rx_steering = rx_array.response(geometry.azimuth, geometry.elevation, lambda)?;
    let n = (tx_steering.len() * rx_steering.len()) as f64;
    let channel = RankOneChannel {
        amplitude: (n / path_loss.value()).sqrt(),
        phase: delay_phase(geometry.distance, lambda),
        rx_steering,
        tx_steering,
    };
    Ok(LinkChannel {
        geometry,
        path_loss,
        channel,
    })
}

/// Column vector of a steering vector.
pub fn column(v: &SteeringVector) -> DMatrix<Complex64> {
    DMatrix::from_column_slice(v.len(), 1, v.as_slice())
}

/// Dense `N_rx × N_tx` matrix. Only used on validation paths.
pub fn materialize(ch: &RankOneChannel) -> DMatrix<Complex64> {
    let g = ch.gain();
    DMatrix::from_fn(ch.num_rx(), ch.num_tx(), |i, j| {
        g * ch.rx_steering[i] * ch.tx_steering[j].conj()
    })
}

/// The three links of the RIS-assisted network.
#[derive(Debug, Clone)]
pub struct ChannelSet {
    /// `N_U × N_B`.
    pub bs_uav: RankOneChannel,
    /// `N_U × N_R`.
    pub ris_uav: RankOneChannel,
    /// `N_R × N_B`.
    pub bs_ris: RankOneChannel,
}

impl ChannelSet {
    pub fn new(
        bs_uav: RankOneChannel,
        ris_uav: RankOneChannel,
        bs_ris: RankOneChannel,
    ) -> Result<Self> {
        let set = Self {
            bs_uav,
            ris_uav,
            bs_ris,
        };
        set.check_dimensions()?;
        Ok(set)
    }

    pub fn num_bs(&self) -> usize {
        self.bs_uav.num_tx()
    }

    pub fn num_ris(&self) -> usize {
        self.bs_ris.num_rx()
    }

    pub fn num_uav(&self) -> usize {
        self.bs_uav.num_rx()
    }

    pub fn check_dimensions(&self) -> Result<()> {
        let ok = self.bs_uav.num_tx() == self.bs_ris.num_tx()
            && self.bs_uav.num_rx() == self.ris_uav.num_rx()
            && self.ris_uav.num_tx() == self.bs_ris.num_rx();
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "inconsistent link dimensions: BS-UAV {}x{}, RIS-UAV {}x{}, BS-RIS {}x{}",
                self.bs_uav.num_rx(),
                self.bs_uav.num_tx(),
                self.ris_uav.num_rx(),
                self.ris_uav.num_tx(),
                self.bs_ris.num_rx(),
                self.bs_ris.num_tx()
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrays::{UlaConfig, UpaConfig};
    use proptest::prelude::*;

    #[test]
    fn path_loss_reference_values() {
        // 1 m at 3.5 GHz: 3.5e6² / 10^8.755
        let p = free_space_path_loss(1.0, 3.5e9).unwrap().value();
        let expected = 3.5e6f64.powi(2) / 10f64.powf(8.755);
        assert!((p - expected).abs() / expected < 1e-9);
        assert!((p - 2.1535e4).abs() < 1.0);
        let p = free_space_path_loss(1000.0, 28e9).unwrap().value();
        assert!((p - 1.3782e12).abs() / 1.3782e12 < 1e-4);
    }

    #[test]
    fn path_loss_scales_with_distance_squared() {
        let a = free_space_path_loss(10.0, 28e9).unwrap().value();
        let b = free_space_path_loss(100.0, 28e9).unwrap().value();
        assert!((a / b - 1e-2).abs() < 1e-15);
    }

    #[test]
    fn path_loss_rejects_bad_inputs() {
        assert!(free_space_path_loss(0.0, 28e9).is_err());
        assert!(free_space_path_loss(1.0, -1.0).is_err());
        assert!(free_space_path_loss(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn path_loss_matches_friis_at_same_speed_of_light() {
        // (4π d f / c)² with c = 3e8 differs from the kHz form only by the
        // rounding of 10^8.755
        let (d, f) = (250.0, 28e9);
        let friis = (4.0 * PI * d * f / SPEED_OF_LIGHT).powi(2);
        let p = free_space_path_loss(d, f).unwrap().value();
        assert!((p / friis - 1.0).abs() < 2e-3);
    }

    fn bs_array(lambda: f64) -> ArrayConfig {
        UlaConfig::half_wavelength(64, PI / 3.0, lambda)
            .unwrap()
            .into()
    }

    fn ris_array(lambda: f64) -> ArrayConfig {
        UpaConfig::half_wavelength(20, 20, lambda).unwrap().into()
    }

    #[test]
    fn bs_ris_channel_amplitude() {
        let f = 28e9;
        let lambda = wavelength(f).unwrap();
        let link = build_channel(
            &bs_array(lambda),
            &ris_array(lambda),
            Position3D::new(0.0, 0.0, 10.0),
            Position3D::new(0.5, 0.5, 9.5),
            f,
        )
        .unwrap();
        let rho = free_space_path_loss(0.75f64.sqrt(), f).unwrap().value();
        let expected = (64.0 * 400.0 / rho).sqrt();
        assert!((link.channel.amplitude - expected).abs() < 1e-12 * expected);
        assert_eq!(link.channel.num_tx(), 64);
        assert_eq!(link.channel.num_rx(), 400);
    }

    #[test]
    fn coincident_nodes_propagate_error() {
        let lambda = wavelength(28e9).unwrap();
        let p = Position3D::new(1.0, 1.0, 1.0);
        assert!(matches!(
            build_channel(&bs_array(lambda), &ris_array(lambda), p, p, 28e9),
            Err(Error::DegenerateGeometry(_))
        ));
    }

    #[test]
    fn scalar_channel_materializes_to_its_gain() {
        let one = SteeringVector::from_entries(vec![Complex64::new(1.0, 0.0)]);
        let ch = RankOneChannel {
            amplitude: 1.0,
            phase: 0.0,
            rx_steering: one.clone(),
            tx_steering: one,
        };
        let m = materialize(&ch);
        assert_eq!(m.shape(), (1, 1));
        assert_eq!(m[(0, 0)], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn channels_sharing_steering_are_proportional() {
        let lambda = wavelength(28e9).unwrap();
        let upa = UpaConfig::half_wavelength(3, 2, lambda).unwrap();
        let a = crate::arrays::upa_response(&upa, 0.3, 0.2, lambda).unwrap();
        let b = crate::arrays::upa_response(&upa, -1.0, 0.7, lambda).unwrap();
        let c1 = RankOneChannel {
            amplitude: 2.0,
            phase: 0.4,
            rx_steering: a.clone(),
            tx_steering: b.clone(),
        };
        let c2 = RankOneChannel {
            amplitude: 0.5,
            phase: 1.9,
            rx_steering: a,
            tx_steering: b,
        };
        let ratio = c1.gain() / c2.gain();
        let (m1, m2) = (materialize(&c1), materialize(&c2));
        for (x, y) in m1.iter().zip(m2.iter()) {
            assert!((x - y * ratio).norm() < 1e-12);
        }
    }

    fn random_channel() -> impl Strategy<Value = RankOneChannel> {
        (
            1usize..6,
            1usize..6,
            1usize..16,
            -PI..PI,
            -1.5f64..1.5,
            -PI..PI,
            -1.5f64..1.5,
            1e-6f64..10.0,
            0.0..2.0 * PI,
        )
            .prop_map(|(nx, ny, nt, az1, el1, az2, el2, amp, phase)| {
                let lambda = 0.01;
                let upa = UpaConfig::half_wavelength(nx, ny, lambda).unwrap();
                let ula = UlaConfig::half_wavelength(nt, 0.5, lambda).unwrap();
                RankOneChannel {
                    amplitude: amp,
                    phase,
                    rx_steering: crate::arrays::upa_response(&upa, az1, el1, lambda).unwrap(),
                    tx_steering: ArrayConfig::Ula(ula).response(az2, el2, lambda).unwrap(),
                }
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn frobenius_norm_is_amplitude(ch in random_channel()) {
            let m = materialize(&ch);
            let fro2 = m.iter().map(|c| c.norm_sqr()).sum::<f64>();
            prop_assert!((fro2 - ch.power_gain()).abs() <= 1e-9 * ch.power_gain());
            let max = m.iter().map(|c| c.norm()).fold(0.0, f64::max);
            let expected = ch.amplitude / ((ch.num_rx() * ch.num_tx()) as f64).sqrt();
            prop_assert!((max - expected).abs() <= 1e-12 * ch.amplitude.max(1.0));
        }

        #[test]
        fn adjoint_is_swapped_channel_with_conjugate_phase(ch in random_channel()) {
            let swapped = RankOneChannel {
                amplitude: ch.amplitude,
                phase: (-ch.phase).rem_euclid(2.0 * PI),
                rx_steering: ch.tx_steering.clone(),
                tx_steering: ch.rx_steering.clone(),
            };
            let a = materialize(&ch).adjoint();
            let b = materialize(&swapped);
            prop_assert!((a - b).norm() <= 1e-12 * ch.amplitude.max(1.0));
        }

        #[test]
        fn single_nonzero_singular_value(ch in random_channel()) {
            let sv = materialize(&ch).singular_values();
            let mut s: Vec<f64> = sv.iter().copied().collect();
            s.sort_by(|a, b| b.partial_cmp(a).unwrap());
            prop_assert!((s[0] - ch.amplitude).abs() <= 1e-9 * ch.amplitude);
            prop_assert!(s.iter().skip(1).all(|&x| x < 1e-9 * ch.amplitude));
        }

        #[test]
        fn swapping_endpoints_keeps_frobenius_norm(
            x in 1.0f64..500.0, y in 1.0f64..500.0, z in 20.0f64..200.0, f in 1e9f64..40e9,
        ) {
            let lambda = wavelength(f).unwrap();
            let a: ArrayConfig = UpaConfig::half_wavelength(4, 5, lambda).unwrap().into();
            let b: ArrayConfig = UpaConfig::half_wavelength(3, 3, lambda).unwrap().into();
            let p = Position3D::new(0.0, 0.0, 10.0);
            let q = Position3D::new(x, y, z);
            let fwd = build_channel(&a, &b, p, q, f).unwrap().channel;
            let rev = build_channel(&b, &a, q, p, f).unwrap().channel;
            prop_assert!((fwd.amplitude - rev.amplitude).abs() <= 1e-12 * fwd.amplitude);
        }

        #[test]
        fn path_loss_increases_in_distance_and_frequency(
            d in 0.1f64..5000.0, f in 1e8f64..1e11, k in 1.0001f64..10.0,
        ) {
            let base = free_space_path_loss(d, f).unwrap();
            prop_assert!(free_space_path_loss(d * k, f).unwrap() > base);
            prop_assert!(free_space_path_loss(d, f * k).unwrap() > base);
        }
    }
}
