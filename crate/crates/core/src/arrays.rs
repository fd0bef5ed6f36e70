//! Normalized array response (steering) vectors.
//!
//! The BS carries a vertical ULA that is mechanically down-tilted; the RIS
//! and the UAV carry UPAs parallel to the x-y plane. UPA elements are indexed
//! row-major over (x, y): element `(m, n)` sits at `m * num_y + n`, i.e. the
//! vector is the Kronecker product of the x-axis factor with the y-axis
//! factor. RIS phase profiles use the same ordering.

use std::f64::consts::PI;
use std::ops::Index;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UlaConfig {
    pub num_elements: usize,
    /// Inter-element spacing along z, meters.
    pub spacing: f64,
    /// Clockwise down-tilt, radians.
    pub tilt: f64,
}

impl UlaConfig {
    pub fn new(num_elements: usize, spacing: f64, tilt: f64) -> Result<Self> {
        let cfg = Self {
            num_elements,
            spacing,
            tilt,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn half_wavelength(num_elements: usize, tilt: f64, wavelength: f64) -> Result<Self> {
        Self::new(num_elements, wavelength / 2.0, tilt)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_elements == 0 {
            return Err(Error::invalid("ULA needs at least one element"));
        }
        if !(self.spacing > 0.0 && self.spacing.is_finite()) {
            return Err(Error::invalid(format!(
                "ULA spacing must be positive, got {}",
                self.spacing
            )));
        }
        if !self.tilt.is_finite() {
            return Err(Error::invalid("ULA tilt must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpaConfig {
    pub num_x: usize,
    pub num_y: usize,
    pub spacing_x: f64,
    pub spacing_y: f64,
}

impl UpaConfig {
    pub fn new(num_x: usize, num_y: usize, spacing_x: f64, spacing_y: f64) -> Result<Self> {
        let cfg = Self {
            num_x,
            num_y,
            spacing_x,
            spacing_y,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn half_wavelength(num_x: usize, num_y: usize, wavelength: f64) -> Result<Self> {
        Self::new(num_x, num_y, wavelength / 2.0, wavelength / 2.0)
    }

    pub fn num_elements(&self) -> usize {
        self.num_x * self.num_y
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_x == 0 || self.num_y == 0 {
            return Err(Error::invalid(format!(
                "UPA needs at least one element per axis, got {}x{}",
                self.num_x, self.num_y
            )));
        }
        for s in [self.spacing_x, self.spacing_y] {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::invalid(format!(
                    "UPA spacing must be positive, got {s}"
                )));
            }
        }
        Ok(())
    }
}

/// Array geometry of a network node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArrayConfig {
    Ula(UlaConfig),
    Upa(UpaConfig),
}

impl ArrayConfig {
    pub fn num_elements(&self) -> usize {
        match self {
            ArrayConfig::Ula(c) => c.num_elements,
            ArrayConfig::Upa(c) => c.num_elements(),
        }
    }

    /// Response toward a direction. The ULA only sees the elevation (minus
    /// its tilt); the UPA sees both angles.
    pub fn response(
        &self,
        azimuth: f64,
        elevation: f64,
        wavelength: f64,
    ) -> Result<SteeringVector> {
        match self {
            ArrayConfig::Ula(c) => ula_response(c, elevation, wavelength),
            ArrayConfig::Upa(c) => upa_response(c, azimuth, elevation, wavelength),
        }
    }
}

impl From<UlaConfig> for ArrayConfig {
    fn from(c: UlaConfig) -> Self {
        ArrayConfig::Ula(c)
    }
}

impl From<UpaConfig> for ArrayConfig {
    fn from(c: UpaConfig) -> Self {
        ArrayConfig::Upa(c)
    }
}

/// Unit-norm complex response vector. The first entry is always `1/√N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector(Vec<Complex64>);

impl SteeringVector {
    /// Wraps raw entries without checking normalization.
    pub fn from_entries(entries: Vec<Complex64>) -> Self {
        Self(entries)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.0.iter()
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    /// `selfᴴ · other`.
    pub fn inner(&self, other: &SteeringVector) -> Complex64 {
        debug_assert_eq!(self.len(), other.len());
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Per-entry phase angles in radians.
    pub fn phases(&self) -> Vec<f64> {
        self.0.iter().map(|c| c.arg()).collect()
    }
}

impl Index<usize> for SteeringVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

fn check_wavelength(wavelength: f64) -> Result<()> {
    if wavelength > 0.0 && wavelength.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "wavelength must be positive, got {wavelength}"
        )))
    }
}

/// Phase progression `exp(j k n)` for `n = 0..len`, unscaled.
fn progression(len: usize, k: f64) -> impl Iterator<Item = Complex64> {
    (0..len).map(move |n| Complex64::from_polar(1.0, k * n as f64))
}

pub fn upa_response(
    cfg: &UpaConfig,
    azimuth: f64,
    elevation: f64,
    wavelength: f64,
) -> Result<SteeringVector> {
    check_wavelength(wavelength)?;
    cfg.validate()?;
    let wavenumber = 2.0 * PI / wavelength;
    let sin_el = elevation.sin();
    let kx = wavenumber * cfg.spacing_x * azimuth.cos() * sin_el;
    let ky = wavenumber * cfg.spacing_y * azimuth.sin() * sin_el;
    let scale = 1.0 / (cfg.num_elements() as f64).sqrt();
    let y_factor: Vec<Complex64> = progression(cfg.num_y, ky).collect();
    let entries = progression(cfg.num_x, kx)
        .flat_map(|ex| y_factor.iter().map(move |ey| ex * ey * scale))
        .collect();
    Ok(SteeringVector(entries))
}

pub fn ula_response(
    cfg: &UlaConfig,
    departure_elevation: f64,
    wavelength: f64,
) -> Result<SteeringVector> {
    check_wavelength(wavelength)?;
    cfg.validate()?;
    let k = 2.0 * PI / wavelength * cfg.spacing * (departure_elevation - cfg.tilt).cos();
    let scale = 1.0 / (cfg.num_elements as f64).sqrt();
    Ok(SteeringVector(
        progression(cfg.num_elements, k)
            .map(|e| e * scale)
            .collect(),
    ))
}
