//! Node positions and the distance/angle parameters of the link between two
//! nodes.
//!
//! Angles are always seen from the transmitting node toward the receiving
//! node. Azimuth is measured counter-clockwise from the +x axis in the x-y
//! plane, elevation from the x-y plane toward +z, so that
//!
//! ```text
//! rx.x = tx.x + d cos(azimuth) cos(elevation)
//! rx.y = tx.y + d sin(azimuth) cos(elevation)
//! rx.z = tx.z + d sin(elevation)
//! ```
//!
//! Departure and arrival elevations are the same angle.

use std::f64::consts::PI;
use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in the simulation frame, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position3D {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position3D {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl From<[f64; 3]> for Position3D {
    fn from(p: [f64; 3]) -> Self {
        Self::new(p[0], p[1], p[2])
    }
}

impl Add for Position3D {
    type Output = Position3D;
    fn add(self, o: Position3D) -> Position3D {
        Position3D::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Position3D {
    type Output = Position3D;
    fn sub(self, o: Position3D) -> Position3D {
        Position3D::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

/// Derived parameters of the straight line from a transmitter to a receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    /// 3D distance in meters.
    pub distance: f64,
    /// Length of the projection onto the x-y plane, in meters.
    pub ground_distance: f64,
    /// Radians in (-π, π]. Zero for vertical links.
    pub azimuth: f64,
    /// Radians in [-π/2, π/2].
    pub elevation: f64,
}

impl LinkGeometry {
    /// Receiver position implied by `tx` and these parameters.
    pub fn project_from(&self, tx: Position3D) -> Position3D {
        let (sa, ca) = self.azimuth.sin_cos();
        let (se, ce) = self.elevation.sin_cos();
        Position3D::new(
            tx.x + self.distance * ca * ce,
            tx.y + self.distance * sa * ce,
            tx.z + self.distance * se,
        )
    }

    pub fn ground_distance_km(&self) -> f64 {
        self.ground_distance / 1000.0
    }
}

pub fn link_geometry(tx: Position3D, rx: Position3D) -> Result<LinkGeometry> {
    if !tx.is_finite() || !rx.is_finite() {
        return Err(Error::invalid("node coordinates must be finite"));
    }
    let d = rx - tx;
    let ground_distance = d.x.hypot(d.y);
    let distance = ground_distance.hypot(d.z);
    if distance == 0.0 {
        return Err(Error::DegenerateGeometry(format!(
            "transmitter and receiver coincide at ({}, {}, {})",
            tx.x, tx.y, tx.z
        )));
    }
    let azimuth = match d.y.atan2(d.x) {
        _ if ground_distance == 0.0 => 0.0,
        a if a == -PI => PI,
        a => a,
    };
    // asin is ill-conditioned near ±π/2; atan2 gives the same angle stably.
    let elevation = d.z.atan2(ground_distance);
    Ok(LinkGeometry {
        distance,
        ground_distance,
        azimuth,
        elevation,
    })
}
