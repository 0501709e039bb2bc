use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Cartesian point, meters. The panel lies in the z = 0 plane with
/// boresight along +z.
pub type Point3 = [f64; 3];

/// Link direction in a TDD frame.
///
/// Uplink: antenna 2 (user) transmits, antenna 1 (access point) receives.
/// Downlink is the reverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Uplink,
    Downlink,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::Uplink, Direction::Downlink];

    pub fn reversed(self) -> Self {
        match self {
            Direction::Uplink => Direction::Downlink,
            Direction::Downlink => Direction::Uplink,
        }
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Direction::Uplink => "uplink",
            Direction::Downlink => "downlink",
        })
    }
}

/// Two-antenna measurement layout around the panel center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkGeometry {
    /// Antenna 1 to panel center, meters.
    pub d1_m: f64,
    /// Elevation of antenna 1 seen from the panel center, degrees.
    pub theta1_deg: f64,
    pub d2_m: f64,
    pub theta2_deg: f64,
    pub f_hz: f64,
    pub pt_dbm: f64,
}

impl LinkGeometry {
    pub fn validate(&self) -> Result<()> {
        for (field, d) in [("geometry.d1_m", self.d1_m), ("geometry.d2_m", self.d2_m)] {
            if !(d.is_finite() && d > 0.0) {
                return Err(Error::validation(field, format!("distance {d} must be > 0")));
            }
        }
        for (field, t) in [
            ("geometry.theta1_deg", self.theta1_deg),
            ("geometry.theta2_deg", self.theta2_deg),
        ] {
            if !(t.abs() < 90.0) {
                return Err(Error::validation(field, format!("angle {t}° must lie in (-90, 90)")));
            }
        }
        if !(self.f_hz.is_finite() && self.f_hz > 0.0) {
            return Err(Error::validation("geometry.f_hz", format!("frequency {} must be > 0", self.f_hz)));
        }
        if !self.pt_dbm.is_finite() {
            return Err(Error::validation("geometry.pt_dbm", "transmit power must be finite"));
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        wavelength(self.f_hz)
    }

    pub fn antenna1(&self) -> Point3 {
        antenna_position(self.d1_m, self.theta1_deg)
    }

    pub fn antenna2(&self) -> Point3 {
        antenna_position(self.d2_m, self.theta2_deg)
    }

    /// (transmitter, receiver) positions for a direction.
    pub fn endpoints(&self, direction: Direction) -> (Point3, Point3) {
        match direction {
            Direction::Uplink => (self.antenna2(), self.antenna1()),
            Direction::Downlink => (self.antenna1(), self.antenna2()),
        }
    }

    pub fn pt_watts(&self) -> f64 {
        dbm_to_watts(self.pt_dbm)
    }
}

pub fn wavelength(f_hz: f64) -> f64 {
    SPEED_OF_LIGHT / f_hz
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    1e-3 * 10f64.powf(dbm / 10.0)
}

/// Antenna placed at distance `d` and elevation `theta` in the x-z plane.
pub fn antenna_position(d_m: f64, theta_deg: f64) -> Point3 {
    let t = theta_deg.to_radians();
    [d_m * t.sin(), 0.0, d_m * t.cos()]
}

pub fn distance(a: &Point3, b: &Point3) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Spherical-wave transfer between two points: `λ/(4πr) · exp(-j2πr/λ)`.
pub fn propagation_factor(a: &Point3, b: &Point3, wavelength_m: f64) -> Result<Complex64> {
    let r = distance(a, b);
    if r == 0.0 {
        return Err(Error::Singularity(format!(
            "coincident points at ({}, {}, {})",
            a[0], a[1], a[2]
        )));
    }
    let amp = wavelength_m / (4.0 * PI * r);
    Ok(Complex64::from_polar(amp, -2.0 * PI * r / wavelength_m))
}

/// Elevation of `p` seen from `origin`, degrees, measured from +z towards +x.
pub(crate) fn elevation_deg(origin: &Point3, p: &Point3) -> f64 {
    let dx = p[0] - origin[0];
    let dy = p[1] - origin[1];
    let dz = p[2] - origin[2];
    let lateral = (dx * dx + dy * dy).sqrt().copysign(dx);
    lateral.atan2(dz).to_degrees()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boresight_antenna() {
        assert_eq!(antenna_position(0.5, 0.0), [0.0, 0.0, 0.5]);
    }

    #[test]
    fn oblique_antenna() {
        // 1.5·sin30° and 1.5·cos30° by hand.
        let p = antenna_position(1.5, 30.0);
        assert!((p[0] - 0.75).abs() < 1e-12);
        assert_eq!(p[1], 0.0);
        assert!((p[2] - 1.299_038_105_676_658).abs() < 1e-12);
    }

    #[test]
    fn grazing_antenna_height_goes_to_zero() {
        let p = antenna_position(1.0, 90.0 - 1e-9);
        assert!(p[2] > 0.0 && p[2] < 1e-10);
    }

    #[test]
    fn unit_spreading_identity() {
        let lambda = 0.1;
        let r = lambda / (4.0 * PI);
        let g = propagation_factor(&[0.0; 3], &[0.0, 0.0, r], lambda).unwrap();
        assert!((g.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn inverse_distance_law() {
        let lambda = 0.07;
        let g1 = propagation_factor(&[0.0; 3], &[0.3, 0.0, 0.4], lambda).unwrap();
        let g2 = propagation_factor(&[0.0; 3], &[0.6, 0.0, 0.8], lambda).unwrap();
        assert!((g1.norm() / g2.norm() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn spreading_at_4_25_ghz() {
        // 0.07055 / (4π · 1.5), evaluated independently.
        let g = propagation_factor(&[0.0; 3], &[0.0, 0.0, 1.5], 0.07055).unwrap();
        assert!((g.norm() - 0.003_742_793_745_044_405).abs() < 1e-15);
    }

    #[test]
    fn coincident_points_are_singular() {
        let p = [0.1, 0.2, 0.3];
        assert!(matches!(propagation_factor(&p, &p, 0.1), Err(Error::Singularity(_))));
    }

    #[test]
    fn propagation_is_symmetric_bitwise() {
        let a = [0.013, -0.027, 0.0];
        let b = antenna_position(1.37, 41.0);
        assert_eq!(
            propagation_factor(&a, &b, 0.0705).unwrap(),
            propagation_factor(&b, &a, 0.0705).unwrap()
        );
    }

    #[test]
    fn geometry_validation_names_field() {
        let g = LinkGeometry {
            d1_m: 1.0,
            theta1_deg: 95.0,
            d2_m: 0.5,
            theta2_deg: 0.0,
            f_hz: 27e9,
            pt_dbm: 0.0,
        };
        let err = g.validate().unwrap_err().to_string();
        assert!(err.contains("geometry.theta1_deg"), "{err}");
    }

    #[test]
    fn endpoints_swap_with_direction() {
        let g = LinkGeometry {
            d1_m: 1.5,
            theta1_deg: 30.0,
            d2_m: 0.5,
            theta2_deg: 0.0,
            f_hz: 4.25e9,
            pt_dbm: 0.0,
        };
        let (tx, rx) = g.endpoints(Direction::Uplink);
        assert_eq!((tx, rx), (g.antenna2(), g.antenna1()));
        assert_eq!(g.endpoints(Direction::Downlink), (rx, tx));
    }
}
