use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::Direction;
use crate::error::{Error, Result};

/// Switchable transmission state of an amplifier-backed cell.
///
/// "Forward" is the downlink direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransmissionState {
    Bidirectional,
    ForwardOnly,
    BackwardOnly,
    Off,
}

impl TransmissionState {
    pub const ALL: [TransmissionState; 4] = [
        TransmissionState::Bidirectional,
        TransmissionState::ForwardOnly,
        TransmissionState::BackwardOnly,
        TransmissionState::Off,
    ];

    fn passes(self, direction: Direction) -> bool {
        match self {
            TransmissionState::Bidirectional => true,
            TransmissionState::ForwardOnly => direction == Direction::Downlink,
            TransmissionState::BackwardOnly => direction == Direction::Uplink,
            TransmissionState::Off => false,
        }
    }
}

/// One-way amplifying cell. No phase control.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActiveCellModel {
    pub state: TransmissionState,
    pub gain_db: f64,
    /// Suppression of the blocked direction, dB (>= 0).
    pub isolation_db: f64,
}

impl ActiveCellModel {
    pub fn bidirectional(gain_db: f64) -> Self {
        ActiveCellModel {
            state: TransmissionState::Bidirectional,
            gain_db,
            isolation_db: 0.0,
        }
    }

    pub fn forward_only(gain_db: f64, isolation_db: f64) -> Self {
        ActiveCellModel {
            state: TransmissionState::ForwardOnly,
            gain_db,
            isolation_db,
        }
    }

    pub fn backward_only(gain_db: f64, isolation_db: f64) -> Self {
        ActiveCellModel {
            state: TransmissionState::BackwardOnly,
            gain_db,
            isolation_db,
        }
    }

    pub fn off() -> Self {
        ActiveCellModel {
            state: TransmissionState::Off,
            gain_db: 0.0,
            isolation_db: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.gain_db.is_finite() {
            return Err(Error::config("active cell gain must be finite"));
        }
        if !(self.isolation_db.is_finite() && self.isolation_db >= 0.0) {
            return Err(Error::config(format!(
                "active cell isolation {} dB must be >= 0",
                self.isolation_db
            )));
        }
        Ok(())
    }

    pub fn gain(&self, direction: Direction) -> Complex64 {
        let mag = match self.state {
            TransmissionState::Off => 0.0,
            s if s.passes(direction) => 10f64.powf(self.gain_db / 20.0),
            _ => 10f64.powf(-self.isolation_db / 20.0),
        };
        Complex64::new(mag, 0.0)
    }
}

pub fn active_gain(model: &ActiveCellModel, direction: Direction) -> Complex64 {
    model.gain(direction)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_only_downlink_gain() {
        let m = ActiveCellModel::forward_only(13.0, 60.0);
        // 10^(13/20)
        assert!((active_gain(&m, Direction::Downlink).norm() - 4.466_835_921_509_632).abs() < 1e-12);
        assert!((active_gain(&m, Direction::Uplink).norm() - 0.001).abs() < 1e-15);
    }

    #[test]
    fn backward_only_mirrors_forward() {
        let f = ActiveCellModel::forward_only(13.0, 60.0);
        let b = ActiveCellModel::backward_only(13.0, 60.0);
        for d in Direction::BOTH {
            assert_eq!(f.gain(d), b.gain(d.reversed()));
        }
    }

    #[test]
    fn off_and_bidirectional() {
        for d in Direction::BOTH {
            assert_eq!(ActiveCellModel::off().gain(d), Complex64::new(0.0, 0.0));
            assert!((ActiveCellModel::bidirectional(13.0).gain(d).norm() - 4.466_835_921_509_632).abs() < 1e-12);
        }
    }

    #[test]
    fn negative_isolation_rejected() {
        assert!(ActiveCellModel::forward_only(13.0, -1.0).validate().is_err());
    }
}
