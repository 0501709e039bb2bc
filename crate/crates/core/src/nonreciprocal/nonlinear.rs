use serde::{Deserialize, Serialize};

use crate::channel::Direction;
use crate::error::{Error, Result};

/// Power-saturating cell inside an asymmetric structure.
///
/// Transmission follows `t_max / (1 + (c·P/p_ref)^γ)`, where the coupling
/// `c` depends on the side the wave enters from. Downlink is the passing
/// direction and sees the weaker coupling `c_fwd`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NonlinearCellModel {
    pub t_max: f64,
    pub c_fwd: f64,
    pub c_rev: f64,
    pub exponent: f64,
    pub p_ref_w: f64,
}

impl Default for NonlinearCellModel {
    fn default() -> Self {
        NonlinearCellModel {
            t_max: 0.9,
            c_fwd: 0.01,
            c_rev: 100.0,
            exponent: 2.0,
            p_ref_w: 1e-3,
        }
    }
}

impl NonlinearCellModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_max > 0.0 && self.t_max <= 1.0) {
            return Err(Error::config(format!("t_max {} outside (0, 1]", self.t_max)));
        }
        if !(self.c_fwd >= 0.0 && self.c_fwd < self.c_rev && self.c_rev.is_finite()) {
            return Err(Error::config(format!(
                "direction couplings need 0 <= c_fwd < c_rev, got {} and {}",
                self.c_fwd, self.c_rev
            )));
        }
        if !(self.exponent > 0.0 && self.exponent.is_finite()) {
            return Err(Error::config(format!("exponent {} must be > 0", self.exponent)));
        }
        if !(self.p_ref_w > 0.0 && self.p_ref_w.is_finite()) {
            return Err(Error::config(format!("p_ref {} W must be > 0", self.p_ref_w)));
        }
        Ok(())
    }

    pub fn coupling(&self, direction: Direction) -> f64 {
        match direction {
            Direction::Downlink => self.c_fwd,
            Direction::Uplink => self.c_rev,
        }
    }

    pub fn transmission(&self, direction: Direction, p_in_w: f64) -> Result<f64> {
        if !(p_in_w >= 0.0) {
            return Err(Error::Argument(format!("incident power {p_in_w} W must be >= 0")));
        }
        let drive = self.coupling(direction) * p_in_w / self.p_ref_w;
        Ok(self.t_max / (1.0 + drive.powf(self.exponent)))
    }
}

pub fn nonlinear_transmission(model: &NonlinearCellModel, direction: Direction, p_in_w: f64) -> Result<f64> {
    model.transmission(direction, p_in_w)
}
