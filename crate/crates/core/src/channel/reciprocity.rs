use num_complex::Complex64;

use super::geometry::Direction;
use super::link::{evaluate_link, Scene};
use crate::error::Result;
use crate::model::wrap_deg;

/// Deviation thresholds below which a link counts as reciprocal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub magnitude_db: f64,
    pub phase_deg: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            magnitude_db: 1e-9,
            phase_deg: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Reciprocal,
    Nonreciprocal,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Reciprocal => "Reciprocal",
            Verdict::Nonreciprocal => "Nonreciprocal",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReciprocityReport {
    pub h_up: Complex64,
    pub h_down: Complex64,
    /// `|20·log10|h_up| - 20·log10|h_down||`, dB.
    pub magnitude_deviation_db: f64,
    /// Wrapped phase difference, degrees in [0, 180].
    pub phase_deviation_deg: f64,
    pub verdict: Verdict,
}

impl ReciprocityReport {
    pub fn from_pair(h_up: Complex64, h_down: Complex64, tol: &Tolerances) -> Self {
        let (mu, md) = (h_up.norm(), h_down.norm());
        let magnitude_deviation_db = match (mu == 0.0, md == 0.0) {
            (true, true) => 0.0,
            (false, false) => (20.0 * mu.log10() - 20.0 * md.log10()).abs(),
            _ => f64::INFINITY,
        };
        let phase_deviation_deg = match (mu == 0.0, md == 0.0) {
            (true, true) => 0.0,
            (false, false) => wrap_deg(h_up.arg().to_degrees() - h_down.arg().to_degrees()).abs(),
            _ => f64::INFINITY,
        };
        let verdict = if magnitude_deviation_db <= tol.magnitude_db && phase_deviation_deg <= tol.phase_deg {
            Verdict::Reciprocal
        } else {
            Verdict::Nonreciprocal
        };
        ReciprocityReport {
            h_up,
            h_down,
            magnitude_deviation_db,
            phase_deviation_deg,
            verdict,
        }
    }

    /// Deviations quantised the way a bench measurement would report them.
    pub fn table_line(&self) -> String {
        format!(
            "{:.1} dB / {:.0}°  {}",
            self.magnitude_deviation_db, self.phase_deviation_deg, self.verdict
        )
    }
}

/// Evaluates both directions with the same panel state and compares them.
pub fn reciprocity_report(scene: &Scene, tol: &Tolerances) -> Result<ReciprocityReport> {
    let up = evaluate_link(scene, Direction::Uplink)?;
    let down = evaluate_link(scene, Direction::Downlink)?;
    Ok(ReciprocityReport::from_pair(up.h_total, down.h_total, tol))
}
