use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::channel::{evaluate_link, Direction, Scene};
use crate::error::{Error, Result};
use crate::model::ControlKind;
use crate::pattern::{make_pattern, PatternSpec};

/// Both directions of the link at one shared control voltage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub voltage: f64,
    pub h_up: Complex64,
    pub h_down: Complex64,
}

/// Drives every super-column with the same voltage, stepping linearly over
/// the cell's bias range, and records the total channel in both directions.
pub fn voltage_sweep(scene: &Scene, v_steps: usize) -> Result<Vec<TrajectoryPoint>> {
    let model = scene.panel.cell_model();
    if model.control_kind() != ControlKind::Continuous {
        return Err(Error::UnsupportedSweep(model.name().to_string()));
    }
    if v_steps < 2 {
        return Err(Error::Argument(format!("sweep needs at least 2 steps, got {v_steps}")));
    }
    let (lo, hi) = model.control_range().expect("continuous models have a range");
    (0..v_steps)
        .map(|i| {
            let voltage = if i == v_steps - 1 {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (v_steps - 1) as f64
            };
            let s = scene.with_pattern(make_pattern(&PatternSpec::Identical { value: voltage }, &scene.panel)?)?;
            Ok(TrajectoryPoint {
                voltage,
                h_up: evaluate_link(&s, Direction::Uplink)?.h_total,
                h_down: evaluate_link(&s, Direction::Downlink)?.h_total,
            })
        })
        .collect()
}

/// Adds independent complex Gaussian noise (σ per component) to every
/// sample, reproducibly for a given seed.
pub fn add_noise(points: &[TrajectoryPoint], sigma: f64, seed: u64) -> Result<Vec<TrajectoryPoint>> {
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::Argument(format!("noise sigma {sigma}: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng));
    Ok(points
        .iter()
        .map(|p| TrajectoryPoint {
            voltage: p.voltage,
            h_up: p.h_up + draw(),
            h_down: p.h_down + draw(),
        })
        .collect())
}
