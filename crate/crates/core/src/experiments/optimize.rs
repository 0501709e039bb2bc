use num_complex::Complex64;

use crate::channel::{
    cascaded_channel, direct_channel, element_coefficients, evaluate_link, received_power, Direction, Scene,
};
use crate::error::{Error, Result};
use crate::model::ControlKind;
use crate::pattern::{make_pattern, CodingPattern, PatternSpec};

/// Largest group count ExhaustiveBits will enumerate.
pub const MAX_EXHAUSTIVE_GROUPS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimizeMode {
    /// Phase each super-column's partial sum onto the direct link.
    ContinuousAlign,
    /// Enumerate all `2^G` bit settings.
    ExhaustiveBits,
    /// Single-group flips from all-zero until no flip helps.
    GreedyBits,
}

impl OptimizeMode {
    pub fn as_str(self) -> &'static str {
        match self {
            OptimizeMode::ContinuousAlign => "continuous-align",
            OptimizeMode::ExhaustiveBits => "exhaustive-bits",
            OptimizeMode::GreedyBits => "greedy-bits",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeResult {
    pub mode: OptimizeMode,
    pub pattern: CodingPattern,
    pub p_up_dbm: f64,
    pub p_down_dbm: f64,
    /// Received power under Identical at the rest control.
    pub baseline_up_dbm: f64,
    pub baseline_down_dbm: f64,
}

impl OptimizeResult {
    pub fn gain_up_db(&self) -> f64 {
        self.p_up_dbm - self.baseline_up_dbm
    }

    pub fn gain_down_db(&self) -> f64 {
        self.p_down_dbm - self.baseline_down_dbm
    }
}

/// Searches for a pattern maximising received power. Searches run on the
/// uplink; both directions of the winner are then evaluated from scratch.
pub fn optimize_pattern(scene: &Scene, mode: OptimizeMode) -> Result<OptimizeResult> {
    let model = scene.panel.cell_model();
    let wanted = match mode {
        OptimizeMode::ContinuousAlign => ControlKind::Continuous,
        OptimizeMode::ExhaustiveBits | OptimizeMode::GreedyBits => ControlKind::Binary,
    };
    if model.control_kind() != wanted {
        return Err(Error::ModeMismatch {
            mode: mode.as_str().to_string(),
            model: model.name().to_string(),
        });
    }
    let values = match mode {
        OptimizeMode::ContinuousAlign => continuous_align(scene)?,
        OptimizeMode::ExhaustiveBits => {
            let table = GroupTable::new(scene)?;
            let g = table.groups();
            if g > MAX_EXHAUSTIVE_GROUPS {
                return Err(Error::Argument(format!(
                    "exhaustive search over {g} groups exceeds the limit of {MAX_EXHAUSTIVE_GROUPS}"
                )));
            }
            let mut best = (table.power(0), 0u32);
            for bits in 1..(1u32 << g) {
                let p = table.power(bits);
                if p > best.0 {
                    best = (p, bits);
                }
            }
            bits_to_values(best.1, g)
        }
        OptimizeMode::GreedyBits => {
            let table = GroupTable::new(scene)?;
            let mut bits = 0u32;
            let mut current = table.power(bits);
            loop {
                let mut improved = false;
                for g in 0..table.groups() {
                    let p = table.power(bits ^ (1 << g));
                    if p > current {
                        bits ^= 1 << g;
                        current = p;
                        improved = true;
                    }
                }
                if !improved {
                    break;
                }
            }
            bits_to_values(bits, table.groups())
        }
    };
    let pattern = make_pattern(&PatternSpec::Custom { values }, &scene.panel)?;
    let rest = make_pattern(&PatternSpec::Identical { value: model.rest_control() }, &scene.panel)?;
    let power = |p: &CodingPattern, d: Direction| -> Result<f64> {
        let h = evaluate_link(&scene.with_pattern(p.clone())?, d)?.h_total;
        Ok(received_power(scene.geometry.pt_dbm, h))
    };
    Ok(OptimizeResult {
        mode,
        p_up_dbm: power(&pattern, Direction::Uplink)?,
        p_down_dbm: power(&pattern, Direction::Downlink)?,
        baseline_up_dbm: power(&rest, Direction::Uplink)?,
        baseline_down_dbm: power(&rest, Direction::Downlink)?,
        pattern,
    })
}

fn bits_to_values(bits: u32, groups: usize) -> Vec<f64> {
    (0..groups).map(|g| ((bits >> g) & 1) as f64).collect()
}

/// Contribution of each group's elements to `h_RIS` for a given uniform
/// control, masked so the rest of the panel is silent.
fn group_contributions(scene: &Scene, control: f64) -> Result<Vec<Complex64>> {
    let uniform = scene.with_pattern(make_pattern(&PatternSpec::Identical { value: control }, &scene.panel)?)?;
    let coeffs = element_coefficients(&uniform, Direction::Uplink)?;
    let panel = &scene.panel;
    (0..panel.groups())
        .map(|g| {
            let masked: Vec<Complex64> = coeffs
                .iter()
                .enumerate()
                .map(|(n, c)| if panel.group_of(n) == g { *c } else { Complex64::new(0.0, 0.0) })
                .collect();
            cascaded_channel(panel, &masked, &scene.geometry, Direction::Uplink)
        })
        .collect()
}

fn continuous_align(scene: &Scene) -> Result<Vec<f64>> {
    let model = scene.panel.cell_model();
    let h_d = direct_channel(&scene.geometry, &scene.direct)?;
    let target = if h_d.norm() == 0.0 { 0.0 } else { h_d.arg() };
    group_contributions(scene, model.rest_control())?
        .iter()
        .map(|s| model.control_for_phase((target - s.arg()).to_degrees()))
        .collect()
}

/// Per-group contributions for both bit states, so a bit pattern costs
/// `O(G)` to evaluate.
struct GroupTable {
    h_d: Complex64,
    off: Vec<Complex64>,
    on: Vec<Complex64>,
}

impl GroupTable {
    fn new(scene: &Scene) -> Result<Self> {
        Ok(GroupTable {
            h_d: direct_channel(&scene.geometry, &scene.direct)?,
            off: group_contributions(scene, 0.0)?,
            on: group_contributions(scene, 1.0)?,
        })
    }

    fn groups(&self) -> usize {
        self.off.len()
    }

    fn power(&self, bits: u32) -> f64 {
        let mut h = self.h_d;
        for g in 0..self.groups() {
            h += if (bits >> g) & 1 == 1 { self.on[g] } else { self.off[g] };
        }
        h.norm_sqr()
    }
}
