//! Static coding patterns: one control value per super-column.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ControlKind, Incidence};
use crate::panel::Panel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternKind {
    Identical,
    Gradient,
    Stripe,
    Custom,
}

impl PatternKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PatternKind::Identical => "identical",
            PatternKind::Gradient => "gradient",
            PatternKind::Stripe => "stripe",
            PatternKind::Custom => "custom",
        }
    }
}

impl std::fmt::Display for PatternKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Pattern recipe, resolved against a panel by [`make_pattern`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PatternSpec {
    /// Every super-column gets `value`.
    Identical { value: f64 },
    /// Super-column `g` targets phase `g · step_deg`.
    Gradient { step_deg: f64 },
    /// Alternating 0/1 per super-column.
    Stripe,
    Custom { values: Vec<f64> },
}

impl PatternSpec {
    pub fn kind(&self) -> PatternKind {
        match self {
            PatternSpec::Identical { .. } => PatternKind::Identical,
            PatternSpec::Gradient { .. } => PatternKind::Gradient,
            PatternSpec::Stripe => PatternKind::Stripe,
            PatternSpec::Custom { .. } => PatternKind::Custom,
        }
    }
}

/// Resolved per-super-column control values.
#[derive(Debug, Clone, PartialEq)]
pub struct CodingPattern {
    pub kind: PatternKind,
    pub values: Vec<f64>,
}

impl CodingPattern {
    pub fn id(&self) -> &'static str {
        self.kind.as_str()
    }

    /// A `Custom` pattern from raw control values, validated against the panel.
    pub fn custom(panel: &Panel, values: Vec<f64>) -> Result<Self> {
        make_pattern(&PatternSpec::Custom { values }, panel)
    }
}

pub fn make_pattern(spec: &PatternSpec, panel: &Panel) -> Result<CodingPattern> {
    let model = panel.cell_model();
    let groups = panel.groups();
    let values = match spec {
        PatternSpec::Identical { value } => vec![*value; groups],
        PatternSpec::Gradient { step_deg } => {
            if model.control_kind() != ControlKind::Continuous {
                return Err(Error::config(format!(
                    "gradient pattern needs a continuous cell model, panel uses {}",
                    model.name()
                )));
            }
            (0..groups)
                .map(|g| model.control_for_phase(g as f64 * step_deg))
                .collect::<Result<Vec<_>>>()?
        }
        PatternSpec::Stripe => {
            if model.control_kind() != ControlKind::Binary {
                return Err(Error::config(format!(
                    "stripe pattern needs a 1-bit cell model, panel uses {}",
                    model.name()
                )));
            }
            (0..groups).map(|g| (g % 2) as f64).collect()
        }
        PatternSpec::Custom { values } => {
            if values.len() != groups {
                return Err(Error::config(format!(
                    "custom pattern has {} values for {groups} super-columns",
                    values.len()
                )));
            }
            values.clone()
        }
    };
    for &v in &values {
        model.check_control(v)?;
    }
    Ok(CodingPattern {
        kind: spec.kind(),
        values,
    })
}

/// Per-element coefficients under one common illumination.
pub fn apply_pattern(panel: &Panel, pattern: &CodingPattern, inc: &Incidence) -> Result<Vec<Complex64>> {
    check_groups(panel, pattern)?;
    let model = panel.cell_model();
    let per_group = pattern
        .values
        .iter()
        .map(|&v| model.reflection_coefficient(v, inc))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..panel.element_count())
        .map(|n| per_group[panel.group_of(n)])
        .collect())
}

/// Per-element coefficients where each element sees its own illumination.
pub fn apply_pattern_with<F>(panel: &Panel, pattern: &CodingPattern, mut incidence: F) -> Result<Vec<Complex64>>
where
    F: FnMut(usize) -> Result<Incidence>,
{
    check_groups(panel, pattern)?;
    let model = panel.cell_model();
    (0..panel.element_count())
        .map(|n| model.reflection_coefficient(pattern.values[panel.group_of(n)], &incidence(n)?))
        .collect()
}

fn check_groups(panel: &Panel, pattern: &CodingPattern) -> Result<()> {
    if pattern.values.len() != panel.groups() {
        return Err(Error::config(format!(
            "pattern has {} control values but the panel has {} super-columns",
            pattern.values.len(),
            panel.groups()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Direction;
    use crate::model::ReflectionModel;
    use crate::panel::build_panel;

    fn varactor_panel() -> Panel {
        build_panel(2, 8, 0.035, 0.035, 2, ReflectionModel::ideal_varactor()).unwrap()
    }

    fn pin_panel(cols: usize) -> Panel {
        build_panel(1, cols, 0.005, 0.005, 1, ReflectionModel::ideal_pin()).unwrap()
    }

    #[test]
    fn identical_broadcasts() {
        let p = make_pattern(&PatternSpec::Identical { value: 0.0 }, &varactor_panel()).unwrap();
        assert_eq!(p.values, vec![0.0; 4]);
        assert_eq!(p.id(), "identical");
    }

    #[test]
    fn gradient_inverts_linear_phase() {
        // φ = 360·V/21 inverted at 0°, 90°, 180°, 270°.
        let p = make_pattern(&PatternSpec::Gradient { step_deg: 90.0 }, &varactor_panel()).unwrap();
        let expected = [0.0, 21.0 * 90.0 / 360.0, 21.0 * 180.0 / 360.0, 21.0 * 270.0 / 360.0];
        assert_eq!(expected, [0.0, 5.25, 10.5, 15.75]);
        for (got, want) in p.values.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn stripe_alternates() {
        let p = make_pattern(&PatternSpec::Stripe, &pin_panel(4)).unwrap();
        assert_eq!(p.values, vec![0.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn kind_model_compatibility() {
        assert!(make_pattern(&PatternSpec::Stripe, &varactor_panel()).is_err());
        assert!(make_pattern(&PatternSpec::Gradient { step_deg: 90.0 }, &pin_panel(4)).is_err());
        assert!(make_pattern(&PatternSpec::Identical { value: 30.0 }, &varactor_panel()).is_err());
        assert!(make_pattern(&PatternSpec::Custom { values: vec![0.0; 3] }, &varactor_panel()).is_err());
    }

    #[test]
    fn unreachable_gradient_phase() {
        let panel = build_panel(
            1,
            4,
            0.01,
            0.01,
            1,
            ReflectionModel::IdealVaractor(crate::model::IdealVaractor {
                phase_span_deg: 200.0,
                ..Default::default()
            }),
        )
        .unwrap();
        let err = make_pattern(&PatternSpec::Gradient { step_deg: 90.0 }, &panel).unwrap_err();
        assert!(matches!(err, Error::UnreachablePhase { .. }));
    }

    #[test]
    fn identical_elements_all_equal() {
        let panel = varactor_panel();
        let pat = make_pattern(&PatternSpec::Identical { value: 7.0 }, &panel).unwrap();
        let inc = Incidence::normal(Direction::Uplink);
        let coeffs = apply_pattern(&panel, &pat, &inc).unwrap();
        let g = panel.cell_model().reflection_coefficient(7.0, &inc).unwrap();
        assert_eq!(coeffs.len(), panel.element_count());
        assert!(coeffs.iter().all(|&c| c == g));
    }

    #[test]
    fn stripe_on_two_blocks() {
        let panel = build_panel(2, 4, 0.005, 0.005, 2, ReflectionModel::ideal_pin()).unwrap();
        let pat = make_pattern(&PatternSpec::Stripe, &panel).unwrap();
        let coeffs = apply_pattern(&panel, &pat, &Incidence::normal(Direction::Uplink)).unwrap();
        for (n, c) in coeffs.iter().enumerate() {
            let want = if panel.group_of(n) == 0 { 1.0 } else { -1.0 };
            assert!((c - Complex64::new(want, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn gradient_element_phases_blockwise() {
        let panel = varactor_panel();
        let pat = make_pattern(&PatternSpec::Gradient { step_deg: 90.0 }, &panel).unwrap();
        let coeffs = apply_pattern(&panel, &pat, &Incidence::normal(Direction::Uplink)).unwrap();
        for (n, c) in coeffs.iter().enumerate() {
            let want = 90.0 * panel.group_of(n) as f64;
            let got = c.arg().to_degrees().rem_euclid(360.0);
            assert!((got - want).abs() < 1e-9, "element {n}: {got} vs {want}");
        }
    }

    #[test]
    fn mismatched_group_count() {
        let panel = varactor_panel();
        let bad = CodingPattern {
            kind: PatternKind::Custom,
            values: vec![0.0; 3],
        };
        assert!(apply_pattern(&panel, &bad, &Incidence::normal(Direction::Uplink)).is_err());
    }
}
