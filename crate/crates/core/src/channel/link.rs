use num_complex::Complex64;

use super::geometry::{distance, elevation_deg, propagation_factor, Direction, LinkGeometry};
use crate::error::{Error, Result};
use crate::model::Incidence;
use crate::panel::Panel;
use crate::pattern::{apply_pattern_with, CodingPattern};

/// How the non-RIS part of the channel is produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DirectLinkModel {
    None,
    /// Free-space spherical wave between the two antennas.
    FreeSpaceLos,
    /// Stand-in for an unknown but static multipath environment.
    FixedComplex(Complex64),
}

impl DirectLinkModel {
    pub fn name(&self) -> &'static str {
        match self {
            DirectLinkModel::None => "none",
            DirectLinkModel::FreeSpaceLos => "free_space_los",
            DirectLinkModel::FixedComplex(_) => "fixed_complex",
        }
    }
}

/// One evaluated channel coefficient, split into its two parts.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSample {
    pub h_d: Complex64,
    pub h_ris: Complex64,
    pub h_total: Complex64,
    pub direction: Direction,
    pub f_hz: f64,
    pub pattern_id: String,
}

/// Everything needed to evaluate a link in either direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub panel: Panel,
    pub pattern: CodingPattern,
    pub geometry: LinkGeometry,
    pub direct: DirectLinkModel,
}

impl Scene {
    pub fn new(panel: Panel, pattern: CodingPattern, geometry: LinkGeometry, direct: DirectLinkModel) -> Result<Self> {
        geometry.validate()?;
        if pattern.values.len() != panel.groups() {
            return Err(Error::config(format!(
                "pattern has {} control values but the panel has {} super-columns",
                pattern.values.len(),
                panel.groups()
            )));
        }
        if let DirectLinkModel::FixedComplex(h) = direct {
            if !(h.re.is_finite() && h.im.is_finite()) {
                return Err(Error::validation("direct_link", "fixed value must be finite"));
            }
        }
        Ok(Scene {
            panel,
            pattern,
            geometry,
            direct,
        })
    }

    pub fn with_pattern(&self, pattern: CodingPattern) -> Result<Scene> {
        Scene::new(self.panel.clone(), pattern, self.geometry, self.direct)
    }
}

/// Per-element coefficients for a direction, each element illuminated from
/// its own angle to the transmitter and observed at its own angle to the
/// receiver.
pub fn element_coefficients(scene: &Scene, direction: Direction) -> Result<Vec<Complex64>> {
    let (tx, rx) = scene.geometry.endpoints(direction);
    let pt_w = scene.geometry.pt_watts();
    let lambda = scene.geometry.wavelength();
    let positions = scene.panel.positions();
    apply_pattern_with(&scene.panel, &scene.pattern, |n| {
        let p = &positions[n];
        let g_in = propagation_factor(&tx, p, lambda)?;
        Ok(Incidence::new(elevation_deg(p, &tx), elevation_deg(p, &rx), direction).with_power(pt_w * g_in.norm_sqr()))
    })
}

/// `Σ Γ_n · g(tx, n) · g(n, rx)`, summed in row-major element order.
pub fn cascaded_channel(
    panel: &Panel,
    coefficients: &[Complex64],
    geometry: &LinkGeometry,
    direction: Direction,
) -> Result<Complex64> {
    if coefficients.len() != panel.element_count() {
        return Err(Error::config(format!(
            "{} coefficients for {} elements",
            coefficients.len(),
            panel.element_count()
        )));
    }
    let (tx, rx) = geometry.endpoints(direction);
    let lambda = geometry.wavelength();
    let mut h = Complex64::new(0.0, 0.0);
    for (p, gamma) in panel.positions().iter().zip(coefficients) {
        if distance(p, &tx) == 0.0 || distance(p, &rx) == 0.0 {
            return Err(Error::Singularity(format!(
                "antenna sits on the element at ({}, {}, {})",
                p[0], p[1], p[2]
            )));
        }
        // Complex multiplication commutes bit-for-bit, so the two hops can be
        // multiplied before Γ and the uplink and downlink terms stay identical.
        let path = propagation_factor(&tx, p, lambda)? * propagation_factor(p, &rx, lambda)?;
        h += gamma * path;
    }
    Ok(h)
}

pub fn direct_channel(geometry: &LinkGeometry, model: &DirectLinkModel) -> Result<Complex64> {
    match model {
        DirectLinkModel::None => Ok(Complex64::new(0.0, 0.0)),
        DirectLinkModel::FreeSpaceLos => {
            propagation_factor(&geometry.antenna1(), &geometry.antenna2(), geometry.wavelength())
        }
        DirectLinkModel::FixedComplex(h) => Ok(*h),
    }
}

pub fn evaluate_link(scene: &Scene, direction: Direction) -> Result<ChannelSample> {
    let coeffs = element_coefficients(scene, direction)?;
    let h_ris = cascaded_channel(&scene.panel, &coeffs, &scene.geometry, direction)?;
    let h_d = direct_channel(&scene.geometry, &scene.direct)?;
    Ok(ChannelSample {
        h_d,
        h_ris,
        h_total: h_d + h_ris,
        direction,
        f_hz: scene.geometry.f_hz,
        pattern_id: scene.pattern.id().to_string(),
    })
}

/// `Pt + 20·log10|h|`, dBm. A null channel yields `-inf`.
pub fn received_power(pt_dbm: f64, h: Complex64) -> f64 {
    let mag = h.norm();
    if mag == 0.0 {
        f64::NEG_INFINITY
    } else {
        pt_dbm + 20.0 * mag.log10()
    }
}

/// Renders a received power at 0.1 dB, or `below floor` for a null channel.
pub fn format_dbm(p: f64) -> String {
    if p == f64::NEG_INFINITY {
        "below floor".to_string()
    } else {
        format!("{p:.1}")
    }
}
