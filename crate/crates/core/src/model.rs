//! Unit-cell response models.
//!
//! A [`ReflectionModel`] maps a control value (bias voltage, PIN bit, or
//! nothing at all for the fixed-response cells) plus the illumination
//! context to a complex reflection/transmission coefficient. Passive
//! variants never exceed unit magnitude and never depend on the direction of
//! propagation; the active and nonlinear variants are the ones that do.

use std::io::Read;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::Direction;
use crate::error::{Error, Result};
use crate::nonreciprocal::{ActiveCellModel, NonlinearCellModel};

/// Illumination context for a single cell evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Incidence {
    pub theta_in_deg: f64,
    pub theta_out_deg: f64,
    pub direction: Direction,
    /// Power incident on the cell, watts. Only the nonlinear cell reads it.
    pub power_w: f64,
}

impl Incidence {
    pub fn new(theta_in_deg: f64, theta_out_deg: f64, direction: Direction) -> Self {
        Incidence {
            theta_in_deg,
            theta_out_deg,
            direction,
            power_w: 0.0,
        }
    }

    /// Broadside illumination and observation.
    pub fn normal(direction: Direction) -> Self {
        Self::new(0.0, 0.0, direction)
    }

    pub fn with_power(mut self, power_w: f64) -> Self {
        self.power_w = power_w;
        self
    }
}

/// Varactor cell with a linear phase ramp over its bias range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IdealVaractor {
    pub v_min: f64,
    pub v_max: f64,
    pub phase_span_deg: f64,
    pub magnitude: f64,
}

impl Default for IdealVaractor {
    fn default() -> Self {
        IdealVaractor {
            v_min: 0.0,
            v_max: 21.0,
            phase_span_deg: 360.0,
            magnitude: 1.0,
        }
    }
}

/// 1-bit PIN-diode cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IdealPin {
    pub phase_state_0_deg: f64,
    pub phase_state_1_deg: f64,
    pub magnitude: f64,
}

impl Default for IdealPin {
    fn default() -> Self {
        IdealPin {
            phase_state_0_deg: 0.0,
            phase_state_1_deg: 180.0,
            magnitude: 1.0,
        }
    }
}

/// One measured point of a varactor response curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VaractorSample {
    pub voltage: f64,
    pub magnitude: f64,
    pub phase_deg: f64,
}

/// Tabulated varactor response, interpolated linearly in magnitude and
/// unwrapped phase.
#[derive(Debug, Clone, PartialEq)]
pub struct VaractorTable {
    samples: Vec<VaractorSample>,
    unwrapped_deg: Vec<f64>,
}

impl VaractorTable {
    pub fn new(samples: Vec<VaractorSample>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::config("varactor table has no samples"));
        }
        for (i, s) in samples.iter().enumerate() {
            if !(s.voltage.is_finite() && s.magnitude.is_finite() && s.phase_deg.is_finite()) {
                return Err(Error::config(format!("varactor table row {i} is not finite")));
            }
            if !(0.0..=1.0).contains(&s.magnitude) {
                return Err(Error::config(format!(
                    "varactor table row {i}: magnitude {} outside [0, 1]",
                    s.magnitude
                )));
            }
        }
        if let Some(w) = samples.windows(2).find(|w| w[1].voltage <= w[0].voltage) {
            return Err(Error::config(format!(
                "varactor table voltages must be strictly increasing ({} V followed by {} V)",
                w[0].voltage, w[1].voltage
            )));
        }
        let mut unwrapped_deg = Vec::with_capacity(samples.len());
        unwrapped_deg.push(samples[0].phase_deg);
        for w in samples.windows(2) {
            let prev = *unwrapped_deg.last().unwrap();
            let step = wrap_deg(w[1].phase_deg - w[0].phase_deg);
            unwrapped_deg.push(prev + step);
        }
        Ok(VaractorTable {
            samples,
            unwrapped_deg,
        })
    }

    /// Reads the `voltage_V,magnitude,phase_deg` CSV format.
    pub fn from_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| Error::config(format!("varactor table header: {e}")))?
            .clone();
        let expected = ["voltage_V", "magnitude", "phase_deg"];
        if headers.len() != 3 || headers.iter().zip(expected).any(|(h, e)| h != e) {
            return Err(Error::config(format!(
                "varactor table header must be `voltage_V,magnitude,phase_deg`, got `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut samples = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::config(format!("varactor table row {}: {e}", i + 1)))?;
            let field = |j: usize| -> Result<f64> {
                rec.get(j)
                    .ok_or_else(|| Error::config(format!("varactor table row {}: missing column {}", i + 1, expected[j])))?
                    .parse::<f64>()
                    .map_err(|e| Error::config(format!("varactor table row {}, column {}: {e}", i + 1, expected[j])))
            };
            samples.push(VaractorSample {
                voltage: field(0)?,
                magnitude: field(1)?,
                phase_deg: field(2)?,
            });
        }
        Self::new(samples)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(file)
    }

    pub fn samples(&self) -> &[VaractorSample] {
        &self.samples
    }

    pub fn voltage_range(&self) -> (f64, f64) {
        (self.samples[0].voltage, self.samples[self.samples.len() - 1].voltage)
    }

    /// Interpolated (magnitude, phase in degrees). Between samples the phase
    /// comes from the unwrapped curve; on a sample it is the raw value.
    pub fn interpolate(&self, voltage: f64) -> Result<(f64, f64)> {
        let (lo, hi) = self.voltage_range();
        if !(lo..=hi).contains(&voltage) {
            return Err(Error::Range {
                what: "varactor voltage",
                value: voltage,
                min: lo,
                max: hi,
            });
        }
        let i = self.samples.partition_point(|s| s.voltage <= voltage) - 1;
        let a = &self.samples[i];
        if a.voltage == voltage {
            return Ok((a.magnitude, a.phase_deg));
        }
        let b = &self.samples[i + 1];
        let t = (voltage - a.voltage) / (b.voltage - a.voltage);
        let mag = a.magnitude + t * (b.magnitude - a.magnitude);
        let pa = self.unwrapped_deg[i];
        let pb = self.unwrapped_deg[i + 1];
        Ok((mag, pa + t * (pb - pa)))
    }

    /// Control voltage whose phase, relative to the first sample, equals the
    /// target modulo 360°. Bisection on the unwrapped curve, which must be
    /// strictly monotone.
    fn invert_relative_phase(&self, target_deg: f64) -> Result<f64> {
        let base = self.unwrapped_deg[0];
        let rel: Vec<f64> = self.unwrapped_deg.iter().map(|p| p - base).collect();
        let increasing = rel.windows(2).all(|w| w[1] > w[0]);
        let decreasing = rel.windows(2).all(|w| w[1] < w[0]);
        if self.samples.len() > 1 && !increasing && !decreasing {
            return Err(Error::config(
                "varactor table phase is not monotone in voltage; it cannot be inverted",
            ));
        }
        let (pmin, pmax) = if decreasing && self.samples.len() > 1 {
            (rel[rel.len() - 1], 0.0)
        } else {
            (0.0, rel[rel.len() - 1])
        };
        // Smallest representative of target + 360m that is >= pmin.
        let t = target_deg - 360.0 * ((target_deg - pmin) / 360.0).floor();
        if t > pmax {
            return Err(Error::UnreachablePhase { target_deg });
        }
        let (mut lo, mut hi) = self.voltage_range();
        let phase_rel = |v: f64| -> f64 { self.interpolate_unwrapped(v) - base };
        let sign = if decreasing && self.samples.len() > 1 { -1.0 } else { 1.0 };
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if sign * (phase_rel(mid) - t) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    fn interpolate_unwrapped(&self, voltage: f64) -> f64 {
        let i = self
            .samples
            .partition_point(|s| s.voltage <= voltage)
            .clamp(1, self.samples.len())
            - 1;
        if i + 1 >= self.samples.len() {
            return self.unwrapped_deg[i];
        }
        let a = &self.samples[i];
        let b = &self.samples[i + 1];
        let t = (voltage - a.voltage) / (b.voltage - a.voltage);
        self.unwrapped_deg[i] + t * (self.unwrapped_deg[i + 1] - self.unwrapped_deg[i])
    }
}

/// How a model is driven.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControlKind {
    /// Continuous bias voltage.
    Continuous,
    /// 1-bit state, control values 0 or 1.
    Binary,
    /// Control value is ignored.
    Fixed,
}

/// Reciprocity-breaking mechanism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mechanism {
    Active,
    TimeVarying,
    Nonlinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReciprocityClass {
    Reciprocal,
    Nonreciprocal(Mechanism),
}

impl std::fmt::Display for ReciprocityClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ReciprocityClass::Reciprocal => f.write_str("Reciprocal"),
            ReciprocityClass::Nonreciprocal(m) => write!(f, "Nonreciprocal ({m:?})"),
        }
    }
}

/// Parametric unit-cell response.
#[derive(Debug, Clone, PartialEq)]
pub enum ReflectionModel {
    IdealVaractor(IdealVaractor),
    TableVaractor(VaractorTable),
    IdealPin(IdealPin),
    /// Base response scaled by `cos^q(θ_in) · cos^q(θ_out)`.
    AngleDependent { base: Box<ReflectionModel>, q: f64 },
    Active(ActiveCellModel),
    Nonlinear(NonlinearCellModel),
}

impl ReflectionModel {
    pub fn ideal_varactor() -> Self {
        ReflectionModel::IdealVaractor(IdealVaractor::default())
    }

    pub fn ideal_pin() -> Self {
        ReflectionModel::IdealPin(IdealPin::default())
    }

    pub fn angle_dependent(base: ReflectionModel, q: f64) -> Self {
        ReflectionModel::AngleDependent {
            base: Box::new(base),
            q,
        }
    }

    /// Checks the parameter invariants of the variant.
    pub fn validate(&self) -> Result<()> {
        match self {
            ReflectionModel::IdealVaractor(m) => {
                if !(m.v_min.is_finite() && m.v_max.is_finite()) || m.v_max <= m.v_min {
                    return Err(Error::config(format!(
                        "ideal varactor needs v_min < v_max, got [{}, {}]",
                        m.v_min, m.v_max
                    )));
                }
                if !(m.phase_span_deg > 0.0 && m.phase_span_deg <= 360.0) {
                    return Err(Error::config(format!(
                        "ideal varactor phase span {}° outside (0, 360]",
                        m.phase_span_deg
                    )));
                }
                check_magnitude(m.magnitude)
            }
            ReflectionModel::TableVaractor(_) => Ok(()),
            ReflectionModel::IdealPin(m) => check_magnitude(m.magnitude),
            ReflectionModel::AngleDependent { base, q } => {
                if !(q.is_finite() && *q >= 0.0) {
                    return Err(Error::config(format!("angular taper exponent {q} must be >= 0")));
                }
                base.validate()
            }
            ReflectionModel::Active(m) => m.validate(),
            ReflectionModel::Nonlinear(m) => m.validate(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ReflectionModel::IdealVaractor(_) => "ideal varactor",
            ReflectionModel::TableVaractor(_) => "table varactor",
            ReflectionModel::IdealPin(_) => "ideal PIN",
            ReflectionModel::AngleDependent { .. } => "angle-dependent",
            ReflectionModel::Active(_) => "active",
            ReflectionModel::Nonlinear(_) => "nonlinear",
        }
    }

    pub fn control_kind(&self) -> ControlKind {
        match self {
            ReflectionModel::IdealVaractor(_) | ReflectionModel::TableVaractor(_) => {
                ControlKind::Continuous
            }
            ReflectionModel::IdealPin(_) => ControlKind::Binary,
            ReflectionModel::AngleDependent { base, .. } => base.control_kind(),
            ReflectionModel::Active(_) | ReflectionModel::Nonlinear(_) => ControlKind::Fixed,
        }
    }

    /// Legal control interval. Binary cells report `[0, 1]`, fixed cells `None`.
    pub fn control_range(&self) -> Option<(f64, f64)> {
        match self {
            ReflectionModel::IdealVaractor(m) => Some((m.v_min, m.v_max)),
            ReflectionModel::TableVaractor(t) => Some(t.voltage_range()),
            ReflectionModel::IdealPin(_) => Some((0.0, 1.0)),
            ReflectionModel::AngleDependent { base, .. } => base.control_range(),
            ReflectionModel::Active(_) | ReflectionModel::Nonlinear(_) => None,
        }
    }

    /// The control value used as the "all cells at rest" reference.
    pub fn rest_control(&self) -> f64 {
        self.control_range().map_or(0.0, |(lo, _)| lo)
    }

    pub fn is_passive(&self) -> bool {
        match self {
            ReflectionModel::AngleDependent { base, .. } => base.is_passive(),
            ReflectionModel::Active(_) => false,
            _ => true,
        }
    }

    /// Declared reciprocity of the cell at fixed control and fixed time.
    pub fn reciprocity_class(&self) -> ReciprocityClass {
        match self {
            ReflectionModel::AngleDependent { base, .. } => base.reciprocity_class(),
            ReflectionModel::Active(m) => {
                if m.gain(Direction::Uplink) == m.gain(Direction::Downlink) {
                    ReciprocityClass::Reciprocal
                } else {
                    ReciprocityClass::Nonreciprocal(Mechanism::Active)
                }
            }
            ReflectionModel::Nonlinear(m) => {
                if m.c_fwd == m.c_rev {
                    ReciprocityClass::Reciprocal
                } else {
                    ReciprocityClass::Nonreciprocal(Mechanism::Nonlinear)
                }
            }
            _ => ReciprocityClass::Reciprocal,
        }
    }

    /// Complex response of one cell.
    pub fn reflection_coefficient(&self, control: f64, inc: &Incidence) -> Result<Complex64> {
        check_angle("theta_in", inc.theta_in_deg)?;
        check_angle("theta_out", inc.theta_out_deg)?;
        self.response(control, inc)
    }

    fn response(&self, control: f64, inc: &Incidence) -> Result<Complex64> {
        match self {
            ReflectionModel::IdealVaractor(m) => {
                check_range("varactor voltage", control, m.v_min, m.v_max)?;
                let phase = m.phase_span_deg * (control - m.v_min) / (m.v_max - m.v_min);
                Ok(Complex64::from_polar(m.magnitude, phase.to_radians()))
            }
            ReflectionModel::TableVaractor(t) => {
                let (mag, phase) = t.interpolate(control)?;
                Ok(Complex64::from_polar(mag, phase.to_radians()))
            }
            ReflectionModel::IdealPin(m) => {
                let phase = match pin_state(control)? {
                    false => m.phase_state_0_deg,
                    true => m.phase_state_1_deg,
                };
                Ok(Complex64::from_polar(m.magnitude, phase.to_radians()))
            }
            ReflectionModel::AngleDependent { base, q } => {
                let g = base.response(control, inc)?;
                // Product of the two tapers first: multiplication is
                // commutative, so swapping the angles is bit-exact.
                let taper = inc.theta_in_deg.to_radians().cos().powf(*q)
                    * inc.theta_out_deg.to_radians().cos().powf(*q);
                Ok(g * taper)
            }
            ReflectionModel::Active(m) => Ok(m.gain(inc.direction)),
            ReflectionModel::Nonlinear(m) => {
                Ok(Complex64::new(m.transmission(inc.direction, inc.power_w)?, 0.0))
            }
        }
    }

    /// Checks a control value against the model's legal range.
    pub fn check_control(&self, control: f64) -> Result<()> {
        if !control.is_finite() {
            return Err(Error::Argument(format!("control value {control} is not finite")));
        }
        match self.control_kind() {
            ControlKind::Binary => pin_state(control).map(|_| ()),
            ControlKind::Continuous => {
                let (lo, hi) = self.control_range().expect("continuous models have a range");
                check_range("varactor voltage", control, lo, hi)
            }
            ControlKind::Fixed => Ok(()),
        }
    }

    /// Phase of a continuous cell relative to its rest control, unwrapped, degrees.
    pub fn relative_phase_deg(&self, control: f64) -> Result<f64> {
        match self {
            ReflectionModel::IdealVaractor(m) => {
                check_range("varactor voltage", control, m.v_min, m.v_max)?;
                Ok(m.phase_span_deg * (control - m.v_min) / (m.v_max - m.v_min))
            }
            ReflectionModel::TableVaractor(t) => {
                t.interpolate(control)?;
                Ok(t.interpolate_unwrapped(control) - t.unwrapped_deg[0])
            }
            ReflectionModel::AngleDependent { base, .. } => base.relative_phase_deg(control),
            other => Err(Error::config(format!(
                "{} cell has no continuous phase curve",
                other.name()
            ))),
        }
    }

    /// Control value that yields `target_deg` (modulo 360°) relative to the
    /// rest control. Continuous models only.
    pub fn control_for_phase(&self, target_deg: f64) -> Result<f64> {
        match self {
            ReflectionModel::IdealVaractor(m) => {
                let t = target_deg.rem_euclid(360.0);
                let t = if t >= 360.0 { 0.0 } else { t };
                if t > m.phase_span_deg {
                    return Err(Error::UnreachablePhase { target_deg });
                }
                Ok(m.v_min + t / m.phase_span_deg * (m.v_max - m.v_min))
            }
            ReflectionModel::TableVaractor(t) => t.invert_relative_phase(target_deg),
            ReflectionModel::AngleDependent { base, .. } => base.control_for_phase(target_deg),
            other => Err(Error::config(format!(
                "{} cell has no continuous phase curve to invert",
                other.name()
            ))),
        }
    }

    /// Empirical reciprocity probe: compares the uplink response at
    /// `(θa, θb)` with the downlink response at `(θb, θa)` over every
    /// combination of the supplied controls, angle pairs and powers.
    pub fn probe_reciprocity(
        &self,
        controls: &[f64],
        angle_pairs: &[(f64, f64)],
        powers_w: &[f64],
    ) -> Result<bool> {
        for &c in controls {
            for &(a, b) in angle_pairs {
                for &p in powers_w {
                    let up = Incidence::new(a, b, Direction::Uplink).with_power(p);
                    let down = Incidence::new(b, a, Direction::Downlink).with_power(p);
                    if self.reflection_coefficient(c, &up)? != self.reflection_coefficient(c, &down)? {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }
}

/// Wraps an angle difference into (-180°, 180°].
pub(crate) fn wrap_deg(d: f64) -> f64 {
    let w = d.rem_euclid(360.0);
    if w > 180.0 {
        w - 360.0
    } else {
        w
    }
}

fn pin_state(control: f64) -> Result<bool> {
    if control == 0.0 {
        Ok(false)
    } else if control == 1.0 {
        Ok(true)
    } else {
        Err(Error::Range {
            what: "PIN state (must be exactly 0 or 1)",
            value: control,
            min: 0.0,
            max: 1.0,
        })
    }
}

fn check_range(what: &'static str, value: f64, min: f64, max: f64) -> Result<()> {
    if (min..=max).contains(&value) {
        Ok(())
    } else {
        Err(Error::Range {
            what,
            value,
            min,
            max,
        })
    }
}

fn check_angle(what: &'static str, deg: f64) -> Result<()> {
    if deg.abs() < 90.0 {
        Ok(())
    } else {
        Err(Error::Range {
            what,
            value: deg,
            min: -90.0,
            max: 90.0,
        })
    }
}

fn check_magnitude(m: f64) -> Result<()> {
    if (0.0..=1.0).contains(&m) {
        Ok(())
    } else {
        Err(Error::config(format!("passive magnitude {m} outside [0, 1]")))
    }
}
