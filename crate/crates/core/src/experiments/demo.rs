use crate::channel::{wavelength, SPEED_OF_LIGHT};
use crate::error::Result;
use crate::model::ReflectionModel;
use crate::nonreciprocal::{ControlSchedule, Segment};
use crate::panel::{build_panel, Panel};

/// Time-modulated panel and illumination for a round-trip demonstration.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundTripDemo {
    pub panel: Panel,
    pub uplink: ControlSchedule,
    pub downlink: ControlSchedule,
    pub theta1_deg: f64,
    pub f1_hz: f64,
}

pub const DEMO_F1_HZ: f64 = 10e9;
pub const DEMO_THETA1_DEG: f64 = 30.0;
/// Modulation frequency as a fraction of the carrier.
pub const DEMO_FM_RATIO: f64 = 0.05;
/// Per-harmonic spatial gradient as a fraction of the free-space wavenumber.
pub const DEMO_GRADIENT_RATIO: f64 = 0.2;
pub const DEMO_COLUMNS: usize = 64;

/// Four-level phase staircase on an ideal varactor: 0°, 90°, 180°, 270°
/// for a quarter period each. Rising puts the fundamental at `k = +1`,
/// falling at `k = −1`.
pub fn staircase(rising: bool) -> Vec<Segment> {
    let step = 21.0 / 4.0;
    (0..4)
        .map(|i| {
            let level = if rising || i == 0 { i } else { 4 - i };
            Segment::new(i as f64 / 4.0, (i + 1) as f64 / 4.0, step * level as f64)
        })
        .collect()
}

/// One row of quarter-wavelength columns (no grating lobes up to the
/// second harmonic), each its own super-column, with the
/// staircase delayed column by column so that harmonic `k` carries the
/// spatial gradient `k · 0.2 · 2πf1/c`.
///
/// With `cancel` the second pass uses the falling staircase, selecting
/// `k₂ = −k₁` and returning to the original carrier.
pub fn round_trip_demo(cancel: bool) -> Result<RoundTripDemo> {
    let dx = wavelength(DEMO_F1_HZ) / 4.0;
    let panel = build_panel(1, DEMO_COLUMNS, dx, dx, 1, ReflectionModel::ideal_varactor())?;
    let period = 1.0 / (DEMO_FM_RATIO * DEMO_F1_HZ);
    let k0 = 2.0 * std::f64::consts::PI * DEMO_F1_HZ / SPEED_OF_LIGHT;
    // a_{k,g} picks up e^{-j2πk·delay_g}; delay_g = g·shift periods.
    let shift = -DEMO_GRADIENT_RATIO * k0 * dx / (2.0 * std::f64::consts::PI);
    let uplink = ControlSchedule::time_gradient(period, &staircase(true), DEMO_COLUMNS, shift)?;
    let downlink = if cancel {
        ControlSchedule::time_gradient(period, &staircase(false), DEMO_COLUMNS, shift)?
    } else {
        uplink.clone()
    };
    Ok(RoundTripDemo {
        panel,
        uplink,
        downlink,
        theta1_deg: DEMO_THETA1_DEG,
        f1_hz: DEMO_F1_HZ,
    })
}
