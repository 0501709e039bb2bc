//! Mechanisms that break reciprocity: one-way amplification, time-varying
//! coding, and power-dependent transmission.

mod active;
mod harmonics;
mod nonlinear;
mod oracle;
mod radiation;
mod schedule;
mod tdd;

pub use active::{active_gain, ActiveCellModel, TransmissionState};
pub use harmonics::{fourier_coefficients, fourier_coefficients_at, parseval_check, HarmonicSpectrum, ParsevalCheck};
pub use nonlinear::{nonlinear_transmission, NonlinearCellModel};
pub use oracle::{time_domain_oracle, OracleConfig, OracleSpectrum};
pub use radiation::{
    angle_grid, dominant_response, harmonic_radiation, round_trip_test, round_trip_test_with, RadiationMap,
    RadiationSample, ReturnPath, RoundTripOptions, RoundTripRecord,
};
pub use schedule::{ControlSchedule, Segment};
pub(crate) use schedule::parse_error;
pub use tdd::tdd_slot_channel;
