//! Link geometry, propagation, and composition of the total channel
//! `h = h_RIS + h_D` in either TDD direction.

mod geometry;
mod link;
mod reciprocity;

pub use geometry::{
    antenna_position, dbm_to_watts, distance, propagation_factor, wavelength, Direction, LinkGeometry, Point3,
    SPEED_OF_LIGHT,
};
pub use link::{
    cascaded_channel, direct_channel, element_coefficients, evaluate_link, format_dbm, received_power,
    ChannelSample, DirectLinkModel, Scene,
};
pub use reciprocity::{reciprocity_report, ReciprocityReport, Tolerances, Verdict};
