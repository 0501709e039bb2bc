//! Measurement-campaign harness: scenario files, voltage-sweep
//! trajectories, pattern tables and pattern search.

mod circle;
mod demo;
mod optimize;
mod report;
mod scenario;
mod sweep;
mod table;

pub use circle::{circle_fit, CircleFit};
pub use demo::{
    round_trip_demo, staircase, RoundTripDemo, DEMO_COLUMNS, DEMO_F1_HZ, DEMO_FM_RATIO, DEMO_GRADIENT_RATIO,
    DEMO_THETA1_DEG,
};
pub use optimize::{optimize_pattern, OptimizeMode, OptimizeResult, MAX_EXHAUSTIVE_GROUPS};
pub use report::{
    emit_plotdata, plotdata_csv, report_csv, report_json, save_report, save_trajectory, trajectory_csv,
    trajectory_json, write_atomic, PlotData, PATTERN_MAP_HEADER, REPORT_HEADER, TRAJECTORY_HEADER,
};
pub use scenario::{
    load_fixture, load_scenario, CellModelSpec, DirectLinkSpec, PanelSpec, Scenario, SweepSpec, FIXTURE_DIR_ENV,
    FIXTURE_IDS,
};
pub use sweep::{add_noise, voltage_sweep, TrajectoryPoint};
pub use table::{pattern_table, render_table, setup_label, ReportRow};
