use super::schedule::ControlSchedule;
use crate::channel::{evaluate_link, ChannelSample, Direction, Scene};
use crate::error::{Error, Result};
use crate::pattern::CodingPattern;

/// Channel of one TDD slot: the schedule frozen at `slot_time_s mod T0`.
pub fn tdd_slot_channel(
    scene: &Scene,
    schedule: &ControlSchedule,
    slot_time_s: f64,
    direction: Direction,
) -> Result<ChannelSample> {
    if !(slot_time_s >= 0.0 && slot_time_s.is_finite()) {
        return Err(Error::Argument(format!("slot time {slot_time_s} s must be >= 0")));
    }
    if schedule.group_count() != scene.panel.groups() {
        return Err(Error::Schedule(format!(
            "schedule has {} groups but the panel has {}",
            schedule.group_count(),
            scene.panel.groups()
        )));
    }
    let pattern = CodingPattern::custom(&scene.panel, schedule.values_at(slot_time_s))?;
    evaluate_link(&scene.with_pattern(pattern)?, direction)
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;
    use crate::channel::{DirectLinkModel, LinkGeometry};
    use crate::model::ReflectionModel;
    use crate::nonreciprocal::schedule::Segment;
    use crate::panel::build_panel;
    use crate::pattern::{make_pattern, PatternSpec};

    fn scene() -> Scene {
        let panel = build_panel(4, 4, 0.0353, 0.0353, 2, ReflectionModel::ideal_pin()).unwrap();
        let pattern = make_pattern(&PatternSpec::Identical { value: 0.0 }, &panel).unwrap();
        let geometry = LinkGeometry {
            d1_m: 1.5,
            theta1_deg: 30.0,
            d2_m: 0.5,
            theta2_deg: 0.0,
            f_hz: 4.25e9,
            pt_dbm: 0.0,
        };
        Scene::new(panel, pattern, geometry, DirectLinkModel::FixedComplex(Complex64::new(2e-3, 1e-3))).unwrap()
    }

    #[test]
    fn constant_schedule_is_time_invariant() {
        let s = ControlSchedule::constant(1e-6, &[1.0, 0.0]).unwrap();
        let a = tdd_slot_channel(&scene(), &s, 0.0, Direction::Uplink).unwrap();
        let b = tdd_slot_channel(&scene(), &s, 0.37e-6, Direction::Uplink).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn half_period_flips_ris_part() {
        let seg = vec![Segment::new(0.0, 0.5, 0.0), Segment::new(0.5, 1.0, 1.0)];
        let s = ControlSchedule::new(1e-6, vec![seg.clone(), seg]).unwrap();
        let a = tdd_slot_channel(&scene(), &s, 0.0, Direction::Uplink).unwrap();
        let b = tdd_slot_channel(&scene(), &s, 0.5e-6, Direction::Downlink).unwrap();
        assert!((a.h_ris + b.h_ris).norm() <= 1e-12 * a.h_ris.norm());
    }

    #[test]
    fn negative_slot_rejected() {
        let s = ControlSchedule::constant(1e-6, &[1.0, 0.0]).unwrap();
        assert!(tdd_slot_channel(&scene(), &s, -1.0, Direction::Uplink).is_err());
    }
}
