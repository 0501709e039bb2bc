#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ris_recip::channel::{DirectLinkModel, LinkGeometry, Scene};
use ris_recip::model::ReflectionModel;
use ris_recip::nonreciprocal::{ControlSchedule, Segment};
use ris_recip::panel::build_panel;
use ris_recip::pattern::CodingPattern;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Geometry drawn from the ranges of the four bench setups.
pub fn random_geometry(rng: &mut impl Rng, f_hz: f64) -> LinkGeometry {
    LinkGeometry {
        d1_m: rng.random_range(0.5..=1.5),
        theta1_deg: rng.random_range(5.0..=50.0),
        d2_m: rng.random_range(0.5..=1.5),
        theta2_deg: rng.random_range(0.0..=30.0),
        f_hz,
        pt_dbm: rng.random_range(-10.0..=10.0),
    }
}

pub fn random_direct(rng: &mut impl Rng, variant: usize) -> DirectLinkModel {
    match variant % 3 {
        0 => DirectLinkModel::None,
        1 => DirectLinkModel::FreeSpaceLos,
        _ => DirectLinkModel::FixedComplex(Complex64::new(
            rng.random_range(-3e-3..3e-3),
            rng.random_range(-3e-3..3e-3),
        )),
    }
}

/// Passive scene: even `i` gives a small varactor panel at 4.25 GHz, odd `i`
/// a PIN panel at 27 GHz. Controls, angle taper and direct link are random.
pub fn random_passive_scene(rng: &mut impl Rng, i: usize) -> Scene {
    let varactor = i.is_multiple_of(2);
    let (f_hz, dx, base) = if varactor {
        (4.25e9, 0.03527, ReflectionModel::ideal_varactor())
    } else {
        (27e9, 0.00555, ReflectionModel::ideal_pin())
    };
    let model = if rng.random_bool(0.3) {
        ReflectionModel::angle_dependent(base, rng.random_range(0.0..2.0))
    } else {
        base
    };
    let rows = rng.random_range(1..=8);
    let group_cols = rng.random_range(1..=3);
    let cols = group_cols * rng.random_range(1..=4);
    let panel = build_panel(rows, cols, dx, dx, group_cols, model).unwrap();
    let values = (0..panel.groups())
        .map(|_| {
            if varactor {
                rng.random_range(0.0..=21.0)
            } else {
                rng.random_range(0..=1) as f64
            }
        })
        .collect();
    let pattern = CodingPattern::custom(&panel, values).unwrap();
    let geometry = random_geometry(rng, f_hz);
    let direct = random_direct(rng, i / 2);
    Scene::new(panel, pattern, geometry, direct).unwrap()
}

/// Varactor schedule whose breakpoints lie on the `1/64` grid.
pub fn random_grid_schedule(rng: &mut impl Rng) -> ControlSchedule {
    let n_breaks = rng.random_range(1..=8);
    let mut cuts: Vec<u32> = (0..n_breaks).map(|_| rng.random_range(1..64)).collect();
    cuts.sort_unstable();
    cuts.dedup();
    let mut edges = vec![0.0];
    edges.extend(cuts.iter().map(|&c| c as f64 / 64.0));
    edges.push(1.0);
    let segments = edges
        .windows(2)
        .map(|w| Segment::new(w[0], w[1], rng.random_range(0.0..=21.0)))
        .collect();
    ControlSchedule::new(1e-9, vec![segments]).unwrap()
}

pub fn square_wave() -> ControlSchedule {
    ControlSchedule::new(
        1e-9,
        vec![vec![Segment::new(0.0, 0.5, 0.0), Segment::new(0.5, 1.0, 10.5)]],
    )
    .unwrap()
}
