mod common;

use num_complex::Complex64;
use proptest::prelude::*;

use ris_recip::channel::{
    cascaded_channel, element_coefficients, evaluate_link, received_power, reciprocity_report, Direction, Tolerances,
    Verdict,
};
use ris_recip::channel::{DirectLinkModel, LinkGeometry, Scene};
use ris_recip::experiments::{add_noise, circle_fit, optimize_pattern, voltage_sweep, OptimizeMode, TrajectoryPoint};
use ris_recip::model::{ControlKind, Incidence, ReflectionModel};
use ris_recip::nonreciprocal::{
    fourier_coefficients, parseval_check, time_domain_oracle, ActiveCellModel, NonlinearCellModel, OracleConfig,
    TransmissionState,
};
use ris_recip::panel::build_panel;
use ris_recip::pattern::CodingPattern;

fn passive_model() -> impl Strategy<Value = ReflectionModel> {
    prop_oneof![
        Just(ReflectionModel::ideal_varactor()),
        Just(ReflectionModel::ideal_pin()),
        (0.0..3.0f64).prop_map(|q| ReflectionModel::angle_dependent(ReflectionModel::ideal_varactor(), q)),
        (0.0..3.0f64).prop_map(|q| ReflectionModel::angle_dependent(ReflectionModel::ideal_pin(), q)),
    ]
}

fn control_for(model: &ReflectionModel, x: f64) -> f64 {
    match (model.control_kind(), model.control_range()) {
        (ControlKind::Continuous, Some((lo, hi))) => lo + (hi - lo) * x,
        _ => (x >= 0.5) as u8 as f64,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn passive_magnitude_bounded(
        model in passive_model(),
        x in 0.0..=1.0f64,
        t_in in -89.0..89.0f64,
        t_out in -89.0..89.0f64,
    ) {
        let c = control_for(&model, x);
        for d in [Direction::Uplink, Direction::Downlink] {
            let g = model.reflection_coefficient(c, &Incidence::new(t_in, t_out, d)).unwrap();
            prop_assert!(g.norm() <= 1.0 + 1e-15);
        }
    }

    #[test]
    fn passive_response_symmetric_in_angles(
        model in passive_model(),
        x in 0.0..=1.0f64,
        a in -89.0..89.0f64,
        b in -89.0..89.0f64,
    ) {
        let c = control_for(&model, x);
        let ab = model.reflection_coefficient(c, &Incidence::new(a, b, Direction::Uplink)).unwrap();
        let ba = model.reflection_coefficient(c, &Incidence::new(b, a, Direction::Downlink)).unwrap();
        prop_assert_eq!(ab, ba);
    }

    #[test]
    fn random_passive_scenes_reciprocal(seed in any::<u64>(), i in 0usize..6) {
        let mut rng = common::rng(seed);
        let scene = common::random_passive_scene(&mut rng, i);
        let r = reciprocity_report(&scene, &Tolerances::default()).unwrap();
        prop_assert!((r.h_up - r.h_down).norm() <= 1e-12 * r.h_up.norm());
        prop_assert_eq!(r.verdict, Verdict::Reciprocal);
    }

    #[test]
    fn cascaded_channel_is_linear(seed in any::<u64>(), alpha_re in -2.0..2.0f64, alpha_im in -2.0..2.0f64) {
        let mut rng = common::rng(seed);
        let a = common::random_passive_scene(&mut rng, 0);
        let b = a.with_pattern(CodingPattern::custom(&a.panel, vec![7.0; a.panel.groups()]).unwrap()).unwrap();
        let ca = element_coefficients(&a, Direction::Uplink).unwrap();
        let cb = element_coefficients(&b, Direction::Uplink).unwrap();
        let alpha = Complex64::new(alpha_re, alpha_im);
        let mixed: Vec<Complex64> = ca.iter().zip(&cb).map(|(x, y)| alpha * x + y).collect();
        let h = |c: &[Complex64]| cascaded_channel(&a.panel, c, &a.geometry, Direction::Uplink).unwrap();
        let lhs = h(&mixed);
        let rhs = alpha * h(&ca) + h(&cb);
        let scale = (alpha.norm() * h(&ca).norm() + h(&cb).norm()).max(1e-300);
        prop_assert!((lhs - rhs).norm() <= 1e-12 * scale);
    }

    #[test]
    fn total_is_direct_plus_ris(seed in any::<u64>(), i in 0usize..6) {
        let mut rng = common::rng(seed);
        let scene = common::random_passive_scene(&mut rng, i);
        for d in [Direction::Uplink, Direction::Downlink] {
            let s = evaluate_link(&scene, d).unwrap();
            prop_assert_eq!(s.h_total, s.h_d + s.h_ris);
        }
    }

    #[test]
    fn power_tracks_transmit_power(seed in any::<u64>(), delta in -20.0..20.0f64) {
        let mut rng = common::rng(seed);
        let scene = common::random_passive_scene(&mut rng, 1);
        let h = evaluate_link(&scene, Direction::Uplink).unwrap().h_total;
        let p0 = received_power(scene.geometry.pt_dbm, h);
        let p1 = received_power(scene.geometry.pt_dbm + delta, h);
        prop_assert!((p1 - p0 - delta).abs() < 1e-9);
    }

    #[test]
    fn nonlinear_forward_beats_reverse(
        t_max in 0.1..=1.0f64,
        c_fwd in 0.0..1.0f64,
        ratio in 1.5..1e4f64,
        exponent in 0.5..4.0f64,
        p_lo in -9.0..1.0f64,
        dp in 0.0..1.0f64,
    ) {
        let m = NonlinearCellModel { t_max, c_fwd, c_rev: c_fwd.max(1e-3) * ratio, exponent, p_ref_w: 1e-3 };
        m.validate().unwrap();
        let (p, q) = (10f64.powf(p_lo), 10f64.powf(p_lo + dp));
        for d in [Direction::Uplink, Direction::Downlink] {
            prop_assert!(m.transmission(d, q).unwrap() <= m.transmission(d, p).unwrap());
        }
        prop_assert!(m.transmission(Direction::Downlink, p).unwrap() >= m.transmission(Direction::Uplink, p).unwrap());
        prop_assert!(m.transmission(Direction::Uplink, p).unwrap() <= t_max);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn grid_schedules_match_oracle(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let s = common::random_grid_schedule(&mut rng);
        let model = ReflectionModel::ideal_varactor();
        let panel = build_panel(1, 1, 0.01, 0.01, 1, model.clone()).unwrap();
        let spec = fourier_coefficients(&s, &model, 8).unwrap();
        let cfg = OracleConfig { n_periods: 4, samples_per_period: 1024, k_max: 8 };
        let oracle = time_domain_oracle(&panel, &s, 0.0, 10e9, 0.0, &cfg).unwrap();
        for k in -8..=8 {
            prop_assert!((spec.coefficient(k, 0) - oracle.line(k)).norm() <= 1e-6);
        }
        let p = parseval_check(&s, &model, &spec, 0, &Incidence::normal(Direction::Uplink)).unwrap();
        prop_assert!(p.residual() <= 1e-9);
    }
}

fn binary_scene(seed: u64, groups: usize) -> Scene {
    use rand::Rng;
    let mut rng = common::rng(seed);
    let panel = build_panel(rng.random_range(1..=4), groups, 0.00555, 0.00555, 1, ReflectionModel::ideal_pin()).unwrap();
    let pattern = CodingPattern::custom(&panel, vec![0.0; groups]).unwrap();
    let geometry = common::random_geometry(&mut rng, 27e9);
    let variant = rng.random_range(0..3);
    let direct = common::random_direct(&mut rng, variant);
    Scene::new(panel, pattern, geometry, direct).unwrap()
}

#[test]
fn exhaustive_dominates_greedy() {
    for seed in 0..100u64 {
        let scene = binary_scene(seed, 4 + (seed % 7) as usize);
        let ex = optimize_pattern(&scene, OptimizeMode::ExhaustiveBits).unwrap();
        let gr = optimize_pattern(&scene, OptimizeMode::GreedyBits).unwrap();
        assert!(ex.p_up_dbm >= gr.p_up_dbm, "seed {seed}: {} < {}", ex.p_up_dbm, gr.p_up_dbm);
        assert!(gr.p_up_dbm >= gr.baseline_up_dbm, "seed {seed}");
        assert_eq!(ex.gain_up_db(), ex.gain_down_db());
    }
}

#[test]
fn circle_fit_under_noise() {
    let geometry = LinkGeometry {
        d1_m: 1.5,
        theta1_deg: 30.0,
        d2_m: 0.5,
        theta2_deg: 0.0,
        f_hz: 4.25e9,
        pt_dbm: 0.0,
    };
    let panel = build_panel(8, 8, 0.03527, 0.03527, 2, ReflectionModel::ideal_varactor()).unwrap();
    let pattern = CodingPattern::custom(&panel, vec![0.0; 4]).unwrap();
    let h_d = Complex64::new(2e-3, 1e-3);
    let scene = Scene::new(panel, pattern, geometry, DirectLinkModel::FixedComplex(h_d)).unwrap();
    let clean: Vec<TrajectoryPoint> = voltage_sweep(&scene, 211).unwrap();
    let radius = circle_fit(&clean.iter().map(|p| p.h_up).collect::<Vec<_>>()).unwrap().radius;
    let sigma = 0.01 * radius;
    let mut errors = Vec::new();
    for seed in 0..100 {
        let noisy = add_noise(&clean, sigma, seed).unwrap();
        let fit = circle_fit(&noisy.iter().map(|p| p.h_up).collect::<Vec<_>>()).unwrap();
        errors.push((fit.center - h_d).norm());
        assert!((fit.radius - radius).abs() < 5.0 * sigma, "seed {seed}");
    }
    let mean = errors.iter().sum::<f64>() / errors.len() as f64;
    // Centre error of an n-point full-circle fit scales like σ·sqrt(2/n).
    assert!(mean < 3.0 * sigma * (2.0f64 / 211.0).sqrt(), "mean centre error {mean:e}");
    assert_eq!(add_noise(&clean, sigma, 3).unwrap(), add_noise(&clean, sigma, 3).unwrap());
}

#[test]
fn active_states_follow_their_definitions() {
    let g = 10f64.powf(13.0 / 20.0);
    let iso = 10f64.powf(-60.0 / 20.0);
    for state in TransmissionState::ALL {
        let m = ActiveCellModel {
            state,
            gain_db: 13.0,
            isolation_db: 60.0,
        };
        let (down, up) = (m.gain(Direction::Downlink).norm(), m.gain(Direction::Uplink).norm());
        let want = match state {
            TransmissionState::Bidirectional => (g, g),
            TransmissionState::ForwardOnly => (g, iso),
            TransmissionState::BackwardOnly => (iso, g),
            TransmissionState::Off => (0.0, 0.0),
        };
        assert!((down - want.0).abs() < 1e-12 && (up - want.1).abs() < 1e-12, "{state:?}");
    }
}
