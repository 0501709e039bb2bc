use std::f64::consts::PI;

use num_complex::Complex64;

use super::harmonics::{fourier_coefficients_at, HarmonicSpectrum};
use super::schedule::ControlSchedule;
use crate::channel::{Direction, SPEED_OF_LIGHT};
use crate::error::{Error, Result};
use crate::model::Incidence;
use crate::panel::Panel;

/// Far-field amplitude of one harmonic in one direction. `theta_deg` is the
/// position angle of the observer, so the static specular beam sits at
/// `-θ_in`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiationSample {
    pub k: i64,
    pub theta_deg: f64,
    pub amplitude: Complex64,
}

/// Amplitudes over a harmonic band and an angle grid, ordered by `k` then `θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiationMap {
    pub f_hz: f64,
    pub modulation_hz: f64,
    pub theta_in_deg: f64,
    pub samples: Vec<RadiationSample>,
}

/// Uniform grid over the open interval (−90°, 90°), symmetric about 0.
pub fn angle_grid(resolution_deg: f64) -> Result<Vec<f64>> {
    if !(resolution_deg > 0.0 && resolution_deg < 90.0) {
        return Err(Error::Argument(format!("grid resolution {resolution_deg}° outside (0, 90)")));
    }
    let half = (90.0 / resolution_deg).ceil() as i64 - 1;
    Ok((-half..=half).map(|i| i as f64 * resolution_deg).collect())
}

/// Plane-wave far field of the panel:
/// `A(k, θ) = Σ_n a_{k,n} · e^{j(2πf/c)·sinθ_in·x_n + j(2π(f + k·f_m)/c)·sinθ·x_n}`.
///
/// Azimuth is fixed at 0, so rows add coherently and the sum is taken per
/// column and scaled by the row count.
pub fn harmonic_radiation(
    panel: &Panel,
    spectrum: &HarmonicSpectrum,
    theta_in_deg: f64,
    f_hz: f64,
    theta_grid_deg: &[f64],
    k_range: std::ops::RangeInclusive<i64>,
) -> Result<RadiationMap> {
    if theta_grid_deg.is_empty() {
        return Err(Error::Argument("empty angle grid".into()));
    }
    if let Some(t) = theta_grid_deg.iter().chain([&theta_in_deg]).find(|t| !(t.abs() < 90.0)) {
        return Err(Error::Argument(format!("angle {t}° outside (-90, 90)")));
    }
    if !(f_hz > 0.0 && f_hz.is_finite()) {
        return Err(Error::Argument(format!("carrier {f_hz} Hz must be > 0")));
    }
    if spectrum.group_count() != panel.groups() {
        return Err(Error::config(format!(
            "spectrum has {} groups but the panel has {}",
            spectrum.group_count(),
            panel.groups()
        )));
    }
    let fm = spectrum.modulation_hz();
    let rows = panel.rows() as f64;
    let x0 = panel.positions()[0][0];
    let dx = panel.dx();
    let k_in = 2.0 * PI * f_hz / SPEED_OF_LIGHT * theta_in_deg.to_radians().sin();
    let sines: Vec<f64> = theta_grid_deg.iter().map(|t| t.to_radians().sin()).collect();

    let mut samples = Vec::with_capacity(theta_grid_deg.len() * k_range.clone().count());
    for k in k_range {
        let fk = f_hz + k as f64 * fm;
        if fk <= 0.0 {
            return Err(Error::Argument(format!("harmonic {k} has non-positive frequency {fk} Hz")));
        }
        let beta = 2.0 * PI * fk / SPEED_OF_LIGHT;
        let weights: Vec<Complex64> = (0..panel.cols())
            .map(|c| {
                let x = x0 + c as f64 * dx;
                spectrum.coefficient(k, c / panel.group_cols()) * Complex64::from_polar(rows, k_in * x)
            })
            .collect();
        for (&theta_deg, &s) in theta_grid_deg.iter().zip(&sines) {
            // Columns are uniformly spaced: advance the observation phase
            // by a fixed rotation per column.
            let step = Complex64::from_polar(1.0, beta * s * dx);
            let mut phase = Complex64::from_polar(1.0, beta * s * x0);
            let mut amplitude = Complex64::new(0.0, 0.0);
            for w in &weights {
                amplitude += w * phase;
                phase *= step;
            }
            samples.push(RadiationSample {
                k,
                theta_deg,
                amplitude,
            });
        }
    }
    Ok(RadiationMap {
        f_hz,
        modulation_hz: fm,
        theta_in_deg,
        samples,
    })
}

/// Strongest entry; ties go to the smaller `|k|`, then the smaller angle.
pub fn dominant_response(map: &RadiationMap) -> Result<RadiationSample> {
    let mut best: Option<(f64, RadiationSample)> = None;
    for s in &map.samples {
        let m = s.amplitude.norm();
        let better = match &best {
            None => true,
            Some((bm, b)) => {
                m > *bm
                    || (m == *bm
                        && (s.k.abs(), s.theta_deg).partial_cmp(&(b.k.abs(), b.theta_deg))
                            == Some(std::cmp::Ordering::Less))
            }
        };
        if better {
            best = Some((m, *s));
        }
    }
    match best {
        Some((m, s)) if m > 0.0 => Ok(s),
        Some(_) => Err(Error::NoSignal),
        None => Err(Error::Argument("empty radiation map".into())),
    }
}

/// Where the second pass is illuminated from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReturnPath {
    /// Incident from the reported reflection angle θ2, observed at the mirror
    /// of the original source. Momentum adds: `(k₁ + k₂)·β_s`.
    #[default]
    Mirrored,
    /// Incident from where pass 1 went, observed where pass 1 came from.
    /// A static panel of any gradient returns to θ1 on this path.
    Retraced,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundTripOptions {
    pub resolution_deg: f64,
    pub k_max: usize,
    pub return_path: ReturnPath,
    pub angle_tolerance_deg: f64,
}

impl Default for RoundTripOptions {
    fn default() -> Self {
        RoundTripOptions {
            resolution_deg: 0.01,
            k_max: 8,
            return_path: ReturnPath::Mirrored,
            angle_tolerance_deg: 0.01,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundTripRecord {
    pub theta1_deg: f64,
    pub f1_hz: f64,
    pub k1: i64,
    pub theta2_deg: f64,
    pub f2_hz: f64,
    pub k2: i64,
    pub theta3_deg: f64,
    pub f3_hz: f64,
    pub return_path: ReturnPath,
    /// Fitted spatial phase gradients of the selected harmonics, rad/m.
    pub psi1: f64,
    pub psi2: f64,
    /// θ3 solved from the tangential-momentum ledger; `None` if evanescent.
    pub predicted_theta3_deg: Option<f64>,
    /// Left minus right side of the ledger, rad/m.
    pub momentum_residual: f64,
    pub reciprocal: bool,
}

impl RoundTripRecord {
    /// Per-harmonic gradient `ψ₁/k₁`, rad/m; zero when pass 1 stays at DC.
    pub fn beta_s(&self) -> f64 {
        if self.k1 == 0 {
            0.0
        } else {
            self.psi1 / self.k1 as f64
        }
    }
}

/// Round trip with the same schedule in both passes and default options.
pub fn round_trip_test(panel: &Panel, schedule: &ControlSchedule, theta1_deg: f64, f1_hz: f64) -> Result<RoundTripRecord> {
    round_trip_test_with(panel, schedule, schedule, theta1_deg, f1_hz, &RoundTripOptions::default())
}

/// Harmonics `|k| <= k_max` whose frequency `f + k·f_m` stays positive.
fn propagating_band(f_hz: f64, fm_hz: f64, k_max: usize) -> std::ops::RangeInclusive<i64> {
    let k_max = k_max as i64;
    let lo = (-k_max..=0).find(|&k| f_hz + k as f64 * fm_hz > 0.0).unwrap_or(0);
    lo..=k_max
}

/// Pass 1 uses `uplink`, pass 2 uses `downlink`. Angles in the record are
/// reflection angles: positive on the far side of the normal from the source.
pub fn round_trip_test_with(
    panel: &Panel,
    uplink: &ControlSchedule,
    downlink: &ControlSchedule,
    theta1_deg: f64,
    f1_hz: f64,
    opts: &RoundTripOptions,
) -> Result<RoundTripRecord> {
    for s in [uplink, downlink] {
        if s.group_count() != panel.groups() {
            return Err(Error::Schedule(format!(
                "schedule has {} groups but the panel has {}",
                s.group_count(),
                panel.groups()
            )));
        }
    }
    let grid = angle_grid(opts.resolution_deg)?;
    let model = panel.cell_model();
    let spec1 = fourier_coefficients_at(uplink, model, opts.k_max, &Incidence::normal(Direction::Uplink))?;
    let spec2 = fourier_coefficients_at(downlink, model, opts.k_max, &Incidence::normal(Direction::Downlink))?;
    let pass1 = dominant_response(&harmonic_radiation(
        panel,
        &spec1,
        theta1_deg,
        f1_hz,
        &grid,
        propagating_band(f1_hz, spec1.modulation_hz(), opts.k_max),
    )?)?;
    let theta2 = -pass1.theta_deg;
    let f2 = f1_hz + pass1.k as f64 * spec1.modulation_hz();

    let incident2 = match opts.return_path {
        ReturnPath::Mirrored => theta2,
        ReturnPath::Retraced => pass1.theta_deg,
    };
    let pass2 = dominant_response(&harmonic_radiation(
        panel,
        &spec2,
        incident2,
        f2,
        &grid,
        propagating_band(f2, spec2.modulation_hz(), opts.k_max),
    )?)?;
    let theta3 = match opts.return_path {
        ReturnPath::Mirrored => -pass2.theta_deg,
        ReturnPath::Retraced => pass2.theta_deg,
    };
    let f3 = f2 + pass2.k as f64 * spec2.modulation_hz();

    let psi1 = spec1.spatial_phase_gradient(panel, pass1.k);
    let psi2 = spec2.spatial_phase_gradient(panel, pass2.k);
    let wavenumber = |f: f64| 2.0 * PI * f / SPEED_OF_LIGHT;
    let rhs = wavenumber(f1_hz) * theta1_deg.to_radians().sin()
        + psi1
        + match opts.return_path {
            ReturnPath::Mirrored => psi2,
            ReturnPath::Retraced => -psi2,
        };
    let k3 = wavenumber(f3);
    let predicted = rhs / k3;
    let predicted_theta3_deg = (predicted.abs() <= 1.0).then(|| predicted.asin().to_degrees());

    Ok(RoundTripRecord {
        theta1_deg,
        f1_hz,
        k1: pass1.k,
        theta2_deg: theta2,
        f2_hz: f2,
        k2: pass2.k,
        theta3_deg: theta3,
        f3_hz: f3,
        return_path: opts.return_path,
        psi1,
        psi2,
        predicted_theta3_deg,
        momentum_residual: k3 * theta3.to_radians().sin() - rhs,
        reciprocal: (theta3 - theta1_deg).abs() <= opts.angle_tolerance_deg && pass1.k + pass2.k == 0,
    })
}
