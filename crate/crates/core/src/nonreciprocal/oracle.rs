use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::harmonics::segment_responses;
use super::schedule::ControlSchedule;
use crate::channel::{Direction, SPEED_OF_LIGHT};
use crate::error::{Error, Result};
use crate::model::Incidence;
use crate::panel::Panel;

/// Sampling plan of the brute-force spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    pub n_periods: usize,
    pub samples_per_period: usize,
    pub k_max: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            n_periods: 4,
            samples_per_period: 65536,
            k_max: 8,
        }
    }
}

/// Spectral lines `k = -k_max..=k_max` observed at one angle.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSpectrum {
    k_max: usize,
    lines: Vec<Complex64>,
}

impl OracleSpectrum {
    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn line(&self, k: i64) -> Complex64 {
        assert!(k.unsigned_abs() as usize <= self.k_max, "harmonic {k} outside the band");
        self.lines[(k + self.k_max as i64) as usize]
    }
}

/// Synthesises the array response in time and reads the harmonic lines off
/// a DFT.
///
/// Element `n` contributes `Γ_n(t − τ_n)` with `τ_n = −x_n·sinθ_out/c`, the
/// carrier path phase of incidence and observation, and the row-major
/// summation order used everywhere else. Samples sit at cell midpoints; each
/// line is corrected by the phase and `sinc` of a zero-order hold, which is
/// exact when every breakpoint lands on a cell boundary.
pub fn time_domain_oracle(
    panel: &Panel,
    schedule: &ControlSchedule,
    theta_in_deg: f64,
    f_hz: f64,
    theta_out_deg: f64,
    cfg: &OracleConfig,
) -> Result<OracleSpectrum> {
    let n = cfg.samples_per_period;
    if n < 64 || cfg.n_periods < 4 {
        return Err(Error::Argument(format!(
            "oracle needs >= 64 samples per period and >= 4 periods, got {n} and {}",
            cfg.n_periods
        )));
    }
    if n <= 4 * cfg.k_max {
        return Err(Error::Argument(format!(
            "{n} samples per period alias harmonics up to {}; need more than {}",
            cfg.k_max,
            4 * cfg.k_max
        )));
    }
    if schedule.group_count() != panel.groups() {
        return Err(Error::Schedule(format!(
            "schedule has {} groups but the panel has {}",
            schedule.group_count(),
            panel.groups()
        )));
    }
    let responses = segment_responses(schedule, panel.cell_model(), &Incidence::normal(Direction::Uplink))?;
    let k0 = 2.0 * PI * f_hz / SPEED_OF_LIGHT;
    let (sin_in, sin_out) = (theta_in_deg.to_radians().sin(), theta_out_deg.to_radians().sin());
    let fm = schedule.modulation_hz();
    let elements: Vec<(usize, f64, Complex64)> = panel
        .positions()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let x = p[0];
            let delay_periods = -x * sin_out / SPEED_OF_LIGHT * fm;
            let path = Complex64::from_polar(1.0, k0 * sin_in * x) * Complex64::from_polar(1.0, k0 * sin_out * x);
            (panel.group_of(i), delay_periods, path)
        })
        .collect();

    let m_total = n * cfg.n_periods;
    let mut buf: Vec<Complex64> = (0..m_total)
        .map(|m| {
            let u = (m as f64 + 0.5) / n as f64;
            elements
                .iter()
                .map(|&(g, delay, path)| path * responses[g][schedule.segment_index(g, u - delay)])
                .sum()
        })
        .collect();
    FftPlanner::new().plan_fft_forward(m_total).process(&mut buf);

    let k_max = cfg.k_max as i64;
    let lines = (-k_max..=k_max)
        .map(|k| {
            let bin = (k * cfg.n_periods as i64).rem_euclid(m_total as i64) as usize;
            let x = PI * k as f64 / n as f64;
            let hold = if k == 0 { 1.0 } else { x.sin() / x };
            buf[bin] / m_total as f64 * Complex64::from_polar(1.0, -x) * hold
        })
        .collect();
    Ok(OracleSpectrum {
        k_max: cfg.k_max,
        lines,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ReflectionModel;
    use crate::nonreciprocal::schedule::Segment;
    use crate::panel::build_panel;

    fn single(model: ReflectionModel) -> Panel {
        build_panel(1, 1, 0.01, 0.01, 1, model).unwrap()
    }

    fn cfg(n: usize) -> OracleConfig {
        OracleConfig {
            n_periods: 4,
            samples_per_period: n,
            k_max: 8,
        }
    }

    #[test]
    fn constant_schedule_single_line() {
        let p = single(ReflectionModel::ideal_varactor());
        let s = ControlSchedule::constant(1e-9, &[5.25]).unwrap();
        let o = time_domain_oracle(&p, &s, 10.0, 10e9, -20.0, &cfg(256)).unwrap();
        assert!((o.line(0) - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        for k in 1..=8 {
            assert!(o.line(k).norm() < 1e-12);
            assert!(o.line(-k).norm() < 1e-12);
        }
    }

    #[test]
    fn square_wave_fundamental_ratio() {
        let p = single(ReflectionModel::ideal_pin());
        let square = ControlSchedule::new(1e-9, vec![vec![Segment::new(0.0, 0.5, 0.0), Segment::new(0.5, 1.0, 1.0)]]).unwrap();
        let unit = ControlSchedule::constant(1e-9, &[0.0]).unwrap();
        let c = cfg(1024);
        let line = time_domain_oracle(&p, &square, 0.0, 10e9, 0.0, &c).unwrap().line(1);
        let reference = time_domain_oracle(&p, &unit, 0.0, 10e9, 0.0, &c).unwrap().line(0);
        assert!((line.norm() / reference.norm() - 2.0 / PI).abs() < 1e-6);
    }

    #[test]
    fn guards() {
        let p = single(ReflectionModel::ideal_pin());
        let s = ControlSchedule::constant(1e-9, &[0.0]).unwrap();
        assert!(time_domain_oracle(&p, &s, 0.0, 1e9, 0.0, &cfg(32)).is_err());
        let aliasing = OracleConfig {
            k_max: 16,
            ..cfg(64)
        };
        assert!(time_domain_oracle(&p, &s, 0.0, 1e9, 0.0, &aliasing).is_err());
        let short = OracleConfig {
            n_periods: 3,
            ..cfg(256)
        };
        assert!(time_domain_oracle(&p, &s, 0.0, 1e9, 0.0, &short).is_err());
    }
}
