use std::f64::consts::PI;

use num_complex::Complex64;

use super::schedule::ControlSchedule;
use crate::channel::Direction;
use crate::error::{Error, Result};
use crate::model::{Incidence, ReflectionModel};
use crate::panel::Panel;

const J: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Fourier coefficients `a_{k,g}` of each group's response waveform, with
/// `Γ_g(t) = Σ_k a_{k,g} · e^{+j2πk·f_m·t}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicSpectrum {
    k_max: usize,
    modulation_hz: f64,
    /// `coeffs[g][k + k_max]`
    coeffs: Vec<Vec<Complex64>>,
}

impl HarmonicSpectrum {
    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn modulation_hz(&self) -> f64 {
        self.modulation_hz
    }

    pub fn group_count(&self) -> usize {
        self.coeffs.len()
    }

    pub fn harmonics(&self) -> std::ops::RangeInclusive<i64> {
        -(self.k_max as i64)..=self.k_max as i64
    }

    /// `a_{k,g}`; zero outside the computed band.
    pub fn coefficient(&self, k: i64, group: usize) -> Complex64 {
        if k.unsigned_abs() as usize > self.k_max {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs[group][(k + self.k_max as i64) as usize]
    }

    /// `Σ_{|k| ≤ k_max} |a_{k,g}|²`
    pub fn truncated_energy(&self, group: usize) -> f64 {
        self.coeffs[group].iter().map(|a| a.norm_sqr()).sum()
    }

    /// Every coefficient multiplied by `factor`.
    pub fn scaled(&self, factor: Complex64) -> HarmonicSpectrum {
        HarmonicSpectrum {
            k_max: self.k_max,
            modulation_hz: self.modulation_hz,
            coeffs: self
                .coeffs
                .iter()
                .map(|row| row.iter().map(|a| a * factor).collect())
                .collect(),
        }
    }

    /// Spatial phase gradient `ψ_k` (rad/m) such that `a_{k,g} ∝ e^{jψ_k·x_g}`,
    /// by least squares over the unwrapped coefficient phases at the group
    /// centres. Zero when fewer than two groups carry the harmonic.
    pub fn spatial_phase_gradient(&self, panel: &Panel, k: i64) -> f64 {
        let peak = (0..self.group_count())
            .map(|g| self.coefficient(k, g).norm())
            .fold(0.0, f64::max);
        let pts: Vec<(f64, Complex64)> = (0..self.group_count())
            .map(|g| (panel.group_center_x(g), self.coefficient(k, g)))
            .filter(|(_, a)| a.norm() > 1e-9 * peak)
            .collect();
        if pts.len() < 2 {
            return 0.0;
        }
        let mut phases = Vec::with_capacity(pts.len());
        let mut prev = pts[0].1.arg();
        phases.push(prev);
        for (i, (_, a)) in pts.iter().enumerate().skip(1) {
            let step = (a / pts[i - 1].1).arg();
            prev += step;
            phases.push(prev);
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = phases.iter().sum::<f64>() / n;
        let (mut sxy, mut sxx) = (0.0, 0.0);
        for ((x, _), y) in pts.iter().zip(&phases) {
            sxy += (x - mx) * (y - my);
            sxx += (x - mx) * (x - mx);
        }
        sxy / sxx
    }
}

/// `e^{-j2π·k·u}` with `k·u` reduced modulo 1 first, so whole periods are exact.
fn cis_neg(k: i64, u: f64) -> Complex64 {
    let ku = (k as f64 * u).rem_euclid(1.0);
    Complex64::from_polar(1.0, -2.0 * PI * ku)
}

/// Responses of each segment of each group under the reference illumination.
pub(crate) fn segment_responses(
    schedule: &ControlSchedule,
    model: &ReflectionModel,
    inc: &Incidence,
) -> Result<Vec<Vec<Complex64>>> {
    (0..schedule.group_count())
        .map(|g| {
            schedule
                .segments(g)
                .iter()
                .map(|s| model.reflection_coefficient(s.value, inc))
                .collect()
        })
        .collect()
}

/// Closed-form coefficients under broadside illumination.
pub fn fourier_coefficients(schedule: &ControlSchedule, model: &ReflectionModel, k_max: usize) -> Result<HarmonicSpectrum> {
    fourier_coefficients_at(schedule, model, k_max, &Incidence::normal(Direction::Uplink))
}

/// Closed-form coefficients with the cell response taken at `inc`.
pub fn fourier_coefficients_at(
    schedule: &ControlSchedule,
    model: &ReflectionModel,
    k_max: usize,
    inc: &Incidence,
) -> Result<HarmonicSpectrum> {
    if k_max < 1 {
        return Err(Error::Argument("k_max must be >= 1".into()));
    }
    let responses = segment_responses(schedule, model, inc)?;
    let coeffs = responses
        .iter()
        .enumerate()
        .map(|(g, gammas)| {
            let segs = schedule.segments(g);
            (-(k_max as i64)..=k_max as i64)
                .map(|k| {
                    let mut a = Complex64::new(0.0, 0.0);
                    for (s, gamma) in segs.iter().zip(gammas) {
                        a += if k == 0 {
                            gamma * (s.end - s.start)
                        } else {
                            gamma * (cis_neg(k, s.end) - cis_neg(k, s.start)) / (-2.0 * PI * k as f64 * J)
                        };
                    }
                    a
                })
                .collect()
        })
        .collect();
    Ok(HarmonicSpectrum {
        k_max,
        modulation_hz: schedule.modulation_hz(),
        coeffs,
    })
}

/// Energy bookkeeping for one group of a piecewise-constant schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParsevalCheck {
    /// Time average of `|Γ(t)|²`.
    pub time_average: f64,
    /// `Σ_{|k| ≤ k_max} |a_k|²` from the closed form.
    pub truncated: f64,
    /// `Σ_{|k| > k_max} |a_k|²`, summed analytically.
    pub tail: f64,
}

impl ParsevalCheck {
    pub fn residual(&self) -> f64 {
        (self.time_average - (self.truncated + self.tail)).abs()
    }
}

/// Parseval balance for `group`.
///
/// The tail beyond `k_max` decays only as `1/k²`, so it is evaluated in
/// closed form from the jumps `J_i` of `Γ` at the breakpoints `u_i`:
/// `a_k = Σ_i J_i·e^{-j2πk·u_i} / (j2πk)` for `k ≠ 0`, whose full energy is
/// `½ Σ_{i,j} J_i·J_j*·B₂({u_i − u_j})` with `B₂(x) = x² − x + 1/6`.
pub fn parseval_check(
    schedule: &ControlSchedule,
    model: &ReflectionModel,
    spectrum: &HarmonicSpectrum,
    group: usize,
    inc: &Incidence,
) -> Result<ParsevalCheck> {
    let segs = schedule.segments(group);
    let gammas: Vec<Complex64> = segs
        .iter()
        .map(|s| model.reflection_coefficient(s.value, inc))
        .collect::<Result<_>>()?;
    let time_average = segs
        .iter()
        .zip(&gammas)
        .map(|(s, g)| g.norm_sqr() * (s.end - s.start))
        .sum();
    let jumps: Vec<(f64, Complex64)> = (0..segs.len())
        .map(|i| {
            let prev = gammas[(i + segs.len() - 1) % segs.len()];
            (segs[i].start, gammas[i] - prev)
        })
        .filter(|(_, j)| *j != Complex64::new(0.0, 0.0))
        .collect();
    let mut full = 0.0;
    for &(ui, ji) in &jumps {
        for &(uj, jj) in &jumps {
            let x = (ui - uj).rem_euclid(1.0);
            full += 0.5 * (ji * jj.conj()).re * (x * x - x + 1.0 / 6.0);
        }
    }
    let mut partial = 0.0;
    for k in 1..=spectrum.k_max() as i64 {
        for k in [k, -k] {
            let s: Complex64 = jumps.iter().map(|&(u, jmp)| jmp * cis_neg(k, u)).sum();
            partial += (s / (2.0 * PI * k as f64)).norm_sqr();
        }
    }
    Ok(ParsevalCheck {
        time_average,
        truncated: spectrum.truncated_energy(group),
        tail: (full - partial).max(0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{IdealVaractor, ReflectionModel};
    use crate::nonreciprocal::schedule::Segment;

    fn square() -> ControlSchedule {
        ControlSchedule::new(2e-9, vec![vec![Segment::new(0.0, 0.5, 0.0), Segment::new(0.5, 1.0, 1.0)]]).unwrap()
    }

    #[test]
    fn constant_schedule_only_dc() {
        let s = ControlSchedule::constant(1e-9, &[10.5]).unwrap();
        let spec = fourier_coefficients(&s, &ReflectionModel::ideal_varactor(), 8).unwrap();
        assert!((spec.coefficient(0, 0) - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        for k in 1..=8 {
            assert_eq!(spec.coefficient(k, 0).norm(), 0.0);
            assert_eq!(spec.coefficient(-k, 0).norm(), 0.0);
        }
    }

    #[test]
    fn square_wave_coefficients() {
        let spec = fourier_coefficients(&square(), &ReflectionModel::ideal_pin(), 16).unwrap();
        assert!(spec.coefficient(0, 0).norm() < 1e-15);
        assert!((spec.coefficient(1, 0).norm() - 2.0 / PI).abs() < 1e-12);
        assert!((spec.coefficient(-1, 0).norm() - 2.0 / PI).abs() < 1e-12);
        for k in (2..=16).step_by(2) {
            assert!(spec.coefficient(k, 0).norm() < 1e-12);
        }
        assert_eq!(spec.coefficient(17, 0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn staircase_fundamental() {
        let m = ReflectionModel::IdealVaractor(IdealVaractor::default());
        let segs = (0..4)
            .map(|i| Segment::new(i as f64 / 4.0, (i + 1) as f64 / 4.0, 5.25 * i as f64))
            .collect();
        let s = ControlSchedule::new(1e-9, vec![segs]).unwrap();
        let spec = fourier_coefficients(&s, &m, 8).unwrap();
        // sin(π/4)/(π/4)
        assert!((spec.coefficient(1, 0).norm() - 0.900_316_316_157_106_1).abs() < 1e-12);
        assert!(spec.coefficient(0, 0).norm() < 1e-15);
        assert!(spec.coefficient(-1, 0).norm() < 1e-15);
    }

    #[test]
    fn parseval_balances_square_wave() {
        let m = ReflectionModel::ideal_pin();
        let spec = fourier_coefficients(&square(), &m, 64).unwrap();
        let p = parseval_check(&square(), &m, &spec, 0, &Incidence::normal(Direction::Uplink)).unwrap();
        assert_eq!(p.time_average, 1.0);
        assert!(p.truncated <= p.time_average);
        assert!(p.tail > 1e-3);
        assert!(p.residual() < 1e-12, "{p:?}");
    }

    #[test]
    fn k_max_zero_rejected() {
        assert!(fourier_coefficients(&square(), &ReflectionModel::ideal_pin(), 0).is_err());
    }
}
