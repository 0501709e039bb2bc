use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleFit {
    pub center: Complex64,
    pub radius: f64,
    /// RMS of `|p − center| − radius`.
    pub rms_residual: f64,
}

/// Algebraic (Kåsa) least-squares circle: minimises
/// `Σ (x² + y² + D·x + E·y + F)²`. Points are centred and scaled to unit
/// RMS spread before the 3×3 normal equations are solved.
pub fn circle_fit(points: &[Complex64]) -> Result<CircleFit> {
    if points.len() < 3 {
        return Err(Error::Fit(format!("need at least 3 points, got {}", points.len())));
    }
    if points.iter().any(|p| !(p.re.is_finite() && p.im.is_finite())) {
        return Err(Error::Fit("non-finite point".into()));
    }
    let n = points.len() as f64;
    let mean = points.iter().sum::<Complex64>() / n;
    let scale = (points.iter().map(|p| (p - mean).norm_sqr()).sum::<f64>() / n).sqrt();
    if scale == 0.0 {
        return Err(Error::Fit("all points coincide".into()));
    }
    let mut ata = Matrix3::<f64>::zeros();
    let mut atb = Vector3::<f64>::zeros();
    for p in points {
        let u = (p - mean) / scale;
        let row = Vector3::new(u.re, u.im, 1.0);
        ata += row * row.transpose();
        atb -= row * u.norm_sqr();
    }
    let sv = ata.singular_values();
    if sv.min() <= 1e-10 * sv.max() {
        return Err(Error::Fit("points are collinear or degenerate".into()));
    }
    let sol = ata
        .lu()
        .solve(&atb)
        .ok_or_else(|| Error::Fit("normal equations are singular".into()))?;
    let cu = Complex64::new(-sol[0] / 2.0, -sol[1] / 2.0);
    let r2 = cu.norm_sqr() - sol[2];
    if !(r2 > 0.0) {
        return Err(Error::Fit("fitted radius is not real".into()));
    }
    let center = mean + cu * scale;
    let radius = r2.sqrt() * scale;
    let rms_residual = (points.iter().map(|p| ((p - center).norm() - radius).powi(2)).sum::<f64>() / n).sqrt();
    Ok(CircleFit {
        center,
        radius,
        rms_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn exact_circle_recovered() {
        let c = Complex64::new(0.3, 0.1);
        let pts: Vec<_> = (0..12).map(|i| c + Complex64::from_polar(0.05, 2.0 * PI * i as f64 / 12.0)).collect();
        let f = circle_fit(&pts).unwrap();
        assert!((f.center - c).norm() < 1e-9);
        assert!((f.radius - 0.05).abs() < 1e-9);
        assert!(f.rms_residual < 1e-12);
    }

    #[test]
    fn tiny_circle_far_from_origin() {
        let c = Complex64::new(2e-3, 1e-3);
        let pts: Vec<_> = (0..211).map(|i| c + Complex64::from_polar(3e-5, 0.03 * i as f64)).collect();
        let f = circle_fit(&pts).unwrap();
        assert!((f.center - c).norm() < 1e-15);
        assert!(f.rms_residual <= 1e-9 * f.radius);
    }

    #[test]
    fn degenerate_inputs() {
        let line: Vec<_> = (0..5).map(|i| Complex64::new(i as f64, 2.0 * i as f64)).collect();
        assert!(matches!(circle_fit(&line), Err(Error::Fit(_))));
        assert!(circle_fit(&line[..2]).is_err());
        assert!(circle_fit(&[Complex64::new(1.0, 1.0); 4]).is_err());
    }
}
