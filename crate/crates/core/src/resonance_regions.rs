//! Geometry of resonances under complex dilation `θ = iφ`.
//!
//! Dilation rotates the essential spectrum into the curves
//! `±√(e^{−2iφ}p² + m²)` and uncovers the region `D_θ` between them and
//! the real axis. Resonances in `D_θ` are eigenvalues of `H(θ)` and lie in
//! the disks of the undilated enclosure with `‖V‖₁` replaced by `v_θ`.
//!
//! Convention: the right family of `D_θ` lies in the lower half-plane and
//! its mirror image `z ↦ −z` in the upper half-plane.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::enclosures::{disk_parameters, theorem1_disks, EnclosureResult};
use crate::error::{Result, SpectralError};
use crate::potentials::{l1_norm, v_theta, Potential, SECTOR_MARGIN};
use crate::quadrature::bisect;

/// `z ∈ D_θ` for `θ = iφ`: `arg(z² − m²) ∈ [−2φ, 0]`.
pub fn in_d_theta(z: Complex64, phi: f64, m: f64) -> bool {
    let w = z * z - m * m;
    if w == Complex64::new(0.0, 0.0) {
        return true;
    }
    let a = w.arg();
    (-2.0 * phi..=0.0).contains(&a)
}

#[derive(Debug, Clone)]
pub struct ResonanceContext {
    pub potential: Potential,
    pub mass: f64,
    pub alpha: f64,
    pub phi: f64,
}

impl ResonanceContext {
    pub fn new(potential: Potential, mass: f64, phi: f64) -> Result<Self> {
        if !potential.hermitian_on_axis() {
            return Err(SpectralError::ConditionViolated("dilation analysis needs a Hermitian potential".into()));
        }
        let alpha = match potential.alpha() {
            Some(a) if (0.0..a).contains(&phi) => a,
            alpha => return Err(SpectralError::AnalyticityViolation { phi, alpha }),
        };
        if !(mass >= 0.0) {
            return Err(SpectralError::DomainError(format!("mass must be nonnegative, got {mass}")));
        }
        Ok(Self { potential, mass, alpha, phi })
    }

    pub fn v_theta(&self) -> Result<f64> {
        v_theta(&self.potential, self.phi)
    }
}

/// `K_{m r_θ}(± m x_θ)`, containing every resonance in `D_θ`.
pub fn resonance_disks(ctx: &ResonanceContext) -> Result<EnclosureResult> {
    let v = ctx.v_theta()?;
    if v >= 1.0 {
        return Err(SpectralError::ConditionViolated(format!("v_θ = {v} is not below 1 at φ = {}", ctx.phi)));
    }
    theorem1_disks(v, ctx.mass)
}

/// Intervals of the essential spectrum that may carry embedded eigenvalues:
/// `(−m(x₀+r₀), −m(x₀−r₀))` and `(m(x₀−r₀), m(x₀+r₀))`.
pub fn embedded_eigenvalue_intervals(v1: f64, m: f64) -> Result<[(f64, f64); 2]> {
    if !(m > 0.0) {
        return Err(SpectralError::DomainError(format!("need m > 0, got {m}")));
    }
    let (x0, r0) = disk_parameters(v1)?;
    // x₀ − r₀ = 1/(x₀ + r₀) avoids the cancellation for small v1.
    let (lo, hi) = (m / (x0 + r0), m * (x0 + r0));
    Ok([(-hi, -lo), (lo, hi)])
}

/// `φ₀ = sup{φ ∈ [0, α) : v_θ < 1}` for the massless operator.
pub fn phi0_massless(v: &Potential) -> Result<f64> {
    let v1 = l1_norm(v)?;
    if v1 >= 1.0 {
        return Err(SpectralError::ConditionViolated(format!("‖V‖₁ = {v1} is not below 1")));
    }
    let alpha = v.alpha().ok_or(SpectralError::AnalyticityViolation { phi: 0.0, alpha: None })?;
    let hi = alpha - SECTOR_MARGIN;
    let mut failure = None;
    let mut f = |phi: f64| match v_theta(v, phi) {
        Ok(t) => t - 1.0,
        Err(e) => {
            failure.get_or_insert(e);
            f64::NAN
        }
    };
    if f(hi) < 0.0 {
        return Ok(hi);
    }
    let root = bisect(&mut f, 0.0, hi, 1e-12);
    if let Some(e) = failure {
        return Err(e);
    }
    root.ok_or_else(|| SpectralError::NonIntegrable("no sign change of v_θ − 1".into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Right,
    Left,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub phi: f64,
    #[serde(with = "crate::serde_complex")]
    pub z: Complex64,
}

/// Where the resonance disks meet the rotated essential spectrum.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExclusionCurves {
    pub right: Vec<CurvePoint>,
    pub left: Vec<CurvePoint>,
}

#[derive(Serialize)]
struct CsvRow {
    phi: f64,
    re_z: f64,
    im_z: f64,
    family: Family,
}

impl ExclusionCurves {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let rows = self
            .right
            .iter()
            .map(|p| (p, Family::Right))
            .chain(self.left.iter().map(|p| (p, Family::Left)));
        for (p, family) in rows {
            w.serialize(CsvRow { phi: p.phi, re_z: p.z.re, im_z: p.z.im, family })
                .map_err(|e| SpectralError::DomainError(format!("CSV output: {e}")))?;
        }
        w.flush().map_err(|e| SpectralError::DomainError(format!("CSV output: {e}")))?;
        Ok(())
    }
}

/// The point of `|z − m x| = m r` on the curve `arg(z² − m²) = −2φ`.
///
/// On the lower half of the circle `arg(z² − m²)` runs continuously from
/// `−π` to `0`; the upper half never meets the curve. A single sign change
/// is expected and anything else is reported.
fn boundary_intersection(m: f64, x: f64, r: f64, phi: f64) -> Result<Complex64> {
    let point = |t: f64| Complex64::new(m * x, 0.0) + m * r * Complex64::from_polar(1.0, t);
    let g = |t: f64| {
        let z = point(t);
        (z * z - m * m).arg() + 2.0 * phi
    };
    if phi == 0.0 {
        return Ok(point(0.0));
    }
    let n = 2048;
    let ts: Vec<f64> = (1..=n).map(|j| -std::f64::consts::PI + std::f64::consts::PI * j as f64 / n as f64).collect();
    let vals: Vec<f64> = ts.iter().map(|&t| g(t)).collect();
    let changes: Vec<usize> = (0..n - 1).filter(|&j| (vals[j] < 0.0) != (vals[j + 1] < 0.0)).collect();
    if changes.len() != 1 {
        return Err(SpectralError::NoIntersection { phi });
    }
    let j = changes[0];
    let t = bisect(g, ts[j], ts[j + 1], 1e-15).ok_or(SpectralError::NoIntersection { phi })?;
    Ok(point(t))
}

/// Intersection curves for each `φ` in `phis`; empty for `m = 0`.
pub fn exclusion_curves(v: &Potential, m: f64, phis: &[f64]) -> Result<ExclusionCurves> {
    let mut curves = ExclusionCurves::default();
    if m == 0.0 {
        return Ok(curves);
    }
    for &phi in phis {
        let ctx = ResonanceContext::new(v.clone(), m, phi)?;
        let disks = resonance_disks(&ctx)?;
        let z = boundary_intersection(m, disks.x0, disks.r0, phi)?;
        curves.right.push(CurvePoint { phi, z });
        curves.left.push(CurvePoint { phi, z: -z });
    }
    Ok(curves)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{dilated_l1_norm, GaussianTerm, Matrix2};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_6, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn d_theta_examples() {
        assert!(in_d_theta(c(2.0, 0.0), 0.0, 1.0));
        assert!(in_d_theta(c(-3.0, 0.0), 0.3, 1.0));
        assert!(!in_d_theta(c(0.5, 0.0), 0.3, 1.0));
        // arg(z² − 1) = −π/6.
        let z = (Complex64::from_polar(0.8, -FRAC_PI_6) + 1.0).sqrt();
        assert!((z * z - 1.0).arg() + FRAC_PI_6 < 1e-15);
        assert!(in_d_theta(z * (1.0 + 1e-15), FRAC_PI_6, 1.0));
        assert!(!in_d_theta(z, PI / 24.0, 1.0));
        // The mirror lies in the upper half-plane.
        assert!(in_d_theta(-z, FRAC_PI_6, 1.0) && (-z).im > 0.0);
        assert!(!in_d_theta(z.conj(), FRAC_PI_6, 1.0));
    }

    #[test]
    fn d_theta_nesting_on_grid() {
        let phis = [0.0, 0.1, 0.3, 0.6, 1.0, 1.5];
        for i in 0..60 {
            for j in 0..60 {
                let z = c(-3.0 + 0.1 * i as f64, -3.0 + 0.1 * j as f64);
                for w in phis.windows(2) {
                    if in_d_theta(z, w[0], 1.0) {
                        assert!(in_d_theta(z, w[1], 1.0));
                    }
                }
            }
        }
    }

    #[test]
    fn gaussian_resonance_disks() {
        let v = Potential::gaussian(0.3, 1.0).unwrap();
        let d = resonance_disks(&ResonanceContext::new(v.clone(), 1.0, FRAC_PI_6).unwrap()).unwrap();
        assert!((d.v1 - 0.3 * (2.0 * PI).sqrt()).abs() < 1e-10);
        assert!((d.x0 - 1.0881106).abs() < 1e-6 && (d.r0 - 0.4289344).abs() < 1e-6);
        let d0 = resonance_disks(&ResonanceContext::new(v.clone(), 1.0, 0.0).unwrap()).unwrap();
        let t = theorem1_disks(l1_norm(&v).unwrap(), 1.0).unwrap();
        assert!((d0.x0 - t.x0).abs() <= 1e-12 && (d0.r0 - t.r0).abs() <= 1e-12);
        let massless = resonance_disks(&ResonanceContext::new(v, 0.0, 0.3).unwrap()).unwrap();
        assert!(massless.disks.is_empty());
    }

    #[test]
    fn closed_forms_for_random_gaussians() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        for _ in 0..20 {
            let b: f64 = rng.gen_range(0.3..3.0);
            let a_max = (b / (2.0 * PI)).sqrt();
            let a = rng.gen_range(0.3..0.95) * a_max;
            // Keeps φ₀ below α − SECTOR_MARGIN, where the bisection would saturate.
            let v = Potential::gaussian(a, b).unwrap();
            let d = resonance_disks(&ResonanceContext::new(v.clone(), 1.0, FRAC_PI_6).unwrap()).unwrap();
            let s = a * a * PI;
            let den = (b * (b - 2.0 * s)).sqrt();
            assert!((d.x0 - (b - s) / den).abs() <= 1e-10, "x for a = {a}, b = {b}: {}", d.x0 - (b - s) / den);
            assert!((d.r0 - s / den).abs() <= 1e-10, "r for a = {a}, b = {b}");
            let phi0 = phi0_massless(&v).unwrap();
            assert!((phi0 - 0.5 * (s / b).acos()).abs() <= 1e-8);
        }
    }

    #[test]
    fn phi0_examples() {
        let v = Potential::gaussian(0.3, 1.0).unwrap();
        assert!((phi0_massless(&v).unwrap() - 0.6420717).abs() < 1e-6);
        // Near the threshold φ₀ shrinks towards 0.
        let near = Potential::gaussian(0.999 / PI.sqrt(), 1.0).unwrap();
        assert!((phi0_massless(&near).unwrap() - 0.5 * 0.998001f64.acos()).abs() < 1e-8);
        assert!(phi0_massless(&Potential::gaussian(1.0, 1.0).unwrap()).is_err());
        assert!(phi0_massless(&Potential::exponential(0.1, 1.0).unwrap()).is_err());
    }

    #[test]
    fn embedded_intervals() {
        let [left, right] = embedded_eigenvalue_intervals(0.8, 1.0).unwrap();
        assert!((right.0 - 0.6).abs() < 1e-14 && (right.1 - 5.0 / 3.0).abs() < 1e-14);
        assert_eq!(left, (-right.1, -right.0));
        let [_, tiny] = embedded_eigenvalue_intervals(1e-9, 2.0).unwrap();
        assert!((tiny.0 - 2.0).abs() < 1e-15 && (tiny.1 - 2.0).abs() < 1e-15);
        let (a, b) = (0.3, 1.0);
        let v1 = a * (PI / b).sqrt();
        let [_, g] = embedded_eigenvalue_intervals(v1, 1.0).unwrap();
        let q: f64 = 1.0 - a * a * PI / b;
        assert!((g.0 - q.sqrt()).abs() < 1e-14 && (g.1 - 1.0 / q.sqrt()).abs() < 1e-14);
        assert!(embedded_eigenvalue_intervals(1.0, 1.0).is_err());
    }

    #[test]
    fn disks_grow_with_phi() {
        let v = Potential::gaussian_sum(vec![
            GaussianTerm { coeff: Matrix2::scalar(0.2.into()), b: 1.0, center: 0.5 },
            GaussianTerm { coeff: Matrix2::scalar(0.1.into()), b: 2.0, center: -0.5 },
        ])
        .unwrap();
        let mut prev = (0.0, 0.0);
        for j in 0..8 {
            let phi = 0.08 * j as f64;
            let d = resonance_disks(&ResonanceContext::new(v.clone(), 1.0, phi).unwrap()).unwrap();
            assert!(d.x0 >= prev.0 && d.r0 >= prev.1);
            prev = (d.x0, d.r0);
        }
    }

    #[test]
    fn exclusion_curve_points() {
        let v = Potential::gaussian(0.3, 1.0).unwrap();
        let phis: Vec<f64> = (0..=12).map(|j| 0.05 * j as f64).collect();
        let curves = exclusion_curves(&v, 1.0, &phis).unwrap();
        let t = theorem1_disks(l1_norm(&v).unwrap(), 1.0).unwrap();
        assert!((curves.right[0].z - c(t.x0 + t.r0, 0.0)).norm() < 1e-12);
        for (p, q) in curves.right.iter().zip(&curves.left) {
            assert_eq!(q.z, -p.z);
            let d = resonance_disks(&ResonanceContext::new(v.clone(), 1.0, p.phi).unwrap()).unwrap();
            assert!((p.z - d.x0).norm() - d.r0 < 1e-12);
            if p.phi > 0.0 {
                assert!(((p.z * p.z - 1.0).arg() + 2.0 * p.phi).abs() < 1e-10);
            }
        }
        assert!(exclusion_curves(&v, 0.0, &phis).unwrap().right.is_empty());
        // φ beyond φ₀ with m = 1 still has v_θ < 1 here; α bounds the sweep.
        assert!(exclusion_curves(&v, 1.0, &[PI / 4.0]).is_err());
    }

    #[test]
    fn csv_columns() {
        let v = Potential::gaussian(0.3, 1.0).unwrap();
        let curves = exclusion_curves(&v, 1.0, &[0.0, 0.2]).unwrap();
        let mut buf = Vec::new();
        curves.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("phi,re_z,im_z,family"));
        assert_eq!(text.lines().filter(|l| l.ends_with(",left")).count(), 2);
    }

    #[test]
    fn v_theta_matches_direct_dilated_norm() {
        let v = Potential::gaussian(0.3, 1.0).unwrap();
        let ctx = ResonanceContext::new(v.clone(), 1.0, 0.4).unwrap();
        assert!((ctx.v_theta().unwrap() - dilated_l1_norm(&v, 0.4).unwrap()).abs() < 1e-14);
        assert!(ResonanceContext::new(Potential::imaginary_gaussian(0.3, 1.0).unwrap(), 1.0, 0.1).is_err());
    }
}
