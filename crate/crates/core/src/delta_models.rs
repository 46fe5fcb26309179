//! Exactly solvable point interactions `V_τ = iκ δ₀ diag(e^{iτ}, e^{−iτ})`.
//!
//! The Birman–Schwinger matrix is 2×2 and `det(I + Q(z)) = 0` reduces to a
//! quadratic in `ζ(z)`, so the spectrum is known in closed form. For
//! `κ < 1` the eigenvalues sit on the boundaries of the two-disk enclosure.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complexmaps::{branch_values, mobius_inverse};
use crate::enclosures::disk_parameters;
use crate::error::{Result, SpectralError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaPotential {
    pub kappa: f64,
    pub tau: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DeltaRegime {
    Subcritical,
    CriticalDense,
    Supercritical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaSpectrum {
    #[serde(with = "crate::serde_complex::vec")]
    pub eigenvalues: Vec<Complex64>,
    /// Roots `ζ` with `Im ζ < 0`, in the order of `eigenvalues`.
    #[serde(with = "crate::serde_complex::vec")]
    pub zetas: Vec<Complex64>,
    pub regime: DeltaRegime,
    /// `κ = 1`: the two roots coincide and are reported once.
    pub double_root: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum HalfPlane {
    Upper,
    Lower,
}

impl DeltaPotential {
    pub fn new(kappa: f64, tau: f64, mass: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(SpectralError::DomainError(format!("κ must be positive, got {kappa}")));
        }
        if !(mass >= 0.0) {
            return Err(SpectralError::DomainError(format!("mass must be nonnegative, got {mass}")));
        }
        if !tau.is_finite() {
            return Err(SpectralError::DomainError(format!("τ must be finite, got {tau}")));
        }
        Ok(Self { kappa, tau, mass })
    }

    /// `W_τ = diag(e^{iτ}, e^{−iτ})`.
    fn phase(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.tau)
    }

    /// `ζ± = e^{−iτ}(1 ± √(1−κ²))/κ`.
    pub fn zeta_roots(&self) -> (Complex64, Complex64) {
        let root = Complex64::new(1.0 - self.kappa * self.kappa, 0.0).sqrt();
        let e = self.phase().conj() / self.kappa;
        (e * (1.0 + root), e * (1.0 - root))
    }

    /// `det(I + Q(z))` for the 2×2 Birman–Schwinger matrix with `sgn(0) = 1`.
    pub fn determinant(&self, z: Complex64) -> Result<Complex64> {
        let zeta = branch_values(z, self.mass)?.zeta;
        let h = 0.5 * self.kappa;
        let e = self.phase();
        let a = 1.0 - h * e * zeta;
        let d = 1.0 - h * e.conj() / zeta;
        let b = -h * e.conj();
        let c = -h * e;
        Ok(a * d - b * c)
    }
}

pub fn delta_spectrum(p: &DeltaPotential) -> DeltaSpectrum {
    let (zp, zm) = p.zeta_roots();
    let double_root = p.kappa == 1.0;
    let regime = if p.kappa < 1.0 {
        DeltaRegime::Subcritical
    } else if p.mass == 0.0 {
        DeltaRegime::CriticalDense
    } else {
        DeltaRegime::Supercritical
    };
    let candidates: &[Complex64] = if double_root { &[zp][..] } else { &[zp, zm][..] };
    let zetas: Vec<Complex64> = candidates.iter().copied().filter(|z| z.im < 0.0).collect();
    let eigenvalues = if p.mass > 0.0 {
        zetas
            .iter()
            .filter_map(|zeta| mobius_inverse(zeta * zeta, p.mass).ok())
            .collect()
    } else {
        Vec::new()
    };
    let zetas = if p.mass > 0.0 { zetas } else { Vec::new() };
    DeltaSpectrum { eigenvalues, zetas, regime, double_root }
}

/// Largest distance of the eigenvalues from the boundary circles
/// `|z ∓ m x₀| = m r₀` of the two-disk enclosure with `‖V‖₁ = κ`.
pub fn delta_on_disk_boundary(p: &DeltaPotential) -> Result<f64> {
    if !(p.kappa < 1.0 && p.tau > 0.0 && p.tau < std::f64::consts::PI && p.mass > 0.0) {
        return Err(SpectralError::ConditionViolated(format!(
            "boundary residual needs κ < 1, 0 < τ < π and m > 0, got κ = {}, τ = {}, m = {}",
            p.kappa, p.tau, p.mass
        )));
    }
    let (x0, r0) = disk_parameters(p.kappa)?;
    let m = p.mass;
    Ok(delta_spectrum(p)
        .eigenvalues
        .iter()
        .map(|z| {
            let center = if z.re >= 0.0 { m * x0 } else { -m * x0 };
            ((z - center).norm() - m * r0).abs()
        })
        .fold(0.0, f64::max))
}

/// For `κ ≥ 1` and `m = 0`: which open half-plane is filled with
/// eigenvalues, if any.
pub fn delta_dense_halfplane(p: &DeltaPotential) -> Result<Option<HalfPlane>> {
    if p.kappa < 1.0 || p.mass > 0.0 {
        return Err(SpectralError::ConditionViolated(format!(
            "dense spectrum needs κ ≥ 1 and m = 0, got κ = {}, m = {}",
            p.kappa, p.mass
        )));
    }
    let t = (1.0 / p.kappa).acos();
    if (p.tau - t).abs() <= 1e-12 {
        Ok(Some(HalfPlane::Upper))
    } else if (p.tau - (std::f64::consts::PI - t)).abs() <= 1e-12 {
        Ok(Some(HalfPlane::Lower))
    } else {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn subcritical_example() {
        let p = DeltaPotential::new(0.8, FRAC_PI_2, 1.0).unwrap();
        let (zp, zm) = p.zeta_roots();
        assert!((zp - c(0.0, -2.0)).norm() < 1e-15);
        assert!((zm - c(0.0, -0.5)).norm() < 1e-15);
        let s = delta_spectrum(&p);
        assert_eq!(s.regime, DeltaRegime::Subcritical);
        assert_eq!(s.eigenvalues.len(), 2);
        assert!((s.eigenvalues[0] - c(0.6, 0.0)).norm() < 1e-15);
        assert!((s.eigenvalues[1] - c(-0.6, 0.0)).norm() < 1e-15);
        for z in &s.eigenvalues {
            assert!(p.determinant(*z).unwrap().norm() < 1e-14);
        }
        assert!(delta_on_disk_boundary(&p).unwrap() <= 1e-12);
    }

    #[test]
    fn no_eigenvalues_for_nonpositive_tau() {
        let s = delta_spectrum(&DeltaPotential::new(0.8, -FRAC_PI_2, 1.0).unwrap());
        assert!(s.eigenvalues.is_empty());
    }

    #[test]
    fn supercritical_single_eigenvalue() {
        let p = DeltaPotential::new(2.0, 0.0, 1.0).unwrap();
        let s = delta_spectrum(&p);
        assert_eq!(s.regime, DeltaRegime::Supercritical);
        assert_eq!(s.eigenvalues.len(), 1);
        assert!((s.zetas[0] - Complex64::from_polar(1.0, -PI / 3.0)).norm() < 1e-15);
        assert!((s.eigenvalues[0] - c(0.0, 1.0 / 3f64.sqrt())).norm() < 1e-14);
        assert!(p.determinant(s.eigenvalues[0]).unwrap().norm() < 1e-14);
    }

    #[test]
    fn boundary_residual_examples() {
        for (k, t, m) in [(0.5, FRAC_PI_4, 1.0), (0.3, 3.0 * FRAC_PI_4, 2.0)] {
            let p = DeltaPotential::new(k, t, m).unwrap();
            assert!(delta_on_disk_boundary(&p).unwrap() <= 1e-10);
        }
        let bad = DeltaPotential::new(1.5, 1.0, 1.0).unwrap();
        assert!(delta_on_disk_boundary(&bad).is_err());
    }

    #[test]
    fn dense_halfplanes() {
        let f = |tau| delta_dense_halfplane(&DeltaPotential::new(2.0, tau, 0.0).unwrap()).unwrap();
        assert_eq!(f(PI / 3.0), Some(HalfPlane::Upper));
        assert_eq!(f(2.0 * PI / 3.0), Some(HalfPlane::Lower));
        assert_eq!(f(0.0), None);
        assert!(delta_dense_halfplane(&DeltaPotential::new(0.5, 0.0, 0.0).unwrap()).is_err());
        assert_eq!(
            delta_spectrum(&DeltaPotential::new(2.0, 1.0, 0.0).unwrap()).regime,
            DeltaRegime::CriticalDense
        );
    }

    #[test]
    fn double_root_reported_once() {
        let s = delta_spectrum(&DeltaPotential::new(1.0, FRAC_PI_2, 1.0).unwrap());
        assert!(s.double_root);
        assert_eq!(s.zetas.len(), 1);
    }

    #[test]
    fn vieta_and_unit_circle() {
        for i in 0..200 {
            let tau = -PI + 2.0 * PI * i as f64 / 200.0;
            for kappa in [0.1, 0.7, 1.0, 1.3, 4.0] {
                let p = DeltaPotential::new(kappa, tau, 1.0).unwrap();
                let (zp, zm) = p.zeta_roots();
                let e = Complex64::from_polar(1.0, -tau);
                assert!((zp * zm - e * e).norm() < 1e-12);
                assert!((zp + zm - 2.0 * e / kappa).norm() < 1e-12);
                if kappa >= 1.0 {
                    assert!((zp.norm() - 1.0).abs() < 1e-12 && (zm.norm() - 1.0).abs() < 1e-12);
                    let s = (kappa * kappa - 1.0).sqrt();
                    assert!((zp.im - (-tau.sin() + tau.cos() * s) / kappa).abs() < 1e-12);
                    assert!((zm.im - (-tau.sin() - tau.cos() * s) / kappa).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn sharpness_sweep_covers_circles() {
        let m = 1.0;
        let (x0, r0) = disk_parameters(0.9).unwrap();
        let mut angles = Vec::new();
        for j in 0..128 {
            let tau = PI * (j as f64 + 0.5) / 128.0;
            let p = DeltaPotential::new(0.9, tau, m).unwrap();
            assert!(delta_on_disk_boundary(&p).unwrap() <= 1e-10);
            for z in delta_spectrum(&p).eigenvalues {
                if z.re > 0.0 {
                    angles.push(((z - m * x0) / (m * r0)).arg().rem_euclid(2.0 * PI));
                }
            }
        }
        angles.sort_by(f64::total_cmp);
        let mut gap: f64 = angles[0] + 2.0 * PI - angles[angles.len() - 1];
        for w in angles.windows(2) {
            gap = gap.max(w[1] - w[0]);
        }
        assert!(gap < 0.2, "max angular gap {gap}");
    }
}
