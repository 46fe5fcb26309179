//! Branch-correct primitives of the free Dirac resolvent.
//!
//! With units ħ = c = 1 the free operator `-i d/dx σ₁ + m σ₃` has spectrum
//! `(-∞,-m] ∪ [m,∞)`. Off that set we fix the branch
//! `k(z) = √(z² − m²)` with `Im k > 0` and derive
//! `ζ = (z+m)/k`, `Φ = ζ² = (z+m)/(z−m)` and `η(|Φ|)`, the Hilbert–Schmidt
//! norm of the matrix part of the resolvent kernel.
//!
//! Inputs within [`BRANCH_TOL`] of the essential spectrum are rejected
//! instead of being assigned to one side of the cut.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpectralError};

/// Default rejection distance from the essential spectrum.
pub const BRANCH_TOL: f64 = 1e-14;

/// Distance from `z` to `(-∞,-m] ∪ [m,∞)`.
pub fn dist_to_essential(z: Complex64, m: f64) -> f64 {
    if z.re.abs() >= m {
        z.im.abs()
    } else {
        let edge = if z.re >= 0.0 { m } else { -m };
        (z - Complex64::new(edge, 0.0)).norm()
    }
}

/// `k(z) = √(z² − m²)` on the sheet `Im k > 0`.
pub fn branch_sqrt(z: Complex64, m: f64) -> Result<Complex64> {
    branch_sqrt_tol(z, m, BRANCH_TOL)
}

pub fn branch_sqrt_tol(z: Complex64, m: f64, tol: f64) -> Result<Complex64> {
    let distance = dist_to_essential(z, m);
    if distance < tol || !z.re.is_finite() || !z.im.is_finite() {
        return Err(SpectralError::BranchCut { z, distance });
    }
    let root = (z * z - m * m).sqrt();
    Ok(if root.im > 0.0 { root } else { -root })
}

/// `η(s) = √(1/2 + (s + 1/s)/4)`, evaluated through `max(s, 1/s)` so that
/// it is exactly symmetric under `s ↦ 1/s` and does not overflow early.
pub fn eta(s: f64) -> f64 {
    let t = if s >= 1.0 { s } else { 1.0 / s };
    (0.5 + 0.25 * t + 0.25 / t).sqrt()
}

/// The quadruple `(k, ζ, Φ, η(|Φ|))` at a resolvent point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchValues {
    #[serde(with = "crate::serde_complex")]
    pub z: Complex64,
    pub m: f64,
    #[serde(with = "crate::serde_complex")]
    pub k: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub zeta: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub phi: Complex64,
    pub eta: f64,
}

impl BranchValues {
    /// Builds the quadruple from an already chosen square root `k` of
    /// `z² − m²`. Used directly by the dilated kernel, whose sheet differs.
    pub fn from_root(z: Complex64, m: f64, k: Complex64) -> Self {
        if m == 0.0 {
            // ζ = z/k = ±1, so Φ = 1 and η = 1 identically.
            let zeta = z / k;
            return Self {
                z,
                m,
                k,
                zeta,
                phi: Complex64::new(1.0, 0.0),
                eta: 1.0,
            };
        }
        let zeta = (z + m) / k;
        let phi = (z + m) / (z - m);
        Self {
            z,
            m,
            k,
            zeta,
            phi,
            eta: eta(phi.norm()),
        }
    }
}

pub fn branch_values(z: Complex64, m: f64) -> Result<BranchValues> {
    let k = branch_sqrt(z, m)?;
    Ok(BranchValues::from_root(z, m, k))
}

/// `η(|Φ(z)|)` through the closed form `√((1 + (|z|²+m²)/|z²−m²|)/2)`.
///
/// Algebraically identical to `branch_values(z, m)?.eta`; kept as a second
/// route for cross-checks.
pub fn eta_closed_form(z: Complex64, m: f64) -> f64 {
    let num = z.norm_sqr() + m * m;
    let den = (z * z - m * m).norm();
    (0.5 * (1.0 + num / den)).sqrt()
}

/// The annulus `ρ⁻² < |w| < ρ²` on which `η(|w|)·‖V‖₁ < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusSpec {
    pub rho: f64,
    pub inner: f64,
    pub outer: f64,
}

impl AnnulusSpec {
    pub fn contains_open(&self, w: Complex64) -> bool {
        let r = w.norm();
        self.inner < r && r < self.outer
    }
}

pub fn rho_of_v1(v1: f64) -> Result<AnnulusSpec> {
    if !(v1 > 0.0 && v1 < 1.0) {
        return Err(SpectralError::DomainError(format!(
            "annulus radius needs 0 < ‖V‖₁ < 1, got {v1}"
        )));
    }
    let rho = (1.0 + (1.0 - v1 * v1).sqrt()) / v1;
    let outer = rho * rho;
    Ok(AnnulusSpec {
        rho,
        inner: 1.0 / outer,
        outer,
    })
}

/// `Φ⁻¹(w) = m (w+1)/(w−1)`.
pub fn mobius_inverse(w: Complex64, m: f64) -> Result<Complex64> {
    if w == Complex64::new(1.0, 0.0) {
        return Err(SpectralError::PoleAtOne);
    }
    Ok(m * (w + 1.0) / (w - 1.0))
}

/// `Φ(z) = (z+m)/(z−m)`; for `m = 0` this is the constant 1.
pub fn mobius(z: Complex64, m: f64) -> Complex64 {
    if m == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        (z + m) / (z - m)
    }
}

/// A closed disk; radius 0 encodes the empty set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    #[serde(with = "crate::serde_complex")]
    pub center: Complex64,
    pub radius: f64,
}

impl Disk {
    pub fn contains(&self, z: Complex64) -> bool {
        self.radius > 0.0 && (z - self.center).norm() <= self.radius
    }

    pub fn is_empty(&self) -> bool {
        self.radius <= 0.0
    }

    /// Signed distance to the boundary circle, positive outside.
    pub fn boundary_residual(&self, z: Complex64) -> f64 {
        (z - self.center).norm() - self.radius
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DiskRegion {
    pub disks: Vec<Disk>,
}

impl DiskRegion {
    pub fn contains(&self, z: Complex64) -> bool {
        self.disks.iter().any(|d| d.contains(z))
    }

    pub fn is_empty(&self) -> bool {
        self.disks.iter().all(Disk::is_empty)
    }

    /// The pair `K_{m r₀}(± m x₀)`.
    pub fn symmetric_pair(m: f64, x0: f64, r0: f64) -> Self {
        let radius = m * r0;
        Self {
            disks: vec![
                Disk {
                    center: Complex64::new(m * x0, 0.0),
                    radius,
                },
                Disk {
                    center: Complex64::new(-m * x0, 0.0),
                    radius,
                },
            ],
        }
    }
}

/// Image under `Φ⁻¹` of the complement of the annulus: two disks centred at
/// `±m x₀` with radius `m r₀`, where `x₀ = (ρ⁴+1)/(ρ⁴−1)`.
pub fn annulus_complement_disks(spec: &AnnulusSpec, m: f64) -> DiskRegion {
    let rho4 = spec.outer * spec.outer;
    let x0 = (rho4 + 1.0) / (rho4 - 1.0);
    // √(x₀² − 1) = 2ρ²/(ρ⁴ − 1) without the cancellation.
    let r0 = 2.0 * spec.outer / (rho4 - 1.0);
    DiskRegion::symmetric_pair(m, x0, r0)
}
