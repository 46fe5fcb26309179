//! Closed-form eigenvalue enclosures and point-exclusion tests.
//!
//! Every exclusion test returns an [`ExclusionVerdict`] with a signed
//! margin: `excluded ⇔ margin > 0`, and points where a strict inequality
//! becomes an equality are reported as not excluded.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complexmaps::{branch_values, dist_to_essential, DiskRegion};
use crate::error::{Result, SpectralError};
use crate::potentials::{f_v, ClippedDecomposition, Potential};
use crate::quadrature::bisect;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnclosureResult {
    pub disks: DiskRegion,
    pub x0: f64,
    pub r0: f64,
    pub v1: f64,
    pub mass: f64,
}

impl EnclosureResult {
    pub fn contains(&self, z: Complex64) -> bool {
        self.disks.contains(z)
    }
}

/// `(x₀, r₀)` for a norm `v ∈ [0, 1)`.
///
/// Uses `r₀ = v²/(2√(1−v²))` and `x₀ = √(1 + r₀²)`, which are the defining
/// square roots with the cancellation removed.
pub fn disk_parameters(v: f64) -> Result<(f64, f64)> {
    if v.is_nan() || v < 0.0 {
        return Err(SpectralError::DomainError(format!("‖V‖₁ must be nonnegative, got {v}")));
    }
    if v >= 1.0 {
        return Err(SpectralError::ConditionViolated(format!("‖V‖₁ = {v} is not below 1")));
    }
    let r0 = v * v / (2.0 * (1.0 - v * v).sqrt());
    Ok(((1.0 + r0 * r0).sqrt(), r0))
}

/// The two disks `K_{m r₀}(± m x₀)` containing the discrete spectrum when
/// `‖V‖₁ = v1 < 1`.
pub fn theorem1_disks(v1: f64, m: f64) -> Result<EnclosureResult> {
    if !(m >= 0.0) {
        return Err(SpectralError::DomainError(format!("mass must be nonnegative, got {m}")));
    }
    let (x0, r0) = disk_parameters(v1)?;
    Ok(EnclosureResult { disks: DiskRegion::symmetric_pair(m, x0, r0), x0, r0, v1, mass: m })
}

/// Enclosure for `H(c) − mc²` with the speed of light restored: mass `mc²`,
/// norm `v1/c`, both disks shifted by `−mc²`.
pub fn nonrelativistic_disks(v1_physical: f64, m: f64, c: f64) -> Result<EnclosureResult> {
    if !(m > 0.0 && c > 0.0) {
        return Err(SpectralError::DomainError(format!("need m > 0 and c > 0, got m = {m}, c = {c}")));
    }
    if v1_physical >= c {
        return Err(SpectralError::ConditionViolated(format!(
            "‖V‖₁ = {v1_physical} is not below c = {c}"
        )));
    }
    let rest = m * c * c;
    let (x0, r0) = disk_parameters(v1_physical / c)?;
    let radius = rest * r0;
    // x₀ − 1 = r₀²/(x₀ + 1) keeps the small centre accurate for large c.
    let right = rest * r0 * r0 / (x0 + 1.0);
    let left = -rest * (x0 + 1.0);
    let disks = DiskRegion {
        disks: vec![
            crate::complexmaps::Disk { center: Complex64::new(right, 0.0), radius },
            crate::complexmaps::Disk { center: Complex64::new(left, 0.0), radius },
        ],
    };
    Ok(EnclosureResult { disks, x0, r0, v1: v1_physical / c, mass: rest })
}

/// Upper bound for `‖(H − z)⁻¹‖` outside the enclosure disks.
pub fn resolvent_bound(z: Complex64, v1: f64, m: f64) -> Result<f64> {
    let bv = branch_values(z, m)?;
    let q = bv.eta * v1;
    if q >= 1.0 {
        return Err(SpectralError::ConditionViolated(format!(
            "η(|Φ(z)|)·‖V‖₁ = {q} ≥ 1 at z = {z}"
        )));
    }
    Ok(1.0 / dist_to_essential(z, m) + bv.eta * bv.eta / bv.k.im * v1 / (1.0 - q))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Criterion {
    #[serde(rename = "L1_disks")]
    L1Disks,
    #[serde(rename = "IMAGINARY")]
    Imaginary,
    #[serde(rename = "CEPS")]
    Ceps,
    #[serde(rename = "FV")]
    Fv,
    #[serde(rename = "LP")]
    Lp,
    #[serde(rename = "NONE")]
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExclusionVerdict {
    #[serde(with = "crate::serde_complex")]
    pub z: Complex64,
    pub excluded: bool,
    pub criterion: Criterion,
    pub margin: f64,
}

impl ExclusionVerdict {
    fn new(z: Complex64, criterion: Criterion, margin: f64) -> Self {
        let excluded = margin > 0.0;
        Self {
            z,
            excluded,
            criterion: if excluded { criterion } else { Criterion::None },
            margin,
        }
    }
}

/// `η(|Φ(z)|)·‖V‖₁ < 1`, the pointwise form of the two-disk enclosure.
pub fn l1_excluded(z: Complex64, v1: f64, m: f64) -> Result<ExclusionVerdict> {
    let bv = branch_values(z, m)?;
    Ok(ExclusionVerdict::new(z, Criterion::L1Disks, 1.0 - bv.eta * v1))
}

/// Test for `V = iṼ` with `Ṽ ≥ 0`, given `‖Ṽ₁₁‖₁` and `‖Ṽ₂₂‖₁`.
///
/// Points with `Im z ≤ 0` are always excluded. Elsewhere the margin is
/// `2 − (Re ζ·‖Ṽ₁₁‖₁ + Re ζ⁻¹·‖Ṽ₂₂‖₁)`.
pub fn imaginary_potential_excluded(z: Complex64, l1_v11: f64, l1_v22: f64, m: f64) -> Result<ExclusionVerdict> {
    let bv = branch_values(z, m)?;
    let lhs = bv.zeta.re * l1_v11 + (1.0 / bv.zeta).re * l1_v22;
    let margin = if z.im <= 0.0 { (2.0 - lhs).max(1.0) } else { 2.0 - lhs };
    Ok(ExclusionVerdict::new(z, Criterion::Imaginary, margin))
}

/// The two-condition test with a decomposition `V = W + X`, `‖X‖ ≤ ε`,
/// using `dec.l1_of_w` in place of the optimal constant.
pub fn ceps_excluded(z: Complex64, dec: &ClippedDecomposition, m: f64) -> Result<ExclusionVerdict> {
    let bv = branch_values(z, m)?;
    let c = dec.l1_of_w;
    let first = 1.0 - bv.eta * c;
    if first <= 0.0 {
        return Ok(ExclusionVerdict::new(z, Criterion::Ceps, first));
    }
    let lhs = 1.0 / dist_to_essential(z, m) + bv.eta * bv.eta / bv.k.im * c / first;
    let second = 1.0 - dec.epsilon * lhs;
    Ok(ExclusionVerdict::new(z, Criterion::Ceps, first.min(second)))
}

/// `η(|Φ(z)|)·F_V(Im k(z)) < 1`.
pub fn fv_excluded(z: Complex64, v: &Potential, m: f64) -> Result<ExclusionVerdict> {
    let bv = branch_values(z, m)?;
    let lhs = bv.eta * f_v(v, bv.k.im)?;
    Ok(ExclusionVerdict::new(z, Criterion::Fv, 1.0 - lhs))
}

/// The root `μ₀ ∈ (0, m)` of `F_V(μ) = μ/m`, if any.
pub fn fv_gap_root(v: &Potential, m: f64) -> Result<Option<f64>> {
    if !(m > 0.0) {
        return Err(SpectralError::DomainError(format!("gap needs m > 0, got {m}")));
    }
    if v.is_zero() {
        return Ok(Some(0.0));
    }
    if f_v(v, m)? >= 1.0 {
        return Ok(None);
    }
    let mut failure = None;
    let root = bisect(
        |mu| match f_v(v, mu) {
            Ok(f) => f - mu / m,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        1e-12 * m,
        m,
        1e-13 * m,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(root)
}

/// The spectrum-free interval `(−√(m²−μ₀²), √(m²−μ₀²))` in the gap.
pub fn gap_interval(v: &Potential, m: f64) -> Result<Option<(f64, f64)>> {
    Ok(fv_gap_root(v, m)?.map(|mu0| {
        let half = (m * m - mu0 * mu0).sqrt();
        (-half, half)
    }))
}

/// `η(|Φ(z)|)·(2(p−1)/p)^{(p−1)/p}·(Im k)^{−(p−1)/p}·‖V‖_p < 1`.
pub fn lp_excluded(z: Complex64, vp: f64, p: f64, m: f64) -> Result<ExclusionVerdict> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(SpectralError::DomainError(format!("need 1 < p < ∞, got {p}")));
    }
    let bv = branch_values(z, m)?;
    let e = (p - 1.0) / p;
    let lhs = bv.eta * (2.0 * e).powf(e) * bv.k.im.powf(-e) * vp;
    Ok(ExclusionVerdict::new(z, Criterion::Lp, 1.0 - lhs))
}

/// `(mp/(2(p−1)))^{(p−1)/p}`, the `Lᵖ` norm below which `H` is similar to
/// a block-diagonal operator.
pub fn blockdiag_threshold(p: f64, m: f64) -> Result<f64> {
    if !(p >= 2.0 && p.is_finite() && m > 0.0) {
        return Err(SpectralError::DomainError(format!("need p ≥ 2 and m > 0, got p = {p}, m = {m}")));
    }
    Ok((m * p / (2.0 * (p - 1.0))).powf((p - 1.0) / p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexmaps::{mobius, rho_of_v1};
    use crate::potentials::clip_decompose;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn theorem1_examples() {
        let r = theorem1_disks(0.8, 1.0).unwrap();
        assert!((r.x0 - 17.0 / 15.0).abs() < 1e-15);
        assert!((r.r0 - 8.0 / 15.0).abs() < 1e-15);
        let rho4 = 16.0;
        assert!((r.x0 - (rho4 + 1.0) / (rho4 - 1.0)).abs() < 1e-15);

        let free = theorem1_disks(0.0, 1.0).unwrap();
        assert_eq!((free.x0, free.r0), (1.0, 0.0));
        assert!(free.disks.is_empty());
        assert!(theorem1_disks(0.8, 0.0).unwrap().disks.is_empty());
        assert!(matches!(theorem1_disks(1.0, 1.0), Err(SpectralError::ConditionViolated(_))));
        assert!(matches!(theorem1_disks(-0.1, 1.0), Err(SpectralError::DomainError(_))));
    }

    #[test]
    fn defining_formula_agrees() {
        for j in 1..1000 {
            let v = j as f64 / 1000.0;
            let q = (v.powi(4) - 2.0 * v * v + 2.0) / (4.0 * (1.0 - v * v));
            let (x0, r0) = disk_parameters(v).unwrap();
            assert!((x0 - (q + 0.5).sqrt()).abs() < 1e-12 * x0);
            assert!((r0 - (q - 0.5).max(0.0).sqrt()).abs() < 1e-7 * (1.0 + r0));
            assert!((r0 * r0 - (x0 * x0 - 1.0)).abs() < 1e-12 * x0 * x0);
        }
    }

    #[test]
    fn disks_monotone_and_clear_of_imaginary_axis() {
        let mut prev = (1.0, 0.0);
        for j in 1..10_000 {
            let v = j as f64 / 10_000.0;
            let (x0, r0) = disk_parameters(v).unwrap();
            assert!(r0 > prev.1 && x0 >= prev.0);
            // x₀ − 1 ≈ r₀²/2 is below the resolution of 1.0 for tiny v.
            if v > 1e-3 {
                assert!(x0 > prev.0);
            }
            assert!(x0 - r0 > 0.0);
            prev = (x0, r0);
        }
        let (x0, _) = disk_parameters(1.0 - 1e-12).unwrap();
        assert!(x0 > 1e5);
    }

    #[test]
    fn disk_annulus_duality() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for v in [0.3, 0.8, 0.99] {
            let disks = theorem1_disks(v, 1.0).unwrap();
            let ann = rho_of_v1(v).unwrap();
            let mut checked = 0;
            while checked < 1000 {
                let z = c(rng.gen_range(-4.0..4.0), rng.gen_range(-3.0..3.0));
                if crate::complexmaps::dist_to_essential(z, 1.0) < 1e-9 {
                    continue;
                }
                let w = mobius(z, 1.0);
                // Skip points on a boundary circle up to round-off.
                let r = w.norm();
                if (r - ann.outer).abs() < 1e-9 * ann.outer || (r - ann.inner).abs() < 1e-9 * ann.inner {
                    continue;
                }
                assert_eq!(!disks.contains(z), ann.contains_open(w), "z = {z}, v = {v}");
                assert_eq!(l1_excluded(z, v, 1.0).unwrap().excluded, !disks.contains(z));
                checked += 1;
            }
        }
    }

    #[test]
    fn nonrelativistic_limit() {
        for (c_light, tol) in [(1e3, 1e-4), (1e6, 1e-9)] {
            let r = nonrelativistic_disks(0.5, 1.0, c_light).unwrap();
            let right = r.disks.disks[0];
            assert!(right.center.norm() < tol);
            assert!((right.radius - 0.125).abs() < tol);
        }
        assert!(nonrelativistic_disks(0.0, 1.0, 10.0).unwrap().disks.is_empty());
        assert!(nonrelativistic_disks(2.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn resolvent_bound_examples() {
        assert!((resolvent_bound(c(0.0, 2.0), 0.5, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((resolvent_bound(c(0.0, 0.0), 0.5, 1.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((resolvent_bound(c(0.0, 3.0), 1e-12, 0.0).unwrap() - 1.0 / 3.0).abs() < 1e-11);
        assert!(matches!(
            resolvent_bound(c(17.0 / 15.0, 0.1), 0.8, 1.0),
            Err(SpectralError::ConditionViolated(_))
        ));
    }

    #[test]
    fn imaginary_examples() {
        let v = imaginary_potential_excluded(c(0.0, -1.0), 5.0, 5.0, 1.0).unwrap();
        assert!(v.excluded);
        let v = imaginary_potential_excluded(c(0.3, 0.7), 0.9, 0.9, 0.0).unwrap();
        assert!(v.excluded && (v.margin - 0.2).abs() < 1e-14);
        // On the imaginary axis lhs = μ/√(μ²+m²)·(sum); at z = i, m = 1 it is sum/√2.
        let at = |sum: f64| imaginary_potential_excluded(c(0.0, 1.0), sum / 2.0, sum / 2.0, 1.0).unwrap();
        assert!((at(2.0).margin - (2.0 - 2f64.sqrt())).abs() < 1e-14);
        assert!(at(2.0).excluded && at(1.0).excluded);
        assert!(!at(3.0).excluded);
    }

    #[test]
    fn ceps_examples() {
        let v = Potential::exponential(1.0, 1.0).unwrap();
        let dec = clip_decompose(&v, 0.5).unwrap();
        let verdict = ceps_excluded(c(0.0, 0.0), &dec, 1.0).unwrap();
        let cw = 1.0 - 2f64.ln();
        let lhs2 = 1.0 + cw / (1.0 - cw);
        assert!((lhs2 - std::f64::consts::LOG2_E).abs() < 1e-12);
        assert!(verdict.excluded);
        assert!((verdict.margin - (1.0 - 0.5 * lhs2)).abs() < 1e-9);

        let pure = ClippedDecomposition::from_constants(0.1, 0.0);
        assert!(ceps_excluded(c(0.0, 0.5), &pure, 0.0).unwrap().excluded);
        assert!(!ceps_excluded(c(0.0, 0.05), &pure, 0.0).unwrap().excluded);
    }

    #[test]
    fn ceps_reduces_to_disks_for_small_epsilon() {
        let v = Potential::gaussian(0.5, 1.0).unwrap();
        let v1 = crate::potentials::l1_norm(&v).unwrap();
        let dec = clip_decompose(&v, 1e-8).unwrap();
        let disks = theorem1_disks(v1, 1.0).unwrap();
        let mut disagreements = 0;
        for i in 0..64 {
            for j in 0..64 {
                let z = c(-2.5 + 5.0 * (i as f64 + 0.5) / 64.0, -1.5 + 3.0 * (j as f64 + 0.5) / 64.0);
                let l1 = l1_excluded(z, v1, 1.0).unwrap();
                if l1.margin.abs() < 1e-3 {
                    continue;
                }
                if ceps_excluded(z, &dec, 1.0).unwrap().excluded != !disks.contains(z) {
                    disagreements += 1;
                }
            }
        }
        assert_eq!(disagreements, 0);
    }

    #[test]
    fn fv_examples() {
        let zero = Potential::zero();
        assert!(fv_excluded(c(0.3, 0.2), &zero, 1.0).unwrap().excluded);
        let v = Potential::exponential(0.4, 1.0).unwrap();
        let at0 = fv_excluded(c(0.0, 0.0), &v, 1.0).unwrap();
        assert!(at0.excluded && (at0.margin - 0.6).abs() < 1e-9);
        assert!(fv_excluded(c(0.8, 0.0), &v, 1.0).unwrap().excluded);
    }

    #[test]
    fn gap_interval_quadratic_oracle() {
        let v = Potential::exponential(0.4, 1.0).unwrap();
        let mu0 = (-1.0 + 4.2f64.sqrt()) / 2.0;
        let (lo, hi) = gap_interval(&v, 1.0).unwrap().unwrap();
        assert!((hi - (1.0 - mu0 * mu0).sqrt()).abs() < 1e-8);
        assert_eq!(lo, -hi);
        assert_eq!(gap_interval(&Potential::zero(), 2.0).unwrap(), Some((-2.0, 2.0)));
        let strong = Potential::exponential(3.0, 1.0).unwrap();
        assert_eq!(gap_interval(&strong, 1.0).unwrap(), None);
    }

    #[test]
    fn lp_examples() {
        // m = 0, p = 2: excluded iff Im z > ‖V‖₂².
        let vp: f64 = 0.7;
        assert!(lp_excluded(c(0.1, vp * vp * 1.001), vp, 2.0, 0.0).unwrap().excluded);
        assert!(!lp_excluded(c(0.1, vp * vp * 0.999), vp, 2.0, 0.0).unwrap().excluded);
        assert!(lp_excluded(c(0.0, 1e6), 10.0, 3.0, 1.0).unwrap().excluded);
    }

    #[test]
    fn blockdiag_examples() {
        assert!((blockdiag_threshold(2.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((blockdiag_threshold(2.0, 4.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((blockdiag_threshold(100.0, 1.0).unwrap() - 0.5).abs() < 0.01);
        assert!(blockdiag_threshold(1.5, 1.0).is_err());
    }

    #[test]
    fn fv_criterion_contains_l1_criterion() {
        let v = Potential::gaussian(0.6, 2.0).unwrap();
        let v1 = crate::potentials::l1_norm(&v).unwrap();
        for z in [c(0.0, 0.3), c(1.5, 0.2), c(-0.9, 0.05), c(0.4, -0.7)] {
            if l1_excluded(z, v1, 1.0).unwrap().excluded {
                assert!(fv_excluded(z, &v, 1.0).unwrap().excluded);
            }
        }
    }
}
