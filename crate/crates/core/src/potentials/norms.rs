//! Norms, factorizations and the slowly-decaying-potential functionals.

use num_complex::Complex64;
use serde::Serialize;

use super::catalog::{Potential, PotentialKind};
use super::matrix::Matrix2;
use crate::error::{Result, SpectralError};
use crate::quadrature::{golden_section_min, integrate, DEFAULT_ABS_TOL};

/// `∫ ‖V(e^{iφ}x)‖^p dx` with total absolute error about `tol`.
fn norm_power_integral(v: &Potential, p: f64, phi: f64, tol: f64) -> Result<f64> {
    if v.is_zero() {
        return Ok(0.0);
    }
    if let PotentialKind::Table(t) = &v.kind {
        if phi != 0.0 {
            return Err(SpectralError::AnalyticityViolation { phi, alpha: None });
        }
        // Trapezoidal sum over the table grid.
        let pts: Vec<(f64, f64)> = t
            .xs
            .iter()
            .map(|&u| {
                let x = u / v.stretch;
                (x, v.norm_at(x).powf(p))
            })
            .collect();
        return Ok(pts.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum());
    }
    let l = v.truncation(0.5 * tol, p, phi)?;
    let breaks = v.breakpoints(phi);
    let result = if phi == 0.0 {
        integrate(|x| v.norm_at(x).powf(p), -l, l, &breaks, 0.5 * tol)?
    } else {
        let ray = Complex64::from_polar(1.0, phi);
        integrate(
            |x| v.eval_complex(ray * x).map(|m| m.norm().powf(p)).unwrap_or(f64::NAN),
            -l,
            l,
            &breaks,
            0.5 * tol,
        )?
    };
    Ok(result.value)
}

/// Absolute accuracy of the norm integrals, tail included. Enclosure radii
/// amplify errors in the norm by up to `(1 − v²)^{−3/2}`.
const NORM_TOL: f64 = 1e-13;

/// `‖V‖₁ = ∫ ‖V(x)‖ dx`.
pub fn l1_norm(v: &Potential) -> Result<f64> {
    norm_power_integral(v, 1.0, 0.0, NORM_TOL)
}

/// `‖V‖_p = (∫ ‖V(x)‖^p dx)^{1/p}`.
pub fn lp_norm(v: &Potential, p: f64) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(SpectralError::DomainError(format!("Lp norm needs 1 ≤ p < ∞, got {p}")));
    }
    Ok(norm_power_integral(v, p, 0.0, NORM_TOL)?.powf(1.0 / p))
}

fn check_angle(v: &Potential, phi: f64) -> Result<f64> {
    let alpha = v.alpha();
    match alpha {
        Some(a) if phi.abs() < a => Ok(a),
        _ => Err(SpectralError::AnalyticityViolation { phi, alpha }),
    }
}

/// `(∫ |V₁₁|, ∫ |V₂₂|)`, the diagonal norms entering the test for purely
/// imaginary potentials `V = iṼ`.
pub fn diagonal_l1_norms(v: &Potential) -> Result<(f64, f64)> {
    if v.is_zero() {
        return Ok((0.0, 0.0));
    }
    let entry = |j: usize| -> Result<f64> {
        if let PotentialKind::Table(t) = &v.kind {
            let pts: Vec<(f64, f64)> = t
                .xs
                .iter()
                .map(|&u| (u / v.stretch, v.eval(u / v.stretch).0[j][j].norm()))
                .collect();
            return Ok(pts.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum());
        }
        let l = v.truncation(0.5 * NORM_TOL, 1.0, 0.0)?;
        Ok(integrate(|x| v.eval(x).0[j][j].norm(), -l, l, &v.breakpoints(0.0), 0.5 * NORM_TOL)?.value)
    };
    Ok((entry(0)?, entry(1)?))
}

/// `∫ ‖V(e^{iφ}x)‖ dx` along the ray at angle `φ`, `|φ| < α`.
pub fn dilated_l1_norm(v: &Potential, phi: f64) -> Result<f64> {
    check_angle(v, phi)?;
    norm_power_integral(v, 1.0, phi, NORM_TOL)
}

/// Default distance kept from the edge of the analyticity sector.
pub const SECTOR_MARGIN: f64 = 1e-2;

/// `v_θ = inf_{φ₀ ≤ φ < α} ‖V(e^{iφ}·)‖₁`.
///
/// Scalar sign-definite potentials attain the infimum at `φ₀`. Otherwise
/// the log-convex profile is minimised by golden-section search on
/// `[φ₀, α − SECTOR_MARGIN]`.
pub fn v_theta(v: &Potential, phi0: f64) -> Result<f64> {
    let alpha = check_angle(v, phi0)?;
    if phi0 < 0.0 {
        return Err(SpectralError::DomainError(format!("v_theta needs φ₀ ≥ 0, got {phi0}")));
    }
    let at_start = dilated_l1_norm(v, phi0)?;
    if v.scalar_sign_definite() {
        return Ok(at_start);
    }
    let hi = alpha - SECTOR_MARGIN;
    if hi <= phi0 {
        return Ok(at_start);
    }
    let mut failure = None;
    let (_, best) = golden_section_min(
        |phi| match dilated_l1_norm(v, phi) {
            Ok(n) => n,
            Err(e) => {
                failure.get_or_insert(e);
                f64::INFINITY
            }
        },
        phi0,
        hi,
        1e-6,
    );
    if best.is_finite() {
        Ok(best.min(at_start))
    } else {
        Err(failure.unwrap_or_else(|| SpectralError::NonIntegrable("v_theta search".into())))
    }
}

/// The pointwise factorization `V = B·A` with `A = |V|^{1/2}`.
#[derive(Debug, Clone)]
pub struct Factorization {
    potential: Potential,
}

impl Factorization {
    pub fn a(&self, x: f64) -> Matrix2 {
        self.potential.eval(x).polar_factors().0
    }

    pub fn b(&self, x: f64) -> Matrix2 {
        self.potential.eval(x).polar_factors().1
    }

    pub fn factors(&self, x: f64) -> (Matrix2, Matrix2) {
        self.potential.eval(x).polar_factors()
    }
}

pub fn polar_factorize(v: &Potential) -> Factorization {
    Factorization { potential: v.clone() }
}

/// `V = W + X` with `X = V·min(1, ε/‖V‖)`, so `‖X(x)‖ ≤ ε` and `W` carries
/// the excess `(‖V‖ − ε)₊`.
#[derive(Debug, Clone, Serialize)]
pub struct ClippedDecomposition {
    pub epsilon: f64,
    /// `∫ ‖W(x)‖ dx`; an upper bound for the optimal `C_ε`.
    pub l1_of_w: f64,
    #[serde(skip)]
    potential: Option<Potential>,
}

impl ClippedDecomposition {
    /// A decomposition known only through its constants.
    pub fn from_constants(epsilon: f64, l1_of_w: f64) -> Self {
        Self { epsilon, l1_of_w, potential: None }
    }

    fn clip_factor(&self, v: &Matrix2) -> f64 {
        let n = v.norm();
        if n <= self.epsilon { 1.0 } else { self.epsilon / n }
    }

    pub fn x_part(&self, x: f64) -> Option<Matrix2> {
        let v = self.potential.as_ref()?.eval(x);
        Some(v.scale(self.clip_factor(&v).into()))
    }

    pub fn w_part(&self, x: f64) -> Option<Matrix2> {
        let v = self.potential.as_ref()?.eval(x);
        Some(v.scale((1.0 - self.clip_factor(&v)).into()))
    }
}

pub fn clip_decompose(v: &Potential, epsilon: f64) -> Result<ClippedDecomposition> {
    if !(epsilon > 0.0) {
        return Err(SpectralError::DomainError(format!("ε must be positive, got {epsilon}")));
    }
    let l1_of_w = if v.is_zero() {
        0.0
    } else if let PotentialKind::Table(t) = &v.kind {
        let pts: Vec<(f64, f64)> = t
            .xs
            .iter()
            .map(|&u| (u / v.stretch, (v.norm_at(u / v.stretch) - epsilon).max(0.0)))
            .collect();
        pts.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum()
    } else {
        let l = v.truncation(0.5 * DEFAULT_ABS_TOL, 1.0, 0.0)?;
        integrate(
            |x| (v.norm_at(x) - epsilon).max(0.0),
            -l,
            l,
            &v.breakpoints(0.0),
            0.5 * DEFAULT_ABS_TOL,
        )?
        .value
    };
    Ok(ClippedDecomposition { epsilon, l1_of_w, potential: Some(v.clone()) })
}

/// `y ↦ ∫ ‖V(x)‖ e^{−s|x−y|} dx`.
fn fv_profile(v: &Potential, s: f64, y: f64, l: f64, breaks: &[f64]) -> Result<f64> {
    let mut cuts = breaks.to_vec();
    cuts.push(y);
    Ok(integrate(|x| v.norm_at(x) * (-s * (x - y).abs()).exp(), -l, l, &cuts, 1e-11)?.value)
}

/// `F_V(s) = sup_y ∫ ‖V(x)‖ e^{−s|x−y|} dx`.
///
/// The supremum is taken over a grid of uniform points and breakpoints of
/// the potential, then refined by golden-section search around the best
/// grid point.
pub fn f_v(v: &Potential, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(SpectralError::DomainError(format!("F_V needs s > 0, got {s}")));
    }
    if v.is_zero() {
        return Ok(0.0);
    }
    let (lo, hi) = match v.support() {
        Some(b) => b,
        None => {
            let l = v.truncation(1e-11, 1.0, 0.0)?;
            (-l, l)
        }
    };
    let breaks = v.breakpoints(0.0);
    // The maximiser sits where the mass is; the 1e-3 mass radius bounds it.
    let core = match v.support() {
        Some(b) => b,
        None => {
            let r = v.truncation(1e-3 * l1_norm(v)?.max(1e-300), 1.0, 0.0)?;
            (-r, r)
        }
    };
    let mut ys: Vec<f64> = (0..=64)
        .map(|j| core.0 + (core.1 - core.0) * j as f64 / 64.0)
        .chain(breaks.iter().copied().filter(|y| *y >= core.0 && *y <= core.1))
        .collect();
    ys.sort_by(f64::total_cmp);
    ys.dedup();
    let values: Vec<f64> = ys
        .iter()
        .map(|&y| fv_profile(v, s, y, hi.max(-lo), &breaks))
        .collect::<Result<_>>()?;
    let (best, &best_value) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is nonempty");
    let left = ys[best.saturating_sub(1)];
    let right = ys[(best + 1).min(ys.len() - 1)];
    let mut failure = None;
    let (_, neg) = golden_section_min(
        |y| match fv_profile(v, s, y, hi.max(-lo), &breaks) {
            Ok(val) => -val,
            Err(e) => {
                failure.get_or_insert(e);
                f64::INFINITY
            }
        },
        left,
        right,
        1e-9 * (1.0 + (right - left).abs()),
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(best_value.max(-neg))
}
