//! Browser bindings. Results cross the boundary as flat `Float64Array`s so
//! the page can draw them without a serialization layer.

use diracspec::delta_models::{delta_spectrum, DeltaPotential};
use diracspec::enclosures::theorem1_disks;
use diracspec::potentials::Potential;
use diracspec::resonance_regions::{exclusion_curves, phi0_massless, resonance_disks, ResonanceContext};
use wasm_bindgen::prelude::wasm_bindgen;
use wasm_bindgen::JsError;

/// `[x0, r0]`: the disks are centred at `±x0·m` with radius `r0·m`.
#[wasm_bindgen]
pub fn enclosure_disks(v1: f64, mass: f64) -> Result<Vec<f64>, JsError> {
    let e = theorem1_disks(v1, mass)?;
    Ok(vec![e.x0, e.r0])
}

/// Eigenvalues of the point interaction, interleaved `[re, im, re, im, ...]`.
#[wasm_bindgen]
pub fn delta_eigenvalues(kappa: f64, tau: f64, mass: f64) -> Result<Vec<f64>, JsError> {
    let s = delta_spectrum(&DeltaPotential::new(kappa, tau, mass)?);
    Ok(s.eigenvalues.iter().flat_map(|z| [z.re, z.im]).collect())
}

/// Resonance geometry of `a·exp(−b x²)`.
///
/// Layout: `[x0, r0, phi0, n, (phi, re, im) × n]`, where `x0, r0` are the
/// disk parameters at `phi` (NaN when `v_θ ≥ 1`), `phi0` is the massless
/// critical angle and the triples trace the right exclusion curve over
/// `[0, phi]`.
#[wasm_bindgen]
pub fn gaussian_resonance_geometry(a: f64, b: f64, mass: f64, phi: f64) -> Result<Vec<f64>, JsError> {
    let v = Potential::gaussian(a, b)?;
    let (x0, r0) = match ResonanceContext::new(v.clone(), mass, phi).and_then(|c| resonance_disks(&c)) {
        Ok(e) => (e.x0, e.r0),
        Err(_) => (f64::NAN, f64::NAN),
    };
    let phi0 = phi0_massless(&v).unwrap_or(f64::NAN);
    let mut out = vec![x0, r0, phi0, 0.0];
    if mass > 0.0 && phi > 0.0 {
        let phis: Vec<f64> = (0..=40).map(|j| phi * j as f64 / 40.0).collect();
        // Past φ₀ the disks no longer exist; keep the prefix that does.
        let curve = phis.iter().map_while(|&p| exclusion_curves(&v, mass, &[p]).ok()).flat_map(|c| c.right);
        for pt in curve {
            out.extend([pt.phi, pt.z.re, pt.z.im]);
        }
        out[3] = ((out.len() - 4) / 3) as f64;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disks_match_closed_form() {
        let d = enclosure_disks(0.8, 1.0).unwrap();
        assert!((d[0] - 17.0 / 15.0).abs() < 1e-12 && (d[1] - 8.0 / 15.0).abs() < 1e-12);
    }

    #[test]
    fn delta_pair() {
        let ev = delta_eigenvalues(0.8, std::f64::consts::FRAC_PI_2, 1.0).unwrap();
        assert_eq!(ev.len(), 4);
        assert!((ev[0].abs() - 0.6).abs() < 1e-12 && ev[1].abs() < 1e-12);
    }

    #[test]
    fn geometry_layout() {
        let g = gaussian_resonance_geometry(0.3, 1.0, 1.0, 0.5).unwrap();
        let n = g[3] as usize;
        assert_eq!(g.len(), 4 + 3 * n);
        assert_eq!(n, 41);
        assert!(g[0] > 1.0 && g[1] > 0.0 && (g[2] - 0.6420717).abs() < 1e-6);
    }
}
