//! Data behind the three standard plots: enclosure disks, the uncovered
//! region of the dilated operator, and the resonance exclusion curves.

use std::f64::consts::PI;

use diracspec::enclosures::theorem1_disks;
use diracspec::potentials::Potential;
use diracspec::resonance_regions::exclusion_curves;
use diracspec::{Complex64, Result};
use serde_json::{json, Value};

use crate::output::Table;

const CIRCLE_POINTS: usize = 129;

/// Boundaries of the two enclosure disks for `‖V‖₁ ∈ {0.5, 0.8, 0.95}`, `m = 1`.
fn disks() -> Result<(Value, Table)> {
    let mut table = Table::new(&["v1", "family", "re_z", "im_z"]);
    let mut curves = Vec::new();
    for v1 in [0.5, 0.8, 0.95] {
        let e = theorem1_disks(v1, 1.0)?;
        for (disk, family) in e.disks.disks.iter().zip(["right", "left"]) {
            let pts: Vec<[f64; 2]> = (0..CIRCLE_POINTS)
                .map(|j| {
                    let z = disk.center + disk.radius * Complex64::from_polar(1.0, 2.0 * PI * j as f64 / (CIRCLE_POINTS - 1) as f64);
                    [z.re, z.im]
                })
                .collect();
            for p in &pts {
                table.push(vec![v1.to_string(), family.into(), p[0].to_string(), p[1].to_string()]);
            }
            curves.push(json!({ "v1": v1, "family": family, "points": pts }));
        }
    }
    Ok((json!({ "figure": 1, "mass": 1.0, "curves": curves }), table))
}

/// The rotated essential spectrum `±√(e^{−2iφ}p² + 1)`, `0 ≤ p ≤ 3`,
/// bounding the uncovered region for three angles.
fn rotated_spectrum() -> (Value, Table) {
    let mut table = Table::new(&["phi", "family", "re_z", "im_z"]);
    let mut curves = Vec::new();
    for phi in [PI / 12.0, PI / 6.0, PI / 4.0] {
        let rot = Complex64::from_polar(1.0, -2.0 * phi);
        let right: Vec<Complex64> = (0..=200).map(|j| (rot * (0.015 * j as f64).powi(2) + 1.0).sqrt()).collect();
        for (family, sign) in [("right", 1.0), ("left", -1.0)] {
            let pts: Vec<[f64; 2]> = right.iter().map(|z| [sign * z.re, sign * z.im]).collect();
            for p in &pts {
                table.push(vec![phi.to_string(), family.into(), p[0].to_string(), p[1].to_string()]);
            }
            curves.push(json!({ "phi": phi, "family": family, "points": pts }));
        }
    }
    (json!({ "figure": 2, "mass": 1.0, "curves": curves }), table)
}

/// Exclusion curves for `0.3 e^{−x²}`, `m = 1`, `φ ∈ [0, 0.6]`.
fn resonance_curves() -> Result<(Value, Table)> {
    let v = Potential::gaussian(0.3, 1.0)?;
    let phis: Vec<f64> = (0..=60).map(|j| 0.01 * j as f64).collect();
    let curves = exclusion_curves(&v, 1.0, &phis)?;
    let table = Table::from_curves(&curves);
    Ok((json!({ "figure": 3, "mass": 1.0, "potential": { "type": "gaussian_scalar", "a": 0.3, "b": 1.0 }, "curves": curves }), table))
}

pub fn figure(n: u8) -> Result<(Value, Table)> {
    match n {
        1 => disks(),
        2 => Ok(rotated_spectrum()),
        _ => resonance_curves(),
    }
}
