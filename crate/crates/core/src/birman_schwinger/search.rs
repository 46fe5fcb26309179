//! Argument-principle root search for `det(I + Q_N(z))` on rectangles.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Mutex;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::nystrom::{wrap_angle, NystromGrid, NystromOptions};
use crate::error::{Result, SpectralError};
use crate::potentials::Potential;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let r = Self { re_min, re_max, im_min, im_max };
        if !(re_min < re_max && im_min < im_max) || [re_min, re_max, im_min, im_max].iter().any(|x| !x.is_finite()) {
            return Err(SpectralError::DomainError(format!("degenerate region {r:?}")));
        }
        Ok(r)
    }

    /// Square of half-width `r` around `z`.
    pub fn around(z: Complex64, r: f64) -> Result<Self> {
        Self::new(z.re - r, z.re + r, z.im - r, z.im + r)
    }

    pub fn contains_strictly(&self, z: Complex64) -> bool {
        z.re > self.re_min && z.re < self.re_max && z.im > self.im_min && z.im < self.im_max
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))
    }

    pub fn scale(&self) -> f64 {
        (self.re_max - self.re_min).max(self.im_max - self.im_min)
    }

    /// Corners in counterclockwise order from the lower left.
    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }

    fn distance_to(&self, z: Complex64) -> f64 {
        let dx = (self.re_min - z.re).max(z.re - self.re_max).max(0.0);
        let dy = (self.im_min - z.im).max(z.im - self.im_max).max(0.0);
        dx.hypot(dy)
    }

    fn split(&self, fx: f64, fy: f64) -> [Rect; 4] {
        let x = self.re_min + fx * (self.re_max - self.re_min);
        let y = self.im_min + fy * (self.im_max - self.im_min);
        [
            Rect { re_min: self.re_min, re_max: x, im_min: self.im_min, im_max: y },
            Rect { re_min: x, re_max: self.re_max, im_min: self.im_min, im_max: y },
            Rect { re_min: x, re_max: self.re_max, im_min: y, im_max: self.im_max },
            Rect { re_min: self.re_min, re_max: x, im_min: y, im_max: self.im_max },
        ]
    }
}

/// Distance from the rectangle to the essential spectrum of `H₀(iφ)`,
/// the curves `±√(e^{−2iφ}p² + m²)`, `p ∈ ℝ`.
pub fn essential_distance(rect: &Rect, m: f64, phi: f64) -> f64 {
    if phi == 0.0 {
        let dy = if rect.im_min <= 0.0 && rect.im_max >= 0.0 { 0.0 } else { rect.im_min.abs().min(rect.im_max.abs()) };
        let dx = (m - rect.re_max).max(0.0).min((rect.re_min + m).max(0.0));
        return dx.hypot(dy);
    }
    let reach = rect.corners().iter().map(|c| c.norm()).fold(0.0, f64::max) + 1.0;
    let p_max = (reach * reach + m * m).sqrt();
    let n = 40_000;
    let rot = Complex64::from_polar(1.0, -2.0 * phi);
    (0..=n)
        .map(|j| {
            let p = p_max * j as f64 / n as f64;
            let z = (rot * p * p + m * m).sqrt();
            rect.distance_to(z).min(rect.distance_to(-z))
        })
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub nystrom: NystromOptions,
    /// Largest `|det(I + Q_N)|` accepted at a reported root.
    pub det_tol: f64,
    pub branch_margin: f64,
    pub max_depth: usize,
    /// Initial samples per rectangle edge.
    pub edge_samples: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            nystrom: NystromOptions::default(),
            det_tol: 1e-8,
            branch_margin: 1e-3,
            max_depth: 10,
            edge_samples: 16,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoundRoot {
    #[serde(with = "crate::serde_complex")]
    pub z: Complex64,
    /// `|det(I + Q_N(z))|`.
    pub residual: f64,
    pub winding: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubregionWinding {
    pub region: Rect,
    pub winding: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSearchReport {
    pub region: Rect,
    pub mass: f64,
    /// `Im θ` of the dilation; 0 for the undilated operator.
    pub phi: f64,
    pub eigenvalues: Vec<FoundRoot>,
    pub grid_size: usize,
    pub truncation: f64,
    pub panel_order: usize,
    pub det_tol: f64,
    /// Winding numbers of the searched rectangles that enclose zeros.
    pub contour_windings: Vec<SubregionWinding>,
    /// Number of determinant evaluations.
    pub evaluations: usize,
}

struct Searcher<'a> {
    grid: &'a NystromGrid,
    m: f64,
    opts: &'a SearchOptions,
    cache: Mutex<HashMap<(u64, u64), Complex64>>,
}

impl Searcher<'_> {
    fn logdets(&self, zs: &[Complex64]) -> Result<Vec<Complex64>> {
        let key = |z: &Complex64| (z.re.to_bits(), z.im.to_bits());
        let missing: Vec<Complex64> = {
            let cache = self.cache.lock().unwrap();
            let mut v: Vec<Complex64> = zs.iter().filter(|z| !cache.contains_key(&key(z))).copied().collect();
            v.sort_by_key(key);
            v.dedup();
            v
        };
        let fresh: Vec<(Complex64, Complex64)> = missing
            .par_iter()
            .map(|&z| self.grid.logdet(z, self.m).map(|l| (z, l)))
            .collect::<Result<_>>()?;
        let mut cache = self.cache.lock().unwrap();
        for (z, l) in fresh {
            cache.insert(key(&z), l);
        }
        Ok(zs.iter().map(|z| cache[&key(z)]).collect())
    }

    fn det(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.logdets(&[z])?[0].exp())
    }

    /// Change of `arg det` from `a` to `b`, sampled until every step is
    /// below π/2.
    fn edge_increment(&self, a: Complex64, b: Complex64) -> Result<f64> {
        let flip = (a.re, a.im) > (b.re, b.im);
        let (p, q) = if flip { (b, a) } else { (a, b) };
        let at = |t: f64| p + (q - p) * t;
        let n0 = self.opts.edge_samples.max(2);
        let mut ts: Vec<f64> = (0..=n0).map(|j| j as f64 / n0 as f64).collect();
        let mut vals = self.logdets(&ts.iter().map(|&t| at(t)).collect::<Vec<_>>())?;
        let min_dt = 1e-9;
        loop {
            let mut inserts = Vec::new();
            for j in 0..ts.len() - 1 {
                if wrap_angle(vals[j + 1].im - vals[j].im).abs() >= 0.5 * PI {
                    if ts[j + 1] - ts[j] < min_dt {
                        return Err(SpectralError::WindingUnresolved(format!(
                            "argument jump near z = {} on the segment {a} → {b}",
                            at(ts[j])
                        )));
                    }
                    inserts.push(0.5 * (ts[j] + ts[j + 1]));
                }
            }
            if inserts.is_empty() {
                break;
            }
            let new_vals = self.logdets(&inserts.iter().map(|&t| at(t)).collect::<Vec<_>>())?;
            let mut merged: Vec<(f64, Complex64)> = ts.into_iter().zip(vals).chain(inserts.into_iter().zip(new_vals)).collect();
            merged.sort_by(|x, y| x.0.total_cmp(&y.0));
            (ts, vals) = merged.into_iter().unzip();
        }
        let total: f64 = vals.windows(2).map(|w| wrap_angle(w[1].im - w[0].im)).sum();
        Ok(if flip { -total } else { total })
    }

    fn winding(&self, rect: &Rect) -> Result<i64> {
        let c = rect.corners();
        let mut total = 0.0;
        for k in 0..4 {
            total += self.edge_increment(c[k], c[(k + 1) % 4])?;
        }
        Ok((total / (2.0 * PI)).round() as i64)
    }

    /// Newton iteration on `det` from the centre of `rect`.
    fn newton(&self, rect: &Rect) -> Result<Option<FoundRoot>> {
        let h = 1e-6 * rect.scale();
        let mut z = rect.center();
        for _ in 0..60 {
            let f = self.det(z)?;
            let d = self.logdets(&[z + h, z - h])?;
            let df = (d[0].exp() - d[1].exp()) / (2.0 * h);
            if df.norm() == 0.0 || !df.is_finite() {
                return Ok(None);
            }
            let step = f / df;
            z -= step;
            if !rect.contains_strictly(z) {
                return Ok(None);
            }
            if step.norm() <= 1e-14 * rect.scale().max(z.norm()) {
                break;
            }
        }
        let residual = self.det(z)?.norm();
        Ok((residual <= self.opts.det_tol).then_some(FoundRoot { z, residual, winding: 1 }))
    }

    fn split_windings(&self, rect: &Rect, winding: i64) -> Result<[(Rect, i64); 4]> {
        let mut last = None;
        for (fx, fy) in [(0.5123, 0.4871), (0.45, 0.55), (0.55, 0.45)] {
            let parts = rect.split(fx, fy);
            let ws: Result<Vec<i64>> = parts.iter().map(|r| self.winding(r)).collect();
            match ws {
                Ok(ws) if ws.iter().sum::<i64>() == winding => {
                    return Ok([(parts[0], ws[0]), (parts[1], ws[1]), (parts[2], ws[2]), (parts[3], ws[3])]);
                }
                Ok(ws) => {
                    last = Some(SpectralError::WindingUnresolved(format!(
                        "children windings {ws:?} do not add up to {winding}"
                    )))
                }
                Err(e) => last = Some(e),
            }
        }
        Err(last.unwrap())
    }

    fn search(&self, rect: Rect, winding: i64, depth: usize, report: &mut SpectrumSearchReport) -> Result<()> {
        if winding == 0 {
            return Ok(());
        }
        report.contour_windings.push(SubregionWinding { region: rect, winding });
        if winding < 0 {
            return Err(SpectralError::WindingUnresolved(format!("negative winding {winding} on {rect:?}")));
        }
        if winding == 1 {
            if let Some(root) = self.newton(&rect)? {
                report.eigenvalues.push(root);
                return Ok(());
            }
        }
        if depth >= self.opts.max_depth {
            // A multiple root, or clustered roots below the resolution.
            return match self.newton(&rect)? {
                Some(root) => {
                    report.eigenvalues.push(FoundRoot { winding, ..root });
                    Ok(())
                }
                None => Err(SpectralError::WindingUnresolved(format!(
                    "winding {winding} on {rect:?} without a converged root"
                ))),
            };
        }
        for (child, w) in self.split_windings(&rect, winding)? {
            self.search(child, w, depth + 1, report)?;
        }
        Ok(())
    }
}

fn run_search(grid: &NystromGrid, m: f64, region: Rect, opts: &SearchOptions) -> Result<SpectrumSearchReport> {
    let dist = essential_distance(&region, m, grid.phi);
    if dist < opts.branch_margin {
        return Err(SpectralError::BranchCut { z: region.center(), distance: dist });
    }
    let s = Searcher { grid, m, opts, cache: Mutex::new(HashMap::new()) };
    let mut report = SpectrumSearchReport {
        region,
        mass: m,
        phi: grid.phi,
        eigenvalues: Vec::new(),
        grid_size: grid.len(),
        truncation: grid.truncation,
        panel_order: grid.panel_order,
        det_tol: opts.det_tol,
        contour_windings: Vec::new(),
        evaluations: 0,
    };
    let w = s.winding(&region)?;
    s.search(region, w, 0, &mut report)?;
    report.eigenvalues.sort_by(|a, b| a.z.re.total_cmp(&b.z.re).then(a.z.im.total_cmp(&b.z.im)));
    report.evaluations = s.cache.lock().unwrap().len();
    Ok(report)
}

/// Eigenvalues of `H = H₀ + V` in `region` as zeros of `det(I + Q_N(z))`.
pub fn det_root_search(v: &Potential, m: f64, region: Rect, opts: &SearchOptions) -> Result<SpectrumSearchReport> {
    let grid = NystromGrid::new(v, 0.0, &opts.nystrom)?;
    run_search(&grid, m, region, opts)
}

/// Eigenvalues of the dilated operator `H(iφ)` in `region`.
pub fn resonance_search(
    v: &Potential,
    m: f64,
    phi: f64,
    region: Rect,
    opts: &SearchOptions,
) -> Result<SpectrumSearchReport> {
    let grid = NystromGrid::new(v, phi, &opts.nystrom)?;
    run_search(&grid, m, region, opts)
}

/// Search with a prebuilt grid, e.g. one reused across regions.
pub fn grid_root_search(grid: &NystromGrid, m: f64, region: Rect, opts: &SearchOptions) -> Result<SpectrumSearchReport> {
    run_search(grid, m, region, opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Persistence {
    pub phi: f64,
    #[serde(with = "crate::serde_complex")]
    pub reference: Complex64,
    /// Nearest root of the dilated determinant within the search box.
    #[serde(with = "crate::serde_complex::option")]
    pub found: Option<Complex64>,
    pub shift: f64,
}

/// Re-locates each root in a box of half-width `radius` for every angle.
pub fn check_theta_persistence(
    v: &Potential,
    m: f64,
    roots: &[Complex64],
    phis: &[f64],
    radius: f64,
    opts: &SearchOptions,
) -> Result<Vec<Persistence>> {
    let mut out = Vec::new();
    for &phi in phis {
        let grid = NystromGrid::new(v, phi, &opts.nystrom)?;
        for &z in roots {
            let report = run_search(&grid, m, Rect::around(z, radius)?, opts)?;
            let found = report
                .eigenvalues
                .iter()
                .map(|r| r.z)
                .min_by(|a, b| (a - z).norm().total_cmp(&(b - z).norm()));
            out.push(Persistence {
                phi,
                reference: z,
                found,
                shift: found.map_or(f64::INFINITY, |f| (f - z).norm()),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_potential_has_no_roots() {
        let r = det_root_search(&Potential::zero(), 1.0, Rect::new(-0.5, 0.5, -0.5, 0.5).unwrap(), &SearchOptions::default())
            .unwrap();
        assert!(r.eigenvalues.is_empty());
        assert!(r.contour_windings.is_empty());
    }

    #[test]
    fn region_touching_the_cut_is_rejected() {
        let v = Potential::gaussian(0.3, 1.0).unwrap();
        let opts = SearchOptions::default();
        assert!(matches!(
            det_root_search(&v, 1.0, Rect::new(0.5, 1.5, -0.1, 0.1).unwrap(), &opts),
            Err(SpectralError::BranchCut { .. })
        ));
        assert!(matches!(
            det_root_search(&v, 0.0, Rect::new(-1.0, 1.0, 0.0005, 1.0).unwrap(), &opts),
            Err(SpectralError::BranchCut { .. })
        ));
    }

    #[test]
    fn essential_distance_closed_form_and_sampled_agree() {
        let r = Rect::new(0.2, 0.6, 0.3, 0.5).unwrap();
        for m in [0.0, 1.0] {
            let exact = essential_distance(&r, m, 0.0);
            let sampled = essential_distance(&r, m, 1e-12);
            assert!((exact - sampled).abs() < 1e-3, "{exact} vs {sampled}");
        }
        // For m = 0 and φ the essential spectrum is the line at angle −φ.
        let phi = 0.4;
        let r = Rect::new(1.0, 2.0, -3.0, -2.0).unwrap();
        let want = [c(1.0, -2.0), c(2.0, -2.0), c(1.0, -3.0), c(2.0, -3.0)]
            .iter()
            .map(|z| (z * Complex64::from_polar(1.0, phi)).im.abs())
            .fold(f64::INFINITY, f64::min);
        assert!((essential_distance(&r, 0.0, phi) - want).abs() < 1e-3);
    }

    #[test]
    fn attractive_well_bound_states_in_gap() {
        // A real scalar well has real eigenvalues in the gap, symmetric
        // under z ↦ −z̄ only for the mirror potential; check realness and
        // that they are zeros of the determinant.
        let v = Potential::gaussian(-1.5, 1.0).unwrap();
        let opts = SearchOptions { nystrom: NystromOptions { nodes: 120, ..Default::default() }, ..Default::default() };
        let r = det_root_search(&v, 1.0, Rect::new(-0.9, 0.9, -0.2, 0.3).unwrap(), &opts).unwrap();
        assert!(!r.eigenvalues.is_empty());
        for root in &r.eigenvalues {
            assert!(root.z.im.abs() < 1e-8, "{:?}", root.z);
            assert!(root.residual <= 1e-8);
        }
    }
}
