//! Nyström discretization of `Q(z) = A R₀(z) B` on composite Gauss panels.
//!
//! The kernel is smooth off the diagonal but has a kink (and a jump in
//! `sgn(x − y)`) on it. Rows integrate their own panel with a Gauss rule
//! split at the row node, interpolating the unknown from the panel nodes.

use faer::Mat;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complexmaps::{branch_values, BranchValues, BRANCH_TOL};
use crate::error::{Result, SpectralError};
use crate::potentials::{Matrix2, Potential};
use crate::quadrature::{gauss_legendre, DEFAULT_ABS_TOL};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NystromOptions {
    /// Requested node count; the grid uses the largest multiple of the
    /// panel order not above it.
    pub nodes: usize,
    /// Half-width of the truncated line; chosen from the tail bound of the
    /// potential when absent.
    pub truncation: Option<f64>,
    pub panel_order: usize,
}

impl Default for NystromOptions {
    fn default() -> Self {
        Self { nodes: 200, truncation: None, panel_order: 20 }
    }
}

/// Kernel data at one spectral point:
/// `R(x, y) = (i/2) e^{θ} [[ζ, s], [s, 1/ζ]] exp(i e^{θ} k |x − y|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub z: Complex64,
    pub m: f64,
    pub theta: Complex64,
    pub branch: BranchValues,
    /// `e^{θ} k`, the decay constant along the real axis; `Im > 0`.
    rotated_k: Complex64,
    prefactor: Complex64,
}

impl KernelParams {
    pub fn new(z: Complex64, m: f64, phi: f64) -> Result<Self> {
        let (branch, rotated_k, rot) = if phi == 0.0 {
            let b = branch_values(z, m)?;
            (b, b.k, Complex64::new(1.0, 0.0))
        } else {
            let rot = Complex64::from_polar(1.0, phi);
            let k0 = (z * z - m * m).sqrt();
            let rk = rot * k0;
            let scale = z.norm().max(m).max(1.0);
            if rk.im.abs() < BRANCH_TOL * scale || !rk.im.is_finite() {
                return Err(SpectralError::BranchCut { z, distance: rk.im.abs() });
            }
            let k = if rk.im > 0.0 { k0 } else { -k0 };
            (BranchValues::from_root(z, m, k), rot * k, rot)
        };
        Ok(Self {
            z,
            m,
            theta: Complex64::new(0.0, phi),
            branch,
            rotated_k,
            prefactor: Complex64::new(0.0, 0.5) * rot,
        })
    }

    /// Matrix part `(i/2) e^{θ} M` for `sgn(x − y) = s`.
    fn matrix(&self, s: f64) -> Matrix2 {
        let zeta = self.branch.zeta;
        Matrix2::new(zeta, s.into(), s.into(), 1.0 / zeta).scale(self.prefactor)
    }

    pub fn eval(&self, d: f64) -> Matrix2 {
        let s = if d >= 0.0 { 1.0 } else { -1.0 };
        self.matrix(s).scale((Complex64::i() * self.rotated_k * d.abs()).exp())
    }

    pub fn decay(&self) -> f64 {
        self.rotated_k.im
    }
}

/// Split-panel rule for the row at one node.
#[derive(Debug, Clone)]
struct RowCorrection {
    panel: usize,
    /// Offsets `x_i − y_s` of the sub-nodes.
    offsets: Vec<f64>,
    weights: Vec<f64>,
    b: Vec<Matrix2>,
    /// `interp[s][j]`: Lagrange basis of panel node `j` at sub-node `s`.
    interp: Vec<Vec<f64>>,
}

/// The `z`-independent part of the discretization: panels, nodes, weights
/// and the factors `A`, `B` of `V(e^{iφ}·)` at every node.
#[derive(Debug, Clone)]
pub struct NystromGrid {
    pub phi: f64,
    pub truncation: f64,
    pub panel_order: usize,
    pub panel_edges: Vec<f64>,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    a: Vec<Matrix2>,
    b: Vec<Matrix2>,
    rows: Vec<RowCorrection>,
}

#[derive(Debug, Clone)]
pub struct NystromSystem {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// `I + Q_N(z)`, size `2N × 2N`, node-major.
    pub matrix: Mat<Complex64>,
    pub logdet: Complex64,
}

impl NystromSystem {
    /// `‖Q_N‖` as an operator on `L²(ℝ; ℂ²)`, measured in the quadrature
    /// inner product.
    pub fn operator_norm(&self) -> Result<f64> {
        let n = self.matrix.nrows();
        let sq: Vec<f64> = (0..n).map(|r| self.weights[r / 2].sqrt()).collect();
        let scaled = Mat::<Complex64>::from_fn(n, n, |r, c| {
            let q = self.matrix[(r, c)] - if r == c { 1.0 } else { 0.0 };
            q * (sq[r] / sq[c])
        });
        let sv = scaled
            .singular_values()
            .map_err(|e| SpectralError::NonIntegrable(format!("SVD failed: {e:?}")))?;
        Ok(sv.first().copied().unwrap_or(0.0))
    }

    pub fn determinant(&self) -> Complex64 {
        self.logdet.exp()
    }
}

fn potential_on_ray(v: &Potential, x: f64, phi: f64) -> Result<Matrix2> {
    if phi == 0.0 && v.alpha().is_none() {
        return Ok(v.eval(x));
    }
    v.eval_complex(Complex64::from_polar(x, phi))
}

/// Panel edges on `[−L, L]` with breakpoints of the potential as edges when
/// there are enough panels to honour them.
fn layout(v: &Potential, phi: f64, l: f64, panels: usize) -> Vec<f64> {
    let mut edges: Vec<f64> = v
        .breakpoints(phi)
        .into_iter()
        .filter(|x| x.abs() < l * (1.0 - 1e-9))
        .collect();
    edges.extend([-l, l]);
    edges.sort_by(f64::total_cmp);
    edges.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * l);
    let intervals = edges.len() - 1;
    if intervals > panels {
        return (0..=panels).map(|j| -l + 2.0 * l * j as f64 / panels as f64).collect();
    }
    // One panel each, the rest by length with largest remainders.
    let lengths: Vec<f64> = edges.windows(2).map(|w| w[1] - w[0]).collect();
    let extra = panels - intervals;
    let shares: Vec<f64> = lengths.iter().map(|len| extra as f64 * len / (2.0 * l)).collect();
    let mut counts: Vec<usize> = shares.iter().map(|s| 1 + s.floor() as usize).collect();
    let mut left = panels - counts.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..intervals).collect();
    order.sort_by(|&i, &j| (shares[j] - shares[j].floor()).total_cmp(&(shares[i] - shares[i].floor())));
    for &i in order.iter().cycle() {
        if left == 0 {
            break;
        }
        counts[i] += 1;
        left -= 1;
    }
    let mut out = vec![edges[0]];
    for (k, w) in edges.windows(2).enumerate() {
        for j in 1..=counts[k] {
            out.push(if j == counts[k] { w[1] } else { w[0] + (w[1] - w[0]) * j as f64 / counts[k] as f64 });
        }
    }
    out
}

/// Barycentric weights for nodes `t`.
fn barycentric_weights(t: &[f64]) -> Vec<f64> {
    (0..t.len())
        .map(|j| 1.0 / (0..t.len()).filter(|&k| k != j).map(|k| t[j] - t[k]).product::<f64>())
        .collect()
}

fn lagrange_row(t: &[f64], lam: &[f64], y: f64) -> Vec<f64> {
    if let Some(j) = t.iter().position(|&tj| tj == y) {
        let mut e = vec![0.0; t.len()];
        e[j] = 1.0;
        return e;
    }
    let terms: Vec<f64> = t.iter().zip(lam).map(|(tj, lj)| lj / (y - tj)).collect();
    let total: f64 = terms.iter().sum();
    terms.into_iter().map(|c| c / total).collect()
}

impl NystromGrid {
    pub fn new(v: &Potential, phi: f64, opts: &NystromOptions) -> Result<Self> {
        if opts.nodes < 8 {
            return Err(SpectralError::DomainError(format!("need at least 8 nodes, got {}", opts.nodes)));
        }
        if phi != 0.0 {
            match v.alpha() {
                Some(a) if phi.abs() < a => {}
                alpha => return Err(SpectralError::AnalyticityViolation { phi, alpha }),
            }
        }
        let p = opts.panel_order.clamp(2, opts.nodes);
        let panels = opts.nodes / p;
        let l = match (opts.truncation, v.support()) {
            (Some(l), _) => l,
            (None, Some((lo, hi))) => lo.abs().max(hi.abs()),
            (None, None) => v.truncation(DEFAULT_ABS_TOL, 1.0, phi)?,
        };
        if !(l > 0.0 && l.is_finite()) {
            return Err(SpectralError::DomainError(format!("truncation must be positive, got {l}")));
        }
        let edges = layout(v, phi, l, panels);
        let (gx, gw) = gauss_legendre(p);
        let lam = barycentric_weights(&gx);

        let mut nodes = Vec::with_capacity(panels * p);
        let mut weights = Vec::with_capacity(panels * p);
        for w in edges.windows(2) {
            let (c, h) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
            nodes.extend(gx.iter().map(|t| c + h * t));
            weights.extend(gw.iter().map(|t| h * t));
        }
        let factors: Vec<(Matrix2, Matrix2)> = nodes
            .iter()
            .map(|&x| potential_on_ray(v, x, phi).map(|m| m.polar_factors()))
            .collect::<Result<_>>()?;
        let (a, b): (Vec<_>, Vec<_>) = factors.into_iter().unzip();

        let rows = (0..nodes.len())
            .map(|i| {
                let panel = i / p;
                let (lo, hi) = (edges[panel], edges[panel + 1]);
                let (c, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
                let xi = nodes[i];
                let mut offsets = Vec::with_capacity(2 * p);
                let mut sw = Vec::with_capacity(2 * p);
                let mut bs = Vec::with_capacity(2 * p);
                let mut interp = Vec::with_capacity(2 * p);
                for (s0, s1) in [(lo, xi), (xi, hi)] {
                    let (sc, sh) = (0.5 * (s0 + s1), 0.5 * (s1 - s0));
                    for (t, w) in gx.iter().zip(&gw) {
                        let y = sc + sh * t;
                        offsets.push(xi - y);
                        sw.push(sh * w);
                        bs.push(potential_on_ray(v, y, phi)?.polar_factors().1);
                        interp.push(lagrange_row(&gx, &lam, (y - c) / h));
                    }
                }
                Ok(RowCorrection { panel, offsets, weights: sw, b: bs, interp })
            })
            .collect::<Result<Vec<_>>>()?;

        Ok(Self {
            phi,
            truncation: l,
            panel_order: p,
            panel_edges: edges,
            nodes,
            weights,
            a,
            b,
            rows,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Row-major entries of `I + Q_N(z)`.
    fn entries(&self, kp: &KernelParams) -> Vec<Complex64> {
        let n = self.len();
        let dim = 2 * n;
        let p = self.panel_order;
        let am = [kp.matrix(1.0), kp.matrix(-1.0)];
        let ik = Complex64::i() * kp.rotated_k;
        let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
        out.par_chunks_mut(2 * dim).enumerate().for_each(|(i, rows)| {
            let xi = self.nodes[i];
            let ai = self.a[i];
            let am_i = [ai * am[0], ai * am[1]];
            let own = &self.rows[i];
            let mut put = |j: usize, blk: Matrix2| {
                for r in 0..2 {
                    for c in 0..2 {
                        rows[r * dim + 2 * j + c] = blk.0[r][c];
                    }
                }
            };
            for j in 0..n {
                if j / p == own.panel {
                    continue;
                }
                let d = xi - self.nodes[j];
                let side = if d >= 0.0 { 0 } else { 1 };
                let f = (ik * d.abs()).exp() * self.weights[j];
                put(j, (am_i[side] * self.b[j]).scale(f));
            }
            let mut acc = vec![Matrix2::ZERO; p];
            for s in 0..own.offsets.len() {
                let d = own.offsets[s];
                let side = if d >= 0.0 { 0 } else { 1 };
                let kb = (am_i[side] * own.b[s]).scale((ik * d.abs()).exp() * own.weights[s]);
                for (jj, l) in own.interp[s].iter().enumerate() {
                    if *l != 0.0 {
                        acc[jj] = acc[jj] + kb.scale((*l).into());
                    }
                }
            }
            for (jj, blk) in acc.into_iter().enumerate() {
                put(own.panel * p + jj, blk);
            }
            rows[2 * i] += 1.0;
            rows[dim + 2 * i + 1] += 1.0;
        });
        out
    }

    pub fn matrix(&self, kp: &KernelParams) -> Mat<Complex64> {
        let dim = 2 * self.len();
        let e = self.entries(kp);
        Mat::from_fn(dim, dim, |r, c| e[r * dim + c])
    }

    pub fn system(&self, z: Complex64, m: f64) -> Result<NystromSystem> {
        let kp = KernelParams::new(z, m, self.phi)?;
        let matrix = self.matrix(&kp);
        let logdet = logdet(&matrix);
        Ok(NystromSystem { nodes: self.nodes.clone(), weights: self.weights.clone(), matrix, logdet })
    }

    /// `log det(I + Q_N(z))` with the imaginary part in `(−π, π]`.
    pub fn logdet(&self, z: Complex64, m: f64) -> Result<Complex64> {
        let kp = KernelParams::new(z, m, self.phi)?;
        Ok(logdet(&self.matrix(&kp)))
    }

    /// Hilbert–Schmidt norms of `A R₀(z)` and `R₀(z) B` as operators on
    /// `L²(ℝ)`, with the inner variable integrated exactly over the line.
    pub fn hs_block_norms(&self, z: Complex64, m: f64) -> Result<(f64, f64)> {
        let kp = KernelParams::new(z, m, self.phi)?;
        let (mp, mm) = (kp.matrix(1.0), kp.matrix(-1.0));
        // ∫ e^{−2γ|x−y|} dy over one side of x.
        let half = 0.5 / kp.decay();
        let (mut ar, mut rb) = (0.0, 0.0);
        for i in 0..self.len() {
            let w = self.weights[i];
            let ahs = (self.a[i] * mp).hs_norm().powi(2) + (self.a[i] * mm).hs_norm().powi(2);
            let bhs = (mp * self.b[i]).hs_norm().powi(2) + (mm * self.b[i]).hs_norm().powi(2);
            ar += w * half * ahs;
            rb += w * half * bhs;
        }
        Ok((ar.sqrt(), rb.sqrt()))
    }
}

/// Log-determinant from a pivoted LU factorization, summed factor by factor.
pub fn logdet(matrix: &Mat<Complex64>) -> Complex64 {
    let lu = matrix.partial_piv_lu();
    let u = lu.U();
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..u.nrows() {
        total += u[(i, i)].ln();
    }
    let (fwd, _) = lu.P().arrays();
    if permutation_is_odd(fwd) {
        total += Complex64::new(0.0, std::f64::consts::PI);
    }
    Complex64::new(total.re, wrap_angle(total.im))
}

fn permutation_is_odd(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    let mut odd = false;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut j = start;
        while !seen[j] {
            seen[j] = true;
            j = perm[j];
            len += 1;
        }
        if len % 2 == 0 {
            odd = !odd;
        }
    }
    odd
}

/// Reduces an angle to `(−π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::PI;
    let r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// `I + Q_N(z)` for the undilated operator.
pub fn assemble(v: &Potential, z: Complex64, m: f64, nodes: usize, truncation: Option<f64>) -> Result<NystromSystem> {
    let opts = NystromOptions { nodes, truncation, ..Default::default() };
    NystromGrid::new(v, 0.0, &opts)?.system(z, m)
}

/// `I + Q_N(z)` for the dilated operator `H(θ)`, `θ = iφ`.
pub fn dilated_assemble(
    v: &Potential,
    z: Complex64,
    m: f64,
    theta: Complex64,
    nodes: usize,
    truncation: Option<f64>,
) -> Result<NystromSystem> {
    if theta.re != 0.0 {
        return Err(SpectralError::DomainError(format!("only imaginary dilations are supported, got θ = {theta}")));
    }
    let opts = NystromOptions { nodes, truncation, ..Default::default() };
    NystromGrid::new(v, theta.im, &opts)?.system(z, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::l1_norm;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_potential_gives_identity() {
        let s = assemble(&Potential::zero(), c(0.0, 2.0), 0.0, 40, None).unwrap();
        assert_eq!(s.logdet, c(0.0, 0.0));
        for r in 0..s.matrix.nrows() {
            for col in 0..s.matrix.ncols() {
                let want = if r == col { 1.0 } else { 0.0 };
                assert_eq!(s.matrix[(r, col)], c(want, 0.0));
            }
        }
    }

    #[test]
    fn logdet_matches_small_determinant() {
        let m = Mat::<Complex64>::from_fn(3, 3, |r, col| c(1.0 / (1.0 + r as f64 + col as f64), (r * r) as f64 - col as f64));
        // Cofactor expansion as oracle.
        let e = |r: usize, col: usize| m[(r, col)];
        let det = e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1)) - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
            + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0));
        assert!((logdet(&m).exp() - det).norm() < 1e-12 * det.norm());
    }

    #[test]
    fn parity_of_permutations() {
        assert!(!permutation_is_odd(&[0, 1, 2]));
        assert!(permutation_is_odd(&[1, 0, 2]));
        assert!(!permutation_is_odd(&[1, 2, 0]));
    }

    #[test]
    fn layout_respects_breakpoints_and_count() {
        let v = Potential::gaussian(0.3, 1.0).unwrap();
        let e = layout(&v, 0.0, 6.0, 10);
        assert_eq!(e.len(), 11);
        for bp in [0.0, -1.0, 1.0, -3.0, 3.0] {
            assert!(e.iter().any(|x| (x - bp).abs() < 1e-12));
        }
        assert!(e.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn gaussian_norm_bound() {
        let v = Potential::gaussian(0.3, 1.0).unwrap();
        let s = assemble(&v, c(0.0, 2.0), 0.0, 200, None).unwrap();
        let q = s.operator_norm().unwrap();
        assert!(q <= l1_norm(&v).unwrap() + 1e-6, "‖Q‖ = {q}");
    }

    #[test]
    fn kink_split_rule_is_exact_for_constant_data() {
        // For V = I on [−L, L], row sums of Q against φ ≡ e₁ reproduce
        // ∫ R(x, y) dy in closed form.
        let table = crate::potentials::TableData {
            xs: vec![-1.0, 1.0],
            values: vec![Matrix2::IDENTITY, Matrix2::IDENTITY],
        };
        let v = Potential::new(crate::potentials::PotentialKind::Table(std::sync::Arc::new(table))).unwrap();
        let grid = NystromGrid::new(&v, 0.0, &NystromOptions { nodes: 40, ..Default::default() }).unwrap();
        let z = c(0.3, 0.8);
        let kp = KernelParams::new(z, 1.0, 0.0).unwrap();
        let mat = grid.matrix(&kp);
        let k = kp.branch.k;
        let zeta = kp.branch.zeta;
        for (i, &x) in grid.nodes.iter().enumerate() {
            let mut s0 = c(0.0, 0.0);
            for j in 0..grid.len() {
                s0 += mat[(2 * i, 2 * j)];
            }
            s0 -= 1.0;
            // ∫_{−1}^{1} e^{ik|x−y|} dy.
            let ex = ((Complex64::i() * k * (x + 1.0)).exp() + (Complex64::i() * k * (1.0 - x)).exp() - 2.0)
                / (Complex64::i() * k);
            let want = c(0.0, 0.5) * zeta * ex;
            assert!((s0 - want).norm() < 1e-12, "row {i}: {s0} vs {want}");
        }
    }

    #[test]
    fn conjugation_symmetry_for_hermitian_potential() {
        let v = Potential::gaussian(0.5, 1.0).unwrap();
        let grid = NystromGrid::new(&v, 0.0, &NystromOptions::default()).unwrap();
        for z in [c(0.3, 0.7), c(-1.5, 0.2), c(0.0, 0.4)] {
            let up = grid.logdet(z, 1.0).unwrap().exp();
            let down = grid.logdet(z.conj(), 1.0).unwrap().exp();
            assert!((down - up.conj()).norm() <= 1e-10 * up.norm());
            let nu = grid.system(z, 1.0).unwrap().operator_norm().unwrap();
            let nd = grid.system(z.conj(), 1.0).unwrap().operator_norm().unwrap();
            assert!((nu - nd).abs() < 1e-10);
        }
    }

    #[test]
    fn dilation_zero_reproduces_undilated() {
        let v = Potential::gaussian(0.3, 1.0).unwrap();
        let z = c(0.2, 0.9);
        let a = assemble(&v, z, 1.0, 100, None).unwrap();
        let b = dilated_assemble(&v, z, 1.0, c(0.0, 0.0), 100, None).unwrap();
        let mut diff: f64 = 0.0;
        for r in 0..a.matrix.nrows() {
            for col in 0..a.matrix.ncols() {
                diff = diff.max((a.matrix[(r, col)] - b.matrix[(r, col)]).norm());
            }
        }
        assert!(diff <= 1e-15);
        assert!(dilated_assemble(&v, z, 1.0, c(0.0, PI / 3.0), 100, None).is_err());
        assert!(dilated_assemble(&v, z, 1.0, c(0.1, 0.1), 100, None).is_err());
    }

    #[test]
    fn dilated_branch_rejects_rotated_cut() {
        // z² − m² = e^{−2iφ} p² sits on the rotated essential spectrum.
        let phi = 0.3;
        let z = (Complex64::from_polar(4.0, -2.0 * phi) + 1.0).sqrt();
        assert!(matches!(KernelParams::new(z, 1.0, phi), Err(SpectralError::BranchCut { .. })));
        let kp = KernelParams::new(c(2.0, -0.1), 1.0, phi).unwrap();
        assert!(kp.decay() > 0.0);
    }

    #[test]
    fn hs_blocks_saturate_corrected_bound_for_scalar_potentials() {
        // For V = v·I the HS norm of A R₀ equals η ‖V‖₁^{1/2} / √(Im k).
        let v = Potential::gaussian(0.4, 2.0).unwrap();
        let v1 = l1_norm(&v).unwrap();
        let grid = NystromGrid::new(&v, 0.0, &NystromOptions::default()).unwrap();
        for z in [c(0.5, 0.3), c(2.0, 1.0), c(0.0, 0.5)] {
            let bv = branch_values(z, 1.0).unwrap();
            let (ar, rb) = grid.hs_block_norms(z, 1.0).unwrap();
            let bound = bv.eta * v1.sqrt() / bv.k.im.sqrt();
            assert!((ar / bound - 1.0).abs() < 1e-8 && (rb / bound - 1.0).abs() < 1e-8);
        }
    }
}
