//! The built-in potential families and their JSON description.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::Matrix2;
use crate::error::{Result, SpectralError};

/// One term `C·exp(−b (x − c)²)` of a Gaussian sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianTerm {
    pub coeff: Matrix2,
    pub b: f64,
    #[serde(default)]
    pub center: f64,
}

/// Rows of a tabulated potential, sorted by `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct TableData {
    pub xs: Vec<f64>,
    pub values: Vec<Matrix2>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialKind {
    Zero,
    /// `a·exp(−b x²)·I`.
    GaussianScalar { a: f64, b: f64 },
    /// `i·a·exp(−b x²)·I`.
    ImaginaryGaussian { a: f64, b: f64 },
    /// `C·exp(−b |x − c|)`; kinked at `c`, hence not dilation analytic.
    Exponential { coeff: Matrix2, b: f64, center: f64 },
    /// `2μ / sinh(2μx + i) · diag(1, −1)`.
    Sinh { mu: Complex64 },
    GaussianSum(Vec<GaussianTerm>),
    /// Linear interpolation of tabulated values, zero outside the table.
    Table(Arc<TableData>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayClass {
    L1,
    L1PlusLinf0,
    Lp,
}

/// `V(x) = amplitude · base(stretch · x)` for a catalog `base`.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    pub kind: PotentialKind,
    pub amplitude: f64,
    pub stretch: f64,
}

impl Potential {
    pub fn new(kind: PotentialKind) -> Result<Self> {
        validate(&kind)?;
        Ok(Self { kind, amplitude: 1.0, stretch: 1.0 })
    }

    pub fn zero() -> Self {
        Self { kind: PotentialKind::Zero, amplitude: 1.0, stretch: 1.0 }
    }

    pub fn gaussian(a: f64, b: f64) -> Result<Self> {
        Self::new(PotentialKind::GaussianScalar { a, b })
    }

    pub fn imaginary_gaussian(a: f64, b: f64) -> Result<Self> {
        Self::new(PotentialKind::ImaginaryGaussian { a, b })
    }

    pub fn exponential(a: f64, b: f64) -> Result<Self> {
        Self::new(PotentialKind::Exponential {
            coeff: Matrix2::scalar(a.into()),
            b,
            center: 0.0,
        })
    }

    pub fn sinh(mu: Complex64) -> Result<Self> {
        Self::new(PotentialKind::Sinh { mu })
    }

    pub fn gaussian_sum(terms: Vec<GaussianTerm>) -> Result<Self> {
        Self::new(PotentialKind::GaussianSum(terms))
    }

    /// Multiplies the potential by a nonnegative factor.
    pub fn scaled(&self, factor: f64) -> Self {
        Self { amplitude: self.amplitude * factor, ..self.clone() }
    }

    /// `x ↦ λ V(λ x)`, which keeps `‖V‖₁` fixed while narrowing the support.
    pub fn concentrated(&self, lambda: f64) -> Self {
        Self {
            amplitude: self.amplitude * lambda,
            stretch: self.stretch * lambda,
            kind: self.kind.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.amplitude == 0.0 || matches!(self.kind, PotentialKind::Zero)
    }

    pub fn eval(&self, x: f64) -> Matrix2 {
        if self.amplitude == 0.0 {
            return Matrix2::ZERO;
        }
        base_eval(&self.kind, self.stretch * x).scale(self.amplitude.into())
    }

    /// Evaluation at a complex argument; only for dilation analytic kinds.
    pub fn eval_complex(&self, x: Complex64) -> Result<Matrix2> {
        if self.amplitude == 0.0 {
            return Ok(Matrix2::ZERO);
        }
        let u = x * self.stretch;
        let m = match &self.kind {
            PotentialKind::Zero => Matrix2::ZERO,
            PotentialKind::GaussianScalar { a, b } => Matrix2::scalar(*a * (-*b * u * u).exp()),
            PotentialKind::ImaginaryGaussian { a, b } => {
                Matrix2::scalar(Complex64::new(0.0, *a) * (-*b * u * u).exp())
            }
            PotentialKind::Sinh { mu } => {
                let s = 2.0 * mu / (2.0 * mu * u + Complex64::i()).sinh();
                Matrix2::diag(s, -s)
            }
            PotentialKind::GaussianSum(terms) => terms.iter().fold(Matrix2::ZERO, |acc, t| {
                let d = u - t.center;
                acc + t.coeff.scale((-t.b * d * d).exp())
            }),
            PotentialKind::Exponential { .. } | PotentialKind::Table(_) => {
                return Err(SpectralError::AnalyticityViolation { phi: x.arg(), alpha: None })
            }
        };
        Ok(m.scale(self.amplitude.into()))
    }

    pub fn norm_at(&self, x: f64) -> f64 {
        self.eval(x).norm()
    }

    /// Half-angle of the double sector on which the potential is analytic
    /// and integrable along every ray.
    pub fn alpha(&self) -> Option<f64> {
        match &self.kind {
            PotentialKind::Zero => Some(FRAC_PI_2),
            PotentialKind::GaussianScalar { .. }
            | PotentialKind::ImaginaryGaussian { .. }
            | PotentialKind::GaussianSum(_) => Some(FRAC_PI_4),
            PotentialKind::Sinh { mu } => Some(FRAC_PI_2 - half_plane_arg(*mu).abs()),
            PotentialKind::Exponential { .. } | PotentialKind::Table(_) => None,
        }
    }

    pub fn hermitian_on_axis(&self) -> bool {
        match &self.kind {
            PotentialKind::Zero | PotentialKind::GaussianScalar { .. } => true,
            PotentialKind::ImaginaryGaussian { a, .. } => *a == 0.0,
            PotentialKind::Exponential { coeff, .. } => coeff.is_hermitian(1e-14),
            PotentialKind::Sinh { .. } => false,
            PotentialKind::GaussianSum(terms) => terms.iter().all(|t| t.coeff.is_hermitian(1e-14)),
            PotentialKind::Table(t) => t.values.iter().all(|v| v.is_hermitian(1e-12)),
        }
    }

    pub fn decay_class(&self) -> DecayClass {
        DecayClass::L1
    }

    /// Scalar (multiple of the identity) and of one sign on the real axis.
    pub fn scalar_sign_definite(&self) -> bool {
        let real_multiple = |c: &Matrix2| {
            c.0[0][1] == Complex64::new(0.0, 0.0)
                && c.0[1][0] == Complex64::new(0.0, 0.0)
                && c.0[0][0] == c.0[1][1]
                && c.0[0][0].im == 0.0
        };
        match &self.kind {
            PotentialKind::Zero | PotentialKind::GaussianScalar { .. } => true,
            PotentialKind::Exponential { coeff, .. } => real_multiple(coeff),
            PotentialKind::GaussianSum(terms) => {
                terms.iter().all(|t| real_multiple(&t.coeff))
                    && (terms.iter().all(|t| t.coeff.0[0][0].re >= 0.0)
                        || terms.iter().all(|t| t.coeff.0[0][0].re <= 0.0))
            }
            _ => false,
        }
    }

    /// Points in `x` where the integrand of a norm integral changes
    /// character (centres, kinks, widths), along the ray `e^{iφ}ℝ`.
    pub fn breakpoints(&self, phi: f64) -> Vec<f64> {
        let s = self.stretch;
        let mut u = Vec::new();
        match &self.kind {
            PotentialKind::Zero => {}
            PotentialKind::GaussianScalar { b, .. } | PotentialKind::ImaginaryGaussian { b, .. } => {
                let w = 1.0 / (b * (2.0 * phi).cos()).sqrt();
                u.extend([0.0, -w, w, -3.0 * w, 3.0 * w]);
            }
            PotentialKind::Exponential { b, center, .. } => {
                u.extend([*center, center - 1.0 / b, center + 1.0 / b]);
            }
            PotentialKind::Sinh { mu } => {
                let c = sinh_decay_rate(*mu, phi);
                u.extend([0.0, -1.0 / c, 1.0 / c, -3.0 / c, 3.0 / c]);
            }
            PotentialKind::GaussianSum(terms) => {
                for t in terms {
                    let c2 = (2.0 * phi).cos();
                    let peak = t.center * phi.cos() / c2;
                    let w = 1.0 / (t.b * c2).sqrt();
                    u.extend([peak, peak - w, peak + w, peak - 3.0 * w, peak + 3.0 * w]);
                }
            }
            PotentialKind::Table(t) => u.extend(t.xs.iter().copied()),
        }
        u.into_iter().map(|v| v / s).collect()
    }

    /// Upper bound for `∫_{|x|>L} ‖V(e^{iφ}x)‖^p dx`.
    pub fn tail_bound(&self, l: f64, p: f64, phi: f64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let s = self.stretch;
        self.amplitude.abs().powf(p) / s * base_tail(&self.kind, s * l, p, phi)
    }

    /// Smallest radius (up to a factor 1.02) whose tail bound is below `tol`.
    pub fn truncation(&self, tol: f64, p: f64, phi: f64) -> Result<f64> {
        if self.is_zero() {
            return Ok(1.0);
        }
        let mut hi = 1.0 / self.stretch;
        let limit = 1e7 / self.stretch;
        while self.tail_bound(hi, p, phi) > tol {
            hi *= 2.0;
            if hi > limit {
                return Err(SpectralError::NonIntegrable(format!(
                    "tail of ‖V‖^{p} above {tol:e} beyond |x| = {limit:e}"
                )));
            }
        }
        let mut lo = hi / 2.0;
        while hi / lo > 1.02 {
            let mid = (lo * hi).sqrt();
            if self.tail_bound(mid, p, phi) > tol {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(hi)
    }

    /// Whether the potential has compact support (tables).
    pub fn support(&self) -> Option<(f64, f64)> {
        match &self.kind {
            PotentialKind::Table(t) => Some((t.xs[0] / self.stretch, t.xs[t.xs.len() - 1] / self.stretch)),
            _ => None,
        }
    }
}

fn validate(kind: &PotentialKind) -> Result<()> {
    let bad = |msg: String| Err(SpectralError::InvalidPotential(msg));
    match kind {
        PotentialKind::GaussianScalar { a, b } | PotentialKind::ImaginaryGaussian { a, b } => {
            if !(b.is_finite() && *b > 0.0 && a.is_finite()) {
                return bad(format!("Gaussian needs finite a and b > 0, got a = {a}, b = {b}"));
            }
        }
        PotentialKind::Exponential { b, center, .. } => {
            if !(b.is_finite() && *b > 0.0 && center.is_finite()) {
                return bad(format!("exponential needs b > 0, got {b}"));
            }
        }
        PotentialKind::Sinh { mu } => {
            if mu.re == 0.0 || !mu.re.is_finite() || !mu.im.is_finite() {
                return bad(format!("sinh potential needs Re μ ≠ 0, got μ = {mu}"));
            }
        }
        PotentialKind::GaussianSum(terms) => {
            if terms.iter().any(|t| !(t.b > 0.0 && t.b.is_finite() && t.center.is_finite())) {
                return bad("Gaussian terms need b > 0 and finite centres".into());
            }
        }
        PotentialKind::Table(t) => {
            if t.xs.len() < 2 || t.xs.windows(2).any(|w| !(w[0] < w[1])) {
                return bad("table needs at least two rows with strictly increasing x".into());
            }
        }
        PotentialKind::Zero => {}
    }
    Ok(())
}

fn base_eval(kind: &PotentialKind, u: f64) -> Matrix2 {
    match kind {
        PotentialKind::Zero => Matrix2::ZERO,
        PotentialKind::GaussianScalar { a, b } => Matrix2::scalar((a * (-b * u * u).exp()).into()),
        PotentialKind::ImaginaryGaussian { a, b } => {
            Matrix2::scalar(Complex64::new(0.0, a * (-b * u * u).exp()))
        }
        PotentialKind::Exponential { coeff, b, center } => {
            coeff.scale((-b * (u - center).abs()).exp().into())
        }
        PotentialKind::Sinh { mu } => {
            let s = 2.0 * mu / (2.0 * mu * u + Complex64::i()).sinh();
            Matrix2::diag(s, -s)
        }
        PotentialKind::GaussianSum(terms) => terms.iter().fold(Matrix2::ZERO, |acc, t| {
            let d = u - t.center;
            acc + t.coeff.scale((-t.b * d * d).exp().into())
        }),
        PotentialKind::Table(t) => interpolate(t, u),
    }
}

fn interpolate(t: &TableData, u: f64) -> Matrix2 {
    let n = t.xs.len();
    if u < t.xs[0] || u > t.xs[n - 1] {
        return Matrix2::ZERO;
    }
    let j = t.xs.partition_point(|&x| x <= u).clamp(1, n - 1);
    let (x0, x1) = (t.xs[j - 1], t.xs[j]);
    let s = (u - x0) / (x1 - x0);
    t.values[j - 1].scale((1.0 - s).into()) + t.values[j].scale(s.into())
}

/// `arg μ` folded into `(−π/2, π/2]` via `μ ↦ −μ`, which leaves `V_μ` fixed.
fn half_plane_arg(mu: Complex64) -> f64 {
    if mu.re > 0.0 { mu.arg() } else { (-mu).arg() }
}

/// Exponential decay rate of `‖V_μ(e^{iφ}u)‖` in `|u|`.
fn sinh_decay_rate(mu: Complex64, phi: f64) -> f64 {
    2.0 * mu.norm() * (half_plane_arg(mu) + phi).cos().abs()
}

/// `∫_U^∞ exp(−β (u − u0)²) du` bound for `U > u0`.
fn gaussian_half_tail(beta: f64, d: f64) -> f64 {
    if d <= 0.0 {
        return f64::INFINITY;
    }
    (-beta * d * d).exp() / (2.0 * beta * d)
}

fn base_tail(kind: &PotentialKind, u: f64, p: f64, phi: f64) -> f64 {
    match kind {
        PotentialKind::Zero => 0.0,
        PotentialKind::GaussianScalar { a, b } | PotentialKind::ImaginaryGaussian { a, b } => {
            let beta = p * b * (2.0 * phi).cos();
            if beta <= 0.0 {
                return f64::INFINITY;
            }
            2.0 * a.abs().powf(p) * gaussian_half_tail(beta, u)
        }
        PotentialKind::Exponential { coeff, b, center } => {
            let d = u - center.abs();
            if d <= 0.0 {
                return f64::INFINITY;
            }
            2.0 * coeff.norm().powf(p) * (-p * b * d).exp() / (p * b)
        }
        PotentialKind::Sinh { mu } => {
            let c = sinh_decay_rate(*mu, phi);
            if c <= 0.0 || u <= 0.0 {
                return f64::INFINITY;
            }
            // 1/sinh(cu) ≤ 2e^{−cu}/(1 − e^{−2cU}) for u ≥ U.
            let k = 2.0 * 2.0 * mu.norm() / (1.0 - (-2.0 * c * u).exp());
            2.0 * k.powf(p) * (-p * c * u).exp() / (p * c)
        }
        PotentialKind::GaussianSum(terms) => {
            let n = terms.len() as f64;
            let c2 = (2.0 * phi).cos();
            if c2 <= 0.0 {
                return f64::INFINITY;
            }
            let sum: f64 = terms
                .iter()
                .map(|t| {
                    let beta = t.b * c2;
                    let peak = t.center * phi.cos() / c2;
                    let height = (t.b * t.center * t.center * phi.sin().powi(2) / c2).exp();
                    let scale = (t.coeff.norm() * height).powf(p);
                    2.0 * scale * gaussian_half_tail(p * beta, u - peak.abs())
                })
                .sum();
            n.powf(p - 1.0) * sum
        }
        PotentialKind::Table(t) => {
            if u >= t.xs[0].abs().max(t.xs[t.xs.len() - 1].abs()) {
                0.0
            } else {
                f64::INFINITY
            }
        }
    }
}

/// JSON description of a potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    Zero,
    GaussianScalar { a: f64, b: f64 },
    Sinh { mu_re: f64, mu_im: f64 },
    ImaginaryGaussian { a: f64, b: f64 },
    MatrixTable { file: PathBuf },
    Exponential { a: f64, b: f64 },
    GaussianSum { terms: Vec<GaussianTerm> },
}

impl PotentialSpec {
    /// Reads a description; relative table paths resolve against the JSON file.
    pub fn load(path: &Path) -> Result<(Self, Potential)> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SpectralError::InvalidPotential(format!("{}: {e}", path.display())))?;
        let spec: PotentialSpec = serde_json::from_str(&text)
            .map_err(|e| SpectralError::InvalidPotential(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        let potential = spec.build(base)?;
        Ok((spec, potential))
    }

    pub fn build(&self, base_dir: &Path) -> Result<Potential> {
        match self {
            PotentialSpec::Zero => Ok(Potential::zero()),
            PotentialSpec::GaussianScalar { a, b } => Potential::gaussian(*a, *b),
            PotentialSpec::Sinh { mu_re, mu_im } => Potential::sinh(Complex64::new(*mu_re, *mu_im)),
            PotentialSpec::ImaginaryGaussian { a, b } => Potential::imaginary_gaussian(*a, *b),
            PotentialSpec::Exponential { a, b } => Potential::exponential(*a, *b),
            PotentialSpec::GaussianSum { terms } => Potential::gaussian_sum(terms.clone()),
            PotentialSpec::MatrixTable { file } => {
                let path = if file.is_absolute() { file.clone() } else { base_dir.join(file) };
                read_table(&path)
            }
        }
    }
}

/// Reads a CSV table with columns `x, Re V11, Im V11, Re V12, Im V12,
/// Re V21, Im V21, Re V22, Im V22`. A non-numeric first row is a header.
pub fn read_table(path: &Path) -> Result<Potential> {
    let err = |msg: String| SpectralError::InvalidPotential(format!("{}: {msg}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| err(e.to_string()))?;
    let mut rows: Vec<(f64, Matrix2)> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| err(e.to_string()))?;
        let fields: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        let fields = match fields {
            Ok(f) => f,
            Err(_) if i == 0 => continue,
            Err(e) => return Err(err(format!("row {}: {e}", i + 1))),
        };
        if fields.len() != 9 {
            return Err(err(format!("row {} has {} columns, expected 9", i + 1, fields.len())));
        }
        let c = |k: usize| Complex64::new(fields[k], fields[k + 1]);
        rows.push((fields[0], Matrix2::new(c(1), c(3), c(5), c(7))));
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (xs, values) = rows.into_iter().unzip();
    Potential::new(PotentialKind::Table(Arc::new(TableData { xs, values })))
}
