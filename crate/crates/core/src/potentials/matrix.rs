use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A complex 2×2 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2(pub [[Complex64; 2]; 2]);

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

impl Matrix2 {
    pub const ZERO: Matrix2 = Matrix2([[ZERO, ZERO], [ZERO, ZERO]]);
    pub const IDENTITY: Matrix2 = Matrix2([[ONE, ZERO], [ZERO, ONE]]);

    pub fn new(a11: Complex64, a12: Complex64, a21: Complex64, a22: Complex64) -> Self {
        Matrix2([[a11, a12], [a21, a22]])
    }

    pub fn diag(d1: Complex64, d2: Complex64) -> Self {
        Matrix2([[d1, ZERO], [ZERO, d2]])
    }

    pub fn scalar(s: Complex64) -> Self {
        Self::diag(s, s)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let m = &self.0;
        Matrix2([[s * m[0][0], s * m[0][1]], [s * m[1][0], s * m[1][1]]])
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Matrix2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn det(&self) -> Complex64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn hs_norm(&self) -> f64 {
        self.0.iter().flatten().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).0.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol * (1.0 + self.hs_norm())
    }

    /// Eigenvalues `λ₊ ≥ λ₋ ≥ 0` of `M*M`, the squared singular values.
    pub fn gram_eigenvalues(&self) -> (f64, f64) {
        let m = &self.0;
        let p = m[0][0].norm_sqr() + m[1][0].norm_sqr();
        let q = m[0][1].norm_sqr() + m[1][1].norm_sqr();
        let r = m[0][0].conj() * m[0][1] + m[1][0].conj() * m[1][1];
        let half_gap = (0.25 * (p - q) * (p - q) + r.norm_sqr()).sqrt();
        let hi = 0.5 * (p + q) + half_gap;
        if hi == 0.0 {
            return (0.0, 0.0);
        }
        // det(M*M) = |det M|² avoids cancellation in the small eigenvalue.
        let lo = (self.det().norm_sqr() / hi).min(hi);
        (hi, lo)
    }

    /// Operator (spectral) norm.
    pub fn norm(&self) -> f64 {
        self.gram_eigenvalues().0.sqrt()
    }

    pub fn singular_values(&self) -> (f64, f64) {
        let (hi, lo) = self.gram_eigenvalues();
        (hi.sqrt(), lo.sqrt())
    }

    /// Spectral projection of `M*M` onto the eigenvector of `λ₊`.
    fn top_projection(&self, hi: f64) -> Matrix2 {
        let m = &self.0;
        let p = m[0][0].norm_sqr() + m[1][0].norm_sqr();
        let q = m[0][1].norm_sqr() + m[1][1].norm_sqr();
        let r = m[0][0].conj() * m[0][1] + m[1][0].conj() * m[1][1];
        // Two candidate eigenvectors; the longer one is numerically safer.
        let v1 = [r, Complex64::new(hi - p, 0.0)];
        let v2 = [Complex64::new(hi - q, 0.0), r.conj()];
        let n1 = v1[0].norm_sqr() + v1[1].norm_sqr();
        let n2 = v2[0].norm_sqr() + v2[1].norm_sqr();
        let (v, n) = if n1 >= n2 { (v1, n1) } else { (v2, n2) };
        if n == 0.0 {
            return Matrix2::IDENTITY;
        }
        Matrix2([
            [v[0] * v[0].conj() / n, v[0] * v[1].conj() / n],
            [v[1] * v[0].conj() / n, v[1] * v[1].conj() / n],
        ])
    }

    /// Pointwise polar factorization `M = B·A` with `A = |M|^{1/2}` and
    /// `B = U|M|^{1/2}`, `U` the partial isometry of the polar decomposition.
    pub fn polar_factors(&self) -> (Matrix2, Matrix2) {
        let (hi, lo) = self.gram_eigenvalues();
        if hi == 0.0 {
            return (Matrix2::ZERO, Matrix2::ZERO);
        }
        let p_hi = self.top_projection(hi);
        let p_lo = Matrix2::IDENTITY - p_hi;
        let (s_hi, s_lo) = (hi.powf(0.25), lo.powf(0.25));
        let a = p_hi.scale(s_hi.into()) + p_lo.scale(s_lo.into());
        // |M|^{-1/2} on the range of M*M; the kernel direction maps to 0.
        let inv_lo = if lo > 1e-28 * hi { 1.0 / s_lo } else { 0.0 };
        let a_pinv = p_hi.scale((1.0 / s_hi).into()) + p_lo.scale(inv_lo.into());
        let b = *self * a_pinv;
        (a, b)
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }
}

impl Add for Matrix2 {
    type Output = Matrix2;
    fn add(self, o: Matrix2) -> Matrix2 {
        let (a, b) = (self.0, o.0);
        Matrix2([[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]])
    }
}

impl Sub for Matrix2 {
    type Output = Matrix2;
    fn sub(self, o: Matrix2) -> Matrix2 {
        self + (-o)
    }
}

impl Neg for Matrix2 {
    type Output = Matrix2;
    fn neg(self) -> Matrix2 {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for Matrix2 {
    type Output = Matrix2;
    fn mul(self, o: Matrix2) -> Matrix2 {
        let (a, b) = (self.0, o.0);
        let e = |i: usize, j: usize| a[i][0] * b[0][j] + a[i][1] * b[1][j];
        Matrix2([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }
}

impl Serialize for Matrix2 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows = self.0.map(|row| row.map(|c| [c.re, c.im]));
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = <[[[f64; 2]; 2]; 2]>::deserialize(d)?;
        Ok(Matrix2(rows.map(|row| row.map(|[re, im]| Complex64::new(re, im)))))
    }
}
