//! Dense complex matrices and the handful of decompositions the rest of the
//! crate relies on: LU determinants, one-sided Jacobi SVD, polar splitting,
//! a QR eigen-solver for normal matrices, principal roots and Haar sampling.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

pub type C64 = Complex64;

/// Default tolerance for matrix comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Round-trip tolerance for polar factors and matrix roots.
pub const ROOT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("matrix is singular at the requested tolerance")]
    Singular,
    #[error("matrix is neither unitary nor Hermitian positive definite")]
    UnsupportedClass,
    #[error("numerical failure: {0}")]
    NumericFailure(String),
}

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CMatrix{}x{}[", self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ", ")?;
                }
                let z = self[(r, c)];
                write!(f, "{}{:+}i", z.re, z.im)?;
            }
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl CMatrix {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch {
                left: (rows, cols),
                right: (data.len(), 1),
            });
        }
        Ok(CMatrix { rows, cols, data })
    }

    /// Builds a matrix from rows; every row must have the same length.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(LinalgError::DimensionMismatch {
                    left: (r, c),
                    right: (1, row.len()),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(CMatrix { rows: r, cols: c, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows).expect("ragged real rows")
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn diag(d: &[C64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    pub fn scalar(z: C64) -> Self {
        Self::diag(&[z])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m[(c, r)] = self[(r, c)].conj();
            }
        }
        m
    }

    pub fn scale(&self, z: C64) -> Self {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * z).collect(),
        }
    }

    pub fn add(&self, other: &CMatrix) -> Result<Self, LinalgError> {
        self.same_shape(other)?;
        Ok(CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &CMatrix) -> Result<Self, LinalgError> {
        self.same_shape(other)?;
        Ok(CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    fn same_shape(&self, other: &CMatrix) -> Result<(), LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch {
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        Ok(())
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &CMatrix) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        let mut m = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for c in 0..other.cols {
                    m.data[r * other.cols + c] += a * other.data[k * other.cols + c];
                }
            }
        }
        Ok(m)
    }

    pub fn mul_vec(&self, v: &[C64]) -> Result<Vec<C64>, LinalgError> {
        if self.cols != v.len() {
            return Err(LinalgError::DimensionMismatch {
                left: (self.rows, self.cols),
                right: (v.len(), 1),
            });
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::identity(self.rows);
        for _ in 0..k {
            acc = acc.mul(self).expect("square power");
        }
        acc
    }

    /// Determinant by LU decomposition with partial pivoting.
    ///
    /// # Panics
    /// Panics if the matrix is not square.
    pub fn det(&self) -> C64 {
        assert!(self.is_square(), "det of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = C64::new(1.0, 0.0);
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[(i, k)].norm().total_cmp(&a[(j, k)].norm()))
                .unwrap();
            if a[(p, k)].norm() == 0.0 {
                return C64::new(0.0, 0.0);
            }
            if p != k {
                for c in 0..n {
                    a.data.swap(k * n + c, p * n + c);
                }
                det = -det;
            }
            let pivot = a[(k, k)];
            det *= pivot;
            for r in k + 1..n {
                let f = a[(r, k)] / pivot;
                if f.norm() == 0.0 {
                    continue;
                }
                for c in k..n {
                    let t = a[(k, c)];
                    a[(r, c)] -= f * t;
                }
            }
        }
        det
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<Self, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare(self.rows, self.cols));
        }
        let n = self.rows;
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[(i, k)].norm().total_cmp(&a[(j, k)].norm()))
                .unwrap();
            if a[(p, k)].norm() <= 1e-14 * scale {
                return Err(LinalgError::Singular);
            }
            if p != k {
                for c in 0..n {
                    a.data.swap(k * n + c, p * n + c);
                    inv.data.swap(k * n + c, p * n + c);
                }
            }
            let pivot = a[(k, k)];
            for c in 0..n {
                a[(k, c)] /= pivot;
                inv[(k, c)] /= pivot;
            }
            for r in 0..n {
                if r == k {
                    continue;
                }
                let f = a[(r, k)];
                if f.norm() == 0.0 {
                    continue;
                }
                for c in 0..n {
                    let (t, u) = (a[(k, c)], inv[(k, c)]);
                    a[(r, c)] -= f * t;
                    inv[(r, c)] -= f * u;
                }
            }
        }
        Ok(inv)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square()
            && self
                .adjoint()
                .mul(self)
                .map(|p| p.sub(&Self::identity(self.rows)).unwrap().max_abs() <= tol)
                .unwrap_or(false)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.sub(&self.adjoint()).unwrap().max_abs() <= tol * self.max_abs().max(1.0)
    }

    /// Hermitian with all eigenvalues above `tol` times the largest one.
    pub fn is_positive_definite(&self, tol: f64) -> bool {
        if !self.is_hermitian(tol) {
            return false;
        }
        match normal_eigen(self) {
            Ok((vals, _)) => {
                let top = vals.iter().map(|z| z.re).fold(0.0, f64::max);
                top > 0.0 && vals.iter().all(|z| z.re > tol * top)
            }
            Err(_) => false,
        }
    }
}

/// Matrix product with dimension checking.
pub fn mat_mul(a: &CMatrix, b: &CMatrix) -> Result<CMatrix, LinalgError> {
    a.mul(b)
}

/// Entrywise comparison: the largest modulus difference must not exceed
/// `tol · max(1, |a|_max, |b|_max)`.
pub fn mat_eq(a: &CMatrix, b: &CMatrix, tol: f64) -> Result<bool, LinalgError> {
    let d = a.sub(b)?;
    let scale = a.max_abs().max(b.max_abs()).max(1.0);
    Ok(d.max_abs() <= tol * scale)
}

pub fn det(m: &CMatrix) -> C64 {
    m.det()
}

/// Singular value decomposition `m = u · diag(sigma) · v†` of a square matrix.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    pub sigma: Vec<f64>,
    pub v: CMatrix,
}

/// One-sided Jacobi SVD of a square matrix.
pub fn svd(m: &CMatrix) -> Result<Svd, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare(m.rows, m.cols));
    }
    let n = m.rows;
    let mut a = m.clone();
    let mut v = CMatrix::identity(n);
    for _sweep in 0..80 {
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, C64::new(0.0, 0.0));
                for r in 0..n {
                    let (x, y) = (a[(r, i)], a[(r, j)]);
                    alpha += x.norm_sqr();
                    beta += y.norm_sqr();
                    gamma += x.conj() * y;
                }
                let g = gamma.norm();
                if g == 0.0 || g <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta == 0.0 {
                    1.0
                } else {
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let e = gamma / g;
                let rotate = |mat: &mut CMatrix| {
                    for r in 0..n {
                        let (x, y) = (mat[(r, i)], mat[(r, j)]);
                        mat[(r, i)] = x * c - y * e.conj() * s;
                        mat[(r, j)] = x * e * s + y * c;
                    }
                };
                rotate(&mut a);
                rotate(&mut v);
            }
        }
        if !rotated {
            break;
        }
    }
    let sigma: Vec<f64> = (0..n)
        .map(|c| (0..n).map(|r| a[(r, c)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let top = sigma.iter().cloned().fold(0.0, f64::max);
    let mut u = CMatrix::zeros(n, n);
    let mut filled = vec![false; n];
    for c in 0..n {
        if sigma[c] > 1e-300 && sigma[c] > 1e-15 * top {
            for r in 0..n {
                u[(r, c)] = a[(r, c)] / sigma[c];
            }
            filled[c] = true;
        }
    }
    complete_orthonormal(&mut u, &filled);
    Ok(Svd { u, sigma, v })
}

/// Fills the unmarked columns of `u` with an orthonormal completion.
fn complete_orthonormal(u: &mut CMatrix, filled: &[bool]) {
    let n = u.rows;
    let mut candidate = 0;
    for c in 0..n {
        if filled[c] {
            continue;
        }
        loop {
            let mut col: Vec<C64> = (0..n)
                .map(|r| C64::new(if r == candidate { 1.0 } else { 0.0 }, 0.0))
                .collect();
            candidate += 1;
            for k in 0..n {
                if !(filled[k] || k < c) {
                    continue;
                }
                let dot: C64 = (0..n).map(|r| u[(r, k)].conj() * col[r]).sum();
                for (r, x) in col.iter_mut().enumerate() {
                    *x -= dot * u[(r, k)];
                }
            }
            let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-8 {
                for (r, x) in col.into_iter().enumerate() {
                    u[(r, c)] = x / norm;
                }
                break;
            }
        }
    }
}

/// True iff the smallest singular value exceeds `tol` times the largest.
pub fn is_invertible(m: &CMatrix, tol: f64) -> bool {
    if !m.is_square() {
        return false;
    }
    if m.rows == 0 {
        return true;
    }
    match svd(m) {
        Ok(s) => {
            let top = s.sigma.iter().cloned().fold(0.0, f64::max);
            let low = s.sigma.iter().cloned().fold(f64::INFINITY, f64::min);
            top > 0.0 && low > tol * top
        }
        Err(_) => false,
    }
}

/// Polar factors `m = q_factor · s_factor`.
#[derive(Debug, Clone)]
pub struct PolarFactors {
    pub q_factor: CMatrix,
    pub s_factor: CMatrix,
}

/// Polar decomposition of an invertible matrix through its SVD.
pub fn polar(m: &CMatrix) -> Result<PolarFactors, LinalgError> {
    if !is_invertible(m, DEFAULT_TOL) {
        return Err(LinalgError::Singular);
    }
    let Svd { u, sigma, v } = svd(m)?;
    let vh = v.adjoint();
    let q_factor = u.mul(&vh)?;
    let sd: Vec<C64> = sigma.iter().map(|&s| C64::new(s, 0.0)).collect();
    let s = v.mul(&CMatrix::diag(&sd))?.mul(&vh)?;
    let s_factor = s.add(&s.adjoint())?.scale(C64::new(0.5, 0.0));
    Ok(PolarFactors { q_factor, s_factor })
}

/// Complex Householder QR: returns `(q, r)` with `m = q · r`.
pub fn qr(m: &CMatrix) -> (CMatrix, CMatrix) {
    let (rows, cols) = (m.rows, m.cols);
    let mut r = m.clone();
    let mut q = CMatrix::identity(rows);
    for k in 0..rows.min(cols) {
        let norm = (k..rows).map(|i| r[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = r[(k, k)];
        let phase = if x0.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;
        let mut v: Vec<C64> = (k..rows).map(|i| r[(i, k)]).collect();
        v[0] -= alpha;
        let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vn == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vn;
        }
        for c in 0..cols {
            let dot: C64 = (k..rows).map(|i| v[i - k].conj() * r[(i, c)]).sum();
            for i in k..rows {
                r[(i, c)] -= v[i - k] * dot * 2.0;
            }
        }
        for i in 0..rows {
            let dot: C64 = (k..rows).map(|j| q[(i, j)] * v[j - k]).sum();
            for j in k..rows {
                q[(i, j)] -= dot * v[j - k].conj() * 2.0;
            }
        }
    }
    (q, r)
}

/// Eigen-decomposition of a normal matrix by the shifted QR algorithm:
/// returns eigenvalues and a unitary matrix whose columns are eigenvectors.
pub fn normal_eigen(m: &CMatrix) -> Result<(Vec<C64>, CMatrix), LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare(m.rows, m.cols));
    }
    let n = m.rows;
    let scale = m.frobenius().max(f64::MIN_POSITIVE);
    let mut t = m.clone();
    let mut z = CMatrix::identity(n);
    let mut hi = n;
    let mut stalled = 0usize;
    let mut total = 0usize;
    while hi > 1 {
        let off = (0..hi - 1).map(|j| t[(hi - 1, j)].norm_sqr()).sum::<f64>().sqrt();
        if off <= 1e-15 * scale {
            for j in 0..hi - 1 {
                t[(hi - 1, j)] = C64::new(0.0, 0.0);
            }
            hi -= 1;
            stalled = 0;
            continue;
        }
        total += 1;
        stalled += 1;
        if total > 5000 {
            return Err(LinalgError::NumericFailure("QR iteration did not converge".into()));
        }
        let (a, b, c, d) = (
            t[(hi - 2, hi - 2)],
            t[(hi - 2, hi - 1)],
            t[(hi - 1, hi - 2)],
            t[(hi - 1, hi - 1)],
        );
        let mut mu = wilkinson_shift(a, b, c, d);
        if stalled % 12 == 11 {
            mu = d + C64::new(off * 0.75, off * 0.31);
        }
        let mut block = CMatrix::zeros(hi, hi);
        for i in 0..hi {
            for j in 0..hi {
                block[(i, j)] = t[(i, j)];
            }
            block[(i, i)] -= mu;
        }
        let (q, r) = qr(&block);
        let mut next = r.mul(&q)?;
        for i in 0..hi {
            next[(i, i)] += mu;
        }
        let qh = q.adjoint();
        let mut updated = t.clone();
        for i in 0..hi {
            for j in 0..hi {
                updated[(i, j)] = next[(i, j)];
            }
            for j in hi..n {
                updated[(i, j)] = (0..hi).map(|k| qh[(i, k)] * t[(k, j)]).sum();
            }
        }
        for i in hi..n {
            for j in 0..hi {
                updated[(i, j)] = (0..hi).map(|k| t[(i, k)] * q[(k, j)]).sum();
            }
        }
        t = updated;
        let mut zn = z.clone();
        for i in 0..n {
            for j in 0..hi {
                zn[(i, j)] = (0..hi).map(|k| z[(i, k)] * q[(k, j)]).sum();
            }
        }
        z = zn;
    }
    let vals: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
    let recon = z.mul(&CMatrix::diag(&vals))?.mul(&z.adjoint())?;
    if recon.sub(m)?.max_abs() > 1e-9 * scale {
        return Err(LinalgError::NumericFailure("matrix is not normal".into()));
    }
    Ok((vals, z))
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr * 0.25 - det).sqrt();
    let l1 = tr * 0.5 + disc;
    let l2 = tr * 0.5 - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// A principal root together with a flag telling whether an eigenvalue on
/// the negative real axis forced a deterministic choice of branch.
#[derive(Debug, Clone)]
pub struct RootResult {
    pub root: CMatrix,
    pub branch_shifted: bool,
}

/// Principal `k`-th root of a unitary or Hermitian positive definite matrix.
pub fn principal_root(m: &CMatrix, k: u32) -> Result<CMatrix, LinalgError> {
    principal_root_detailed(m, k).map(|r| r.root)
}

pub fn principal_root_detailed(m: &CMatrix, k: u32) -> Result<RootResult, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare(m.rows, m.cols));
    }
    if k == 0 {
        return Err(LinalgError::NumericFailure("zeroth root".into()));
    }
    if !is_invertible(m, DEFAULT_TOL) {
        return Err(LinalgError::Singular);
    }
    let kf = f64::from(k);
    let mut branch_shifted = false;
    let root = if m.is_unitary(1e-9) {
        let (vals, z) = normal_eigen(m)?;
        let roots: Vec<C64> = vals
            .iter()
            .map(|l| {
                let mut theta = l.arg();
                if theta < -std::f64::consts::PI + 1e-12 {
                    theta = std::f64::consts::PI;
                    branch_shifted = true;
                }
                C64::from_polar(1.0, theta / kf)
            })
            .collect();
        z.mul(&CMatrix::diag(&roots))?.mul(&z.adjoint())?
    } else if m.is_positive_definite(1e-12) {
        let (vals, z) = normal_eigen(m)?;
        let roots: Vec<C64> = vals.iter().map(|l| C64::new(l.re.powf(1.0 / kf), 0.0)).collect();
        let r = z.mul(&CMatrix::diag(&roots))?.mul(&z.adjoint())?;
        r.add(&r.adjoint())?.scale(C64::new(0.5, 0.0))
    } else {
        return Err(LinalgError::UnsupportedClass);
    };
    if !mat_eq(&root.pow(k), m, ROOT_TOL)? {
        return Err(LinalgError::NumericFailure("root does not reproduce its input".into()));
    }
    Ok(RootResult { root, branch_shifted })
}

/// Complex Gaussian matrix with independent standard normal real and
/// imaginary parts scaled by 1/√2.
pub fn random_gaussian<R: Rng + ?Sized>(q: usize, rng: &mut R) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let data = (0..q * q)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C64::new(re * s, im * s)
        })
        .collect();
    CMatrix { rows: q, cols: q, data }
}

/// Haar-distributed unitary drawn from an explicit generator.
pub fn random_unitary_with<R: Rng + ?Sized>(q: usize, rng: &mut R) -> CMatrix {
    let g = random_gaussian(q, rng);
    let (mut qm, r) = qr(&g);
    for c in 0..q {
        let d = r[(c, c)];
        let ph = if d.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            d / d.norm()
        };
        for row in 0..q {
            qm[(row, c)] *= ph;
        }
    }
    qm
}

/// Haar-distributed unitary, deterministic per seed.
pub fn random_unitary(q: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_unitary_with(q, &mut rng)
}

/// The Pauli matrices used by the commutation demo and several tests.
pub fn pauli_x() -> CMatrix {
    CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn identity_is_neutral_for_product() {
        let m = random_gaussian(3, &mut rng(1));
        let p = CMatrix::identity(3).mul(&m).unwrap();
        assert_eq!(p, m);
    }

    #[test]
    fn scalar_product() {
        let p = mat_mul(&CMatrix::scalar(c(2.0, 0.0)), &CMatrix::scalar(c(3.0, 0.0))).unwrap();
        assert_eq!(p[(0, 0)], c(6.0, 0.0));
    }

    #[test]
    fn product_is_associative() {
        let mut r = rng(2);
        let (a, b, d) = (
            random_gaussian(3, &mut r),
            random_gaussian(3, &mut r),
            random_gaussian(3, &mut r),
        );
        let left = a.mul(&b).unwrap().mul(&d).unwrap();
        let right = a.mul(&b.mul(&d).unwrap()).unwrap();
        assert!(left.sub(&right).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn product_rejects_bad_shapes() {
        let e = CMatrix::zeros(2, 3).mul(&CMatrix::zeros(2, 3)).unwrap_err();
        assert!(matches!(e, LinalgError::DimensionMismatch { .. }));
    }

    #[test]
    fn mat_eq_reflexive_and_sensitive() {
        let m = random_gaussian(2, &mut rng(3));
        assert!(mat_eq(&m, &m, DEFAULT_TOL).unwrap());
        let mut e = CMatrix::zeros(2, 2);
        e[(0, 1)] = c(1e-6, 0.0);
        assert!(!mat_eq(&m, &m.add(&e).unwrap(), DEFAULT_TOL).unwrap());
    }

    #[test]
    fn pauli_x_and_z_anticommute() {
        let (x, z) = (pauli_x(), pauli_z());
        let xz = x.mul(&z).unwrap();
        let zx = z.mul(&x).unwrap();
        // XZ = [[0,-1],[1,0]] computed by hand
        let expected = CMatrix::from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]]);
        assert!(mat_eq(&xz, &expected, 0.0).unwrap());
        assert!(mat_eq(&xz, &zx.scale(c(-1.0, 0.0)), DEFAULT_TOL).unwrap());
    }

    #[test]
    fn determinants() {
        assert_eq!(CMatrix::identity(3).det(), c(1.0, 0.0));
        assert_eq!(CMatrix::diag(&[c(2.0, 0.0), c(3.0, 0.0)]).det(), c(6.0, 0.0));
        let u = random_unitary(4, 7);
        assert!((u.det().norm() - 1.0).abs() < 1e-9);
        // closed form for a 2x2
        let m = CMatrix::from_rows(&[vec![c(1.0, 2.0), c(0.5, 0.0)], vec![c(-1.0, 1.0), c(3.0, -1.0)]]).unwrap();
        let expected = c(1.0, 2.0) * c(3.0, -1.0) - c(0.5, 0.0) * c(-1.0, 1.0);
        assert!((m.det() - expected).norm() < 1e-12);
    }

    #[test]
    fn det_is_multiplicative() {
        let mut r = rng(4);
        for q in 1..=4 {
            let (a, b) = (random_gaussian(q, &mut r), random_gaussian(q, &mut r));
            let lhs = a.mul(&b).unwrap().det();
            let rhs = a.det() * b.det();
            assert!((lhs - rhs).norm() <= 1e-8 * rhs.norm().max(1.0));
        }
    }

    #[test]
    fn invertibility() {
        assert!(is_invertible(&CMatrix::identity(2), DEFAULT_TOL));
        let proj = CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        assert!(!is_invertible(&proj, DEFAULT_TOL));
        let tiny = CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 1e-15]]);
        assert!(!is_invertible(&tiny, DEFAULT_TOL));
        assert_eq!(
            CMatrix::from_real_rows(&[&[0.0, 0.0], &[0.0, 0.0]]).inverse(),
            Err(LinalgError::Singular)
        );
    }

    #[test]
    fn inverse_round_trip() {
        let m = random_gaussian(4, &mut rng(5));
        let p = m.mul(&m.inverse().unwrap()).unwrap();
        assert!(mat_eq(&p, &CMatrix::identity(4), 1e-10).unwrap());
    }

    #[test]
    fn svd_reconstructs() {
        let m = random_gaussian(4, &mut rng(6));
        let s = svd(&m).unwrap();
        let sd: Vec<C64> = s.sigma.iter().map(|&x| c(x, 0.0)).collect();
        let recon = s.u.mul(&CMatrix::diag(&sd)).unwrap().mul(&s.v.adjoint()).unwrap();
        assert!(mat_eq(&recon, &m, 1e-12).unwrap());
        assert!(s.u.is_unitary(1e-12) && s.v.is_unitary(1e-12));
    }

    #[test]
    fn svd_of_singular_matrix_has_unitary_factors() {
        let m = CMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]);
        let s = svd(&m).unwrap();
        assert!(s.u.is_unitary(1e-10));
        let mut sig = s.sigma.clone();
        sig.sort_by(f64::total_cmp);
        assert!(sig[0].abs() < 1e-12 && (sig[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn polar_special_cases() {
        let u = random_unitary(3, 11);
        let p = polar(&u).unwrap();
        assert!(mat_eq(&p.q_factor, &u, 1e-8).unwrap());
        assert!(mat_eq(&p.s_factor, &CMatrix::identity(3), 1e-8).unwrap());

        let g = random_gaussian(3, &mut rng(12));
        let pd = g.mul(&g.adjoint()).unwrap().add(&CMatrix::identity(3)).unwrap();
        let p = polar(&pd).unwrap();
        assert!(mat_eq(&p.q_factor, &CMatrix::identity(3), 1e-8).unwrap());
        assert!(mat_eq(&p.s_factor, &pd, 1e-8).unwrap());

        let p = polar(&CMatrix::scalar(c(-2.0, 0.0))).unwrap();
        assert!((p.q_factor[(0, 0)] - c(-1.0, 0.0)).norm() < 1e-12);
        assert!((p.s_factor[(0, 0)] - c(2.0, 0.0)).norm() < 1e-12);

        assert_eq!(polar(&CMatrix::zeros(2, 2)).unwrap_err(), LinalgError::Singular);
    }

    #[test]
    fn polar_round_trip_many() {
        let mut r = rng(13);
        for i in 0..500 {
            let q = 1 + i % 4;
            let m = random_gaussian(q, &mut r);
            let p = polar(&m).unwrap();
            assert!(mat_eq(&p.q_factor.mul(&p.s_factor).unwrap(), &m, 1e-8).unwrap());
            assert!(p.q_factor.is_unitary(1e-8));
            assert!(p.s_factor.is_hermitian(1e-8));
        }
    }

    #[test]
    fn roots_of_simple_matrices() {
        let r = principal_root(&CMatrix::identity(3), 4).unwrap();
        assert!(mat_eq(&r, &CMatrix::identity(3), 1e-12).unwrap());
        let r = principal_root(&CMatrix::scalar(c(16.0, 0.0)), 4).unwrap();
        assert!((r[(0, 0)] - c(2.0, 0.0)).norm() < 1e-12);
        let r = principal_root(&CMatrix::diag(&[c(4.0, 0.0), c(9.0, 0.0)]), 2).unwrap();
        assert!(mat_eq(&r, &CMatrix::diag(&[c(2.0, 0.0), c(3.0, 0.0)]), 1e-12).unwrap());
        assert!(mat_eq(&r.mul(&r).unwrap(), &CMatrix::diag(&[c(4.0, 0.0), c(9.0, 0.0)]), 1e-12).unwrap());
    }

    #[test]
    fn root_classes() {
        let general = CMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 3.0]]);
        assert_eq!(principal_root(&general, 2).unwrap_err(), LinalgError::UnsupportedClass);
        let proj = CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        assert_eq!(principal_root(&proj, 2).unwrap_err(), LinalgError::Singular);
    }

    #[test]
    fn root_of_minus_identity_takes_shifted_branch() {
        let m = CMatrix::scalar(c(-1.0, -0.0)).scale(c(1.0, 0.0));
        let r = principal_root_detailed(&m, 2).unwrap();
        assert!((r.root[(0, 0)] - c(0.0, 1.0)).norm() < 1e-12);
        let pz = pauli_z();
        let r = principal_root(&pz, 2).unwrap();
        assert!(mat_eq(&r.mul(&r).unwrap(), &pz, 1e-10).unwrap());
    }

    #[test]
    fn root_round_trip_unitary_and_pd() {
        let mut r = rng(14);
        for i in 0..200 {
            let q = 1 + i % 4;
            let k = if i % 2 == 0 { 2 } else { 4 };
            let u = random_unitary_with(q, &mut r);
            let root = principal_root(&u, k).unwrap();
            assert!(mat_eq(&root.pow(k), &u, 1e-8).unwrap());
            let g = random_gaussian(q, &mut r);
            let pd = g
                .mul(&g.adjoint())
                .unwrap()
                .add(&CMatrix::identity(q).scale(c(0.1, 0.0)))
                .unwrap();
            let root = principal_root(&pd, k).unwrap();
            assert!(mat_eq(&root.pow(k), &pd, 1e-8).unwrap());
        }
    }

    #[test]
    fn roots_with_degenerate_spectra() {
        let perm = CMatrix::from_real_rows(&[&[0.0, 1.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0]]);
        let root = principal_root(&perm, 4).unwrap();
        assert!(mat_eq(&root.pow(4), &perm, 1e-8).unwrap());
        let m = CMatrix::diag(&[c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)]);
        let root = principal_root(&m, 4).unwrap();
        assert!(mat_eq(&root.pow(4), &m, 1e-8).unwrap());
    }

    #[test]
    fn random_unitaries() {
        let a = random_unitary(3, 42);
        assert!(a.is_unitary(1e-10));
        assert_eq!(a, random_unitary(3, 42));
        let s = random_unitary(1, 9);
        assert!((s[(0, 0)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normal_eigen_of_hermitian() {
        let g = random_gaussian(4, &mut rng(20));
        let h = g.add(&g.adjoint()).unwrap();
        let (vals, z) = normal_eigen(&h).unwrap();
        assert!(vals.iter().all(|v| v.im.abs() < 1e-10));
        assert!(z.is_unitary(1e-10));
    }
}
