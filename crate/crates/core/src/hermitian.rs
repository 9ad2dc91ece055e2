//! Dense complex linear algebra for small Hermitian matrices.
//!
//! Matrices here are tiny (d ≤ 8 in practice), so everything is a flat
//! row-major `Vec<c64>` and the eigensolver is cyclic Jacobi.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

#[allow(non_camel_case_types)]
pub type c64 = Complex64;

/// Default tolerance for `‖M − M†‖_max`.
pub const HERM_TOL: f64 = 1e-9;
/// Default tolerance on the smallest eigenvalue for positivity checks.
pub const PSD_TOL: f64 = 1e-10;
/// Default null-space cutoff, relative to the largest eigenvalue.
pub const NULL_TOL: f64 = 1e-9;
/// Jacobi stops once the off-diagonal Frobenius mass drops below this
/// (scaled by `max(1, ‖M‖_F)`).
pub const JACOBI_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 100;

const ZERO: c64 = c64 { re: 0.0, im: 0.0 };
const ONE: c64 = c64 { re: 1.0, im: 0.0 };

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<c64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:>10.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// Build from row-major data. Entries must be finite.
    pub fn new(rows: usize, cols: usize, data: Vec<c64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> c64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Build from nested rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<c64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(Error::DimensionMismatch {
                expected: c,
                got: bad.len(),
            });
        }
        Self::new(r, c, rows.iter().flatten().copied().collect())
    }

    /// Build a real matrix from nested rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<c64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| c64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn diag(values: &[c64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// `|v⟩⟨v|`.
    pub fn outer(v: &[c64]) -> Self {
        Self::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[c64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<c64>> {
        self.data.chunks(self.cols).map(<[c64]>::to_vec).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_c(&self, s: c64) -> Self {
        self.map(|z| z * s)
    }

    fn map(&self, f: impl Fn(c64) -> c64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn trace(&self) -> c64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest |Im| of any entry.
    pub fn max_imag(&self) -> f64 {
        self.data.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// `‖U†U − I‖_max`; zero for an exactly unitary matrix.
    pub fn unitarity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (&self.adjoint() * self).max_abs_diff(&Self::identity(self.rows))
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[c64]) -> Vec<c64> {
        assert_eq!(self.cols, v.len());
        self.data
            .chunks(self.cols)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<c64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = c64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &c64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut c64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// A complex d×d matrix that is Hermitian. The stored form is exactly
/// Hermitian: constructors symmetrize `M ← (M + M†)/2`.
#[derive(Clone, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl fmt::Debug for HermitianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hermitian{:?}", self.0)
    }
}

impl HermitianMatrix {
    /// Checks hermiticity against [`HERM_TOL`] and symmetrizes.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_tol(m, HERM_TOL)
    }

    pub fn with_tol(m: ComplexMatrix, herm_tol: f64) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.rows,
                got: m.cols,
            });
        }
        let adj = m.adjoint();
        let defect = m.max_abs_diff(&adj);
        if defect > herm_tol {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self::symmetrized(&m, &adj))
    }

    fn symmetrized(m: &ComplexMatrix, adj: &ComplexMatrix) -> Self {
        let mut s = (m + adj).scale(0.5);
        for i in 0..s.rows {
            s[(i, i)].im = 0.0;
        }
        Self(s)
    }

    /// `(M + M†)/2` without a tolerance check.
    pub fn hermitian_part(m: &ComplexMatrix) -> Self {
        assert!(m.is_square());
        Self::symmetrized(m, &m.adjoint())
    }

    pub fn zeros(d: usize) -> Self {
        Self(ComplexMatrix::zeros(d, d))
    }

    pub fn identity(d: usize) -> Self {
        Self(ComplexMatrix::identity(d))
    }

    pub fn diag(values: &[f64]) -> Self {
        let v: Vec<c64> = values.iter().map(|&x| c64::new(x, 0.0)).collect();
        Self(ComplexMatrix::diag(&v))
    }

    /// `|v⟩⟨v|`; a projector when `v` has unit norm.
    pub fn projector(v: &[c64]) -> Self {
        Self::hermitian_part(&ComplexMatrix::outer(v))
    }

    /// `|v⟩⟨v|` for a real vector.
    pub fn real_projector(v: &[f64]) -> Self {
        let v: Vec<c64> = v.iter().map(|&x| c64::new(x, 0.0)).collect();
        Self::projector(&v)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn max_abs(&self) -> f64 {
        self.0.max_abs()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0.max_abs_diff(&other.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale(s))
    }

    /// `U M U†`, Hermitian for any square `U`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Self {
        Self::hermitian_part(&(&(u * &self.0) * &u.adjoint()))
    }

    /// `tr(A B)`, real for Hermitian A, B.
    pub fn trace_inner(&self, other: &Self) -> f64 {
        let n = self.dim();
        assert_eq!(n, other.dim());
        let mut acc = 0.0;
        for i in 0..n {
            for k in 0..n {
                let a = self.0[(i, k)];
                let b = other.0[(k, i)];
                acc += a.re * b.re - a.im * b.im;
            }
        }
        acc
    }

    /// Entrywise real part; a real symmetric matrix.
    pub fn real_part(&self) -> Self {
        Self(self.0.map(|z| c64::new(z.re, 0.0)))
    }

    pub fn max_imag(&self) -> f64 {
        self.0.max_imag()
    }

    pub fn eig(&self) -> Eigen {
        eig_hermitian(self)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eig().values[0]
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        is_psd(self, tol)
    }

    /// Matrix function through the spectral decomposition.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Self {
        self.eig().reassemble(f)
    }

    /// Expectation value `tr(self · ρ)` as a real number.
    pub fn expectation(&self, rho: &Self) -> f64 {
        self.trace_inner(rho)
    }
}

impl Add for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix(&self.0 - &rhs.0)
    }
}

/// Sum of a non-empty list of Hermitian matrices of equal dimension.
pub fn sum_hermitian<'a>(mut it: impl Iterator<Item = &'a HermitianMatrix>, d: usize) -> HermitianMatrix {
    let mut acc = ComplexMatrix::zeros(d, d);
    for m in &mut it {
        acc = &acc + m.as_matrix();
    }
    HermitianMatrix(acc)
}

/// Trace-orthogonal basis of the real space of d×d Hermitian matrices.
///
/// Ordering: `E_kk` for `k = 0..d`, then `X_kl`, then `Y_kl`, each over
/// `k > l` in lexicographic `(k, l)` order.
#[derive(Debug, Clone)]
pub struct HermitianBasis {
    dim: usize,
    elements: Vec<HermitianMatrix>,
}

impl HermitianBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[HermitianMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `Σ c_a B_a`.
    pub fn reconstruct(&self, coords: &[f64]) -> Result<HermitianMatrix> {
        if coords.len() != self.elements.len() {
            return Err(Error::DimensionMismatch {
                expected: self.elements.len(),
                got: coords.len(),
            });
        }
        let mut acc = ComplexMatrix::zeros(self.dim, self.dim);
        for (c, b) in coords.iter().zip(&self.elements) {
            acc = &acc + &b.0.scale(*c);
        }
        Ok(HermitianMatrix(acc))
    }
}

/// Strictly lower-triangular index pairs `(k, l)`, `k > l`, lexicographic.
pub fn offdiag_pairs(d: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..d).flat_map(|k| (0..k).map(move |l| (k, l)))
}

pub fn hermitian_basis(d: usize) -> Result<HermitianBasis> {
    if d == 0 {
        return Err(Error::InvalidDimension(d));
    }
    let mut elements = Vec::with_capacity(d * d);
    for k in 0..d {
        let mut m = ComplexMatrix::zeros(d, d);
        m[(k, k)] = ONE;
        elements.push(HermitianMatrix(m));
    }
    for (k, l) in offdiag_pairs(d) {
        let mut m = ComplexMatrix::zeros(d, d);
        m[(k, l)] = ONE;
        m[(l, k)] = ONE;
        elements.push(HermitianMatrix(m));
    }
    let i = c64::new(0.0, 1.0);
    for (k, l) in offdiag_pairs(d) {
        let mut m = ComplexMatrix::zeros(d, d);
        m[(k, l)] = i;
        m[(l, k)] = -i;
        elements.push(HermitianMatrix(m));
    }
    Ok(HermitianBasis { dim: d, elements })
}

/// Coordinates of `m` in [`hermitian_basis`] order.
pub fn coords(m: &HermitianMatrix) -> Vec<f64> {
    let d = m.dim();
    let mut out = Vec::with_capacity(d * d);
    out.extend((0..d).map(|k| m.0[(k, k)].re));
    out.extend(offdiag_pairs(d).map(|(k, l)| m.0[(k, l)].re));
    out.extend(offdiag_pairs(d).map(|(k, l)| m.0[(k, l)].im));
    out
}

/// Coordinates of a general square matrix, rejecting non-Hermitian input.
pub fn coords_checked(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(coords(&HermitianMatrix::new(m.clone())?))
}

/// Eigendecomposition `M = V diag(values) V†` with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigen {
    pub fn reassemble(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = v[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vi * v[(j, k)].conj();
                }
            }
        }
        HermitianMatrix::hermitian_part(&out)
    }

    pub fn vector(&self, k: usize) -> Vec<c64> {
        self.vectors.column(k)
    }
}

/// Cyclic Jacobi eigensolver for Hermitian matrices.
///
/// Each rotation first removes the phase of the pivot `a_pq` with a diagonal
/// unitary, then applies the real symmetric Jacobi rotation.
pub fn eig_hermitian(m: &HermitianMatrix) -> Eigen {
    let n = m.dim();
    let mut a = m.0.clone();
    let mut v = ComplexMatrix::identity(n);
    let tol = JACOBI_TOL * a.frobenius_norm().max(1.0);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = offdiag_pairs(n).map(|(k, l)| 2.0 * a[(k, l)].norm_sqr()).sum::<f64>().sqrt();
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r < f64::MIN_POSITIVE {
                    continue;
                }
                let phase_conj = apq.conj() / r;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // V = diag(1, e^{-iθ}) · [[c, s], [-s, c]] on the (p, q) block.
                let vpp = c64::new(c, 0.0);
                let vpq = c64::new(s, 0.0);
                let vqp = phase_conj * (-s);
                let vqq = phase_conj * c;
                rotate_columns(&mut a, p, q, vpp, vpq, vqp, vqq);
                rotate_rows(&mut a, p, q, vpp, vpq, vqp, vqq);
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
                rotate_columns(&mut v, p, q, vpp, vpq, vqp, vqq);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Eigen { values, vectors }
}

#[allow(clippy::too_many_arguments)]
fn rotate_columns(m: &mut ComplexMatrix, p: usize, q: usize, vpp: c64, vpq: c64, vqp: c64, vqq: c64) {
    for k in 0..m.rows {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = mkp * vpp + mkq * vqp;
        m[(k, q)] = mkp * vpq + mkq * vqq;
    }
}

#[allow(clippy::too_many_arguments)]
fn rotate_rows(m: &mut ComplexMatrix, p: usize, q: usize, vpp: c64, vpq: c64, vqp: c64, vqq: c64) {
    for k in 0..m.cols {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = vpp.conj() * mpk + vqp.conj() * mqk;
        m[(q, k)] = vpq.conj() * mpk + vqq.conj() * mqk;
    }
}

/// True iff the smallest eigenvalue is at least `-tol`.
pub fn is_psd(m: &HermitianMatrix, tol: f64) -> bool {
    m.min_eigenvalue() >= -tol
}

/// Pseudo-inverse square root on the support: eigenvalues above
/// `null_tol · λ_max` map to `λ^{-1/2}`, the rest to zero.
pub fn inv_sqrt_psd(m: &HermitianMatrix, null_tol: f64) -> Result<HermitianMatrix> {
    let eig = m.eig();
    let lam_max = eig.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let lam_min = eig.values[0];
    if lam_min < -PSD_TOL * lam_max.max(1.0) {
        return Err(Error::NotPositive(lam_min));
    }
    let cutoff = null_tol * lam_max;
    Ok(eig.reassemble(|lam| if lam > cutoff { lam.powf(-0.5) } else { 0.0 }))
}

/// Orthogonal projector onto the range of a PSD matrix.
pub fn support_projector(m: &HermitianMatrix, null_tol: f64) -> HermitianMatrix {
    let eig = m.eig();
    let lam_max = eig.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let cutoff = null_tol * lam_max;
    eig.reassemble(|lam| if lam > cutoff { 1.0 } else { 0.0 })
}

/// Number of eigenvalues above `null_tol · λ_max`.
pub fn numeric_rank_hermitian(m: &HermitianMatrix, null_tol: f64) -> usize {
    let eig = m.eig();
    let lam_max = eig.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if lam_max == 0.0 {
        return 0;
    }
    eig.values.iter().filter(|v| v.abs() > null_tol * lam_max).count()
}
