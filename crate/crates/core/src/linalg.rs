//! Dense complex-matrix kernel.
//!
//! Everything here works on small row-major matrices (a few hundred rows at
//! most). Composite systems index their basis with the first subsystem as the
//! most significant digit, so `|abc>` with qubits maps to `4a + 2b + c`.
//!
//! Entropies and relative entropies are in bits.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Entrywise tolerance for Hermiticity of a density matrix.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Tolerance on `|tr(rho) - 1|`.
pub const TRACE_TOL: f64 = 1e-12;
/// Smallest eigenvalue still accepted as round-off of a PSD matrix.
pub const PSD_TOL: f64 = 1e-10;
/// Eigenvalues at or below this belong to the kernel when deciding support.
pub const SUPPORT_TOL: f64 = 1e-12;
/// Hermiticity precondition of [`hermitian_eig`].
pub const EIG_INPUT_TOL: f64 = 1e-10;

const JACOBI_MAX_SWEEPS: usize = 100;

#[inline]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub(crate) fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Dense complex matrix, row-major.
///
/// Most matrices are square, but Kraus operators between spaces of
/// different dimension and isometries are rectangular.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = re(1.0);
        }
        m
    }

    /// Builds a matrix from row-major data.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
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

    /// Square matrix from real row-major entries.
    pub fn from_real(n: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(n, n, data.iter().map(|&x| re(x)).collect())
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != cols) {
            return Err(Error::DimensionMismatch {
                expected: cols,
                got: bad.len(),
            });
        }
        Self::from_vec(r, cols, rows.concat())
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = re(v);
        }
        m
    }

    /// `|v><v|` for a column vector `v`.
    pub fn outer(v: &[C64]) -> Self {
        let n = v.len();
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
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

    /// Side length of a square matrix.
    pub fn dim(&self) -> usize {
        debug_assert!(self.is_square());
        self.rows
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    pub fn scale(&self, k: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * k).collect(),
        }
    }

    pub fn scale_real(&self, k: f64) -> Self {
        self.scale(re(k))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `A - A†`.
    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `(A + A†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let mut m = self.clone();
        for i in 0..self.rows {
            for j in i..self.cols {
                let avg = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
                m[(i, j)] = avg;
                m[(j, i)] = avg.conj();
            }
        }
        m
    }

    /// Largest entrywise deviation of `U†U` from the identity.
    pub fn isometry_error(&self) -> f64 {
        let g = &self.adjoint() * self;
        g.max_abs_diff(&Self::identity(self.cols))
    }

    /// `U · self · U†`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Self {
        &(u * self) * &u.adjoint()
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
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

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Tensor product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac, br, bc) = (a.rows, a.cols, b.rows, b.cols);
    let mut out = ComplexMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Tensor product of two kets.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect()
}

/// Hermitian, PSD, unit-trace matrix together with its subsystem layout.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows,
                cols: matrix.cols,
            });
        }
        check_dims(&dims, matrix.rows)?;
        let herm = matrix.hermiticity_error();
        if herm > HERMITIAN_TOL {
            return Err(Error::NotHermitian(herm));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidTrace(tr.re));
        }
        let spectrum = hermitian_eig(&matrix)?;
        let min = spectrum.min();
        if min < -PSD_TOL {
            return Err(Error::NotPsd(min));
        }
        Ok(Self { matrix, dims })
    }

    /// Pure state `|ψ><ψ|`; the ket is normalized first.
    pub fn from_ket(ket: &[C64], dims: Vec<usize>) -> Result<Self> {
        let norm = ket.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(crate::error::invalid("zero or non-finite ket"));
        }
        let normalized: Vec<C64> = ket.iter().map(|z| z / norm).collect();
        Self::new(ComplexMatrix::outer(&normalized), dims)
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let n: usize = dims.iter().product();
        Self::new(ComplexMatrix::identity(n).scale_real(1.0 / n as f64), dims)
    }

    /// Renormalizes a PSD matrix to unit trace and symmetrizes it before
    /// validation.
    pub fn normalized(matrix: &ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        let tr = matrix.trace().re;
        if tr <= 0.0 || !tr.is_finite() {
            return Err(Error::InvalidTrace(tr));
        }
        Self::new(matrix.hermitian_part().scale_real(1.0 / tr), dims)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn spectrum(&self) -> EigenSpectrum {
        hermitian_eig(&self.matrix).expect("density matrix is Hermitian")
    }

    /// `<ψ|ρ|ψ>` for a normalized ket.
    pub fn fidelity_with_ket(&self, ket: &[C64]) -> f64 {
        let rv = self.matrix.mul_vec(ket);
        ket.iter().zip(&rv).map(|(a, b)| a.conj() * b).sum::<C64>().re
    }
}

impl fmt::Display for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} dims={:?}", self.matrix, self.dims)
    }
}

fn check_dims(dims: &[usize], dim: usize) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) || dims.iter().product::<usize>() != dim {
        return Err(Error::BadSubsystems {
            dims: dims.to_vec(),
            dim,
        });
    }
    Ok(())
}

/// Splits a flat index into per-subsystem digits.
fn digits(mut idx: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = idx % dims[k];
        idx /= dims[k];
    }
}

fn compose(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&d, &n)| acc * n + d)
}

/// Reduced state on the subsystems in `keep`; the result lists them in
/// ascending order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(crate::error::invalid("partial trace needs at least one kept subsystem"));
    }
    let reduced = partial_trace_matrix(rho.matrix(), rho.dims(), keep)?;
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    let kept_dims = kept.iter().map(|&k| rho.dims()[k]).collect();
    DensityMatrix::new(reduced.hermitian_part(), kept_dims)
}

/// Trace over every subsystem except `keep`, returned as a plain matrix.
/// Works on any square operator with the given layout; an empty `keep`
/// yields the 1x1 scalar trace.
pub fn partial_trace_matrix(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    check_dims(dims, m.rows)?;
    let n = dims.len();
    let kept: Vec<usize> = {
        let mut k = keep.to_vec();
        k.sort_unstable();
        k.dedup();
        k
    };
    if let Some(&bad) = kept.iter().find(|&&k| k >= n) {
        return Err(Error::InvalidSubsystem { index: bad, count: n });
    }
    let traced: Vec<usize> = (0..n).filter(|k| !kept.contains(k)).collect();
    let kept_dims: Vec<usize> = kept.iter().map(|&k| dims[k]).collect();
    let kd: usize = kept_dims.iter().product();
    let mut out = ComplexMatrix::zeros(kd, kd);
    let mut di = vec![0; n];
    let mut dj = vec![0; n];
    let mut ki = vec![0; kept.len()];
    let mut kj = vec![0; kept.len()];
    for i in 0..m.rows {
        digits(i, dims, &mut di);
        for j in 0..m.rows {
            digits(j, dims, &mut dj);
            if traced.iter().any(|&t| di[t] != dj[t]) {
                continue;
            }
            for (slot, &k) in kept.iter().enumerate() {
                ki[slot] = di[k];
                kj[slot] = dj[k];
            }
            out[(compose(&ki, &kept_dims), compose(&kj, &kept_dims))] += m[(i, j)];
        }
    }
    Ok(out)
}

/// Transpose of one subsystem's indices.
pub fn partial_transpose(rho: &DensityMatrix, subsystem: usize) -> Result<ComplexMatrix> {
    partial_transpose_matrix(rho.matrix(), rho.dims(), subsystem)
}

pub fn partial_transpose_matrix(
    m: &ComplexMatrix,
    dims: &[usize],
    subsystem: usize,
) -> Result<ComplexMatrix> {
    check_dims(dims, m.rows)?;
    let n = dims.len();
    if subsystem >= n {
        return Err(Error::InvalidSubsystem {
            index: subsystem,
            count: n,
        });
    }
    let total = m.rows;
    let mut out = ComplexMatrix::zeros(total, total);
    let mut di = vec![0; n];
    let mut dj = vec![0; n];
    for i in 0..total {
        digits(i, dims, &mut di);
        for j in 0..total {
            digits(j, dims, &mut dj);
            std::mem::swap(&mut di[subsystem], &mut dj[subsystem]);
            out[(compose(&di, dims), compose(&dj, dims))] = m[(i, j)];
            std::mem::swap(&mut di[subsystem], &mut dj[subsystem]);
        }
    }
    Ok(out)
}

/// Eigenvalues in descending order with matching orthonormal eigenvector
/// columns.
#[derive(Clone, Debug)]
pub struct EigenSpectrum {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenSpectrum {
    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// `V Λ V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.vectors.rows();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            for i in 0..n {
                let vik = self.vectors[(i, k)] * lam;
                for j in 0..n {
                    out[(i, j)] += vik * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }

    /// Applies `f` to each eigenvalue: `V f(Λ) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        Self {
            values: self.values.iter().map(|&v| f(v)).collect(),
            vectors: self.vectors.clone(),
        }
        .reconstruct()
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<EigenSpectrum> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    let herm = a.hermiticity_error();
    if herm > EIG_INPUT_TOL {
        return Err(Error::NotHermitian(herm));
    }
    let n = a.rows;
    let mut m = a.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);

    let mut converged = n <= 1;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence(JACOBI_MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].re.total_cmp(&m[(i, i)].re));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, new_col)] = v[(i, old_col)];
        }
    }
    Ok(EigenSpectrum { values, vectors })
}

/// One Jacobi rotation zeroing `m[p][q]`, applied as `m ← J†mJ`, `v ← vJ`.
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let g = apq.norm();
    if g < 1e-300 {
        return;
    }
    let phase = apq / g;
    let (app, aqq) = (m[(p, p)].re, m[(q, q)].re);
    let tau = (aqq - app) / (2.0 * g);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let cs = 1.0 / (1.0 + t * t).sqrt();
    let sn = t * cs;
    // J = [[c, s e^{iφ}], [-s e^{-iφ}, c]] on the (p, q) plane.
    let jpq = phase * sn;
    let jqp = -phase.conj() * sn;
    let n = m.rows();

    for k in 0..n {
        let (akp, akq) = (m[(k, p)], m[(k, q)]);
        m[(k, p)] = akp * cs + akq * jqp;
        m[(k, q)] = akp * jpq + akq * cs;
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * cs + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * cs;
    }
    for k in 0..n {
        let (apk, aqk) = (m[(p, k)], m[(q, k)]);
        m[(p, k)] = apk * cs + aqk * jqp.conj();
        m[(q, k)] = apk * jpq.conj() + aqk * cs;
    }
    m[(p, q)] = re(0.0);
    m[(q, p)] = re(0.0);
    m[(p, p)] = re(m[(p, p)].re);
    m[(q, q)] = re(m[(q, q)].re);
}

/// Clamps round-off negatives in `[-PSD_TOL, 0)` to zero.
pub fn clip_spectrum(values: &[f64]) -> Result<Vec<f64>> {
    values
        .iter()
        .map(|&v| {
            if v < -PSD_TOL {
                Err(Error::NotPsd(v))
            } else {
                Ok(v.max(0.0))
            }
        })
        .collect()
}

/// Shannon entropy of a probability vector in bits, `0 log 0 = 0`.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    -probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.log2())
        .sum::<f64>()
}

/// Binary entropy `h(x)` in bits.
pub fn binary_entropy(x: f64) -> f64 {
    shannon_entropy(&[x, 1.0 - x])
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    let clipped = clip_spectrum(&rho.spectrum().values).expect("density matrix is PSD");
    shannon_entropy(&clipped)
}

/// `D(ρ‖σ)` in bits; `+∞` when the support of ρ is not inside that of σ.
pub fn quantum_relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    Ok(relative_entropy_spectra(&rho.spectrum(), &sigma.spectrum()))
}

/// Relative entropy from precomputed spectra of ρ and σ. The logarithm of σ
/// is taken on its support only.
pub fn relative_entropy_spectra(rho: &EigenSpectrum, sigma: &EigenSpectrum) -> f64 {
    let lam: Vec<f64> = rho.values.iter().map(|&v| v.max(0.0)).collect();
    let mu: Vec<f64> = sigma.values.iter().map(|&v| v.max(0.0)).collect();
    let n = lam.len();
    let neg_entropy: f64 = lam.iter().filter(|&&l| l > 0.0).map(|&l| l * l.log2()).sum();
    let mut cross = 0.0;
    for i in 0..n {
        if lam[i] <= 0.0 {
            continue;
        }
        for j in 0..n {
            let overlap: C64 = (0..n)
                .map(|k| rho.vectors[(k, i)].conj() * sigma.vectors[(k, j)])
                .sum();
            let w = overlap.norm_sqr();
            if mu[j] <= SUPPORT_TOL {
                if lam[i] > SUPPORT_TOL && w > SUPPORT_TOL {
                    return f64::INFINITY;
                }
                continue;
            }
            cross -= lam[i] * w * mu[j].log2();
        }
    }
    (neg_entropy + cross).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_real(2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    fn bell_phi_plus() -> DensityMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        DensityMatrix::from_ket(&[re(h), re(0.0), re(0.0), re(h)], vec![2, 2]).unwrap()
    }

    #[test]
    fn kron_identity_and_dims() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
        let k = kron(&i2, &ComplexMatrix::identity(3));
        assert_eq!((k.rows(), k.cols()), (6, 6));
    }

    #[test]
    fn kron_index_formula() {
        let k = kron(&pauli_x(), &pauli_z());
        assert_eq!(k[(0, 2)], re(1.0));
        assert_eq!(k[(1, 3)], re(-1.0));
        assert_eq!(k[(0, 0)], re(0.0));
    }

    #[test]
    fn partial_trace_of_bell_is_maximally_mixed() {
        let a = partial_trace(&bell_phi_plus(), &[0]).unwrap();
        assert!(a.matrix().max_abs_diff(&ComplexMatrix::diag(&[0.5, 0.5])) < 1e-15);
    }

    #[test]
    fn partial_trace_of_product() {
        let ra = ComplexMatrix::from_vec(2, 2, vec![re(0.7), c(0.1, 0.2), c(0.1, -0.2), re(0.3)]).unwrap();
        let rb = ComplexMatrix::diag(&[0.4, 0.6]);
        let rho = DensityMatrix::new(kron(&ra, &rb), vec![2, 2]).unwrap();
        let out = partial_trace(&rho, &[0]).unwrap();
        assert!(out.matrix().max_abs_diff(&ra) < 1e-15);
        let out_b = partial_trace(&rho, &[1]).unwrap();
        assert!(out_b.matrix().max_abs_diff(&rb) < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_bad_index() {
        assert!(matches!(
            partial_trace(&bell_phi_plus(), &[2]),
            Err(Error::InvalidSubsystem { index: 2, count: 2 })
        ));
        assert!(partial_trace(&bell_phi_plus(), &[]).is_err());
    }

    #[test]
    fn partial_transpose_of_bell_is_negative() {
        let pt = partial_transpose(&bell_phi_plus(), 1).unwrap();
        let spec = hermitian_eig(&pt).unwrap();
        assert_abs_diff_eq!(spec.min(), -0.5, epsilon = 1e-12);
        assert!(partial_transpose(&bell_phi_plus(), 5).is_err());
    }

    #[test]
    fn eig_diagonal_and_symmetric_pair() {
        let spec = hermitian_eig(&ComplexMatrix::diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(spec.values, vec![3.0, 2.0, 1.0]);

        let (a, b) = (0.7, -0.2);
        let m = ComplexMatrix::from_real(2, &[a, b, b, a]).unwrap();
        let spec = hermitian_eig(&m).unwrap();
        assert_abs_diff_eq!(spec.values[0], a - b, epsilon = 1e-14);
        assert_abs_diff_eq!(spec.values[1], a + b, epsilon = 1e-14);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn entropy_basics() {
        assert_abs_diff_eq!(von_neumann_entropy(&bell_phi_plus()), 0.0, epsilon = 1e-12);
        let mixed = DensityMatrix::maximally_mixed(vec![2]).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&mixed), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn relative_entropy_cases() {
        let bell = bell_phi_plus();
        assert_abs_diff_eq!(quantum_relative_entropy(&bell, &bell).unwrap(), 0.0, epsilon = 1e-10);

        let zero = DensityMatrix::new(ComplexMatrix::diag(&[1.0, 0.0]), vec![2]).unwrap();
        let one = DensityMatrix::new(ComplexMatrix::diag(&[0.0, 1.0]), vec![2]).unwrap();
        assert_eq!(quantum_relative_entropy(&zero, &one).unwrap(), f64::INFINITY);

        // -S(bell) + log2 4
        let mixed = DensityMatrix::maximally_mixed(vec![2, 2]).unwrap();
        assert_abs_diff_eq!(quantum_relative_entropy(&bell, &mixed).unwrap(), 2.0, epsilon = 1e-12);

        assert!(matches!(
            quantum_relative_entropy(&bell, &zero),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn density_matrix_validation() {
        assert!(matches!(
            DensityMatrix::new(ComplexMatrix::diag(&[0.5, 0.6]), vec![2]),
            Err(Error::InvalidTrace(_))
        ));
        assert!(matches!(
            DensityMatrix::new(ComplexMatrix::diag(&[1.5, -0.5]), vec![2]),
            Err(Error::NotPsd(_))
        ));
        assert!(matches!(
            DensityMatrix::new(ComplexMatrix::diag(&[0.5, 0.5]), vec![3]),
            Err(Error::BadSubsystems { .. })
        ));
        let skew = ComplexMatrix::from_vec(2, 2, vec![re(0.5), re(0.1), re(0.2), re(0.5)]).unwrap();
        assert!(matches!(DensityMatrix::new(skew, vec![2]), Err(Error::NotHermitian(_))));
        // round-off negatives are tolerated
        assert!(DensityMatrix::new(ComplexMatrix::diag(&[1.0 + 5e-11, -5e-11]), vec![2]).is_ok());
    }
}
