//! Dense complex matrix substrate: Hermitian validation, submatrix
//! extraction/deletion/zeroing, eigenvalues, operator norms, characteristic
//! polynomials, and the small solvers the rest of the crate builds on.
//!
//! Index sets in the public API are 1-based (matching the file formats);
//! internal row/column accessors are 0-based.

use num_complex::Complex64;

use crate::error::{MdpError, Result};
use crate::polynomial::RealPolynomial;
use crate::tol;

/// Dense square complex matrix, row-major. Dimension 0 is allowed internally
/// (it arises from deleting every index) with the usual empty-product
/// conventions; constructors for external data require n ≥ 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        ComplexMatrix { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &d) in entries.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Build from nested rows, validating squareness and finiteness.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(MdpError::InvalidArgument(
                "matrix must have positive dimension".to_string(),
            ));
        }
        let mut data = Vec::with_capacity(n * n);
        for row in &rows {
            if row.len() != n {
                return Err(MdpError::DimensionMismatch { expected: n, got: row.len() });
            }
            for &z in row {
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(MdpError::NonFiniteEntry);
                }
                data.push(z);
            }
        }
        Ok(ComplexMatrix { n, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: Complex64) {
        self.data[i * self.n + j] = z;
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> Complex64 {
        let mut acc = KahanComplex::new();
        for i in 0..self.n {
            acc.add(self.get(i, i));
        }
        acc.value()
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.n, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.n, |i, j| self.get(j, i))
    }

    pub fn conj_entries(&self) -> ComplexMatrix {
        ComplexMatrix { n: self.n, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn add(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, other.n);
        ComplexMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, other.n);
        ComplexMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> ComplexMatrix {
        ComplexMatrix { n: self.n, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> ComplexMatrix {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = KahanComplex::new();
                for l in 0..n {
                    acc.add(self.get(i, l) * other.get(l, j));
                }
                out.set(i, j, acc.value());
            }
        }
        out
    }

    /// Matrix–vector product.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.n, v.len());
        (0..self.n)
            .map(|i| {
                let mut acc = KahanComplex::new();
                for j in 0..self.n {
                    acc.add(self.get(i, j) * v[j]);
                }
                acc.value()
            })
            .collect()
    }

    /// Hermitian and skew parts: A = H + iK with H, K Hermitian.
    pub fn cartesian_parts(&self) -> (ComplexMatrix, ComplexMatrix) {
        let adj = self.adjoint();
        let h = self.add(&adj).scale_real(0.5);
        let k = self.sub(&adj).scale(Complex64::new(0.0, -0.5));
        (h, k)
    }

    /// Kronecker product (self ⊗ other).
    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let (p, q) = (self.n, other.n);
        let mut out = ComplexMatrix::zeros(p * q);
        for i in 0..p {
            for j in 0..p {
                let a = self.get(i, j);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for r in 0..q {
                    for s in 0..q {
                        out.set(i * q + r, j * q + s, a * other.get(r, s));
                    }
                }
            }
        }
        out
    }

    /// Conjugate by the permutation `perm` (new index ↦ old index):
    /// result[i][j] = A[perm[i]][perm[j]].
    pub fn conjugate_by_permutation(&self, perm: &[usize]) -> ComplexMatrix {
        assert_eq!(perm.len(), self.n);
        ComplexMatrix::from_fn(self.n, |i, j| self.get(perm[i], perm[j]))
    }

    /// Rows/columns of `entries` as owned nested vectors (for serialization).
    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }
}

/// Block-diagonal direct sum of square matrices.
pub fn direct_sum(blocks: &[ComplexMatrix]) -> ComplexMatrix {
    let n: usize = blocks.iter().map(|b| b.dim()).sum();
    let mut out = ComplexMatrix::zeros(n);
    let mut off = 0;
    for b in blocks {
        for i in 0..b.dim() {
            for j in 0..b.dim() {
                out.set(off + i, off + j, b.get(i, j));
            }
        }
        off += b.dim();
    }
    out
}

/// Validate a 1-based index set against dimension n; returns sorted 0-based
/// indices. Duplicates are rejected.
pub fn validate_index_set(s: &[usize], n: usize) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(s.len());
    for &i in s {
        if i == 0 || i > n {
            return Err(MdpError::IndexOutOfRange { index: i, n });
        }
        out.push(i - 1);
    }
    out.sort_unstable();
    if out.windows(2).any(|w| w[0] == w[1]) {
        return Err(MdpError::InvalidArgument("index set contains duplicates".to_string()));
    }
    Ok(out)
}

/// Principal submatrix A(S): rows and columns in the 1-based set S, ascending.
pub fn principal_submatrix(a: &ComplexMatrix, s: &[usize]) -> Result<ComplexMatrix> {
    let idx = validate_index_set(s, a.dim())?;
    Ok(submatrix_by_indices0(a, &idx))
}

/// Complementary operation: rows and columns in S removed.
pub fn delete_submatrix(a: &ComplexMatrix, s: &[usize]) -> Result<ComplexMatrix> {
    let idx = validate_index_set(s, a.dim())?;
    let keep: Vec<usize> = (0..a.dim()).filter(|i| !idx.contains(i)).collect();
    Ok(submatrix_by_indices0(a, &keep))
}

/// 0-based ascending-index principal submatrix (no validation).
pub(crate) fn submatrix_by_indices0(a: &ComplexMatrix, idx: &[usize]) -> ComplexMatrix {
    let m = idx.len();
    let mut out = ComplexMatrix::zeros(m);
    for (r, &i) in idx.iter().enumerate() {
        for (c, &j) in idx.iter().enumerate() {
            out.set(r, c, a.get(i, j));
        }
    }
    out
}

/// Same dimension as B, with every entry whose row or column lies in the
/// 1-based set S replaced by zero.
pub fn zero_out_rows_cols(b: &ComplexMatrix, s: &[usize]) -> Result<ComplexMatrix> {
    let idx = validate_index_set(s, b.dim())?;
    let mut hit = vec![false; b.dim()];
    for &i in &idx {
        hit[i] = true;
    }
    Ok(ComplexMatrix::from_fn(b.dim(), |i, j| {
        if hit[i] || hit[j] { Complex64::new(0.0, 0.0) } else { b.get(i, j) }
    }))
}

/// D_t B D_t with D_t = diag(√t, 1, …, 1): scales the first row and column
/// by √t (so the (1,1) entry scales by t).
pub fn scale_first_index(b: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if t < 0.0 || !t.is_finite() {
        return Err(MdpError::InvalidArgument(format!(
            "scale_first_index requires a finite t ≥ 0, got {t}"
        )));
    }
    let r = t.sqrt();
    Ok(ComplexMatrix::from_fn(b.dim(), |i, j| {
        let mut z = b.get(i, j);
        if i == 0 {
            z *= r;
        }
        if j == 0 {
            z *= r;
        }
        z
    }))
}

/// Compensated (Kahan) complex accumulator.
#[derive(Clone, Copy)]
pub(crate) struct KahanComplex {
    sum: Complex64,
    comp: Complex64,
}

impl KahanComplex {
    pub(crate) fn new() -> Self {
        KahanComplex { sum: Complex64::new(0.0, 0.0), comp: Complex64::new(0.0, 0.0) }
    }

    #[inline]
    pub(crate) fn add(&mut self, z: Complex64) {
        let y = z - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub(crate) fn value(&self) -> Complex64 {
        self.sum
    }
}

// ---------------------------------------------------------------------------
// Hermitian wrappers
// ---------------------------------------------------------------------------

/// Complex matrix validated to be Hermitian within a relative tolerance of
/// the largest entry magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    inner: ComplexMatrix,
}

impl HermitianMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_finite() {
            return Err(MdpError::NonFiniteEntry);
        }
        let scale = m.max_abs_entry().max(1.0);
        let mut residual = 0.0f64;
        for i in 0..m.dim() {
            for j in i..m.dim() {
                residual = residual.max((m.get(i, j) - m.get(j, i).conj()).norm());
            }
        }
        let tol = tol::HERMITICITY_TOL * scale;
        if residual > tol {
            return Err(MdpError::NotHermitian { residual, tol });
        }
        Ok(HermitianMatrix { inner: m })
    }

    /// Wrap without validation; for matrices that are Hermitian by
    /// construction (exact symmetrization, principal submatrices, …).
    pub(crate) fn new_unchecked(m: ComplexMatrix) -> Self {
        HermitianMatrix { inner: m }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.inner
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.inner
    }

    /// Exact symmetrization (A + A*)/2 of an already-validated matrix.
    pub fn symmetrized(&self) -> HermitianMatrix {
        let adj = self.inner.adjoint();
        HermitianMatrix::new_unchecked(self.inner.add(&adj).scale_real(0.5))
    }

    pub fn max_abs_diagonal(&self) -> f64 {
        (0..self.dim()).map(|i| self.get(i, i).norm()).fold(0.0, f64::max)
    }
}

impl std::ops::Deref for HermitianMatrix {
    type Target = ComplexMatrix;
    fn deref(&self) -> &ComplexMatrix {
        &self.inner
    }
}

/// Tuple of k Hermitian matrices of common dimension, with verified
/// structural flags.
#[derive(Debug, Clone)]
pub struct HermitianTuple {
    matrices: Vec<HermitianMatrix>,
    n: usize,
    zero_diagonal: bool,
    contraction: bool,
}

impl HermitianTuple {
    pub fn new(matrices: Vec<HermitianMatrix>) -> Result<Self> {
        if matrices.is_empty() {
            return Err(MdpError::InvalidArgument(
                "tuple must contain at least one matrix".to_string(),
            ));
        }
        let n = matrices[0].dim();
        for m in &matrices {
            if m.dim() != n {
                return Err(MdpError::DimensionMismatch { expected: n, got: m.dim() });
            }
        }
        let zero_diagonal = matrices
            .iter()
            .all(|m| m.max_abs_diagonal() <= tol::ZERO_DIAGONAL_TOL);
        let contraction = matrices
            .iter()
            .all(|m| operator_norm(m.matrix()) <= 1.0 + tol::CONTRACTION_TOL);
        Ok(HermitianTuple { matrices, n, zero_diagonal, contraction })
    }

    pub fn from_matrices(ms: Vec<ComplexMatrix>) -> Result<Self> {
        Self::new(ms.into_iter().map(HermitianMatrix::new).collect::<Result<_>>()?)
    }

    pub fn k(&self) -> usize {
        self.matrices.len()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn matrix(&self, i: usize) -> &HermitianMatrix {
        &self.matrices[i]
    }

    pub fn matrices(&self) -> &[HermitianMatrix] {
        &self.matrices
    }

    pub fn zero_diagonal(&self) -> bool {
        self.zero_diagonal
    }

    pub fn contraction(&self) -> bool {
        self.contraction
    }

    pub fn require_zero_diagonal(&self) -> Result<()> {
        if self.zero_diagonal {
            Ok(())
        } else {
            let max_abs = self
                .matrices
                .iter()
                .map(|m| m.max_abs_diagonal())
                .fold(0.0, f64::max);
            Err(MdpError::NonZeroDiagonal { max_abs, tol: tol::ZERO_DIAGONAL_TOL })
        }
    }

    pub fn require_contraction(&self) -> Result<()> {
        if self.contraction {
            Ok(())
        } else {
            let norm = self
                .matrices
                .iter()
                .map(|m| operator_norm(m.matrix()))
                .fold(0.0, f64::max);
            Err(MdpError::NotContraction { norm, tol: tol::CONTRACTION_TOL })
        }
    }

    /// Tuple of principal submatrices on the 0-based ascending index list.
    /// Structural flags survive restriction (interlacing for the norm, entry
    /// selection for the diagonal), so they are carried over.
    #[cfg_attr(not(test), allow(dead_code))]
    pub(crate) fn restrict0(&self, idx: &[usize]) -> HermitianTuple {
        let matrices = self
            .matrices
            .iter()
            .map(|m| HermitianMatrix::new_unchecked(submatrix_by_indices0(m.matrix(), idx)))
            .collect();
        HermitianTuple {
            matrices,
            n: idx.len(),
            zero_diagonal: self.zero_diagonal,
            contraction: self.contraction,
        }
    }

    /// Mean of Tr(Aᵢ²)/n over the tuple — the squared-trace density used by
    /// the analytic shrinkage bounds.
    pub fn mean_square_trace_density(&self) -> f64 {
        let k = self.k() as f64;
        let n = self.n as f64;
        let total: f64 = self
            .matrices
            .iter()
            .map(|m| {
                let mm = m.matrix().matmul(m.matrix());
                mm.trace().re
            })
            .sum();
        total / (n * k)
    }
}

// ---------------------------------------------------------------------------
// Eigenvalues (cyclic complex Jacobi)
// ---------------------------------------------------------------------------

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(a: &HermitianMatrix) -> Vec<f64> {
    jacobi(a.matrix(), false).0
}

/// Eigen-decomposition A·V = V·diag(λ): ascending eigenvalues and a unitary
/// matrix of eigenvectors (columns).
pub fn hermitian_eigen(a: &HermitianMatrix) -> (Vec<f64>, ComplexMatrix) {
    let (vals, vecs) = jacobi(a.matrix(), true);
    (vals, vecs.expect("vectors requested"))
}

/// Cyclic complex Jacobi on a symmetrized working copy. Converges
/// quadratically; sweeps cap at 60 which is far beyond what n ≤ 200 needs.
fn jacobi(a: &ComplexMatrix, want_vectors: bool) -> (Vec<f64>, Option<ComplexMatrix>) {
    let n = a.dim();
    if n == 0 {
        return (Vec::new(), if want_vectors { Some(ComplexMatrix::zeros(0)) } else { None });
    }
    // Exact symmetrization so the sweep sees a perfectly Hermitian matrix.
    let mut h = a.add(&a.adjoint()).scale_real(0.5);
    let mut v = if want_vectors { Some(ComplexMatrix::identity(n)) } else { None };
    let scale = h.max_abs_entry().max(1e-300);
    let stop = 1e-14 * scale;

    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(h.get(p, q).norm());
            }
        }
        if off <= stop {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = h.get(p, q);
                let habs = apq.norm();
                if habs <= stop * 1e-2 {
                    continue;
                }
                let app = h.get(p, p).re;
                let aqq = h.get(q, q).re;
                let phi = apq / habs; // unit-modulus phase of the pivot
                let tau = (aqq - app) / (2.0 * habs);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // G is the identity outside rows/cols p,q with 2×2 block
                // [[c, s], [-conj(phi)·s, conj(phi)·c]]: the diagonal phase
                // that makes the pivot real, followed by the real rotation
                // whose tangent t solves t² + 2τt − 1 = 0. Update H ← G*HG.
                let g_qp = -phi.conj() * s;
                let g_qq = phi.conj() * c;
                for i in 0..n {
                    let hip = h.get(i, p);
                    let hiq = h.get(i, q);
                    h.set(i, p, hip * c + hiq * g_qp);
                    h.set(i, q, hip * s + hiq * g_qq);
                }
                for j in 0..n {
                    let hpj = h.get(p, j);
                    let hqj = h.get(q, j);
                    h.set(p, j, hpj * c - hqj * (phi * s));
                    h.set(q, j, hpj * s + hqj * (phi * c));
                }
                // Pin the analytically-known values to kill rounding drift.
                h.set(p, p, Complex64::new(app - t * habs, 0.0));
                h.set(q, q, Complex64::new(aqq + t * habs, 0.0));
                h.set(p, q, Complex64::new(0.0, 0.0));
                h.set(q, p, Complex64::new(0.0, 0.0));
                if let Some(vm) = v.as_mut() {
                    for i in 0..n {
                        let vip = vm.get(i, p);
                        let viq = vm.get(i, q);
                        vm.set(i, p, vip * c + viq * g_qp);
                        vm.set(i, q, vip * s + viq * g_qq);
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| h.get(i, i).re.total_cmp(&h.get(j, j).re));
    let vals: Vec<f64> = order.iter().map(|&i| h.get(i, i).re).collect();
    let vecs = v.map(|vm| {
        ComplexMatrix::from_fn(n, |i, j| vm.get(i, order[j]))
    });
    (vals, vecs)
}

/// Largest singular value, computed as the top eigenvalue of the Hermitian
/// dilation [[0, A], [A*, 0]].
pub fn operator_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    if n == 0 {
        return 0.0;
    }
    let mut d = ComplexMatrix::zeros(2 * n);
    for i in 0..n {
        for j in 0..n {
            d.set(i, n + j, a.get(i, j));
            d.set(n + i, j, a.get(j, i).conj());
        }
    }
    let (vals, _) = jacobi(&d, false);
    vals.last().copied().unwrap_or(0.0).max(0.0)
}

// ---------------------------------------------------------------------------
// Characteristic polynomial (Faddeev–LeVerrier)
// ---------------------------------------------------------------------------

/// Monic characteristic polynomial det(xI − A) of a Hermitian matrix, by the
/// Faddeev–LeVerrier trace recurrence with compensated accumulation. The
/// 0×0 matrix yields the constant 1. Errors if the coefficients pick up an
/// imaginary residue beyond 1e-9 relative, which signals non-Hermitian input.
pub fn char_poly(a: &ComplexMatrix) -> Result<RealPolynomial> {
    let coeffs = char_poly_complex(a);
    let scale = coeffs.iter().map(|c| c.norm()).fold(1.0, f64::max);
    let residue = coeffs.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    if residue > 1e-9 * scale {
        return Err(MdpError::NotRealRooted {
            detail: format!(
                "characteristic coefficients have imaginary residue {residue:.3e}; input not Hermitian"
            ),
        });
    }
    Ok(RealPolynomial::new(coeffs.into_iter().map(|c| c.re).collect()))
}

/// Ascending complex coefficients of det(xI − A), without the realness check.
pub(crate) fn char_poly_complex(a: &ComplexMatrix) -> Vec<Complex64> {
    let n = a.dim();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    coeffs[n] = Complex64::new(1.0, 0.0);
    if n == 0 {
        return coeffs;
    }
    let mut m = ComplexMatrix::identity(n);
    for j in 1..=n {
        m = a.matmul(&m);
        let c = -m.trace() / j as f64;
        coeffs[n - j] = c;
        for i in 0..n {
            let d = m.get(i, i);
            m.set(i, i, d + c);
        }
    }
    coeffs
}

// ---------------------------------------------------------------------------
// LU decomposition, determinants, linear solves
// ---------------------------------------------------------------------------

/// LU factorization with partial pivoting.
pub struct LuFactors {
    lu: ComplexMatrix,
    perm: Vec<usize>,
    sign: f64,
    min_pivot: f64,
    max_pivot: f64,
}

impl LuFactors {
    pub fn new(a: &ComplexMatrix) -> Self {
        let n = a.dim();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let mut min_pivot = f64::INFINITY;
        let mut max_pivot = 0.0f64;
        for col in 0..n {
            let mut best = col;
            let mut best_mag = lu.get(col, col).norm();
            for r in (col + 1)..n {
                let mag = lu.get(r, col).norm();
                if mag > best_mag {
                    best = r;
                    best_mag = mag;
                }
            }
            if best != col {
                for j in 0..n {
                    let t = lu.get(col, j);
                    lu.set(col, j, lu.get(best, j));
                    lu.set(best, j, t);
                }
                perm.swap(col, best);
                sign = -sign;
            }
            let pivot = lu.get(col, col);
            min_pivot = min_pivot.min(best_mag);
            max_pivot = max_pivot.max(best_mag);
            if best_mag == 0.0 {
                continue; // singular column; factors of the remaining block still form
            }
            for r in (col + 1)..n {
                let factor = lu.get(r, col) / pivot;
                lu.set(r, col, factor);
                for j in (col + 1)..n {
                    let v = lu.get(r, j) - factor * lu.get(col, j);
                    lu.set(r, j, v);
                }
            }
        }
        if n == 0 {
            min_pivot = f64::INFINITY;
        }
        LuFactors { lu, perm, sign, min_pivot, max_pivot }
    }

    pub fn det(&self) -> Complex64 {
        let mut d = Complex64::new(self.sign, 0.0);
        for i in 0..self.lu.dim() {
            d *= self.lu.get(i, i);
        }
        d
    }

    /// Smallest pivot magnitude relative to the largest; ~0 means singular.
    pub fn pivot_ratio(&self) -> f64 {
        if self.lu.dim() == 0 || self.max_pivot == 0.0 {
            return if self.lu.dim() == 0 { 1.0 } else { 0.0 };
        }
        self.min_pivot / self.max_pivot
    }

    /// Solve A x = b.
    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.lu.dim();
        if b.len() != n {
            return Err(MdpError::DimensionMismatch { expected: n, got: b.len() });
        }
        if self.pivot_ratio() < 1e-14 {
            return Err(MdpError::InvalidArgument(format!(
                "linear system numerically singular (pivot ratio {:.3e})",
                self.pivot_ratio()
            )));
        }
        let mut y: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let yj = y[j];
                y[i] -= self.lu.get(i, j) * yj;
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let yj = y[j];
                y[i] -= self.lu.get(i, j) * yj;
            }
            y[i] /= self.lu.get(i, i);
        }
        Ok(y)
    }
}

/// Determinant via LU; the 0×0 matrix gives 1 (empty product).
pub fn det(a: &ComplexMatrix) -> Complex64 {
    let n = a.dim();
    match n {
        0 => Complex64::new(1.0, 0.0),
        1 => a.get(0, 0),
        2 => a.get(0, 0) * a.get(1, 1) - a.get(0, 1) * a.get(1, 0),
        3 => {
            a.get(0, 0) * (a.get(1, 1) * a.get(2, 2) - a.get(1, 2) * a.get(2, 1))
                - a.get(0, 1) * (a.get(1, 0) * a.get(2, 2) - a.get(1, 2) * a.get(2, 0))
                + a.get(0, 2) * (a.get(1, 0) * a.get(2, 1) - a.get(1, 1) * a.get(2, 0))
        }
        _ => LuFactors::new(a).det(),
    }
}

/// Determinant of the principal submatrix on 0-based indices, by direct
/// expansion for sizes ≤ 3 and LU beyond. Hot path for the coefficient
/// engines, so it avoids allocating for the small cases.
pub(crate) fn subset_det(a: &ComplexMatrix, idx: &[usize]) -> Complex64 {
    match idx.len() {
        0 => Complex64::new(1.0, 0.0),
        1 => a.get(idx[0], idx[0]),
        2 => {
            let (i, j) = (idx[0], idx[1]);
            a.get(i, i) * a.get(j, j) - a.get(i, j) * a.get(j, i)
        }
        3 => {
            let (i, j, l) = (idx[0], idx[1], idx[2]);
            a.get(i, i) * (a.get(j, j) * a.get(l, l) - a.get(j, l) * a.get(l, j))
                - a.get(i, j) * (a.get(j, i) * a.get(l, l) - a.get(j, l) * a.get(l, i))
                + a.get(i, l) * (a.get(j, i) * a.get(l, j) - a.get(j, j) * a.get(l, i))
        }
        _ => det(&submatrix_by_indices0(a, idx)),
    }
}

/// Unitary matrix whose first column is the given unit vector, via a single
/// Householder reflection.
pub fn unitary_completing_column(v: &[Complex64]) -> Result<ComplexMatrix> {
    let n = v.len();
    if n == 0 {
        return Err(MdpError::InvalidArgument("empty vector".to_string()));
    }
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(MdpError::InvalidArgument(format!(
            "unitary completion requires a unit vector, got norm {norm:.6}"
        )));
    }
    let beta = v[0];
    let phase = if beta.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { beta / beta.norm() };
    // u = v + phase·e₁ has ‖u‖² = 2(1 + |β|) ≥ 2, so never degenerate.
    let mut u: Vec<Complex64> = v.to_vec();
    u[0] += phase;
    let unorm2: f64 = u.iter().map(|z| z.norm_sqr()).sum();
    let h = ComplexMatrix::from_fn(n, |i, j| {
        let delta = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
        delta - u[i] * u[j].conj() * (2.0 / unorm2)
    });
    // H maps v to -phase·e₁ and is an involution, so -phase·H has first
    // column v.
    Ok(h.scale(-phase))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real_matrix(rows: &[&[f64]]) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(rows).unwrap()
    }

    fn flip2() -> ComplexMatrix {
        real_matrix(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    fn ones_minus_identity3() -> ComplexMatrix {
        real_matrix(&[&[0.0, 1.0, 1.0], &[1.0, 0.0, 1.0], &[1.0, 1.0, 0.0]])
    }

    #[test]
    fn principal_submatrix_examples() {
        let i3 = ComplexMatrix::identity(3);
        assert_eq!(principal_submatrix(&i3, &[1, 3]).unwrap(), ComplexMatrix::identity(2));
        let a = flip2();
        assert_eq!(principal_submatrix(&a, &[1]).unwrap(), ComplexMatrix::zeros(1));
        assert_eq!(principal_submatrix(&a, &[1, 2]).unwrap(), a);
    }

    #[test]
    fn delete_submatrix_examples() {
        let a = flip2();
        assert_eq!(delete_submatrix(&a, &[2]).unwrap(), ComplexMatrix::zeros(1));
        assert_eq!(delete_submatrix(&a, &[]).unwrap(), a);
        let empty = delete_submatrix(&ComplexMatrix::identity(3), &[1, 2, 3]).unwrap();
        assert_eq!(empty.dim(), 0);
        assert_eq!(det(&empty), c(1.0, 0.0));
        assert_eq!(char_poly(&empty).unwrap().coeffs(), &[1.0]);
    }

    #[test]
    fn submatrix_composition_is_exact() {
        let a = ComplexMatrix::from_fn(5, |i, j| c((i * 5 + j) as f64, (i as f64) - (j as f64)));
        let s = [2usize, 4, 5];
        let complement = [1usize, 3];
        assert_eq!(
            principal_submatrix(&a, &s).unwrap(),
            delete_submatrix(&a, &complement).unwrap()
        );
    }

    #[test]
    fn index_validation() {
        let a = flip2();
        assert!(principal_submatrix(&a, &[0]).is_err());
        assert!(principal_submatrix(&a, &[3]).is_err());
        assert!(principal_submatrix(&a, &[1, 1]).is_err());
    }

    #[test]
    fn zero_out_examples() {
        let b = flip2();
        assert_eq!(zero_out_rows_cols(&b, &[1]).unwrap(), ComplexMatrix::zeros(2));
        assert_eq!(zero_out_rows_cols(&b, &[]).unwrap(), b);
        let b3 = real_matrix(&[&[0.0, 1.0, 2.0], &[1.0, 0.0, 3.0], &[2.0, 3.0, 0.0]]);
        let expect = real_matrix(&[&[0.0, 0.0, 2.0], &[0.0, 0.0, 0.0], &[2.0, 0.0, 0.0]]);
        assert_eq!(zero_out_rows_cols(&b3, &[2]).unwrap(), expect);
    }

    #[test]
    fn scale_first_index_examples() {
        let b = flip2();
        assert_eq!(scale_first_index(&b, 1.0).unwrap(), b);
        let scaled = scale_first_index(&b, 4.0).unwrap();
        assert_eq!(scaled, real_matrix(&[&[0.0, 2.0], &[2.0, 0.0]]));
        assert_eq!(scale_first_index(&b, 0.0).unwrap(), ComplexMatrix::zeros(2));
        assert!(scale_first_index(&b, -1.0).is_err());
    }

    #[test]
    fn hermitian_validation() {
        assert!(HermitianMatrix::new(flip2()).is_ok());
        let bad = real_matrix(&[&[0.0, 1.0], &[2.0, 0.0]]);
        assert!(matches!(HermitianMatrix::new(bad), Err(MdpError::NotHermitian { .. })));
        // Complex Hermitian: [[1, i], [-i, 1]]
        let m = ComplexMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, -1.0), c(1.0, 0.0)],
        ])
        .unwrap();
        assert!(HermitianMatrix::new(m).is_ok());
    }

    #[test]
    fn eigenvalue_examples() {
        let a = HermitianMatrix::new(flip2()).unwrap();
        let vals = hermitian_eigenvalues(&a);
        assert!((vals[0] + 1.0).abs() < 1e-12 && (vals[1] - 1.0).abs() < 1e-12);

        let i3 = HermitianMatrix::new(ComplexMatrix::identity(3)).unwrap();
        assert!(hermitian_eigenvalues(&i3).iter().all(|v| (v - 1.0).abs() < 1e-14));

        let j = HermitianMatrix::new(ones_minus_identity3()).unwrap();
        let vals = hermitian_eigenvalues(&j);
        assert!((vals[0] + 1.0).abs() < 1e-11);
        assert!((vals[1] + 1.0).abs() < 1e-11);
        assert!((vals[2] - 2.0).abs() < 1e-11);
    }

    #[test]
    fn eigen_decomposition_residual() {
        // Complex Hermitian with distinct eigenvalues.
        let m = ComplexMatrix::from_rows(vec![
            vec![c(2.0, 0.0), c(0.3, 0.7), c(-0.2, 0.1)],
            vec![c(0.3, -0.7), c(-1.0, 0.0), c(0.5, -0.4)],
            vec![c(-0.2, -0.1), c(0.5, 0.4), c(0.5, 0.0)],
        ])
        .unwrap();
        let h = HermitianMatrix::new(m.clone()).unwrap();
        let (vals, v) = hermitian_eigen(&h);
        // A·V − V·Λ small
        let av = m.matmul(&v);
        let vl = v.matmul(&ComplexMatrix::diagonal(
            &vals.iter().map(|&l| c(l, 0.0)).collect::<Vec<_>>(),
        ));
        assert!(av.sub(&vl).max_abs_entry() < 1e-10);
        // V unitary
        let vtv = v.adjoint().matmul(&v);
        assert!(vtv.sub(&ComplexMatrix::identity(3)).max_abs_entry() < 1e-12);
        // trace preserved
        let sum: f64 = vals.iter().sum();
        assert!((sum - m.trace().re).abs() < 1e-12);
    }

    #[test]
    fn operator_norm_examples() {
        assert_eq!(operator_norm(&ComplexMatrix::zeros(3)), 0.0);
        let shift = real_matrix(&[&[0.0, 2.0], &[0.0, 0.0]]);
        assert!((operator_norm(&shift) - 2.0).abs() < 1e-11);
        // Unitary invariance: rotate a fixed matrix by a Givens rotation.
        let a = real_matrix(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let (cs, sn) = (0.6, 0.8);
        let u = real_matrix(&[&[cs, -sn], &[sn, cs]]);
        let rotated = u.matmul(&a).matmul(&u.adjoint());
        assert!((operator_norm(&rotated) - operator_norm(&a)).abs() < 1e-9);
    }

    #[test]
    fn char_poly_examples() {
        let p = char_poly(&flip2()).unwrap();
        assert!(p.max_coeff_deviation(&RealPolynomial::new(vec![-1.0, 0.0, 1.0])) < 1e-14);

        let p3 = char_poly(&ones_minus_identity3()).unwrap();
        assert!(p3.max_coeff_deviation(&RealPolynomial::new(vec![-2.0, -3.0, 0.0, 1.0])) < 1e-12);

        // evaluated at eigenvalues → ~0
        let h = HermitianMatrix::new(ones_minus_identity3()).unwrap();
        for lam in hermitian_eigenvalues(&h) {
            assert!(p3.eval(lam).abs() < 1e-9);
        }
    }

    #[test]
    fn char_poly_rejects_non_hermitian() {
        // det(xI − [[0,1],[i,0]]) = x² − i has an imaginary coefficient.
        let m = ComplexMatrix::from_rows(vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 1.0), c(0.0, 0.0)],
        ])
        .unwrap();
        assert!(char_poly(&m).is_err());
    }

    #[test]
    fn det_and_solve() {
        let a = ComplexMatrix::from_rows(vec![
            vec![c(2.0, 1.0), c(0.0, -1.0)],
            vec![c(1.0, 0.0), c(3.0, 0.0)],
        ])
        .unwrap();
        // det = (2+i)(3) − (−i)(1) = 6 + 3i + i = 6 + 4i
        let d = det(&a);
        assert!((d - c(6.0, 4.0)).norm() < 1e-12);

        let b = vec![c(1.0, 0.0), c(0.0, 1.0)];
        let x = LuFactors::new(&a).solve(&b).unwrap();
        let ax = a.apply(&x);
        assert!((ax[0] - b[0]).norm() < 1e-12 && (ax[1] - b[1]).norm() < 1e-12);

        let sing = real_matrix(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(LuFactors::new(&sing).solve(&b).is_err());
    }

    #[test]
    fn subset_det_matches_general_path() {
        let a = ComplexMatrix::from_fn(6, |i, j| {
            c(((i + 2 * j) % 5) as f64 - 1.0, ((3 * i + j) % 7) as f64 * 0.25)
        });
        for idx in [vec![], vec![2], vec![0, 4], vec![1, 3, 5], vec![0, 1, 2, 5]] {
            let direct = subset_det(&a, &idx);
            let via_lu = det(&submatrix_by_indices0(&a, &idx));
            assert!((direct - via_lu).norm() < 1e-10);
        }
    }

    #[test]
    fn kron_example() {
        let flip = flip2();
        let i2 = ComplexMatrix::identity(2);
        let k = flip.kron(&i2);
        // flip ⊗ I₂ swaps the two 2-blocks
        assert_eq!(k.get(0, 2), c(1.0, 0.0));
        assert_eq!(k.get(1, 3), c(1.0, 0.0));
        assert_eq!(k.get(2, 0), c(1.0, 0.0));
        assert_eq!(k.get(0, 0), c(0.0, 0.0));
        assert_eq!(k.dim(), 4);
    }

    #[test]
    fn cartesian_parts_reconstruct() {
        let a = ComplexMatrix::from_rows(vec![
            vec![c(1.0, 2.0), c(3.0, -1.0)],
            vec![c(0.5, 0.25), c(-2.0, 1.0)],
        ])
        .unwrap();
        let (h, k) = a.cartesian_parts();
        assert!(HermitianMatrix::new(h.clone()).is_ok());
        assert!(HermitianMatrix::new(k.clone()).is_ok());
        let rebuilt = h.add(&k.scale(c(0.0, 1.0)));
        assert!(rebuilt.sub(&a).max_abs_entry() < 1e-15);
    }

    #[test]
    fn tuple_flags() {
        let t = HermitianTuple::from_matrices(vec![flip2()]).unwrap();
        assert!(t.zero_diagonal());
        assert!(t.contraction());
        let big = real_matrix(&[&[0.0, 2.0], &[2.0, 0.0]]);
        let t2 = HermitianTuple::from_matrices(vec![big]).unwrap();
        assert!(t2.zero_diagonal());
        assert!(!t2.contraction());
        assert!(t2.require_contraction().is_err());
        let diag = real_matrix(&[&[1.0, 0.0], &[0.0, -1.0]]);
        let t3 = HermitianTuple::from_matrices(vec![diag]).unwrap();
        assert!(!t3.zero_diagonal());
        assert!(t3.require_zero_diagonal().is_err());
    }

    #[test]
    fn tuple_dimension_check() {
        let a = HermitianMatrix::new(flip2()).unwrap();
        let b = HermitianMatrix::new(ComplexMatrix::identity(3)).unwrap();
        assert!(HermitianTuple::new(vec![a, b]).is_err());
        assert!(HermitianTuple::new(vec![]).is_err());
    }

    #[test]
    fn permutation_conjugation() {
        let a = ComplexMatrix::from_fn(3, |i, j| c((3 * i + j) as f64, 0.0));
        let p = a.conjugate_by_permutation(&[2, 0, 1]);
        assert_eq!(p.get(0, 0), a.get(2, 2));
        assert_eq!(p.get(0, 1), a.get(2, 0));
        assert_eq!(p.get(2, 1), a.get(1, 0));
    }

    #[test]
    fn unitary_completion() {
        let v = vec![c(0.6, 0.0), c(0.0, 0.8)];
        let q = unitary_completing_column(&v).unwrap();
        assert!((q.get(0, 0) - v[0]).norm() < 1e-12);
        assert!((q.get(1, 0) - v[1]).norm() < 1e-12);
        let qtq = q.adjoint().matmul(&q);
        assert!(qtq.sub(&ComplexMatrix::identity(2)).max_abs_entry() < 1e-12);

        // v aligned with e₁ and a zero first component both work
        let e1 = vec![c(1.0, 0.0), c(0.0, 0.0)];
        let q1 = unitary_completing_column(&e1).unwrap();
        assert!((q1.get(0, 0) - c(1.0, 0.0)).norm() < 1e-12);
        let v0 = vec![c(0.0, 0.0), c(1.0, 0.0)];
        let q0 = unitary_completing_column(&v0).unwrap();
        assert!((q0.get(1, 0) - c(1.0, 0.0)).norm() < 1e-12);
        assert!(unitary_completing_column(&[c(0.5, 0.0)]).is_err());
    }

    #[test]
    fn direct_sum_blocks() {
        let s = direct_sum(&[flip2(), ComplexMatrix::identity(1)]);
        assert_eq!(s.dim(), 3);
        assert_eq!(s.get(0, 1), c(1.0, 0.0));
        assert_eq!(s.get(2, 2), c(1.0, 0.0));
        assert_eq!(s.get(0, 2), c(0.0, 0.0));
    }

    #[test]
    fn mean_square_trace_density() {
        // flip2 has A² = I, so Tr(A²)/n = 1 and the density is 1/k² scaled:
        // for k=1 the density is Tr(A²)/(n·k) = 1.
        let t = HermitianTuple::from_matrices(vec![flip2()]).unwrap();
        assert!((t.mean_square_trace_density() - 1.0).abs() < 1e-14);
    }
}
