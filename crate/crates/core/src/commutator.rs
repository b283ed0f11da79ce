//! Quantitative commutator decomposition A = [B, C] = BC − CB for
//! zero-trace matrices: unitary zero-diagonalization, a recursive paving
//! strategy that places block spectra in disjoint subsquares of the root
//! square 𝕊 = [−1,1]×[−1,1]i, Sylvester solves for the off-diagonal blocks
//! of C, and direct norm accounting.

use num_complex::Complex64;

use crate::budget::EnumerationBudget;
use crate::error::{MdpError, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::selection;
use crate::tol;

/// Axis-aligned square in ℂ. The root square 𝕊 has center 0 and
/// half-side 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralSquare {
    pub center: Complex64,
    pub half_side: f64,
}

impl SpectralSquare {
    pub fn root() -> Self {
        SpectralSquare { center: Complex64::new(0.0, 0.0), half_side: 1.0 }
    }

    /// Subsquare `index` (row-major) of the t×t tiling of this square.
    pub fn tile(&self, t: usize, index: usize) -> Self {
        debug_assert!(index < t * t);
        let row = index / t;
        let col = index % t;
        let h = self.half_side / t as f64;
        let cx = self.center.re - self.half_side + (2 * col + 1) as f64 * h;
        let cy = self.center.im - self.half_side + (2 * row + 1) as f64 * h;
        SpectralSquare { center: Complex64::new(cx, cy), half_side: h }
    }

    /// Whether z lies inside the square shrunk by `margin` on every side.
    pub fn contains(&self, z: Complex64, margin: f64) -> bool {
        (z.re - self.center.re).abs() <= self.half_side - margin
            && (z.im - self.center.im).abs() <= self.half_side - margin
    }
}

/// One level of the recursion log.
#[derive(Debug, Clone)]
pub struct CommutatorLevel {
    pub depth: usize,
    pub m: usize,
    /// Paving parameter at this level (0 for base-case levels).
    pub r: usize,
    pub block_sizes: Vec<usize>,
    /// ‖A(X_b)‖ per paving block, when a paving was performed.
    pub paving_norms: Vec<f64>,
    /// Subsquare assigned to each block.
    pub squares: Vec<SpectralSquare>,
    pub base_case: bool,
    /// True when the paving budget forced a base-case fallback.
    pub budget_fallback: bool,
}

/// A decomposition A = U·(BC − CB)·U* with B diagonal.
///
/// B is diagonal in the rotated basis produced by the top-level
/// zero-diagonalization; `u` carries that basis change, so the original-
/// basis pair is (U B U*, U C U*) with the same norms and the same residual
/// (the operator norm is unitarily invariant).
#[derive(Debug, Clone)]
pub struct CommutatorResult {
    pub b: ComplexMatrix,
    pub c: ComplexMatrix,
    pub u: ComplexMatrix,
    /// ‖U*AU − (BC−CB)‖.
    pub residual: f64,
    pub norm_b: f64,
    pub norm_c: f64,
    pub trace: Vec<CommutatorLevel>,
}

/// Unitary similarity A′ = U*AU with zero diagonal, for zero-trace A.
///
/// Sweep: repeatedly take the diagonal entry farthest from the mean and the
/// entry most opposed to it, and apply the 2×2 unitary that maps both to
/// their average. The 2×2 numerical range is a convex ellipse containing
/// both diagonal entries, so the averaging rotation always exists in closed
/// form, and the diagonal's squared deviation drops by a (1 − 1/2n) factor
/// per rotation.
pub fn zero_diagonal_conjugation(a: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if !a.is_finite() {
        return Err(MdpError::NonFiniteEntry);
    }
    let n = a.dim();
    let scale = a.max_abs_entry().max(1.0);
    let norm = linalg::operator_norm(a);
    let tr = a.trace();
    if tr.norm() > 1e-10 * n as f64 * norm.max(1.0) {
        return Err(MdpError::NonZeroTrace { trace_abs: tr.norm(), tol: 1e-10 * n as f64 * norm.max(1.0) });
    }

    let mut work = a.clone();
    let mut u = ComplexMatrix::identity(n);
    let mu = tr / n as f64;
    let target = 1e-12 * scale;
    let max_rotations = 200 * n + 500;

    for _ in 0..max_rotations {
        let deltas: Vec<Complex64> = (0..n).map(|i| work.get(i, i) - mu).collect();
        let (i, worst) = deltas
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
            .map(|(i, d)| (i, d.norm()))
            .unwrap();
        if worst <= target {
            break;
        }
        // most opposed partner: minimizes Re(conj(δ_i)·δ_j); this is ≤
        // −|δ_i|²/(n−1) because the deltas sum to zero
        let j = (0..n)
            .filter(|&j| j != i)
            .min_by(|&p, &q| {
                let rp = (deltas[i].conj() * deltas[p]).re;
                let rq = (deltas[i].conj() * deltas[q]).re;
                rp.partial_cmp(&rq).unwrap()
            })
            .unwrap();
        apply_averaging_rotation(&mut work, &mut u, i, j);
    }

    let residual_diag = (0..n).map(|i| work.get(i, i).norm()).fold(0.0f64, f64::max);
    if residual_diag > 1e-10 * scale.max(norm) {
        return Err(MdpError::RootNonConvergence {
            detail: format!("zero-diagonalization stalled at max diagonal {residual_diag:.3e}"),
        });
    }
    // snap the numerically-converged diagonal to exactly zero
    for i in 0..n {
        work.set(i, i, Complex64::new(0.0, 0.0));
    }
    Ok((u, work))
}

/// Closed-form 2×2 unitary (in the (i,j) plane) sending both diagonal
/// entries of `work` to their average, applied in place; `u` accumulates it.
fn apply_averaging_rotation(work: &mut ComplexMatrix, u: &mut ComplexMatrix, i: usize, j: usize) {
    let p = work.get(i, i);
    let q = work.get(j, j);
    let delta = (p - q) / 2.0;
    if delta.norm() == 0.0 {
        return;
    }
    let a = work.get(i, j);
    let b = work.get(j, i);

    // Want y = (cos t, e^{iφ} sin t) with y*Ny = 0 for the zero-trace part
    // N = [[δ, a],[b, −δ]]: δ·cos 2t + (sin 2t / 2)·g(φ) = 0 where
    // g(φ) = e^{iφ}a + e^{−iφ}b. First pick φ aligning g with δ's direction,
    // then t from the resulting real equation.
    let dhat = delta / delta.norm();
    // solve Im(conj(g(φ))·δ) = 0: ρ₁·sin(α−φ) + ρ₂·sin(β+φ) = 0
    let w1 = a.conj() * delta; // ρ₁ e^{iα}
    let w2 = b.conj() * delta; // ρ₂ e^{iβ}
    let num = w1.im + w2.im; // ρ₁ sin α + ρ₂ sin β
    let den = w1.re - w2.re; // ρ₁ cos α − ρ₂ cos β
    let phi = if num == 0.0 && den == 0.0 { 0.0 } else { num.atan2(den) };
    let eiphi = Complex64::from_polar(1.0, phi);
    let g = eiphi * a + eiphi.conj() * b;
    let s_real = (dhat.conj() * g).re; // g = s_real·δ̂ up to the solved residual
    let two_t = if s_real == 0.0 {
        std::f64::consts::FRAC_PI_2
    } else {
        (-2.0 * delta.norm() / s_real).atan()
    };
    let (c, s) = ((two_t / 2.0).cos(), (two_t / 2.0).sin());
    let s_c = eiphi * s; // complex sine entry

    // G: columns y₁ = (c, s_c), y₂ = (−conj(s_c), c)
    let n = work.dim();
    for k in 0..n {
        let wi = work.get(k, i);
        let wj = work.get(k, j);
        work.set(k, i, wi * c + wj * s_c);
        work.set(k, j, -wi * s_c.conj() + wj * c);
    }
    for k in 0..n {
        let wi = work.get(i, k);
        let wj = work.get(j, k);
        work.set(i, k, wi * c + wj * s_c.conj());
        work.set(j, k, -wi * s_c + wj * c);
    }
    for k in 0..n {
        let ui = u.get(k, i);
        let uj = u.get(k, j);
        u.set(k, i, ui * c + uj * s_c);
        u.set(k, j, -ui * s_c.conj() + uj * c);
    }
}

/// Unique X with SX − XT = A, S being p×p, T q×q, and A p×q (given as
/// rows). Solved densely via the Kronecker system
/// (I_q⊗S − Tᵀ⊗I_p)·vec(X) = vec(A). When S and T are (numerically)
/// triangular their spectra are read off the diagonals and the pairwise gap
/// is checked up front; otherwise near-collision surfaces as a singular
/// system.
pub fn sylvester_solve(
    s: &ComplexMatrix,
    t: &ComplexMatrix,
    a: &[Vec<Complex64>],
) -> Result<Vec<Vec<Complex64>>> {
    let p = s.dim();
    let q = t.dim();
    if a.len() != p || a.iter().any(|row| row.len() != q) {
        return Err(MdpError::DimensionMismatch { expected: p, got: a.len() });
    }
    if let (Some(spec_s), Some(spec_t)) = (triangular_spectrum(s), triangular_spectrum(t)) {
        let mut gap = f64::INFINITY;
        for &x in &spec_s {
            for &y in &spec_t {
                gap = gap.min((x - y).norm());
            }
        }
        if gap <= tol::SYLVESTER_GAP_TOL {
            return Err(MdpError::SpectralCollision { gap });
        }
    }

    let dim = p * q;
    let mut system = ComplexMatrix::zeros(dim);
    for jcol in 0..q {
        for irow in 0..p {
            let row = jcol * p + irow;
            for kk in 0..p {
                let v = s.get(irow, kk);
                if v.norm() != 0.0 {
                    let col = jcol * p + kk;
                    system.set(row, col, system.get(row, col) + v);
                }
            }
            for ll in 0..q {
                let v = t.get(ll, jcol);
                if v.norm() != 0.0 {
                    let col = ll * p + irow;
                    system.set(row, col, system.get(row, col) - v);
                }
            }
        }
    }
    let mut rhs = vec![Complex64::new(0.0, 0.0); dim];
    for jcol in 0..q {
        for irow in 0..p {
            rhs[jcol * p + irow] = a[irow][jcol];
        }
    }
    let lu = linalg::LuFactors::new(&system);
    let sol = lu.solve(&rhs).map_err(|_| MdpError::SpectralCollision { gap: lu.pivot_ratio() })?;
    let mut x = vec![vec![Complex64::new(0.0, 0.0); q]; p];
    for jcol in 0..q {
        for irow in 0..p {
            x[irow][jcol] = sol[jcol * p + irow];
        }
    }

    // residual by direct substitution
    let mut res2 = 0.0f64;
    let mut xfro = 0.0f64;
    let mut afro = 0.0f64;
    for i in 0..p {
        for j in 0..q {
            let mut v = Complex64::new(0.0, 0.0);
            for kk in 0..p {
                v += s.get(i, kk) * x[kk][j];
            }
            for ll in 0..q {
                v -= x[i][ll] * t.get(ll, j);
            }
            v -= a[i][j];
            res2 += v.norm_sqr();
            xfro += x[i][j].norm_sqr();
            afro += a[i][j].norm_sqr();
        }
    }
    let snorm = s.frobenius_norm();
    let tnorm = t.frobenius_norm();
    let allowed = tol::SYLVESTER_RESIDUAL_TOL * ((snorm + tnorm) * xfro.sqrt() + afro.sqrt());
    if res2.sqrt() > allowed.max(1e-13) {
        return Err(MdpError::BoundViolation {
            detail: format!("Sylvester residual {:.3e} above tolerance {:.3e}", res2.sqrt(), allowed),
        });
    }
    Ok(x)
}

fn triangular_spectrum(m: &ComplexMatrix) -> Option<Vec<Complex64>> {
    let n = m.dim();
    let scale = m.max_abs_entry().max(1.0);
    let lower_resid = (1..n)
        .flat_map(|i| (0..i).map(move |j| (i, j)))
        .map(|(i, j)| m.get(i, j).norm())
        .fold(0.0f64, f64::max);
    let upper_resid = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| m.get(i, j).norm())
        .fold(0.0f64, f64::max);
    if lower_resid <= 1e-13 * scale || upper_resid <= 1e-13 * scale {
        Some((0..n).map(|i| m.get(i, i)).collect())
    } else {
        None
    }
}

/// Affine placement of a diagonal B (spectrum inside the root square 𝕊)
/// into `square`: B′ = scale·B + shift·I with scale = 1/(2√r) and
/// shift = square.center. When square.half_side = 1/√r the spectrum lands in
/// the concentric half-size subsquare, margin ≥ 1/(2√r) from the boundary.
pub fn place_spectrum(
    b: &ComplexMatrix,
    square: &SpectralSquare,
    r: usize,
) -> Result<(ComplexMatrix, Complex64, f64)> {
    if r == 0 {
        return Err(MdpError::InvalidArgument("r must be ≥ 1".to_string()));
    }
    let n = b.dim();
    let root = SpectralSquare::root();
    for i in 0..n {
        for j in 0..n {
            if i != j && b.get(i, j).norm() > 1e-13 {
                return Err(MdpError::InvalidArgument("B must be diagonal".to_string()));
            }
        }
        if !root.contains(b.get(i, i), -1e-12) {
            return Err(MdpError::InvalidArgument(format!(
                "spectrum entry {} outside the root square",
                b.get(i, i)
            )));
        }
    }
    let scale = 1.0 / (2.0 * (r as f64).sqrt());
    let shift = square.center;
    let placed = ComplexMatrix::from_fn(n, |i, j| {
        if i == j { scale * b.get(i, i) + shift } else { Complex64::new(0.0, 0.0) }
    });
    for i in 0..n {
        let z = placed.get(i, i);
        let dev = (z.re - shift.re).abs().max((z.im - shift.im).abs());
        if dev > scale * (1.0 + 1e-12) {
            return Err(MdpError::BoundViolation {
                detail: format!("placed entry {z} escapes the concentric half-size subsquare"),
            });
        }
    }
    Ok((placed, shift, scale))
}

/// Equispaced-diagonal base case for zero-diagonal A: B = diag of m
/// equispaced points of [−1,1] (descending), C_ij = A_ij/(b_i − b_j), which
/// satisfies A = [B, C] exactly.
pub fn base_case_commutator(a: &ComplexMatrix) -> Result<CommutatorResult> {
    let n = a.dim();
    let max_diag = (0..n).map(|i| a.get(i, i).norm()).fold(0.0f64, f64::max);
    if max_diag > tol::ZERO_DIAGONAL_TOL * a.max_abs_entry().max(1.0) {
        return Err(MdpError::NonZeroDiagonal { max_abs: max_diag, tol: tol::ZERO_DIAGONAL_TOL });
    }
    let (diag, c) = base_case_parts(a);
    Ok(assemble_result(
        a,
        diag,
        c,
        ComplexMatrix::identity(n),
        vec![CommutatorLevel {
            depth: 0,
            m: n,
            r: 0,
            block_sizes: vec![n],
            paving_norms: Vec::new(),
            squares: Vec::new(),
            base_case: true,
            budget_fallback: false,
        }],
    ))
}

fn base_case_parts(a: &ComplexMatrix) -> (Vec<Complex64>, ComplexMatrix) {
    let m = a.dim();
    if m == 1 {
        return (vec![Complex64::new(0.0, 0.0)], ComplexMatrix::zeros(1));
    }
    let diag: Vec<Complex64> = (0..m)
        .map(|i| Complex64::new(1.0 - 2.0 * i as f64 / (m as f64 - 1.0), 0.0))
        .collect();
    let c = ComplexMatrix::from_fn(m, |i, j| {
        if i == j { Complex64::new(0.0, 0.0) } else { a.get(i, j) / (diag[i] - diag[j]) }
    });
    (diag, c)
}

fn assemble_result(
    a_zero_diag: &ComplexMatrix,
    diag: Vec<Complex64>,
    c: ComplexMatrix,
    u: ComplexMatrix,
    trace: Vec<CommutatorLevel>,
) -> CommutatorResult {
    let b = ComplexMatrix::diagonal(&diag);
    let commutator = b.matmul(&c).sub(&c.matmul(&b));
    let residual = linalg::operator_norm(&a_zero_diag.sub(&commutator));
    let norm_b = diag.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    let norm_c = linalg::operator_norm(&c);
    CommutatorResult { b, c, u, residual, norm_b, norm_c, trace }
}

/// Smallest r ≥ e^{√(8/3)·√(ln m)} such that 2r is a perfect square
/// (r = 2u² for integer u).
fn r_schedule(m: usize) -> usize {
    let threshold = ((8.0f64 / 3.0).sqrt() * (m as f64).ln().sqrt()).exp();
    let mut u = 1usize;
    while ((2 * u * u) as f64) < threshold {
        u += 1;
    }
    2 * u * u
}

/// Full recursive decomposition of a zero-trace matrix: normalize to norm 1,
/// zero-diagonalize once (blocks of a zero-diagonal matrix stay
/// zero-diagonal, so no further rotations are needed), then recursively pave
/// into balanced blocks whose B-spectra are placed in disjoint subsquares of
/// 𝕊, with Sylvester solves filling the off-diagonal blocks of C. Levels
/// whose paving is enumeration-infeasible fall back to the base case, which
/// the trace records.
pub fn recursive_commutator(
    a: &ComplexMatrix,
    base_threshold: usize,
    budget: EnumerationBudget,
) -> Result<CommutatorResult> {
    recursive_commutator_with(a, base_threshold, budget, None)
}

/// Internal variant allowing a forced paving parameter (2r must be a perfect
/// square), used to exercise the multi-level path at desk scale.
pub(crate) fn recursive_commutator_with(
    a: &ComplexMatrix,
    base_threshold: usize,
    budget: EnumerationBudget,
    r_override: Option<usize>,
) -> Result<CommutatorResult> {
    if !a.is_finite() {
        return Err(MdpError::NonFiniteEntry);
    }
    if let Some(r) = r_override {
        let t = (2.0 * r as f64).sqrt().round() as usize;
        if t * t != 2 * r {
            return Err(MdpError::InvalidArgument(format!("2r = {} is not a perfect square", 2 * r)));
        }
    }
    let n = a.dim();
    let norm = linalg::operator_norm(a);
    let tr = a.trace();
    if tr.norm() > 1e-10 * n as f64 * norm.max(1.0) {
        return Err(MdpError::NonZeroTrace { trace_abs: tr.norm(), tol: 1e-10 * n as f64 * norm.max(1.0) });
    }
    if norm <= 1e-14 {
        return Ok(CommutatorResult {
            b: ComplexMatrix::zeros(n),
            c: ComplexMatrix::zeros(n),
            u: ComplexMatrix::identity(n),
            residual: norm,
            norm_b: 0.0,
            norm_c: 0.0,
            trace: Vec::new(),
        });
    }

    let normalized = a.scale_real(1.0 / norm);
    let (u, zero_diag) = zero_diagonal_conjugation(&normalized)?;
    let mut trace = Vec::new();
    let (diag, c_hat) =
        decompose_zero_diag(&zero_diag, base_threshold, budget, r_override, 0, &mut trace)?;
    let c = c_hat.scale_real(norm);

    // residual against the exactly-conjugated input
    let rotated = u.adjoint().matmul(a).matmul(&u);
    let result = assemble_result(&rotated, diag, c, u, trace);
    for i in 0..n {
        if !SpectralSquare::root().contains(result.b.get(i, i), -1e-10) {
            return Err(MdpError::BoundViolation {
                detail: format!("B spectrum entry {} escapes the root square", result.b.get(i, i)),
            });
        }
    }
    if result.residual > 1e-8 * norm.max(1.0) {
        return Err(MdpError::BoundViolation {
            detail: format!(
                "commutator residual {:.3e} above 1e-8·max(1,‖A‖) = {:.3e}",
                result.residual,
                1e-8 * norm.max(1.0)
            ),
        });
    }
    Ok(result)
}

fn decompose_zero_diag(
    a: &ComplexMatrix,
    base_threshold: usize,
    budget: EnumerationBudget,
    r_override: Option<usize>,
    depth: usize,
    trace: &mut Vec<CommutatorLevel>,
) -> Result<(Vec<Complex64>, ComplexMatrix)> {
    let m = a.dim();
    if m <= base_threshold.max(1) {
        trace.push(CommutatorLevel {
            depth,
            m,
            r: 0,
            block_sizes: vec![m],
            paving_norms: Vec::new(),
            squares: Vec::new(),
            base_case: true,
            budget_fallback: false,
        });
        return Ok(base_case_parts(a));
    }

    let r = r_override.unwrap_or_else(|| r_schedule(m));
    let paving = match selection::two_sided_pave(a, r, budget) {
        Ok(report) => report,
        Err(MdpError::BudgetExceeded { .. }) => {
            trace.push(CommutatorLevel {
                depth,
                m,
                r,
                block_sizes: vec![m],
                paving_norms: Vec::new(),
                squares: Vec::new(),
                base_case: true,
                budget_fallback: true,
            });
            return Ok(base_case_parts(a));
        }
        Err(e) => return Err(e),
    };
    let balanced = selection::balance_blocks(&paving.paving, r, m)?;
    let blocks = balanced.blocks();
    let t = (2.0 * r as f64).sqrt().round() as usize;
    debug_assert_eq!(t * t, 2 * r);
    debug_assert!(blocks.len() <= 2 * r);

    // permute to contiguous block order
    let order: Vec<usize> = blocks.iter().flatten().copied().collect();
    let permuted = a.conjugate_by_permutation(&order);
    let mut offsets = Vec::with_capacity(blocks.len());
    let mut acc = 0usize;
    for b in &blocks {
        offsets.push(acc);
        acc += b.len();
    }

    // recurse on diagonal blocks and place each spectrum in its subsquare
    let scale = 1.0 / (2.0 * ((2 * r) as f64).sqrt());
    let mut placed_diags: Vec<Vec<Complex64>> = Vec::with_capacity(blocks.len());
    let mut diag_blocks_c: Vec<ComplexMatrix> = Vec::with_capacity(blocks.len());
    let mut squares = Vec::with_capacity(blocks.len());
    for (bi, block) in blocks.iter().enumerate() {
        let mb = block.len();
        let off = offsets[bi];
        let sub = ComplexMatrix::from_fn(mb, |x, y| permuted.get(off + x, off + y));
        let (d, c) = decompose_zero_diag(&sub, base_threshold, budget, r_override, depth + 1, trace)?;
        let square = SpectralSquare::root().tile(t, bi);
        let (placed, _shift, got_scale) =
            place_spectrum(&ComplexMatrix::diagonal(&d), &square, 2 * r)?;
        debug_assert!((got_scale - scale).abs() < 1e-15);
        // margin from the subsquare boundary stays ≥ scale = 1/(2√(2r))
        for i in 0..mb {
            if !square.contains(placed.get(i, i), scale * (1.0 - 1e-9)) {
                return Err(MdpError::BoundViolation {
                    detail: format!(
                        "block {bi}: placed eigenvalue {} lost its subsquare margin",
                        placed.get(i, i)
                    ),
                });
            }
        }
        placed_diags.push((0..mb).map(|i| placed.get(i, i)).collect());
        diag_blocks_c.push(c.scale_real(1.0 / scale));
        squares.push(square);
    }

    trace.push(CommutatorLevel {
        depth,
        m,
        r,
        block_sizes: blocks.iter().map(|b| b.len()).collect(),
        paving_norms: paving.per_block_operator_norm.clone().unwrap_or_default(),
        squares: squares.clone(),
        base_case: false,
        budget_fallback: false,
    });

    // assemble C̃: recursive diagonal blocks, Sylvester off-diagonal blocks
    let mut c_tilde = ComplexMatrix::zeros(m);
    for (bi, block) in blocks.iter().enumerate() {
        let off = offsets[bi];
        for x in 0..block.len() {
            for y in 0..block.len() {
                c_tilde.set(off + x, off + y, diag_blocks_c[bi].get(x, y));
            }
        }
    }
    for bi in 0..blocks.len() {
        for bj in 0..blocks.len() {
            if bi == bj {
                continue;
            }
            let (pi, pj) = (blocks[bi].len(), blocks[bj].len());
            let (oi, oj) = (offsets[bi], offsets[bj]);
            let s = ComplexMatrix::diagonal(&placed_diags[bi]);
            let tt = ComplexMatrix::diagonal(&placed_diags[bj]);
            let rhs: Vec<Vec<Complex64>> = (0..pi)
                .map(|x| (0..pj).map(|y| permuted.get(oi + x, oj + y)).collect())
                .collect();
            let x = sylvester_solve(&s, &tt, &rhs)?;
            for (xi, row) in x.iter().enumerate() {
                for (yj, &v) in row.iter().enumerate() {
                    c_tilde.set(oi + xi, oj + yj, v);
                }
            }
        }
    }

    // undo the permutation: position[old index] = new position
    let mut position = vec![0usize; m];
    for (newpos, &old) in order.iter().enumerate() {
        position[old] = newpos;
    }
    let diag_tilde: Vec<Complex64> = placed_diags.into_iter().flatten().collect();
    let diag_final: Vec<Complex64> = (0..m).map(|i| diag_tilde[position[i]]).collect();
    let c_final = c_tilde.conjugate_by_permutation(&position);
    Ok((diag_final, c_final))
}

/// ‖B‖·‖C‖ against the theorem bound 300·e^{9√(ln m)}.
pub fn commutator_norm_report(result: &CommutatorResult, m: usize) -> (f64, f64) {
    let product = result.norm_b * result.norm_c;
    let bound = 300.0 * (9.0 * (m.max(1) as f64).ln().sqrt()).exp();
    (product, bound)
}
