//! Greedy interlacing-family selection: joint restricted invertibility
//! (delete indices one at a time, tracking a differentiated mixed
//! determinantal polynomial) and joint paving (assign indices to blocks one
//! at a time, tracking the expected paving polynomial), together with the
//! theorem pipelines that wrap them in certified bounds.

use std::collections::HashMap;

use crate::budget::EnumerationBudget;
use crate::error::{MdpError, Result};
use crate::linalg::{
    self, ComplexMatrix, HermitianMatrix, HermitianTuple, submatrix_by_indices0,
};
use crate::mdp::{Assignment, PartialAssignment, PartitionEngine, mask_indices};
use crate::polynomial::{self, RealPolynomial};
use crate::tol;

/// Outcome of a restricted-invertibility selection.
#[derive(Debug, Clone)]
pub struct SelectionReport {
    /// Kept index set σ, 1-based ascending.
    pub kept_set: Vec<usize>,
    /// λmax(A⁽ʲ⁾(σ)) per tuple member, recomputed by eigensolve
    /// (−∞ for the empty selection).
    pub per_matrix_lambda_max: Vec<f64>,
    /// λmax of the m-th derivative of the tuple's mixed determinantal
    /// polynomial — the root the walk starts from and never exceeds.
    pub certified_root_bound: f64,
    /// Bound the per-matrix values are measured against: ε for the theorem
    /// pipeline, k·certified_root_bound for a direct greedy call.
    pub theorem_bound: f64,
    /// k·(shrinkage bound at the pipeline's c and α), when applicable.
    pub analytic_shrink_bound: Option<f64>,
    pub n: usize,
    pub k: usize,
    /// Derivative order consumed: n − |σ|.
    pub m: usize,
    /// Proportion parameter: |σ|/n for direct calls, ε²/6k for the pipeline.
    pub c: f64,
    /// Mean squared-trace density ΣᵢTr((A⁽ⁱ⁾)²)/(nk²).
    pub alpha: f64,
    /// Largest root of the node polynomial after each step (nonincreasing).
    pub root_trace: Vec<f64>,
}

/// Outcome of a greedy paving run (optionally wrapped by a theorem pipeline).
#[derive(Debug, Clone)]
pub struct PavingReport {
    /// Block assignment of [n] (0-based blocks internally).
    pub paving: Assignment,
    pub r: usize,
    pub k: usize,
    pub n: usize,
    /// λmax(A⁽ʲ⁾(X_b)) for block b and tuple member j (−∞ for empty blocks).
    pub per_block_per_matrix_lambda_max: Vec<Vec<f64>>,
    /// Largest root of q(T) after each assignment step, starting at q(∅);
    /// empty in direct-certificate mode (no greedy walk).
    pub greedy_root_trace: Vec<f64>,
    /// Largest root of q(∅) — the expected-polynomial bound (NaN in
    /// direct-certificate mode).
    pub expected_poly_root: f64,
    /// Analytic root bound 3√2/√(rk) for the expected polynomial
    /// (+∞ when rk < 2).
    pub rootbound_3sqrt2: f64,
    /// Operator-norm-level bound the per-block values are asserted against.
    pub epsilon: f64,
    /// ‖compressed A‖ per block, for the non-Hermitian pipelines.
    pub per_block_operator_norm: Option<Vec<f64>>,
}

fn lambda_max_restricted(m: &HermitianMatrix, idx0: &[usize]) -> f64 {
    if idx0.is_empty() {
        return f64::NEG_INFINITY;
    }
    let sub = HermitianMatrix::new_unchecked(submatrix_by_indices0(m.matrix(), idx0));
    linalg::hermitian_eigenvalues(&sub).last().copied().unwrap_or(f64::NEG_INFINITY)
}

fn binom_u128(n: usize, j: usize) -> u128 {
    if j > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for t in 0..j {
        acc = acc.saturating_mul((n - t) as u128) / (t + 1) as u128;
    }
    acc
}

/// From the top coefficients of a degree-`deg` polynomial (top[s] is the
/// coefficient of x^{deg−s}), build its derivative of order deg−keep where
/// keep = top.len()−1, rescaled by the positive constant keep!/ (falling
/// factorial of deg), so the result stays O(1) and keeps the same roots.
fn truncated_derivative_poly(top: &[f64], deg: usize) -> RealPolynomial {
    let keep = top.len() - 1;
    debug_assert!(deg >= keep);
    let mut coeffs = vec![0.0; keep + 1];
    let mut factor = 1.0;
    coeffs[keep] = top[0];
    for s in 1..=keep {
        // multiply by (keep−s+1)/(deg−s+1) ≤ 1 at each level
        factor *= (keep - s + 1) as f64 / (deg - s + 1) as f64;
        coeffs[keep - s] = top[s] * factor;
    }
    RealPolynomial::new(coeffs)
}

// ---------------------------------------------------------------------------
// Restricted-invertibility engines
// ---------------------------------------------------------------------------

/// k=1 engine: the restricted polynomials are plain characteristic
/// polynomials, so each step eigendecomposes the current submatrix once and
/// reads every candidate's top coefficients from the leave-one-out spectral
/// formula det(xI−A(R∖i)) = Σ_p |⟨e_i,v_p⟩|²·Π_{q≠p}(x−λ_q).
struct SpectralEngine<'a> {
    matrix: &'a HermitianMatrix,
    keep: usize,
    remaining: Vec<usize>,
    evals: Vec<f64>,
    evecs: ComplexMatrix,
    esym: Vec<f64>,
}

impl<'a> SpectralEngine<'a> {
    fn new(matrix: &'a HermitianMatrix, keep: usize) -> Self {
        let remaining: Vec<usize> = (0..matrix.dim()).collect();
        let mut e = SpectralEngine {
            matrix,
            keep,
            remaining,
            evals: Vec::new(),
            evecs: ComplexMatrix::zeros(0),
            esym: Vec::new(),
        };
        e.refresh();
        e
    }

    fn refresh(&mut self) {
        let sub = HermitianMatrix::new_unchecked(submatrix_by_indices0(
            self.matrix.matrix(),
            &self.remaining,
        ));
        let (vals, vecs) = linalg::hermitian_eigen(&sub);
        // elementary symmetric polynomials e_0..e_keep of the eigenvalues
        let cap = self.keep.min(vals.len());
        let mut esym = vec![0.0; cap + 1];
        esym[0] = 1.0;
        for &lam in &vals {
            for s in (1..=cap).rev() {
                esym[s] += lam * esym[s - 1];
            }
        }
        self.evals = vals;
        self.evecs = vecs;
        self.esym = esym;
    }

    fn node_poly(&self) -> RealPolynomial {
        let deg = self.remaining.len();
        let cap = self.keep.min(deg);
        let top: Vec<f64> = (0..=cap)
            .map(|s| if s % 2 == 0 { self.esym[s] } else { -self.esym[s] })
            .collect();
        truncated_derivative_poly(&top, deg)
    }

    /// Candidate polynomial for deleting the element at `pos` in `remaining`.
    fn candidate_poly(&self, pos: usize) -> RealPolynomial {
        let l = self.remaining.len();
        let deg = l - 1;
        let cap = self.keep.min(deg);
        let mut top = vec![0.0; cap + 1];
        let mut e_down = vec![0.0; cap + 1];
        for p in 0..l {
            let w = self.evecs.get(pos, p).norm_sqr();
            if w == 0.0 {
                continue;
            }
            // downdate: e_s of the spectrum with λ_p removed
            let lam = self.evals[p];
            top[0] += w;
            e_down[0] = 1.0;
            for s in 1..=cap {
                e_down[s] = self.esym[s] - lam * e_down[s - 1];
            }
            for s in 1..=cap {
                let signed = if s % 2 == 0 { e_down[s] } else { -e_down[s] };
                top[s] += w * signed;
            }
        }
        truncated_derivative_poly(&top, deg)
    }

    fn delete(&mut self, pos: usize) {
        self.remaining.remove(pos);
        self.refresh();
    }
}

/// k≥2 engine. The coefficient identity behind it: for a k-tuple restricted
/// to an index set R, the coefficient of x^{|R|−j} in χ[𝐀(R)] equals
/// (−1)ʲ·k⁻ʲ·Σ_{U⊆R, |U|=j} D[𝐀(U)], where D is the mixed determinant of
/// the j-dimensional restricted tuple. Since every candidate polynomial in
/// the walk has degree `keep` after differentiation, only coefficients with
/// j ≤ keep matter, so the engine precomputes D[𝐀(U)] for all |U| ≤ keep
/// and answers each step with one pass over that table.
struct SubsetSumEngine {
    k: usize,
    keep: usize,
    entries: Vec<(u64, f64)>,
    remaining: Vec<usize>,
    remaining_mask: u64,
}

impl SubsetSumEngine {
    fn new(tuple: &HermitianTuple, keep: usize, budget: EnumerationBudget) -> Result<Self> {
        let n = tuple.dim();
        let k = tuple.k();
        if n > 63 {
            return Err(MdpError::InvalidArgument(format!(
                "restricted selection supports n ≤ 63, got {n}"
            )));
        }
        let mut required: u128 = 0;
        for j in 0..=keep {
            required = required.saturating_add(
                binom_u128(n, j).saturating_mul((k as u128).saturating_pow(j as u32)),
            );
        }
        budget.check(required)?;

        // Subset determinants per matrix, all masks of size ≤ keep.
        let mut det_memo: Vec<HashMap<u64, f64>> = vec![HashMap::new(); k];
        let mut masks: Vec<u64> = Vec::new();
        gen_subsets(n, 0, keep, 0, &mut |mask| masks.push(mask));
        for (i, memo) in det_memo.iter_mut().enumerate() {
            let m = tuple.matrix(i).matrix();
            for &mask in &masks {
                let idx = mask_indices(mask);
                memo.insert(mask, linalg::subset_det(m, &idx).re);
            }
        }

        // Mixed determinants D[𝐀(U)] by enumerating the k^{|U|} block
        // assignments of each subset U.
        let mut entries = Vec::with_capacity(masks.len());
        for &mask in &masks {
            if mask == 0 {
                continue;
            }
            let elems = mask_indices(mask);
            let mut total = 0.0f64;
            let mut block_masks = vec![0u64; k];
            assign_elements(&elems, 0, &mut block_masks, &mut |bm| {
                let mut prod = 1.0;
                for (i, &b) in bm.iter().enumerate() {
                    prod *= det_memo[i][&b];
                }
                total += prod;
            });
            entries.push((mask, total));
        }

        Ok(SubsetSumEngine {
            k,
            keep,
            entries,
            remaining: (0..n).collect(),
            remaining_mask: if n == 64 { u64::MAX } else { (1u64 << n) - 1 },
        })
    }

    /// One pass over the table: totals[j] = Σ_{|U|=j, U⊆R} D[𝐀(U)] and
    /// acc[i][j] the sub-sums over U ∋ i. Also drops entries that left R.
    fn scan(&mut self, n: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
        let keep = self.keep;
        let mut totals = vec![0.0f64; keep + 1];
        let mut comp = vec![0.0f64; keep + 1];
        let mut acc = vec![vec![0.0f64; keep + 1]; n];
        let rmask = self.remaining_mask;
        self.entries.retain(|&(mask, v)| {
            if mask & !rmask != 0 {
                return false;
            }
            let j = mask.count_ones() as usize;
            // Kahan-compensated totals; the table can hold ~10⁶ terms.
            let y = v - comp[j];
            let t = totals[j] + y;
            comp[j] = (t - totals[j]) - y;
            totals[j] = t;
            let mut m = mask;
            while m != 0 {
                let b = m.trailing_zeros() as usize;
                acc[b][j] += v;
                m &= m - 1;
            }
            true
        });
        (totals, acc)
    }

    fn top_from_sums(&self, sums: &[f64], cap: usize) -> Vec<f64> {
        let mut top = vec![0.0; cap + 1];
        top[0] = 1.0;
        let mut kpow = 1.0;
        for j in 1..=cap {
            kpow *= self.k as f64;
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            top[j] = sign * sums[j] / kpow;
        }
        top
    }
}

fn gen_subsets(n: usize, start: usize, left: usize, mask: u64, f: &mut impl FnMut(u64)) {
    f(mask);
    if left == 0 {
        return;
    }
    for i in start..n {
        gen_subsets(n, i + 1, left - 1, mask | (1 << i), f);
    }
}

fn assign_elements(elems: &[usize], pos: usize, masks: &mut Vec<u64>, leaf: &mut impl FnMut(&[u64])) {
    if pos == elems.len() {
        leaf(masks);
        return;
    }
    let bit = 1u64 << elems[pos];
    for i in 0..masks.len() {
        masks[i] |= bit;
        assign_elements(elems, pos + 1, masks, leaf);
        masks[i] &= !bit;
    }
}

enum RestrictedEngine<'a> {
    Spectral(SpectralEngine<'a>),
    Subset(SubsetSumEngine),
}

impl<'a> RestrictedEngine<'a> {
    fn new(tuple: &'a HermitianTuple, keep: usize, budget: EnumerationBudget) -> Result<Self> {
        if tuple.k() == 1 {
            Ok(RestrictedEngine::Spectral(SpectralEngine::new(tuple.matrix(0), keep)))
        } else {
            Ok(RestrictedEngine::Subset(SubsetSumEngine::new(tuple, keep, budget)?))
        }
    }

    fn remaining(&self) -> &[usize] {
        match self {
            RestrictedEngine::Spectral(e) => &e.remaining,
            RestrictedEngine::Subset(e) => &e.remaining,
        }
    }

    fn node_poly(&mut self) -> RealPolynomial {
        match self {
            RestrictedEngine::Spectral(e) => e.node_poly(),
            RestrictedEngine::Subset(e) => {
                let deg = e.remaining.len();
                let cap = e.keep.min(deg);
                let (totals, _) = e.scan(64);
                let top = e.top_from_sums(&totals, cap);
                truncated_derivative_poly(&top, deg)
            }
        }
    }

    /// Candidate polynomials for deleting each remaining index, in ascending
    /// index order: (global index, polynomial).
    fn candidate_polys(&mut self) -> Vec<(usize, RealPolynomial)> {
        match self {
            RestrictedEngine::Spectral(e) => (0..e.remaining.len())
                .map(|pos| (e.remaining[pos], e.candidate_poly(pos)))
                .collect(),
            RestrictedEngine::Subset(e) => {
                let deg = e.remaining.len() - 1;
                let cap = e.keep.min(deg);
                let (totals, acc) = e.scan(64);
                e.remaining
                    .iter()
                    .map(|&i| {
                        let sums: Vec<f64> = (0..=e.keep)
                            .map(|j| totals[j] - acc[i][j])
                            .collect();
                        let top = e.top_from_sums(&sums, cap);
                        (i, truncated_derivative_poly(&top, deg))
                    })
                    .collect()
            }
        }
    }

    fn delete(&mut self, global_index: usize) {
        match self {
            RestrictedEngine::Spectral(e) => {
                let pos = e.remaining.iter().position(|&i| i == global_index).unwrap();
                e.delete(pos);
            }
            RestrictedEngine::Subset(e) => {
                e.remaining.retain(|&i| i != global_index);
                e.remaining_mask &= !(1u64 << global_index);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Check of the deletion/derivative identity
/// m!·Σ_{|S|=m} χ[𝐀_S] = χ⁽ᵐ⁾[𝐀]: returns (summed lhs, differentiated rhs).
pub fn derivative_identity_check(
    tuple: &HermitianTuple,
    m: usize,
    budget: EnumerationBudget,
) -> Result<(RealPolynomial, RealPolynomial)> {
    let n = tuple.dim();
    if m > n {
        return Err(MdpError::InvalidArgument(format!("m = {m} exceeds dimension {n}")));
    }
    let per_term = EnumerationBudget::partition_count(tuple.k(), n - m);
    budget.check(binom_u128(n, m).saturating_mul(per_term))?;

    let engine = PartitionEngine::new(tuple, budget);
    let full = engine.full_mask();
    let mut masks = Vec::new();
    gen_size_subsets(n, 0, m, 0, &mut masks);
    let mut sum = RealPolynomial::zero();
    for mask in masks {
        sum = sum.add(&engine.mdp_keep_mask(full & !mask)?);
    }
    let m_factorial: f64 = (1..=m).map(|t| t as f64).product();
    let lhs = sum.scale(m_factorial);
    let rhs = polynomial::derivative(&engine.mdp_keep_mask(full)?, m);
    Ok((lhs, rhs))
}

fn gen_size_subsets(n: usize, start: usize, left: usize, mask: u64, out: &mut Vec<u64>) {
    if left == 0 {
        out.push(mask);
        return;
    }
    for i in start..=(n - left) {
        gen_size_subsets(n, i + 1, left - 1, mask | (1 << i), out);
    }
}

/// Greedy one-at-a-time deletion walk: from the m-th derivative of the
/// tuple's χ (m = n − keep), delete indices so the node's largest root never
/// increases, consuming one derivative order per deletion. Ties are broken
/// by deleting the largest admissible index, which steers the kept set
/// toward the smallest indices.
pub fn greedy_restricted(
    tuple: &HermitianTuple,
    keep: usize,
    budget: EnumerationBudget,
) -> Result<SelectionReport> {
    let n = tuple.dim();
    let k = tuple.k();
    if keep > n {
        return Err(MdpError::InvalidArgument(format!("keep = {keep} exceeds dimension {n}")));
    }
    let alpha = tuple.mean_square_trace_density() / k as f64;
    if keep == 0 {
        return Ok(SelectionReport {
            kept_set: Vec::new(),
            per_matrix_lambda_max: vec![f64::NEG_INFINITY; k],
            certified_root_bound: f64::NEG_INFINITY,
            theorem_bound: f64::NEG_INFINITY,
            analytic_shrink_bound: None,
            n,
            k,
            m: n,
            c: 0.0,
            alpha,
            root_trace: Vec::new(),
        });
    }

    let mut engine = RestrictedEngine::new(tuple, keep, budget)?;
    let mut node_value = polynomial::largest_root(&engine.node_poly())?;
    let mut trace = vec![node_value];

    for step in 0..(n - keep) {
        let candidates = engine.candidate_polys();
        let mut roots = Vec::with_capacity(candidates.len());
        for (idx, poly) in &candidates {
            roots.push((*idx, polynomial::largest_root(poly)?));
        }
        let pick = select_deletion(&roots, node_value, step)?;
        engine.delete(pick.0);
        node_value = pick.1;
        trace.push(node_value);
    }

    let sigma0 = engine.remaining().to_vec();
    let per_matrix_lambda_max: Vec<f64> = tuple
        .matrices()
        .iter()
        .map(|m| lambda_max_restricted(m, &sigma0))
        .collect();
    let certified = trace[0];
    Ok(SelectionReport {
        kept_set: sigma0.iter().map(|&i| i + 1).collect(),
        per_matrix_lambda_max,
        certified_root_bound: certified,
        theorem_bound: k as f64 * certified,
        analytic_shrink_bound: None,
        n,
        k,
        m: n - keep,
        c: keep as f64 / n as f64,
        alpha,
        root_trace: trace,
    })
}

/// Largest admissible index at the standard tolerance, retried once relaxed.
fn select_deletion(roots: &[(usize, f64)], node_value: f64, step: usize) -> Result<(usize, f64)> {
    for tol in [tol::GREEDY_STEP_TOL, tol::GREEDY_STEP_TOL_RELAXED] {
        let admissible = roots
            .iter()
            .filter(|&&(_, r)| r <= node_value + tol)
            .max_by_key(|&&(idx, _)| idx);
        if let Some(&(idx, r)) = admissible {
            return Ok((idx, r));
        }
    }
    let best = roots.iter().map(|&(_, r)| r).fold(f64::INFINITY, f64::min);
    Err(MdpError::NoAdmissibleIndex { step, best, node: node_value })
}

/// Shrinkage bound c(1−α) + 2√(c(1−c)α) for the largest root of the
/// (1−c)n-th derivative of a degree-n polynomial with roots in [−1,1],
/// root mean 0 and root mean-square α.
pub fn root_shrink_bound(c: f64, alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(MdpError::InvalidArgument(format!("alpha = {alpha} outside [0,1]")));
    }
    if c < 0.0 || c > 1.0 / (1.0 + alpha) + 1e-12 {
        return Err(MdpError::InvalidArgument(format!(
            "c = {c} outside [0, 1/(1+α)] = [0, {:.6}]",
            1.0 / (1.0 + alpha)
        )));
    }
    Ok(c * (1.0 - alpha) + 2.0 * (c * (1.0 - c) * alpha).sqrt())
}

/// Restricted-invertibility pipeline: keep ⌊nε²/6k⌋ indices via the greedy
/// walk and certify λmax(A⁽ʲ⁾(σ)) < ε for every member. An ε too small for
/// the dimension yields the degenerate empty selection, not an error.
pub fn joint_restricted_invertibility(
    tuple: &HermitianTuple,
    epsilon: f64,
    budget: EnumerationBudget,
) -> Result<SelectionReport> {
    if !(0.0..1.0).contains(&epsilon) || epsilon == 0.0 {
        return Err(MdpError::InvalidArgument(format!("epsilon = {epsilon} outside (0,1)")));
    }
    tuple.require_zero_diagonal()?;
    tuple.require_contraction()?;
    let n = tuple.dim();
    let k = tuple.k();
    let c = epsilon * epsilon / (6.0 * k as f64);
    let keep = (n as f64 * c).floor() as usize;

    let mut report = greedy_restricted(tuple, keep, budget)?;
    report.c = c;
    report.theorem_bound = epsilon;
    let shrink = root_shrink_bound(c, report.alpha.clamp(0.0, 1.0))?;
    report.analytic_shrink_bound = Some(k as f64 * shrink);

    if keep > 0 {
        if report.certified_root_bound > shrink + tol::BOUND_SLACK {
            return Err(MdpError::BoundViolation {
                detail: format!(
                    "certified root {:.12} exceeds shrinkage bound {:.12}",
                    report.certified_root_bound, shrink
                ),
            });
        }
        for (j, &lam) in report.per_matrix_lambda_max.iter().enumerate() {
            if lam >= epsilon {
                return Err(MdpError::BoundViolation {
                    detail: format!(
                        "λmax of member {} on σ is {:.12}, not below ε = {}",
                        j + 1,
                        lam,
                        epsilon
                    ),
                });
            }
        }
    }
    Ok(report)
}

/// Expected paving polynomial over all completions of a partial assignment:
/// q(T) = r^{m−n}·Σ_{S ≻ T} χ[paved by S].
pub fn q_polynomial(
    tuple: &HermitianTuple,
    t: &PartialAssignment,
    budget: EnumerationBudget,
) -> Result<RealPolynomial> {
    let engine = PartitionEngine::new(tuple, budget);
    q_polynomial_with_engine(tuple, t, budget, &engine)
}

fn q_polynomial_with_engine(
    tuple: &HermitianTuple,
    t: &PartialAssignment,
    budget: EnumerationBudget,
    engine: &PartitionEngine,
) -> Result<RealPolynomial> {
    let n = tuple.dim();
    if t.n() != n {
        return Err(MdpError::DimensionMismatch { expected: n, got: t.n() });
    }
    let r = t.r();
    let free = n - t.assigned();
    let extensions = (r as u128).saturating_pow(free as u32);
    budget.check(extensions.saturating_mul(EnumerationBudget::partition_count(tuple.k(), n)))?;

    let mut block_masks: Vec<u64> = (0..r).map(|b| t.block_mask(b)).collect();
    let mut acc = vec![0.0f64; n + 1];
    let mut comp = vec![0.0f64; n + 1];
    q_extend(
        engine,
        &mut block_masks,
        t.assigned(),
        n,
        &mut |masks, eng| -> Result<()> {
            let mut prod = RealPolynomial::constant(1.0);
            for &bm in masks.iter() {
                prod = prod.mul(&eng.mdp_keep_mask(bm)?);
            }
            for (j, &c) in prod.coeffs().iter().enumerate() {
                let y = c - comp[j];
                let t2 = acc[j] + y;
                comp[j] = (t2 - acc[j]) - y;
                acc[j] = t2;
            }
            Ok(())
        },
    )?;
    let norm = extensions as f64;
    Ok(RealPolynomial::new(acc.into_iter().map(|c| c / norm).collect()))
}

fn q_extend(
    engine: &PartitionEngine,
    masks: &mut Vec<u64>,
    next: usize,
    n: usize,
    leaf: &mut impl FnMut(&[u64], &PartitionEngine) -> Result<()>,
) -> Result<()> {
    if next == n {
        return leaf(masks, engine);
    }
    let bit = 1u64 << next;
    for b in 0..masks.len() {
        masks[b] |= bit;
        q_extend(engine, masks, next + 1, n, leaf)?;
        masks[b] &= !bit;
    }
    Ok(())
}

/// Greedy paving walk: assign indices 1…n to one of r blocks, at each step
/// picking the block whose child q-polynomial has the smallest largest root
/// (ties to the smallest block). The root trace is asserted nonincreasing.
pub fn greedy_paving(
    tuple: &HermitianTuple,
    r: usize,
    budget: EnumerationBudget,
) -> Result<PavingReport> {
    if r == 0 {
        return Err(MdpError::InvalidArgument("r must be ≥ 1".to_string()));
    }
    let n = tuple.dim();
    let k = tuple.k();
    budget.check(EnumerationBudget::partition_count(r * k, n))?;

    let engine = PartitionEngine::new(tuple, budget);
    let mut t = PartialAssignment::empty(n, r)?;
    let root0 =
        polynomial::largest_root(&q_polynomial_with_engine(tuple, &t, budget, &engine)?)?;
    let mut trace = vec![root0];

    for step in 0..n {
        let mut best: Option<(usize, f64)> = None;
        for b in 0..r {
            let child = t.extend(b)?;
            let q = q_polynomial_with_engine(tuple, &child, budget, &engine)?;
            let root = polynomial::largest_root(&q)?;
            if best.is_none() || root < best.unwrap().1 {
                best = Some((b, root));
            }
        }
        let (b, root) = best.unwrap();
        let prev = *trace.last().unwrap();
        if root > prev + tol::GREEDY_STEP_TOL {
            return Err(MdpError::MonotonicityViolation { step, previous: prev, current: root });
        }
        t = t.extend(b)?;
        trace.push(root);
    }

    let paving = t.to_assignment()?;
    let per_block_per_matrix_lambda_max: Vec<Vec<f64>> = (0..r)
        .map(|b| {
            let idx = paving.block(b);
            tuple
                .matrices()
                .iter()
                .map(|m| lambda_max_restricted(m, &idx))
                .collect()
        })
        .collect();

    let rk = r * k;
    let rootbound = if rk >= 2 { 3.0 * 2.0f64.sqrt() / (rk as f64).sqrt() } else { f64::INFINITY };
    Ok(PavingReport {
        paving,
        r,
        k,
        n,
        per_block_per_matrix_lambda_max,
        greedy_root_trace: trace,
        expected_poly_root: root0,
        rootbound_3sqrt2: rootbound,
        epsilon: k as f64 * rootbound,
        per_block_operator_norm: None,
    })
}

/// Deviation between the average of the r children q(T∪e^i) and q(T),
/// relative to the parent's largest coefficient magnitude.
pub fn interlacing_average_check(
    tuple: &HermitianTuple,
    t: &PartialAssignment,
    budget: EnumerationBudget,
) -> Result<f64> {
    if t.is_complete() {
        return Err(MdpError::InvalidArgument(
            "partial assignment already complete; no children to average".to_string(),
        ));
    }
    let engine = PartitionEngine::new(tuple, budget);
    let parent = q_polynomial_with_engine(tuple, t, budget, &engine)?;
    let mut mean = RealPolynomial::zero();
    for b in 0..t.r() {
        let child = t.extend(b)?;
        mean = mean.add(&q_polynomial_with_engine(tuple, &child, budget, &engine)?);
    }
    mean = mean.scale(1.0 / t.r() as f64);
    let scale = parent.coeffs().iter().fold(1.0f64, |m, c| m.max(c.abs()));
    Ok(mean.max_coeff_deviation(&parent) / scale)
}

/// Analytic root bound 3√2/√k for the χ of a k-tuple of zero-diagonal
/// Hermitian contractions, valid for k ≥ 2.
pub fn rootbound_value(k: usize) -> Result<f64> {
    if k < 2 {
        return Err(MdpError::InvalidArgument(format!("rootbound_value requires k ≥ 2, got {k}")));
    }
    Ok(3.0 * 2.0f64.sqrt() / (k as f64).sqrt())
}

/// Joint-paving pipeline: pave a zero-diagonal contraction tuple into
/// r = ⌈18k/ε²⌉ blocks (or an explicit r in verification mode) and certify
/// per-block λmax(A⁽ʲ⁾(X_b)) below the operator-norm target — the requested
/// ε for the derived r, or the analytic 3√2·√(k/r) for an explicit r.
pub fn multipave(
    tuple: &HermitianTuple,
    epsilon: f64,
    explicit_r: Option<usize>,
    budget: EnumerationBudget,
) -> Result<PavingReport> {
    if epsilon <= 0.0 || !epsilon.is_finite() {
        return Err(MdpError::InvalidArgument(format!("epsilon = {epsilon} must be positive")));
    }
    tuple.require_zero_diagonal()?;
    tuple.require_contraction()?;
    let k = tuple.k();
    let r = match explicit_r {
        Some(r) if r >= 1 => r,
        Some(r) => {
            return Err(MdpError::InvalidArgument(format!("explicit r = {r} must be ≥ 1")));
        }
        None => (18.0 * k as f64 / (epsilon * epsilon)).ceil() as usize,
    };

    let mut report = greedy_paving(tuple, r, budget)?;
    let target = if explicit_r.is_some() { report.epsilon } else { epsilon };
    report.epsilon = target;
    for (b, row) in report.per_block_per_matrix_lambda_max.iter().enumerate() {
        for (j, &lam) in row.iter().enumerate() {
            if lam >= target + tol::BOUND_SLACK {
                return Err(MdpError::BoundViolation {
                    detail: format!(
                        "block {} member {}: λmax {:.12} not below target {:.12}",
                        b + 1,
                        j + 1,
                        lam,
                        target
                    ),
                });
            }
        }
    }
    Ok(report)
}

/// Two-sided paving of a (possibly non-Hermitian) zero-diagonal contraction:
/// greedy paving of the 4-tuple (H, −H, K, −K) of its Cartesian parts, then
/// the triangle-inequality assembly ‖A(X_b)‖ ≤ ‖H(X_b)‖ + ‖K(X_b)‖, each
/// block certified below 12√2/√r.
pub fn two_sided_pave(
    a: &ComplexMatrix,
    r: usize,
    budget: EnumerationBudget,
) -> Result<PavingReport> {
    if !a.is_finite() {
        return Err(MdpError::NonFiniteEntry);
    }
    let n = a.dim();
    let max_diag = (0..n).map(|i| a.get(i, i).norm()).fold(0.0f64, f64::max);
    if max_diag > tol::ZERO_DIAGONAL_TOL {
        return Err(MdpError::NonZeroDiagonal { max_abs: max_diag, tol: tol::ZERO_DIAGONAL_TOL });
    }
    let norm = linalg::operator_norm(a);
    if norm > 1.0 + tol::CONTRACTION_TOL {
        return Err(MdpError::NotContraction { norm, tol: tol::CONTRACTION_TOL });
    }

    let (h, kk) = a.cartesian_parts();
    let tuple = HermitianTuple::new(vec![
        HermitianMatrix::new_unchecked(h.clone()),
        HermitianMatrix::new_unchecked(h.scale_real(-1.0)),
        HermitianMatrix::new_unchecked(kk.clone()),
        HermitianMatrix::new_unchecked(kk.scale_real(-1.0)),
    ])?;
    let mut report = greedy_paving(&tuple, r, budget)?;

    let bound = 12.0 * 2.0f64.sqrt() / (r as f64).sqrt();
    let mut norms = Vec::with_capacity(r);
    for b in 0..r {
        let idx = report.paving.block(b);
        let block_norm = linalg::operator_norm(&submatrix_by_indices0(a, &idx));
        if block_norm >= bound + tol::BOUND_SLACK {
            return Err(MdpError::BoundViolation {
                detail: format!(
                    "block {}: ‖A(X)‖ = {:.12} not below 12√2/√r = {:.12}",
                    b + 1,
                    block_norm,
                    bound
                ),
            });
        }
        norms.push(block_norm);
    }
    report.epsilon = bound;
    report.per_block_operator_norm = Some(norms);
    Ok(report)
}

/// Split oversized blocks of an r-part paving of [m] into chunks of size
/// ⌊m/r⌋ (plus one smaller remainder each); empty blocks are dropped. The
/// result has at most 2r blocks, and every new block is a subset of an old
/// one, so compression norms never increase.
pub fn balance_blocks(paving: &Assignment, r: usize, m: usize) -> Result<Assignment> {
    if paving.n() != m {
        return Err(MdpError::DimensionMismatch { expected: m, got: paving.n() });
    }
    if paving.r() != r {
        return Err(MdpError::DimensionMismatch { expected: r, got: paving.r() });
    }
    let cap = (m / r).max(1);
    let mut new_blocks: Vec<Vec<usize>> = Vec::new();
    for block in paving.blocks() {
        if block.is_empty() {
            continue;
        }
        for chunk in block.chunks(cap) {
            new_blocks.push(chunk.to_vec());
        }
    }
    debug_assert!(new_blocks.len() <= 2 * r, "block count {} exceeds 2r = {}", new_blocks.len(), 2 * r);
    Assignment::from_blocks(m, &new_blocks)
}

/// Joint paving of a k×k block matrix (blocks n×n, each with zero diagonal,
/// ‖A‖ ≤ 1) by paving the Hermitian Cartesian parts of its blocks jointly.
/// When every off-diagonal block vanishes, only the k diagonal blocks are
/// paved (at the sharper level ε/2 per Hermitian part); otherwise all k²
/// blocks are paved at ε/(2k) and assembled with the block-row triangle
/// bound. If the derived r is enumeration-infeasible, falls back to the
/// singleton paving, which is a valid direct certificate because every
/// diagonal entry of every block is zero.
pub fn vectorial_pave(
    block_matrix: &ComplexMatrix,
    k: usize,
    epsilon: f64,
    explicit_r: Option<usize>,
    budget: EnumerationBudget,
) -> Result<PavingReport> {
    if k == 0 {
        return Err(MdpError::InvalidArgument("k must be ≥ 1".to_string()));
    }
    let dim = block_matrix.dim();
    if dim % k != 0 || dim == 0 {
        return Err(MdpError::DimensionMismatch { expected: k, got: dim });
    }
    if epsilon <= 0.0 {
        return Err(MdpError::InvalidArgument(format!("epsilon = {epsilon} must be positive")));
    }
    let n = dim / k;
    let norm = linalg::operator_norm(block_matrix);
    if norm > 1.0 + tol::CONTRACTION_TOL {
        return Err(MdpError::NotContraction { norm, tol: tol::CONTRACTION_TOL });
    }

    // Extract blocks and validate the zero-diagonal structure.
    let mut blocks: Vec<Vec<ComplexMatrix>> = Vec::with_capacity(k);
    let mut off_diagonal_present = false;
    for i in 0..k {
        let mut row = Vec::with_capacity(k);
        for j in 0..k {
            let b = ComplexMatrix::from_fn(n, |s, t| block_matrix.get(i * n + s, j * n + t));
            let d = (0..n).map(|s| b.get(s, s).norm()).fold(0.0f64, f64::max);
            if d > tol::ZERO_DIAGONAL_TOL {
                return Err(MdpError::NonZeroDiagonal { max_abs: d, tol: tol::ZERO_DIAGONAL_TOL });
            }
            if i != j && b.max_abs_entry() > 1e-14 {
                off_diagonal_present = true;
            }
            row.push(b);
        }
        blocks.push(row);
    }

    // Hermitian family and the per-matrix λmax target.
    let mut family: Vec<HermitianMatrix> = Vec::new();
    let mut push_parts = |m: &ComplexMatrix| {
        let (h, kk) = m.cartesian_parts();
        family.push(HermitianMatrix::new_unchecked(h.clone()));
        family.push(HermitianMatrix::new_unchecked(h.scale_real(-1.0)));
        family.push(HermitianMatrix::new_unchecked(kk.clone()));
        family.push(HermitianMatrix::new_unchecked(kk.scale_real(-1.0)));
    };
    let assembly = if off_diagonal_present { k as f64 } else { 1.0 };
    if off_diagonal_present {
        for i in 0..k {
            for j in 0..k {
                push_parts(&blocks[i][j]);
            }
        }
    } else {
        for i in 0..k {
            push_parts(&blocks[i][i]);
        }
    }
    let target_lambda = epsilon / (2.0 * assembly);
    let kf = family.len();
    let tuple = HermitianTuple::new(family)?;

    let r = match explicit_r {
        Some(r) if r >= 1 => r,
        Some(r) => {
            return Err(MdpError::InvalidArgument(format!("explicit r = {r} must be ≥ 1")));
        }
        None => (18.0 * kf as f64 / (target_lambda * target_lambda)).ceil() as usize,
    };

    let feasibility = budget.check(EnumerationBudget::partition_count(r * kf, n));
    let mut report = if feasibility.is_ok() {
        greedy_paving(&tuple, r, budget)?
    } else if explicit_r.is_some() {
        // The caller pinned r; refusing is the honest outcome.
        return Err(feasibility.unwrap_err());
    } else {
        // Singleton fallback: every block compression of a zero-diagonal
        // matrix on a single index is the zero 1×1 matrix.
        let paving = Assignment::new(n, n, (0..n).collect())?;
        let per_block: Vec<Vec<f64>> = (0..n)
            .map(|b| {
                let idx = paving.block(b);
                tuple.matrices().iter().map(|m| lambda_max_restricted(m, &idx)).collect()
            })
            .collect();
        let rk = n * kf;
        PavingReport {
            paving,
            r: n,
            k: kf,
            n,
            per_block_per_matrix_lambda_max: per_block,
            greedy_root_trace: Vec::new(),
            expected_poly_root: f64::NAN,
            rootbound_3sqrt2: if rk >= 2 {
                3.0 * 2.0f64.sqrt() / (rk as f64).sqrt()
            } else {
                f64::INFINITY
            },
            epsilon,
            per_block_operator_norm: None,
        }
    };

    // Certify the headline bound: ‖(I⊗P_b)A(I⊗P_b)‖ < ε for every block.
    let mut norms = Vec::with_capacity(report.r);
    for b in 0..report.r {
        let x = report.paving.block(b);
        let mut idx: Vec<usize> = Vec::with_capacity(k * x.len());
        for i in 0..k {
            for &s in &x {
                idx.push(i * n + s);
            }
        }
        idx.sort_unstable();
        let block_norm = linalg::operator_norm(&submatrix_by_indices0(block_matrix, &idx));
        if block_norm >= epsilon + tol::BOUND_SLACK {
            return Err(MdpError::BoundViolation {
                detail: format!(
                    "block {}: compressed norm {:.12} not below ε = {:.12}",
                    b + 1,
                    block_norm,
                    epsilon
                ),
            });
        }
        norms.push(block_norm);
    }
    report.epsilon = epsilon;
    report.per_block_operator_norm = Some(norms);
    Ok(report)
}
