//! Mixed determinants and mixed determinantal polynomials.
//!
//! The central object: for a k-tuple 𝐀 = (A⁽¹⁾,…,A⁽ᵏ⁾) of Hermitian n×n
//! matrices, the mixed determinantal polynomial is the average over all kⁿ
//! ordered partitions S₁⨿…⨿S_k = [n] of the products of characteristic
//! polynomials of the principal submatrices A⁽ⁱ⁾(Sᵢ). Everything here is
//! computed by exact enumeration over that partition space, backed by a memo
//! of subset characteristic polynomials, with an explicit term budget as the
//! guard rail.

use std::cell::RefCell;
use std::collections::HashMap;

use num_complex::Complex64;

use crate::budget::EnumerationBudget;
use crate::error::{MdpError, Result};
use crate::linalg::{
    self, ComplexMatrix, HermitianMatrix, HermitianTuple, scale_first_index,
    submatrix_by_indices0, validate_index_set,
};
use crate::polynomial::{self, RealPolynomial};

/// Ordered partition of [n] into r labelled blocks (blocks may be empty),
/// encoded as a map from element to block. Internally 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    n: usize,
    r: usize,
    map: Vec<usize>,
}

impl Assignment {
    /// `map[e]` is the 0-based block of element e (0-based).
    pub fn new(n: usize, r: usize, map: Vec<usize>) -> Result<Self> {
        if r == 0 {
            return Err(MdpError::InvalidArgument("part count r must be ≥ 1".to_string()));
        }
        if map.len() != n {
            return Err(MdpError::DimensionMismatch { expected: n, got: map.len() });
        }
        if let Some(&bad) = map.iter().find(|&&v| v >= r) {
            return Err(MdpError::InvalidArgument(format!(
                "assignment value {bad} out of range for {r} blocks"
            )));
        }
        Ok(Assignment { n, r, map })
    }

    /// Build from explicit 0-based blocks, which must partition {0,…,n−1}.
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let r = blocks.len().max(1);
        let mut map = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            for &e in block {
                if e >= n {
                    return Err(MdpError::IndexOutOfRange { index: e + 1, n });
                }
                if map[e] != usize::MAX {
                    return Err(MdpError::InvalidArgument(format!(
                        "element {} appears in two blocks",
                        e + 1
                    )));
                }
                map[e] = b;
            }
        }
        if let Some(e) = map.iter().position(|&v| v == usize::MAX) {
            return Err(MdpError::InvalidArgument(format!(
                "element {} missing from the partition",
                e + 1
            )));
        }
        Assignment::new(n, r, map)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    /// Elements of block b, ascending, 0-based.
    pub fn block(&self, b: usize) -> Vec<usize> {
        (0..self.n).filter(|&e| self.map[e] == b).collect()
    }

    pub fn block_mask(&self, b: usize) -> u64 {
        let mut mask = 0u64;
        for e in 0..self.n {
            if self.map[e] == b {
                mask |= 1 << e;
            }
        }
        mask
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        (0..self.r).map(|b| self.block(b)).collect()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.r];
        for &b in &self.map {
            sizes[b] += 1;
        }
        sizes
    }
}

/// Assignment of a prefix [m] ⊆ [n] to r labelled blocks; the tail is still
/// free. The greedy paving search walks these from m=0 to m=n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialAssignment {
    n: usize,
    r: usize,
    map: Vec<usize>,
}

impl PartialAssignment {
    pub fn new(n: usize, r: usize, map: Vec<usize>) -> Result<Self> {
        if r == 0 {
            return Err(MdpError::InvalidArgument("part count r must be ≥ 1".to_string()));
        }
        if map.len() > n {
            return Err(MdpError::DimensionMismatch { expected: n, got: map.len() });
        }
        if let Some(&bad) = map.iter().find(|&&v| v >= r) {
            return Err(MdpError::InvalidArgument(format!(
                "assignment value {bad} out of range for {r} blocks"
            )));
        }
        Ok(PartialAssignment { n, r, map })
    }

    pub fn empty(n: usize, r: usize) -> Result<Self> {
        Self::new(n, r, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Number of elements already assigned.
    pub fn assigned(&self) -> usize {
        self.map.len()
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    /// Assign the next element (index `assigned()`) to block b.
    pub fn extend(&self, b: usize) -> Result<Self> {
        if self.map.len() == self.n {
            return Err(MdpError::InvalidArgument("partial assignment already complete".to_string()));
        }
        if b >= self.r {
            return Err(MdpError::InvalidArgument(format!(
                "block {b} out of range for {} blocks",
                self.r
            )));
        }
        let mut map = self.map.clone();
        map.push(b);
        PartialAssignment::new(self.n, self.r, map)
    }

    pub fn is_complete(&self) -> bool {
        self.map.len() == self.n
    }

    pub fn to_assignment(&self) -> Result<Assignment> {
        if !self.is_complete() {
            return Err(MdpError::InvalidArgument(format!(
                "partial assignment covers {} of {} elements",
                self.map.len(),
                self.n
            )));
        }
        Assignment::new(self.n, self.r, self.map.clone())
    }

    /// Mask of prefix elements currently in block b.
    pub fn block_mask(&self, b: usize) -> u64 {
        let mut mask = 0u64;
        for (e, &blk) in self.map.iter().enumerate() {
            if blk == b {
                mask |= 1 << e;
            }
        }
        mask
    }
}

pub(crate) fn mask_indices(mask: u64) -> Vec<usize> {
    let mut idx = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        let b = m.trailing_zeros() as usize;
        idx.push(b);
        m &= m - 1;
    }
    idx
}

/// Compensated scalar accumulator, mirroring the complex one in `linalg`.
#[derive(Clone, Copy, Default)]
struct KahanF64 {
    sum: f64,
    comp: f64,
}

impl KahanF64 {
    #[inline]
    fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }
}

fn mul_into(a: &[f64], b: &[f64], out: &mut Vec<f64>) {
    out.clear();
    if a.is_empty() || b.is_empty() {
        return;
    }
    out.resize(a.len() + b.len() - 1, 0.0);
    for (i, &x) in a.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
}

/// Enumeration engine for one tuple: lazily memoizes subset characteristic
/// polynomials (k·2ⁿ worst case) and subset-restricted mixed determinantal
/// polynomials. Single-threaded by design; all outputs are deterministic
/// functions of the tuple and budget.
pub(crate) struct PartitionEngine<'a> {
    tuple: &'a HermitianTuple,
    budget: EnumerationBudget,
    char_memo: RefCell<Vec<HashMap<u64, Vec<f64>>>>,
    keep_memo: RefCell<HashMap<u64, RealPolynomial>>,
}

impl<'a> PartitionEngine<'a> {
    pub(crate) fn new(tuple: &'a HermitianTuple, budget: EnumerationBudget) -> Self {
        let k = tuple.k();
        PartitionEngine {
            tuple,
            budget,
            char_memo: RefCell::new(vec![HashMap::new(); k]),
            keep_memo: RefCell::new(HashMap::new()),
        }
    }

    pub(crate) fn full_mask(&self) -> u64 {
        if self.tuple.dim() == 64 { u64::MAX } else { (1u64 << self.tuple.dim()) - 1 }
    }

    /// Ensure char polys of every submask of `mask` exist for matrix i.
    fn prefill_chars(&self, i: usize, mask: u64) -> Result<()> {
        let mut memo = self.char_memo.borrow_mut();
        let map = &mut memo[i];
        let mut sub = mask;
        loop {
            if !map.contains_key(&sub) {
                let idx = mask_indices(sub);
                let m = submatrix_by_indices0(self.tuple.matrix(i).matrix(), &idx);
                let p = linalg::char_poly(&m)?;
                map.insert(sub, p.coeffs().to_vec());
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & mask;
        }
        Ok(())
    }

    /// χ of the tuple restricted to `mask`: the average over k^{|mask|}
    /// ordered partitions of the masked index set.
    pub(crate) fn mdp_keep_mask(&self, mask: u64) -> Result<RealPolynomial> {
        if let Some(p) = self.keep_memo.borrow().get(&mask) {
            return Ok(p.clone());
        }
        let k = self.tuple.k();
        let m = mask.count_ones() as usize;
        self.budget.check(EnumerationBudget::partition_count(k, m))?;

        let result = if k == 1 {
            // Single partition: the plain characteristic polynomial.
            let idx = mask_indices(mask);
            let sub = submatrix_by_indices0(self.tuple.matrix(0).matrix(), &idx);
            linalg::char_poly(&sub)?
        } else {
            for i in 0..k {
                self.prefill_chars(i, mask)?;
            }
            let memo = self.char_memo.borrow();
            let elems = mask_indices(mask);
            let mut acc = vec![KahanF64::default(); m + 1];
            let mut masks = vec![0u64; k];
            let mut scratch_a: Vec<f64> = Vec::with_capacity(m + 1);
            let mut scratch_b: Vec<f64> = Vec::with_capacity(m + 1);
            enumerate_blocks(&elems, 0, &mut masks, &mut |block_masks| {
                scratch_a.clear();
                scratch_a.extend_from_slice(&memo[0][&block_masks[0]]);
                for i in 1..k {
                    mul_into(&scratch_a, &memo[i][&block_masks[i]], &mut scratch_b);
                    std::mem::swap(&mut scratch_a, &mut scratch_b);
                }
                for (j, &c) in scratch_a.iter().enumerate() {
                    acc[j].add(c);
                }
            });
            let norm = (k as f64).powi(m as i32);
            RealPolynomial::new(acc.into_iter().map(|s| s.sum / norm).collect())
        };
        self.keep_memo.borrow_mut().insert(mask, result.clone());
        Ok(result)
    }
}

/// Visit every assignment of `elems[pos..]` to k blocks, maintaining the
/// per-block masks in place.
fn enumerate_blocks(
    elems: &[usize],
    pos: usize,
    masks: &mut Vec<u64>,
    leaf: &mut impl FnMut(&[u64]),
) {
    if pos == elems.len() {
        leaf(masks);
        return;
    }
    let bit = 1u64 << elems[pos];
    for i in 0..masks.len() {
        masks[i] |= bit;
        enumerate_blocks(elems, pos + 1, masks, leaf);
        masks[i] &= !bit;
    }
}

/// Mixed determinant D[A⁽¹⁾,…,A⁽ᵏ⁾]: sum over ordered k-partitions of [n]
/// of the products of principal-minor determinants, with det of an empty
/// block equal to 1.
pub fn mixed_determinant(ms: &[ComplexMatrix], budget: EnumerationBudget) -> Result<Complex64> {
    if ms.is_empty() {
        return Err(MdpError::InvalidArgument("tuple must contain at least one matrix".to_string()));
    }
    let n = ms[0].dim();
    for m in ms {
        if m.dim() != n {
            return Err(MdpError::DimensionMismatch { expected: n, got: m.dim() });
        }
    }
    let k = ms.len();
    budget.check(EnumerationBudget::partition_count(k, n))?;

    // Memoize subset determinants per matrix.
    let mut det_memo: Vec<HashMap<u64, Complex64>> = vec![HashMap::new(); k];
    let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    for (i, m) in ms.iter().enumerate() {
        let mut sub = full;
        loop {
            let idx = mask_indices(sub);
            det_memo[i].insert(sub, linalg::subset_det(m, &idx));
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & full;
        }
    }

    let elems: Vec<usize> = (0..n).collect();
    let mut acc = linalg::KahanComplex::new();
    let mut masks = vec![0u64; k];
    enumerate_blocks(&elems, 0, &mut masks, &mut |block_masks| {
        let mut prod = Complex64::new(1.0, 0.0);
        for (i, &bm) in block_masks.iter().enumerate() {
            prod *= det_memo[i][&bm];
        }
        acc.add(prod);
    });
    Ok(acc.value())
}

/// Mixed determinantal polynomial χ[A⁽¹⁾,…,A⁽ᵏ⁾]: monic of degree n.
pub fn mdp(tuple: &HermitianTuple, budget: EnumerationBudget) -> Result<RealPolynomial> {
    let engine = PartitionEngine::new(tuple, budget);
    engine.mdp_keep_mask(engine.full_mask())
}

/// χ of the tuple with rows/columns in the 1-based set S removed.
pub fn mdp_delete(
    tuple: &HermitianTuple,
    s: &[usize],
    budget: EnumerationBudget,
) -> Result<RealPolynomial> {
    let removed = validate_index_set(s, tuple.dim())?;
    let mut mask = 0u64;
    for &i in &removed {
        mask |= 1 << i;
    }
    let engine = PartitionEngine::new(tuple, budget);
    engine.mdp_keep_mask(engine.full_mask() & !mask)
}

/// χ of the tuple restricted to the 1-based set S.
pub fn mdp_keep(
    tuple: &HermitianTuple,
    s: &[usize],
    budget: EnumerationBudget,
) -> Result<RealPolynomial> {
    let kept = validate_index_set(s, tuple.dim())?;
    let mut mask = 0u64;
    for &i in &kept {
        mask |= 1 << i;
    }
    let engine = PartitionEngine::new(tuple, budget);
    engine.mdp_keep_mask(mask)
}

/// χ of a paved collection: the product over blocks of the block-restricted
/// mixed determinantal polynomials. Monic of degree n.
pub fn paving_polynomial(
    tuple: &HermitianTuple,
    paving: &Assignment,
    budget: EnumerationBudget,
) -> Result<RealPolynomial> {
    if paving.n() != tuple.dim() {
        return Err(MdpError::DimensionMismatch { expected: tuple.dim(), got: paving.n() });
    }
    budget.check(EnumerationBudget::partition_count(tuple.k(), tuple.dim()))?;
    let engine = PartitionEngine::new(tuple, budget);
    let mut out = RealPolynomial::constant(1.0);
    for b in 0..paving.r() {
        out = out.mul(&engine.mdp_keep_mask(paving.block_mask(b))?);
    }
    Ok(out)
}

/// Check of the single-matrix dilution identity χ[A,0,…,0](x) = k⁻ⁿ·χ_A(kx):
/// returns (enumerated lhs, closed-form rhs).
pub fn single_matrix_identity_check(
    a: &HermitianMatrix,
    k: usize,
    budget: EnumerationBudget,
) -> Result<(RealPolynomial, RealPolynomial)> {
    if k == 0 {
        return Err(MdpError::InvalidArgument("k must be ≥ 1".to_string()));
    }
    let n = a.dim();
    let mut matrices = vec![a.clone()];
    for _ in 1..k {
        matrices.push(HermitianMatrix::new(ComplexMatrix::zeros(n))?);
    }
    let tuple = HermitianTuple::new(matrices)?;
    let lhs = mdp(&tuple, budget)?;
    let rhs = polynomial::scale_argument(&linalg::char_poly(a.matrix())?, k as f64, true);
    Ok((lhs, rhs))
}

/// Largest root of χ[𝐀 ⧺ B_t] along a grid of t ≥ 0, where B_t scales the
/// first row/column of the zero-diagonal matrix B by √t. The returned values
/// are checked to be nondecreasing in t within 1e-8.
pub fn monotonicity_experiment(
    tuple_a: &HermitianTuple,
    b: &HermitianMatrix,
    t_grid: &[f64],
    budget: EnumerationBudget,
) -> Result<Vec<f64>> {
    if b.dim() != tuple_a.dim() {
        return Err(MdpError::DimensionMismatch { expected: tuple_a.dim(), got: b.dim() });
    }
    let diag = b.max_abs_diagonal();
    if diag > crate::tol::ZERO_DIAGONAL_TOL {
        return Err(MdpError::NonZeroDiagonal { max_abs: diag, tol: crate::tol::ZERO_DIAGONAL_TOL });
    }
    let mut values = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let bt = scale_first_index(b.matrix(), t)?;
        let mut matrices = tuple_a.matrices().to_vec();
        matrices.push(HermitianMatrix::new_unchecked(bt));
        let tuple = HermitianTuple::new(matrices)?;
        values.push(polynomial::largest_root(&mdp(&tuple, budget)?)?);
    }
    // Monotonicity contract, honoring arbitrary grid order.
    let mut order: Vec<usize> = (0..t_grid.len()).collect();
    order.sort_by(|&i, &j| t_grid[i].total_cmp(&t_grid[j]));
    for w in order.windows(2) {
        let (prev, cur) = (values[w[0]], values[w[1]]);
        if cur < prev - 1e-8 {
            return Err(MdpError::MonotonicityViolation { step: w[1], previous: prev, current: cur });
        }
    }
    Ok(values)
}

/// Expected characteristic polynomial of Σⱼ rⱼrⱼ*, where the j-th random
/// vector equals √k·v⁽ⁱ⁾ⱼ placed in the i-th of k ambient blocks with
/// probability 1/k. Exact enumeration over the kⁿ outcomes; degree kn.
pub fn mixed_char_poly_rank_mixture(
    families: &[Vec<Vec<Complex64>>],
    budget: EnumerationBudget,
) -> Result<RealPolynomial> {
    let k = families.len();
    if k == 0 {
        return Err(MdpError::InvalidArgument("need at least one vector family".to_string()));
    }
    let n = families[0].len();
    if n == 0 || n > 63 {
        return Err(MdpError::InvalidArgument(format!(
            "family size {n} outside supported range 1..=63"
        )));
    }
    for fam in families {
        if fam.len() != n {
            return Err(MdpError::DimensionMismatch { expected: n, got: fam.len() });
        }
        for v in fam {
            if v.len() != n {
                return Err(MdpError::DimensionMismatch { expected: n, got: v.len() });
            }
        }
    }
    budget.check(EnumerationBudget::partition_count(k, n))?;

    // Outcomes are block-diagonal: block i is k·Σ_{j∈S_i} vⱼⁱ(vⱼⁱ)*, an n×n
    // matrix whose char poly depends only on the subset S_i. Memoize those.
    let mut char_memo: Vec<HashMap<u64, Vec<f64>>> = vec![HashMap::new(); k];
    let full: u64 = (1u64 << n) - 1;
    for (i, fam) in families.iter().enumerate() {
        let mut sub = full;
        loop {
            let mut m = ComplexMatrix::zeros(n);
            for j in mask_indices(sub) {
                let v = &fam[j];
                for a in 0..n {
                    for b in 0..n {
                        let cur = m.get(a, b);
                        m.set(a, b, cur + v[a] * v[b].conj() * (k as f64));
                    }
                }
            }
            char_memo[i].insert(sub, linalg::char_poly(&m)?.coeffs().to_vec());
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & full;
        }
    }

    let elems: Vec<usize> = (0..n).collect();
    let mut acc = vec![KahanF64::default(); k * n + 1];
    let mut masks = vec![0u64; k];
    let mut scratch_a: Vec<f64> = Vec::with_capacity(k * n + 1);
    let mut scratch_b: Vec<f64> = Vec::with_capacity(k * n + 1);
    enumerate_blocks(&elems, 0, &mut masks, &mut |block_masks| {
        scratch_a.clear();
        scratch_a.extend_from_slice(&char_memo[0][&block_masks[0]]);
        for i in 1..k {
            mul_into(&scratch_a, &char_memo[i][&block_masks[i]], &mut scratch_b);
            std::mem::swap(&mut scratch_a, &mut scratch_b);
        }
        for (j, &c) in scratch_a.iter().enumerate() {
            acc[j].add(c);
        }
    });
    let norm = (k as f64).powi(n as i32);
    Ok(RealPolynomial::new(acc.into_iter().map(|s| s.sum / norm).collect()))
}

/// Bridge between the two polynomial families: for PSD B⁽¹⁾,…,B⁽ᵏ⁾,
/// x^{(k−1)n}·χ[kB⁽¹⁾,…,kB⁽ᵏ⁾] should equal the rank-mixture expected
/// characteristic polynomial built from any Gram factorization of the B⁽ⁱ⁾.
/// Returns (lhs, rhs) for comparison.
pub fn mdp_mcp_bridge_check(
    psd_tuple: &[HermitianMatrix],
    budget: EnumerationBudget,
) -> Result<(RealPolynomial, RealPolynomial)> {
    let k = psd_tuple.len();
    if k == 0 {
        return Err(MdpError::InvalidArgument("need at least one matrix".to_string()));
    }
    let n = psd_tuple[0].dim();
    let mut families = Vec::with_capacity(k);
    for bmat in psd_tuple {
        if bmat.dim() != n {
            return Err(MdpError::DimensionMismatch { expected: n, got: bmat.dim() });
        }
        let (vals, q) = linalg::hermitian_eigen(bmat);
        if let Some(&min) = vals.first() {
            if min < -1e-10 {
                return Err(MdpError::NotPsd { min_eig: min });
            }
        }
        // Columns of Λ^{1/2}Q* satisfy V*V = B.
        let v_matrix = ComplexMatrix::from_fn(n, |i, j| {
            Complex64::new(vals[i].max(0.0).sqrt(), 0.0) * q.get(j, i).conj()
        });
        let family: Vec<Vec<Complex64>> = (0..n)
            .map(|j| (0..n).map(|i| v_matrix.get(i, j)).collect())
            .collect();
        families.push(family);
    }

    let scaled: Vec<HermitianMatrix> = psd_tuple
        .iter()
        .map(|b| HermitianMatrix::new_unchecked(b.matrix().scale_real(k as f64)))
        .collect();
    let tuple = HermitianTuple::new(scaled)?;
    let lhs = RealPolynomial::monomial((k - 1) * n).mul(&mdp(&tuple, budget)?);
    let rhs = mixed_char_poly_rank_mixture(&families, budget)?;
    Ok((lhs, rhs))
}
