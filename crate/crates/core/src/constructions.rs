//! Explicit matrix families: shift⊗Fourier tuples that meet the paving lower
//! bound, Paley conference matrices, and the signed-adjacency identity that
//! averages the paired-signing polynomial into a matching polynomial.

use std::collections::HashSet;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::budget::EnumerationBudget;
use crate::error::{MdpError, Result};
use crate::linalg::{
    hermitian_eigenvalues, operator_norm, submatrix_by_indices0, ComplexMatrix, HermitianMatrix,
    HermitianTuple,
};
use crate::mdp::mdp;
use crate::polynomial::RealPolynomial;
use crate::tol::BOUND_SLACK;

// ---------------------------------------------------------------------------
// Graphs
// ---------------------------------------------------------------------------

/// Undirected graph with vertices 1..=n, no loops, no parallel edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl SimpleGraph {
    /// Build a graph on `n` vertices from an unordered edge list (1-based).
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut normalized = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u == 0 || u > n {
                return Err(MdpError::IndexOutOfRange { index: u, n });
            }
            if v == 0 || v > n {
                return Err(MdpError::IndexOutOfRange { index: v, n });
            }
            if u == v {
                return Err(MdpError::InvalidGraph(format!("loop at vertex {u}")));
            }
            let e = (u.min(v), u.max(v));
            if !seen.insert(e) {
                return Err(MdpError::InvalidGraph(format!("duplicate edge ({}, {})", e.0, e.1)));
            }
            normalized.push(e);
        }
        Ok(SimpleGraph { n, edges: normalized })
    }

    /// Edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        SimpleGraph { n, edges: Vec::new() }
    }

    /// Path 1—2—⋯—n.
    pub fn path(n: usize) -> Self {
        let edges = (1..n).map(|i| (i, i + 1)).collect();
        SimpleGraph { n, edges }
    }

    /// Cycle 1—2—⋯—n—1 (needs n ≥ 3 to stay simple).
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(MdpError::InvalidGraph(format!("cycle needs at least 3 vertices, got {n}")));
        }
        let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (i, i + 1)).collect();
        edges.push((1, n));
        Ok(SimpleGraph { n, edges })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as normalized (min, max) pairs in insertion order; signing bit t
    /// of [`SimpleGraph::signed_adjacency`] refers to `edges()[t]`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n];
        for &(u, v) in &self.edges {
            deg[u - 1] += 1;
            deg[v - 1] += 1;
        }
        deg
    }

    /// Some(d) when every vertex has degree d; None otherwise (or when n=0).
    pub fn regular_degree(&self) -> Option<usize> {
        let deg = self.degrees();
        let first = *deg.first()?;
        deg.iter().all(|&d| d == first).then_some(first)
    }

    /// 0/1 adjacency matrix.
    pub fn adjacency_matrix(&self) -> ComplexMatrix {
        self.signed_adjacency(0)
    }

    /// Adjacency matrix with edge t carrying sign −1 when bit t of `signing`
    /// is set and +1 otherwise; bits beyond the edge count are ignored.
    pub fn signed_adjacency(&self, signing: u64) -> ComplexMatrix {
        let mut a = ComplexMatrix::zeros(self.n);
        for (t, &(u, v)) in self.edges.iter().enumerate() {
            let s = if t < 64 && signing >> t & 1 == 1 { -1.0 } else { 1.0 };
            a.set(u - 1, v - 1, Complex64::new(s, 0.0));
            a.set(v - 1, u - 1, Complex64::new(s, 0.0));
        }
        a
    }
}

/// Matching polynomial Σ_j (−1)ʲ·(#j-matchings)·x^{n−2j}, computed by the
/// deletion recursion m_G = m_{G−e} − m_{G−{u,v}}. Coefficients are exact
/// (integer arithmetic in f64) at any size this crate enumerates.
pub fn matching_polynomial(g: &SimpleGraph) -> RealPolynomial {
    fn rec(n: usize, edges: &[(usize, usize)]) -> RealPolynomial {
        match edges.split_first() {
            None => RealPolynomial::monomial(n),
            Some((&(u, v), rest)) => {
                let dropped_edge = rec(n, rest);
                let reduced: Vec<(usize, usize)> = rest
                    .iter()
                    .copied()
                    .filter(|&(a, b)| a != u && a != v && b != u && b != v)
                    .collect();
                let dropped_ends = rec(n - 2, &reduced);
                dropped_edge.sub(&dropped_ends)
            }
        }
    }
    rec(g.n, &g.edges)
}

// ---------------------------------------------------------------------------
// Fourier, shift, conference matrices
// ---------------------------------------------------------------------------

/// Unitary Fourier matrix F(i,j) = m^{−1/2}·ω^{(i−1)(j−1)}, ω = e^{2πi/m}.
pub fn fourier_matrix(m: usize) -> Result<ComplexMatrix> {
    if m == 0 {
        return Err(MdpError::InvalidArgument("Fourier matrix needs m ≥ 1".to_string()));
    }
    let scale = 1.0 / (m as f64).sqrt();
    Ok(ComplexMatrix::from_fn(m, |i, j| {
        let e = i * j % m;
        Complex64::from_polar(scale, 2.0 * PI * e as f64 / m as f64)
    }))
}

/// Cyclic left shift U·e_j = e_{j−1 mod k}; permutation of order k whose
/// powers U, …, U^{k−1} all have zero diagonal.
pub fn cyclic_shift(k: usize) -> Result<ComplexMatrix> {
    if k == 0 {
        return Err(MdpError::InvalidArgument("cyclic shift needs k ≥ 1".to_string()));
    }
    Ok(ComplexMatrix::from_fn(k, |i, j| {
        if (i + 1) % k == j {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }))
}

fn is_prime(q: usize) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= q {
        if q % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Legendre symbol (a|q) via Euler's criterion; 0 when q divides a.
fn legendre_symbol(a: i64, q: u64) -> i64 {
    let r = a.rem_euclid(q as i64) as u64;
    if r == 0 {
        return 0;
    }
    let mut base = r;
    let mut exp = (q - 1) / 2;
    let mut acc: u64 = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % q;
        }
        base = base * base % q;
        exp >>= 1;
    }
    if acc == 1 { 1 } else { -1 }
}

/// Paley conference matrix of order m = q+1 for prime q ≡ 1 mod 4: symmetric,
/// zero diagonal, ±1 off the diagonal, with C·Cᵀ = (m−1)·I verified exactly
/// in integer arithmetic before the entries are handed over as floats.
pub fn paley_conference_matrix(m: usize) -> Result<ComplexMatrix> {
    if m < 2 {
        return Err(MdpError::UnsupportedConferenceOrder { m });
    }
    let q = m - 1;
    if !is_prime(q) || q % 4 != 1 {
        return Err(MdpError::UnsupportedConferenceOrder { m });
    }
    let mut c = vec![vec![0i64; m]; m];
    for i in 1..m {
        c[0][i] = 1;
        c[i][0] = 1;
    }
    for a in 0..q {
        for b in 0..q {
            c[1 + a][1 + b] = legendre_symbol(a as i64 - b as i64, q as u64);
        }
    }
    for i in 0..m {
        for j in 0..m {
            let dot: i64 = (0..m).map(|t| c[i][t] * c[j][t]).sum();
            let want = if i == j { q as i64 } else { 0 };
            if dot != want {
                return Err(MdpError::BoundViolation {
                    detail: format!("conference rows {i},{j}: product {dot}, expected {want}"),
                });
            }
        }
    }
    Ok(ComplexMatrix::from_fn(m, |i, j| Complex64::new(c[i][j] as f64, 0.0)))
}

/// Hermitian dilation [[0, A], [A*, 0]]: always zero diagonal, Hermitian by
/// construction, with operator norm equal to ‖A‖.
pub fn hermitian_dilation(a: &ComplexMatrix) -> HermitianMatrix {
    let n = a.dim();
    let mut d = ComplexMatrix::zeros(2 * n);
    for i in 0..n {
        for j in 0..n {
            d.set(i, n + j, a.get(i, j));
            d.set(n + j, i, a.get(i, j).conj());
        }
    }
    HermitianMatrix::new_unchecked(d)
}

// ---------------------------------------------------------------------------
// The extremal tuple
// ---------------------------------------------------------------------------

/// The k-tuple in dimension k·m that cannot be paved with fewer than k·m
/// blocks at sharpness ε, m = ⌊ε⁻²⌋: the k−1 shift⊗Fourier unitaries plus
/// the conference block normalized to norm 1. All members have zero diagonal
/// and operator norm 1; the shift⊗Fourier members are not Hermitian, so they
/// are stored as general matrices with Hermitian dilations available.
#[derive(Debug, Clone)]
pub struct TightnessTuple {
    matrices: Vec<ComplexMatrix>,
    k: usize,
    m: usize,
    epsilon: f64,
}

impl TightnessTuple {
    pub fn matrices(&self) -> &[ComplexMatrix] {
        &self.matrices
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Fourier/conference block size m = ⌊ε⁻²⌋.
    pub fn block_size(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.k * self.m
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// The members repackaged through Hermitian dilation: a zero-diagonal
    /// contraction tuple of dimension 2·k·m.
    pub fn dilated_tuple(&self) -> Result<HermitianTuple> {
        HermitianTuple::new(self.matrices.iter().map(hermitian_dilation).collect())
    }
}

/// Build the extremal tuple for a given k ≥ 1 and ε ∈ (0,1). Errors when the
/// implied conference order m = ⌊ε⁻²⌋ falls outside the Paley construction.
pub fn tightness_tuple(k: usize, epsilon: f64) -> Result<TightnessTuple> {
    if k == 0 {
        return Err(MdpError::InvalidArgument("tuple size k must be at least 1".to_string()));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(MdpError::InvalidArgument(format!(
            "sharpness parameter must lie in (0,1), got {epsilon}"
        )));
    }
    let m = epsilon.powi(-2).floor() as usize;
    let conference = paley_conference_matrix(m)?;
    let fourier = fourier_matrix(m)?;
    let shift = cyclic_shift(k)?;
    let mut matrices = Vec::with_capacity(k);
    let mut power = ComplexMatrix::identity(k);
    for _ in 1..k {
        power = power.matmul(&shift);
        matrices.push(power.kron(&fourier));
    }
    let normalized = conference.scale_real(1.0 / ((m - 1) as f64).sqrt());
    matrices.push(ComplexMatrix::identity(k).kron(&normalized));
    Ok(TightnessTuple { matrices, k, m, epsilon })
}

/// Certificate that any paving of `matrices` at sharpness ε must use only
/// singleton blocks: every index pair keeps a 2×2 compression of operator
/// norm ≥ ε in some member, so no block may hold two indices and the block
/// count is at least the dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct SingletonCertificate {
    /// True when every pair is blocked by some member.
    pub holds: bool,
    /// A pair (1-based) whose compressions all stay below ε, when one exists.
    pub witness: Option<(usize, usize)>,
    /// min over pairs of max over members of the 2×2 compression norm.
    pub min_pair_norm: f64,
    /// Singleton lower bound on the block count (the dimension) when `holds`.
    pub implied_block_count: Option<usize>,
}

/// Check pairwise compressions of a family of equal-dimension matrices; see
/// [`SingletonCertificate`]. Hermiticity is not required — the operator norm
/// of a 2×2 compression is well-defined for any matrix.
pub fn verify_singleton_necessity(
    matrices: &[ComplexMatrix],
    epsilon: f64,
) -> Result<SingletonCertificate> {
    if matrices.is_empty() {
        return Err(MdpError::InvalidArgument("need at least one matrix".to_string()));
    }
    if !(epsilon > 0.0) {
        return Err(MdpError::InvalidArgument(format!(
            "sharpness parameter must be positive, got {epsilon}"
        )));
    }
    let n = matrices[0].dim();
    for a in matrices {
        if a.dim() != n {
            return Err(MdpError::DimensionMismatch { expected: n, got: a.dim() });
        }
    }
    let mut holds = true;
    let mut witness = None;
    let mut min_pair_norm = f64::INFINITY;
    for s in 0..n {
        for t in s + 1..n {
            let best = matrices
                .iter()
                .map(|a| operator_norm(&submatrix_by_indices0(a, &[s, t])))
                .fold(0.0, f64::max);
            min_pair_norm = min_pair_norm.min(best);
            if best < epsilon && holds {
                holds = false;
                witness = Some((s + 1, t + 1));
            }
        }
    }
    let implied_block_count = holds.then_some(n);
    Ok(SingletonCertificate { holds, witness, min_pair_norm, implied_block_count })
}

// ---------------------------------------------------------------------------
// Signed adjacency identity
// ---------------------------------------------------------------------------

/// Outcome of averaging the paired-signing polynomial χ of (A_s, −A_s) over
/// all edge signings s of a graph.
#[derive(Debug, Clone)]
pub struct SignedIdentityReport {
    /// Average over signings of the two-matrix polynomial of (A_s, −A_s).
    pub averaged: RealPolynomial,
    /// Matching polynomial at √2·x, normalized monic (exact dyadic).
    pub matching_side: RealPolynomial,
    /// Largest |coefficient difference| between the two sides.
    pub max_deviation: f64,
    /// Number of signings enumerated, 2^{edge count}.
    pub signings: usize,
    /// min over signings of max{λ_max(A_s), −λ_min(A_s)}.
    pub best_signing_radius: f64,
    /// Common vertex degree when the graph is regular.
    pub regular_degree: Option<usize>,
    /// 2√2·√(d−1) for d-regular graphs with d ≥ 1.
    pub radius_bound: Option<f64>,
    /// Whether the best signing meets the radius bound (slack 1e-8).
    pub radius_bound_met: Option<bool>,
}

/// Average χ[(A_s, −A_s)] over every signing s and compare against the
/// monic-normalized matching polynomial at √2·x; the two agree coefficient
/// by coefficient. Also reports the best achievable signed spectral radius
/// against 2√2·√(d−1) for regular graphs.
pub fn signed_mdp_identity_check(
    g: &SimpleGraph,
    budget: EnumerationBudget,
) -> Result<SignedIdentityReport> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(MdpError::InvalidArgument("graph must have at least one vertex".to_string()));
    }
    let e = g.edge_count();
    let per_signing = EnumerationBudget::partition_count(2, n);
    let total = if e >= 128 { u128::MAX } else { (1u128 << e).saturating_mul(per_signing) };
    budget.check(total)?;

    // budget.limit() fits u64, so the check above caps e below 64
    let count = 1u64 << e;
    let per: Result<Vec<(RealPolynomial, f64)>> = (0..count)
        .collect::<Vec<u64>>()
        .par_iter()
        .map(|&s| {
            let a = g.signed_adjacency(s);
            let tuple = HermitianTuple::from_matrices(vec![a.clone(), a.scale_real(-1.0)])?;
            let chi = mdp(&tuple, budget)?;
            let evals = hermitian_eigenvalues(&HermitianMatrix::new_unchecked(a));
            let radius = evals
                .last()
                .map(|&top| top.max(-evals[0]))
                .expect("graph has at least one vertex");
            Ok((chi, radius))
        })
        .collect();
    let per = per?;

    let mut sum = RealPolynomial::zero();
    let mut best_signing_radius = f64::INFINITY;
    for (chi, radius) in &per {
        sum = sum.add(chi);
        best_signing_radius = best_signing_radius.min(*radius);
    }
    let averaged = sum.scale(1.0 / count as f64);

    let matching = matching_polynomial(g);
    let mut coeffs = vec![0.0; n + 1];
    for (i, c) in coeffs.iter_mut().enumerate() {
        let raw = matching.coeff(i);
        if raw != 0.0 {
            debug_assert!((n - i) % 2 == 0, "matching polynomial parity");
            *c = raw * 2f64.powi((i as i32 - n as i32) / 2);
        }
    }
    let matching_side = RealPolynomial::new(coeffs);
    let max_deviation = averaged.max_coeff_deviation(&matching_side);

    let regular_degree = g.regular_degree();
    let (radius_bound, radius_bound_met) = match regular_degree {
        Some(d) if d >= 1 => {
            let bound = 2.0 * 2f64.sqrt() * ((d - 1) as f64).sqrt();
            (Some(bound), Some(best_signing_radius <= bound + BOUND_SLACK))
        }
        _ => (None, None),
    };

    Ok(SignedIdentityReport {
        averaged,
        matching_side,
        max_deviation,
        signings: count as usize,
        best_signing_radius,
        regular_degree,
        radius_bound,
        radius_bound_met,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::char_poly;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn fourier_small_orders() {
        let f1 = fourier_matrix(1).unwrap();
        assert_eq!(f1.dim(), 1);
        assert_close(f1.get(0, 0).re, 1.0, 1e-15);
        assert_close(f1.get(0, 0).im, 0.0, 1e-15);

        let f2 = fourier_matrix(2).unwrap();
        let s = 1.0 / 2f64.sqrt();
        for (i, j, want) in [(0, 0, s), (0, 1, s), (1, 0, s), (1, 1, -s)] {
            assert_close(f2.get(i, j).re, want, 1e-15);
            assert_close(f2.get(i, j).im, 0.0, 1e-15);
        }

        let f4 = fourier_matrix(4).unwrap();
        let prod = f4.matmul(&f4.adjoint());
        let dev = prod.sub(&ComplexMatrix::identity(4)).max_abs_entry();
        assert!(dev <= 1e-14, "F4 unitarity deviation {dev}");
    }

    #[test]
    fn fourier_unitary_constant_modulus() {
        for m in [3usize, 5, 8, 17, 64] {
            let f = fourier_matrix(m).unwrap();
            let want = 1.0 / (m as f64).sqrt();
            for i in 0..m {
                for j in 0..m {
                    assert_close(f.get(i, j).norm(), want, 1e-12);
                }
            }
            let dev = f.matmul(&f.adjoint()).sub(&ComplexMatrix::identity(m)).max_abs_entry();
            assert!(dev <= 1e-12, "m={m} unitarity deviation {dev}");
        }
        assert!(fourier_matrix(0).is_err());
    }

    #[test]
    fn cyclic_shift_action() {
        let u1 = cyclic_shift(1).unwrap();
        assert_close(u1.get(0, 0).re, 1.0, 0.0);

        let u2 = cyclic_shift(2).unwrap();
        assert_eq!(
            [u2.get(0, 0).re, u2.get(0, 1).re, u2.get(1, 0).re, u2.get(1, 1).re],
            [0.0, 1.0, 1.0, 0.0]
        );

        // U e_j = e_{j−1 mod k}: column j carries its 1 in row (j−1) mod k.
        let k = 5;
        let u = cyclic_shift(k).unwrap();
        for j in 0..k {
            for i in 0..k {
                let want = if i == (j + k - 1) % k { 1.0 } else { 0.0 };
                assert_eq!(u.get(i, j).re, want);
            }
        }

        let mut power = ComplexMatrix::identity(k);
        for step in 1..=k {
            power = power.matmul(&u);
            if step < k {
                let diag = (0..k).map(|i| power.get(i, i).norm()).fold(0.0, f64::max);
                assert_eq!(diag, 0.0, "U^{step} should have zero diagonal");
            }
        }
        assert_eq!(power.sub(&ComplexMatrix::identity(k)).max_abs_entry(), 0.0);
        assert!(cyclic_shift(0).is_err());
    }

    #[test]
    fn paley_conference_orders() {
        for (m, q) in [(6usize, 5.0), (14, 13.0), (18, 17.0)] {
            let c = paley_conference_matrix(m).unwrap();
            for i in 0..m {
                assert_eq!(c.get(i, i).re, 0.0);
                for j in 0..m {
                    assert_eq!(c.get(i, j).im, 0.0);
                    assert_eq!(c.get(i, j).re, c.get(j, i).re, "symmetry at ({i},{j})");
                    if i != j {
                        assert_eq!(c.get(i, j).re.abs(), 1.0, "±1 pattern at ({i},{j})");
                    }
                }
            }
            // products of exact small integers: the comparison is exact
            let prod = c.matmul(&c.adjoint());
            let dev = prod.sub(&ComplexMatrix::identity(m).scale_real(q)).max_abs_entry();
            assert_eq!(dev, 0.0, "CC* = {q}·I for m={m}");
        }
        assert!(matches!(
            paley_conference_matrix(10),
            Err(MdpError::UnsupportedConferenceOrder { m: 10 })
        ));
        assert!(paley_conference_matrix(5).is_err());
        assert!(paley_conference_matrix(2).is_err());
        assert!(paley_conference_matrix(0).is_err());
    }

    #[test]
    fn tightness_tuple_members() {
        // k=1: only the conference term
        let t1 = tightness_tuple(1, 0.40).unwrap();
        assert_eq!(t1.k(), 1);
        assert_eq!(t1.block_size(), 6);
        assert_eq!(t1.matrices().len(), 1);
        assert_eq!(t1.matrices()[0].dim(), 6);

        // k=2, m=6: two matrices of dimension 12
        let t2 = tightness_tuple(2, 0.40).unwrap();
        assert_eq!(t2.dim(), 12);
        assert_eq!(t2.matrices().len(), 2);
        for a in t2.matrices() {
            let diag = (0..a.dim()).map(|i| a.get(i, i).norm()).fold(0.0, f64::max);
            assert_eq!(diag, 0.0);
            assert_close(operator_norm(a), 1.0, 1e-10);
        }
        // shift⊗Fourier member is genuinely non-Hermitian
        let asym = t2.matrices()[0].sub(&t2.matrices()[0].adjoint()).max_abs_entry();
        assert!(asym > 0.1, "expected non-Hermitian member, asymmetry {asym}");

        // m=4 is outside the conference construction
        assert!(matches!(
            tightness_tuple(2, 0.45),
            Err(MdpError::UnsupportedConferenceOrder { m: 4 })
        ));
        assert!(tightness_tuple(0, 0.4).is_err());
        assert!(tightness_tuple(2, 1.0).is_err());

        let t3 = tightness_tuple(3, 0.40).unwrap();
        assert_eq!(t3.dim(), 18);
        assert_eq!(t3.matrices().len(), 3);
        for a in t3.matrices() {
            assert_close(operator_norm(a), 1.0, 1e-10);
        }
    }

    #[test]
    fn dilated_tuple_is_valid() {
        let t = tightness_tuple(2, 0.40).unwrap();
        let dilated = t.dilated_tuple().unwrap();
        assert_eq!(dilated.dim(), 24);
        assert_eq!(dilated.k(), 2);
        assert!(dilated.zero_diagonal());
        assert!(dilated.contraction());
        for h in dilated.matrices() {
            assert_close(operator_norm(h.matrix()), 1.0, 1e-10);
        }
    }

    #[test]
    fn singleton_necessity_conference_tuple() {
        let t = tightness_tuple(1, 0.40).unwrap();
        let cert = verify_singleton_necessity(t.matrices(), 0.40).unwrap();
        assert!(cert.holds);
        assert_eq!(cert.witness, None);
        assert_eq!(cert.implied_block_count, Some(6));
        // every pair compresses to [[0, ±1/√5], [±1/√5, 0]]
        assert_close(cert.min_pair_norm, 1.0 / 5f64.sqrt(), 1e-10);

        let loose = verify_singleton_necessity(t.matrices(), 0.50).unwrap();
        assert!(!loose.holds);
        assert!(loose.witness.is_some());
        assert_eq!(loose.implied_block_count, None);

        let flip = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let single = verify_singleton_necessity(&[flip], 0.5).unwrap();
        assert!(single.holds);
        assert_close(single.min_pair_norm, 1.0, 1e-12);
        assert_eq!(single.implied_block_count, Some(2));
    }

    #[test]
    fn singleton_necessity_k2_and_monotone() {
        let t = tightness_tuple(2, 0.40).unwrap();
        let cert = verify_singleton_necessity(t.matrices(), 0.40).unwrap();
        assert!(cert.holds);
        assert_eq!(cert.implied_block_count, Some(12));

        // cross-block pairs see only Fourier entries, so the binding norm is
        // 1/√6 ≈ 0.4082: holds just below, fails just above
        assert_close(cert.min_pair_norm, 1.0 / 6f64.sqrt(), 1e-10);
        assert!(verify_singleton_necessity(t.matrices(), 0.405).unwrap().holds);
        assert!(!verify_singleton_necessity(t.matrices(), 0.41).unwrap().holds);
        // monotone: holds at ε implies holds at any smaller ε
        assert!(verify_singleton_necessity(t.matrices(), 0.2).unwrap().holds);

        assert!(verify_singleton_necessity(&[], 0.4).is_err());
    }

    #[test]
    fn matching_polynomial_examples() {
        assert_eq!(matching_polynomial(&SimpleGraph::empty(5)).coeffs(), &[0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(matching_polynomial(&SimpleGraph::path(2)).coeffs(), &[-1.0, 0.0, 1.0]);
        assert_eq!(matching_polynomial(&SimpleGraph::path(3)).coeffs(), &[0.0, -2.0, 0.0, 1.0]);
        let c4 = SimpleGraph::cycle(4).unwrap();
        assert_eq!(matching_polynomial(&c4).coeffs(), &[2.0, 0.0, -4.0, 0.0, 1.0]);
    }

    #[test]
    fn matching_polynomial_of_forest_is_char_poly() {
        let p4 = SimpleGraph::path(4);
        let star = SimpleGraph::new(4, &[(1, 2), (1, 3), (1, 4)]).unwrap();
        for g in [p4, star] {
            let matching = matching_polynomial(&g);
            let chi = char_poly(&g.adjacency_matrix()).unwrap();
            assert!(matching.max_coeff_deviation(&chi) <= 1e-12);
        }
    }

    #[test]
    fn graph_validation() {
        assert!(SimpleGraph::new(3, &[(1, 1)]).is_err());
        assert!(SimpleGraph::new(3, &[(1, 2), (2, 1)]).is_err());
        assert!(SimpleGraph::new(3, &[(1, 4)]).is_err());
        assert!(SimpleGraph::new(3, &[(0, 2)]).is_err());
        assert!(SimpleGraph::cycle(2).is_err());
        assert_eq!(SimpleGraph::path(1).edge_count(), 0);
        assert_eq!(SimpleGraph::cycle(4).unwrap().regular_degree(), Some(2));
        assert_eq!(SimpleGraph::path(3).regular_degree(), None);
    }

    #[test]
    fn signed_identity_single_edge() {
        let g = SimpleGraph::path(2);
        let report = signed_mdp_identity_check(&g, EnumerationBudget::default()).unwrap();
        assert_eq!(report.signings, 2);
        assert_eq!(report.matching_side.coeffs(), &[-0.5, 0.0, 1.0]);
        assert!(report.max_deviation <= 1e-12, "deviation {}", report.max_deviation);
        assert_eq!(report.regular_degree, Some(1));
        assert_close(report.best_signing_radius, 1.0, 1e-12);
        // the d-regular radius bound chain degenerates to 0 at d=1
        assert_eq!(report.radius_bound, Some(0.0));
        assert_eq!(report.radius_bound_met, Some(false));
    }

    #[test]
    fn signed_identity_empty_graph() {
        let g = SimpleGraph::empty(3);
        let report = signed_mdp_identity_check(&g, EnumerationBudget::default()).unwrap();
        assert_eq!(report.signings, 1);
        assert_eq!(report.matching_side.coeffs(), &[0.0, 0.0, 0.0, 1.0]);
        assert!(report.max_deviation <= 1e-12);
        assert_eq!(report.best_signing_radius, 0.0);
        assert_eq!(report.radius_bound, None);
    }

    #[test]
    fn signed_identity_four_cycle() {
        let g = SimpleGraph::cycle(4).unwrap();
        let report = signed_mdp_identity_check(&g, EnumerationBudget::default()).unwrap();
        assert_eq!(report.signings, 16);
        assert_eq!(report.matching_side.coeffs(), &[0.5, 0.0, -2.0, 0.0, 1.0]);
        assert!(report.max_deviation <= 1e-10, "deviation {}", report.max_deviation);
        assert_eq!(report.regular_degree, Some(2));
        // signings with odd sign product reach eigenvalues ±√2 (each twice)
        assert_close(report.best_signing_radius, 2f64.sqrt(), 1e-9);
        assert_close(report.radius_bound.unwrap(), 2.0 * 2f64.sqrt(), 1e-12);
        assert_eq!(report.radius_bound_met, Some(true));
    }

    #[test]
    fn signed_identity_budget() {
        let g = SimpleGraph::path(3);
        assert!(matches!(
            signed_mdp_identity_check(&g, EnumerationBudget::new(10)),
            Err(MdpError::BudgetExceeded { .. })
        ));
    }
}
