//! Real univariate polynomials: arithmetic, derivatives, real-rooted root
//! extraction, and interlacing diagnostics.
//!
//! Coefficients are stored ascending; the expectation polynomials produced
//! elsewhere in this crate are real-rooted in exact arithmetic, so the root
//! finders here are specialized for that case: monotone Newton from the right
//! for the largest root, Sturm-sequence isolation for full root lists, and a
//! complex root sweep only as a diagnostic for near-real-rootedness.

use num_complex::Complex64;
use rand::{Rng, RngExt, SeedableRng};

use crate::error::{MdpError, Result};
use crate::tol;

/// Real polynomial with ascending coefficients. Trailing exact zeros are
/// trimmed on construction; the zero polynomial has an empty coefficient list.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPolynomial {
    coeffs: Vec<f64>,
}

impl RealPolynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        RealPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        RealPolynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// The monomial x^n.
    pub fn monomial(n: usize) -> Self {
        let mut coeffs = vec![0.0; n + 1];
        coeffs[n] = 1.0;
        RealPolynomial { coeffs }
    }

    /// Monic polynomial with the given real roots.
    pub fn from_roots(roots: &[f64]) -> Self {
        let mut coeffs = vec![1.0];
        for &r in roots {
            let mut next = vec![0.0; coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= r * c;
            }
            coeffs = next;
        }
        RealPolynomial { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() { None } else { Some(self.coeffs.len() - 1) }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of x^i (zero beyond the stored length).
    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn add(&self, other: &RealPolynomial) -> RealPolynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![0.0; n];
        for (i, c) in coeffs.iter_mut().enumerate() {
            *c = self.coeff(i) + other.coeff(i);
        }
        RealPolynomial::new(coeffs)
    }

    pub fn sub(&self, other: &RealPolynomial) -> RealPolynomial {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> RealPolynomial {
        RealPolynomial::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &RealPolynomial) -> RealPolynomial {
        if self.is_zero() || other.is_zero() {
            return RealPolynomial::zero();
        }
        let mut coeffs = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        RealPolynomial::new(coeffs)
    }

    /// Divide by the leading coefficient. No-op on the zero polynomial.
    pub fn monic(&self) -> RealPolynomial {
        match self.coeffs.last() {
            None => self.clone(),
            Some(&lead) => self.scale(1.0 / lead),
        }
    }

    /// Largest coefficient magnitude deviation against another polynomial.
    pub fn max_coeff_deviation(&self, other: &RealPolynomial) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n)
            .map(|i| (self.coeff(i) - other.coeff(i)).abs())
            .fold(0.0, f64::max)
    }
}

impl serde::Serialize for RealPolynomial {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.coeffs.serialize(serializer)
    }
}

impl<'de> serde::Deserialize<'de> for RealPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        Ok(RealPolynomial::new(Vec::<f64>::deserialize(deserializer)?))
    }
}

/// m-th derivative; the zero polynomial when m exceeds the degree.
pub fn derivative(p: &RealPolynomial, m: usize) -> RealPolynomial {
    let mut coeffs = p.coeffs().to_vec();
    for _ in 0..m {
        if coeffs.len() <= 1 {
            return RealPolynomial::zero();
        }
        coeffs = coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| c * i as f64)
            .collect();
    }
    RealPolynomial::new(coeffs)
}

/// q(x) = p(k·x), optionally normalized to be monic.
pub fn scale_argument(p: &RealPolynomial, k: f64, normalize_monic: bool) -> RealPolynomial {
    let mut coeffs = Vec::with_capacity(p.coeffs().len());
    let mut pow = 1.0;
    for &c in p.coeffs() {
        coeffs.push(c * pow);
        pow *= k;
    }
    let q = RealPolynomial::new(coeffs);
    if normalize_monic { q.monic() } else { q }
}

/// Cauchy root bound 1 + max|cᵢ/c_deg| for a nonconstant polynomial.
fn cauchy_bound(monic: &[f64]) -> f64 {
    let lead = *monic.last().unwrap();
    1.0 + monic[..monic.len() - 1]
        .iter()
        .map(|c| (c / lead).abs())
        .fold(0.0, f64::max)
}

/// Largest real root of a real-rooted polynomial.
///
/// Newton iteration from the Cauchy bound converges monotonically from the
/// right when all roots are real; a Sturm-count bisection takes over if the
/// iteration stalls (e.g. at an even-multiplicity maximal root).
pub fn largest_root(p: &RealPolynomial) -> Result<f64> {
    let deg = p.degree().ok_or(MdpError::DegreeZero)?;
    if deg == 0 {
        return Err(MdpError::DegreeZero);
    }
    let q = if p.leading() > 0.0 { p.monic() } else { p.scale(-1.0).monic() };
    if deg == 1 {
        return Ok(-q.coeff(0));
    }
    let dq = derivative(&q, 1);
    let bound = cauchy_bound(q.coeffs());
    let tol = tol::ROOT_TOL * (1.0 + bound);

    let mut x = bound;
    for _ in 0..400 {
        let fx = q.eval(x);
        let dfx = dq.eval(x);
        if dfx <= 0.0 || !dfx.is_finite() {
            break; // stalled; fall through to bisection
        }
        let step = fx / dfx;
        if !step.is_finite() {
            break;
        }
        if step <= 0.0 {
            // At or just left of the root: noise floor reached.
            return Ok(x);
        }
        x -= step;
        if step <= tol {
            return Ok(x);
        }
        if x < -bound {
            return Err(MdpError::RootNonConvergence {
                detail: format!("iterate escaped below -{bound:.3}; input likely not real-rooted"),
            });
        }
    }

    // Bisection on the Sturm root count, which is robust to multiplicities.
    let chain = SturmChain::new(q.coeffs());
    let total = chain.count_in(-bound, bound);
    if total <= 0 {
        return Err(MdpError::RootNonConvergence {
            detail: "no real roots found in the Cauchy interval".to_string(),
        });
    }
    let (mut lo, mut hi) = (-bound, bound);
    for _ in 0..120 {
        let mid = 0.5 * (lo + hi);
        if chain.count_in(mid, hi) >= 1 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= tol {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Sturm chain with floating-point remainder arithmetic.
///
/// Each element is scaled to unit max-coefficient and tiny coefficients are
/// truncated, so the chain terminates at (a scaled version of) gcd(p, p')
/// when p has repeated roots. Sign-variation differences then count distinct
/// real roots.
struct SturmChain {
    polys: Vec<Vec<f64>>,
}

impl SturmChain {
    fn new(coeffs: &[f64]) -> Self {
        let mut polys: Vec<Vec<f64>> = Vec::new();
        let p0 = normalize(coeffs.to_vec());
        if p0.is_empty() {
            return SturmChain { polys };
        }
        let p1 = normalize(deriv_vec(&p0));
        polys.push(p0);
        if p1.is_empty() {
            return SturmChain { polys };
        }
        polys.push(p1);
        loop {
            let a = &polys[polys.len() - 2];
            let b = &polys[polys.len() - 1];
            if b.len() <= 1 {
                break;
            }
            let mut r = rem_vec(a, b);
            for c in r.iter_mut() {
                *c = -*c;
            }
            let r = normalize(r);
            if r.is_empty() {
                break;
            }
            polys.push(r);
        }
        SturmChain { polys }
    }

    fn variations(&self, x: f64) -> usize {
        let mut count = 0;
        let mut last = 0.0f64;
        for p in &self.polys {
            let v = eval_vec(p, x);
            if v == 0.0 {
                continue;
            }
            if last != 0.0 && v.signum() != last.signum() {
                count += 1;
            }
            last = v;
        }
        count
    }

    /// Number of distinct real roots in (a, b].
    fn count_in(&self, a: f64, b: f64) -> isize {
        self.variations(a) as isize - self.variations(b) as isize
    }

    /// The terminal chain element, which is proportional to gcd(p, p') when
    /// the chain stopped before reaching a constant.
    fn terminal_gcd(&self) -> Option<&[f64]> {
        let last = self.polys.last()?;
        if last.len() > 1 { Some(last) } else { None }
    }
}

fn eval_vec(coeffs: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for &c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn deriv_vec(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| c * i as f64)
        .collect()
}

/// Scale to unit max-coefficient and truncate relatively tiny coefficients.
fn normalize(mut coeffs: Vec<f64>) -> Vec<f64> {
    let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return Vec::new();
    }
    for c in coeffs.iter_mut() {
        *c /= scale;
        if c.abs() <= 1e-13 {
            *c = 0.0;
        }
    }
    while coeffs.last() == Some(&0.0) {
        coeffs.pop();
    }
    coeffs
}

/// Polynomial remainder a mod b (both nonempty, deg b ≥ 1).
fn rem_vec(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead_b = *b.last().unwrap();
    while r.len() >= b.len() {
        let dr = r.len() - 1;
        let factor = *r.last().unwrap() / lead_b;
        let shift = dr - db;
        for i in 0..b.len() {
            r[shift + i] -= factor * b[i];
        }
        r.pop();
        while r.last().map(|c| c.abs() <= 1e-300) == Some(true) {
            r.pop();
        }
    }
    r
}

/// All real roots with multiplicity, ascending.
///
/// Distinct roots are isolated by Sturm bisection and polished by Newton;
/// multiplicities come from recursing on gcd(p, p') (a root of p has
/// multiplicity 1 + its multiplicity in the gcd). A mismatch between the
/// recovered multiplicity count and the degree signals a complex pair.
pub fn all_real_roots(p: &RealPolynomial) -> Result<Vec<f64>> {
    let deg = match p.degree() {
        None => {
            return Err(MdpError::InvalidArgument(
                "zero polynomial has no well-defined root list".to_string(),
            ));
        }
        Some(0) => return Ok(Vec::new()),
        Some(d) => d,
    };

    // Exactly-zero low coefficients correspond to exact roots at 0 (products
    // with zero blocks produce these); strip them before the Sturm analysis.
    let first_nonzero = p.coeffs().iter().position(|&c| c != 0.0).unwrap();
    let mut roots = vec![0.0; first_nonzero];
    let stripped = RealPolynomial::new(p.coeffs()[first_nonzero..].to_vec());
    let q = if stripped.leading() > 0.0 { stripped.monic() } else { stripped.scale(-1.0).monic() };
    let qdeg = deg - first_nonzero;
    if qdeg == 0 {
        roots.sort_by(f64::total_cmp);
        return Ok(roots);
    }

    let chain = SturmChain::new(q.coeffs());
    let bound = cauchy_bound(q.coeffs());
    let mut distinct = Vec::new();
    isolate(&chain, -bound, bound, 0, &mut distinct)?;

    // Multiplicity structure from gcd(p, p').
    let extra = match chain.terminal_gcd() {
        None => Vec::new(),
        Some(g) => all_real_roots(&RealPolynomial::new(g.to_vec()))?,
    };

    let mut total = 0usize;
    let dq = derivative(&q, 1);
    for &(lo, hi) in &distinct {
        let r = polish(&q, &dq, lo, hi);
        let mult = 1 + extra
            .iter()
            .filter(|&&g| (g - r).abs() <= 1e-6 * (1.0 + r.abs()))
            .count();
        for _ in 0..mult {
            roots.push(r);
        }
        total += mult;
    }
    if total != qdeg {
        return Err(MdpError::NotRealRooted {
            detail: format!(
                "found {total} real roots (with multiplicity) for degree {qdeg}; complex pair present"
            ),
        });
    }
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

/// Recursively split (a, b] until each piece holds one distinct root.
fn isolate(
    chain: &SturmChain,
    a: f64,
    b: f64,
    depth: usize,
    out: &mut Vec<(f64, f64)>,
) -> Result<()> {
    let count = chain.count_in(a, b);
    if count <= 0 {
        return Ok(());
    }
    if count == 1 || depth > 70 {
        // Beyond the depth cap the remaining cluster is numerically a single
        // (possibly multiple) root.
        out.push((a, b));
        return Ok(());
    }
    let mid = 0.5 * (a + b);
    isolate(chain, a, mid, depth + 1, out)?;
    isolate(chain, mid, b, depth + 1, out)
}

/// Tighten an isolating interval by sign bisection when possible, then Newton.
fn polish(q: &RealPolynomial, dq: &RealPolynomial, mut lo: f64, mut hi: f64) -> f64 {
    let (flo, fhi) = (q.eval(lo), q.eval(hi));
    if flo == 0.0 {
        return lo;
    }
    if fhi == 0.0 {
        return hi;
    }
    if flo.signum() != fhi.signum() {
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            let fm = q.eval(mid);
            if fm == 0.0 {
                return mid;
            }
            if fm.signum() == flo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..50 {
        let fx = q.eval(x);
        let dfx = dq.eval(x);
        if dfx == 0.0 || !(fx / dfx).is_finite() {
            break;
        }
        let next = x - fx / dfx;
        if next < lo - (hi - lo) || next > hi + (hi - lo) {
            break; // keep the bisection result rather than escape the bracket
        }
        if (next - x).abs() <= 1e-15 * (1.0 + x.abs()) {
            return next;
        }
        x = next;
    }
    x
}

/// True iff every root has |imaginary part| ≤ tol·(1 + |root|).
///
/// A clean Sturm count equal to the degree certifies the answer immediately;
/// otherwise the roots are located by a Durand–Kerner sweep and the imaginary
/// parts measured directly.
pub fn is_real_rooted(p: &RealPolynomial, tol: f64) -> bool {
    let deg = match p.degree() {
        None | Some(0) => return true,
        Some(d) => d,
    };
    let first_nonzero = p.coeffs().iter().position(|&c| c != 0.0).unwrap();
    if first_nonzero == deg {
        return true; // pure monomial
    }
    let stripped = RealPolynomial::new(p.coeffs()[first_nonzero..].to_vec());
    let q = stripped.monic();
    let qdeg = deg - first_nonzero;

    let chain = SturmChain::new(q.coeffs());
    let bound = cauchy_bound(q.coeffs());
    if chain.terminal_gcd().is_none() && chain.count_in(-bound, bound) == qdeg as isize {
        return true;
    }

    // Repeated or near-repeated roots: measure imaginary parts directly.
    let mut z: Vec<Complex64> = (0..qdeg)
        .map(|j| {
            let angle = 2.0 * std::f64::consts::PI * j as f64 / qdeg as f64 + 0.4;
            Complex64::from_polar(0.5 * bound.max(1e-3), angle)
        })
        .collect();
    for _ in 0..600 {
        let mut max_step = 0.0f64;
        for i in 0..qdeg {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..qdeg {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            if den.norm() == 0.0 {
                z[i] += Complex64::new(1e-8, 1e-8);
                continue;
            }
            let delta = q.eval_complex(z[i]) / den;
            z[i] -= delta;
            max_step = max_step.max(delta.norm());
        }
        if max_step <= 1e-13 * (1.0 + bound) {
            break;
        }
    }
    z.iter().all(|zi| zi.im.abs() <= tol * (1.0 + zi.norm()))
}

/// Sample convex combinations of every pair and test real-rootedness — the
/// sampled (necessary, not sufficient) form of the common-interlacer
/// criterion. Uses a fixed seed so reports are reproducible.
pub fn common_interlacer_check(ps: &[RealPolynomial], samples: usize) -> Result<bool> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x1a7e51);
    common_interlacer_check_with_rng(ps, samples, &mut rng)
}

pub fn common_interlacer_check_with_rng<R: Rng + ?Sized>(
    ps: &[RealPolynomial],
    samples: usize,
    rng: &mut R,
) -> Result<bool> {
    if ps.is_empty() {
        return Ok(true);
    }
    let deg = ps[0].degree().unwrap_or(0);
    for p in ps {
        let d = p.degree().unwrap_or(0);
        if d != deg {
            return Err(MdpError::DegreeMismatch(deg, d));
        }
        if !p.is_zero() && p.leading() <= 0.0 {
            return Err(MdpError::InvalidArgument(
                "common_interlacer_check requires positive leading coefficients".to_string(),
            ));
        }
    }
    for p in ps {
        if !is_real_rooted(p, tol::REAL_ROOTED_TOL) {
            return Ok(false);
        }
    }
    for i in 0..ps.len() {
        for j in (i + 1)..ps.len() {
            for _ in 0..samples {
                let alpha: f64 = rng.random();
                let combo = ps[i].scale(alpha).add(&ps[j].scale(1.0 - alpha));
                if !is_real_rooted(&combo, tol::REAL_ROOTED_TOL) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// (mean, mean of squares) of the roots, read off the top coefficients via
/// Newton's identities rather than from extracted roots.
pub fn root_statistics(p: &RealPolynomial) -> Result<(f64, f64)> {
    let d = match p.degree() {
        None | Some(0) => return Err(MdpError::DegreeZero),
        Some(d) => d,
    };
    let cd = p.coeff(d);
    let c1 = p.coeff(d - 1);
    let c2 = if d >= 2 { p.coeff(d - 2) } else { 0.0 };
    let mean = -c1 / (d as f64 * cd);
    let mean_square = (c1 * c1 - 2.0 * cd * c2) / (d as f64 * cd * cd);
    Ok((mean, mean_square))
}
