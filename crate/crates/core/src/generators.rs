//! Seeded random instance generators for the verification suites, tests,
//! and the command-line tool. Everything draws from a ChaCha stream, so an
//! identical (seed, call sequence) reproduces identical instances anywhere.

use num_complex::Complex64;
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::linalg::{operator_norm, ComplexMatrix, HermitianMatrix, HermitianTuple};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Hermitian matrix with independent entries uniform in [−1,1] (real and
/// imaginary parts of the upper triangle), optionally real symmetric and/or
/// zero diagonal.
pub fn random_hermitian(
    rng: &mut impl Rng,
    n: usize,
    zero_diagonal: bool,
    real: bool,
) -> HermitianMatrix {
    let mut m = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            if i == j {
                let d = if zero_diagonal { 0.0 } else { rng.random_range(-1.0..1.0) };
                m.set(i, i, c(d, 0.0));
            } else {
                let re = rng.random_range(-1.0..1.0);
                let im = if real { 0.0 } else { rng.random_range(-1.0..1.0) };
                m.set(i, j, c(re, im));
                m.set(j, i, c(re, -im));
            }
        }
    }
    HermitianMatrix::new_unchecked(m)
}

/// Tuple of k independent Hermitian matrices, no structural constraints.
pub fn random_hermitian_tuple(rng: &mut impl Rng, k: usize, n: usize) -> Result<HermitianTuple> {
    HermitianTuple::new((0..k).map(|_| random_hermitian(rng, n, false, false)).collect())
}

/// Tuple of k independent zero-diagonal Hermitian matrices.
pub fn random_zero_diagonal_tuple(
    rng: &mut impl Rng,
    k: usize,
    n: usize,
) -> Result<HermitianTuple> {
    HermitianTuple::new((0..k).map(|_| random_hermitian(rng, n, true, false)).collect())
}

/// Tuple of k independent zero-diagonal real symmetric matrices.
pub fn random_real_symmetric_tuple(
    rng: &mut impl Rng,
    k: usize,
    n: usize,
) -> Result<HermitianTuple> {
    HermitianTuple::new((0..k).map(|_| random_hermitian(rng, n, true, true)).collect())
}

/// Zero-diagonal Hermitian contraction tuple: each member rescaled to
/// operator norm `cap` (use cap < 1 to stay strictly inside the ball).
pub fn random_contraction_tuple(
    rng: &mut impl Rng,
    k: usize,
    n: usize,
    cap: f64,
) -> Result<HermitianTuple> {
    let matrices = (0..k)
        .map(|_| {
            let m = random_hermitian(rng, n, true, false);
            let norm = operator_norm(m.matrix());
            if norm <= 1e-12 {
                m
            } else {
                HermitianMatrix::new_unchecked(m.matrix().scale_real(cap / norm))
            }
        })
        .collect();
    HermitianTuple::new(matrices)
}

/// Positive semidefinite tuple: each member G·G*/n for a random complex G.
pub fn random_psd_tuple(rng: &mut impl Rng, k: usize, n: usize) -> Result<HermitianTuple> {
    let matrices = (0..k)
        .map(|_| {
            let g = ComplexMatrix::from_fn(n, |_, _| {
                c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            HermitianMatrix::new_unchecked(g.matmul(&g.adjoint()).scale_real(1.0 / n as f64))
        })
        .collect();
    HermitianTuple::new(matrices)
}

/// General complex matrix with entries uniform in the unit square and the
/// diagonal shifted to make the trace exactly zero (up to rounding).
pub fn random_zero_trace_matrix(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::from_fn(n, |_, _| {
        c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let mean = m.trace() / n as f64;
    for i in 0..n {
        m.set(i, i, m.get(i, i) - mean);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_eigenvalues;

    #[test]
    fn seeded_streams_are_reproducible() {
        let mut r1 = rng_from_seed(42);
        let mut r2 = rng_from_seed(42);
        let a = random_hermitian(&mut r1, 5, false, false);
        let b = random_hermitian(&mut r2, 5, false, false);
        assert_eq!(a.matrix().sub(b.matrix()).max_abs_entry(), 0.0);

        let t1 = random_zero_diagonal_tuple(&mut r1, 2, 4).unwrap();
        let t2 = random_zero_diagonal_tuple(&mut r2, 2, 4).unwrap();
        for (m1, m2) in t1.matrices().iter().zip(t2.matrices()) {
            assert_eq!(m1.matrix().sub(m2.matrix()).max_abs_entry(), 0.0);
        }

        let mut r3 = rng_from_seed(43);
        let c = random_hermitian(&mut r3, 5, false, false);
        assert!(a.matrix().sub(c.matrix()).max_abs_entry() > 0.0);
    }

    #[test]
    fn structural_flags_hold() {
        let mut rng = rng_from_seed(7);
        let zd = random_zero_diagonal_tuple(&mut rng, 3, 5).unwrap();
        assert!(zd.zero_diagonal());

        let real = random_real_symmetric_tuple(&mut rng, 2, 4).unwrap();
        assert!(real.zero_diagonal());
        for m in real.matrices() {
            for i in 0..4 {
                for j in 0..4 {
                    assert_eq!(m.get(i, j).im, 0.0);
                }
            }
        }

        let contr = random_contraction_tuple(&mut rng, 2, 6, 0.9).unwrap();
        assert!(contr.zero_diagonal());
        assert!(contr.contraction());
        for m in contr.matrices() {
            let norm = operator_norm(m.matrix());
            assert!((norm - 0.9).abs() < 1e-9, "norm {norm}");
        }
    }

    #[test]
    fn psd_and_zero_trace() {
        let mut rng = rng_from_seed(11);
        let psd = random_psd_tuple(&mut rng, 2, 4).unwrap();
        for m in psd.matrices() {
            let min = hermitian_eigenvalues(m)[0];
            assert!(min >= -1e-10, "min eigenvalue {min}");
        }

        let z = random_zero_trace_matrix(&mut rng, 7);
        assert!(z.trace().norm() <= 1e-13 * 7.0);
    }
}
