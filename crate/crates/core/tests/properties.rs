//! Property tests for the structural invariants: randomized inputs, exact
//! structural claims.

use mdpave::budget::EnumerationBudget;
use mdpave::commutator::zero_diagonal_conjugation;
use mdpave::constructions::{
    fourier_matrix, matching_polynomial, verify_singleton_necessity, SimpleGraph,
};
use mdpave::linalg::{hermitian_eigenvalues, operator_norm, ComplexMatrix, HermitianMatrix,
    HermitianTuple};
use mdpave::mdp::{mdp, Assignment};
use mdpave::polynomial::{is_real_rooted, largest_root, scale_argument, RealPolynomial};
use mdpave::selection::balance_blocks;
use mdpave::Complex64;
use proptest::prelude::*;

fn hermitian_from_entries(n: usize, entries: &[f64], zero_diagonal: bool) -> HermitianMatrix {
    let mut m = ComplexMatrix::zeros(n);
    let mut it = entries.iter().copied().cycle();
    for i in 0..n {
        for j in i..n {
            if i == j {
                let d = if zero_diagonal { 0.0 } else { it.next().unwrap() };
                m.set(i, i, Complex64::new(d, 0.0));
            } else {
                let re = it.next().unwrap();
                let im = it.next().unwrap();
                m.set(i, j, Complex64::new(re, im));
                m.set(j, i, Complex64::new(re, -im));
            }
        }
    }
    HermitianMatrix::new(m).expect("constructed Hermitian")
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn mixed_polynomial_is_monic_and_real_rooted(
        n in 2usize..=4,
        k in 1usize..=2,
        entries in prop::collection::vec(-1.0f64..1.0, 40),
    ) {
        let per = 20;
        let matrices: Vec<HermitianMatrix> = (0..k)
            .map(|i| hermitian_from_entries(n, &entries[i * per..(i + 1) * per], true))
            .collect();
        let tuple = HermitianTuple::new(matrices).unwrap();
        let chi = mdp(&tuple, EnumerationBudget::default()).unwrap();
        prop_assert_eq!(chi.degree(), Some(n));
        prop_assert!((chi.leading() - 1.0).abs() < 1e-12);
        prop_assert!(is_real_rooted(&chi, 1e-7));
        // zero diagonal kills the degree-(n-1) coefficient
        prop_assert!(chi.coeff(n - 1).abs() < 1e-12);
    }

    #[test]
    fn assignment_blocks_round_trip(
        map in prop::collection::vec(0usize..3, 1..=10),
    ) {
        let n = map.len();
        let a = Assignment::new(n, 3, map.clone()).unwrap();
        let blocks = a.blocks();
        let b = Assignment::from_blocks(n, &blocks).unwrap();
        prop_assert_eq!(b.map(), a.map());
        let total: usize = a.block_sizes().iter().sum();
        prop_assert_eq!(total, n);
    }

    #[test]
    fn largest_root_finds_the_maximum(
        roots in prop::collection::vec(-3.0f64..3.0, 1..=6),
    ) {
        let p = RealPolynomial::from_roots(&roots);
        let max = roots.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let found = largest_root(&p).unwrap();
        prop_assert!((found - max).abs() < 1e-7, "found {} vs {}", found, max);
    }

    #[test]
    fn argument_scaling_divides_roots(
        roots in prop::collection::vec(-2.0f64..2.0, 1..=5),
        s in 0.5f64..2.0,
    ) {
        let p = RealPolynomial::from_roots(&roots);
        let scaled = scale_argument(&p, s, true);
        let max = roots.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let found = largest_root(&scaled).unwrap();
        prop_assert!((found * s - max).abs() < 1e-6, "found {} vs {}", found * s, max);
    }

    #[test]
    fn matching_polynomial_structure(
        n in 2usize..=7,
        picks in prop::collection::vec(any::<bool>(), 21),
    ) {
        let mut edges = Vec::new();
        let mut t = 0usize;
        for u in 1..=n {
            for v in (u + 1)..=n {
                if picks[t % picks.len()] {
                    edges.push((u, v));
                }
                t += 1;
            }
        }
        let g = SimpleGraph::new(n, &edges).unwrap();
        let p = matching_polynomial(&g);
        prop_assert_eq!(p.degree(), Some(n));
        // odd-parity coefficients vanish; even ones alternate in sign
        for i in 0..=n {
            let c = p.coeff(i);
            if (n - i) % 2 == 1 {
                prop_assert_eq!(c, 0.0);
            } else {
                let j = (n - i) / 2;
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                prop_assert!(c * sign >= 0.0, "coefficient {} at degree {}", c, i);
            }
        }
        if n >= 2 {
            prop_assert_eq!(p.coeff(n - 2), -(edges.len() as f64));
        }
    }

    #[test]
    fn fourier_matrices_are_unitary(m in 1usize..=16) {
        let f = fourier_matrix(m).unwrap();
        let dev = f.matmul(&f.adjoint()).sub(&ComplexMatrix::identity(m)).max_abs_entry();
        prop_assert!(dev <= 1e-12);
    }

    #[test]
    fn singleton_certificate_monotone_in_epsilon(
        n in 2usize..=5,
        entries in prop::collection::vec(-1.0f64..1.0, 30),
        eps_lo in 0.05f64..0.5,
        gap in 0.0f64..0.5,
    ) {
        let a = hermitian_from_entries(n, &entries, false);
        let ms = vec![a.matrix().clone()];
        let eps_hi = eps_lo + gap;
        let hi = verify_singleton_necessity(&ms, eps_hi).unwrap();
        let lo = verify_singleton_necessity(&ms, eps_lo).unwrap();
        if hi.holds {
            prop_assert!(lo.holds, "holds at {} but not at smaller {}", eps_hi, eps_lo);
        }
    }

    #[test]
    fn operator_norm_matches_extreme_eigenvalue(
        n in 1usize..=6,
        entries in prop::collection::vec(-1.0f64..1.0, 42),
    ) {
        let a = hermitian_from_entries(n, &entries, false);
        let evals = hermitian_eigenvalues(&a);
        let by_eig = evals.iter().map(|e| e.abs()).fold(0.0f64, f64::max);
        let norm = operator_norm(a.matrix());
        prop_assert!((norm - by_eig).abs() <= 1e-9 * by_eig.max(1.0));
    }

    #[test]
    fn balancing_respects_partition_and_caps(
        map in prop::collection::vec(0usize..3, 3..=12),
    ) {
        let m = map.len();
        let a = Assignment::new(m, 3, map).unwrap();
        let balanced = balance_blocks(&a, 3, m).unwrap();
        let cap = (m / 3).max(1);
        let mut seen = vec![false; m];
        for block in balanced.blocks() {
            prop_assert!(!block.is_empty());
            prop_assert!(block.len() <= cap);
            for e in block {
                prop_assert!(!seen[e], "element {} appears twice", e);
                seen[e] = true;
            }
        }
        prop_assert!(seen.iter().all(|&s| s));
        prop_assert!(balanced.r() <= 2 * 3);
    }

    #[test]
    fn zero_diagonal_conjugation_properties(
        n in 2usize..=5,
        entries in prop::collection::vec(-1.0f64..1.0, 50),
    ) {
        let mut a = ComplexMatrix::zeros(n);
        let mut it = entries.iter().copied().cycle();
        for i in 0..n {
            for j in 0..n {
                a.set(i, j, Complex64::new(it.next().unwrap(), it.next().unwrap()));
            }
        }
        let mean = a.trace() / n as f64;
        for i in 0..n {
            a.set(i, i, a.get(i, i) - mean);
        }
        let (u, ap) = zero_diagonal_conjugation(&a).unwrap();
        let unitary_dev = u.adjoint().matmul(&u).sub(&ComplexMatrix::identity(n)).max_abs_entry();
        prop_assert!(unitary_dev <= 1e-10);
        let diag_dev = (0..n).map(|i| ap.get(i, i).norm()).fold(0.0f64, f64::max);
        prop_assert!(diag_dev <= 1e-10);
        let conj_dev = u.adjoint().matmul(&a).matmul(&u).sub(&ap).max_abs_entry();
        prop_assert!(conj_dev <= 1e-8);
    }
}
