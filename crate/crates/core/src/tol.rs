//! Pinned numerical tolerances.
//!
//! Every threshold used by validation, greedy comparisons, and certified
//! bound checks lives here so the values are auditable in one place.
//! They are constants, not knobs: the test suites assert at exactly these
//! levels.

/// Relative Hermiticity tolerance: |A(i,j) - conj(A(j,i))| ≤ HERMITICITY_TOL · max|entry|.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Absolute bound on diagonal entries for the zero-diagonal flag.
pub const ZERO_DIAGONAL_TOL: f64 = 1e-12;

/// Operator-norm slack for the contraction flag: ‖A‖ ≤ 1 + CONTRACTION_TOL.
pub const CONTRACTION_TOL: f64 = 1e-10;

/// Relative trace tolerance for commutator inputs: |tr A| ≤ n · TRACE_TOL · max(1, ‖A‖).
pub const TRACE_TOL: f64 = 1e-10;

/// Absolute accuracy target for largest-root extraction, scaled by (1 + root bound).
pub const ROOT_TOL: f64 = 1e-11;

/// Imaginary-part tolerance when deciding real-rootedness of computed
/// expectation polynomials (exactly real-rooted in theory; roundoff moves
/// roots off-axis by O(eps · condition)).
pub const REAL_ROOTED_TOL: f64 = 1e-7;

/// Slack allowed in greedy root comparisons (child root vs. node root).
pub const GREEDY_STEP_TOL: f64 = 1e-9;

/// Relaxed greedy tolerance used for one retry before reporting failure.
pub const GREEDY_STEP_TOL_RELAXED: f64 = 1e-7;

/// Relative residual tolerance for Sylvester solutions.
pub const SYLVESTER_RESIDUAL_TOL: f64 = 1e-9;

/// Minimum spectral gap demanded between Sylvester coefficient spectra.
pub const SYLVESTER_GAP_TOL: f64 = 1e-8;

/// Relative residual allowed for a commutator decomposition A = BC - CB.
pub const COMMUTATOR_RESIDUAL_TOL: f64 = 1e-8;

/// Zero-diagonalization target: max |diagonal| after conjugation.
pub const ZERO_DIAG_SWEEP_TOL: f64 = 1e-10;

/// Slack added to analytic root bounds before asserting them.
pub const BOUND_SLACK: f64 = 1e-8;

/// Number of convex-combination samples per pair in the interlacing check.
pub const INTERLACER_SAMPLES: usize = 32;
