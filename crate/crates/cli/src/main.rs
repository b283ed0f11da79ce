//! Command-line front end for the paving, selection, and commutator
//! pipelines: JSON files in, JSON reports out, exit codes wired for CI.
//!
//! Exit codes: 0 success, 2 input/validation failure, 3 enumeration budget
//! exceeded, 4 certified bound violated (or a numerical certificate could
//! not be produced). Reports are byte-identical for identical
//! (input, config, seed) triples and embed SHA-256 hashes of both the
//! config and the input so runs can be audited after the fact.

use clap::{Args, Parser, Subcommand};
use mdpave::budget::{DEFAULT_ENUMERATION_BUDGET, EnumerationBudget};
use mdpave::commutator::{commutator_norm_report, recursive_commutator};
use mdpave::constructions::{
    fourier_matrix, paley_conference_matrix, signed_mdp_identity_check, tightness_tuple,
    verify_singleton_necessity,
};
use mdpave::io;
use mdpave::linalg::{HermitianMatrix, HermitianTuple, operator_norm};
use mdpave::selection::{joint_restricted_invertibility, multipave, two_sided_pave};
use mdpave::verify::{SUITE_NAMES, VerifyOptions, run_suite};
use mdpave::{MdpError, Result};
use serde_json::{Value, json};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "mdpave", version, about = "Joint pavings, restricted invertibility, and commutator decompositions for Hermitian tuples", long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Jointly pave a zero-diagonal Hermitian contraction tuple.
    Multipave(MultipaveArgs),
    /// Two-sided paving of a single zero-diagonal contraction matrix.
    #[command(name = "pave2sided")]
    Pave2sided(Pave2sidedArgs),
    /// Select a large common subset on which all members stay below epsilon.
    Restrict(RestrictArgs),
    /// Decompose a zero-trace matrix as a commutator A = [B, C].
    Commutator(CommutatorArgs),
    /// Emit reference objects: Fourier / conference matrices, tight tuples,
    /// signed-tuple graph identities.
    Construct(ConstructArgs),
    /// Run the named numerical identity suite (or "all").
    Verify(VerifyArgs),
}

/// Options shared by every subcommand; together they form the run config
/// that is hashed into each report.
#[derive(Args)]
struct CommonOpts {
    /// Hard cap on the number of enumerated terms in any single sum.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
    budget: u64,
    /// Seed for randomized checks (verify suites).
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads for enumeration loops; 0 keeps the library default.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Slack for root-level bound comparisons done by the CLI.
    #[arg(long = "tol-root", default_value_t = 1e-11)]
    tol_root: f64,
    /// Largest accepted entrywise deviation from hermiticity in inputs.
    #[arg(long = "tol-hermiticity", default_value_t = 1e-12)]
    tol_hermiticity: f64,
    /// Relative residual threshold for commutator reconstruction.
    #[arg(long = "tol-residual", default_value_t = 1e-8)]
    tol_residual: f64,
    /// Write the JSON report to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MultipaveArgs {
    /// Tuple JSON file: {"k", "n", "matrices": [{"n", "entries": [[[re, im], ..], ..]}, ..]}.
    #[arg(long, short = 'i')]
    input: PathBuf,
    /// Target paving level in (0, 1); derives r = ceil(18k/eps^2) unless --r is given.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Explicit number of paving blocks.
    #[arg(long)]
    r: Option<usize>,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct Pave2sidedArgs {
    /// Matrix JSON file (zero diagonal, operator norm at most 1).
    #[arg(long, short = 'i')]
    input: PathBuf,
    /// Number of paving blocks; certifies ‖A(X_b)‖ < 12√2/√r per block.
    #[arg(long)]
    r: usize,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct RestrictArgs {
    /// Tuple JSON file (zero diagonal, contractions).
    #[arg(long, short = 'i')]
    input: PathBuf,
    /// Spectral target in (0, 1); keeps ⌊n·eps²/(6k)⌋ indices.
    #[arg(long)]
    epsilon: f64,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct CommutatorArgs {
    /// Matrix JSON file with (numerically) zero trace.
    #[arg(long, short = 'i')]
    input: PathBuf,
    /// Recurse until blocks are at most this size, then solve directly.
    #[arg(long, default_value_t = 6)]
    base_threshold: usize,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct ConstructArgs {
    #[command(subcommand)]
    what: ConstructWhat,
}

#[derive(Subcommand)]
enum ConstructWhat {
    /// Unitary Fourier matrix of order m.
    Fourier {
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Symmetric conference matrix of order m (m = q+1, q prime ≡ 1 mod 4).
    Conference {
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Tuple forcing singleton pavings at level epsilon, with certificate.
    Tightness {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        epsilon: f64,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Signed-adjacency averaging identity for a graph given as an edge list
    /// JSON file: {"n", "edges": [[u, v], ..]} with 1-based vertices.
    GraphIdentity {
        #[arg(long, short = 'i')]
        input: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name, or "all".
    #[arg(default_value = "all")]
    suite: String,
    #[command(flatten)]
    common: CommonOpts,
}

/// Validated run configuration derived from the common options.
struct RunConfig {
    budget: EnumerationBudget,
    seed: u64,
    threads: usize,
    tol_root: f64,
    tol_hermiticity: f64,
    tol_residual: f64,
    out: Option<PathBuf>,
}

impl RunConfig {
    fn from_opts(o: &CommonOpts) -> Result<Self> {
        for (name, v) in [
            ("--tol-root", o.tol_root),
            ("--tol-hermiticity", o.tol_hermiticity),
            ("--tol-residual", o.tol_residual),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(MdpError::InvalidArgument(format!(
                    "{name} must be a positive finite number, got {v}"
                )));
            }
        }
        if o.budget == 0 {
            return Err(MdpError::InvalidArgument("--budget must be ≥ 1".to_string()));
        }
        if o.threads > 0 {
            rayon::ThreadPoolBuilder::new()
                .num_threads(o.threads)
                .build_global()
                .map_err(|e| MdpError::InvalidArgument(format!("thread pool: {e}")))?;
        }
        Ok(RunConfig {
            budget: EnumerationBudget::new(o.budget),
            seed: o.seed,
            threads: o.threads,
            tol_root: o.tol_root,
            tol_hermiticity: o.tol_hermiticity,
            tol_residual: o.tol_residual,
            out: o.out.clone(),
        })
    }

    fn to_json(&self) -> Value {
        json!({
            "budget": self.budget.limit(),
            "seed": self.seed,
            "threads": self.threads,
            "tolerances": {
                "root": io::float_to_json(self.tol_root),
                "hermiticity": io::float_to_json(self.tol_hermiticity),
                "residual": io::float_to_json(self.tol_residual),
            },
        })
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let digest = h.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| MdpError::Io(format!("{}: {e}", path.display())))
}

fn bytes_to_text(path: &Path, bytes: &[u8]) -> Result<String> {
    String::from_utf8(bytes.to_vec()).map_err(|e| MdpError::Io(format!("{}: {e}", path.display())))
}

/// Parse a tuple file, accepting hermiticity deviations up to `tol` and
/// snapping each matrix to its Hermitian part (A + A*)/2, which is exactly
/// Hermitian in floating point.
fn parse_tuple_with_tol(text: &str, tol: f64) -> Result<HermitianTuple> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| MdpError::InvalidArgument(format!("tuple parse: {e}")))?;
    let obj = v
        .as_object()
        .ok_or_else(|| MdpError::InvalidArgument("tuple JSON must be an object".to_string()))?;
    let k = obj
        .get("k")
        .and_then(Value::as_u64)
        .ok_or_else(|| MdpError::InvalidArgument("tuple JSON needs integer field \"k\"".to_string()))?
        as usize;
    let n = obj
        .get("n")
        .and_then(Value::as_u64)
        .ok_or_else(|| MdpError::InvalidArgument("tuple JSON needs integer field \"n\"".to_string()))?
        as usize;
    let arr = obj
        .get("matrices")
        .and_then(Value::as_array)
        .ok_or_else(|| MdpError::InvalidArgument("tuple JSON needs array field \"matrices\"".to_string()))?;
    if arr.len() != k {
        return Err(MdpError::DimensionMismatch { expected: k, got: arr.len() });
    }
    let mut members = Vec::with_capacity(k);
    for mv in arr {
        let a = io::matrix_from_json(mv)?;
        if a.dim() != n {
            return Err(MdpError::DimensionMismatch { expected: n, got: a.dim() });
        }
        let sym = a.add(&a.adjoint()).scale_real(0.5);
        let dev = a.sub(&sym).max_abs_entry();
        if dev > tol {
            return Err(MdpError::NotHermitian { residual: dev, tol });
        }
        members.push(HermitianMatrix::new(sym)?);
    }
    HermitianTuple::new(members)
}

fn read_tuple_with_tol(path: &Path, tol: f64) -> Result<(Vec<u8>, HermitianTuple)> {
    let bytes = read_file(path)?;
    let tuple = parse_tuple_with_tol(&bytes_to_text(path, &bytes)?, tol)?;
    Ok((bytes, tuple))
}

/// Wrap a report with command name, config, and audit hashes, then write it
/// to --out or stdout.
fn emit(command: &str, cfg: &RunConfig, input_hash: &str, report: Value) -> Result<()> {
    let cfg_json = cfg.to_json();
    let cfg_hash = sha256_hex(io::to_pretty_string(&cfg_json).as_bytes());
    let envelope = io::report_envelope(
        report,
        &[
            ("command", json!(command)),
            ("config", cfg_json),
            ("config_sha256", json!(cfg_hash)),
            ("input_sha256", json!(input_hash)),
        ],
    );
    match &cfg.out {
        Some(path) => io::write_json(path, &envelope),
        None => {
            print!("{}", io::to_pretty_string(&envelope));
            Ok(())
        }
    }
}

fn cmd_multipave(args: MultipaveArgs) -> Result<()> {
    let cfg = RunConfig::from_opts(&args.common)?;
    if args.epsilon.is_none() && args.r.is_none() {
        return Err(MdpError::InvalidArgument(
            "need --epsilon, --r, or both".to_string(),
        ));
    }
    if let Some(eps) = args.epsilon
        && !(eps > 0.0 && eps.is_finite())
    {
        return Err(MdpError::InvalidArgument(format!("--epsilon must be positive, got {eps}")));
    }
    let (bytes, tuple) = read_tuple_with_tol(&args.input, cfg.tol_hermiticity)?;
    // With an explicit r the library certifies the level it achieved; the
    // placeholder epsilon is then only used when deriving r.
    let report = multipave(&tuple, args.epsilon.unwrap_or(1.0), args.r, cfg.budget)?;
    if let (Some(eps), Some(_)) = (args.epsilon, args.r) {
        let achieved = report
            .per_block_per_matrix_lambda_max
            .iter()
            .flatten()
            .fold(f64::NEG_INFINITY, |m, &x| m.max(x));
        if achieved >= eps + cfg.tol_root {
            return Err(MdpError::BoundViolation {
                detail: format!(
                    "requested level {eps} not met with r = {}: worst block λmax = {achieved:.12}",
                    report.r
                ),
            });
        }
    }
    emit("multipave", &cfg, &sha256_hex(&bytes), io::paving_report_to_json(&report))
}

fn cmd_pave2sided(args: Pave2sidedArgs) -> Result<()> {
    let cfg = RunConfig::from_opts(&args.common)?;
    let bytes = read_file(&args.input)?;
    let a = io::parse_matrix(&bytes_to_text(&args.input, &bytes)?)?;
    let report = two_sided_pave(&a, args.r, cfg.budget)?;
    emit("pave2sided", &cfg, &sha256_hex(&bytes), io::paving_report_to_json(&report))
}

fn cmd_restrict(args: RestrictArgs) -> Result<()> {
    let cfg = RunConfig::from_opts(&args.common)?;
    let (bytes, tuple) = read_tuple_with_tol(&args.input, cfg.tol_hermiticity)?;
    let report = joint_restricted_invertibility(&tuple, args.epsilon, cfg.budget)?;
    let degenerate = report.kept_set.is_empty();
    if !degenerate {
        for (j, &lam) in report.per_matrix_lambda_max.iter().enumerate() {
            if lam >= args.epsilon + cfg.tol_root {
                return Err(MdpError::BoundViolation {
                    detail: format!(
                        "member {}: λmax over kept set = {lam:.12} not below epsilon = {}",
                        j + 1,
                        args.epsilon
                    ),
                });
            }
        }
    }
    let mut body = io::selection_report_to_json(&report);
    if let Some(map) = body.as_object_mut() {
        map.insert("degenerate".to_string(), json!(degenerate));
    }
    emit("restrict", &cfg, &sha256_hex(&bytes), body)
}

fn cmd_commutator(args: CommutatorArgs) -> Result<()> {
    let cfg = RunConfig::from_opts(&args.common)?;
    let bytes = read_file(&args.input)?;
    let a = io::parse_matrix(&bytes_to_text(&args.input, &bytes)?)?;
    let result = recursive_commutator(&a, args.base_threshold, cfg.budget)?;
    let norm_a = operator_norm(&a);
    if result.residual > cfg.tol_residual * norm_a {
        return Err(MdpError::BoundViolation {
            detail: format!(
                "reconstruction residual {:.3e} exceeds {:.1e}·‖A‖ = {:.3e}",
                result.residual,
                cfg.tol_residual,
                cfg.tol_residual * norm_a
            ),
        });
    }
    if result.norm_b > std::f64::consts::SQRT_2 + 1e-10 {
        return Err(MdpError::BoundViolation {
            detail: format!("‖B‖ = {:.12} exceeds √2", result.norm_b),
        });
    }
    let (product, factor) = commutator_norm_report(&result, a.dim());
    if product > factor * norm_a + 1e-9 {
        return Err(MdpError::BoundViolation {
            detail: format!(
                "‖B‖‖C‖ = {product:.6e} exceeds the certified envelope {:.6e}",
                factor * norm_a
            ),
        });
    }
    let mut body = io::commutator_result_to_json(&result);
    if let Some(map) = body.as_object_mut() {
        map.insert("input_operator_norm".to_string(), io::float_to_json(norm_a));
        map.insert("norm_product".to_string(), io::float_to_json(product));
        map.insert("norm_product_envelope".to_string(), io::float_to_json(factor * norm_a));
    }
    emit("commutator", &cfg, &sha256_hex(&bytes), body)
}

fn cmd_construct(args: ConstructArgs) -> Result<()> {
    match args.what {
        ConstructWhat::Fourier { m, common } => {
            let cfg = RunConfig::from_opts(&common)?;
            let f = fourier_matrix(m)?;
            let params = json!({"variant": "fourier", "m": m});
            let hash = sha256_hex(io::to_pretty_string(&params).as_bytes());
            emit("construct", &cfg, &hash, json!({"parameters": params, "matrix": io::matrix_to_json(&f)}))
        }
        ConstructWhat::Conference { m, common } => {
            let cfg = RunConfig::from_opts(&common)?;
            let c = paley_conference_matrix(m)?;
            let params = json!({"variant": "conference", "m": m});
            let hash = sha256_hex(io::to_pretty_string(&params).as_bytes());
            emit("construct", &cfg, &hash, json!({"parameters": params, "matrix": io::matrix_to_json(&c)}))
        }
        ConstructWhat::Tightness { k, epsilon, common } => {
            let cfg = RunConfig::from_opts(&common)?;
            let tt = tightness_tuple(k, epsilon)?;
            let cert = verify_singleton_necessity(tt.matrices(), epsilon)?;
            let params = json!({"variant": "tightness", "k": k, "epsilon": io::float_to_json(epsilon)});
            let hash = sha256_hex(io::to_pretty_string(&params).as_bytes());
            let body = json!({
                "parameters": params,
                "k": tt.k(),
                "block_size": tt.block_size(),
                "dim": tt.dim(),
                "epsilon": io::float_to_json(tt.epsilon()),
                "matrices": tt.matrices().iter().map(io::matrix_to_json).collect::<Vec<_>>(),
                "certificate": io::singleton_certificate_to_json(&cert),
            });
            emit("construct", &cfg, &hash, body)
        }
        ConstructWhat::GraphIdentity { input, common } => {
            let cfg = RunConfig::from_opts(&common)?;
            let bytes = read_file(&input)?;
            let graph = io::parse_graph(&bytes_to_text(&input, &bytes)?)?;
            let report = signed_mdp_identity_check(&graph, cfg.budget)?;
            let body = json!({
                "graph": io::graph_to_json(&graph),
                "identity": io::signed_identity_report_to_json(&report),
            });
            emit("construct", &cfg, &sha256_hex(&bytes), body)
        }
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<()> {
    let cfg = RunConfig::from_opts(&args.common)?;
    let opts = VerifyOptions { seed: cfg.seed, budget: cfg.budget };
    let outcomes = run_suite(&args.suite, &opts)?;
    let mut failed = 0usize;
    for o in &outcomes {
        let verdict = if o.passed { "PASS" } else { "FAIL" };
        println!(
            "{:<20} {}  checks {:>4}  max deviation {:>10.3e}  threshold {:.1e}  {}",
            o.name, verdict, o.checks, o.max_deviation, o.threshold, o.detail
        );
        if !o.passed {
            failed += 1;
        }
    }
    println!(
        "{} of {} suites passed (known suites: {})",
        outcomes.len() - failed,
        outcomes.len(),
        SUITE_NAMES.join(", ")
    );
    if cfg.out.is_some() {
        let body = json!({
            "suite_request": args.suite,
            "suites": outcomes
                .iter()
                .map(|o| {
                    json!({
                        "name": o.name,
                        "passed": o.passed,
                        "checks": o.checks,
                        "max_deviation": io::float_to_json(o.max_deviation),
                        "threshold": io::float_to_json(o.threshold),
                        "detail": o.detail,
                    })
                })
                .collect::<Vec<_>>(),
        });
        let params = json!({"suite": args.suite});
        let hash = sha256_hex(io::to_pretty_string(&params).as_bytes());
        emit("verify", &cfg, &hash, body)?;
    }
    if failed > 0 {
        return Err(MdpError::BoundViolation {
            detail: format!("{failed} verification suite(s) failed"),
        });
    }
    Ok(())
}

fn exit_code(err: &MdpError) -> u8 {
    match err {
        MdpError::BudgetExceeded { .. } => 3,
        MdpError::BoundViolation { .. }
        | MdpError::MonotonicityViolation { .. }
        | MdpError::NoAdmissibleIndex { .. }
        | MdpError::RootNonConvergence { .. }
        | MdpError::NotRealRooted { .. }
        | MdpError::SpectralCollision { .. }
        | MdpError::DegreeZero
        | MdpError::DegreeMismatch(..) => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Multipave(args) => cmd_multipave(args),
        Command::Pave2sided(args) => cmd_pave2sided(args),
        Command::Restrict(args) => cmd_restrict(args),
        Command::Commutator(args) => cmd_commutator(args),
        Command::Construct(args) => cmd_construct(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
