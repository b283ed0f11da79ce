//! JSON interchange: matrices and tuples in, reports out.
//!
//! Conventions: entries are `[re, im]` pairs in row-major order, external
//! indices are 1-based, and non-finite floats serialize as `null`. Output
//! objects keep sorted keys, so identical data gives identical bytes.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Number, Value};

use crate::commutator::{CommutatorLevel, CommutatorResult, SpectralSquare};
use crate::constructions::{SignedIdentityReport, SimpleGraph, SingletonCertificate};
use crate::error::{MdpError, Result};
use crate::linalg::{ComplexMatrix, HermitianTuple};
use crate::mdp::Assignment;
use crate::polynomial::RealPolynomial;
use crate::selection::{PavingReport, SelectionReport};
use num_complex::Complex64;

// ---------------------------------------------------------------------------
// Scalars
// ---------------------------------------------------------------------------

/// A float as JSON: numbers stay numbers, NaN/±∞ become null.
pub fn float_to_json(x: f64) -> Value {
    Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

fn floats_to_json(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| float_to_json(x)).collect())
}

fn complex_to_json(z: Complex64) -> Value {
    Value::Array(vec![float_to_json(z.re), float_to_json(z.im)])
}

// ---------------------------------------------------------------------------
// Matrices and tuples
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    n: usize,
    entries: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize, Deserialize)]
struct TupleJson {
    k: usize,
    n: usize,
    matrices: Vec<MatrixJson>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 2]>,
}

fn matrix_json(a: &ComplexMatrix) -> MatrixJson {
    let n = a.dim();
    MatrixJson {
        n,
        entries: (0..n)
            .map(|i| (0..n).map(|j| [a.get(i, j).re, a.get(i, j).im]).collect())
            .collect(),
    }
}

fn matrix_from_parts(m: &MatrixJson) -> Result<ComplexMatrix> {
    if m.entries.len() != m.n {
        return Err(MdpError::DimensionMismatch { expected: m.n, got: m.entries.len() });
    }
    for row in &m.entries {
        if row.len() != m.n {
            return Err(MdpError::DimensionMismatch { expected: m.n, got: row.len() });
        }
    }
    if m.n == 0 {
        return Err(MdpError::InvalidArgument("matrix must have positive dimension".to_string()));
    }
    let a = ComplexMatrix::from_fn(m.n, |i, j| {
        Complex64::new(m.entries[i][j][0], m.entries[i][j][1])
    });
    if !a.is_finite() {
        return Err(MdpError::NonFiniteEntry);
    }
    Ok(a)
}

pub fn matrix_to_json(a: &ComplexMatrix) -> Value {
    serde_json::to_value(matrix_json(a)).expect("matrix serialization cannot fail")
}

pub fn matrix_from_json(v: &Value) -> Result<ComplexMatrix> {
    let parts: MatrixJson = serde_json::from_value(v.clone())
        .map_err(|e| MdpError::InvalidArgument(format!("matrix json: {e}")))?;
    matrix_from_parts(&parts)
}

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    let parts: MatrixJson = serde_json::from_str(text)
        .map_err(|e| MdpError::InvalidArgument(format!("matrix json: {e}")))?;
    matrix_from_parts(&parts)
}

pub fn tuple_to_json(t: &HermitianTuple) -> Value {
    json!({
        "k": t.k(),
        "n": t.dim(),
        "matrices": t.matrices().iter().map(|m| matrix_to_json(m.matrix())).collect::<Vec<_>>(),
    })
}

pub fn parse_tuple(text: &str) -> Result<HermitianTuple> {
    let parts: TupleJson = serde_json::from_str(text)
        .map_err(|e| MdpError::InvalidArgument(format!("tuple json: {e}")))?;
    if parts.matrices.len() != parts.k {
        return Err(MdpError::DimensionMismatch { expected: parts.k, got: parts.matrices.len() });
    }
    let matrices = parts
        .matrices
        .iter()
        .map(|m| {
            if m.n != parts.n {
                return Err(MdpError::DimensionMismatch { expected: parts.n, got: m.n });
            }
            matrix_from_parts(m)
        })
        .collect::<Result<Vec<_>>>()?;
    HermitianTuple::from_matrices(matrices)
}

pub fn parse_graph(text: &str) -> Result<SimpleGraph> {
    let parts: GraphJson = serde_json::from_str(text)
        .map_err(|e| MdpError::InvalidArgument(format!("graph json: {e}")))?;
    let edges: Vec<(usize, usize)> = parts.edges.iter().map(|e| (e[0], e[1])).collect();
    SimpleGraph::new(parts.n, &edges)
}

pub fn graph_to_json(g: &SimpleGraph) -> Value {
    json!({
        "n": g.vertex_count(),
        "edges": g.edges().iter().map(|&(u, v)| vec![u, v]).collect::<Vec<_>>(),
    })
}

/// Stable pretty rendering with a trailing newline; object keys are sorted,
/// so equal values give equal bytes.
pub fn to_pretty_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("value serialization cannot fail");
    s.push('\n');
    s
}

fn io_err(path: &Path, e: std::io::Error) -> MdpError {
    MdpError::Io(format!("{}: {e}", path.display()))
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix> {
    parse_matrix(&fs::read_to_string(path).map_err(|e| io_err(path, e))?)
}

pub fn write_matrix(path: &Path, a: &ComplexMatrix) -> Result<()> {
    fs::write(path, to_pretty_string(&matrix_to_json(a))).map_err(|e| io_err(path, e))
}

pub fn read_tuple(path: &Path) -> Result<HermitianTuple> {
    parse_tuple(&fs::read_to_string(path).map_err(|e| io_err(path, e))?)
}

pub fn write_tuple(path: &Path, t: &HermitianTuple) -> Result<()> {
    fs::write(path, to_pretty_string(&tuple_to_json(t))).map_err(|e| io_err(path, e))
}

pub fn read_graph(path: &Path) -> Result<SimpleGraph> {
    parse_graph(&fs::read_to_string(path).map_err(|e| io_err(path, e))?)
}

pub fn write_json(path: &Path, v: &Value) -> Result<()> {
    fs::write(path, to_pretty_string(v)).map_err(|e| io_err(path, e))
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

pub fn polynomial_to_json(p: &RealPolynomial) -> Value {
    floats_to_json(p.coeffs())
}

/// Blocks of a complete assignment with 1-based element indices.
pub fn assignment_to_json(a: &Assignment) -> Value {
    let blocks: Vec<Vec<usize>> = a
        .blocks()
        .iter()
        .map(|block| block.iter().map(|&e| e + 1).collect())
        .collect();
    json!({ "n": a.n(), "r": a.r(), "blocks": blocks })
}

fn optional_float(x: Option<f64>) -> Value {
    x.map(float_to_json).unwrap_or(Value::Null)
}

pub fn selection_report_to_json(rep: &SelectionReport) -> Value {
    json!({
        "kept_set": rep.kept_set,
        "per_matrix_lambda_max": floats_to_json(&rep.per_matrix_lambda_max),
        "certified_root_bound": float_to_json(rep.certified_root_bound),
        "theorem_bound": float_to_json(rep.theorem_bound),
        "analytic_shrink_bound": optional_float(rep.analytic_shrink_bound),
        "n": rep.n,
        "k": rep.k,
        "m": rep.m,
        "c": float_to_json(rep.c),
        "alpha": float_to_json(rep.alpha),
        "root_trace": floats_to_json(&rep.root_trace),
    })
}

pub fn paving_report_to_json(rep: &PavingReport) -> Value {
    json!({
        "paving": assignment_to_json(&rep.paving),
        "r": rep.r,
        "k": rep.k,
        "n": rep.n,
        "per_block_per_matrix_lambda_max": rep
            .per_block_per_matrix_lambda_max
            .iter()
            .map(|row| floats_to_json(row))
            .collect::<Vec<_>>(),
        "greedy_root_trace": floats_to_json(&rep.greedy_root_trace),
        "expected_poly_root": float_to_json(rep.expected_poly_root),
        "rootbound_3sqrt2": float_to_json(rep.rootbound_3sqrt2),
        "epsilon": float_to_json(rep.epsilon),
        "per_block_operator_norm": rep
            .per_block_operator_norm
            .as_ref()
            .map(|v| floats_to_json(v))
            .unwrap_or(Value::Null),
    })
}

fn square_to_json(s: &SpectralSquare) -> Value {
    json!({ "center": complex_to_json(s.center), "half_side": float_to_json(s.half_side) })
}

fn level_to_json(level: &CommutatorLevel) -> Value {
    json!({
        "depth": level.depth,
        "m": level.m,
        "r": level.r,
        "block_sizes": level.block_sizes,
        "paving_norms": floats_to_json(&level.paving_norms),
        "squares": level.squares.iter().map(square_to_json).collect::<Vec<_>>(),
        "base_case": level.base_case,
        "budget_fallback": level.budget_fallback,
    })
}

pub fn commutator_result_to_json(res: &CommutatorResult) -> Value {
    json!({
        "b": matrix_to_json(&res.b),
        "c": matrix_to_json(&res.c),
        "u": matrix_to_json(&res.u),
        "residual": float_to_json(res.residual),
        "norm_b": float_to_json(res.norm_b),
        "norm_c": float_to_json(res.norm_c),
        "trace": res.trace.iter().map(level_to_json).collect::<Vec<_>>(),
    })
}

pub fn singleton_certificate_to_json(cert: &SingletonCertificate) -> Value {
    json!({
        "holds": cert.holds,
        "witness": cert.witness.map(|(s, t)| vec![s, t]).map(Value::from).unwrap_or(Value::Null),
        "min_pair_norm": float_to_json(cert.min_pair_norm),
        "implied_block_count": cert.implied_block_count.map(Value::from).unwrap_or(Value::Null),
    })
}

pub fn signed_identity_report_to_json(rep: &SignedIdentityReport) -> Value {
    json!({
        "averaged": polynomial_to_json(&rep.averaged),
        "matching_side": polynomial_to_json(&rep.matching_side),
        "max_deviation": float_to_json(rep.max_deviation),
        "signings": rep.signings,
        "best_signing_radius": float_to_json(rep.best_signing_radius),
        "regular_degree": rep.regular_degree.map(Value::from).unwrap_or(Value::Null),
        "radius_bound": optional_float(rep.radius_bound),
        "radius_bound_met": rep.radius_bound_met.map(Value::from).unwrap_or(Value::Null),
    })
}

/// Wrap a report with provenance: config and input hashes plus extra fields.
pub fn report_envelope(report: Value, fields: &[(&str, Value)]) -> Value {
    let mut map = Map::new();
    for (k, v) in fields {
        map.insert((*k).to_string(), v.clone());
    }
    map.insert("report".to_string(), report);
    Value::Object(map)
}
