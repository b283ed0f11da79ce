#!/usr/bin/env python3
"""Smoke test for the mdpave_py extension module.

Builds are located under target/{debug,release}; run

    cargo build -p mdpave-py            # or --release
    python3 python/smoke_test.py

The script copies the built shared library into a temp directory under the
importable name and exercises every exported entry point once.
"""

import math
import os
import shutil
import sys
import tempfile
from pathlib import Path


def locate_extension() -> Path:
    root = Path(__file__).resolve().parents[1]
    target = Path(os.environ.get("CARGO_TARGET_DIR", root / "target"))
    candidates = [
        target / profile / name
        for profile in ("release", "debug")
        for name in ("libmdpave_py.so", "mdpave_py.so", "libmdpave_py.dylib")
    ]
    built = [p for p in candidates if p.exists()]
    if not built:
        sys.exit("no built extension found; run `cargo build -p mdpave-py` first")
    return max(built, key=lambda p: p.stat().st_mtime)


WORKDIR = tempfile.mkdtemp(prefix="mdpave-py-")
shutil.copy2(locate_extension(), Path(WORKDIR) / "mdpave_py.so")
sys.path.insert(0, WORKDIR)

import mdpave_py as mp  # noqa: E402

CHECKS = []


def check(name, ok):
    CHECKS.append((name, bool(ok)))
    print(f"{'PASS' if ok else 'FAIL'}  {name}")


def close(a, b, tol=1e-10):
    return abs(a - b) <= tol


# --- constructions -----------------------------------------------------------
f6 = mp.fourier_matrix(6)
dev = max(
    abs(sum(f6[i][t] * f6[j][t].conjugate() for t in range(6)) - (1 if i == j else 0))
    for i in range(6)
    for j in range(6)
)
check("fourier unitarity", dev <= 1e-12)

c6 = mp.conference_matrix(6)
dev = max(
    abs(sum(c6[i][t] * c6[j][t] for t in range(6)) - (5 if i == j else 0))
    for i in range(6)
    for j in range(6)
)
check("conference C·Cᵀ = 5I", dev == 0.0)

check("matching polynomial of C₄", mp.matching_polynomial(4, [(1, 2), (2, 3), (3, 4), (1, 4)]) == [2.0, 0.0, -4.0, 0.0, 1.0])

ident = mp.signed_identity_check(4, [(1, 2), (2, 3), (3, 4), (1, 4)])
check("signed averaging identity on C₄", ident["max_deviation"] <= 1e-10 and ident["radius_bound_met"])

tight = mp.tightness_tuple(1, 0.40)
check(
    "tightness certificate",
    tight["certificate"]["holds"]
    and tight["certificate"]["implied_block_count"] == 6
    and close(tight["certificate"]["min_pair_norm"], 1 / math.sqrt(5), 1e-12),
)

# --- tuple operations --------------------------------------------------------
flip = [[0.0, 0.5], [0.5, 0.0]]
t = mp.HermitianTuple([flip])
check("tuple metadata", t.k == 1 and t.dim == 2 and t.zero_diagonal and t.contraction)
check("mdp coefficients", t.mdp() == [-0.25, 0.0, 1.0])
check("mdp largest root", close(t.mdp_largest_root(), 0.5, 1e-9))

paving = t.multipave(r=2)
check("paving splits into singletons", paving["paving"]["blocks"] == [[1], [2]])

big = [[0.0] * 12 for _ in range(12)]
for i in range(12):
    for j in range(12):
        if i != j and (i + j) % 3 == 0:
            big[i][j] = 0.2
sel = mp.HermitianTuple([big]).restrict(0.9)
check(
    "restricted subset below epsilon",
    len(sel["kept_set"]) == 1 and all(l < 0.9 for l in sel["per_matrix_lambda_max"]),
)

det = mp.mixed_determinant([[[complex(2), complex(0)], [complex(0), complex(3)]]])
check("mixed determinant of diag(2,3)", det == 6 + 0j)

two = mp.two_sided_pave([[0.0, 0.9], [0.9, 0.0]], 2)
check("two-sided paving norms", two["per_block_operator_norm"] == [0.0, 0.0])

# --- commutator --------------------------------------------------------------
res = mp.commutator([[1.0, 0.0], [0.0, -1.0]])
check(
    "commutator reconstruction",
    res["residual"] <= 1e-10
    and res["norm_b"] <= math.sqrt(2) + 1e-10
    and close(res["norm_product"], 0.5, 1e-9),
)

# --- scalar helpers ----------------------------------------------------------
check("largest root of x² − 2", close(mp.largest_root([-2.0, 0.0, 1.0]), math.sqrt(2), 1e-9))
check("eigenvalues of the flip matrix", all(close(a, b, 1e-12) for a, b in zip(mp.hermitian_eigenvalues([[0.0, 1.0], [1.0, 0.0]]), [-1.0, 1.0])))
check("characteristic polynomial", mp.char_poly([[2.0, 0.0], [0.0, 3.0]]) == [6.0, -5.0, 1.0])
check("operator norm", close(mp.matrix_operator_norm([[0.0, 2.0], [0.0, 0.0]]), 2.0, 1e-10))

# --- verification suite ------------------------------------------------------
suite = mp.verify_suite("expected-mdp", seed=1)
check("verify suite passes", len(suite) == 1 and suite[0]["passed"] and suite[0]["max_deviation"] <= suite[0]["threshold"])

# --- error mapping -----------------------------------------------------------
try:
    mp.HermitianTuple([[[0.0, 1.0]]])
    check("ragged input rejected", False)
except ValueError:
    check("ragged input rejected", True)

try:
    mp.HermitianTuple([flip, flip]).mdp(budget=1)
    check("budget exhaustion raises RuntimeError", False)
except RuntimeError:
    check("budget exhaustion raises RuntimeError", True)

try:
    mp.conference_matrix(10)
    check("unsupported conference order rejected", False)
except ValueError:
    check("unsupported conference order rejected", True)

# --- summary -----------------------------------------------------------------
failed = [name for name, ok in CHECKS if not ok]
print(f"\n{len(CHECKS) - len(failed)} of {len(CHECKS)} checks passed")
if failed:
    sys.exit("failed: " + ", ".join(failed))
