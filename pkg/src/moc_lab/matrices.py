"""Dense complex matrix arithmetic and the structural constructions.

Matrices are carried as 2-D ``numpy.ndarray`` of ``complex128`` in row-major
order.  Sizes stay small (the permutation cap limits everything to n of a
couple dozen), so clarity wins over blocking tricks everywhere.

The canonical interchange format for matrix files is JSON::

    {"rows": R, "cols": C, "entries": [[re, im], ...]}

with entries listed row-major as pairs of doubles.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import DimensionError, ParseError

__all__ = [
    "MatrixClassReport",
    "as_matrix",
    "block_mixer",
    "canonical_matrix_json",
    "classify",
    "conj_add_scalar",
    "determinant",
    "dilate",
    "direct_sum",
    "frobenius",
    "load_matrix",
    "matrix_from_json",
    "matrix_to_json",
    "save_matrix",
]


def as_matrix(obj: Any) -> np.ndarray:
    """Coerce to a 2-D complex128 array and reject non-finite entries."""
    a = np.asarray(obj, dtype=complex)
    if a.ndim != 2 or a.shape[0] == 0 or a.shape[1] == 0:
        raise DimensionError(f"expected a non-empty 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise DimensionError("matrix entries must be finite (no NaN/Inf)")
    return a


def require_square(a: np.ndarray, what: str = "matrix") -> int:
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"{what} must be square, got {a.shape[0]}x{a.shape[1]}")
    return a.shape[0]


def frobenius(a: np.ndarray) -> float:
    return float(np.linalg.norm(a))


@dataclass(frozen=True)
class MatrixClassReport:
    """Structural residuals of a square matrix, Frobenius norm, each scaled
    by max(1, ||A||_F) so tolerances are scale-free."""

    normality_residual: float
    hermitian_residual: float
    skew_residual: float
    unitarity_residual: float

    def as_dict(self) -> dict:
        return {
            "normality_residual": self.normality_residual,
            "hermitian_residual": self.hermitian_residual,
            "skew_residual": self.skew_residual,
            "unitarity_residual": self.unitarity_residual,
        }


def classify(a: Any) -> MatrixClassReport:
    """Measure how far a square matrix is from normal / hermitian /
    skew-hermitian / unitary."""
    a = as_matrix(a)
    n = require_square(a)
    ah = a.conj().T
    scale = max(1.0, frobenius(a))
    eye = np.eye(n)
    return MatrixClassReport(
        normality_residual=frobenius(a @ ah - ah @ a) / scale,
        hermitian_residual=frobenius(a - ah) / scale,
        skew_residual=frobenius(a + ah) / scale,
        unitarity_residual=frobenius(ah @ a - eye) / scale,
    )


def dilate(x: Any, s: complex) -> np.ndarray:
    """Embed a square matrix X into its 2n x 2n normal dilation.

    The result is the block matrix [[X, (X-sI)*], [(X-sI)*, X]], which is
    normal for every X and s.  The off-diagonal block is computed literally
    as the conjugate transpose of (X - sI).
    """
    x = as_matrix(x)
    n = require_square(x, "dilation input")
    q = (x - complex(s) * np.eye(n)).conj().T
    out = np.empty((2 * n, 2 * n), dtype=complex)
    out[:n, :n] = x
    out[:n, n:] = q
    out[n:, :n] = q
    out[n:, n:] = x
    return out


def block_mixer(n: int) -> np.ndarray:
    """The 2n x 2n unitary (1/sqrt 2)[[I, I], [-I, I]] that block-diagonalizes
    [[M, N], [N, M]] into (M-N) + (M+N)."""
    if n < 1:
        raise DimensionError("block mixer needs n >= 1")
    eye = np.eye(n)
    u = np.empty((2 * n, 2 * n), dtype=complex)
    u[:n, :n] = eye
    u[:n, n:] = eye
    u[n:, :n] = -eye
    u[n:, n:] = eye
    return u / math.sqrt(2.0)


def direct_sum(a: Any, c: Any) -> np.ndarray:
    """Block-diagonal sum [[A, 0], [0, C]] of two square matrices."""
    a = as_matrix(a)
    c = as_matrix(c)
    n = require_square(a, "first summand")
    m = require_square(c, "second summand")
    out = np.zeros((n + m, n + m), dtype=complex)
    out[:n, :n] = a
    out[n:, n:] = c
    return out


def determinant(a: Any) -> complex:
    """Determinant via LU with partial pivoting and row-swap sign tracking."""
    a = as_matrix(a)
    n = require_square(a)
    lu = a.copy()
    det = complex(1.0)
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if lu[p, k] == 0.0:
            return complex(0.0)
        if p != k:
            lu[[k, p], k:] = lu[[p, k], k:]
            det = -det
        det *= complex(lu[k, k])
        if k + 1 < n:
            factors = lu[k + 1 :, k] / lu[k, k]
            lu[k + 1 :, k + 1 :] -= np.outer(factors, lu[k, k + 1 :])
    return det


def conj_add_scalar(a: Any, mode: str, alpha: complex = 0.0) -> np.ndarray:
    """Return X + X* + alpha*I (mode="sum") or X - X* + alpha*I (mode="difference")."""
    a = as_matrix(a)
    n = require_square(a)
    ah = a.conj().T
    if mode == "sum":
        out = a + ah
    elif mode == "difference":
        out = a - ah
    else:
        raise ValueError(f"mode must be 'sum' or 'difference', got {mode!r}")
    return out + complex(alpha) * np.eye(n)


# ---------------------------------------------------------------------------
# JSON interchange
# ---------------------------------------------------------------------------

def matrix_to_json(a: Any) -> dict:
    a = as_matrix(a)
    rows, cols = a.shape
    flat = a.reshape(-1)
    return {
        "rows": int(rows),
        "cols": int(cols),
        "entries": [[float(z.real), float(z.imag)] for z in flat],
    }


def matrix_from_json(obj: Any) -> np.ndarray:
    if not isinstance(obj, dict):
        raise ParseError(f"matrix JSON must be an object, got {type(obj).__name__}")
    for field in ("rows", "cols", "entries"):
        if field not in obj:
            raise ParseError(f"matrix JSON missing field {field!r}")
    rows, cols, entries = obj["rows"], obj["cols"], obj["entries"]
    if not isinstance(rows, int) or not isinstance(cols, int) or rows < 1 or cols < 1:
        raise ParseError("matrix JSON 'rows' and 'cols' must be positive integers")
    if not isinstance(entries, list) or len(entries) != rows * cols:
        got = len(entries) if isinstance(entries, list) else type(entries).__name__
        raise ParseError(
            f"matrix JSON 'entries' must list rows*cols = {rows * cols} pairs, got {got}"
        )
    out = np.empty(rows * cols, dtype=complex)
    for k, pair in enumerate(entries):
        if (
            not isinstance(pair, (list, tuple))
            or len(pair) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in pair)
        ):
            raise ParseError(f"entry {k} must be a [re, im] pair of numbers, got {pair!r}")
        if not (math.isfinite(pair[0]) and math.isfinite(pair[1])):
            raise ParseError(f"entry {k} must be finite, got {pair!r}")
        out[k] = complex(pair[0], pair[1])
    return out.reshape(rows, cols)


def canonical_matrix_json(a: Any) -> str:
    """Byte-stable serialization used for files and input digests."""
    return json.dumps(matrix_to_json(a), indent=2)


def save_matrix(path: str, a: Any) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(canonical_matrix_json(a))
        f.write("\n")


def load_matrix(path: str) -> np.ndarray:
    try:
        with open(path, "r", encoding="utf-8") as f:
            obj = json.load(f)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}") from exc
    try:
        return matrix_from_json(obj)
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from exc
