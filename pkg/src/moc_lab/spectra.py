"""Eigenvalue machinery for hermitian and normal matrices, plus Haar-random
unitary sampling.

Randomness is deterministic and explicit: every sampling entry point takes a
64-bit seed (or an already-constructed ``numpy.random.Generator``) and the
stream is PCG64, so runs reproduce bit-for-bit across platforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable

import numpy as np

from .errors import ClassificationError, ConvergenceError, DimensionError
from .matrices import as_matrix, classify, frobenius, require_square

__all__ = [
    "Spectrum",
    "check_seed",
    "derive_seed",
    "eig_hermitian",
    "eig_normal",
    "generator",
    "haar_unitary",
    "match_multisets",
]

MAX_SEED = 2**64 - 1

HERMITIAN_GATE = 1e-10
NORMALITY_GATE = 1e-8
JACOBI_SWEEP_LIMIT = 30
JACOBI_OFF_TOL = 1e-14
NORMAL_RETRY_BUDGET = 8


def check_seed(seed: int) -> int:
    if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
        raise ValueError(f"seed must be an integer, got {type(seed).__name__}")
    if not 0 <= int(seed) <= MAX_SEED:
        raise ValueError(f"seed must fit in 64 bits, got {seed}")
    return int(seed)


def generator(seed: int | np.random.Generator) -> np.random.Generator:
    """PCG64 generator for a seed; passes an existing generator through."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(check_seed(seed)))


def derive_seed(seed: int, index: int) -> int:
    """Per-instance seed for batch runs: (seed + index) mod 2**64."""
    return (check_seed(seed) + int(index)) % (MAX_SEED + 1)


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalue multiset with a certified diagonalization residual.

    ``residual`` is ||V*AV - D||_F / max(1, ||A||_F) for the returned basis V
    and D = diag(values); ``basis`` may be None for synthetic spectra.
    """

    values: np.ndarray
    residual: float
    basis: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def exact(cls, values: Iterable[complex]) -> "Spectrum":
        """Wrap known eigenvalues (e.g. hand-built test data) as a Spectrum."""
        return cls(values=np.asarray(list(values), dtype=complex), residual=0.0)

    @property
    def dim(self) -> int:
        return len(self.values)


def _off_mass(a: np.ndarray) -> float:
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


def _jacobi_rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    """Annihilate a[p,q] with a unitary 2x2 rotation; accumulate it into v."""
    b = a[p, q]
    if abs(b) == 0.0:
        return
    phase = b / abs(b)
    tau = (a[q, q].real - a[p, p].real) / (2.0 * abs(b))
    if tau >= 0.0:
        t = 1.0 / (tau + math.hypot(1.0, tau))
    else:
        t = -1.0 / (-tau + math.hypot(1.0, tau))
    c = 1.0 / math.sqrt(1.0 + t * t)
    s = t * c
    # W = [[c, s], [-s*conj(phase), c*conj(phase)]] acting on columns (p, q)
    wpp, wpq = c, s
    wqp, wqq = -s * phase.conjugate(), c * phase.conjugate()
    colp, colq = a[:, p].copy(), a[:, q].copy()
    a[:, p] = colp * wpp + colq * wqp
    a[:, q] = colp * wpq + colq * wqq
    rowp, rowq = a[p, :].copy(), a[q, :].copy()
    a[p, :] = np.conj(wpp) * rowp + np.conj(wqp) * rowq
    a[q, :] = np.conj(wpq) * rowp + np.conj(wqq) * rowq
    colp, colq = v[:, p].copy(), v[:, q].copy()
    v[:, p] = colp * wpp + colq * wqp
    v[:, q] = colp * wpq + colq * wqq


def _jacobi(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi for an (exactly) hermitian matrix.

    Returns (diagonal values as a real vector, unitary basis V).  Stops when
    the off-diagonal Frobenius mass drops below 1e-14 * ||H||_F, or raises
    after 30 sweeps.
    """
    n = h.shape[0]
    a = h.astype(complex, copy=True)
    v = np.eye(n, dtype=complex)
    stop = JACOBI_OFF_TOL * max(1.0, frobenius(h))
    for _ in range(JACOBI_SWEEP_LIMIT):
        if _off_mass(a) <= stop:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                _jacobi_rotate(a, v, p, q)
    else:
        best = _off_mass(a) / max(1.0, frobenius(h))
        raise ConvergenceError(
            f"Jacobi sweep limit ({JACOBI_SWEEP_LIMIT}) reached, best residual {best:.3e}",
            residual=best,
        )
    return np.diag(a).real.copy(), v


def _sort_spectrum(values: np.ndarray, basis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # ascending by (Re, Im); lexsort keys are listed minor-to-major
    order = np.lexsort((values.imag, values.real))
    return values[order], basis[:, order]


def eig_hermitian(a: Any, tol: float = HERMITIAN_GATE) -> Spectrum:
    """Real sorted spectrum and orthonormal basis of a hermitian matrix.

    The input must be hermitian to within 1e-10 (scaled Frobenius); the
    diagonalization residual of the result is certified against ``tol``.
    """
    a = as_matrix(a)
    require_square(a)
    if classify(a).hermitian_residual > HERMITIAN_GATE:
        raise ClassificationError(
            f"matrix is not hermitian within {HERMITIAN_GATE:g}"
        )
    h = (a + a.conj().T) / 2.0  # exact hermitization of the gate-level noise
    diag, v = _jacobi(h)
    values = diag.astype(complex)  # imaginary parts forced to zero
    values, v = _sort_spectrum(values, v)
    residual = frobenius(v.conj().T @ a @ v - np.diag(values)) / max(1.0, frobenius(a))
    if residual > tol:
        raise ConvergenceError(
            f"hermitian eigensolve residual {residual:.3e} exceeds {tol:g}",
            residual=residual,
        )
    return Spectrum(values=values, residual=residual, basis=v)


def eig_normal(a: Any, seed: int | np.random.Generator = 0, tol: float = NORMALITY_GATE) -> Spectrum:
    """Complex spectrum of a normal matrix.

    Splits A = H + iK into commuting hermitian parts, diagonalizes H + t*K
    for a seed-drawn t in [0.25, 0.75], and accepts the basis if it also
    diagonalizes A.  A fresh t is drawn on failure (degenerate t can merge
    eigenspaces); the retry budget is 8.
    """
    a = as_matrix(a)
    require_square(a)
    if classify(a).normality_residual > NORMALITY_GATE:
        raise ClassificationError(f"matrix is not normal within {NORMALITY_GATE:g}")
    rng = generator(seed)
    h = (a + a.conj().T) / 2.0
    k = (a - a.conj().T) / 2j
    scale = max(1.0, frobenius(a))
    best = math.inf
    for _ in range(1 + NORMAL_RETRY_BUDGET):
        t = rng.uniform(0.25, 0.75)
        _, v = _jacobi(h + t * k)
        d_full = v.conj().T @ a @ v
        residual = _off_mass(d_full) / scale
        best = min(best, residual)
        if residual <= tol:
            values, v = _sort_spectrum(np.diag(d_full).copy(), v)
            return Spectrum(values=values, residual=residual, basis=v)
    raise ConvergenceError(
        f"normal eigensolve retry budget exhausted, best residual {best:.3e}",
        residual=best,
    )


def haar_unitary(n: int, seed: int | np.random.Generator = 0) -> np.ndarray:
    """Haar-distributed random unitary via Ginibre + QR.

    The QR factor alone is not Haar; multiplying each column of Q by the
    phase of the matching diagonal entry of R applies the standard fix.
    """
    if n < 1:
        raise DimensionError("haar_unitary needs n >= 1")
    rng = generator(seed)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.where(np.diag(r) == 0.0, 1.0, np.diag(r))  # zero diagonal has measure zero
    return q * (d / np.abs(d))


def _values_of(spec: Any) -> np.ndarray:
    if isinstance(spec, Spectrum):
        return np.asarray(spec.values, dtype=complex)
    return np.asarray(list(spec), dtype=complex)


def match_multisets(p: Any, q: Any, tol: float) -> tuple[bool, float]:
    """Decide whether two complex multisets pair up within ``tol``.

    Greedy nearest matching with a verification pass; when greedy fails and
    the sets have at most 8 elements, falls back to exhaustive assignment
    search.  Returns (matched, max pairing distance of the pairing found).
    """
    pv = _values_of(p)
    qv = _values_of(q)
    if len(pv) != len(qv):
        raise DimensionError(f"multiset sizes differ: {len(pv)} vs {len(qv)}")
    n = len(pv)
    if n == 0:
        return True, 0.0
    order = np.lexsort((pv.imag, pv.real))
    pv = pv[order]
    dist = np.abs(pv[:, None] - qv[None, :])

    used = np.zeros(n, dtype=bool)
    greedy_max = 0.0
    for i in range(n):
        j = int(np.argmin(np.where(used, math.inf, dist[i])))
        used[j] = True
        greedy_max = max(greedy_max, float(dist[i, j]))
    if greedy_max <= tol:
        return True, greedy_max
    if n > 8:
        return False, greedy_max

    # exhaustive: depth-first over q-candidates within tol for each p
    used[:] = False
    assignment_max = [math.inf]

    def descend(i: int, worst: float) -> bool:
        if i == n:
            assignment_max[0] = worst
            return True
        for j in np.argsort(dist[i]):
            if used[j] or dist[i, j] > tol:
                continue
            used[j] = True
            if descend(i + 1, max(worst, float(dist[i, j]))):
                return True
            used[j] = False
        return False

    if descend(0, 0.0):
        return True, assignment_max[0]
    return False, greedy_max
