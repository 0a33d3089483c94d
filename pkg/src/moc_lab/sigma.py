"""Permutation enumeration and sigma-point generation.

Permutations of {0..n-1} are enumerated in Heap's-algorithm order (the
non-recursive counter formulation, starting from the identity), which fixes
a stable index <-> permutation correspondence used by certificates and CSV
exports.  The one-line string form of a permutation is its image sequence
separated by single spaces, e.g. "2 0 1".

For a pair of eigenvalue lists a, b the sigma-point of permutation s is
``prod_i (a[i] + b[s(i)])``; a pair of n-dimensional spectra has n! of them.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Any, IO, Iterator

import numpy as np

from .errors import CapacityError, DimensionError
from .spectra import Spectrum

__all__ = [
    "DEFAULT_CAP",
    "ScaleReport",
    "SigmaPointSet",
    "check_capacity",
    "compose_theta",
    "enumerate_permutations",
    "perm_from_string",
    "perm_to_string",
    "permutation_table",
    "products_representable",
    "recompute_point",
    "safe_scale",
    "scale_guard",
    "sigma_points",
    "write_sigma_csv",
]

DEFAULT_CAP = math.factorial(10)

PRODUCT_CHUNK = 1 << 18
MAGNITUDE_BOUND = 1e150  # running |partial product| outside [1/B, B] flags the set

_table_cache: dict[int, np.ndarray] = {}
_table_lock = threading.Lock()


def check_permutation(images: Any) -> np.ndarray:
    arr = np.asarray(images, dtype=np.int64)
    if arr.ndim != 1 or len(arr) == 0:
        raise DimensionError("permutation must be a non-empty 1-D index sequence")
    if sorted(arr.tolist()) != list(range(len(arr))):
        raise DimensionError(f"not a bijection on 0..{len(arr) - 1}: {arr.tolist()}")
    return arr


def perm_to_string(images: Any) -> str:
    return " ".join(str(int(i)) for i in images)


def perm_from_string(text: str) -> np.ndarray:
    try:
        images = [int(tok) for tok in text.split()]
    except ValueError as exc:
        raise DimensionError(f"bad permutation string {text!r}") from exc
    return check_permutation(images)


def check_capacity(n: int, cap: int = DEFAULT_CAP) -> int:
    """Number of permutations of degree n, or a capacity error naming the bound."""
    if n < 1:
        raise DimensionError("permutation degree must be >= 1")
    count = math.factorial(n)
    if count > cap:
        raise CapacityError(f"{n}! = {count} permutations exceeds cap {cap}")
    return count


def enumerate_permutations(n: int, cap: int = DEFAULT_CAP) -> Iterator[tuple[int, ...]]:
    """Yield all n! permutations exactly once, in Heap's-algorithm order."""
    check_capacity(n, cap)
    a = list(range(n))
    yield tuple(a)
    c = [0] * n
    i = 1
    while i < n:
        if c[i] < i:
            if i % 2 == 0:
                a[0], a[i] = a[i], a[0]
            else:
                a[c[i]], a[i] = a[i], a[c[i]]
            yield tuple(a)
            c[i] += 1
            i = 1
        else:
            c[i] = 0
            i += 1


def _build_table(n: int) -> np.ndarray:
    # Vectorized form of Heap's recursion: the k-block of states is the
    # current start state gathered through the full (k-1)-table, because
    # swaps act on positions.  Matches enumerate_permutations exactly
    # (asserted in the test suite).
    tab = np.zeros((1, 1), dtype=np.int8)
    for k in range(2, n + 1):
        ext = np.empty((tab.shape[0], k), dtype=np.int8)
        ext[:, : k - 1] = tab
        ext[:, k - 1] = k - 1
        blocks = []
        state = np.arange(k, dtype=np.int8)
        for i in range(k):
            block = state[ext]
            blocks.append(block)
            if i < k - 1:
                state = block[-1].copy()
                if k % 2 == 0:
                    state[i], state[k - 1] = state[k - 1], state[i]
                else:
                    state[0], state[k - 1] = state[k - 1], state[0]
        tab = np.vstack(blocks)
    return tab


def permutation_table(n: int, cap: int = DEFAULT_CAP) -> np.ndarray:
    """All n! permutations as a read-only (n!, n) int8 array, Heap order.

    Tables are cached per degree; n <= 10 keeps the largest one at ~36 MB.
    """
    check_capacity(n, cap)
    with _table_lock:
        tab = _table_cache.get(n)
        if tab is None:
            tab = _build_table(n)
            tab.flags.writeable = False
            _table_cache[n] = tab
    return tab


def compose_theta(sigma: Any, pi: Any) -> np.ndarray:
    """Block composition: sigma on the first n indices, pi shifted onto the
    next m.  The sigma-point of the result over concatenated spectra factors
    as z_sigma * v_pi."""
    sigma = check_permutation(sigma)
    pi = check_permutation(pi)
    return np.concatenate([sigma, pi + len(sigma)])


@dataclass(frozen=True)
class SigmaPointSet:
    """All n! sigma-points of a spectrum pair, with permutation provenance.

    ``points[k]`` corresponds to ``perms[k]`` (a row of the Heap-order
    table).  ``scaled_by`` reports the uniform eigenvalue rescaling applied
    before taking products (1.0 whenever magnitudes were safe): points hold
    ``prod (a_i + b_s(i)) / scaled_by**n``.
    """

    n: int
    points: np.ndarray
    perms: np.ndarray
    a_spec: Spectrum
    b_spec: Spectrum
    scaled_by: float = 1.0

    @property
    def count(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class ScaleReport:
    max_abs: float
    min_abs: float
    flagged: bool
    has_zero: bool


def _as_spectrum(x: Any) -> Spectrum:
    return x if isinstance(x, Spectrum) else Spectrum.exact(x)


def _term_magnitude_range(a: np.ndarray, b: np.ndarray) -> tuple[float, float, bool]:
    mags = np.abs(a[:, None] + b[None, :])
    has_zero = bool(np.any(mags == 0.0))
    nonzero = mags[mags > 0.0]
    lo = float(nonzero.min()) if nonzero.size else 0.0
    return float(mags.max()), lo, has_zero


def _magnitudes_safe(hi: float, lo: float, n: int) -> bool:
    if hi == 0.0:
        return True
    return max(1.0, hi) ** n <= MAGNITUDE_BOUND and (
        lo == 0.0 or min(1.0, lo) ** n >= 1.0 / MAGNITUDE_BOUND
    )


def products_representable(a: Any, b: Any) -> bool:
    """Cheap sufficient screen: sigma-products of this spectrum pair cannot
    leave [1e-150, 1e150] in magnitude, zeros aside."""
    av, bv = _as_spectrum(a).values, _as_spectrum(b).values
    if len(av) != len(bv):
        raise DimensionError(f"spectrum dimensions differ: {len(av)} vs {len(bv)}")
    hi, lo, _ = _term_magnitude_range(np.asarray(av), np.asarray(bv))
    return _magnitudes_safe(hi, lo, len(av))


def safe_scale(a: Any, b: Any) -> float:
    """Uniform eigenvalue divisor that keeps sigma-products representable.

    The geometric mean of the extreme term magnitudes centres the running
    products in log space, which is the best a single rescaling can do.
    """
    av, bv = _as_spectrum(a).values, _as_spectrum(b).values
    hi, lo, _ = _term_magnitude_range(av, bv)
    if hi == 0.0:
        return 1.0
    lo = lo if lo > 0.0 else hi
    return math.sqrt(hi * lo)


def sigma_points(a: Any, b: Any, cap: int = DEFAULT_CAP, scaled_by: float = 1.0) -> SigmaPointSet:
    """Evaluate all n! sigma-points of the spectrum pair (a, b).

    Products are taken left-to-right in double precision, vectorized in
    chunks over the Heap-order table.  ``scaled_by`` divides both eigenvalue
    lists first (see ``safe_scale``); membership verdicts and certificate
    weights are invariant under that homothety.
    """
    a = _as_spectrum(a)
    b = _as_spectrum(b)
    if a.dim != b.dim:
        raise DimensionError(f"spectrum dimensions differ: {a.dim} vs {b.dim}")
    n = a.dim
    tab = permutation_table(n, cap)
    av = np.asarray(a.values, dtype=complex) / scaled_by
    bv = np.asarray(b.values, dtype=complex) / scaled_by
    points = np.empty(tab.shape[0], dtype=complex)
    for lo in range(0, tab.shape[0], PRODUCT_CHUNK):
        hi = min(lo + PRODUCT_CHUNK, tab.shape[0])
        points[lo:hi] = np.prod(av[None, :] + bv[tab[lo:hi]], axis=1)
    return SigmaPointSet(
        n=n, points=points, perms=tab, a_spec=a, b_spec=b, scaled_by=float(scaled_by)
    )


def recompute_point(pset: SigmaPointSet, index: int) -> complex:
    """Re-evaluate one sigma-point from its stored provenance."""
    perm = pset.perms[index]
    av = pset.a_spec.values / pset.scaled_by
    bv = pset.b_spec.values / pset.scaled_by
    out = complex(1.0)
    for i in range(pset.n):
        out *= av[i] + bv[perm[i]]
    return out


def scale_guard(pset: SigmaPointSet) -> ScaleReport:
    """Detect overflow/underflow risk in the sigma-product evaluation.

    Flags the set when some permutation's running partial product leaves
    [1e-150, 1e150] in magnitude.  Exact zero terms are legitimate (the
    product is exactly zero from there on) and are reported separately; the
    log-based scan treats them as magnitude 1, which can only over-flag.
    """
    av = pset.a_spec.values / pset.scaled_by
    bv = pset.b_spec.values / pset.scaled_by
    hi, lo, has_zero = _term_magnitude_range(av, bv)
    if _magnitudes_safe(hi, lo, pset.n):
        finite = np.abs(pset.points)
        return ScaleReport(
            max_abs=float(finite.max()),
            min_abs=float(finite.min()),
            flagged=False,
            has_zero=has_zero,
        )
    log_bound = math.log10(MAGNITUDE_BOUND)
    tab = pset.perms
    flagged = False
    max_log = -math.inf
    min_log = math.inf
    any_zero_product = False
    for start in range(0, tab.shape[0], PRODUCT_CHUNK):
        stop = min(start + PRODUCT_CHUNK, tab.shape[0])
        terms = np.abs(av[None, :] + bv[tab[start:stop]])
        zero_rows = np.any(terms == 0.0, axis=1)
        any_zero_product = any_zero_product or bool(zero_rows.any())
        running = np.cumsum(np.log10(np.where(terms == 0.0, 1.0, terms)), axis=1)
        if np.any(np.abs(running) > log_bound):
            flagged = True
        finals = running[:, -1]
        live = finals[~zero_rows]
        if live.size:
            max_log = max(max_log, float(live.max()))
            min_log = min(min_log, float(live.min()))
    max_abs = 10.0**max_log if max_log > -math.inf else 0.0
    min_abs = 0.0 if any_zero_product else (10.0**min_log if min_log < math.inf else 0.0)
    return ScaleReport(max_abs=max_abs, min_abs=min_abs, flagged=flagged, has_zero=has_zero)


def write_sigma_csv(pset: SigmaPointSet, out: IO[str]) -> int:
    """Dump points as CSV rows (perm index, one-line permutation, re, im)."""
    out.write("index,permutation,re,im\n")
    for k in range(pset.count):
        z = pset.points[k]
        out.write(f"{k},{perm_to_string(pset.perms[k])},{float(z.real)!r},{float(z.imag)!r}\n")
    return pset.count
