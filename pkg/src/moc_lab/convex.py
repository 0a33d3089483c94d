"""Convex-hull membership with explicit convex-combination certificates.

Two query paths cover the toolkit's needs:

* ``membership2d`` treats complex numbers as points of R^2, builds the hull
  by monotone chain, and produces certificates with at most three generators
  (2-D Caratheodory) by locating a fan triangle anchored at hull vertex 0.
* ``membership_lp`` answers hull membership in R^d through a phase-1
  simplex feasibility solve (dense tableau, Bland's rule) and returns the
  basic feasible weights as the certificate.

Verdicts are ``inside`` / ``boundary`` / ``outside`` with a signed distance
(negative inside) normalized by the hull diameter on the 2-D path.  An
``outside`` verdict never carries a certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .errors import (
    CapacityError,
    CertificateError,
    ConvergenceError,
    DimensionError,
)

__all__ = [
    "HullMembership",
    "hull2d",
    "hull_diameter",
    "membership2d",
    "membership_lp",
    "poly_coefficients",
    "validate_certificate",
]

DEFAULT_TOL = 1e-8
LP_MAX_GENERATORS = 10**4
PREFILTER_THRESHOLD = 4096
WEIGHT_SUM_TOL = 1e-12
# absolute floor on reconstruction bands, covering plain float rounding
RECON_FLOOR = 1e-13

INSIDE = "inside"
BOUNDARY = "boundary"
OUTSIDE = "outside"


@dataclass(frozen=True)
class HullMembership:
    """Membership verdict with an optional sparse certificate.

    ``certificate`` lists (generator index, weight) pairs with nonnegative
    weights summing to one; reproducing the query from them is guaranteed
    within ``tolerance_used`` (an absolute bound in query units).
    """

    verdict: str
    signed_distance: float
    certificate: list[tuple[int, float]] | None
    tolerance_used: float

    @property
    def is_member(self) -> bool:
        return self.verdict != OUTSIDE


def _as_points(points: Any) -> np.ndarray:
    pts = np.asarray(points, dtype=complex)
    if pts.ndim != 1 or pts.size == 0:
        raise DimensionError("need a non-empty 1-D sequence of points")
    if not np.all(np.isfinite(pts.real) & np.isfinite(pts.imag)):
        raise DimensionError("points must be finite")
    return pts


def _cross(a: np.ndarray | complex, b: np.ndarray | complex):
    return np.real(a) * np.imag(b) - np.imag(a) * np.real(b)


def _prefilter(pts: np.ndarray) -> np.ndarray:
    """Exact candidate reduction: points strictly inside the polygon of
    directional extremes cannot be hull vertices (Akl-Toussaint)."""
    angles = np.arange(16) * (math.tau / 16)
    dirs = np.cos(angles) + 1j * np.sin(angles)
    corners = [int(np.argmax(np.real(np.conj(d) * pts))) for d in dirs]
    seen: list[int] = []
    for c in corners:
        if c not in seen:
            seen.append(c)
    poly = pts[seen]
    if len(seen) < 3:
        return np.arange(len(pts))
    keep = np.zeros(len(pts), dtype=bool)
    for k in range(len(poly)):
        a, b = poly[k], poly[(k + 1) % len(poly)]
        keep |= _cross(b - a, pts - a) <= 0.0
    keep[seen] = True
    return np.nonzero(keep)[0]


def hull2d(points: Any) -> np.ndarray:
    """Counterclockwise convex hull via monotone chain.

    Returns indices into ``points``.  Collinear inputs give the 2-point
    segment, coincident inputs a single vertex; ties are broken by (re, im)
    order so the result is deterministic.
    """
    pts = _as_points(points)
    cand = _prefilter(pts) if len(pts) > PREFILTER_THRESHOLD else np.arange(len(pts))
    vals, first = np.unique(pts[cand], return_index=True)  # sorted by (re, im)
    idx = cand[first]
    if len(vals) == 1:
        return np.array([idx[0]], dtype=np.int64)

    def chain(order: range) -> list[int]:
        out: list[int] = []
        for k in order:
            p = vals[k]
            while len(out) >= 2 and _cross(vals[out[-1]] - vals[out[-2]], p - vals[out[-2]]) <= 0.0:
                out.pop()
            out.append(k)
        return out

    lower = chain(range(len(vals)))
    upper = chain(range(len(vals) - 1, -1, -1))
    hull_local = lower[:-1] + upper[:-1]
    return idx[np.array(hull_local, dtype=np.int64)]


def hull_diameter(points: Any, hull: np.ndarray) -> float:
    """Largest pairwise distance among hull vertices."""
    pts = np.asarray(points, dtype=complex)[hull]
    best = 0.0
    step = 2048
    for lo in range(0, len(pts), step):
        block = pts[lo : lo + step]
        best = max(best, float(np.abs(block[:, None] - pts[None, :]).max()))
    return best


def _point_segment_distance(a: complex, b: complex, q: complex) -> tuple[float, float]:
    """(distance from q to segment ab, clamped projection parameter)."""
    ab = b - a
    denom = abs(ab) ** 2
    if denom == 0.0:
        return abs(q - a), 0.0
    t = (np.conj(ab) * (q - a)).real / denom
    tc = min(1.0, max(0.0, t))
    return abs(a + tc * ab - q), tc


def _certificate_from_edges(
    vals: np.ndarray, hull: np.ndarray, query: complex
) -> tuple[list[tuple[int, float]], float]:
    """Best 2-sparse certificate over hull edges (fallback path)."""
    h = len(hull)
    best: tuple[float, int, float] | None = None
    for k in range(h):
        a, b = vals[k], vals[(k + 1) % h]
        dist, t = _point_segment_distance(a, b, query)
        if best is None or dist < best[0]:
            best = (dist, k, t)
    assert best is not None
    dist, k, t = best
    cert = [(int(hull[k]), float(1.0 - t)), (int(hull[(k + 1) % h]), float(t))]
    cert = [(i, w) for i, w in cert if w > 0.0]
    return cert, dist


def _fan_certificate(
    vals: np.ndarray, hull: np.ndarray, query: complex, band: float
) -> list[tuple[int, float]]:
    """Caratheodory certificate from the fan triangle containing the query.

    Binary search on the fan angle around hull vertex 0, then a 2x2
    barycentric solve; falls back to edge projection for degenerate
    triangles or boundary-band queries sitting just outside.
    """
    h = len(vals)
    v0 = vals[0]
    r = query - v0
    lo, hi = 1, h - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _cross(vals[mid] - v0, r) >= 0.0:
            lo = mid
        else:
            hi = mid
    u, w = vals[lo] - v0, vals[lo + 1] - v0
    det = _cross(u, w)
    if abs(det) > 1e-14 * max(1.0, abs(u) * abs(w)):
        b1 = _cross(r, w) / det
        b2 = _cross(u, r) / det
        weights = np.clip(np.array([1.0 - b1 - b2, b1, b2]), 0.0, None)
        total = weights.sum()
        if total > 0.0:
            weights /= total
            positions = (0, lo, lo + 1)
            recon = sum(wt * complex(vals[p]) for p, wt in zip(positions, weights))
            if abs(recon - query) <= band:
                return [
                    (int(hull[p]), float(wt))
                    for p, wt in zip(positions, weights)
                    if wt > 0.0
                ]
    cert, dist = _certificate_from_edges(vals, hull, query)
    if dist > band:
        raise ConvergenceError(
            f"certificate reconstruction error {dist:.3e} exceeds band {band:.3e}",
            residual=dist,
        )
    return cert


def membership2d(points: Any, query: complex, tol: float = DEFAULT_TOL) -> HullMembership:
    """Locate a complex query relative to the hull of a complex point set.

    The boundary band is ``tol`` in units of the hull diameter; degenerate
    hulls (segment, single point) use segment projection and point equality.
    Inside and boundary verdicts carry a <=3-sparse certificate.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    pts = _as_points(points)
    query = complex(query)
    hull = hull2d(pts)
    return membership2d_with_hull(pts, query, hull, tol)


def membership2d_with_hull(
    pts: np.ndarray, query: complex, hull: np.ndarray, tol: float
) -> HullMembership:
    """Same as ``membership2d`` for a precomputed hull of the same points."""
    vals = pts[hull]
    h = len(hull)

    if h == 1:
        p = complex(vals[0])
        scale = max(1.0, abs(p))
        band = max(tol, RECON_FLOOR) * scale
        dist = float(abs(query - p))
        if dist <= band:
            return HullMembership(BOUNDARY, dist / scale, [(int(hull[0]), 1.0)], band)
        return HullMembership(OUTSIDE, dist / scale, None, band)

    diameter = hull_diameter(pts, hull)
    scale = max(1.0, float(np.abs(vals).max()), abs(query))
    band = max(2.0 * tol * diameter, RECON_FLOOR * scale)

    if h == 2:
        a, b = complex(vals[0]), complex(vals[1])
        dist, t = _point_segment_distance(a, b, query)
        perp = abs(_cross(b - a, query - a)) / diameter
        axial = (np.conj(b - a) * (query - a)).real / diameter**2
        on_segment = perp <= tol * diameter and -tol <= axial <= 1.0 + tol
        if not on_segment:
            return HullMembership(OUTSIDE, float(dist / diameter), None, band)
        # distance to the segment's relative boundary (its endpoints)
        margin = float(min(axial, 1.0 - axial))
        verdict = INSIDE if margin > tol else BOUNDARY
        cert = [(int(hull[0]), float(1.0 - t)), (int(hull[1]), float(t))]
        cert = [(i, w) for i, w in cert if w > 0.0]
        return HullMembership(verdict, -margin, cert, band)

    rolled = np.roll(vals, -1)
    edge = rolled - vals
    lengths = np.abs(edge)
    inside_margin = float(np.min(_cross(edge, query - vals) / lengths))
    if inside_margin >= 0.0:
        signed = -inside_margin / diameter
    else:
        signed = float(
            min(
                _point_segment_distance(complex(vals[k]), complex(rolled[k]), query)[0]
                for k in range(h)
            )
            / diameter
        )
    if signed > tol:
        return HullMembership(OUTSIDE, signed, None, band)
    verdict = INSIDE if signed < -tol else BOUNDARY
    cert = _fan_certificate(vals, hull, query, band)
    return HullMembership(verdict, signed, cert, band)


# ---------------------------------------------------------------------------
# LP path (R^d)
# ---------------------------------------------------------------------------

def membership_lp(generators: Any, query: Any, tol: float = DEFAULT_TOL) -> HullMembership:
    """Hull membership in R^d by phase-1 simplex feasibility.

    Searches for weights w >= 0 with sum(w) = 1 and G^T w = query, allowing
    per-coordinate slack tol*scale (scale = max coordinate magnitude).  A
    feasible solve returns the basic weights (at most d+1 nonzero) as the
    certificate; an infeasible one reports the phase-1 objective as the
    distance surrogate.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    gens = np.asarray(generators, dtype=float)
    q = np.asarray(query, dtype=float)
    if gens.ndim != 2 or gens.shape[0] == 0 or gens.shape[1] == 0:
        raise DimensionError("generators must be a non-empty (G, d) array")
    if q.shape != (gens.shape[1],):
        raise DimensionError(
            f"query length {q.shape} does not match generator dimension {gens.shape[1]}"
        )
    count, dim = gens.shape
    if count > LP_MAX_GENERATORS:
        raise CapacityError(f"{count} generators exceed LP limit {LP_MAX_GENERATORS}")

    scale = float(max(np.abs(gens).max(), np.abs(q).max(initial=0.0)))
    if scale == 0.0:
        scale = 1.0
    rows = dim + 1
    a = np.vstack([gens.T / scale, np.ones((1, count))])
    b = np.concatenate([q / scale, [1.0]])
    flip = b < 0.0
    a[flip] *= -1.0
    b[flip] *= -1.0

    tableau = np.zeros((rows + 1, count + rows + 1))
    tableau[:rows, :count] = a
    tableau[:rows, count : count + rows] = np.eye(rows)
    tableau[:rows, -1] = b
    tableau[rows, :count] = -a.sum(axis=0)
    tableau[rows, -1] = -b.sum()
    basis = list(range(count, count + rows))

    max_iter = 50 * (dim + count)
    for _ in range(max_iter):
        reduced = tableau[rows, : count + rows]
        eligible = np.nonzero(reduced < -1e-12)[0]
        if eligible.size == 0:
            break
        j = int(eligible[0])  # Bland: lowest index enters
        col = tableau[:rows, j]
        best_ratio, best_row = math.inf, -1
        for r in range(rows):
            if col[r] > 1e-12:
                ratio = tableau[r, -1] / col[r]
                if ratio < best_ratio - 1e-15 or (
                    ratio <= best_ratio + 1e-15
                    and (best_row < 0 or basis[r] < basis[best_row])
                ):
                    best_ratio, best_row = ratio, r
        if best_row < 0:
            break  # cannot happen in phase 1; defensive
        tableau[best_row] /= tableau[best_row, j]
        for r in range(rows + 1):
            if r != best_row and tableau[r, j] != 0.0:
                tableau[r] -= tableau[r, j] * tableau[best_row]
        basis[best_row] = j
    else:
        raise ConvergenceError(f"simplex iteration cap {max_iter} reached")

    objective = float(-tableau[rows, -1])
    weights = np.zeros(count)
    for r, var in enumerate(basis):
        if var < count:
            weights[var] = tableau[r, -1]

    band = max(tol * scale, RECON_FLOOR * max(1.0, scale))
    residual = gens.T @ weights - q
    feasible = bool(
        np.all(np.abs(residual) <= band) and abs(weights.sum() - 1.0) <= max(tol, 1e-9)
    )
    if not feasible:
        return HullMembership(OUTSIDE, objective, None, band)
    weights = np.clip(weights, 0.0, None)
    weights /= weights.sum()
    cert = [(int(i), float(w)) for i, w in enumerate(weights) if w > 0.0]
    verdict = INSIDE if objective <= 1e-12 * rows else BOUNDARY
    return HullMembership(verdict, objective - tol, cert, band)


# ---------------------------------------------------------------------------
# certificates and polynomial points
# ---------------------------------------------------------------------------

def validate_certificate(generators: Any, membership: HullMembership, query: Any) -> bool:
    """Independently recheck a certificate: nonnegative weights summing to 1
    (within 1e-12) whose combination reproduces the query within
    ``membership.tolerance_used``."""
    if membership.certificate is None:
        raise CertificateError("membership result carries no certificate")
    idx = [i for i, _ in membership.certificate]
    wts = [w for _, w in membership.certificate]
    if any(w < 0.0 for w in wts):
        return False
    if abs(math.fsum(wts) - 1.0) > WEIGHT_SUM_TOL:
        return False
    gens = np.asarray(generators)
    if gens.ndim == 1:
        sel = gens[idx].astype(complex)
        recon = complex(
            math.fsum(w * z.real for w, z in zip(wts, sel)),
            math.fsum(w * z.imag for w, z in zip(wts, sel)),
        )
        return abs(recon - complex(query)) <= membership.tolerance_used
    sel = gens[idx].astype(float)
    q = np.asarray(query, dtype=float)
    recon = np.array([math.fsum(w * row[k] for w, row in zip(wts, sel)) for k in range(sel.shape[1])])
    return bool(np.max(np.abs(recon - q)) <= membership.tolerance_used)


def poly_coefficients(roots: Sequence[complex]) -> np.ndarray:
    """Coefficients (c_1..c_n) of prod_j (x + r_j) = x^n + c_1 x^{n-1} + ... + c_n.

    These are the elementary symmetric functions of the roots, the
    coordinates used for hull membership in polynomial space.
    """
    rs = np.asarray(roots, dtype=complex)
    coeffs = np.zeros(len(rs) + 1, dtype=complex)
    coeffs[0] = 1.0
    for k, r in enumerate(rs, start=1):
        for j in range(k, 0, -1):
            coeffs[j] = coeffs[j] + r * coeffs[j - 1]
    return coeffs[1:]
