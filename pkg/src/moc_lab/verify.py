"""End-to-end verification pipelines.

Each pipeline ties spectra, sigma-points, and convex membership into one
check with an explicit report object:

* ``verify_moc`` - does det(A+B) land in the hull of the sigma-points of a
  normal pair, with a convex-combination certificate when it does.
* ``verify_theorem1`` - the headline dilation check: both inputs are run
  through the normal dilation and the pair is expected to satisfy the
  conjecture; the block-unitary decomposition is asserted along the way.
* ``verify_direct_sum`` - composes two component certificates into one for
  the direct sum via the block permutation embedding.
* ``verify_fiedler`` - hermitian pairs: sampled det(A + UBU*) values stay
  real and inside the sigma-point range.
* ``verify_drury`` - hermitian pairs: polynomial-coefficient membership by
  LP feasibility.
* ``verify_similarity_invariance`` - simultaneous unitary similarity leaves
  sigma-points, determinant, and verdict unchanged.

The first two never legitimately fail (proven results); a failure is
reported as a violation and points at a tolerance bug, not at mathematics.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .convex import (
    BOUNDARY,
    HullMembership,
    INSIDE,
    OUTSIDE,
    hull2d,
    membership2d_with_hull,
    membership_lp,
    poly_coefficients,
    validate_certificate,
)
from .errors import CapacityError, CertificateError, ClassificationError, DimensionError
from .matrices import (
    MatrixClassReport,
    as_matrix,
    block_mixer,
    classify,
    conj_add_scalar,
    determinant,
    dilate,
    direct_sum,
    frobenius,
    require_square,
)
from .reports import matrix_digest
from .sigma import (
    DEFAULT_CAP,
    SigmaPointSet,
    check_capacity,
    compose_theta,
    perm_to_string,
    permutation_table,
    products_representable,
    safe_scale,
    sigma_points,
)
from .spectra import (
    HERMITIAN_GATE,
    NORMALITY_GATE,
    Spectrum,
    derive_seed,
    eig_hermitian,
    eig_normal,
    generator,
    haar_unitary,
    match_multisets,
)

__all__ = [
    "DeltaSample",
    "DirectSumReport",
    "DruryReport",
    "FiedlerReport",
    "MocReport",
    "SimilarityReport",
    "Theorem1Report",
    "verify_direct_sum",
    "verify_drury",
    "verify_fiedler",
    "verify_moc",
    "verify_similarity_invariance",
    "verify_theorem1",
]

DILATION_NORMALITY_TOL = 1e-12
BLOCK_IDENTITY_TOL = 1e-12
SPECTRUM_UNION_TOL = 1e-7
SIGMA_MATCH_TOL = 1e-7
DET_MATCH_RTOL = 1e-10
MULTISET_MATCH_LIMIT = 10_000


def _verdict_class(verdict: str) -> str:
    return "member" if verdict in (INSIDE, BOUNDARY) else OUTSIDE


def _certificate_perm_strings(
    membership: HullMembership, pset: SigmaPointSet
) -> list[tuple[str, float]] | None:
    if membership.certificate is None:
        return None
    return [(perm_to_string(pset.perms[i]), w) for i, w in membership.certificate]


@dataclass(frozen=True)
class MocReport:
    """Outcome of one conjecture check on a pair of normal matrices.

    ``det_query`` equals ``det_sum / scaled_by**dim`` and is the value that
    was actually tested against the (identically scaled) sigma-point hull;
    ``scaled_by`` is 1 unless eigenvalue magnitudes forced a rescale.
    """

    dim: int
    spec_a: Spectrum
    spec_b: Spectrum
    det_sum: complex
    det_query: complex
    scaled_by: float
    sigma_count: int
    membership: HullMembership
    residual_a: MatrixClassReport
    residual_b: MatrixClassReport
    seed: int
    tolerances: dict[str, float]
    hull_indices: np.ndarray = field(repr=False)
    hull_values: np.ndarray = field(repr=False)
    certificate_perms: list[tuple[str, float]] | None
    digest_a: str
    digest_b: str
    wall_time_s: float

    @property
    def passed(self) -> bool:
        return self.membership.is_member


def verify_moc(
    a: Any,
    b: Any,
    tol: float = 1e-8,
    cap: int = DEFAULT_CAP,
    seed: int = 0,
) -> MocReport:
    """Check det(A+B) against the sigma-point hull of a normal pair."""
    start = time.perf_counter()
    a = as_matrix(a)
    b = as_matrix(b)
    n = require_square(a, "first matrix")
    if require_square(b, "second matrix") != n:
        raise DimensionError(f"matrix dimensions differ: {n} vs {b.shape[0]}")
    check_capacity(n, cap)
    residual_a = classify(a)
    residual_b = classify(b)
    for name, rep in (("first", residual_a), ("second", residual_b)):
        if rep.normality_residual > NORMALITY_GATE:
            raise ClassificationError(
                f"{name} matrix is not normal within {NORMALITY_GATE:g} "
                f"(residual {rep.normality_residual:.3e})"
            )
    spec_a = eig_normal(a, derive_seed(seed, 0))
    spec_b = eig_normal(b, derive_seed(seed, 1))

    scaled_by = 1.0
    if not products_representable(spec_a, spec_b):
        scaled_by = safe_scale(spec_a, spec_b)
    pset = sigma_points(spec_a, spec_b, cap, scaled_by=scaled_by)

    det_sum = determinant(a + b)
    det_query = det_sum if scaled_by == 1.0 else determinant((a + b) / scaled_by)

    hull = hull2d(pset.points)
    membership = membership2d_with_hull(pset.points, det_query, hull, tol)
    return MocReport(
        dim=n,
        spec_a=spec_a,
        spec_b=spec_b,
        det_sum=det_sum,
        det_query=det_query,
        scaled_by=scaled_by,
        sigma_count=pset.count,
        membership=membership,
        residual_a=residual_a,
        residual_b=residual_b,
        seed=seed,
        tolerances={
            "membership": tol,
            "normality_gate": NORMALITY_GATE,
            "eig_normal": NORMALITY_GATE,
        },
        hull_indices=np.asarray(hull, dtype=np.int64),
        hull_values=pset.points[hull],
        certificate_perms=_certificate_perm_strings(membership, pset),
        digest_a=matrix_digest(a),
        digest_b=matrix_digest(b),
        wall_time_s=time.perf_counter() - start,
    )


@dataclass(frozen=True)
class Theorem1Report:
    """Dilation-pair check plus decomposition diagnostics.

    ``violations`` is empty on success; any entry flags a tolerance bug
    because the underlying statement is proven.
    """

    dim: int
    s: complex
    t: complex
    moc: MocReport
    normality_x: float
    normality_y: float
    block_residual_x: float
    block_residual_y: float
    union_match_x: float
    union_match_y: float
    violations: list[str]
    tolerances: dict[str, float]
    wall_time_s: float

    @property
    def passed(self) -> bool:
        return not self.violations


def _dilation_blocks(x: np.ndarray, s: complex) -> tuple[np.ndarray, np.ndarray]:
    sbar = complex(s).conjugate()
    return (
        conj_add_scalar(x, "difference", sbar),
        conj_add_scalar(x, "sum", -sbar),
    )


def verify_theorem1(
    x: Any,
    y: Any,
    s: complex = 0.0,
    t: complex = 0.0,
    tol: float = 1e-8,
    cap: int = DEFAULT_CAP,
    seed: int = 0,
) -> Theorem1Report:
    """Run the dilation pair (N(X,s), N(Y,t)) through the conjecture check.

    Asserts on the way that both dilations are normal and that conjugation
    by the block mixer reproduces the two-block decomposition the dilation
    is built from; the sigma-hull verdict is expected inside/boundary.
    """
    start = time.perf_counter()
    x = as_matrix(x)
    y = as_matrix(y)
    n = require_square(x, "first input")
    if require_square(y, "second input") != n:
        raise DimensionError("inputs must share one dimension")
    check_capacity(2 * n, cap)

    violations: list[str] = []
    nx, ny = dilate(x, s), dilate(y, t)
    normality_x = classify(nx).normality_residual
    normality_y = classify(ny).normality_residual
    for label, resid in (("N(X,s)", normality_x), ("N(Y,t)", normality_y)):
        if resid > DILATION_NORMALITY_TOL:
            violations.append(
                f"{label} normality residual {resid:.3e} exceeds {DILATION_NORMALITY_TOL:g}"
            )

    u = block_mixer(n)
    block_residuals = []
    union_matches = []
    for label, mat, dil, shift, offset in (
        ("X", x, nx, s, 20),
        ("Y", y, ny, t, 30),
    ):
        diff_block, sum_block = _dilation_blocks(mat, shift)
        expected = direct_sum(diff_block, sum_block)
        norm_scale = max(1.0, frobenius(mat) + frobenius(mat - complex(shift) * np.eye(n)))
        block_resid = frobenius(u.conj().T @ dil @ u - expected) / norm_scale
        block_residuals.append(block_resid)
        if block_resid > BLOCK_IDENTITY_TOL:
            violations.append(
                f"block decomposition of N({label}) residual {block_resid:.3e} "
                f"exceeds {BLOCK_IDENTITY_TOL:g}"
            )
        spec_dil = eig_normal(dil, derive_seed(seed, offset))
        union = np.concatenate(
            [
                eig_normal(diff_block, derive_seed(seed, offset + 1)).values,
                eig_normal(sum_block, derive_seed(seed, offset + 2)).values,
            ]
        )
        match_tol = SPECTRUM_UNION_TOL * max(1.0, frobenius(dil))
        matched, dist = match_multisets(spec_dil.values, union, match_tol)
        union_matches.append(dist)
        if not matched:
            violations.append(
                f"spectrum of N({label}) does not match its block spectra union "
                f"within {match_tol:.3e} (max pairing distance {dist:.3e})"
            )

    moc = verify_moc(nx, ny, tol=tol, cap=cap, seed=seed)
    if not moc.passed:
        violations.append(
            f"membership verdict {moc.membership.verdict!r} "
            f"(signed distance {moc.membership.signed_distance:.3e})"
        )
    return Theorem1Report(
        dim=n,
        s=complex(s),
        t=complex(t),
        moc=moc,
        normality_x=normality_x,
        normality_y=normality_y,
        block_residual_x=block_residuals[0],
        block_residual_y=block_residuals[1],
        union_match_x=union_matches[0],
        union_match_y=union_matches[1],
        violations=violations,
        tolerances={
            "membership": tol,
            "dilation_normality": DILATION_NORMALITY_TOL,
            "block_identity": BLOCK_IDENTITY_TOL,
            "spectrum_union": SPECTRUM_UNION_TOL,
        },
        wall_time_s=time.perf_counter() - start,
    )


@dataclass(frozen=True)
class DirectSumReport:
    """Composed certificate for (A + C, B + D) from component certificates."""

    dim_first: int
    dim_second: int
    target: complex
    weight_sum: float
    reconstruction_error: float
    membership: HullMembership
    certificate_perms: list[tuple[str, float]]
    passed: bool
    tolerances: dict[str, float]
    wall_time_s: float


def verify_direct_sum(
    first: MocReport, second: MocReport, tol: float = 1e-10
) -> DirectSumReport:
    """Compose two certificate-bearing reports into a direct-sum certificate.

    The composed weights are the pairwise products of component weights and
    the composed generators are the products of component sigma-points,
    indexed by the block-embedding permutations; the target value is
    det(A+B) * det(C+D).
    """
    start = time.perf_counter()
    for label, rep in (("first", first), ("second", second)):
        if rep.membership.certificate is None:
            raise CertificateError(f"{label} report carries no certificate")
        if rep.scaled_by != 1.0:
            raise CertificateError(
                f"{label} report was computed in a rescaled frame; "
                "compose from unscaled runs"
            )
    n, m = first.dim, second.dim
    tab_n = permutation_table(n)
    tab_m = permutation_table(m)
    e = np.concatenate([first.spec_a.values, second.spec_a.values])
    f = np.concatenate([first.spec_b.values, second.spec_b.values])

    perms: list[str] = []
    weights: list[float] = []
    gens: list[complex] = []
    for i, tw in first.membership.certificate:
        for j, sw in second.membership.certificate:
            theta = compose_theta(tab_n[i], tab_m[j])
            perms.append(perm_to_string(theta))
            weights.append(tw * sw)
            gens.append(complex(np.prod(e + f[theta])))
    gens_arr = np.asarray(gens, dtype=complex)

    target = first.det_sum * second.det_sum
    scale = max(1.0, abs(target), float(np.abs(gens_arr).max()))
    membership = HullMembership(
        verdict=INSIDE
        if (first.membership.verdict == INSIDE and second.membership.verdict == INSIDE)
        else BOUNDARY,
        signed_distance=0.0,
        certificate=[(k, w) for k, w in enumerate(weights)],
        tolerance_used=tol * scale,
    )
    weight_sum = math.fsum(weights)
    recon = complex(
        math.fsum(w * g.real for w, g in zip(weights, gens)),
        math.fsum(w * g.imag for w, g in zip(weights, gens)),
    )
    error = abs(recon - target)
    passed = validate_certificate(gens_arr, membership, target)
    return DirectSumReport(
        dim_first=n,
        dim_second=m,
        target=target,
        weight_sum=weight_sum,
        reconstruction_error=error,
        membership=membership,
        certificate_perms=list(zip(perms, weights)),
        passed=passed,
        tolerances={"composition": tol},
        wall_time_s=time.perf_counter() - start,
    )


@dataclass(frozen=True)
class DeltaSample:
    """Sampled values of det(A + U B U*) over Haar-random unitaries."""

    unitaries_used: int
    dets: np.ndarray
    max_imag: float
    range_real: tuple[float, float]


@dataclass(frozen=True)
class FiedlerReport:
    dim: int
    spec_a: Spectrum
    spec_b: Spectrum
    delta: DeltaSample
    sigma_min: float
    sigma_max: float
    scale: float
    scaled_by: float
    passed: bool
    seed: int
    tolerances: dict[str, float]
    digest_a: str
    digest_b: str
    wall_time_s: float


def verify_fiedler(
    a: Any,
    b: Any,
    samples: int = 200,
    seed: int = 0,
    tol: float = 1e-8,
    cap: int = DEFAULT_CAP,
) -> FiedlerReport:
    """Sample det(A + UBU*) for a hermitian pair against the sigma range.

    Every sampled determinant must be real (to tolerance) and its real part
    must lie within the closed band spanned by the sigma-points.
    """
    start = time.perf_counter()
    a = as_matrix(a)
    b = as_matrix(b)
    n = require_square(a, "first matrix")
    if require_square(b, "second matrix") != n:
        raise DimensionError("matrix dimensions differ")
    if samples < 1:
        raise ValueError("need at least one sample")
    for label, mat in (("first", a), ("second", b)):
        resid = classify(mat).hermitian_residual
        if resid > HERMITIAN_GATE:
            raise ClassificationError(
                f"{label} matrix is not hermitian within {HERMITIAN_GATE:g}"
            )
    spec_a = eig_hermitian(a)
    spec_b = eig_hermitian(b)
    scaled_by = 1.0
    if not products_representable(spec_a, spec_b):
        scaled_by = safe_scale(spec_a, spec_b)
    pset = sigma_points(spec_a, spec_b, cap, scaled_by=scaled_by)
    zre = pset.points.real
    sigma_min, sigma_max = float(zre.min()), float(zre.max())
    scale = max(1.0, float(np.abs(pset.points).max()))

    rng = generator(seed)
    dets = np.empty(samples, dtype=complex)
    a_scaled = a / scaled_by
    b_scaled = b / scaled_by
    for k in range(samples):
        u = haar_unitary(n, rng)
        dets[k] = determinant(a_scaled + u @ b_scaled @ u.conj().T)
    max_imag = float(np.abs(dets.imag).max())
    lo, hi = float(dets.real.min()), float(dets.real.max())
    band = tol * scale
    passed = max_imag <= band and lo >= sigma_min - band and hi <= sigma_max + band
    return FiedlerReport(
        dim=n,
        spec_a=spec_a,
        spec_b=spec_b,
        delta=DeltaSample(
            unitaries_used=samples, dets=dets, max_imag=max_imag, range_real=(lo, hi)
        ),
        sigma_min=sigma_min,
        sigma_max=sigma_max,
        scale=scale,
        scaled_by=scaled_by,
        passed=passed,
        seed=seed,
        tolerances={"band": tol, "hermitian_gate": HERMITIAN_GATE},
        digest_a=matrix_digest(a),
        digest_b=matrix_digest(b),
        wall_time_s=time.perf_counter() - start,
    )


@dataclass(frozen=True)
class DruryReport:
    dim: int
    membership: HullMembership
    query: np.ndarray
    generator_count: int
    certificate_perms: list[tuple[str, float]] | None
    certificate_valid: bool
    passed: bool
    tolerances: dict[str, float]
    digest_a: str
    digest_b: str
    wall_time_s: float


DRURY_DIM_LIMIT = 5


def verify_drury(a: Any, b: Any, tol: float = 1e-8) -> DruryReport:
    """Polynomial-space membership for a hermitian pair by LP feasibility.

    The query point is the coefficient vector of prod (x + t_j) over the
    eigenvalues of A+B; generators come from prod (x + a_j + b_sigma(j)).
    """
    start = time.perf_counter()
    a = as_matrix(a)
    b = as_matrix(b)
    n = require_square(a, "first matrix")
    if require_square(b, "second matrix") != n:
        raise DimensionError("matrix dimensions differ")
    if n > DRURY_DIM_LIMIT:
        raise CapacityError(
            f"polynomial membership limited to n <= {DRURY_DIM_LIMIT}, got {n}"
        )
    for label, mat in (("first", a), ("second", b)):
        if classify(mat).hermitian_residual > HERMITIAN_GATE:
            raise ClassificationError(
                f"{label} matrix is not hermitian within {HERMITIAN_GATE:g}"
            )
    av = eig_hermitian(a).values.real
    bv = eig_hermitian(b).values.real
    tv = eig_hermitian(a + b).values.real
    query = poly_coefficients(tv).real
    tab = permutation_table(n)
    gens = np.array([poly_coefficients(av + bv[perm]).real for perm in tab])
    membership = membership_lp(gens, query, tol)
    valid = (
        validate_certificate(gens, membership, query)
        if membership.certificate is not None
        else False
    )
    cert_perms = (
        [(perm_to_string(tab[i]), w) for i, w in membership.certificate]
        if membership.certificate is not None
        else None
    )
    return DruryReport(
        dim=n,
        membership=membership,
        query=query,
        generator_count=len(gens),
        certificate_perms=cert_perms,
        certificate_valid=valid,
        passed=membership.is_member and valid,
        tolerances={"lp": tol, "hermitian_gate": HERMITIAN_GATE},
        digest_a=matrix_digest(a),
        digest_b=matrix_digest(b),
        wall_time_s=time.perf_counter() - start,
    )


@dataclass(frozen=True)
class SimilarityReport:
    dim: int
    sigma_match: bool
    sigma_match_distance: float
    det_relative_difference: float
    verdict_before: str
    verdict_after: str
    agree: bool
    tolerances: dict[str, float]
    wall_time_s: float

    @property
    def passed(self) -> bool:
        return self.agree


def verify_similarity_invariance(
    a: Any,
    b: Any,
    v: Any,
    tol: float = 1e-8,
    seed: int = 0,
    cap: int = DEFAULT_CAP,
) -> SimilarityReport:
    """Check invariance of the whole picture under A -> VAV*, B -> VBV*."""
    start = time.perf_counter()
    a = as_matrix(a)
    b = as_matrix(b)
    v = as_matrix(v)
    n = require_square(a, "first matrix")
    if require_square(b, "second matrix") != n or require_square(v, "conjugating matrix") != n:
        raise DimensionError("all three matrices must share one dimension")
    unit = classify(v).unitarity_residual
    if unit > 1e-10:
        raise ClassificationError(f"conjugating matrix is not unitary within 1e-10 (residual {unit:.3e})")
    count = check_capacity(n, cap)
    if count > MULTISET_MATCH_LIMIT:
        raise CapacityError(
            f"{n}! = {count} sigma-points exceed the multiset matching limit "
            f"{MULTISET_MATCH_LIMIT}"
        )
    a2 = v @ a @ v.conj().T
    b2 = v @ b @ v.conj().T
    spec = [
        eig_normal(m, derive_seed(seed, k)) for k, m in enumerate((a, b, a2, b2))
    ]
    p1 = sigma_points(spec[0], spec[1], cap)
    p2 = sigma_points(spec[2], spec[3], cap)
    z_scale = max(1.0, float(np.abs(p1.points).max()))
    matched, dist = match_multisets(p1.points, p2.points, SIGMA_MATCH_TOL * z_scale)

    det1 = determinant(a + b)
    det2 = determinant(a2 + b2)
    det_scale = max(abs(det1), abs(det2))
    det_rel = abs(det1 - det2) / det_scale if det_scale > 0.0 else 0.0

    m1 = membership2d_with_hull(p1.points, det1, hull2d(p1.points), tol)
    m2 = membership2d_with_hull(p2.points, det2, hull2d(p2.points), tol)
    verdict_ok = _verdict_class(m1.verdict) == _verdict_class(m2.verdict)
    agree = matched and det_rel <= DET_MATCH_RTOL and verdict_ok
    return SimilarityReport(
        dim=n,
        sigma_match=matched,
        sigma_match_distance=dist,
        det_relative_difference=det_rel,
        verdict_before=m1.verdict,
        verdict_after=m2.verdict,
        agree=agree,
        tolerances={
            "sigma_match": SIGMA_MATCH_TOL,
            "det_relative": DET_MATCH_RTOL,
            "membership": tol,
        },
        wall_time_s=time.perf_counter() - start,
    )
