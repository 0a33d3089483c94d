"""Report serialization: canonical JSON, input digests, and CSV export.

JSON is the single source of truth; CSV is derived from it and never parsed
back.  Serialization is deterministic: identical (inputs, flags, seed)
produce byte-identical JSON apart from the ``wall_time_s`` fields.  Floats
are written with ``repr`` (shortest round-trip), so CSV re/im columns are
bit-identical to their JSON counterparts.
"""

from __future__ import annotations

import hashlib
import json
from typing import IO, Any

from .errors import ParseError
from .matrices import canonical_matrix_json
from .sigma import perm_to_string, sigma_points
from .spectra import Spectrum

__all__ = [
    "canonical_json",
    "load_report",
    "matrix_digest",
    "report_to_dict",
    "write_report_csv",
]

REPORT_KINDS = ("moc", "theorem1", "fiedler", "drury", "similarity", "direct_sum", "batch")


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, indent=2, allow_nan=False)


def matrix_digest(a: Any) -> str:
    """SHA-256 of the canonical matrix JSON."""
    return hashlib.sha256(canonical_matrix_json(a).encode("utf-8")).hexdigest()


def complex_pair(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _spectrum_dict(spec: Spectrum) -> dict:
    return {
        "values": [complex_pair(z) for z in spec.values],
        "residual": float(spec.residual),
    }


def _class_report_dict(rep: Any) -> dict:
    return rep.as_dict()


def _membership_dict(mem: Any) -> dict:
    return {
        "verdict": mem.verdict,
        "signed_distance": float(mem.signed_distance),
        "tolerance_used": float(mem.tolerance_used),
        "certificate": None
        if mem.certificate is None
        else [[int(i), float(w)] for i, w in mem.certificate],
    }


def _cert_perms(entries: list[tuple[str, float]] | None) -> list | None:
    if entries is None:
        return None
    return [[p, float(w)] for p, w in entries]


def _moc_dict(rep: Any) -> dict:
    return {
        "kind": "moc",
        "dim": rep.dim,
        "inputs": {"a_sha256": rep.digest_a, "b_sha256": rep.digest_b},
        "seed": rep.seed,
        "tolerances": rep.tolerances,
        "spectrum_a": _spectrum_dict(rep.spec_a),
        "spectrum_b": _spectrum_dict(rep.spec_b),
        "residuals": {
            "a": _class_report_dict(rep.residual_a),
            "b": _class_report_dict(rep.residual_b),
        },
        "det_sum": complex_pair(rep.det_sum),
        "scaled_by": float(rep.scaled_by),
        "det_query": complex_pair(rep.det_query),
        "sigma_count": rep.sigma_count,
        "membership": _membership_dict(rep.membership),
        "certificate": _cert_perms(rep.certificate_perms),
        "hull": {
            "indices": [int(i) for i in rep.hull_indices],
            "vertices": [complex_pair(z) for z in rep.hull_values],
        },
        "passed": rep.passed,
        "wall_time_s": rep.wall_time_s,
    }


def _theorem1_dict(rep: Any) -> dict:
    return {
        "kind": "theorem1",
        "dim": rep.dim,
        "s": complex_pair(rep.s),
        "t": complex_pair(rep.t),
        "tolerances": rep.tolerances,
        "diagnostics": {
            "normality_x": rep.normality_x,
            "normality_y": rep.normality_y,
            "block_residual_x": rep.block_residual_x,
            "block_residual_y": rep.block_residual_y,
            "union_match_x": rep.union_match_x,
            "union_match_y": rep.union_match_y,
        },
        "violations": list(rep.violations),
        "moc": _moc_dict(rep.moc),
        "passed": rep.passed,
        "wall_time_s": rep.wall_time_s,
    }


def _fiedler_dict(rep: Any) -> dict:
    return {
        "kind": "fiedler",
        "dim": rep.dim,
        "inputs": {"a_sha256": rep.digest_a, "b_sha256": rep.digest_b},
        "seed": rep.seed,
        "tolerances": rep.tolerances,
        "spectrum_a": _spectrum_dict(rep.spec_a),
        "spectrum_b": _spectrum_dict(rep.spec_b),
        "sigma_min": rep.sigma_min,
        "sigma_max": rep.sigma_max,
        "scale": rep.scale,
        "scaled_by": rep.scaled_by,
        "delta": {
            "unitaries_used": rep.delta.unitaries_used,
            "max_imag": rep.delta.max_imag,
            "range_real": list(rep.delta.range_real),
            "dets": [complex_pair(z) for z in rep.delta.dets],
        },
        "passed": rep.passed,
        "wall_time_s": rep.wall_time_s,
    }


def _drury_dict(rep: Any) -> dict:
    return {
        "kind": "drury",
        "dim": rep.dim,
        "inputs": {"a_sha256": rep.digest_a, "b_sha256": rep.digest_b},
        "tolerances": rep.tolerances,
        "query": [float(x) for x in rep.query],
        "generator_count": rep.generator_count,
        "membership": _membership_dict(rep.membership),
        "certificate": _cert_perms(rep.certificate_perms),
        "certificate_valid": rep.certificate_valid,
        "passed": rep.passed,
        "wall_time_s": rep.wall_time_s,
    }


def _similarity_dict(rep: Any) -> dict:
    return {
        "kind": "similarity",
        "dim": rep.dim,
        "tolerances": rep.tolerances,
        "sigma_match": rep.sigma_match,
        "sigma_match_distance": rep.sigma_match_distance,
        "det_relative_difference": rep.det_relative_difference,
        "verdict_before": rep.verdict_before,
        "verdict_after": rep.verdict_after,
        "passed": rep.passed,
        "wall_time_s": rep.wall_time_s,
    }


def _direct_sum_dict(rep: Any) -> dict:
    return {
        "kind": "direct_sum",
        "dims": [rep.dim_first, rep.dim_second],
        "tolerances": rep.tolerances,
        "target": complex_pair(rep.target),
        "weight_sum": rep.weight_sum,
        "reconstruction_error": rep.reconstruction_error,
        "certificate": _cert_perms(rep.certificate_perms),
        "tolerance_used": float(rep.membership.tolerance_used),
        "passed": rep.passed,
        "wall_time_s": rep.wall_time_s,
    }


def report_to_dict(report: Any) -> dict:
    from . import verify  # deferred to avoid an import cycle

    table = {
        verify.MocReport: _moc_dict,
        verify.Theorem1Report: _theorem1_dict,
        verify.FiedlerReport: _fiedler_dict,
        verify.DruryReport: _drury_dict,
        verify.SimilarityReport: _similarity_dict,
        verify.DirectSumReport: _direct_sum_dict,
    }
    for cls, fn in table.items():
        if isinstance(report, cls):
            return fn(report)
    raise TypeError(f"no JSON form for {type(report).__name__}")


def load_report(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as f:
            obj = json.load(f)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}") from exc
    if not isinstance(obj, dict) or obj.get("kind") not in REPORT_KINDS:
        raise ParseError(f"{path}: not a report file (missing or unknown 'kind')")
    return obj


# ---------------------------------------------------------------------------
# CSV derivation
# ---------------------------------------------------------------------------

def _csv_row(out: IO[str], section: str, index: int, perm: str, re: float, im: float) -> None:
    out.write(f"{section},{index},{perm},{float(re)!r},{float(im)!r}\n")


def _spectrum_from_dict(d: dict) -> Spectrum:
    return Spectrum.exact([complex(p[0], p[1]) for p in d["values"]])


def _sigma_section(out: IO[str], report: dict) -> None:
    pset = sigma_points(
        _spectrum_from_dict(report["spectrum_a"]),
        _spectrum_from_dict(report["spectrum_b"]),
        scaled_by=report.get("scaled_by", 1.0),
    )
    for k in range(pset.count):
        z = pset.points[k]
        _csv_row(out, "sigma_point", k, perm_to_string(pset.perms[k]), z.real, z.imag)


def write_report_csv(report: dict, out: IO[str]) -> None:
    """Derive the plot-ready CSV for a report dict (moc, theorem1, fiedler).

    Sections: sigma_point rows (index, one-line permutation, re, im), then
    hull_vertex rows, the det row, and delta_sample rows when present.
    """
    kind = report.get("kind")
    if kind == "theorem1":
        report = report["moc"]
        kind = "moc"
    out.write("section,index,permutation,re,im\n")
    if kind == "moc":
        _sigma_section(out, report)
        for k, pair in enumerate(report["hull"]["vertices"]):
            _csv_row(out, "hull_vertex", k, "", pair[0], pair[1])
        det = report["det_query"]
        _csv_row(out, "det_sum", 0, "", det[0], det[1])
    elif kind == "fiedler":
        _sigma_section(out, report)
        for k, pair in enumerate(report["delta"]["dets"]):
            _csv_row(out, "delta_sample", k, "", pair[0], pair[1])
    else:
        raise ParseError(f"report kind {kind!r} has no point export")
