"""Command-line front end.

Thin client over the verification pipelines: subcommands parse files and
flags, delegate to the core package (or, with ``--server``, to a running
HTTP instance), and write reports.  Exit codes partition the outcomes:

    0  success (verdict met the pipeline's expectation)
    1  verdict failure
    2  usage error (argparse)
    3  parse error
    4  capacity exceeded
    5  convergence failure
    6  classification failure (input not hermitian/normal/unitary enough)
    7  I/O or server error

Complex scalars on the command line use "re+imi" notation, e.g. "1.5-2i".
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import re as regex
import sys
import urllib.error
import urllib.request
from concurrent.futures import ThreadPoolExecutor
from typing import Any

from . import __version__, instances, verify
from .errors import (
    CapacityError,
    ClassificationError,
    ConvergenceError,
    MocLabError,
    ParseError,
)
from .matrices import canonical_matrix_json, classify, dilate, load_matrix, matrix_to_json
from .reports import canonical_json, load_report, report_to_dict, write_report_csv
from .sigma import DEFAULT_CAP
from .spectra import derive_seed, generator, haar_unitary

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_USAGE = 2  # reserved by argparse
EXIT_PARSE = 3
EXIT_CAPACITY = 4
EXIT_CONVERGENCE = 5
EXIT_CLASSIFICATION = 6
EXIT_IO = 7

_ERROR_EXITS = {
    ParseError: EXIT_PARSE,
    CapacityError: EXIT_CAPACITY,
    ConvergenceError: EXIT_CONVERGENCE,
    ClassificationError: EXIT_CLASSIFICATION,
}

PIPELINES = ("moc", "theorem1", "fiedler", "drury", "similarity", "direct-sum")


def parse_complex(text: str) -> complex:
    """Parse "re+imi" notation ("1.5-2i", "3i", "-i", "2"); j is tolerated."""
    t = text.strip().replace(" ", "").lower().replace("j", "i")
    if not t:
        raise ParseError("empty complex literal")
    t = t.replace("i", "j")
    t = regex.sub(r"(?<![0-9.])j", "1j", t)  # bare imaginary units
    try:
        z = complex(t)
    except ValueError as exc:
        raise ParseError(f"bad complex literal {text!r}") from exc
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ParseError(f"complex literal must be finite, got {text!r}")
    return z


def format_complex(z: complex) -> str:
    z = complex(z)
    sign = "+" if z.imag >= 0 else "-"
    return f"{z.real!r}{sign}{abs(z.imag)!r}i"


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------

def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=float, default=1e-8, help="membership tolerance (default 1e-8)")
    p.add_argument(
        "--cap",
        type=int,
        default=DEFAULT_CAP,
        help=f"permutation enumeration cap (default {DEFAULT_CAP})",
    )
    p.add_argument("--samples", type=int, default=200, help="sample count (fiedler)")
    p.add_argument("--seed", type=int, default=0, help="64-bit RNG seed (default 0)")
    p.add_argument("--out", help="output file (default: standard output)")
    p.add_argument("--format", choices=("json", "csv"), default="json", help="report format")
    p.add_argument("--quiet", action="store_true", help="suppress the summary line")
    p.add_argument("--server", help="base URL of a running service to delegate to")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="moclab",
        description="sigma-point and convex-hull experiments on sums of normal matrices",
    )
    parser.add_argument("--version", action="version", version=f"moclab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_dilate = sub.add_parser("dilate", help="write the normal dilation of a matrix")
    p_dilate.add_argument("input", help="matrix JSON file")
    p_dilate.add_argument("-s", "--scalar", default="0", help='dilation scalar, e.g. "1-2i"')
    p_dilate.add_argument("--out", help="output file (default: standard output)")
    p_dilate.add_argument("--quiet", action="store_true")
    p_dilate.set_defaults(func=cmd_dilate)

    p_verify = sub.add_parser("verify", help="run a verification pipeline")
    vsub = p_verify.add_subparsers(dest="pipeline", required=True)
    arity = {
        "moc": ("a", "b"),
        "theorem1": ("x", "y"),
        "fiedler": ("a", "b"),
        "drury": ("a", "b"),
        "similarity": ("a", "b", "v"),
        "direct-sum": ("a", "b", "c", "d"),
    }
    for name in PIPELINES:
        p = vsub.add_parser(name, help=f"{name} pipeline")
        for slot in arity[name]:
            p.add_argument(slot, help=f"matrix JSON file ({slot})")
        if name == "theorem1":
            p.add_argument("-s", "--scalar-s", default="0", help="first dilation scalar")
            p.add_argument("-t", "--scalar-t", default="0", help="second dilation scalar")
        _add_run_flags(p)
        p.set_defaults(func=cmd_verify, pipeline=name)

    p_export = sub.add_parser("export", help="derive a CSV dump from a report")
    p_export.add_argument("report", nargs="?", help="report JSON file")
    p_export.add_argument(
        "--matrices",
        nargs=2,
        metavar=("A", "B"),
        help="compute a fresh moc report for two matrix files and export it",
    )
    _add_run_flags(p_export)
    p_export.set_defaults(func=cmd_export)

    p_batch = sub.add_parser("batch", help="run seeded random instances of a pipeline")
    p_batch.add_argument("pipeline", choices=PIPELINES)
    p_batch.add_argument("--instances", type=int, default=10)
    p_batch.add_argument("--dim-min", type=int, default=1)
    p_batch.add_argument("--dim-max", type=int, default=3)
    _add_run_flags(p_batch)
    p_batch.set_defaults(func=cmd_batch)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.set_defaults(func=cmd_serve)

    return parser


def _emit(args: argparse.Namespace, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text)
            if not text.endswith("\n"):
                f.write("\n")
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _summary(args: argparse.Namespace, line: str) -> None:
    if not getattr(args, "quiet", False):
        print(line)


def _report_text(args: argparse.Namespace, report_dict: dict) -> str:
    if args.format == "csv":
        buf = io.StringIO()
        write_report_csv(report_dict, buf)
        return buf.getvalue()
    return canonical_json(report_dict)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_dilate(args: argparse.Namespace) -> int:
    x = load_matrix(args.input)
    s = parse_complex(args.scalar)
    out = dilate(x, s)
    residual = classify(out).normality_residual
    _summary(args, f"dilate: {x.shape[0]}x{x.shape[1]} -> {out.shape[0]}x{out.shape[1]}, normality residual {residual:.3e}")
    _emit(args, canonical_matrix_json(out))
    return EXIT_OK


def _run_pipeline(args: argparse.Namespace) -> Any:
    kwargs = {"tol": args.tol, "cap": args.cap, "seed": args.seed}
    name = args.pipeline
    if name == "moc":
        return verify.verify_moc(load_matrix(args.a), load_matrix(args.b), **kwargs)
    if name == "theorem1":
        return verify.verify_theorem1(
            load_matrix(args.x),
            load_matrix(args.y),
            parse_complex(args.scalar_s),
            parse_complex(args.scalar_t),
            **kwargs,
        )
    if name == "fiedler":
        return verify.verify_fiedler(
            load_matrix(args.a),
            load_matrix(args.b),
            samples=args.samples,
            seed=args.seed,
            tol=args.tol,
            cap=args.cap,
        )
    if name == "drury":
        return verify.verify_drury(load_matrix(args.a), load_matrix(args.b), tol=args.tol)
    if name == "similarity":
        return verify.verify_similarity_invariance(
            load_matrix(args.a), load_matrix(args.b), load_matrix(args.v), **kwargs
        )
    if name == "direct-sum":
        first = verify.verify_moc(load_matrix(args.a), load_matrix(args.b), **kwargs)
        second = verify.verify_moc(load_matrix(args.c), load_matrix(args.d), **kwargs)
        return verify.verify_direct_sum(first, second)
    raise ValueError(name)


def _request_body(args: argparse.Namespace) -> dict:
    config = {"tol": args.tol, "cap": args.cap, "samples": args.samples, "seed": args.seed}
    name = args.pipeline
    if name == "theorem1":
        s, t = parse_complex(args.scalar_s), parse_complex(args.scalar_t)
        return {
            "x": matrix_to_json(load_matrix(args.x)),
            "y": matrix_to_json(load_matrix(args.y)),
            "s": [s.real, s.imag],
            "t": [t.real, t.imag],
            "config": config,
        }
    body = {
        "a": matrix_to_json(load_matrix(args.a)),
        "b": matrix_to_json(load_matrix(args.b)),
        "config": config,
    }
    if name == "similarity":
        body["v"] = matrix_to_json(load_matrix(args.v))
    if name == "direct-sum":
        body["c"] = matrix_to_json(load_matrix(args.c))
        body["d"] = matrix_to_json(load_matrix(args.d))
    return body


def _post_json(url: str, body: dict) -> dict:
    data = json.dumps(body).encode("utf-8")
    req = urllib.request.Request(
        url, data=data, headers={"Content-Type": "application/json"}, method="POST"
    )
    try:
        with urllib.request.urlopen(req) as resp:
            payload = json.loads(resp.read().decode("utf-8"))
    except urllib.error.HTTPError as exc:
        detail = exc.read().decode("utf-8", errors="replace")
        try:
            err = json.loads(detail)
        except json.JSONDecodeError:
            raise MocLabError(f"server error {exc.code}: {detail[:200]}") from exc
        code = err.get("code", "error")
        message = err.get("message", detail[:200])
        for cls in (ParseError, CapacityError, ConvergenceError, ClassificationError):
            if cls.code == code:
                raise cls(message) from exc
        raise MocLabError(message) from exc
    return payload


def cmd_verify(args: argparse.Namespace) -> int:
    if args.server:
        body = _request_body(args)
        report_dict = _post_json(
            args.server.rstrip("/") + f"/verify/{args.pipeline}", body
        )
    else:
        report_dict = report_to_dict(_run_pipeline(args))
    passed = bool(report_dict.get("passed"))
    verdict = report_dict.get("membership", {}).get("verdict", "pass" if passed else "fail")
    _summary(
        args,
        f"{args.pipeline}: {'PASS' if passed else 'FAIL'} "
        f"(verdict {verdict}, seed {args.seed}, tol {args.tol:g})",
    )
    _emit(args, _report_text(args, report_dict))
    return EXIT_OK if passed else EXIT_VERDICT


def cmd_export(args: argparse.Namespace) -> int:
    if args.matrices:
        a, b = (load_matrix(p) for p in args.matrices)
        report_dict = report_to_dict(
            verify.verify_moc(a, b, tol=args.tol, cap=args.cap, seed=args.seed)
        )
    elif args.report:
        report_dict = load_report(args.report)
    else:
        raise ParseError("export needs a report file or --matrices A B")
    buf = io.StringIO()
    write_report_csv(report_dict, buf)
    _summary(args, f"export: kind {report_dict['kind']}")
    _emit(args, buf.getvalue())
    return EXIT_OK


def _batch_instance(pipeline: str, index: int, seed: int, args: argparse.Namespace) -> dict:
    inst_seed = derive_seed(seed, index)
    rng = generator(inst_seed)
    lo, hi = args.dim_min, args.dim_max
    kwargs = {"tol": args.tol, "cap": args.cap, "seed": inst_seed}
    if pipeline == "moc":
        n = int(rng.integers(lo, hi + 1))
        rep = verify.verify_moc(
            instances.random_normal(n, rng), instances.random_normal(n, rng), **kwargs
        )
    elif pipeline == "theorem1":
        n = int(rng.integers(lo, hi + 1))
        rep = verify.verify_theorem1(
            instances.random_matrix(n, rng),
            instances.random_matrix(n, rng),
            instances.random_scalar(rng),
            instances.random_scalar(rng),
            **kwargs,
        )
    elif pipeline == "fiedler":
        n = int(rng.integers(lo, hi + 1))
        rep = verify.verify_fiedler(
            instances.random_hermitian(n, rng),
            instances.random_hermitian(n, rng),
            samples=args.samples,
            seed=inst_seed,
            tol=args.tol,
            cap=args.cap,
        )
    elif pipeline == "drury":
        n = int(rng.integers(lo, min(hi, 5) + 1))
        rep = verify.verify_drury(
            instances.random_hermitian(n, rng),
            instances.random_hermitian(n, rng),
            tol=args.tol,
        )
    elif pipeline == "similarity":
        n = int(rng.integers(lo, hi + 1))
        rep = verify.verify_similarity_invariance(
            instances.random_normal(n, rng),
            instances.random_normal(n, rng),
            haar_unitary(n, rng),
            **kwargs,
        )
    elif pipeline == "direct-sum":
        # components stay at n <= 3 so certificates are guaranteed
        cap3 = min(hi, 3)
        n = int(rng.integers(lo, cap3 + 1))
        m = int(rng.integers(lo, cap3 + 1))
        first = verify.verify_moc(
            instances.random_normal(n, rng), instances.random_normal(n, rng), **kwargs
        )
        second = verify.verify_moc(
            instances.random_normal(m, rng), instances.random_normal(m, rng), **kwargs
        )
        rep = verify.verify_direct_sum(first, second)
    else:
        raise ValueError(pipeline)
    d = report_to_dict(rep)
    return {
        "index": index,
        "seed": inst_seed,
        "passed": bool(d["passed"]),
        "kind": d["kind"],
        "wall_time_s": d["wall_time_s"],
    }


def _thread_count() -> int:
    env = os.environ.get("MOC_LAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ParseError(f"MOC_LAB_THREADS must be an integer, got {env!r}")
    return min(8, os.cpu_count() or 1)


def cmd_batch(args: argparse.Namespace) -> int:
    if args.instances < 1:
        raise ParseError("--instances must be >= 1")
    if not 1 <= args.dim_min <= args.dim_max:
        raise ParseError("need 1 <= --dim-min <= --dim-max")
    workers = _thread_count()
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_batch_instance, args.pipeline, k, args.seed, args)
            for k in range(args.instances)
        ]
        results = [f.result() for f in futures]  # index order, not completion order
    passed = all(r["passed"] for r in results)
    summary = {
        "kind": "batch",
        "pipeline": args.pipeline,
        "instances": args.instances,
        "seed": args.seed,
        "threads": workers,
        "passed_count": sum(r["passed"] for r in results),
        "results": results,
        "passed": passed,
    }
    _summary(
        args,
        f"batch {args.pipeline}: {summary['passed_count']}/{args.instances} passed "
        f"({workers} threads)",
    )
    _emit(args, canonical_json(summary))
    return EXIT_OK if passed else EXIT_VERDICT


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MocLabError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        for cls, code in _ERROR_EXITS.items():
            if isinstance(exc, cls):
                return code
        return EXIT_IO
    except OSError as exc:
        print(f"error[io]: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
