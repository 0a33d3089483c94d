"""FastAPI service exposing the verification pipelines.

All endpoints are stateless POSTs over the core package; verdict failures
are ordinary 200 responses (the report carries ``passed``), while domain
errors map to structured 4xx bodies with the machine-readable error code.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse
import io

from .. import __version__, verify
from ..errors import CapacityError, MocLabError
from ..matrices import classify, dilate
from ..reports import report_to_dict, write_report_csv
from . import schemas

__all__ = ["create_app"]


def _config_kwargs(cfg: schemas.RunConfigModel) -> dict:
    return {"tol": cfg.tol, "cap": cfg.cap, "seed": cfg.seed}


def create_app() -> FastAPI:
    app = FastAPI(
        title="moc-lab",
        version=__version__,
        description=(
            "Sigma-point and convex-hull membership checks for the determinant "
            "conjecture on sums of normal matrices."
        ),
    )

    @app.exception_handler(MocLabError)
    async def _domain_error(request: Request, exc: MocLabError) -> JSONResponse:
        status = 413 if isinstance(exc, CapacityError) else 400
        return JSONResponse(
            status_code=status,
            content={"code": exc.code, "message": str(exc)},
        )

    @app.get("/health", response_model=schemas.HealthResponse)
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/matrices/dilate", response_model=schemas.DilateResponse)
    def post_dilate(req: schemas.DilateRequest) -> dict:
        out = dilate(req.matrix.to_array(), complex(*req.s))
        return {
            "matrix": schemas.MatrixModel.from_array(out),
            "normality_residual": classify(out).normality_residual,
        }

    @app.post("/matrices/classify", response_model=schemas.ClassReportModel)
    def post_classify(req: schemas.ClassifyRequest) -> dict:
        return classify(req.matrix.to_array()).as_dict()

    @app.post("/verify/moc", response_model=schemas.MocReportModel)
    def post_moc(req: schemas.PairRequest) -> dict:
        report = verify.verify_moc(
            req.a.to_array(), req.b.to_array(), **_config_kwargs(req.config)
        )
        return report_to_dict(report)

    @app.post("/verify/theorem1", response_model=schemas.Theorem1ReportModel)
    def post_theorem1(req: schemas.Theorem1Request) -> dict:
        report = verify.verify_theorem1(
            req.x.to_array(),
            req.y.to_array(),
            complex(*req.s),
            complex(*req.t),
            **_config_kwargs(req.config),
        )
        return report_to_dict(report)

    @app.post("/verify/fiedler", response_model=schemas.FiedlerReportModel)
    def post_fiedler(req: schemas.PairRequest) -> dict:
        report = verify.verify_fiedler(
            req.a.to_array(),
            req.b.to_array(),
            samples=req.config.samples,
            seed=req.config.seed,
            tol=req.config.tol,
            cap=req.config.cap,
        )
        return report_to_dict(report)

    @app.post("/verify/drury", response_model=schemas.DruryReportModel)
    def post_drury(req: schemas.PairRequest) -> dict:
        report = verify.verify_drury(
            req.a.to_array(), req.b.to_array(), tol=req.config.tol
        )
        return report_to_dict(report)

    @app.post("/verify/similarity", response_model=schemas.SimilarityReportModel)
    def post_similarity(req: schemas.SimilarityRequest) -> dict:
        report = verify.verify_similarity_invariance(
            req.a.to_array(),
            req.b.to_array(),
            req.v.to_array(),
            **_config_kwargs(req.config),
        )
        return report_to_dict(report)

    @app.post("/verify/direct-sum", response_model=schemas.DirectSumReportModel)
    def post_direct_sum(req: schemas.DirectSumRequest) -> dict:
        kwargs = _config_kwargs(req.config)
        first = verify.verify_moc(req.a.to_array(), req.b.to_array(), **kwargs)
        second = verify.verify_moc(req.c.to_array(), req.d.to_array(), **kwargs)
        report = verify.verify_direct_sum(first, second)
        return report_to_dict(report)

    @app.post("/export/csv", response_class=PlainTextResponse)
    def post_export(req: schemas.PairRequest) -> str:
        report = verify.verify_moc(
            req.a.to_array(), req.b.to_array(), **_config_kwargs(req.config)
        )
        buf = io.StringIO()
        write_report_csv(report_to_dict(report), buf)
        return buf.getvalue()

    return app
