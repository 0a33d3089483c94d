"""Pydantic request/response models for the HTTP API.

Complex scalars travel as [re, im] pairs; matrices use the same JSON layout
as the on-disk format ({"rows", "cols", "entries"}).  Response models
mirror the report JSON written by the CLI.
"""

from __future__ import annotations

import math
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from ..sigma import DEFAULT_CAP

ComplexPair = list[float]


class MatrixModel(BaseModel):
    rows: int = Field(ge=1)
    cols: int = Field(ge=1)
    entries: list[ComplexPair]

    @field_validator("entries")
    @classmethod
    def _pairs(cls, v: list[ComplexPair]) -> list[ComplexPair]:
        for k, pair in enumerate(v):
            if len(pair) != 2:
                raise ValueError(f"entry {k} must be a [re, im] pair")
            if not all(math.isfinite(x) for x in pair):
                raise ValueError(f"entry {k} must be finite")
        return v

    @model_validator(mode="after")
    def _shape(self) -> "MatrixModel":
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"entries length {len(self.entries)} != rows*cols = {self.rows * self.cols}"
            )
        return self

    def to_array(self) -> np.ndarray:
        flat = np.array([complex(re, im) for re, im in self.entries])
        return flat.reshape(self.rows, self.cols)

    @classmethod
    def from_array(cls, a: np.ndarray) -> "MatrixModel":
        return cls(
            rows=a.shape[0],
            cols=a.shape[1],
            entries=[[float(z.real), float(z.imag)] for z in a.reshape(-1)],
        )


class RunConfigModel(BaseModel):
    tol: float = Field(default=1e-8, gt=0.0)
    cap: int = Field(default=DEFAULT_CAP, ge=1)
    samples: int = Field(default=200, ge=1)
    seed: int = Field(default=0, ge=0, lt=2**64)


class DilateRequest(BaseModel):
    matrix: MatrixModel
    s: ComplexPair = [0.0, 0.0]


class DilateResponse(BaseModel):
    matrix: MatrixModel
    normality_residual: float


class ClassifyRequest(BaseModel):
    matrix: MatrixModel


class ClassReportModel(BaseModel):
    normality_residual: float
    hermitian_residual: float
    skew_residual: float
    unitarity_residual: float


class PairRequest(BaseModel):
    a: MatrixModel
    b: MatrixModel
    config: RunConfigModel = RunConfigModel()


class Theorem1Request(BaseModel):
    x: MatrixModel
    y: MatrixModel
    s: ComplexPair = [0.0, 0.0]
    t: ComplexPair = [0.0, 0.0]
    config: RunConfigModel = RunConfigModel()


class SimilarityRequest(BaseModel):
    a: MatrixModel
    b: MatrixModel
    v: MatrixModel
    config: RunConfigModel = RunConfigModel()


class DirectSumRequest(BaseModel):
    a: MatrixModel
    b: MatrixModel
    c: MatrixModel
    d: MatrixModel
    config: RunConfigModel = RunConfigModel()


class SpectrumModel(BaseModel):
    values: list[ComplexPair]
    residual: float


class MembershipModel(BaseModel):
    verdict: Literal["inside", "boundary", "outside"]
    signed_distance: float
    tolerance_used: float
    certificate: Optional[list[tuple[int, float]]] = None


class MocReportModel(BaseModel):
    kind: Literal["moc"] = "moc"
    dim: int
    inputs: dict[str, str]
    seed: int
    tolerances: dict[str, float]
    spectrum_a: SpectrumModel
    spectrum_b: SpectrumModel
    residuals: dict[str, ClassReportModel]
    det_sum: ComplexPair
    scaled_by: float
    det_query: ComplexPair
    sigma_count: int
    membership: MembershipModel
    certificate: Optional[list[tuple[str, float]]] = None
    hull: dict
    passed: bool
    wall_time_s: float


class Theorem1ReportModel(BaseModel):
    kind: Literal["theorem1"] = "theorem1"
    dim: int
    s: ComplexPair
    t: ComplexPair
    tolerances: dict[str, float]
    diagnostics: dict[str, float]
    violations: list[str]
    moc: MocReportModel
    passed: bool
    wall_time_s: float


class DeltaModel(BaseModel):
    unitaries_used: int
    max_imag: float
    range_real: list[float]
    dets: list[ComplexPair]


class FiedlerReportModel(BaseModel):
    kind: Literal["fiedler"] = "fiedler"
    dim: int
    inputs: dict[str, str]
    seed: int
    tolerances: dict[str, float]
    spectrum_a: SpectrumModel
    spectrum_b: SpectrumModel
    sigma_min: float
    sigma_max: float
    scale: float
    scaled_by: float
    delta: DeltaModel
    passed: bool
    wall_time_s: float


class DruryReportModel(BaseModel):
    kind: Literal["drury"] = "drury"
    dim: int
    inputs: dict[str, str]
    tolerances: dict[str, float]
    query: list[float]
    generator_count: int
    membership: MembershipModel
    certificate: Optional[list[tuple[str, float]]] = None
    certificate_valid: bool
    passed: bool
    wall_time_s: float


class SimilarityReportModel(BaseModel):
    kind: Literal["similarity"] = "similarity"
    dim: int
    tolerances: dict[str, float]
    sigma_match: bool
    sigma_match_distance: float
    det_relative_difference: float
    verdict_before: str
    verdict_after: str
    passed: bool
    wall_time_s: float


class DirectSumReportModel(BaseModel):
    kind: Literal["direct_sum"] = "direct_sum"
    dims: list[int]
    tolerances: dict[str, float]
    target: ComplexPair
    weight_sum: float
    reconstruction_error: float
    certificate: list[tuple[str, float]]
    tolerance_used: float
    passed: bool
    wall_time_s: float


class ErrorBody(BaseModel):
    code: str
    message: str


class HealthResponse(BaseModel):
    status: str
    version: str
