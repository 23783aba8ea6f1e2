"""Pydantic request/response models for the HTTP service and CLI."""

from __future__ import annotations

from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, Field

ScaleInput = Union[str, Dict[str, Any]]


class HealthResponse(BaseModel):
    status: str = "ok"
    version: str


class ErrorResponse(BaseModel):
    error: str
    detail: Optional[str] = None
    offset: Optional[int] = None


# -- integration -------------------------------------------------------------


class SegmentModel(BaseModel):
    kind: str  # "dense" | "jump"
    lo: float
    hi: float
    value: float
    error: float
    evaluations: int
    levels: int


class CheckpointModel(BaseModel):
    target: float
    value: float


class IntegrateRequest(BaseModel):
    scale: ScaleInput
    f: str
    a: float
    b: float
    tol: float = 1e-8
    trace: bool = False


class IntegrateResponse(BaseModel):
    value: float
    abs_error_estimate: float
    converged: bool
    evaluations: int
    truncation_point: float
    segments: Optional[List[SegmentModel]] = None


class ImproperRequest(BaseModel):
    scale: ScaleInput
    f: str
    a: float
    tol: float = 1e-6
    first_offset: float = 1.0
    growth: float = 2.0
    stall_steps: int = 3
    max_evaluations: int = 5_000_000
    max_target: float = 1e15
    trace: bool = False


class ImproperResponse(BaseModel):
    value: float
    abs_error_estimate: float
    converged: bool
    evaluations: int
    truncation_point: float
    checkpoints: Optional[List[CheckpointModel]] = None


# -- kernel transforms -------------------------------------------------------


class TransformRequest(BaseModel):
    kernel: str
    xscale: ScaleInput
    tscale: ScaleInput
    f: str
    xs: Optional[List[float]] = None
    x_count: int = 8
    tol: float = 1e-6


class TransformRow(BaseModel):
    x: float
    value: float
    converged: bool
    evaluations: int
    truncation_point: float


class TransformResponse(BaseModel):
    rows: List[TransformRow]


class WitnessModel(BaseModel):
    point: List[float]
    value: float


class ConditionModel(BaseModel):
    passed: bool
    tol: float
    note: str = ""
    witnesses: List[WitnessModel]


class RegularityRequest(BaseModel):
    kernel: str
    xscale: ScaleInput
    tscale: ScaleInput
    tol: float = 1e-6
    x_horizon: float = 65536.0
    x0_count: int = 4
    y_count: int = 8
    decay_ratio: float = 1e-2


class RegularityResponse(BaseModel):
    m_estimate: float
    conditions: Dict[str, ConditionModel]
    verdict: str
    failed: List[str]


# -- dual functionals --------------------------------------------------------


class DualRepModel(BaseModel):
    b: float
    coeffs: List[float] = Field(default_factory=list)
    tail_bound: float = 0.0


class DualApplyRequest(BaseModel):
    rep: DualRepModel
    scale: ScaleInput
    f: str
    start: Optional[float] = None
    tol: float = 1e-6
    horizon: float = 1e6


class DualApplyResponse(BaseModel):
    value: float
    limit: float


class DualNormRequest(BaseModel):
    rep: DualRepModel


class DualNormResponse(BaseModel):
    norm: float
    tail_bound: float
    ell1: List[float]


class DualWitnessRequest(BaseModel):
    rep: DualRepModel
    scale: ScaleInput
    r: int
    start: Optional[float] = None
    preview: int = 12
    tol: float = 1e-6
    horizon: float = 1e6


class DualWitnessResponse(BaseModel):
    functional_value: float
    norm: float
    witness_values: List[float]


# -- kernel extraction -------------------------------------------------------


class ExtractKernelRequest(BaseModel):
    operator: str = "identity"  # identity | shift | cesaro | custom
    rowmap: Optional[str] = None
    xscale: ScaleInput
    tscale: ScaleInput
    start: Optional[float] = None
    width: int = 8
    xs: Optional[List[float]] = None
    x_count: int = 6
    verify: bool = True
    tol: float = 1e-9


class VerificationModel(BaseModel):
    max_abs_diff: float
    passed: bool
    unit_rows: List[WitnessModel]


class ExtractKernelResponse(BaseModel):
    xs: List[float]
    ts: List[float]
    matrix: List[List[float]]
    warnings: List[str]
    verification: Optional[VerificationModel] = None


# -- scale inspection --------------------------------------------------------


class ScaleInfoRequest(BaseModel):
    scale: ScaleInput
    a: Optional[float] = None
    b: Optional[float] = None
    count: int = 12


class ScaleInfoResponse(BaseModel):
    minimum: float
    descriptor: Dict[str, Any]
    sample_points: List[float]
    segments: Optional[List[SegmentModel]] = None


class ScaleProbeRequest(BaseModel):
    scale: ScaleInput
    f: str
    start: Optional[float] = None
    tol: float = 1e-6
    window: int = 8
    horizon: float = 1e6
    sup_horizon: Optional[float] = None


class ScaleProbeResponse(BaseModel):
    in_c: str
    in_c0: str
    limit_status: str
    limit_value: Optional[float]
    oscillation: float
    horizon: float
    sup_norm: float
