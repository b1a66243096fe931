"""HTTP service wrapping the solver, plus the handler layer the CLI
shares. Endpoints accept case/sidecar text in the request body, so the
service itself stays stateless.

Run with: ``uvicorn seriesflow.service:app``.
"""

from __future__ import annotations

import math

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict, Field

from . import __version__
from .dt_core import DEFAULT_ORDER, LoadModel, assemble_system, expand
from .errors import BaseNotConvergedError, SeriesFlowError
from .evaluator import (
    DEFAULT_ETA,
    DEFAULT_RESIDUAL_TOL,
    PVCurve,
    TraceTermination,
    mismatch,
    radius_estimate,
    trace,
)
from .netmodel import (
    CaseData,
    DirectionVector,
    Network,
    ZipConfig,
    compile_network,
    parse_case,
    parse_sidecar,
)
from .numerics import inf_norm
from .oracle import fd_jacobian, flat_start, newton_solve
from .verification import DEFAULT_MAX_ORDER, DEFAULT_TRIALS, IDENTITY_TOL, identity_trials


class NumericalFailure(SeriesFlowError):
    """Solve did not reach the requested loading; carries the partial report."""

    def __init__(self, reason: str, report: "SolveResponse"):
        self.reason = reason
        self.report = report
        super().__init__(reason)


# ---------------------------------------------------------------------------
# request / response models

MODEL_NAMES = tuple(m.value for m in LoadModel)


class SolveRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    case_text: str
    sidecar_text: str | None = None
    order: int = Field(DEFAULT_ORDER, ge=1)
    lam: float = Field(0.0, alias="lambda")
    model: str = Field("const-power", pattern="^(const-power|zip)$")
    polish: bool = True


class BusVoltage(BaseModel):
    bus: int
    e: float
    f: float
    vm: float
    va: float  # degrees


class SolveResponse(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    case: str
    model: str
    lam: float = Field(alias="lambda")
    order: int
    voltages: list[BusVoltage]
    residual_inf: float
    radius_estimate: float | None


class TraceRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    case_text: str
    sidecar_text: str | None = None
    order: int = Field(DEFAULT_ORDER, ge=6)
    lambda_max: float
    eta: float = Field(DEFAULT_ETA, gt=0.0, le=1.0)
    model: str = Field("const-power", pattern="^(const-power|zip)$")
    polish: bool = True
    residual_tol: float = Field(DEFAULT_RESIDUAL_TOL, gt=0.0)


class TracePoint(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    lam: float = Field(alias="lambda")
    e: list[float]
    f: list[float]
    residual_inf: float
    expansion_index: int


class TraceResponse(BaseModel):
    case: str
    model: str
    order: int
    eta: float
    lambda_max: float
    termination: str
    points: list[TracePoint]


class VerifyRequest(BaseModel):
    case_text: str
    trials: int = Field(DEFAULT_TRIALS, ge=1)
    seed: int = 0
    max_order: int = Field(DEFAULT_MAX_ORDER, ge=1)
    tolerance: float = Field(IDENTITY_TOL, gt=0.0)


class VerifyResponse(BaseModel):
    case: str
    trials: int
    seed: int
    max_order: int
    tolerance: float
    passed: bool
    max_deviation: dict[str, float]


class JacobianCheckRequest(BaseModel):
    case_text: str
    sidecar_text: str | None = None
    model: str = Field("const-power", pattern="^(const-power|zip)$")
    h: float = Field(1e-6, gt=0.0)
    states: int = Field(20, ge=1)
    seed: int = 0
    tolerance: float = Field(1e-5, gt=0.0)


class JacobianCheckResponse(BaseModel):
    case: str
    model: str
    h: float
    states: int
    seed: int
    tolerance: float
    max_rel_error: float
    passed: bool


# ---------------------------------------------------------------------------
# handlers (shared by the HTTP endpoints and the CLI)

def _load_network(case_text: str, sidecar_text: str | None) -> tuple[CaseData, Network]:
    case = parse_case(case_text)
    if sidecar_text is None:
        zip_cfg, direction = ZipConfig.constant_power(case), DirectionVector.zeros()
    else:
        zip_cfg, direction = parse_sidecar(sidecar_text, case)
    return case, compile_network(case, zip_cfg, direction)


def _voltages(case: CaseData, net: Network, y: np.ndarray) -> list[BusVoltage]:
    y_ext = net.ordering.to_external_state(y)
    out = []
    for pos, bus in enumerate(case.buses):
        e = float(y_ext[2 * pos])
        f = float(y_ext[2 * pos + 1])
        out.append(
            BusVoltage(
                bus=bus.bus_id,
                e=e,
                f=f,
                vm=math.hypot(e, f),
                va=math.degrees(math.atan2(f, e)),
            )
        )
    return out


def _radius_at(net: Network, y: np.ndarray, lam: float, order: int, model: LoadModel) -> float | None:
    try:
        series = expand(net, y, lam, max(order, 6), model)
        radius = radius_estimate(series)
    except SeriesFlowError:
        return None
    return None if math.isinf(radius) else radius


def _solve_report(
    case: CaseData,
    net: Network,
    req: SolveRequest,
    y: np.ndarray,
    lam: float,
    model: LoadModel,
) -> SolveResponse:
    return SolveResponse(
        case=case.name or "case",
        model=req.model,
        lam=lam,
        order=req.order,
        voltages=_voltages(case, net, y),
        residual_inf=inf_norm(mismatch(net, y, lam, model)),
        radius_estimate=_radius_at(net, y, lam, req.order, model),
    )


def run_solve(req: SolveRequest) -> SolveResponse:
    """Continue expansions from loading 0 to the requested loading and
    report the solution there. Raises NumericalFailure (with the partial
    report attached) when the target cannot be reached."""
    case, net = _load_network(req.case_text, req.sidecar_text)
    model = LoadModel(req.model)
    base = newton_solve(net, 0.0, flat_start(net), model)
    if not base.converged:
        raise NumericalFailure(
            f"no base solution at lambda=0 (residual {base.residual_inf:.3e})",
            _solve_report(case, net, req, base.y, 0.0, model),
        )
    curve = trace(
        net,
        lambda_max=req.lam,
        model=model,
        order=max(req.order, 6),
        polish=req.polish,
        y_start=base.y,
    )
    last = curve.points[-1]
    flat = len(curve.points) == 1 and curve.termination is TraceTermination.REACHED_LAMBDA_MAX
    lam_reached = req.lam if flat else last.lam
    report = _solve_report(case, net, req, last.y, lam_reached, model)
    if curve.termination is not TraceTermination.REACHED_LAMBDA_MAX:
        raise NumericalFailure(
            f"{curve.termination.value} at lambda={last.lam!r} before target {req.lam!r}",
            report,
        )
    return report


def _trace_response(case: CaseData, net: Network, req: TraceRequest, curve: PVCurve) -> TraceResponse:
    points = []
    for p in curve.points:
        y_ext = net.ordering.to_external_state(p.y)
        points.append(
            TracePoint(
                lam=p.lam,
                e=[float(v) for v in y_ext[0::2]],
                f=[float(v) for v in y_ext[1::2]],
                residual_inf=p.residual_inf,
                expansion_index=p.expansion_index,
            )
        )
    return TraceResponse(
        case=case.name or "case",
        model=req.model,
        order=req.order,
        eta=req.eta,
        lambda_max=req.lambda_max,
        termination=curve.termination.value,
        points=points,
    )


def run_trace(req: TraceRequest) -> TraceResponse:
    """Trace the solution path up to lambda_max; the termination reason is
    part of the response. A missing base solution yields an empty curve
    with termination "BaseNotConverged"."""
    case, net = _load_network(req.case_text, req.sidecar_text)
    model = LoadModel(req.model)
    try:
        curve = trace(
            net,
            lambda_max=req.lambda_max,
            model=model,
            eta=req.eta,
            order=req.order,
            residual_tol=req.residual_tol,
            polish=req.polish,
        )
    except BaseNotConvergedError:
        return TraceResponse(
            case=case.name or "case",
            model=req.model,
            order=req.order,
            eta=req.eta,
            lambda_max=req.lambda_max,
            termination="BaseNotConverged",
            points=[],
        )
    return _trace_response(case, net, req, curve)


def run_verify(req: VerifyRequest) -> VerifyResponse:
    """Random-trial identity check of the per-order linear forms against
    the raw-convolution oracle, on the given case's network."""
    case, net = _load_network(req.case_text, None)
    report = identity_trials(
        net,
        trials=req.trials,
        seed=req.seed,
        max_order=req.max_order,
        tolerance=req.tolerance,
    )
    return VerifyResponse(
        case=case.name or "case",
        trials=report.trials,
        seed=report.seed,
        max_order=report.max_order,
        tolerance=report.tolerance,
        passed=report.passed,
        max_deviation=report.max_deviation,
    )


def run_jacobian_check(req: JacobianCheckRequest) -> JacobianCheckResponse:
    """Compare the assembled order system against central finite
    differences of the mismatch map at random states."""
    case, net = _load_network(req.case_text, req.sidecar_text)
    model = LoadModel(req.model)
    rng = np.random.default_rng(req.seed)
    worst = 0.0
    base = flat_start(net)
    for _ in range(req.states):
        y = base + rng.normal(0.0, 0.1, net.n_state)
        lam = rng.uniform(-0.5, 0.5)
        analytic = assemble_system(net, y, model).a_gy
        numeric = fd_jacobian(net, y, lam, model, h=req.h)
        worst = max(worst, inf_norm(numeric - analytic) / inf_norm(analytic))
    return JacobianCheckResponse(
        case=case.name or "case",
        model=req.model,
        h=req.h,
        states=req.states,
        seed=req.seed,
        tolerance=req.tolerance,
        max_rel_error=worst,
        passed=worst <= req.tolerance,
    )


# ---------------------------------------------------------------------------
# HTTP surface

app = FastAPI(title="seriesflow", version=__version__)


def _http_input_errors(func, req):
    try:
        return func(req)
    except SeriesFlowError as exc:
        if isinstance(exc, NumericalFailure):
            raise HTTPException(
                status_code=422,
                detail={
                    "error": exc.reason,
                    "report": exc.report.model_dump(by_alias=True),
                },
            ) from None
        raise HTTPException(status_code=400, detail=str(exc)) from None


@app.get("/health")
def health() -> dict[str, str]:
    return {"status": "ok", "version": __version__}


@app.post("/solve", response_model=SolveResponse)
def solve_endpoint(req: SolveRequest) -> SolveResponse:
    return _http_input_errors(run_solve, req)


@app.post("/trace", response_model=TraceResponse)
def trace_endpoint(req: TraceRequest) -> TraceResponse:
    return _http_input_errors(run_trace, req)


@app.post("/verify", response_model=VerifyResponse)
def verify_endpoint(req: VerifyRequest) -> VerifyResponse:
    return _http_input_errors(run_verify, req)


@app.post("/jacobian-check", response_model=JacobianCheckResponse)
def jacobian_check_endpoint(req: JacobianCheckRequest) -> JacobianCheckResponse:
    return _http_input_errors(run_jacobian_check, req)
