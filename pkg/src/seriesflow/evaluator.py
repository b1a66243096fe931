"""Turn series solutions into voltages, residuals and PV-curve traces.

The mismatch function here is the nonlinear ground truth the series
solver is checked against; it shares no linearization code with dt_core.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .dt_core import DEFAULT_ORDER, LoadModel, SeriesSolution, expand
from .errors import (
    BaseNotConvergedError,
    NotZipBusError,
    OrderTooLowError,
    SingularAtExpansionPointError,
)
from .netmodel import BusKind, Network
from .numerics import inf_norm

NEGLIGIBLE_COEFF = 1e-14
STEP_MIN = 1e-4
STEP_FLOOR = 1e-6
DEFAULT_ETA = 0.5
DEFAULT_RESIDUAL_TOL = 1e-8
MAX_TRACE_POINTS = 1000


class TraceTermination(Enum):
    REACHED_LAMBDA_MAX = "ReachedLambdaMax"
    SINGULAR_AT_EXPANSION_POINT = "SingularAtExpansionPoint"
    STEP_UNDERFLOW = "StepUnderflow"


@dataclass(frozen=True)
class CurvePoint:
    lam: float
    y: np.ndarray
    residual_inf: float
    expansion_index: int


@dataclass(frozen=True)
class PVCurve:
    points: tuple[CurvePoint, ...]
    termination: TraceTermination

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([p.lam for p in self.points])


def eval_series(series: SeriesSolution, lam: float) -> np.ndarray:
    """Horner evaluation of the voltage series at loading lam."""
    t = lam - series.lambda0
    y = series.coeffs[-1].copy()
    for k in range(series.order - 1, -1, -1):
        y *= t
        y += series.coeffs[k]
    return y


def zip_injection(net: Network, i: int, y: np.ndarray) -> tuple[float, float]:
    """ZIP power injection (p, q) at PQ bus i for state y."""
    if net.kind_of(i) is not BusKind.PQ:
        raise NotZipBusError(f"bus {i} is {net.kind_of(i).name}, ZIP applies to PQ buses")
    e = y[2 * i]
    f = y[2 * i + 1]
    vv = e * e + f * f
    ire = net.zip_i[i].real
    iim = net.zip_i[i].imag
    p = (
        net.zip_az[i] * net.zfac_re[i] * vv
        + net.zip_ai[i] * (e * ire + f * iim)
        + net.zip_ap[i] * net.p_sp[i]
    )
    q = (
        net.zip_bz[i] * net.zfac_im[i] * vv
        + net.zip_bi[i] * (f * ire - e * iim)
        + net.zip_bp[i] * net.q_sp[i]
    )
    return float(p), float(q)


def mismatch(
    net: Network,
    y: np.ndarray,
    lam: float,
    model: LoadModel = LoadModel.CONSTANT_POWER,
) -> np.ndarray:
    """Equation residuals at (y, lam), stacked in solver row order.

    Each entry is the network side minus the specified side, so the
    vector is zero exactly when y solves the power flow at loading lam.
    """
    y = np.asarray(y, dtype=float)
    e = y[0::2]
    f = y[1::2]
    ge = net.g @ e
    gf = net.g @ f
    be = net.b @ e
    bf = net.b @ f
    p_net = e * ge + f * gf + f * be - e * bf
    q_net = f * ge - e * gf - e * be - f * bf

    m = net.n_pq
    n = net.n_bus
    p_lhs = net.p_sp.copy()
    q_lhs = net.q_sp.copy()
    if model is LoadModel.ZIP and m:
        vv = e[:m] ** 2 + f[:m] ** 2
        ire = net.zip_i[:m].real
        iim = net.zip_i[:m].imag
        p_lhs[:m] = (
            net.zip_az[:m] * net.zfac_re[:m] * vv
            + net.zip_ai[:m] * (e[:m] * ire + f[:m] * iim)
            + net.zip_ap[:m] * net.p_sp[:m]
        )
        q_lhs[:m] = (
            net.zip_bz[:m] * net.zfac_im[:m] * vv
            + net.zip_bi[:m] * (f[:m] * ire - e[:m] * iim)
            + net.zip_bp[:m] * net.q_sp[:m]
        )

    out = np.empty(net.n_state)
    out[0::2] = -lam * net.dp + p_net - p_lhs
    out[1::2] = -lam * net.dq + q_net - q_lhs
    pv = slice(m, n - 1)
    out[2 * m + 1:2 * (n - 1):2] = e[pv] ** 2 + f[pv] ** 2 - net.v_sp[pv] ** 2
    out[-2] = e[-1] - net.e_sp
    out[-1] = f[-1] - net.f_sp
    return out


def radius_estimate(series: SeriesSolution) -> float:
    """Heuristic convergence-radius estimate from the coefficient tail.

    Median of the last six norm ratios |Y(k-1)|/|Y(k)|. Infinite when the
    tail has effectively vanished (constant or polynomial solution).
    """
    k_max = series.order
    if k_max < 6:
        raise OrderTooLowError(f"radius estimate needs order >= 6, got {k_max}")
    norms = np.max(np.abs(series.coeffs[k_max - 6: k_max + 1]), axis=1)
    tail = norms[1:]
    if np.all(tail < NEGLIGIBLE_COEFF):
        return float("inf")
    ratios = np.where(tail > 0.0, norms[:-1] / np.where(tail > 0.0, tail, 1.0), np.inf)
    return float(np.median(ratios))


def _series_is_flat(series: SeriesSolution) -> bool:
    if series.order < 1:
        return True
    return bool(np.all(np.abs(series.coeffs[1:]) < NEGLIGIBLE_COEFF))


def trace(
    net: Network,
    lambda_max: float,
    model: LoadModel = LoadModel.CONSTANT_POWER,
    *,
    lambda_start: float = 0.0,
    eta: float = DEFAULT_ETA,
    order: int = DEFAULT_ORDER,
    residual_tol: float = DEFAULT_RESIDUAL_TOL,
    polish: bool = True,
    y_start: np.ndarray | None = None,
) -> PVCurve:
    """March expansions along increasing loading up to lambda_max.

    Each step moves a fraction eta of the estimated convergence radius
    (clamped), evaluates the series there and, by default, re-polishes
    with the Newton oracle so the next expansion starts from a genuine
    solution. Termination:

    * ReachedLambdaMax -- lambda_max attained (immediately, as a single
      point, when the solution does not depend on the loading).
    * SingularAtExpansionPoint -- the expansion radius collapsed below
      the step floor or the order system factorization failed; the
      expansion point sits numerically at the PV-curve nose.
    * StepUnderflow -- step retries shrank below the floor while the
      radius stayed healthy.
    """
    from .oracle import flat_start, newton_solve  # deferred: oracle imports this module

    if not 0.0 < eta <= 1.0:
        raise ValueError(f"eta must be in (0, 1], got {eta}")
    if order < 6:
        raise OrderTooLowError(f"trace needs order >= 6 for step control, got {order}")

    if y_start is None:
        report = newton_solve(net, lambda_start, flat_start(net), model)
        if not report.converged:
            raise BaseNotConvergedError(
                f"no base solution at lambda={lambda_start!r} "
                f"(residual {report.residual_inf:.3e})"
            )
        y0 = report.y
    else:
        y0 = np.asarray(y_start, dtype=float).copy()

    res0 = inf_norm(mismatch(net, y0, lambda_start, model))
    points = [CurvePoint(lam=lambda_start, y=y0, residual_inf=res0, expansion_index=0)]
    if lambda_max <= lambda_start:
        return PVCurve(points=tuple(points), termination=TraceTermination.REACHED_LAMBDA_MAX)

    lam0 = lambda_start
    expansion_index = 0
    termination = TraceTermination.STEP_UNDERFLOW
    while len(points) < MAX_TRACE_POINTS:
        try:
            series = expand(net, y0, lam0, order, model)
        except SingularAtExpansionPointError:
            termination = TraceTermination.SINGULAR_AT_EXPANSION_POINT
            break
        if _series_is_flat(series):
            termination = TraceTermination.REACHED_LAMBDA_MAX
            break
        radius = radius_estimate(series)
        if np.isinf(radius):
            step = lambda_max - lam0
        else:
            step = min(max(eta * radius, STEP_MIN), 0.5 * radius)
            if step < STEP_FLOOR:
                # The series' own convergence radius has collapsed: the
                # expansion point is numerically at the curve's nose.
                termination = TraceTermination.SINGULAR_AT_EXPANSION_POINT
                break

        accepted = None
        while True:
            lam1 = min(lam0 + step, lambda_max)
            y_guess = eval_series(series, lam1)
            if polish:
                report = newton_solve(net, lam1, y_guess, model)
                ok = report.converged
                y1, res1 = report.y, report.residual_inf
            else:
                y1 = y_guess
                res1 = inf_norm(mismatch(net, y1, lam1, model))
                ok = res1 <= residual_tol
            if ok:
                accepted = (lam1, y1, res1)
                break
            step *= 0.5
            if step < STEP_FLOOR:
                break
        if accepted is None:
            if not np.isinf(radius) and 0.5 * radius < STEP_FLOOR:
                termination = TraceTermination.SINGULAR_AT_EXPANSION_POINT
            else:
                termination = TraceTermination.STEP_UNDERFLOW
            break

        lam1, y1, res1 = accepted
        expansion_index += 1
        points.append(
            CurvePoint(lam=lam1, y=y1, residual_inf=res1, expansion_index=expansion_index)
        )
        if lam1 >= lambda_max:
            termination = TraceTermination.REACHED_LAMBDA_MAX
            break
        lam0, y0 = lam1, y1

    return PVCurve(points=tuple(points), termination=termination)
