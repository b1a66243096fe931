"""Independent reference implementations used for verification.

Newton-Raphson in rectangular coordinates, central finite-difference
Jacobians, and raw-convolution evaluation of the transformed equations.
The convolution and finite-difference paths deliberately share no
linearization code with dt_core; agreement between the two routes is what
the test suite certifies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dt_core import LoadModel, assemble_system, delta
from .errors import (
    KindMismatchError,
    OrderOutOfRangeError,
    SingularMatrixError,
)
from .evaluator import mismatch
from .netmodel import BusKind, Network
from .numerics import inf_norm, lu_factor, lu_solve

NEWTON_TOL = 1e-10
NEWTON_MAX_ITER = 50
NEWTON_MAX_HALVINGS = 6

DIRECT_KINDS = ("P", "Q", "V", "E", "F", "Pzip", "Qzip")


@dataclass(frozen=True)
class NewtonReport:
    converged: bool
    iterations: int
    residual_inf: float
    y: np.ndarray


def flat_start(net: Network) -> np.ndarray:
    """Unit voltage at PQ buses, set-point magnitudes at PV, exact
    reference phasor at the slack."""
    y = np.zeros(net.n_state)
    y[0::2] = 1.0
    for i in range(net.n_pq, net.n_bus - 1):
        y[2 * i] = net.v_sp[i]
    y[-2] = net.e_sp
    y[-1] = net.f_sp
    return y


def newton_solve(
    net: Network,
    lam: float,
    y_init: np.ndarray,
    model: LoadModel = LoadModel.CONSTANT_POWER,
    tol: float = NEWTON_TOL,
    max_iter: int = NEWTON_MAX_ITER,
) -> NewtonReport:
    """Damped Newton on the mismatch map.

    The slack entries are pinned to their set-points and eliminated, so
    they are exact in the result. Non-convergence is reported, never
    raised. Steps are halved up to six times when the residual fails to
    decrease; if no decrease is found the iteration stops.
    """
    y = np.asarray(y_init, dtype=float).copy()
    y[-2] = net.e_sp
    y[-1] = net.f_sp
    n_red = net.n_state - 2
    residual = mismatch(net, y, lam, model)
    res = inf_norm(residual)
    iterations = 0
    while np.isfinite(res) and res > tol and iterations < max_iter:
        jac = assemble_system(net, y, model).a_gy
        try:
            fact = lu_factor(jac[:n_red, :n_red], singular_threshold=0.0)
        except SingularMatrixError:
            break
        step = lu_solve(fact, -residual[:n_red])
        scale = 1.0
        improved = False
        for _ in range(NEWTON_MAX_HALVINGS + 1):
            y_try = y.copy()
            y_try[:n_red] += scale * step
            r_try = mismatch(net, y_try, lam, model)
            res_try = inf_norm(r_try)
            if res_try < res:
                y, residual, res = y_try, r_try, res_try
                improved = True
                break
            scale *= 0.5
        iterations += 1
        if not improved:
            break
    return NewtonReport(
        converged=bool(np.isfinite(res) and res <= tol),
        iterations=iterations,
        residual_inf=float(res),
        y=y,
    )


def fd_jacobian(
    net: Network,
    y: np.ndarray,
    lam: float,
    model: LoadModel = LoadModel.CONSTANT_POWER,
    h: float = 1e-6,
) -> np.ndarray:
    """Central-difference Jacobian of the mismatch map at y."""
    if h <= 0:
        raise ValueError(f"step must be positive, got {h}")
    y = np.asarray(y, dtype=float)
    n2 = net.n_state
    jac = np.empty((n2, n2))
    for j in range(n2):
        y_hi = y.copy()
        y_lo = y.copy()
        y_hi[j] += h
        y_lo[j] -= h
        jac[:, j] = (mismatch(net, y_hi, lam, model) - mismatch(net, y_lo, lam, model)) / (
            2.0 * h
        )
    return jac


def zip_power_coeff(
    net: Network, i: int, coeffs: np.ndarray, k: int
) -> tuple[float, float]:
    """Order-k coefficients of the ZIP injections at PQ bus i, computed by
    raw convolutions of the voltage series."""
    coeffs = np.asarray(coeffs, dtype=float)
    if k < 0 or coeffs.shape[0] <= k:
        raise OrderOutOfRangeError(
            f"order {k} needs {k + 1} coefficients, got {coeffs.shape[0]}"
        )
    e = coeffs[: k + 1, 2 * i]
    f = coeffs[: k + 1, 2 * i + 1]
    vv = float(np.dot(e, e[::-1]) + np.dot(f, f[::-1]))
    ire = net.zip_i[i].real
    iim = net.zip_i[i].imag
    dk = delta(k)
    p = (
        net.zip_az[i] * net.zfac_re[i] * vv
        + net.zip_ai[i] * (e[k] * ire + f[k] * iim)
        + net.zip_ap[i] * net.p_sp[i] * dk
    )
    q = (
        net.zip_bz[i] * net.zfac_im[i] * vv
        + net.zip_bi[i] * (f[k] * ire - e[k] * iim)
        + net.zip_bp[i] * net.q_sp[i] * dk
    )
    return float(p), float(q)


def direct_transform(
    net: Network,
    i: int,
    kind: str,
    coeffs: np.ndarray,
    lams: np.ndarray,
    k: int,
) -> float:
    """Order-k residual of one transformed equation by raw convolutions.

    No linearization: the order-k coefficients themselves enter the
    convolutions. Returns network side minus specified side; at k = 0 this
    reproduces the nonlinear mismatch evaluated at the order-0 state.
    """
    if kind not in DIRECT_KINDS:
        raise ValueError(f"unknown equation kind {kind!r}")
    coeffs = np.asarray(coeffs, dtype=float)
    lams = np.asarray(lams, dtype=float)
    if k < 0 or coeffs.shape[0] <= k or lams.shape[0] <= k:
        raise OrderOutOfRangeError(
            f"order {k} needs {k + 1} coefficients, got {coeffs.shape[0]} and {lams.shape[0]}"
        )
    bk = net.kind_of(i)
    dk = delta(k)

    if kind == "E":
        if bk is not BusKind.REF:
            raise KindMismatchError(f"kind E not valid for {bk.name} bus {i}")
        return float(coeffs[k, 2 * i] - net.e_sp * dk)
    if kind == "F":
        if bk is not BusKind.REF:
            raise KindMismatchError(f"kind F not valid for {bk.name} bus {i}")
        return float(coeffs[k, 2 * i + 1] - net.f_sp * dk)

    e = coeffs[: k + 1, 0::2]
    f = coeffs[: k + 1, 1::2]
    ei = e[:, i]
    fi = f[:, i]
    e_rev = e[::-1]
    f_rev = f[::-1]
    conv_ee = ei @ e_rev  # per bus j: sum_m E_i(m) E_j(k-m)
    conv_ff = fi @ f_rev
    conv_fe = fi @ e_rev
    conv_ef = ei @ f_rev

    if kind == "V":
        if bk is not BusKind.PV:
            raise KindMismatchError(f"kind V not valid for {bk.name} bus {i}")
        return float(conv_ee[i] + conv_ff[i] - net.v_sp[i] ** 2 * dk)

    g = net.g[i]
    b = net.b[i]
    if kind in ("P", "Pzip"):
        if kind == "P" and bk is BusKind.REF:
            raise KindMismatchError(f"kind P not valid for REF bus {i}")
        if kind == "Pzip" and bk is not BusKind.PQ:
            raise KindMismatchError(f"kind Pzip not valid for {bk.name} bus {i}")
        network = -net.dp[i] * lams[k] + g @ (conv_ee + conv_ff) + b @ (conv_fe - conv_ef)
        if kind == "P":
            return float(network - net.p_sp[i] * dk)
        p_inj, _ = zip_power_coeff(net, i, coeffs, k)
        return float(network - p_inj)
    # Q / Qzip
    if bk is not BusKind.PQ:
        raise KindMismatchError(f"kind {kind} not valid for {bk.name} bus {i}")
    network = -net.dq[i] * lams[k] - b @ (conv_ee + conv_ff) + g @ (conv_fe - conv_ef)
    if kind == "Q":
        return float(network - net.q_sp[i] * dk)
    _, q_inj = zip_power_coeff(net, i, coeffs, k)
    return float(network - q_inj)


def bracket_nose(
    net: Network,
    model: LoadModel = LoadModel.CONSTANT_POWER,
    lam_lo: float = 0.0,
    lam_hi: float = 10.0,
    tol: float = 1e-4,
) -> tuple[float, float]:
    """Bisect the largest solvable loading, continuing Newton from the
    last converged solution. Returns (last solvable, first unsolvable)."""
    report = newton_solve(net, lam_lo, flat_start(net), model)
    if not report.converged:
        raise ValueError(f"no solution at lam_lo={lam_lo!r}")
    y_lo = report.y
    hi = lam_hi
    for _ in range(60):
        if not newton_solve(net, hi, y_lo, model).converged:
            break
        hi *= 2.0
    else:
        raise ValueError(f"still solvable at lam={hi!r}; raise lam_hi")
    lo = lam_lo
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        report = newton_solve(net, mid, y_lo, model)
        if report.converged:
            lo, y_lo = mid, report.y
        else:
            hi = mid
    return lo, hi
