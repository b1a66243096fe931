"""Per-order linear forms of the power-flow equations and the series
recursion that solves them.

The power-flow equations in rectangular voltage coordinates are purely
quadratic, so the order-k coefficient of any product term splits into a
part linear in the unknown k-th coefficients (with weights from the
order-0 coefficients) plus a constant built from orders 1..k-1. Stacking
those linear forms gives one matrix, independent of k, that is factored
once and reused for every order.

State vectors interleave real and imaginary voltage parts per bus:
``y = (e_1, f_1, ..., e_N, f_N)`` with buses in internal order (PQ block,
PV block, reference last). Rows stack per bus as (P, Q) for PQ buses,
(P, V) for PV buses and (E, F) for the reference bus.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    BaseNotConvergedError,
    KindMismatchError,
    NotZipBusError,
    OrderOutOfRangeError,
    SingularAtExpansionPointError,
    SingularMatrixError,
)
from .netmodel import BusKind, Network
from .numerics import inf_norm, lu_factor, lu_solve

BASE_RESIDUAL_TOL = 1e-10
SINGULAR_PIVOT_FRACTION = 1e-10
DEFAULT_ORDER = 30


class LoadModel(Enum):
    CONSTANT_POWER = "const-power"
    ZIP = "zip"


class EquationKind(Enum):
    P = "P"   # active power balance (PQ and PV buses)
    Q = "Q"   # reactive power balance (PQ buses)
    V = "V"   # squared-magnitude set-point (PV buses)
    E = "E"   # real-part set-point (reference bus)
    F = "F"   # imaginary-part set-point (reference bus)


_VALID_KINDS = {
    BusKind.PQ: (EquationKind.P, EquationKind.Q),
    BusKind.PV: (EquationKind.P, EquationKind.V),
    BusKind.REF: (EquationKind.E, EquationKind.F),
}


@dataclass(frozen=True)
class LinearForm:
    """row . Y(k) + lam_coef . L(k) + constant, for one equation at order k."""

    row: np.ndarray
    lam_coef: float
    constant: float

    def value(self, yk: np.ndarray, lk: float) -> float:
        return float(self.row @ yk + self.lam_coef * lk + self.constant)


@dataclass(frozen=True)
class OrderSystem:
    """Stacked order-k system: a_gy Y(k) + a_gl L(k) + B(k) = 0.

    a_gy and a_gl depend only on the order-0 coefficients; the constant
    B(k) comes from rhs_at_order.
    """

    a_gy: np.ndarray
    a_gl: np.ndarray
    rows: tuple[tuple[int, EquationKind], ...]

    def row_of(self, bus: int, kind: EquationKind) -> int:
        return self.rows.index((bus, kind))


@dataclass(frozen=True)
class SeriesSolution:
    """Voltage series about lambda0: coeffs[k] is the k-th coefficient of
    the interleaved state vector, lam[k] the k-th coefficient of the
    loading parameter (lambda0, 1, 0, 0, ...)."""

    lambda0: float
    coeffs: np.ndarray  # (K+1, 2N)
    lam: np.ndarray     # (K+1,)

    @property
    def order(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def n_state(self) -> int:
        return self.coeffs.shape[1]


def delta(k: int) -> float:
    """Order-k coefficient of a constant: 1 at order 0, else 0."""
    if k < 0:
        raise OrderOutOfRangeError(f"order must be nonnegative, got {k}")
    return 1.0 if k == 0 else 0.0


def conv_at(x, y, k: int) -> float:
    """Cauchy-product coefficient sum(m=0..k) x[m] * y[k-m]."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if k < 0 or x.shape[0] <= k or y.shape[0] <= k:
        raise OrderOutOfRangeError(
            f"convolution at order {k} needs {k + 1} coefficients, "
            f"got {x.shape[0]} and {y.shape[0]}"
        )
    return float(np.dot(x[: k + 1], y[k::-1]))


def lemma_coeffs(x, y, k: int) -> tuple[float, float, float]:
    """Split conv_at(x, y, k) into a*x[k] + b*y[k] + c with a, b, c
    depending only on orders 0..k-1.

    a = y[0], b = x[0], c = sum(m=1..k-1) x[m] y[k-m]. For x is y the
    self-product form 2*a*x[k] + c holds.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if k < 1:
        raise OrderOutOfRangeError(f"the split form needs k >= 1, got {k}")
    if x.shape[0] < k or y.shape[0] < k:
        raise OrderOutOfRangeError(
            f"order {k} split needs coefficients through {k - 1}, "
            f"got {x.shape[0]} and {y.shape[0]}"
        )
    c = float(np.dot(x[1:k], y[k - 1:0:-1]))
    return float(y[0]), float(x[0]), c


def _check_kind(net: Network, i: int, kind: EquationKind) -> None:
    if kind not in _VALID_KINDS[net.kind_of(i)]:
        raise KindMismatchError(
            f"equation kind {kind.value} not valid for {net.kind_of(i).name} bus {i}"
        )


def _zip_slots_p(net: Network, i: int, e0i: float, f0i: float) -> tuple[float, float]:
    """Coefficients of E_i(k), F_i(k) in the ZIP active-power injection."""
    t_e = net.zip_az[i] * 2.0 * e0i * net.zfac_re[i] + net.zip_ai[i] * net.zip_i[i].real
    t_f = net.zip_az[i] * 2.0 * f0i * net.zfac_re[i] + net.zip_ai[i] * net.zip_i[i].imag
    return t_e, t_f


def _zip_slots_q(net: Network, i: int, e0i: float, f0i: float) -> tuple[float, float]:
    """Coefficients of E_i(k), F_i(k) in the ZIP reactive-power injection."""
    t_e = net.zip_bz[i] * 2.0 * e0i * net.zfac_im[i] - net.zip_bi[i] * net.zip_i[i].imag
    t_f = net.zip_bz[i] * 2.0 * f0i * net.zfac_im[i] + net.zip_bi[i] * net.zip_i[i].real
    return t_e, t_f


def _self_conv_tail(coeffs: np.ndarray, i: int, k: int) -> float:
    """sum(m=1..k-1) of E_i(m)E_i(k-m) + F_i(m)F_i(k-m)."""
    if k <= 1:
        return 0.0
    e = coeffs[1:k, 2 * i]
    f = coeffs[1:k, 2 * i + 1]
    return float(np.dot(e, e[::-1]) + np.dot(f, f[::-1]))


def zip_linear_p(net: Network, i: int, coeffs: np.ndarray, k: int) -> LinearForm:
    """Order-k linear form of the ZIP active-power injection at bus i.

    The row is k-independent; the constant carries the lower-order
    self-convolution of the impedance component plus the constant-power
    term (nonzero only at order 0).
    """
    if net.kind_of(i) is not BusKind.PQ:
        raise NotZipBusError(f"bus {i} is {net.kind_of(i).name}, ZIP applies to PQ buses")
    coeffs = np.asarray(coeffs, dtype=float)
    if k < 1 or coeffs.shape[0] < k:
        raise OrderOutOfRangeError(
            f"order {k} form needs coefficients through {k - 1}, got {coeffs.shape[0]}"
        )
    row = np.zeros(net.n_state)
    row[2 * i], row[2 * i + 1] = _zip_slots_p(net, i, coeffs[0, 2 * i], coeffs[0, 2 * i + 1])
    constant = (
        net.zip_az[i] * net.zfac_re[i] * _self_conv_tail(coeffs, i, k)
        + net.zip_ap[i] * net.p_sp[i] * delta(k)
    )
    return LinearForm(row=row, lam_coef=0.0, constant=constant)


def zip_linear_q(net: Network, i: int, coeffs: np.ndarray, k: int) -> LinearForm:
    """Order-k linear form of the ZIP reactive-power injection at bus i."""
    if net.kind_of(i) is not BusKind.PQ:
        raise NotZipBusError(f"bus {i} is {net.kind_of(i).name}, ZIP applies to PQ buses")
    coeffs = np.asarray(coeffs, dtype=float)
    if k < 1 or coeffs.shape[0] < k:
        raise OrderOutOfRangeError(
            f"order {k} form needs coefficients through {k - 1}, got {coeffs.shape[0]}"
        )
    row = np.zeros(net.n_state)
    row[2 * i], row[2 * i + 1] = _zip_slots_q(net, i, coeffs[0, 2 * i], coeffs[0, 2 * i + 1])
    constant = (
        net.zip_bz[i] * net.zfac_im[i] * _self_conv_tail(coeffs, i, k)
        + net.zip_bp[i] * net.q_sp[i] * delta(k)
    )
    return LinearForm(row=row, lam_coef=0.0, constant=constant)


def pf_row(
    net: Network,
    i: int,
    kind: EquationKind,
    y0: np.ndarray,
    model: LoadModel = LoadModel.CONSTANT_POWER,
) -> tuple[np.ndarray, float]:
    """Row of the order-k system for one equation, plus its lambda
    coefficient. Depends only on the order-0 coefficients y0.

    Under the ZIP model, P/Q rows of PQ buses are reduced by the voltage
    sensitivity of the ZIP injection; all other rows are unchanged.
    """
    _check_kind(net, i, kind)
    y0 = np.asarray(y0, dtype=float)
    e0 = y0[0::2]
    f0 = y0[1::2]
    row = np.zeros(net.n_state)
    lam_coef = 0.0

    if kind is EquationKind.P:
        g = net.g[i]
        b = net.b[i]
        row[0::2] = g * e0[i] + b * f0[i]
        row[1::2] = g * f0[i] - b * e0[i]
        row[2 * i] = (g @ e0 - b @ f0) + g[i] * e0[i] + b[i] * f0[i]
        row[2 * i + 1] = (b @ e0 + g @ f0) - b[i] * e0[i] + g[i] * f0[i]
        lam_coef = -net.dp[i]
        if model is LoadModel.ZIP and net.kind_of(i) is BusKind.PQ:
            t_e, t_f = _zip_slots_p(net, i, e0[i], f0[i])
            row[2 * i] -= t_e
            row[2 * i + 1] -= t_f
    elif kind is EquationKind.Q:
        g = net.g[i]
        b = net.b[i]
        row[0::2] = -b * e0[i] + g * f0[i]
        row[1::2] = -b * f0[i] - g * e0[i]
        row[2 * i] = -(b @ e0 + g @ f0) - b[i] * e0[i] + g[i] * f0[i]
        row[2 * i + 1] = (g @ e0 - b @ f0) - g[i] * e0[i] - b[i] * f0[i]
        lam_coef = -net.dq[i]
        if model is LoadModel.ZIP and net.kind_of(i) is BusKind.PQ:
            t_e, t_f = _zip_slots_q(net, i, e0[i], f0[i])
            row[2 * i] -= t_e
            row[2 * i + 1] -= t_f
    elif kind is EquationKind.V:
        row[2 * i] = 2.0 * e0[i]
        row[2 * i + 1] = 2.0 * f0[i]
    elif kind is EquationKind.E:
        row[2 * i] = 1.0
    else:  # EquationKind.F
        row[2 * i + 1] = 1.0
    return row, lam_coef


def pf_const(
    net: Network,
    i: int,
    kind: EquationKind,
    coeffs: np.ndarray,
    k: int,
    model: LoadModel = LoadModel.CONSTANT_POWER,
) -> float:
    """Order-k constant of one equation, built from coefficients 1..k-1."""
    _check_kind(net, i, kind)
    coeffs = np.asarray(coeffs, dtype=float)
    if k < 1 or coeffs.shape[0] < k:
        raise OrderOutOfRangeError(
            f"order {k} constant needs coefficients through {k - 1}, "
            f"got {coeffs.shape[0]}"
        )
    n = net.n_bus
    dk = delta(k)
    if kind is EquationKind.E:
        return -net.e_sp * dk
    if kind is EquationKind.F:
        return -net.f_sp * dk

    if k == 1:
        conv_sym = np.zeros(n)
        conv_skew = np.zeros(n)
    else:
        e_tail = coeffs[1:k, 0::2]
        f_tail = coeffs[1:k, 1::2]
        conv_sym = e_tail[:, i] @ e_tail[::-1] + f_tail[:, i] @ f_tail[::-1]
        conv_skew = f_tail[:, i] @ e_tail[::-1] - e_tail[:, i] @ f_tail[::-1]

    if kind is EquationKind.V:
        return float(conv_sym[i] - net.v_sp[i] ** 2 * dk)

    g = net.g[i]
    b = net.b[i]
    if kind is EquationKind.P:
        val = float(g @ conv_sym + b @ conv_skew - net.p_sp[i] * dk)
        if model is LoadModel.ZIP and net.kind_of(i) is BusKind.PQ:
            val += net.p_sp[i] * dk - (
                net.zip_az[i] * net.zfac_re[i] * conv_sym[i]
                + net.zip_ap[i] * net.p_sp[i] * dk
            )
        return val
    # EquationKind.Q
    val = float(-(b @ conv_sym) + g @ conv_skew - net.q_sp[i] * dk)
    if model is LoadModel.ZIP and net.kind_of(i) is BusKind.PQ:
        val += net.q_sp[i] * dk - (
            net.zip_bz[i] * net.zfac_im[i] * conv_sym[i]
            + net.zip_bp[i] * net.q_sp[i] * dk
        )
    return val


def row_layout(net: Network) -> tuple[tuple[int, EquationKind], ...]:
    """(bus, kind) per row: (P, Q) for PQ, (P, V) for PV, (E, F) for REF."""
    rows: list[tuple[int, EquationKind]] = []
    for i in range(net.n_bus):
        kind = net.kind_of(i)
        if kind is BusKind.PQ:
            rows.append((i, EquationKind.P))
            rows.append((i, EquationKind.Q))
        elif kind is BusKind.PV:
            rows.append((i, EquationKind.P))
            rows.append((i, EquationKind.V))
        else:
            rows.append((i, EquationKind.E))
            rows.append((i, EquationKind.F))
    return tuple(rows)


def assemble_system(
    net: Network, y0: np.ndarray, model: LoadModel = LoadModel.CONSTANT_POWER
) -> OrderSystem:
    """Stack the per-equation rows about y0. The result equals the
    Jacobian of the mismatch map at y0 and is reused for every order."""
    rows = row_layout(net)
    n2 = net.n_state
    a_gy = np.zeros((n2, n2))
    a_gl = np.zeros(n2)
    for r, (i, kind) in enumerate(rows):
        a_gy[r], a_gl[r] = pf_row(net, i, kind, y0, model)
    return OrderSystem(a_gy=a_gy, a_gl=a_gl, rows=rows)


def rhs_at_order(
    net: Network,
    coeffs: np.ndarray,
    k: int,
    model: LoadModel = LoadModel.CONSTANT_POWER,
) -> np.ndarray:
    """Stacked order-k constants B(k), vectorized across all buses.

    Exactly zero at k = 1: every sum over orders 1..k-1 is empty and the
    constant-coefficient pulse vanishes for k >= 1.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    if k < 1 or coeffs.shape[0] < k:
        raise OrderOutOfRangeError(
            f"order {k} constants need coefficients through {k - 1}, "
            f"got {coeffs.shape[0]}"
        )
    n = net.n_bus
    m = net.n_pq
    if k == 1:
        conv_sym = np.zeros((n, n))
        conv_skew = np.zeros((n, n))
    else:
        e_tail = coeffs[1:k, 0::2]
        f_tail = coeffs[1:k, 1::2]
        e_rev = e_tail[::-1]
        f_rev = f_tail[::-1]
        conv_sym = e_tail.T @ e_rev + f_tail.T @ f_rev
        conv_skew = f_tail.T @ e_rev - e_tail.T @ f_rev

    dk = delta(k)
    p_const = (
        (net.g * conv_sym).sum(axis=1) + (net.b * conv_skew).sum(axis=1) - net.p_sp * dk
    )
    q_const = (
        -(net.b * conv_sym).sum(axis=1) + (net.g * conv_skew).sum(axis=1) - net.q_sp * dk
    )
    if model is LoadModel.ZIP and m:
        diag = conv_sym.diagonal()[:m]
        p_const[:m] += net.p_sp[:m] * dk - (
            net.zip_az[:m] * net.zfac_re[:m] * diag
            + net.zip_ap[:m] * net.p_sp[:m] * dk
        )
        q_const[:m] += net.q_sp[:m] * dk - (
            net.zip_bz[:m] * net.zfac_im[:m] * diag
            + net.zip_bp[:m] * net.q_sp[:m] * dk
        )

    out = np.empty(net.n_state)
    out[0::2] = p_const
    out[1::2] = q_const
    for i in range(m, n - 1):  # PV block: magnitude rows replace Q rows
        out[2 * i + 1] = conv_sym[i, i] - net.v_sp[i] ** 2 * dk
    out[-2] = -net.e_sp * dk
    out[-1] = -net.f_sp * dk
    return out


def expand(
    net: Network,
    y0: np.ndarray,
    lambda0: float,
    order: int = DEFAULT_ORDER,
    model: LoadModel = LoadModel.CONSTANT_POWER,
) -> SeriesSolution:
    """Solve the series coefficients order by order about (y0, lambda0).

    y0 must already solve the power flow at lambda0 (checked). One
    factorization is reused for all orders; the reference-bus coefficients
    are eliminated up front, which keeps them exactly zero for k >= 1.
    """
    from .evaluator import mismatch  # deferred: evaluator imports this module

    y0 = np.asarray(y0, dtype=float)
    if y0.shape != (net.n_state,):
        raise ValueError(f"expected state of length {net.n_state}, got {y0.shape}")
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    base_residual = inf_norm(mismatch(net, y0, lambda0, model))
    if not base_residual <= BASE_RESIDUAL_TOL:
        raise BaseNotConvergedError(
            f"expansion point residual {base_residual:.3e} exceeds {BASE_RESIDUAL_TOL:.1e}"
        )

    system = assemble_system(net, y0, model)
    n_red = net.n_state - 2
    threshold = SINGULAR_PIVOT_FRACTION * inf_norm(system.a_gy)
    try:
        fact = lu_factor(system.a_gy[:n_red, :n_red], singular_threshold=threshold)
    except SingularMatrixError as exc:
        raise SingularAtExpansionPointError(
            f"order system singular at lambda0={lambda0!r} (min pivot {exc.min_pivot:.3e})"
        ) from None

    coeffs = np.zeros((order + 1, net.n_state))
    coeffs[0] = y0
    lam = np.zeros(order + 1)
    lam[0] = lambda0
    lam[1] = 1.0
    a_gl_red = system.a_gl[:n_red]
    for k in range(1, order + 1):
        rhs = -a_gl_red * lam[k] - rhs_at_order(net, coeffs[:k], k, model)[:n_red]
        coeffs[k, :n_red] = lu_solve(fact, rhs)
    coeffs.setflags(write=False)
    lam.setflags(write=False)
    return SeriesSolution(lambda0=float(lambda0), coeffs=coeffs, lam=lam)
