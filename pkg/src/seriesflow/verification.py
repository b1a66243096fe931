"""Random-trial verification that the per-order linear forms reproduce the
raw-convolution transforms, for both load models.

The identities are algebraic: they must hold for arbitrary series
coefficients, not just solver output, so trials draw everything at random.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .dt_core import EquationKind, LoadModel, assemble_system, rhs_at_order
from .netmodel import BusKind, BusOrdering, Network
from .oracle import direct_transform

IDENTITY_TOL = 1e-12
DEFAULT_TRIALS = 1000
DEFAULT_MAX_ORDER = 8

_DIRECT_KIND_OF: dict[tuple[EquationKind, LoadModel, BusKind], str] = {}
for _kind in EquationKind:
    for _model in LoadModel:
        for _bk in BusKind:
            name = _kind.value
            if _model is LoadModel.ZIP and _bk is BusKind.PQ and name in ("P", "Q"):
                name += "zip"
            _DIRECT_KIND_OF[(_kind, _model, _bk)] = name


@dataclass(frozen=True)
class VerifyReport:
    trials: int
    seed: int
    max_order: int
    tolerance: float
    passed: bool
    max_deviation: dict[str, float]

    def worst(self) -> float:
        return max(self.max_deviation.values(), default=0.0)


def random_direction(net: Network, rng: np.random.Generator) -> Network:
    """Copy of net with a random loading direction (dq only on PQ buses)."""
    n = net.n_bus
    dp = rng.normal(0.0, 0.5, n)
    dp[-1] = 0.0
    dq = np.zeros(n)
    dq[: net.n_pq] = rng.normal(0.0, 0.5, net.n_pq)
    return replace(net, dp=dp, dq=dq)


def random_zip(net: Network, rng: np.random.Generator) -> Network:
    """Copy of net with random ZIP mixes on its PQ buses."""
    n = net.n_bus
    m = net.n_pq
    az = np.zeros(n)
    ai = np.zeros(n)
    ap = np.zeros(n)
    bz = np.zeros(n)
    bi = np.zeros(n)
    bp = np.zeros(n)
    z = np.zeros(n, dtype=complex)
    cur = np.zeros(n, dtype=complex)
    for i in range(m):
        fa = rng.random(3)
        fa /= fa.sum()
        fb = rng.random(3)
        fb /= fb.sum()
        az[i], ai[i], ap[i] = fa
        bz[i], bi[i], bp[i] = fb
        mag = rng.uniform(0.5, 2.0)
        ang = rng.uniform(-np.pi, np.pi)
        z[i] = mag * np.exp(1j * ang)
        cur[i] = complex(rng.normal(0.0, 0.5), rng.normal(0.0, 0.5))
    ap[m:] = 0.0
    return replace(
        net,
        zip_az=az,
        zip_ai=ai,
        zip_ap=ap,
        zip_bz=bz,
        zip_bi=bi,
        zip_bp=bp,
        zip_z=z,
        zip_i=cur,
    )


def random_network(rng: np.random.Generator, n_bus: int) -> Network:
    """Synthetic connected network with random admittances, kinds and
    set-points, in internal order (PQ block, PV block, reference last)."""
    if n_bus < 2:
        raise ValueError("need at least two buses")
    m = int(rng.integers(1, n_bus))  # at least one PQ bus, exactly one REF
    kinds = np.array(
        [int(BusKind.PQ)] * m
        + [int(BusKind.PV)] * (n_bus - 1 - m)
        + [int(BusKind.REF)],
        dtype=np.int8,
    )

    edges = {(int(rng.integers(0, i)), i) for i in range(1, n_bus)}
    for _ in range(int(rng.integers(0, n_bus))):
        a, b = rng.integers(0, n_bus, 2)
        if a != b:
            edges.add((min(int(a), int(b)), max(int(a), int(b))))
    ybus = np.zeros((n_bus, n_bus), dtype=complex)
    for a, b in sorted(edges):
        ys = 1.0 / complex(rng.uniform(0.05, 0.3), rng.uniform(0.15, 0.5))
        ybus[a, a] += ys
        ybus[b, b] += ys
        ybus[a, b] -= ys
        ybus[b, a] -= ys
    for i in range(n_bus):
        ybus[i, i] += complex(rng.uniform(0.0, 0.1), rng.uniform(-0.2, 0.2))

    v_sp = np.full(n_bus, np.nan)
    v_sp[m:] = rng.uniform(0.95, 1.05, n_bus - m)
    theta = rng.uniform(-0.1, 0.1)
    ordering = BusOrdering(
        external_ids=tuple(range(1, n_bus + 1)),
        perm=tuple(range(n_bus)),
        n_pq=m,
    )
    net = Network(
        ordering=ordering,
        kinds=kinds,
        ybus=ybus,
        p_sp=rng.normal(0.0, 0.5, n_bus),
        q_sp=rng.normal(0.0, 0.3, n_bus),
        v_sp=v_sp,
        e_sp=float(v_sp[-1] * np.cos(theta)),
        f_sp=float(v_sp[-1] * np.sin(theta)),
        dp=np.zeros(n_bus),
        dq=np.zeros(n_bus),
        zip_az=np.zeros(n_bus),
        zip_ai=np.zeros(n_bus),
        zip_ap=np.zeros(n_bus),
        zip_bz=np.zeros(n_bus),
        zip_bi=np.zeros(n_bus),
        zip_bp=np.zeros(n_bus),
        zip_z=np.zeros(n_bus, dtype=complex),
        zip_i=np.zeros(n_bus, dtype=complex),
        name=f"random{n_bus}",
    )
    net = random_direction(net, rng)
    return random_zip(net, rng)


def identity_trials(
    networks,
    trials: int,
    seed: int,
    max_order: int = DEFAULT_MAX_ORDER,
    tolerance: float = IDENTITY_TOL,
    models: tuple[LoadModel, ...] = (LoadModel.CONSTANT_POWER, LoadModel.ZIP),
    randomize_parameters: bool = True,
) -> VerifyReport:
    """Compare the linear-form value row.Y(k) + lam_coef.L(k) + const
    against the raw-convolution transform for every bus, equation kind and
    order on random series coefficients.

    ``networks`` is either a single Network (trials re-randomize its
    direction and ZIP data) or a callable rng -> Network drawing a fresh
    network per trial.
    """
    rng = np.random.default_rng(seed)
    max_dev: dict[str, float] = {}
    for _ in range(trials):
        if callable(networks):
            net = networks(rng)
        elif randomize_parameters:
            net = random_zip(random_direction(networks, rng), rng)
        else:
            net = networks
        coeffs = rng.normal(0.0, 1.0, (max_order + 1, net.n_state))
        lams = rng.normal(0.0, 1.0, max_order + 1)
        for model in models:
            system = assemble_system(net, coeffs[0], model)
            for k in range(1, max_order + 1):
                linear = system.a_gy @ coeffs[k] + system.a_gl * lams[k]
                linear += rhs_at_order(net, coeffs[:k], k, model)
                for r, (i, kind) in enumerate(system.rows):
                    label = _DIRECT_KIND_OF[(kind, model, net.kind_of(i))]
                    direct = direct_transform(net, i, label, coeffs, lams, k)
                    dev = abs(direct - linear[r])
                    max_dev[label] = max(dev, max_dev.get(label, 0.0))
    passed = all(v <= tolerance for v in max_dev.values())
    return VerifyReport(
        trials=trials,
        seed=seed,
        max_order=max_order,
        tolerance=tolerance,
        passed=passed,
        max_deviation={k: max_dev[k] for k in sorted(max_dev)},
    )
