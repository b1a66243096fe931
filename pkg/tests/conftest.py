from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from seriesflow import compile_network, parse_case, parse_sidecar

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def case_texts() -> dict[str, str]:
    return {name: (FIXTURES / f"{name}.m").read_text() for name in ("case2", "case3", "case9")}


@pytest.fixture(scope="session")
def sidecar_texts() -> dict[str, str]:
    return {
        name: (FIXTURES / f"{name}.zip.json").read_text()
        for name in ("case2", "case3", "case9")
    }


@pytest.fixture(scope="session")
def cases(case_texts):
    return {name: parse_case(text) for name, text in case_texts.items()}


@pytest.fixture(scope="session")
def networks(cases, sidecar_texts):
    """Compiled networks with their sidecar ZIP data and directions."""
    out = {}
    for name, case in cases.items():
        zip_cfg, direction = parse_sidecar(sidecar_texts[name], case)
        out[name] = compile_network(case, zip_cfg, direction)
    return out


@pytest.fixture(scope="session")
def plain_networks(cases):
    """Compiled networks with defaults: constant power, zero direction."""
    return {name: compile_network(case) for name, case in cases.items()}


def restamp_ybus(case) -> np.ndarray:
    """Independent admittance stamping used as the oracle for build_ybus:
    element-by-element complex arithmetic, no shared code."""
    import cmath

    n = len(case.buses)
    pos = {b.bus_id: i for i, b in enumerate(case.buses)}
    y = [[0j] * n for _ in range(n)]
    for br in case.branches:
        if br.status == 0:
            continue
        z = complex(br.r, br.x)
        ys = 1 / z
        shunt = 1j * br.charging_b / 2
        tau = cmath.rect(br.tap, br.shift_deg * cmath.pi / 180)
        i, j = pos[br.from_bus], pos[br.to_bus]
        y[i][i] += (ys + shunt) / (tau * tau.conjugate())
        y[i][j] += -ys / tau.conjugate()
        y[j][i] += -ys / tau
        y[j][j] += ys + shunt
    for i, bus in enumerate(case.buses):
        y[i][i] += complex(bus.gs, bus.bs)
    return np.array(y)
