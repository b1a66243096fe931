"""Identity of the per-order linear forms with the raw-convolution oracle
on random connected networks, for both load models."""

import numpy as np
import pytest

from seriesflow import LoadModel, pf_const, pf_row
from seriesflow.dt_core import row_layout
from seriesflow.oracle import direct_transform
from seriesflow.verification import identity_trials, random_network


def draw_networks(rng):
    return random_network(rng, int(rng.integers(2, 7)))


@pytest.mark.parametrize(
    "model,kinds",
    [
        (LoadModel.CONSTANT_POWER, {"P", "Q", "V", "E", "F"}),
        (LoadModel.ZIP, {"P", "Pzip", "Qzip", "V", "E", "F"}),
    ],
)
def test_identity_trials_random_networks(model, kinds):
    report = identity_trials(draw_networks, trials=200, seed=1234, models=(model,))
    assert report.passed
    assert set(report.max_deviation) <= kinds
    assert report.worst() <= 1e-12


@pytest.mark.parametrize("seed", range(8))
@pytest.mark.parametrize("model", list(LoadModel))
def test_per_operation_linear_forms(seed, model):
    """Same identity via the per-row operations (row/constant builders)
    rather than the stacked assembly."""
    rng = np.random.default_rng(9000 + seed)
    net = random_network(rng, int(rng.integers(2, 7)))
    k_max = 8
    coeffs = rng.normal(size=(k_max + 1, net.n_state))
    lams = rng.normal(size=k_max + 1)
    for i, kind in row_layout(net):
        row, lam_coef = pf_row(net, i, kind, coeffs[0], model)
        for k in range(1, k_max + 1):
            const = pf_const(net, i, kind, coeffs[:k], k, model)
            linear = row @ coeffs[k] + lam_coef * lams[k] + const
            label = kind.value
            if model is LoadModel.ZIP and i < net.n_pq and label in ("P", "Q"):
                label += "zip"
            direct = direct_transform(net, i, label, coeffs, lams, k)
            assert abs(direct - linear) <= 1e-12


def test_identity_holds_on_fixture_networks(networks):
    for net in networks.values():
        report = identity_trials(net, trials=20, seed=5, max_order=6)
        assert report.passed


def test_report_lists_deviation_per_kind():
    report = identity_trials(draw_networks, trials=10, seed=2)
    assert {"E", "F"} <= set(report.max_deviation)
    assert report.max_deviation["E"] == 0.0
    assert report.max_deviation["F"] == 0.0
