import numpy as np
import pytest

from seriesflow import (
    KindMismatchError,
    LoadModel,
    OrderOutOfRangeError,
    assemble_system,
    compile_network,
    mismatch,
    parse_case,
)
from seriesflow.dt_core import row_layout
from seriesflow.numerics import inf_norm
from seriesflow.oracle import (
    bracket_nose,
    direct_transform,
    fd_jacobian,
    flat_start,
    newton_solve,
    zip_power_coeff,
)
from seriesflow.verification import random_network, random_zip

UNLOADED = (
    "mpc.baseMVA = 100;\n"
    "mpc.bus = [\n1 3 0 0 0 0 1.0 0;\n2 1 0 0 0 0 1.0 0;\n3 1 0 0 0 0 1.0 0;\n];\n"
    "mpc.gen = [\n];\n"
    "mpc.branch = [\n1 2 0.01 0.1 0 0 0 1;\n2 3 0.02 0.2 0 0 0 1;\n];\n"
)


class TestNewton:
    def test_zero_injection_flat_start(self):
        net = compile_network(parse_case(UNLOADED))
        report = newton_solve(net, 0.0, flat_start(net))
        assert report.converged
        assert report.iterations <= 2
        assert np.allclose(report.y, flat_start(net))

    @pytest.mark.parametrize("model", list(LoadModel))
    def test_two_bus_moderate_load(self, networks, model):
        net = networks["case2"]
        report = newton_solve(net, 0.5, flat_start(net), model)
        assert report.converged
        assert report.residual_inf <= 1e-10
        assert inf_norm(mismatch(net, report.y, 0.5, model)) <= 1e-10

    def test_far_beyond_nose_reports_failure(self, networks):
        net = networks["case2"]
        report = newton_solve(net, 50.0, flat_start(net))
        assert not report.converged
        assert report.iterations <= 50

    def test_slack_entries_exact(self, networks):
        net = networks["case3"]
        y_init = flat_start(net) + 0.3  # slack entries deliberately off
        report = newton_solve(net, 0.2, y_init)
        assert report.y[-2] == net.e_sp
        assert report.y[-1] == net.f_sp

    def test_iteration_counting(self, networks):
        net = networks["case9"]
        report = newton_solve(net, 0.0, flat_start(net))
        assert report.converged
        assert 1 <= report.iterations <= 10


class TestFdJacobian:
    def test_reference_rows_exact(self, networks):
        net = networks["case3"]
        rng = np.random.default_rng(0)
        y = flat_start(net) + rng.normal(0.0, 0.1, net.n_state)
        jac = fd_jacobian(net, y, 0.1)
        # linear rows: zero differences are exact, the unit diagonal is
        # exact up to the rounding of (e_sp + h) - e_sp
        assert np.all(jac[-2, :-2] == 0.0) and jac[-2, -1] == 0.0
        assert np.all(jac[-1, :-2] == 0.0) and jac[-1, -2] == 0.0
        assert jac[-2, -2] == pytest.approx(1.0, abs=1e-9)
        assert jac[-1, -1] == pytest.approx(1.0, abs=1e-9)
        for h in (1e-4, 1e-7):
            jac_h = fd_jacobian(net, y, 0.1, h=h)
            assert jac_h[-2, -2] == pytest.approx(1.0, abs=1e-8)

    def test_magnitude_row_derivative(self, networks):
        net = networks["case9"]
        y = flat_start(net)
        i = net.n_pq  # first PV bus, e = v_sp, f = 0
        jac = fd_jacobian(net, y, 0.0)
        r = row_layout(net).index((i, __import__("seriesflow").EquationKind.V))
        row = jac[r]
        assert row[2 * i] == pytest.approx(2.0 * net.v_sp[i], rel=1e-9)
        assert row[2 * i + 1] == pytest.approx(0.0, abs=1e-9)
        others = np.delete(row, [2 * i, 2 * i + 1])
        assert np.max(np.abs(others)) <= 1e-9

    def test_richardson_step_consistency(self, networks):
        net = networks["case3"]
        rng = np.random.default_rng(1)
        y = flat_start(net) + rng.normal(0.0, 0.1, net.n_state)
        analytic = assemble_system(net, y).a_gy
        for h in (1e-5, 1e-6):
            numeric = fd_jacobian(net, y, 0.2, h=h)
            assert inf_norm(numeric - analytic) / inf_norm(analytic) <= 1e-5

    def test_step_validation(self, networks):
        with pytest.raises(ValueError):
            fd_jacobian(networks["case2"], np.zeros(4), 0.0, h=0.0)


class TestDirectTransform:
    def test_zero_series(self):
        rng = np.random.default_rng(2)
        net = random_network(rng, 4)
        coeffs = np.zeros((6, net.n_state))
        lams = np.zeros(6)
        for i, kind in row_layout(net):
            for k in (1, 3, 5):
                assert direct_transform(net, i, kind.value, coeffs, lams, k) == 0.0

    @pytest.mark.parametrize("model", list(LoadModel))
    def test_order_zero_collapses_to_mismatch(self, networks, model):
        net = networks["case9"]
        rng = np.random.default_rng(3)
        y = flat_start(net) + rng.normal(0.0, 0.2, net.n_state)
        lam = 0.37
        coeffs = y[np.newaxis, :]
        lams = np.array([lam])
        residual = mismatch(net, y, lam, model)
        for r, (i, kind) in enumerate(row_layout(net)):
            label = kind.value
            if model is LoadModel.ZIP and i < net.n_pq and label in "PQ":
                label += "zip"
            value = direct_transform(net, i, label, coeffs, lams, 0)
            assert value == pytest.approx(residual[r], abs=1e-13)

    def test_order_out_of_range(self, networks):
        net = networks["case2"]
        coeffs = np.zeros((2, net.n_state))
        lams = np.zeros(2)
        with pytest.raises(OrderOutOfRangeError):
            direct_transform(net, 0, "P", coeffs, lams, 2)

    def test_kind_validation(self, networks):
        net = networks["case3"]
        coeffs = np.zeros((2, net.n_state))
        lams = np.zeros(2)
        with pytest.raises(KindMismatchError):
            direct_transform(net, net.slack, "P", coeffs, lams, 1)
        with pytest.raises(KindMismatchError):
            direct_transform(net, 0, "V", coeffs, lams, 1)
        with pytest.raises(KindMismatchError):
            direct_transform(net, net.n_pq, "Qzip", coeffs, lams, 1)
        with pytest.raises(ValueError):
            direct_transform(net, 0, "X", coeffs, lams, 1)

    def test_zip_power_coeff_order_zero_is_injection(self, networks):
        from seriesflow import zip_injection

        net = networks["case2"]
        rng = np.random.default_rng(4)
        y = flat_start(net) + rng.normal(0.0, 0.2, net.n_state)
        p0, q0 = zip_power_coeff(net, 0, y[np.newaxis, :], 0)
        assert (p0, q0) == pytest.approx(zip_injection(net, 0, y), abs=1e-14)


class TestBracketNose:
    def test_two_bus_bracket(self, networks):
        net = networks["case2"]
        lo, hi = bracket_nose(net, lam_hi=8.0, tol=1e-5)
        assert 0.0 < lo < hi
        assert hi - lo <= 1e-5
        assert newton_solve(net, lo, flat_start(net)).converged
        # continuing from the solvable side fails just above the bracket
        y_lo = newton_solve(net, lo, flat_start(net)).y
        assert not newton_solve(net, hi + 1e-3, y_lo).converged

    def test_requires_solvable_start(self, networks):
        net = networks["case2"]
        with pytest.raises(ValueError):
            bracket_nose(net, lam_lo=100.0, lam_hi=101.0)
