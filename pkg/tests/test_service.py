import math

import pytest
from fastapi.testclient import TestClient

from seriesflow.service import (
    JacobianCheckRequest,
    NumericalFailure,
    SolveRequest,
    TraceRequest,
    VerifyRequest,
    app,
    run_jacobian_check,
    run_solve,
    run_trace,
    run_verify,
)

client = TestClient(app)

SOLVE_KEYS = ["case", "model", "lambda", "order", "voltages", "residual_inf", "radius_estimate"]
VOLTAGE_KEYS = ["bus", "e", "f", "vm", "va"]


class TestHandlers:
    def test_solve_reaches_target(self, case_texts, sidecar_texts):
        req = SolveRequest(
            case_text=case_texts["case2"],
            sidecar_text=sidecar_texts["case2"],
            lam=0.4,
            order=30,
        )
        resp = run_solve(req)
        assert resp.lam == 0.4
        assert resp.residual_inf <= 1e-10
        assert resp.case == "case2"
        assert [v.bus for v in resp.voltages] == [1, 2]
        slack = resp.voltages[0]
        assert slack.vm == pytest.approx(1.0)
        assert slack.va == pytest.approx(0.0)

    def test_solve_zero_direction_any_lambda(self, case_texts):
        resp = run_solve(SolveRequest(case_text=case_texts["case9"], lam=7.0))
        assert resp.lam == 7.0
        assert resp.residual_inf <= 1e-10
        assert resp.radius_estimate is None  # constant in the loading

    def test_solve_beyond_nose_fails_with_partial_report(self, case_texts, sidecar_texts):
        req = SolveRequest(
            case_text=case_texts["case2"],
            sidecar_text=sidecar_texts["case2"],
            lam=50.0,
        )
        with pytest.raises(NumericalFailure) as exc:
            run_solve(req)
        assert "before target" in exc.value.reason
        partial = exc.value.report
        assert partial.lam < 50.0
        assert partial.residual_inf <= 1e-8

    def test_solve_zip_model(self, case_texts, sidecar_texts):
        req = SolveRequest(
            case_text=case_texts["case3"],
            sidecar_text=sidecar_texts["case3"],
            lam=0.3,
            model="zip",
        )
        resp = run_solve(req)
        assert resp.model == "zip"
        assert resp.residual_inf <= 1e-10

    def test_trace_response_shape(self, case_texts, sidecar_texts):
        req = TraceRequest(
            case_text=case_texts["case2"],
            sidecar_text=sidecar_texts["case2"],
            lambda_max=1.0,
        )
        resp = run_trace(req)
        assert resp.termination == "ReachedLambdaMax"
        assert resp.points[-1].lam == 1.0
        assert len(resp.points[0].e) == 2
        # declaration order: bus 1 is the slack with e = 1.0 at lambda 0
        assert resp.points[0].e[0] == pytest.approx(1.0)

    def test_trace_without_base_solution(self, sidecar_texts):
        hopeless = (
            "mpc.baseMVA = 100;\n"
            "mpc.bus = [\n1 3 0 0 0 0 1.0 0;\n2 1 5000 2000 0 0 1.0 0;\n];\n"
            "mpc.gen = [\n];\n"
            "mpc.branch = [\n1 2 0.01 0.1 0 0 0 1;\n];\n"
        )
        resp = run_trace(TraceRequest(case_text=hopeless, lambda_max=1.0))
        assert resp.termination == "BaseNotConverged"
        assert resp.points == []

    def test_verify_handler(self, case_texts):
        resp = run_verify(VerifyRequest(case_text=case_texts["case3"], trials=25, seed=11))
        assert resp.passed
        assert set(resp.max_deviation) >= {"P", "V", "E", "F"}
        assert all(v <= resp.tolerance for v in resp.max_deviation.values())

    def test_jacobian_check_handler(self, case_texts, sidecar_texts):
        for model in ("const-power", "zip"):
            resp = run_jacobian_check(
                JacobianCheckRequest(
                    case_text=case_texts["case9"],
                    sidecar_text=sidecar_texts["case9"],
                    model=model,
                    states=5,
                )
            )
            assert resp.passed
            assert resp.max_rel_error <= 1e-5


class TestHttp:
    def test_health(self):
        resp = client.get("/health")
        assert resp.status_code == 200
        assert resp.json()["status"] == "ok"

    def test_solve_endpoint_schema(self, case_texts, sidecar_texts):
        resp = client.post(
            "/solve",
            json={
                "case_text": case_texts["case2"],
                "sidecar_text": sidecar_texts["case2"],
                "lambda": 0.5,
                "order": 30,
                "model": "const-power",
            },
        )
        assert resp.status_code == 200
        body = resp.json()
        assert list(body) == SOLVE_KEYS
        assert list(body["voltages"][0]) == VOLTAGE_KEYS
        assert body["lambda"] == 0.5
        vm = body["voltages"][1]["vm"]
        va = math.radians(body["voltages"][1]["va"])
        assert body["voltages"][1]["e"] == pytest.approx(vm * math.cos(va))

    def test_solve_endpoint_parse_error(self):
        resp = client.post("/solve", json={"case_text": "mpc.bus = oops"})
        assert resp.status_code == 400

    def test_solve_endpoint_semantic_error(self):
        bad = "mpc.baseMVA = -5;\nmpc.bus = [\n1 3 0 0 0 0 1 0;\n];\nmpc.branch = [\n];\n"
        resp = client.post("/solve", json={"case_text": bad})
        assert resp.status_code == 400
        assert "baseMVA" in resp.json()["detail"]

    def test_solve_endpoint_numerical_failure(self, case_texts, sidecar_texts):
        resp = client.post(
            "/solve",
            json={
                "case_text": case_texts["case2"],
                "sidecar_text": sidecar_texts["case2"],
                "lambda": 50.0,
            },
        )
        assert resp.status_code == 422
        detail = resp.json()["detail"]
        assert "report" in detail
        assert detail["report"]["lambda"] < 50.0

    def test_solve_endpoint_validation(self, case_texts):
        resp = client.post("/solve", json={"case_text": case_texts["case2"], "order": 0})
        assert resp.status_code == 422
        resp = client.post("/solve", json={"case_text": case_texts["case2"], "model": "bogus"})
        assert resp.status_code == 422

    def test_trace_endpoint(self, case_texts, sidecar_texts):
        resp = client.post(
            "/trace",
            json={
                "case_text": case_texts["case9"],
                "sidecar_text": sidecar_texts["case9"],
                "lambda_max": 0.8,
            },
        )
        assert resp.status_code == 200
        body = resp.json()
        assert body["termination"] == "ReachedLambdaMax"
        assert body["points"][-1]["lambda"] == 0.8
        assert len(body["points"][0]["e"]) == 9

    def test_verify_endpoint(self, case_texts):
        resp = client.post(
            "/verify", json={"case_text": case_texts["case2"], "trials": 10, "seed": 3}
        )
        assert resp.status_code == 200
        assert resp.json()["passed"] is True

    def test_jacobian_endpoint(self, case_texts):
        resp = client.post(
            "/jacobian-check", json={"case_text": case_texts["case3"], "states": 3}
        )
        assert resp.status_code == 200
        body = resp.json()
        assert body["passed"] is True
        assert body["max_rel_error"] < 1e-5
