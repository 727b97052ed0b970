"""HTTP service surface: endpoints, schemas and error mapping."""

import pytest
from fastapi.testclient import TestClient

from tangentcalc.service import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


class TestHealth:
    def test_health(self, client):
        resp = client.get("/health")
        assert resp.status_code == 200
        body = resp.json()
        assert body["status"] == "ok" and "version" in body


class TestEval:
    def test_text(self, client):
        resp = client.post("/eval", json={"source": "m=1; db(v1)"})
        assert resp.status_code == 200
        body = resp.json()
        assert body == {"kind": "form", "m": 1, "degree": 1, "result": "dx1"}

    def test_latex(self, client):
        resp = client.post(
            "/eval", json={"source": "m=2; xi", "format": "latex"}
        )
        assert resp.status_code == 200
        assert resp.json()["result"] == "v^{1}\\partial_{v^{1}}+v^{2}\\partial_{v^{2}}"

    def test_json_format(self, client):
        resp = client.post(
            "/eval", json={"source": "m=1; 2*dx1", "format": "json"}
        )
        body = resp.json()
        assert body["result"]["kind"] == "form"
        assert body["result"]["terms"][0]["coefficient"]["num"] == "2"

    def test_scalar_kind(self, client):
        resp = client.post("/eval", json={"source": "m=1; x1^2/2"})
        assert resp.json()["kind"] == "scalar"

    def test_dsl_error_maps_to_400_with_position(self, client):
        resp = client.post("/eval", json={"source": "m=1; x7"})
        assert resp.status_code == 400
        detail = resp.json()["detail"]
        assert detail["type"] == "IndexOutOfRange"
        assert detail["line"] == 1 and detail["column"] == 6

    def test_validation_error_is_422(self, client):
        resp = client.post("/eval", json={"format": "text"})
        assert resp.status_code == 422

    def test_unknown_format_rejected(self, client):
        resp = client.post("/eval", json={"source": "m=1; x1", "format": "pdf"})
        assert resp.status_code == 422


class TestVerify:
    def test_filtered_run(self, client):
        resp = client.post(
            "/verify",
            json={"m_values": [1, 2], "cases": 2, "filter": "db-squared-zero"},
        )
        assert resp.status_code == 200
        body = resp.json()
        assert body["ok"] is True
        assert body["report"]["summary"] == {"total": 1, "failed": 0}
        assert body["report"]["suite"][0]["id"] == "db-squared-zero"
        assert "PASS" in body["text"]

    def test_numeric_flag(self, client):
        resp = client.post(
            "/verify",
            json={
                "m_values": [1],
                "cases": 1,
                "filter": "identity-endo",
                "numeric": True,
            },
        )
        assert resp.status_code == 200
        assert resp.json()["ok"] is True


class TestTransitionCheck:
    def test_valid_quadratic(self, client):
        resp = client.post(
            "/transition-check",
            json={
                "m": 2,
                "forward": ["x1 + x2^2", "x2"],
                "inverse": ["x1 - x2^2", "x2"],
            },
        )
        assert resp.status_code == 200
        body = resp.json()
        assert body["ok"] is True
        assert body["consistent"] is True
        assert body["volume_factor_is_squared_jacobian"] is True
        assert set(body["naturality"]) == {
            "pullback",
            "vertical",
            "complete",
            "xi",
            "B",
        }
        assert all(body["naturality"].values())

    def test_bad_pair_is_400(self, client):
        resp = client.post(
            "/transition-check",
            json={"m": 1, "forward": ["x1^2"], "inverse": ["x1"]},
        )
        assert resp.status_code == 400
        assert resp.json()["detail"]["type"] == "NotInverse"

    def test_non_scalar_component_is_400(self, client):
        resp = client.post(
            "/transition-check",
            json={"m": 1, "forward": ["dx1"], "inverse": ["x1"]},
        )
        assert resp.status_code == 400
