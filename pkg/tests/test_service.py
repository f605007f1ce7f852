"""Service endpoints: request validation, payload shapes, determinism."""

import json

import pytest
from fastapi.testclient import TestClient

from semiqnet.service import app

client = TestClient(app)


def _network_doc(fig) -> dict:
    return fig.to_document()


@pytest.fixture()
def fig2_doc(fig2):
    return _network_doc(fig2)


@pytest.fixture()
def fig5_doc(fig5):
    return _network_doc(fig5)


class TestHealth:
    def test_health(self):
        body = client.get("/health").json()
        assert body["status"] == "ok"


class TestValidateEndpoint:
    def test_valid_network(self, fig2_doc):
        resp = client.post("/validate", json={"network": fig2_doc})
        assert resp.status_code == 200
        body = resp.json()
        assert body["ok"] and body["violations"] == []
        assert body["participant_dimensions"] == {"alice": 4, "bob1": 4, "bob2": 2}

    def test_invalid_network_reports_violations(self, fig2_doc):
        doc = json.loads(json.dumps(fig2_doc))
        doc["layers"][0]["members"] = ["alice"]
        body = client.post("/validate", json={"network": doc}).json()
        assert not body["ok"]
        assert any("fewer than two" in v for v in body["violations"])


class TestSynthEndpoint:
    def test_lsqkd_amplitudes(self, fig2_doc):
        resp = client.post("/synth", json={"network": fig2_doc, "protocol": "lsqkd"})
        assert resp.status_code == 200
        body = resp.json()
        assert body["dims"] == [4, 4, 2]
        assert body["schmidt"] == [4, 4, 2]
        assert any("|2,2,0>" in line for line in body["amplitudes"])

    def test_bad_network_is_400(self, fig2_doc):
        doc = json.loads(json.dumps(fig2_doc))
        doc["layers"] = []
        resp = client.post("/synth", json={"network": doc, "protocol": "lsqkd"})
        assert resp.status_code == 400

    def test_unknown_protocol_is_400(self, fig2_doc):
        resp = client.post("/synth", json={"network": fig2_doc, "protocol": "teleport"})
        assert resp.status_code == 400


class TestRunEndpoint:
    def test_honest_run_passes(self, fig2_doc):
        payload = {"protocol": "lsqkd", "network": fig2_doc, "rounds": 2000, "seed": 3}
        resp = client.post("/run", json=payload)
        assert resp.status_code == 200
        body = resp.json()
        assert body["verdict"] == "pass" and body["exit_hint"] == 0
        assert "[keys]" in body["report"] and "entropy_bits=" in body["report"]

    def test_attacked_run_fails(self, fig2_doc):
        payload = {
            "protocol": "lsqkd",
            "network": fig2_doc,
            "rounds": 2000,
            "seed": 3,
            "attack": "intercept:bob1",
        }
        body = client.post("/run", json=payload).json()
        assert body["verdict"] == "fail" and body["exit_hint"] == 2
        assert "withheld=true" in body["report"]
        assert "source=exact" in body["report"]

    def test_reports_are_deterministic(self, fig5_doc):
        payload = {
            "protocol": "lsqss",
            "network": fig5_doc,
            "rounds": 600,
            "seed": 12,
            "analyses": ["detection", "rates", "confidentiality"],
        }
        first = client.post("/run", json=payload).json()
        second = client.post("/run", json=payload).json()
        assert first["report"] == second["report"]

    def test_confidentiality_section(self, fig2_doc):
        payload = {
            "protocol": "lsqkd",
            "network": fig2_doc,
            "rounds": 400,
            "seed": 5,
            "analyses": ["confidentiality"],
        }
        report = client.post("/run", json=payload).json()["report"]
        row = next(line for line in report.splitlines() if "outsiders=bob2" in line)
        mi = float(dict(tok.split("=") for tok in row.split())["mi_bits"])
        assert abs(mi) <= 1e-12

    def test_sqkd07_runs_without_network(self):
        payload = {"protocol": "sqkd07", "rounds": 2000, "seed": 9}
        body = client.post("/run", json=payload).json()
        assert body["verdict"] == "pass"
        assert "reflect_error_x" in body["report"]

    def test_sqkd07_interception_detected(self):
        payload = {"protocol": "sqkd07", "rounds": 2000, "seed": 9, "attack": "intercept:bob"}
        body = client.post("/run", json=payload).json()
        assert body["verdict"] == "fail" and body["exit_hint"] == 2

    def test_network_required_for_multiparty(self):
        resp = client.post("/run", json={"protocol": "lsqkd", "rounds": 10, "seed": 1})
        assert resp.status_code == 400

    def test_bad_attack_is_400(self, fig2_doc):
        payload = {
            "protocol": "lsqkd",
            "network": fig2_doc,
            "rounds": 10,
            "seed": 1,
            "attack": "intercept:nobody",
        }
        assert client.post("/run", json=payload).status_code == 400


class TestCurveEndpoint:
    def test_curve_csv(self, fig2_doc):
        payload = {
            "protocol": "lsqkd",
            "network": fig2_doc,
            "targets": ["bob2"],
            "legs": "f",
            "grid": [0.0, 0.7853981633974483, 1.5707963267948966],
            "layer": 2,
        }
        resp = client.post("/curve", json=payload)
        assert resp.status_code == 200
        csv_text = resp.json()["csv"]
        lines = csv_text.strip().splitlines()
        assert lines[0] == "parameter,detection_exact,detection_sampled,se,eve_accuracy"
        assert len(lines) == 4
        first = lines[1].split(",")
        assert float(first[1]) == pytest.approx(0.0, abs=1e-12)
        assert float(first[4]) == pytest.approx(0.5, abs=1e-9)

    def test_empty_grid_is_400(self, fig2_doc):
        payload = {
            "protocol": "lsqkd",
            "network": fig2_doc,
            "targets": ["bob2"],
            "grid": [],
        }
        assert client.post("/curve", json=payload).status_code == 400
