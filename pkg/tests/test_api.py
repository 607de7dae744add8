"""HTTP surface: parity with the library, error contracts."""

import pytest
from fastapi.testclient import TestClient

import effectmix as em
from effectmix.api import create_app

from test_elicitation import make_context


@pytest.fixture
def client(tmp_path):
    app = create_app(str(tmp_path / "sessions"))
    with TestClient(app, raise_server_exceptions=False) as c:
        yield c


CONTEXT = {
    "population": "adults recruited through clinics",
    "sample_size_estimate": 200,
    "treatment": "daily supplement",
    "control": "placebo",
    "outcome_measure": "one-year survival",
    "analysis_plan": "difference in proportions",
    "effect_units": "probability difference",
}


def must_payload(resp, status=200):
    assert resp.status_code == status, resp.text
    doc = resp.json()
    assert doc["schema_version"] == 1
    assert "payload" in doc and "error" not in doc
    return doc["payload"]


def must_error(resp, status):
    assert resp.status_code == status, resp.text
    doc = resp.json()
    assert "error" in doc and "payload" not in doc
    return doc["error"]


def advance(client, sid, stage, payload):
    return client.post(f"/v1/sessions/{sid}/advance",
                       json={"stage": stage, "payload": payload})


def test_full_session_walk_matches_library(client):
    created = must_payload(client.post("/v1/sessions", json={}))
    sid = created["session"]["id"]
    assert created["session"]["stage"] == "context"

    must_payload(advance(client, sid, "context", CONTEXT))
    must_payload(advance(client, sid, "ate_pre", 0.5))
    must_payload(advance(client, sid, "extremes", {
        "largest": {"kind": "largest", "effect": 1.0, "description": "top"},
        "smallest": {"kind": "smallest", "effect": 0.0, "description": "bottom"},
    }))
    must_payload(advance(client, sid, "allocation",
                         {"type": "midpoint_split", "share_lower": 0.5,
                          "share_upper": 0.5}))
    state = must_payload(advance(client, sid, "null_share", 0.5))
    assert state["session"]["stage"] == "derived"

    fetched = must_payload(client.get(f"/v1/sessions/{sid}"))
    assert fetched["session"]["ate_post"] == pytest.approx(0.25, abs=1e-12)

    # parity with a direct library walk on the same payloads
    s = em.new_session()
    s = em.advance(s, make_context())
    s = em.advance(s, 0.5)
    s = em.advance(s, (em.ExtremeJudgment("largest", 1.0, "top"),
                       em.ExtremeJudgment("smallest", 0.0, "bottom")))
    s = em.advance(s, em.MidpointSplit(0.5, 0.5))
    s = em.advance(s, 0.5)
    assert fetched["session"]["ate_post"] == s.ate_post


def test_create_with_context(client):
    created = must_payload(client.post("/v1/sessions", json={"context": CONTEXT}))
    assert created["session"]["stage"] == "ate_pre"


def test_get_unknown_session_404(client):
    must_error(client.get("/v1/sessions/zzz"), 404)
    must_error(advance(client, "zzz", "context", CONTEXT), 404)


def test_wrong_stage_claim_409(client):
    created = must_payload(client.post("/v1/sessions", json={"context": CONTEXT}))
    sid = created["session"]["id"]
    err = must_error(advance(client, sid, "allocation",
                             {"type": "midpoint_split", "share_lower": 0.5,
                              "share_upper": 0.5}), 409)
    assert err["expected_stage"] == "ate_pre"
    assert err["retryable"] is True


def test_wrong_payload_shape_422_names_stage(client):
    created = must_payload(client.post("/v1/sessions", json={"context": CONTEXT}))
    sid = created["session"]["id"]
    err = must_error(advance(client, sid, None, {"bogus": True}), 422)
    assert err["expected_stage"] == "ate_pre"


def test_stale_revision_409(client):
    created = must_payload(client.post("/v1/sessions", json={}))
    sid = created["session"]["id"]
    body = {"stage": "context", "payload": CONTEXT, "revision": created["revision"]}
    must_payload(client.post(f"/v1/sessions/{sid}/advance", json=body))
    # replaying the same revision after the state moved loses the race
    body = {"stage": "ate_pre", "payload": 0.5, "revision": created["revision"]}
    err = must_error(client.post(f"/v1/sessions/{sid}/advance", json=body), 409)
    assert err["retryable"] is True


def test_diagnostics_fixed_parity(client):
    payload = must_payload(client.post(
        "/v1/diagnostics", json={"effect": 0.25, "se": 0.0891}))
    lib = em.diagnostics_fixed(0.25, 0.0891).to_json()
    assert payload == lib
    assert payload["power"] >= 0.80


def test_diagnostics_from_design(client):
    payload = must_payload(client.post("/v1/diagnostics", json={
        "effect": 0.25,
        "design": {"n_treat": 63, "n_control": 63,
                   "outcome": {"kind": "binary", "conservative": True}},
    }))
    assert payload["se"] == pytest.approx(0.0891, abs=5e-4)
    assert payload["power"] >= 0.80


def test_diagnostics_mixture_replay_identical(client):
    body = {
        "distribution": em.with_null_mass(em.Normal(0.1, 0.1), 0.5).to_json(),
        "se": 0.04, "draws": 10**5, "seed": 12,
    }
    first = must_payload(client.post("/v1/diagnostics", json=body))
    second = must_payload(client.post("/v1/diagnostics", json=body))
    assert first == second
    assert first["inputs"]["seed"] == 12
    lib = em.diagnostics_mixture(em.with_null_mass(em.Normal(0.1, 0.1), 0.5),
                                 0.04, draws=10**5, seed=12).to_json()
    assert first == lib


def test_diagnostics_malformed_distribution_422(client):
    bad = {"distribution": {"schema_version": 1, "components": [
        {"weight": 0.5, "kind": "point_mass", "value": 0.0},
        {"weight": 0.3, "kind": "point_mass", "value": 1.0},
    ]}, "se": 0.1}
    must_error(client.post("/v1/diagnostics", json=bad), 422)


def test_ate_endpoint_types(client):
    payload = must_payload(client.post("/v1/ate", json={"types": [0.30, 0.65, 0.0, 0.05]}))
    assert payload["ate"] == pytest.approx(0.65, abs=1e-12)
    assert payload["treat_rate"] == pytest.approx(0.95)
    assert payload["control_rate"] == pytest.approx(0.30)


def test_ate_endpoint_range(client):
    payload = must_payload(client.post("/v1/ate", json={"range": [0.0, 0.2],
                                                        "p_null": 0.5}))
    assert payload["ate"] == pytest.approx(0.05, abs=1e-12)


def test_scenarios_list_and_run(client):
    names = must_payload(client.get("/v1/scenarios"))["scenarios"]
    assert names == sorted(names)
    for name in names[:3]:
        payload = must_payload(client.post(f"/v1/scenarios/{name}/run"))
        assert payload["passed"] is True
        assert payload == em.run_scenario(name).to_json()
    must_error(client.post("/v1/scenarios/nope/run"), 404)


def test_randomized_parity_corpus(client):
    import numpy as np

    rng = np.random.default_rng(2718)
    for _ in range(200):
        effect = float(rng.uniform(-1, 1))
        se = float(rng.uniform(0.01, 1.0))
        alpha = float(rng.uniform(0.005, 0.2))
        payload = must_payload(client.post(
            "/v1/diagnostics", json={"effect": effect, "se": se, "alpha": alpha}))
        assert payload == em.diagnostics_fixed(effect, se, alpha).to_json()
