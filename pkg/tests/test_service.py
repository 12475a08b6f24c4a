import threading

import pytest
from fastapi.testclient import TestClient

from trustbench.calibration import CalibrationPair, ProfileStore, fit_profile
from trustbench.config import Config, PathsConfig, ServerConfig
from trustbench.logstore import DecisionLog
from trustbench.model import Decision, ResolvedBy
from trustbench.service import TrustEngine, create_app

from conftest import AS_OF, PLUGINS_DIR

TOKEN = "test-token"


def make_config(tmp_path) -> Config:
    cfg = Config()
    cfg.server = ServerConfig(token=TOKEN)
    cfg.paths = PathsConfig(
        plugins_dir=str(PLUGINS_DIR),
        profiles_dir=str(tmp_path / "profiles"),
        decision_log=str(tmp_path / "decisions.jsonl"),
    )
    return cfg


def seed_profile(tmp_path, agent_id="agent", domain_id="healthcare"):
    pairs = [CalibrationPair(i / 20, i / 20) for i in range(21)]
    profile = fit_profile({"correctness": pairs}, agent_id=agent_id, domain_id=domain_id)
    ProfileStore(tmp_path / "profiles").save(profile)


@pytest.fixture()
def engine(tmp_path):
    seed_profile(tmp_path)
    eng = TrustEngine(make_config(tmp_path))
    yield eng
    eng.close()


@pytest.fixture()
def client(engine):
    return TestClient(create_app(engine))


def request_body(request_id="req-1", confidence=0.85, citations=None, **overrides):
    body = {
        "request_id": request_id,
        "agent_id": "agent",
        "domain_id": "healthcare",
        "task_context": "q",
        "proposed_action": "Take ibuprofen as directed.",
        "action_kind": "answer",
        "stated_confidence": confidence,
        "citations": citations
        if citations is not None
        else [
            {
                "source": "https://pubmed.ncbi.nlm.nih.gov/1/",
                "published_at": "2026-07-01T00:00:00Z",
            }
        ],
        "created_at": "2026-08-01T00:00:00Z",
    }
    body.update(overrides)
    return body


def confirm_body(request_id="req-c"):
    # moderate trust: prior 0.2, citation 1.0 undated -> timeliness 0.5,
    # composite 0.3*0.2 + 0.7*(2.5/3) = 0.643 -> confirm under healthcare
    return request_body(
        request_id=request_id,
        confidence=0.2,
        citations=[{"source": "https://pubmed.ncbi.nlm.nih.gov/1/"}],
    )


def test_high_trust_200_proceed(client):
    resp = client.post("/v1/verify", json=request_body())
    assert resp.status_code == 200
    assert resp.json()["trust_score"]["decision"] == "proceed"


def test_hard_violation_403_block(client):
    resp = client.post("/v1/verify", json=request_body(citations=[]))
    assert resp.status_code == 403
    body = resp.json()["trust_score"]
    assert body["decision"] == "block"
    assert body["vector"]["violations"]


def test_mid_trust_202_pending(client):
    resp = client.post("/v1/verify", json=confirm_body())
    assert resp.status_code == 202
    assert resp.json()["pending_id"] == "req-c"
    pending = client.get("/v1/pending").json()["pending"]
    assert [p["request_id"] for p in pending] == ["req-c"]


def test_schema_error_400(client):
    resp = client.post("/v1/verify", json={"request_id": "x"})
    assert resp.status_code == 400


def test_range_error_400(client):
    resp = client.post("/v1/verify", json=request_body(stated_confidence=1.7))
    assert resp.status_code == 400


def test_unknown_domain_422(client):
    resp = client.post("/v1/verify", json=request_body(domain_id="astrology"))
    assert resp.status_code == 422


def auth():
    return {"Authorization": f"Bearer {TOKEN}"}


def test_resolve_approve_writes_log_entry(client):
    client.post("/v1/verify", json=confirm_body("req-a"))
    resp = client.post(
        "/v1/pending/req-a/resolve",
        json={"resolution": "approve", "resolver": "alice"},
        headers=auth(),
    )
    assert resp.status_code == 200
    assert resp.json()["entry"]["resolved_by"] == "human_approve"
    decisions = client.get("/v1/decisions").json()["decisions"]
    assert decisions[0]["request_id"] == "req-a"


def test_second_resolve_409(client):
    client.post("/v1/verify", json=confirm_body("req-b"))
    client.post("/v1/pending/req-b/resolve", json={"resolution": "deny"}, headers=auth())
    resp = client.post(
        "/v1/pending/req-b/resolve", json={"resolution": "approve"}, headers=auth()
    )
    assert resp.status_code == 409


def test_resolve_unknown_404(client):
    resp = client.post(
        "/v1/pending/ghost/resolve", json={"resolution": "approve"}, headers=auth()
    )
    assert resp.status_code == 404


def test_resolve_requires_token(client):
    client.post("/v1/verify", json=confirm_body("req-t"))
    resp = client.post("/v1/pending/req-t/resolve", json={"resolution": "approve"})
    assert resp.status_code == 401


def test_profiles_endpoints(client):
    listing = client.get("/v1/profiles").json()["profiles"]
    assert {"agent_id": "agent", "domain_id": "healthcare"} in listing
    profile = client.get("/v1/profiles/agent/healthcare").json()
    assert profile["curves"]["correctness"]["breakpoints"]
    assert client.get("/v1/profiles/nobody/healthcare").status_code == 404


def test_decisions_since_filter(client):
    client.post("/v1/verify", json=request_body("req-d"))
    all_entries = client.get("/v1/decisions").json()["decisions"]
    assert all_entries
    none = client.get("/v1/decisions", params={"since": "2099-01-01T00:00:00Z"}).json()
    assert none["decisions"] == []


def test_plugins_endpoint(client):
    names = {p["plugin_id"] for p in client.get("/v1/plugins").json()["plugins"]}
    assert names == {"healthcare", "finance", "general"}


# logstore semantics ---------------------------------------------------------

def test_pending_ttl_expires_to_timeout_deny(tmp_path, engine):
    score = engine.verify_request(confirm_body("req-ttl"))
    assert score.decision is Decision.CONFIRM
    from datetime import timedelta

    from trustbench.model import utcnow

    future = utcnow() + timedelta(hours=1)
    engine.log.expire_due(now=future)
    entries = engine.log.entries()
    assert entries[0].resolved_by is ResolvedBy.TIMEOUT_DENY
    assert engine.log.pending_items(now=future) == []


def test_crash_restart_replays_queue_and_log(tmp_path):
    seed_profile(tmp_path)
    cfg = make_config(tmp_path)
    eng = TrustEngine(cfg)
    eng.verify_request(request_body("auto-1"))
    eng.verify_request(confirm_body("conf-1"))
    eng.verify_request(confirm_body("conf-2"))
    eng.log.resolve_pending("conf-1", approve=True)
    eng.close()

    # simulate restart: a fresh engine over the same files
    eng2 = TrustEngine(cfg)
    try:
        pending = eng2.log.pending_items()
        assert [p.request_id for p in pending] == ["conf-2"]
        ids = {(e.request_id, e.resolved_by) for e in eng2.log.entries()}
        assert ("auto-1", ResolvedBy.AUTOMATIC) in ids
        assert ("conf-1", ResolvedBy.HUMAN_APPROVE) in ids
        assert eng2.log.verify_integrity() == 2
    finally:
        eng2.close()


def test_concurrent_resolution_one_shot(client):
    client.post("/v1/verify", json=confirm_body("req-race"))
    statuses = []
    lock = threading.Lock()

    def worker():
        resp = client.post(
            "/v1/pending/req-race/resolve",
            json={"resolution": "approve"},
            headers=auth(),
        )
        with lock:
            statuses.append(resp.status_code)

    threads = [threading.Thread(target=worker) for _ in range(16)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert statuses.count(200) == 1
    assert statuses.count(409) == 15
