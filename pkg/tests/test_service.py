import pytest
from fastapi.testclient import TestClient

from rtpl.service import create_app


@pytest.fixture
def client(tmp_path):
    return TestClient(create_app(trace_dir=str(tmp_path / "traces")))


def create(client, program):
    r = client.post("/sessions", json={"program": program})
    assert r.status_code == 201
    return r.json()["session_id"]


def test_create_and_initial_transitions(client):
    sid = create(client, "a.0")
    tr = client.get(f"/sessions/{sid}/transitions").json()
    assert {e["act"] for e in tr["fwd"]} == {"a", "s"}
    assert tr["bk"] == []


def test_bad_program_is_400(client):
    assert client.post("/sessions", json={"program": "a.0 +"}).status_code == 400


def test_unknown_session_is_404(client):
    assert client.get("/sessions/nope").status_code == 404
    assert client.delete("/sessions/nope").status_code == 404


def test_step_and_loop_roundtrip(client):
    sid = create(client, "a.0")
    before = client.get(f"/sessions/{sid}").json()["state"]
    fwd = client.get(f"/sessions/{sid}/transitions").json()["fwd"]
    take = next(e for e in fwd if e["act"] == "a")
    r = client.post(f"/sessions/{sid}/step",
                    json={"dir": "fwd", "act": "a", "key": take["key"]})
    assert r.status_code == 200
    assert r.json()["state"] == take["target"]
    r = client.post(f"/sessions/{sid}/step",
                    json={"dir": "bk", "act": "a", "key": take["key"]})
    assert r.json()["state"] == before


def test_step_rejects_disabled_transition(client):
    sid = create(client, "a.0")
    r = client.post(f"/sessions/{sid}/step",
                    json={"dir": "bk", "act": "a", "key": 0})
    assert r.status_code == 409
    r = client.post(f"/sessions/{sid}/step",
                    json={"dir": "sideways", "act": "a", "key": 0})
    assert r.status_code == 400


def test_timeout_priority_single_tau_entry(client):
    sid = create(client, "[(a.0 | 'a.0)](b.0)")
    tr = client.get(f"/sessions/{sid}/transitions").json()
    taus = [e for e in tr["fwd"] if e["act"] == "tau"]
    sigmas = [e for e in tr["fwd"] if e["act"] == "s"]
    assert len(taus) == 1 and not sigmas


def test_independence_matrix_is_symmetric_and_diagonal_false(client):
    sid = create(client, "a.0 | b.0")
    tr = client.get(f"/sessions/{sid}/transitions").json()
    m = tr["independence"]
    n = len(tr["fwd"]) + len(tr["bk"])
    assert len(m) == n
    for i in range(n):
        assert m[i][i] is False
        for j in range(n):
            assert m[i][j] == m[j][i]
    # the two lone prefixes commute
    fwd = tr["fwd"]
    ia = next(i for i, e in enumerate(fwd) if e["act"] == "a")
    ib = next(i for i, e in enumerate(fwd) if e["act"] == "b")
    assert m[ia][ib] is True


def test_key_order_and_history_payload(client):
    sid = create(client, "a.0 + s.0")
    for (d, a) in (("fwd", "a"), ("fwd", "s")):
        tr = client.get(f"/sessions/{sid}/transitions").json()
        e = next(x for x in tr["fwd"] if x["act"] == a)
        client.post(f"/sessions/{sid}/step",
                    json={"dir": d, "act": a, "key": e["key"]})
    data = client.get(f"/sessions/{sid}").json()
    assert data["state"] == "a[0].s_[1].0 + s[1].0"
    assert data["key_order"]["lt"] == [[0, 1]]
    assert data["key_order"]["kinds"] == {"0": "comm", "1": "time"}
    assert [s["act"] for s in data["history"]["steps"]] == ["a", "s"]
    assert data["ast"]["node"] == "sum"


def test_history_replay_after_reversal_is_identical(client):
    sid = create(client, "a.0 + s.0")
    initial = client.get(f"/sessions/{sid}").json()["state"]
    taken = []
    for a in ("a", "s"):
        tr = client.get(f"/sessions/{sid}/transitions").json()
        e = next(x for x in tr["fwd"] if x["act"] == a)
        taken.append(e)
        client.post(f"/sessions/{sid}/step",
                    json={"dir": "fwd", "act": a, "key": e["key"]})
    for e in reversed(taken):
        client.post(f"/sessions/{sid}/step",
                    json={"dir": "bk", "act": e["act"], "key": e["key"]})
    assert client.get(f"/sessions/{sid}").json()["state"] == initial


def test_normalize_endpoint(client):
    sid = create(client, "a.0")
    tr = client.get(f"/sessions/{sid}/transitions").json()["fwd"]
    e = next(x for x in tr if x["act"] == "a")
    client.post(f"/sessions/{sid}/step",
                json={"dir": "fwd", "act": "a", "key": e["key"]})
    client.post(f"/sessions/{sid}/step",
                json={"dir": "bk", "act": "a", "key": e["key"]})
    out = client.post(f"/sessions/{sid}/normalize").json()
    assert out["length"] == 0
    assert out["parabolic"]["steps"] == []


def test_save_writes_trace(client, tmp_path):
    sid = create(client, "a.0")
    out = client.post(f"/sessions/{sid}/save", json={}).json()
    assert out["path"].endswith(f"{sid}.json")


def test_delete(client):
    sid = create(client, "a.0")
    assert client.delete(f"/sessions/{sid}").status_code == 204
    assert client.get(f"/sessions/{sid}").status_code == 404
