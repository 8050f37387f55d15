"""HTTP API: session workflow, verification enforcement, history durability."""

import pytest
from fastapi.testclient import TestClient

from whysched.catalog import save_catalog
from whysched.llm_gateway import GatewayConfig
from whysched.resources import sample_catalog_path
from whysched.service import ServiceConfig, create_app

from util import loose_requirements, make_course
from whysched.catalog import build_catalog


@pytest.fixture(scope="module")
def app_env(tmp_path_factory):
    data_dir = tmp_path_factory.mktemp("service-data")
    config = ServiceConfig(catalog_path=sample_catalog_path(), data_dir=data_dir,
                           llm=GatewayConfig(mode="disabled"))
    app = create_app(config)
    with TestClient(app) as client:
        yield client, config


@pytest.fixture(scope="module")
def session_id(app_env):
    client, _ = app_env
    resp = client.post("/api/session")
    assert resp.status_code == 200
    return resp.json()["session_id"]


def make_session(client):
    resp = client.post("/api/session")
    assert resp.status_code == 200
    return resp.json()


class TestSessionLifecycle:
    def test_create_returns_eight_semester_schedule(self, app_env):
        client, _ = app_env
        body = make_session(client)
        assert "session_id" in body
        semesters = body["schedule"]["semesters"]
        assert len(semesters) == 8
        for column in semesters:
            credits = sum(c["credits"] for c in column)
            assert 9 <= credits <= 15

    def test_malformed_body_400(self, app_env):
        client, _ = app_env
        resp = client.post("/api/session", content=b"{ not json",
                           headers={"Content-Type": "application/json"})
        assert resp.status_code == 400

    def test_infeasible_catalog_reported(self, tmp_path):
        courses = []
        for i in range(10):
            prereqs = [f"CRS A{i-1:02d}"] if i else []
            courses.append(make_course(f"CRS A{i:02d}", prereqs=prereqs))
        reqs = loose_requirements(num_semesters=8,
                                  required_courses=frozenset({"CRS A09"}))
        catalog = build_catalog(courses, reqs)
        path = tmp_path / "infeasible.json"
        save_catalog(catalog, path)
        app = create_app(ServiceConfig(catalog_path=path,
                                       data_dir=tmp_path / "data"))
        with TestClient(app) as client:
            resp = client.post("/api/session")
            assert resp.status_code == 200
            assert resp.json()["status"] == "infeasible"

    def test_next_schedule_differs(self, app_env):
        client, _ = app_env
        body = make_session(client)
        sid = body["session_id"]
        first = body["schedule"]
        resp = client.post(f"/api/session/{sid}/schedules/next")
        assert resp.status_code == 200
        second = resp.json()["schedule"]
        assert second != first

    def test_next_schedule_unknown_session_404(self, app_env):
        client, _ = app_env
        assert client.post("/api/session/nope/schedules/next").status_code == 404

    def test_exhausted_on_forced_catalog(self, tmp_path):
        catalog = build_catalog(
            [make_course("AAA A01")],
            loose_requirements(num_semesters=1, total_credit_min=3,
                               required_courses=frozenset({"AAA A01"})))
        path = tmp_path / "forced.json"
        save_catalog(catalog, path)
        app = create_app(ServiceConfig(catalog_path=path,
                                       data_dir=tmp_path / "data"))
        with TestClient(app) as client:
            sid = make_session(client)["session_id"]
            resp = client.post(f"/api/session/{sid}/schedules/next")
            assert resp.json() == {"status": "exhausted"}


class TestQueryWorkflow:
    def test_instead_of_query_parses(self, app_env, session_id):
        client, _ = app_env
        resp = client.post(f"/api/session/{session_id}/query",
                           json={"text": "Why not LAP D94 instead of UUE T98?"})
        assert resp.status_code == 200
        body = resp.json()
        assert "LAP D94" in body["restatement"] and "UUE T98" in body["restatement"]
        assert len(body["parsed"]["items"]) == 2
        assert body["query_token"]

    def test_unknown_course_422(self, app_env, session_id):
        client, _ = app_env
        resp = client.post(f"/api/session/{session_id}/query",
                           json={"text": "Why not BASKET WEAVING?"})
        assert resp.status_code == 422
        assert resp.json()["error"] == "unknown_course"

    def test_ambiguous_course_422_with_candidates(self, app_env, session_id):
        client, _ = app_env
        resp = client.post(f"/api/session/{session_id}/query",
                           json={"text": "Why not R89?"})
        assert resp.status_code == 422
        body = resp.json()
        assert body["error"] == "ambiguous_course"
        codes = [c["code"] for c in body["candidates"]]
        assert "XOX R89" in codes and "WJW R89" in codes

    def test_confirmed_prerequisite_query_explains(self, app_env):
        client, _ = app_env
        sid = make_session(client)["session_id"]
        resp = client.post(f"/api/session/{sid}/query",
                           json={"text": "Why not WJW R89 in semester 1?"})
        assert resp.status_code == 200
        token = resp.json()["query_token"]
        resp = client.post(f"/api/session/{sid}/query/{token}/confirm",
                           json={"confirmed": True})
        assert resp.status_code == 200
        body = resp.json()
        assert body["kind"] == "explanation"
        assert body["text"]
        assert body["constraint_ids"]
        assert body["minimal"] is True

    def test_confirmed_feasible_query_returns_alternative(self, app_env):
        client, _ = app_env
        sid = make_session(client)["session_id"]
        # Asking for an unscheduled elective: the sample catalog leaves spares.
        resp = client.post(f"/api/session/{sid}/query",
                           json={"text": "Why not YHL D81?"})
        assert resp.status_code == 200
        token = resp.json()["query_token"]
        resp = client.post(f"/api/session/{sid}/query/{token}/confirm",
                           json={"confirmed": True})
        assert resp.status_code == 200
        body = resp.json()
        assert body["kind"] == "alternative_schedule"
        placed = [c["code"] for col in body["schedule"]["semesters"] for c in col]
        assert "YHL D81" in placed
        # The alternative can be adopted as the session's schedule.
        resp = client.post(f"/api/session/{sid}/alternative/adopt")
        assert resp.status_code == 200
        adopted = [c["code"] for col in resp.json()["schedule"]["semesters"]
                   for c in col]
        assert "YHL D81" in adopted

    def test_rejected_restatement_discards_token(self, app_env):
        client, _ = app_env
        sid = make_session(client)["session_id"]
        resp = client.post(f"/api/session/{sid}/query",
                           json={"text": "Why not WJW R89 in semester 1?"})
        token = resp.json()["query_token"]
        resp = client.post(f"/api/session/{sid}/query/{token}/confirm",
                           json={"confirmed": False})
        assert resp.json() == {"status": "discarded"}
        # The token is gone: confirmation can no longer reach the explainer.
        resp = client.post(f"/api/session/{sid}/query/{token}/confirm",
                           json={"confirmed": True})
        assert resp.status_code == 404

    def test_token_single_use(self, app_env):
        client, _ = app_env
        sid = make_session(client)["session_id"]
        resp = client.post(f"/api/session/{sid}/query",
                           json={"text": "Why not WJW R89 in semester 1?"})
        token = resp.json()["query_token"]
        first = client.post(f"/api/session/{sid}/query/{token}/confirm",
                            json={"confirmed": True})
        assert first.status_code == 200
        second = client.post(f"/api/session/{sid}/query/{token}/confirm",
                             json={"confirmed": True})
        assert second.status_code == 404

    def test_explanation_unreachable_without_token(self, app_env):
        client, _ = app_env
        sid = make_session(client)["session_id"]
        resp = client.post(f"/api/session/{sid}/query/forged-token/confirm",
                           json={"confirmed": True})
        assert resp.status_code == 404
        history = client.get(f"/api/session/{sid}/history").json()["events"]
        assert not any(e["kind"] == "explanation_returned" for e in history)


class TestConcurrency:
    def test_concurrent_confirms_serialize_per_session(self, app_env):
        import threading

        client, _ = app_env
        sid = make_session(client)["session_id"]
        tokens = []
        for text in ["Why not WJW R89 in semester 1?",
                     "Why not ESM W24 in semester 1?"]:
            resp = client.post(f"/api/session/{sid}/query", json={"text": text})
            tokens.append(resp.json()["query_token"])
        results = {}

        def confirm(token):
            resp = client.post(f"/api/session/{sid}/query/{token}/confirm",
                               json={"confirmed": True})
            results[token] = resp

        threads = [threading.Thread(target=confirm, args=(t,)) for t in tokens]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        for token in tokens:
            assert results[token].status_code == 200
            assert results[token].json()["kind"] == "explanation"

    def test_cross_session_requests_in_parallel(self, app_env):
        import threading

        client, _ = app_env
        sids = [make_session(client)["session_id"] for _ in range(3)]
        results = {}

        def advance(sid):
            results[sid] = client.post(f"/api/session/{sid}/schedules/next")

        threads = [threading.Thread(target=advance, args=(s,)) for s in sids]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        for sid in sids:
            assert results[sid].status_code == 200
            assert "schedule" in results[sid].json()


class TestHistory:
    def test_fresh_session_events(self, app_env):
        client, _ = app_env
        sid = make_session(client)["session_id"]
        events = client.get(f"/api/session/{sid}/history").json()["events"]
        assert [e["kind"] for e in events] == ["session_created",
                                               "schedule_generated"]

    def test_explained_query_event_order(self, app_env):
        client, _ = app_env
        sid = make_session(client)["session_id"]
        resp = client.post(f"/api/session/{sid}/query",
                           json={"text": "Why not WJW R89 in semester 1?"})
        token = resp.json()["query_token"]
        client.post(f"/api/session/{sid}/query/{token}/confirm",
                    json={"confirmed": True})
        kinds = [e["kind"] for e in
                 client.get(f"/api/session/{sid}/history").json()["events"]]
        i_sub = kinds.index("query_submitted")
        i_conf = kinds.index("query_confirmed")
        i_exp = kinds.index("explanation_returned")
        assert i_sub < i_conf < i_exp

    def test_unknown_session_history_404(self, app_env):
        client, _ = app_env
        assert client.get("/api/session/nope/history").status_code == 404

    def test_history_survives_restart(self, tmp_path):
        config = ServiceConfig(catalog_path=sample_catalog_path(),
                               data_dir=tmp_path / "data")
        app = create_app(config)
        with TestClient(app) as client:
            sid = make_session(client)["session_id"]
            resp = client.post(f"/api/session/{sid}/query",
                               json={"text": "Why not WJW R89 in semester 1?"})
            token = resp.json()["query_token"]
            client.post(f"/api/session/{sid}/query/{token}/confirm",
                        json={"confirmed": True})
            before = client.get(f"/api/session/{sid}/history").json()["events"]
        app2 = create_app(ServiceConfig(catalog_path=sample_catalog_path(),
                                        data_dir=tmp_path / "data"))
        with TestClient(app2) as client2:
            after = client2.get(f"/api/session/{sid}/history").json()["events"]
        assert after == before
        assert any(e["kind"] == "explanation_returned" for e in after)
