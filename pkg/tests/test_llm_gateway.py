"""Gateway: stub fixtures, hashing, and the live HTTP path against a local server."""

import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from whysched.llm_gateway import (AuthFailure, FixtureMissing, GatewayConfig,
                                  GatewayUnavailable, complete, prompt_hash,
                                  write_fixture)


class TestStub:
    def test_hit(self, tmp_path):
        fx = tmp_path / "fx.tsv"
        write_fixture(fx, {"ping": "ok"})
        gw = GatewayConfig(mode="stub", stub_fixtures=fx)
        assert complete(gw, "ping") == "ok"

    def test_miss(self, tmp_path):
        fx = tmp_path / "fx.tsv"
        write_fixture(fx, {"ping": "ok"})
        gw = GatewayConfig(mode="stub", stub_fixtures=fx)
        with pytest.raises(FixtureMissing):
            complete(gw, "pong")

    def test_trailing_whitespace_normalized(self, tmp_path):
        fx = tmp_path / "fx.tsv"
        write_fixture(fx, {"ping": "ok"})
        gw = GatewayConfig(mode="stub", stub_fixtures=fx)
        assert complete(gw, "ping   \n\n") == "ok"
        assert prompt_hash("ping") == prompt_hash("ping \n")

    def test_multiline_response_round_trips(self, tmp_path):
        fx = tmp_path / "fx.tsv"
        response = "line one\nline two\ttabbed"
        write_fixture(fx, {"p": response})
        gw = GatewayConfig(mode="stub", stub_fixtures=fx)
        assert complete(gw, "p") == response

    def test_deterministic_across_loads(self, tmp_path):
        fx = tmp_path / "fx.tsv"
        write_fixture(fx, {"p": "r"})
        gw = GatewayConfig(mode="stub", stub_fixtures=fx)
        assert complete(gw, "p") == complete(gw, "p")

    def test_disabled_raises(self):
        gw = GatewayConfig(mode="disabled")
        with pytest.raises(GatewayUnavailable):
            complete(gw, "p")

    def test_config_invariants(self, tmp_path):
        with pytest.raises(ValueError):
            GatewayConfig(mode="live")  # endpoint required
        with pytest.raises(ValueError):
            GatewayConfig(mode="stub")  # fixtures required


class _Script(BaseHTTPRequestHandler):
    responses = []

    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        body = json.loads(self.rfile.read(length))
        _Script.last_body = body
        status, payload = _Script.responses.pop(0)
        data = json.dumps(payload).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):
        pass


@pytest.fixture()
def http_server():
    server = HTTPServer(("127.0.0.1", 0), _Script)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}/v1/chat/completions"
    server.shutdown()


def ok_payload(text):
    return {"choices": [{"message": {"role": "assistant", "content": text}}]}


class TestLive:
    def test_round_trip_and_request_shape(self, http_server):
        _Script.responses = [(200, ok_payload("hello"))]
        gw = GatewayConfig(mode="live", endpoint=http_server, model="test-model")
        assert complete(gw, "prompt text") == "hello"
        assert _Script.last_body["model"] == "test-model"
        assert _Script.last_body["messages"] == [
            {"role": "user", "content": "prompt text"}]

    def test_retry_on_500_then_success(self, http_server):
        _Script.responses = [(500, {}), (200, ok_payload("second try"))]
        gw = GatewayConfig(mode="live", endpoint=http_server, model="m")
        assert complete(gw, "p") == "second try"

    def test_persistent_500_unavailable(self, http_server):
        _Script.responses = [(500, {}), (500, {})]
        gw = GatewayConfig(mode="live", endpoint=http_server, model="m")
        with pytest.raises(GatewayUnavailable):
            complete(gw, "p")

    def test_auth_failure_no_retry(self, http_server):
        _Script.responses = [(401, {"error": "bad key"})]
        gw = GatewayConfig(mode="live", endpoint=http_server, model="m")
        with pytest.raises(AuthFailure):
            complete(gw, "p")
        assert _Script.responses == []  # nothing consumed by a retry

    def test_malformed_body_unavailable(self, http_server):
        _Script.responses = [(200, {"unexpected": True})]
        gw = GatewayConfig(mode="live", endpoint=http_server, model="m")
        with pytest.raises(GatewayUnavailable):
            complete(gw, "p")

    def test_credential_header_from_env(self, http_server, monkeypatch):
        monkeypatch.setenv("WHYSCHED_LLM_KEY", "sk-test")
        _Script.responses = [(200, ok_payload("x"))]
        gw = GatewayConfig(mode="live", endpoint=http_server, model="m")
        complete(gw, "p")

    def test_unreachable_endpoint(self):
        gw = GatewayConfig(mode="live", endpoint="http://127.0.0.1:1/nope",
                           model="m", timeout_s=0.2)
        with pytest.raises(GatewayUnavailable):
            complete(gw, "p")
