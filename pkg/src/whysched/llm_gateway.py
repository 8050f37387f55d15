"""Chat-completion client plus a deterministic stub for offline tests.

This is the only module that opens network connections. Live mode posts the
common chat-completion request shape and returns the first message's content
verbatim; stub mode answers from a fixture file keyed by a content hash of
the prompt, which keeps golden tests bit-deterministic.
"""

from __future__ import annotations

import codecs
import hashlib
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import requests


class GatewayError(Exception):
    pass


class GatewayUnavailable(GatewayError):
    """Transport failure, timeout, or server error after one retry."""


class AuthFailure(GatewayError):
    """HTTP 401/403; never retried."""


class FixtureMissing(GatewayError):
    """Stub mode has no canned response for this prompt."""


@dataclass(frozen=True)
class GatewayConfig:
    mode: str = "disabled"  # "live" | "stub" | "disabled"
    endpoint: str = ""
    model: str = ""
    credential_env: str = "WHYSCHED_LLM_KEY"
    timeout_s: float = 30.0
    stub_fixtures: Optional[Path] = None

    def __post_init__(self):
        if self.mode == "live" and not self.endpoint:
            raise ValueError("live mode requires an endpoint")
        if self.mode == "stub" and self.stub_fixtures is None:
            raise ValueError("stub mode requires a fixture path")


def prompt_hash(prompt: str) -> str:
    """Stable content hash; trailing whitespace does not matter."""
    return hashlib.sha256(prompt.rstrip().encode("utf-8")).hexdigest()


def write_fixture(path: Path, responses: dict[str, str]) -> None:
    """Record prompt -> response pairs for stub mode (appends)."""
    with open(path, "a", encoding="utf-8") as fp:
        for prompt, response in responses.items():
            escaped = codecs.encode(response, "unicode_escape").decode("ascii")
            fp.write(f"{prompt_hash(prompt)}\t{escaped}\n")


def _load_fixtures(path: Path) -> dict[str, str]:
    fixtures = {}
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        key, _, escaped = line.partition("\t")
        fixtures[key] = codecs.decode(escaped, "unicode_escape")
    return fixtures


def complete(config: GatewayConfig, prompt: str) -> str:
    """Single-turn completion. Raises GatewayError subclasses on failure."""
    if config.mode == "disabled":
        raise GatewayUnavailable("gateway is disabled by configuration")
    if config.mode == "stub":
        fixtures = _load_fixtures(config.stub_fixtures)
        key = prompt_hash(prompt)
        if key not in fixtures:
            raise FixtureMissing(f"no stub fixture for prompt hash {key[:12]}...")
        return fixtures[key]
    return _complete_live(config, prompt)


def _complete_live(config: GatewayConfig, prompt: str) -> str:
    headers = {"Content-Type": "application/json"}
    credential = os.environ.get(config.credential_env, "")
    if credential:
        headers["Authorization"] = f"Bearer {credential}"
    body = {"model": config.model,
            "messages": [{"role": "user", "content": prompt}]}
    last_error: Optional[Exception] = None
    for attempt in range(2):
        try:
            resp = requests.post(config.endpoint, json=body, headers=headers,
                                 timeout=config.timeout_s)
        except requests.RequestException as e:
            last_error = e
            continue
        if resp.status_code in (401, 403):
            raise AuthFailure(f"authentication rejected (HTTP {resp.status_code})")
        if resp.status_code >= 500:
            last_error = GatewayUnavailable(f"HTTP {resp.status_code}")
            continue
        if resp.status_code != 200:
            raise GatewayUnavailable(f"unexpected HTTP {resp.status_code}")
        try:
            payload = resp.json()
            return payload["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as e:
            raise GatewayUnavailable(f"malformed completion response: {e}") from e
    raise GatewayUnavailable(f"gateway unreachable after retry: {last_error}")
