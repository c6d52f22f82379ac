"""Chat-completion client: a live OpenAI-style HTTP transport (opt-in,
never used by tests) and a fixture-backed mock that performs zero
network activity."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path


class ChatClientError(RuntimeError):
    pass


class MockTransportError(ChatClientError):
    """A mock-mode request had no matching fixture."""


@dataclass
class ChatClient:
    """`complete(prompt, tag)` returns the model's text response.

    In mock mode the response is read from `<fixture_dir>/<tag>.txt`;
    `network_calls` counts live HTTP requests and stays 0 in mock mode.
    The live token is read from the environment variable named by
    `token_env` at request time and never stored.
    """

    mock: bool = True
    fixture_dir: str | os.PathLike | None = None
    base_url: str = "https://api.openai.com/v1"
    model: str = "gpt-3.5-turbo"
    token_env: str = "MGCLR_LLM_TOKEN"
    timeout: float = 60.0
    network_calls: int = field(default=0, init=False)

    def complete(self, prompt: str, tag: str) -> str:
        if self.mock:
            return self._complete_mock(tag)
        return self._complete_live(prompt)

    def _complete_mock(self, tag: str) -> str:
        if self.fixture_dir is None:
            raise MockTransportError("mock mode needs a fixture_dir")
        safe = tag.replace("/", "_")
        path = Path(self.fixture_dir) / f"{safe}.txt"
        if not path.is_file():
            raise MockTransportError(f"no fixture for tag '{tag}' at {path}")
        return path.read_text()

    def _complete_live(self, prompt: str) -> str:
        import requests

        token = os.environ.get(self.token_env)
        if not token:
            raise ChatClientError(
                f"live mode needs an API token in the environment variable {self.token_env}"
            )
        self.network_calls += 1
        response = requests.post(
            f"{self.base_url.rstrip('/')}/chat/completions",
            headers={"Authorization": f"Bearer {token}"},
            json={
                "model": self.model,
                "messages": [{"role": "user", "content": prompt}],
                "temperature": 1.0,
            },
            timeout=self.timeout,
        )
        if response.status_code != 200:
            raise ChatClientError(
                f"chat endpoint returned {response.status_code}: {response.text[:500]}"
            )
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, json.JSONDecodeError) as exc:
            raise ChatClientError(f"malformed chat response: {exc}") from exc
